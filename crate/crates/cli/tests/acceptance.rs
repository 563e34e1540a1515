//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use odyn_cli::{parse_family, parse_open_dynamics, serialize_open_dynamics};
use odyn_core::dynamics::{enumerate_realizations, enumerate_scanned_realizations};
use odyn_core::family::{
    family_connective_structure, flexible_heaps, functional_heaps, generate, primo_generated_with_tuples,
    GenerationOptions,
};
use odyn_core::open::{parametric_quotient, validate_open};
use odyn_core::transition::{compose, Transition};
use odyn_core::{Assignment, DynamicFamily, GenerationMode, OpenDynamics, ParamEquivalence};
use odyn_testkit::fixtures::{fixture1, fixture2, set};
use odyn_testkit::{oracle, random};

const TRIPLES: u64 = 1000;
const CLOCK_INSTANCES: u64 = 200;
const SCANNED_INSTANCES: u64 = 300;
const FAMILIES: u64 = 100;
const RELATIONS: u64 = 300;

type Check = Result<(), String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Check {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn corpus() -> Vec<DynamicFamily> {
    let mut out = vec![fixture1(), fixture2()];
    out.extend((0..FAMILIES).map(|seed| random::family(&mut random::rng(seed))));
    out
}

fn transition_laws() -> Check {
    let start = Instant::now();
    for seed in 0..TRIPLES {
        let (f, g, h) = random::composable_triple(&mut random::rng(seed));
        let left = compose(&compose(&f, &g).unwrap(), &h).unwrap();
        let right = compose(&f, &compose(&g, &h).unwrap()).unwrap();
        ensure(left == right, || format!("associativity fails for seed {seed}"))?;
        let id_a = Transition::identity(f.source().clone());
        let id_b = Transition::identity(f.target().clone());
        ensure(compose(&id_a, &f).unwrap() == f, || {
            format!("left unit fails for seed {seed}")
        })?;
        ensure(compose(&f, &id_b).unwrap() == f, || {
            format!("right unit fails for seed {seed}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(5))
}

fn realization_oracle() -> Check {
    let start = Instant::now();
    for seed in 0..CLOCK_INSTANCES {
        let (h, d) = random::clock_and_dynamics(&mut random::rng(seed));
        let got: BTreeSet<Assignment> = enumerate_realizations(&h, &d).unwrap().into_iter().collect();
        ensure(got == oracle::realizations(&h, &d), || {
            format!("mismatch for seed {seed}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(60))
}

fn scanned_injectivity(families: &[DynamicFamily]) -> Check {
    let mut violations = 0;
    for seed in 0..SCANNED_INSTANCES {
        let a = random::scanned(&mut random::rng(seed));
        violations += enumerate_scanned_realizations(&a)
            .iter()
            .filter(|r| !r.is_injective())
            .count();
    }
    for f in families {
        for a in f.components().values() {
            for p in a.params() {
                let slice = a.slice(p).unwrap();
                violations += enumerate_scanned_realizations(&slice)
                    .iter()
                    .filter(|r| !r.is_injective())
                    .count();
            }
        }
    }
    ensure(violations == 0, || format!("{violations} non-injective realizations"))
}

fn generated_datation(families: &[DynamicFamily]) -> Check {
    let mut violations = 0;
    for f in families {
        for mode in GenerationMode::ALL {
            let g = generate(f, mode, GenerationOptions::default()).map_err(|e| e.to_string())?;
            violations += validate_open(&g).len();
        }
    }
    ensure(violations == 0, || format!("{violations} scansion violations"))
}

fn heaps_of(f: &DynamicFamily, flexible: bool) -> Vec<BTreeSet<String>> {
    let h = if flexible {
        flexible_heaps(f, None).unwrap()
    } else {
        functional_heaps(f, None).unwrap()
    };
    h.0.into_values().collect()
}

fn show(sets: &[BTreeSet<String>]) -> String {
    let parts: Vec<String> = sets
        .iter()
        .map(|s| format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(",")))
        .collect();
    format!("({})", parts.join(","))
}

fn image(a: &OpenDynamics, param: &str, state: &str) -> BTreeSet<String> {
    a.multi().transition("e", param).unwrap().apply(state).clone()
}

fn fixture1_reproduction() -> Check {
    let start = Instant::now();
    let f = fixture1();
    let mut failures = Vec::new();

    let p = primo_generated_with_tuples(&f, false).unwrap();
    if oracle::reshape(&p) != oracle::primo(&f, false) {
        failures.push("primo dynamics differs from the oracle".to_string());
    }
    let states = p.dynamics.multi().all_states().len();
    if states != 5 {
        failures.push(format!("primo dynamics has {states} states"));
    }
    if image(&p.dynamics, "(u,w)", "(a,x)") != set(&["(b,y)"])
        || image(&p.dynamics, "(v,w)", "(a,x)") != set(&["(c,z)"])
    {
        failures.push("primo transitions differ".to_string());
    }

    let uv = set(&["u", "v"]);
    let expected_f = vec![uv.clone(), set(&["w"])];
    let expected_s = vec![uv, set(&["w"])];
    let nf = heaps_of(&f, false);
    let ns = heaps_of(&f, true);
    let oracle_f: Vec<_> = oracle::functional_heaps(f.interaction()).into_values().collect();
    let oracle_s: Vec<_> = oracle::flexible_heaps(f.interaction()).into_values().collect();
    if nf != oracle_f || ns != oracle_s {
        failures.push("heaps differ from the oracle".to_string());
    }
    if nf != expected_f {
        failures.push(format!("functional heaps {} expected {}", show(&nf), show(&expected_f)));
    }
    if ns != expected_s {
        failures.push(format!("flexible heaps {} expected {}", show(&ns), show(&expected_s)));
    }

    let gen = |mode| generate(&f, mode, GenerationOptions::default()).unwrap();
    let (gf, gs, gm) = (
        gen(GenerationMode::Functional),
        gen(GenerationMode::Flexible),
        gen(GenerationMode::Mono),
    );
    if gf != gm || gs != gm {
        failures.push("functional, flexible and mono dynamics differ".to_string());
    }
    let label = gm.params().iter().next().unwrap().clone();
    if gm.params().len() != 1 || image(&gm, &label, "(a,x)") != set(&["(b,y)", "(c,z)"]) {
        failures.push("mono transition is not the merged one".to_string());
    }

    let expected_c = vec![set(&["0"]), set(&["1"]), set(&["0", "1"])];
    if family_connective_structure(&f, false) != expected_c {
        failures.push("connective structure differs".to_string());
    }
    if let Err(e) = within(start.elapsed(), Duration::from_secs(1)) {
        failures.push(e);
    }
    ensure(failures.is_empty(), || failures.join("; "))
}

fn fixture2_reproduction() -> Check {
    let start = Instant::now();
    let f = fixture2();
    let ns = heaps_of(&f, true);
    let empty = BTreeSet::new();
    ensure(ns == vec![empty.clone(), empty], || {
        format!("flexible heaps {}", show(&ns))
    })?;
    ensure(
        oracle::flexible_heaps(f.interaction())
            .into_values()
            .collect::<Vec<_>>()
            == ns,
        || "flexible heaps differ from the oracle".to_string(),
    )?;
    let nf0 = functional_heaps(&f, None).unwrap().0["0"].clone();
    ensure(!nf0.contains("u") && !nf0.contains("v"), || {
        format!("functional heap of 0 is {nf0:?}")
    })?;
    let expected = vec![set(&["0"]), set(&["1"])];
    let c = family_connective_structure(&f, false);
    ensure(c == expected, || format!("connective structure {}", show(&c)))?;
    let rm = f.interaction().rm();
    let index: Vec<String> = rm.index().into_iter().collect();
    let graph: Vec<_> = rm.graph().iter().cloned().collect();
    ensure(oracle::connective_structure(&index, &graph, false) == expected, || {
        "exhaustive bipartition search disagrees".to_string()
    })?;
    within(start.elapsed(), Duration::from_secs(1))
}

fn union_law(families: &[DynamicFamily]) -> Check {
    for (k, f) in families.iter().enumerate() {
        let p = generate(f, GenerationMode::Primo, GenerationOptions::default()).unwrap();
        let m = generate(f, GenerationMode::Mono, GenerationOptions::default()).unwrap();
        let label = m.params().iter().next().unwrap();
        for e in p.motor().edges() {
            let union = p
                .multi()
                .family(&e.id)
                .unwrap()
                .iter()
                .map(|(_, t)| t.clone())
                .reduce(|a, b| a.union(&b).unwrap())
                .unwrap();
            ensure(m.multi().transition(&e.id, label) == Some(&union), || {
                format!("family {k}, edge {}", e.id)
            })?;
        }
    }
    Ok(())
}

fn discrete_quotient(families: &[DynamicFamily]) -> Check {
    for (k, f) in families.iter().enumerate() {
        let p = generate(f, GenerationMode::Primo, GenerationOptions::default()).unwrap();
        let q = parametric_quotient(&p, &ParamEquivalence::discrete(p.params())).unwrap();
        for e in p.motor().edges() {
            for pid in p.params() {
                let label = ParamEquivalence::label(&BTreeSet::from([pid.clone()]));
                let before: BTreeMap<_, _> = p.multi().transition(&e.id, pid).unwrap().images().collect();
                let after: BTreeMap<_, _> = q.multi().transition(&e.id, &label).unwrap().images().collect();
                ensure(before == after, || {
                    format!("family {k}, edge {}, parameter {pid}", e.id)
                })?;
            }
        }
    }
    Ok(())
}

fn connective_oracle(families: &[DynamicFamily]) -> Check {
    let start = Instant::now();
    for seed in 0..RELATIONS {
        let c = random::relation(&mut random::rng(seed), 5);
        let rm = c.rm();
        let index: Vec<u8> = rm.index().into_iter().collect();
        let graph: Vec<_> = rm.graph().iter().cloned().collect();
        for flag in [false, true] {
            ensure(
                c.connective_structure(flag) == oracle::connective_structure(&index, &graph, flag),
                || format!("relation seed {seed}"),
            )?;
        }
    }
    for (k, f) in families.iter().enumerate() {
        let rm = f.interaction().rm();
        let index: Vec<String> = rm.index().into_iter().collect();
        let graph: Vec<_> = rm.graph().iter().cloned().collect();
        ensure(
            family_connective_structure(f, false) == oracle::connective_structure(&index, &graph, false),
            || format!("family {k}"),
        )?;
    }
    within(start.elapsed(), Duration::from_secs(60))
}

fn odyn(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_odyn"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })
}

fn cli_round_trip() -> Check {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: String| -> String { dir.path().join(name).to_str().unwrap().to_string() };
    for name in ["fixture1", "fixture2"] {
        let input = fixtures.join(format!("{name}.odf"));
        let input = input.to_str().unwrap();
        let doc =
            parse_family(&std::fs::read_to_string(input).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for mode in ["p", "f", "s", "m"] {
            let (first, second) = (path(format!("{name}_{mode}_1")), path(format!("{name}_{mode}_2")));
            odyn(&["generate", input, "--mode", mode, "--out", &first])?;
            odyn(&["generate", input, "--mode", mode, "--out", &second])?;
            let a = std::fs::read(&first).map_err(|e| e.to_string())?;
            let b = std::fs::read(&second).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{name} mode {mode}: runs differ"))?;
            let text = String::from_utf8(a).map_err(|e| e.to_string())?;
            let (id, parsed) = parse_open_dynamics(&text).map_err(|e| e.to_string())?;
            ensure(serialize_open_dynamics(&parsed, &id) == text, || {
                format!("{name} mode {mode}: serialize, parse, serialize is not byte-identical")
            })?;
            let direct = generate(&doc.family, mode.parse().unwrap(), GenerationOptions::default()).unwrap();
            ensure(parsed == direct, || {
                format!("{name} mode {mode}: parsed output differs from the library")
            })?;
        }
        for cmd in [
            vec!["connective"],
            vec!["heaps", "--mode", "f"],
            vec!["heaps", "--mode", "s"],
            vec!["validate"],
        ] {
            let outs: Vec<String> = (0..2).map(|k| path(format!("{name}_{}_{k}", cmd.join("_")))).collect();
            for o in &outs {
                let mut args = vec![cmd[0], input];
                args.extend(&cmd[1..]);
                args.extend(["--out", o.as_str()]);
                odyn(&args)?;
            }
            let read = |p: &str| std::fs::read(Path::new(p)).unwrap();
            ensure(read(&outs[0]) == read(&outs[1]), || {
                format!("{name} {}: runs differ", cmd.join(" "))
            })?;
        }
    }
    Ok(())
}

fn main() {
    let families = corpus();
    let criteria: Vec<Criterion> = vec![
        ("transition laws", Box::new(transition_laws)),
        ("realization oracle equivalence", Box::new(realization_oracle)),
        (
            "scanned-realization injectivity",
            Box::new(|| scanned_injectivity(&families)),
        ),
        (
            "generated-dynamics datation law",
            Box::new(|| generated_datation(&families)),
        ),
        ("fixture 1 reproduction", Box::new(fixture1_reproduction)),
        ("fixture 2 reproduction", Box::new(fixture2_reproduction)),
        ("union law", Box::new(|| union_law(&families))),
        ("quotient identity", Box::new(|| discrete_quotient(&families))),
        ("connective-structure oracle", Box::new(|| connective_oracle(&families))),
        ("CLI round trip and determinism", Box::new(cli_round_trip)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS {:>2} {name} ({secs:.2}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2}s): {why}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
