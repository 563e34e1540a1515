use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use odyn_core::dynamics::{enumerate_realizations, enumerate_scanned_realizations};
use odyn_core::family::{flexible_heaps, functional_heaps, generate, primo_generated, GenerationOptions};
use odyn_core::GenerationMode;
use odyn_testkit::{fixtures, random};
use std::hint::black_box;

fn realizations(c: &mut Criterion) {
    let instances: Vec<_> = (0..32)
        .map(|s| random::clock_and_dynamics(&mut random::rng(s)))
        .collect();
    c.bench_function("enumerate_realizations/random32", |b| {
        b.iter(|| {
            for (h, d) in &instances {
                black_box(enumerate_realizations(h, d).unwrap());
            }
        })
    });
    let scanned: Vec<_> = (0..32).map(|s| random::scanned(&mut random::rng(s))).collect();
    c.bench_function("enumerate_scanned_realizations/random32", |b| {
        b.iter(|| {
            for a in &scanned {
                black_box(enumerate_scanned_realizations(a));
            }
        })
    });
}

fn generation(c: &mut Criterion) {
    let f2 = fixtures::fixture2();
    c.bench_function("primo_generated/fixture2", |b| {
        b.iter(|| black_box(primo_generated(&f2, false).unwrap()))
    });
    let families: Vec<_> = (0..16).map(|s| random::family(&mut random::rng(s))).collect();
    for mode in GenerationMode::ALL {
        c.bench_function(&format!("generate/{mode}/random16"), |b| {
            b.iter(|| {
                for f in &families {
                    black_box(generate(f, mode, GenerationOptions::default()).unwrap());
                }
            })
        });
    }
}

fn heaps(c: &mut Criterion) {
    let f2 = fixtures::fixture2();
    c.bench_function("functional_heaps/fixture2", |b| {
        b.iter(|| black_box(functional_heaps(&f2, None).unwrap()))
    });
    c.bench_function("flexible_heaps/fixture2", |b| {
        b.iter(|| black_box(flexible_heaps(&f2, None).unwrap()))
    });
}

fn connective(c: &mut Criterion) {
    c.bench_function("connective_structure/random5", |b| {
        b.iter_batched(
            || random::relation(&mut random::rng(7), 5).rm(),
            |rm| black_box(odyn_core::multirel::connective_structure(&rm, false)),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, realizations, generation, heaps, connective);
criterion_main!(benches);
