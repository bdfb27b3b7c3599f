use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fpcx::complexity::{complexity_exact, theorem4_sweep, Family, FamilyKind};
use fpcx::curves::{bilinear_sum, histogram_nn, BilinearInstance};
use fpcx::field::PrimeField;
use fpcx::par::Exec;
use fpcx::subsets::ResidueSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn histogram(c: &mut Criterion) {
    let mut g = c.benchmark_group("histogram_nn");
    g.sample_size(10);
    for p in [499u64, 1999] {
        let f = PrimeField::new(p).unwrap();
        let inst = BilinearInstance::random(p, 3, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, p), &inst, |b, inst| b.iter(|| histogram_nn(&f, inst, exec).unwrap()));
        }
    }
    g.finish();
}

fn bilinear(c: &mut Criterion) {
    let mut g = c.benchmark_group("bilinear_sum");
    g.sample_size(10);
    let p = 499;
    let f = PrimeField::new(p).unwrap();
    let inst = BilinearInstance::random(p, 2, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| bilinear_sum(&f, &inst, exec).unwrap()));
    }
    g.finish();
}

fn complexity(c: &mut Criterion) {
    let mut g = c.benchmark_group("complexity_p2");
    g.sample_size(10);
    let p = 13;
    let f = PrimeField::new(p).unwrap();
    let set = ResidueSet::from_elements(p, 1..=6).unwrap();
    let kind = FamilyKind::new(Family::P2, 2).unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| complexity_exact(&kind, &f, &set, 13, exec).unwrap()));
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("construction_sweep");
    g.sample_size(10);
    let p = 17;
    let f = PrimeField::new(p).unwrap();
    let set = ResidueSet::from_elements(p, 1..=7).unwrap();
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| theorem4_sweep(&f, &set, 2, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, histogram, bilinear, complexity, sweep);
criterion_main!(benches);
