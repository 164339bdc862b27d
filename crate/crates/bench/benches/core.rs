use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kmilnor::bncomplex::{b_n, BnComplexSpec};
use kmilnor::config::Caps;
use kmilnor::fgab::{smith_normal_form_with_inverses, IntMatrix};
use kmilnor::fields::{parse_support, Field};
use kmilnor::milnor::{KGroupProvider, MemoryKGroups};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn snf(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    for size in [10usize, 20, 30] {
        let mut rng = ChaCha8Rng::seed_from_u64(size as u64);
        let m: Vec<Vec<i64>> = (0..size).map(|_| (0..size).map(|_| rng.gen_range(-1000..=1000)).collect()).collect();
        let m = IntMatrix::from_dense(&m);
        group.bench_with_input(BenchmarkId::from_parameter(size), &m, |b, m| b.iter(|| smith_normal_form_with_inverses(m)));
    }
    group.finish();
}

fn bn(c: &mut Criterion) {
    let mut group = c.benchmark_group("b_n");
    group.sample_size(10);
    let cases = [
        ("q:-1,2,3", "-1,2,3", Field::Rational, 3),
        ("q:-1,2,3,5", "-1,2,3,5", Field::Rational, 4),
        ("f3:t,t+1", "t,t+1", Field::FunctionField(3), 5),
    ];
    for (label, support, field, n) in cases {
        let support = parse_support(support, Some(field)).unwrap();
        group.bench_function(BenchmarkId::new(label, n), |b| {
            b.iter(|| {
                // fresh provider so K-group presentations are rebuilt each time
                let p = MemoryKGroups::new(Caps::default());
                let spec = BnComplexSpec::new(support.clone(), n, p.caps()).unwrap();
                b_n(&spec, &p).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, snf, bn);
criterion_main!(benches);
