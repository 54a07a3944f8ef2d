use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use locdiv::cohomology::{cocycle_space, h1_loc};
use locdiv::families::{build_family, FamilyCase, FamilySpec};
use locdiv::matgroup::close_group;
use locdiv::modring::{howell_form, smith_form, ModMatrix, Modulus};

fn families() -> Vec<(String, FamilySpec)> {
    [
        FamilySpec::new(5, 3, FamilyCase::N3JEqM),
        FamilySpec::new(5, 4, FamilyCase::JLtM),
        FamilySpec::new(7, 4, FamilyCase::JGeMEq),
    ]
    .into_iter()
    .map(|s| (format!("{}-p{}-n{}", s.case, s.p, s.n), s))
    .collect()
}

fn closure(c: &mut Criterion) {
    let mut g = c.benchmark_group("close_group");
    for (name, spec) in families() {
        let f = build_family(&spec).unwrap();
        let md = f.group.modulus();
        let gens = f.group.generators().to_vec();
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| close_group(md, black_box(&gens), 1 << 20).unwrap())
        });
    }
    g.finish();
}

fn cohomology(c: &mut Criterion) {
    let mut g = c.benchmark_group("cohomology");
    g.sample_size(20);
    for (name, spec) in families() {
        let group = build_family(&spec).unwrap().group;
        g.bench_function(BenchmarkId::new("cocycle_space", &name), |b| {
            b.iter(|| cocycle_space(black_box(&group)))
        });
        g.bench_function(BenchmarkId::new("h1_loc", &name), |b| b.iter(|| h1_loc(black_box(&group))));
    }
    g.finish();
}

// Deterministic dense matrix with plenty of non-unit entries.
fn sample_matrix(md: Modulus, rows: usize, cols: usize) -> ModMatrix {
    let q = md.value();
    let mut x = 0x9e37_79b9_u64;
    let data: Vec<Vec<u64>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (x >> 33) % q
                })
                .collect()
        })
        .collect();
    ModMatrix::from_rows(md, &data).unwrap()
}

fn normal_forms(c: &mut Criterion) {
    let mut g = c.benchmark_group("normal_forms");
    let md = Modulus::new(5, 4).unwrap();
    for size in [8usize, 32, 64] {
        let a = sample_matrix(md, size, size);
        g.bench_function(BenchmarkId::new("howell", size), |b| b.iter(|| howell_form(black_box(&a))));
        g.bench_function(BenchmarkId::new("smith", size), |b| b.iter(|| smith_form(black_box(&a))));
    }
    g.finish();
}

criterion_group!(benches, closure, cohomology, normal_forms);
criterion_main!(benches);
