use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dirac_hardy_core::fields::BandLimitedSpec;
use dirac_hardy_core::operators::{apply_free_resolvent, FreeDiracParams, Sign};
use dirac_hardy_core::solver::{solve, SolverConfig};
use dirac_hardy_core::verification::{sharpness_sweep, sweep_grid, verify, ExtremizerFamily, InequalityId, VerifyInput, VerifyParams};
use dirac_hardy_core::{CartesianGrid, MatrixPotential, RadialGrid};

fn resolvent(c: &mut Criterion) {
    let mut g = c.benchmark_group("free_resolvent");
    let p = FreeDiracParams::new(1.0, 1.0, Sign::Plus).unwrap();
    for n in [16, 32] {
        let f = BandLimitedSpec::new(1, 4).sample(CartesianGrid::new(8.0, n).unwrap()).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| apply_free_resolvent(black_box(f), &p).unwrap())
        });
    }
    g.finish();
}

fn neumann(c: &mut Criterion) {
    let f = BandLimitedSpec::new(2, 4).sample(CartesianGrid::new(8.0, 16).unwrap()).unwrap();
    let v = MatrixPotential::coulomb(0.5).unwrap();
    let cfg = SolverConfig::new(Sign::Plus, 0.0);
    c.bench_function("neumann_coulomb_half_n16", |b| b.iter(|| solve(black_box(&f), &v, &cfg).unwrap()));
}

fn inequalities(c: &mut Criterion) {
    let grid = RadialGrid::new(1e-4, 40.0, 2048).unwrap();
    let psi = ExtremizerFamily::exp_lambda_extremal(1.0, 0.0).unwrap().dirac(grid).unwrap();
    let input = VerifyInput::Dirac(psi);
    let params = VerifyParams::new(1.0, 0.0);
    c.bench_function("verify_hardy_dirac_channel", |b| {
        b.iter(|| verify(InequalityId::HardyDiracFinal, black_box(&input), &params).unwrap())
    });
    c.bench_function("sharpness_sweep_4", |b| {
        b.iter(|| sharpness_sweep(1.0, 0.0, &[0.4, 0.2, 0.1, 0.05], sweep_grid()).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = resolvent, neumann, inequalities
}
criterion_main!(benches);
