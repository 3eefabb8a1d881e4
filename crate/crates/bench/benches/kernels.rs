use criterion::{black_box, criterion_group, criterion_main, Criterion};
use zscale::cutproject::{generate_model_set, z_pure_point, CutProjectScheme, Window};
use zscale::numbertheory::z_squarefree;
use zscale::renorm::amplitude_exponent;
use zscale::riesz::{ln_distribution_at_scale, default_extra_depth, RieszFactor, TmFourierSeries};
use zscale::stochastic::{empirical_z, sample, z_analytic, AnalyticModel, Weighting};
use zscale::substitution::catalogue;

fn cut_and_project(c: &mut Criterion) {
    let scheme = CutProjectScheme::golden();
    let window = Window::noble(&scheme);
    c.bench_function("model_set_r1e4", |b| b.iter(|| generate_model_set(&scheme, &window, black_box(1e4)).unwrap()));
    let s = window.length();
    c.bench_function("z_pure_point_fibonacci", |b| b.iter(|| z_pure_point(&scheme, &s, black_box(0.05), 50.0).unwrap()));
}

fn cocycle(c: &mut Criterion) {
    let rule = catalogue("period-doubling", &[]).unwrap();
    c.bench_function("amplitude_exponent_pd_n50", |b| b.iter(|| amplitude_exponent(&rule, black_box(0.3), 50, 10).unwrap()));
}

fn riesz(c: &mut Criterion) {
    c.bench_function("tm_fourier_series_2e16", |b| b.iter(|| TmFourierSeries::new(black_box(1 << 16)).unwrap()));
    let gtm = RieszFactor::new(3, 2).unwrap();
    let extra = default_extra_depth(gtm.base());
    c.bench_function("gtm_3_2_distribution_n8", |b| b.iter(|| ln_distribution_at_scale(&gtm, black_box(8), extra)));
}

fn number_theory(c: &mut Criterion) {
    c.bench_function("z_squarefree_s8192", |b| b.iter(|| z_squarefree(black_box(1e-3), 8192).unwrap()));
}

fn stochastic(c: &mut Criterion) {
    let model = AnalyticModel::Markov { p: 0.7, q: 0.5 };
    c.bench_function("z_analytic_markov", |b| b.iter(|| z_analytic(&model, black_box(0.2)).unwrap()));
    let bern = AnalyticModel::Bernoulli { p: 0.5, weighting: Weighting::PlusMinus };
    let real = sample(&bern, 1e4, 1).unwrap();
    c.bench_function("empirical_z_bernoulli_r1e4", |b| b.iter(|| empirical_z(&real, black_box(0.25), 10_000).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = cut_and_project, cocycle, riesz, number_theory, stochastic
}
criterion_main!(benches);
