use std::f64::consts::TAU;
use std::sync::Arc;

use abcdic_core::abc::{
    adjust_loclinear, reject, standardize, AcceptedRow, PosteriorSample, ScaleKind, ScaleSource,
    Selection, Standardization,
};
use abcdic_core::dic::*;
use abcdic_core::distributions::PriorSpec;
use abcdic_core::rng::{open_unit, rng_from_seed};
use abcdic_core::table::ModelLayout;
use abcdic_core::*;

/// Returns the same statistics whatever the parameters and seed.
struct Fixed(Names, Vec<f64>);

impl Simulator for Fixed {
    fn stat_names(&self) -> &Names {
        &self.0
    }
    fn simulate(&self, _: &[f64], _: u64) -> Result<SummaryVector> {
        SummaryVector::new(self.0.clone(), self.1.clone())
    }
}

/// Gaussian noise around `theta` in every coordinate, or around 0 when
/// `ignore_theta`.
struct Noisy {
    names: Names,
    ignore_theta: bool,
    shift: f64,
}

impl Simulator for Noisy {
    fn stat_names(&self) -> &Names {
        &self.names
    }
    fn simulate(&self, p: &[f64], seed: u64) -> Result<SummaryVector> {
        let mut rng = rng_from_seed(seed);
        let centre = if self.ignore_theta { 0.0 } else { p[0] };
        let v = (0..self.names.len())
            .map(|_| {
                self.shift + centre + distributions::std_normal_quantile(open_unit(&mut rng))
            })
            .collect();
        SummaryVector::new(self.names.clone(), v)
    }
}

fn stat_names(d: usize) -> Names {
    names((0..d).map(|i| format!("s{i}")))
}

fn unit_std(d: usize) -> Standardization {
    Standardization {
        names: stat_names(d),
        scales: vec![1.0; d],
        kinds: vec![ScaleKind::Unit; d],
        source: ScaleSource::Pooled,
    }
}

fn model(sim: Arc<dyn Simulator>, transform_log: bool) -> ModelSpec {
    let prior = if transform_log {
        PriorSpec::Exponential { rate: 1.0 }
    } else {
        PriorSpec::Gaussian { mean: 0.0, sd: 1.0 }
    };
    ModelSpec::new("m", vec![ParamDef::new("theta", prior)], sim).unwrap()
}

fn sample_of(m: &ModelSpec, observed: Vec<f64>, thetas: &[f64], weights: &[f64]) -> PosteriorSample {
    let d = observed.len();
    PosteriorSample {
        observed: SummaryVector::new(stat_names(d), observed).unwrap(),
        layout: Some(ModelLayout::of(m)),
        tolerance: 1.0,
        acceptance_rate: 0.1,
        standardization: unit_std(d),
        adjusted: true,
        rows: thetas
            .iter()
            .zip(weights)
            .enumerate()
            .map(|(i, (&t, &w))| AcceptedRow {
                row: i,
                model: 0,
                theta: vec![t],
                theta_adj: vec![t],
                weight: w,
                distance: 0.5,
            })
            .collect(),
    }
}

fn kernel(d: usize, eps: f64) -> KernelConfig {
    KernelConfig::new(eps, &unit_std(d)).unwrap()
}

#[test]
fn kernel_identities() {
    let s0 = SummaryVector::new(stat_names(4), vec![0.3, -1.0, 2.0, 5.0]).unwrap();
    let v = neg2_log_kernel(&s0, &s0, &kernel(4, 1.0)).unwrap();
    assert!((v - 4.0 * TAU.ln()).abs() < 1e-12);
    let a = SummaryVector::new(stat_names(1), vec![1.5]).unwrap();
    assert!((neg2_log_kernel(&a, &a, &kernel(1, 1.0)).unwrap() - TAU.ln()).abs() < 1e-12);
    let s = SummaryVector::new(stat_names(2), vec![1.0, 1.0]).unwrap();
    let z = SummaryVector::new(stat_names(2), vec![0.0, 0.0]).unwrap();
    assert!((neg2_log_kernel(&s, &z, &kernel(2, 1.0)).unwrap() - (2.0 * TAU.ln() + 2.0)).abs() < 1e-12);
    let other = SummaryVector::new(names(["a", "b"]), vec![0.0, 0.0]).unwrap();
    assert!(neg2_log_kernel(&s, &other, &kernel(2, 1.0)).is_err());
}

#[test]
fn point_estimates() {
    let m = model(Arc::new(Fixed(stat_names(1), vec![0.0])), false);
    let single = sample_of(&m, vec![0.0], &[1.7], &[0.3]);
    assert_eq!(point_estimate(&single).unwrap().values(), &[1.7]);
    let pair = sample_of(&m, vec![0.0], &[1.0, 3.0], &[0.5, 0.5]);
    assert!((point_estimate(&pair).unwrap().values()[0] - 2.0).abs() < 1e-15);
    let zero = sample_of(&m, vec![0.0], &[1.0, 3.0], &[0.0, 0.0]);
    assert!(point_estimate(&zero).is_err());

    let ml = model(Arc::new(Fixed(stat_names(1), vec![0.0])), true);
    let logs = sample_of(&ml, vec![0.0], &[1f64.exp(), 3f64.exp()], &[1.0, 1.0]);
    assert!((point_estimate(&logs).unwrap().values()[0] - 2f64.exp()).abs() < 1e-12);
}

#[test]
fn degenerate_predictive() {
    let s0 = vec![1.0, 2.0, 3.0, 4.0];
    let m = model(Arc::new(Fixed(stat_names(4), s0.clone())), false);
    let sample = sample_of(&m, s0, &[0.1, 0.2, 0.5], &[1.0, 0.5, 0.2]);
    let k = kernel(4, 1.0);
    let origin = 4.0 * TAU.ln();
    for n in [1, 7, 50] {
        let v = dbar1(&sample, &m, n, &k, Aggregation::Mean, 3).unwrap();
        assert!((v - origin).abs() < 1e-12);
    }
    assert!((dbar2(&sample, &m, 5, 4, &k, Aggregation::Mean, 3).unwrap() - origin).abs() < 1e-12);
    let r1 = dic1(&sample, &m, 20, &k, Aggregation::Mean, 1).unwrap();
    let r2 = dic2(&sample, &m, 5, 5, &k, Aggregation::Mean, 1).unwrap();
    assert_eq!(r1.p_d, 0.0);
    assert_eq!(r2.p_d, 0.0);
}

#[test]
fn single_term_cases() {
    let m = model(
        Arc::new(Noisy { names: stat_names(2), ignore_theta: false, shift: 0.0 }),
        false,
    );
    let sample = sample_of(&m, vec![0.2, -0.1], &[0.5], &[1.0]);
    let k = kernel(2, 0.8);
    let draws = predictive_draws(&sample, &m, 1, 9).unwrap();
    let s = SummaryVector::new(stat_names(2), draws[0].clone()).unwrap();
    let direct = neg2_log_kernel(&s, &sample.observed, &k).unwrap();
    let v1 = dbar1(&sample, &m, 1, &k, Aggregation::Mean, 9).unwrap();
    assert!((v1 - direct).abs() < 1e-12);
    let g = grouped_deviances(&sample, &m, 1, 1, &k, 9).unwrap();
    let v2 = dbar2(&sample, &m, 1, 1, &k, Aggregation::Mean, 9).unwrap();
    assert!((v2 - g[0][0]).abs() < 1e-12);
}

#[test]
fn jensen_ordering_per_group() {
    let m = model(
        Arc::new(Noisy { names: stat_names(3), ignore_theta: false, shift: 0.0 }),
        false,
    );
    let sample = sample_of(&m, vec![0.0, 0.3, -0.2], &[-0.5, 0.0, 0.4, 1.0], &[0.2, 1.0, 0.7, 0.1]);
    let k = kernel(3, 0.7);
    let groups = grouped_deviances(&sample, &m, 30, 40, &k, 5).unwrap();
    let d2 = dbar2(&sample, &m, 30, 40, &k, Aggregation::Mean, 5).unwrap();
    let mut level1_mean = 0.0;
    for g in &groups {
        let avg = g.iter().sum::<f64>() / g.len() as f64;
        let lme = {
            let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
            lo - 2.0 * (g.iter().map(|v| (-(v - lo) / 2.0).exp()).sum::<f64>() / g.len() as f64).ln()
        };
        assert!(lme <= avg + 1e-12);
        level1_mean += avg / groups.len() as f64;
    }
    assert!(d2 <= level1_mean);
}

#[test]
fn report_identities_and_determinism() {
    let m = model(
        Arc::new(Noisy { names: stat_names(2), ignore_theta: false, shift: 0.0 }),
        false,
    );
    let sample = sample_of(&m, vec![0.4, 0.1], &[0.0, 0.3, 0.6, 0.9], &[0.4, 1.0, 0.8, 0.2]);
    let k = kernel(2, 0.5);
    for agg in [Aggregation::Mean, Aggregation::Median] {
        let a = dic1(&sample, &m, 200, &k, agg, 17).unwrap();
        let b = dic1(&sample, &m, 200, &k, agg, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.p_d, a.d_bar - a.d_hat);
        assert_eq!(a.dic, a.d_bar + a.p_d);
        let c = dic2(&sample, &m, 20, 30, &k, agg, 17).unwrap();
        assert_eq!(c, dic2(&sample, &m, 20, 30, &k, agg, 17).unwrap());
        assert_eq!(c.p_d, c.d_bar - c.d_hat);
        assert_eq!(c.dic, c.d_bar + c.p_d);
        assert_eq!((c.variant, c.m), (2, Some(20)));
    }
    assert!(dic1(&sample, &m, 0, &k, Aggregation::Mean, 1).is_err());
    assert!(dic2(&sample, &m, 0, 3, &k, Aggregation::Mean, 1).is_err());
}

#[test]
fn thread_count_does_not_change_reports() {
    let m = model(
        Arc::new(Noisy { names: stat_names(2), ignore_theta: false, shift: 0.0 }),
        false,
    );
    let sample = sample_of(&m, vec![0.4, 0.1], &[0.0, 0.3, 0.6], &[0.4, 1.0, 0.8]);
    let k = kernel(2, 0.5);
    let par = dic2(&sample, &m, 16, 16, &k, Aggregation::Mean, 2).unwrap();
    let seq = par::sequential(|| dic2(&sample, &m, 16, 16, &k, Aggregation::Mean, 2).unwrap());
    assert_eq!(par, seq);
}

#[test]
fn json_field_names() {
    let m = model(Arc::new(Fixed(stat_names(1), vec![0.0])), false);
    let sample = sample_of(&m, vec![0.0], &[1.0], &[1.0]);
    let r = dic2(&sample, &m, 2, 2, &kernel(1, 1.0), Aggregation::Median, 0).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["variant", "dBar", "dHat", "pD", "dic", "aggregation", "n", "m", "epsilon", "warnings", "pointEstimate"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["aggregation"], "median");
}

#[test]
fn parameter_free_simulator_has_no_penalty() {
    let m = model(
        Arc::new(Noisy { names: stat_names(3), ignore_theta: true, shift: 0.0 }),
        false,
    );
    let sample = sample_of(&m, vec![0.1, -0.2, 0.3], &[-2.0, 0.0, 5.0], &[1.0, 1.0, 1.0]);
    let r = dic1(&sample, &m, 500, &kernel(3, 1.0), Aggregation::Mean, 4).unwrap();
    // same seeds for both terms and theta has no influence
    assert_eq!(r.p_d, 0.0);
}

#[test]
fn monte_carlo_error_shrinks_with_n() {
    let m = model(
        Arc::new(Noisy { names: stat_names(2), ignore_theta: false, shift: 0.0 }),
        false,
    );
    let sample = sample_of(&m, vec![0.0, 0.0], &[-0.5, 0.0, 0.5], &[1.0, 1.0, 1.0]);
    let k = kernel(2, 1.0);
    let sd = |n: usize| {
        let v: Vec<f64> = (0..20)
            .map(|r| dbar1(&sample, &m, n, &k, Aggregation::Mean, 1000 + r).unwrap())
            .collect();
        let mean = v.iter().sum::<f64>() / 20.0;
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 19.0).sqrt()
    };
    let ratio = sd(100) / sd(1000);
    let expected = 10f64.sqrt();
    assert!(ratio > expected / 2.0 && ratio < expected * 2.0, "ratio {ratio}");
}

#[test]
fn shifting_all_statistics_leaves_reports_unchanged() {
    // a full pipeline run on a table and on the same table with every
    // statistic shifted by a constant
    let run = |shift: f64| {
        let sim = Arc::new(Noisy { names: stat_names(2), ignore_theta: false, shift });
        let m = model(sim, false);
        let table = build_reference_table(std::slice::from_ref(&m), 2000, 8).unwrap();
        let std = standardize(&table).unwrap();
        let s0 = SummaryVector::new(stat_names(2), vec![0.3 + shift, 0.1 + shift]).unwrap();
        let pooled = reject(&table, &s0, 0.1, Selection::All, &std).unwrap();
        let k = KernelConfig::new(pooled.tolerance, &std).unwrap();
        let post = adjust_loclinear(&reject(&table, &s0, 0.1, Selection::Model("m"), &std).unwrap(), &table).unwrap();
        (
            dic1(&post, &m, 100, &k, Aggregation::Mean, 3).unwrap(),
            dic2(&post, &m, 10, 10, &k, Aggregation::Mean, 3).unwrap(),
        )
    };
    let (a1, a2) = run(0.0);
    let (b1, b2) = run(1000.0);
    for (a, b) in [(a1, b1), (a2, b2)] {
        assert!((a.d_bar - b.d_bar).abs() < 1e-9 * a.d_bar.abs().max(1.0), "{} {}", a.d_bar, b.d_bar);
        assert!((a.d_hat - b.d_hat).abs() < 1e-9 * a.d_hat.abs().max(1.0));
        assert!((a.dic - b.dic).abs() < 1e-9 * a.dic.abs().max(1.0));
    }
}

#[test]
fn predictive_check_quantiles() {
    let names = stat_names(1);
    let draws: Vec<Vec<f64>> = (1..=9).map(|i| vec![i as f64]).collect();
    let central = PredictiveCheck::from_draws(&names, &[5.0], &draws);
    assert_eq!(central.rows[0].tail_prob, 1.0);
    let extreme = PredictiveCheck::from_draws(&names, &[100.0], &draws);
    assert!(extreme.rows[0].tail_prob <= 2.0 / 10.0);
    assert_eq!(extreme.rows[0].quantile, 1.0);
    let ties = PredictiveCheck::from_draws(&names, &[1.0], &[vec![1.0], vec![1.0]]);
    assert_eq!(ties.rows[0].quantile, 0.5);
}
