use crate::abc::rejection::PosteriorSample;
use crate::error::{Error, Result};
use crate::linalg::ridge_cholesky;
use crate::table::ReferenceTable;

const RIDGE: f64 = 1e-8;

/// Local-linear regression adjustment of an accepted sample.
///
/// For each parameter, on its transformed scale `y = T(theta)`, fit
/// `y = a + b' x` by Epanechnikov-weighted least squares where `x` are the
/// standardized deviations `(s - s0) / scale` of the accepted rows, then set
/// `theta* = T^-1(y - b' x)`. Singular or nearly singular designs get a
/// ridge of `1e-8 * trace / p`.
pub fn adjust_loclinear(sample: &PosteriorSample, table: &ReferenceTable) -> Result<PosteriorSample> {
    let layout = sample.single_layout()?;
    let transforms = &layout.transforms;
    let d = sample.standardization.scales.len();
    let p = d + 1;
    let informative = sample.rows.iter().filter(|r| r.weight > 0.0).count();
    if informative <= p {
        return Err(Error::TooFewRowsForRegression {
            rows: informative,
            regressors: p,
        });
    }

    let s0 = sample.observed.values();
    let scales = &sample.standardization.scales;
    let design: Vec<Vec<f64>> = sample
        .rows
        .iter()
        .map(|r| {
            let pos = table.position(r.row).ok_or_else(|| {
                Error::InvalidArgument(format!("row {} is not in the reference table", r.row))
            })?;
            let s = &table.rows()[pos].stats;
            Ok(std::iter::once(1.0)
                .chain((0..d).map(|k| (s[k] - s0[k]) / scales[k]))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut xtwx = vec![0.0; p * p];
    for (x, r) in design.iter().zip(&sample.rows) {
        let w = r.weight;
        if w == 0.0 {
            continue;
        }
        for i in 0..p {
            let wxi = w * x[i];
            for j in 0..=i {
                xtwx[i * p + j] += wxi * x[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            xtwx[j * p + i] = xtwx[i * p + j];
        }
    }
    let chol = ridge_cholesky(&xtwx, p, RIDGE)
        .ok_or_else(|| Error::InvalidArgument("regression design is degenerate".into()))?;

    let mut out = sample.clone();
    for (k, t) in transforms.iter().enumerate() {
        let ys: Vec<f64> = sample.rows.iter().map(|r| t.forward(r.theta[k])).collect();
        let mut rhs = vec![0.0; p];
        for ((x, r), y) in design.iter().zip(&sample.rows).zip(&ys) {
            for i in 0..p {
                rhs[i] += r.weight * x[i] * y;
            }
        }
        chol.solve(&mut rhs);
        for ((row, x), y) in out.rows.iter_mut().zip(&design).zip(&ys) {
            let shift: f64 = (1..p).map(|i| rhs[i] * x[i]).sum();
            row.theta_adj[k] = t.inverse(y - shift);
        }
    }
    out.adjusted = true;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abc::{reject, Selection, ScaleKind, ScaleSource, Standardization};
    use crate::params::Transform;
    use crate::summary::{names, SummaryVector};
    use crate::table::{ModelLayout, TableRow};

    fn make(transform: Transform, rows: Vec<(f64, f64)>) -> ReferenceTable {
        let layout = ModelLayout {
            label: "m".into(),
            param_names: names(["x"]),
            transforms: vec![transform].into(),
        };
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, (theta, s))| TableRow {
                index: i,
                model: 0,
                params: vec![theta],
                stats: vec![s],
            })
            .collect();
        ReferenceTable::from_rows(0, vec![layout], names(["s"]), rows).unwrap()
    }

    fn unit() -> Standardization {
        Standardization {
            names: names(["s"]),
            scales: vec![1.0],
            kinds: vec![ScaleKind::Mad],
            source: ScaleSource::Pooled,
        }
    }

    #[test]
    fn exact_linear_relation_is_removed() {
        // theta = 3 + 2 (s - s0) with s0 = 1
        let rows: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let s = 1.0 + (i as f64 - 20.0) * 0.05;
                (3.0 + 2.0 * (s - 1.0), s)
            })
            .collect();
        let t = make(Transform::Identity, rows);
        let s0 = SummaryVector::new(names(["s"]), vec![1.0]).unwrap();
        let p = reject(&t, &s0, 1.0, Selection::All, &unit()).unwrap();
        let adj = adjust_loclinear(&p, &t).unwrap();
        assert!(adj.adjusted);
        for r in &adj.rows {
            assert!((r.theta_adj[0] - 3.0).abs() < 1e-6, "{}", r.theta_adj[0]);
        }
    }

    #[test]
    fn no_deviation_means_no_adjustment() {
        let rows: Vec<(f64, f64)> = (0..20).map(|i| (i as f64 * 0.5, 2.0)).collect();
        let t = make(Transform::Identity, rows);
        let s0 = SummaryVector::new(names(["s"]), vec![2.0]).unwrap();
        let p = reject(&t, &s0, 1.0, Selection::All, &unit()).unwrap();
        let adj = adjust_loclinear(&p, &t).unwrap();
        for r in &adj.rows {
            assert_eq!(r.theta_adj[0], r.theta[0]);
        }
    }

    #[test]
    fn log_transform_keeps_positivity() {
        let rows: Vec<(f64, f64)> = (0..60)
            .map(|i| {
                let s = i as f64 * 0.1;
                (0.01 + 0.5 * s, s)
            })
            .collect();
        let t = make(Transform::Log, rows);
        let s0 = SummaryVector::new(names(["s"]), vec![-50.0]).unwrap();
        let p = reject(&t, &s0, 1.0, Selection::All, &unit()).unwrap();
        let adj = adjust_loclinear(&p, &t).unwrap();
        assert!(adj.rows.iter().all(|r| r.theta_adj[0] > 0.0));
    }

    #[test]
    fn too_few_rows() {
        let t = make(Transform::Identity, vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        let s0 = SummaryVector::new(names(["s"]), vec![0.0]).unwrap();
        let p = reject(&t, &s0, 1.0, Selection::All, &unit()).unwrap();
        assert!(matches!(
            adjust_loclinear(&p, &t),
            Err(Error::TooFewRowsForRegression { .. })
        ));
    }
}
