use serde::Serialize;

use crate::coalescent::genealogy::SampleConfig;
use crate::coalescent::locus::LocusData;
use crate::error::{Error, Result};
use crate::summary::{names, Names, SummaryVector};

/// Constants of Tajima's D for a sample of size `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TajimaConstants {
    pub n: usize,
    pub a1: f64,
    pub a2: f64,
    pub e1: f64,
    pub e2: f64,
}

impl TajimaConstants {
    pub fn new(n: usize) -> Self {
        let nf = n as f64;
        let a1: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
        let a2: f64 = (1..n).map(|i| 1.0 / (i * i) as f64).sum();
        let b1 = (nf + 1.0) / (3.0 * (nf - 1.0));
        let b2 = 2.0 * (nf * nf + nf + 3.0) / (9.0 * nf * (nf - 1.0));
        let c1 = b1 - 1.0 / a1;
        let c2 = b2 - (nf + 2.0) / (a1 * nf) + a2 / (a1 * a1);
        TajimaConstants {
            n,
            a1,
            a2,
            e1: c1 / a1,
            e2: c2 / (a1 * a1 + a2),
        }
    }

    /// `None` when there are no segregating sites or the variance vanishes
    /// (samples of fewer than four).
    pub fn d(&self, pi: f64, s: usize) -> Option<f64> {
        let sf = s as f64;
        let var = self.e1 * sf + self.e2 * sf * (sf - 1.0);
        // e1, e2 are rounding noise for n = 2, 3
        if s == 0 || self.n < 4 || !(var > 0.0) {
            return None;
        }
        Some((pi - sf / self.a1) / var.sqrt())
    }
}

/// Statistics of one locus. Undefined values are `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PopGenStats {
    pub pi: f64,
    pub segregating: usize,
    pub tajima_d: Option<f64>,
    pub fay_wu_h: f64,
    /// Two-deme samples only; absent when no site varies between demes.
    pub fst: Option<f64>,
}

fn pairs(n: u32) -> f64 {
    f64::from(n) * f64::from(n.saturating_sub(1)) * 0.5
}

/// Statistics from per-site derived counts by deme.
pub(crate) fn stats_from_counts(sample: &SampleConfig, tc: &TajimaConstants, sites: &[[u32; 2]]) -> PopGenStats {
    let [n1, n2] = sample.pair().map(|c| c as u32);
    let n = n1 + n2;
    let (pairs_all, pairs1, pairs2) = (pairs(n), pairs(n1), pairs(n2));
    let between_pairs = f64::from(n1) * f64::from(n2);
    let (mut diff, mut diff_h, mut w1, mut w2, mut b) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &[c1, c2] in sites {
        let k = c1 + c2;
        diff += f64::from(k) * f64::from(n - k);
        diff_h += f64::from(k) * f64::from(k);
        if sample.demes() == 2 {
            w1 += f64::from(c1) * f64::from(n1 - c1);
            w2 += f64::from(c2) * f64::from(n2 - c2);
            b += f64::from(c1) * f64::from(n2 - c2) + f64::from(c2) * f64::from(n1 - c1);
        }
    }
    let pi = diff / pairs_all;
    let theta_h = 2.0 * diff_h / (f64::from(n) * f64::from(n - 1));
    let fst = (sample.demes() == 2 && b > 0.0).then(|| {
        let mut within = Vec::with_capacity(2);
        if pairs1 > 0.0 {
            within.push(w1 / pairs1);
        }
        if pairs2 > 0.0 {
            within.push(w2 / pairs2);
        }
        let hw = within.iter().sum::<f64>() / within.len().max(1) as f64;
        1.0 - hw / (b / between_pairs)
    });
    PopGenStats {
        pi,
        segregating: sites.len(),
        tajima_d: tc.d(pi, sites.len()),
        fay_wu_h: pi - theta_h,
        fst,
    }
}

/// π, S, Tajima's D, Fay and Wu's H and (two demes) Hudson's F_ST.
///
/// F_ST is `1 - Hw/Hb` with `Hw` the mean of the within-deme pairwise
/// differences (averaged over the `n_d (n_d - 1) / 2` pairs of each deme)
/// and `Hb` the mean difference between haplotypes of different demes.
pub fn compute_stats(locus: &LocusData) -> PopGenStats {
    let tc = TajimaConstants::new(locus.sample().total());
    stats_from_counts(locus.sample(), &tc, &locus.counts())
}

/// Summary statistic names for one- and two-deme samples.
pub fn popgen_names(demes: usize) -> Names {
    if demes == 2 {
        names(["pi", "tajD", "fwH", "fst"])
    } else {
        names(["pi", "tajD", "fwH"])
    }
}

/// What a multi-locus mean does when a statistic is undefined at every locus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AllAbsent {
    #[default]
    Error,
    /// Report 0, the neutral value of D and the no-differentiation value of F_ST.
    Zero,
}

/// Means across loci, skipping undefined values.
pub fn summarize(stats: &[PopGenStats], demes: usize, policy: AllAbsent) -> Result<SummaryVector> {
    if stats.is_empty() {
        return Err(Error::InvalidArgument("no loci".into()));
    }
    let mean_of = |name: &str, values: &mut dyn Iterator<Item = Option<f64>>| -> Result<f64> {
        let (mut sum, mut k) = (0.0, 0usize);
        for v in values.flatten() {
            sum += v;
            k += 1;
        }
        match (k, policy) {
            (0, AllAbsent::Error) => Err(Error::AllAbsent(name.to_string())),
            (0, AllAbsent::Zero) => Ok(0.0),
            _ => Ok(sum / k as f64),
        }
    };
    let mut values = vec![
        mean_of("pi", &mut stats.iter().map(|s| Some(s.pi)))?,
        mean_of("tajD", &mut stats.iter().map(|s| s.tajima_d))?,
        mean_of("fwH", &mut stats.iter().map(|s| Some(s.fay_wu_h)))?,
    ];
    if demes == 2 {
        values.push(mean_of("fst", &mut stats.iter().map(|s| s.fst))?);
    }
    SummaryVector::new(popgen_names(demes), values)
}

/// Per-statistic means over loci; an error if some statistic is undefined at
/// every locus.
pub fn multi_locus_summary(loci: &[LocusData]) -> Result<SummaryVector> {
    let first = loci
        .first()
        .ok_or_else(|| Error::InvalidArgument("no loci".into()))?;
    if loci.iter().any(|l| l.sample() != first.sample()) {
        return Err(Error::InvalidArgument("loci have different samples".into()));
    }
    let tc = TajimaConstants::new(first.sample().total());
    let stats: Vec<PopGenStats> = loci
        .iter()
        .map(|l| stats_from_counts(l.sample(), &tc, &l.counts()))
        .collect();
    summarize(&stats, first.sample().demes(), AllAbsent::Error)
}
