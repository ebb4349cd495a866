use std::fmt::Write as _;

use rand_distr::{Distribution, Poisson};

use crate::coalescent::genealogy::{Genealogy, SampleConfig};
use crate::error::{Error, Result};
use crate::rng::{open_unit, rng_from_seed, Rng64};

/// Branches (identified by their lower node) carrying each mutation.
///
/// The number of mutations is Poisson with mean `theta / 2` times the total
/// tree length; each lands on a branch with probability proportional to its
/// length.
pub(crate) fn place_mutations(g: &Genealogy, theta: f64, rng: &mut Rng64) -> Vec<usize> {
    let root = g.root();
    let mut cumulative = Vec::with_capacity(root);
    let mut acc = 0.0;
    for v in 0..root {
        acc += g.branch_length(v);
        cumulative.push(acc);
    }
    let mean = 0.5 * theta * acc;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let k = Poisson::new(mean).expect("finite positive mean").sample(rng) as usize;
    (0..k)
        .map(|_| {
            let x = open_unit(rng) * acc;
            cumulative.partition_point(|&c| c <= x).min(root - 1)
        })
        .collect()
}

/// Derived-allele counts per deme at each site.
pub(crate) fn site_counts(g: &Genealogy, theta: f64, rng: &mut Rng64) -> Vec<[u32; 2]> {
    place_mutations(g, theta, rng)
        .into_iter()
        .map(|v| g.derived_counts(v))
        .collect()
}

fn check_theta(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("theta = {theta} out of range")))
    }
}

/// Segregating sites of one locus under infinite sites.
///
/// Each site is a column of 0 (ancestral) / 1 (derived) over the haplotypes,
/// deme by deme.
#[derive(Clone, Debug, PartialEq)]
pub struct LocusData {
    sample: SampleConfig,
    sites: Vec<Vec<u8>>,
}

impl LocusData {
    pub fn new(sample: SampleConfig, sites: Vec<Vec<u8>>) -> Result<Self> {
        let n = sample.total();
        for (j, site) in sites.iter().enumerate() {
            if site.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "site {j} has {} haplotypes, expected {n}",
                    site.len()
                )));
            }
            if site.iter().any(|&a| a > 1) {
                return Err(Error::InvalidArgument(format!("site {j} is not binary")));
            }
            let k = site.iter().filter(|&&a| a == 1).count();
            if k == 0 || k == n {
                return Err(Error::InvalidArgument(format!("site {j} is not segregating")));
            }
        }
        Ok(LocusData { sample, sites })
    }

    pub fn sample(&self) -> &SampleConfig {
        &self.sample
    }

    pub fn sites(&self) -> &[Vec<u8>] {
        &self.sites
    }

    pub fn segregating(&self) -> usize {
        self.sites.len()
    }

    /// Haplotype `i` as a 0/1 row across sites.
    pub fn haplotype(&self, i: usize) -> Vec<u8> {
        self.sites.iter().map(|s| s[i]).collect()
    }

    pub(crate) fn counts(&self) -> Vec<[u32; 2]> {
        let n1 = self.sample.counts()[0];
        self.sites
            .iter()
            .map(|s| {
                let c1 = s[..n1].iter().map(|&a| a as u32).sum();
                let c2 = s[n1..].iter().map(|&a| a as u32).sum();
                [c1, c2]
            })
            .collect()
    }

    /// One site per line as a 0/1 string.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sites {
            for &a in s {
                out.push(if a == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Header line with the sample configuration followed by [`Self::to_text`].
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let counts: Vec<String> = self.sample.counts().iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "# sample {} sites {}", counts.join(","), self.segregating());
        out + &self.to_text()
    }
}

/// Mutations on `g` at rate `theta / 2` per lineage per unit time, as an
/// explicit site matrix.
pub fn drop_mutations(g: &Genealogy, theta: f64, seed: u64) -> Result<LocusData> {
    check_theta(theta)?;
    let mut rng = rng_from_seed(seed);
    let n = g.sample().total();
    let sites = place_mutations(g, theta, &mut rng)
        .into_iter()
        .map(|v| {
            let mut col = vec![0u8; n];
            for leaf in g.leaves_below(v) {
                col[leaf] = 1;
            }
            col
        })
        .collect();
    LocusData::new(g.sample().clone(), sites)
}

/// Per-site derived counts for the same mutations [`drop_mutations`] places
/// with the same seed.
pub fn drop_mutation_counts(g: &Genealogy, theta: f64, seed: u64) -> Result<Vec<[u32; 2]>> {
    check_theta(theta)?;
    Ok(site_counts(g, theta, &mut rng_from_seed(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalescent::{simulate_genealogy, Demography};

    #[test]
    fn zero_theta_no_sites() {
        let s = SampleConfig::single(20).unwrap();
        let g = simulate_genealogy(&Demography::Constant, &s, 1).unwrap();
        assert_eq!(drop_mutations(&g, 0.0, 5).unwrap().segregating(), 0);
        assert!(drop_mutations(&g, -1.0, 5).is_err());
    }

    #[test]
    fn matrix_matches_counts() {
        let s = SampleConfig::two(7, 5).unwrap();
        let d = Demography::IsolationMigration { t_split: 0.5, nu1: 1.0, nu2: 2.0, m1: 4.0, m2: 0.0 };
        for seed in 0..20 {
            let g = simulate_genealogy(&d, &s, seed).unwrap();
            let locus = drop_mutations(&g, 6.0, seed + 100).unwrap();
            assert_eq!(locus.counts(), drop_mutation_counts(&g, 6.0, seed + 100).unwrap());
        }
    }

    #[test]
    fn validation() {
        let s = SampleConfig::single(3).unwrap();
        assert!(LocusData::new(s.clone(), vec![vec![1, 1, 1]]).is_err());
        assert!(LocusData::new(s.clone(), vec![vec![0, 1]]).is_err());
        assert!(LocusData::new(s.clone(), vec![vec![0, 2, 1]]).is_err());
        let l = LocusData::new(s, vec![vec![0, 1, 0], vec![1, 1, 0]]).unwrap();
        assert_eq!(l.to_text(), "010\n110\n");
        assert_eq!(l.haplotype(1), vec![1, 1]);
        assert!(l.dump().starts_with("# sample 3 sites 2\n"));
    }
}
