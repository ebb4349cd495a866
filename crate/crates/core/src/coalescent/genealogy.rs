use serde::{Deserialize, Serialize};

use crate::coalescent::demography::{Demography, Hazard, Structured};
use crate::error::{Error, Result};
use crate::rng::{open_unit, rng_from_seed, std_exponential, uniform_index, Rng64};

const NONE: u32 = u32::MAX;

/// Haplotype counts per deme (one or two demes).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SampleConfig(Vec<usize>);

impl SampleConfig {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() || counts.len() > 2 {
            return Err(Error::InvalidArgument(format!(
                "sample needs one or two demes, got {}",
                counts.len()
            )));
        }
        if counts.iter().sum::<usize>() < 2 {
            return Err(Error::InvalidArgument("sample needs at least 2 haplotypes".into()));
        }
        if counts.iter().sum::<usize>() >= NONE as usize / 2 {
            return Err(Error::InvalidArgument("sample too large".into()));
        }
        Ok(SampleConfig(counts))
    }

    pub fn single(n: usize) -> Result<Self> {
        SampleConfig::new(vec![n])
    }

    pub fn two(n1: usize, n2: usize) -> Result<Self> {
        SampleConfig::new(vec![n1, n2])
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn demes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Deme of leaf `i` (leaves are numbered deme by deme).
    pub fn deme_of(&self, i: usize) -> usize {
        usize::from(i >= self.0[0])
    }

    pub(crate) fn pair(&self) -> [usize; 2] {
        [self.0[0], self.0.get(1).copied().unwrap_or(0)]
    }
}

impl TryFrom<Vec<usize>> for SampleConfig {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        SampleConfig::new(v)
    }
}

impl From<SampleConfig> for Vec<usize> {
    fn from(s: SampleConfig) -> Self {
        s.0
    }
}

/// A binary coalescent tree. Leaves are nodes `0..n` (deme-ordered), the root
/// is the last node.
#[derive(Clone, Debug, PartialEq)]
pub struct Genealogy {
    sample: SampleConfig,
    time: Vec<f64>,
    parent: Vec<u32>,
    children: Vec<[u32; 2]>,
    /// Leaves below each node, per deme.
    below: Vec<[u32; 2]>,
}

impl Genealogy {
    fn with_leaves(sample: &SampleConfig) -> Self {
        let n = sample.total();
        let cap = 2 * n - 1;
        let mut g = Genealogy {
            sample: sample.clone(),
            time: Vec::with_capacity(cap),
            parent: Vec::with_capacity(cap),
            children: Vec::with_capacity(cap),
            below: Vec::with_capacity(cap),
        };
        for i in 0..n {
            let mut b = [0u32; 2];
            b[sample.deme_of(i)] = 1;
            g.time.push(0.0);
            g.parent.push(NONE);
            g.children.push([NONE, NONE]);
            g.below.push(b);
        }
        g
    }

    fn join(&mut self, a: u32, b: u32, t: f64) -> u32 {
        let id = self.time.len() as u32;
        let (ba, bb) = (self.below[a as usize], self.below[b as usize]);
        self.time.push(t);
        self.parent.push(NONE);
        self.children.push([a, b]);
        self.below.push([ba[0] + bb[0], ba[1] + bb[1]]);
        self.parent[a as usize] = id;
        self.parent[b as usize] = id;
        id
    }

    pub fn sample(&self) -> &SampleConfig {
        &self.sample
    }

    pub fn node_count(&self) -> usize {
        self.time.len()
    }

    pub fn root(&self) -> usize {
        self.time.len() - 1
    }

    /// Age of the most recent common ancestor, internal units.
    pub fn tmrca(&self) -> f64 {
        self.time[self.root()]
    }

    pub fn time(&self, node: usize) -> f64 {
        self.time[node]
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        let p = self.parent[node];
        (p != NONE).then_some(p as usize)
    }

    pub fn children(&self, node: usize) -> Option<[usize; 2]> {
        let [a, b] = self.children[node];
        (a != NONE).then_some([a as usize, b as usize])
    }

    /// Length of the branch above `node` (0 for the root).
    pub fn branch_length(&self, node: usize) -> f64 {
        self.parent(node).map_or(0.0, |p| self.time[p] - self.time[node])
    }

    pub fn total_length(&self) -> f64 {
        (0..self.node_count()).map(|v| self.branch_length(v)).sum()
    }

    /// Number of leaves below `node` in each deme.
    pub fn derived_counts(&self, node: usize) -> [u32; 2] {
        self.below[node]
    }

    /// Leaves below `node`, ascending.
    pub fn leaves_below(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            match self.children(v) {
                Some([a, b]) => {
                    stack.push(a);
                    stack.push(b);
                }
                None => out.push(v),
            }
        }
        out.sort_unstable();
        out
    }
}

fn coalesce_in(g: &mut Genealogy, lineages: &mut Vec<u32>, t: f64, rng: &mut Rng64) -> u32 {
    let k = lineages.len();
    let i = uniform_index(rng, k);
    let mut j = uniform_index(rng, k - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = (lineages[i], lineages[j]);
    let id = g.join(a, b, t);
    let (lo, hi) = (i.min(j), i.max(j));
    lineages.swap_remove(hi);
    lineages[lo] = id;
    id
}

fn pairs(k: usize) -> f64 {
    (k * k.saturating_sub(1)) as f64 * 0.5
}

/// Single-deme coalescent from `tau` until one lineage is left.
fn run_panmictic(g: &mut Genealogy, mut lineages: Vec<u32>, mut tau: f64, hazard: Hazard, rng: &mut Rng64) {
    while lineages.len() > 1 {
        tau = hazard.advance(tau, pairs(lineages.len()), std_exponential(rng));
        coalesce_in(g, &mut lineages, tau, rng);
    }
}

fn run_structured(g: &mut Genealogy, s: Structured, rng: &mut Rng64) -> Result<()> {
    let [n1, _] = g.sample.pair();
    let n = g.sample.total() as u32;
    let mut demes: [Vec<u32>; 2] = [(0..n1 as u32).collect(), (n1 as u32..n).collect()];
    let mut tau = 0.0;
    while demes[0].len() + demes[1].len() > 1 {
        let rates = [
            pairs(demes[0].len()) / s.size[0],
            pairs(demes[1].len()) / s.size[1],
            demes[0].len() as f64 * s.leave[0],
            demes[1].len() as f64 * s.leave[1],
        ];
        let total: f64 = rates.iter().sum();
        let next = if total > 0.0 { tau + std_exponential(rng) / total } else { f64::INFINITY };
        if next >= s.t_split {
            if s.t_split.is_infinite() {
                return Err(Error::NoCommonAncestor(format!(
                    "{} and {} lineages in isolated demes without migration",
                    demes[0].len(),
                    demes[1].len()
                )));
            }
            let [mut a, b] = demes;
            a.extend(b);
            run_panmictic(g, a, s.t_split, Hazard::Constant, rng);
            return Ok(());
        }
        tau = next;
        let mut u = open_unit(rng) * total;
        let mut event = 0;
        while event < 3 && u >= rates[event] {
            u -= rates[event];
            event += 1;
        }
        // guard against rounding landing on an empty category
        while rates[event] == 0.0 {
            event = (event + 3) % 4;
        }
        match event {
            0 | 1 => {
                coalesce_in(g, &mut demes[event], tau, rng);
            }
            _ => {
                let from = event - 2;
                let i = uniform_index(rng, demes[from].len());
                let v = demes[from].swap_remove(i);
                demes[1 - from].push(v);
            }
        }
    }
    Ok(())
}

/// Simulates the genealogy of `sample` under `demography`.
///
/// Waiting times are drawn by inverting the integrated coalescence hazard
/// with one standard exponential per event, so histories that only differ in
/// degenerate parameters share sample paths.
pub fn simulate_genealogy(demography: &Demography, sample: &SampleConfig, seed: u64) -> Result<Genealogy> {
    demography.validate()?;
    if sample.demes() != demography.demes() {
        return Err(Error::InvalidArgument(format!(
            "{} deme(s) sampled under a {}-deme history",
            sample.demes(),
            demography.demes()
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut g = Genealogy::with_leaves(sample);
    match demography.structured() {
        Some(s) => run_structured(&mut g, s, &mut rng)?,
        None => {
            let lineages = (0..sample.total() as u32).collect();
            run_panmictic(&mut g, lineages, 0.0, demography.hazard(), &mut rng);
        }
    }
    Ok(g)
}
