use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Population history, in the external units: times in `N0` generations,
/// sizes relative to `N0`, migration rates `M = m N0`.
///
/// Internally the coalescent runs in units of `2 N0` generations, so a time
/// `t` becomes `t / 2`, a growth rate `alpha` becomes `2 alpha`, and each
/// lineage migrates at rate `M / 2`.
///
/// ```text
///  Bottleneck (backward in time)       IsolationMigration
///
///   size 1/x  |        |                  size 1   |      |
///   ----------+--------+-- t              ---------+------+--- t_split
///   size 1      |    |                      nu1 |  <-M1--  | nu2
///               |    |                          |  --M2->  |
///   present  ---+----+---                 present
/// ```
///
/// `M1` moves lineages of deme 2 into deme 1 (backward), i.e. gene flow from
/// deme 1 into deme 2 forward in time; `M2` the reverse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum Demography {
    Constant,
    /// Current size 1; size `1/x` at times older than `t`.
    Bottleneck { t: f64, x: f64 },
    /// Size `exp(-alpha t)` at time `t` before present.
    ExponentialGrowth { alpha: f64 },
    /// Two demes of sizes `nu1`, `nu2` merging into one of size 1 at `t_split`.
    Isolation { t_split: f64, nu1: f64, nu2: f64 },
    IsolationMigration {
        t_split: f64,
        nu1: f64,
        nu2: f64,
        m1: f64,
        m2: f64,
    },
}

/// Integrated pair-coalescence hazard of a single deme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Hazard {
    Constant,
    /// Rate 1 before `at`, `after` from `at` on.
    Step { at: f64, after: f64 },
    /// Rate `exp(g tau)`.
    Exp { g: f64 },
}

impl Hazard {
    /// Time at which `c` times the integrated hazard since `tau` reaches `e`.
    pub(crate) fn advance(self, tau: f64, c: f64, e: f64) -> f64 {
        let need = e / c;
        match self {
            Hazard::Constant => tau + need,
            Hazard::Step { at, after } => {
                if tau >= at {
                    tau + need / after
                } else if tau + need <= at {
                    tau + need
                } else {
                    at + (need - (at - tau)) / after
                }
            }
            // solve (exp(g t) - exp(g tau)) / g = need without overflow
            Hazard::Exp { g } => tau + (g * need * (-g * tau).exp()).ln_1p() / g,
        }
    }
}

/// Two-deme parameters in internal units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Structured {
    pub t_split: f64,
    pub size: [f64; 2],
    /// Per-lineage rate of moving from deme `d` to the other deme.
    pub leave: [f64; 2],
}

impl Demography {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64, name: &str, positive: bool| {
            let good = if positive { v > 0.0 && v.is_finite() } else { v >= 0.0 && v.is_finite() };
            if good {
                Ok(())
            } else {
                Err(Error::InvalidParam(format!("{name} = {v} out of range")))
            }
        };
        match *self {
            Demography::Constant => Ok(()),
            Demography::Bottleneck { t, x } => {
                ok(t, "t", false)?;
                ok(x, "x", true)
            }
            Demography::ExponentialGrowth { alpha } => ok(alpha, "alpha", false),
            Demography::Isolation { t_split, nu1, nu2 } => {
                // an infinite split time is allowed: demes that never merge
                if !(t_split >= 0.0) {
                    return Err(Error::InvalidParam(format!("t_split = {t_split} out of range")));
                }
                ok(nu1, "nu1", true)?;
                ok(nu2, "nu2", true)
            }
            Demography::IsolationMigration { t_split, nu1, nu2, m1, m2 } => {
                Demography::Isolation { t_split, nu1, nu2 }.validate()?;
                ok(m1, "m1", false)?;
                ok(m2, "m2", false)
            }
        }
    }

    pub fn demes(&self) -> usize {
        match self {
            Demography::Isolation { .. } | Demography::IsolationMigration { .. } => 2,
            _ => 1,
        }
    }

    /// The same history in its simplest form, so that degenerate parameter
    /// values follow exactly the sample paths of the simpler model.
    pub fn canonical(self) -> Demography {
        match self {
            Demography::Bottleneck { x, .. } if x == 1.0 => Demography::Constant,
            Demography::ExponentialGrowth { alpha } if alpha == 0.0 => Demography::Constant,
            Demography::IsolationMigration { t_split, nu1, nu2, m1, m2 } if m1 == 0.0 && m2 == 0.0 => {
                Demography::Isolation { t_split, nu1, nu2 }
            }
            d => d,
        }
    }

    pub(crate) fn hazard(&self) -> Hazard {
        match self.canonical() {
            Demography::Bottleneck { t, x } => Hazard::Step { at: t / 2.0, after: x },
            Demography::ExponentialGrowth { alpha } => Hazard::Exp { g: 2.0 * alpha },
            _ => Hazard::Constant,
        }
    }

    pub(crate) fn structured(&self) -> Option<Structured> {
        let (t_split, nu1, nu2, m1, m2) = match self.canonical() {
            Demography::Isolation { t_split, nu1, nu2 } => (t_split, nu1, nu2, 0.0, 0.0),
            Demography::IsolationMigration { t_split, nu1, nu2, m1, m2 } => (t_split, nu1, nu2, m1, m2),
            _ => return None,
        };
        Some(Structured {
            t_split: t_split / 2.0,
            size: [nu1, nu2],
            leave: [m2 / 2.0, m1 / 2.0],
        })
    }
}
