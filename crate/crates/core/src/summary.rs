use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shared, immutable list of identifiers (statistic or parameter names).
pub type Names = Arc<[String]>;

pub fn names<I, S>(items: I) -> Names
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    items.into_iter().map(Into::into).collect::<Vec<_>>().into()
}

pub(crate) fn same_names(a: &Names, b: &Names) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

pub(crate) fn check_names(expected: &Names, found: &Names) -> Result<()> {
    if same_names(expected, found) {
        Ok(())
    } else {
        Err(Error::NameMismatch {
            expected: expected.to_vec(),
            found: found.to_vec(),
        })
    }
}

/// Named vector of finite summary statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSummary")]
pub struct SummaryVector {
    names: Names,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSummary {
    names: Names,
    values: Vec<f64>,
}

impl TryFrom<RawSummary> for SummaryVector {
    type Error = Error;
    fn try_from(raw: RawSummary) -> Result<Self> {
        SummaryVector::new(raw.names, raw.values)
    }
}

impl SummaryVector {
    pub fn new(names: Names, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSummary("no statistics".into()));
        }
        if names.len() != values.len() {
            return Err(Error::InvalidSummary(format!(
                "{} names for {} values",
                names.len(),
                values.len()
            )));
        }
        if let Some((name, v)) = names.iter().zip(&values).find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidSummary(format!("statistic {name} is {v}")));
        }
        Ok(SummaryVector { names, values })
    }

    pub fn names(&self) -> &Names {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    pub fn check_names(&self, names: &Names) -> Result<()> {
        check_names(names, &self.names)
    }
}
