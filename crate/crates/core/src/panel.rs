//! Paired before/after panels and one-sided t-tests on their differences.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::special::student_t_sf;

/// Statistic a panel difference refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", content = "lag", rename_all = "snake_case")]
pub enum Statistic {
    ZeroFrequency,
    HillAlpha,
    Rho(usize),
    Hurst,
}

impl Statistic {
    pub fn label(&self) -> &'static str {
        match self {
            Statistic::ZeroFrequency => "p0",
            Statistic::HillAlpha => "alpha_h",
            Statistic::Rho(_) => "rho",
            Statistic::Hurst => "hurst",
        }
    }

    pub fn lag(&self) -> Option<usize> {
        match self {
            Statistic::Rho(k) => Some(*k),
            _ => None,
        }
    }

    /// Alternative hypothesis under which a tick-size reduction shows the
    /// documented effect: fewer zero returns and fatter tails, i.e. a
    /// smaller tail exponent (mean difference below zero); more clustering
    /// and a larger Hurst exponent (mean difference above zero).
    pub fn reduction_alternative(&self) -> Alternative {
        match self {
            Statistic::ZeroFrequency | Statistic::HillAlpha => Alternative::Less,
            Statistic::Rho(_) | Statistic::Hurst => Alternative::Greater,
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Rho(k) => write!(f, "rho({k})"),
            other => f.write_str(other.label()),
        }
    }
}

/// Alternative hypothesis on the mean difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    /// H1: mean < 0 (null: mean >= 0).
    Less,
    /// H1: mean > 0 (null: mean <= 0).
    Greater,
}

impl Alternative {
    pub fn flipped(self) -> Self {
        match self {
            Alternative::Less => Alternative::Greater,
            Alternative::Greater => Alternative::Less,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Alternative::Less => "less",
            Alternative::Greater => "greater",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelDifference {
    pub statistic: Statistic,
    /// Instrument labels, sorted.
    pub labels: Vec<String>,
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    /// `after - before` per instrument.
    pub differences: Vec<f64>,
}

impl PanelDifference {
    /// Panel built directly from differences, labelled `0, 1, ...`.
    pub fn from_differences(statistic: Statistic, differences: Vec<f64>) -> Self {
        let n = differences.len();
        Self {
            statistic,
            labels: (0..n).map(|i| i.to_string()).collect(),
            before: vec![0.0; n],
            after: differences.clone(),
            differences,
        }
    }

    pub fn len(&self) -> usize {
        self.differences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.differences.is_empty()
    }
}

/// Pair per-instrument values of the two windows. Output is ordered by
/// instrument label regardless of input order.
pub fn build_panel(
    statistic: Statistic,
    before: &[(String, f64)],
    after: &[(String, f64)],
) -> Result<PanelDifference> {
    let to_map = |side: &str, xs: &[(String, f64)]| -> Result<BTreeMap<String, f64>> {
        let mut map = BTreeMap::new();
        for (label, v) in xs {
            if map.insert(label.clone(), *v).is_some() {
                return Err(Error::KeyMismatch(format!("instrument {label} repeated in {side} window")));
            }
        }
        Ok(map)
    };
    let b = to_map("before", before)?;
    let a = to_map("after", after)?;
    if !b.keys().eq(a.keys()) {
        let only_before: Vec<&String> = b.keys().filter(|k| !a.contains_key(*k)).collect();
        let only_after: Vec<&String> = a.keys().filter(|k| !b.contains_key(*k)).collect();
        return Err(Error::KeyMismatch(format!(
            "only before: {only_before:?}; only after: {only_after:?}"
        )));
    }
    let labels: Vec<String> = b.keys().cloned().collect();
    let before: Vec<f64> = b.values().copied().collect();
    let after: Vec<f64> = a.values().copied().collect();
    check_finite(&before)?;
    check_finite(&after)?;
    let differences = after.iter().zip(&before).map(|(x, y)| x - y).collect();
    Ok(PanelDifference {
        statistic,
        labels,
        before,
        after,
        differences,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_stat: f64,
    /// One-sided tail probability in the direction of `alternative`.
    pub p_value: f64,
    pub dof: usize,
    pub alternative: Alternative,
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

/// One-sample t-test on the paired differences,
/// `t = mean / (s / sqrt(n))` with `n - 1` degrees of freedom.
pub fn paired_one_sided_ttest(panel: &PanelDifference, alternative: Alternative) -> Result<TTestResult> {
    let d = &panel.differences;
    let n = d.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "t-test needs at least 2 paired observations, got {n}"
        )));
    }
    check_finite(d)?;
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    if d.iter().all(|x| *x == d[0]) || var <= 0.0 {
        return Err(Error::ZeroVariance("paired differences are all equal".into()));
    }
    let sd = var.sqrt();
    let t_stat = mean / (sd / nf.sqrt());
    let dof = n - 1;
    let p_value = match alternative {
        Alternative::Greater => student_t_sf(t_stat, dof as f64),
        Alternative::Less => student_t_sf(-t_stat, dof as f64),
    };
    Ok(TTestResult {
        t_stat,
        p_value,
        dof,
        alternative,
        mean,
        sd,
        n,
    })
}
