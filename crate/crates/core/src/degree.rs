//! In-degree histograms and the log-log least-squares power-law fit.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fixed_point::{ControlParameter, Precision, QuantizationMode};
use crate::network::{build_network, in_degrees, StateNetwork};

/// Number of nodes having each in-degree. Only non-zero counts are stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeDistribution {
    pub bits: u32,
    #[serde(serialize_with = "counts_as_rows")]
    pub counts: BTreeMap<u64, u64>,
}

fn counts_as_rows<S: serde::Serializer>(
    counts: &BTreeMap<u64, u64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Row {
        degree: u64,
        count: u64,
    }
    s.collect_seq(counts.iter().map(|(&degree, &count)| Row { degree, count }))
}

impl DegreeDistribution {
    pub fn from_in_degrees(bits: u32, in_degree: &[u32]) -> Self {
        let mut counts = BTreeMap::new();
        for &d in in_degree {
            *counts.entry(u64::from(d)).or_insert(0) += 1;
        }
        DegreeDistribution { bits, counts }
    }

    /// `sum_k counts[k]`: the number of nodes.
    pub fn node_total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `sum_k k * counts[k]`: the number of edges.
    pub fn edge_total(&self) -> u64 {
        self.counts.iter().map(|(k, c)| k * c).sum()
    }

    pub fn max_degree(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}

pub fn degree_histogram(net: &StateNetwork) -> DegreeDistribution {
    DegreeDistribution::from_in_degrees(net.precision().bits(), &in_degrees(net))
}

/// Ordinary least squares of `ln count` on `ln k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub k_min: u64,
    pub points_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FitOutcome {
    Fitted(PowerLawFit),
    /// Fewer than three usable points.
    Unavailable {
        k_min: u64,
        points_used: usize,
    },
}

impl FitOutcome {
    pub fn fit(&self) -> Option<&PowerLawFit> {
        match self {
            FitOutcome::Fitted(f) => Some(f),
            FitOutcome::Unavailable { .. } => None,
        }
    }
}

pub const MIN_FIT_POINTS: usize = 3;

/// Fits `ln counts[k] = slope * ln k + intercept` over `k >= k_min`, skipping
/// empty degrees. `k_min` below 1 is treated as 1 since `ln 0` is undefined.
pub fn loglog_fit(dist: &DegreeDistribution, k_min: u64) -> FitOutcome {
    let k_min = k_min.max(1);
    let points: Vec<(f64, f64)> = dist
        .counts
        .range(k_min..)
        .filter(|(_, &c)| c > 0)
        .map(|(&k, &c)| ((k as f64).ln(), (c as f64).ln()))
        .collect();
    let m = points.len();
    if m < MIN_FIT_POINTS {
        return FitOutcome::Unavailable {
            k_min,
            points_used: m,
        };
    }
    let mf = m as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / mf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / mf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &points {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    // a flat line through flat data is a perfect fit
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    FitOutcome::Fitted(PowerLawFit {
        slope,
        intercept,
        r_squared,
        k_min,
        points_used: m,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrendPoint {
    pub bits: u32,
    pub fit: FitOutcome,
}

/// One fit per precision, ascending in `n`.
pub fn fit_trend(
    mu: ControlParameter,
    bits: impl IntoIterator<Item = u32>,
    k_min: u64,
    mode: QuantizationMode,
) -> Result<Vec<TrendPoint>> {
    let bits: Vec<u32> = bits.into_iter().collect();
    bits.par_iter()
        .map(|&b| {
            let net = build_network(mu, Precision::new(b, &mu)?, mode)?;
            Ok(TrendPoint {
                bits: b,
                fit: loglog_fit(&degree_histogram(&net), k_min),
            })
        })
        .collect()
}
