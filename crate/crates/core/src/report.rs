//! Sweep orchestration and the JSON report.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::claims::{
    check_c1_on, check_c2_on, check_discussion_on, check_p1_even_on, check_p2_odd_on, check_p3_on,
    ClaimId, Level, PropertyReport,
};
use crate::degree::{degree_histogram, loglog_fit, DegreeDistribution, FitOutcome, TrendPoint};
use crate::error::{Error, Result};
use crate::fixed_point::{ControlParameter, Precision, QuantizationMode, MAX_BITS};
use crate::network::{build_network, Analysis, NetworkSummary, StateNetwork};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A control parameter as typed by the user plus its normalized form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MuSpec {
    pub raw: String,
    pub raw_numerator: u64,
    pub raw_exponent: u32,
    pub numerator: u64,
    pub exponent: u32,
}

impl MuSpec {
    pub fn mu(&self) -> ControlParameter {
        ControlParameter::new(self.numerator, self.exponent).expect("validated on parse")
    }
}

/// Accepts `N/2^k`, `N/D` with `D` a power of two, or a bare integer `N`.
pub fn parse_mu(spec: &str) -> Result<MuSpec> {
    let fail = |reason: &str| Error::MuSpec {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let s = spec.trim();
    if s.is_empty() {
        return Err(fail("empty"));
    }
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num = num.trim();
    if num.starts_with('-') {
        return Err(fail("numerator must be positive"));
    }
    let numerator: u64 = num
        .parse()
        .map_err(|_| fail("numerator is not an integer"))?;
    if numerator == 0 {
        return Err(fail("numerator must be positive"));
    }
    let den = den.trim();
    let exponent = if let Some(k) = den.strip_prefix("2^") {
        k.trim()
            .parse::<u32>()
            .map_err(|_| fail("bad exponent after 2^"))?
    } else {
        let d: u64 = den
            .parse()
            .map_err(|_| fail("denominator is not an integer"))?;
        if d == 0 {
            return Err(fail("zero denominator"));
        }
        if !d.is_power_of_two() {
            return Err(fail(
                "denominator is not a power of two (mu must be dyadic)",
            ));
        }
        d.trailing_zeros()
    };
    if exponent > 63 {
        return Err(fail("exponent too large"));
    }
    let mu = ControlParameter::new(numerator, exponent).map_err(|e| fail(&e.to_string()))?;
    Ok(MuSpec {
        raw: s.to_string(),
        raw_numerator: numerator,
        raw_exponent: exponent,
        numerator: mu.numerator(),
        exponent: mu.exponent(),
    })
}

/// Inclusive precision range, written `n`, `a..b` or `a..=b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BitsRange {
    pub from: u32,
    pub to: u32,
}

impl BitsRange {
    pub fn single(n: u32) -> Self {
        BitsRange { from: n, to: n }
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u32> {
        self.from..=self.to
    }

    pub fn is_single(&self) -> bool {
        self.from == self.to
    }

    /// Checks `n_mu <= from <= to <= MAX_BITS`.
    pub fn validate(&self, mu: &ControlParameter) -> Result<()> {
        Precision::new(self.from, mu)?;
        Precision::new(self.to, mu)?;
        Ok(())
    }
}

impl FromStr for BitsRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let int = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad precision {t:?}"))
        };
        let range = match s.split_once("..") {
            None => BitsRange::single(int(s)?),
            Some((a, b)) => BitsRange {
                from: int(a)?,
                to: int(b.strip_prefix('=').unwrap_or(b))?,
            },
        };
        if range.from > range.to {
            return Err(format!("empty precision range {s:?}"));
        }
        Ok(range)
    }
}

impl fmt::Display for BitsRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_single() {
            write!(f, "{}", self.from)
        } else {
            write!(f, "{}..{}", self.from, self.to)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub mu: MuSpec,
    pub bits: BitsRange,
    pub mode: QuantizationMode,
    pub k_min: u64,
    pub m_max: u32,
    pub assert_conjectures: bool,
    pub claims: Vec<ClaimId>,
    /// Emit summaries, histograms and fits alongside the claim reports.
    pub include_network_data: bool,
}

impl RunConfig {
    pub fn new(mu: MuSpec, bits: BitsRange) -> Self {
        RunConfig {
            mu,
            bits,
            mode: QuantizationMode::Round,
            k_min: 1,
            m_max: 16,
            assert_conjectures: false,
            claims: ClaimId::ALL.to_vec(),
            include_network_data: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bits.validate(&self.mu.mu())?;
        if self.m_max < 1 {
            return Err(Error::IterationCount(self.m_max));
        }
        Ok(())
    }

    fn wants(&self, c: ClaimId) -> bool {
        self.claims.contains(&c)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub k_min: u64,
    pub m_max: u32,
    pub assert_conjectures: bool,
    pub claims: Vec<ClaimId>,
    pub fit_method: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub bits: u32,
    pub node_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<NetworkSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree_distribution: Option<DegreeDistribution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitOutcome>,
    pub reports: Vec<PropertyReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub tool: ToolInfo,
    pub completed: bool,
    pub mu: MuSpec,
    pub quantization: QuantizationMode,
    pub bits: BitsRange,
    pub settings: Settings,
    pub levels: Vec<LevelReport>,
    pub fit_trend: Vec<TrendPoint>,
    pub range_reports: Vec<PropertyReport>,
    /// Claim ids (`claim@bits` for single-level claims) that fail an enforced check.
    pub enforced_failures: Vec<String>,
    pub skipped: Vec<String>,
    pub errors: Vec<String>,
}

impl ReportDocument {
    /// 0 if clean, 2 if an enforced check failed, 1 if the run was cut short.
    pub fn exit_code(&self) -> i32 {
        if !self.completed {
            1
        } else if !self.enforced_failures.is_empty() {
            2
        } else {
            0
        }
    }

    pub fn all_reports(&self) -> impl Iterator<Item = &PropertyReport> {
        self.levels
            .iter()
            .flat_map(|l| &l.reports)
            .chain(&self.range_reports)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        self.write_json(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn export_json(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::export::write_to_path(path.as_ref(), |w| self.write_json(w))
    }
}

struct Built {
    levels: Vec<(StateNetwork, Analysis)>,
    /// Network one bit above the range, for the refinement properties.
    top_refinement: Option<StateNetwork>,
    errors: Vec<String>,
}

fn build_all(config: &RunConfig, need_refinement: bool) -> Built {
    let mu = config.mu.mu();
    let results: Vec<Result<(StateNetwork, Analysis)>> = config
        .bits
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|b| {
            let net = build_network(mu, Precision::new(b, &mu)?, config.mode)?;
            let analysis = Analysis::new(&net);
            Ok((net, analysis))
        })
        .collect();
    let mut levels = Vec::new();
    let mut errors = Vec::new();
    // keep the contiguous prefix that built
    for r in results {
        match r {
            Ok(level) if errors.is_empty() => levels.push(level),
            Ok(_) => {}
            Err(e) => errors.push(e.to_string()),
        }
    }
    let mut top_refinement = None;
    if need_refinement && errors.is_empty() {
        let built = Precision::new(config.bits.to, &mu)
            .ok()
            .and_then(|p| p.finer())
            .ok_or_else(|| Error::Precision(format!("no precision above {MAX_BITS} bits")))
            .and_then(|p| build_network(mu, p, config.mode));
        match built {
            Ok(net) => top_refinement = Some(net),
            Err(e) => errors.push(e.to_string()),
        }
    }
    Built {
        levels,
        top_refinement,
        errors,
    }
}

/// Runs the configured battery: build, summarize, histogram, fit, then every
/// selected check. Levels run in parallel; output order is ascending `n`.
pub fn run_report(config: &RunConfig) -> Result<ReportDocument> {
    config.validate()?;
    let round = config.mode == QuantizationMode::Round;
    let mut skipped = Vec::new();
    let refinement_claims: Vec<ClaimId> = [ClaimId::P1, ClaimId::P2]
        .into_iter()
        .filter(|&c| config.wants(c))
        .collect();
    if !round {
        skipped.extend(
            refinement_claims
                .iter()
                .map(|c| format!("{c}: defined for round quantization only")),
        );
    }
    let run_refinement = round && !refinement_claims.is_empty();

    let built = build_all(config, run_refinement);
    let mut errors = built.errors;
    let completed = errors.is_empty();

    let levels: Vec<Level<'_>> = built
        .levels
        .iter()
        .map(|(net, analysis)| Level { net, analysis })
        .collect();

    let level_reports: Vec<Result<LevelReport>> = (0..levels.len())
        .into_par_iter()
        .map(|k| {
            let level = levels[k];
            let finer = levels
                .get(k + 1)
                .map(|l| l.net)
                .or(built.top_refinement.as_ref());
            let mut reports = Vec::new();
            if run_refinement {
                if let Some(fine) = finer {
                    if config.wants(ClaimId::P1) {
                        reports.push(check_p1_even_on(level.net, fine)?);
                    }
                    if config.wants(ClaimId::P2) {
                        reports.push(check_p2_odd_on(level.net, fine)?);
                    }
                }
            }
            if config.wants(ClaimId::P3) {
                reports.push(check_p3_on(level));
            }
            if config.wants(ClaimId::C1) {
                reports.push(check_c1_on(level.net));
            }
            let (summary, dist, fit) = if config.include_network_data {
                let dist = degree_histogram(level.net);
                let fit = loglog_fit(&dist, config.k_min);
                (Some(level.analysis.summary()), Some(dist), Some(fit))
            } else {
                (None, None, None)
            };
            Ok(LevelReport {
                bits: level.net.precision().bits(),
                node_count: level.net.len() as u64,
                summary,
                degree_distribution: dist,
                fit,
                reports,
            })
        })
        .collect();
    let mut level_out = Vec::new();
    for r in level_reports {
        match r {
            Ok(l) => level_out.push(l),
            Err(e) => errors.push(e.to_string()),
        }
    }

    let mut range_reports = Vec::new();
    if !levels.is_empty() {
        if config.wants(ClaimId::C2) {
            range_reports.push(check_c2_on(&levels));
        }
        range_reports.extend(
            check_discussion_on(&levels, config.m_max)
                .into_iter()
                .filter(|r| config.wants(r.claim)),
        );
    }

    let fit_trend = level_out
        .iter()
        .filter_map(|l| l.fit.clone().map(|fit| TrendPoint { bits: l.bits, fit }))
        .collect();

    let mut doc = ReportDocument {
        tool: ToolInfo {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        },
        completed: completed && errors.is_empty(),
        mu: config.mu.clone(),
        quantization: config.mode,
        bits: config.bits,
        settings: Settings {
            k_min: config.k_min,
            m_max: config.m_max,
            assert_conjectures: config.assert_conjectures,
            claims: config.claims.clone(),
            fit_method: "ordinary least squares on (ln k, ln count), zero counts skipped",
        },
        levels: level_out,
        fit_trend,
        range_reports,
        enforced_failures: Vec::new(),
        skipped,
        errors,
    };
    doc.enforced_failures = doc
        .all_reports()
        .filter(|r| r.is_enforced_failure(config.assert_conjectures))
        .map(|r| {
            if r.bits_from == r.bits_to && !r.claim.is_range_claim() {
                format!("{}@{}", r.claim, r.bits_from)
            } else {
                r.claim.to_string()
            }
        })
        .collect();
    Ok(doc)
}
