//! Exhaustive checks of the structural properties and conjectures about the
//! fixed-point Logistic state network.
//!
//! Every check enumerates its whole domain and returns a [`PropertyReport`]
//! listing each counterexample. Proven properties are [`ClaimKind::Theorem`];
//! a failing theorem check means the arithmetic is wrong, not the claim.
//! Conjectures are recorded either way and only enforced on request.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::fixed_point::{exact_value, ControlParameter, ExactRatio, Precision, QuantizationMode};
use crate::network::{build_network, Analysis, StateNetwork};

/// In-degree at or above which a node counts as a "large in-degree" node.
pub const LARGE_IN_DEGREE: u32 = 3;

/// Upper bound on the component count under test.
pub const COMPONENT_BOUND: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClaimId {
    P1,
    P2,
    P3,
    C1,
    C2,
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
}

impl ClaimId {
    pub const ALL: [ClaimId; 11] = [
        ClaimId::P1,
        ClaimId::P2,
        ClaimId::P3,
        ClaimId::C1,
        ClaimId::C2,
        ClaimId::D1,
        ClaimId::D2,
        ClaimId::D3,
        ClaimId::D4,
        ClaimId::D5,
        ClaimId::D6,
    ];

    pub fn kind(&self) -> ClaimKind {
        use ClaimId::*;
        match self {
            P1 | P2 | D2 => ClaimKind::Theorem,
            P3 | D1 => ClaimKind::Descriptive,
            C1 | C2 | D3 | D4 | D5 | D6 => ClaimKind::Conjecture,
        }
    }

    /// Checks that need the whole precision range rather than one network.
    pub fn is_range_claim(&self) -> bool {
        use ClaimId::*;
        matches!(self, C2 | D1 | D2 | D3 | D4 | D5 | D6)
    }

    /// Parses a comma list such as `P1,C1,D1-D6`.
    pub fn parse_list(s: &str) -> std::result::Result<Vec<ClaimId>, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part.eq_ignore_ascii_case("all") {
                out.extend(ClaimId::ALL);
            } else if let Some((a, b)) = part.split_once('-') {
                let (a, b) = (a.parse::<ClaimId>()?, b.parse::<ClaimId>()?);
                if a > b || a.family() != b.family() {
                    return Err(format!("bad claim range {part:?}"));
                }
                out.extend(ClaimId::ALL.into_iter().filter(|c| *c >= a && *c <= b));
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn family(&self) -> char {
        format!("{self:?}").chars().next().unwrap_or('?')
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ClaimId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ClaimId::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown claim {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    /// Proven; any violation is an implementation fault.
    Theorem,
    /// Open; recorded, enforced only when asked.
    Conjecture,
    /// Reported data with only trivially-true sanity conditions attached.
    Descriptive,
}

/// One counterexample: the input tuple and the two sides that disagreed.
/// What `expected` means for a given claim is spelled out in its notes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub input: Vec<i64>,
    pub expected: i64,
    pub actual: i64,
}

impl Witness {
    fn new(input: impl Into<Vec<i64>>, expected: i64, actual: i64) -> Self {
        Witness {
            input: input.into(),
            expected,
            actual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub claim: ClaimId,
    pub kind: ClaimKind,
    pub mu: ControlParameter,
    pub mode: QuantizationMode,
    pub bits_from: u32,
    pub bits_to: u32,
    pub holds: bool,
    pub checked_count: u64,
    pub violation_count: usize,
    pub violations: Vec<Witness>,
    pub notes: String,
    pub details: serde_json::Value,
}

impl PropertyReport {
    fn new(claim: ClaimId, net: &StateNetwork) -> Self {
        let bits = net.precision().bits();
        PropertyReport {
            claim,
            kind: claim.kind(),
            mu: *net.mu(),
            mode: net.mode(),
            bits_from: bits,
            bits_to: bits,
            holds: true,
            checked_count: 0,
            violation_count: 0,
            violations: Vec::new(),
            notes: String::new(),
            details: serde_json::Value::Null,
        }
    }

    fn for_range(claim: ClaimId, range: &[Level<'_>]) -> Self {
        let mut r = PropertyReport::new(claim, range[0].net);
        r.bits_to = range[range.len() - 1].net.precision().bits();
        r
    }

    fn violate(&mut self, w: Witness) {
        self.violations.push(w);
    }

    fn finish(mut self, notes: &str) -> Self {
        self.violation_count = self.violations.len();
        self.holds = self.violations.is_empty();
        self.notes = notes.to_string();
        self
    }

    /// True when this report should fail a run: theorems always, conjectures
    /// only with `assert_conjectures`.
    pub fn is_enforced_failure(&self, assert_conjectures: bool) -> bool {
        !self.holds
            && match self.kind {
                ClaimKind::Theorem => true,
                ClaimKind::Conjecture => assert_conjectures,
                ClaimKind::Descriptive => false,
            }
    }
}

/// One precision level of a sweep: the network and its analysis.
#[derive(Clone, Copy)]
pub struct Level<'a> {
    pub net: &'a StateNetwork,
    pub analysis: &'a Analysis,
}

impl Level<'_> {
    fn bits(&self) -> u32 {
        self.net.precision().bits()
    }
}

fn require(cond: bool, what: impl Into<String>) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precision(what.into()))
    }
}

fn check_refinement(coarse: &StateNetwork, fine: &StateNetwork) -> Result<()> {
    require(
        coarse.mode() == QuantizationMode::Round && fine.mode() == QuantizationMode::Round,
        "refinement properties are defined for round quantization only",
    )?;
    require(coarse.mu() == fine.mu(), "networks use different mu")?;
    require(
        fine.precision().bits() == coarse.precision().bits() + 1,
        "the finer network must have exactly one more bit",
    )
}

fn build_pair(mu: ControlParameter, n: Precision) -> Result<(StateNetwork, StateNetwork)> {
    let finer = n
        .finer()
        .ok_or_else(|| Error::Precision(format!("no precision above {} bits", n.bits())))?;
    Ok((
        build_network(mu, n, QuantizationMode::Round)?,
        build_network(mu, finer, QuantizationMode::Round)?,
    ))
}

/// Correction term for even labels: `+1` when the fractional part of the
/// scaled image lies in `[1/4, 1/2)`, `-1` in `[1/2, 3/4)`, otherwise `0`.
pub fn even_correction(scaled: &ExactRatio) -> i64 {
    match scaled.frac_quarter() {
        1 => 1,
        2 => -1,
        _ => 0,
    }
}

/// `F_{n+1}(2i) = 2 F_n(i) + delta(frac(f_n(i) 2^n))` for every `i` in `0..=2^n`.
pub fn check_p1_even_on(coarse: &StateNetwork, fine: &StateNetwork) -> Result<PropertyReport> {
    check_refinement(coarse, fine)?;
    let mut r = PropertyReport::new(ClaimId::P1, coarse);
    let (mu, n) = (coarse.mu(), coarse.precision());
    for i in 0..coarse.len() {
        let scaled = exact_value(i as u64, mu, n)?;
        let expected = 2 * coarse.successor(i) as i64 + even_correction(&scaled);
        let actual = fine.successor(2 * i) as i64;
        if expected != actual {
            r.violate(Witness::new([i as i64], expected, actual));
        }
        r.checked_count += 1;
    }
    Ok(r.finish("input [i]; expected 2*F_n(i)+delta, actual F_{n+1}(2i); round quantization"))
}

pub fn check_p1_even(mu: ControlParameter, n: Precision) -> Result<PropertyReport> {
    let (coarse, fine) = build_pair(mu, n)?;
    check_p1_even_on(&coarse, &fine)
}

/// Right-hand side of the odd-label bound for node `i` of the coarse network.
pub fn odd_label_bound(mu: &ControlParameter, n: Precision, i: u64) -> Result<i64> {
    let scaled = exact_value(i, mu, n)?;
    // (N / 2^(e+2)) * (4 - (1 + 4i) / 2^(n-1)) = N (2^(n+1) - 1 - 4i) / 2^(e+n+1)
    let inner = (1i128 << (n.bits() + 1)) - 1 - 4 * i128::from(i);
    let magnitude = ExactRatio::new(
        u128::from(mu.numerator()) * inner.unsigned_abs(),
        mu.exponent() + n.bits() + 1,
    );
    // half away from zero, so |R(x)| = R(|x|)
    let rounded = magnitude.round() as i64;
    let slack = if matches!(scaled.frac_quarter(), 1 | 2) {
        1
    } else {
        2
    };
    Ok(rounded + slack)
}

/// `|F_{n+1}(2i+1) - 2 F_n(i)|` against [`odd_label_bound`], for every `i`
/// with an odd label `2i+1 <= 2^(n+1)`, i.e. `i` in `0..2^n`.
pub fn check_p2_odd_on(coarse: &StateNetwork, fine: &StateNetwork) -> Result<PropertyReport> {
    check_refinement(coarse, fine)?;
    let mut r = PropertyReport::new(ClaimId::P2, coarse);
    let (mu, n) = (coarse.mu(), coarse.precision());
    for i in 0..coarse.max_label() {
        let lhs = (fine.successor(2 * i + 1) as i64 - 2 * coarse.successor(i) as i64).abs();
        let bound = odd_label_bound(mu, n, i as u64)?;
        if lhs > bound {
            r.violate(Witness::new([i as i64], bound, lhs));
        }
        r.checked_count += 1;
    }
    Ok(r.finish(
        "input [i]; expected = bound, actual = |F_{n+1}(2i+1) - 2*F_n(i)|; i = 2^n has no odd partner",
    ))
}

pub fn check_p2_odd(mu: ControlParameter, n: Precision) -> Result<PropertyReport> {
    let (coarse, fine) = build_pair(mu, n)?;
    check_p2_odd_on(&coarse, &fine)
}

/// Lists nodes with in-degree of at least [`LARGE_IN_DEGREE`] and how far
/// they sit below `2^n`. The only enforced condition is that nothing above the
/// peak image `F_n(2^(n-1))` has a preimage.
pub fn check_p3_on(level: Level<'_>) -> PropertyReport {
    let net = level.net;
    let mut r = PropertyReport::new(ClaimId::P3, net);
    let scale = net.max_label();
    let peak = net.successor(scale / 2);
    let mut large = Vec::new();
    let mut max_distance: Option<f64> = None;
    for (v, &d) in level.analysis.in_degree.iter().enumerate() {
        r.checked_count += 1;
        if v > peak && d > 0 {
            r.violate(Witness::new([v as i64], 0, d as i64));
        }
        if d >= LARGE_IN_DEGREE {
            let distance = (scale - v) as f64 / scale as f64;
            max_distance = Some(max_distance.map_or(distance, |m: f64| m.max(distance)));
            large.push(json!({ "node": v, "in_degree": d, "distance": distance }));
        }
    }
    r.details = json!({
        "peak_image": peak,
        "large_in_degree_threshold": LARGE_IN_DEGREE,
        "large_in_degree_nodes": large,
        "max_normalized_distance": max_distance,
    });
    r.finish("input [v]; violation = node above the peak image with nonzero in-degree; distance = (2^n - v)/2^n")
}

/// In-degree location check at `n = n_mu`.
pub fn check_p3_indegree_location(mu: ControlParameter) -> Result<PropertyReport> {
    let n = Precision::new(mu.exponent().max(1), &mu)?;
    let net = build_network(mu, n, QuantizationMode::Round)?;
    let analysis = Analysis::new(&net);
    Ok(check_p3_on(Level {
        net: &net,
        analysis: &analysis,
    }))
}

/// Colliding pairs `F(i1) = F(i2)` with `(i1 + i2) mod 2^n != 0` must satisfy
/// `|i1 - i2| < 2^(n - n_mu + 1)`.
pub fn check_c1_on(net: &StateNetwork) -> PropertyReport {
    let mut r = PropertyReport::new(ClaimId::C1, net);
    let scale = net.max_label();
    let bits = net.precision().bits();
    let bound = 1i64 << (bits + 1 - net.mu().exponent());

    // counting sort of nodes by successor; buckets come out in ascending label order
    let mut start = vec![0usize; net.len() + 1];
    for &s in net.successors() {
        start[s as usize + 1] += 1;
    }
    for v in 0..net.len() {
        start[v + 1] += start[v];
    }
    let mut fill = start.clone();
    let mut by_image = vec![0u32; net.len()];
    for (i, s) in net.edges() {
        by_image[fill[s]] = i as u32;
        fill[s] += 1;
    }

    let mut exempt = 0u64;
    for v in 0..net.len() {
        let bucket = &by_image[start[v]..start[v + 1]];
        for (a, &i1) in bucket.iter().enumerate() {
            for &i2 in &bucket[a + 1..] {
                let (i1, i2) = (i1 as usize, i2 as usize);
                if (i1 + i2) % scale == 0 {
                    exempt += 1;
                    continue;
                }
                r.checked_count += 1;
                let gap = (i2 - i1) as i64;
                if gap >= bound {
                    r.violate(Witness::new([i1 as i64, i2 as i64], bound, gap));
                }
            }
        }
    }
    r.details = json!({ "distance_bound": bound, "exempt_pairs": exempt });
    r.finish("input [i1, i2]; expected = exclusive bound 2^(n-n_mu+1), actual = |i1 - i2|")
}

pub fn check_c1_collision_distance(
    mu: ControlParameter,
    n: Precision,
    mode: QuantizationMode,
) -> Result<PropertyReport> {
    Ok(check_c1_on(&build_network(mu, n, mode)?))
}

/// Component count at most [`COMPONENT_BOUND`] at every precision.
pub fn check_c2_on(range: &[Level<'_>]) -> PropertyReport {
    let mut r = PropertyReport::for_range(ClaimId::C2, range);
    let mut seq = Vec::new();
    for level in range {
        let c = level.analysis.components.len();
        seq.push(json!({ "bits": level.bits(), "components": c }));
        if c > COMPONENT_BOUND {
            r.violate(Witness::new(
                [level.bits() as i64],
                COMPONENT_BOUND as i64,
                c as i64,
            ));
        }
        r.checked_count += 1;
    }
    let max = range.iter().map(|l| l.analysis.components.len()).max();
    r.details = json!({ "bound": COMPONENT_BOUND, "max_components": max, "sequence": seq });
    r.finish("input [n]; expected = bound, actual = component count")
}

pub fn check_c2_component_count(
    mu: ControlParameter,
    bits: impl IntoIterator<Item = u32>,
) -> Result<PropertyReport> {
    let sweep = Sweep::build(mu, bits, QuantizationMode::Round)?;
    Ok(check_c2_on(&sweep.levels()))
}

/// Solutions of `F^(m)(x) = x`: nodes on a cycle whose length divides `m`.
pub fn periodic_points(net: &StateNetwork, m: u32) -> Result<Vec<usize>> {
    periodic_points_in(&Analysis::new(net), m)
}

pub fn periodic_points_in(analysis: &Analysis, m: u32) -> Result<Vec<usize>> {
    if m < 1 {
        return Err(Error::IterationCount(m));
    }
    let mut pts: Vec<usize> = analysis
        .cycles
        .iter()
        .filter(|c| (m as usize).is_multiple_of(c.len()))
        .flatten()
        .copied()
        .collect();
    pts.sort_unstable();
    Ok(pts)
}

fn check_d1(range: &[Level<'_>]) -> PropertyReport {
    let mut r = PropertyReport::for_range(ClaimId::D1, range);
    let seq: Vec<_> = range
        .iter()
        .map(|l| {
            json!({
                "bits": l.bits(),
                "components": l.analysis.components.len(),
                "sizes": l.analysis.components.iter().map(|c| c.node_count).collect::<Vec<_>>(),
            })
        })
        .collect();
    r.checked_count = range.len() as u64;
    r.details = json!({ "sequence": seq });
    r.finish("component counts per precision; descriptive")
}

fn check_d2(range: &[Level<'_>]) -> PropertyReport {
    let mut r = PropertyReport::for_range(ClaimId::D2, range);
    for level in range {
        let a = level.analysis;
        let mut cycles_per_component = vec![0usize; a.components.len()];
        for c in &a.cycles {
            cycles_per_component[a.component_of[c[0]] as usize] += 1;
        }
        for (id, &k) in cycles_per_component.iter().enumerate() {
            r.checked_count += 1;
            if k != 1 {
                r.violate(Witness::new([level.bits() as i64, id as i64], 1, k as i64));
            }
        }
    }
    r.finish(
        "input [n, component id]; expected exactly 1 cycle, actual cycle count in that component",
    )
}

fn check_d3(range: &[Level<'_>], m_max: u32) -> PropertyReport {
    let mut r = PropertyReport::for_range(ClaimId::D3, range);
    let mut rows = Vec::new();
    for level in range {
        let a = level.analysis;
        let per_m: Vec<usize> = (1..=m_max)
            .map(|m| periodic_points_in(a, m).map_or(0, |p| p.len()))
            .collect();
        let orbits_within = a.cycles.iter().filter(|c| c.len() as u32 <= m_max).count();
        let periodic_nodes: usize = a.cycles.iter().map(Vec::len).sum();
        rows.push(json!({
            "bits": level.bits(),
            "components": a.components.len(),
            "cycles": a.cycles.len(),
            "solutions_per_m": per_m,
            "solution_pairs_up_to_m_max": per_m.iter().sum::<usize>(),
            "orbits_with_period_up_to_m_max": orbits_within,
            "periodic_nodes": periodic_nodes,
        }));
        r.checked_count += 1;
        if a.components.len() != a.cycles.len() {
            r.violate(Witness::new(
                [level.bits() as i64],
                a.components.len() as i64,
                a.cycles.len() as i64,
            ));
        }
    }
    r.details = json!({ "m_max": m_max, "tallies": rows });
    r.finish(
        "input [n]; expected = component count, actual = number of distinct periodic orbits \
         (solutions of F^(m)(x)=x over all m, grouped by orbit); raw (m, x) tallies up to m_max \
         are listed alongside since counting pairs overcounts",
    )
}

fn check_d4(range: &[Level<'_>]) -> PropertyReport {
    let mut r = PropertyReport::for_range(ClaimId::D4, range);
    for level in range {
        let a = level.analysis;
        for c in a.cycles.iter().filter(|c| c.len() > 2) {
            r.checked_count += 1;
            let best = c.iter().map(|&v| a.in_degree[v]).max().unwrap_or(0);
            if best < LARGE_IN_DEGREE {
                r.violate(Witness::new(
                    [level.bits() as i64, c[0] as i64, c.len() as i64],
                    LARGE_IN_DEGREE as i64,
                    best as i64,
                ));
            }
        }
    }
    r.details = json!({ "large_in_degree_threshold": LARGE_IN_DEGREE });
    r.finish("input [n, smallest cycle node, cycle length]; expected = minimum large in-degree, actual = largest in-degree on the cycle")
}

fn check_d5(range: &[Level<'_>]) -> PropertyReport {
    let mut r = PropertyReport::for_range(ClaimId::D5, range);
    let seq: Vec<_> = range
        .iter()
        .map(|l| {
            let (node, degree) = l.analysis.max_in_degree_node();
            json!({ "bits": l.bits(), "node": node, "in_degree": degree })
        })
        .collect();
    for pair in range.windows(2) {
        if pair[1].bits() != pair[0].bits() + 1 {
            continue;
        }
        r.checked_count += 1;
        let d = pair[0].analysis.max_in_degree_node().0 as i64;
        let next = pair[1].analysis.max_in_degree_node().0 as i64;
        if (next - 2 * d).abs() > 1 {
            r.violate(Witness::new([pair[0].bits() as i64, d], 2 * d, next));
        }
    }
    r.details = json!({ "max_in_degree_nodes": seq });
    r.finish("input [n, D_n]; expected 2*D_n (+-1 allowed), actual D_{n+1}; D_n = max in-degree node, ties to smallest label")
}

fn check_d6(range: &[Level<'_>]) -> PropertyReport {
    let mut r = PropertyReport::for_range(ClaimId::D6, range);
    let mut fractions = Vec::new();
    for level in range {
        let sizes: Vec<i64> = level
            .analysis
            .components
            .iter()
            .map(|c| c.node_count as i64)
            .collect();
        let total = level.net.len() as i64;
        fractions.push(json!({
            "bits": level.bits(),
            "largest_fraction": sizes[0] as f64 / total as f64,
        }));
        r.checked_count += 1;
        if 2 * sizes[0] <= total {
            r.violate(Witness::new(
                [level.bits() as i64, 0],
                total / 2 + 1,
                sizes[0],
            ));
        }
        for k in 1..sizes.len() {
            r.checked_count += 1;
            if sizes[k] >= sizes[k - 1] {
                r.violate(Witness::new(
                    [level.bits() as i64, 1, k as i64],
                    sizes[k - 1] - 1,
                    sizes[k],
                ));
            }
        }
    }
    r.details = json!({ "largest_component": fractions });
    r.finish(
        "input [n, 0]: dominance, expected = smallest size above half, actual = largest size; \
         input [n, 1, k]: ordering, expected = at most size of component k-1 minus one, actual = size of component k",
    )
}

/// All six discussion claims over an ascending run of precisions.
pub fn check_discussion_on(range: &[Level<'_>], m_max: u32) -> Vec<PropertyReport> {
    vec![
        check_d1(range),
        check_d2(range),
        check_d3(range, m_max),
        check_d4(range),
        check_d5(range),
        check_d6(range),
    ]
}

pub fn check_discussion_claims(
    mu: ControlParameter,
    bits: impl IntoIterator<Item = u32>,
    m_max: u32,
) -> Result<Vec<PropertyReport>> {
    let sweep = Sweep::build(mu, bits, QuantizationMode::Round)?;
    Ok(check_discussion_on(&sweep.levels(), m_max))
}

/// Networks and analyses for an ascending run of precisions.
pub struct Sweep {
    pub nets: Vec<StateNetwork>,
    pub analyses: Vec<Analysis>,
}

impl Sweep {
    pub fn build(
        mu: ControlParameter,
        bits: impl IntoIterator<Item = u32>,
        mode: QuantizationMode,
    ) -> Result<Self> {
        use rayon::prelude::*;
        let mut bits: Vec<u32> = bits.into_iter().collect();
        bits.sort_unstable();
        bits.dedup();
        if bits.is_empty() {
            return Err(Error::Precision("empty precision range".into()));
        }
        let built: Vec<(StateNetwork, Analysis)> = bits
            .par_iter()
            .map(|&b| {
                let net = build_network(mu, Precision::new(b, &mu)?, mode)?;
                let analysis = Analysis::new(&net);
                Ok((net, analysis))
            })
            .collect::<Result<_>>()?;
        let (nets, analyses) = built.into_iter().unzip();
        Ok(Sweep { nets, analyses })
    }

    pub fn levels(&self) -> Vec<Level<'_>> {
        self.nets
            .iter()
            .zip(&self.analyses)
            .map(|(net, analysis)| Level { net, analysis })
            .collect()
    }
}
