//! Graph-based wavefunction controllability criteria.
//!
//! The connectivity graph has the drift eigenstates as vertices and an edge
//! wherever `B` couples two of them directly. A connected spectrum-generic
//! graph is controllable; each connected component spans a candidate
//! controllable subspace that is judged by the same conditions restricted to
//! its vertices:
//!
//! * no two distinct coupled transitions share a frequency `ν_ij = λ_i − λ_j`
//!   (the "degenerate transitions" condition),
//! * every ratio `ν_ab / ν_ij` with `ν_ij ≠ 0` is rational.
//!
//! Both conditions are sufficient, not necessary. A component whose only
//! failure is a coupled pair of degenerate levels (`ν = 0`) is reported as
//! [`Verdict::Inconclusive`] instead of violated, since such subspaces can
//! still be controllable.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::rational::{best_rational, Approximation};
use crate::system::SystemSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllabilityConfig {
    /// `B_ij` counts as a coupling when `|B_ij| > edge_threshold`.
    pub edge_threshold: f64,
    /// Two transition frequencies are equal when they differ by at most this.
    pub degeneracy_tol: f64,
    /// Largest denominator tried when testing a frequency ratio for rationality.
    pub max_denominator: u64,
    /// Maximum distance to a bounded-denominator fraction for a ratio to count as rational.
    pub ratio_tol: f64,
}

impl Default for ControllabilityConfig {
    fn default() -> Self {
        Self { edge_threshold: 1e-12, degeneracy_tol: 1e-9, max_denominator: 10_000, ratio_tol: 1e-9 }
    }
}

/// Undirected graph on `0..dim` with edges `(i, j)`, `i < j`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityGraph {
    dim: usize,
    edges: Vec<(usize, usize)>,
}

impl ConnectivityGraph {
    pub fn new(dim: usize, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
            if e.1 >= dim {
                return Err(Error::IndexOutOfRange { index: e.1, dim });
            }
        }
        edges.retain(|e| e.0 != e.1);
        edges.sort_unstable();
        edges.dedup();
        Ok(Self { dim, edges })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let e = if i < j { (i, j) } else { (j, i) };
        self.edges.binary_search(&e).is_ok()
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.dim];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }
}

pub fn build_graph(spec: &SystemSpec, edge_threshold: f64) -> Result<ConnectivityGraph> {
    if edge_threshold.is_nan() || edge_threshold < 0.0 {
        return Err(Error::NegativeThreshold(edge_threshold));
    }
    let n = spec.dim();
    let b = spec.coupling();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if b[(i, j)].norm() > edge_threshold {
                edges.push((i, j));
            }
        }
    }
    ConnectivityGraph::new(n, edges)
}

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(graph: &ConnectivityGraph) -> Vec<Vec<usize>> {
    let adj = graph.adjacency();
    let mut seen = vec![false; graph.dim];
    let mut components = Vec::new();
    for start in 0..graph.dim {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut component = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    component.push(w);
                    queue.push_back(w);
                }
            }
        }
        component.sort_unstable();
        components.push(component);
    }
    components
}

/// Two coupled transitions `first` and `second` (as ordered level pairs)
/// with equal frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneratePair {
    pub first: (usize, usize),
    pub second: (usize, usize),
    pub first_frequency: f64,
    pub second_frequency: f64,
    /// Both transitions connect degenerate levels (`ν = 0`).
    pub zero_frequency: bool,
}

/// Every pair of distinct coupled transitions inside `vertex_set` that share
/// a frequency.
///
/// Transitions are ordered pairs, so an edge `(i, j)` is also the transition
/// `(j, i)` with `ν_ji = −ν_ij`. Two edges therefore collide when
/// `|ν_ij| = |ν_ab|`, and a single edge between degenerate levels collides
/// with its own reverse. Each collision is reported once, oriented so the
/// two frequencies agree.
pub fn check_degenerate_transitions(
    spec: &SystemSpec,
    graph: &ConnectivityGraph,
    vertex_set: &[usize],
    tol: f64,
) -> Vec<DegeneratePair> {
    let edges: Vec<(usize, usize)> =
        graph.edges().iter().copied().filter(|&(i, j)| vertex_set.contains(&i) && vertex_set.contains(&j)).collect();
    let freq = |(i, j): (usize, usize)| spec.transition_frequency(i, j);
    let equal = |x: (usize, usize), y: (usize, usize)| match (
        spec.exact_transition_frequency(x.0, x.1),
        spec.exact_transition_frequency(y.0, y.1),
    ) {
        (Some(a), Some(b)) => a == b,
        _ => (freq(x) - freq(y)).abs() <= tol,
    };
    let is_zero = |x: (usize, usize)| match spec.exact_transition_frequency(x.0, x.1) {
        Some(a) => a == num_rational::Rational64::new(0, 1),
        None => freq(x).abs() <= tol,
    };
    let pair = |first: (usize, usize), second: (usize, usize)| DegeneratePair {
        first,
        second,
        first_frequency: freq(first),
        second_frequency: freq(second),
        zero_frequency: is_zero(first),
    };

    let mut out = Vec::new();
    for (k, &e) in edges.iter().enumerate() {
        let reversed = (e.1, e.0);
        if equal(e, reversed) {
            out.push(pair(e, reversed));
        }
        for &f in &edges[k + 1..] {
            if equal(e, f) {
                out.push(pair(e, f));
            } else if equal(e, (f.1, f.0)) {
                out.push(pair(e, (f.1, f.0)));
            }
        }
    }
    out
}

/// A frequency ratio `ν_numerator / ν_denominator` with no close fraction of
/// bounded denominator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrrationalWitness {
    pub numerator: (usize, usize),
    pub denominator: (usize, usize),
    pub ratio: f64,
    pub best: Approximation,
}

/// Ratios `ν_ab / ν_ij` over level pairs inside `vertex_set` (with
/// `ν_ij ≠ 0`) that fail the bounded-denominator rationality test. Frequencies
/// with `|ν| ≤ tol` count as zero. With an exact rational drift the
/// condition holds identically and the result is empty.
pub fn check_rational_ratios(
    spec: &SystemSpec,
    vertex_set: &[usize],
    max_denominator: u64,
    tol: f64,
) -> Result<Vec<IrrationalWitness>> {
    if max_denominator == 0 {
        return Err(Error::InvalidMaxDenominator);
    }
    if spec.exact_drift().is_some() {
        return Ok(Vec::new());
    }
    let mut vertices: Vec<usize> = vertex_set.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    let mut pairs = Vec::new();
    for (k, &i) in vertices.iter().enumerate() {
        for &j in &vertices[k + 1..] {
            pairs.push((i, j));
        }
    }
    let mut out = Vec::new();
    for &den in &pairs {
        let nu_den = spec.transition_frequency(den.0, den.1);
        if nu_den.abs() <= tol {
            continue;
        }
        for &num in &pairs {
            if num == den {
                continue;
            }
            let ratio = spec.transition_frequency(num.0, num.1) / nu_den;
            let best = best_rational(ratio, max_denominator)?;
            if best.error > tol {
                out.push(IrrationalWitness { numerator: num, denominator: den, ratio, best });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InconclusiveReason {
    /// The only failures are couplings between degenerate levels.
    ZeroFrequencyDegeneracy,
    /// A single uncoupled level; the subspace criteria need at least two.
    SingleLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Controllable,
    Violated,
    Inconclusive(InconclusiveReason),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Controllable => "controllable",
            Verdict::Violated => "violated",
            Verdict::Inconclusive(InconclusiveReason::ZeroFrequencyDegeneracy) => "inconclusive-relaxed-controllable",
            Verdict::Inconclusive(InconclusiveReason::SingleLevel) => "inconclusive-single-level",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        [
            Verdict::Controllable,
            Verdict::Violated,
            Verdict::Inconclusive(InconclusiveReason::ZeroFrequencyDegeneracy),
            Verdict::Inconclusive(InconclusiveReason::SingleLevel),
        ]
        .into_iter()
        .find(|v| v.label() == label)
    }
}

fn verdict_from_witnesses(degenerate: &[DegeneratePair], irrational: &[IrrationalWitness]) -> Verdict {
    if !irrational.is_empty() || degenerate.iter().any(|d| !d.zero_frequency) {
        Verdict::Violated
    } else if !degenerate.is_empty() {
        Verdict::Inconclusive(InconclusiveReason::ZeroFrequencyDegeneracy)
    } else {
        Verdict::Controllable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentAssessment {
    pub vertices: Vec<usize>,
    pub degenerate_pairs: Vec<DegeneratePair>,
    pub irrational_witnesses: Vec<IrrationalWitness>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllabilityReport {
    pub graph: ConnectivityGraph,
    pub components: Vec<Vec<usize>>,
    pub degenerate_pairs: Vec<DegeneratePair>,
    pub irrational_witnesses: Vec<IrrationalWitness>,
    pub global_verdict: Verdict,
    pub subspace_verdicts: Vec<ComponentAssessment>,
    pub notes: Vec<String>,
}

impl ControllabilityReport {
    /// The component equal to `indices` (as a set), if there is one.
    pub fn component_matching(&self, indices: &[usize]) -> Option<&ComponentAssessment> {
        let mut wanted = indices.to_vec();
        wanted.sort_unstable();
        wanted.dedup();
        self.subspace_verdicts.iter().find(|c| c.vertices == wanted)
    }

    pub fn component_containing(&self, index: usize) -> Option<&ComponentAssessment> {
        self.subspace_verdicts.iter().find(|c| c.vertices.contains(&index))
    }
}

pub fn assess(spec: &SystemSpec, config: &ControllabilityConfig) -> Result<ControllabilityReport> {
    let graph = build_graph(spec, config.edge_threshold)?;
    let components = connected_components(&graph);
    let all: Vec<usize> = (0..spec.dim()).collect();

    let degenerate_pairs = check_degenerate_transitions(spec, &graph, &all, config.degeneracy_tol);
    let irrational_witnesses = check_rational_ratios(spec, &all, config.max_denominator, config.ratio_tol)?;
    let global_verdict = if components.len() != 1 {
        Verdict::Violated
    } else {
        verdict_from_witnesses(&degenerate_pairs, &irrational_witnesses)
    };

    let mut notes = Vec::new();
    if spec.is_trivial() {
        notes.push(String::from("[A, B] = 0: the coupling only connects degenerate levels"));
    }

    let mut subspace_verdicts = Vec::with_capacity(components.len());
    for vertices in &components {
        let degenerate = check_degenerate_transitions(spec, &graph, vertices, config.degeneracy_tol);
        let irrational = check_rational_ratios(spec, vertices, config.max_denominator, config.ratio_tol)?;
        let verdict = if vertices.len() < 2 {
            Verdict::Inconclusive(InconclusiveReason::SingleLevel)
        } else {
            verdict_from_witnesses(&degenerate, &irrational)
        };
        if verdict == Verdict::Inconclusive(InconclusiveReason::ZeroFrequencyDegeneracy) {
            notes.push(alloc::format!(
                "component {:?}: the criteria fail only through couplings between degenerate levels; \
                 the sufficient conditions are not met as stated, but relaxed forms of the criterion \
                 admit such subspaces",
                vertices
            ));
        }
        subspace_verdicts.push(ComponentAssessment {
            vertices: vertices.clone(),
            degenerate_pairs: degenerate,
            irrational_witnesses: irrational,
            verdict,
        });
    }

    Ok(ControllabilityReport {
        graph,
        components,
        degenerate_pairs,
        irrational_witnesses,
        global_verdict,
        subspace_verdicts,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{CMatrix, C64};
    use num_rational::Rational64;

    fn chain_spec(drift: &[f64], edges: &[(usize, usize)]) -> SystemSpec {
        let n = drift.len();
        let mut b = CMatrix::zeros(n, n);
        for &(i, j) in edges {
            b[(i, j)] = C64::new(0.5, 0.25);
            b[(j, i)] = C64::new(0.5, -0.25);
        }
        SystemSpec::new(drift.to_vec(), b).unwrap()
    }

    #[test]
    fn diagonal_coupling_has_no_edges() {
        let mut b = CMatrix::zeros(3, 3);
        b[(1, 1)] = C64::new(2.0, 0.0);
        let spec = SystemSpec::new(vec![0.0, 1.0, 2.0], b).unwrap();
        let g = build_graph(&spec, 1e-12).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(connected_components(&g), vec![vec![0], vec![1], vec![2]]);
        let report = assess(&spec, &ControllabilityConfig::default()).unwrap();
        assert_eq!(report.global_verdict, Verdict::Violated);
        assert_eq!(report.components.len(), 3);
    }

    #[test]
    fn dense_coupling_is_complete() {
        let spec = SystemSpec::new(vec![0.0, 1.0, 3.0, 7.0], CMatrix::from_element(4, 4, C64::new(1.0, 0.0))).unwrap();
        let g = build_graph(&spec, 1e-12).unwrap();
        assert_eq!(g.edges().len(), 6);
        assert_eq!(connected_components(&g), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn negative_threshold() {
        let spec = chain_spec(&[0.0, 1.0], &[(0, 1)]);
        assert_eq!(build_graph(&spec, -1.0).unwrap_err(), Error::NegativeThreshold(-1.0));
    }

    #[test]
    fn threshold_filters_tiny_couplings() {
        let mut b = CMatrix::zeros(2, 2);
        b[(0, 1)] = C64::new(1e-13, 0.0);
        b[(1, 0)] = C64::new(1e-13, 0.0);
        let spec = SystemSpec::new(vec![0.0, 1.0], b).unwrap();
        assert!(build_graph(&spec, 1e-12).unwrap().edges().is_empty());
        assert_eq!(build_graph(&spec, 0.0).unwrap().edges(), &[(0, 1)]);
    }

    #[test]
    fn distinct_chain_frequencies() {
        let spec = chain_spec(&[0.0, 1.0, 3.0], &[(0, 1), (1, 2)]);
        let g = build_graph(&spec, 1e-12).unwrap();
        assert!(check_degenerate_transitions(&spec, &g, &[0, 1, 2], 1e-9).is_empty());
    }

    #[test]
    fn equally_spaced_chain_is_degenerate() {
        let spec = chain_spec(&[0.0, 1.0, 2.0], &[(0, 1), (1, 2)]);
        let g = build_graph(&spec, 1e-12).unwrap();
        let pairs = check_degenerate_transitions(&spec, &g, &[0, 1, 2], 1e-9);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].first, (0, 1));
        assert_eq!(pairs[0].second, (1, 2));
        assert_eq!(pairs[0].first_frequency, -1.0);
        assert!(!pairs[0].zero_frequency);
        let report = assess(&spec, &ControllabilityConfig::default()).unwrap();
        assert_eq!(report.global_verdict, Verdict::Violated);
    }

    #[test]
    fn opposite_orientation_counts_as_degenerate() {
        // ν_01 = 1 and ν_12 = -1, so the reversed second edge matches: |ν| collide.
        let spec = chain_spec(&[1.0, 0.0, 1.0], &[(0, 1), (1, 2)]);
        let g = build_graph(&spec, 1e-12).unwrap();
        let pairs = check_degenerate_transitions(&spec, &g, &[0, 1, 2], 1e-9);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].second, (2, 1));
        assert_eq!(pairs[0].first_frequency, pairs[0].second_frequency);
    }

    #[test]
    fn integer_spectrum_ratios_are_rational() {
        let spec = chain_spec(&[0.0, 1.0, 2.0, 3.0], &[(0, 1), (1, 2), (2, 3)]);
        assert!(check_rational_ratios(&spec, &[0, 1, 2, 3], 10_000, 1e-9).unwrap().is_empty());
        let spec = chain_spec(&[0.0, 2.0, 5.0], &[(0, 1), (1, 2)]);
        assert!(check_rational_ratios(&spec, &[0, 1, 2], 10_000, 1e-9).unwrap().is_empty());
    }

    #[test]
    fn sqrt_two_ratio_is_flagged() {
        let spec = chain_spec(&[0.0, 1.0, core::f64::consts::SQRT_2], &[(0, 1), (1, 2)]);
        let w = check_rational_ratios(&spec, &[0, 1, 2], 10_000, 1e-9).unwrap();
        assert!(!w.is_empty());
        assert!(w.iter().any(|w| (w.ratio - core::f64::consts::SQRT_2).abs() < 1e-12));
        let report = assess(&spec, &ControllabilityConfig::default()).unwrap();
        assert_eq!(report.global_verdict, Verdict::Violated);
    }

    #[test]
    fn exact_drift_makes_ratios_rational() {
        let mut b = CMatrix::zeros(3, 3);
        b[(0, 1)] = C64::new(1.0, 0.0);
        b[(1, 0)] = C64::new(1.0, 0.0);
        b[(1, 2)] = C64::new(1.0, 0.0);
        b[(2, 1)] = C64::new(1.0, 0.0);
        let drift = vec![Rational64::new(0, 1), Rational64::new(1, 3), Rational64::new(7, 5)];
        let spec = SystemSpec::with_exact_drift(drift, b).unwrap();
        let report = assess(&spec, &ControllabilityConfig::default()).unwrap();
        assert_eq!(report.global_verdict, Verdict::Controllable);
    }

    #[test]
    fn two_level_system_is_controllable() {
        let spec = chain_spec(&[0.0, 1.0], &[(0, 1)]);
        let report = assess(&spec, &ControllabilityConfig::default()).unwrap();
        assert_eq!(report.global_verdict, Verdict::Controllable);
        assert_eq!(report.subspace_verdicts[0].verdict, Verdict::Controllable);
    }

    #[test]
    fn degenerate_coupled_levels_are_inconclusive() {
        let spec = chain_spec(&[0.0, 2.0, 2.0], &[(0, 2), (1, 2)]);
        let report = assess(&spec, &ControllabilityConfig::default()).unwrap();
        assert_eq!(report.global_verdict, Verdict::Inconclusive(InconclusiveReason::ZeroFrequencyDegeneracy));
        assert_eq!(report.degenerate_pairs.len(), 1);
        assert_eq!(report.degenerate_pairs[0].first, (1, 2));
        assert_eq!(report.degenerate_pairs[0].second, (2, 1));
        assert!(!report.notes.is_empty());
    }

    #[test]
    fn labels_round_trip() {
        for v in [
            Verdict::Controllable,
            Verdict::Violated,
            Verdict::Inconclusive(InconclusiveReason::ZeroFrequencyDegeneracy),
            Verdict::Inconclusive(InconclusiveReason::SingleLevel),
        ] {
            assert_eq!(Verdict::from_label(v.label()), Some(v));
        }
    }
}
