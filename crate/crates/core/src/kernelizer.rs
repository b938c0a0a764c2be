//! Kernelization of q-Coloring on graphs that become a matching after
//! deleting a modulator `X`.
//!
//! Every vertex outside `X` with `q` neighbors `S` in `X` yields a
//! degree-`(q - 1)` polynomial on the color variables of `S`; every edge
//! `(u1, u2)` outside `X` with `(q - 1)`-subsets `S1`, `S2` of the respective
//! neighborhoods yields a degree-`(2q - 3)` polynomial. A spanning subset of
//! each family is kept, and the kernel is `G[X]` plus the gadget of every
//! kept constraint.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use thiserror::Error;

use crate::graph::Graph;
use crate::palette::Palette;
use crate::polyring::{build_f, build_h, ColumnSpec, PolyError};
use crate::sparsifier::{ConstraintTag, EchelonBasis, SparsifyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("vertex {vertex} has {degree} neighbors outside the modulator")]
    NotAModulator { vertex: usize, degree: usize },
    #[error("modulator vertex {vertex} outside a graph on {n} vertices")]
    ModulatorOutOfRange { vertex: usize, n: usize },
    #[error("kernelization needs q >= 3, got {0}")]
    QTooSmall(usize),
    #[error("palette has {palette} colors, instance asks for q = {q}")]
    PaletteMismatch { palette: usize, q: usize },
    #[error("no modulator of size <= {limit} found and greedy fallback disabled")]
    LimitExceeded { limit: usize },
    #[error("coloring of the modulator has {found} entries, expected {expected}")]
    ColoringLength { expected: usize, found: usize },
    #[error("color {color} outside [0, {q})")]
    ColorOutOfRange { color: usize, q: usize },
    #[error("coloring is not proper on edge ({0}, {1})")]
    ImproperColoring(usize, usize),
    #[error("kernel size bound violated: {0}")]
    BoundViolated(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sparsify(#[from] SparsifyError),
}

/// Checks that `G - X` has maximum degree at most 1.
pub fn validate_instance(graph: &Graph, modulator: &[usize]) -> Result<(), KernelError> {
    let n = graph.n();
    let mut in_x = vec![false; n];
    for &v in modulator {
        if v >= n {
            return Err(KernelError::ModulatorOutOfRange { vertex: v, n });
        }
        in_x[v] = true;
    }
    match max_outside_degree_vertex(graph, &in_x) {
        Some((vertex, degree)) if degree >= 2 => Err(KernelError::NotAModulator { vertex, degree }),
        _ => Ok(()),
    }
}

/// First vertex outside `X` of maximum degree in `G - X`.
fn max_outside_degree_vertex(graph: &Graph, in_x: &[bool]) -> Option<(usize, usize)> {
    (0..graph.n())
        .filter(|&v| !in_x[v])
        .map(|v| (v, outside_degree(graph, in_x, v)))
        .max_by_key(|&(v, d)| (d, std::cmp::Reverse(v)))
}

fn outside_degree(graph: &Graph, in_x: &[bool], v: usize) -> usize {
    graph.neighbors(v).iter().filter(|&&w| !in_x[w]).count()
}

/// A graph, a modulator `X` with `G - X` of maximum degree 1, and `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelInstance {
    graph: Graph,
    modulator: Vec<usize>,
    in_x: Vec<bool>,
    q: usize,
}

impl KernelInstance {
    pub fn new(graph: Graph, mut modulator: Vec<usize>, q: usize) -> Result<Self, KernelError> {
        if q == 0 {
            return Err(KernelError::QTooSmall(0));
        }
        modulator.sort_unstable();
        modulator.dedup();
        validate_instance(&graph, &modulator)?;
        let mut in_x = vec![false; graph.n()];
        for &v in &modulator {
            in_x[v] = true;
        }
        Ok(KernelInstance {
            graph,
            modulator,
            in_x,
            q,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Sorted modulator vertices.
    pub fn modulator(&self) -> &[usize] {
        &self.modulator
    }

    pub fn in_modulator(&self, v: usize) -> bool {
        self.in_x[v]
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `k = |X|`.
    pub fn k(&self) -> usize {
        self.modulator.len()
    }

    /// Neighbors of `v` inside `X`, ascending.
    pub fn modulator_neighbors(&self, v: usize) -> Vec<usize> {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| self.in_x[w])
            .collect()
    }

    /// The partner of `v` in `G - X`, if `v` is matched.
    pub fn partner(&self, v: usize) -> Option<usize> {
        self.graph
            .neighbors(v)
            .iter()
            .copied()
            .find(|&w| !self.in_x[w])
    }

    pub fn outside(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.graph.n()).filter(|&v| !self.in_x[v])
    }

    /// Expands a coloring indexed like [`Self::modulator`] to a per-vertex
    /// table, checking range and properness on `G[X]`.
    fn modulator_colors(&self, coloring: &[usize]) -> Result<Vec<Option<usize>>, KernelError> {
        if coloring.len() != self.k() {
            return Err(KernelError::ColoringLength {
                expected: self.k(),
                found: coloring.len(),
            });
        }
        let mut table = vec![None; self.graph.n()];
        for (&v, &c) in self.modulator.iter().zip(coloring) {
            if c >= self.q {
                return Err(KernelError::ColorOutOfRange {
                    color: c,
                    q: self.q,
                });
            }
            table[v] = Some(c);
        }
        for &u in &self.modulator {
            for &w in self.graph.neighbors(u).range(u + 1..) {
                if self.in_x[w] && table[u] == table[w] {
                    return Err(KernelError::ImproperColoring(u, w));
                }
            }
        }
        Ok(table)
    }
}

/// Result of a modulator search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Modulator {
    pub vertices: Vec<usize>,
    /// `true` when the exact search proved minimum cardinality.
    pub optimal: bool,
}

/// Finds a modulator: the minimum one if it has at most `limit` vertices,
/// otherwise a greedy one when `greedy_fallback` is set.
pub fn find_modulator(
    graph: &Graph,
    limit: usize,
    greedy_fallback: bool,
) -> Result<Modulator, KernelError> {
    let mut in_x = vec![false; graph.n()];
    for budget in 0..=limit {
        if branch(graph, &mut in_x, budget) {
            let vertices = (0..graph.n()).filter(|&v| in_x[v]).collect();
            return Ok(Modulator {
                vertices,
                optimal: true,
            });
        }
    }
    if !greedy_fallback {
        return Err(KernelError::LimitExceeded { limit });
    }
    Ok(Modulator {
        vertices: greedy_modulator(graph),
        optimal: false,
    })
}

/// Any path `a - v - b` in `G - X` needs one of its three vertices in `X`.
fn branch(graph: &Graph, in_x: &mut [bool], budget: usize) -> bool {
    let conflict = (0..graph.n()).find(|&v| !in_x[v] && outside_degree(graph, in_x, v) >= 2);
    let Some(v) = conflict else {
        return true;
    };
    if budget == 0 {
        return false;
    }
    let mut candidates = vec![v];
    candidates.extend(
        graph
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| !in_x[w])
            .take(2),
    );
    for c in candidates {
        in_x[c] = true;
        if branch(graph, in_x, budget - 1) {
            return true;
        }
        in_x[c] = false;
    }
    false
}

fn greedy_modulator(graph: &Graph) -> Vec<usize> {
    let mut in_x = vec![false; graph.n()];
    while let Some((v, d)) = max_outside_degree_vertex(graph, &in_x) {
        if d < 2 {
            break;
        }
        in_x[v] = true;
    }
    // Drop vertices that turned out redundant.
    for v in 0..graph.n() {
        if in_x[v] {
            in_x[v] = false;
            let ok = outside_degree(graph, &in_x, v) <= 1
                && graph
                    .neighbors(v)
                    .iter()
                    .all(|&w| in_x[w] || outside_degree(graph, &in_x, w) <= 1);
            if !ok {
                in_x[v] = true;
            }
        }
    }
    (0..graph.n()).filter(|&v| in_x[v]).collect()
}

/// All constraints of the instance, in the order they are sparsified:
/// first every `Single { v, S }` sorted by `(v, S)`, then every
/// `Pair { u1, u2, S1, S2 }` over both orientations of each edge of `G - X`,
/// sorted by `(u1, u2, S1, S2)`.
pub fn enumerate_constraints(inst: &KernelInstance) -> impl Iterator<Item = ConstraintTag> + '_ {
    let q = inst.q();
    let singles = inst.outside().flat_map(move |v| {
        inst.modulator_neighbors(v)
            .into_iter()
            .combinations(q)
            .map(move |s| ConstraintTag::Single { v, s })
    });
    let pairs = inst.outside().flat_map(move |u1| {
        inst.partner(u1).into_iter().flat_map(move |u2| {
            let n1 = inst.modulator_neighbors(u1);
            let n2 = inst.modulator_neighbors(u2);
            n1.into_iter()
                .combinations(q - 1)
                .cartesian_product(n2.into_iter().combinations(q - 1).collect::<Vec<_>>())
                .map(move |(s1, s2)| ConstraintTag::Pair { u1, u2, s1, s2 })
        })
    });
    singles.chain(pairs)
}

/// Counts reported by a kernelization run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KernelStats {
    pub p1_total: usize,
    pub p1_basis: usize,
    pub p2_total: usize,
    pub p2_basis: usize,
    pub kernel_vertices: usize,
    pub kernel_edges: usize,
    pub kernel_bits: u64,
}

impl KernelStats {
    /// `key value` lines with stable keys.
    pub fn lines(&self) -> Vec<(&'static str, u64)> {
        vec![
            ("p1_total", self.p1_total as u64),
            ("p1_basis", self.p1_basis as u64),
            ("p2_total", self.p2_total as u64),
            ("p2_basis", self.p2_basis as u64),
            ("kernel_vertices", self.kernel_vertices as u64),
            ("kernel_edges", self.kernel_edges as u64),
            ("kernel_bits", self.kernel_bits),
        ]
    }

    /// Checks the vertex, edge and basis-size bounds for modulator size `k`.
    pub fn check_bounds(&self, k: usize, q: usize) -> Result<(), KernelError> {
        let (k, q) = (k as u128, q as u128);
        let (b1, b2) = (self.p1_basis as u128, self.p2_basis as u128);
        let max_v = k + b1 + 2 * b2;
        if self.kernel_vertices as u128 > max_v {
            return Err(KernelError::BoundViolated(format!(
                "|V'| = {} > {max_v}",
                self.kernel_vertices
            )));
        }
        let max_e = k * k.saturating_sub(1) / 2 + q * b1 + (2 * q - 1) * b2;
        if self.kernel_edges as u128 > max_e {
            return Err(KernelError::BoundViolated(format!(
                "|E'| = {} > {max_e}",
                self.kernel_edges
            )));
        }
        let span1 = sat_pow(q * k, q as u32 - 1).saturating_add(1);
        if b1 > span1 {
            return Err(KernelError::BoundViolated(format!(
                "|P'_1| = {b1} > {span1}"
            )));
        }
        let span2 = sat_pow(q * k, 2 * q as u32 - 3).saturating_add(1);
        if b2 > span2 {
            return Err(KernelError::BoundViolated(format!(
                "|P'_2| = {b2} > {span2}"
            )));
        }
        Ok(())
    }
}

fn sat_pow(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).unwrap_or(u128::MAX)
}

/// `2 |E| ceil(log2 max(|V|, 2))`: bits of an edge-list encoding.
pub fn encoded_bits(vertices: usize, edges: usize) -> u64 {
    let n = vertices.max(2) as u64;
    let width = 64 - (n - 1).leading_zeros() as u64;
    2 * edges as u64 * width
}

/// The reduced instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelResult {
    /// Kernel graph, vertices relabelled to `0..|V'|` preserving order.
    pub graph: Graph,
    /// Original id of each kernel vertex, ascending.
    pub original_ids: Vec<usize>,
    /// The modulator in kernel ids.
    pub modulator: Vec<usize>,
    /// Retained constraints, singles first.
    pub retained: Vec<ConstraintTag>,
    pub stats: KernelStats,
}

impl KernelResult {
    /// The kernel as an instance of its own.
    pub fn instance(&self, q: usize) -> Result<KernelInstance, KernelError> {
        KernelInstance::new(self.graph.clone(), self.modulator.clone(), q)
    }
}

/// Runs the kernelization with the given palette.
pub fn kernelize(inst: &KernelInstance, palette: &Palette) -> Result<KernelResult, KernelError> {
    let q = inst.q();
    if q < 3 {
        return Err(KernelError::QTooSmall(q));
    }
    if palette.q() != q {
        return Err(KernelError::PaletteMismatch {
            palette: palette.q(),
            q,
        });
    }
    let field = palette.field();
    let mut singles = EchelonBasis::new(field);
    let mut pairs = EchelonBasis::new(field);
    let mut stats = KernelStats::default();
    // A constraint's polynomial depends only on its modulator sets, so a
    // repeated key is always dependent and needs no reduction.
    let mut seen_singles: HashSet<Vec<usize>> = HashSet::new();
    let mut seen_pairs: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();

    for tag in enumerate_constraints(inst) {
        match &tag {
            ConstraintTag::Single { s, .. } => {
                stats.p1_total += 1;
                if !seen_singles.insert(s.clone()) {
                    continue;
                }
                let cols: Vec<ColumnSpec> = s.iter().copied().map(ColumnSpec::Vertex).collect();
                let poly = build_f(palette, &cols)?;
                singles.insert(&poly, tag)?;
            }
            ConstraintTag::Pair { s1, s2, .. } => {
                stats.p2_total += 1;
                if !seen_pairs.insert((s1.clone(), s2.clone())) {
                    continue;
                }
                let poly = build_h(palette, s1, s2)?;
                pairs.insert(&poly, tag)?;
            }
        }
    }
    stats.p1_basis = singles.len();
    stats.p2_basis = pairs.len();

    let graph = inst.graph();
    let mut vertices: BTreeSet<usize> = inst.modulator().iter().copied().collect();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut add_edge = |a: usize, b: usize| {
        debug_assert!(graph.has_edge(a, b));
        edges.insert((a.min(b), a.max(b)));
    };
    for &u in inst.modulator() {
        for &w in graph.neighbors(u).range(u + 1..) {
            if inst.in_modulator(w) {
                add_edge(u, w);
            }
        }
    }
    let retained: Vec<ConstraintTag> = singles
        .members()
        .into_iter()
        .chain(pairs.members())
        .cloned()
        .collect();
    for tag in &retained {
        match tag {
            ConstraintTag::Single { v, s } => {
                vertices.insert(*v);
                for &z in s {
                    add_edge(*v, z);
                }
            }
            ConstraintTag::Pair { u1, u2, s1, s2 } => {
                vertices.insert(*u1);
                vertices.insert(*u2);
                add_edge(*u1, *u2);
                for &z in s1 {
                    add_edge(*u1, z);
                }
                for &z in s2 {
                    add_edge(*u2, z);
                }
            }
        }
    }

    let original_ids: Vec<usize> = vertices.into_iter().collect();
    let mut index = vec![usize::MAX; graph.n()];
    for (i, &v) in original_ids.iter().enumerate() {
        index[v] = i;
    }
    let mut kernel = Graph::new(original_ids.len());
    for (a, b) in edges {
        kernel
            .add_edge(index[a], index[b])
            .expect("endpoints are kernel vertices");
    }
    let modulator: Vec<usize> = inst.modulator().iter().map(|&v| index[v]).collect();

    stats.kernel_vertices = kernel.n();
    stats.kernel_edges = kernel.edge_count();
    stats.kernel_bits = encoded_bits(kernel.n(), kernel.edge_count());
    stats.check_bounds(inst.k(), q)?;

    Ok(KernelResult {
        graph: kernel,
        original_ids,
        modulator,
        retained,
        stats,
    })
}

/// The first violated extension condition, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtensionViolation {
    /// All `q` vertices of `s` received distinct colors.
    Single { v: usize, s: Vec<usize> },
    /// `s1` is rainbow and `s2` uses exactly the same colors.
    Pair {
        u1: usize,
        u2: usize,
        s1: Vec<usize>,
        s2: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    pub violation: Option<ExtensionViolation>,
}

impl ExtensionReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks both extension conditions for a proper coloring of `G[X]`
/// (indexed like [`KernelInstance::modulator`]) by enumerating every
/// constrained subset.
pub fn check_extension_conditions(
    inst: &KernelInstance,
    coloring: &[usize],
) -> Result<ExtensionReport, KernelError> {
    let colors = inst.modulator_colors(coloring)?;
    let q = inst.q();
    let color_set = |s: &[usize]| -> BTreeSet<usize> {
        s.iter()
            .map(|&z| colors[z].expect("modulator vertex"))
            .collect()
    };
    for v in inst.outside() {
        for s in inst.modulator_neighbors(v).into_iter().combinations(q) {
            if color_set(&s).len() == q {
                return Ok(ExtensionReport {
                    violation: Some(ExtensionViolation::Single { v, s }),
                });
            }
        }
    }
    for u1 in inst.outside() {
        let Some(u2) = inst.partner(u1) else {
            continue;
        };
        let n2 = inst.modulator_neighbors(u2);
        for s1 in inst.modulator_neighbors(u1).into_iter().combinations(q - 1) {
            let t1 = color_set(&s1);
            if t1.len() < q - 1 {
                continue;
            }
            for s2 in n2.iter().copied().combinations(q - 1) {
                if color_set(&s2) == t1 {
                    return Ok(ExtensionReport {
                        violation: Some(ExtensionViolation::Pair { u1, u2, s1, s2 }),
                    });
                }
            }
        }
    }
    Ok(ExtensionReport { violation: None })
}

/// Extends a proper coloring of `G[X]` to all of `G`, or returns `None` if
/// the extension conditions fail. Isolated outside vertices take their
/// smallest free color; matched pairs take distinct free colors.
pub fn extend_coloring(inst: &KernelInstance, coloring: &[usize]) -> Option<Vec<usize>> {
    let table = inst.modulator_colors(coloring).ok()?;
    let q = inst.q();
    let free = |v: usize| -> Vec<usize> {
        let mut used = vec![false; q];
        for z in inst.modulator_neighbors(v) {
            used[table[z].expect("modulator vertex")] = true;
        }
        (0..q).filter(|&c| !used[c]).collect()
    };
    let mut full: Vec<usize> = table.iter().map(|c| c.unwrap_or(usize::MAX)).collect();
    for v in inst.outside() {
        if full[v] != usize::MAX {
            continue;
        }
        let fv = free(v);
        match inst.partner(v) {
            None => full[v] = *fv.first()?,
            Some(w) => {
                let fw = free(w);
                let (&a, &b) = (fv.first()?, fw.first()?);
                let (cv, cw) = if a != b {
                    (a, b)
                } else if fv.len() >= 2 {
                    (fv[1], b)
                } else if fw.len() >= 2 {
                    (a, fw[1])
                } else {
                    return None;
                };
                full[v] = cv;
                full[w] = cw;
            }
        }
    }
    debug_assert!(inst.graph().is_proper_coloring(&full));
    Some(full)
}
