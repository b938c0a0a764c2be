//! Brute-force ground truth: exact q-colorability, the extension
//! characterization checked extensionally, and enumeration of all
//! palette-colored matrices.

use thiserror::Error;

use crate::field::Matrix;
use crate::graph::Graph;
use crate::kernelizer::{check_extension_conditions, KernelError, KernelInstance};
use crate::palette::Palette;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} = {size} exceeds the oracle limit {limit}")]
    SizeLimit {
        what: &'static str,
        size: u128,
        limit: u128,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Guards that keep exhaustive searches bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest graph the coloring search accepts.
    pub max_vertices: usize,
    /// Largest number of assignments any enumeration may visit.
    pub max_enumeration: u128,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_vertices: 24,
            max_enumeration: 1 << 22,
        }
    }
}

/// A proper coloring, or `None` when the graph has none.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringWitness(pub Option<Vec<usize>>);

impl ColoringWitness {
    pub fn is_colorable(&self) -> bool {
        self.0.is_some()
    }

    pub fn coloring(&self) -> Option<&[usize]> {
        self.0.as_deref()
    }
}

/// Decides q-colorability by backtracking over vertices in descending
/// degree order with forward checking of neighbor domains.
pub fn is_q_colorable(
    graph: &Graph,
    q: usize,
    limits: OracleLimits,
) -> Result<ColoringWitness, OracleError> {
    let n = graph.n();
    if n > limits.max_vertices {
        return Err(OracleError::SizeLimit {
            what: "vertex count",
            size: n as u128,
            limit: limits.max_vertices as u128,
        });
    }
    if n == 0 {
        return Ok(ColoringWitness(Some(Vec::new())));
    }
    if q == 0 {
        return Ok(ColoringWitness(None));
    }
    // More colors than vertices never helps.
    let q = q.min(n).min(64);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
    let full = if q == 64 { u64::MAX } else { (1u64 << q) - 1 };
    let mut search = Search {
        graph,
        order,
        domains: vec![full; n],
        colors: vec![usize::MAX; n],
    };
    if !search.assign(0, 0) {
        return Ok(ColoringWitness(None));
    }
    let coloring = search.colors;
    assert!(
        graph.is_proper_coloring(&coloring),
        "search produced an improper coloring"
    );
    Ok(ColoringWitness(Some(coloring)))
}

struct Search<'g> {
    graph: &'g Graph,
    order: Vec<usize>,
    domains: Vec<u64>,
    colors: Vec<usize>,
}

impl Search<'_> {
    fn assign(&mut self, idx: usize, used: usize) -> bool {
        if idx == self.order.len() {
            return true;
        }
        let v = self.order[idx];
        // Colors above `used` are interchangeable; try only the first of them.
        let cap = if used >= 64 {
            u64::MAX
        } else {
            (1u64 << (used + 1)) - 1
        };
        let mut candidates = self.domains[v] & cap;
        while candidates != 0 {
            let c = candidates.trailing_zeros() as usize;
            candidates &= candidates - 1;
            let bit = 1u64 << c;
            self.colors[v] = c;
            let mut pruned = Vec::new();
            let mut wipeout = false;
            for &w in self.graph.neighbors(v) {
                if self.colors[w] == usize::MAX && self.domains[w] & bit != 0 {
                    self.domains[w] &= !bit;
                    pruned.push(w);
                    if self.domains[w] == 0 {
                        wipeout = true;
                        break;
                    }
                }
            }
            if !wipeout && self.assign(idx + 1, used.max(c + 1)) {
                return true;
            }
            for w in pruned {
                self.domains[w] |= bit;
            }
            self.colors[v] = usize::MAX;
        }
        false
    }
}

/// Compares both sides of the extension characterization: some proper
/// coloring of `G[X]` satisfies both extension conditions iff `G` is
/// q-colorable. Returns whether the two sides agree.
pub fn lemma7_equivalence(
    inst: &KernelInstance,
    limits: OracleLimits,
) -> Result<bool, OracleError> {
    let q = inst.q();
    let k = inst.k();
    let space = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if space > limits.max_enumeration {
        return Err(OracleError::SizeLimit {
            what: "modulator colorings",
            size: space,
            limit: limits.max_enumeration,
        });
    }
    let mut coloring = vec![0usize; k];
    let mut extendable = false;
    loop {
        match check_extension_conditions(inst, &coloring) {
            Ok(report) if report.holds() => {
                extendable = true;
                break;
            }
            Ok(_) | Err(KernelError::ImproperColoring(..)) => {}
            Err(e) => return Err(e.into()),
        }
        if !odometer(&mut coloring, q) {
            break;
        }
    }
    let colorable = is_q_colorable(inst.graph(), q, limits)?.is_colorable();
    Ok(extendable == colorable)
}

/// Advances `digits` in base `base`, most significant first. Returns
/// `false` after the last value.
fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// A matrix whose columns are palette vectors, with the color of each column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredMatrix {
    pub colors: Vec<usize>,
    pub matrix: Matrix,
}

/// All `q^cols` palette-colored `q x cols` matrices, in lexicographic order
/// of their color sequences.
pub fn enumerate_colored_matrices(
    palette: &Palette,
    cols: usize,
    limits: OracleLimits,
) -> Result<impl Iterator<Item = ColoredMatrix> + '_, OracleError> {
    let q = palette.q();
    let space = (q as u128).checked_pow(cols as u32).unwrap_or(u128::MAX);
    if space > limits.max_enumeration {
        return Err(OracleError::SizeLimit {
            what: "colored matrices",
            size: space,
            limit: limits.max_enumeration,
        });
    }
    let mut next = (cols > 0).then(|| vec![0usize; cols]);
    Ok(std::iter::from_fn(move || {
        let colors = next.take()?;
        let mut succ = colors.clone();
        if odometer(&mut succ, q) {
            next = Some(succ);
        }
        let columns: Vec<Vec<_>> = colors.iter().map(|&c| palette.column(c).to_vec()).collect();
        let matrix = Matrix::from_columns(palette.field(), &columns).expect("palette columns");
        Some(ColoredMatrix { colors, matrix })
    }))
}
