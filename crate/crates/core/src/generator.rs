//! Seeded random instances: a modulator `X` on the first `k` vertices, a
//! matching on part of the rest, and random edges inside `X` and between `X`
//! and the rest. No coloring is planted.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("modulator size {k} exceeds vertex count {n}")]
    ModulatorTooLarge { k: usize, n: usize },
    #[error("{name} = {value} is not in [0, 1]")]
    BadProbability { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    /// Edge probability inside `X`.
    pub p_xx: f64,
    /// Edge probability between `X` and the rest.
    pub p_xr: f64,
    /// Fraction of the rest that is matched in pairs.
    pub m_frac: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.k > self.n {
            return Err(GenError::ModulatorTooLarge {
                k: self.k,
                n: self.n,
            });
        }
        for (name, value) in [
            ("p_xx", self.p_xx),
            ("p_xr", self.p_xr),
            ("m_frac", self.m_frac),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GenError::BadProbability { name, value });
            }
        }
        Ok(())
    }
}

/// A generated graph together with its modulator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub graph: Graph,
    pub modulator: Vec<usize>,
}

pub fn generate(spec: &GenSpec) -> Result<GeneratedInstance, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut graph = Graph::new(spec.n);
    let modulator: Vec<usize> = (0..spec.k).collect();

    let mut rest: Vec<usize> = (spec.k..spec.n).collect();
    rest.shuffle(&mut rng);
    let pairs = ((spec.m_frac * rest.len() as f64) / 2.0).floor() as usize;
    for pair in rest.chunks_exact(2).take(pairs) {
        graph.add_edge(pair[0], pair[1]).expect("distinct vertices");
    }

    for u in 0..spec.k {
        for v in u + 1..spec.k {
            if rng.gen_bool(spec.p_xx) {
                graph.add_edge(u, v).expect("distinct vertices");
            }
        }
    }
    for u in 0..spec.k {
        for v in spec.k..spec.n {
            if rng.gen_bool(spec.p_xr) {
                graph.add_edge(u, v).expect("distinct vertices");
            }
        }
    }
    Ok(GeneratedInstance { graph, modulator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelizer::validate_instance;

    fn spec(seed: u64) -> GenSpec {
        GenSpec {
            n: 14,
            k: 5,
            q: 3,
            p_xx: 0.5,
            p_xr: 0.5,
            m_frac: 0.6,
            seed,
        }
    }

    #[test]
    fn perfect_matching_without_modulator() {
        let g = generate(&GenSpec {
            n: 10,
            k: 0,
            m_frac: 1.0,
            ..spec(3)
        })
        .unwrap();
        assert!(g.modulator.is_empty());
        assert_eq!(g.graph.edge_count(), 5);
        assert!((0..10).all(|v| g.graph.degree(v) == 1));
    }

    #[test]
    fn deterministic_and_valid() {
        let a = generate(&spec(7)).unwrap();
        assert_eq!(a, generate(&spec(7)).unwrap());
        assert!(validate_instance(&a.graph, &a.modulator).is_ok());
        assert_ne!(a, generate(&spec(8)).unwrap());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            generate(&GenSpec { k: 20, ..spec(1) }),
            Err(GenError::ModulatorTooLarge { .. })
        ));
        assert!(matches!(
            generate(&GenSpec {
                p_xr: 1.5,
                ..spec(1)
            }),
            Err(GenError::BadProbability { name: "p_xr", .. })
        ));
    }
}
