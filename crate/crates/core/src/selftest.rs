//! Built-in correctness checks behind the `selftest` subcommand.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dimacs::{write_graph, write_modulator};
use crate::field::{solve_unique, Fe, Matrix, PrimeField};
use crate::generator::{generate, GenSpec};
use crate::kernelizer::{extend_coloring, kernelize, KernelInstance};
use crate::oracle::{enumerate_colored_matrices, is_q_colorable, lemma7_equivalence, OracleLimits};
use crate::palette::{
    construct_palette, construct_vandermonde, exhaustive_palette_search, verify_palette, Palette,
};
use crate::polyring::{build_f, build_g, build_h, Assignment, ColumnSpec, Poly};

#[derive(Debug, Clone)]
pub struct SelftestConfig {
    pub qs: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub verbose: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRow {
    pub name: String,
    pub cases: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub rows: Vec<CheckRow>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.failure.is_none())
    }

    fn push(&mut self, name: impl Into<String>, outcome: Result<usize, String>) {
        let name = name.into();
        let (cases, failure) = match outcome {
            Ok(c) => (c, None),
            Err(f) => (0, Some(format!("{name}: {f}"))),
        };
        self.rows.push(CheckRow {
            name,
            cases,
            failure,
        });
    }
}

/// Smallest prime that is at least `max(q, 3)`.
pub fn vandermonde_prime(q: usize) -> u64 {
    (q.max(3) as u64..)
        .find(|&p| PrimeField::new(p).is_ok())
        .expect("primes are unbounded")
}

/// The two palettes used by the polynomial checks: the triangular palette
/// over GF(3) and a Vandermonde palette over the smallest prime field with
/// at least `q` elements.
pub fn check_palettes(q: usize) -> Vec<Palette> {
    let gf3 = PrimeField::new(3).expect("prime");
    let fv = PrimeField::new(vandermonde_prime(q)).expect("prime");
    let alphas: Vec<Fe> = fv.elements().take(q).collect();
    vec![
        construct_palette(q, gf3, None).expect("palette over GF(3)"),
        construct_vandermonde(q, fv, &alphas).expect("field has q elements"),
    ]
}

pub fn palette_table() -> Result<usize, String> {
    let mut cases = 0;
    for q in 2..=8usize {
        for p in [2u64, 3, 5] {
            let f = PrimeField::new(p).expect("prime");
            let expected = q % 2 == 0 || p >= 3;
            let built = construct_palette(q, f, None)
                .ok()
                .filter(|pal| verify_palette(f, pal.columns()).is_ok_and(|r| r.passes()));
            if built.is_some() != expected {
                return Err(format!("q={q} p={p}: constructed={}", built.is_some()));
            }
            cases += 1;
        }
    }
    let gf2 = PrimeField::new(2).expect("prime");
    match exhaustive_palette_search(3, gf2, 1 << 20) {
        Ok(None) => Ok(cases + 1),
        Ok(Some(p)) => Err(format!("found a 3-palette over GF(2):\n{p}")),
        Err(e) => Err(e.to_string()),
    }
}

fn assignment(palette: &Palette, colors: &[usize]) -> Assignment {
    colors
        .iter()
        .enumerate()
        .map(|(v, &c)| (v, palette.column(c).to_vec()))
        .collect()
}

fn has_repeat(colors: &[usize]) -> bool {
    colors.iter().collect::<BTreeSet<_>>().len() < colors.len()
}

/// Exhaustively checks the vanishing sets of f, g and h for `palette`.
pub fn zero_patterns(palette: &Palette) -> Result<usize, String> {
    let q = palette.q();
    let lim = OracleLimits::default();
    let f_cols: Vec<ColumnSpec> = (0..q).map(ColumnSpec::Vertex).collect();
    let x: Vec<usize> = (0..q - 1).collect();
    let y: Vec<usize> = (q - 1..2 * q - 2).collect();
    let f = build_f(palette, &f_cols).map_err(|e| e.to_string())?;
    let g = build_g(palette, &x).map_err(|e| e.to_string())?;
    let h = build_h(palette, &x, &y).map_err(|e| e.to_string())?;
    let mut cases = 0;
    let mut check = |poly: &Poly, cols: usize, name: &str, vanishes: &dyn Fn(&[usize]) -> bool| {
        for m in enumerate_colored_matrices(palette, cols, lim).map_err(|e| e.to_string())? {
            let value = poly
                .eval(&assignment(palette, &m.colors))
                .map_err(|e| e.to_string())?;
            if value.is_zero() != vanishes(&m.colors) {
                return Err(format!(
                    "{name} at colors {:?} evaluates to {value}",
                    m.colors
                ));
            }
            cases += 1;
        }
        Ok(())
    };
    check(&f, q, "f", &|c| has_repeat(c))?;
    check(&g, q - 1, "g", &|c| has_repeat(c))?;
    check(&h, 2 * q - 2, "h", &|c| {
        let (a, b) = c.split_at(q - 1);
        has_repeat(a) || a.iter().collect::<BTreeSet<_>>() != b.iter().collect::<BTreeSet<_>>()
    })?;
    Ok(cases)
}

pub fn degrees(qs: &[usize]) -> Result<usize, String> {
    let mut cases = 0;
    for &q in qs {
        for palette in check_palettes(q) {
            let cols: Vec<ColumnSpec> = (0..q).map(ColumnSpec::Vertex).collect();
            let x: Vec<usize> = (0..q - 1).collect();
            let y: Vec<usize> = (q - 1..2 * q - 2).collect();
            let got = (
                build_f(&palette, &cols)
                    .map_err(|e| e.to_string())?
                    .degree(),
                build_g(&palette, &x).map_err(|e| e.to_string())?.degree(),
                build_h(&palette, &x, &y)
                    .map_err(|e| e.to_string())?
                    .degree(),
            );
            let q32 = q as u32;
            let want = (Some(q32 - 1), Some(q32 - 2), Some(2 * q32 - 3));
            if got != want {
                return Err(format!("q={q} over {}: degrees {got:?}", palette.field()));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

pub fn truncated_systems() -> Result<usize, String> {
    let mut cases = 0;
    for p in [3u64, 5] {
        let f = PrimeField::new(p).expect("prime");
        for q in 3..=5usize {
            for alpha in f.elements() {
                let Ok(pal) = construct_palette(q, f, Some(alpha)) else {
                    continue;
                };
                let d: Vec<Vec<Fe>> = (0..q - 1).map(|i| pal.truncated(i).to_vec()).collect();
                let d = Matrix::from_columns(f, &d).map_err(|e| e.to_string())?;
                let x = solve_unique(&d, pal.truncated(q - 1)).map_err(|e| e.to_string())?;
                let mut want = vec![f.from_i64(4 - q as i64) - alpha, alpha];
                want.resize(q - 1, f.one());
                if x != want || x.iter().any(|e| e.is_zero()) {
                    return Err(format!("q={q} p={p} alpha={alpha}: x={x:?}"));
                }
                cases += 1;
            }
        }
    }
    Ok(cases)
}

/// Deterministic generator parameters for `count` random trials with `q`
/// colors, cycling through edge densities 0.2, 0.5 and 0.8.
pub fn trial_specs(q: usize, count: usize, seed: u64) -> Vec<GenSpec> {
    const DENSITIES: [f64; 3] = [0.2, 0.5, 0.8];
    let (n_max, k_max) = if q <= 3 { (14, 6) } else { (12, 5) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((q as u64) << 32));
    (0..count)
        .map(|i| {
            let k = rng.gen_range(2..=k_max);
            let n = rng.gen_range(k + 2..=n_max);
            GenSpec {
                n,
                k,
                q,
                p_xx: DENSITIES[i % 3],
                p_xr: DENSITIES[(i / 3) % 3],
                m_frac: [0.5, 0.75, 1.0][rng.gen_range(0..3)],
                seed: rng.gen(),
            }
        })
        .collect()
}

fn replay(spec: &GenSpec, inst: &KernelInstance) -> String {
    format!(
        "replay: {spec:?}\n{}modulator:\n{}",
        write_graph(inst.graph(), &[]),
        write_modulator(inst.modulator())
    )
}

/// Random equi-colorability trials for one `q` with both palette variants.
pub fn kernel_trials(q: usize, trials: usize, seed: u64) -> Result<usize, String> {
    let lim = OracleLimits::default();
    let palettes = check_palettes(q);
    let mut cases = 0;
    for spec in trial_specs(q, trials, seed) {
        let gen = generate(&spec).map_err(|e| e.to_string())?;
        let inst = KernelInstance::new(gen.graph, gen.modulator, q).map_err(|e| e.to_string())?;
        let expected = is_q_colorable(inst.graph(), q, lim)
            .map_err(|e| e.to_string())?
            .is_colorable();
        for palette in &palettes {
            let res =
                kernelize(&inst, palette).map_err(|e| format!("{e}\n{}", replay(&spec, &inst)))?;
            let got = is_q_colorable(&res.graph, q, lim)
                .map_err(|e| e.to_string())?
                .is_colorable();
            if got != expected {
                return Err(format!(
                    "G colorable={expected}, kernel colorable={got} over {}\n{}",
                    palette.field(),
                    replay(&spec, &inst)
                ));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

/// Extension characterization and constructive extension on random
/// instances with `q = 3`.
pub fn extension_trials(trials: usize, seed: u64) -> Result<usize, String> {
    let lim = OracleLimits::default();
    let mut cases = 0;
    for spec in trial_specs(3, trials, seed.wrapping_add(17)) {
        let spec = GenSpec {
            k: spec.k.min(5),
            ..spec
        };
        let gen = generate(&spec).map_err(|e| e.to_string())?;
        let inst = KernelInstance::new(gen.graph, gen.modulator, 3).map_err(|e| e.to_string())?;
        if !lemma7_equivalence(&inst, lim).map_err(|e| e.to_string())? {
            return Err(format!("equivalence fails\n{}", replay(&spec, &inst)));
        }
        let k = inst.k();
        for code in 0..3usize.pow(k as u32) {
            let coloring: Vec<usize> = (0..k).map(|i| code / 3usize.pow(i as u32) % 3).collect();
            if let Some(full) = extend_coloring(&inst, &coloring) {
                let agrees = inst
                    .modulator()
                    .iter()
                    .zip(&coloring)
                    .all(|(&v, &c)| full[v] == c);
                if !agrees || !inst.graph().edges().all(|(u, v)| full[u] != full[v]) {
                    return Err(format!("bad extension {full:?}\n{}", replay(&spec, &inst)));
                }
            }
        }
        cases += 1;
    }
    Ok(cases)
}

pub fn determinism(seed: u64) -> Result<usize, String> {
    let spec = GenSpec {
        n: 14,
        k: 5,
        q: 3,
        p_xx: 0.5,
        p_xr: 0.5,
        m_frac: 0.6,
        seed,
    };
    let palette = &check_palettes(3)[0];
    let first = generate(&spec).map_err(|e| e.to_string())?;
    let second = generate(&spec).map_err(|e| e.to_string())?;
    if first != second {
        return Err("generator is not deterministic".into());
    }
    let inst = KernelInstance::new(first.graph, first.modulator, 3).map_err(|e| e.to_string())?;
    let a = kernelize(&inst, palette).map_err(|e| e.to_string())?;
    let b = kernelize(&inst, palette).map_err(|e| e.to_string())?;
    if a != b {
        return Err("kernelize is not deterministic".into());
    }
    Ok(2)
}

/// Runs every check; progress and verbose output go to `out`.
pub fn run(config: &SelftestConfig, out: &mut dyn Write) -> Summary {
    let mut summary = Summary::default();
    summary.push("palette existence table", palette_table());
    summary.push("truncated linear systems", truncated_systems());
    summary.push("degree identities", degrees(&[3, 4, 5]));
    for q in [3usize, 4] {
        for (palette, variant) in check_palettes(q).iter().zip(["lemma2", "vandermonde"]) {
            summary.push(
                format!("zero patterns q={q} {variant} {}", palette.field()),
                zero_patterns(palette),
            );
        }
    }
    if config.verbose {
        let q = config
            .qs
            .iter()
            .copied()
            .filter(|&q| q >= 3)
            .min()
            .unwrap_or(3);
        let palette = &check_palettes(q)[0];
        let x: Vec<usize> = (0..q - 1).collect();
        let y: Vec<usize> = (q - 1..2 * q - 2).collect();
        let cols: Vec<ColumnSpec> = (0..q).map(ColumnSpec::Vertex).collect();
        if let (Ok(f), Ok(g), Ok(h)) = (
            build_f(palette, &cols),
            build_g(palette, &x),
            build_h(palette, &x, &y),
        ) {
            let _ = writeln!(out, "f = {f}");
            let _ = writeln!(out, "g = {g}");
            let _ = writeln!(out, "h = {h}");
        }
    }
    summary.push("determinism", determinism(config.seed));
    if config.trials > 0 {
        for &q in &config.qs {
            if q < 3 {
                summary.push(format!("kernel trials q={q}"), Err("q must be >= 3".into()));
                continue;
            }
            summary.push(
                format!("kernel trials q={q}"),
                kernel_trials(q, config.trials, config.seed),
            );
        }
        summary.push(
            "extension trials q=3",
            extension_trials(config.trials.min(100), config.seed),
        );
    }
    summary
}
