//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dimacs::{parse_graph, parse_modulator, write_graph, write_modulator};
use crate::field::PrimeField;
use crate::generator::{generate, GenSpec};
use crate::graph::Graph;
use crate::kernelizer::{find_modulator, kernelize, KernelError, KernelInstance};
use crate::oracle::{is_q_colorable, ColoringWitness, OracleError, OracleLimits};
use crate::palette::{
    construct_palette, construct_vandermonde, verify_palette, Palette, PaletteError, PaletteKind,
};
use crate::selftest::{self, SelftestConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NOT_MODULATOR: i32 = 3;
pub const EXIT_DISAGREE: i32 = 4;
pub const EXIT_SIZE_LIMIT: i32 = 5;
pub const EXIT_NO_PALETTE: i32 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "qcol-kernel",
    version,
    about = "Kernelization for q-Coloring parameterized by distance to a matching"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reduce an instance and write the kernel graph.
    Kernelize(KernelizeArgs),
    /// Check that two graphs agree on q-colorability.
    Verify(VerifyArgs),
    /// Generate a random instance with its modulator.
    Gen(GenArgs),
    /// Print a q-palette and its verification report.
    Palette(PaletteArgs),
    /// Run the built-in correctness checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaletteChoice {
    Lemma2,
    Vandermonde,
}

impl From<PaletteChoice> for PaletteKind {
    fn from(c: PaletteChoice) -> Self {
        match c {
            PaletteChoice::Lemma2 => PaletteKind::Triangular,
            PaletteChoice::Vandermonde => PaletteKind::Vandermonde,
        }
    }
}

#[derive(Debug, Args)]
pub struct PaletteOpts {
    /// Prime field modulus.
    #[arg(long, default_value_t = 3)]
    pub field: u64,
    #[arg(long, value_enum, default_value_t = PaletteChoice::Lemma2)]
    pub palette: PaletteChoice,
    /// Override alpha for the lemma2 palette.
    #[arg(long)]
    pub alpha: Option<u64>,
}

#[derive(Debug, Args)]
pub struct KernelizeArgs {
    /// DIMACS graph.
    #[arg(long)]
    pub input: PathBuf,
    /// Modulator sidecar; defaults to `<input>.mod`.
    #[arg(long)]
    pub modulator: Option<PathBuf>,
    /// Compute a modulator when the sidecar is missing.
    #[arg(long)]
    pub auto_modulator: bool,
    /// Largest modulator the exact search tries before going greedy.
    #[arg(long, default_value_t = 10)]
    pub modulator_limit: usize,
    #[arg(long)]
    pub q: usize,
    #[command(flatten)]
    pub palette: PaletteOpts,
    /// Kernel graph output path.
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the kernel's modulator sidecar here.
    #[arg(long)]
    pub kernel_modulator: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub original: PathBuf,
    #[arg(long)]
    pub kernel: PathBuf,
    #[arg(long)]
    pub q: usize,
    /// Oracle guard on graph size.
    #[arg(long, default_value_t = 24)]
    pub max_vertices: usize,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p_xx: f64,
    #[arg(long, default_value_t = 0.5)]
    pub p_xr: f64,
    #[arg(long, default_value_t = 0.5)]
    pub m_frac: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    /// Modulator sidecar path; defaults to `<output>.mod`.
    #[arg(long)]
    pub modulator_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PaletteArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 3)]
    pub field: u64,
    #[arg(long, value_enum, default_value_t = PaletteChoice::Lemma2)]
    pub variant: PaletteChoice,
    #[arg(long)]
    pub alpha: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Values of q for the random trials (repeatable).
    #[arg(long = "q", default_values_t = vec![3usize, 4])]
    pub qs: Vec<usize>,
    /// Random kernelization trials per value of q.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Print the constraint polynomials for the smallest q.
    #[arg(long)]
    pub verbose: bool,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match cli.command {
        Command::Kernelize(a) => cmd_kernelize(&a, out, err),
        Command::Verify(a) => cmd_verify(&a, out, err),
        Command::Gen(a) => cmd_gen(&a, out, err),
        Command::Palette(a) => cmd_palette(&a, out, err),
        Command::Selftest(a) => cmd_selftest(&a, out, err),
    }
}

fn fail(err: &mut dyn Write, code: i32, msg: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {msg}");
    code
}

fn read_graph(path: &Path) -> Result<Graph, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_graph(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn sidecar_path(graph: &Path) -> PathBuf {
    let mut s = graph.as_os_str().to_owned();
    s.push(".mod");
    PathBuf::from(s)
}

fn palette_error_code(e: &PaletteError) -> i32 {
    match e {
        PaletteError::NoValidAlpha { .. } | PaletteError::FieldTooSmall { .. } => EXIT_NO_PALETTE,
        _ => EXIT_PARSE,
    }
}

fn build_palette(
    q: usize,
    field: PrimeField,
    kind: PaletteKind,
    alpha: Option<u64>,
) -> Result<Palette, PaletteError> {
    match (kind, alpha) {
        (PaletteKind::Triangular, Some(a)) => construct_palette(q, field, Some(field.elem(a))),
        _ => Palette::build(q, field, kind),
    }
}

pub fn cmd_kernelize(a: &KernelizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let graph = match read_graph(&a.input) {
        Ok(g) => g,
        Err(e) => return fail(err, EXIT_PARSE, e),
    };
    let mod_path = a
        .modulator
        .clone()
        .unwrap_or_else(|| sidecar_path(&a.input));
    let modulator = match fs::read_to_string(&mod_path) {
        Ok(text) => match parse_modulator(&text, graph.n()) {
            Ok(m) => m,
            Err(e) => return fail(err, EXIT_PARSE, format!("{}: {e}", mod_path.display())),
        },
        Err(_) if a.auto_modulator => match find_modulator(&graph, a.modulator_limit, true) {
            Ok(m) => {
                if !m.optimal {
                    let _ = writeln!(err, "note: modulator found greedily, may not be minimum");
                }
                m.vertices
            }
            Err(e) => return fail(err, EXIT_FAILURE, e),
        },
        Err(e) => return fail(err, EXIT_PARSE, format!("{}: {e}", mod_path.display())),
    };
    let field = match PrimeField::new(a.palette.field) {
        Ok(f) => f,
        Err(e) => return fail(err, EXIT_PARSE, e),
    };
    let palette = match build_palette(a.q, field, a.palette.palette.into(), a.palette.alpha) {
        Ok(p) => p,
        Err(e) => return fail(err, palette_error_code(&e), e),
    };
    let inst = match KernelInstance::new(graph, modulator, a.q) {
        Ok(i) => i,
        Err(e @ KernelError::NotAModulator { .. }) => return fail(err, EXIT_NOT_MODULATOR, e),
        Err(e) => return fail(err, EXIT_PARSE, e),
    };
    let result = match kernelize(&inst, &palette) {
        Ok(r) => r,
        Err(e @ KernelError::QTooSmall(_)) => return fail(err, EXIT_PARSE, e),
        Err(e) => return fail(err, EXIT_FAILURE, e),
    };
    let comments = vec![
        format!("kernel q={} field={} k={}", a.q, a.palette.field, inst.k()),
        format!(
            "modulator {}",
            result
                .modulator
                .iter()
                .map(|v| (v + 1).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ),
    ];
    if let Err(e) = fs::write(&a.output, write_graph(&result.graph, &comments)) {
        return fail(err, EXIT_FAILURE, format!("{}: {e}", a.output.display()));
    }
    if let Some(path) = &a.kernel_modulator {
        if let Err(e) = fs::write(path, write_modulator(&result.modulator)) {
            return fail(err, EXIT_FAILURE, format!("{}: {e}", path.display()));
        }
    }
    for (key, value) in result.stats.lines() {
        let _ = writeln!(out, "{key} {value}");
    }
    EXIT_OK
}

fn describe(w: &ColoringWitness) -> String {
    match w.coloring() {
        Some(c) => {
            let colors: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            format!("colorable witness {}", colors.join(" "))
        }
        None => "not-colorable".to_string(),
    }
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (orig, kern) = match (read_graph(&a.original), read_graph(&a.kernel)) {
        (Ok(o), Ok(k)) => (o, k),
        (Err(e), _) | (_, Err(e)) => return fail(err, EXIT_PARSE, e),
    };
    let limits = OracleLimits {
        max_vertices: a.max_vertices,
        ..Default::default()
    };
    let decide = |g: &Graph| is_q_colorable(g, a.q, limits);
    let (wo, wk) = match (decide(&orig), decide(&kern)) {
        (Ok(o), Ok(k)) => (o, k),
        (Err(e @ OracleError::SizeLimit { .. }), _)
        | (_, Err(e @ OracleError::SizeLimit { .. })) => return fail(err, EXIT_SIZE_LIMIT, e),
        (Err(e), _) | (_, Err(e)) => return fail(err, EXIT_FAILURE, e),
    };
    let _ = writeln!(out, "original {}", describe(&wo));
    let _ = writeln!(out, "kernel {}", describe(&wk));
    if wo.is_colorable() == wk.is_colorable() {
        let _ = writeln!(out, "agree yes");
        EXIT_OK
    } else {
        let _ = writeln!(out, "agree no");
        fail(
            err,
            EXIT_DISAGREE,
            "kernel and original disagree on q-colorability",
        )
    }
}

pub fn cmd_gen(a: &GenArgs, _out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let spec = GenSpec {
        n: a.n,
        k: a.k,
        q: a.q,
        p_xx: a.p_xx,
        p_xr: a.p_xr,
        m_frac: a.m_frac,
        seed: a.seed,
    };
    let inst = match generate(&spec) {
        Ok(i) => i,
        Err(e) => return fail(err, EXIT_PARSE, e),
    };
    let comments = vec![format!(
        "generated n={} k={} q={} p_xx={} p_xr={} m_frac={} seed={}",
        a.n, a.k, a.q, a.p_xx, a.p_xr, a.m_frac, a.seed
    )];
    let mod_path = a
        .modulator_out
        .clone()
        .unwrap_or_else(|| sidecar_path(&a.output));
    let written = fs::write(&a.output, write_graph(&inst.graph, &comments))
        .and_then(|_| fs::write(&mod_path, write_modulator(&inst.modulator)));
    if let Err(e) = written {
        return fail(err, EXIT_FAILURE, e);
    }
    EXIT_OK
}

pub fn cmd_palette(a: &PaletteArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let field = match PrimeField::new(a.field) {
        Ok(f) => f,
        Err(e) => return fail(err, EXIT_PARSE, e),
    };
    let palette = match (a.variant, a.alpha) {
        (PaletteChoice::Vandermonde, Some(_)) => {
            return fail(
                err,
                EXIT_PARSE,
                "--alpha applies to the lemma2 palette only",
            )
        }
        (PaletteChoice::Lemma2, Some(alpha)) => {
            construct_palette(a.q, field, Some(field.elem(alpha)))
        }
        (PaletteChoice::Vandermonde, None) => {
            let alphas: Vec<_> = field.elements().take(a.q).collect();
            construct_vandermonde(a.q, field, &alphas)
        }
        (PaletteChoice::Lemma2, None) => construct_palette(a.q, field, None),
    };
    let palette = match palette {
        Ok(p) => p,
        Err(e) => {
            let code = palette_error_code(&e);
            if code == EXIT_NO_PALETTE {
                return fail(err, code, format!("no q-palette exists ({e})"));
            }
            return fail(err, code, e);
        }
    };
    let _ = writeln!(out, "palette q={} field={}", a.q, a.field);
    let _ = write!(out, "{palette}");
    match verify_palette(field, palette.columns()) {
        Ok(report) => {
            let _ = write!(out, "{report}");
            if report.passes() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Err(e) => fail(err, EXIT_FAILURE, e),
    }
}

pub fn cmd_selftest(a: &SelftestArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let config = SelftestConfig {
        qs: a.qs.clone(),
        trials: a.trials,
        seed: a.seed,
        verbose: a.verbose,
    };
    let summary = selftest::run(&config, out);
    let _ = writeln!(out, "{:<40} {:>6} {:>6}", "check", "cases", "status");
    for row in &summary.rows {
        let status = if row.failure.is_none() {
            "pass"
        } else {
            "FAIL"
        };
        let _ = writeln!(out, "{:<40} {:>6} {:>6}", row.name, row.cases, status);
    }
    let failures: Vec<_> = summary
        .rows
        .iter()
        .filter_map(|r| r.failure.as_ref())
        .collect();
    if failures.is_empty() {
        EXIT_OK
    } else {
        for f in failures {
            let _ = writeln!(err, "{f}");
        }
        EXIT_FAILURE
    }
}
