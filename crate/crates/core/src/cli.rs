//! The `gl2skein` command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{act, project};
use crate::annulus::AnnulusElement;
use crate::lang::{self, parse_annulus, parse_lens, parse_torus, print_annulus, print_lens, Element, LangError};
use crate::lens::{
    gluing_for, reduce_auto, GluingMatrix, LensElement, LensError, Path, SpanningCoordinates, DEFAULT_BUDGET,
};
use crate::torus::{self, TorusElement};
use crate::verify::{self, SuiteReport};

pub const CACHE_VERSION: &str = concat!("gl2skein-cache/1/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "gl2skein", version, about = "Skein computations for the torus, the solid torus and lens spaces")]
pub struct Cli {
    /// Lens space order `p`.
    #[arg(short = 'p', long = "p", global = true, env = "GL2SKEIN_P", allow_negative_numbers = true)]
    pub p: Option<i64>,
    /// Lens space parameter `q`, coprime to `p`.
    #[arg(short = 'q', long = "q", global = true, env = "GL2SKEIN_Q", allow_negative_numbers = true)]
    pub q: Option<i64>,
    #[arg(long, global = true, env = "GL2SKEIN_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Rewrite budget of the recursive reduction.
    #[arg(long, global = true, env = "GL2SKEIN_BUDGET", default_value_t = DEFAULT_BUDGET,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Initial solver window (core and wedge bound); defaults to `4p`.
    #[arg(long, global = true, env = "GL2SKEIN_WINDOW", value_parser = clap::value_parser!(i64).range(1..))]
    pub window: Option<i64>,
    /// JSON cache of reductions.
    #[arg(long, global = true, env = "GL2SKEIN_CACHE")]
    pub cache: Option<PathBuf>,
    #[arg(long, global = true, env = "GL2SKEIN_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiply torus elements left to right.
    Mul {
        #[arg(required = true, allow_hyphen_values = true)]
        exprs: Vec<String>,
    },
    /// Project a torus element into the solid torus.
    Project {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Act by a torus element on a solid-torus element.
    Act {
        #[arg(allow_hyphen_values = true)]
        torus: String,
        #[arg(allow_hyphen_values = true)]
        annulus: String,
    },
    /// Reduce a lens element `left (x) right` onto the grid.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Tabulate reductions of `c(n1)*w(n2) (x) 1`.
    Table {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(i64).range(0..))]
        n_max: i64,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(i64).range(0..))]
        w_max: i64,
    },
    /// Run property suites (`all` or one of the suite names).
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Parse, canonicalize and print an expression of any sort.
    Simplify {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Lang(#[from] LangError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("reduction failed: {0}")]
    Reduction(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed")]
    VerifyFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::VerifyFailed => 1,
            CliError::Lang(_) | CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Reduction(_) | CliError::Io(_) => 4,
        }
    }
}

impl From<LensError> for CliError {
    fn from(e: LensError) -> Self {
        match e {
            LensError::Domain(m) => CliError::Domain(m),
            other => CliError::Reduction(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coord {
    pub n: i64,
    pub m: i64,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix {
    pub a: i64,
    pub b: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub path: Path,
    pub coords: Vec<Coord>,
}

#[derive(Debug, Serialize)]
struct ReduceOutput<'a> {
    p: i64,
    q: i64,
    matrix: Matrix,
    path: Path,
    coords: &'a [Coord],
}

fn coords_of(c: &SpanningCoordinates) -> Vec<Coord> {
    c.grid.iter().map(|(&(n, m), v)| Coord { n, m, coeff: v.to_string() }).collect()
}

/// The cache document; any mismatch in version, matrix, window, budget or x-table drops it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cache {
    pub version: String,
    pub matrix: GluingMatrix,
    pub window: i64,
    pub budget: u64,
    pub x_table: BTreeMap<String, String>,
    pub reductions: BTreeMap<String, Reduction>,
}

fn x_fingerprint(g: &GluingMatrix) -> BTreeMap<String, String> {
    [(0, 1), (1, -1), (1, 1), (-1, -1), (-1, 1)]
        .into_iter()
        .map(|mu| {
            let (m, n) = g.apply(mu);
            (format!("x({m},{n})"), print_annulus(&crate::annulus::x(m, n)))
        })
        .collect()
}

impl Cache {
    pub fn empty(g: &GluingMatrix, window: i64, budget: u64) -> Self {
        Cache {
            version: CACHE_VERSION.into(),
            matrix: *g,
            window,
            budget,
            x_table: x_fingerprint(g),
            reductions: BTreeMap::new(),
        }
    }

    /// The cache at `path` if it matches this run, otherwise an empty one.
    pub fn load(path: &FsPath, g: &GluingMatrix, window: i64, budget: u64) -> Self {
        let fresh = Cache::empty(g, window, budget);
        let Ok(text) = std::fs::read_to_string(path) else { return fresh };
        match serde_json::from_str::<Cache>(&text) {
            Ok(c)
                if c.version == fresh.version
                    && c.matrix == fresh.matrix
                    && c.window == window
                    && c.budget == budget
                    && c.x_table == fresh.x_table =>
            {
                c
            }
            Ok(_) => {
                log::info!("cache {} does not match this run; starting afresh", path.display());
                fresh
            }
            Err(e) => {
                log::warn!("ignoring unreadable cache {}: {e}", path.display());
                fresh
            }
        }
    }

    pub fn save(&self, path: &FsPath) -> std::io::Result<()> {
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(FsPath::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer_pretty(&mut tmp, self).map_err(std::io::Error::other)?;
        tmp.write_all(b"\n")?;
        tmp.persist(path).map_err(|e| e.error)?;
        Ok(())
    }
}

struct Session<'a> {
    cli: &'a Cli,
    g: GluingMatrix,
    window: i64,
    cache: Option<Cache>,
}

impl<'a> Session<'a> {
    fn open(cli: &'a Cli) -> Result<Self, CliError> {
        let (Some(p), Some(q)) = (cli.p, cli.q) else {
            return Err(CliError::Usage("this command needs -p and -q".into()));
        };
        let g = gluing_for(p, q)?;
        let window = cli.window.unwrap_or(4 * p);
        let cache = cli.cache.as_ref().map(|path| Cache::load(path, &g, window, cli.budget));
        Ok(Session { cli, g, window, cache })
    }

    fn reduce(&mut self, e: &LensElement) -> Result<Reduction, CliError> {
        let key = print_lens(e);
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.reductions.get(&key)) {
            return Ok(hit.clone());
        }
        let (coords, path) = reduce_auto(e, &self.g, self.cli.budget, self.window)?;
        let red = Reduction { path, coords: coords_of(&coords) };
        if let Some(c) = self.cache.as_mut() {
            c.reductions.insert(key, red.clone());
        }
        Ok(red)
    }

    fn close(self) -> Result<(), CliError> {
        if let (Some(cache), Some(path)) = (self.cache, self.cli.cache.as_ref()) {
            cache.save(path)?;
        }
        Ok(())
    }
}

fn render_element(e: &Element, format: Format) -> String {
    let text = e.to_string();
    match format {
        Format::Text => format!("{text}\n"),
        Format::Json => format!("{}\n", serde_json::json!({ "sort": e.sort_name(), "value": text })),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["sort", "value"])
                .and_then(|_| w.write_record([e.sort_name(), text.as_str()]))
                .expect("in-memory csv");
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
        }
    }
}

/// The `reduce --format json` document, without a trailing newline.
pub fn reduction_json(g: &GluingMatrix, coords: &SpanningCoordinates, path: Path) -> String {
    reduction_document(g, &Reduction { path, coords: coords_of(coords) })
}

fn reduction_document(g: &GluingMatrix, red: &Reduction) -> String {
    let out = ReduceOutput { p: g.p, q: g.q, matrix: Matrix { a: g.a, b: g.b }, path: red.path, coords: &red.coords };
    serde_json::to_string(&out).expect("serializable")
}

fn render_reduction(g: &GluingMatrix, red: &Reduction, format: Format) -> String {
    match format {
        Format::Json => {
            format!("{}\n", reduction_document(g, red))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n", "m", "coeff"]).expect("in-memory csv");
            for c in &red.coords {
                w.write_record([c.n.to_string(), c.m.to_string(), c.coeff.clone()]).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
        }
        Format::Text => {
            let mut out = format!("L({},{}) matrix {} path {}\n", g.p, g.q, g, red.path);
            if red.coords.is_empty() {
                out.push_str("0\n");
            }
            for c in &red.coords {
                out.push_str(&format!("({},{}): {}\n", c.n, c.m, c.coeff));
            }
            out
        }
    }
}

#[derive(Serialize)]
struct TableRow {
    n1: i64,
    n2: i64,
    n: i64,
    m: i64,
    coeff: String,
}

fn render_table(rows: &[TableRow], format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string(rows).expect("serializable")),
        Format::Text | Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["n1", "n2", "n", "m", "coeff"]).expect("in-memory csv");
            for r in rows {
                w.serialize((r.n1, r.n2, r.n, r.m, &r.coeff)).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
        }
    }
}

fn render_reports(reports: &[SuiteReport], format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string(reports).expect("serializable")),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["suite", "passed", "cases", "counterexample"]).expect("in-memory csv");
            for r in reports {
                let ce = r.counterexample.clone().unwrap_or_default();
                w.write_record([r.suite.clone(), r.passed.to_string(), r.cases.to_string(), ce])
                    .expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8 csv")
        }
        Format::Text => reports
            .iter()
            .map(|r| match &r.counterexample {
                None => format!("PASS {} ({} cases)\n", r.suite, r.cases),
                Some(ce) => format!("FAIL {} ({} cases): {ce}\n", r.suite, r.cases),
            })
            .collect(),
    }
}

/// Runs the selected suites with a custom action, so broken actions can be exercised.
pub fn verify_reports<F>(suite: &str, seed: u64, act_fn: F) -> Result<Vec<SuiteReport>, CliError>
where
    F: Fn(&TorusElement, &AnnulusElement) -> AnnulusElement + Copy,
{
    let names: Vec<&str> = if suite == "all" { verify::SUITES.to_vec() } else { vec![suite] };
    names
        .into_iter()
        .map(|name| match name {
            "action-oracle" => Ok(verify::action_oracle_with(seed, 200, act_fn)),
            _ => verify::run_suite(name, seed).ok_or_else(|| {
                CliError::Usage(format!("unknown suite '{name}'; known: all, {}", verify::SUITES.join(", ")))
            }),
        })
        .collect()
}

/// Executes one parsed command and returns its standard output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Mul { exprs } => {
            let mut acc = TorusElement::one();
            for e in exprs {
                acc = torus::mul(&acc, &parse_torus(e)?);
            }
            Ok(render_element(&Element::Torus(acc), cli.format))
        }
        Command::Project { expr } => Ok(render_element(&Element::Annulus(project(&parse_torus(expr)?)), cli.format)),
        Command::Act { torus, annulus } => {
            let u = act(&parse_torus(torus)?, &parse_annulus(annulus)?);
            Ok(render_element(&Element::Annulus(u), cli.format))
        }
        Command::Simplify { expr } => Ok(render_element(&lang::parse_any(expr)?, cli.format)),
        Command::Reduce { expr } => {
            let e = parse_lens(expr)?;
            let mut s = Session::open(cli)?;
            let red = s.reduce(&e)?;
            let out = render_reduction(&s.g, &red, cli.format);
            s.close()?;
            Ok(out)
        }
        Command::Table { n_max, w_max } => {
            let mut s = Session::open(cli)?;
            let mut rows = Vec::new();
            for n1 in 0..=*n_max {
                for n2 in -*w_max..=*w_max {
                    let red = s.reduce(&LensElement::left(AnnulusElement::word(n1, n2)))?;
                    rows.extend(red.coords.into_iter().map(|c| TableRow { n1, n2, n: c.n, m: c.m, coeff: c.coeff }));
                }
            }
            s.close()?;
            Ok(render_table(&rows, cli.format))
        }
        Command::Verify { suite } => {
            let reports = verify_reports(suite, cli.seed, act)?;
            let out = render_reports(&reports, cli.format);
            if reports.iter().all(|r| r.passed) {
                Ok(out)
            } else {
                print!("{out}");
                Err(CliError::VerifyFailed)
            }
        }
    }
}

pub fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if !matches!(e, CliError::VerifyFailed) {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<String, CliError> {
        let cli =
            Cli::try_parse_from(std::iter::once("gl2skein").chain(args.iter().copied())).expect("valid arguments");
        execute(&cli)
    }

    #[test]
    fn element_verbs() {
        assert_eq!(run(&["mul", "T(1,0)", "T(1,0)"]).unwrap(), "T(2,0) + 2*W(1,0)\n");
        assert_eq!(run(&["project", "W(1,1)"]).unwrap(), "t^-2*w(1)\n");
        assert_eq!(run(&["act", "W(0,0)", "c(3)"]).unwrap(), "c(3)\n");
        assert_eq!(run(&["simplify", "c(1)*c(1) - c(2)"]).unwrap(), "0\n");
    }

    #[test]
    fn reduce_json() {
        let out = run(&["reduce", "-p", "1", "-q", "0", "--format", "json", "c(2) (x) 1"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["coords"][0]["coeff"], "t^2 + 2 + t^-2");
        assert_eq!(v["matrix"]["a"], 0);
        let out = run(&["reduce", "-p", "2", "-q", "1", "--format", "json", "w(2) (x) 1"]).unwrap();
        assert!(out.contains(r#""coords":[{"n":0,"m":0,"coeff":"t^4"}]"#), "{out}");
        let out = run(&["reduce", "-p", "3", "-q", "1", "--format", "json", "c(1)*w(1) (x) 1"]).unwrap();
        assert!(out.contains(r#""coords":[{"n":1,"m":1,"coeff":"1"}]"#), "{out}");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["mul", "T(1,"]).unwrap_err().exit_code(), 2);
        assert_eq!(run(&["act", "T(1,0)", "T(1,0)"]).unwrap_err().exit_code(), 2);
        assert_eq!(run(&["reduce", "-p", "4", "-q", "2", "c(1)"]).unwrap_err().exit_code(), 3);
        assert_eq!(run(&["reduce", "c(1)"]).unwrap_err().exit_code(), 2);
        assert_eq!(run(&["verify", "nope"]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn table_rows() {
        let out = run(&["table", "-p", "1", "-q", "0", "--n-max", "3", "--w-max", "0"]).unwrap();
        let lines: Vec<_> = out.lines().collect();
        assert_eq!(lines[0], "n1,n2,n,m,coeff");
        assert_eq!(lines[1], "0,0,0,0,1");
        assert_eq!(lines[4], "3,0,0,0,t^3 + 3*t + 3*t^-1 + t^-3");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let p = path.to_str().unwrap();
        let args = ["table", "-p", "3", "-q", "1", "--n-max", "4", "--w-max", "2", "--cache", p];
        let cold = run(&args).unwrap();
        let warm = run(&args).unwrap();
        assert_eq!(cold, warm);
        let cache: Cache = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(cache.reductions.len(), 25);
        let g = gluing_for(3, 1).unwrap();
        assert_eq!(Cache::load(&path, &g, 12, DEFAULT_BUDGET).reductions.len(), 25);
        assert!(Cache::load(&path, &g, 13, DEFAULT_BUDGET).reductions.is_empty());
        let mut stale = cache.clone();
        stale.version = "gl2skein-cache/0".into();
        std::fs::write(&path, serde_json::to_string(&stale).unwrap()).unwrap();
        assert!(Cache::load(&path, &g, 12, DEFAULT_BUDGET).reductions.is_empty());
    }

    #[test]
    fn broken_action_fails_verification() {
        let broken = |a: &TorusElement, u: &AnnulusElement| act(a, u).scale(&crate::scalar::Scalar::from_int(-1));
        let reports = verify_reports("action-oracle", 7, broken).unwrap();
        assert!(!reports[0].passed);
        assert!(render_reports(&reports, Format::Text).starts_with("FAIL action-oracle"));
    }
}
