//! `gltkit` command-line front end.
//!
//! Exit codes: 0 PASS, 1 FAIL, 2 configuration or size error, 3 I/O error.
//! Parallelism is capped by `GLTKIT_THREADS`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gltkit::experiment::{run, ExperimentConfig, Kind, OperandJson, SizeEntry, TermJson};
use gltkit::sampling::diag_sampling;
use gltkit::symbols::TrigPolyJson;
use gltkit::toeplitz::toeplitz;
use gltkit::{CoeffFn, ComplexMatrix, Mode, MultiIndex, Permutation, TrigPoly};

#[derive(Parser)]
#[command(name = "gltkit", version, about = "Toeplitz, sampling and GLT tensor-product checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct RunOpts {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Directory for summary.json and the CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated sizes; `x` joins levels, e.g. `12x12,24x24`.
    #[arg(long)]
    schedule: Option<String>,
    /// Print column documentation for the CSV tables.
    #[arg(long)]
    gnuplot_hints: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification battery or any config.
    Verify {
        /// Experiment kind, when no config is given.
        kind: Option<String>,
        #[arg(long)]
        cases: Option<usize>,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Distribution of `T_n(f)` (times `D_n(a)` when `--coeff` is set) against its symbol.
    Spectrum {
        /// Trigonometric polynomial JSON.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Coefficient expression `a(x)`.
        #[arg(long)]
        coeff: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Sv)]
        mode: ModeArg,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// B-spline Poisson matrices against their symbol.
    Fem {
        /// Degree per direction, e.g. `1,1`.
        #[arg(long, default_value = "1,1")]
        degrees: String,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Print a permutation in one-line notation.
    Perm {
        #[command(subcommand)]
        which: PermCmd,
    },
    /// Export a dense matrix: a `rows cols` line, then one line per row of `re,im` pairs.
    Matrix {
        #[command(subcommand)]
        which: MatrixCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sv,
    Eig,
}

#[derive(Subcommand)]
enum PermCmd {
    /// P_{n1,n2}.
    PShuffle { n1: usize, n2: usize },
    /// Γ(σ) for comma-separated sizes and one-line σ.
    Gamma { sizes: String, sigma: String },
    /// Π for comma-separated ps and qs.
    Pi { ps: String, qs: String },
}

#[derive(Subcommand)]
enum MatrixCmd {
    /// T_n(f).
    Toeplitz {
        #[arg(long)]
        n: String,
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// D_n(a I_s).
    Sampling {
        #[arg(long)]
        n: String,
        #[arg(long)]
        coeff: String,
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn config_err(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 2, err: err.into() }
}

fn io_err(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: 3, err: err.into() }
}

type CliResult<T> = Result<T, Failure>;

fn parse_list(text: &str) -> anyhow::Result<Vec<usize>> {
    text.split(',')
        .map(|p| p.trim().parse::<usize>().with_context(|| format!("bad integer `{p}` in `{text}`")))
        .collect()
}

fn parse_schedule(text: &str) -> anyhow::Result<Vec<SizeEntry>> {
    text.split(',')
        .map(|entry| {
            let parts: Vec<usize> = entry
                .split('x')
                .map(|p| p.trim().parse::<usize>().with_context(|| format!("bad size `{entry}`")))
                .collect::<anyhow::Result<_>>()?;
            Ok(if parts.len() == 1 { SizeEntry::One(parts[0]) } else { SizeEntry::Multi(parts) })
        })
        .collect()
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(io_err)
}

fn load_config(opts: &RunOpts) -> CliResult<Option<ExperimentConfig>> {
    let Some(path) = &opts.config else { return Ok(None) };
    let text = read_text(path)?;
    ExperimentConfig::from_json(&text).map(Some).map_err(config_err)
}

fn apply_overrides(cfg: &mut ExperimentConfig, opts: &RunOpts) -> CliResult<()> {
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    if opts.tol.is_some() {
        cfg.tol = opts.tol;
    }
    if let Some(s) = &opts.schedule {
        cfg.schedule = Some(parse_schedule(s).map_err(config_err)?);
    }
    if let Some(out) = &opts.out {
        cfg.output = Some(out.display().to_string());
    }
    cfg.validate().map_err(config_err)
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| anyhow!("no file name in {}", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

fn column_hints(table: &str, header: &str) -> String {
    let cols: Vec<String> = header.split(',').enumerate().map(|(i, c)| format!("{}:{c}", i + 1)).collect();
    format!("# {table} columns (comma separated, one header line): {}", cols.join(" "))
}

fn execute(cfg: &ExperimentConfig, hints: bool) -> CliResult<u8> {
    let outcome = run(cfg).map_err(config_err)?;
    let summary = serde_json::to_string_pretty(&outcome.summary).map_err(io_err)?;
    match &cfg.output {
        Some(dir) => {
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display())).map_err(io_err)?;
            for (name, csv) in &outcome.tables {
                write_atomic(&dir.join(name), csv.as_bytes()).map_err(io_err)?;
            }
            write_atomic(&dir.join("summary.json"), format!("{summary}\n").as_bytes()).map_err(io_err)?;
        }
        None => println!("{summary}"),
    }
    if hints {
        for (name, csv) in &outcome.tables {
            println!("{}", column_hints(name, csv.lines().next().unwrap_or("")));
        }
    }
    eprintln!("{}", if outcome.pass { "PASS" } else { "FAIL" });
    Ok(if outcome.pass { 0 } else { 1 })
}

fn parse_kind(text: &str) -> anyhow::Result<Kind> {
    serde_json::from_value(serde_json::Value::String(text.to_string())).map_err(|_| anyhow!("unknown kind `{text}`"))
}

fn trig_json(path: &Path) -> CliResult<TrigPolyJson> {
    let text = read_text(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(config_err)
}

fn write_matrix(a: &ComplexMatrix, out: Option<&Path>) -> CliResult<u8> {
    let mut text = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        let row: Vec<String> = a.row(i).iter().map(|z| format!("{},{}", z.re, z.im)).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    match out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(io_err)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Verify { kind, cases, opts } => {
            let mut cfg = match (load_config(&opts)?, kind) {
                (Some(cfg), None) => cfg,
                (None, Some(k)) => ExperimentConfig::new(parse_kind(&k).map_err(config_err)?),
                (Some(_), Some(_)) => return Err(config_err(anyhow!("give either a kind or --config, not both"))),
                (None, None) => return Err(config_err(anyhow!("give a kind or --config"))),
            };
            if cases.is_some() {
                cfg.cases = cases;
            }
            apply_overrides(&mut cfg, &opts)?;
            execute(&cfg, opts.gnuplot_hints)
        }
        Command::Spectrum { coeffs, coeff, mode, opts } => {
            let mut cfg = match load_config(&opts)? {
                Some(cfg) if cfg.kind == Kind::Distribution => cfg,
                Some(_) => return Err(config_err(anyhow!("spectrum takes a distribution config"))),
                None => {
                    let path = coeffs.ok_or_else(|| config_err(anyhow!("give --coeffs or --config")))?;
                    let trig = trig_json(&path)?;
                    let mut cfg = ExperimentConfig::new(Kind::Distribution);
                    cfg.operands = Some(vec![OperandJson {
                        terms: vec![TermJson { coeff: coeff.unwrap_or_else(|| "1".into()), trig }],
                    }]);
                    cfg.mode = Some(match mode {
                        ModeArg::Sv => Mode::Sv,
                        ModeArg::Eig => Mode::Eig,
                    });
                    cfg
                }
            };
            apply_overrides(&mut cfg, &opts)?;
            execute(&cfg, opts.gnuplot_hints)
        }
        Command::Fem { degrees, opts } => {
            let mut cfg = match load_config(&opts)? {
                Some(cfg) if cfg.kind == Kind::FemPoisson => cfg,
                Some(_) => return Err(config_err(anyhow!("fem takes a fem-poisson config"))),
                None => {
                    let mut cfg = ExperimentConfig::new(Kind::FemPoisson);
                    cfg.degrees = Some(parse_list(&degrees).map_err(config_err)?);
                    cfg
                }
            };
            apply_overrides(&mut cfg, &opts)?;
            execute(&cfg, opts.gnuplot_hints)
        }
        Command::Perm { which } => {
            let p = match which {
                PermCmd::PShuffle { n1, n2 } => Permutation::p_shuffle(n1, n2),
                PermCmd::Gamma { sizes, sigma } => {
                    let sizes = parse_list(&sizes).map_err(config_err)?;
                    let sigma = Permutation::from_one_line(&parse_list(&sigma).map_err(config_err)?).map_err(config_err)?;
                    Permutation::gamma(&sizes, &sigma)
                }
                PermCmd::Pi { ps, qs } => {
                    Permutation::pi(&parse_list(&ps).map_err(config_err)?, &parse_list(&qs).map_err(config_err)?)
                }
            }
            .map_err(config_err)?;
            println!("{p}");
            Ok(0)
        }
        Command::Matrix { which } => match which {
            MatrixCmd::Toeplitz { n, coeffs, out } => {
                let n = MultiIndex::sizes(&parse_list(&n).map_err(config_err)?);
                let f = TrigPoly::try_from(trig_json(&coeffs)?).map_err(config_err)?;
                write_matrix(&toeplitz(&n, &f).map_err(config_err)?, out.as_deref())
            }
            MatrixCmd::Sampling { n, coeff, s, out } => {
                let sizes = parse_list(&n).map_err(config_err)?;
                let a = CoeffFn::parse(&coeff, sizes.len()).map_err(config_err)?;
                write_matrix(&diag_sampling(&MultiIndex::sizes(&sizes), &a, s).map_err(config_err)?, out.as_deref())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_and_lists() {
        assert_eq!(parse_schedule("12x12,24x24").unwrap(), vec![SizeEntry::Multi(vec![12, 12]), SizeEntry::Multi(vec![24, 24])]);
        assert_eq!(parse_schedule("8,16").unwrap(), vec![SizeEntry::One(8), SizeEntry::One(16)]);
        assert!(parse_list("1,x").is_err());
        if let Err(e) = parse_kind("bogus") {
            assert!(e.to_string().contains("bogus"));
        } else {
            panic!("bogus kind accepted");
        }
    }

    #[test]
    fn hints_number_columns() {
        assert_eq!(column_hints("a.csv", "m,rho_hat"), "# a.csv columns (comma separated, one header line): 1:m 2:rho_hat");
    }
}
