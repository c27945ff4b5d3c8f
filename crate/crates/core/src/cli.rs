//! Command-line surface. Every command prints one table, as CSV with the run
//! manifest in a leading `# manifest` comment line, or as a JSON object
//! `{ "manifest": ..., "columns": [...], "rows": [[...]] }`.
//!
//! Exit codes: 0 success, 2 usage, 3 domain error, 4 convergence failure,
//! 1 I/O failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bogoliubov::{table1, TABLE1_J_MAX, TABLE1_N_MAX};
use crate::config::ModelConfig;
use crate::eigensolve::{solve_roots, DEFAULT_TOL_ROOT};
use crate::error::Error;
use crate::greens::{kernel_closed, kernel_series};
use crate::quantum_inequality::{mamev_trunov_eta, qwei_difference_verdict, qwei_verdict, TestFunction};
use crate::stress::{
    build_in_tensor, build_out_tensor, energy_conditions, total_energy, GeodesicSpec, PointValue,
    StressConstants,
};
use crate::zeta_series::{constants_on_grid, FIG2_J_MAX};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;

/// Roots used for the stress tensor, energy conditions and QWEI unless
/// `--jmax` says otherwise.
pub const STRESS_J_MAX: usize = 4096;
pub const GREENS_N_MAX: usize = 4096;

#[derive(Debug, Parser)]
#[command(
    name = "casimir-pulse",
    version,
    about = "Particle creation and stress-energy after a delta potential on the cylinder switches off",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel kernels. Results do not depend on it.
    #[arg(long, env = "CASIMIR_PULSE_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Record the wall-clock time (seconds since the epoch) in the manifest.
    /// Output is otherwise byte-identical across runs.
    #[arg(long, global = true)]
    pub stamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Coupling given either directly as `chi` or as `xi` with `chi = xi L / 2`.
#[derive(Debug, Clone, Args)]
pub struct Coupling {
    /// Dimensionless coupling chi = xi L / 2. Takes precedence over --xi.
    #[arg(long, allow_negative_numbers = true)]
    pub chi: Option<f64>,
    /// Potential strength xi.
    #[arg(long, allow_negative_numbers = true)]
    pub xi: Option<f64>,
    /// Circumference L of the circle.
    #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
    pub l: f64,
    /// Length scale of the zero-mode quantization.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub ell: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots Z_j of Z = chi cot Z with offsets, normalizations and residuals.
    Roots {
        #[command(flatten)]
        coupling: Coupling,
        /// Number of roots.
        #[arg(long, default_value_t = 100)]
        jmax: usize,
        /// Relative residual tolerance of the root solver.
        #[arg(long, default_value = "1e-12")]
        tol: f64,
    },
    /// Created quanta per mode, one column per xi, six decimals.
    Table1 {
        /// Potential strengths, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 5.0, 10.0, 100.0], allow_negative_numbers = true)]
        xi: Vec<f64>,
        #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
        l: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        ell: f64,
        /// Roots kept in every sum.
        #[arg(long, default_value_t = TABLE1_J_MAX)]
        jmax: usize,
        /// Highest OUT mode.
        #[arg(long, default_value_t = TABLE1_N_MAX)]
        nmax: usize,
    },
    /// Spectral constants A, B, C, B - C and |A - B| over a chi grid.
    Fig2 {
        /// Couplings, comma separated [default: 0.25, 0.5, ..., 5].
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        chi: Option<Vec<f64>>,
        /// Terms in every partial sum.
        #[arg(long, default_value_t = FIG2_J_MAX)]
        jmax: usize,
    },
    /// Stress tensor components at sample points.
    Stress {
        #[command(flatten)]
        coupling: Coupling,
        /// Roots used for B and B - C.
        #[arg(long, default_value_t = STRESS_J_MAX)]
        jmax: usize,
        /// Region: out (t > 0) or in (t < 0).
        #[arg(long, value_enum, default_value_t = RegionArg::Out)]
        region: RegionArg,
        /// Positions, comma separated [default: L/8].
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        x: Option<Vec<f64>>,
        /// Times, comma separated [default: L/4, or -L/4 for the in region].
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        t: Option<Vec<f64>>,
    },
    /// Null, weak, strong and dominant energy conditions with witnesses.
    EnergyConditions {
        /// Couplings, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 1.0, 10.0, 100.0], allow_negative_numbers = true)]
        chi: Vec<f64>,
        #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
        l: f64,
        /// Roots used for B and B - C.
        #[arg(long, default_value_t = STRESS_J_MAX)]
        jmax: usize,
    },
    /// Quantum weak energy inequality along an inertial observer.
    Qwei {
        #[command(flatten)]
        coupling: Coupling,
        /// Observer speed.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        v: f64,
        /// Half-width of the bump test function [default: L/4].
        #[arg(long)]
        width: Option<f64>,
        /// Center of the bump in proper time [default: L/2].
        #[arg(long, allow_negative_numbers = true)]
        center: Option<f64>,
        /// Time at which the worldline has proper time zero.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        x0: f64,
        /// Modes summed on the right-hand side [default: automatic, at most 10000].
        #[arg(long)]
        ncut: Option<usize>,
        /// Roots used for B - C.
        #[arg(long, default_value_t = STRESS_J_MAX)]
        jmax: usize,
        /// Normal order against the OUT vacuum instead of the absolute form.
        #[arg(long)]
        difference: bool,
    },
    /// Advanced-minus-retarded kernel, closed and truncated-series forms.
    Greens {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        xp: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tp: f64,
        #[arg(long = "L", default_value_t = 1.0, allow_negative_numbers = true)]
        l: f64,
        /// Series truncation.
        #[arg(long, default_value_t = GREENS_N_MAX)]
        nmax: usize,
    },
    /// The eta(xi, a) integral by two quadrature rules.
    Eta {
        #[arg(long, allow_negative_numbers = true)]
        xi: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    In,
    Out,
}

/// Reproducibility record embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub parameters: BTreeMap<String, String>,
    pub truncations: Truncations,
    /// Decimal strings, so they round-trip exactly.
    pub tolerances: BTreeMap<String, String>,
    pub output_path: Option<String>,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Truncations {
    pub j_max: Option<usize>,
    pub n_max: Option<usize>,
    pub n_cut: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    /// Number printed with a fixed count of decimals in CSV.
    Fixed(f64, usize),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(v) => format_number(*v),
            Cell::Fixed(v, d) => format!("{v:.d$}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Num(v) | Cell::Fixed(v, _) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Plain decimal for values with at most six significant digits and a
/// moderate exponent, otherwise the shortest round-trip scientific form.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let plain = v.to_string();
    let digits: String = plain.chars().filter(|c| c.is_ascii_digit()).collect();
    let significant = digits.trim_start_matches('0').trim_end_matches('0').len();
    if significant <= 6 && (1e-4..1e6).contains(&v.abs()) {
        plain
    } else {
        format!("{v:e}")
    }
}

/// Finished result of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub manifest: RunManifest,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Emitted as `# note:` lines in CSV and a `notes` array in JSON.
    pub notes: Vec<String>,
}

impl Report {
    pub fn render(&self) -> String {
        match self.manifest.format {
            Format::Csv => {
                let mut s = String::new();
                s.push_str("# manifest ");
                s.push_str(&serde_json::to_string(&self.manifest).expect("manifest serializes"));
                s.push('\n');
                for n in &self.notes {
                    s.push_str("# note: ");
                    s.push_str(n);
                    s.push('\n');
                }
                s.push_str(&self.columns.join(","));
                s.push('\n');
                for r in &self.rows {
                    let cells: Vec<String> = r.iter().map(Cell::csv).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let doc = json!({
                    "manifest": self.manifest,
                    "columns": self.columns,
                    "rows": rows,
                    "notes": self.notes,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Model(Error),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Model(Error::Convergence { .. }) => EXIT_CONVERGENCE,
            CliError::Model(_) => EXIT_DOMAIN,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct ManifestBuilder {
    m: RunManifest,
}

impl ManifestBuilder {
    fn new(command: &str, common: &Common) -> Self {
        let timestamp = common.stamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            m: RunManifest {
                command: command.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                parameters: BTreeMap::new(),
                truncations: Truncations::default(),
                tolerances: BTreeMap::new(),
                output_path: common.out.as_ref().map(|p| p.display().to_string()),
                format: common.format,
                timestamp,
            },
        }
    }

    fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.m.parameters.insert(k.into(), v.to_string());
        self
    }

    fn list(self, k: &str, vs: &[f64]) -> Self {
        let s: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
        self.param(k, s.join(","))
    }

    fn tol(mut self, k: &str, v: f64) -> Self {
        self.m.tolerances.insert(k.into(), format!("{v:e}"));
        self
    }

    fn j_max(mut self, j: usize) -> Self {
        self.m.truncations.j_max = Some(j);
        self
    }

    fn n_max(mut self, n: usize) -> Self {
        self.m.truncations.n_max = Some(n);
        self
    }

    fn n_cut(mut self, n: usize) -> Self {
        self.m.truncations.n_cut = Some(n);
        self
    }

    fn build(self) -> RunManifest {
        self.m
    }
}

fn cols(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl Coupling {
    fn config(&self) -> CliResult<ModelConfig> {
        match (self.chi, self.xi) {
            (Some(chi), _) => {
                if !(chi.is_finite() && chi > 0.0) {
                    return Err(Error::Domain(format!("chi must be positive and finite, got {chi}")).into());
                }
                Ok(ModelConfig::from_chi(chi, self.l, self.ell)?)
            }
            (None, Some(xi)) => Ok(ModelConfig::new(xi, self.l, self.ell)?),
            (None, None) => Err(CliError::Usage("one of --chi or --xi is required".into())),
        }
    }
}

fn default_fig2_grid() -> Vec<f64> {
    (1..=20).map(|i| 0.25 * i as f64).collect()
}

/// Runs a parsed command and returns its report.
pub fn execute(cli: &Cli) -> CliResult<Report> {
    let common = &cli.common;
    match &cli.command {
        Command::Roots { coupling, jmax, tol } => {
            let cfg = coupling.config()?;
            let chi = cfg.chi();
            let table = solve_roots(chi, *jmax, *tol)?;
            let rows = table
                .iter()
                .map(|r| {
                    vec![
                        Cell::Int(r.j as i64),
                        Cell::Num(r.z),
                        Cell::Num(r.eps),
                        Cell::Num(r.a2),
                        Cell::Num(r.residual),
                    ]
                })
                .collect();
            Ok(Report {
                manifest: ManifestBuilder::new("roots", common)
                    .param("chi", chi)
                    .j_max(*jmax)
                    .tol("tol_root", *tol)
                    .build(),
                columns: cols(&["j", "Z", "eps", "A2", "residual"]),
                rows,
                notes: vec![],
            })
        }
        Command::Table1 { xi, l, ell, jmax, nmax } => {
            let spectra = table1(xi, *l, *ell, *jmax, *nmax)?;
            let mut columns = vec!["n".to_string()];
            columns.extend(xi.iter().map(|x| format!("xi={x}")));
            let rows = (0..=*nmax)
                .map(|n| {
                    let mut r = vec![Cell::Int(n as i64)];
                    r.extend(spectra.iter().map(|s| Cell::Fixed(s.get(n).unwrap_or(f64::NAN), 6)));
                    r
                })
                .collect();
            Ok(Report {
                manifest: ManifestBuilder::new("table1", common)
                    .list("xi", xi)
                    .param("L", l)
                    .param("ell", ell)
                    .j_max(*jmax)
                    .n_max(*nmax)
                    .tol("tol_root", DEFAULT_TOL_ROOT)
                    .build(),
                columns,
                rows,
                notes: vec![],
            })
        }
        Command::Fig2 { chi, jmax } => {
            let grid = chi.clone().unwrap_or_else(default_fig2_grid);
            let table = constants_on_grid(&grid, *jmax)?;
            let rows = table
                .iter()
                .map(|r| {
                    vec![
                        Cell::Num(r.chi),
                        Cell::Num(r.a.value),
                        Cell::Num(r.b.value),
                        Cell::Num(r.c.value),
                        Cell::Num(r.b_minus_c.value),
                        Cell::Num(r.a_minus_b_abs),
                    ]
                })
                .collect();
            Ok(Report {
                manifest: ManifestBuilder::new("fig2", common)
                    .list("chi", &grid)
                    .j_max(*jmax)
                    .tol("tol_root", DEFAULT_TOL_ROOT)
                    .build(),
                columns: cols(&["chi", "A", "B", "C", "B_minus_C", "abs_A_minus_B"]),
                rows,
                notes: vec![],
            })
        }
        Command::Stress {
            coupling,
            jmax,
            region,
            x,
            t,
        } => {
            let cfg = coupling.config()?;
            let l = cfg.circumference();
            let constants = StressConstants::compute(cfg.chi(), *jmax)?;
            let field = match region {
                RegionArg::Out => build_out_tensor(&cfg, &constants)?,
                RegionArg::In => build_in_tensor(&cfg, &constants)?,
            };
            let xs = x.clone().unwrap_or_else(|| vec![0.125 * l]);
            let default_t = match region {
                RegionArg::Out => 0.25 * l,
                RegionArg::In => -0.25 * l,
            };
            let ts = t.clone().unwrap_or_else(|| vec![default_t]);
            let mut rows = Vec::new();
            for &ti in &ts {
                for &xi in &xs {
                    let mut r = vec![Cell::Num(ti), Cell::Num(xi)];
                    match field.evaluate(xi, ti)? {
                        PointValue::Regular(c) => {
                            r.extend([Cell::Num(c.tt), Cell::Num(c.tx), Cell::Num(c.xx), Cell::Text(String::new())]);
                        }
                        PointValue::OnPulse(dirs) => {
                            let names: Vec<&str> = dirs
                                .iter()
                                .map(|d| match d {
                                    crate::stress::Direction::Left => "left",
                                    crate::stress::Direction::Right => "right",
                                })
                                .collect();
                            r.extend([
                                Cell::Num(f64::NAN),
                                Cell::Num(f64::NAN),
                                Cell::Num(f64::NAN),
                                Cell::Text(names.join("+")),
                            ]);
                        }
                    }
                    rows.push(r);
                }
            }
            let mut notes = vec![
                format!("background_density {}", format_number(field.background_density)),
                format!("B {}", format_number(constants.b)),
                format!("C {}", format_number(constants.c)),
                format!("B_minus_C {}", format_number(constants.b_minus_c)),
            ];
            if matches!(region, RegionArg::Out) {
                notes.push(format!("total_energy {}", format_number(total_energy(&cfg, &constants)?)));
            }
            for p in &field.pulses {
                notes.push(format!(
                    "pulse {:?} amplitude {} phase {}",
                    p.direction,
                    format_number(p.amplitude),
                    format_number(p.phase)
                ));
            }
            Ok(Report {
                manifest: ManifestBuilder::new("stress", common)
                    .param("chi", cfg.chi())
                    .param("L", l)
                    .param("region", format!("{region:?}").to_lowercase())
                    .j_max(*jmax)
                    .tol("tol_root", DEFAULT_TOL_ROOT)
                    .build(),
                columns: cols(&["t", "x", "T_tt", "T_tx", "T_xx", "on_pulse"]),
                rows,
                notes,
            })
        }
        Command::EnergyConditions { chi, l, jmax } => {
            let mut rows = Vec::new();
            for &c in chi {
                let cfg = ModelConfig::from_chi(c, *l, 1.0)?;
                let constants = StressConstants::compute(c, *jmax)?;
                let field = build_out_tensor(&cfg, &constants)?;
                for v in energy_conditions(&field, &cfg, &constants)? {
                    rows.push(vec![
                        Cell::Num(c),
                        Cell::Text(format!("{:?}", v.condition).to_lowercase()),
                        Cell::Bool(v.violated),
                        Cell::Num(v.witness.t),
                        Cell::Num(v.witness.x),
                        Cell::Num(v.witness.vector.0),
                        Cell::Num(v.witness.vector.1),
                        Cell::Num(v.witness.value),
                    ]);
                }
            }
            Ok(Report {
                manifest: ManifestBuilder::new("energy-conditions", common)
                    .list("chi", chi)
                    .param("L", l)
                    .j_max(*jmax)
                    .tol("tol_root", DEFAULT_TOL_ROOT)
                    .build(),
                columns: cols(&["chi", "condition", "violated", "t", "x", "Y_t", "Y_x", "value"]),
                rows,
                notes: vec![],
            })
        }
        Command::Qwei {
            coupling,
            v,
            width,
            center,
            t0,
            x0,
            ncut,
            jmax,
            difference,
        } => {
            let cfg = coupling.config()?;
            let l = cfg.circumference();
            let w = width.unwrap_or(0.25 * l);
            let c = center.unwrap_or(0.5 * l);
            let g = TestFunction::bump(c, w, 1.0)?;
            let geo = GeodesicSpec::timelike(*v, *t0, *x0)?;
            let constants = StressConstants::compute(cfg.chi(), *jmax)?;
            let field = build_out_tensor(&cfg, &constants)?;
            let report = if *difference {
                qwei_difference_verdict(&g, &geo, &field, &cfg, constants.b_minus_c, *ncut)?
            } else {
                qwei_verdict(&g, &geo, &field, &cfg, constants.b_minus_c, *ncut)?
            };
            let lt = &report.lhs_terms;
            let rt = &report.rhs_terms;
            let rows = vec![vec![
                Cell::Num(report.lhs),
                Cell::Num(report.rhs),
                Cell::Num(report.margin),
                Cell::Num(lt.casimir_term),
                Cell::Num(lt.b_minus_c_term),
                Cell::Num(lt.pulse_left),
                Cell::Num(lt.pulse_right),
                Cell::Int(lt.crossings as i64),
                Cell::Num(rt.casimir_term),
                Cell::Num(rt.mode_sum_plus),
                Cell::Num(rt.mode_sum_minus),
                Cell::Int(rt.n_cut as i64),
            ]];
            let mut mb = ManifestBuilder::new("qwei", common)
                .param("chi", cfg.chi())
                .param("L", l)
                .param("ell", cfg.ell())
                .param("v", v)
                .param("width", w)
                .param("center", c)
                .param("t0", t0)
                .param("x0", x0)
                .param("form", if *difference { "difference" } else { "absolute" })
                .j_max(*jmax)
                .n_cut(rt.n_cut)
                .tol("tol_root", DEFAULT_TOL_ROOT);
            if ncut.is_none() {
                mb = mb.tol("n_cut_relative", crate::quantum_inequality::N_CUT_REL_TOL);
            }
            Ok(Report {
                manifest: mb.build(),
                columns: cols(&[
                    "lhs",
                    "rhs",
                    "margin",
                    "lhs_casimir",
                    "lhs_b_minus_c",
                    "lhs_pulse_left",
                    "lhs_pulse_right",
                    "crossings",
                    "rhs_casimir",
                    "rhs_mode_plus",
                    "rhs_mode_minus",
                    "n_cut",
                ]),
                rows,
                notes: report.warnings.clone(),
            })
        }
        Command::Greens { x, t, xp, tp, l, nmax } => {
            let closed = kernel_closed(*x, *t, *xp, *tp, *l)?.value;
            let series = kernel_series(*x, *t, *xp, *tp, *nmax, *l)?.value;
            Ok(Report {
                manifest: ManifestBuilder::new("greens", common)
                    .param("x", x)
                    .param("t", t)
                    .param("xp", xp)
                    .param("tp", tp)
                    .param("L", l)
                    .n_max(*nmax)
                    .build(),
                columns: cols(&["closed", "series", "difference"]),
                rows: vec![vec![Cell::Num(closed), Cell::Num(series), Cell::Num(series - closed)]],
                notes: vec![],
            })
        }
        Command::Eta { xi, a } => {
            let e = mamev_trunov_eta(*xi, *a)?;
            Ok(Report {
                manifest: ManifestBuilder::new("eta", common)
                    .param("xi", xi)
                    .param("a", a)
                    .tol("quadrature_rel", 1e-13)
                    .build(),
                columns: cols(&["xi", "a", "eta", "gauss_kronrod", "exp_sinh", "discrepancy"]),
                rows: vec![vec![
                    Cell::Num(*xi),
                    Cell::Num(*a),
                    Cell::Num(e.value()),
                    Cell::Num(e.gauss_kronrod),
                    Cell::Num(e.exp_sinh),
                    Cell::Num(e.discrepancy()),
                ]],
                notes: vec![],
            })
        }
    }
}

/// Parses `args`, runs the command, writes the output and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.common.threads {
        if n == 0 {
            eprintln!("usage error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let result = execute(&cli).and_then(|report| {
        let text = report.render();
        match &cli.common.out {
            Some(path) => fs::write(path, text).map_err(CliError::Io),
            None => io::stdout().lock().write_all(text.as_bytes()).map_err(CliError::Io),
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_switches_to_scientific() {
        assert_eq!(format_number(0.5), "0.5");
        assert_eq!(format_number(12.25), "12.25");
        assert_eq!(format_number(0.8603335890193797), "8.603335890193797e-1");
        assert_eq!(format_number(1e-9), "1e-9");
        assert_eq!(format_number(0.0), "0");
    }

    #[test]
    fn missing_coupling_is_a_usage_error() {
        let cli = Cli::try_parse_from(["casimir-pulse", "roots"]).unwrap();
        assert_eq!(execute(&cli).unwrap_err().exit_code(), EXIT_USAGE);
    }

    #[test]
    fn negative_chi_is_a_domain_error() {
        let cli = Cli::try_parse_from(["casimir-pulse", "roots", "--chi", "-1"]).unwrap();
        assert_eq!(execute(&cli).unwrap_err().exit_code(), EXIT_DOMAIN);
    }
}
