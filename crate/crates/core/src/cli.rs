//! Command-line front end producing the CSV datasets.
//!
//! Every file starts with `# key=value` lines describing the run, then a
//! header row, then one row per sweep point. Numbers use 12 significant
//! digits. Output is written to a temporary file and renamed into place, so
//! a failed run never leaves a partial file.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::Error;
use crate::model::{BarrierSpec, PacketSpec};
use crate::spectral::reflected_share_sweep;
use crate::times::{delay_crossing, energy_sweep, width_sweep, TimesReport};
use crate::wavepacket::{packet_sweep, synthesize, Basis, GridSpec, SpectralAmplitude, TimeGrid, TimingSettings};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "tunnel",
    version,
    about = "Tunneling times for a one-dimensional rectangular barrier"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All stationary times as functions of the barrier width.
    TimesWidth(TimesArgs),
    /// All stationary times as functions of the energy, plus the τ_g = τ_0 crossing.
    TimesEnergy(TimesArgs),
    /// Wave-packet arrival and mean passage times at the barrier exit.
    Packet(PacketArgs),
    /// Right/left-moving spectral weight of the field inside the barrier.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// TOML file with default values; flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub u0: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct WidthArgs {
    /// Single width.
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub l_min: Option<f64>,
    #[arg(long)]
    pub l_max: Option<f64>,
    /// Comma-separated widths.
    #[arg(long, value_delimiter = ',')]
    pub l_list: Option<Vec<f64>>,
    /// Number of sweep points.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TimesArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub widths: WidthArgs,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps_min: Option<f64>,
    #[arg(long)]
    pub eps_max: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PacketArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub widths: WidthArgs,
    /// Mean momentum of the initial packet.
    #[arg(long)]
    pub p: Option<f64>,
    /// Half-width parameter of the initial packet.
    #[arg(long)]
    pub b: Option<f64>,
    /// Coarse time step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Spectral grid refinement factor.
    #[arg(long)]
    pub refine: Option<f64>,
    /// Longest window for the mean time.
    #[arg(long)]
    pub mean_cap: Option<f64>,
    /// Longest window for the arrival of the maximum.
    #[arg(long)]
    pub arrival_cap: Option<f64>,
    /// Skip the mean passage time.
    #[arg(long)]
    pub no_mean: bool,
    /// Write |ψ(l,t)|² per width next to the output.
    #[arg(long)]
    pub dump_series: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub widths: WidthArgs,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub n_k: Option<usize>,
    /// Write |φ(k)|² per width next to the output.
    #[arg(long)]
    pub dump_series: bool,
}

/// Values accepted from a `--config` file; keys mirror the flag names with
/// underscores.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub u0: Option<f64>,
    pub eps: Option<f64>,
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub l: Option<f64>,
    pub l_min: Option<f64>,
    pub l_max: Option<f64>,
    pub l_list: Option<Vec<f64>>,
    pub steps: Option<usize>,
    pub p: Option<f64>,
    pub b: Option<f64>,
    pub dt: Option<f64>,
    pub refine: Option<f64>,
    pub mean_cap: Option<f64>,
    pub arrival_cap: Option<f64>,
    pub no_mean: Option<bool>,
    pub k_max: Option<f64>,
    pub n_k: Option<usize>,
    pub out: Option<PathBuf>,
    pub dump_series: Option<bool>,
}

/// Failure of a CLI run, carrying its exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::TimesWidth(a) => times_width(a),
        Command::TimesEnergy(a) => times_energy(a),
        Command::Packet(a) => packet(a),
        Command::Spectrum(a) => spectrum(a),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig, CliError> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text =
                std::fs::read_to_string(p).map_err(|e| invalid(format!("cannot read config {}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| invalid(format!("bad config {}: {e}", p.display())))
        }
    }
}

fn required(value: Option<f64>, name: &str) -> Result<f64, CliError> {
    let v = value.ok_or_else(|| invalid(format!("missing --{name}")))?;
    if !v.is_finite() {
        return Err(invalid(format!("--{name} must be finite")));
    }
    Ok(v)
}

/// Inclusive range `[lo, hi]` with `steps` points; a single point when `lo == hi`.
pub fn linspace(lo: f64, hi: f64, steps: usize, name: &str) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(invalid(format!("--{name} range must be finite")));
    }
    if lo > hi {
        return Err(invalid(format!("empty --{name} range: min {lo} exceeds max {hi}")));
    }
    if lo == hi {
        return Ok(vec![lo]);
    }
    if steps < 2 {
        return Err(invalid("--steps must be at least 2"));
    }
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect())
}

fn resolve_widths(a: &WidthArgs, cfg: &FileConfig, default_steps: usize) -> Result<Vec<f64>, CliError> {
    let list = a
        .l_list
        .clone()
        .or_else(|| if a.l.is_some() { None } else { cfg.l_list.clone() });
    if let Some(list) = list {
        if list.is_empty() {
            return Err(invalid("--l-list is empty"));
        }
        if list.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(invalid("widths must be finite and >= 0"));
        }
        return Ok(list);
    }
    if let Some(l) = a.l.or(if a.l_min.is_some() || a.l_max.is_some() {
        None
    } else {
        cfg.l
    }) {
        return Ok(vec![l]);
    }
    let lo = required(a.l_min.or(cfg.l_min), "l-min")?;
    let hi = required(a.l_max.or(cfg.l_max), "l-max")?;
    let steps = a.steps.or(cfg.steps).unwrap_or(default_steps);
    let widths = linspace(lo, hi, steps, "l")?;
    if lo < 0.0 {
        return Err(invalid("widths must be >= 0"));
    }
    Ok(widths)
}

/// `%.12g`.
pub fn fmt_num(x: f64) -> String {
    fmt_sig(x, 12)
}

fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A CSV document with its metadata block.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub footer: Vec<String>,
}

impl Table {
    fn new(command: &str, header: &[&str]) -> Self {
        Self {
            meta: vec![
                ("tool".into(), format!("tunnel {VERSION}")),
                ("command".into(), command.into()),
            ],
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.meta(key, fmt_num(value))
    }

    fn push(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|v| fmt_num(*v)).collect());
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "{}", self.header.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        for f in &self.footer {
            let _ = writeln!(s, "# {f}");
        }
        s
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn emit(out: &Option<PathBuf>, table: &Table) -> Result<(), CliError> {
    match out {
        Some(p) => write_atomic(p, &table.render()),
        None => {
            print!("{}", table.render());
            Ok(())
        }
    }
}

/// `<stem><suffix>.csv` next to `out`.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}.csv"))
}

const TIMES_COLUMNS: [&str; 7] = [
    "tau_g",
    "tau_0",
    "t_ph",
    "t_free",
    "tau_d_in",
    "tau_d_out",
    "hartman_limit",
];

fn times_row(key: f64, r: &TimesReport) -> Vec<f64> {
    vec![
        key,
        r.tau_g,
        r.tau_0,
        r.t_ph,
        r.t_free,
        r.tau_d_in,
        r.tau_d_out,
        r.hartman_limit,
    ]
}

fn times_header(key: &'static str) -> Vec<&'static str> {
    std::iter::once(key).chain(TIMES_COLUMNS).collect()
}

fn times_width(a: &TimesArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.common.config)?;
    let u0 = required(a.common.u0.or(cfg.u0), "u0")?;
    let eps = required(a.eps.or(cfg.eps), "eps")?;
    BarrierSpec::new(u0, 0.0)?.sub_barrier(eps)?;
    let widths = resolve_widths(&a.widths, &cfg, 101)?;
    let out = a.common.out.clone().or(cfg.out.clone());
    let rows = width_sweep(u0, eps, &widths)?;
    let mut t = Table::new("times-width", &times_header("l"));
    t.num("u0", u0).num("eps", eps).meta("rows", widths.len());
    for r in &rows {
        t.push(&times_row(r.l, r));
    }
    t.footer.push(format!(
        "group_delay_unconfirmed={}",
        rows.iter().filter(|r| r.flagged).count()
    ));
    emit(&out, &t)
}

fn times_energy(a: &TimesArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.common.config)?;
    let u0 = required(a.common.u0.or(cfg.u0), "u0")?;
    let l = required(a.widths.l.or(cfg.l), "l")?;
    let barrier = BarrierSpec::new(u0, l)?;
    let lo = required(a.eps_min.or(cfg.eps_min), "eps-min")?;
    let hi = required(a.eps_max.or(cfg.eps_max), "eps-max")?;
    let steps = a.widths.steps.or(cfg.steps).unwrap_or(101);
    let energies = linspace(lo, hi, steps, "eps")?;
    barrier.sub_barrier(lo)?;
    barrier.sub_barrier(hi)?;
    let out = a.common.out.clone().or(cfg.out.clone());
    let rows = energy_sweep(&barrier, &energies)?;
    let crossing = if energies.len() >= 2 {
        delay_crossing(&barrier, lo, hi, energies.len())?
    } else {
        None
    };
    let mut t = Table::new("times-energy", &times_header("eps"));
    t.num("u0", u0).num("l", l).meta("rows", energies.len());
    for r in &rows {
        t.push(&times_row(r.eps, r));
    }
    t.footer.push(format!(
        "group_delay_unconfirmed={}",
        rows.iter().filter(|r| r.flagged).count()
    ));
    t.footer
        .push(format!("crossing_eps={}", crossing.map_or("none".to_string(), fmt_num)));
    emit(&out, &t)
}

fn packet(a: &PacketArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.common.config)?;
    let u0 = required(a.common.u0.or(cfg.u0), "u0")?;
    let p = required(a.p.or(cfg.p), "p")?;
    let b = required(a.b.or(cfg.b), "b")?;
    let barrier0 = BarrierSpec::new(u0, 0.0)?;
    let packet = PacketSpec::sub_barrier(p, b, &barrier0)?;
    let widths = resolve_widths(&a.widths, &cfg, 12)?;
    let out = a
        .common
        .out
        .clone()
        .or(cfg.out.clone())
        .ok_or_else(|| invalid("packet needs --out (it writes two files)"))?;
    let mut settings = TimingSettings::default();
    if let Some(dt) = a.dt.or(cfg.dt) {
        settings.dt = dt;
    }
    if let Some(r) = a.refine.or(cfg.refine) {
        settings.refine = r;
    }
    if let Some(c) = a.mean_cap.or(cfg.mean_cap) {
        settings.mean_cap = c;
    }
    if let Some(c) = a.arrival_cap.or(cfg.arrival_cap) {
        settings.arrival_cap = c;
    }
    if !(settings.dt > 0.0 && settings.refine > 0.0) {
        return Err(invalid("--dt and --refine must be > 0"));
    }
    let with_mean = !(a.no_mean || cfg.no_mean.unwrap_or(false));
    let dump = a.dump_series || cfg.dump_series.unwrap_or(false);
    let rows = packet_sweep(u0, &packet, &widths, &settings, with_mean)?;
    let t_in = rows.first().map_or(f64::NAN, |r| r.t_in);

    let mut arr = Table::new("packet", &["l", "t_arr", "t_arr_minus_tin", "captured_weight"]);
    let mut mean = Table::new("packet", &["l", "t_mean"]);
    for t in [&mut arr, &mut mean] {
        t.num("u0", u0)
            .num("p", p)
            .num("b", b)
            .num("dt", settings.dt)
            .num("refine", settings.refine)
            .num("t_in", t_in)
            .meta("rows", widths.len());
    }
    let mut failed = Vec::new();
    for row in &rows {
        let basis = Basis::Barrier(barrier0.with_width(row.l)?);
        match &row.arrival {
            Ok(ar) => arr.push(&[row.l, ar.t, ar.t - row.t_in, ar.captured_weight]),
            Err(e) => {
                let w = SpectralAmplitude::build(&packet, basis, GridSpec::new(0.0, row.l))?.captured_weight();
                arr.push(&[row.l, f64::NAN, f64::NAN, w]);
                arr.footer.push(format!("error l={}: {e}", fmt_num(row.l)));
                failed.push(row.l);
            }
        }
        if with_mean {
            match &row.mean {
                Ok(m) => mean.push(&[row.l, m.t_mean]),
                Err(e) => {
                    mean.push(&[row.l, f64::NAN]);
                    mean.footer.push(format!("error l={}: {e}", fmt_num(row.l)));
                    failed.push(row.l);
                }
            }
        }
    }
    if dump {
        for row in &rows {
            let Ok(ar) = &row.arrival else { continue };
            let basis = Basis::Barrier(barrier0.with_width(row.l)?);
            let amp = SpectralAmplitude::build(
                &packet,
                basis,
                GridSpec::new(ar.window_end, row.l).refined(settings.refine),
            )?;
            let series = synthesize(
                &amp,
                row.l,
                &TimeGrid::covering(0.0, ar.window_end, settings.dt)?,
                &settings.synthesis,
            )?;
            let mut s = Table::new("packet-series", &["t", "density"]);
            s.num("u0", u0).num("p", p).num("b", b).num("l", row.l);
            for (t, d) in series.times.iter().zip(&series.density) {
                s.push(&[*t, *d]);
            }
            write_atomic(&sibling(&out, &format!("_series_l{}", fmt_num(row.l))), &s.render())?;
        }
    }
    write_atomic(&out, &arr.render())?;
    if with_mean {
        write_atomic(&sibling(&out, "_mean"), &mean.render())?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "{} row(s) failed; see the footer comments (first at l = {})",
            failed.len(),
            fmt_num(failed[0])
        )))
    }
}

fn spectrum(a: &SpectrumArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.common.config)?;
    let u0 = required(a.common.u0.or(cfg.u0), "u0")?;
    let eps = required(a.eps.or(cfg.eps), "eps")?;
    BarrierSpec::new(u0, 0.0)?.sub_barrier(eps)?;
    let widths = resolve_widths(&a.widths, &cfg, 12)?;
    if widths.iter().any(|&l| l <= 0.0) {
        return Err(invalid("spectrum needs widths > 0"));
    }
    let k_max = a.k_max.or(cfg.k_max).unwrap_or(1000.0);
    let n_k = a.n_k.or(cfg.n_k).unwrap_or(2001);
    let out = a.common.out.clone().or(cfg.out.clone());
    let dump = a.dump_series || cfg.dump_series.unwrap_or(false);
    if dump && out.is_none() {
        return Err(invalid("--dump-series needs --out"));
    }
    let rows = reflected_share_sweep(u0, eps, &widths, k_max, n_k)?;
    let mut t = Table::new(
        "spectrum",
        &["l", "W_plus", "W_minus", "ratio", "W_excess", "parseval", "flags"],
    );
    t.num("u0", u0)
        .num("eps", eps)
        .num("k_max", k_max)
        .meta("n_k", n_k)
        .meta("rows", widths.len());
    for s in &rows {
        let mut row: Vec<String> = [s.l, s.w_plus, s.w_minus, s.ratio, s.excess, s.parseval]
            .iter()
            .map(|v| fmt_num(*v))
            .collect();
        row.push(if s.flags.is_empty() {
            "ok".into()
        } else {
            s.flags.iter().map(|f| f.label()).collect::<Vec<_>>().join("|")
        });
        t.rows.push(row);
    }
    if let (true, Some(out)) = (dump, &out) {
        for s in &rows {
            let mut d = Table::new("spectrum-density", &["k", "density"]);
            d.num("u0", u0).num("eps", eps).num("l", s.l);
            for (k, v) in s.k.iter().zip(&s.density) {
                d.push(&[*k, *v]);
            }
            write_atomic(&sibling(out, &format!("_phi_l{}", fmt_num(s.l))), &d.render())?;
        }
    }
    emit(&out, &t)
}
