//! Command-line front end: argument parsing, config files, atomic output
//! and run manifests for the `twrc` binary.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{bounds_report, c_ub_sym, r_lb_mr, r_lb_zf};
use crate::channel::{effective, gen_channels, rate_pair, ChannelPair, PowerConfig};
use crate::df::{df_capacity_region, Polygon, DEFAULT_BC_TOL, DEFAULT_TAUS, DEFAULT_WEIGHTS};
use crate::error::{invalid, Error, Result};
use crate::optimal::{capacity_region, rate_region_boundary, DEFAULT_DELTA_R, DEFAULT_POWER_GRID, DEFAULT_PROFILES};
use crate::region::{fmt_f64, RegionBoundary};
use crate::sdp::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::suboptimal::{
    direct_relay, oneway_alternating, scheme_equal_weight_sum_rate, sweep_region, OneWayPower, Scheme,
};
use crate::validate::{run_suite, Suite};

#[derive(Parser, Debug)]
#[command(
    name = "twrc",
    version,
    about = "Two-way relay beamforming: regions, bounds and baselines"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat `key = value` file mirroring the long flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimal, MRR-MRT and ZFR-ZFT rate-region boundaries.
    Region(RegionArgs),
    /// Capacity region: envelope over a grid of source powers.
    Capacity(CapacityArgs),
    /// Sum-rate bounds and schemes over an SNR grid.
    Sumrate(SumrateArgs),
    /// Capacity bounds for one power setting.
    Bounds(BoundsArgs),
    /// Decode-and-forward versus amplify-and-forward regions.
    DfCompare(DfArgs),
    /// Run the invariant suites.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChannelArgs {
    /// Relay antennas.
    #[arg(long, default_value_t = 4, value_parser = parse_m)]
    pub m: usize,
    /// Channel correlation in [0, 1].
    #[arg(long, default_value_t = 0.5, value_parser = parse_rho)]
    pub rho: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Load the channel pair from JSON instead of generating it.
    #[arg(long, value_name = "FILE")]
    pub channel: Option<PathBuf>,
}

impl ChannelArgs {
    fn pair(&self) -> Result<ChannelPair> {
        match &self.channel {
            Some(p) => ChannelPair::load(p),
            None => gen_channels(self.m, self.rho, self.seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionScheme {
    All,
    Optimal,
    Mr,
    Zf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RegionArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Source 1 power, linear or with a `db` suffix.
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub p1: f64,
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub p2: f64,
    /// Relay power.
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub pr: f64,
    #[arg(long, default_value_t = DEFAULT_PROFILES, value_parser = parse_at_least_two)]
    pub profiles: usize,
    /// Ratios swept for MRR-MRT and ZFR-ZFT.
    #[arg(long, default_value_t = 65, value_parser = parse_at_least_two)]
    pub ratios: usize,
    #[arg(long, default_value_t = DEFAULT_DELTA_R, value_parser = parse_positive)]
    pub delta_r: f64,
    #[arg(long, value_enum, default_value_t = RegionScheme::All)]
    pub scheme: RegionScheme,
    #[arg(long, default_value = "twrc-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CapacityArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub p1: f64,
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub p2: f64,
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub pr: f64,
    /// Source powers per axis.
    #[arg(long, default_value_t = DEFAULT_POWER_GRID, value_parser = parse_at_least_one)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_PROFILES, value_parser = parse_at_least_two)]
    pub profiles: usize,
    #[arg(long, default_value_t = DEFAULT_DELTA_R, value_parser = parse_positive)]
    pub delta_r: f64,
    #[arg(long, default_value = "twrc-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SumrateArgs {
    #[arg(long, default_value_t = 4, value_parser = parse_m)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0 / 3.0, value_parser = parse_rho)]
    pub rho: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub snr_min: f64,
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    pub snr_max: f64,
    #[arg(long, default_value_t = 2.0, value_parser = parse_positive)]
    pub snr_step: f64,
    /// Give the one-way relay average rather than per-slot power `P_R`.
    #[arg(long)]
    pub energy_averaged: bool,
    #[arg(long, default_value = "twrc-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub theta1: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub theta2: f64,
    #[arg(long, default_value_t = 0.5, value_parser = parse_rho)]
    pub rho: f64,
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub p1: f64,
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub p2: f64,
    #[arg(long, default_value = "10", value_parser = parse_power)]
    pub pr: f64,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DfArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Sets P1, P2 and P_R together.
    #[arg(long, value_parser = parse_power)]
    pub p: Option<f64>,
    #[arg(long, default_value = "100", value_parser = parse_power)]
    pub p1: f64,
    #[arg(long, default_value = "100", value_parser = parse_power)]
    pub p2: f64,
    #[arg(long, default_value = "100", value_parser = parse_power)]
    pub pr: f64,
    #[arg(long, default_value_t = DEFAULT_TAUS, value_parser = parse_at_least_two)]
    pub taus: usize,
    #[arg(long, default_value_t = DEFAULT_WEIGHTS, value_parser = parse_at_least_two)]
    pub weights: usize,
    /// Source powers per axis for the AF capacity region.
    #[arg(long, default_value_t = 4, value_parser = parse_at_least_one)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_PROFILES, value_parser = parse_at_least_two)]
    pub profiles: usize,
    #[arg(long, default_value_t = 1e-3, value_parser = parse_positive)]
    pub delta_r: f64,
    #[arg(long, default_value = "twrc-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ValidateArgs {
    #[arg(long, default_value = "all", value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long, default_value_t = 13)]
    pub seed: u64,
    /// Random instances per suite.
    #[arg(long, default_value_t = 5, value_parser = parse_at_least_one)]
    pub instances: usize,
}

fn parse_rho(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(format!("rho must lie in [0, 1], got {v}"));
    }
    Ok(v)
}

fn parse_m(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v < 2 {
        return Err("the relay needs at least 2 antennas".into());
    }
    Ok(v)
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("expected a positive number, got {v}"));
    }
    Ok(v)
}

fn parse_at_least_one(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v < 1 {
        return Err("expected at least 1".into());
    }
    Ok(v)
}

fn parse_at_least_two(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v < 2 {
        return Err("expected at least 2".into());
    }
    Ok(v)
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Linear power, or decibels with a `db` suffix (`30db` = 1000).
pub fn parse_power(s: &str) -> std::result::Result<f64, String> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let v = match lower.strip_suffix("db") {
        Some(num) => {
            let db: f64 = num.trim().parse().map_err(|e| format!("{e}"))?;
            10f64.powf(db / 10.0)
        }
        None => t.parse().map_err(|e| format!("{e}"))?,
    };
    if !(v >= 0.0 && v.is_finite()) {
        return Err(format!("power must be finite and non-negative, got {s}"));
    }
    Ok(v)
}

const SUBCOMMANDS: [&str; 6] = ["region", "capacity", "sumrate", "bounds", "df-compare", "validate"];

/// Splices `--key value` pairs from a `--config` file right after the
/// subcommand, so explicit flags given later override them.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut path = None;
    for (i, a) in strs.iter().enumerate() {
        if a == "--config" {
            path = strs.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let Some(sub) = strs.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path)?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("{path}:{}: expected key = value", n + 1)))?;
        let key = k.trim().replace('_', "-");
        let v = v.trim();
        if key == "config" {
            continue;
        }
        match v {
            "true" => extra.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => {
                extra.push(OsString::from(format!("--{key}")));
                extra.push(OsString::from(v));
            }
        }
    }
    let mut out = args[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| invalid(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    settings: &'a T,
    solver: BTreeMap<&'static str, f64>,
    files: Vec<String>,
    notes: Vec<String>,
    timings_s: BTreeMap<String, f64>,
}

fn solver_defaults() -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("sdp_tol", DEFAULT_TOL),
        ("sdp_max_iter", DEFAULT_MAX_ITER as f64),
        ("bc_tol", DEFAULT_BC_TOL),
        ("scheme_scan", crate::suboptimal::PROFILE_SCAN as f64),
    ])
}

/// Collects outputs and timings of one run.
struct Run<'a> {
    command: &'a str,
    out: PathBuf,
    files: Vec<String>,
    notes: Vec<String>,
    timings: BTreeMap<String, f64>,
}

impl<'a> Run<'a> {
    fn new(command: &'a str, out: &Path) -> Self {
        Self {
            command,
            out: out.to_path_buf(),
            files: Vec::new(),
            notes: Vec::new(),
            timings: BTreeMap::new(),
        }
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let v = f()?;
        self.timings.insert(label.to_string(), t.elapsed().as_secs_f64());
        Ok(v)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.out.join(name), bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn finish<T: Serialize>(mut self, settings: &T) -> Result<()> {
        self.files.push("manifest.json".into());
        let m = Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            settings,
            solver: solver_defaults(),
            files: self.files.clone(),
            notes: self.notes.clone(),
            timings_s: self.timings.clone(),
        };
        let text = serde_json::to_string_pretty(&m)? + "\n";
        write_atomic(&self.out.join("manifest.json"), text.as_bytes())
    }
}

fn cmd_region(a: &RegionArgs) -> Result<()> {
    let pair = a.channel.pair()?;
    let pc = PowerConfig::new(a.p1, a.p2, a.pr)?;
    let parallel = pair.rho() >= 1.0 - 1e-12 || crate::linalg::svd_tall(&pair.h_ul())?.sigma[1] <= 0.0;
    if a.scheme == RegionScheme::Zf && parallel {
        return Err(invalid("ZFR-ZFT is undefined at rho = 1 (parallel channels)"));
    }
    let mut run = Run::new("region", &a.out);
    run.write("channel.json", (pair.to_json()? + "\n").as_bytes())?;
    let want = |s: RegionScheme| a.scheme == RegionScheme::All || a.scheme == s;
    if want(RegionScheme::Optimal) {
        let eff = effective(&pair);
        let reg = run.timed("optimal", || rate_region_boundary(&eff, &pc, a.profiles, a.delta_r))?;
        run.write("optimal.csv", reg.to_csv_string(Some("optimal"))?.as_bytes())?;
    }
    if want(RegionScheme::Mr) {
        let reg = run.timed("mr", || sweep_region(Scheme::Mr, &pair, &pc, a.ratios))?;
        run.write("mr.csv", reg.to_csv_string(Some("mr"))?.as_bytes())?;
    }
    if want(RegionScheme::Zf) {
        if parallel {
            run.notes.push("zf skipped: undefined for parallel channels".into());
        } else {
            let reg = run.timed("zf", || sweep_region(Scheme::Zf, &pair, &pc, a.ratios))?;
            run.write("zf.csv", reg.to_csv_string(Some("zf"))?.as_bytes())?;
        }
    }
    run.finish(a)
}

fn cmd_capacity(a: &CapacityArgs) -> Result<()> {
    let pair = a.channel.pair()?;
    let mut run = Run::new("capacity", &a.out);
    run.write("channel.json", (pair.to_json()? + "\n").as_bytes())?;
    let reg = run.timed("capacity", || {
        capacity_region(&pair, a.p1, a.p2, a.pr, a.grid, a.profiles, a.delta_r)
    })?;
    run.write("capacity.csv", reg.to_csv_string(None)?.as_bytes())?;
    run.finish(a)
}

pub const SUMRATE_HEADER: [&str; 8] = [
    "snr_db", "c_ub_sym", "r_lb_mr", "r_mr", "r_lb_zf", "r_zf", "r_dr", "r_ow",
];

/// Rows of the sum-rate table: `p1 = p2 = P_R = 10^(snr/10)`.
pub fn sumrate_table(a: &SumrateArgs) -> Result<Vec<[f64; 8]>> {
    if a.snr_max < a.snr_min {
        return Err(invalid("snr-max must not be below snr-min"));
    }
    let pair = gen_channels(a.m, a.rho, a.seed)?;
    let power = if a.energy_averaged {
        OneWayPower::EnergyAveraged
    } else {
        OneWayPower::PerSlot
    };
    let n = ((a.snr_max - a.snr_min) / a.snr_step + 1e-9).floor() as usize + 1;
    (0..n)
        .map(|k| {
            let snr = a.snr_min + a.snr_step * k as f64;
            let p = 10f64.powf(snr / 10.0);
            let pc = PowerConfig::new(p, p, p)?;
            let (t1, t2) = (pair.theta1(), pair.theta2());
            let zf_ok = pair.rho() < 1.0;
            Ok([
                snr,
                c_ub_sym(0.5 * (t1 + t2), p),
                r_lb_mr(&pc, t1, t2, pair.rho())?,
                scheme_equal_weight_sum_rate(Scheme::Mr, &pair, &pc)?,
                if zf_ok {
                    r_lb_zf(&pc, t1, t2, pair.rho())?
                } else {
                    f64::NAN
                },
                if zf_ok {
                    scheme_equal_weight_sum_rate(Scheme::Zf, &pair, &pc)?
                } else {
                    f64::NAN
                },
                rate_pair(&direct_relay(&pair, &pc)?, &pair, &pc).sum(),
                oneway_alternating(&pair, &pc, power),
            ])
        })
        .collect()
}

fn cmd_sumrate(a: &SumrateArgs) -> Result<()> {
    let mut run = Run::new("sumrate", &a.out);
    let rows = run.timed("sumrate", || sumrate_table(a))?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(SUMRATE_HEADER)?;
    for r in &rows {
        w.write_record(r.iter().map(|&x| fmt_f64(x)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    run.write("sumrate.csv", &bytes)?;
    run.finish(a)
}

fn cmd_bounds(a: &BoundsArgs) -> Result<()> {
    let pc = PowerConfig::new(a.p1, a.p2, a.pr)?;
    let report = bounds_report(&pc, a.theta1, a.theta2, a.rho)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(p) = &a.out {
        write_atomic(p, text.as_bytes())?;
    }
    print!("{text}");
    Ok(())
}

fn polygon_csv(parts: &[(f64, &Polygon)]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["tau", "r21", "r12"])?;
    for (tau, poly) in parts {
        for v in &poly.vertices {
            w.write_record([fmt_f64(*tau), fmt_f64(v[0]), fmt_f64(v[1])])?;
        }
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn boundary_csv(tau: f64, reg: &RegionBoundary) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["tau", "r21", "r12"])?;
    for p in &reg.points {
        w.write_record([fmt_f64(tau), fmt_f64(p.rates.r21), fmt_f64(p.rates.r12)])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn cmd_df_compare(a: &DfArgs) -> Result<()> {
    let (p1, p2, pr) = match a.p {
        Some(p) => (p, p, p),
        None => (a.p1, a.p2, a.pr),
    };
    let pair = a.channel.pair()?;
    let mut run = Run::new("df-compare", &a.out);
    run.write("channel.json", (pair.to_json()? + "\n").as_bytes())?;
    let df = run.timed("df", || df_capacity_region(&pair, p1, p2, pr, a.taus, a.weights))?;
    run.write("half_mac.csv", &polygon_csv(&[(0.5, &df.mac.polygon(0.5))])?)?;
    run.write("half_bc.csv", &polygon_csv(&[(0.5, &df.bc.polygon(0.5))])?)?;
    let per: Vec<(f64, &Polygon)> = df.per_tau.iter().map(|t| (t.tau, &t.polygon)).collect();
    run.write("df_per_tau.csv", &polygon_csv(&per)?)?;
    run.write("c_df.csv", &boundary_csv(f64::NAN, &df.envelope)?)?;
    let af = run.timed("af", || {
        capacity_region(&pair, p1, p2, pr, a.grid, a.profiles, a.delta_r)
    })?;
    run.write("c_af.csv", af.to_csv_string(Some("af"))?.as_bytes())?;
    run.notes.push(format!(
        "half MAC inside half BC: {}",
        crate::df::half_mac_within_half_bc(&df.mac, &df.bc, 1e-9)
    ));
    run.finish(a)
}

fn cmd_validate(a: &ValidateArgs) -> Result<bool> {
    let checks = run_suite(a.suite, a.seed, a.instances)?;
    let mut ok = true;
    for c in &checks {
        println!(
            "{} {:<10} {:<24} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.detail
        );
        ok &= c.passed;
    }
    println!(
        "{} of {} checks passed",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    Ok(ok)
}

/// Runs a parsed command; returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Region(a) => cmd_region(a)?,
        Command::Capacity(a) => cmd_capacity(a)?,
        Command::Sumrate(a) => cmd_sumrate(a)?,
        Command::Bounds(a) => cmd_bounds(a)?,
        Command::DfCompare(a) => cmd_df_compare(a)?,
        Command::Validate(a) => return Ok(if cmd_validate(a)? { 0 } else { 1 }),
    }
    Ok(0)
}

/// Entry point shared by the binary and the CLI tests.
pub fn main_with_args(args: Vec<OsString>) -> i32 {
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn power_parsing() {
        assert_eq!(parse_power("10").unwrap(), 10.0);
        assert!((parse_power("30dB").unwrap() - 1000.0).abs() < 1e-9);
        assert!((parse_power("-10db").unwrap() - 0.1).abs() < 1e-15);
        assert!(parse_power("-1").is_err());
        assert!(parse_power("abc").is_err());
    }

    #[test]
    fn rho_out_of_range_names_the_flag() {
        let err = Cli::try_parse_from(os(&["twrc", "region", "--rho", "1.2"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("--rho"));
    }

    #[test]
    fn config_file_is_overridden_by_flags() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "# settings\nrho = 0.25\np1 = 20db\nprofiles=5\n").unwrap();
        let args = expand_config(os(&[
            "twrc",
            "region",
            "--config",
            cfg.to_str().unwrap(),
            "--rho",
            "0.75",
        ]))
        .unwrap();
        let cli = Cli::try_parse_from(args).unwrap();
        let Command::Region(r) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(r.channel.rho, 0.75);
        assert_eq!(r.p1, 100.0);
        assert_eq!(r.profiles, 5);
    }

    #[test]
    fn sumrate_shape() {
        let a = SumrateArgs {
            m: 4,
            rho: 1.0 / 3.0,
            seed: 42,
            snr_min: 0.0,
            snr_max: 40.0,
            snr_step: 2.0,
            energy_averaged: false,
            out: PathBuf::from("unused"),
        };
        let rows = sumrate_table(&a).unwrap();
        assert_eq!(rows.len(), 21);
        assert_eq!(rows[20][0], 40.0);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
