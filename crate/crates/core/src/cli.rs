//! Command-line front end: argument parsing, dispatch and CSV/JSON output.
//!
//! Exit codes: 0 success, 2 invalid input or parameters, 3 a `compare` check
//! outside tolerance, 64 unknown subcommand.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::autocorr::estimate_autocorrelation;
use crate::comb::{Positions, WeightedComb};
use crate::cps::generate_model_set;
use crate::cps::spec_file::read_scheme;
use crate::error::{Error, Result};
use crate::randomtiling::{
    ac_density, comparison_points, ensemble_periodogram, pp_part, sample, RandomTilingSpec,
    Smoothing,
};
use crate::spectrum::{bragg_extract, paperfolding_spectrum, periodogram, periodogram_fft};
use crate::substitution::{
    dekking_coincidence, mfs_from_substitution, modular_coincidence, Coincidence, SubstitutionRule,
};
use crate::{fmt_float, GoldenNumber};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(
    name = "aperiodica",
    version,
    about = "Aperiodic point sets, autocorrelations and diffraction"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (default: standard output).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Model set of a scheme file inside a region: `x,re_weight,im_weight`.
    Generate {
        #[arg(long)]
        scheme: PathBuf,
        /// Region `a,b`.
        #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
        region: (f64, f64),
    },
    /// Autocorrelation coefficients of a comb: `z,re_eta,im_eta`.
    Autocorr {
        #[arg(long)]
        input: PathBuf,
        /// Averaging radius `n`; points outside `[−n, n]` are dropped.
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        max_diff: f64,
    },
    /// Periodogram `k,value` of a comb, or Bragg atoms `k,intensity`.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        kmin: f64,
        #[arg(long)]
        kmax: f64,
        #[arg(long)]
        dk: f64,
        /// Report grid maxima with intensity at least this value.
        #[arg(long)]
        bragg: Option<f64>,
    },
    /// Coincidence power of a constant-length substitution.
    Coincide {
        #[arg(long)]
        rule: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_power: u32,
    },
    /// Random tiling sample (comb), closed-form `k,g`, or heights.
    Randomtiling(TilingArgs),
    /// Closed-form paperfolding atoms `k,intensity`.
    PaperfoldingSpectrum {
        /// Letter weights `A,B,C,D` (real).
        #[arg(long, value_parser = parse_weights, allow_hyphen_values = true)]
        weights: [f64; 4],
        #[arg(long, default_value_t = 12)]
        rmax: u32,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        kmin: f64,
        #[arg(long, default_value_t = 1.0)]
        kmax: f64,
    },
    /// Closed-form ac density against the mean periodogram of an ensemble.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    /// Length `u` (`tau`, `2`, `3/2`, `2*tau+1`, ...).
    #[arg(long, default_value = "tau")]
    u: String,
    #[arg(long, default_value = "1")]
    v: String,
    /// Probability of `u` (default `1/τ`).
    #[arg(long)]
    p: Option<f64>,
    /// Intervals per side.
    #[arg(long, default_value_t = 10_000)]
    intervals: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TilingArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Closed-form `k,g` on `[kmin, kmax]` instead of a sample.
    #[arg(long, conflicts_with_all = ["heights", "atoms"])]
    spectrum: bool,
    /// Closed-form pure point atoms `k,intensity` on `[−kmax, kmax]`.
    #[arg(long, conflicts_with = "heights")]
    atoms: bool,
    /// Endpoint heights `x,height` of the sample.
    #[arg(long)]
    heights: bool,
    #[arg(long, default_value_t = 0.0)]
    kmin: f64,
    #[arg(long, default_value_t = 2.0)]
    kmax: f64,
    #[arg(long, default_value_t = 0.001)]
    dk: f64,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Number of seeds `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 200)]
    seeds: u64,
    #[arg(long, default_value_t = 0.05)]
    kmin: f64,
    #[arg(long, default_value_t = 2.0)]
    kmax: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Neighbourhood of local maxima of `g` (and atoms) left out.
    #[arg(long, default_value_t = 0.02)]
    exclude: f64,
    /// Band half width of the averaged periodogram.
    #[arg(long, default_value_t = 0.002)]
    half_width: f64,
    #[arg(long, default_value_t = 64)]
    band_points: usize,
    /// Use the sharp window instead of the Hann taper.
    #[arg(long)]
    no_taper: bool,
    /// Bound on the mean relative deviation.
    #[arg(long, default_value_t = 0.05)]
    tolerance: f64,
    /// Bound on the maximal relative deviation.
    #[arg(long, default_value_t = 0.15)]
    max_tolerance: f64,
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected a,b, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

fn parse_weights(s: &str) -> std::result::Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("expected 4 weights, got {}", v.len()))
}

fn parse_length(s: &str) -> Result<GoldenNumber> {
    GoldenNumber::parse(&s.replace('τ', "tau"))
}

impl EnsembleArgs {
    fn spec(&self) -> Result<RandomTilingSpec> {
        let p = self.p.unwrap_or(1.0 / crate::TAU);
        RandomTilingSpec::new(parse_length(&self.u)?, parse_length(&self.v)?, p)
    }
}

/// A rectangular result with pre-formatted cells.
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push_floats(&mut self, values: &[f64]) {
        self.rows
            .push(values.iter().map(|&v| fmt_float(v)).collect());
    }

    fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .terminator(csv::Terminator::Any(b'\n'))
                    .from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
            Format::Json => {
                // Cells are numeric literals, so rows are emitted directly to
                // keep the 17 significant digits.
                writeln!(out, "[")?;
                for (i, row) in self.rows.iter().enumerate() {
                    let fields: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| format!("{}: {v}", serde_json::to_string(c).expect("string")))
                        .collect();
                    let sep = if i + 1 < self.rows.len() { "," } else { "" };
                    writeln!(out, "  {{{}}}{sep}", fields.join(", "))?;
                }
                writeln!(out, "]")?;
            }
        }
        Ok(())
    }
}

fn comb_table(comb: &WeightedComb) -> Result<Table> {
    let mut t = Table::new(&["x", "re_weight", "im_weight"]);
    let coords = comb.coords()?;
    for (i, w) in comb.weights().iter().enumerate() {
        let x = match comb.positions() {
            Positions::Integer(v) => v[i].to_string(),
            _ => fmt_float(coords[i]),
        };
        t.rows.push(vec![x, fmt_float(w.re), fmt_float(w.im)]);
    }
    Ok(t)
}

fn read_comb(path: &Path, radius: Option<f64>) -> Result<WeightedComb> {
    let file = File::open(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    WeightedComb::read_csv(io::BufReader::new(file), radius)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn grid(k_min: f64, k_max: f64, dk: f64) -> Result<Vec<f64>> {
    if !(dk > 0.0 && k_min <= k_max) {
        return Err(Error::InvalidParameter(format!(
            "need dk > 0 and kmin ≤ kmax (got {k_min}, {k_max}, {dk})"
        )));
    }
    let n = ((k_max - k_min) / dk * (1.0 + 1e-12)).floor() as usize + 1;
    Ok((0..n).map(|j| k_min + j as f64 * dk).collect())
}

/// Result of a subcommand: a table and an optional status line on stderr.
struct Outcome {
    table: Option<Table>,
    message: Option<String>,
    code: i32,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Self {
            table: Some(table),
            message: None,
            code: EXIT_OK,
        }
    }
}

fn coincidence_text(c: Coincidence) -> String {
    match c {
        Coincidence::At(m) => format!("coincidence at power {m}"),
        Coincidence::NotFoundUpTo(m) => format!("no coincidence up to power {m}"),
        Coincidence::Never => "no coincidence at any power".into(),
    }
}

fn execute(command: &Command, format: Format) -> Result<Outcome> {
    match command {
        Command::Generate { scheme, region } => {
            let (scheme, window) = read_scheme(scheme)?;
            Ok(Outcome::table(comb_table(&generate_model_set(
                &scheme, &window, *region,
            )?)?))
        }
        Command::Autocorr {
            input,
            radius,
            max_diff,
        } => {
            let comb = read_comb(input, None)?;
            let comb = if *radius < comb.radius() {
                comb.restrict(*radius)?
            } else {
                WeightedComb::new(comb.positions().clone(), comb.weights().to_vec(), *radius)?
            };
            let est = estimate_autocorrelation(&comb, *max_diff)?;
            let mut t = Table::new(&["z", "re_eta", "im_eta"]);
            for c in est.coefficients() {
                t.push_floats(&[c.z, c.eta.re, c.eta.im]);
            }
            Ok(Outcome::table(t))
        }
        Command::Spectrum {
            input,
            radius,
            kmin,
            kmax,
            dk,
            bragg,
        } => {
            let comb = read_comb(input, *radius)?;
            let integral_grid = (1.0 / dk - (1.0 / dk).round()).abs() < 1e-9;
            let pgram = match comb.positions() {
                Positions::Integer(_)
                    if integral_grid && (kmin / dk - (kmin / dk).round()).abs() < 1e-9 =>
                {
                    periodogram_fft(&comb, *kmin, *kmax, *dk)?
                }
                _ => periodogram(&comb, *kmin, *kmax, *dk)?,
            };
            match bragg {
                Some(threshold) => {
                    let mut t = Table::new(&["k", "intensity"]);
                    for a in bragg_extract(&pgram, *threshold)? {
                        t.push_floats(&[a.k, a.intensity]);
                    }
                    Ok(Outcome::table(t))
                }
                None => {
                    let mut t = Table::new(&["k", "value"]);
                    for (j, v) in pgram.values().iter().enumerate() {
                        t.push_floats(&[pgram.k(j), *v]);
                    }
                    Ok(Outcome::table(t))
                }
            }
        }
        Command::Coincide { rule, max_power } => {
            let rule = SubstitutionRule::parse(&read_text(rule)?)?;
            let modular = modular_coincidence(&mfs_from_substitution(&rule)?, *max_power)?;
            let columns = dekking_coincidence(&rule)?;
            let agree = match (columns, modular) {
                (Some(a), Coincidence::At(b)) => a == b,
                (Some(a), Coincidence::NotFoundUpTo(b)) => a > b,
                (None, Coincidence::At(_)) | (Some(_), Coincidence::Never) => false,
                (None, _) => true,
            };
            if !agree {
                return Err(Error::InvalidParameter(format!(
                    "inconsistent verdicts: columns {columns:?}, residues {modular:?}"
                )));
            }
            let text = coincidence_text(modular);
            let mut t = Table::new(&["verdict", "power"]);
            let power = match modular {
                Coincidence::At(m) => m.to_string(),
                _ => "null".into(),
            };
            t.rows.push(vec![serde_json::to_string(&text)?, power]);
            Ok(Outcome {
                table: (format == Format::Json).then_some(t),
                message: (format == Format::Csv).then_some(text),
                code: EXIT_OK,
            })
        }
        Command::Randomtiling(args) => {
            let spec = args.ensemble.spec()?;
            if args.spectrum {
                let mut t = Table::new(&["k", "g"]);
                for k in grid(args.kmin, args.kmax, args.dk)? {
                    t.push_floats(&[k, ac_density(&spec, k)]);
                }
                return Ok(Outcome::table(t));
            }
            if args.atoms {
                let mut t = Table::new(&["k", "intensity"]);
                for a in pp_part(&spec, args.kmax)?.atoms() {
                    t.push_floats(&[a.k, a.intensity]);
                }
                return Ok(Outcome::table(t));
            }
            let s = sample(&spec, args.ensemble.intervals, args.ensemble.seed)?;
            if args.heights {
                let mut t = Table::new(&["x", "height"]);
                for (x, h) in s.endpoints().iter().zip(s.heights()?) {
                    t.push_floats(&[*x, h]);
                }
                return Ok(Outcome::table(t));
            }
            Ok(Outcome::table(comb_table(&s.comb()?)?))
        }
        Command::PaperfoldingSpectrum {
            weights,
            rmax,
            kmin,
            kmax,
        } => {
            let w = weights.map(|x| Complex64::new(x, 0.0));
            let mut t = Table::new(&["k", "intensity"]);
            for a in paperfolding_spectrum(w, *rmax, (*kmin, *kmax))?.atoms() {
                t.push_floats(&[a.k, a.intensity]);
            }
            Ok(Outcome::table(t))
        }
        Command::Compare(args) => compare(args),
    }
}

fn compare(args: &CompareArgs) -> Result<Outcome> {
    let spec = args.ensemble.spec()?;
    if args.seeds == 0 {
        return Err(Error::InvalidParameter("need at least one seed".into()));
    }
    let ks = comparison_points(&spec, args.kmin, args.kmax, args.points, args.exclude)?;
    let seeds: Vec<u64> = (0..args.seeds)
        .map(|i| args.ensemble.seed.wrapping_add(i))
        .collect();
    let smoothing = Smoothing {
        half_width: args.half_width,
        points: args.band_points,
        taper: !args.no_taper,
    };
    let est = ensemble_periodogram(&spec, args.ensemble.intervals, &seeds, &ks, smoothing)?;
    let mut t = Table::new(&["k", "closed_form", "estimate", "relative_deviation"]);
    let mut max = 0.0f64;
    let mut sum = 0.0;
    for (&k, &e) in ks.iter().zip(&est) {
        let g = ac_density(&spec, k);
        let rel = if g > 0.0 {
            (e / g - 1.0).abs()
        } else {
            f64::INFINITY
        };
        max = max.max(rel);
        sum += rel;
        t.push_floats(&[k, g, e, rel]);
    }
    let mean = sum / ks.len() as f64;
    let pass = mean <= args.tolerance && max <= args.max_tolerance;
    Ok(Outcome {
        table: Some(t),
        message: Some(format!(
            "{}: mean relative deviation {mean:.6} (tolerance {}), max {max:.6} (tolerance {})",
            if pass { "pass" } else { "fail" },
            args.tolerance,
            args.max_tolerance
        )),
        code: if pass { EXIT_OK } else { EXIT_CHECK_FAILED },
    })
}

fn emit(cli: &Cli, outcome: &Outcome) -> Result<()> {
    let Some(table) = &outcome.table else {
        if let Some(m) = &outcome.message {
            println!("{m}");
        }
        return Ok(());
    };
    if let Some(m) = &outcome.message {
        eprintln!("{m}");
    }
    match &cli.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| {
                Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
            })?;
            let mut w = BufWriter::new(file);
            table.write(cli.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(cli.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INVALID,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_INVALID;
        }
        // Fails only if a pool already exists, e.g. on repeated in-process runs.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let outcome = match execute(&cli.command, cli.format) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    if let Err(e) = emit(&cli, &outcome) {
        eprintln!("error: {e}");
        return EXIT_INVALID;
    }
    outcome.code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(run(["aperiodica", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["aperiodica"]), EXIT_USAGE);
        assert_eq!(
            run([
                "aperiodica",
                "autocorr",
                "--input",
                "/nonexistent.csv",
                "--radius",
                "5",
                "--max-diff",
                "2"
            ]),
            EXIT_INVALID
        );
        assert_eq!(
            run(["aperiodica", "spectrum", "--input", "x.csv"]),
            EXIT_INVALID
        );
    }

    #[test]
    fn pair_and_weights() {
        assert_eq!(parse_pair("-3,4.5").unwrap(), (-3.0, 4.5));
        assert!(parse_pair("3").is_err());
        assert_eq!(parse_weights("1,1,0,0").unwrap(), [1.0, 1.0, 0.0, 0.0]);
        assert!(parse_weights("1,1,0").is_err());
        assert_eq!(parse_length("τ").unwrap(), GoldenNumber::tau());
    }

    #[test]
    fn json_table() {
        let mut t = Table::new(&["k", "value"]);
        t.push_floats(&[0.5, 1.0 / 3.0]);
        t.push_floats(&[1.0, -2.0]);
        let mut out = Vec::new();
        t.write(Format::Json, &mut out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v[0]["value"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v[1]["value"].as_f64().unwrap(), -2.0);
        let mut csv_out = Vec::new();
        t.write(Format::Csv, &mut csv_out).unwrap();
        assert!(String::from_utf8(csv_out)
            .unwrap()
            .starts_with("k,value\n5.0000000000000000e-1,"));
    }
}
