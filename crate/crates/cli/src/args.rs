use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C;
use resolab::spectrum::Rect;
use resolab::{Error, Result};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "resolab", version, about = "Jost functions, resonances and spectral identities on [0, 1]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads; defaults to the available cores. Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// ω, s and scattering data on a line of frequencies.
    Scatter(ScatterArgs),
    /// Zeros of ω (or s) in a rectangle.
    Resonances(ResonanceArgs),
    /// Run a verification suite and exit nonzero on failure.
    Verify(VerifyArgs),
    /// Compare ω with its truncated Hadamard product.
    Reconstruct(ReconstructArgs),
    /// Falsification demo for one of the uniqueness theorems.
    Uniqueness(UniquenessArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Asymptotics,
    Reflection,
    Counting,
    Uniqueness,
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Function {
    Omega,
    S,
}

#[derive(Args, Debug)]
pub struct ScatterArgs {
    #[arg(long = "potential", required = true)]
    pub potentials: Vec<PathBuf>,
    /// `start:stop:count[,imag]`.
    #[arg(long, default_value = "1:10:10", allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// ODE relative tolerance.
    #[arg(long, default_value_t = 1e-11)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct ResonanceArgs {
    #[arg(long = "potential", required = true)]
    pub potentials: Vec<PathBuf>,
    /// `re0,re1,im0,im1`.
    #[arg(long, default_value = "-10,10,-5,5", allow_hyphen_values = true)]
    pub region: String,
    /// Zero-finder tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "omega")]
    pub function: Function,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// One potential, or two for the uniqueness suite.
    #[arg(long = "potential", required = true)]
    pub potentials: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Frequency grid `start:stop:count[,imag]`; a fixed 10 x 10 lattice when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Search radius for the counting suite.
    #[arg(long, default_value_t = 40.0)]
    pub radius: f64,
    /// Agreement prefix for the uniqueness suite.
    #[arg(long, default_value_t = 0.5)]
    pub prefix: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    #[arg(long = "potential", required = true)]
    pub potentials: Vec<PathBuf>,
    /// Zero-set file; searched in the square of half-width `radius` when absent.
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// Truncation radius; the largest covered radius when absent.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Real comparison grid `start:stop:count`.
    #[arg(long, default_value = "1:10:91", allow_hyphen_values = true)]
    pub grid: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct UniquenessArgs {
    /// Exactly two: `q` then `q̃`.
    #[arg(long = "potential", required = true)]
    pub potentials: Vec<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub theorem: u8,
    /// The pair agrees on `[0, prefix]`.
    #[arg(long)]
    pub prefix: f64,
    #[arg(long, default_value_t = 15.0)]
    pub radius: f64,
    /// `all`, `every-second` or `none`.
    #[arg(long, default_value = "all")]
    pub subset: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

fn usage(msg: String) -> Error {
    Error::Domain(msg)
}

pub fn parse_region(text: &str) -> Result<Rect> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 4 {
        return Err(usage(format!("--region expects re0,re1,im0,im1, got `{text}`")));
    }
    let v = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| usage(format!("--region: `{p}` is not a number"))))
        .collect::<Result<Vec<f64>>>()?;
    Rect::new(v[0], v[1], v[2], v[3])
}

/// A line of frequencies `start + j (stop - start)/(count - 1) + i imag`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub imag: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<C> {
        if self.count == 1 {
            return vec![C::new(self.start, self.imag)];
        }
        (0..self.count)
            .map(|j| {
                let t = j as f64 / (self.count - 1) as f64;
                let re = if j + 1 == self.count { self.stop } else { self.start + t * (self.stop - self.start) };
                C::new(re, self.imag)
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        format!("{}:{}:{},{}", self.start, self.stop, self.count, self.imag)
    }
}

pub fn parse_grid(text: &str) -> Result<Grid> {
    let (line, imag) = match text.split_once(',') {
        Some((l, i)) => (l, i.trim().parse::<f64>().map_err(|_| usage(format!("--grid: bad imaginary part `{i}`")))?),
        None => (text, 0.0),
    };
    let parts: Vec<&str> = line.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("--grid expects start:stop:count[,imag], got `{text}`")));
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| usage(format!("--grid: `{p}` is not a number")));
    let (start, stop) = (num(parts[0])?, num(parts[1])?);
    let count = parts[2].trim().parse::<usize>().map_err(|_| usage(format!("--grid: bad count `{}`", parts[2])))?;
    if count == 0 || !start.is_finite() || !stop.is_finite() || !imag.is_finite() {
        return Err(usage(format!("--grid: empty or non-finite grid `{text}`")));
    }
    Ok(Grid { start, stop, count, imag })
}

pub fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--tol must be positive, got {tol}")))
    }
}
