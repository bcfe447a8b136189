//! Command-line flags, the JSON config file, and the merged run settings.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use pbessel::PExponent;
use pbessel::asymptotics::FitMode;
use pbessel::router::Route;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug, Default)]
#[command(name = "pbessel", version, about = "p-Bessel functions, operator identities and p-circle lattice sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub args: Args,
}

#[derive(clap::Subcommand, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Evaluate on a grid of (p, omega, phi, r).
    Eval,
    /// Evaluate every applicable route and report disagreements.
    Compare,
    /// Residual tables for the operator identities.
    Verify,
    /// Fit envelope decay exponents.
    Asy,
    /// Lattice point counts and discrepancies.
    Lattice,
    /// Truncated Hardy-type series for the discrepancy.
    Hardy,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Eval => "eval",
            Command::Compare => "compare",
            Command::Verify => "verify",
            Command::Asy => "asy",
            Command::Lattice => "lattice",
            Command::Hardy => "hardy",
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    Svg,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    #[default]
    All,
    Theorem12,
    EkInt,
    OrderLower,
    Ode,
}

impl Suite {
    pub fn members(self) -> &'static [Suite] {
        match self {
            Suite::All => &[Suite::Theorem12, Suite::EkInt, Suite::OrderLower, Suite::Ode],
            Suite::Theorem12 => &[Suite::Theorem12],
            Suite::EkInt => &[Suite::EkInt],
            Suite::OrderLower => &[Suite::OrderLower],
            Suite::Ode => &[Suite::Ode],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Theorem12 => "theorem12",
            Suite::EkInt => "ek-int",
            Suite::OrderLower => "order-lower",
            Suite::Ode => "ode",
        }
    }

    /// Pass threshold when `--tol` is not given.
    pub fn default_tol(self) -> f64 {
        match self {
            Suite::Theorem12 | Suite::All => 1e-6,
            Suite::EkInt | Suite::OrderLower => 1e-7,
            Suite::Ode => 1e-4,
        }
    }
}

#[derive(clap::Args, Debug, Default)]
pub struct Args {
    /// Exponents as rationals 2/q, comma separated (e.g. 2/3,1/2,1,2).
    #[arg(long, global = true, value_delimiter = ',')]
    pub p: Vec<String>,
    /// Exponents given by q = 2/p, comma separated.
    #[arg(long, global = true, value_delimiter = ',', conflicts_with = "p")]
    pub q: Vec<u32>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub omega: Vec<f64>,
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub phi: Vec<f64>,
    /// Radii: start:stop:step, or a comma-separated list.
    #[arg(long, global = true)]
    pub r: Option<String>,
    /// Imaginary part added to every radius (complex evaluation).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub r_im: Option<f64>,
    /// auto | series | thm13 | poisson | axis
    #[arg(long, global = true)]
    pub method: Option<String>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// JSON file with RunConfig fields; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub suite: Option<Suite>,
    /// Fractional orders for the verify suites.
    #[arg(long, global = true, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Hardy series cutoff: K for p = 2, the bound on |n|_p^p otherwise.
    #[arg(long, global = true)]
    pub cutoff: Option<f64>,
    /// Envelope reduction for asy: envelope | rms.
    #[arg(long, global = true)]
    pub fit_mode: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl RangeSpec {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if !(self.step > 0.0) || !(self.stop >= self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(format!("range {}:{}:{} is empty or malformed", self.start, self.stop, self.step));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + self.step * i as f64).collect())
    }
}

/// The JSON config document. Field names mirror [`RunConfig`].
#[derive(Serialize, Deserialize, Debug, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    pub p_list: Option<Vec<String>>,
    pub omega_list: Option<Vec<f64>>,
    pub phi_list: Option<Vec<f64>>,
    pub r_range: Option<RangeSpec>,
    pub r_list: Option<Vec<f64>>,
    pub r_im: Option<f64>,
    pub method: Option<String>,
    pub tol: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub suite: Option<Suite>,
    pub gamma_list: Option<Vec<f64>>,
    pub cutoff: Option<f64>,
    pub fit_mode: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// Fully resolved settings for one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub p_list: Vec<PExponent>,
    pub omega_list: Vec<f64>,
    pub phi_list: Vec<f64>,
    /// `None` means the command's own default radii.
    pub r_values: Option<Vec<f64>>,
    pub r_im: f64,
    pub method: Route,
    /// `None` means the command's own default.
    pub tol: Option<f64>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub suite: Suite,
    pub gamma_list: Vec<f64>,
    pub cutoff: Option<f64>,
    pub fit_mode: FitMode,
}

fn parse_radii(text: &str) -> Result<Vec<f64>, String> {
    let bad = |t: &str| format!("cannot parse radius {t:?}");
    let parts: Vec<&str> = text.split(':').collect();
    match parts.len() {
        1 => text.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad(t))).collect(),
        3 => {
            let v: Vec<f64> = parts.iter().map(|t| t.trim().parse::<f64>().map_err(|_| bad(t))).collect::<Result<_, _>>()?;
            RangeSpec { start: v[0], stop: v[1], step: v[2] }.points()
        }
        _ => Err(format!("radius range must be start:stop:step, got {text:?}")),
    }
}

fn parse_fit_mode(text: &str) -> Result<FitMode, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "envelope" => Ok(FitMode::Envelope),
        "rms" | "rms-bin" => Ok(FitMode::RmsBin),
        other => Err(format!("unknown fit mode {other:?}")),
    }
}

impl RunConfig {
    /// Merges flags over the config file over built-in defaults.
    pub fn resolve(cli: Cli) -> Result<Self, String> {
        let a = cli.args;
        let file = match &a.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let command = cli.command.or(file.command).ok_or("no command given (eval, compare, verify, asy, lattice, hardy)")?;
        let p_list = if !a.q.is_empty() {
            a.q.iter().map(|&q| PExponent::from_q(q).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?
        } else {
            let texts = if a.p.is_empty() { file.p_list.unwrap_or_else(|| vec!["2".into()]) } else { a.p };
            texts.iter().map(|t| PExponent::from_str(t).map_err(|e| e.to_string())).collect::<Result<Vec<_>, _>>()?
        };
        let omega_list = if a.omega.is_empty() { file.omega_list.unwrap_or_default() } else { a.omega };
        let phi_list = if a.phi.is_empty() { file.phi_list.unwrap_or_default() } else { a.phi };
        let r_values = match (a.r, file.r_range, file.r_list) {
            (Some(text), _, _) => Some(parse_radii(&text)?),
            (None, Some(range), _) => Some(range.points()?),
            (None, None, Some(list)) => Some(list),
            (None, None, None) => None,
        };
        let method = a.method.or(file.method).map(|m| m.parse::<Route>().map_err(|e| e.to_string())).transpose()?.unwrap_or_default();
        let tol = a.tol.or(file.tol);
        let fit_mode = a.fit_mode.or(file.fit_mode).map(|m| parse_fit_mode(&m)).transpose()?.unwrap_or_default();
        let cfg = Self {
            command,
            p_list,
            omega_list,
            phi_list,
            r_values,
            r_im: a.r_im.or(file.r_im).unwrap_or(0.0),
            method,
            tol,
            output_path: a.output.or(file.output_path),
            format: a.format.or(file.format).unwrap_or_default(),
            suite: a.suite.or(file.suite).unwrap_or_default(),
            gamma_list: if a.gamma.is_empty() { file.gamma_list.unwrap_or_default() } else { a.gamma },
            cutoff: a.cutoff.or(file.cutoff),
            fit_mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        if self.p_list.is_empty() {
            return Err("the p list is empty".into());
        }
        if let Some(t) = self.tol
            && !(t > 0.0)
        {
            return Err(format!("tolerance must be positive, got {t}"));
        }
        if let Some(r) = &self.r_values {
            if r.is_empty() {
                return Err("the radius list is empty".into());
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err("radii must be finite".into());
            }
        }
        if !self.r_im.is_finite() {
            return Err("imaginary part must be finite".into());
        }
        if self.method == Route::Poisson
            && let Some(p) = self.p_list.iter().find(|p| !p.q_odd())
        {
            return Err(format!("method poisson needs odd q = 2/p, but p = {p} has q = {}", p.q()));
        }
        if self.r_im != 0.0 && !matches!(self.method, Route::Auto) {
            return Err("complex radii are evaluated by the automatic route only".into());
        }
        if self.format == Format::Svg && !matches!(self.command, Command::Eval | Command::Compare) {
            return Err(format!("svg output is available for eval and compare, not {}", self.command));
        }
        if let Some(c) = self.cutoff
            && !(c >= 1.0)
        {
            return Err(format!("cutoff must be >= 1, got {c}"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_forms() {
        assert_eq!(parse_radii("0:20:0.5").unwrap().len(), 41);
        assert_eq!(parse_radii("1,3,7").unwrap(), vec![1.0, 3.0, 7.0]);
        assert!(parse_radii("1:2").is_err());
        assert!(parse_radii("5:1:1").is_err());
    }
}
