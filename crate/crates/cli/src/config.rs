use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rolling_twistor::SurfaceFamily;

use crate::{CliError, JOBS_ENV};

#[derive(Debug, Parser)]
#[command(name = "rolling-twistor", version, about = "Cartan quartic, G2 checks, rolling and embeddings for rolling surfaces")]
pub struct RunConfig {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Mesh,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads for grid work [default: $ROLLING_TWISTOR_JOBS, else all cores]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file [default: stdout]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; tables are csv, `embed` writes mesh
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl Common {
    pub fn jobs(&self) -> Result<usize, CliError> {
        if let Some(n) = self.jobs {
            return if n == 0 { Err(CliError::Usage("--jobs must be at least 1".into())) } else { Ok(n) };
        }
        match std::env::var(JOBS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(CliError::Usage(format!("{JOBS_ENV}={v:?} is not a positive integer"))),
            },
            Err(_) => Ok(0),
        }
    }

    pub fn check_format(&self, want: Format) -> Result<(), CliError> {
        match self.format {
            Some(f) if f != want => {
                let name = |f: Format| f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
                Err(CliError::Usage(format!("this subcommand writes {} output, not {}", name(want), name(f))))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form quartic A1..A5, scaled maximum and root type per grid point
    Quartic(QuarticArgs),
    /// G2 verdict over a grid: exit 0 if the quartic vanishes everywhere, 1 if not
    G2check(QuarticArgs),
    /// Integrate an admissible rolling motion and report its residuals
    Roll(RollArgs),
    /// Weyl-tensor quartic against the closed form at sample points
    Oracle(OracleArgs),
    /// Mesh of a G2 surface of revolution or of the negative-curvature branch
    Embed(EmbedArgs),
    /// Growth vector of the distribution at sample points
    Growth(GrowthArgs),
}

/// `a:b:n`, `n` evenly spaced values from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = self.count - 1;
        (0..=n).map(|i| if i == n { self.end } else { self.start + (self.end - self.start) * i as f64 / n as f64 }).collect()
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected a:b:n, got `{s}`"));
    }
    let num = |t: &str| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("`{t}` is not a finite number"));
    let (start, end) = (num(parts[0])?, num(parts[1])?);
    let count: usize = parts[2].trim().parse().map_err(|_| format!("`{}` is not a point count", parts[2]))?;
    if count == 0 {
        return Err("point count must be at least 1".into());
    }
    if count > 1 && !(start < end) {
        return Err(format!("range start {start} must be below its end {end}"));
    }
    Ok(Range { start, end, count })
}

pub fn parse_surface(s: &str) -> Result<SurfaceFamily, String> {
    s.parse::<SurfaceFamily>().map_err(|e| e.to_string())
}

fn parse_tuple<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("`{p}` is not a finite number"))?;
    }
    Ok(out)
}

pub fn parse_point(s: &str) -> Result<[f64; 5], String> {
    parse_tuple::<5>(s)
}

pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_tuple::<2>(s)
}

#[derive(Debug, Args)]
pub struct SurfacePair {
    /// First surface: plane | sphere:r=R | hyperbolic:r=R | profile:alpha=A,beta=B[,gamma=C] | g2:eps=-1|0|1
    #[arg(long, value_parser = parse_surface)]
    pub s1: SurfaceFamily,
    /// Second surface, same grammar
    #[arg(long, value_parser = parse_surface)]
    pub s2: SurfaceFamily,
}

#[derive(Debug, Args)]
pub struct QuarticArgs {
    #[command(flatten)]
    pub pair: SurfacePair,
    /// Number of points across the default range of the first chart coordinate of s1
    #[arg(long, default_value_t = 20, conflicts_with = "rho")]
    pub grid: usize,
    /// Explicit range a:b:n of the first chart coordinate of s1
    #[arg(long, value_parser = parse_range)]
    pub rho: Option<Range>,
    /// Vanishing threshold for max|A_i| / ((κ−λ)⁴·max(κ²,λ²,1))
    #[arg(long, default_value_t = rolling_twistor::cartan::ZERO_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct RollArgs {
    #[command(flatten)]
    pub pair: SurfacePair,
    /// Start point x,y,u,v,phi [default: middle of both default ranges, zeros elsewhere]
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub start: Option<[f64; 5]>,
    /// Control file with rows t,c1,c2 (piecewise linear)
    #[arg(long, conflicts_with = "control")]
    pub controls: Option<std::path::PathBuf>,
    /// Constant control c1,c2
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "1,0")]
    pub control: [f64; 2],
    /// Rescale controls to unit speed on the first surface
    #[arg(long)]
    pub normalize: bool,
    /// Integration step
    #[arg(long, default_value_t = 1e-2)]
    pub dt: f64,
    /// Final time
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Initial tangent vector on the first surface for the no-twist check, in frame components
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "1,0")]
    pub v0: [f64; 2],
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub pair: SurfacePair,
    /// Number of seeded random sample points
    #[arg(long, default_value_t = 5, conflicts_with = "point")]
    pub points: usize,
    /// Seed for the sample points
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// A single configuration point x,y,u,v,phi
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub point: Option<[f64; 5]>,
    /// Finite-difference step of the curvature computation
    #[arg(long, default_value_t = rolling_twistor::oracle::DEFAULT_STEP)]
    pub fd_step: f64,
    /// Projective agreement threshold on the scaled 2×2 minors
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshKind {
    G2,
    NegativeCurvature,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Surface family
    #[arg(long, value_enum, default_value = "g2")]
    pub family: MeshKind,
    /// ε of the g2 family
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub eps: i64,
    /// Radial range a:b:n [default: the family's figure range, 64 rows]
    #[arg(long, value_parser = parse_range)]
    pub rho: Option<Range>,
    /// Samples around the axis
    #[arg(long, default_value_t = 64)]
    pub nphi: usize,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub pair: SurfacePair,
    /// Number of seeded random sample points
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Outer bracket step, the inner one is a quarter of it [default: 4e-4·(1+|p|)]
    #[arg(long)]
    pub fd_step: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.5:3:6").unwrap().values(), vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(parse_range("1:1:1").unwrap().values(), vec![1.0]);
        for bad in ["1:2", "2:1:3", "a:1:2", "0:1:0", "0:1:-2"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn tuples() {
        assert_eq!(parse_point("1,2,3,4,-5").unwrap(), [1.0, 2.0, 3.0, 4.0, -5.0]);
        assert!(parse_point("1,2,3").is_err());
        assert!(parse_pair("1,nan").is_err());
    }

    #[test]
    fn verifies() {
        use clap::CommandFactory;
        RunConfig::command().debug_assert();
    }
}
