use std::path::PathBuf;

use charp_core::families::FamilySpec;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "charp", version, about = "Frobenius splitting, ordinarity and Ulrich/ACM checks for hypersurfaces over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fedder's splitting test (d <= n+1).
    Fedder(InstanceArgs),
    /// Ordinarity of a plane curve via its Hasse-Witt matrix.
    Ordinary(InstanceArgs),
    /// Whether B^1_X(1) (times a trivial bundle) is Ulrich on a plane curve.
    UlrichCurve(UlrichArgs),
    /// ACM check for B^1_X on a hypersurface of dimension >= 2.
    AcmB1(InstanceArgs),
    /// Three-way splitting equivalence on a Calabi-Yau hypersurface.
    FsplitEquiv(InstanceArgs),
    /// ACM check for F_*(O_X).
    PushforwardAcm(InstanceArgs),
    /// Euler-characteristic obstruction to Ulrich twists of B^1_X on a surface.
    Obstruction(ObstructionArgs),
    /// Sweep a family and append one record per member to a JSONL log.
    Scan(ScanArgs),
    /// Ulrich conditions for the exterior product of B^1 twists on a product of curves.
    Kunneth(KunnethArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Fermat,
    Dwork,
    #[value(alias = "legendre-cubic")]
    Legendre,
    RandomPlaneCurve,
    RandomHypersurface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Md,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Built-in family.
    #[arg(long, conflicts_with_all = ["poly", "spec"])]
    pub family: Option<FamilyKind>,
    /// Defining polynomial, inline or a path to a file holding it.
    #[arg(long, conflicts_with = "spec")]
    pub poly: Option<String>,
    /// Full family spec, compact (`fermat,p=7,d=3`) or JSON.
    #[arg(long)]
    pub spec: Option<String>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Ambient dimension of P^n.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub lambda: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Twist window half-width M; defaults to max(2d, p).
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<i64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct UlrichArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Rank r of the trivial factor O^r.
    #[arg(long, default_value_t = 1)]
    pub rank: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ObstructionArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
    pub t_from: i64,
    #[arg(long, default_value_t = 10, allow_hyphen_values = true)]
    pub t_to: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanFamily {
    Dwork,
    #[value(alias = "legendre-cubic")]
    Legendre,
    RandomPlaneCurve,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub family: ScanFamily,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Degree for random curves.
    #[arg(long, default_value_t = 4)]
    pub d: u32,
    /// `all`, a range `a..b` / `a..=b`, or a list `a,b,c`.
    #[arg(long, default_value = "all")]
    pub lambda: String,
    /// Seed range or list for random families.
    #[arg(long, default_value = "0..10")]
    pub seeds: String,
    #[arg(long, env = "CHARP_JOBS", default_value_t = 1)]
    pub jobs: usize,
    /// JSONL log; existing records are kept and their cells skipped.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format of the summary printed on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct KunnethArgs {
    /// Curve family specs, compact or JSON, one per factor.
    #[arg(long, num_args = 1.., required = true)]
    pub factors: Vec<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses a family spec given compactly or as JSON.
pub fn parse_spec(text: &str) -> Result<FamilySpec> {
    let text = text.trim();
    if text.starts_with('{') {
        Ok(serde_json::from_str(text)?)
    } else {
        Ok(FamilySpec::parse_compact(text)?)
    }
}

impl SourceArgs {
    pub fn family_spec(&self) -> Result<FamilySpec> {
        if let Some(spec) = &self.spec {
            return parse_spec(spec);
        }
        let p = self
            .p
            .ok_or_else(|| CliError::Usage("--p is required".into()))?;
        let n = self.n.unwrap_or(2);
        let default_d = u32::try_from(n + 1).map_err(|_| CliError::Usage("n too large".into()))?;
        let need = |v: Option<u64>, name: &str| {
            v.ok_or_else(|| CliError::Usage(format!("--{name} is required for this family")))
        };
        if let Some(poly) = &self.poly {
            let path = std::path::Path::new(poly);
            let text = if path.is_file() {
                std::fs::read_to_string(path)
                    .map_err(|source| CliError::Io {
                        path: path.to_path_buf(),
                        source,
                    })?
                    .trim()
                    .to_string()
            } else {
                poly.clone()
            };
            return Ok(FamilySpec::Custom { p, n, poly: text });
        }
        let kind = self
            .family
            .ok_or_else(|| CliError::Usage("one of --family, --poly or --spec is required".into()))?;
        Ok(match kind {
            FamilyKind::Fermat => FamilySpec::Fermat {
                p,
                n,
                d: self.d.unwrap_or(default_d),
            },
            FamilyKind::Dwork => FamilySpec::Dwork {
                p,
                n,
                lambda: need(self.lambda, "lambda")?,
            },
            FamilyKind::Legendre => FamilySpec::LegendreCubic {
                p,
                lambda: need(self.lambda, "lambda")?,
            },
            FamilyKind::RandomPlaneCurve => FamilySpec::RandomPlaneCurve {
                p,
                d: self.d.unwrap_or(4),
                seed: self.seed.unwrap_or(0),
            },
            FamilyKind::RandomHypersurface => FamilySpec::RandomHypersurface {
                p,
                n,
                d: self.d.unwrap_or(default_d),
                seed: self.seed.unwrap_or(0),
            },
        })
    }
}

/// Parses `all`, `a..b`, `a..=b` or `a,b,c`. `all` expands to `all_range`.
pub fn parse_values(text: &str, all_range: std::ops::Range<u64>) -> Result<Vec<u64>> {
    let text = text.trim();
    let bad = || CliError::Usage(format!("cannot read value set '{text}'"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let mut values: Vec<u64> = if text == "all" {
        all_range.collect()
    } else if let Some((a, b)) = text.split_once("..=") {
        (num(a)?..=num(b)?).collect()
    } else if let Some((a, b)) = text.split_once("..") {
        (num(a)?..num(b)?).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    values.sort_unstable();
    values.dedup();
    Ok(values)
}
