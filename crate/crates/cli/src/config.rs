use std::path::PathBuf;

use apery::arith::parse_rational;
use apery::linform::Gauge;
use apery::modforms::{CATALOG_LEVELS, UNSPECIFIED_LEVELS};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Rational;

use crate::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "apery", version, about = "Rational approximations to zeta(3) from modular forms")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Directory for cached t-series.
    #[arg(long, global = true, env = "ZETA3_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Recompute every cache hit and fail if the stored payload differs.
    #[arg(long, global = true)]
    pub verify_cache: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
    Tsv,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// The weight-4 Eisenstein combination F_N and its q-expansion.
    FForm {
        #[arg(long)]
        level: u64,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// The weight-2 basis E0, E1 and selected members.
    EFamily {
        #[arg(long)]
        level: u64,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Hauptmodul eta quotient and q-expansion.
    Haupt {
        #[arg(long)]
        level: u64,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
    /// Exact approximants a_n / b_n for n < order.
    Approx {
        #[arg(long)]
        level: u64,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 6)]
        order: usize,
    },
    /// Recurrence, operator, modularity, integrality and Hecke checks.
    Verify {
        #[arg(long, default_value_t = 6)]
        level: u64,
        #[command(flatten)]
        family: FamilyArgs,
        /// Largest n for the recurrence and integrality checks.
        #[arg(long, default_value_t = 50)]
        upto: usize,
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Fricke values, branch-radius estimates and the e^3 obstruction.
    Branch {
        #[arg(long, value_delimiter = ',', default_values_t = CATALOG_LEVELS)]
        levels: Vec<u64>,
        #[arg(long, default_value_t = 40)]
        digits: u32,
        #[arg(long, default_value_t = 200)]
        order: usize,
    },
    /// Numerical check of the functional equation of f - zeta(3).
    HeckeCheck {
        #[arg(long)]
        level: u64,
        #[arg(long, default_value_t = 50)]
        digits: u32,
        /// q-series order; chosen from a tail bound when omitted.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Error, denominator size and quality of a_n / b_n.
    Metrics {
        #[arg(long)]
        level: u64,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [199])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Reproduce one of the four reference tables.
    Table {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        which: u8,
        /// Working precision (defaults: 400 for table 2, 700 for 3 and 4).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Write every JSON artifact for one level into a run directory.
    Export {
        #[arg(long)]
        level: u64,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 50)]
        order: usize,
        #[arg(long, default_value_t = 40)]
        digits: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Comma-separated rationals, e.g. `0,1,-5,1/2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub alpha: Vec<String>,
    /// How alpha picks the family member (default: beukers at level 6,
    /// affine elsewhere).
    #[arg(long)]
    pub gauge: Option<String>,
}

/// Validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub verify_cache: bool,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let cfg = RunConfig {
            command: cli.command,
            format: cli.global.format,
            cache_dir: cli.global.cache_dir,
            jobs: cli.global.jobs,
            verify_cache: cli.global.verify_cache,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.jobs == Some(0) {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        let check_order = |order: usize| {
            if order < 2 {
                Err(CliError::Usage(format!("--order must be at least 2, got {order}")))
            } else {
                Ok(())
            }
        };
        let check_digits = |digits: u32| {
            if digits < 10 {
                Err(CliError::Usage(format!("--digits must be at least 10, got {digits}")))
            } else {
                Ok(())
            }
        };
        match &self.command {
            Command::FForm { level, order } | Command::Haupt { level, order } => {
                check_order(*order)?;
                check_level(*level, true)?;
            }
            Command::EFamily { level, family, order } | Command::Approx { level, family, order } => {
                check_order(*order)?;
                check_level(*level, false)?;
                family.params(*level)?;
            }
            Command::Verify { level, family, upto, digits } => {
                check_digits(*digits)?;
                check_level(*level, false)?;
                family.params(*level)?;
                if *upto < 1 {
                    return Err(CliError::Usage("--upto must be at least 1".into()));
                }
            }
            Command::Branch { levels, digits, order } => {
                check_digits(*digits)?;
                check_order(*order)?;
                if levels.is_empty() {
                    return Err(CliError::Usage("--levels is empty".into()));
                }
                for l in levels {
                    check_level(*l, false)?;
                }
            }
            Command::HeckeCheck { level, digits, order } => {
                check_digits(*digits)?;
                if let Some(o) = order {
                    check_order(*o)?;
                }
                check_level(*level, false)?;
            }
            Command::Metrics { level, family, n, digits } => {
                check_digits(*digits)?;
                check_level(*level, false)?;
                family.params(*level)?;
                if n.is_empty() {
                    return Err(CliError::Usage("--n is empty".into()));
                }
            }
            Command::Table { digits, .. } => {
                if let Some(d) = digits {
                    check_digits(*d)?;
                }
            }
            Command::Export { level, family, order, digits, .. } => {
                check_order(*order)?;
                check_digits(*digits)?;
                check_level(*level, false)?;
                if family.params(*level)?.len() != 1 {
                    return Err(CliError::Usage("export takes a single --alpha".into()));
                }
            }
        }
        Ok(())
    }
}

/// Catalog levels are accepted everywhere; the levels without stated data
/// only where a "not reproducible" answer is meaningful.
fn check_level(level: u64, allow_unspecified: bool) -> Result<()> {
    if CATALOG_LEVELS.contains(&level) || (allow_unspecified && UNSPECIFIED_LEVELS.contains(&level)) {
        return Ok(());
    }
    if UNSPECIFIED_LEVELS.contains(&level) {
        return Err(CliError::Core(apery::Error::NotReproducible(level)));
    }
    let supported: Vec<String> = CATALOG_LEVELS.iter().map(u64::to_string).collect();
    Err(CliError::Usage(format!(
        "level {level} is not supported (catalog levels: {})",
        supported.join(", ")
    )))
}

impl FamilyArgs {
    pub fn gauge(&self, level: u64) -> Result<Gauge> {
        let gauge = match &self.gauge {
            None => Gauge::default_for(level),
            Some(g) => g.parse::<Gauge>().map_err(|e| CliError::Usage(e.to_string()))?,
        };
        if gauge == Gauge::Beukers && level != 6 {
            return Err(CliError::Usage(format!(
                "the beukers gauge is defined for level 6 only, not {level}"
            )));
        }
        Ok(gauge)
    }

    pub fn alphas(&self) -> Result<Vec<Rational>> {
        if self.alpha.is_empty() {
            return Err(CliError::Usage("--alpha is empty".into()));
        }
        self.alpha
            .iter()
            .map(|a| parse_rational(a.trim()).map_err(|e| CliError::Usage(format!("--alpha: {e}"))))
            .collect()
    }

    pub fn params(&self, level: u64) -> Result<Vec<apery::linform::FamilyParam>> {
        let gauge = self.gauge(level)?;
        Ok(self
            .alphas()?
            .into_iter()
            .map(|a| apery::linform::FamilyParam::new(gauge, a))
            .collect())
    }
}
