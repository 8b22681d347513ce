//! Run configuration: JSON file fields, flag overrides, and the fully
//! resolved record that every report embeds.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use chaoskit::classify::Thresholds;
use chaoskit::distfn::{log_grid, EstimateConfig};
use chaoskit::systems::shift::family_boundaries;
use chaoskit::systems::{make_system, Point, SystemKind, SystemSpec, GOLDEN_ALPHA};

use crate::{CliError, CliResult};

/// Raw config-file fields; everything optional so flags can fill the gaps.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    /// Full system spec, e.g. {"kind":"example1","horizon_cap":1000000}.
    pub system: Option<SystemSpec>,
    /// Shorthand: system kind by name (cap defaults to the horizon).
    pub system_name: Option<String>,
    pub alpha: Option<f64>,
    pub pair: Option<String>,
    pub horizon: Option<u64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub burn_in: Option<u64>,
    pub ratio: Option<f64>,
    pub grid_min: Option<f64>,
    pub grid_max: Option<f64>,
    pub grid_count: Option<usize>,
    pub thresholds: Option<Thresholds<f64>>,
    pub family: Option<usize>,
    pub flag: Option<String>,
    pub harness: Option<Vec<String>>,
    pub n: Option<u64>,
    pub pairs: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("config file `{}`: {e}", p.display())))
            }
        }
    }
}

/// The resolved configuration, defaults included; serialized into reports so
/// any verdict is reproducible from the report alone.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub system: SystemSpec,
    pub pair: Option<String>,
    pub horizon: u64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub burn_in: u64,
    pub ratio: f64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_count: usize,
    pub thresholds: Thresholds<f64>,
    pub family: usize,
    pub flag: String,
}

impl Resolved {
    fn common(file: &FileConfig, default_horizon: Option<u64>) -> CliResult<Resolved> {
        let horizon = file
            .horizon
            .or(default_horizon)
            .ok_or_else(|| CliError::Config("missing required field `horizon`".into()))?;
        if horizon < 1 {
            return Err(CliError::Config("field `horizon` must be at least 1".into()));
        }
        let system = match (&file.system, &file.system_name) {
            (Some(spec), _) => spec.clone(),
            (None, Some(name)) => SystemSpec::new(kind_by_name(name, file.alpha)?, horizon),
            (None, None) => return Err(CliError::Config("missing required field `system`".into())),
        };
        let thresholds = file.thresholds.clone().unwrap_or_default();
        Ok(Resolved {
            system,
            pair: file.pair.clone(),
            horizon,
            seed: file.seed.unwrap_or(42),
            out_dir: file.out_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
            burn_in: file.burn_in.unwrap_or(0),
            ratio: file.ratio.unwrap_or(1.25),
            grid_min: file.grid_min.unwrap_or(1e-4),
            grid_max: file.grid_max.unwrap_or(1.0),
            grid_count: file.grid_count.unwrap_or(32),
            thresholds,
            family: file.family.unwrap_or(8),
            flag: file.flag.clone().unwrap_or_else(|| "dc1".into()),
        })
    }

    pub fn for_analyze(file: &FileConfig) -> CliResult<Resolved> {
        let r = Self::common(file, None)?;
        if r.pair.is_none() {
            return Err(CliError::Config("missing required field `pair`".into()));
        }
        Ok(r)
    }

    pub fn for_classify(file: &FileConfig) -> CliResult<Resolved> {
        let mut file_with_default = FileConfig {
            system_name: file.system_name.clone().or(Some("shift2".into())),
            ..clone_fields(file)
        };
        if file_with_default.horizon.is_none() {
            file_with_default.horizon = Some(45_000);
        }
        Self::common(&file_with_default, None)
    }

    pub fn build_system(&self) -> CliResult<chaoskit::System64> {
        Ok(make_system(&self.system)?)
    }

    pub fn build_pair(&self, system: &chaoskit::System64) -> CliResult<(Point<f64>, Point<f64>)> {
        let spec = self
            .pair
            .as_deref()
            .ok_or_else(|| CliError::Config("missing required field `pair`".into()))?;
        let (a, b) = spec
            .split_once(',')
            .ok_or_else(|| CliError::Config(format!("field `pair`: expected `a,b`, got `{spec}`")))?;
        Ok((
            parse_point(system, a.trim())?,
            parse_point(system, b.trim())?,
        ))
    }

    /// Enumerated family patterns for the scrambled search.
    pub fn build_family(&self, system: &chaoskit::System64) -> CliResult<Vec<Point<f64>>> {
        if self.family < 2 || self.family > 4096 {
            return Err(CliError::Config(format!(
                "field `family`: {} is outside [2, 4096]",
                self.family
            )));
        }
        (0..self.family)
            .map(|b| {
                let pattern: Vec<u8> = (0..12).map(|j| ((b >> j) & 1) as u8).collect();
                Ok(system.family_point(&pattern)?)
            })
            .collect()
    }

    pub fn estimate_config(&self, system: &chaoskit::System64) -> EstimateConfig<f64> {
        let extra = if system.name().contains("shift2") {
            family_boundaries(self.horizon)
        } else {
            Vec::new()
        };
        EstimateConfig {
            t_grid: log_grid(self.grid_min, self.grid_max, self.grid_count.max(2)),
            ratio: self.ratio,
            extra_checkpoints: extra,
            burn_in: self.burn_in,
        }
    }
}

fn clone_fields(file: &FileConfig) -> FileConfig {
    FileConfig {
        system: file.system.clone(),
        system_name: file.system_name.clone(),
        alpha: file.alpha,
        pair: file.pair.clone(),
        horizon: file.horizon,
        seed: file.seed,
        out_dir: file.out_dir.clone(),
        burn_in: file.burn_in,
        ratio: file.ratio,
        grid_min: file.grid_min,
        grid_max: file.grid_max,
        grid_count: file.grid_count,
        thresholds: file.thresholds.clone(),
        family: file.family,
        flag: file.flag.clone(),
        harness: file.harness.clone(),
        n: file.n,
        pairs: file.pairs,
    }
}

pub fn kind_by_name(name: &str, alpha: Option<f64>) -> CliResult<SystemKind> {
    Ok(match name {
        "tent" => SystemKind::Tent,
        "logistic4" => SystemKind::Logistic4,
        "rotation" => SystemKind::Rotation {
            alpha: alpha.unwrap_or(GOLDEN_ALPHA),
        },
        "shift2" => SystemKind::Shift2,
        "example1" => SystemKind::Example1,
        "identity" => SystemKind::Identity,
        other => {
            return Err(CliError::Config(format!(
                "field `system`: unknown kind `{other}` (see `chaoskit systems list`)"
            )))
        }
    })
}

fn parse_point(system: &chaoskit::System64, token: &str) -> CliResult<Point<f64>> {
    if let Some(bits) = token.strip_prefix("fam:") {
        let pattern: Vec<u8> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(CliError::Config(format!(
                    "field `pair`: family pattern symbol `{other}` is not 0/1"
                ))),
            })
            .collect::<CliResult<_>>()?;
        return Ok(system.family_point(&pattern)?);
    }
    if system.name().contains("shift2") {
        return Ok(system.shift_point(token)?);
    }
    let x: f64 = token
        .parse()
        .map_err(|_| CliError::Config(format!("field `pair`: `{token}` is not a number")))?;
    Ok(system.point_from_real(x)?)
}
