//! Distance profiles of orbit pairs and empirical lower/upper distribution
//! functions, including the sequence-restricted variants.
//!
//! The limits `liminf`/`limsup` behind the lower and upper distribution
//! functions are not computable at a finite horizon; they are surrogated by
//! the min and max of the empirical density over a checkpoint schedule. The
//! comparison against the scale `t` is strict (`d < t`) everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::sig9;
use crate::real::{r, r_count, Real};
use crate::systems::{Point, System};

/// The finite sequence `d(f^i x, f^i y)`, possibly subsampled along a
/// sequence of iterate indices.
#[derive(Debug, Clone)]
pub struct DistanceProfile<R> {
    pub values: Vec<R>,
    /// Pair identifier, stable across runs.
    pub source: String,
    /// Identifier of the subsampling sequence, when one was applied.
    pub sequence: Option<String>,
    /// Set when explicit subsample indices past the profile end were dropped.
    pub truncated: bool,
}

impl<R: Real> DistanceProfile<R> {
    pub fn from_values(values: Vec<R>, source: impl Into<String>) -> Self {
        DistanceProfile {
            values,
            source: source.into(),
            sequence: None,
            truncated: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Compute the profile of an orbit pair over `0 <= i < horizon`; index 0 is
/// the un-iterated pair.
pub fn distance_profile<R: Real>(
    system: &System<R>,
    x: &Point<R>,
    y: &Point<R>,
    horizon: u64,
) -> Result<DistanceProfile<R>> {
    let values = system.orbit_distances(x, y, horizon)?;
    Ok(DistanceProfile {
        values,
        source: format!("{}|{}|{}", system.name(), x.label(), y.label()),
        sequence: None,
        truncated: false,
    })
}

/// A strictly increasing sequence of iterate indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    /// `q_i = start + step * i`.
    Arith {
        step: u64,
        #[serde(default)]
        start: u64,
    },
    /// An explicit index list.
    Explicit { indices: Vec<u64> },
    /// A witness built by the classifier, with the run boundaries that
    /// certify it (prefix lengths at which the alternation phases end).
    Witness { indices: Vec<u64>, run_ends: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    #[serde(flatten)]
    pub kind: SequenceKind,
    /// Bound `M` with `q_{i+1} - q_i <= M`, when the sequence has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap_bound: Option<u64>,
}

impl SequenceSpec {
    pub fn arith(step: u64, start: u64) -> Self {
        SequenceSpec {
            kind: SequenceKind::Arith { step, start },
            gap_bound: Some(step.max(1)),
        }
    }

    /// The identity sequence 0, 1, 2, …
    pub fn identity() -> Self {
        Self::arith(1, 0)
    }

    pub fn explicit(indices: Vec<u64>) -> Self {
        SequenceSpec {
            kind: SequenceKind::Explicit { indices },
            gap_bound: None,
        }
    }

    pub fn witness(indices: Vec<u64>, run_ends: Vec<u64>) -> Self {
        SequenceSpec {
            kind: SequenceKind::Witness { indices, run_ends },
            gap_bound: None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            SequenceKind::Arith { step, start } => format!("arith(step={step},start={start})"),
            SequenceKind::Explicit { indices } => format!("explicit(len={})", indices.len()),
            SequenceKind::Witness { indices, run_ends } => {
                format!("witness(len={},runs={})", indices.len(), run_ends.len())
            }
        }
    }

    /// Indices strictly below `below`, plus a flag marking whether explicit
    /// entries had to be dropped (truncation).
    pub fn materialize(&self, below: u64) -> Result<(Vec<u64>, bool)> {
        match &self.kind {
            SequenceKind::Arith { step, start } => {
                if *step == 0 {
                    return Err(Error::Argument("arith sequence step must be >= 1".into()));
                }
                let mut out = Vec::new();
                let mut q = *start;
                while q < below {
                    out.push(q);
                    q = match q.checked_add(*step) {
                        Some(v) => v,
                        None => break,
                    };
                }
                Ok((out, false))
            }
            SequenceKind::Explicit { indices } | SequenceKind::Witness { indices, .. } => {
                if indices.is_empty() {
                    return Err(Error::Argument("sequence has no indices".into()));
                }
                if !indices.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Argument(
                        "sequence indices must be strictly increasing".into(),
                    ));
                }
                let kept: Vec<u64> = indices.iter().copied().filter(|&q| q < below).collect();
                let truncated = kept.len() < indices.len();
                Ok((kept, truncated))
            }
        }
    }

    /// Check the declared gap bound on a materialized prefix.
    pub fn verify_gap_bound(&self, materialized: &[u64]) -> Result<u64> {
        let m = self.gap_bound.ok_or_else(|| {
            Error::Argument("sequence has no gap bound, but one is required".into())
        })?;
        for w in materialized.windows(2) {
            if w[1] - w[0] > m {
                return Err(Error::Argument(format!(
                    "sequence gap {} at q={} exceeds the declared bound {m}",
                    w[1] - w[0],
                    w[0]
                )));
            }
        }
        Ok(m)
    }
}

/// Largest gap `q_{i+1} - q_i` over a materialized prefix.
pub fn max_gap(materialized: &[u64]) -> Option<u64> {
    materialized.windows(2).map(|w| w[1] - w[0]).max()
}

/// Restrict a profile to the entries indexed by `q`.
pub fn subsample_profile<R: Real>(
    profile: &DistanceProfile<R>,
    q: &SequenceSpec,
) -> Result<DistanceProfile<R>> {
    let (idx, truncated) = q.materialize(profile.len() as u64)?;
    if idx.is_empty() {
        return Err(Error::Argument(format!(
            "subsampling {} leaves an empty profile",
            q.describe()
        )));
    }
    Ok(DistanceProfile {
        values: idx.iter().map(|&i| profile.values[i as usize]).collect(),
        source: profile.source.clone(),
        sequence: Some(q.describe()),
        truncated,
    })
}

/// The empirical density `(1/n) #{ i < n : d_i < t }`.
pub fn empirical_density<R: Real>(profile: &DistanceProfile<R>, t: R, n: u64) -> Result<R> {
    if n == 0 {
        return Err(Error::Argument("density prefix length n must be >= 1".into()));
    }
    if n as usize > profile.len() {
        return Err(Error::Argument(format!(
            "density prefix {n} exceeds the profile length {}",
            profile.len()
        )));
    }
    if t <= R::zero() {
        return Err(Error::Argument("scale t must be positive".into()));
    }
    let count = profile.values[..n as usize]
        .iter()
        .filter(|&&v| v < t)
        .count() as u64;
    Ok(r_count::<R>(count) / r_count::<R>(n))
}

/// Sequence-restricted density `(1/n) #{ i < n : d(f^{q_i}) < t }`, evaluated
/// directly on the unrestricted profile.
pub fn density_along<R: Real>(
    profile: &DistanceProfile<R>,
    q_indices: &[u64],
    t: R,
    n: u64,
) -> Result<R> {
    if n == 0 {
        return Err(Error::Argument("density prefix length n must be >= 1".into()));
    }
    if n as usize > q_indices.len() {
        return Err(Error::Argument(format!(
            "density prefix {n} exceeds the materialized sequence length {}",
            q_indices.len()
        )));
    }
    let count = q_indices[..n as usize]
        .iter()
        .filter(|&&qi| {
            profile
                .values
                .get(qi as usize)
                .map(|&v| v < t)
                .unwrap_or(false)
        })
        .count() as u64;
    Ok(r_count::<R>(count) / r_count::<R>(n))
}

/// How checkpoint prefix lengths are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum CheckpointPolicy {
    /// `n_{k+1} = ceil(ratio * n_k)`, capped by and always including the horizon.
    Geometric { ratio: f64 },
    /// Explicit prefix lengths (block boundaries), filtered to range.
    BlockBoundaries { boundaries: Vec<u64> },
}

impl Default for CheckpointPolicy {
    fn default() -> Self {
        CheckpointPolicy::Geometric { ratio: 1.25 }
    }
}

/// Strictly increasing checkpoint values in `(burn_in, horizon]`.
pub fn checkpoint_schedule(
    horizon: u64,
    burn_in: u64,
    policy: &CheckpointPolicy,
) -> Result<Vec<u64>> {
    if horizon < 1 {
        return Err(Error::Argument("horizon must be >= 1".into()));
    }
    if burn_in >= horizon {
        return Err(Error::Argument(format!(
            "burn_in {burn_in} must be below the horizon {horizon}"
        )));
    }
    match policy {
        CheckpointPolicy::Geometric { ratio } => {
            if !ratio.is_finite() || *ratio <= 1.0 {
                return Err(Error::Argument(format!(
                    "geometric checkpoint ratio {ratio} must exceed 1"
                )));
            }
            let mut out = Vec::new();
            let mut n = burn_in + 1;
            while n < horizon {
                out.push(n);
                let next = ((n as f64) * ratio).ceil() as u64;
                n = next.max(n + 1);
            }
            out.push(horizon);
            Ok(out)
        }
        CheckpointPolicy::BlockBoundaries { boundaries } => {
            let mut out: Vec<u64> = boundaries
                .iter()
                .copied()
                .filter(|&v| v > burn_in && v <= horizon)
                .collect();
            out.sort_unstable();
            out.dedup();
            if out.is_empty() {
                return Err(Error::Argument(
                    "checkpoint schedule is empty after range filtering".into(),
                ));
            }
            Ok(out)
        }
    }
}

/// Union of two schedules.
pub fn merge_checkpoints(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().chain(b.iter()).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Keep only values usable as checkpoints for the given window.
pub fn clip_checkpoints(values: &[u64], burn_in: u64, horizon: u64) -> Vec<u64> {
    values
        .iter()
        .copied()
        .filter(|&v| v > burn_in && v <= horizon)
        .collect()
}

/// Per-scale lower/upper empirical density estimates over a checkpoint set.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionEstimate<R> {
    pub t_grid: Vec<R>,
    pub lower: Vec<R>,
    pub upper: Vec<R>,
    pub checkpoints: Vec<u64>,
    pub burn_in: u64,
}

/// `counts[c][j] = #{ i < checkpoints[c] : values[i] < t_grid[j] }`, one pass.
pub(crate) fn density_counts<R: Real>(
    values: &[R],
    t_grid: &[R],
    checkpoints: &[u64],
) -> Vec<Vec<u64>> {
    let g = t_grid.len();
    // acc[b] counts values whose smallest exceeding grid index is b.
    let mut acc = vec![0u64; g + 1];
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut cp_iter = checkpoints.iter().peekable();
    for (i, &v) in values.iter().enumerate() {
        while let Some(&&cp) = cp_iter.peek() {
            if cp as usize == i {
                out.push(prefix_counts(&acc, g));
                cp_iter.next();
            } else {
                break;
            }
        }
        let b = t_grid.partition_point(|&t| t <= v);
        acc[b] += 1;
    }
    for _ in cp_iter {
        out.push(prefix_counts(&acc, g));
    }
    out
}

fn prefix_counts(acc: &[u64], g: usize) -> Vec<u64> {
    let mut row = Vec::with_capacity(g);
    let mut sum = 0u64;
    for &a in acc.iter().take(g) {
        sum += a;
        row.push(sum);
    }
    row
}

/// Lower = min and upper = max of the empirical density over the checkpoints,
/// per grid scale. Monotone in `t` by construction.
pub fn distribution_estimate<R: Real>(
    profile: &DistanceProfile<R>,
    t_grid: &[R],
    checkpoints: &[u64],
    burn_in: u64,
) -> Result<DistributionEstimate<R>> {
    if t_grid.is_empty() {
        return Err(Error::Argument("t grid is empty".into()));
    }
    if !t_grid.windows(2).all(|w| w[0] < w[1]) || t_grid[0] <= R::zero() {
        return Err(Error::Argument(
            "t grid must be strictly increasing and positive".into(),
        ));
    }
    if checkpoints.is_empty() {
        return Err(Error::Argument("checkpoint set is empty".into()));
    }
    let len = profile.len() as u64;
    if !checkpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Argument(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    if checkpoints[0] <= burn_in || *checkpoints.last().unwrap() > len {
        return Err(Error::Argument(format!(
            "checkpoints must lie in ({burn_in}, {len}]"
        )));
    }
    let counts = density_counts(&profile.values, t_grid, checkpoints);
    let g = t_grid.len();
    let mut lower = vec![R::infinity(); g];
    let mut upper = vec![R::neg_infinity(); g];
    for (c, row) in counts.iter().enumerate() {
        let n = r_count::<R>(checkpoints[c]);
        for j in 0..g {
            let d = r_count::<R>(row[j]) / n;
            if d < lower[j] {
                lower[j] = d;
            }
            if d > upper[j] {
                upper[j] = d;
            }
        }
    }
    Ok(DistributionEstimate {
        t_grid: t_grid.to_vec(),
        lower,
        upper,
        checkpoints: checkpoints.to_vec(),
        burn_in,
    })
}

impl<R: Real> DistributionEstimate<R> {
    /// CSV with header `t,F_lower,F_upper`, nine significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,F_lower,F_upper\n");
        for j in 0..self.t_grid.len() {
            out.push_str(&format!(
                "{},{},{}\n",
                sig9(self.t_grid[j].to_f64().unwrap()),
                sig9(self.lower[j].to_f64().unwrap()),
                sig9(self.upper[j].to_f64().unwrap()),
            ));
        }
        out
    }
}

/// Logarithmically spaced grid from `min` to `max` inclusive.
pub fn log_grid<R: Real>(min: f64, max: f64, count: usize) -> Vec<R> {
    assert!(count >= 2 && min > 0.0 && max > min, "degenerate grid spec");
    let (lo, hi) = (min.log10(), max.log10());
    let mut out: Vec<R> = (0..count)
        .map(|j| r(10f64.powf(lo + (hi - lo) * j as f64 / (count - 1) as f64)))
        .collect();
    out[0] = r(min);
    *out.last_mut().unwrap() = r(max);
    out
}

/// The default scale grid: 32 log-spaced values from 1e-4 to 1.
pub fn default_t_grid<R: Real>() -> Vec<R> {
    log_grid(1e-4, 1.0, 32)
}

/// Shared knobs for building estimates of orbit pairs.
#[derive(Debug, Clone)]
pub struct EstimateConfig<R> {
    pub t_grid: Vec<R>,
    /// Geometric ratio of the checkpoint schedule.
    pub ratio: f64,
    /// Block boundaries or other structural prefix lengths to merge in.
    pub extra_checkpoints: Vec<u64>,
    pub burn_in: u64,
}

impl<R: Real> Default for EstimateConfig<R> {
    fn default() -> Self {
        EstimateConfig {
            t_grid: default_t_grid(),
            ratio: 1.25,
            extra_checkpoints: Vec::new(),
            burn_in: 0,
        }
    }
}

impl<R: Real> EstimateConfig<R> {
    pub fn with_t_grid(mut self, t_grid: Vec<R>) -> Self {
        self.t_grid = t_grid;
        self
    }

    pub fn with_extra_checkpoints(mut self, extra: Vec<u64>) -> Self {
        self.extra_checkpoints = extra;
        self
    }

    pub fn with_burn_in(mut self, burn_in: u64) -> Self {
        self.burn_in = burn_in;
        self
    }

    /// Geometric schedule merged with the registered boundaries.
    pub fn checkpoints_for(&self, horizon: u64) -> Result<Vec<u64>> {
        let geo = checkpoint_schedule(
            horizon,
            self.burn_in,
            &CheckpointPolicy::Geometric { ratio: self.ratio },
        )?;
        let extra: Vec<u64> = self
            .extra_checkpoints
            .iter()
            .copied()
            .filter(|&v| v > self.burn_in && v <= horizon)
            .collect();
        Ok(merge_checkpoints(&geo, &extra))
    }
}

/// Profile + estimate for an orbit pair, registering the system's natural
/// block boundaries as checkpoints.
pub fn estimate_pair<R: Real>(
    system: &System<R>,
    x: &Point<R>,
    y: &Point<R>,
    horizon: u64,
    cfg: &EstimateConfig<R>,
) -> Result<(DistanceProfile<R>, DistributionEstimate<R>)> {
    let profile = distance_profile(system, x, y, horizon)?;
    let mut cps = cfg.checkpoints_for(horizon)?;
    cps = merge_checkpoints(
        &cps,
        &clip_checkpoints(&system.natural_checkpoints(horizon), cfg.burn_in, horizon),
    );
    let est = distribution_estimate(&profile, &cfg.t_grid, &cps, cfg.burn_in)?;
    Ok((profile, est))
}
