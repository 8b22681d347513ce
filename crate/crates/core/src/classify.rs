//! Finite-horizon chaos verdicts per orbit pair, the implication lattice
//! check, scrambled-family search, and witness-sequence construction.
//!
//! The exact conditions behind the verdicts (`F = 0`, `F* = 1`, `F* > 0`,
//! `F < F*` on a nondegenerate interval) are not decidable from finite data;
//! every flag is a tolerance surrogate, and the tolerances travel inside the
//! verdict so any flag is reproducible from the report alone. Flags that are
//! clear mean "not detected at this horizon and these thresholds", never a
//! certificate of absence.

use serde::{Deserialize, Serialize};

use crate::distfn::{
    checkpoint_schedule, distance_profile, estimate_pair, merge_checkpoints, subsample_profile,
    CheckpointPolicy, DistanceProfile, DistributionEstimate, EstimateConfig, SequenceKind,
    SequenceSpec,
};
use crate::error::{Error, Result};
use crate::real::{r, r_count, Real};
use crate::systems::{Point, System};

fn default_zero_tol<R: Real>() -> R {
    r(0.05)
}
fn default_one_tol<R: Real>() -> R {
    r(0.05)
}
fn default_gap_tol<R: Real>() -> R {
    r(0.1)
}
fn default_j_min_width() -> usize {
    3
}
fn default_proximal_tol<R: Real>() -> R {
    r(1e-3)
}
fn default_separation_tol<R: Real>() -> R {
    r(1e-1)
}

/// Tolerances that turn the exact 0/1 conditions into finite-data predicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: serde::Serialize",
    deserialize = "R: Real + serde::de::DeserializeOwned"
))]
pub struct Thresholds<R> {
    /// An estimate `<= zero_tol` counts as "0".
    #[serde(default = "default_zero_tol")]
    pub zero_tol: R,
    /// An estimate `>= 1 - one_tol` counts as "1".
    #[serde(default = "default_one_tol")]
    pub one_tol: R,
    /// Minimum upper-lower separation for DC3, and the "strictly positive" /
    /// "strictly below 1" margin in the DC2/DC2' surrogates.
    #[serde(default = "default_gap_tol")]
    pub gap_tol: R,
    /// Width (consecutive grid points) of the DC3 interval J.
    #[serde(default = "default_j_min_width")]
    pub j_min_width: usize,
    /// Proximality scale for the Li-Yorke surrogate.
    #[serde(default = "default_proximal_tol")]
    pub proximal_tol: R,
    /// Separation scale for the Li-Yorke surrogate.
    #[serde(default = "default_separation_tol")]
    pub separation_tol: R,
}

impl<R: Real> Default for Thresholds<R> {
    fn default() -> Self {
        Thresholds {
            zero_tol: default_zero_tol(),
            one_tol: default_one_tol(),
            gap_tol: default_gap_tol(),
            j_min_width: default_j_min_width(),
            proximal_tol: default_proximal_tol(),
            separation_tol: default_separation_tol(),
        }
    }
}

impl<R: Real> Thresholds<R> {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: R| -> Result<()> {
            if v <= R::zero() || v >= R::one() {
                return Err(Error::config(name, format!("{v} is outside (0,1)")));
            }
            Ok(())
        };
        unit("thresholds.zero_tol", self.zero_tol)?;
        unit("thresholds.one_tol", self.one_tol)?;
        unit("thresholds.gap_tol", self.gap_tol)?;
        unit("thresholds.proximal_tol", self.proximal_tol)?;
        unit("thresholds.separation_tol", self.separation_tol)?;
        if self.zero_tol + self.one_tol >= R::one() {
            return Err(Error::config(
                "thresholds.zero_tol",
                "zero_tol + one_tol must stay below 1",
            ));
        }
        if self.j_min_width < 1 {
            return Err(Error::config("thresholds.j_min_width", "must be >= 1"));
        }
        Ok(())
    }
}

/// A single DC-style flag with its witnessing scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlagEvidence<R> {
    pub set: bool,
    /// The smallest grid scale witnessing the "lower is small" clause.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<R>,
}

/// The DC3 flag with its interval J.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dc3Evidence<R> {
    pub set: bool,
    /// Scale interval over which upper - lower stays >= gap_tol.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<(R, R)>,
}

/// Li-Yorke surrogate evidence: tail extremes of the profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiYorkeEvidence<R> {
    pub set: bool,
    pub tail_min: R,
    pub tail_max: R,
    /// Proximality threshold actually applied (the configured value, raised
    /// to the grid floor when the grid cannot resolve finer scales).
    pub proximal_used: R,
}

/// Sequence-restricted flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SdcVerdict<R> {
    pub sdc1: FlagEvidence<R>,
    pub sdc2: FlagEvidence<R>,
    pub sdc3: Dc3Evidence<R>,
    pub sequence: String,
    pub sampled: u64,
}

/// Per-pair classification record.
#[derive(Debug, Clone, Serialize)]
pub struct ChaosVerdict<R> {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub liyorke: Option<LiYorkeEvidence<R>>,
    pub dc1: FlagEvidence<R>,
    pub dc2: FlagEvidence<R>,
    pub dc2prime: FlagEvidence<R>,
    pub dc3: Dc3Evidence<R>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sdc: Option<SdcVerdict<R>>,
    pub horizon: u64,
    pub thresholds: Thresholds<R>,
    pub notes: Vec<String>,
}

/// Selector for relation-based operations such as the scrambled search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChaosFlag {
    Dc1,
    Dc2,
    Dc2Prime,
    Dc3,
    LiYorke,
}

impl std::str::FromStr for ChaosFlag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dc1" => Ok(ChaosFlag::Dc1),
            "dc2" => Ok(ChaosFlag::Dc2),
            "dc2prime" | "dc2'" => Ok(ChaosFlag::Dc2Prime),
            "dc3" => Ok(ChaosFlag::Dc3),
            "liyorke" | "li-yorke" => Ok(ChaosFlag::LiYorke),
            other => Err(Error::config("flag", format!("unknown chaos flag `{other}`"))),
        }
    }
}

impl<R: Real> ChaosVerdict<R> {
    pub fn flag(&self, f: ChaosFlag) -> bool {
        match f {
            ChaosFlag::Dc1 => self.dc1.set,
            ChaosFlag::Dc2 => self.dc2.set,
            ChaosFlag::Dc2Prime => self.dc2prime.set,
            ChaosFlag::Dc3 => self.dc3.set,
            ChaosFlag::LiYorke => self.liyorke.as_ref().map(|l| l.set).unwrap_or(false),
        }
    }
}

/// Li-Yorke surrogate on a profile tail: proximal (min <= proximal_tol) and
/// separated (max >= separation_tol) after the burn-in.
pub fn liyorke_verdict<R: Real>(
    profile: &DistanceProfile<R>,
    th: &Thresholds<R>,
    burn_in: u64,
) -> LiYorkeEvidence<R> {
    liyorke_with(profile, th.proximal_tol, th.separation_tol, burn_in)
}

fn liyorke_with<R: Real>(
    profile: &DistanceProfile<R>,
    proximal: R,
    separation: R,
    burn_in: u64,
) -> LiYorkeEvidence<R> {
    let start = (burn_in as usize).min(profile.len().saturating_sub(1));
    let tail = &profile.values[start..];
    let mut min = R::infinity();
    let mut max = R::neg_infinity();
    for &v in tail {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    LiYorkeEvidence {
        set: min <= proximal && max >= separation,
        tail_min: min,
        tail_max: max,
        proximal_used: proximal,
    }
}

fn dc_flags<R: Real>(
    est: &DistributionEstimate<R>,
    th: &Thresholds<R>,
) -> (FlagEvidence<R>, FlagEvidence<R>, FlagEvidence<R>, Dc3Evidence<R>) {
    let first_lower_le = |bound: R| -> Option<R> {
        est.t_grid
            .iter()
            .zip(&est.lower)
            .find(|(_, &l)| l <= bound)
            .map(|(&t, _)| t)
    };
    let all_upper_ge = |bound: R| est.upper.iter().all(|&u| u >= bound);

    let one_high = all_upper_ge(R::one() - th.one_tol);
    let pos_high = all_upper_ge(th.gap_tol);

    let dc1_eps = first_lower_le(th.zero_tol);
    let dc1 = FlagEvidence {
        set: dc1_eps.is_some() && one_high,
        eps: if one_high { dc1_eps } else { None },
    };
    let dc2_eps = first_lower_le(R::one() - th.gap_tol);
    let dc2 = FlagEvidence {
        set: dc2_eps.is_some() && one_high,
        eps: if one_high { dc2_eps } else { None },
    };
    let dc2p_eps = first_lower_le(th.zero_tol);
    let dc2prime = FlagEvidence {
        set: dc2p_eps.is_some() && pos_high,
        eps: if pos_high { dc2p_eps } else { None },
    };

    // Longest contiguous grid run with upper - lower >= gap_tol.
    let mut best: Option<(usize, usize)> = None;
    let mut run_start: Option<usize> = None;
    for j in 0..=est.t_grid.len() {
        let open = j < est.t_grid.len() && est.upper[j] - est.lower[j] >= th.gap_tol;
        match (open, run_start) {
            (true, None) => run_start = Some(j),
            (false, Some(s)) => {
                if best.map(|(a, b)| b - a).unwrap_or(0) < j - s {
                    best = Some((s, j));
                }
                run_start = None;
            }
            _ => {}
        }
    }
    let dc3 = match best {
        Some((s, e)) if e - s >= th.j_min_width => Dc3Evidence {
            set: true,
            interval: Some((est.t_grid[s], est.t_grid[e - 1])),
        },
        _ => Dc3Evidence {
            set: false,
            interval: None,
        },
    };
    (dc1, dc2, dc2prime, dc3)
}

/// DC flags from a distribution estimate. Li-Yorke and SDC fields are left
/// unevaluated.
pub fn dc_verdict<R: Real>(
    est: &DistributionEstimate<R>,
    th: &Thresholds<R>,
    horizon: u64,
) -> Result<ChaosVerdict<R>> {
    th.validate()?;
    let (dc1, dc2, dc2prime, dc3) = dc_flags(est, th);
    Ok(ChaosVerdict {
        liyorke: None,
        dc1,
        dc2,
        dc2prime,
        dc3,
        sdc: None,
        horizon,
        thresholds: th.clone(),
        notes: standard_notes(&est.t_grid),
    })
}

fn standard_notes<R: Real>(t_grid: &[R]) -> Vec<String> {
    vec![
        "lower/upper are the min/max of empirical densities over the checkpoint set".into(),
        format!(
            "'for all t > 0' is checked over the finite grid; effective resolution {}",
            t_grid.first().copied().unwrap_or_else(R::zero)
        ),
        "DC2 reads 'lower < 1 at some scale' as lower <= 1 - gap_tol".into(),
    ]
}

/// SDC flags for a pair along a sequence, from the already-computed profile.
/// Boundaries in original index space are pushed forward into the subsample.
pub fn sdc_verdict_on_profile<R: Real>(
    profile: &DistanceProfile<R>,
    q: &SequenceSpec,
    th: &Thresholds<R>,
    cfg: &EstimateConfig<R>,
    natural: &[u64],
) -> Result<SdcVerdict<R>> {
    th.validate()?;
    let (idx, _) = q.materialize(profile.len() as u64)?;
    if idx.len() < 16 {
        return Err(Error::InsufficientData(format!(
            "sequence {} yields {} sampled indices below the horizon; at least 16 are required",
            q.describe(),
            idx.len()
        )));
    }
    let sub = subsample_profile(profile, q)?;
    let sub_len = sub.len() as u64;
    let burn = cfg.burn_in.min(sub_len - 1);
    let geo = checkpoint_schedule(sub_len, burn, &CheckpointPolicy::Geometric { ratio: cfg.ratio })?;
    let mut extra: Vec<u64> = cfg
        .extra_checkpoints
        .iter()
        .chain(natural.iter())
        .map(|&b| idx.partition_point(|&qi| qi < b) as u64)
        .filter(|&n| n > burn && n <= sub_len)
        .collect();
    if let SequenceKind::Witness { run_ends, .. } = &q.kind {
        extra.extend(run_ends.iter().copied().filter(|&n| n > burn && n <= sub_len));
    }
    let cps = merge_checkpoints(&geo, &{
        extra.sort_unstable();
        extra.dedup();
        extra
    });
    let est = crate::distfn::distribution_estimate(&sub, &cfg.t_grid, &cps, burn)?;
    let (dc1, dc2, _dc2p, dc3) = dc_flags(&est, th);
    Ok(SdcVerdict {
        sdc1: dc1,
        sdc2: dc2,
        sdc3: dc3,
        sequence: q.describe(),
        sampled: idx.len() as u64,
    })
}

/// SDC flags for a pair along a sequence, computing the profile first.
pub fn sdc_verdict<R: Real>(
    system: &System<R>,
    x: &Point<R>,
    y: &Point<R>,
    q: &SequenceSpec,
    horizon: u64,
    th: &Thresholds<R>,
    cfg: &EstimateConfig<R>,
) -> Result<SdcVerdict<R>> {
    let profile = distance_profile(system, x, y, horizon)?;
    sdc_verdict_on_profile(&profile, q, th, cfg, &system.natural_checkpoints(horizon))
}

/// Full verdict for an orbit pair: DC flags, Li-Yorke, and optionally SDC
/// along a sequence.
///
/// The Li-Yorke proximality threshold is raised to the grid floor when the
/// grid cannot resolve scales below it, so that a pair registering positive
/// upper density at every resolvable scale is also counted proximal at the
/// resolution the verdict actually uses.
pub fn classify_pair<R: Real>(
    system: &System<R>,
    x: &Point<R>,
    y: &Point<R>,
    horizon: u64,
    th: &Thresholds<R>,
    cfg: &EstimateConfig<R>,
    sdc_seq: Option<&SequenceSpec>,
) -> Result<ChaosVerdict<R>> {
    th.validate()?;
    let (profile, est) = estimate_pair(system, x, y, horizon, cfg)?;
    let (dc1, dc2, dc2prime, dc3) = dc_flags(&est, th);
    let grid_floor = cfg.t_grid.first().copied().unwrap_or_else(R::zero);
    let proximal = th.proximal_tol.max(grid_floor);
    let liyorke = liyorke_with(&profile, proximal, th.separation_tol, cfg.burn_in);
    let sdc = match sdc_seq {
        Some(q) => Some(sdc_verdict_on_profile(
            &profile,
            q,
            th,
            cfg,
            &system.natural_checkpoints(horizon),
        )?),
        None => None,
    };
    Ok(ChaosVerdict {
        liyorke: Some(liyorke),
        dc1,
        dc2,
        dc2prime,
        dc3,
        sdc,
        horizon,
        thresholds: th.clone(),
        notes: standard_notes(&cfg.t_grid),
    })
}

/// Check the implication lattice on a verdict. An empty list means the
/// verdict is consistent; any entry is a bug in classification logic.
pub fn consistency_check<R: Real>(v: &ChaosVerdict<R>) -> Vec<String> {
    let mut out = Vec::new();
    if v.dc1.set && !v.dc2.set {
        out.push("(a) DC1 implies DC2".to_string());
    }
    if v.dc1.set && !v.dc2prime.set {
        out.push("(a) DC1 implies DC2'".to_string());
    }
    if v.dc2.set && !v.dc3.set {
        out.push("(b) DC2 implies DC3".to_string());
    }
    if v.dc2prime.set && !v.dc3.set {
        out.push("(b) DC2' implies DC3".to_string());
    }
    if let Some(sdc) = &v.sdc {
        if v.dc1.set && !sdc.sdc1.set {
            out.push("(a) DC1 implies SDC".to_string());
        }
        if sdc.sdc1.set && !sdc.sdc2.set {
            out.push("(d) SDC1 implies SDC2".to_string());
        }
        if sdc.sdc2.set && !sdc.sdc3.set {
            out.push("(d) SDC2 implies SDC3".to_string());
        }
    }
    if let Some(ly) = &v.liyorke {
        for (name, set) in [
            ("DC1", v.dc1.set),
            ("DC2", v.dc2.set),
            ("DC2'", v.dc2prime.set),
            ("SDC1", v.sdc.as_ref().map(|s| s.sdc1.set).unwrap_or(false)),
        ] {
            if set && !ly.set {
                out.push(format!("(c) {name} implies Li-Yorke"));
            }
        }
    }
    out
}

/// Result of a greedy scrambled-subset search.
#[derive(Debug, Clone, Serialize)]
pub struct SearchReport<R> {
    pub flag: ChaosFlag,
    /// Indices into the candidate list forming the largest clique found.
    pub members: Vec<usize>,
    /// All pairwise relation values `(i, j, related)` for `i < j`.
    pub pairwise: Vec<(usize, usize, bool)>,
    /// Full verdicts behind the relation, in `pairwise` order.
    pub verdicts: Vec<ChaosVerdict<R>>,
}

/// Greedy maximal clique under the pairwise chaos-flag relation.
pub fn scrambled_search<R: Real>(
    system: &System<R>,
    candidates: &[Point<R>],
    horizon: u64,
    th: &Thresholds<R>,
    cfg: &EstimateConfig<R>,
    flag: ChaosFlag,
) -> Result<SearchReport<R>> {
    let n = candidates.len();
    if n < 2 {
        return Err(Error::Argument(
            "scrambled search needs at least 2 candidates".into(),
        ));
    }
    let mut rel = vec![vec![false; n]; n];
    let mut pairwise = Vec::with_capacity(n * (n - 1) / 2);
    let mut verdicts = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let verdict =
                classify_pair(system, &candidates[i], &candidates[j], horizon, th, cfg, None)?;
            let related = verdict.flag(flag);
            rel[i][j] = related;
            rel[j][i] = related;
            pairwise.push((i, j, related));
            verdicts.push(verdict);
        }
    }
    let mut best: Vec<usize> = vec![0];
    for start in 0..n {
        let mut clique = vec![start];
        for (v, row) in rel.iter().enumerate() {
            if v != start && clique.iter().all(|&u| row[u]) {
                clique.push(v);
            }
        }
        if clique.len() > best.len() {
            clique.sort_unstable();
            best = clique;
        }
    }
    Ok(SearchReport {
        flag,
        members: best,
        pairwise,
        verdicts,
    })
}

/// Why a witness-sequence construction stopped early.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessFailure {
    pub completed_runs: usize,
    pub reason: String,
}

impl std::fmt::Display for WitnessFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "witness construction stopped after {} runs: {}",
            self.completed_runs, self.reason
        )
    }
}

/// Build a strictly increasing sequence realizing the SDC1 surrogate from a
/// Li-Yorke profile: alternate runs from the proximal pool (distances at or
/// below proximal_tol) and the separated pool (at or above separation_tol),
/// each run long enough to push the running density strictly past
/// `1 - one_tol` and strictly below `zero_tol` in turn, for four runs.
pub fn witness_sequence<R: Real>(
    profile: &DistanceProfile<R>,
    th: &Thresholds<R>,
) -> std::result::Result<SequenceSpec, WitnessFailure> {
    let close: Vec<u64> = profile
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= th.proximal_tol)
        .map(|(i, _)| i as u64)
        .collect();
    let far: Vec<u64> = profile
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= th.separation_tol)
        .map(|(i, _)| i as u64)
        .collect();

    let mut indices: Vec<u64> = Vec::new();
    let mut run_ends: Vec<u64> = Vec::new();
    let mut close_count: u64 = 0;
    let mut close_ptr = 0usize;
    let mut far_ptr = 0usize;
    let high = R::one() - th.one_tol;

    for run in 0..4 {
        let want_close = run % 2 == 0;
        let mut taken = 0usize;
        loop {
            if taken > 0 {
                let density = r_count::<R>(close_count) / r_count::<R>(indices.len() as u64);
                if want_close && density > high {
                    break;
                }
                if !want_close && density < th.zero_tol {
                    break;
                }
            }
            let next_min = indices.last().map(|&i| i + 1).unwrap_or(0);
            let (pool, ptr) = if want_close {
                (&close, &mut close_ptr)
            } else {
                (&far, &mut far_ptr)
            };
            while *ptr < pool.len() && pool[*ptr] < next_min {
                *ptr += 1;
            }
            if *ptr >= pool.len() {
                return Err(WitnessFailure {
                    completed_runs: run,
                    reason: format!(
                        "the {} pool is exhausted before four alternations",
                        if want_close { "proximal" } else { "separated" }
                    ),
                });
            }
            indices.push(pool[*ptr]);
            *ptr += 1;
            if want_close {
                close_count += 1;
            }
            taken += 1;
        }
        run_ends.push(indices.len() as u64);
    }
    Ok(SequenceSpec::witness(indices, run_ends))
}

/// Re-verify a witness sequence on its own profile, at the witness's scale:
/// the grid floor is the proximality threshold the builder targeted.
pub fn verify_witness<R: Real>(
    profile: &DistanceProfile<R>,
    q: &SequenceSpec,
    th: &Thresholds<R>,
) -> Result<SdcVerdict<R>> {
    let tmin = th.proximal_tol.to_f64().unwrap();
    let grid = crate::distfn::log_grid::<R>(tmin, 1.0, 16);
    let cfg = EstimateConfig::default().with_t_grid(grid);
    sdc_verdict_on_profile(profile, q, th, &cfg, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distfn::distribution_estimate;
    use crate::systems::{make_system, SystemKind, SystemSpec, GOLDEN_ALPHA};

    fn profile_of(values: &[f64]) -> DistanceProfile<f64> {
        DistanceProfile::from_values(values.to_vec(), "test")
    }

    fn th() -> Thresholds<f64> {
        Thresholds::default()
    }

    #[test]
    fn default_thresholds_are_valid() {
        assert!(th().validate().is_ok());
        let mut bad = th();
        bad.zero_tol = 0.6;
        bad.one_tol = 0.5;
        assert!(bad.validate().is_err());
        let mut bad = th();
        bad.gap_tol = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn liyorke_surrogate_cases() {
        // All-zero: proximal but never separated.
        let v = liyorke_verdict(&profile_of(&[0.0; 32]), &th(), 0);
        assert!(!v.set);
        // Constant 0.3 (rotation pair): separated but never proximal.
        let v = liyorke_verdict(&profile_of(&[0.3; 32]), &th(), 0);
        assert!(!v.set);
        // Alternating near-0 / 1.
        let vals: Vec<f64> = (0..32).map(|i| if i % 2 == 0 { 1e-5 } else { 1.0 }).collect();
        let v = liyorke_verdict(&profile_of(&vals), &th(), 0);
        assert!(v.set);
        assert_eq!(v.tail_max, 1.0);
    }

    #[test]
    fn extreme_estimate_sets_all_dc_flags() {
        // lower = 0, upper = 1 across the grid.
        let mut vals = vec![0.0; 64];
        vals.extend(vec![1.0; 64 * 63]);
        let p = profile_of(&vals);
        let grid = crate::distfn::default_t_grid::<f64>();
        let est = distribution_estimate(&p, &grid, &[64, 4096], 0).unwrap();
        let v = dc_verdict(&est, &th(), 4096).unwrap();
        assert!(v.dc1.set && v.dc2.set && v.dc2prime.set && v.dc3.set);
        assert!(v.dc1.eps.is_some());
        assert!(v.dc3.interval.is_some());
    }

    #[test]
    fn degenerate_estimate_clears_all_dc_flags() {
        let p = profile_of(&[0.3; 256]);
        let grid = crate::distfn::default_t_grid::<f64>();
        let est = distribution_estimate(&p, &grid, &[1, 16, 256], 0).unwrap();
        let v = dc_verdict(&est, &th(), 256).unwrap();
        assert!(!v.dc1.set && !v.dc2.set && !v.dc2prime.set && !v.dc3.set);
    }

    #[test]
    fn consistency_catches_a_forged_violation() {
        let p = profile_of(&[0.3; 16]);
        let grid = crate::distfn::default_t_grid::<f64>();
        let est = distribution_estimate(&p, &grid, &[16], 0).unwrap();
        let mut v = dc_verdict(&est, &th(), 16).unwrap();
        assert!(consistency_check(&v).is_empty());
        v.dc1.set = true;
        let violations = consistency_check(&v);
        assert!(violations.contains(&"(a) DC1 implies DC2".to_string()));
    }

    #[test]
    fn rotation_pair_all_flags_clear() {
        let sys = make_system::<f64>(&SystemSpec::new(
            SystemKind::Rotation { alpha: GOLDEN_ALPHA },
            10_000,
        ))
        .unwrap();
        let x = sys.point_from_real(0.2).unwrap();
        let y = sys.point_from_real(0.6).unwrap();
        let v = classify_pair(
            &sys,
            &x,
            &y,
            4_000,
            &th(),
            &EstimateConfig::default(),
            Some(&SequenceSpec::identity()),
        )
        .unwrap();
        assert!(!v.dc1.set && !v.dc2.set && !v.dc2prime.set && !v.dc3.set);
        assert!(!v.liyorke.as_ref().unwrap().set);
        let sdc = v.sdc.as_ref().unwrap();
        assert!(!sdc.sdc1.set && !sdc.sdc2.set && !sdc.sdc3.set);
        assert!(consistency_check(&v).is_empty());
    }

    #[test]
    fn identity_subsample_reproduces_dc_flags() {
        let sys = make_system::<f64>(&SystemSpec::new(SystemKind::Tent, 10_000)).unwrap();
        let mut rng = <rand::rngs::StdRng as rand::SeedableRng>::seed_from_u64(17);
        let x = sys.sample_point(&mut rng, 2_000);
        let y = sys.sample_point(&mut rng, 2_000);
        let cfg = EstimateConfig::default();
        let v = classify_pair(&sys, &x, &y, 2_000, &th(), &cfg, Some(&SequenceSpec::identity()))
            .unwrap();
        let sdc = v.sdc.as_ref().unwrap();
        assert_eq!(v.dc1.set, sdc.sdc1.set);
        assert_eq!(v.dc2.set, sdc.sdc2.set);
        assert_eq!(v.dc3.set, sdc.sdc3.set);
    }

    #[test]
    fn sdc_needs_sixteen_samples() {
        let sys = make_system::<f64>(&SystemSpec::new(SystemKind::Tent, 10_000)).unwrap();
        let x = sys.point_from_real(0.2).unwrap();
        let y = sys.point_from_real(0.7).unwrap();
        let err = sdc_verdict(
            &sys,
            &x,
            &y,
            &SequenceSpec::arith(100, 0),
            1_000,
            &th(),
            &EstimateConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn witness_on_alternating_profile() {
        let vals: Vec<f64> = (0..20_000)
            .map(|i| if i % 2 == 0 { 0.0 } else { 1.0 })
            .collect();
        let p = profile_of(&vals);
        let q = witness_sequence(&p, &th()).expect("both pools are large");
        let (idx, _) = q.materialize(u64::MAX).unwrap();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        let sdc = verify_witness(&p, &q, &th()).unwrap();
        assert!(sdc.sdc1.set, "witness must certify SDC1 on re-verification");
    }

    #[test]
    fn witness_fails_on_constant_profiles() {
        // One pool empty each way.
        let err = witness_sequence(&profile_of(&[0.0; 512]), &th()).unwrap_err();
        assert_eq!(err.completed_runs, 1);
        let err = witness_sequence(&profile_of(&[0.3; 512]), &th()).unwrap_err();
        assert_eq!(err.completed_runs, 0);
    }

    #[test]
    fn search_on_equal_candidates_returns_a_singleton() {
        let sys = make_system::<f64>(&SystemSpec::new(SystemKind::Shift2, 2_000)).unwrap();
        let p = sys.family_point(&[1, 1, 1]).unwrap();
        let cands = vec![p.clone(), p.clone(), p];
        let report = scrambled_search(
            &sys,
            &cands,
            1_000,
            &th(),
            &EstimateConfig::default(),
            ChaosFlag::Dc1,
        )
        .unwrap();
        assert_eq!(report.members.len(), 1);
        assert!(report.pairwise.iter().all(|&(_, _, rel)| !rel));
    }

    #[test]
    fn rotation_candidates_never_clique() {
        let sys = make_system::<f64>(&SystemSpec::new(
            SystemKind::Rotation { alpha: GOLDEN_ALPHA },
            4_000,
        ))
        .unwrap();
        let cands: Vec<_> = [0.1, 0.3, 0.5, 0.9]
            .iter()
            .map(|&x| sys.point_from_real(x).unwrap())
            .collect();
        for flag in [ChaosFlag::Dc1, ChaosFlag::Dc2Prime, ChaosFlag::Dc3, ChaosFlag::LiYorke] {
            let report =
                scrambled_search(&sys, &cands, 2_000, &th(), &EstimateConfig::default(), flag)
                    .unwrap();
            assert_eq!(report.members.len(), 1, "flag {flag:?}");
        }
    }

    #[test]
    fn threshold_relaxation_only_turns_flags_on() {
        // Relaxation direction: zero_tol up, one_tol up, gap_tol down.
        let sys = make_system::<f64>(&SystemSpec::new(SystemKind::Shift2, 50_000)).unwrap();
        let x = sys.family_point(&[1, 1, 1, 1]).unwrap();
        let y = sys.family_point(&[0, 0, 0, 0]).unwrap();
        let cfg = EstimateConfig::default()
            .with_extra_checkpoints(crate::systems::shift::family_boundaries(40_000));
        let ladder = [
            (0.02, 0.02, 0.3),
            (0.05, 0.05, 0.2),
            (0.10, 0.10, 0.1),
            (0.25, 0.25, 0.05),
        ];
        let mut prev: Option<ChaosVerdict<f64>> = None;
        for (z, o, g) in ladder {
            let t = Thresholds {
                zero_tol: z,
                one_tol: o,
                gap_tol: g,
                ..Thresholds::default()
            };
            let v = classify_pair(&sys, &x, &y, 40_000, &t, &cfg, None).unwrap();
            if let Some(p) = &prev {
                for flag in [ChaosFlag::Dc1, ChaosFlag::Dc2, ChaosFlag::Dc2Prime, ChaosFlag::Dc3] {
                    assert!(
                        !p.flag(flag) || v.flag(flag),
                        "{flag:?} turned off under relaxation"
                    );
                }
            }
            prev = Some(v);
        }
    }
}
