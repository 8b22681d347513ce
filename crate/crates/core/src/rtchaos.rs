//! Finite-sample estimators for the two ingredients of Ruelle-Takens-style
//! chaos: sensitivity to initial conditions and point-transitivity.
//!
//! Both quantifiers are sampled, never proved: the neighbourhood quantifier
//! of sensitivity by a fixed number of perturbations per radius, the
//! dense-orbit quantifier of transitivity by a fixed number of starts. All
//! samples are pre-generated from the seed (per base point and radius), so a
//! run is reproducible no matter how the work is distributed.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::{r, Real};
use crate::systems::{Point, System, ROT_DEN, TENT_DEN};

/// Parameters for the combined verdict.
#[derive(Debug, Clone, Serialize)]
pub struct RtParams<R> {
    /// Perturbation radii, strictly decreasing.
    pub radii: Vec<R>,
    pub samples_per_radius: usize,
    pub base_points: usize,
    /// Candidate separation constants, tried largest first.
    pub delta_ladder: Vec<R>,
    /// Steps given to each perturbed orbit to separate.
    pub sensitivity_horizon: u64,
    pub grid_eps: R,
    /// Steps given to each start to visit every cell.
    pub transitivity_horizon: u64,
    pub start_samples: usize,
    pub seed: u64,
}

impl<R: Real> Default for RtParams<R> {
    fn default() -> Self {
        RtParams {
            radii: vec![r(1e-2), r(1e-3), r(1e-4), r(1e-5), r(1e-6)],
            samples_per_radius: 64,
            base_points: 8,
            delta_ladder: vec![r(0.5), r(0.25), r(0.1), r(0.05), r(0.01)],
            sensitivity_horizon: 256,
            grid_eps: r(0.01),
            transitivity_horizon: 100_000,
            start_samples: 64,
            seed: 42,
        }
    }
}

/// Estimates, visitation counts and the parameters that produced them.
#[derive(Debug, Clone, Serialize)]
pub struct RTReport<R> {
    pub sensitivity_constant_estimate: R,
    pub transitive: bool,
    pub cells_visited: u64,
    pub cells_total: u64,
    pub rt_chaotic: bool,
    pub params: RtParams<R>,
}

fn perturbation_rng(seed: u64, base_idx: usize, radius_idx: usize) -> StdRng {
    StdRng::seed_from_u64(
        seed ^ ((base_idx as u64 + 1) << 40) ^ ((radius_idx as u64 + 1) << 20),
    )
}

/// A point within distance `radius` of `base`.
fn sample_near<R: Real, T: Rng + ?Sized>(
    system: &System<R>,
    base: &Point<R>,
    radius: R,
    rng: &mut T,
) -> Point<R> {
    let rf = radius.to_f64().unwrap();
    match base {
        Point::TentLattice(num) => {
            let span = (rf * TENT_DEN as f64).floor() as u64;
            if span == 0 {
                return base.clone();
            }
            let lo = num.saturating_sub(span);
            let hi = (num + span).min(TENT_DEN);
            Point::TentLattice(rng.random_range(lo..=hi))
        }
        Point::RotLattice(num) => {
            let span = (rf * ROT_DEN as f64).floor() as u64;
            if span == 0 {
                return base.clone();
            }
            let delta = rng.random_range(0..=2 * span);
            Point::RotLattice((num + ROT_DEN + delta - span) % ROT_DEN)
        }
        Point::Real(x) => {
            let xf = x.to_f64().unwrap();
            let y = (xf + rng.random_range(-rf..=rf)).clamp(0.0, 1.0);
            Point::Real(r(y))
        }
        Point::Shift(w) => {
            // Agreeing on the first `depth` symbols keeps the distance <= r.
            let depth = (1.0 / rf).log2().ceil().max(0.0) as usize;
            let len = w.remaining();
            let mut symbols = Vec::with_capacity(len);
            for i in 0..len {
                if i < depth {
                    symbols.push(w.symbol(i).unwrap() as u8);
                } else {
                    symbols.push(rng.random_range(0..=1u8));
                }
            }
            Point::Shift(crate::systems::shift::ShiftWord::from_symbols(&symbols).unwrap())
        }
        Point::Halfline { offset, .. } => {
            // The metric value between same-offset points is fixed by the
            // block class, so the ball either contains every seed or only
            // the base itself.
            let class = system
                .distance(
                    base,
                    &Point::Halfline {
                        seed: r(0.123456789),
                        offset: *offset,
                    },
                )
                .unwrap_or_else(|_| R::one());
            if class <= radius {
                let seed = loop {
                    let s = rng.random::<f64>();
                    if s > 0.0 && s < 1.0 {
                        break s;
                    }
                };
                Point::Halfline {
                    seed: r(seed),
                    offset: *offset,
                }
            } else {
                base.clone()
            }
        }
    }
}

/// Largest ladder constant `delta` such that for every base point and every
/// radius, some sampled perturbation separates from the base orbit by at
/// least `delta` within the horizon. Returns 0 when no candidate survives.
pub fn sensitivity_estimate<R: Real>(
    system: &System<R>,
    base_points: &[Point<R>],
    radii: &[R],
    horizon: u64,
    samples_per_radius: usize,
    delta_ladder: &[R],
    seed: u64,
) -> Result<R> {
    if base_points.is_empty() || radii.is_empty() || samples_per_radius == 0 {
        return Err(Error::Argument(
            "sensitivity estimation needs base points, radii and samples".into(),
        ));
    }
    if !radii.windows(2).all(|w| w[0] > w[1]) || *radii.last().unwrap() <= R::zero() {
        return Err(Error::Argument(
            "radii must be positive and strictly decreasing".into(),
        ));
    }
    if horizon > system.horizon_cap() {
        return Err(Error::HorizonExceeded {
            requested: horizon,
            cap: system.horizon_cap(),
        });
    }
    let ladder_max = delta_ladder
        .iter()
        .copied()
        .fold(R::zero(), |a, b| a.max(b));
    let mut min_sep = R::infinity();
    for (bi, base) in base_points.iter().enumerate() {
        for (ri, &radius) in radii.iter().enumerate() {
            let mut rng = perturbation_rng(seed, bi, ri);
            let perturbations: Vec<Point<R>> = (0..samples_per_radius)
                .map(|_| sample_near(system, base, radius, &mut rng))
                .collect();
            let mut best = R::zero();
            for p in &perturbations {
                let mut a = base.clone();
                let mut b = p.clone();
                for i in 0..horizon {
                    let d = system.distance(&a, &b)?;
                    if d > best {
                        best = d;
                    }
                    if best >= ladder_max || i + 1 == horizon {
                        break;
                    }
                    a = system.step(&a)?;
                    b = system.step(&b)?;
                }
                if best >= ladder_max {
                    break;
                }
            }
            if best < min_sep {
                min_sep = best;
            }
        }
    }
    Ok(delta_ladder
        .iter()
        .copied()
        .filter(|&d| d <= min_sep)
        .fold(R::zero(), |a, b| a.max(b)))
}

/// Index of the `grid_eps`-cell containing the point, plus the cell count.
fn cell_of<R: Real>(system: &System<R>, p: &Point<R>, eps: R) -> Result<(u64, u64)> {
    let ef = eps.to_f64().unwrap();
    match p {
        Point::Real(_) | Point::TentLattice(_) | Point::RotLattice(_) => {
            let cells = (1.0 / ef).ceil() as u64;
            let x = p.as_real().unwrap().to_f64().unwrap();
            Ok((((x / ef).floor() as u64).min(cells - 1), cells))
        }
        Point::Shift(w) => {
            let depth = (1.0 / ef).log2().ceil().max(1.0) as u32;
            if w.remaining() < depth as usize {
                return Err(Error::Argument(format!(
                    "shift prefix too short for cylinder depth {depth}"
                )));
            }
            let mut idx = 0u64;
            for i in 0..depth as usize {
                idx = (idx << 1) | w.symbol(i).unwrap() as u64;
            }
            Ok((idx, 1u64 << depth))
        }
        Point::Halfline { .. } => Err(Error::Unsupported {
            system: system.name().to_string(),
            message: "the half-line space is unbounded, transitivity cells are undefined".into(),
        }),
    }
}

/// Visitation outcome of the single-orbit density probe.
#[derive(Debug, Clone, Serialize)]
pub struct TransitivityOutcome {
    pub transitive: bool,
    pub cells_visited: u64,
    pub cells_total: u64,
}

/// Flag set iff some sampled start's orbit visits every `grid_eps`-cell of
/// the state-space partition within the horizon.
pub fn transitivity_probe<R: Real>(
    system: &System<R>,
    grid_eps: R,
    horizon: u64,
    start_samples: usize,
    seed: u64,
) -> Result<TransitivityOutcome> {
    if system.example1_blocks().is_some() {
        return Err(Error::Unsupported {
            system: system.name().to_string(),
            message: "the half-line space is unbounded, transitivity cells are undefined".into(),
        });
    }
    if grid_eps <= R::zero() || grid_eps >= R::one() {
        return Err(Error::Argument("grid_eps must lie in (0,1)".into()));
    }
    if start_samples == 0 {
        return Err(Error::Argument("at least one start is required".into()));
    }
    if horizon > system.horizon_cap() {
        return Err(Error::HorizonExceeded {
            requested: horizon,
            cap: system.horizon_cap(),
        });
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let depth_slack = 64u64;
    let starts: Vec<Point<R>> = (0..start_samples)
        .map(|_| system.sample_point(&mut rng, horizon + depth_slack))
        .collect();
    let mut best_visited = 0u64;
    let mut cells_total = 0u64;
    let mut transitive = false;
    for start in &starts {
        let (_, total) = cell_of(system, start, grid_eps)?;
        cells_total = total;
        let mut visited = vec![false; total as usize];
        let mut count = 0u64;
        let mut p = start.clone();
        for i in 0..horizon {
            let (idx, _) = cell_of(system, &p, grid_eps)?;
            if !visited[idx as usize] {
                visited[idx as usize] = true;
                count += 1;
                if count == total {
                    break;
                }
            }
            if i + 1 < horizon {
                p = system.step(&p)?;
            }
        }
        if count > best_visited {
            best_visited = count;
        }
        if count == total {
            transitive = true;
            break;
        }
    }
    Ok(TransitivityOutcome {
        transitive,
        cells_visited: best_visited,
        cells_total,
    })
}

/// Combined verdict: transitive and sensitivity constant above zero.
pub fn rt_verdict<R: Real>(system: &System<R>, params: &RtParams<R>) -> Result<RTReport<R>> {
    let mut rng = StdRng::seed_from_u64(params.seed);
    let bases: Vec<Point<R>> = (0..params.base_points)
        .map(|_| system.sample_point(&mut rng, params.sensitivity_horizon + 64))
        .collect();
    let sensitivity = sensitivity_estimate(
        system,
        &bases,
        &params.radii,
        params.sensitivity_horizon,
        params.samples_per_radius,
        &params.delta_ladder,
        params.seed,
    )?;
    let trans = transitivity_probe(
        system,
        params.grid_eps,
        params.transitivity_horizon,
        params.start_samples,
        params.seed,
    )?;
    Ok(RTReport {
        sensitivity_constant_estimate: sensitivity,
        transitive: trans.transitive,
        cells_visited: trans.cells_visited,
        cells_total: trans.cells_total,
        rt_chaotic: trans.transitive && sensitivity > R::zero(),
        params: params.clone(),
    })
}
