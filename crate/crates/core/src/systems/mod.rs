//! The built-in dynamical systems: state spaces, maps, metrics, point
//! construction and sampling.
//!
//! Two of the systems are exact by construction and serve as trusted
//! fixtures: the 2-shift (integer symbol words) and the `example1` half-line
//! space (seed/offset pairs with exact block arithmetic). The tent map and
//! circle rotation run on fixed-point lattices so that orbits are exact too:
//! a plain floating-point tent orbit collapses onto 0 within ~55 steps once
//! doubling exhausts the mantissa, and rotation steps would drift by rounding.
//! Only `logistic4` iterates in floating point; its verdicts concern the
//! computed pseudo-orbit.

pub mod blocks;
pub mod shift;

use std::marker::PhantomData;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{r, Real};
use blocks::BlockTable;
use shift::ShiftWord;

/// Tent-map fixed-point denominator: 3^34. Doubling a numerator is exact in
/// u64 and the odd denominator keeps orbits off the dyadic points that decay
/// to 0; the doubling orbit modulo 3^34 has period 2 * 3^33.
pub const TENT_DEN: u64 = 16_677_181_699_666_569;

/// Rotation fixed-point denominator: 10^15.
pub const ROT_DEN: u64 = 1_000_000_000_000_000;

/// Default rotation angle (sqrt(5) - 1) / 2 truncated to 15 decimal digits,
/// stored exactly as a numerator over `ROT_DEN`.
pub const GOLDEN_ALPHA: f64 = 0.618_033_988_749_895;

fn default_alpha() -> f64 {
    GOLDEN_ALPHA
}

/// Which map to build. `Iterate` composes another kind with itself `n` times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemKind {
    Tent,
    Logistic4,
    Rotation {
        #[serde(default = "default_alpha")]
        alpha: f64,
    },
    Shift2,
    Example1,
    Identity,
    Iterate { base: Box<SystemKind>, n: u64 },
}

impl SystemKind {
    pub fn name(&self) -> String {
        match self {
            SystemKind::Tent => "tent".into(),
            SystemKind::Logistic4 => "logistic4".into(),
            SystemKind::Rotation { .. } => "rotation".into(),
            SystemKind::Shift2 => "shift2".into(),
            SystemKind::Example1 => "example1".into(),
            SystemKind::Identity => "identity".into(),
            SystemKind::Iterate { base, n } => format!("iterate({},{})", base.name(), n),
        }
    }
}

/// Declarative system description, expressible in the CLI config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    #[serde(flatten)]
    pub kind: SystemKind,
    pub horizon_cap: u64,
}

impl SystemSpec {
    pub fn new(kind: SystemKind, horizon_cap: u64) -> Self {
        SystemSpec { kind, horizon_cap }
    }
}

/// A state of one of the built-in systems.
#[derive(Debug, Clone, PartialEq)]
pub enum Point<R> {
    /// Plain real coordinate in [0,1] (logistic4, identity).
    Real(R),
    /// Tent-map state: numerator over 3^34.
    TentLattice(u64),
    /// Rotation state: numerator over 10^15.
    RotLattice(u64),
    /// 2-shift symbol word.
    Shift(ShiftWord),
    /// Half-line point `seed + offset` with seed in (0,1); floor and block
    /// membership are exact in the offset.
    Halfline { seed: R, offset: u64 },
}

impl<R: Real> Point<R> {
    /// Real coordinate of the point, where one exists.
    pub fn as_real(&self) -> Option<R> {
        match self {
            Point::Real(x) => Some(*x),
            Point::TentLattice(v) => Some(r::<R>(*v as f64 / TENT_DEN as f64)),
            Point::RotLattice(v) => Some(r::<R>(*v as f64 / ROT_DEN as f64)),
            Point::Halfline { seed, offset } => Some(*seed + r::<R>(*offset as f64)),
            Point::Shift(_) => None,
        }
    }

    /// Short, stable identifier used in report pair labels.
    pub fn label(&self) -> String {
        match self {
            Point::Real(x) => format!("{x}"),
            Point::TentLattice(v) => format!("{}", *v as f64 / TENT_DEN as f64),
            Point::RotLattice(v) => format!("{}", *v as f64 / ROT_DEN as f64),
            Point::Shift(w) => w.label(),
            Point::Halfline { seed, offset } => format!("{seed}+{offset}"),
        }
    }
}

#[derive(Debug, Clone)]
enum SysImpl {
    Tent,
    Logistic,
    Rotation { alpha_num: u64 },
    Shift2,
    Example1 { blocks: BlockTable },
    Identity,
    Iterate { base: Box<SysImpl>, n: u64 },
}

/// A built system: immutable after construction, all operations pure.
#[derive(Debug, Clone)]
pub struct System<R> {
    imp: SysImpl,
    horizon_cap: u64,
    name: String,
    _real: PhantomData<fn() -> R>,
}

/// Build a system from its spec. For `Iterate`, the base system is built with
/// cap `horizon_cap * n` so the composed system can serve `horizon_cap` steps.
pub fn make_system<R: Real>(spec: &SystemSpec) -> Result<System<R>> {
    System::new(spec)
}

impl<R: Real> System<R> {
    pub fn new(spec: &SystemSpec) -> Result<Self> {
        if spec.horizon_cap < 1 {
            return Err(Error::config("horizon_cap", "must be at least 1"));
        }
        let (imp, cap) = Self::build_kind(&spec.kind, spec.horizon_cap)?;
        Ok(System {
            imp,
            horizon_cap: cap,
            name: spec.kind.name(),
            _real: PhantomData,
        })
    }

    fn build_kind(kind: &SystemKind, cap: u64) -> Result<(SysImpl, u64)> {
        Ok(match kind {
            SystemKind::Tent => (SysImpl::Tent, cap),
            SystemKind::Logistic4 => (SysImpl::Logistic, cap),
            SystemKind::Rotation { alpha } => {
                if !alpha.is_finite() || *alpha <= 0.0 || *alpha >= 1.0 {
                    return Err(Error::config(
                        "rotation.alpha",
                        format!("{alpha} is outside the open interval (0,1)"),
                    ));
                }
                let alpha_num = (alpha * ROT_DEN as f64).round() as u64 % ROT_DEN;
                if alpha_num == 0 {
                    return Err(Error::config(
                        "rotation.alpha",
                        "rounds to 0 at the 10^-15 resolution",
                    ));
                }
                (SysImpl::Rotation { alpha_num }, cap)
            }
            SystemKind::Shift2 => (SysImpl::Shift2, cap),
            SystemKind::Example1 => (
                SysImpl::Example1 {
                    blocks: blocks::example1_blocks(cap)?,
                },
                cap,
            ),
            SystemKind::Identity => (SysImpl::Identity, cap),
            SystemKind::Iterate { base, n } => {
                if *n < 1 {
                    return Err(Error::config("iterate.n", "must be at least 1"));
                }
                let base_cap = cap.checked_mul(*n).ok_or_else(|| {
                    Error::config("iterate.n", "horizon_cap * n overflows u64")
                })?;
                let (base_imp, _) = Self::build_kind(base, base_cap)?;
                (
                    SysImpl::Iterate {
                        base: Box::new(base_imp),
                        n: *n,
                    },
                    cap,
                )
            }
        })
    }

    /// The N-fold composition of this system, with the horizon cap reduced
    /// accordingly.
    pub fn pow(&self, n: u64) -> Result<System<R>> {
        if n < 1 {
            return Err(Error::config("iterate.n", "must be at least 1"));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let cap = self.horizon_cap / n;
        if cap < 1 {
            return Err(Error::config(
                "iterate.n",
                "horizon_cap too small for the requested power",
            ));
        }
        Ok(System {
            imp: SysImpl::Iterate {
                base: Box::new(self.imp.clone()),
                n,
            },
            horizon_cap: cap,
            name: format!("iterate({},{})", self.name, n),
            _real: PhantomData,
        })
    }

    pub fn horizon_cap(&self) -> u64 {
        self.horizon_cap
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn mismatch(&self, p: &Point<R>) -> Error {
        Error::Domain(format!(
            "point {} does not belong to system `{}`",
            p.label(),
            self.name
        ))
    }

    /// One application of the map.
    pub fn step(&self, p: &Point<R>) -> Result<Point<R>> {
        step_impl(&self.imp, p).map_err(|e| match e {
            Error::Domain(_) => self.mismatch(p),
            other => other,
        })
    }

    /// Distance between two states, in [0, 1] for every built-in metric.
    pub fn distance(&self, p: &Point<R>, q: &Point<R>) -> Result<R> {
        distance_impl(&self.imp, p, q).map_err(|e| match e {
            Error::Domain(_) => self.mismatch(p),
            other => other,
        })
    }

    /// The sequence `d(f^i x, f^i y)` for `0 <= i < horizon`. Structured
    /// systems use exact bulk paths; the result always matches the naive
    /// step-and-measure loop extensionally.
    pub fn orbit_distances(&self, x: &Point<R>, y: &Point<R>, horizon: u64) -> Result<Vec<R>> {
        if horizon < 1 {
            return Err(Error::Argument("horizon must be at least 1".into()));
        }
        if horizon > self.horizon_cap {
            return Err(Error::HorizonExceeded {
                requested: horizon,
                cap: self.horizon_cap,
            });
        }
        match (&self.imp, x, y) {
            (SysImpl::Rotation { .. } | SysImpl::Identity, _, _) => {
                // Isometries: the profile is exactly constant.
                let d = self.distance(x, y)?;
                Ok(vec![d; horizon as usize])
            }
            (SysImpl::Shift2, Point::Shift(a), Point::Shift(b)) => {
                let n = horizon as usize;
                if a.remaining() < n || b.remaining() < n {
                    return Err(Error::Argument(format!(
                        "shift prefixes ({}, {}) are shorter than the horizon {n}",
                        a.remaining(),
                        b.remaining()
                    )));
                }
                let scan = a.remaining().min(b.remaining());
                let dis = a.disagreements_upto(b, scan);
                let mut out = Vec::with_capacity(n);
                let mut ptr = 0;
                for i in 0..n {
                    while ptr < dis.len() && dis[ptr] < i {
                        ptr += 1;
                    }
                    out.push(match dis.get(ptr) {
                        Some(&p) => pow2_neg::<R>(p - i),
                        None => R::zero(),
                    });
                }
                Ok(out)
            }
            (SysImpl::Example1 { blocks }, Point::Halfline { .. }, Point::Halfline { .. }) => {
                let mut out = Vec::with_capacity(horizon as usize);
                let mut p = x.clone();
                let mut q = y.clone();
                for i in 0..horizon {
                    out.push(halfline_distance(blocks, &p, &q)?);
                    if i + 1 < horizon {
                        p = step_impl(&self.imp, &p)?;
                        q = step_impl(&self.imp, &q)?;
                    }
                }
                Ok(out)
            }
            _ => {
                let mut out = Vec::with_capacity(horizon as usize);
                let mut p = x.clone();
                let mut q = y.clone();
                for i in 0..horizon {
                    out.push(self.distance(&p, &q)?);
                    if i + 1 < horizon {
                        p = self.step(&p)?;
                        q = self.step(&q)?;
                    }
                }
                Ok(out)
            }
        }
    }

    /// Construct a point from a real coordinate. For `example1` the floor
    /// becomes the offset and the fractional part the seed.
    pub fn point_from_real(&self, x: R) -> Result<Point<R>> {
        match base_of(&self.imp) {
            SysImpl::Tent => {
                check_unit_interval(x, "tent")?;
                let num = (x.to_f64().unwrap() * TENT_DEN as f64).round() as u64;
                Ok(Point::TentLattice(num.min(TENT_DEN)))
            }
            SysImpl::Logistic => {
                check_unit_interval(x, "logistic4")?;
                Ok(Point::Real(x))
            }
            SysImpl::Identity => {
                check_unit_interval(x, "identity")?;
                Ok(Point::Real(x))
            }
            SysImpl::Rotation { .. } => {
                if x < R::zero() || x >= R::one() {
                    return Err(Error::Domain(format!(
                        "rotation coordinate {x} is outside [0,1)"
                    )));
                }
                let num = (x.to_f64().unwrap() * ROT_DEN as f64).round() as u64 % ROT_DEN;
                Ok(Point::RotLattice(num))
            }
            SysImpl::Example1 { .. } => {
                if x <= R::zero() {
                    return Err(Error::Domain(format!(
                        "half-line coordinate {x} must be positive"
                    )));
                }
                let offset = x.floor().to_f64().unwrap() as u64;
                let seed = x - x.floor();
                if seed <= R::zero() || seed >= R::one() {
                    return Err(Error::Domain(format!(
                        "half-line coordinate {x} has no fractional part; the seed must lie in (0,1)"
                    )));
                }
                Ok(Point::Halfline { seed, offset })
            }
            SysImpl::Shift2 => Err(Error::Domain(
                "shift points are built from symbol prefixes, not real coordinates".into(),
            )),
            SysImpl::Iterate { .. } => unreachable!("base_of unwraps iterates"),
        }
    }

    /// Half-line point `seed + offset` with seed in (0,1).
    pub fn example1_point(&self, seed: R, offset: u64) -> Result<Point<R>> {
        match base_of(&self.imp) {
            SysImpl::Example1 { .. } => {
                if seed <= R::zero() || seed >= R::one() {
                    return Err(Error::Domain(format!("seed {seed} is outside (0,1)")));
                }
                Ok(Point::Halfline { seed, offset })
            }
            _ => Err(Error::Unsupported {
                system: self.name.clone(),
                message: "seed/offset points exist only for example1".into(),
            }),
        }
    }

    /// Shift point from a '0'/'1' string, zero-padded to the horizon cap.
    pub fn shift_point(&self, prefix: &str) -> Result<Point<R>> {
        match base_of(&self.imp) {
            SysImpl::Shift2 => {
                let pad = usize::try_from(self.padded_len()).unwrap_or(usize::MAX);
                Ok(Point::Shift(ShiftWord::from_str_padded(prefix, pad)?))
            }
            _ => Err(Error::Unsupported {
                system: self.name.clone(),
                message: "symbol-prefix points exist only for shift2".into(),
            }),
        }
    }

    /// Scrambled-family point for pattern `c`, materialized through the cap.
    pub fn family_point(&self, c: &[u8]) -> Result<Point<R>> {
        match base_of(&self.imp) {
            SysImpl::Shift2 => Ok(Point::Shift(shift::scrambled_family_word(
                c,
                self.padded_len(),
            )?)),
            _ => Err(Error::Unsupported {
                system: self.name.clone(),
                message: "the scrambled family lives in shift2".into(),
            }),
        }
    }

    fn padded_len(&self) -> u64 {
        // Iterates need n symbols per composed step.
        match &self.imp {
            SysImpl::Iterate { n, .. } => self.horizon_cap.saturating_mul(*n),
            _ => self.horizon_cap,
        }
    }

    /// Uniform-ish sample of a state, reproducible from the caller's RNG.
    /// `horizon` controls how much symbol material shift points carry.
    pub fn sample_point<T: Rng + ?Sized>(&self, rng: &mut T, horizon: u64) -> Point<R> {
        match base_of(&self.imp) {
            SysImpl::Tent => Point::TentLattice(rng.random_range(0..=TENT_DEN)),
            SysImpl::Logistic | SysImpl::Identity => Point::Real(r(rng.random::<f64>())),
            SysImpl::Rotation { .. } => Point::RotLattice(rng.random_range(0..ROT_DEN)),
            SysImpl::Shift2 => {
                let need = match &self.imp {
                    SysImpl::Iterate { n, .. } => horizon.saturating_mul(*n),
                    _ => horizon,
                };
                Point::Shift(ShiftWord::random(rng, need as usize + 128))
            }
            SysImpl::Example1 { .. } => {
                let seed = loop {
                    let s = rng.random::<f64>();
                    if s > 0.0 && s < 1.0 {
                        break s;
                    }
                };
                Point::Halfline {
                    seed: r(seed),
                    offset: 0,
                }
            }
            SysImpl::Iterate { .. } => unreachable!("base_of unwraps iterates"),
        }
    }

    /// Checkpoints intrinsic to the system's structure: the exact block
    /// boundaries for `example1`, nothing for the others.
    pub fn natural_checkpoints(&self, horizon: u64) -> Vec<u64> {
        match &self.imp {
            SysImpl::Example1 { blocks } => blocks
                .exact_l_values()
                .into_iter()
                .filter(|&v| v >= 1 && v <= horizon)
                .collect(),
            SysImpl::Iterate { base, n } => match base.as_ref() {
                SysImpl::Example1 { blocks } => blocks
                    .exact_l_values()
                    .into_iter()
                    .map(|v| v / n)
                    .filter(|&v| v >= 1 && v <= horizon)
                    .collect(),
                _ => Vec::new(),
            },
            _ => Vec::new(),
        }
    }

    /// The block table backing the `example1` metric, when this is that system.
    pub fn example1_blocks(&self) -> Option<&BlockTable> {
        match base_of(&self.imp) {
            SysImpl::Example1 { blocks } => Some(blocks),
            _ => None,
        }
    }
}

/// The innermost non-iterate kind.
fn base_of(imp: &SysImpl) -> &SysImpl {
    match imp {
        SysImpl::Iterate { base, .. } => base_of(base),
        other => other,
    }
}

fn check_unit_interval<R: Real>(x: R, system: &str) -> Result<()> {
    if x < R::zero() || x > R::one() {
        return Err(Error::Domain(format!(
            "{system} coordinate {x} is outside [0,1]"
        )));
    }
    Ok(())
}

fn step_impl<R: Real>(imp: &SysImpl, p: &Point<R>) -> Result<Point<R>> {
    match (imp, p) {
        (SysImpl::Tent, Point::TentLattice(v)) => {
            let d = 2 * v;
            Ok(Point::TentLattice(if d <= TENT_DEN {
                d
            } else {
                2 * TENT_DEN - d
            }))
        }
        (SysImpl::Logistic, Point::Real(x)) => {
            let four = r::<R>(4.0);
            let y = four * *x * (R::one() - *x);
            Ok(Point::Real(y.max(R::zero()).min(R::one())))
        }
        (SysImpl::Rotation { alpha_num }, Point::RotLattice(v)) => {
            Ok(Point::RotLattice((v + alpha_num) % ROT_DEN))
        }
        (SysImpl::Shift2, Point::Shift(w)) => Ok(Point::Shift(w.shifted()?)),
        (SysImpl::Example1 { blocks }, Point::Halfline { seed, offset }) => {
            let next = offset.checked_add(1).ok_or(Error::HorizonExceeded {
                requested: u64::MAX,
                cap: blocks.horizon_cap(),
            })?;
            Ok(Point::Halfline {
                seed: *seed,
                offset: next,
            })
        }
        (SysImpl::Identity, Point::Real(x)) => Ok(Point::Real(*x)),
        (SysImpl::Iterate { base, n }, p) => {
            let mut cur = p.clone();
            for _ in 0..*n {
                cur = step_impl(base, &cur)?;
            }
            Ok(cur)
        }
        _ => Err(Error::Domain("point/system mismatch".into())),
    }
}

fn distance_impl<R: Real>(imp: &SysImpl, p: &Point<R>, q: &Point<R>) -> Result<R> {
    match (imp, p, q) {
        (SysImpl::Tent, Point::TentLattice(a), Point::TentLattice(b)) => {
            let d = a.abs_diff(*b);
            Ok(r(d as f64 / TENT_DEN as f64))
        }
        (SysImpl::Logistic | SysImpl::Identity, Point::Real(x), Point::Real(y)) => {
            Ok((*x - *y).abs())
        }
        (SysImpl::Rotation { .. }, Point::RotLattice(a), Point::RotLattice(b)) => {
            let d = a.abs_diff(*b);
            let circ = d.min(ROT_DEN - d);
            Ok(r(circ as f64 / ROT_DEN as f64))
        }
        (SysImpl::Shift2, Point::Shift(a), Point::Shift(b)) => {
            Ok(match a.first_disagreement(b) {
                None => R::zero(),
                Some(j) => pow2_neg(j),
            })
        }
        (SysImpl::Example1 { blocks }, Point::Halfline { .. }, Point::Halfline { .. }) => {
            halfline_distance(blocks, p, q)
        }
        (SysImpl::Iterate { base, .. }, p, q) => distance_impl(base, p, q),
        _ => Err(Error::Domain("point/system mismatch".into())),
    }
}

/// The half-line metric: 0 on equal points; `1/2^k` when both points share an
/// even floor inside the k-th even block (`k >= 1`); 1 otherwise.
fn halfline_distance<R: Real>(blocks: &BlockTable, p: &Point<R>, q: &Point<R>) -> Result<R> {
    let (s1, m1, s2, m2) = match (p, q) {
        (
            Point::Halfline {
                seed: s1,
                offset: m1,
            },
            Point::Halfline {
                seed: s2,
                offset: m2,
            },
        ) => (*s1, *m1, *s2, *m2),
        _ => return Err(Error::Domain("point/system mismatch".into())),
    };
    if m1 == m2 && s1 == s2 {
        return Ok(R::zero());
    }
    if m1 != m2 {
        // Seeds lie in (0,1), so the floor is the offset; distinct floors
        // land in the catch-all branch.
        return Ok(R::one());
    }
    if m1 % 2 != 0 {
        return Ok(R::one());
    }
    match blocks.block_of(m1)? {
        Some(k) => Ok(pow2_neg(k as usize)),
        None => Ok(R::one()),
    }
}

/// `2^-j` clamped away from zero so unequal shift words never collide.
fn pow2_neg<R: Real>(j: usize) -> R {
    if j == 0 {
        return R::one();
    }
    let v = R::from_f64((-(j.min(4096) as f64)).exp2()).unwrap_or_else(R::zero);
    if v > R::zero() {
        v
    } else {
        R::min_positive_value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn sys(kind: SystemKind, cap: u64) -> System<f64> {
        make_system(&SystemSpec::new(kind, cap)).unwrap()
    }

    fn approx(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn tent_steps_quarter_to_half_to_one() {
        let t = sys(SystemKind::Tent, 1000);
        let p = t.point_from_real(0.25).unwrap();
        let p1 = t.step(&p).unwrap();
        approx(p1.as_real().unwrap(), 0.5, 1e-12);
        let p2 = t.step(&p1).unwrap();
        approx(p2.as_real().unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn iterate_squares_the_tent() {
        let t = sys(SystemKind::Tent, 1000);
        let t2 = t.pow(2).unwrap();
        let p = t2.point_from_real(0.25).unwrap();
        approx(t2.step(&p).unwrap().as_real().unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn iterate_of_identity_is_fixed() {
        let id = sys(SystemKind::Identity, 1000);
        let id7 = id.pow(7).unwrap();
        let p = id7.point_from_real(0.37).unwrap();
        assert_eq!(id7.step(&p).unwrap(), p);
    }

    #[test]
    fn iterate_one_is_extensionally_the_base() {
        let t = sys(SystemKind::Tent, 10_000);
        let t1 = t.pow(1).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..32 {
            let p = t.sample_point(&mut rng, 100);
            assert_eq!(t.step(&p).unwrap(), t1.step(&p).unwrap());
        }
    }

    #[test]
    fn iterate_orbit_is_every_nth_base_entry() {
        // Exact equality, index by index.
        for kind in [SystemKind::Tent, SystemKind::Logistic4] {
            let base = sys(kind, 30_000);
            let n = 3u64;
            let pow = base.pow(n).unwrap();
            let mut rng = StdRng::seed_from_u64(11);
            let p0 = base.sample_point(&mut rng, 100);
            let mut base_orbit = vec![p0.clone()];
            for _ in 0..10_000u64 {
                base_orbit.push(base.step(base_orbit.last().unwrap()).unwrap());
            }
            let mut q = p0;
            for i in 0..(10_000 / n) {
                assert_eq!(q, base_orbit[(i * n) as usize], "index {i}");
                q = pow.step(&q).unwrap();
            }
        }
    }

    #[test]
    fn example1_step_adds_one_to_the_offset() {
        let e = sys(SystemKind::Example1, 1000);
        let p = e.example1_point(0.25, 3).unwrap();
        assert_eq!(
            e.step(&p).unwrap(),
            Point::Halfline {
                seed: 0.25,
                offset: 4
            }
        );
    }

    #[test]
    fn shift_step_drops_the_head() {
        let s = sys(SystemKind::Shift2, 100);
        let p = s.shift_point("1011").unwrap();
        let q = s.step(&p).unwrap();
        if let Point::Shift(w) = q {
            assert_eq!(w.symbol(0), Some(false));
            assert_eq!(w.symbol(1), Some(true));
        } else {
            panic!("expected shift point");
        }
    }

    #[test]
    fn halfline_metric_cases() {
        let e = sys(SystemKind::Example1, 10_000_000);
        let d = |a: f64, b: f64| {
            e.distance(&e.point_from_real(a).unwrap(), &e.point_from_real(b).unwrap())
                .unwrap()
        };
        // Even floor 4 inside [3, 11): k = 1.
        assert_eq!(d(4.25, 4.75), 0.5);
        // Odd floor: catch-all branch.
        assert_eq!(d(1.25, 1.75), 1.0);
        // Identical points.
        assert_eq!(d(4.25, 4.25), 0.0);
        // Even floor 2060 inside [2059, L_5): k = 2.
        assert_eq!(d(2060.1, 2060.9), 0.25);
        // Even floor 2 but [1,3) is not an even block.
        assert_eq!(d(2.25, 2.75), 1.0);
        // Distinct floors.
        assert_eq!(d(4.25, 6.25), 1.0);
    }

    #[test]
    fn halfline_distance_past_cap_errors() {
        // Even offsets force a block lookup, which errors past the cap.
        let e = sys(SystemKind::Example1, 100);
        let p = e.example1_point(0.25, 102).unwrap();
        let q = e.example1_point(0.75, 102).unwrap();
        assert!(matches!(
            e.distance(&p, &q),
            Err(Error::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn rotation_is_an_exact_isometry() {
        let rot = sys(SystemKind::Rotation { alpha: GOLDEN_ALPHA }, 100_000);
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..200 {
            let p = rot.sample_point(&mut rng, 10);
            let q = rot.sample_point(&mut rng, 10);
            let d0 = rot.distance(&p, &q).unwrap();
            let d1 = rot
                .distance(&rot.step(&p).unwrap(), &rot.step(&q).unwrap())
                .unwrap();
            assert_eq!(d0, d1);
        }
    }

    #[test]
    fn tent_orbit_does_not_collapse() {
        let t = sys(SystemKind::Tent, 200_000);
        let mut p = t.point_from_real(0.37).unwrap();
        let mut zeros = 0;
        for _ in 0..100_000 {
            p = t.step(&p).unwrap();
            if let Point::TentLattice(v) = p {
                if v == 0 {
                    zeros += 1;
                }
            }
        }
        assert_eq!(zeros, 0, "tent orbit hit the absorbing endpoint");
    }

    #[test]
    fn invalid_specs_name_the_field() {
        let err = make_system::<f64>(&SystemSpec::new(SystemKind::Rotation { alpha: 1.5 }, 10))
            .unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "rotation.alpha"));
        let err = make_system::<f64>(&SystemSpec::new(SystemKind::Tent, 0)).unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "horizon_cap"));
        let err = make_system::<f64>(&SystemSpec::new(
            SystemKind::Iterate {
                base: Box::new(SystemKind::Tent),
                n: 0,
            },
            10,
        ))
        .unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "iterate.n"));
    }

    #[test]
    fn mismatched_points_are_domain_errors() {
        let t = sys(SystemKind::Tent, 100);
        let foreign = Point::Real(0.5);
        assert!(matches!(t.step(&foreign), Err(Error::Domain(_))));
        let p = t.point_from_real(0.5).unwrap();
        assert!(matches!(t.distance(&p, &foreign), Err(Error::Domain(_))));
    }

    #[test]
    fn example1_rejects_integer_coordinates() {
        let e = sys(SystemKind::Example1, 100);
        assert!(e.point_from_real(3.0).is_err());
        assert!(e.point_from_real(-0.5).is_err());
        assert!(e.example1_point(0.0, 2).is_err());
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = SystemSpec::new(SystemKind::Example1, 1_000_000);
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"kind":"example1","horizon_cap":1000000}"#);
        let back: SystemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        let rot: SystemSpec = serde_json::from_str(r#"{"kind":"rotation","horizon_cap":10}"#).unwrap();
        assert_eq!(
            rot.kind,
            SystemKind::Rotation {
                alpha: GOLDEN_ALPHA
            }
        );
        let it: SystemSpec = serde_json::from_str(
            r#"{"kind":"iterate","base":{"kind":"tent"},"n":2,"horizon_cap":1000}"#,
        )
        .unwrap();
        let sys = make_system::<f64>(&it).unwrap();
        assert_eq!(sys.name(), "iterate(tent,2)");
        assert_eq!(sys.horizon_cap(), 1000);
        let p = sys.point_from_real(0.25).unwrap();
        assert!((sys.step(&p).unwrap().as_real().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orbit_distances_fast_paths_match_naive_loop() {
        let mut rng = StdRng::seed_from_u64(9);
        let horizon = 400u64;
        for kind in [
            SystemKind::Shift2,
            SystemKind::Example1,
            SystemKind::Rotation { alpha: GOLDEN_ALPHA },
            SystemKind::Identity,
        ] {
            let s = sys(kind, 1_000);
            let x = s.sample_point(&mut rng, horizon);
            let y = s.sample_point(&mut rng, horizon);
            let fast = s.orbit_distances(&x, &y, horizon).unwrap();
            // Naive loop.
            let mut p = x.clone();
            let mut q = y.clone();
            let mut naive = Vec::new();
            for i in 0..horizon {
                naive.push(s.distance(&p, &q).unwrap());
                if i + 1 < horizon {
                    p = s.step(&p).unwrap();
                    q = s.step(&q).unwrap();
                }
            }
            assert_eq!(fast, naive, "system {}", s.name());
        }
    }

    #[test]
    fn orbit_past_cap_is_rejected() {
        let t = sys(SystemKind::Tent, 100);
        let x = t.point_from_real(0.2).unwrap();
        let y = t.point_from_real(0.3).unwrap();
        assert!(matches!(
            t.orbit_distances(&x, &y, 101),
            Err(Error::HorizonExceeded { .. })
        ));
    }
}
