//! chaoskit: empirical lower/upper distribution functions of orbit-pair
//! distances in discrete dynamical systems, finite-horizon chaos
//! classification (Li-Yorke, DC1/DC2/DC2'/DC3, sequence-restricted variants),
//! and harnesses that exercise the invariance and equivalence properties the
//! classifiers are expected to satisfy.
//!
//! The core is generic over the scalar type through [`real::Real`] (f32 or
//! f64); concrete aliases live at the crate root. Exact integer arithmetic is
//! used wherever the fixtures demand it: block tables for the half-line
//! metric, bit-packed words for the 2-shift, and fixed-point lattices for the
//! tent map and circle rotation.
//!
//! Everything here is pure and immutable after construction; pair-level work
//! parallelizes from the outside (the CLI fans out with worker threads).

pub mod classify;
pub mod distfn;
pub mod error;
pub mod numfmt;
pub mod real;
pub mod rtchaos;
pub mod systems;
pub mod theorems;

pub use error::{Error, Result};
pub use real::Real;

/// f64 working set.
pub type System64 = systems::System<f64>;
pub type Point64 = systems::Point<f64>;
pub type Profile64 = distfn::DistanceProfile<f64>;
pub type Estimate64 = distfn::DistributionEstimate<f64>;
pub type Thresholds64 = classify::Thresholds<f64>;
pub type Verdict64 = classify::ChaosVerdict<f64>;

/// f32 working set.
pub type System32 = systems::System<f32>;
pub type Point32 = systems::Point<f32>;
pub type Profile32 = distfn::DistanceProfile<f32>;
pub type Estimate32 = distfn::DistributionEstimate<f32>;
pub type Thresholds32 = classify::Thresholds<f32>;
pub type Verdict32 = classify::ChaosVerdict<f32>;

#[cfg(test)]
mod tests {
    use crate::classify::{classify_pair, consistency_check, Thresholds};
    use crate::distfn::{empirical_density, DistanceProfile, EstimateConfig, SequenceSpec};
    use crate::systems::{make_system, SystemKind, SystemSpec};

    #[test]
    fn the_core_works_at_f32_too() {
        let sys = make_system::<f32>(&SystemSpec::new(SystemKind::Tent, 1_000)).unwrap();
        let x = sys.point_from_real(0.25f32).unwrap();
        let y = sys.point_from_real(0.75f32).unwrap();
        let d = sys.distance(&x, &y).unwrap();
        assert!((d - 0.5).abs() < 1e-6);
        let values = sys.orbit_distances(&x, &y, 100).unwrap();
        let p = DistanceProfile::from_values(values, "f32 pair");
        let dens = empirical_density(&p, 0.5f32, 100).unwrap();
        assert!((0.0..=1.0).contains(&dens));
    }

    #[test]
    fn full_classification_runs_at_f32() {
        let sys = make_system::<f32>(&SystemSpec::new(SystemKind::Example1, 10_000)).unwrap();
        let x = sys.example1_point(0.25f32, 0).unwrap();
        let y = sys.example1_point(0.75f32, 0).unwrap();
        let th = Thresholds::<f32>::default();
        let cfg = EstimateConfig::<f32>::default();
        let v = classify_pair(&sys, &x, &y, 10_000, &th, &cfg, Some(&SequenceSpec::identity()))
            .unwrap();
        assert!(v.dc3.set);
        assert!(!v.dc1.set);
        assert!(consistency_check(&v).is_empty());
    }
}
