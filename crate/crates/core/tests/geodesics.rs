//! Geodesic behavior across the families: projectively flat sprays trace
//! straight lines, the beta-spray control does not, and domain exits are
//! recorded rather than thrown.

use std::sync::Arc;

use nalgebra::DVector;

use spraylab_core::families::{spaceform_spray, FamilySpec, Sign};
use spraylab_core::sample::SamplePlan;
use spraylab_core::spray::{
    geodesic_integrate, straightness_deviation, ExprProfile, SphericalSpray, StepControl,
    Termination, ZeroProfile,
};

fn interior_starts(
    dim: usize,
    count: usize,
    seed: u64,
    radius: f64,
) -> Vec<(DVector<f64>, DVector<f64>)> {
    SamplePlan::new(dim, count, seed, radius)
        .pairs()
        .into_iter()
        .map(|p| {
            let speed = p.y.norm();
            (p.x, p.y / speed)
        })
        .collect()
}

#[test]
fn projective_families_run_straight() {
    let specs = vec![
        FamilySpec::Flat,
        FamilySpec::Spaceform { mu: 1.0 },
        FamilySpec::QuadraticExample { c1: 0.4, c2: 0.25 },
        FamilySpec::Funk { c: 0.0 },
        FamilySpec::ZeroCurvature {
            c: 1.0,
            sign: Sign::Plus,
        },
        FamilySpec::ZeroCurvature {
            c: 1.0,
            sign: Sign::Minus,
        },
        FamilySpec::WeakIso1 { mu: 1.0, eps: 1.0 },
        FamilySpec::WeakIso2 { b: 1.0, c: 1.0 },
    ];
    for (fam_idx, spec) in specs.into_iter().enumerate() {
        let family = spec.build().unwrap();
        let spray = family.spray(3);
        let radius = 0.4 * family.sampling_radius();
        for (i, (x0, y0)) in interior_starts(3, 20, 60 + fam_idx as u64, radius)
            .into_iter()
            .enumerate()
        {
            let trace =
                geodesic_integrate(&spray, &x0, &y0, 1.0, 1e-3, StepControl::Fixed).unwrap();
            let dev = straightness_deviation(&trace);
            assert!(
                dev <= 1e-6,
                "{} start {i}: straightness deviation {dev}",
                family.name
            );
        }
    }
}

#[test]
fn beta_spray_control_curves() {
    // alpha = 0, beta = 1: G = |y|^2 x, manifestly not projective
    let spray = SphericalSpray::new(
        3,
        Arc::new(ZeroProfile),
        Arc::new(ExprProfile::new(
            |_, _| spraylab_core::num::Jet2::constant(1.0),
            |_, _| true,
        )),
    );
    let mut worst = 0.0f64;
    for (x0, y0) in interior_starts(3, 10, 91, 0.6) {
        let trace = geodesic_integrate(&spray, &x0, &y0, 1.0, 1e-3, StepControl::Fixed).unwrap();
        worst = worst.max(straightness_deviation(&trace));
    }
    assert!(worst > 1e-3, "beta spray stayed straight: {worst}");
}

#[test]
fn spaceform_geodesic_through_origin_stays_collinear() {
    let spray = spaceform_spray(1.0, 3);
    let x0 = DVector::zeros(3);
    let y0 = DVector::from_row_slice(&[0.6, -0.3, 0.75]);
    let trace = geodesic_integrate(&spray, &x0, &y0, 1.0, 1e-3, StepControl::Fixed).unwrap();
    assert!(straightness_deviation(&trace) <= 1e-9);
}

#[test]
fn zero_curvature_outward_run_exits_domain() {
    let family = FamilySpec::ZeroCurvature {
        c: 1.0,
        sign: Sign::Plus,
    }
    .build()
    .unwrap();
    let spray = family.spray(2);
    let x0 = DVector::from_row_slice(&[0.9, 0.0]);
    let y0 = DVector::from_row_slice(&[1.0, 0.0]);
    let trace = geodesic_integrate(&spray, &x0, &y0, 5.0, 1e-3, StepControl::Fixed).unwrap();
    assert_eq!(trace.terminated, Termination::DomainExit);
    let (last, _) = trace.states.last().unwrap();
    assert!(last.norm() < 1.0);
}

#[test]
fn step_halving_matches_fixed_step_on_smooth_runs() {
    let family = FamilySpec::Funk { c: 0.0 }.build().unwrap();
    let spray = family.spray(2);
    let x0 = DVector::from_row_slice(&[0.2, 0.1]);
    let y0 = DVector::from_row_slice(&[0.8, -0.4]);
    let fixed = geodesic_integrate(&spray, &x0, &y0, 0.5, 1e-3, StepControl::Fixed).unwrap();
    let halving = geodesic_integrate(
        &spray,
        &x0,
        &y0,
        0.5,
        1e-3,
        StepControl::Halving { tol: 1e-12 },
    )
    .unwrap();
    let (xa, _) = fixed.states.last().unwrap();
    let (xb, _) = halving.states.last().unwrap();
    assert!((xa - xb).norm() <= 1e-9);
}
