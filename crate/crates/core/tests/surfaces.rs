use minkruled::calculus::{CurveFn, ScalarFn};
use minkruled::catalog::{self, params, Params};
use minkruled::mannheim::{build_offset, OffsetClass, OffsetSpec};
use minkruled::par::Execution;
use minkruled::ruled::{
    classify, classify_with, drall, frenet_frame, max_frame_residuals, sample_mesh_with,
    RuledSurface, SurfaceClass,
};
use minkruled::{Error, MVec3};
use proptest::prelude::*;

const SAMPLES: usize = 200;

fn with_frames() -> Vec<(&'static str, RuledSurface)> {
    catalog::entries()
        .iter()
        .filter(|e| e.name != "lorentz_cylinder")
        .map(|e| (e.name, e.build(&Params::new()).unwrap()))
        .collect()
}

#[test]
fn frame_relations_hold_on_catalog_analytic() {
    for (name, surf) in with_frames() {
        let r = max_frame_residuals(&surf, SAMPLES, Execution::Parallel).unwrap();
        assert!(r.max() <= 1e-9, "{name}: {r:?}");
    }
}

#[test]
fn frame_relations_hold_on_catalog_finite_difference() {
    for (name, surf) in with_frames() {
        let fd = surf.to_finite_difference(1e-5).unwrap();
        let r = max_frame_residuals(&fd, SAMPLES, Execution::Parallel).unwrap();
        assert!(r.max() <= 1e-6, "{name}: {r:?}");
    }
}

#[test]
fn cylinder_has_no_frame() {
    let cyl = catalog::get("lorentz_cylinder", &Params::new()).unwrap();
    assert!(matches!(
        frenet_frame(&cyl, 1.0),
        Err(Error::CylindricalRuling(_))
    ));
    assert!(matches!(classify(&cyl), SurfaceClass::Unsupported(_)));
}

#[test]
fn sequential_and_parallel_agree() {
    let surf = catalog::get("paper_offset_1_corrected", &Params::new()).unwrap();
    assert_eq!(
        classify_with(&surf, 64, Execution::Sequential),
        classify_with(&surf, 64, Execution::Parallel)
    );
    let a = sample_mesh_with(&surf, 16, 8, Execution::Sequential).unwrap();
    let b = sample_mesh_with(&surf, 16, 8, Execution::Parallel).unwrap();
    assert_eq!(a.vertices, b.vertices);
    let ra = max_frame_residuals(&surf, 50, Execution::Sequential).unwrap();
    let rb = max_frame_residuals(&surf, 50, Execution::Parallel).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn offsets_of_offsets_stay_supported() {
    let base = catalog::get(
        "tangent_dev_hyperbolic",
        &params([("s_min", 0.0), ("s_max", 1.0)]),
    )
    .unwrap();
    let off = build_offset(
        &base,
        &OffsetSpec::new(ScalarFn::constant(0.5), 1.0, OffsetClass::M1minus),
    )
    .unwrap();
    assert_eq!(classify(&off), SurfaceClass::M1minus);
    assert!(
        max_frame_residuals(&off, 50, Execution::Parallel)
            .unwrap()
            .max()
            <= 1e-9
    );
}

/// The spacelike example with its director multiplied by a positive
/// function and its base curve shifted along the director.
fn reparametrised(scale: f64, wobble: f64, shift: f64) -> RuledSurface {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let q = move |s: f64| MVec3::new(r * s.sinh(), r, r * s.cosh());
    let lam = move |s: f64| scale * (1.0 + wobble * s.sin());
    let q2 = CurveFn::finite_difference(move |s| q(s) * lam(s), 1e-5).unwrap();
    let k2 = CurveFn::finite_difference(
        move |s| MVec3::new(s.cosh(), 0.0, s.sinh()) + q(s) * (shift * s),
        1e-5,
    )
    .unwrap();
    RuledSurface::new(k2, q2, (-2.0, 2.0), (-1.0, 1.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn drall_and_class_ignore_director_scaling(scale in 0.2..5.0f64, wobble in -0.5..0.5f64, shift in -1.0..1.0f64, s in -1.5..1.5f64) {
        let surf = reparametrised(scale, wobble, shift);
        prop_assert!((drall(&surf, s).unwrap() + 1.0).abs() <= 1e-6);
        prop_assert_eq!(classify_with(&surf, 32, Execution::Parallel), SurfaceClass::M2plus);
        let f = frenet_frame(&surf, s).unwrap();
        prop_assert!((f.kappa + 1.0).abs() <= 1e-6);
        let c = f.c - MVec3::new(s.cosh(), 0.0, s.sinh());
        prop_assert!(c.max_abs() <= 1e-6);
    }
}
