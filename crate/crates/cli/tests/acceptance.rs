//! Acceptance criteria, one PASS/FAIL line each.

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use minkruled::calculus::{central_difference, differentiate, CurveFn, DerivativeMode, ScalarFn};
use minkruled::catalog::{self, developable_theta, DevelopableBranch, Params};
use minkruled::lorentz::{causal_character, CAUSAL_TOL};
use minkruled::mannheim::{
    check_corollaries, check_theorem_4_1, check_theorem_5_1, check_theorem_5_2,
    trajectory_surfaces, MannheimPair, OffsetClass, OffsetSpec, Verdict,
};
use minkruled::par::Execution;
use minkruled::ruled::{
    classify, drall, frenet_frame, max_frame_residuals, RuledSurface, SurfaceClass,
};
use minkruled::{lcross, mdot, mixed, CausalCharacter, Error, MVec3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(err: impl std::fmt::Display) -> String {
    err.to_string()
}

fn spacelike() -> RuledSurface {
    catalog::get("paper_spacelike", &Params::new()).unwrap()
}

fn tangent_dev() -> RuledSurface {
    catalog::get("tangent_dev_hyperbolic", &Params::new()).unwrap()
}

const W: f64 = FRAC_1_SQRT_2;

fn pair(
    base: &RuledSurface,
    r: f64,
    theta0: f64,
    target: OffsetClass,
) -> Result<MannheimPair, String> {
    let spec = OffsetSpec::new(ScalarFn::constant(r), theta0, target);
    MannheimPair::construct_with(base, spec, 1e-6, 200, Execution::Parallel).map_err(e)
}

fn criterion_1() -> Outcome {
    let surf = spacelike();
    ensure(classify(&surf) == SurfaceClass::M2plus, || {
        format!("class {}", classify(&surf))
    })?;
    let grid = minkruled::par::sample_grid(-2.0, 2.0, 200);
    let (mut qq, mut dqdq) = (0.0f64, 0.0f64);
    for &s in &grid {
        let q = surf.q.value(s).map_err(e)?;
        let dq = differentiate(&surf.q, s, 1).map_err(e)?;
        qq = qq.max((mdot(q, q) - 1.0).abs());
        dqdq = dqdq.max((mdot(dq, dq) + 0.5).abs());
    }
    ensure(qq <= 1e-10 && dqdq <= 1e-10, || {
        format!("<q,q> err {qq:e}, <dq,dq> err {dqdq:e}")
    })?;
    Ok(format!(
        "M2plus; max |<q,q>-1| {qq:.1e}, max |<dq,dq>+1/2| {dqdq:.1e} over 200 samples"
    ))
}

fn constants_error(surf: &RuledSurface) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for s in surf.samples(200) {
        let f = frenet_frame(surf, s).map_err(e)?;
        let d = drall(surf, s).map_err(e)?;
        worst = worst
            .max((d + 1.0).abs())
            .max((f.kappa.abs() - 1.0).abs())
            .max((f.ds1_ds - W).abs());
    }
    Ok(worst)
}

fn criterion_2() -> Outcome {
    let surf = spacelike();
    let analytic = constants_error(&surf)?;
    let fd = constants_error(&surf.to_finite_difference(1e-5).map_err(e)?)?;
    ensure(analytic <= 1e-9 && fd <= 1e-6, || {
        format!("analytic {analytic:e}, fd {fd:e}")
    })?;
    Ok(format!(
        "drall -1, |kappa| 1, ds1/ds sqrt(2)/2: analytic err {analytic:.1e}, fd err {fd:.1e}"
    ))
}

fn criterion_3() -> Outcome {
    let (mut worst_a, mut worst_fd, mut n) = (0.0f64, 0.0f64, 0);
    let mut skipped = Vec::new();
    for entry in catalog::entries() {
        let surf = entry.build(&Params::new()).map_err(e)?;
        match frenet_frame(&surf, surf.s_domain.0) {
            Err(Error::CylindricalRuling(_)) => {
                skipped.push(entry.name);
                continue;
            }
            Err(err) => return Err(format!("{}: {err}", entry.name)),
            Ok(_) => {}
        }
        let a = max_frame_residuals(&surf, 200, Execution::Parallel)
            .map_err(e)?
            .max();
        let fd_surf = surf.to_finite_difference(1e-5).map_err(e)?;
        let fd = max_frame_residuals(&fd_surf, 200, Execution::Parallel)
            .map_err(e)?
            .max();
        ensure(a <= 1e-9 && fd <= 1e-6, || {
            format!("{}: analytic {a:e}, fd {fd:e}", entry.name)
        })?;
        worst_a = worst_a.max(a);
        worst_fd = worst_fd.max(fd);
        n += 1;
    }
    Ok(format!(
        "{n} surfaces, max residual analytic {worst_a:.1e}, fd {worst_fd:.1e}; no frame (cylindrical): {}",
        skipped.join(", ")
    ))
}

fn criterion_4() -> Outcome {
    let base = spacelike();
    let mut parts = Vec::new();
    for (target, theta0) in [(OffsetClass::M1minus, 1.0), (OffsetClass::M1plus, 2.0)] {
        let p = pair(&base, 1.0, theta0, target)?;
        let class = classify(&p.offset);
        ensure(p.certified && p.max_defect <= 1e-6, || {
            format!("{target:?}: defect {:e}", p.max_defect)
        })?;
        ensure(class == target.surface_class(), || {
            format!("{target:?}: offset classifies as {class}")
        })?;
        parts.push(format!("{class} defect {:.1e}", p.max_defect));
    }
    Ok(parts.join("; "))
}

fn criterion_5() -> Outcome {
    let td = pair(&tangent_dev(), 1.0, 1.0, OffsetClass::M1minus)?;
    let a = check_theorem_4_1(&td, 1e-6).map_err(e)?;
    ensure(
        td.certified
            && a.max_residual <= 1e-6
            && a.flag("base_developable") == Some(true)
            && a.flag("r_constant") == Some(true),
        || format!("tangent_dev: {a:?}"),
    )?;
    // on the spacelike base the striction curve of the offset is c + R a
    // exactly when R grows at the rate ds1/ds
    let spec = OffsetSpec::new(ScalarFn::linear(1.0, W), 1.0, OffsetClass::M1minus);
    let sp = MannheimPair::construct_with(&spacelike(), spec, 1e-6, 200, Execution::Parallel)
        .map_err(e)?;
    let b = check_theorem_4_1(&sp, 1e-6).map_err(e)?;
    let gap = b.fact("max_striction_gap").unwrap_or(f64::NAN);
    ensure(
        sp.certified
            && b.max_residual <= 1e-6
            && gap <= 1e-6
            && b.flag("base_developable") == Some(false)
            && b.flag("r_constant") == Some(false),
        || {
            format!(
                "spacelike: residual {:e}, gap {gap:e}, flags {:?}",
                b.max_residual, b.flags
            )
        },
    )?;
    Ok(format!(
        "true-true on tangent_dev (residual {:.1e}); false-false on the spacelike base with R = 1 + s/sqrt(2) \
         (residual {:.1e}, striction gap {gap:.1e}); opposite sign convention would leave {:.3}",
        a.max_residual,
        b.max_residual,
        b.fact("max_opposite_sign_rate").unwrap_or(f64::NAN)
    ))
}

fn developable_pair(shift: f64) -> Result<MannheimPair, String> {
    let base = catalog::get("developable_coth", &Params::new()).map_err(e)?;
    let th = |n: usize| move |s: f64| developable_theta(DevelopableBranch::Coth, -1.0, 1.0, s)[n];
    let theta = ScalarFn::analytic(move |s| th(0)(s) + shift, th(1), th(2), th(3));
    let spec = OffsetSpec::with_theta(ScalarFn::constant(1.0), theta, OffsetClass::M1minus);
    MannheimPair::construct_with(&base, spec, 1e-6, 200, Execution::Parallel).map_err(e)
}

fn criterion_6() -> Outcome {
    let p = developable_pair(0.0)?;
    let rep = check_theorem_5_1(&p, 1e-5).map_err(e)?;
    let cond = rep.series("condition").unwrap().max_abs();
    let dr = rep.series("offset_drall").unwrap().max_abs();
    let f_min = rep.series("r_kappa_rate").unwrap().min_abs();
    ensure(f_min > 1.0, || format!("|R kappa ds1/ds| min {f_min}"))?;
    ensure(
        cond <= 1e-5 && dr <= 1e-5 && rep.verdict == Verdict::Pass,
        || {
            format!(
                "unperturbed: condition {cond:e}, drall {dr:e}, {}",
                rep.verdict
            )
        },
    )?;
    let mut bounded = f64::INFINITY;
    for shift in [0.1, -0.1] {
        let q = developable_pair(shift)?;
        let r = check_theorem_5_1(&q, 1e-5).map_err(e)?;
        let c = r.series("condition").unwrap().min_abs();
        let d = r.series("offset_drall").unwrap().min_abs();
        ensure(c >= 1e-2 && d >= 1e-2, || {
            format!("shift {shift}: condition {c:e}, drall {d:e}")
        })?;
        bounded = bounded.min(c).min(d);
    }
    let deg = pair(&tangent_dev(), 1.0 / W, 1.0, OffsetClass::M1minus)?;
    let rd = check_theorem_5_1(&deg, 1e-6).map_err(e)?;
    ensure(rd.verdict == Verdict::Degenerate, || {
        format!("R = 1/w gave {}", rd.verdict)
    })?;
    Ok(format!(
        "both vanish (condition {cond:.1e}, drall {dr:.1e}); under theta +-0.1 both >= {bounded:.3}; \
         R = 1/w flagged {}",
        rd.verdict
    ))
}

fn criterion_7() -> Outcome {
    let td = tangent_dev();
    let one =
        check_theorem_5_2(&pair(&td, 1.0 / W, 1.0, OffsetClass::M1minus)?, 1e-9).map_err(e)?;
    let zero = one.series("curvature_rate_abs").unwrap().max_abs();
    ensure(zero <= 1e-9, || format!("R = 1/w residual {zero:e}"))?;
    let two =
        check_theorem_5_2(&pair(&td, 2.0 / W, 1.0, OffsetClass::M1minus)?, 1e-9).map_err(e)?;
    let expected = 1.5 * W;
    let worst = two
        .series("curvature_rate_abs")
        .unwrap()
        .values
        .iter()
        .map(|v| (v.abs() - expected).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-6, || {
        format!("R = 2/w: max deviation from 3w/2 {worst:e}")
    })?;
    ensure(
        one.verdict == Verdict::Pass && two.verdict == Verdict::Pass,
        || format!("verdicts {} / {}", one.verdict, two.verdict),
    )?;
    Ok(format!(
        "R = 1/w residual {zero:.1e}; R = 2/w |residual| = 3w/2 within {worst:.1e}"
    ))
}

/// Worst relative errors of the trajectory-surface dralls against the
/// closed forms, for a base with unit-speed striction along its ruling.
fn corollary_errors(p: &MannheimPair) -> Result<(f64, f64, bool), String> {
    let (ph, pa) = trajectory_surfaces(p).map_err(e)?;
    let (mut eh, mut ea, mut nondev) = (0.0f64, 0.0f64, true);
    let r = p.spec.r.value(0.0);
    for &s in &p.samples {
        let f = frenet_frame(&p.base, s).map_err(e)?;
        let ks = f.kappa * f.ds1_ds;
        let dh = drall(&ph, s).map_err(e)?;
        let closed_h = -1.0 / ks;
        eh = eh.max(((dh - closed_h) / closed_h).abs());
        if f.kappa != 0.0 {
            nondev &= dh.abs() > 1e-6;
        }
        let th = p.theta(s).map_err(e)?;
        let (sh, ch) = (th.sinh(), th.cosh());
        let closed_a = match p.spec.target {
            OffsetClass::M1minus => (-sh + r * ks * ch) / (ks * sh),
            OffsetClass::M1plus => (-ch + r * ks * sh) / (ks * ch),
        };
        let da = drall(&pa, s).map_err(e)?;
        ea = ea.max(((da - closed_a) / closed_a).abs());
    }
    Ok((eh, ea, nondev))
}

fn criterion_8() -> Outcome {
    let td = tangent_dev();
    let cases = [
        (
            "tangent_dev R=2/w M1minus",
            pair(&td, 2.0 / W, 1.0, OffsetClass::M1minus)?,
        ),
        (
            "tangent_dev R=1 M1plus",
            pair(&td, 1.0, 0.5, OffsetClass::M1plus)?,
        ),
        (
            "tangent_dev R=1/w M1minus",
            pair(&td, 1.0 / W, 1.0, OffsetClass::M1minus)?,
        ),
    ];
    let (mut wh, mut wa) = (0.0f64, 0.0f64);
    for (name, p) in &cases {
        let (eh, ea, nondev) = corollary_errors(p)?;
        ensure(eh <= 1e-5 && ea <= 1e-5, || {
            format!("{name}: central {eh:e}, asymptotic {ea:e}")
        })?;
        ensure(nondev, || {
            format!("{name}: central-normal surface developable somewhere")
        })?;
        let rep = check_corollaries(p, 1e-6).map_err(e)?;
        ensure(
            rep.flag("central_surface_nondevelopable") == Some(true),
            || format!("{name}: {:?}", rep.flags),
        )?;
        wh = wh.max(eh);
        wa = wa.max(ea);
    }
    Ok(format!(
        "{} pairs; central drall rel err {wh:.1e}, asymptotic rel err {wa:.1e}; central-normal surfaces nondevelopable",
        cases.len()
    ))
}

fn convergence_order() -> Result<f64, String> {
    let mut worst = f64::INFINITY;
    for entry in catalog::entries() {
        let surf = entry.build(&Params::new()).map_err(e)?;
        let analytic = |c: &CurveFn| matches!(c.mode(), DerivativeMode::Analytic { .. });
        if !(analytic(&surf.k) && analytic(&surf.q)) || entry.name.starts_with("developable") {
            continue;
        }
        let (lo, hi) = surf.s_domain;
        for curve in [&surf.k, &surf.q] {
            let f = |s: f64| curve.value(s).unwrap();
            for s in [lo + 0.3 * (hi - lo), lo + 0.7 * (hi - lo)] {
                for (order, h) in [(1, 2e-2), (2, 2e-3), (3, 2e-4)] {
                    let exact = differentiate(curve, s, order).map_err(e)?;
                    let err = |h: f64| (central_difference(&f, s, order, h) - exact).max_abs();
                    let (e1, e2) = (err(h), err(h / 2.0));
                    if e1 < 1e-9 {
                        continue;
                    }
                    worst = worst.min((e1 / e2).log2());
                }
            }
        }
    }
    Ok(worst)
}

fn random_vector(rng: &mut StdRng) -> MVec3 {
    MVec3::new(
        rng.gen_range(-10.0..10.0),
        rng.gen_range(-10.0..10.0),
        rng.gen_range(-10.0..10.0),
    )
}

fn lorentz_suite(cases: usize) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for i in 0..cases {
        let (x, y, z) = (
            random_vector(&mut rng),
            random_vector(&mut rng),
            random_vector(&mut rng),
        );
        let a: f64 = rng.gen_range(-5.0..5.0);
        let size = (x.euclid_norm() + 1.0)
            * (y.euclid_norm() + 1.0)
            * (z.euclid_norm() + 1.0)
            * (1.0 + a.abs());
        let bil = mdot(x * a + y, z) - (a * mdot(x, z) + mdot(y, z));
        let c = lcross(x, y);
        let cross_lin = (lcross(x * a + z, y) - (c * a + lcross(z, y))).max_abs();
        let orth = mdot(c, x)
            .abs()
            .max(mdot(c, y).abs())
            .max(mixed(x, y, y).abs());
        ensure(bil.abs().max(cross_lin).max(orth) <= 1e-9 * size, || {
            format!("case {i}: algebra")
        })?;

        // timelike vectors are never orthogonal to timelike or null ones
        let r = rng.gen_range(0.0..5.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let t = MVec3::new(
            r * rng.gen_range(1.05..3.0) + 0.05,
            r * phi.cos(),
            r * phi.sin(),
        );
        let psi = rng.gen_range(0.0..std::f64::consts::TAU);
        let rn = rng.gen_range(0.1..5.0);
        let n = MVec3::new(rn, rn * psi.cos(), rn * psi.sin());
        ensure(
            causal_character(t, CAUSAL_TOL) == CausalCharacter::Timelike,
            || format!("case {i}: timelike"),
        )?;
        ensure(
            causal_character(n, CAUSAL_TOL) == CausalCharacter::Null,
            || format!("case {i}: null"),
        )?;
        ensure(mdot(t, t * rng.gen_range(0.1..2.0)).abs() > 1e-9, || {
            format!("case {i}: t.t")
        })?;
        ensure(mdot(t, n).abs() > 1e-9, || format!("case {i}: t.n"))?;
        // orthogonal null vectors are proportional
        let m = n * rng.gen_range(-3.0..3.0);
        ensure(
            mdot(n, m).abs() <= 1e-9 * size && n.cross(m).max_abs() <= 1e-9 * size,
            || format!("case {i}: null pair"),
        )?;
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    let order = convergence_order()?;
    ensure(order >= 1.85, || format!("empirical order {order}"))?;
    lorentz_suite(10_000)?;
    Ok(format!(
        "min empirical FD order {order:.3}; lorentz suite passed on 10000 random cases"
    ))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minkruled"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let cfg = |name: &str| configs().join(name).display().to_string();
    let out = |name: &str| dir.path().join(name).display().to_string();
    let mut checked = 0;
    for name in ["spacelike.json", "tangent_dev.json", "spacelike_expr.json"] {
        let first = run(&["analyze", &cfg(name)]);
        let second = run(&["analyze", &cfg(name)]);
        ensure(code(&first) == 0, || {
            format!("{name}: analyze exit {}", code(&first))
        })?;
        ensure(first.stdout == second.stdout, || {
            format!("{name}: analyze output differs between runs")
        })?;
        let (a, b) = (out("a.obj"), out("b.obj"));
        for path in [&a, &b] {
            let m = run(&[
                "mesh",
                &cfg(name),
                "--rows",
                "64",
                "--cols",
                "16",
                "--out",
                path,
            ]);
            ensure(code(&m) == 0, || format!("{name}: mesh exit {}", code(&m)))?;
        }
        let (ta, tb) = (std::fs::read(&a).map_err(e)?, std::fs::read(&b).map_err(e)?);
        ensure(ta == tb, || format!("{name}: OBJ differs between runs"))?;
        let text = String::from_utf8(ta).map_err(e)?;
        let v = text.lines().filter(|l| l.starts_with("v ")).count();
        let f = text.lines().filter(|l| l.starts_with("f ")).count();
        ensure(v == 64 * 16 && f == 63 * 15, || {
            format!("{name}: {v} vertices, {f} faces")
        })?;
        let small = out("small.obj");
        ensure(
            code(&run(&[
                "mesh",
                &cfg(name),
                "--rows",
                "2",
                "--cols",
                "2",
                "--out",
                &small,
            ])) == 0,
            || "2x2 mesh failed".into(),
        )?;
        let text = std::fs::read_to_string(&small).map_err(e)?;
        let counts = (
            text.lines().filter(|l| l.starts_with("v ")).count(),
            text.lines().filter(|l| l.starts_with("f ")).count(),
        );
        ensure(counts == (4, 1), || {
            format!("{name}: 2x2 mesh gave {counts:?}")
        })?;
        checked += 1;
    }

    let expect = |args: &[&str], want: i32| -> Result<Output, String> {
        let o = run(args);
        ensure(code(&o) == want, || {
            format!(
                "{args:?}: exit {} (want {want}): {}",
                code(&o),
                String::from_utf8_lossy(&o.stderr)
            )
        })?;
        Ok(o)
    };
    let cyl = expect(&["analyze", &cfg("cylinder.json")], 2)?;
    ensure(
        String::from_utf8_lossy(&cyl.stderr).contains("cylindrical ruling: striction undefined"),
        || "cylinder warning missing".into(),
    )?;
    let bad = expect(&["analyze", &cfg("bad_expr.json")], 1)?;
    ensure(
        String::from_utf8_lossy(&bad.stderr).contains("byte 6"),
        || "byte offset missing".into(),
    )?;
    expect(&["analyze", &out("missing.json")], 1)?;
    let off = out("offset.json");
    expect(
        &[
            "offset",
            &cfg("spacelike.json"),
            "--R",
            "1",
            "--theta0",
            "1",
            "--target",
            "m1-",
            "--out",
            &off,
        ],
        0,
    )?;
    expect(
        &["verify", &cfg("spacelike.json"), &off, "--theorems", "5.1"],
        3,
    )?;
    expect(
        &["verify", &cfg("spacelike.json"), &off, "--theorems", "4.1"],
        4,
    )?;
    let td = out("td.json");
    expect(
        &[
            "offset",
            &cfg("tangent_dev.json"),
            "--R",
            "sqrt(2)",
            "--theta0",
            "1",
            "--target",
            "m1-",
            "--out",
            &td,
        ],
        0,
    )?;
    expect(
        &[
            "verify",
            &cfg("tangent_dev.json"),
            &td,
            "--theorems",
            "4.1,5.2,cor",
        ],
        0,
    )?;
    expect(
        &[
            "mesh",
            &cfg("spacelike.json"),
            "--rows",
            "1",
            "--cols",
            "4",
            "--out",
            &out("x.obj"),
        ],
        1,
    )?;
    Ok(format!(
        "{checked} configs rerun byte-identical (reports and OBJ), 64x16 -> 1024 v / 945 f, exit codes 0/1/2/3/4 as specified"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("spacelike base classification", criterion_1),
        ("spacelike base constants", criterion_2),
        ("frame residuals on the catalog", criterion_3),
        ("Mannheim certification", criterion_4),
        ("offset-distance identity", criterion_5),
        ("offset developability equivalence", criterion_6),
        ("curvature-rate residual", criterion_7),
        ("trajectory-surface corollaries", criterion_8),
        ("numerics", criterion_9),
        ("CLI contract", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
