//! Built-in example surfaces with analytic derivatives and known values.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::calculus::{integrate, CurveFn, ScalarFn};
use crate::error::{Error, Result};
use crate::lorentz::MVec3;
use crate::mannheim::{build_offset, OffsetClass, OffsetSpec};
use crate::ruled::{RuledSurface, SurfaceClass};

pub type Params = BTreeMap<String, f64>;

/// Values an entry is known to have at every ruling.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expected {
    pub class: Option<SurfaceClass>,
    pub drall: Option<f64>,
    pub kappa: Option<f64>,
    pub ds1_ds: Option<f64>,
}

pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [(&'static str, f64)],
    /// Coordinates copied as printed in the source example, typos included.
    pub verbatim: bool,
    build: fn(&Params) -> Result<RuledSurface>,
    expected: fn(&Params) -> Expected,
}

impl CatalogEntry {
    /// Defaults overlaid with `params`; unknown names are rejected.
    pub fn resolve(&self, params: &Params) -> Result<Params> {
        let mut out: Params = self
            .params
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        for (k, v) in params {
            if !out.contains_key(k) {
                return Err(Error::BadParameter {
                    name: k.clone(),
                    reason: format!("`{}` takes no such parameter", self.name),
                });
            }
            if !v.is_finite() {
                return Err(Error::BadParameter {
                    name: k.clone(),
                    reason: "must be finite".into(),
                });
            }
            out.insert(k.clone(), *v);
        }
        Ok(out)
    }

    pub fn build(&self, params: &Params) -> Result<RuledSurface> {
        (self.build)(&self.resolve(params)?)
    }

    pub fn expected(&self, params: &Params) -> Result<Expected> {
        Ok((self.expected)(&self.resolve(params)?))
    }
}

fn p(params: &Params, name: &str) -> f64 {
    params[name]
}

fn domain(params: &Params) -> ((f64, f64), (f64, f64)) {
    let s = (p(params, "s_min"), p(params, "s_max"));
    let v = (p(params, "v_min"), p(params, "v_max"));
    (s, v)
}

fn bad(name: &str, reason: impl Into<String>) -> Error {
    Error::BadParameter {
        name: name.into(),
        reason: reason.into(),
    }
}

fn surface(k: CurveFn, q: CurveFn, params: &Params) -> Result<RuledSurface> {
    let (s, v) = domain(params);
    RuledSurface::new(k.with_domain(s.0, s.1), q.with_domain(s.0, s.1), s, v)
}

fn hyperbola(scale: f64) -> CurveFn {
    CurveFn::analytic(
        move |s: f64| MVec3::new(s.cosh(), 0.0, s.sinh()) * scale,
        move |s: f64| MVec3::new(s.sinh(), 0.0, s.cosh()) * scale,
        move |s: f64| MVec3::new(s.cosh(), 0.0, s.sinh()) * scale,
        move |s: f64| MVec3::new(s.sinh(), 0.0, s.cosh()) * scale,
    )
}

fn skew_spacelike(params: &Params) -> Result<RuledSurface> {
    let r = FRAC_1_SQRT_2;
    let q = CurveFn::analytic(
        move |s: f64| MVec3::new(r * s.sinh(), r, r * s.cosh()),
        move |s: f64| MVec3::new(r * s.cosh(), 0.0, r * s.sinh()),
        move |s: f64| MVec3::new(r * s.sinh(), 0.0, r * s.cosh()),
        move |s: f64| MVec3::new(r * s.cosh(), 0.0, r * s.sinh()),
    );
    surface(hyperbola(1.0), q, params)
}

/// `(b sinh s + g cosh s, mid, b cosh s + g sinh s)`
fn printed_director(b: f64, g: f64, mid: f64) -> CurveFn {
    let at = move |s: f64, even: bool| {
        let (sh, ch) = (s.sinh(), s.cosh());
        if even {
            MVec3::new(b * sh + g * ch, 0.0, b * ch + g * sh)
        } else {
            MVec3::new(b * ch + g * sh, 0.0, b * sh + g * ch)
        }
    };
    CurveFn::analytic(
        move |s| at(s, true) + MVec3::new(0.0, mid, 0.0),
        move |s| at(s, false),
        move |s| at(s, true),
        move |s| at(s, false),
    )
}

fn printed_offset_1(params: &Params) -> Result<RuledSurface> {
    let al = FRAC_1_SQRT_2;
    let c = 2f64.sqrt() / 4.0;
    let k = CurveFn::analytic(
        move |s: f64| {
            let (sh, ch) = (s.sinh(), s.cosh());
            MVec3::new(ch - al * s * sh, al * s * sh * sh, sh - al * s * ch)
        },
        move |s: f64| {
            let (sh, ch) = (s.sinh(), s.cosh());
            let t = 2.0 * s;
            MVec3::new(
                sh - al * (sh + s * ch),
                c * (t.cosh() - 1.0 + t * t.sinh()),
                ch - al * (ch + s * sh),
            )
        },
        move |s: f64| {
            let (sh, ch) = (s.sinh(), s.cosh());
            let t = 2.0 * s;
            MVec3::new(
                ch - al * (2.0 * ch + s * sh),
                2f64.sqrt() * (t.sinh() + s * t.cosh()),
                sh - al * (2.0 * sh + s * ch),
            )
        },
        move |s: f64| {
            let (sh, ch) = (s.sinh(), s.cosh());
            let t = 2.0 * s;
            MVec3::new(
                sh - al * (3.0 * sh + s * ch),
                2f64.sqrt() * (3.0 * t.cosh() + t * t.sinh()),
                ch - al * (3.0 * ch + s * sh),
            )
        },
    );
    let b = 6f64.sqrt() / 2.0;
    surface(k, printed_director(b, 2.0, b), params)
}

fn printed_offset_2(params: &Params) -> Result<RuledSurface> {
    let g = 3.0 * FRAC_1_SQRT_2;
    let k = CurveFn::analytic(
        move |s: f64| {
            let (sh, ch) = (s.sinh(), s.cosh());
            MVec3::new(ch - g * sh, g * sh * sh, sh - g * ch)
        },
        move |s: f64| {
            let (sh, ch) = (s.sinh(), s.cosh());
            MVec3::new(sh - g * ch, g * (2.0 * s).sinh(), ch - g * sh)
        },
        move |s: f64| {
            let (sh, ch) = (s.sinh(), s.cosh());
            MVec3::new(ch - g * sh, 2.0 * g * (2.0 * s).cosh(), sh - g * ch)
        },
        move |s: f64| {
            let (sh, ch) = (s.sinh(), s.cosh());
            MVec3::new(sh - g * ch, 4.0 * g * (2.0 * s).sinh(), ch - g * sh)
        },
    );
    surface(
        k,
        printed_director(2f64.sqrt(), 3f64.sqrt(), 2f64.sqrt()),
        params,
    )
}

fn corrected_offset(params: &Params, r: ScalarFn, target: OffsetClass) -> Result<RuledSurface> {
    let base = skew_spacelike(params)?;
    let spec = OffsetSpec::new(r, 3f64.sqrt().asinh(), target).anchored_at(0.0);
    build_offset(&base, &spec)
}

fn offset_1_corrected(params: &Params) -> Result<RuledSurface> {
    corrected_offset(params, ScalarFn::linear(0.0, 1.0), OffsetClass::M1minus)
}

fn offset_2_corrected(params: &Params) -> Result<RuledSurface> {
    corrected_offset(params, ScalarFn::constant(3.0), OffsetClass::M1plus)
}

fn unit_pair(params: &Params) -> Result<(f64, f64)> {
    let r = p(params, "r");
    if !(r > 0.0 && r < 1.0) {
        return Err(bad("r", format!("need 0 < r < 1, got {r}")));
    }
    Ok((r, (1.0 - r * r).sqrt()))
}

fn tangent_dev_hyperbolic(params: &Params) -> Result<RuledSurface> {
    let (r, w) = unit_pair(params)?;
    let k = CurveFn::analytic(
        move |s: f64| MVec3::new(r * s.cosh(), w * s, r * s.sinh()),
        move |s: f64| MVec3::new(r * s.sinh(), w, r * s.cosh()),
        move |s: f64| MVec3::new(r * s.cosh(), 0.0, r * s.sinh()),
        move |s: f64| MVec3::new(r * s.sinh(), 0.0, r * s.cosh()),
    );
    let q = CurveFn::analytic(
        move |s: f64| MVec3::new(r * s.sinh(), w, r * s.cosh()),
        move |s: f64| MVec3::new(r * s.cosh(), 0.0, r * s.sinh()),
        move |s: f64| MVec3::new(r * s.sinh(), 0.0, r * s.cosh()),
        move |s: f64| MVec3::new(r * s.cosh(), 0.0, r * s.sinh()),
    );
    surface(k, q, params)
}

fn lorentz_cylinder(params: &Params) -> Result<RuledSurface> {
    let k = CurveFn::analytic(
        |s: f64| MVec3::new(0.0, s.cos(), s.sin()),
        |s: f64| MVec3::new(0.0, -s.sin(), s.cos()),
        |s: f64| MVec3::new(0.0, -s.cos(), -s.sin()),
        |s: f64| MVec3::new(0.0, s.sin(), -s.cos()),
    );
    surface(k, CurveFn::constant(MVec3::E1), params)
}

fn hyperbolic_helicoid(params: &Params) -> Result<RuledSurface> {
    let b = p(params, "b");
    let k = CurveFn::analytic(
        move |s| MVec3::new(0.0, b * s, 0.0),
        move |_| MVec3::new(0.0, b, 0.0),
        |_| MVec3::ZERO,
        |_| MVec3::ZERO,
    );
    let q = CurveFn::analytic(
        |s: f64| MVec3::new(s.sinh(), 0.0, s.cosh()),
        |s: f64| MVec3::new(s.cosh(), 0.0, s.sinh()),
        |s: f64| MVec3::new(s.sinh(), 0.0, s.cosh()),
        |s: f64| MVec3::new(s.cosh(), 0.0, s.sinh()),
    );
    surface(k, q, params)
}

/// Developable spacelike surfaces built so that an offset at distance `R`
/// is itself developable.
///
/// The director runs along the directing cone `Q(t) = (r sinh(t/r), w,
/// r cosh(t/r))` as `q(s) = Q(g(s))`, the base curve is `∫ q`, and the angle
/// `θ = θ₀ - g` solves the offset's developability condition in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DevelopableBranch {
    /// `cosh θ = cosh θ₀ e^{ms}`; the timelike-ruling offset is developable.
    Coth,
    /// `sinh θ = sinh θ₀ e^{ms}`; the spacelike-ruling offset is developable.
    Tanh,
}

/// Angle and its first three derivatives for a developable branch.
pub fn developable_theta(branch: DevelopableBranch, theta0: f64, m: f64, s: f64) -> [f64; 4] {
    let th = match branch {
        DevelopableBranch::Coth => -(theta0.cosh() * (m * s).exp()).acosh(),
        DevelopableBranch::Tanh => (theta0.sinh() * (m * s).exp()).asinh(),
    };
    // θ' = m·f(θ) with f = coth or tanh
    let (f, df, ddf) = match branch {
        DevelopableBranch::Coth => {
            let c = 1.0 / th.tanh();
            let csch2 = c * c - 1.0;
            (c, -csch2, 2.0 * c * csch2)
        }
        DevelopableBranch::Tanh => {
            let t = th.tanh();
            let sech2 = 1.0 - t * t;
            (t, sech2, -2.0 * t * sech2)
        }
    };
    let d1 = m * f;
    let d2 = m * df * d1;
    let d3 = m * (ddf * d1 * d1 + df * d2);
    [th, d1, d2, d3]
}

fn developable(params: &Params, branch: DevelopableBranch) -> Result<RuledSurface> {
    let (r, w) = unit_pair(params)?;
    let (big_r, theta0) = (p(params, "R"), p(params, "theta0"));
    if big_r <= 0.0 {
        return Err(bad("R", format!("must be positive, got {big_r}")));
    }
    if theta0 >= 0.0 {
        return Err(bad("theta0", format!("must be negative, got {theta0}")));
    }
    if p(params, "s_min") < 0.0 {
        return Err(bad("s_min", "the construction starts at s = 0"));
    }
    let m = r / (big_r * w);
    // g = θ₀ - θ, so g' = -θ', etc.
    let g = move |s: f64| {
        let [th, d1, d2, d3] = developable_theta(branch, theta0, m, s);
        [theta0 - th, -d1, -d2, -d3]
    };
    let cone = move |t: f64, n: usize| {
        let u = t / r;
        let (sh, ch) = (u.sinh(), u.cosh());
        let f = r.powi(1 - n as i32);
        match (n, n % 2) {
            (0, _) => MVec3::new(r * sh, w, r * ch),
            (_, 1) => MVec3::new(ch, 0.0, sh) * f,
            _ => MVec3::new(sh, 0.0, ch) * f,
        }
    };
    let q_at = move |s: f64, n: usize| {
        let [t, g1, g2, g3] = g(s);
        match n {
            0 => cone(t, 0),
            1 => cone(t, 1) * g1,
            2 => cone(t, 2) * (g1 * g1) + cone(t, 1) * g2,
            _ => cone(t, 3) * (g1 * g1 * g1) + cone(t, 2) * (3.0 * g1 * g2) + cone(t, 1) * g3,
        }
    };
    let k_at = move |s: f64| {
        let x = |i: usize| integrate(|u| q_at(u, 0).to_array()[i], 0.0, s).unwrap_or(f64::NAN);
        MVec3::new(x(0), x(1), x(2))
    };
    let q = CurveFn::analytic(
        move |s| q_at(s, 0),
        move |s| q_at(s, 1),
        move |s| q_at(s, 2),
        move |s| q_at(s, 3),
    );
    let k = CurveFn::analytic(
        k_at,
        move |s| q_at(s, 0),
        move |s| q_at(s, 1),
        move |s| q_at(s, 2),
    );
    surface(k, q, params)
}

const DOMAIN: [(&str, f64); 4] = [
    ("s_min", -2.0),
    ("s_max", 2.0),
    ("v_min", -1.0),
    ("v_max", 1.0),
];
const SHORT: [(&str, f64); 4] = [
    ("s_min", -1.5),
    ("s_max", 1.5),
    ("v_min", -1.0),
    ("v_max", 1.0),
];
const TANGENT: [(&str, f64); 5] = [
    ("r", FRAC_1_SQRT_2),
    ("s_min", -2.0),
    ("s_max", 2.0),
    ("v_min", -1.0),
    ("v_max", 1.0),
];
const HELICOID: [(&str, f64); 5] = [
    ("b", 1.0),
    ("s_min", -2.0),
    ("s_max", 2.0),
    ("v_min", -1.0),
    ("v_max", 1.0),
];
const CYLINDER: [(&str, f64); 4] = [
    ("s_min", 0.0),
    ("s_max", 6.0),
    ("v_min", -1.0),
    ("v_max", 1.0),
];
const DEVELOPABLE: [(&str, f64); 7] = [
    ("r", FRAC_1_SQRT_2),
    ("R", 1.0),
    ("theta0", -1.0),
    ("s_min", 0.0),
    ("s_max", 0.5),
    ("v_min", -1.0),
    ("v_max", 1.0),
];

const R2: f64 = FRAC_1_SQRT_2;

static ENTRIES: [CatalogEntry; 10] = [
    CatalogEntry {
        name: "paper_spacelike",
        summary: "spacelike skew surface (cosh s, 0, sinh s) + v (sinh s, 1, cosh s)/sqrt 2",
        params: &DOMAIN,
        verbatim: false,
        build: skew_spacelike,
        expected: |_| Expected {
            class: Some(SurfaceClass::M2plus),
            drall: Some(-1.0),
            kappa: Some(-1.0),
            ds1_ds: Some(R2),
        },
    },
    CatalogEntry {
        name: "paper_offset_1",
        summary: "printed timelike offset with timelike rulings (constant angle, sinh^2 typo kept)",
        params: &SHORT,
        verbatim: true,
        build: printed_offset_1,
        expected: |_| Expected {
            class: Some(SurfaceClass::M1minus),
            ..Default::default()
        },
    },
    CatalogEntry {
        name: "paper_offset_2",
        summary:
            "printed timelike offset with spacelike rulings (constant angle, sinh^2 typo kept)",
        params: &SHORT,
        verbatim: true,
        build: printed_offset_2,
        expected: |_| Expected {
            class: Some(SurfaceClass::M1plus),
            ..Default::default()
        },
    },
    CatalogEntry {
        name: "paper_offset_1_corrected",
        summary:
            "offset of the spacelike skew surface with R = s and sinh(theta(0)) = sqrt 3, timelike rulings",
        params: &SHORT,
        verbatim: false,
        build: offset_1_corrected,
        expected: |_| Expected {
            class: Some(SurfaceClass::M1minus),
            ..Default::default()
        },
    },
    CatalogEntry {
        name: "paper_offset_2_corrected",
        summary:
            "offset of the spacelike skew surface with R = 3 and sinh(theta(0)) = sqrt 3, spacelike rulings",
        params: &SHORT,
        verbatim: false,
        build: offset_2_corrected,
        expected: |_| Expected {
            class: Some(SurfaceClass::M1plus),
            ..Default::default()
        },
    },
    CatalogEntry {
        name: "tangent_dev_hyperbolic",
        summary: "tangent developable of (r cosh s, w s, r sinh s), r^2 + w^2 = 1",
        params: &TANGENT,
        verbatim: false,
        build: tangent_dev_hyperbolic,
        expected: |p| {
            let r = p["r"];
            let w = (1.0 - r * r).sqrt();
            Expected {
                class: Some(SurfaceClass::M2plus),
                drall: Some(0.0),
                kappa: Some(-w / r),
                ds1_ds: Some(r),
            }
        },
    },
    CatalogEntry {
        name: "lorentz_cylinder",
        summary: "timelike cylinder over a spacelike circle; every ruling is cylindrical",
        params: &CYLINDER,
        verbatim: false,
        build: lorentz_cylinder,
        expected: |_| Expected::default(),
    },
    CatalogEntry {
        name: "hyperbolic_helicoid",
        summary: "(0, b s, 0) + v (sinh s, 0, cosh s), constant drall b",
        params: &HELICOID,
        verbatim: false,
        build: hyperbolic_helicoid,
        expected: |p| Expected {
            class: Some(SurfaceClass::M2plus),
            drall: Some(p["b"]),
            kappa: Some(0.0),
            ds1_ds: Some(1.0),
        },
    },
    CatalogEntry {
        name: "developable_coth",
        summary: "developable base whose timelike-ruling offset at distance R is developable",
        params: &DEVELOPABLE,
        verbatim: false,
        build: |p| developable(p, DevelopableBranch::Coth),
        expected: developable_expected,
    },
    CatalogEntry {
        name: "developable_tanh",
        summary: "developable base whose spacelike-ruling offset at distance R is developable",
        params: &DEVELOPABLE,
        verbatim: false,
        build: |p| developable(p, DevelopableBranch::Tanh),
        expected: developable_expected,
    },
];

fn developable_expected(p: &Params) -> Expected {
    let r = p["r"];
    let w = (1.0 - r * r).sqrt();
    Expected {
        class: Some(SurfaceClass::M2plus),
        drall: Some(0.0),
        kappa: Some(-w / r),
        ds1_ds: None,
    }
}

pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownEntry(name.to_string()))
}

pub fn get(name: &str, params: &Params) -> Result<RuledSurface> {
    entry(name)?.build(params)
}

/// Shorthand for building a parameter map.
pub fn params<const N: usize>(pairs: [(&str, f64); N]) -> Params {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
