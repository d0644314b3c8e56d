//! Ruled surfaces `φ(s, v) = k(s) + v q(s)`: striction curve, distribution
//! parameter, Frenet frame, causal type and conical curvature.

use std::fmt;

use crate::calculus::CurveFn;
use crate::error::{Error, Result};
use crate::jet::{Jet, VJet};
use crate::lorentz::{causal_character, lcross, mdot, mixed, CausalCharacter, MVec3, CAUSAL_TOL};
use crate::par::{map_samples, sample_grid, Execution};

/// Number of samples used to certify a surface's class.
pub const CLASSIFY_SAMPLES: usize = 512;
/// Euclidean size below which `dq̂/ds` counts as vanishing.
pub const CYLINDER_TOL: f64 = 1e-9;
/// Step of the five-point probe used for frame residuals.
pub const PROBE_STEP: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct RuledSurface {
    pub k: CurveFn,
    pub q: CurveFn,
    pub s_domain: (f64, f64),
    pub v_domain: (f64, f64),
    pub causal_tol: f64,
}

impl RuledSurface {
    pub fn new(k: CurveFn, q: CurveFn, s_domain: (f64, f64), v_domain: (f64, f64)) -> Result<Self> {
        for (name, (lo, hi)) in [("s_domain", s_domain), ("v_domain", v_domain)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::BadParameter {
                    name: name.into(),
                    reason: format!("need finite lo < hi, got [{lo}, {hi}]"),
                });
            }
        }
        Ok(RuledSurface {
            k,
            q,
            s_domain,
            v_domain,
            causal_tol: CAUSAL_TOL,
        })
    }

    /// True when both curves carry analytic-accuracy derivatives.
    pub fn is_exact(&self) -> bool {
        self.k.is_exact() && self.q.is_exact()
    }

    /// Default residual tolerance for this surface's derivative accuracy.
    pub fn default_tol(&self) -> f64 {
        if self.is_exact() {
            1e-9
        } else {
            1e-6
        }
    }

    pub fn check_s(&self, s: f64) -> Result<()> {
        check_range(s, self.s_domain)
    }

    pub fn samples(&self, n: usize) -> Vec<f64> {
        sample_grid(self.s_domain.0, self.s_domain.1, n)
    }

    /// The same surface with derivatives taken by central differences of
    /// step `h` instead of the curves' own derivatives.
    ///
    /// Stencils reaching past the domain see the Taylor polynomial of the
    /// curve at the nearest end.
    pub fn to_finite_difference(&self, h: f64) -> Result<RuledSurface> {
        let (lo, hi) = self.s_domain;
        let wrap = |c: &CurveFn| -> Result<CurveFn> {
            let c = c.clone();
            let eval = move |s: f64| {
                let end = s.clamp(lo, hi);
                if end == s {
                    return c.value(s).unwrap_or(MVec3::NAN);
                }
                let Ok(j) = c.jet(end) else { return MVec3::NAN };
                let (mut term, mut out) = (1.0, j.value());
                for n in 1..=3 {
                    term *= (s - end) / n as f64;
                    match j.get(n) {
                        Ok(d) => out += d * term,
                        Err(_) => break,
                    }
                }
                out
            };
            Ok(CurveFn::finite_difference(eval, h)?.with_domain(lo, hi))
        };
        Ok(RuledSurface {
            k: wrap(&self.k)?,
            q: wrap(&self.q)?,
            ..self.clone()
        })
    }

    /// Samples kept `margin` away from both ends of the domain.
    pub fn interior_samples(&self, n: usize, margin: f64) -> Vec<f64> {
        sample_grid(self.s_domain.0 + margin, self.s_domain.1 - margin, n)
    }
}

fn check_range(x: f64, (lo, hi): (f64, f64)) -> Result<()> {
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if x >= lo - slack && x <= hi + slack {
        Ok(())
    } else {
        Err(Error::OutOfDomain { s: x, lo, hi })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurfaceClass {
    M1minus,
    M1plus,
    M2plus,
    Unsupported(String),
}

impl SurfaceClass {
    pub fn is_supported(&self) -> bool {
        !matches!(self, SurfaceClass::Unsupported(_))
    }

    /// `(ε₁, ε₂) = (⟨h,h⟩, ⟨q,q⟩)`.
    pub fn signs(&self) -> Option<(f64, f64)> {
        match self {
            SurfaceClass::M1minus => Some((1.0, -1.0)),
            SurfaceClass::M1plus => Some((1.0, 1.0)),
            SurfaceClass::M2plus => Some((-1.0, 1.0)),
            SurfaceClass::Unsupported(_) => None,
        }
    }

    pub fn is_timelike_surface(&self) -> bool {
        matches!(self, SurfaceClass::M1minus | SurfaceClass::M1plus)
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceClass::M1minus => f.write_str("M1minus"),
            SurfaceClass::M1plus => f.write_str("M1plus"),
            SurfaceClass::M2plus => f.write_str("M2plus"),
            SurfaceClass::Unsupported(r) => write!(f, "Unsupported({r})"),
        }
    }
}

/// Frenet data at the striction point of the ruling `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrictionFrame {
    pub s: f64,
    pub c: MVec3,
    pub q_hat: MVec3,
    pub h: MVec3,
    pub a: MVec3,
    pub eps1: f64,
    pub eps2: f64,
    pub kappa: f64,
    pub ds1_ds: f64,
    pub darboux: MVec3,
}

impl StrictionFrame {
    pub fn class(&self) -> SurfaceClass {
        match (self.eps1 > 0.0, self.eps2 > 0.0) {
            (false, _) => SurfaceClass::M2plus,
            (true, false) => SurfaceClass::M1minus,
            (true, true) => SurfaceClass::M1plus,
        }
    }

    /// Expected `d/ds₁` of `(q̂, h, a)` from the Frenet matrix of the class.
    pub fn frenet_rhs(&self) -> [MVec3; 3] {
        let (q, h, a, k) = (self.q_hat, self.h, self.a, self.kappa);
        if self.eps1 < 0.0 {
            [h, q + a * k, h * k]
        } else {
            let e2 = self.eps2;
            [h, q * -e2 + a * k, h * (e2 * k)]
        }
    }
}

/// Ruling data: normalized director and its derivative.
pub(crate) struct RulingJets {
    pub s: f64,
    pub k: VJet,
    pub dk: VJet,
    pub q_hat: VJet,
    pub dq_hat: VJet,
    pub g: Jet,
}

/// Full frame data as jets in `s`.
pub(crate) struct FrameJets {
    pub ruling: RulingJets,
    pub class: SurfaceClass,
    pub c: VJet,
    pub h: VJet,
    pub a: VJet,
    pub sigma: Jet,
    pub kappa: Jet,
    pub eps1: f64,
    pub eps2: f64,
}

fn null_check(v: MVec3, tol: f64) -> bool {
    causal_character(v, tol) == CausalCharacter::Null
}

pub(crate) fn ruling_jets(surf: &RuledSurface, s: f64) -> Result<RulingJets> {
    surf.check_s(s)?;
    let q = surf.q.jet(s)?;
    let k = surf.k.jet(s)?;
    let q0 = q.value();
    if q0.max_abs() == 0.0 {
        return Err(Error::UnsupportedClass(format!("zero director at s={s}")));
    }
    if null_check(q0, surf.causal_tol) {
        return Err(Error::UnsupportedClass(format!("null director at s={s}")));
    }
    let n2 = q.dot(&q);
    let n = if n2.value() < 0.0 {
        (-n2).sqrt()
    } else {
        n2.sqrt()
    };
    let q_hat = q.scale(&n.recip());
    let dq_hat = q_hat.deriv()?;
    let d0 = dq_hat.value();
    if d0.euclid_norm() <= CYLINDER_TOL * q_hat.value().euclid_norm()
        || null_check(d0, surf.causal_tol)
    {
        return Err(Error::CylindricalRuling(s));
    }
    let g = dq_hat.dot(&dq_hat);
    let dk = k.deriv()?;
    Ok(RulingJets {
        s,
        k,
        dk,
        q_hat,
        dq_hat,
        g,
    })
}

pub(crate) fn frame_jets(surf: &RuledSurface, s: f64) -> Result<FrameJets> {
    let r = ruling_jets(surf, s)?;
    let eps2 = mdot(r.q_hat.value(), r.q_hat.value()).signum();
    let eps1 = r.g.value().signum();
    let class = match (eps1 > 0.0, eps2 > 0.0) {
        (false, true) => SurfaceClass::M2plus,
        (true, false) => SurfaceClass::M1minus,
        (true, true) => SurfaceClass::M1plus,
        (false, false) => {
            return Err(Error::UnsupportedClass(format!(
                "timelike director with timelike central normal at s={s}"
            )))
        }
    };
    let sigma = if eps1 < 0.0 {
        (-r.g).sqrt()
    } else {
        r.g.sqrt()
    };
    let inv_sigma = sigma.recip();
    let h = r.dq_hat.scale(&inv_sigma);
    let qxh = r.q_hat.cross(&h);
    let a = if eps1 < 0.0 {
        -qxh
    } else {
        qxh.scale_const(eps2)
    };
    let da_ds1 = a.deriv()?.scale(&inv_sigma);
    let proj = da_ds1.dot(&h);
    let kappa = if eps1 < 0.0 { -proj } else { proj.scale(eps2) };
    let t = r.dq_hat.dot(&r.dk) * r.g.recip();
    let c = r.k - r.q_hat.scale(&t);
    Ok(FrameJets {
        ruling: r,
        class,
        c,
        h,
        a,
        sigma,
        kappa,
        eps1,
        eps2,
    })
}

impl FrameJets {
    pub fn frame(&self) -> StrictionFrame {
        let q = self.ruling.q_hat.value();
        let a = self.a.value();
        let k = self.kappa.value();
        let darboux = if self.eps1 < 0.0 {
            q * -k + a
        } else {
            q * (self.eps2 * k) - a
        };
        StrictionFrame {
            s: self.ruling.s,
            c: self.c.value(),
            q_hat: q,
            h: self.h.value(),
            a,
            eps1: self.eps1,
            eps2: self.eps2,
            kappa: k,
            ds1_ds: self.sigma.value(),
            darboux,
        }
    }
}

pub fn eval_surface(surf: &RuledSurface, s: f64, v: f64) -> Result<MVec3> {
    surf.check_s(s)?;
    check_range(v, surf.v_domain)?;
    Ok(surf.k.value(s)? + surf.q.value(s)? * v)
}

pub fn striction_point(surf: &RuledSurface, s: f64) -> Result<MVec3> {
    let r = ruling_jets(surf, s)?;
    let (dq, dk) = (r.dq_hat.value(), r.dk.value());
    Ok(r.k.value() - r.q_hat.value() * (mdot(dq, dk) / r.g.value()))
}

/// The torsality bracket `|dk, q̂, dq̂|` of the ruling at `s`.
pub fn torsal_bracket(surf: &RuledSurface, s: f64) -> Result<f64> {
    let r = ruling_jets(surf, s)?;
    Ok(mixed(r.dk.value(), r.q_hat.value(), r.dq_hat.value()))
}

/// Distribution parameter of the ruling at `s`.
pub fn drall(surf: &RuledSurface, s: f64) -> Result<f64> {
    let r = ruling_jets(surf, s)?;
    Ok(mixed(r.dk.value(), r.q_hat.value(), r.dq_hat.value()) / r.g.value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RulingReport {
    pub s: f64,
    pub drall: f64,
    pub bracket: f64,
    pub torsal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DevelopabilityReport {
    pub rulings: Vec<RulingReport>,
    pub max_abs_drall: f64,
    pub developable: bool,
    pub tol: f64,
}

impl DevelopabilityReport {
    pub fn torsal_count(&self) -> usize {
        self.rulings.iter().filter(|r| r.torsal).count()
    }
}

pub fn developability(
    surf: &RuledSurface,
    tol: f64,
    samples: usize,
    exec: Execution,
) -> Result<DevelopabilityReport> {
    let grid = surf.samples(samples);
    let rulings = map_samples(&grid, exec, |s| -> Result<RulingReport> {
        let r = ruling_jets(surf, s)?;
        let bracket = mixed(r.dk.value(), r.q_hat.value(), r.dq_hat.value());
        Ok(RulingReport {
            s,
            drall: bracket / r.g.value(),
            bracket,
            torsal: bracket.abs() <= tol,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let max_abs_drall = rulings.iter().map(|r| r.drall.abs()).fold(0.0, f64::max);
    Ok(DevelopabilityReport {
        developable: max_abs_drall <= tol,
        max_abs_drall,
        rulings,
        tol,
    })
}

pub fn is_developable(surf: &RuledSurface, tol: f64) -> Result<bool> {
    Ok(developability(surf, tol, CLASSIFY_SAMPLES, Execution::default())?.developable)
}

pub fn surface_normal(surf: &RuledSurface, s: f64, v: f64) -> Result<MVec3> {
    surf.check_s(s)?;
    let kj = surf.k.jet(s)?;
    let qj = surf.q.jet(s)?;
    let phi_s = kj.get(1)? + qj.get(1)? * v;
    let phi_v = qj.value();
    let n = lcross(phi_s, phi_v);
    let scale = phi_s.euclid_norm() * phi_v.euclid_norm();
    if n.euclid_norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularPoint { s, v });
    }
    if null_check(n, surf.causal_tol) {
        return Err(Error::NullNormal { s, v });
    }
    Ok(n / n.norm())
}

pub fn classify(surf: &RuledSurface) -> SurfaceClass {
    classify_with(surf, CLASSIFY_SAMPLES, Execution::default())
}

pub fn classify_with(surf: &RuledSurface, samples: usize, exec: Execution) -> SurfaceClass {
    let grid = surf.samples(samples);
    let local = map_samples(&grid, exec, |s| frame_jets(surf, s).map(|f| f.class));
    let mut class: Option<SurfaceClass> = None;
    for (s, c) in grid.iter().zip(local) {
        let c = match c {
            Ok(c) => c,
            Err(Error::CylindricalRuling(_)) => {
                return SurfaceClass::Unsupported(format!("null or vanishing dq/ds at s={s}"))
            }
            Err(Error::UnsupportedClass(r)) => return SurfaceClass::Unsupported(r),
            Err(e) => return SurfaceClass::Unsupported(e.to_string()),
        };
        match &class {
            None => class = Some(c),
            Some(prev) if *prev != c => {
                return SurfaceClass::Unsupported(format!("class change at s={s}"))
            }
            _ => {}
        }
    }
    class.unwrap_or_else(|| SurfaceClass::Unsupported("no samples".into()))
}

pub fn frenet_frame(surf: &RuledSurface, s: f64) -> Result<StrictionFrame> {
    Ok(frame_jets(surf, s)?.frame())
}

pub fn conical_curvature(surf: &RuledSurface, s: f64) -> Result<f64> {
    Ok(frame_jets(surf, s)?.kappa.value())
}

/// Grid of surface points, row `i` at `s_i`, column `j` at `v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshGrid {
    pub rows: usize,
    pub cols: usize,
    pub vertices: Vec<MVec3>,
}

impl MeshGrid {
    pub fn vertex(&self, i: usize, j: usize) -> MVec3 {
        self.vertices[i * self.cols + j]
    }

    /// Quads as 0-based vertex indices.
    pub fn quads(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        let c = self.cols;
        (0..self.rows - 1).flat_map(move |i| {
            (0..c - 1).map(move |j| {
                [
                    i * c + j,
                    (i + 1) * c + j,
                    (i + 1) * c + j + 1,
                    i * c + j + 1,
                ]
            })
        })
    }

    pub fn quad_count(&self) -> usize {
        (self.rows - 1) * (self.cols - 1)
    }
}

pub fn sample_mesh(surf: &RuledSurface, rows: usize, cols: usize) -> Result<MeshGrid> {
    sample_mesh_with(surf, rows, cols, Execution::default())
}

pub fn sample_mesh_with(
    surf: &RuledSurface,
    rows: usize,
    cols: usize,
    exec: Execution,
) -> Result<MeshGrid> {
    if rows < 2 || cols < 2 {
        return Err(Error::BadParameter {
            name: "rows/cols".into(),
            reason: format!("need at least 2x2, got {rows}x{cols}"),
        });
    }
    let ss = surf.samples(rows);
    let vs = sample_grid(surf.v_domain.0, surf.v_domain.1, cols);
    let rows_out = map_samples(&ss, exec, |s| -> Result<Vec<MVec3>> {
        vs.iter().map(|&v| eval_surface(surf, s, v)).collect()
    });
    let mut vertices = Vec::with_capacity(rows * cols);
    for r in rows_out {
        vertices.extend(r?);
    }
    Ok(MeshGrid {
        rows,
        cols,
        vertices,
    })
}

/// Residuals of the frame relations at one ruling, each relative to the
/// size of the terms involved.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameResiduals {
    pub orthonormality: f64,
    pub products: f64,
    pub frenet: f64,
    pub darboux: f64,
}

impl FrameResiduals {
    pub fn max(&self) -> f64 {
        self.orthonormality
            .max(self.products)
            .max(self.frenet)
            .max(self.darboux)
    }

    pub fn merge(self, o: FrameResiduals) -> FrameResiduals {
        FrameResiduals {
            orthonormality: self.orthonormality.max(o.orthonormality),
            products: self.products.max(o.products),
            frenet: self.frenet.max(o.frenet),
            darboux: self.darboux.max(o.darboux),
        }
    }
}

fn rel(diff: MVec3, scale: f64) -> f64 {
    diff.max_abs() / scale.max(1.0)
}

/// Algebraic residuals: orthonormality, signature and the cross-product
/// identities of the class.
pub fn algebraic_residuals(f: &StrictionFrame) -> FrameResiduals {
    let (q, h, a) = (f.q_hat, f.h, f.a);
    let ortho = [
        mdot(q, h).abs(),
        mdot(h, a).abs(),
        mdot(a, q).abs(),
        (mdot(q, q) - f.eps2).abs(),
        (mdot(h, h) - f.eps1).abs(),
        (mdot(a, a) + f.eps1 * f.eps2).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let expected = if f.eps1 < 0.0 {
        [-a, -q, h]
    } else {
        [a * f.eps2, q * -f.eps2, -h]
    };
    let got = [lcross(q, h), lcross(h, a), lcross(a, q)];
    let products = got
        .iter()
        .zip(expected)
        .map(|(g, e)| rel(*g - e, e.max_abs()))
        .fold(0.0, f64::max);
    FrameResiduals {
        orthonormality: ortho,
        products,
        ..Default::default()
    }
}

/// Frame residuals at `s`, with frame derivatives taken by a five-point
/// probe of neighbouring frames (independent of the jets used to build them).
pub fn frame_residuals(surf: &RuledSurface, s: f64) -> Result<FrameResiduals> {
    let f = frenet_frame(surf, s)?;
    let probe = |t: f64| -> [MVec3; 3] {
        match frenet_frame(surf, t) {
            Ok(g) => [g.q_hat, g.h, g.a],
            Err(_) => [MVec3::new(f64::NAN, f64::NAN, f64::NAN); 3],
        }
    };
    let samples: Vec<[MVec3; 3]> = [-2.0, -1.0, 1.0, 2.0]
        .iter()
        .map(|m| probe(s + m * PROBE_STEP))
        .collect();
    let deriv = |i: usize| -> MVec3 {
        let [m2, m1, p1, p2] = [samples[0][i], samples[1][i], samples[2][i], samples[3][i]];
        (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * PROBE_STEP * f.ds1_ds)
    };
    let d = [deriv(0), deriv(1), deriv(2)];
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::FrameFailure {
            s,
            reason: "frame probe left the supported region".into(),
        });
    }
    let rhs = f.frenet_rhs();
    let frenet = d
        .iter()
        .zip(rhs)
        .map(|(got, want)| rel(*got - want, want.max_abs()))
        .fold(0.0, f64::max);
    let darboux = d
        .iter()
        .zip([f.q_hat, f.h, f.a])
        .map(|(got, x)| {
            let want = lcross(f.darboux, x);
            rel(*got - want, want.max_abs())
        })
        .fold(0.0, f64::max);
    Ok(FrameResiduals {
        frenet,
        darboux,
        ..algebraic_residuals(&f)
    })
}

/// Largest frame residuals over interior samples of the domain.
pub fn max_frame_residuals(
    surf: &RuledSurface,
    samples: usize,
    exec: Execution,
) -> Result<FrameResiduals> {
    let grid = surf.interior_samples(samples, 2.0 * PROBE_STEP);
    map_samples(&grid, exec, |s| frame_residuals(surf, s))
        .into_iter()
        .try_fold(FrameResiduals::default(), |acc, r| Ok(acc.merge(r?)))
}
