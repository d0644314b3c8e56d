//! Mannheim offsets of spacelike ruled surfaces: construction, the pair
//! predicate, and residual checks of the offset theorems.
//!
//! An offset of a base surface with frame `{q, h, a}` and striction curve
//! `c` has striction curve `c + R a` and a director rotated from `q`
//! towards `h` by the angle `θ`, so that its central normal is `a`.

use std::fmt;
use std::sync::Arc;

use crate::calculus::{ArcAccumulator, CurveFn, ScalarFn, DEFAULT_FD_STEP};
use crate::error::{Error, Result};
use crate::jet::{Jet, VJet};
use crate::lorentz::{mdot, MVec3};
use crate::par::{map_samples, Execution};
use crate::ruled::{
    classify_with, developability, drall, frame_jets, frenet_frame, striction_point, FrameJets,
    RuledSurface, SurfaceClass,
};

/// Default number of rulings sampled by the pair predicate and the checks.
pub const DEFAULT_SAMPLES: usize = 512;
/// Distance of `|Rκ ds₁/ds|` from 1 below which the developability
/// condition has no finite angle solution.
pub const DEGENERATE_TOL: f64 = 1e-6;
const THETA_CELLS: usize = 64;

pub type ThetaMap = Arc<dyn Fn(f64) -> Result<Jet> + Send + Sync>;

/// Causal type of the offset surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OffsetClass {
    M1minus,
    M1plus,
}

impl OffsetClass {
    pub fn surface_class(self) -> SurfaceClass {
        match self {
            OffsetClass::M1minus => SurfaceClass::M1minus,
            OffsetClass::M1plus => SurfaceClass::M1plus,
        }
    }
}

impl fmt::Display for OffsetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.surface_class(), f)
    }
}

#[derive(Clone, Debug)]
pub enum ThetaSource {
    /// `dθ/ds = -ds₁/ds` with `θ(anchor) = theta0`; the anchor defaults to
    /// the parameter origin clamped into the domain.
    Integrated {
        theta0: f64,
        anchor: Option<f64>,
    },
    Given(ScalarFn),
}

#[derive(Clone, Debug)]
pub struct OffsetSpec {
    pub r: ScalarFn,
    pub theta: ThetaSource,
    pub target: OffsetClass,
}

impl OffsetSpec {
    pub fn new(r: ScalarFn, theta0: f64, target: OffsetClass) -> OffsetSpec {
        OffsetSpec {
            r,
            theta: ThetaSource::Integrated {
                theta0,
                anchor: None,
            },
            target,
        }
    }

    pub fn anchored_at(mut self, anchor: f64) -> OffsetSpec {
        if let ThetaSource::Integrated { anchor: a, .. } = &mut self.theta {
            *a = Some(anchor);
        }
        self
    }

    pub fn with_theta(r: ScalarFn, theta: ScalarFn, target: OffsetClass) -> OffsetSpec {
        OffsetSpec {
            r,
            theta: ThetaSource::Given(theta),
            target,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.r.is_exact()
            && match &self.theta {
                ThetaSource::Integrated { .. } => true,
                ThetaSource::Given(f) => f.is_exact(),
            }
    }
}

fn resolve_theta(base: &RuledSurface, spec: &OffsetSpec) -> Result<ThetaMap> {
    match &spec.theta {
        ThetaSource::Given(f) => {
            let f = f.clone();
            Ok(Arc::new(move |s| f.jet(s)))
        }
        ThetaSource::Integrated { theta0, anchor } => {
            let (lo, hi) = base.s_domain;
            let anchor = anchor.unwrap_or(0.0f64.clamp(lo, hi));
            let b = base.clone();
            let rate =
                Arc::new(move |s: f64| frame_jets(&b, s).map_or(f64::NAN, |f| f.sigma.value()));
            let acc = Arc::new(ArcAccumulator::new(rate, lo, hi, THETA_CELLS)?);
            let at_anchor = acc.cumulative(anchor)?;
            let theta0 = *theta0;
            let b = base.clone();
            Ok(Arc::new(move |s| {
                let theta = theta0 - (acc.cumulative(s)? - at_anchor);
                let sigma = frame_jets(&b, s)?.sigma;
                let order = (sigma.order + 1).min(3);
                Ok(Jet::new(
                    [theta, -sigma.d[0], -sigma.d[1], -sigma.d[2]],
                    order,
                ))
            }))
        }
    }
}

fn offset_director(fj: &FrameJets, theta: &Jet, target: OffsetClass) -> VJet {
    let (sh, ch) = (theta.sinh(), theta.cosh());
    let q = &fj.ruling.q_hat;
    match target {
        OffsetClass::M1minus => q.scale(&sh) + fj.h.scale(&ch),
        OffsetClass::M1plus => q.scale(&ch) + fj.h.scale(&sh),
    }
}

/// The offset's asymptotic normal expressed in the base frame.
fn offset_asymptotic(fj: &FrameJets, theta: &Jet, target: OffsetClass) -> VJet {
    let flipped = match target {
        OffsetClass::M1minus => OffsetClass::M1plus,
        OffsetClass::M1plus => OffsetClass::M1minus,
    };
    offset_director(fj, theta, flipped)
}

fn require_m2plus(base: &RuledSurface) -> Result<()> {
    match classify_with(base, DEFAULT_SAMPLES, Execution::default()) {
        SurfaceClass::M2plus => Ok(()),
        other => Err(Error::UnsupportedClass(format!(
            "offsets need a spacelike (M2plus) base, found {other}"
        ))),
    }
}

fn construct(base: &RuledSurface, spec: &OffsetSpec) -> Result<(RuledSurface, ThetaMap)> {
    require_m2plus(base)?;
    let theta = resolve_theta(base, spec)?;
    let exact = base.is_exact() && spec.is_exact();
    let (b, r) = (base.clone(), spec.r.clone());
    let k = CurveFn::derived(
        move |s| {
            let fj = frame_jets(&b, s)?;
            Ok(fj.c + fj.a.scale(&r.jet(s)?))
        },
        exact,
    );
    let (b, th, target) = (base.clone(), Arc::clone(&theta), spec.target);
    let q = CurveFn::derived(
        move |s| {
            let fj = frame_jets(&b, s)?;
            Ok(offset_director(&fj, &th(s)?, target))
        },
        exact,
    );
    let k = k.with_domain(base.s_domain.0, base.s_domain.1);
    let q = q.with_domain(base.s_domain.0, base.s_domain.1);
    let surf = RuledSurface::new(k, q, base.s_domain, base.v_domain)?;
    if let Some(s) = base
        .samples(3)
        .into_iter()
        .find(|&s| frame_jets(base, s).is_err())
    {
        return Err(Error::FrameFailure {
            s,
            reason: "base frame unavailable".into(),
        });
    }
    Ok((surf, theta))
}

/// Offset surface `c + R a + v q*` of a spacelike base.
pub fn build_offset(base: &RuledSurface, spec: &OffsetSpec) -> Result<RuledSurface> {
    construct(base, spec).map(|(s, _)| s)
}

/// A base surface, a candidate offset and the alignment `|1 - |⟨h*, a⟩||`
/// of the candidate's central normal with the base's asymptotic normal.
#[derive(Clone)]
pub struct MannheimPair {
    pub base: RuledSurface,
    pub offset: RuledSurface,
    pub spec: OffsetSpec,
    theta: ThetaMap,
    pub samples: Vec<f64>,
    pub alignment: Vec<f64>,
    /// Rulings where the candidate is cylindrical and the defect is undefined.
    pub skipped: Vec<f64>,
    /// Sign of `⟨h*, a⟩` at the first usable sample.
    pub sign: f64,
    pub max_defect: f64,
    pub tol: f64,
    pub certified: bool,
    /// True when `R` and `θ` were recovered from a given candidate surface.
    pub recovered: bool,
    pub warnings: Vec<String>,
}

impl fmt::Debug for MannheimPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MannheimPair")
            .field("target", &self.spec.target)
            .field("max_defect", &self.max_defect)
            .field("certified", &self.certified)
            .field("skipped", &self.skipped.len())
            .finish()
    }
}

struct PairPoint {
    fj: FrameJets,
    r: Jet,
    theta: Jet,
    nu: f64,
}

impl MannheimPair {
    /// Builds the offset described by `spec` and certifies the pair.
    pub fn construct(base: &RuledSurface, spec: OffsetSpec, tol: f64) -> Result<MannheimPair> {
        MannheimPair::construct_with(base, spec, tol, DEFAULT_SAMPLES, Execution::default())
    }

    pub fn construct_with(
        base: &RuledSurface,
        spec: OffsetSpec,
        tol: f64,
        samples: usize,
        exec: Execution,
    ) -> Result<MannheimPair> {
        let (offset, theta) = construct(base, &spec)?;
        let mut pair = MannheimPair {
            base: base.clone(),
            offset,
            spec,
            theta,
            samples: Vec::new(),
            alignment: Vec::new(),
            skipped: Vec::new(),
            sign: 1.0,
            max_defect: f64::NAN,
            tol,
            certified: false,
            recovered: false,
            warnings: Vec::new(),
        };
        pair.certify(samples, exec)?;
        Ok(pair)
    }

    fn certify(&mut self, samples: usize, exec: Execution) -> Result<()> {
        let grid = self.base.samples(samples);
        let (base, cand) = (&self.base, &self.offset);
        let rows = map_samples(&grid, exec, |s| -> Result<Option<f64>> {
            let a = frenet_frame(base, s)?.a;
            match frenet_frame(cand, s) {
                Ok(f) => Ok(Some(mdot(f.h, a))),
                Err(Error::CylindricalRuling(_)) => Ok(None),
                Err(e) => Err(e),
            }
        });
        self.samples.clear();
        self.alignment.clear();
        self.skipped.clear();
        let mut sign = None;
        for (s, row) in grid.into_iter().zip(rows) {
            match row? {
                Some(p) => {
                    sign.get_or_insert(p.signum());
                    self.samples.push(s);
                    self.alignment.push((1.0 - p.abs()).abs());
                }
                None => self.skipped.push(s),
            }
        }
        if !self.skipped.is_empty() {
            self.warnings.push(format!(
                "cylindrical ruling of the offset at {} sample(s), first at s={}",
                self.skipped.len(),
                self.skipped[0]
            ));
        }
        if self.samples.is_empty() {
            return Err(Error::Degenerate(
                "offset is cylindrical at every sample".into(),
            ));
        }
        self.sign = sign.unwrap_or(1.0);
        self.max_defect = self.alignment.iter().copied().fold(0.0, f64::max);
        self.certified = self.max_defect <= self.tol;
        Ok(())
    }

    pub fn theta(&self, s: f64) -> Result<f64> {
        Ok((self.theta)(s)?.value())
    }

    fn point(&self, s: f64) -> Result<PairPoint> {
        let fj = frame_jets(&self.base, s)?;
        let cp = fj.c.deriv()?.value();
        let nu = mdot(cp, fj.ruling.q_hat.value()) * fj.eps2;
        Ok(PairPoint {
            r: self.spec.r.jet(s)?,
            theta: (self.theta)(s)?,
            nu,
            fj,
        })
    }

    fn require_certified(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            Err(Error::PreconditionViolated(format!(
                "pair is not certified (max alignment defect {:e} > {:e})",
                self.max_defect, self.tol
            )))
        }
    }

    fn require_developable_base(&self, tol: f64) -> Result<f64> {
        let rep = developability(
            &self.base,
            tol,
            self.samples.len().max(2),
            Execution::default(),
        )?;
        if rep.developable {
            Ok(rep.max_abs_drall)
        } else {
            Err(Error::PreconditionViolated(format!(
                "base is not developable (max |drall| = {:e})",
                rep.max_abs_drall
            )))
        }
    }

    fn max_rate_of_r(&self) -> Result<f64> {
        self.samples
            .iter()
            .map(|&s| Ok(self.spec.r.jet(s)?.d[1].abs()))
            .try_fold(0.0, |m: f64, v: Result<f64>| Ok(m.max(v?)))
    }

    fn require_constant_r(&self, tol: f64) -> Result<f64> {
        let rate = self.max_rate_of_r()?;
        if rate <= tol {
            Ok(rate)
        } else {
            Err(Error::PreconditionViolated(format!(
                "offset distance R is not constant (max |dR/ds| = {rate:e})"
            )))
        }
    }
}

/// Spacing of the interior nodes used to extrapolate past the domain ends.
const EXTRAPOLATION_NODE: f64 = 1e-3;

/// `f` inside `[lo, hi]`; outside, the cubic through four nodes next to the
/// nearest end, so difference stencils at the ends stay finite.
fn extend_past_ends<F>(lo: f64, hi: f64, f: F) -> impl Fn(f64) -> f64 + Send + Sync + 'static
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    move |s| {
        let (end, dir) = if s < lo {
            (lo, 1.0)
        } else if s > hi {
            (hi, -1.0)
        } else {
            return f(s);
        };
        // node i sits at end + dir·i·δ; x is s in units of δ from the end
        let x = (s - end) * dir / EXTRAPOLATION_NODE;
        (0..4)
            .map(|i| {
                let weight: f64 = (0..4)
                    .filter(|&j| j != i)
                    .map(|j| (x - j as f64) / (i as f64 - j as f64))
                    .product();
                weight * f(end + dir * i as f64 * EXTRAPOLATION_NODE)
            })
            .sum()
    }
}

/// Tests whether `cand` is a Mannheim offset of `base` along the shared
/// parameter. `R` and `θ` are recovered from the candidate's geometry.
pub fn is_mannheim_pair(
    base: &RuledSurface,
    cand: &RuledSurface,
    tol: f64,
) -> Result<MannheimPair> {
    is_mannheim_pair_with(base, cand, tol, DEFAULT_SAMPLES, Execution::default())
}

pub fn is_mannheim_pair_with(
    base: &RuledSurface,
    cand: &RuledSurface,
    tol: f64,
    samples: usize,
    exec: Execution,
) -> Result<MannheimPair> {
    require_m2plus(base)?;
    let cand_class = classify_with(cand, samples, exec);
    let target = match &cand_class {
        SurfaceClass::M1minus => OffsetClass::M1minus,
        SurfaceClass::M1plus | SurfaceClass::M2plus => OffsetClass::M1plus,
        SurfaceClass::Unsupported(r) => {
            if !r.contains("dq/ds") {
                return Err(Error::UnsupportedClass(r.clone()));
            }
            match cand.q.value(cand.s_domain.0).map(|q| mdot(q, q) < 0.0) {
                Ok(true) => OffsetClass::M1minus,
                _ => OffsetClass::M1plus,
            }
        }
    };
    let (lo, hi) = base.s_domain;
    let (b, c) = (base.clone(), cand.clone());
    let r = ScalarFn::finite_difference(
        extend_past_ends(lo, hi, move |s| {
            let f = frenet_frame(&b, s);
            let cs = striction_point(&c, s);
            match (f, cs) {
                (Ok(f), Ok(cs)) => mdot(cs - f.c, f.a),
                _ => f64::NAN,
            }
        }),
        DEFAULT_FD_STEP,
    );
    let (b, c) = (base.clone(), cand.clone());
    let theta = ScalarFn::finite_difference(
        extend_past_ends(lo, hi, move |s| {
            let (Ok(f), Ok(qs)) = (frenet_frame(&b, s), c.q.value(s)) else {
                return f64::NAN;
            };
            let qs = qs / qs.norm();
            let (alpha, beta) = (mdot(qs, f.q_hat), -mdot(qs, f.h));
            match target {
                OffsetClass::M1minus => (alpha * beta.signum()).asinh(),
                OffsetClass::M1plus => (-mdot(qs, f.h) * alpha.signum()).asinh(),
            }
        }),
        DEFAULT_FD_STEP,
    );
    let spec = OffsetSpec::with_theta(r, theta, target);
    let theta_map = resolve_theta(base, &spec)?;
    let mut pair = MannheimPair {
        base: base.clone(),
        offset: cand.clone(),
        spec,
        theta: theta_map,
        samples: Vec::new(),
        alignment: Vec::new(),
        skipped: Vec::new(),
        sign: 1.0,
        max_defect: f64::NAN,
        tol,
        certified: false,
        recovered: true,
        warnings: Vec::new(),
    };
    if !cand_class.is_supported() {
        pair.warnings.push(format!("candidate class: {cand_class}"));
    }
    pair.certify(samples, exec)?;
    Ok(pair)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// Striction-rate identity linking `dR/ds` to the base drall.
    OffsetDistance,
    /// Developability of the offset over a developable base.
    OffsetDevelopability,
    /// Rate identity for the conical curvature.
    CurvatureRate,
    /// Trajectory surfaces of the offset's central and asymptotic normals.
    Trajectories,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [
        Theorem::OffsetDistance,
        Theorem::OffsetDevelopability,
        Theorem::CurvatureRate,
        Theorem::Trajectories,
    ];

    /// Short identifier used on the command line and in reports.
    pub fn id(self) -> &'static str {
        match self {
            Theorem::OffsetDistance => "4.1",
            Theorem::OffsetDevelopability => "5.1",
            Theorem::CurvatureRate => "5.2",
            Theorem::Trajectories => "cor",
        }
    }

    pub fn from_id(id: &str) -> Option<Theorem> {
        Theorem::ALL.into_iter().find(|t| t.id() == id)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Degenerate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Degenerate => "degenerate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: &'static str,
    pub values: Vec<f64>,
}

impl Series {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn min_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Residual series of one theorem check with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub s: Vec<f64>,
    /// The first series is the primary (relative) residual.
    pub series: Vec<Series>,
    pub max_residual: f64,
    pub tol: f64,
    pub verdict: Verdict,
    pub facts: Vec<(&'static str, f64)>,
    pub flags: Vec<(&'static str, bool)>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(theorem: Theorem, s: Vec<f64>, series: Vec<Series>, tol: f64) -> VerificationReport {
        let max_residual = series.first().map_or(0.0, Series::max_abs);
        VerificationReport {
            theorem,
            s,
            series,
            max_residual,
            tol,
            verdict: Verdict::Fail,
            facts: Vec::new(),
            flags: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn series(&self, name: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.name == name)
    }

    pub fn fact(&self, name: &str) -> Option<f64> {
        self.facts.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }

    pub fn flag(&self, name: &str) -> Option<bool> {
        self.flags.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }
}

fn rel(value: f64, terms: &[f64]) -> f64 {
    value / terms.iter().fold(1.0f64, |m, t| m.max(t.abs()))
}

fn collect<T>(rows: Vec<Result<T>>) -> Result<Vec<T>> {
    rows.into_iter().collect()
}

/// Checks `dR/ds + (ds₁/ds)·drall = 0` along the pair (the condition for
/// `c + R a` to be the offset's striction curve) together with the
/// equivalence "base developable ⇔ R constant".
pub fn check_theorem_4_1(pair: &MannheimPair, tol: f64) -> Result<VerificationReport> {
    pair.require_certified()?;
    let rows = collect(map_samples(
        &pair.samples,
        Execution::default(),
        |s| -> Result<[f64; 5]> {
            let p = pair.point(s)?;
            let sigma = p.fj.sigma.value();
            let d = drall(&pair.base, s)?;
            let dr = p.r.d[1];
            let predicted = p.fj.c.value() + p.fj.a.value() * p.r.value();
            let striction_gap = match striction_point(&pair.offset, s) {
                Ok(cs) => (cs - predicted).max_abs() / predicted.max_abs().max(1.0),
                Err(_) => f64::NAN,
            };
            Ok([
                rel(dr + sigma * d, &[dr, sigma * d]),
                dr + sigma * d,
                dr - sigma * d,
                d,
                striction_gap,
            ])
        },
    ))?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    let series = vec![
        Series {
            name: "striction_rate",
            values: col(0),
        },
        Series {
            name: "striction_rate_abs",
            values: col(1),
        },
        Series {
            name: "opposite_sign_rate",
            values: col(2),
        },
        Series {
            name: "base_drall",
            values: col(3),
        },
        Series {
            name: "striction_gap",
            values: col(4),
        },
    ];
    let mut rep =
        VerificationReport::new(Theorem::OffsetDistance, pair.samples.clone(), series, tol);
    let developable = rep.series("base_drall").map_or(0.0, Series::max_abs) <= tol;
    let r_rate = pair.max_rate_of_r()?;
    let r_constant = r_rate <= tol;
    let equivalence = developable == r_constant;
    let gap = rep
        .series("striction_gap")
        .map_or(f64::NAN, Series::max_abs);
    rep.facts.push(("max_dr_ds", r_rate));
    rep.facts.push((
        "max_opposite_sign_rate",
        rep.series("opposite_sign_rate")
            .map_or(0.0, Series::max_abs),
    ));
    rep.facts.push(("max_striction_gap", gap));
    rep.flags.push(("base_developable", developable));
    rep.flags.push(("r_constant", r_constant));
    rep.flags.push(("equivalence", equivalence));
    rep.verdict = if rep.max_residual <= tol && equivalence {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(rep)
}

fn developability_condition(p: &PairPoint, target: OffsetClass) -> (f64, f64) {
    let f = p.r.value() * p.fj.kappa.value() * p.fj.sigma.value();
    let th = p.theta.value();
    let (sh, ch) = (th.sinh(), th.cosh());
    let (x, y) = match target {
        OffsetClass::M1minus => (p.nu * ch, f * sh),
        OffsetClass::M1plus => (p.nu * sh, f * ch),
    };
    (rel(x - y, &[x, y]), f)
}

/// Checks, ruling by ruling, that the offset's drall vanishes exactly
/// where the hyperbolic developability condition holds.
pub fn check_theorem_5_1(pair: &MannheimPair, tol: f64) -> Result<VerificationReport> {
    pair.require_certified()?;
    pair.require_developable_base(tol)?;
    pair.require_constant_r(tol)?;
    let target = pair.spec.target;
    let rows = collect(map_samples(
        &pair.samples,
        Execution::default(),
        |s| -> Result<[f64; 3]> {
            let p = pair.point(s)?;
            let (cond, f) = developability_condition(&p, target);
            Ok([cond, drall(&pair.offset, s)?, f])
        },
    ))?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    let series = vec![
        Series {
            name: "condition",
            values: col(0),
        },
        Series {
            name: "offset_drall",
            values: col(1),
        },
        Series {
            name: "r_kappa_rate",
            values: col(2),
        },
    ];
    let mut rep = VerificationReport::new(
        Theorem::OffsetDevelopability,
        pair.samples.clone(),
        series,
        tol,
    );
    let (mut both_zero, mut both_nonzero, mut mismatched) = (0usize, 0usize, 0usize);
    for r in &rows {
        match (r[0].abs() <= tol, r[1].abs() <= tol) {
            (true, true) => both_zero += 1,
            (false, false) => both_nonzero += 1,
            _ => mismatched += 1,
        }
    }
    let closest = rows
        .iter()
        .map(|r| (r[2].abs() - 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    rep.facts.push(("both_zero", both_zero as f64));
    rep.facts.push(("both_nonzero", both_nonzero as f64));
    rep.facts.push(("mismatched", mismatched as f64));
    rep.facts.push(("min_abs_r_kappa_rate_minus_one", closest));
    rep.flags
        .push(("offset_developable", rows.iter().all(|r| r[1].abs() <= tol)));
    rep.verdict = if closest <= DEGENERATE_TOL {
        rep.notes.push(
            "|R kappa ds1/ds| = 1: the condition has no finite angle solution and the offset director tends to a null direction".into(),
        );
        Verdict::Degenerate
    } else if mismatched == 0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(rep)
}

/// Checks the conical-curvature rate identity and its equivalence with
/// developability of the offset.
pub fn check_theorem_5_2(pair: &MannheimPair, tol: f64) -> Result<VerificationReport> {
    pair.require_certified()?;
    pair.require_developable_base(tol)?;
    pair.require_constant_r(tol)?;
    let r0 = pair.spec.r.value(pair.samples[0]);
    if r0.abs() <= tol {
        return Err(Error::PreconditionViolated(format!(
            "offset distance R must be nonzero, got {r0:e}"
        )));
    }
    let target = pair.spec.target;
    let causal = pair.base.causal_tol;
    let rows = collect(map_samples(
        &pair.samples,
        Execution::default(),
        |s| -> Result<[f64; 3]> {
            let p = pair.point(s)?;
            let (k, dk) = (p.fj.kappa.value(), p.fj.kappa.get(1)?);
            let (sig, dsig) = (p.fj.sigma.value(), p.fj.sigma.get(1)?);
            if sig <= causal {
                return Ok([f64::NAN; 3]);
            }
            let r = p.r.value();
            let t1 = r * k * k * sig * sig;
            let t2 = 1.0 / r;
            let t3 = dsig * k / sig;
            let res = dk - (t1 - t2 - t3);
            let (cond, _) = developability_condition(&p, target);
            Ok([rel(res, &[dk, t1, t2, t3]), res, cond])
        },
    ))?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    let series = vec![
        Series {
            name: "curvature_rate",
            values: col(0),
        },
        Series {
            name: "curvature_rate_abs",
            values: col(1),
        },
        Series {
            name: "condition",
            values: col(2),
        },
    ];
    let mut rep =
        VerificationReport::new(Theorem::CurvatureRate, pair.samples.clone(), series, tol);
    if rows.iter().any(|r| r[0].is_nan()) {
        rep.notes.push("ds1/ds vanishes at some sample".into());
        rep.verdict = Verdict::Degenerate;
        return Ok(rep);
    }
    let offset_dev = developability(
        &pair.offset,
        tol,
        pair.samples.len().max(2),
        Execution::default(),
    )?;
    let identity = rep.max_residual <= tol;
    let anchor = rows[0][2].abs() <= tol;
    let f_closest = collect(
        pair.samples
            .iter()
            .map(|&s| {
                let p = pair.point(s)?;
                Ok(((p.r.value() * p.fj.kappa.value() * p.fj.sigma.value()).abs() - 1.0).abs())
            })
            .collect(),
    )?
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    rep.facts
        .push(("offset_max_abs_drall", offset_dev.max_abs_drall));
    rep.facts.push(("anchor_condition", rows[0][2]));
    rep.facts
        .push(("min_abs_r_kappa_rate_minus_one", f_closest));
    rep.flags.push(("identity_holds", identity));
    rep.flags.push(("anchor_condition_holds", anchor));
    rep.flags
        .push(("offset_developable", offset_dev.developable));
    if f_closest <= DEGENERATE_TOL {
        rep.notes.push(
            "|R kappa ds1/ds| = 1: the identity can hold while no finite angle makes the offset developable".into(),
        );
    }
    rep.verdict = if offset_dev.developable == (identity && anchor) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(rep)
}

/// Ruled surfaces over the offset's striction curve generated by the
/// offset's central normal and asymptotic normal.
pub fn trajectory_surfaces(pair: &MannheimPair) -> Result<(RuledSurface, RuledSurface)> {
    let exact = pair.base.is_exact() && pair.spec.is_exact();
    let base_curve = |p: &MannheimPair| {
        let (b, r) = (p.base.clone(), p.spec.r.clone());
        CurveFn::derived(
            move |s| {
                let fj = frame_jets(&b, s)?;
                Ok(fj.c + fj.a.scale(&r.jet(s)?))
            },
            exact,
        )
    };
    let b = pair.base.clone();
    let dir_h = CurveFn::derived(move |s| Ok(frame_jets(&b, s)?.a), exact);
    let (b, th, target) = (pair.base.clone(), Arc::clone(&pair.theta), pair.spec.target);
    let dir_a = CurveFn::derived(
        move |s| Ok(offset_asymptotic(&frame_jets(&b, s)?, &th(s)?, target)),
        exact,
    );
    let (sd, vd) = (pair.base.s_domain, pair.base.v_domain);
    let wrap = |k: CurveFn, q: CurveFn| -> Result<RuledSurface> {
        RuledSurface::new(k.with_domain(sd.0, sd.1), q.with_domain(sd.0, sd.1), sd, vd)
    };
    let check = |surf: &RuledSurface| -> Result<()> {
        frenet_frame(surf, pair.samples[0])
            .map(|_| ())
            .map_err(|e| Error::FrameFailure {
                s: pair.samples[0],
                reason: e.to_string(),
            })
    };
    let ph = wrap(base_curve(pair), dir_h)?;
    let pa = wrap(base_curve(pair), dir_a.clone())?;
    check(&ph)?;
    check(&pa)?;
    Ok((ph, pa))
}

/// Checks the trajectory-surface statements: the central-normal surface is
/// a Bertrand offset and the asymptotic-normal surface a Mannheim offset of
/// the base, both dralls match their closed forms, the central-normal
/// surface is never developable, and the asymptotic-normal surface is
/// developable exactly where its closed-form numerator vanishes.
pub fn check_corollaries(pair: &MannheimPair, tol: f64) -> Result<VerificationReport> {
    pair.require_certified()?;
    pair.require_developable_base(tol)?;
    let (ph, pa) = trajectory_surfaces(pair)?;
    let target = pair.spec.target;
    let rows = collect(map_samples(
        &pair.samples,
        Execution::default(),
        |s| -> Result<[f64; 8]> {
            let p = pair.point(s)?;
            let (k, sig) = (p.fj.kappa.value(), p.fj.sigma.value());
            let ks = k * sig;
            if ks.abs() <= DEGENERATE_TOL {
                return Ok([f64::NAN; 8]);
            }
            let base = p.fj.frame();
            let fh = frenet_frame(&ph, s)?;
            let fa = frenet_frame(&pa, s)?;
            let bertrand = (1.0 - mdot(fh.h, base.h).abs()).abs();
            let mannheim = (1.0 - mdot(fa.h, base.a).abs()).abs();
            let dh = drall(&ph, s)?;
            let ph_closed = -p.nu / ks;
            let th = p.theta.value();
            let (sh, ch) = (th.sinh(), th.cosh());
            let r = p.r.value();
            let (num, den) = match target {
                OffsetClass::M1minus => (-p.nu * sh + r * ks * ch, ks * sh),
                OffsetClass::M1plus => (-p.nu * ch + r * ks * sh, ks * ch),
            };
            let da = drall(&pa, s)?;
            let pa_err = if den.abs() <= DEGENERATE_TOL {
                f64::NAN
            } else {
                let closed = num / den;
                (da - closed).abs() / closed.abs().max(1.0)
            };
            let ph_err = (dh - ph_closed).abs() / ph_closed.abs().max(1.0);
            Ok([
                bertrand
                    .max(mannheim)
                    .max(ph_err)
                    .max(if pa_err.is_nan() { 0.0 } else { pa_err }),
                bertrand,
                mannheim,
                ph_err,
                pa_err,
                dh,
                da,
                rel(num, &[p.nu * sh, p.nu * ch, r * ks * ch, r * ks * sh]),
            ])
        },
    ))?;
    let col = |i: usize| rows.iter().map(|r| r[i]).collect::<Vec<_>>();
    let names = [
        "combined",
        "bertrand_alignment",
        "mannheim_alignment",
        "central_drall_error",
        "asymptotic_drall_error",
        "central_drall",
        "asymptotic_drall",
        "asymptotic_condition",
    ];
    let series = names
        .iter()
        .enumerate()
        .map(|(i, &name)| Series {
            name,
            values: col(i),
        })
        .collect();
    let mut rep = VerificationReport::new(Theorem::Trajectories, pair.samples.clone(), series, tol);
    if rows.iter().any(|r| r[0].is_nan()) {
        rep.notes
            .push("kappa ds1/ds vanishes: the central-normal drall is singular".into());
        rep.verdict = Verdict::Degenerate;
        return Ok(rep);
    }
    let skipped = rows.iter().filter(|r| r[4].is_nan()).count();
    if skipped > 0 {
        rep.notes.push(format!(
            "asymptotic drall closed form singular at {skipped} sample(s)"
        ));
    }
    let nondevelopable = rows.iter().all(|r| r[5].abs() > tol);
    let equivalence = rows
        .iter()
        .all(|r| (r[6].abs() <= tol) == (r[7].abs() <= tol));
    rep.flags
        .push(("central_surface_nondevelopable", nondevelopable));
    rep.flags
        .push(("asymptotic_developability_equivalence", equivalence));
    rep.flags.push((
        "asymptotic_surface_developable",
        rows.iter().all(|r| r[6].abs() <= tol),
    ));
    rep.verdict = if rep.max_residual <= tol && nondevelopable && equivalence {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(rep)
}

/// Runs the requested checks, in order.
pub fn verify(
    pair: &MannheimPair,
    theorems: &[Theorem],
    tol: f64,
    rate_tol: f64,
) -> Vec<Result<VerificationReport>> {
    theorems
        .iter()
        .map(|t| match t {
            Theorem::OffsetDistance => check_theorem_4_1(pair, tol),
            Theorem::OffsetDevelopability => check_theorem_5_1(pair, tol),
            Theorem::CurvatureRate => check_theorem_5_2(pair, rate_tol),
            Theorem::Trajectories => check_corollaries(pair, tol),
        })
        .collect()
}

/// `c* - c` and its projections onto `q̂` and `h` at `s`.
pub fn offset_displacement(pair: &MannheimPair, s: f64) -> Result<(MVec3, f64, f64)> {
    let p = pair.point(s)?;
    let f = p.fj.frame();
    let cs = pair.offset.k.value(s)?;
    let d = cs - f.c;
    Ok((d, mdot(d, f.q_hat), mdot(d, f.h)))
}
