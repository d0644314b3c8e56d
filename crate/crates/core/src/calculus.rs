//! Curves with derivative access, finite differences and quadrature.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, VJet, MAX_ORDER};
use crate::lorentz::MVec3;

/// A vector-valued map of the curve parameter.
pub type VecMap = Arc<dyn Fn(f64) -> MVec3 + Send + Sync>;
/// A scalar map of the curve parameter.
pub type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// A map returning the value and derivatives of a curve at once.
pub type JetMap = Arc<dyn Fn(f64) -> Result<VJet> + Send + Sync>;

/// Default base step for central differences.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Step multipliers for first, second and third derivatives.
const STEP_SCALE: [f64; 3] = [1.0, 30.0, 100.0];

#[derive(Clone)]
pub enum DerivativeMode {
    /// User-supplied first, second and third derivatives.
    Analytic { d1: VecMap, d2: VecMap, d3: VecMap },
    /// Central differences with base step `h`, scaled by `max(1, |s|)`.
    FiniteDifference { h: f64 },
    /// Derivatives propagated exactly from other curves.
    Derived { jet: JetMap, exact: bool },
}

/// A parametrized curve `s -> MVec3` with derivative access up to order 3.
#[derive(Clone)]
pub struct CurveFn {
    eval: VecMap,
    mode: DerivativeMode,
    domain: Option<(f64, f64)>,
}

impl fmt::Debug for CurveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match &self.mode {
            DerivativeMode::Analytic { .. } => "analytic".to_string(),
            DerivativeMode::FiniteDifference { h } => format!("fd(h={h})"),
            DerivativeMode::Derived { exact, .. } => format!("derived(exact={exact})"),
        };
        f.debug_struct("CurveFn")
            .field("mode", &mode)
            .field("domain", &self.domain)
            .finish()
    }
}

impl CurveFn {
    pub fn analytic<F, D1, D2, D3>(f: F, d1: D1, d2: D2, d3: D3) -> CurveFn
    where
        F: Fn(f64) -> MVec3 + Send + Sync + 'static,
        D1: Fn(f64) -> MVec3 + Send + Sync + 'static,
        D2: Fn(f64) -> MVec3 + Send + Sync + 'static,
        D3: Fn(f64) -> MVec3 + Send + Sync + 'static,
    {
        CurveFn {
            eval: Arc::new(f),
            mode: DerivativeMode::Analytic {
                d1: Arc::new(d1),
                d2: Arc::new(d2),
                d3: Arc::new(d3),
            },
            domain: None,
        }
    }

    pub fn finite_difference<F>(f: F, h: f64) -> Result<CurveFn>
    where
        F: Fn(f64) -> MVec3 + Send + Sync + 'static,
    {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::BadParameter {
                name: "fd_step".into(),
                reason: format!("step must be positive and finite, got {h}"),
            });
        }
        Ok(CurveFn {
            eval: Arc::new(f),
            mode: DerivativeMode::FiniteDifference { h },
            domain: None,
        })
    }

    /// A curve whose jets come from `jet`; `exact` tells whether they carry
    /// analytic or finite-difference accuracy.
    pub fn derived<J>(jet: J, exact: bool) -> CurveFn
    where
        J: Fn(f64) -> Result<VJet> + Send + Sync + 'static,
    {
        let jet: JetMap = Arc::new(jet);
        let j2 = Arc::clone(&jet);
        CurveFn {
            eval: Arc::new(move |s| {
                j2(s).map_or(MVec3::new(f64::NAN, f64::NAN, f64::NAN), |j| j.value())
            }),
            mode: DerivativeMode::Derived { jet, exact },
            domain: None,
        }
    }

    /// A curve that is constant in `s`.
    pub fn constant(v: MVec3) -> CurveFn {
        CurveFn::analytic(
            move |_| v,
            |_| MVec3::ZERO,
            |_| MVec3::ZERO,
            |_| MVec3::ZERO,
        )
    }

    /// Restricts evaluation to `[lo, hi]`.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> CurveFn {
        self.domain = Some((lo, hi));
        self
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        self.domain
    }

    pub fn mode(&self) -> &DerivativeMode {
        &self.mode
    }

    /// True unless derivatives come from finite differences somewhere.
    pub fn is_exact(&self) -> bool {
        match &self.mode {
            DerivativeMode::Analytic { .. } => true,
            DerivativeMode::FiniteDifference { .. } => false,
            DerivativeMode::Derived { exact, .. } => *exact,
        }
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        if let Some((lo, hi)) = self.domain {
            let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
            if !(s >= lo - slack && s <= hi + slack) {
                return Err(Error::OutOfDomain { s, lo, hi });
            }
        }
        Ok(())
    }

    pub fn value(&self, s: f64) -> Result<MVec3> {
        self.check_domain(s)?;
        let v = match &self.mode {
            DerivativeMode::Derived { jet, .. } => jet(s)?.value(),
            _ => (self.eval)(s),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(s))
        }
    }

    /// Value and first three derivatives (fewer for derived curves).
    pub fn jet(&self, s: f64) -> Result<VJet> {
        self.check_domain(s)?;
        let j = match &self.mode {
            DerivativeMode::Analytic { d1, d2, d3 } => {
                VJet::new([(self.eval)(s), d1(s), d2(s), d3(s)], MAX_ORDER)
            }
            DerivativeMode::FiniteDifference { h } => {
                let mut d = [(self.eval)(s); MAX_ORDER + 1];
                for (order, slot) in d.iter_mut().enumerate().skip(1) {
                    *slot = central_difference(&*self.eval, s, order, *h);
                }
                VJet::new(d, MAX_ORDER)
            }
            DerivativeMode::Derived { jet, .. } => jet(s)?,
        };
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::NonFinite(s))
        }
    }
}

/// The `order`-th derivative of `f` at `s`.
pub fn differentiate(f: &CurveFn, s: f64, order: usize) -> Result<MVec3> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::OrderUnsupported(order));
    }
    f.jet(s)?.get(order)
}

/// Step actually used for a derivative of the given order at `s`.
pub fn fd_step(h: f64, s: f64, order: usize) -> f64 {
    h * STEP_SCALE[order - 1] * s.abs().max(1.0)
}

/// Second-order accurate central difference of order 1, 2 or 3.
pub fn central_difference<F, T>(f: &F, s: f64, order: usize, h: f64) -> T
where
    F: Fn(f64) -> T + ?Sized,
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    let h = fd_step(h, s, order);
    match order {
        1 => (f(s + h) - f(s - h)) * (0.5 / h),
        2 => (f(s + h) - f(s) * 2.0 + f(s - h)) * (1.0 / (h * h)),
        3 => {
            (f(s + 2.0 * h) - f(s + h) * 2.0 + f(s - h) * 2.0 - f(s - 2.0 * h))
                * (0.5 / (h * h * h))
        }
        _ => unreachable!("order checked by caller"),
    }
}

/// Fourth-order five-point first derivative with fixed step `h`.
pub fn five_point<F, T>(f: F, s: f64, h: f64) -> T
where
    F: Fn(f64) -> T,
    T: Copy
        + std::ops::Add<Output = T>
        + std::ops::Sub<Output = T>
        + std::ops::Mul<f64, Output = T>,
{
    (f(s - 2.0 * h) - f(s - h) * 8.0 + f(s + h) * 8.0 - f(s + 2.0 * h)) * (1.0 / (12.0 * h))
}

/// A scalar function of `s` with optional analytic derivatives.
#[derive(Clone)]
pub struct ScalarFn {
    eval: RealMap,
    derivs: Option<[RealMap; 3]>,
    fd_step: f64,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("analytic", &self.derivs.is_some())
            .finish()
    }
}

impl ScalarFn {
    pub fn constant(c: f64) -> ScalarFn {
        let zero: RealMap = Arc::new(|_| 0.0);
        ScalarFn {
            eval: Arc::new(move |_| c),
            derivs: Some([zero.clone(), zero.clone(), zero]),
            fd_step: DEFAULT_FD_STEP,
        }
    }

    /// `a + b s`.
    pub fn linear(a: f64, b: f64) -> ScalarFn {
        let zero: RealMap = Arc::new(|_| 0.0);
        ScalarFn {
            eval: Arc::new(move |s| a + b * s),
            derivs: Some([Arc::new(move |_| b), zero.clone(), zero]),
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn analytic<F, D1, D2, D3>(f: F, d1: D1, d2: D2, d3: D3) -> ScalarFn
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
        D3: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarFn {
            eval: Arc::new(f),
            derivs: Some([Arc::new(d1), Arc::new(d2), Arc::new(d3)]),
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn finite_difference<F>(f: F, h: f64) -> ScalarFn
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ScalarFn {
            eval: Arc::new(f),
            derivs: None,
            fd_step: h,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.derivs.is_some()
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    pub fn jet(&self, s: f64) -> Result<Jet> {
        let v = (self.eval)(s);
        let d = match &self.derivs {
            Some([d1, d2, d3]) => [v, d1(s), d2(s), d3(s)],
            None => {
                let f = &*self.eval;
                [
                    v,
                    central_difference(f, s, 1, self.fd_step),
                    central_difference(f, s, 2, self.fd_step),
                    central_difference(f, s, 3, self.fd_step),
                ]
            }
        };
        let j = Jet::new(d, MAX_ORDER);
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::NonFinite(s))
        }
    }
}

const SIMPSON_TOL: f64 = 1e-10;
const SIMPSON_DEPTH: u32 = 40;
/// Levels always subdivided, so a lucky coarse estimate cannot stop early.
const SIMPSON_MIN_LEVELS: u32 = 4;

fn checked<F: Fn(f64) -> f64>(f: &F, s: f64) -> Result<f64> {
    let y = f(s);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteRate(s))
    }
}

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    (a, fa): (f64, f64),
    (m, fm): (f64, f64),
    (b, fb): (f64, f64),
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = checked(f, lm)?;
    let frm = checked(f, rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let settled = depth + SIMPSON_MIN_LEVELS <= SIMPSON_DEPTH && delta.abs() <= 15.0 * tol;
    if depth == 0 || settled {
        return Ok(left + right + delta / 15.0);
    }
    Ok(
        simpson_step(f, (a, fa), (lm, flm), (m, fm), left, 0.5 * tol, depth - 1)?
            + simpson_step(f, (m, fm), (rm, frm), (b, fb), right, 0.5 * tol, depth - 1)?,
    )
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` (signed if `b < a`).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (checked(&f, a)?, checked(&f, m)?, checked(&f, b)?);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(
        &f,
        (a, fa),
        (m, fm),
        (b, fb),
        whole,
        SIMPSON_TOL,
        SIMPSON_DEPTH,
    )
}

/// `∫ rate` over `[s0, s1]`.
pub fn arc_length<F: Fn(f64) -> f64>(rate: F, s0: f64, s1: f64) -> Result<f64> {
    integrate(rate, s0, s1)
}

/// Angle function obeying `dθ/ds = -rate`, with `θ(0) = theta0`.
pub fn integrate_theta<F: Fn(f64) -> f64>(rate_s1: F, theta0: f64, s: f64) -> Result<f64> {
    integrate_theta_from(rate_s1, theta0, 0.0, s)
}

/// As [`integrate_theta`], anchored at `s0` instead of the origin.
pub fn integrate_theta_from<F: Fn(f64) -> f64>(
    rate_s1: F,
    theta0: f64,
    s0: f64,
    s: f64,
) -> Result<f64> {
    Ok(theta0 - integrate(rate_s1, s0, s)?)
}

/// Cumulative arc length of a nonnegative rate over a fixed interval.
///
/// The interval is cut into equal cells whose integrals are computed once,
/// so each lookup only integrates inside a single cell.
pub struct ArcAccumulator {
    rate: RealMap,
    start: f64,
    end: f64,
    cell: f64,
    knots: Vec<f64>,
}

impl fmt::Debug for ArcAccumulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArcAccumulator")
            .field("start", &self.start)
            .field("end", &self.end)
            .field("cells", &(self.knots.len() - 1))
            .finish()
    }
}

impl ArcAccumulator {
    pub fn new(rate: RealMap, start: f64, end: f64, cells: usize) -> Result<ArcAccumulator> {
        if end.partial_cmp(&start) != Some(std::cmp::Ordering::Greater) || cells == 0 {
            return Err(Error::BadParameter {
                name: "interval".into(),
                reason: format!("need start < end and cells > 0, got [{start}, {end}] / {cells}"),
            });
        }
        let cell = (end - start) / cells as f64;
        let mut knots = Vec::with_capacity(cells + 1);
        knots.push(0.0);
        let mut total = 0.0;
        for i in 0..cells {
            let a = start + i as f64 * cell;
            total += integrate(&*rate, a, a + cell)?;
            knots.push(total);
        }
        Ok(ArcAccumulator {
            rate,
            start,
            end,
            cell,
            knots,
        })
    }

    pub fn rate(&self, s: f64) -> f64 {
        (self.rate)(s)
    }

    /// Integral of the rate from the interval start to `s`.
    pub fn cumulative(&self, s: f64) -> Result<f64> {
        let slack = 1e-9 * self.cell;
        if !(s >= self.start - slack && s <= self.end + slack) {
            return Err(Error::OutOfDomain {
                s,
                lo: self.start,
                hi: self.end,
            });
        }
        let last = self.knots.len() - 2;
        let i = (((s - self.start) / self.cell).floor().max(0.0) as usize).min(last);
        let a = self.start + i as f64 * self.cell;
        Ok(self.knots[i] + integrate(&*self.rate, a, s)?)
    }
}
