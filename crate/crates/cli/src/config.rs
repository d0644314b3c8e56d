//! JSON surface configurations and their conversion into surfaces.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use minkruled::calculus::{CurveFn, ScalarFn};
use minkruled::catalog;
use minkruled::expr::Expr;
use minkruled::mannheim::{OffsetClass, OffsetSpec};
use minkruled::ruled::RuledSurface;
use minkruled::MVec3;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_SAMPLES: usize = 512;
pub const MIN_SAMPLES: usize = 16;

/// A number written either as a JSON literal or as an expression string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Value(f64),
    Expr(String),
}

impl Num {
    /// Parses a command-line value: a plain number or an expression.
    pub fn from_arg(text: &str) -> Num {
        text.trim()
            .parse()
            .map_or_else(|_| Num::Expr(text.to_string()), Num::Value)
    }

    fn parse(&self, field: &str) -> Result<Option<Expr>, CliError> {
        match self {
            Num::Value(_) => Ok(None),
            Num::Expr(text) => Expr::parse(text)
                .map(Some)
                .map_err(|e| CliError::Config(format!("{field}: {e} in `{text}`"))),
        }
    }

    /// Value of a constant field; expressions may use `params` only.
    pub fn constant(&self, field: &str, params: &HashMap<String, f64>) -> Result<f64, CliError> {
        let v = match (self, self.parse(field)?) {
            (Num::Value(v), _) => *v,
            (_, Some(e)) => {
                check_vars(&e, field, params, false)?;
                e.eval(params)
                    .map_err(|e| CliError::Config(format!("{field}: {e}")))?
            }
            _ => unreachable!(),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Config(format!(
                "{field}: value {v} is not finite"
            )))
        }
    }

    /// A function of `s`; constant fields give exact derivatives.
    pub fn function(&self, field: &str, fd_step: f64) -> Result<ScalarFn, CliError> {
        let none = HashMap::new();
        match self.parse(field)? {
            Some(e) if e.variables().iter().any(|v| v == "s") => {
                check_vars(&e, field, &none, true)?;
                Ok(ScalarFn::finite_difference(
                    move |s| e.eval_at(s, &HashMap::new()).unwrap_or(f64::NAN),
                    fd_step,
                ))
            }
            _ => Ok(ScalarFn::constant(self.constant(field, &none)?)),
        }
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Value(v) => write!(f, "{v}"),
            Num::Expr(e) => f.write_str(e),
        }
    }
}

fn check_vars(
    e: &Expr,
    field: &str,
    params: &HashMap<String, f64>,
    with_s: bool,
) -> Result<(), CliError> {
    for v in e.variables() {
        if !(params.contains_key(&v) || (with_s && v == "s")) {
            return Err(CliError::Config(format!("{field}: unbound variable `{v}`")));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "m1-", alias = "M1minus")]
    M1minus,
    #[serde(rename = "m1+", alias = "M1plus")]
    M1plus,
}

impl Target {
    pub fn parse(text: &str) -> Result<Target, String> {
        match text {
            "m1-" | "M1minus" => Ok(Target::M1minus),
            "m1+" | "M1plus" => Ok(Target::M1plus),
            other => Err(format!("expected m1- or m1+, got `{other}`")),
        }
    }

    pub fn class(self) -> OffsetClass {
        match self {
            Target::M1minus => OffsetClass::M1minus,
            Target::M1plus => OffsetClass::M1plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Catalog {
        name: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, Num>,
    },
    Expressions {
        k: [String; 3],
        q: [String; 3],
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, Num>,
    },
    /// The offset `c + R a + v q*` of another configured surface.
    Offset {
        base: Box<SurfaceConfig>,
        #[serde(rename = "R")]
        r: Num,
        theta0: Num,
        target: Target,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<Num>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_domain: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_domain: Option<[Num; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// How curves given only by values are differentiated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub fd_step: f64,
    /// Also replace analytic derivatives by finite differences.
    pub force_fd: bool,
}

pub fn load(path: &Path) -> Result<SurfaceConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text, &path.display().to_string())
}

pub fn parse(text: &str, origin: &str) -> Result<SurfaceConfig, CliError> {
    let cfg: SurfaceConfig = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_params(
    params: &BTreeMap<String, Num>,
    field: &str,
) -> Result<HashMap<String, f64>, CliError> {
    let mut out = HashMap::new();
    for (name, value) in params {
        if name == "s" {
            return Err(CliError::Config(format!(
                "{field}: `s` is reserved for the curve parameter"
            )));
        }
        let v = value.constant(&format!("{field}.{name}"), &out)?;
        out.insert(name.clone(), v);
    }
    Ok(out)
}

fn domain(d: &[Num; 2], field: &str) -> Result<(f64, f64), CliError> {
    let none = HashMap::new();
    let lo = d[0].constant(&format!("{field}[0]"), &none)?;
    let hi = d[1].constant(&format!("{field}[1]"), &none)?;
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(CliError::Config(format!(
            "{field}: need min < max, got [{lo}, {hi}]"
        )))
    }
}

impl SurfaceConfig {
    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    /// Checks everything that can be checked without building the surface.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.samples() < MIN_SAMPLES {
            return Err(CliError::Config(format!(
                "samples: need at least {MIN_SAMPLES}, got {}",
                self.samples()
            )));
        }
        if let Some(d) = &self.s_domain {
            domain(d, "s_domain")?;
        }
        if let Some(d) = &self.v_domain {
            domain(d, "v_domain")?;
        }
        match &self.source {
            Source::Catalog { params, .. } => {
                resolve_params(params, "source.catalog.params")?;
            }
            Source::Expressions { k, q, params } => {
                let p = resolve_params(params, "source.expressions.params")?;
                for (name, exprs) in [("k", k), ("q", q)] {
                    for (i, text) in exprs.iter().enumerate() {
                        let field = format!("source.expressions.{name}[{i}]");
                        let e = Num::Expr(text.clone()).parse(&field)?.expect("expression");
                        check_vars(&e, &field, &p, true)?;
                    }
                }
                if self.s_domain.is_none() || self.v_domain.is_none() {
                    return Err(CliError::Config(
                        "expression sources need both s_domain and v_domain".into(),
                    ));
                }
            }
            Source::Offset {
                base,
                r,
                theta0,
                anchor,
                ..
            } => {
                base.validate()?;
                r.parse("source.offset.R")?;
                theta0.constant("source.offset.theta0", &HashMap::new())?;
                if let Some(a) = anchor {
                    a.constant("source.offset.anchor", &HashMap::new())?;
                }
            }
        }
        Ok(())
    }

    pub fn build(&self, opts: BuildOptions) -> Result<RuledSurface, CliError> {
        self.build_within(opts, None, None)
    }

    fn build_within(
        &self,
        opts: BuildOptions,
        s_over: Option<(f64, f64)>,
        v_over: Option<(f64, f64)>,
    ) -> Result<RuledSurface, CliError> {
        let s_dom = match &self.s_domain {
            Some(d) => Some(domain(d, "s_domain")?),
            None => s_over,
        };
        let v_dom = match &self.v_domain {
            Some(d) => Some(domain(d, "v_domain")?),
            None => v_over,
        };
        match &self.source {
            Source::Catalog { name, params } => {
                let mut p: catalog::Params = resolve_params(params, "source.catalog.params")?
                    .into_iter()
                    .collect();
                if let Some((lo, hi)) = s_dom {
                    p.insert("s_min".into(), lo);
                    p.insert("s_max".into(), hi);
                }
                if let Some((lo, hi)) = v_dom {
                    p.insert("v_min".into(), lo);
                    p.insert("v_max".into(), hi);
                }
                let surf = catalog::get(name, &p)?;
                if opts.force_fd {
                    Ok(surf.to_finite_difference(opts.fd_step)?)
                } else {
                    Ok(surf)
                }
            }
            Source::Expressions { k, q, params } => {
                let p = resolve_params(params, "source.expressions.params")?;
                let (s_dom, v_dom) = match (s_dom, v_dom) {
                    (Some(s), Some(v)) => (s, v),
                    _ => {
                        return Err(CliError::Config(
                            "expression sources need both s_domain and v_domain".into(),
                        ))
                    }
                };
                let curve = |name: &str, texts: &[String; 3]| -> Result<CurveFn, CliError> {
                    let mut exprs = Vec::with_capacity(3);
                    for (i, text) in texts.iter().enumerate() {
                        let field = format!("source.expressions.{name}[{i}]");
                        exprs.push(Num::Expr(text.clone()).parse(&field)?.expect("expression"));
                    }
                    let p = p.clone();
                    let eval = move |s: f64| {
                        let c = |i: usize| exprs[i].eval_at(s, &p).unwrap_or(f64::NAN);
                        MVec3::new(c(0), c(1), c(2))
                    };
                    Ok(CurveFn::finite_difference(eval, opts.fd_step)?
                        .with_domain(s_dom.0, s_dom.1))
                };
                Ok(RuledSurface::new(
                    curve("k", k)?,
                    curve("q", q)?,
                    s_dom,
                    v_dom,
                )?)
            }
            Source::Offset { base, .. } => {
                let base = base.build_within(opts, s_dom, v_dom)?;
                let spec = self.offset_spec(opts)?.expect("offset source");
                Ok(minkruled::mannheim::build_offset(&base, &spec)?)
            }
        }
    }

    /// The base surface configuration of an offset source, with this
    /// configuration's domains applied.
    pub fn offset_base(&self) -> Option<SurfaceConfig> {
        match &self.source {
            Source::Offset { base, .. } => {
                let mut b = (**base).clone();
                if self.s_domain.is_some() {
                    b.s_domain = self.s_domain.clone();
                }
                if self.v_domain.is_some() {
                    b.v_domain = self.v_domain.clone();
                }
                Some(b)
            }
            _ => None,
        }
    }

    pub fn offset_spec(&self, opts: BuildOptions) -> Result<Option<OffsetSpec>, CliError> {
        let Source::Offset {
            r,
            theta0,
            target,
            anchor,
            ..
        } = &self.source
        else {
            return Ok(None);
        };
        let none = HashMap::new();
        let r = r.function("source.offset.R", opts.fd_step)?;
        let theta0 = theta0.constant("source.offset.theta0", &none)?;
        let mut spec = OffsetSpec::new(r, theta0, target.class());
        if let Some(a) = anchor {
            spec = spec.anchored_at(a.constant("source.offset.anchor", &none)?);
        }
        Ok(Some(spec))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPTS: BuildOptions = BuildOptions {
        fd_step: 1e-5,
        force_fd: false,
    };

    #[test]
    fn catalog_config_round_trips() {
        let text = r#"{"source": {"catalog": {"name": "tangent_dev_hyperbolic", "params": {"r": "sqrt(2)/2"}}},
                       "s_domain": [-1, 1], "samples": 64}"#;
        let cfg = parse(text, "inline").unwrap();
        assert_eq!(parse(&cfg.to_json(), "echo").unwrap(), cfg);
        let surf = cfg.build(OPTS).unwrap();
        assert_eq!(surf.s_domain, (-1.0, 1.0));
        assert!(surf.is_exact());
    }

    #[test]
    fn expression_config_builds() {
        let text = r#"{"source": {"expressions": {
                           "k": ["cosh(s)", "0", "sinh(s)"],
                           "q": ["c*sinh(s)", "c", "c*cosh(s)"],
                           "params": {"c": "sqrt(2)/2"}}},
                       "s_domain": [-2, 2], "v_domain": [-1, 1]}"#;
        let cfg = parse(text, "inline").unwrap();
        let surf = cfg.build(OPTS).unwrap();
        assert!(!surf.is_exact());
        let q = surf.q.value(0.0).unwrap();
        assert!((q.x2 - std::f64::consts::FRAC_1_SQRT_2).abs() <= 1e-15);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = r#"{"source": {"expressions": {"k": ["cosh(s", "0", "0"], "q": ["1", "0", "0"]}},
                      "s_domain": [0, 1], "v_domain": [0, 1]}"#;
        let e = parse(bad, "inline").unwrap_err().to_string();
        assert!(
            e.contains("source.expressions.k[0]") && e.contains("byte"),
            "{e}"
        );
        let unbound = r#"{"source": {"expressions": {"k": ["t", "0", "0"], "q": ["1", "0", "0"]}},
                          "s_domain": [0, 1], "v_domain": [0, 1]}"#;
        assert!(parse(unbound, "inline")
            .unwrap_err()
            .to_string()
            .contains("`t`"));
        let few = r#"{"source": {"catalog": {"name": "paper_spacelike"}}, "samples": 4}"#;
        assert!(parse(few, "inline").is_err());
        let json = r#"{"source": {"catalog": {"name": "paper_spacelike"}"#;
        assert!(matches!(
            parse(json, "inline"),
            Err(CliError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn offset_config_builds_and_round_trips() {
        let text = r#"{"source": {"offset": {
                           "base": {"source": {"catalog": {"name": "paper_spacelike"}}},
                           "R": "1 + s/4", "theta0": 1, "target": "m1-"}}}"#;
        let cfg = parse(text, "inline").unwrap();
        assert_eq!(parse(&cfg.to_json(), "echo").unwrap(), cfg);
        let surf = cfg.build(OPTS).unwrap();
        assert_eq!(surf.s_domain, (-2.0, 2.0));
        assert_eq!(
            cfg.offset_base().unwrap().source,
            Source::Catalog {
                name: "paper_spacelike".into(),
                params: BTreeMap::new()
            }
        );
    }

    #[test]
    fn numbers_from_arguments() {
        assert_eq!(Num::from_arg("1.5"), Num::Value(1.5));
        assert_eq!(Num::from_arg("1/w"), Num::Expr("1/w".into()));
        assert!(Target::parse("m1+").is_ok() && Target::parse("m2").is_err());
    }
}
