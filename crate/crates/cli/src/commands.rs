//! The four subcommands. Each returns a report and an exit code.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use minkruled::mannheim::{self, MannheimPair, Theorem, Verdict, VerificationReport};
use minkruled::par::{map_samples, Execution};
use minkruled::ruled::{
    classify_with, developability, frenet_frame, max_frame_residuals, sample_mesh_with, MeshGrid,
    RuledSurface, StrictionFrame, SurfaceClass,
};
use minkruled::Error;

use crate::config::{self, BuildOptions, Num, Source, SurfaceConfig, Target};
use crate::error::{exit, CliError};
use crate::report::{prose, Report};

pub const DEFAULT_CERT_TOL: f64 = 1e-6;
/// Floor of the rate tolerance when derivatives come from finite differences.
pub const FD_RATE_TOL: f64 = 1e-4;
const TABLE_ROWS: usize = 9;

#[derive(Debug, Clone, Copy, Default)]
pub struct Globals {
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub fd_step: Option<f64>,
}

impl Globals {
    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            fd_step: self.fd_step.unwrap_or(minkruled::calculus::DEFAULT_FD_STEP),
            force_fd: self.fd_step.is_some(),
        }
    }

    fn samples(&self, cfg: &SurfaceConfig) -> usize {
        self.samples.unwrap_or_else(|| cfg.samples())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(n) = self.samples {
            if n < config::MIN_SAMPLES {
                return Err(CliError::Config(format!(
                    "--samples: need at least {}, got {n}",
                    config::MIN_SAMPLES
                )));
            }
        }
        for (name, v) in [("--tol", self.tol), ("--fd-step", self.fd_step)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Config(format!(
                        "{name}: need a positive number, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub code: i32,
}

fn echo(report: &mut Report, label: &str, cfg: &SurfaceConfig) {
    report.echo(label, cfg.to_json());
}

pub fn analyze(path: &Path, g: &Globals) -> Result<Outcome, CliError> {
    let cfg = config::load(path)?;
    let surf = cfg.build(g.build_options())?;
    let n = g.samples(&cfg);
    let exec = Execution::default();
    let mut report = Report::new("analyze");
    echo(&mut report, "input", &cfg);
    report.line(format!(
        "surface over s in [{}, {}], v in [{}, {}], {} samples, {} derivatives",
        prose(surf.s_domain.0),
        prose(surf.s_domain.1),
        prose(surf.v_domain.0),
        prose(surf.v_domain.1),
        n,
        if surf.is_exact() {
            "analytic"
        } else {
            "finite-difference"
        }
    ));
    report.num("s_min", surf.s_domain.0);
    report.num("s_max", surf.s_domain.1);
    report.key("samples", n);
    report.key("exact", surf.is_exact());

    let class = classify_with(&surf, n, exec);
    report.line(format!("class: {class}"));
    if let SurfaceClass::Unsupported(reason) = &class {
        report.key("class", "Unsupported");
        if reason.contains("dq/ds") {
            report.warn("cylindrical ruling: striction undefined");
        }
        report.warn(format!("unsupported surface: {reason}"));
        return Ok(Outcome {
            report,
            code: exit::UNSUPPORTED,
        });
    }
    report.key("class", &class);

    let grid = surf.samples(n);
    let frames: Vec<StrictionFrame> = map_samples(&grid, exec, |s| frenet_frame(&surf, s))
        .into_iter()
        .collect::<Result<_, Error>>()?;
    let tol = g.tol.unwrap_or_else(|| surf.default_tol());
    let dev = developability(&surf, tol, n, exec)?;

    report.line("");
    report.line(format!(
        "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "s", "c1", "c2", "c3", "drall", "kappa", "ds1/ds"
    ));
    for idx in table_rows(grid.len()) {
        let (f, d) = (&frames[idx], &dev.rulings[idx]);
        report.line(format!(
            "{:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            prose(f.s),
            prose(f.c.x1),
            prose(f.c.x2),
            prose(f.c.x3),
            prose(d.drall),
            prose(f.kappa),
            prose(f.ds1_ds)
        ));
        report.num(format!("striction.{idx}.s"), f.s);
        report.num(format!("striction.{idx}.x1"), f.c.x1);
        report.num(format!("striction.{idx}.x2"), f.c.x2);
        report.num(format!("striction.{idx}.x3"), f.c.x3);
    }
    report.line("");
    let series: [(&str, Vec<f64>); 3] = [
        ("drall", dev.rulings.iter().map(|r| r.drall).collect()),
        ("kappa", frames.iter().map(|f| f.kappa).collect()),
        ("ds1_ds", frames.iter().map(|f| f.ds1_ds).collect()),
    ];
    for (name, values) in &series {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        report.line(format!("{name}: min {} max {}", prose(lo), prose(hi)));
        report.num(format!("{name}.min"), lo);
        report.num(format!("{name}.max"), hi);
    }

    let res = max_frame_residuals(&surf, n, exec)?;
    report.line(format!(
        "frame residuals: orthonormality {} products {} frenet {} darboux {}",
        prose(res.orthonormality),
        prose(res.products),
        prose(res.frenet),
        prose(res.darboux)
    ));
    report.num("residual.orthonormality", res.orthonormality);
    report.num("residual.products", res.products);
    report.num("residual.frenet", res.frenet);
    report.num("residual.darboux", res.darboux);

    report.line(format!(
        "developable: {} (max |drall| {} at tol {})",
        dev.developable,
        prose(dev.max_abs_drall),
        prose(tol)
    ));
    report.key("developable", dev.developable);
    report.num("developability.tol", tol);
    report.num("max_abs_drall", dev.max_abs_drall);
    report.key("torsal_rulings", dev.torsal_count());
    if !dev.developable && dev.torsal_count() > 0 {
        let first = dev
            .rulings
            .iter()
            .find(|r| r.torsal)
            .map_or(f64::NAN, |r| r.s);
        report.warn(format!(
            "{} torsal ruling(s), first at s={}",
            dev.torsal_count(),
            prose(first)
        ));
    }
    Ok(Outcome {
        report,
        code: exit::OK,
    })
}

/// Indices of an evenly spread subset of the samples.
fn table_rows(n: usize) -> Vec<usize> {
    if n <= TABLE_ROWS {
        return (0..n).collect();
    }
    (0..TABLE_ROWS)
        .map(|i| i * (n - 1) / (TABLE_ROWS - 1))
        .collect()
}

pub struct OffsetArgs {
    pub config: PathBuf,
    pub r: String,
    pub theta0: f64,
    pub target: Target,
    pub anchor: Option<f64>,
    pub out: PathBuf,
}

pub fn offset(args: &OffsetArgs, g: &Globals) -> Result<Outcome, CliError> {
    let base_cfg = config::load(&args.config)?;
    let out_cfg = SurfaceConfig {
        source: Source::Offset {
            base: Box::new(base_cfg.clone()),
            r: Num::from_arg(&args.r),
            theta0: Num::Value(args.theta0),
            target: args.target,
            anchor: args.anchor.map(Num::Value),
        },
        s_domain: None,
        v_domain: None,
        samples: base_cfg.samples,
    };
    out_cfg.validate()?;
    let opts = g.build_options();
    let base = base_cfg.build(opts)?;
    let spec = out_cfg.offset_spec(opts)?.expect("offset source");
    let n = g.samples(&base_cfg);
    let tol = g.tol.unwrap_or(DEFAULT_CERT_TOL);
    let pair = MannheimPair::construct_with(&base, spec, tol, n, Execution::default())?;

    write_file(&args.out, out_cfg.to_json().as_bytes())?;

    let mut report = Report::new("offset");
    echo(&mut report, "base", &base_cfg);
    echo(&mut report, "offset", &out_cfg);
    let class = classify_with(&pair.offset, n, Execution::default());
    report.line(format!(
        "target class: {}",
        args.target.class().surface_class()
    ));
    report.line(format!("offset class: {class}"));
    report.line(format!(
        "Mannheim defect: max {} over {} rulings (tol {})",
        prose(pair.max_defect),
        pair.samples.len(),
        prose(tol)
    ));
    report.line(format!("certified: {}", pair.certified));
    report.line(format!("offset written to {}", args.out.display()));
    report.line("");
    report.line(format!(
        "{:>12} {:>12} {:>12} {:>12}",
        "s", "R", "theta", "defect"
    ));
    for idx in table_rows(pair.samples.len()) {
        let s = pair.samples[idx];
        report.line(format!(
            "{:>12} {:>12} {:>12} {:>12}",
            prose(s),
            prose(pair.spec.r.value(s)),
            prose(pair.theta(s)?),
            prose(pair.alignment[idx])
        ));
    }
    report.key("target", args.target.class().surface_class());
    report.key("offset_class", &class);
    report.num("defect.max", pair.max_defect);
    report.num("defect.tol", tol);
    report.key("defect.samples", pair.samples.len());
    report.key("certified", pair.certified);
    report.key("out", args.out.display());

    let max_r = pair
        .samples
        .iter()
        .map(|&s| pair.spec.r.value(s).abs())
        .fold(0.0, f64::max);
    if max_r == 0.0 {
        report.warn("degenerate distance: R vanishes identically, the offset shares the base striction curve");
    }
    if class != args.target.class().surface_class() {
        report.warn(format!(
            "offset classifies as {class}, not the requested target"
        ));
    }
    for w in &pair.warnings {
        report.warn(w.clone());
    }
    let code = if pair.certified {
        exit::OK
    } else {
        exit::PRECONDITION
    };
    Ok(Outcome { report, code })
}

pub fn parse_theorems(list: &str) -> Result<Vec<Theorem>, CliError> {
    if list.trim() == "all" {
        return Ok(Theorem::ALL.to_vec());
    }
    let mut out = Vec::new();
    for id in list.split(',').map(str::trim) {
        let t = Theorem::from_id(id).ok_or_else(|| {
            CliError::Config(format!(
                "--theorems: unknown id `{id}` (use 4.1, 5.1, 5.2, cor)"
            ))
        })?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

pub fn verify(
    base_path: &Path,
    offset_path: &Path,
    theorems: &[Theorem],
    g: &Globals,
) -> Result<Outcome, CliError> {
    let base_cfg = config::load(base_path)?;
    let off_cfg = config::load(offset_path)?;
    let opts = g.build_options();
    let n = g.samples(&base_cfg);
    let tol = g.tol.unwrap_or(DEFAULT_CERT_TOL);
    let exec = Execution::default();

    let shares_base = matches!(&off_cfg.source, Source::Offset { base, .. } if **base == base_cfg);
    let pair = if shares_base {
        let base = off_cfg.offset_base().expect("offset source").build(opts)?;
        let spec = off_cfg.offset_spec(opts)?.expect("offset source");
        MannheimPair::construct_with(&base, spec, tol, n, exec)?
    } else {
        let base = base_cfg.build(opts)?;
        let cand = off_cfg.build(opts)?;
        mannheim::is_mannheim_pair_with(&base, &cand, tol, n, exec)?
    };
    let exact = pair.base.is_exact() && pair.spec.is_exact();
    let rate_tol = if exact { tol } else { tol.max(FD_RATE_TOL) };

    let mut report = Report::new("verify");
    echo(&mut report, "base", &base_cfg);
    echo(&mut report, "offset", &off_cfg);
    report.line(format!(
        "pair: {} from the offset configuration, defect {} ({} rulings), certified {}",
        if pair.recovered {
            "R and theta recovered"
        } else {
            "R and theta taken"
        },
        prose(pair.max_defect),
        pair.samples.len(),
        pair.certified
    ));
    report.key("pair.recovered", pair.recovered);
    report.num("pair.defect", pair.max_defect);
    report.key("pair.certified", pair.certified);
    report.num("tol", tol);
    report.num("rate_tol", rate_tol);
    for w in &pair.warnings {
        report.warn(w.clone());
    }

    let mut any_fail = false;
    let mut any_blocked = false;
    for (t, result) in theorems
        .iter()
        .zip(mannheim::verify(&pair, theorems, tol, rate_tol))
    {
        report.line("");
        match result {
            Ok(rep) => {
                any_fail |= rep.verdict == Verdict::Fail;
                any_blocked |= rep.verdict == Verdict::Degenerate;
                describe(&mut report, &rep);
            }
            Err(Error::PreconditionViolated(why)) => {
                any_blocked = true;
                report.line(format!("theorem {t}: precondition violated: {why}"));
                report.key(format!("theorem.{t}.verdict"), "precondition_violated");
                report.key(format!("theorem.{t}.reason"), why);
            }
            Err(e) => return Err(e.into()),
        }
    }
    let code = if any_fail {
        exit::VERDICT
    } else if any_blocked {
        exit::PRECONDITION
    } else {
        exit::OK
    };
    report.key("exit", code);
    Ok(Outcome { report, code })
}

fn describe(report: &mut Report, rep: &VerificationReport) {
    let t = rep.theorem;
    report.line(format!(
        "theorem {t}: {} (max residual {} at tol {})",
        rep.verdict,
        prose(rep.max_residual),
        prose(rep.tol)
    ));
    for s in &rep.series {
        report.line(format!(
            "  {}: max |.| {} min |.| {}",
            s.name,
            prose(s.max_abs()),
            prose(s.min_abs())
        ));
    }
    for (name, v) in &rep.facts {
        report.line(format!("  {name} = {}", prose(*v)));
    }
    for (name, v) in &rep.flags {
        report.line(format!("  {name}: {v}"));
    }
    for note in &rep.notes {
        report.line(format!("  note: {note}"));
    }
    report.key(format!("theorem.{t}.verdict"), rep.verdict);
    report.num(format!("theorem.{t}.max_residual"), rep.max_residual);
    report.num(format!("theorem.{t}.tol"), rep.tol);
    for s in &rep.series {
        report.num(format!("theorem.{t}.{}.max_abs", s.name), s.max_abs());
        report.num(format!("theorem.{t}.{}.min_abs", s.name), s.min_abs());
    }
    for (name, v) in &rep.facts {
        report.num(format!("theorem.{t}.{name}"), *v);
    }
    for (name, v) in &rep.flags {
        report.key(format!("theorem.{t}.{name}"), v);
    }
}

pub fn mesh(
    path: &Path,
    rows: usize,
    cols: usize,
    out: &Path,
    g: &Globals,
) -> Result<Outcome, CliError> {
    if rows < 2 || cols < 2 {
        return Err(CliError::Config(format!(
            "mesh needs rows, cols >= 2, got {rows} x {cols}"
        )));
    }
    let cfg = config::load(path)?;
    let surf = cfg.build(g.build_options())?;
    let grid = sample_mesh_with(&surf, rows, cols, Execution::default())?;
    write_file(out, obj(&surf, &grid).as_bytes())?;

    let mut report = Report::new("mesh");
    echo(&mut report, "input", &cfg);
    report.line(format!(
        "wrote {} vertices and {} faces to {}",
        grid.vertices.len(),
        grid.quad_count(),
        out.display()
    ));
    report.key("rows", rows);
    report.key("cols", cols);
    report.key("vertices", grid.vertices.len());
    report.key("faces", grid.quad_count());
    report.key("out", out.display());
    Ok(Outcome {
        report,
        code: exit::OK,
    })
}

/// Wavefront OBJ text; coordinates are written in shortest round-trip form.
pub fn obj(surf: &RuledSurface, grid: &MeshGrid) -> String {
    let mut out = String::with_capacity(grid.vertices.len() * 48);
    out.push_str(&format!(
        "# ruled surface, {} x {} grid, s in [{}, {}], v in [{}, {}]\n",
        grid.rows, grid.cols, surf.s_domain.0, surf.s_domain.1, surf.v_domain.0, surf.v_domain.1
    ));
    for v in &grid.vertices {
        out.push_str(&format!("v {} {} {}\n", v.x1, v.x2, v.x3));
    }
    for [a, b, c, d] in grid.quads() {
        out.push_str(&format!("f {} {} {} {}\n", a + 1, b + 1, c + 1, d + 1));
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}
