use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use hyptile_core::ratlin::{fmt_rational, rat, RatVec, Rational};
use hyptile_core::render::{self, Viewport};
use hyptile_core::symmetry::{stabilizer_brute_force, stabilizer_closed_form, SignedPermutation, MAX_BRUTE_FORCE_N};
use hyptile_core::tiling::{Tiling, TilingParams};
use hyptile_core::torus::{
    adjugate_entry_check, build_torus_tiling_with_budget, minimal_axis_period, torus_report, TorusParams,
};
use hyptile_core::verify::{run_verification, VerifyConfig};
use hyptile_core::Error;

use crate::{Budgets, Common, Format};

pub const SCHEMA_VERSION: u32 = 1;
const MAX_SAMPLES: usize = 10_000_000;
const MAX_CELL_BUDGET: u64 = 1_000_000_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub struct Outcome {
    ok: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> ExitCode {
        if self.ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(1)
        }
    }
}

fn usage(flag: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{flag}: {e}"))
}

fn tiling_params(c: &Common) -> Result<TilingParams, CliError> {
    TilingParams::new(c.n, c.p.clone(), c.q.clone()).map_err(|e| usage("--n/--p/--q", e))
}

fn torus_params(c: &Common) -> Result<TorusParams, CliError> {
    let as_int = |flag: &str, r: &Rational| -> Result<i64, CliError> {
        if !r.is_integer() {
            return Err(usage(flag, "must be an integer for torus computations"));
        }
        r.to_integer().to_i64().ok_or_else(|| usage(flag, "too large"))
    };
    TorusParams::new(c.n, as_int("--p", &c.p)?, as_int("--q", &c.q)?).map_err(|e| usage("--n/--p/--q", e))
}

fn check_budgets(b: &Budgets) -> Result<(), CliError> {
    if b.samples == 0 || b.samples > MAX_SAMPLES {
        return Err(usage("--samples", format!("must be in 1..={MAX_SAMPLES}")));
    }
    if b.cell_budget == 0 || b.cell_budget > MAX_CELL_BUDGET {
        return Err(usage("--cell-budget", format!("must be in 1..={MAX_CELL_BUDGET}")));
    }
    Ok(())
}

/// One report per invocation: text for humans, a JSON document otherwise.
fn emit(c: &Common, human: &str, doc: &impl Serialize, ok: bool) -> Result<Outcome, CliError> {
    let text = match c.format {
        Format::Human => human.to_string(),
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
            s.push('\n');
            s
        }
    };
    match &c.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(Outcome { ok })
}

fn header(command: &str, c: &Common) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("n".into(), json!(c.n));
    m.insert("p".into(), json!(fmt_rational(&c.p)));
    m.insert("q".into(), json!(fmt_rational(&c.q)));
    m
}

fn matrix_rows(m: &hyptile_core::ratlin::RatMat) -> Vec<Vec<String>> {
    (0..m.n())
        .map(|i| m.row(i).entries().iter().map(fmt_rational).collect())
        .collect()
}

fn vec_strings(v: &RatVec) -> Vec<String> {
    v.entries().iter().map(fmt_rational).collect()
}

pub fn basis(c: &Common) -> Result<Outcome, CliError> {
    let tiling = Tiling::new(tiling_params(c)?);
    let a = tiling.basis();
    let b = tiling.reduction().matrix();
    let human = format!(
        "A = {}\ndet(A) = {}\nB = {}\n",
        a.matrix(),
        fmt_rational(a.det()),
        b
    );
    let mut doc = header("basis", c);
    doc.insert("matrix".into(), json!(matrix_rows(a.matrix())));
    doc.insert("det".into(), json!(fmt_rational(a.det())));
    doc.insert("reduction".into(), json!(matrix_rows(b)));
    emit(c, &human, &doc, true)
}

pub fn locate(c: &Common, point: &RatVec) -> Result<Outcome, CliError> {
    let tiling = Tiling::new(tiling_params(c)?);
    let cp = tiling.canonicalize(point).map_err(|e| usage("--point", e))?;
    let tile = tiling.locate(point).map_err(|e| usage("--point", e))?;
    let mut doc = header("locate", c);
    doc.insert("point".into(), json!(vec_strings(point)));
    doc.insert("kind".into(), json!(tile.kind));
    doc.insert("anchor".into(), json!(tile.anchor.iter().map(|k| k.to_string()).collect::<Vec<_>>()));
    doc.insert("representative".into(), json!(vec_strings(&cp.c)));
    emit(c, &format!("{tile}\n"), &doc, true)
}

pub fn member(c: &Common, v: &RatVec) -> Result<Outcome, CliError> {
    let tiling = Tiling::new(tiling_params(c)?);
    let coords = tiling.basis().coordinates(v).map_err(|e| usage("--vector", e))?;
    let is_member = coords.is_integral();
    let human = if is_member {
        format!("member: {v} = A {coords}\n")
    } else {
        format!("not a member: A^-1 {v} = {coords}\n")
    };
    let mut doc = header("member", c);
    doc.insert("vector".into(), json!(vec_strings(v)));
    doc.insert("member".into(), json!(is_member));
    doc.insert("coordinates".into(), json!(vec_strings(&coords)));
    emit(c, &human, &doc, is_member)
}

pub fn verify(c: &Common, b: &Budgets, brute_force: bool, seed: u64) -> Result<Outcome, CliError> {
    check_budgets(b)?;
    let params = tiling_params(c)?;
    if brute_force && c.n > MAX_BRUTE_FORCE_N {
        return Err(usage("--brute-force", format!("needs n <= {MAX_BRUTE_FORCE_N}")));
    }
    let cfg = VerifyConfig {
        samples: b.samples,
        seed,
        brute_force,
        cell_budget: b.cell_budget,
    };
    let report = run_verification(&params, &cfg).map_err(|e| usage("verify", e))?;
    let mut human = String::new();
    for check in &report.checks {
        let status = match (check.skipped, check.passed) {
            (true, _) => "SKIP",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        let _ = write!(human, "{status} {}: {}", check.name, check.detail);
        if let Some(cx) = &check.counterexample {
            let _ = write!(human, " (counterexample: {cx})");
        }
        human.push('\n');
    }
    let ok = report.passed();
    human.push_str(if ok { "all checks passed\n" } else { "verification FAILED\n" });
    emit(c, &human, &report, ok)
}

pub fn symmetries(c: &Common, brute_force: bool) -> Result<Outcome, CliError> {
    let params = tiling_params(c)?;
    let tiling = Tiling::new(params);
    let closed: Vec<SignedPermutation> = stabilizer_closed_form(c.n)
        .map_err(|e| usage("--n", e))?
        .into_iter()
        .map(|s| s.into_perm())
        .collect();
    let mut human = String::new();
    let _ = writeln!(human, "stabilizer order {}", closed.len());
    for s in &closed {
        let _ = writeln!(human, "{s}");
    }
    let mut doc = header("symmetries", c);
    doc.insert("elements".into(), json!(closed.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
    let mut ok = true;
    if brute_force {
        let brute = stabilizer_brute_force(c.n, tiling.basis()).map_err(|e| usage("--brute-force", e))?;
        ok = brute == closed;
        let _ = writeln!(
            human,
            "brute force over B'_{}: {} elements, {}",
            c.n,
            brute.len(),
            if ok { "matches" } else { "MISMATCH" }
        );
        doc.insert(
            "brute_force".into(),
            json!(brute.iter().map(|s| s.to_string()).collect::<Vec<_>>()),
        );
        doc.insert("matches".into(), json!(ok));
    }
    emit(c, &human, &doc, ok)
}

pub fn period(c: &Common) -> Result<Outcome, CliError> {
    let tp = torus_params(c)?;
    let periods: Vec<i64> = (0..c.n)
        .map(|i| minimal_axis_period(&tp, i))
        .collect::<Result<_, Error>>()
        .map_err(|e| usage("--n", e))?;
    let uniform = periods.iter().all(|&l| l == periods[0]);
    let ok = uniform && periods[0] == tp.m() && adjugate_entry_check(&tp);
    let human = if uniform {
        format!("{}\n", periods[0])
    } else {
        periods
            .iter()
            .enumerate()
            .map(|(i, l)| format!("axis {}: {l}\n", i + 1))
            .collect()
    };
    let mut doc = header("period", c);
    doc.insert("m".into(), json!(tp.m()));
    doc.insert("periods".into(), json!(periods));
    doc.insert("adjugate_check".into(), json!(adjugate_entry_check(&tp)));
    emit(c, &human, &doc, ok)
}

fn torus_like(c: &Common, b: &Budgets, scan: bool) -> Result<Outcome, CliError> {
    check_budgets(b)?;
    let tp = torus_params(c)?;
    let report = match torus_report(&tp, b.cell_budget, scan) {
        Ok(r) => r,
        Err(Error::CoverViolation { cell, reason }) => {
            eprintln!("cover violation at cell {cell:?}: {reason}");
            return Ok(Outcome { ok: false });
        }
        Err(e @ Error::BudgetExceeded { .. }) => return Err(usage("--cell-budget", e)),
        Err(e) => return Err(usage("--n/--p/--q", e)),
    };
    let mut human = format!(
        "(Z/{m})^{n}: {res} residues, {big} big + {small} small cubes\nexact cover: {ec}\nunilateral: {un}\nminimal period: {mp}\n",
        m = report.m,
        n = report.n,
        res = report.residue_count,
        big = report.big_count,
        small = report.small_count,
        ec = report.exact_cover,
        un = report.unilateral,
        mp = report.min_period,
    );
    let mut ok = report.exact_cover && report.unilateral;
    if scan {
        let _ = writeln!(human, "survivors: {}", report.survivors.len());
        for s in &report.survivors {
            let _ = writeln!(
                human,
                "  hnf {:?}{} via {}",
                s.hnf,
                if s.is_basis_lattice { " (A)" } else { "" },
                s.equivalent_via.as_deref().unwrap_or("NONE")
            );
        }
        ok &= report.survivors.iter().any(|s| s.is_basis_lattice)
            && report.survivors.iter().all(|s| s.equivalent_via.is_some());
    }
    emit(c, &human, &report, ok)
}

pub fn torus(c: &Common, b: &Budgets) -> Result<Outcome, CliError> {
    torus_like(c, b, false)
}

pub fn scan(c: &Common, b: &Budgets) -> Result<Outcome, CliError> {
    torus_like(c, b, true)
}

fn write_figure(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn numbered(path: &Path, i: usize) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("slice");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("svg");
    path.with_file_name(format!("{stem}_{i:03}.{ext}"))
}

pub fn render(
    c: &Common,
    window: Option<(RatVec, RatVec)>,
    scale: Rational,
    z: &[Rational],
    torus: bool,
    mesh: Option<&Path>,
) -> Result<Outcome, CliError> {
    let out = c.out.as_deref();
    if torus {
        let tp = torus_params(c)?;
        let t = build_torus_tiling_with_budget(&tp, 10_000_000).map_err(|e| usage("--n/--p/--q", e))?;
        let svg = render::render_torus_map(&t).map_err(|e| usage("--n", e))?;
        write_figure(out, &svg)?;
        return Ok(Outcome { ok: true });
    }
    let params = tiling_params(c)?;
    match c.n {
        2 => {
            let (lo, hi) = window.unwrap_or_else(|| (RatVec::from_ints(&[0, 0]), RatVec::from_ints(&[10, 10])));
            let vp = Viewport::new(lo, hi, scale).map_err(|e| usage("--box", e))?;
            let scene = render::layout_tiling_2d(&params, &vp).map_err(|e| usage("--box", e))?;
            let ok = scene.is_exact_cover() && scene.same_size_edge_contact().is_none();
            let svg = render::render_tiling_2d(&params, &vp).map_err(|e| usage("--box", e))?;
            write_figure(out, &svg)?;
            if out.is_some() {
                println!(
                    "{} rectangles, exact cover: {}, unilateral: {}",
                    scene.rects.len(),
                    scene.is_exact_cover(),
                    scene.same_size_edge_contact().is_none()
                );
            }
            Ok(Outcome { ok })
        }
        3 => {
            let (lo, hi) = window
                .unwrap_or_else(|| (RatVec::from_ints(&[0, 0, 0]), RatVec::from_ints(&[6, 6, 6])));
            let vp = Viewport::new(lo.clone(), hi.clone(), scale).map_err(|e| usage("--box", e))?;
            let zs: Vec<Rational> = if z.is_empty() {
                vec![Rational::new(1.into(), 2.into())]
            } else {
                z.to_vec()
            };
            let svgs = render::render_slices_3d(&params, &zs, &vp).map_err(|e| usage("--z", e))?;
            let mut ok = true;
            for zv in &zs {
                ok &= render::layout_slice_3d(&params, zv, &vp)
                    .map_err(|e| usage("--z", e))?
                    .is_exact_cover();
            }
            match out {
                Some(path) => {
                    for (i, svg) in svgs.iter().enumerate() {
                        fs::write(numbered(path, i), svg)?;
                    }
                    println!("{} slices written, exact covers: {ok}", svgs.len());
                }
                None if svgs.len() == 1 => print!("{}", svgs[0]),
                None => return Err(usage("--out", "several slices need an output path")),
            }
            if let Some(mesh_path) = mesh {
                let (mlo, mhi) = if lo.len() == 3 {
                    (lo, hi)
                } else {
                    let top = c.p.clone() + c.q.clone();
                    (
                        RatVec::new(vec![lo[0].clone(), lo[1].clone(), rat(0)]),
                        RatVec::new(vec![hi[0].clone(), hi[1].clone(), top]),
                    )
                };
                let m = render::mesh_3d(&params, &mlo, &mhi).map_err(|e| usage("--mesh", e))?;
                fs::write(mesh_path, m.to_obj())?;
            }
            Ok(Outcome { ok })
        }
        n => Err(usage("--n", format!("render supports n = 2 or 3, got {n}"))),
    }
}
