//! The `threshold`, `loop1d`, `lft`, `solve2d` and `critical` commands.
//! Each computes everything in memory and hands back [`Artifacts`]; nothing
//! touches the file system here.

use std::f64::consts::PI;
use std::fmt::Write as _;

use dplab_core::loop1d::{loop_fe_spectrum, loop_negative_eigenvalues, LoopSpec};
use dplab_core::moebius::weighted_jump_integral;
use dplab_core::solver2d::{
    assemble, estimate_critical_strength, lft_segment_problem, lowest_eigenvalues, CrackMesh, CrackSegment,
    NumericVerdict, Rect, SolveOptions,
};
use dplab_core::thresholds::{
    classify, interval_bound_state_threshold, omega_star, strip_ground_state, sup_sqrt_jacobian, CurveDescriptor,
    Provenance as ThresholdProvenance, VerdictTag, REFINE_RTOL,
};
use dplab_core::{Moebius, MonotoneCurve, Point2, PolylineCurve, StrengthProfile};
use serde::Serialize;

use crate::config::{CriticalConfig, CurveConfig, LftConfig, Loop1dConfig, Solve2dConfig, ThresholdConfig};
use crate::error::CliError;
use crate::plot;
use crate::report::{csv_table, num, to_json, Artifacts, Provenance, Quantity, RunReport};

/// Label attached to every eigenvalue computed on a transported curve.
pub const LFT_LABEL: &str = "via LFT transport, eigenvalues not physical";

fn rect_of(b: &[f64; 4]) -> Rect {
    Rect::new(b[0], b[1], b[2], b[3]).expect("validated box")
}

fn verdict_name(tag: VerdictTag) -> &'static str {
    match tag {
        VerdictTag::ProvablyNonnegative => "provably_nonnegative",
        VerdictTag::BoundStateExists => "bound_state_exists",
        VerdictTag::Unknown => "unknown",
    }
}

#[derive(Debug, Serialize)]
struct VerdictOut {
    omega: f64,
    verdict: &'static str,
    witness: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ThresholdResults {
    omega_star: Quantity,
    provenance: &'static str,
    sup_sqrt_jacobian: Option<Quantity>,
    /// Only for intervals.
    bound_state_threshold: Option<Quantity>,
    pointwise_bound: Vec<[f64; 2]>,
    classification: Option<VerdictOut>,
}

/// `Γ = M⁻¹(Λ)` for an arc, read back as a monotone curve from whichever
/// end makes it monotone.
fn arc_preimage(arc: &PolylineCurve, m: &Moebius) -> Result<(PolylineCurve, MonotoneCurve), CliError> {
    let gamma = m.inverse().map_polyline(arc)?;
    for x0 in [gamma.first(), gamma.last()] {
        if gamma.is_monotone_from(x0) {
            let curve = MonotoneCurve::from_polyline(&gamma, x0)?;
            return Ok((gamma, curve));
        }
    }
    Err(dplab_core::Error::Invalid("the preimage of the arc is not monotone from either end".into()).into())
}

fn descriptor(curve: &CurveConfig) -> Result<CurveDescriptor, CliError> {
    Ok(match curve {
        CurveConfig::Interval { length, .. } => CurveDescriptor::Interval { length: *length },
        CurveConfig::Arc { samples, .. } => {
            let (arc, m) = curve.arc().expect("arc kind")?;
            let (_, gamma) = arc_preimage(&arc, &m)?;
            CurveDescriptor::LftOfMonotone { gamma, m, samples: *samples }
        }
        CurveConfig::Lft { gamma, moebius, samples } => CurveDescriptor::LftOfMonotone {
            gamma: gamma.monotone().expect("validated gamma")?,
            m: moebius.moebius()?,
            samples: *samples,
        },
        other => CurveDescriptor::Monotone(other.monotone().expect("monotone kind")?),
    })
}

fn closed_form(curve: &CurveConfig) -> bool {
    matches!(curve, CurveConfig::Interval { .. } | CurveConfig::Spiral { .. })
}

pub fn threshold(cfg: &ThresholdConfig) -> Result<Artifacts, CliError> {
    let desc = descriptor(&cfg.curve)?;
    let rep = desc.threshold_report()?;
    let tol = (!closed_form(&cfg.curve)).then_some(REFINE_RTOL);
    let (provenance, sup) = match rep.provenance {
        ThresholdProvenance::Direct => ("direct", None),
        ThresholdProvenance::ViaLft { sup_sqrt_jacobian } => {
            ("via_lft", Some(Quantity::approx("thresholds", sup_sqrt_jacobian, REFINE_RTOL)))
        }
    };
    let bound_state = match cfg.curve {
        CurveConfig::Interval { length, .. } => {
            Some(Quantity::exact("thresholds", interval_bound_state_threshold(length)))
        }
        _ => None,
    };
    let classification = match cfg.omega {
        Some(w) => {
            let v = classify(&desc, w)?;
            Some(VerdictOut { omega: w, verdict: verdict_name(v.tag), witness: v.witness })
        }
        None => None,
    };
    let results = ThresholdResults {
        omega_star: Quantity { value: rep.omega_star, module: "thresholds", tolerance: tol },
        provenance,
        sup_sqrt_jacobian: sup,
        bound_state_threshold: bound_state,
        pointwise_bound: rep.pointwise_bound.iter().map(|&(r, b)| [r, b]).collect(),
        classification,
    };

    let mut table = String::new();
    writeln!(table, "omega_star          {:.12}  ({provenance})", rep.omega_star).unwrap();
    if let Some(s) = &results.sup_sqrt_jacobian {
        writeln!(table, "sup sqrt(J_M)       {:.12}", s.value).unwrap();
    }
    if let Some(b) = &results.bound_state_threshold {
        writeln!(table, "bound state above   {:.12}", b.value).unwrap();
    }
    if let Some(c) = &results.classification {
        writeln!(table, "omega = {}  ->  {}", c.omega, c.verdict).unwrap();
    }
    let csv = csv_table(&["r", "bound"], rep.pointwise_bound.iter().map(|&(r, b)| vec![num(r), num(b)]));
    let report = RunReport {
        command: "threshold",
        config: cfg,
        results,
        provenance: Provenance::new(cfg.seed, &[("omega_star_rtol", REFINE_RTOL)]),
    };
    Ok(Artifacts {
        command: "threshold",
        report: to_json(&report),
        files: vec![("pointwise_bound.csv".into(), csv)],
        table,
        failure: None,
    })
}

#[derive(Debug, Serialize)]
struct Loop1dResults {
    d_omega: f64,
    kappa: Option<Quantity>,
    transcendental: Vec<Quantity>,
    finite_element: Vec<Quantity>,
    fe_cells: usize,
    /// `|λ_FE − λ| / |λ|` for the negative eigenvalue.
    fe_relative_error: Option<f64>,
    line_limit: Option<Quantity>,
    notes: Vec<String>,
}

const SECULAR_TOL: f64 = 1e-12;
const FE_TOL: f64 = 1e-6;

pub fn loop1d(cfg: &Loop1dConfig, svg: bool) -> Result<Artifacts, CliError> {
    let spec = LoopSpec::new(cfg.d, cfg.omega)?;
    let exact = loop_negative_eigenvalues(&spec);
    let fe = loop_fe_spectrum(&spec, cfg.fe_cells, cfg.fe_count)?;
    let kappa = exact.lowest().map(|l| (-l).sqrt());
    let fe_err = match (exact.lowest(), fe.lowest()) {
        (Some(l), Some(f)) => Some(((f - l) / l).abs()),
        _ => None,
    };
    let mut notes = Vec::new();
    if cfg.omega == 0.0 {
        let neumann: Vec<String> = (0..cfg.fe_count)
            .map(|k| format!("{:.6}", (k as f64 * PI / cfg.d).powi(2)))
            .collect();
        notes.push(format!(
            "omega = 0 decouples the ends: Neumann conditions on (0, d), eigenvalues (k pi/d)^2 = {}",
            neumann.join(", ")
        ));
    }
    if spec.is_subcritical() && cfg.omega > 0.0 && (cfg.d * cfg.omega - 1.0).abs() < 1e-12 {
        notes.push("d omega = 1 is the marginal case: no negative eigenvalue".into());
    }
    if exact.eigenvalues.is_empty() {
        notes.push("no negative eigenvalues".into());
    }
    let results = Loop1dResults {
        d_omega: cfg.d * cfg.omega,
        kappa: kappa.map(|k| Quantity::approx("loop1d", k, SECULAR_TOL)),
        transcendental: exact.eigenvalues.iter().map(|&l| Quantity::approx("loop1d", l, SECULAR_TOL)).collect(),
        finite_element: fe.eigenvalues.iter().map(|&l| Quantity::approx("loop1d", l, FE_TOL)).collect(),
        fe_cells: cfg.fe_cells,
        fe_relative_error: fe_err,
        line_limit: dplab_core::loop1d::line_delta_prime_eigenvalue(cfg.omega).map(|l| Quantity::exact("loop1d", l)),
        notes,
    };

    let mut table = String::new();
    writeln!(table, "d = {}, omega = {}, d*omega = {}", cfg.d, cfg.omega, results.d_omega).unwrap();
    match exact.lowest() {
        Some(l) => writeln!(table, "transcendental      {l:.12}  (kappa = {:.12})", kappa.unwrap()).unwrap(),
        None => writeln!(table, "transcendental      none").unwrap(),
    }
    for (i, l) in fe.eigenvalues.iter().enumerate() {
        writeln!(table, "FE n={:<6} #{i}     {l:.12}", cfg.fe_cells).unwrap();
    }
    for n in &results.notes {
        writeln!(table, "note: {n}").unwrap();
    }
    let mut rows: Vec<Vec<String>> =
        exact.eigenvalues.iter().enumerate().map(|(i, l)| vec!["transcendental".into(), i.to_string(), num(*l)]).collect();
    rows.extend(fe.eigenvalues.iter().enumerate().map(|(i, l)| vec![format!("fe{}", cfg.fe_cells), i.to_string(), num(*l)]));
    let mut files = vec![("eigenvalues.csv".to_string(), csv_table(&["method", "index", "eigenvalue"], rows))];
    if svg {
        files.push(("theta.svg".into(), plot::theta_plot(&spec, cfg.theta_points, kappa).into_bytes()));
    }
    let report = RunReport {
        command: "loop1d",
        config: cfg,
        results,
        provenance: Provenance::new(cfg.seed, &[("secular", SECULAR_TOL), ("fe_residual", FE_TOL)]),
    };
    Ok(Artifacts { command: "loop1d", report: to_json(&report), files, table, failure: None })
}

#[derive(Debug, Serialize)]
struct LftResults {
    preimage_monotone: bool,
    preimage_length: f64,
    preimage_endpoints: [[f64; 2]; 2],
    sup_sqrt_jacobian: Quantity,
    gamma_omega_star: Option<Quantity>,
    omega_star: Option<Quantity>,
    verdict: &'static str,
    pulled_back_max: f64,
    /// `∑ ω̃|v|² Δs_Γ` and `∑ ω|u|² Δs_Λ` for the probe jump `u = 1 + x/2 + y²`.
    interface_gamma: f64,
    interface_lambda: f64,
    note: &'static str,
}

fn probe_jump(p: Point2) -> f64 {
    1.0 + 0.5 * p.x + p.y * p.y
}

/// `Λ`, `Γ` and `M` with `Λ = M(Γ)`.
fn transported(curve: &CurveConfig) -> Result<(PolylineCurve, PolylineCurve, Moebius), CliError> {
    match curve {
        CurveConfig::Arc { .. } => {
            let (arc, m) = curve.arc().expect("arc kind")?;
            let gamma = m.inverse().map_polyline(&arc)?;
            Ok((arc, gamma, m))
        }
        CurveConfig::Lft { gamma, moebius, samples } => {
            let m = moebius.moebius()?;
            let g = gamma.monotone().expect("validated gamma")?.sample_polyline(*samples, None)?;
            let lam = m.map_polyline(&g)?;
            Ok((lam, g, m))
        }
        _ => unreachable!("validated kind"),
    }
}

pub fn lft(cfg: &LftConfig) -> Result<Artifacts, CliError> {
    let (lam, gamma, m) = transported(&cfg.curve)?;
    let monotone = [gamma.first(), gamma.last()].into_iter().find(|&x0| gamma.is_monotone_from(x0));
    let sup = sup_sqrt_jacobian(&m, &gamma)?;
    let gamma_star = match monotone {
        Some(x0) => Some(omega_star(&MonotoneCurve::from_polyline(&gamma, x0)?)?),
        None => None,
    };
    let star = gamma_star.map(|g| g / sup);
    let profile = m.pullback_strength(&gamma, |_| cfg.omega)?;
    let omega_tilde: Vec<f64> = gamma.cumulative_length().iter().map(|&s| profile.at(s)).collect();
    let jumps: Vec<f64> = lam.vertices().iter().map(|&p| probe_jump(p)).collect();
    let interface_gamma = weighted_jump_integral(&gamma, &omega_tilde, &jumps)?;
    let interface_lambda = weighted_jump_integral(&lam, &vec![cfg.omega; lam.len()], &jumps)?;
    let verdict = match star {
        Some(s) if cfg.omega <= s => "provably_nonnegative",
        _ => "unknown",
    };
    let results = LftResults {
        preimage_monotone: monotone.is_some(),
        preimage_length: gamma.length(),
        preimage_endpoints: [[gamma.first().x, gamma.first().y], [gamma.last().x, gamma.last().y]],
        sup_sqrt_jacobian: Quantity::approx("thresholds", sup, REFINE_RTOL),
        gamma_omega_star: gamma_star.map(|g| Quantity::approx("thresholds", g, REFINE_RTOL)),
        omega_star: star.map(|s| Quantity::approx("thresholds", s, REFINE_RTOL)),
        verdict,
        pulled_back_max: profile.max(),
        interface_gamma,
        interface_lambda,
        note: "transport preserves the sign of the form, not its eigenvalues",
    };
    let mut table = String::new();
    writeln!(table, "preimage monotone   {}", results.preimage_monotone).unwrap();
    writeln!(table, "sup sqrt(J_M)       {sup:.12}").unwrap();
    match star {
        Some(s) => writeln!(table, "omega_star          {s:.12}").unwrap(),
        None => writeln!(table, "omega_star          n/a").unwrap(),
    }
    writeln!(table, "omega = {}  ->  {verdict}", cfg.omega).unwrap();
    writeln!(table, "interface on Gamma  {interface_gamma:.12}").unwrap();
    writeln!(table, "interface on Lambda {interface_lambda:.12}").unwrap();
    let rows = gamma
        .vertices()
        .iter()
        .zip(gamma.cumulative_length())
        .zip(&omega_tilde)
        .map(|((p, s), w)| vec![num(*s), num(p.x), num(p.y), num(*w)]);
    let csv = csv_table(&["s", "x", "y", "omega_tilde"], rows);
    let report = RunReport {
        command: "lft",
        config: cfg,
        results,
        provenance: Provenance::new(cfg.seed, &[("sup_rtol", REFINE_RTOL)]),
    };
    Ok(Artifacts { command: "lft", report: to_json(&report), files: vec![("strength.csv".into(), csv)], table, failure: None })
}

#[derive(Debug, Serialize)]
struct MeshOut {
    h: f64,
    cells: [usize; 2],
    nodes: usize,
    dofs: usize,
    duplicated: usize,
    snapped: bool,
    segment: [f64; 3],
}

#[derive(Debug, Serialize)]
struct Solve2dResults {
    eigenvalues: Vec<Quantity>,
    residual_norms: Vec<f64>,
    iterations: usize,
    verdict: &'static str,
    verdict_tol: f64,
    lambda1: f64,
    /// Present for transported curves.
    label: Option<&'static str>,
    closed_form_verdict: Option<VerdictOut>,
    /// `π²/L² − 4ω²`, the infinite-volume strip bound, for intervals.
    strip_ground_state: Option<Quantity>,
    mesh: MeshOut,
}

pub fn solve2d(cfg: &Solve2dConfig, svg: bool) -> Result<Artifacts, CliError> {
    let rect = rect_of(&cfg.rect);
    let (segment, profile, label) = match &cfg.curve {
        CurveConfig::Interval { length, origin, .. } => (
            CrackSegment::new(origin[0], origin[0] + length, origin[1])?,
            StrengthProfile::Constant(cfg.omega),
            None,
        ),
        arc => {
            let (poly, m) = arc.arc().expect("arc kind")?;
            let gamma = m.inverse().map_polyline(&poly)?;
            let (seg, prof) = lft_segment_problem(&m, &gamma, |_| cfg.omega)?;
            (seg, prof, Some(LFT_LABEL))
        }
    };
    let mesh = CrackMesh::build(rect, cfg.h, segment)?;
    let asm = assemble(&mesh, &profile)?;
    let opts = SolveOptions {
        count: cfg.eigenpairs,
        tol: cfg.eig_tol,
        verdict_tol: cfg.verdict_tol,
        seed: cfg.seed,
        ..SolveOptions::default()
    };
    let rep = lowest_eigenvalues(&mesh, &asm, &opts)?;
    let verdict = match rep.verdict {
        NumericVerdict::NoNegativeFound { .. } => "no_negative_found",
        NumericVerdict::NegativeEigenvalue { .. } => "negative_eigenvalue",
    };
    let (closed, strip) = match cfg.curve {
        CurveConfig::Interval { length, .. } => {
            let v = classify(&CurveDescriptor::Interval { length }, cfg.omega)?;
            (
                Some(VerdictOut { omega: cfg.omega, verdict: verdict_name(v.tag), witness: v.witness }),
                Some(Quantity::exact("thresholds", strip_ground_state(length, cfg.omega))),
            )
        }
        _ => (None, None),
    };
    let seg = mesh.segment();
    let (nx, ny) = mesh.cells();
    let results = Solve2dResults {
        eigenvalues: rep.eigenvalues.iter().map(|&l| Quantity::approx("solver2d", l, cfg.eig_tol)).collect(),
        residual_norms: rep.residual_norms.clone(),
        iterations: rep.iterations,
        verdict,
        verdict_tol: cfg.verdict_tol,
        lambda1: rep.lambda1(),
        label,
        closed_form_verdict: closed,
        strip_ground_state: strip,
        mesh: MeshOut {
            h: mesh.h(),
            cells: [nx, ny],
            nodes: mesh.node_count(),
            dofs: asm.n_dofs(),
            duplicated: mesh.duplicated_count(),
            snapped: mesh.snapped(),
            segment: [seg.x_a, seg.x_b, seg.y0],
        },
    };
    let mut table = String::new();
    writeln!(table, "mesh h = {}, {} dofs, crack ({}, {}) at y = {}", mesh.h(), asm.n_dofs(), seg.x_a, seg.x_b, seg.y0)
        .unwrap();
    for (i, (l, r)) in rep.eigenvalues.iter().zip(&rep.residual_norms).enumerate() {
        writeln!(table, "lambda_{}  {l:>18.10}   residual {r:.2e}", i + 1).unwrap();
    }
    writeln!(table, "verdict  {verdict}").unwrap();
    if let Some(l) = label {
        writeln!(table, "note     {l}").unwrap();
    }
    let rows = rep.eigenvalues.iter().zip(&rep.residual_norms).enumerate().map(|(i, (l, r))| {
        vec![(i + 1).to_string(), num(*l), num(*r)]
    });
    let mut files = vec![("eigenvalues.csv".to_string(), csv_table(&["index", "eigenvalue", "residual"], rows))];
    if svg {
        let title = match label {
            Some(l) => format!("ground state, lambda1 = {:.6} ({l})", rep.lambda1()),
            None => format!("ground state, lambda1 = {:.6}", rep.lambda1()),
        };
        files.push(("ground_state.svg".into(), plot::heatmap(&mesh, &rep.ground_state_nodal(&asm), 160, &title).into_bytes()));
    }
    let report = RunReport {
        command: "solve2d",
        config: cfg,
        results,
        provenance: Provenance::new(cfg.seed, &[("eig_tol", cfg.eig_tol), ("verdict_tol", cfg.verdict_tol)]),
    };
    Ok(Artifacts { command: "solve2d", report: to_json(&report), files, table, failure: None })
}

#[derive(Debug, Serialize)]
struct CriticalResults {
    omega_lo: Quantity,
    omega_hi: Quantity,
    estimate: f64,
    width: f64,
    h: f64,
    subcritical_bound: Quantity,
    bound_state_bound: Quantity,
    solves: usize,
    note: &'static str,
}

pub fn critical(cfg: &CriticalConfig) -> Result<Artifacts, CliError> {
    let rect = rect_of(&cfg.rect);
    let opts = SolveOptions { tol: cfg.eig_tol, verdict_tol: cfg.verdict_tol, seed: cfg.seed, ..SolveOptions::default() };
    let b = estimate_critical_strength(rect, CrackSegment::new(0.0, cfg.length, 0.0)?, cfg.h, cfg.tol_omega, &opts)?;
    let results = CriticalResults {
        omega_lo: Quantity::approx("solver2d", b.omega_lo, cfg.verdict_tol),
        omega_hi: Quantity::approx("solver2d", b.omega_hi, cfg.verdict_tol),
        estimate: b.estimate,
        width: b.width(),
        h: b.h,
        subcritical_bound: Quantity::exact("thresholds", 1.0 / (2.0 * PI * cfg.length)),
        bound_state_bound: Quantity::exact("thresholds", interval_bound_state_threshold(cfg.length)),
        solves: b.samples.len(),
        note: "discretization-dependent estimate for this box and mesh width",
    };
    let mut table = String::new();
    writeln!(table, "bracket   [{:.6}, {:.6}]  (estimate {:.6})", b.omega_lo, b.omega_hi, b.estimate).unwrap();
    writeln!(table, "bounds    [{:.6}, {:.6}]", results.subcritical_bound.value, results.bound_state_bound.value).unwrap();
    writeln!(table, "solves    {}", b.samples.len()).unwrap();
    let rows = b.samples.iter().map(|s| {
        vec![num(s.omega), num(s.lambda1), s.negative.to_string(), s.converged.to_string(), s.iterations.to_string()]
    });
    let csv = csv_table(&["omega", "lambda1", "negative", "converged", "iterations"], rows);
    let report = RunReport {
        command: "critical",
        config: cfg,
        results,
        provenance: Provenance::new(
            cfg.seed,
            &[("eig_tol", cfg.eig_tol), ("verdict_tol", cfg.verdict_tol), ("tol_omega", cfg.tol_omega)],
        ),
    };
    Ok(Artifacts { command: "critical", report: to_json(&report), files: vec![("samples.csv".into(), csv)], table, failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    #[test]
    fn interval_threshold() {
        let cfg: ThresholdConfig = parse(r#"{"curve": {"kind": "interval", "length": 1}, "omega": 2}"#, None).unwrap();
        let a = threshold(&cfg).unwrap();
        let v: serde_json::Value = serde_json::from_str(&a.report).unwrap();
        let star = v["results"]["omega_star"]["value"].as_f64().unwrap();
        assert!((star - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(v["results"]["classification"]["verdict"], "bound_state_exists");
        assert_eq!(v["config"]["seed"], serde_json::json!(dplab_core::rng::DEFAULT_SEED));
    }

    #[test]
    fn arc_threshold_goes_through_the_preimage() {
        let cfg: ThresholdConfig =
            parse(r#"{"curve": {"kind": "arc", "radius": 1, "epsilon": 1.5707963267948966}}"#, None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&threshold(&cfg).unwrap().report).unwrap();
        let star = v["results"]["omega_star"]["value"].as_f64().unwrap();
        assert!((star - 1.0 / (8.0 * PI)).abs() < 1e-9 * star, "{star}");
        assert_eq!(v["results"]["provenance"], "via_lft");
    }

    #[test]
    fn lft_integrals_agree() {
        let cfg: LftConfig =
            parse(r#"{"curve": {"kind": "arc", "radius": 2, "epsilon": 1.0}, "omega": 0.01}"#, None).unwrap();
        let v: serde_json::Value = serde_json::from_str(&lft(&cfg).unwrap().report).unwrap();
        let g = v["results"]["interface_gamma"].as_f64().unwrap();
        let l = v["results"]["interface_lambda"].as_f64().unwrap();
        assert!((g - l).abs() < 1e-4 * l, "{g} {l}");
        assert_eq!(v["results"]["verdict"], "provably_nonnegative");
    }

    #[test]
    fn loop_without_strength_notes_neumann() {
        let cfg: Loop1dConfig = parse(r#"{"d": 6.283185307179586, "omega": 0}"#, None).unwrap();
        let a = loop1d(&cfg, true).unwrap();
        assert!(a.table.contains("Neumann"));
        assert!(a.files.iter().any(|(n, _)| n == "theta.svg"));
    }

    #[test]
    fn solve2d_on_an_arc_is_labelled() {
        let cfg: Solve2dConfig = parse(
            r#"{"curve": {"kind": "arc", "radius": 1, "epsilon": 1.5707963267948966, "samples": 257},
                "omega": 0.0397, "box": [-2.5, 2.5, -3, 2], "h": 0.125}"#,
            None,
        )
        .unwrap();
        let a = solve2d(&cfg, false).unwrap();
        let v: serde_json::Value = serde_json::from_str(&a.report).unwrap();
        assert_eq!(v["results"]["label"], LFT_LABEL);
        assert_eq!(v["results"]["verdict"], "no_negative_found");
    }

    #[test]
    fn tabulated_profile_is_accepted() {
        let cfg: ThresholdConfig = parse(
            r#"{"curve": {"kind": "tabulated", "extent": 1, "radii": [0.25, 0.5, 0.75],
                          "phi": [0, 0, 0], "dphi": [0, 0, 0]}}"#,
            None,
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&threshold(&cfg).unwrap().report).unwrap();
        let star = v["results"]["omega_star"]["value"].as_f64().unwrap();
        assert!((star - 1.0 / (2.0 * PI)).abs() < 1e-9);
    }
}
