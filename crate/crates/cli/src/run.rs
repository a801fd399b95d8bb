//! Grid evaluation of a prepared case.

use gashell::balance::{BodyForce, Case, Divergence, Probe, ResidualReport};
use gashell::ga3::Vec3;
use gashell::kinematics::{KinematicOptions, KinematicState};
use gashell::linalg::Mat2;
use gashell::linearized::expansion;
use gashell::stress::StressPoint;
use gashell::ShellError;
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::config::{BodyForceSpec, DiffMode, Output, Prepared};

/// Named values at one grid point, in emission order.
pub type Record = Vec<(String, f64)>;

#[derive(Clone, Debug)]
pub struct PointResult {
    pub index: (usize, usize),
    pub u: [f64; 2],
    pub values: Result<Record, ShellError>,
}

#[derive(Clone, Debug)]
pub struct Bundle {
    pub points: Vec<PointResult>,
    /// `(name, report)` for every requested residual.
    pub residuals: Vec<(&'static str, ResidualReport)>,
}

impl Bundle {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.passes())
    }
}

fn push_mat(out: &mut Record, name: &str, m: &Mat2) {
    for i in 0..2 {
        for j in 0..2 {
            out.push((format!("{name}_{}{}", i + 1, j + 1), m[i][j]));
        }
    }
}

fn push_vec(out: &mut Record, name: &str, v: &Vec3) {
    for (a, x) in v.0.iter().enumerate() {
        out.push((format!("{name}_{}", a + 1), *x));
    }
}

fn balance_case(p: &Prepared) -> Case {
    let c = &p.config;
    let mut case = Case::new(p.chart.clone(), p.motion.clone(), p.material);
    case.body_force = match &c.body_force {
        BodyForceSpec::Zero => BodyForce::Zero,
        BodyForceSpec::Manufactured => BodyForce::Manufactured,
        BodyForceSpec::Constant(b) => BodyForce::Constant(Vec3(*b)),
    };
    case.body_moment = c.body_moment;
    case.divergence = match c.differentiation.divergence {
        DiffMode::Exact => Divergence::Exact,
        DiffMode::Central => Divergence::Central { h: c.differentiation.stencil },
    };
    case
}

const KINEMATIC: [Output; 13] = [
    Output::G,
    Output::B,
    Output::Curvatures,
    Output::DetF,
    Output::Stretches,
    Output::E,
    Output::H,
    Output::Edot,
    Output::Hdot,
    Output::Omega,
    Output::Stilde,
    Output::N,
    Output::Energy,
];

pub fn evaluate_point(p: &Prepared, u: [f64; 2]) -> Result<Record, ShellError> {
    let c = &p.config;
    let t = c.time;
    let wants = |o: Output| c.outputs.contains(&o);
    let mut out = Record::new();

    if KINEMATIC.iter().any(|o| wants(*o)) {
        let opts = KinematicOptions { diff: c.diff_policy(), dt: c.differentiation.dt };
        let k = KinematicState::evaluate(&p.chart, &p.motion, u, t, &opts)?;
        let gi = &k.reference.metric_inv;
        if wants(Output::G) {
            push_mat(&mut out, "G", &k.reference.metric);
        }
        if wants(Output::B) {
            push_mat(&mut out, "B", &k.reference.second_form);
        }
        if wants(Output::Curvatures) {
            let kk = k.reference.principal_curvatures();
            out.push(("k_1".into(), kk[0]));
            out.push(("k_2".into(), kk[1]));
        }
        if wants(Output::DetF) {
            out.push(("detF".into(), k.det_f));
        }
        if wants(Output::Stretches) {
            out.push(("lambda_1".into(), k.stretches[0]));
            out.push(("lambda_2".into(), k.stretches[1]));
        }
        if wants(Output::E) {
            push_mat(&mut out, "E", &k.strain);
        }
        if wants(Output::H) {
            push_mat(&mut out, "H", &k.curvature_change);
        }
        if wants(Output::Edot) {
            push_mat(&mut out, "Edot", &k.strain_rate);
        }
        if wants(Output::Hdot) {
            push_mat(&mut out, "Hdot", &k.curvature_rate);
        }
        if wants(Output::Omega) {
            for (name, x) in ["omega_13", "omega_23", "omega_12"].iter().zip(k.omega_upper()) {
                out.push((name.to_string(), x));
            }
        }
        if wants(Output::Stilde) {
            push_mat(&mut out, "Stilde", &p.material.modified_stress(&k.strain, gi));
        }
        if wants(Output::N) {
            push_mat(&mut out, "N", &p.material.couple_stress(&k.curvature_change, gi));
        }
        if wants(Output::Energy) {
            out.push(("energy".into(), p.material.energy_density(&k.strain, &k.curvature_change, gi)));
        }
    }

    if wants(Output::S) {
        let s = StressPoint::<f64>::evaluate(&p.chart, &p.motion, &p.material, c.body_moment, u, t)?;
        for a in 0..3 {
            for i in 0..2 {
                out.push((format!("S_{}{}", a + 1, i + 1), s.second_pk[a][i]));
            }
        }
    }

    let wants_balance = [Output::Momentum, Output::Angular, Output::EnergyBalance, Output::Mass];
    if wants_balance.iter().any(|o| wants(*o)) {
        let case = balance_case(p);
        let dt = c.differentiation.rate_dt;
        if wants(Output::Momentum) {
            push_vec(&mut out, "momentum", &case.momentum_residual(u, t)?);
        }
        if wants(Output::Angular) {
            let r = case.angular_momentum_residual(u, t, Probe::default())?;
            for (name, x) in ["angular_13", "angular_23", "angular_12"].iter().zip(r) {
                out.push((name.to_string(), x));
            }
        }
        if wants(Output::EnergyBalance) {
            out.push(("energy_residual".into(), case.energy_residual(u, t, dt)?));
        }
        if wants(Output::Mass) {
            out.push(("mass_rate".into(), case.mass_residual(u, t, dt)?));
        }
    }

    if let (true, Some(pm)) = (wants(Output::Linearized), &p.perturbed) {
        let ex = expansion(&p.chart, pm, &p.material, u)?;
        let f = &ex.first;
        out.push(("detFprime".into(), f.det_f));
        push_mat(&mut out, "Eprime", &f.strain);
        push_mat(&mut out, "Hprime", &f.curvature_change);
        push_mat(&mut out, "Nprime", &f.couple);
        push_mat(&mut out, "Sprime", &f.stress);
        push_vec(&mut out, "e3prime", &f.normal);
    }

    if let (true, Some(cyl)) = (wants(Output::Cylinder), &p.cylinder) {
        let closed = cyl.closed_form(u)?.entries();
        let general = cyl.general(u)?.entries();
        for ((name, a), (_, b)) in closed.iter().zip(&general) {
            out.push((format!("closed_{name}"), *a));
            out.push((format!("general_{name}"), *b));
            out.push((format!("delta_{name}"), (a - b).abs()));
        }
    }
    Ok(out)
}

fn max_abs_with_prefix(r: &Record, prefix: &str) -> Option<f64> {
    let vals: Vec<f64> = r.iter().filter(|(n, _)| n.starts_with(prefix)).map(|(_, v)| v.abs()).collect();
    (!vals.is_empty()).then(|| vals.iter().fold(0.0_f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(*v) }))
}

pub fn run(p: &Prepared) -> Bundle {
    let points: Vec<PointResult> = p
        .config
        .grid
        .points()
        .into_par_iter()
        .map(|(i, j, u)| PointResult { index: (i, j), u, values: evaluate_point(p, u) })
        .collect();

    let tol = &p.config.tolerances;
    let kinds: [(Output, &'static str, &'static str, f64); 5] = [
        (Output::Momentum, "momentum", "momentum_", tol.momentum),
        (Output::Angular, "angular", "angular_", tol.angular),
        (Output::EnergyBalance, "energy", "energy_residual", tol.energy),
        (Output::Mass, "mass", "mass_rate", tol.mass),
        (Output::Cylinder, "cylinder", "delta_", tol.cylinder),
    ];
    let residuals = kinds
        .iter()
        .filter(|(o, ..)| p.config.outputs.contains(o))
        .map(|(_, name, prefix, tol)| {
            let values: Vec<f64> = points
                .iter()
                .filter_map(|pt| pt.values.as_ref().ok().and_then(|r| max_abs_with_prefix(r, prefix)))
                .collect();
            (*name, ResidualReport::new(&values, *tol))
        })
        .collect();
    Bundle { points, residuals }
}

fn report_json(r: &ResidualReport) -> Value {
    json!({ "max": r.max, "rms": r.rms, "count": r.count, "tolerance": r.tolerance, "pass": r.passes() })
}

pub fn to_json(p: &Prepared, b: &Bundle) -> Result<String, serde_json::Error> {
    let points: Vec<Value> = b
        .points
        .iter()
        .map(|pt| {
            let mut m = Map::new();
            m.insert("i".into(), json!(pt.index.0));
            m.insert("j".into(), json!(pt.index.1));
            m.insert("X1".into(), json!(pt.u[0]));
            m.insert("X2".into(), json!(pt.u[1]));
            match &pt.values {
                Ok(r) => {
                    let vals: Map<String, Value> = r.iter().map(|(n, v)| (n.clone(), json!(v))).collect();
                    m.insert("values".into(), Value::Object(vals));
                }
                Err(e) => {
                    m.insert("error".into(), json!(e.to_string()));
                }
            }
            Value::Object(m)
        })
        .collect();
    let residuals: Map<String, Value> = b.residuals.iter().map(|(n, r)| (n.to_string(), report_json(r))).collect();
    let doc = json!({
        "schema": "gashell-result/1",
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(&p.config)?,
        "points": points,
        "residuals": residuals,
        "pass": b.passed(),
    });
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// One row per grid point; columns follow the first successful point.
pub fn to_csv(b: &Bundle) -> Result<Vec<u8>, csv::Error> {
    let columns: Vec<String> = b
        .points
        .iter()
        .find_map(|pt| pt.values.as_ref().ok())
        .map(|r| r.iter().map(|(n, _)| n.clone()).collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["i".to_string(), "j".into(), "X1".into(), "X2".into()];
    header.extend(columns.iter().cloned());
    header.push("error".into());
    w.write_record(&header)?;
    for pt in &b.points {
        let mut row = vec![pt.index.0.to_string(), pt.index.1.to_string(), pt.u[0].to_string(), pt.u[1].to_string()];
        match &pt.values {
            Ok(r) => {
                row.extend(r.iter().map(|(_, v)| v.to_string()));
                row.push(String::new());
            }
            Err(e) => {
                row.extend(columns.iter().map(|_| String::new()));
                row.push(e.to_string());
            }
        }
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn summary(b: &Bundle) -> String {
    let failed_points = b.points.iter().filter(|p| p.values.is_err()).count();
    let mut s = format!("points: {} evaluated, {failed_points} with errors\n", b.points.len());
    for (name, r) in &b.residuals {
        let verdict = if r.passes() { "PASS" } else { "FAIL" };
        s.push_str(&format!(
            "[{verdict}] {name} max={:.3e} rms={:.3e} tol={:.1e} points={}\n",
            r.max, r.rms, r.tolerance, r.count
        ));
        if *name == "cylinder" {
            let over = components_over(b, "delta_", r.tolerance);
            if !over.is_empty() {
                s.push_str(&format!("  over tolerance: {}\n", over.join(", ")));
            }
        }
    }
    s
}

/// Names (prefix stripped) whose value exceeds `tol` at some point.
fn components_over(b: &Bundle, prefix: &str, tol: f64) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for pt in &b.points {
        for (n, v) in pt.values.iter().flatten() {
            if let Some(short) = n.strip_prefix(prefix) {
                if !(v.abs() <= tol) && !out.iter().any(|o| o == short) {
                    out.push(short.to_string());
                }
            }
        }
    }
    out
}
