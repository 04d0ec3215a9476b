//! One function per subcommand. Each returns whether its checks passed, the
//! scenario tolerances and a JSON result body, and writes its CSV and plot
//! data through [`Output`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use symfield::grading::*;
use symfield::lattice::closure;
use symfield::linalg::{self, CMat};
use symfield::rep::*;
use symfield::spectra::*;
use symfield::symplin::*;
use symfield::{Error, Result, C64};

use crate::config::*;
use crate::report::{fmt_f64, to_value, Output};

pub struct Outcome {
    pub pass: bool,
    pub tolerances: Value,
    pub results: Value,
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn v2(a: f64, b: f64) -> Vector {
    Vector::from_vec(vec![a, b])
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn frame_residual(rep: &Rep, xi: &Vector, eta: &Vector) -> Result<f64> {
    let frame = rep.frame();
    let wx = weyl_op(rep, xi)?.matrix;
    let we = weyl_op(rep, eta)?.matrix;
    let ws = weyl_op(rep, &(xi + eta))?.matrix;
    let ph = C64::from_polar(1.0, 0.5 * rep.space().sigma(xi, eta));
    let lhs = &wx * (&we * &frame);
    let rhs = linalg::scale(&(&ws * &frame), ph);
    Ok(linalg::max_col_norm(&linalg::sub(&lhs, &rhs)))
}

pub fn ccr_check(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let c = &cfg.ccr;
    let xi = Vector::from_vec(c.xi.clone());
    let eta = Vector::from_vec(c.eta.clone());
    let mut pass = true;
    let mut backends = Vec::new();
    let mut rows = Vec::new();
    for b in &c.backends {
        let rep = Rep::from_descriptor(b)?;
        let (residual, tol, pairs) = match &rep {
            Rep::Finite(f) => {
                let pts = f.lattice_points();
                let mats: Vec<CMat> = pts.iter().map(|p| f.weyl_matrix(p)).collect::<Result<_>>()?;
                let mut worst = 0.0f64;
                for (i, a) in pts.iter().enumerate() {
                    for (j, bb) in pts.iter().enumerate() {
                        let lhs = &mats[i] * &mats[j];
                        let ph = C64::from_polar(1.0, 0.5 * f.space().sigma(a, bb));
                        let rhs = linalg::scale(&f.weyl_matrix(&(a + bb))?, ph);
                        worst = worst.max(linalg::max_abs(&linalg::sub(&lhs, &rhs)));
                    }
                }
                (worst, c.tol_exact, pts.len() * pts.len())
            }
            _ => (frame_residual(&rep, &xi, &eta)?, c.tol_grid, 1),
        };
        let ok = residual < tol;
        pass &= ok;
        rows.push(vec![format!("{:?}", b).replace(',', ";"), fmt_f64(residual), ok.to_string()]);
        backends.push(json!({"backend": to_value(b), "pairs": pairs, "residual": residual, "tol": tol, "pass": ok}));
    }
    let mut refinement = Vec::new();
    let mut curve = Vec::new();
    for &m in &c.refinement {
        let rep = Rep::Grid(GridRep::balanced(1, m)?);
        let r = frame_residual(&rep, &xi, &eta)?;
        curve.push((m as f64, r));
        refinement.push(json!({"m": m, "residual": r}));
    }
    let monotone = curve.windows(2).all(|w| w[1].1 <= w[0].1.max(c.noise_floor));
    let finest_ok = curve.last().is_none_or(|p| p.1 < c.tol_grid);
    pass &= monotone && finest_ok;
    out.csv("ccr_backends", &["backend", "residual", "pass"], &rows).map_err(io)?;
    out.csv(
        "ccr_refinement",
        &["m", "residual"],
        &curve.iter().map(|(m, r)| vec![format!("{}", *m as usize), fmt_f64(*r)]).collect::<Vec<_>>(),
    )
    .map_err(io)?;
    out.dat("ccr_refinement", "m", "residual", &curve).map_err(io)?;
    Ok(Outcome {
        pass,
        tolerances: json!({"tol_exact": c.tol_exact, "tol_grid": c.tol_grid, "noise_floor": c.noise_floor}),
        results: json!({
            "xi": c.xi, "eta": c.eta,
            "backends": backends,
            "refinement": refinement,
            "monotone": monotone,
            "finest_within_tol": finest_ok,
        }),
    })
}

fn gauss_width(w: f64) -> impl Fn(f64) -> C64 {
    move |t: f64| re((-(t / w) * (t / w)).exp())
}

fn rank_one(frame: &CMat, c: usize) -> CMat {
    let n = frame.nrows();
    CMat::from_fn(n, n, |i, j| frame[(i, c)] * frame[(j, c)].conj())
}

pub fn grading(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let gc = &cfg.grading;
    let g = GridRep::balanced(1, gc.m)?;
    let rep = Rep::Grid(g.clone());
    let sp = g.space().clone();
    let frame = rep.frame();
    let line = |a: f64| Subspace::span(&sp, &[v2(a.cos(), a.sin())]);
    let dir = |a: f64| v2(a.cos(), a.sin());
    let mut pass = true;
    let mut cases = Vec::new();
    let mut rows = Vec::new();
    for (i, c) in gc.cases.iter().enumerate() {
        let t = field_function(&rep, &dir(c.xi_angle), gauss_width(c.width))?;
        let e = line(c.e_angle)?;
        let omega = sigma_complement(&e).basis_vector(0);
        let sched = tail_schedule(&rep, &omega, gc.schedule.lo, gc.schedule.hi, gc.schedule.count);
        let r = project_pe(&rep, &t, &e, &omega, &sched, gc.tol)?;
        let in_e = e.contains(&dir(c.xi_angle));
        let predicted = if in_e { Verdict::ConvergedToT } else { Verdict::ConvergedToZero };
        let ok = r.verdict == predicted;
        pass &= ok;
        let pts: Vec<(f64, f64)> = r
            .schedule
            .iter()
            .zip(if in_e { &r.dist_to_t } else { &r.dist_to_zero })
            .map(|(a, b)| (*a, *b))
            .collect();
        out.dat(&format!("grading_case{i}"), "r", "distance", &pts).map_err(io)?;
        rows.push(vec![i.to_string(), fmt_f64(c.xi_angle), fmt_f64(c.e_angle), to_value(&r.verdict).to_string(), ok.to_string()]);
        cases.push(json!({"case": to_value(c), "predicted": to_value(&predicted), "matches": ok, "report": to_value(&r)}));
    }
    out.csv("grading_cases", &["case", "xi_angle", "e_angle", "verdict", "matches"], &rows).map_err(io)?;

    // Boolean square {0, L1, L2, Xi}
    let l1 = Subspace::axes(&sp, &[0])?;
    let l2 = Subspace::axes(&sp, &[1])?;
    let s = closure(&[l1.clone(), l2.clone()])?;
    let n = g.dim();
    let sech = |t: f64| re(1.0 / t.cosh());
    let g1 = field_function(&rep, &v2(1.0, 0.0), gauss_width(1.0))?;
    let g1b = field_function(&rep, &v2(1.0, 0.0), sech)?;
    let g2 = field_function(&rep, &v2(0.0, 1.0), gauss_width(1.0))?;
    let g2b = field_function(&rep, &v2(0.0, 1.0), sech)?;
    let component = |e: &Subspace, a: C64, b: C64| -> CMat {
        if e.is_zero() {
            linalg::scale(&linalg::identity(n), a)
        } else if e.same_as(&l1) {
            linalg::axpy(&linalg::scale(&g1, a), b, &g1b)
        } else if e.same_as(&l2) {
            linalg::axpy(&linalg::scale(&g2, a), b, &g2b)
        } else {
            linalg::axpy(&linalg::scale(&rank_one(&frame, 1), a), b, &rank_one(&frame, 5))
        }
    };
    let declared = GradedElement::new(
        s.clone(),
        s.elements().iter().map(|e| component(e, re(0.7), C64::new(0.0, 0.3))).collect(),
    )?;
    let dopts = DecomposeOptions { seed: cfg.seed, ..Default::default() };
    let dec = graded_decompose(&rep, &declared, &dopts)?;
    let dec_ok = dec.max_residual < gc.decompose_tol;
    pass &= dec_ok;
    let elements: Vec<Value> = s.elements().iter().map(|e| to_value(&e.record())).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rc = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut pairs = Vec::new();
    for _ in 0..gc.morphism_pairs {
        let mut mk = || -> Result<GradedElement> {
            GradedElement::new(s.clone(), s.elements().iter().map(|e| component(e, rc(), rc())).collect())
        };
        let a = mk()?;
        let b = mk()?;
        pairs.push((a, b));
    }
    let mut morph = Vec::new();
    let mut morph_max = 0.0f64;
    for e in [&l1, &l2] {
        let r = morphism_residual(&rep, e, &pairs, &dopts)?;
        morph_max = morph_max.max(r.max);
        morph.push(json!({"subspace": to_value(&e.record()), "report": to_value(&r)}));
    }
    let morph_ok = morph_max < gc.morphism_tol;
    pass &= morph_ok || gc.morphism_pairs == 0;
    Ok(Outcome {
        pass,
        tolerances: json!({"tol": gc.tol, "decompose_tol": gc.decompose_tol, "morphism_tol": gc.morphism_tol, "schedule": to_value(&gc.schedule)}),
        results: json!({
            "grid": to_value(&rep.descriptor()),
            "dichotomy": cases,
            "decomposition": {"elements": elements, "residuals": dec.residuals, "max_residual": dec.max_residual, "directions": dec.directions, "pass": dec_ok},
            "morphism": {"pairs": gc.morphism_pairs, "per_subspace": morph, "max": morph_max, "pass": morph_ok},
        }),
    })
}

fn dispersion_fn(c: &HvzConfig) -> impl Fn(&[f64]) -> f64 {
    let kind = c.dispersion;
    let mass = c.mass;
    move |k: &[f64]| {
        let k2: f64 = k.iter().map(|x| x * x).sum();
        match kind {
            Dispersion::Square => k2,
            Dispersion::Relativistic => (k2 + mass * mass).sqrt() - mass,
        }
    }
}

fn potential_fn(p: &PotentialConfig) -> impl Fn(&[f64]) -> f64 {
    let p = p.clone();
    move |q: &[f64]| {
        let s = match (&p.direction, &p.center) {
            (Some(a), _) => a.iter().zip(q).map(|(a, x)| a * x).sum::<f64>(),
            (None, c) => q
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let y = x - c.as_ref().map_or(0.0, |c| c[i]);
                    y * y
                })
                .sum::<f64>()
                .sqrt(),
        };
        p.strength * (-(s / p.width) * (s / p.width)).exp()
    }
}

/// X together with every potential's subspace, closed under intersection.
fn meet_closure(x: &Subspace, ys: &[Subspace]) -> Result<Vec<Subspace>> {
    let mut out = vec![x.clone()];
    for y in ys {
        if !out.iter().any(|e| e.same_as(y)) {
            out.push(y.clone());
        }
    }
    loop {
        let mut added = false;
        for a in 0..out.len() {
            for b in (a + 1)..out.len() {
                let m = lattice_intersect(&out[a], &out[b])?;
                if !out.iter().any(|e| e.same_as(&m)) {
                    out.push(m);
                    added = true;
                }
            }
        }
        if !added {
            return Ok(out);
        }
    }
}

fn build_hamiltonian(c: &HvzConfig, g: &GridRep) -> Result<GradedHamiltonian> {
    let sp = g.space().clone();
    let x = g.split().x().clone();
    let mut ys = Vec::new();
    let mut pots = Vec::new();
    for p in &c.potentials {
        let y = if p.along.is_empty() { Subspace::zero(&sp) } else { Subspace::axes(&sp, &p.along)? };
        ys.push(y.clone());
        pots.push(Potential::new(y, potential_fn(p)));
    }
    let lattice = meet_closure(&x, &ys)?;
    nbody_hamiltonian(g, &lattice, dispersion_fn(c), pots, &NbodyOptions { form_shift: c.form_shift })
}

fn hvz_grid(c: &HvzConfig, l: Option<f64>) -> Result<GridRep> {
    match l {
        Some(l) => GridRep::standard(c.d, c.m, l),
        None => GridRep::balanced(c.d, c.m),
    }
}

pub fn hvz(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let c = &cfg.hvz;
    let g = hvz_grid(c, c.l)?;
    let h = build_hamiltonian(c, &g)?;
    let opts = HvzOptions { cluster_factor: c.cluster_factor, ..Default::default() };
    let rep = hvz_essential_spectrum(&h, &opts)?;
    let mut pass = true;
    out.raw_csv("spectrum", &rep.to_csv()).map_err(io)?;
    let pts: Vec<(f64, f64)> = rep.eigenvalues.iter().enumerate().map(|(i, e)| (i as f64, *e)).collect();
    out.dat("spectrum", "index", "eigenvalue", &pts).map_err(io)?;
    let mut hsr = Value::Null;
    if !c.hsr_fractions.is_empty() && h.potential().iter().any(|v| *v != 0.0) {
        let traces = hsr_cross_check(&h, &c.hsr_fractions, cfg.seed)?;
        for (i, t) in traces.iter().enumerate() {
            let pts: Vec<(f64, f64)> = t.schedule.iter().cloned().zip(t.residual.iter().cloned()).collect();
            out.dat(&format!("hsr_{i}"), "r", "residual", &pts).map_err(io)?;
            pass &= t.decreasing;
        }
        hsr = to_value(&traces);
    }
    let mut double_box = Value::Null;
    if let Some(b) = &c.double_box {
        let small = spectrum(&build_hamiltonian(c, &hvz_grid(c, Some(b.l_small))?)?.matrix())?;
        let large = spectrum(&build_hamiltonian(c, &hvz_grid(c, Some(b.l_large))?)?.matrix())?;
        let est = double_box_threshold(&small, &large, b.match_tol);
        let rel = est.map(|e| (e - rep.threshold).abs() / rep.threshold.abs().max(1e-300));
        let ok = rel.is_some_and(|r| r < b.rel_tol);
        pass &= ok;
        double_box = json!({"config": to_value(b), "estimate": est, "union_threshold": rep.threshold, "relative_gap": rel, "pass": ok});
    }
    Ok(Outcome {
        pass,
        tolerances: json!({"cluster_factor": c.cluster_factor, "form_shift": c.form_shift, "discrete_tol": opts.discrete_tol}),
        results: json!({
            "parts": to_value(&h.parts()),
            "form_budget": h.form_budget(),
            "spectrum": to_value(&rep),
            "hsr": hsr,
            "double_box": double_box,
        }),
    })
}

pub fn demo2d(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let c = &cfg.demo2d;
    let g = GridRep::balanced(1, c.m)?;
    let rep = Rep::Grid(g.clone());
    let f = rep.frame();
    let q = g.q(0);
    let p = g.p(0);
    let qf = &q * &f;
    let pf = &p * &f;
    let mut pass = true;
    let mut rot = Vec::new();
    for &th in &c.thetas {
        let cot = th.cos() / th.sin();
        let u = g.momentum_function(|k| C64::from_polar(1.0, -0.5 * cot * k[0] * k[0]));
        let lhs = &u * (&q * (u.adjoint() * &f));
        let rhs = linalg::sub(&qf, &linalg::scale(&pf, re(cot)));
        rot.push((th, linalg::max_col_norm(&linalg::sub(&lhs, &rhs))));
    }
    let delta = linalg::scale(&(&q * &p + &p * &q), re(0.5));
    let mut dil = Vec::new();
    for &t in &c.dilations {
        let e = linalg::func_hermitian(&delta, |x| C64::from_polar(1.0, t * x))?;
        let lhs = &e * (&q * (e.adjoint() * &f));
        let rhs = linalg::scale(&qf, re(t.exp()));
        dil.push((t, linalg::max_col_norm(&linalg::sub(&lhs, &rhs))));
    }
    pass &= rot.iter().chain(dil.iter()).all(|(_, r)| *r < c.tol);
    out.dat("rotation", "theta", "residual", &rot).map_err(io)?;
    out.dat("dilation", "t", "residual", &dil).map_err(io)?;
    let rows: Vec<Vec<String>> = rot
        .iter()
        .map(|(a, r)| vec!["rotation".into(), fmt_f64(*a), fmt_f64(*r)])
        .chain(dil.iter().map(|(a, r)| vec!["dilation".into(), fmt_f64(*a), fmt_f64(*r)]))
        .collect();
    out.csv("demo2d", &["identity", "parameter", "residual"], &rows).map_err(io)?;
    let pairs = |v: &[(f64, f64)], k: &str| -> Vec<Value> { v.iter().map(|(a, r)| json!({k: a, "residual": r})).collect() };
    Ok(Outcome {
        pass,
        tolerances: json!({"tol": c.tol}),
        results: json!({
            "grid": to_value(&rep.descriptor()),
            "rotation": pairs(&rot, "theta"),
            "dilation": pairs(&dil, "t"),
        }),
    })
}

pub fn aniso(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let c = &cfg.aniso;
    let g = GridRep::balanced(1, c.m)?;
    let rep = Rep::Grid(g.clone());
    let p = g.p(0);
    let mut h = &p * &p;
    for i in 0..g.dim() {
        let x = g.point(i)[0];
        let v = match c.potential {
            AnisoPotential::Step => c.a_minus + (c.a_plus - c.a_minus) * (1.0 + x.tanh()) / 2.0,
            AnisoPotential::Bump => c.strength * (-x * x).exp(),
        };
        h[(i, i)] += C64::new(v, 1.0);
    }
    let t = linalg::inverse(&h);
    let omega = v2(1.0, 0.0);
    let sched = tail_schedule(&rep, &omega, c.schedule.lo, c.schedule.hi, c.schedule.count);
    let lim = translation_limits(&rep, &t, &omega, &sched, c.tol)?;
    let verdict = if lim.flagged {
        "not-converged"
    } else if lim.equal {
        "limits agree"
    } else {
        "limits differ"
    };
    let expected = match c.expect {
        None => true,
        Some(Expectation::Differ) => verdict == "limits differ",
        Some(Expectation::Agree) => verdict == "limits agree",
    };
    let pass = !lim.flagged && expected;
    for (name, s) in [("plus", &lim.plus), ("minus", &lim.minus)] {
        let pts: Vec<(f64, f64)> = s.schedule.iter().cloned().zip(s.successive.iter().cloned()).collect();
        out.dat(&format!("aniso_{name}"), "r", "successive", &pts).map_err(io)?;
    }
    out.csv("aniso", &["verdict", "distance"], &[vec![verdict.into(), fmt_f64(lim.distance)]]).map_err(io)?;
    Ok(Outcome {
        pass,
        tolerances: json!({"tol": c.tol, "schedule": to_value(&c.schedule)}),
        results: json!({"grid": to_value(&rep.descriptor()), "verdict": verdict, "expected": to_value(&c.expect), "limits": to_value(&lim)}),
    })
}

pub fn membership(cfg: &ScenarioConfig, out: &Output) -> Result<Outcome> {
    let c = &cfg.membership;
    let mut levels = Vec::new();
    let mut res = Vec::new();
    let mut basis_gap = 0.0f64;
    for (idx, &m) in c.m.iter().enumerate() {
        let g = GridRep::balanced(1, m)?;
        let rep = Rep::Grid(g.clone());
        let xi = Subspace::full(g.space());
        let delta = laplacian_delta_e(&rep, &xi, &[v2(1.0, 0.0), v2(0.0, 1.0)])?.matrix;
        if idx == 0 {
            let a = c.basis_angle;
            let rot = laplacian_delta_e(&rep, &xi, &[v2(a.cos(), a.sin()), v2(-a.sin(), a.cos())])?.matrix;
            basis_gap = linalg::spectral_norm(&linalg::sub(&delta, &rot));
        }
        let mut shifted = delta;
        for i in 0..g.dim() {
            shifted[(i, i)] += re(1.0);
        }
        let t = linalg::inverse(&shifted);
        let r = membership_check(&rep, &t, &xi, c.scale_factor / m as f64, c.tol)?;
        res.push((m as f64, r.residual_i, r.residual_ii, r.residual_iii));
        levels.push(json!({"m": m, "report": to_value(&r)}));
    }
    let dec = |k: usize| {
        res.windows(2).all(|w| {
            let (a, b) = match k {
                0 => (w[0].1, w[1].1),
                1 => (w[0].2, w[1].2),
                _ => (w[0].3, w[1].3),
            };
            b <= a
        })
    };
    let decreasing = dec(0) && dec(1) && dec(2);
    let last = res.last().expect("nonempty");
    let below = last.1 < c.tol && last.2 < c.tol && last.3 < c.tol;
    let basis_ok = basis_gap < c.basis_tol;
    let pass = decreasing && below && basis_ok;
    for (k, name) in ["i", "ii", "iii"].iter().enumerate() {
        let pts: Vec<(f64, f64)> = res.iter().map(|r| (r.0, [r.1, r.2, r.3][k])).collect();
        out.dat(&format!("membership_{name}"), "m", "residual", &pts).map_err(io)?;
    }
    let rows: Vec<Vec<String>> =
        res.iter().map(|r| vec![format!("{}", r.0 as usize), fmt_f64(r.1), fmt_f64(r.2), fmt_f64(r.3)]).collect();
    out.csv("membership", &["m", "residual_i", "residual_ii", "residual_iii"], &rows).map_err(io)?;
    Ok(Outcome {
        pass,
        tolerances: json!({"tol": c.tol, "basis_tol": c.basis_tol, "scale_factor": c.scale_factor}),
        results: json!({
            "operator": "(Delta_Xi + 1)^-1",
            "levels": levels,
            "decreasing": decreasing,
            "below_tol": below,
            "basis_independence": basis_gap,
        }),
    })
}
