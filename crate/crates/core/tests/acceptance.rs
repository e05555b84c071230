//! Acceptance suite. Runs as a plain binary (`harness = false`) so that every
//! criterion prints one line; exits non-zero if any criterion fails.

mod common;

use common::*;
use kahler::expr::parse_expression;
use kahler::functionals::ricci;
use kahler::geometry::{catalog, curvature_tensor, KahlerChart, Region};
use kahler::jet::WirtingerJet;
use kahler::scenario::RunOptions;
use kahler::C64;

const CURVATURE_TOL: f64 = 1e-10;
const FLAT_TOL: f64 = 1e-12;
const JET_FD_RTOL: f64 = 1e-6;
const JET_FD_POINTS: usize = 100;
const IDENTITY_TOL: f64 = 1e-6;
const SANDWICH_TOL: f64 = 1e-10;
const EQUALITY_TOL: f64 = 1e-8;
const THREE_CIRCLE_EQ_TOL: f64 = 1e-9;
const PSH_TOL: f64 = 1e-8;
const PSH_POINTS: usize = 200;
const DETERMINISM_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn zero2() -> Vec<C64> {
    vec![C64::new(0.0, 0.0); 2]
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, sign) in [("complex_hyperbolic_ball", -1.0), ("fubini_study", 1.0)] {
        let chart = catalog(name, 2, None).map_err(|e| e.to_string())?;
        let cp = curvature_tensor(&chart, &zero2()).map_err(|e| e.to_string())?;
        // F(s) = ∓log(1 ∓ s) has F''(0) = −sign
        let f2 = -sign;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        let want = radial_origin_curvature(f2, a, b, c, d);
                        worst = worst.max((cp.riem(a, b, c, d) - C64::new(want, 0.0)).norm());
                    }
                }
            }
        }
        ensure((cp.riem(0, 0, 0, 0).re - 2.0 * sign).abs() <= CURVATURE_TOL, format!("{name}: R_1111 = {}", cp.riem(0, 0, 0, 0)))?;
        ensure((cp.riem(0, 0, 1, 1).re - sign).abs() <= CURVATURE_TOL, format!("{name}: R_1122 = {}", cp.riem(0, 0, 1, 1)))?;
        let ric = ricci(&cp);
        for a in 0..2 {
            for b in 0..2 {
                let want = if a == b { 3.0 * sign } else { 0.0 };
                worst = worst.max((ric[(a, b)] - C64::new(want, 0.0)).norm());
            }
        }
    }
    ensure(worst <= CURVATURE_TOL, format!("ball/FS origin deviation {worst:e}"))?;
    let flat = catalog("flat", 2, None).map_err(|e| e.to_string())?;
    let mut flat_worst: f64 = 0.0;
    for p in ball_points(2, 3.0, 20, 1) {
        let cp = curvature_tensor(&flat, &p).map_err(|e| e.to_string())?;
        flat_worst = flat_worst.max(cp.raw_riem().iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    ensure(flat_worst <= FLAT_TOL, format!("flat curvature {flat_worst:e}"))?;
    Ok(format!("ball/FS origin max deviation {worst:.1e}, flat max |R| {flat_worst:.1e}"))
}

fn catalog_potentials() -> Vec<(&'static str, usize, &'static str, f64)> {
    vec![
        ("flat", 2, "abs2(z1) + abs2(z2)", 3.0),
        ("poincare_disk", 1, "-log(1 - abs2(z1))", 0.8),
        ("poincare_polydisk", 2, "-log(1 - abs2(z1)) - log(1 - abs2(z2))", 0.7),
        ("complex_hyperbolic_ball", 2, "-log(1 - abs2(z1) - abs2(z2))", 0.8),
        ("fubini_study", 2, "log(1 + abs2(z1) + abs2(z2))", 3.0),
    ]
}

fn multi_indices(m: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let unit = |k: usize| {
        let mut v = vec![0; m];
        v[k] += 1;
        v
    };
    let zero = vec![0; m];
    out.push((zero.clone(), zero.clone()));
    for k in 0..m {
        out.push((unit(k), zero.clone()));
        out.push((zero.clone(), unit(k)));
    }
    for j in 0..m {
        for k in 0..m {
            let mut aa = unit(j);
            aa[k] += 1;
            if j <= k {
                out.push((aa.clone(), zero.clone()));
                let mut bb = unit(j);
                bb[k] += 1;
                out.push((zero.clone(), bb));
            }
            out.push((unit(j), unit(k)));
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for (name, m, text, r) in catalog_potentials() {
        let phi = parse_expression(text).map_err(|e| e.to_string())?;
        let f = |z: &[C64]| phi.eval(z).unwrap();
        let region = if name == "poincare_polydisk" { 0.7 / 2f64.sqrt() } else { r };
        for (i, p) in ball_points(m, region, JET_FD_POINTS, 2 + m as u64).iter().enumerate() {
            let coords = WirtingerJet::coordinates(p, 2).map_err(|e| e.to_string())?;
            let jet = phi.eval_jet(&coords).map_err(|e| e.to_string())?;
            for (a, b) in multi_indices(m) {
                let exact = jet.derivative(&a, &b).map_err(|e| e.to_string())?;
                let fd = wirtinger_fd(&f, p, &a, &b, 1e-2);
                let rel = (exact - fd).norm() / fd.norm().max(1.0);
                if rel > worst {
                    worst = rel;
                }
                compared += 1;
                if rel > JET_FD_RTOL {
                    return Err(format!("{name} point {i} ∂^{a:?}∂̄^{b:?}: jet {exact} vs fd {fd}"));
                }
            }
        }
        // the catalog metric agrees with the Hessian of the potential written out here
        let chart = catalog(name, m, None).map_err(|e| e.to_string())?;
        let via_potential = KahlerChart::from_potential(name, m, phi.clone(), Region::Whole).map_err(|e| e.to_string())?;
        let p = &ball_points(m, region, 1, 99)[0];
        let d = (chart.metric_at(p).map_err(|e| e.to_string())? - via_potential.metric_at(p).map_err(|e| e.to_string())?).norm();
        ensure(d <= 1e-12, format!("{name}: catalog metric differs from potential Hessian by {d:e}"))?;
    }
    Ok(format!("{compared} partials over {} charts, worst relative error {worst:.1e}", catalog_potentials().len()))
}

fn identity_criterion(kind: &str, scenarios: &[&str], min_points: usize, min_count: usize) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = 0;
    for name in scenarios {
        let doc = run_scenario(name, &default_opts());
        let e = entry(&doc, kind);
        ensure(e["status"] == "pass", format!("{name}/{kind}: status {}", e["status"]))?;
        ensure(num(&e["tolerance"]) <= IDENTITY_TOL, format!("{name}/{kind}: tolerance looser than {IDENTITY_TOL}"))?;
        let n = e["points_checked"].as_u64().unwrap() as usize;
        ensure(n >= min_points, format!("{name}/{kind}: only {n} points"))?;
        let r = num(&e["max_abs_residual"]);
        ensure(r <= IDENTITY_TOL, format!("{name}/{kind}: residual {r:e}"))?;
        worst = worst.max(r);
        ok += 1;
    }
    ensure(ok >= min_count, format!("only {ok} triples"))?;
    Ok(format!("{ok} triples, ≥ {min_points} points each, worst residual {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    // disk_to_ball and ball_to_ball have curved domain and curved target
    identity_criterion(
        "boch1",
        &["boch1_flat_to_ball", "disk_to_ball", "ball_to_ball", "polydisk_to_ball", "flat_to_fubini_study"],
        50,
        3,
    )
}

fn criterion_4() -> Outcome {
    identity_criterion("boch2", &["boch1_flat_to_ball", "disk_to_ball", "ball_to_ball", "polydisk_to_ball"], 30, 2)
}

fn criterion_5() -> Outcome {
    identity_criterion("log_w", &["boch1_flat_to_ball", "disk_to_ball", "ball_to_ball"], 20, 2)
}

fn criterion_6() -> Outcome {
    let doc = run_scenario("averaging_ball", &default_opts());
    let e = entry(&doc, "sandwich");
    ensure(e["status"] == "pass", format!("status {}", e["status"]))?;
    let instances = e["values"]["instances"].as_u64().unwrap();
    ensure(instances >= 100, format!("only {instances} instances"))?;
    let slack = num(&e["values"]["min_slack"]);
    ensure(slack >= -SANDWICH_TOL, format!("min slack {slack:e}"))?;
    Ok(format!("{instances} pairs, {} (pair, index) cases, min slack {slack:.3e}", e["points_checked"]))
}

fn criterion_7() -> Outcome {
    let doc = run_scenario("averaging_ball", &default_opts());
    let e = entry(&doc, "averaging_inequality");
    let v = &e["values"];
    let (alg, quad, se) = (num(&v["algebraic"]), num(&v["quadrature"]), num(&v["stderr"]));
    ensure((alg + 2.0).abs() <= 1e-12, format!("algebraic {alg}, expected -2"))?;
    ensure((quad - alg).abs() <= 3.0 * se + 1e-12, format!("quadrature {quad} vs {alg} (stderr {se:e})"))?;
    ensure(v["identity_passed"] == true, "identity flag false")?;
    ensure(e["coefficient_text"] == "3/4", format!("coefficient {}", e["coefficient_text"]))?;
    ensure(e["status"] == "pass" && e["equality_case"] == true, format!("inequality status {} equality {}", e["status"], e["equality_case"]))?;
    let slack = num(&e["slack"]);
    ensure(slack.abs() <= EQUALITY_TOL, format!("slack {slack:e}"))?;
    let u = entry(&doc, "averaging_unequal");
    ensure(u["values"]["identity_passed"] == true && u["status"] == "pass", "unequal weights failed")?;
    let (uq, ua, us) = (num(&u["values"]["quadrature"]), num(&u["values"]["algebraic"]), num(&u["values"]["stderr"]));
    Ok(format!(
        "algebraic {alg}, quadrature {quad} ± {se:.1e}; (a1) slack {slack:.1e}; unequal weights {ua} vs {uq:.4} ± {us:.1e}"
    ))
}

fn criterion_8() -> Outcome {
    let doc = run_scenario("schwarz_disk_equality", &default_opts());
    let mut parts = Vec::new();
    for label in ["schwarz", "volume", "royden"] {
        let e = entry(&doc, label);
        let (obs, bound, slack) = (num(&e["observed"]), num(&e["bound"]), num(&e["slack"]));
        ensure((obs - 2.0).abs() <= EQUALITY_TOL && (bound - 2.0).abs() <= EQUALITY_TOL, format!("{label}: observed {obs} bound {bound}"))?;
        ensure(slack.abs() <= EQUALITY_TOL && e["equality_case"] == true, format!("{label}: slack {slack:e}"))?;
        ensure(e["status"] == "pass", format!("{label}: status {}", e["status"]))?;
        parts.push(format!("{label} {obs:.12}/{bound}"));
    }
    ensure(entry(&doc, "royden")["coefficient_text"] == "1", "rank 1 coefficient text")?;
    let doc2 = run_scenario("ball_rescaled_bounds", &default_opts());
    ensure(entry(&doc2, "royden")["coefficient_text"] == "4/3", "rank 2 coefficient text")?;
    Ok(format!("{} (K = 2, kappa = 1); Royden coefficients 1 and 4/3", parts.join(", ")))
}

fn criterion_9() -> Outcome {
    let flat = run_scenario("three_circle_flat", &default_opts());
    let e = entry(&flat, "three_circle");
    let s = num(&e["values"]["slack"]);
    ensure(s.abs() <= THREE_CIRCLE_EQ_TOL && e["status"] == "pass", format!("z^2 slack {s:e}"))?;
    let curved = run_scenario("three_circle_ball", &default_opts());
    let sparse = entry(&curved, "three_circle");
    let dense = entry(&curved, "three_circle_dense");
    let (s1, s2) = (num(&sparse["values"]["slack"]), num(&dense["values"]["slack"]));
    ensure(num(&dense["values"]["samples_per_sphere"]) == 2.0 * num(&sparse["values"]["samples_per_sphere"]), "densities not doubled")?;
    ensure(s1 >= 0.0 && s2 >= 0.0, format!("negative slack {s1:e}, {s2:e}"))?;
    ensure(s2 <= s1, format!("slack grew from {s1} to {s2}"))?;
    Ok(format!("z^2 slack {s:.1e}; curved slack {s1:.6} -> {s2:.6} at doubled density"))
}

fn criterion_10() -> Outcome {
    let doc = run_scenario("hoop_fubini_study", &default_opts());
    let mut parts = Vec::new();
    for label in ["hoop_volume", "hoop_stretching"] {
        let e = entry(&doc, label);
        let (obs, bound) = (num(&e["observed"]), num(&e["bound"]));
        ensure(e["status"] == "pass", format!("{label}: status {}", e["status"]))?;
        ensure((obs - 2.0).abs() <= EQUALITY_TOL && (bound - 2.0).abs() <= EQUALITY_TOL, format!("{label}: observed {obs}, bound {bound}"))?;
        parts.push(format!("{label} {obs:.12}"));
    }
    Ok(parts.join(", "))
}

fn criterion_11() -> Outcome {
    let mut parts = Vec::new();
    for (name, label) in [("psh_log1p_energy", "psh_log1p_energy"), ("psh_log_d", "psh_log_d")] {
        let doc = run_scenario(name, &default_opts());
        let e = entry(&doc, label);
        ensure(e["status"] == "pass", format!("{label}: status {}", e["status"]))?;
        let n = e["points_checked"].as_u64().unwrap() as usize;
        ensure(n >= PSH_POINTS, format!("{label}: {n} points"))?;
        let lo = num(&e["values"]["min_eigenvalue"]);
        ensure(lo >= -PSH_TOL, format!("{label}: min eigenvalue {lo:e}"))?;
        parts.push(format!("{label} min {lo:.3e} over {n}"));
    }
    Ok(parts.join(", "))
}

fn criterion_12() -> Outcome {
    let names = ["boch1_flat_to_ball", "averaging_ball", "three_circle_ball", "hoop_fubini_study", "psh_log_d", "schwarz_disk_equality"];
    let mut worst: f64 = 0.0;
    for name in names {
        let serial = RunOptions { threads: Some(1), ..default_opts() };
        let parallel = RunOptions { threads: Some(4), ..default_opts() };
        let a = run_scenario(name, &serial);
        let b = run_scenario(name, &serial);
        let c = run_scenario(name, &parallel);
        let d = max_json_diff(&a, &b).max(max_json_diff(&a, &c));
        ensure(d <= DETERMINISM_TOL, format!("{name}: reports differ by {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("{} scenarios, 1 vs 1 vs 4 threads, max difference {worst:e}", names.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("curvature oracles", criterion_1),
        ("jet vs finite differences", criterion_2),
        ("first Bochner identity", criterion_3),
        ("second Bochner identity", criterion_4),
        ("log of the top singular value", criterion_5),
        ("singular value sandwich", criterion_6),
        ("averaging identity and (a1)", criterion_7),
        ("Schwarz equality and Royden coefficients", criterion_8),
        ("three-circle", criterion_9),
        ("hoop lemmas", criterion_10),
        ("plurisubharmonicity", criterion_11),
        ("determinism", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(msg) => println!("criterion {:>2} PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
