#![allow(dead_code)]

use std::path::PathBuf;

use kahler::linalg::{inverse, CMatrix};
use kahler::report::ReportDocument;
use kahler::scenario::{RunOptions, Scenario};
use kahler::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

pub fn run_scenario(name: &str, opts: &RunOptions) -> serde_json::Value {
    let doc: ReportDocument = Scenario::from_path(&scenario_path(name)).unwrap().run(opts).unwrap();
    serde_json::from_str(&doc.to_json()).unwrap()
}

pub fn default_opts() -> RunOptions {
    RunOptions::default()
}

pub fn entry<'a>(doc: &'a serde_json::Value, label: &str) -> &'a serde_json::Value {
    doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["label"] == label)
        .unwrap_or_else(|| panic!("no check labeled {label}"))
}

pub fn num(v: &serde_json::Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// Seeded points in the ball of radius `r` in C^m.
pub fn ball_points(m: usize, r: f64, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let p: Vec<C64> = (0..m)
                .map(|_| C64::new(rng.random_range(-r..r), rng.random_range(-r..r)))
                .collect();
            if p.iter().map(|z| z.norm_sqr()).sum::<f64>() < r * r {
                break p;
            }
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Real {
    X(usize),
    Y(usize),
}

fn shifted(z: &[C64], moves: &[(Real, f64)]) -> Vec<C64> {
    let mut w = z.to_vec();
    for &(dir, h) in moves {
        match dir {
            Real::X(k) => w[k] += C64::new(h, 0.0),
            Real::Y(k) => w[k] += C64::new(0.0, h),
        }
    }
    w
}

fn real_partial<F: Fn(&[C64]) -> C64>(f: &F, z: &[C64], dirs: &[Real], h: f64) -> C64 {
    match dirs {
        [] => f(z),
        [d] => (f(&shifted(z, &[(*d, h)])) - f(&shifted(z, &[(*d, -h)]))) / (2.0 * h),
        [d, e] => {
            let pp = f(&shifted(z, &[(*d, h), (*e, h)]));
            let pm = f(&shifted(z, &[(*d, h), (*e, -h)]));
            let mp = f(&shifted(z, &[(*d, -h), (*e, h)]));
            let mm = f(&shifted(z, &[(*d, -h), (*e, -h)]));
            (pp - pm - mp + mm) / (4.0 * h * h)
        }
        _ => panic!("finite differences only up to order 2"),
    }
}

/// Central differences with two Richardson steps.
fn richardson<F: Fn(f64) -> C64>(d: F, h: f64) -> C64 {
    let a0 = d(h);
    let a1 = d(h / 2.0);
    let a2 = d(h / 4.0);
    let b0 = (a1 * 4.0 - a0) / 3.0;
    let b1 = (a2 * 4.0 - a1) / 3.0;
    (b1 * 16.0 - b0) / 15.0
}

/// `∂^a ∂̄^b f` by finite differences in real coordinates, for `|a| + |b| ≤ 2`.
/// `∂_k = (∂_x − i∂_y)/2` and `∂̄_k = (∂_x + i∂_y)/2`.
pub fn wirtinger_fd<F: Fn(&[C64]) -> C64>(f: &F, z: &[C64], a: &[usize], b: &[usize], h: f64) -> C64 {
    let mut ops: Vec<(usize, f64)> = Vec::new();
    for (k, &n) in a.iter().enumerate() {
        ops.extend(std::iter::repeat_n((k, -1.0), n));
    }
    for (k, &n) in b.iter().enumerate() {
        ops.extend(std::iter::repeat_n((k, 1.0), n));
    }
    assert!(ops.len() <= 2);
    // expand the product of (∂_x + s i ∂_y)/2 factors into real partials
    let mut terms: Vec<(C64, Vec<Real>)> = vec![(C64::new(1.0, 0.0), Vec::new())];
    for (k, s) in ops {
        let mut next = Vec::new();
        for (c, dirs) in &terms {
            let mut dx = dirs.clone();
            dx.push(Real::X(k));
            next.push((c * 0.5, dx));
            let mut dy = dirs.clone();
            dy.push(Real::Y(k));
            next.push((c * C64::new(0.0, 0.5 * s), dy));
        }
        terms = next;
    }
    terms
        .iter()
        .map(|(c, dirs)| c * richardson(|step| real_partial(f, z, dirs, step), h))
        .sum()
}

/// `R_{αβ̄γδ̄} = −∂_γ∂̄_δ g_{αβ̄} + g^{pq̄} ∂_γ g_{αq̄} ∂̄_δ g_{pβ̄}` from a closed-form metric,
/// with every derivative taken by finite differences.
pub fn fd_curvature<G: Fn(&[C64]) -> CMatrix>(g: &G, z: &[C64]) -> Vec<C64> {
    let m = z.len();
    let h = 1e-2;
    let unit = |k: usize| {
        let mut v = vec![0; m];
        v[k] = 1;
        v
    };
    let zero = vec![0; m];
    let comp = |a: usize, b: usize| move |w: &[C64]| g(w)[(a, b)];
    let g0 = g(z);
    let g_inv = inverse(&g0.transpose()).unwrap();
    let mut out = vec![C64::new(0.0, 0.0); m * m * m * m];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut acc = -wirtinger_fd(&comp(a, b), z, &unit(c), &unit(d), h);
                    for p in 0..m {
                        for q in 0..m {
                            let dg = wirtinger_fd(&comp(a, q), z, &unit(c), &zero, h);
                            let dbg = wirtinger_fd(&comp(p, b), z, &zero, &unit(d), h);
                            acc += g_inv[(p, q)] * dg * dbg;
                        }
                    }
                    out[((a * m + b) * m + c) * m + d] = acc;
                }
            }
        }
    }
    out
}

/// Closed-form `c (δ_{αβ}/(1 − s) ± z̄_α z_β/(1 − s)²)` for the ball (`sign = −1`,
/// `s = |z|²`) and Fubini–Study (`sign = +1`, `1 + s`).
pub fn model_metric(sign: f64, c: f64, z: &[C64]) -> CMatrix {
    let m = z.len();
    let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
    let base = 1.0 + sign * s;
    CMatrix::from_fn(m, m, |a, b| {
        let delta = if a == b { 1.0 } else { 0.0 };
        C64::new(c * delta / base, 0.0) - z[a].conj() * z[b] * (sign * c / (base * base))
    })
}

/// Origin curvature from the quartic Taylor coefficient of a radial potential
/// `F(|z|²)`: `R_{αβ̄γδ̄}(0) = −F''(0)(δ_{αβ}δ_{γδ} + δ_{αδ}δ_{γβ})` when `F'(0)` is the scale.
pub fn radial_origin_curvature(f2: f64, a: usize, b: usize, c: usize, d: usize) -> f64 {
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    -f2 * (delta(a, b) * delta(c, d) + delta(a, d) * delta(c, b))
}

/// Largest field-wise difference between two JSON documents with the same shape.
pub fn max_json_diff(a: &serde_json::Value, b: &serde_json::Value) -> f64 {
    use serde_json::Value;
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            if x == y {
                0.0
            } else {
                (x - y).abs()
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).map(|(p, q)| max_json_diff(p, q)).fold(0.0, f64::max)
        }
        (Value::Object(x), Value::Object(y)) if x.len() == y.len() => x
            .iter()
            .map(|(k, v)| y.get(k).map_or(f64::INFINITY, |w| max_json_diff(v, w)))
            .fold(0.0, f64::max),
        _ if a == b => 0.0,
        _ => f64::INFINITY,
    }
}
