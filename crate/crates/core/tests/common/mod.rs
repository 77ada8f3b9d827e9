//! Independent reference implementations shared by the integration tests.
//!
//! Apart from [`greedy_oracle`], which reuses the library's mutual information so that
//! traces can be compared bit for bit, nothing here calls into the library's numerics.

#![allow(dead_code)]

use mtlf_core::mrmr::{mutual_information, DiscretizedVariable, FeatureSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    (-gamma * d2).exp()
}

pub fn dense_kernel(x: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    x.iter()
        .map(|a| x.iter().map(|b| gaussian_kernel(a, b, gamma)).collect())
        .collect()
}

fn mat_vec(k: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    k.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `yᵀβ − ε‖β‖₁ − ½βᵀKβ`.
pub fn dual_value(k: &[Vec<f64>], y: &[f64], eps: f64, beta: &[f64]) -> f64 {
    let kb = mat_vec(k, beta);
    let quad: f64 = beta.iter().zip(&kb).map(|(a, b)| a * b).sum();
    let lin: f64 = y.iter().zip(beta).map(|(a, b)| a * b).sum();
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    lin - eps * l1 - 0.5 * quad
}

/// `½βᵀKβ + C·Σ max(0, |y − f| − ε)` with `f = Kβ + b`.
pub fn primal_value(k: &[Vec<f64>], y: &[f64], c: f64, eps: f64, beta: &[f64], bias: f64) -> f64 {
    let kb = mat_vec(k, beta);
    let quad: f64 = beta.iter().zip(&kb).map(|(a, b)| a * b).sum();
    let slack: f64 = y
        .iter()
        .zip(&kb)
        .map(|(yi, f)| ((yi - f - bias).abs() - eps).max(0.0))
        .sum();
    0.5 * quad + c * slack
}

/// Projection-plus-shrink onto `{Σx = 0, |x_i| ≤ C}` for the `t·ε‖x‖₁` term, with the
/// equality multiplier found by bisection.
fn prox(z: &[f64], t_eps: f64, c: f64) -> Vec<f64> {
    let at = |lambda: f64| -> Vec<f64> {
        z.iter()
            .map(|&zi| {
                let v = zi - lambda;
                let s = v.signum() * (v.abs() - t_eps).max(0.0);
                s.clamp(-c, c)
            })
            .collect()
    };
    let zmax = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let zmin = z.iter().cloned().fold(f64::INFINITY, f64::min);
    let (mut lo, mut hi) = (zmin - t_eps - c - 1.0, zmax + t_eps + c + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s: f64 = at(mid).iter().sum();
        if s > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi))
}

pub struct QpSolution {
    pub beta: Vec<f64>,
    pub bias: f64,
    pub dual: f64,
    pub primal: f64,
}

/// Accelerated proximal gradient with adaptive restart on the negated dual. Runs until
/// the fixed-point residual drops below `1e-12` or `max_iter` steps.
pub fn solve_dual(x: &[Vec<f64>], y: &[f64], c: f64, eps: f64, gamma: f64, max_iter: usize) -> QpSolution {
    let k = dense_kernel(x, gamma);
    let l = y.len();
    let lip = k.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 1.0 / lip;
    let obj = |b: &[f64]| -dual_value(&k, y, eps, b);

    let mut xk = vec![0.0; l];
    let mut zk = xk.clone();
    let mut t = 1.0_f64;
    let mut fx = obj(&xk);
    for _ in 0..max_iter {
        let g: Vec<f64> = mat_vec(&k, &zk).iter().zip(y).map(|(kz, yi)| kz - yi).collect();
        let trial: Vec<f64> = zk.iter().zip(&g).map(|(z, gi)| z - step * gi).collect();
        let xn = prox(&trial, step * eps, c);
        let fn_ = obj(&xn);
        let moved = xn.iter().zip(&xk).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if fn_ > fx {
            // restart momentum from the current iterate
            t = 1.0;
            zk = xk.clone();
            continue;
        }
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        zk = xn.iter().zip(&xk).map(|(a, b)| a + (t - 1.0) / tn * (a - b)).collect();
        xk = xn;
        fx = fn_;
        t = tn;
        if moved < 1e-13 {
            break;
        }
    }

    let kb = mat_vec(&k, &xk);
    let bound = 1e-9 * c.max(1.0);
    let (mut free_sum, mut free_n) = (0.0, 0usize);
    let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..l {
        let r = y[i] - kb[i];
        let b = xk[i];
        if b.abs() > bound && b.abs() < c - bound {
            free_sum += r - eps * b.signum();
            free_n += 1;
        } else if b.abs() <= bound {
            lower = lower.max(r - eps);
            upper = upper.min(r + eps);
        } else if b > 0.0 {
            upper = upper.min(r - eps);
        } else {
            lower = lower.max(r + eps);
        }
    }
    let bias = if free_n > 0 {
        free_sum / free_n as f64
    } else {
        0.5 * (lower + upper)
    };
    let dual = dual_value(&k, y, eps, &xk);
    let primal = primal_value(&k, y, c, eps, &xk, bias);
    QpSolution {
        beta: xk,
        bias,
        dual,
        primal,
    }
}

pub fn oracle_predict(x: &[Vec<f64>], sol: &QpSolution, gamma: f64, q: &[f64]) -> f64 {
    x.iter()
        .zip(&sol.beta)
        .map(|(xi, b)| b * gaussian_kernel(xi, q, gamma))
        .sum::<f64>()
        + sol.bias
}

pub struct RandomProblem {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub c: f64,
    pub eps: f64,
    pub gamma: f64,
}

/// Small regression problem: `l` in 3..=25, 1 to 4 inputs, a smooth target plus noise.
pub fn random_problem(seed: u64) -> RandomProblem {
    let mut r = rng(seed);
    let l = r.gen_range(3..=25);
    let d = r.gen_range(1..=4);
    let x: Vec<Vec<f64>> = (0..l).map(|_| (0..d).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
    let y = x
        .iter()
        .map(|xi| (3.0 * xi[0]).sin() + 0.5 * xi.iter().sum::<f64>() + r.gen_range(-0.2..0.2))
        .collect();
    RandomProblem {
        x,
        y,
        c: 10f64.powf(r.gen_range(-1.0..1.5)),
        eps: r.gen_range(0.0..0.3),
        gamma: 10f64.powf(r.gen_range(-1.0..1.0)),
    }
}

/// Days since 1970-01-01 for a proleptic Gregorian date.
pub fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Monday = 0.
pub fn weekday_index(days: i64) -> i64 {
    (days + 3).rem_euclid(7)
}

/// Calendar columns under the Monday-first, Saturday/Sunday-weekend convention.
pub fn calendar_bits(month: u32, weekday: i64, holiday: bool) -> [f64; 16] {
    let mut b = [0.0; 16];
    b[month as usize - 1] = 1.0;
    let slot = match weekday {
        0 => 12,
        5 | 6 => 14,
        _ => 13,
    };
    b[slot] = 1.0;
    b[15] = if holiday { 1.0 } else { 0.0 };
    b
}

/// Plug-in MI in nats from an explicit joint table.
pub fn joint_table_mi(a: &[usize], b: &[usize]) -> f64 {
    let ka = a.iter().max().map_or(0, |m| m + 1);
    let kb = b.iter().max().map_or(0, |m| m + 1);
    let n = a.len() as f64;
    let mut joint = vec![vec![0.0; kb]; ka];
    for (&u, &v) in a.iter().zip(b) {
        joint[u][v] += 1.0;
    }
    let pa: Vec<f64> = joint.iter().map(|r| r.iter().sum::<f64>() / n).collect();
    let pb: Vec<f64> = (0..kb).map(|v| joint.iter().map(|r| r[v]).sum::<f64>() / n).collect();
    let mut mi = 0.0;
    for u in 0..ka {
        for v in 0..kb {
            let p = joint[u][v] / n;
            if p > 0.0 {
                mi += p * (p / (pa[u] * pb[v])).ln();
            }
        }
    }
    mi
}

/// Literal greedy rule: maximize `I(x; y) − mean_{s∈S} I(x; s)`, ties to the lowest index.
pub fn greedy_oracle(set: &FeatureSet, k: usize) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let mi = |a: &DiscretizedVariable, b: &DiscretizedVariable| mutual_information(a, b).unwrap();
    let f = set.features();
    let mut chosen: Vec<usize> = Vec::new();
    let (mut rel_trace, mut red_trace) = (Vec::new(), Vec::new());
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..f.len()).filter(|i| !chosen.contains(i)) {
            let mut red = 0.0;
            for &s in &chosen {
                red += mi(&f[i], &f[s]);
            }
            let score = if chosen.is_empty() {
                mi(&f[i], set.target())
            } else {
                mi(&f[i], set.target()) - red / chosen.len() as f64
            };
            if best.map_or(true, |(_, b)| score > b) {
                best = Some((i, score));
            }
        }
        chosen.push(best.unwrap().0);
        let rel: f64 = chosen.iter().map(|&s| mi(&f[s], set.target())).sum::<f64>() / chosen.len() as f64;
        let mut red = 0.0;
        for &a in &chosen {
            for &b in &chosen {
                red += mi(&f[a], &f[b]);
            }
        }
        rel_trace.push(rel);
        red_trace.push(red / (chosen.len() * chosen.len()) as f64);
    }
    (chosen, rel_trace, red_trace)
}

