//! Distance from a point to the convex hull of a vertex matrix, by
//! Frank-Wolfe with away steps.
//!
//! Minimizes ½|x − Mw|² over the unit simplex. The away-step variant
//! converges linearly on this problem, needs only matrix-vector products
//! with M, and keeps the iterate feasible at every step.

use crate::linalg::{vecops, DenseMatrix};

const MAX_ITERS: usize = 10_000;
const GAP_TOL: f64 = 1e-10;

/// Returns the achieved distance |x − Mw| and the simplex weights w.
/// Stops when the Frank-Wolfe gap drops below 1e-10·(1 + |x|).
pub fn dist_to_simplex(x: &[f64], m: &DenseMatrix) -> (f64, Vec<f64>) {
    assert_eq!(x.len(), m.n_rows(), "point dimension must match vertex rows");
    let k = m.n_cols();
    assert!(k >= 1, "need at least one vertex");

    if k == 1 {
        let r = vecops::sub(m.column(0), x);
        return (vecops::norm(&r), vec![1.0]);
    }

    let tol = GAP_TOL * (1.0 + vecops::norm(x));
    let mut w = vec![1.0 / k as f64; k];

    for _ in 0..MAX_ITERS {
        let mw = m.matvec(&w);
        let residual = vecops::sub(&mw, x);
        let grad = m.matvec_t(&residual);

        let towards = argmin(&grad);
        let away = argmax_active(&grad, &w);
        let wg = vecops::dot(&w, &grad);
        let gap = wg - grad[towards];
        // The gap of the distance objective (gradient Mᵀr/|r|) bounds the
        // distance suboptimality itself, so this stops with the achieved
        // distance within tol of the true minimum.
        let dist = vecops::norm(&residual);
        if dist == 0.0 || gap / dist < tol {
            break;
        }
        let away_decrease = grad[away] - wg;

        if gap >= away_decrease {
            // Step toward the best vertex: w ← (1−γ)w + γ·e_t.
            let dir = vecops::sub(m.column(towards), &mw);
            let denom = vecops::dot(&dir, &dir);
            let step = if denom > 0.0 { (gap / denom).min(1.0) } else { 1.0 };
            for wi in w.iter_mut() {
                *wi *= 1.0 - step;
            }
            w[towards] += step;
        } else {
            // Step away from the worst active vertex:
            // w ← (1+γ)w − γ·e_a, feasible while γ ≤ w_a/(1−w_a).
            let max_step = w[away] / (1.0 - w[away]).max(f64::MIN_POSITIVE);
            let dir = vecops::sub(&mw, m.column(away));
            let denom = vecops::dot(&dir, &dir);
            let step = if denom > 0.0 {
                (away_decrease / denom).min(max_step)
            } else {
                max_step
            };
            for wi in w.iter_mut() {
                *wi *= 1.0 + step;
            }
            w[away] -= step;
        }
        clean_weights(&mut w);
    }

    let r = vecops::sub(&m.matvec(&w), x);
    (vecops::norm(&r), w)
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

fn argmax_active(v: &[f64], w: &[f64]) -> usize {
    let mut best = None;
    for (i, &x) in v.iter().enumerate() {
        if w[i] > 0.0 && best.map_or(true, |b: usize| x > v[b]) {
            best = Some(i);
        }
    }
    best.expect("active set is never empty")
}

/// Clips negative roundoff and renormalizes so the weights stay on the
/// simplex to 1e-12.
fn clean_weights(w: &mut [f64]) {
    let mut sum = 0.0;
    for x in w.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
        sum += *x;
    }
    if sum > 0.0 {
        for x in w.iter_mut() {
            *x /= sum;
        }
    }
}
