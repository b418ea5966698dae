//! Independent reference computations shared by the integration tests. None
//! of these call into the library's numerics.
#![allow(dead_code)]

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &r)| {
        let mut row = row.clone();
        row.push(r);
        row
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for r in col + 1..n {
            let factor = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= factor * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    Some(x)
}

/// LCP `y >= 0, w = q + M y >= 0, y'w = 0` by trying every active set.
/// Returns `(y, w)` for the feasible support with the smallest violation.
pub fn lcp_oracle(m: &[Vec<f64>], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = q.len();
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    for mask in 0u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&k| m[i][k]).collect()).collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| -q[i]).collect();
        let Some(ys) = gauss_solve(&sub, &rhs) else { continue };
        let mut y = vec![0.0; n];
        for (&i, v) in idx.iter().zip(ys) {
            y[i] = v;
        }
        let w: Vec<f64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { 0.0 } else { q[i] + (0..n).map(|k| m[i][k] * y[k]).sum::<f64>() })
            .collect();
        let worst = y.iter().chain(&w).fold(0.0f64, |acc, v| acc.max(-v));
        if best.as_ref().is_none_or(|b| worst < b.0) {
            best = Some((worst, y, w));
        }
    }
    let (_, y, w) = best.expect("the empty support always solves");
    (y, w)
}

/// MNL demand `exp(a_i - b_i p_i) / (1 + Σ_k exp(a_k - b_k p_k))`, computed directly.
pub fn mnl_demand(a: &[f64], b: &[f64], p: &[f64]) -> Vec<f64> {
    let e: Vec<f64> = a.iter().zip(b).zip(p).map(|((a, b), p)| (a - b * p).exp()).collect();
    let denom = 1.0 + e.iter().sum::<f64>();
    e.iter().map(|x| x / denom).collect()
}

pub fn mnl_profit(a: &[f64], b: &[f64], p: &[f64]) -> f64 {
    mnl_demand(a, b, p).iter().zip(p).map(|(d, p)| d * p).sum()
}

/// Realized linear-model profit with the LCP adjustment from [`lcp_oracle`].
pub fn linear_profit(a: &[f64], b: &[Vec<f64>], p: &[f64]) -> f64 {
    let n = a.len();
    let q: Vec<f64> = (0..n).map(|i| a[i] - (0..n).map(|k| b[i][k] * p[k]).sum::<f64>()).collect();
    let (_, w) = lcp_oracle(b, &q);
    w.iter().zip(p).map(|(w, p)| w.max(0.0) * p).sum()
}

/// Maximum of `f` over `points` equally spaced samples of `[lo, hi]`.
pub fn grid_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    let mut best = (lo, f64::NEG_INFINITY);
    for k in 0..points {
        let x = lo + (hi - lo) * k as f64 / (points - 1) as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

/// Largest log-price spread between two segments' price vectors.
pub fn log_distance(p: &[f64], r: &[f64]) -> f64 {
    p.iter().zip(r).map(|(x, y)| (x / y).ln().abs()).fold(0.0, f64::max)
}

/// Smallest achievable maximum cluster diameter over all partitions of the
/// points into at most `k` clusters.
pub fn brute_force_min_diameter(points: &[Vec<f64>], k: usize) -> f64 {
    let m = points.len();
    let mut best = f64::INFINITY;
    let mut assign = vec![0usize; m];
    let total = k.pow(m as u32);
    for code in 0..total {
        let mut c = code;
        for slot in assign.iter_mut() {
            *slot = c % k;
            c /= k;
        }
        let mut diameter = 0.0f64;
        for i in 0..m {
            for j in i + 1..m {
                if assign[i] == assign[j] {
                    diameter = diameter.max(log_distance(&points[i], &points[j]));
                }
            }
        }
        best = best.min(diameter);
    }
    best
}
