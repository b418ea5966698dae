//! Scalar and derivative-free search routines used by the pricing engine.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping when the
/// bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section_max<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<(f64, f64), E> {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// `count` points geometrically spaced over `[lo, hi]` (both included).
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 || hi <= lo {
        return vec![lo];
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|k| (llo + step * k as f64).exp()).collect();
    g[0] = lo;
    g[count - 1] = hi;
    g
}

/// Outcome of a grid scan followed by local refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanMax {
    pub x: f64,
    pub value: f64,
    /// Best grid point was the first or last grid point.
    pub at_edge: bool,
}

/// Maximizes `f` over `[lo, hi]`: evaluates a log-spaced grid, then refines by
/// golden section between the neighbours of the best grid point. Ties on the
/// grid resolve to the smallest `x`.
pub fn grid_then_golden<E>(
    mut f: impl FnMut(f64) -> Result<f64, E>,
    lo: f64,
    hi: f64,
    grid_points: usize,
    tol: f64,
) -> Result<ScanMax, E> {
    let grid = log_grid(lo, hi, grid_points.max(2));
    let mut best = (0usize, f64::NEG_INFINITY);
    for (k, &x) in grid.iter().enumerate() {
        let v = f(x)?;
        if v > best.1 {
            best = (k, v);
        }
    }
    let (k, grid_value) = best;
    let at_edge = grid.len() > 1 && (k == 0 || k == grid.len() - 1);
    if grid.len() == 1 {
        return Ok(ScanMax {
            x: grid[0],
            value: grid_value,
            at_edge: false,
        });
    }
    let left = grid[k.saturating_sub(1)];
    let right = grid[(k + 1).min(grid.len() - 1)];
    let (x, value) = golden_section_max(&mut f, left, right, tol)?;
    Ok(if value > grid_value {
        ScanMax { x, value, at_edge }
    } else {
        ScanMax {
            x: grid[k],
            value: grid_value,
            at_edge,
        }
    })
}

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    /// Relative size of the initial simplex around the start point.
    pub initial_step: f64,
    /// Stop when the spread of objective values over the simplex is below this.
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_evals: 20_000,
            initial_step: 0.1,
            f_tol: 1e-12,
        }
    }
}

/// Nelder–Mead maximization with standard coefficients (1, 2, 0.5, 0.5).
/// The returned point is never worse than `start`.
pub fn nelder_mead_max(
    mut f: impl FnMut(&[f64]) -> f64,
    start: &[f64],
    opts: &NelderMeadOptions,
) -> (Vec<f64>, f64) {
    let n = start.len();
    // Minimize the negated objective.
    let mut eval = |x: &[f64]| -f(x);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(start);
    simplex.push((start.to_vec(), v0));
    for i in 0..n {
        let mut x = start.to_vec();
        let step = if x[i].abs() > 1e-8 { opts.initial_step * x[i].abs() } else { 2.5e-4 };
        x[i] += step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let mut evals = n + 1;
    let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| a.1.total_cmp(&b.1);

    while evals < opts.max_evals {
        simplex.sort_by(by_value);
        let spread = simplex[n].1 - simplex[0].1;
        if spread.abs() <= opts.f_tol * (1.0 + simplex[0].1.abs()) {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = eval(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe);
            evals += 1;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(0.5);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = eval(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, v)| b + 0.5 * (v - b))
                        .collect();
                    let v = eval(&x);
                    *entry = (x, v);
                }
                evals += n;
            }
        }
    }
    simplex.sort_by(by_value);
    let (x, v) = simplex.swap_remove(0);
    (x, -v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_section_max(|x| Ok::<_, Infallible>(-(x - 0.3) * (x - 0.3)), 0.0, 1.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(v.abs() < 1e-18);
    }

    #[test]
    fn grid_scan_escapes_local_peak() {
        // Two peaks: a low one near 1 and a high one near 50.
        let f = |x: f64| Ok::<_, Infallible>((-(x - 1.0).powi(2)).exp() + 2.0 * (-(x - 50.0).powi(2) / 4.0).exp());
        let r = grid_then_golden(f, 0.5, 100.0, 2000, 1e-9).unwrap();
        assert!((r.x - 50.0).abs() < 1e-6, "{r:?}");
        assert!(!r.at_edge);
    }

    #[test]
    fn grid_scan_flags_edge() {
        let r = grid_then_golden(|x| Ok::<_, Infallible>(x), 1.0, 2.0, 50, 1e-9).unwrap();
        assert!(r.at_edge);
        assert!((r.x - 2.0).abs() < 1e-8);
    }

    #[test]
    fn log_grid_endpoints_exact() {
        let g = log_grid(1e-4, 1e4, 2000);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[1999], 1e4);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let (x, v) = nelder_mead_max(f, &[-1.2, 1.0], &NelderMeadOptions::default());
        assert!((x[0] - 1.0).abs() < 1e-3 && (x[1] - 1.0).abs() < 1e-3, "{x:?}");
        assert!(v > -1e-6);
    }

    #[test]
    fn nelder_mead_never_worse_than_start() {
        let f = |x: &[f64]| -(x[0] * x[0]) + (3.0 * x[0]).sin();
        let start = [0.4];
        let (_, v) = nelder_mead_max(f, &start, &NelderMeadOptions { max_evals: 5, ..Default::default() });
        assert!(v >= f(&start));
    }
}
