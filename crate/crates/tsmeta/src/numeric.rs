//! Small shared numerics: moments, least squares, a dense solver,
//! Nelder-Mead, and polynomial roots. Everything is plain `f64` on
//! contiguous slices; problem sizes here are tiny (dimension <= 40).

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divide by n).
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (divide by n-1); 0 for fewer than 2 points.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn diff(xs: &[f64]) -> Vec<f64> {
    xs.windows(2).map(|w| w[1] - w[0]).collect()
}

/// OLS of y on (1, t) with t = 0..n-1. Returns (intercept, slope, r_squared).
/// Zero total variance in y yields r_squared = 0 by convention.
pub fn ols_line(y: &[f64]) -> (f64, f64, f64) {
    let n = y.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let y_mean = mean(y);
    let mut s_ty = 0.0;
    let mut s_tt = 0.0;
    let mut s_yy = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let dt = i as f64 - t_mean;
        let dy = yi - y_mean;
        s_ty += dt * dy;
        s_tt += dt * dt;
        s_yy += dy * dy;
    }
    let slope = if s_tt > 0.0 { s_ty / s_tt } else { 0.0 };
    let intercept = y_mean - slope * t_mean;
    let r2 = if s_tt > 0.0 && s_yy > 0.0 {
        ((s_ty * s_ty) / (s_tt * s_yy)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (intercept, slope, r2)
}

/// Solve A x = b in place by Gaussian elimination with partial pivoting.
/// A is row-major n x n. Returns None when a pivot falls below tolerance.
pub fn solve_dense(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_abs = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > pivot_abs {
                pivot_abs = v;
                pivot_row = r;
            }
        }
        if pivot_abs < 1e-12 {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                a.swap(pivot_row * n + c, col * n + c);
            }
            b.swap(pivot_row, col);
        }
        let pivot = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..n {
                a[r * n + c] -= factor * a[col * n + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row * n + c] * x[c];
        }
        x[row] = acc / a[row * n + row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// OLS of y on the given regressor columns (no implicit intercept; push a
/// ones column if one is wanted). Returns coefficients, or None when the
/// normal equations are singular.
pub fn ols(columns: &[&[f64]], y: &[f64]) -> Option<Vec<f64>> {
    let k = columns.len();
    let n = y.len();
    debug_assert!(columns.iter().all(|c| c.len() == n));
    let mut gram = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        for j in i..k {
            let s: f64 = columns[i].iter().zip(columns[j]).map(|(a, b)| a * b).sum();
            gram[i * k + j] = s;
            gram[j * k + i] = s;
        }
        rhs[i] = columns[i].iter().zip(y).map(|(a, b)| a * b).sum();
    }
    solve_dense(&mut gram, &mut rhs, k)
}

/// R-squared of fitted values against y; 0 when y has no variance.
pub fn r_squared(y: &[f64], fitted: &[f64]) -> f64 {
    let y_mean = mean(y);
    let ss_tot: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    if ss_tot <= 0.0 {
        return 0.0;
    }
    let ss_res: f64 = y.iter().zip(fitted).map(|(a, f)| (a - f) * (a - f)).sum();
    (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
}

/// Nelder-Mead simplex minimization. Runs at most `max_iter` iterations
/// from `x0` with the given initial step per coordinate.
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, max_iter: usize) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    if dim == 0 {
        return Vec::new();
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += if p[i].abs() > 1e-8 {
            step * p[i].abs()
        } else {
            step
        };
        let fp = f(&p);
        simplex.push((p, fp));
    }

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= 1e-12 * (1.0 + best.abs()) {
            break;
        }
        let mut centroid = vec![0.0; dim];
        for (p, _) in &simplex[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&simplex[dim].0)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let f_reflect = f(&reflect);

        if f_reflect < simplex[0].1 {
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + gamma * (r - c))
                .collect();
            let f_expand = f(&expand);
            simplex[dim] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[dim - 1].1 {
            simplex[dim] = (reflect, f_reflect);
        } else {
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let f_contract = f(&contract);
            if f_contract < simplex[dim].1 {
                simplex[dim] = (contract, f_contract);
            } else {
                let best_point = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = best_point
                        .iter()
                        .zip(&entry.0)
                        .map(|(b, p)| b + sigma * (p - b))
                        .collect();
                    let fs = f(&shrunk);
                    *entry = (shrunk, fs);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.remove(0).0
}

/// Smallest root modulus of 1 + c1 z + c2 z^2 + ... + ck z^k, via
/// Durand-Kerner on the reversed (monic) polynomial. Returns +inf for an
/// effectively constant polynomial.
pub fn min_root_modulus(coeffs: &[f64]) -> f64 {
    let mut k = coeffs.len();
    while k > 0 && coeffs[k - 1].abs() < 1e-14 {
        k -= 1;
    }
    if k == 0 {
        return f64::INFINITY;
    }
    // roots of p(z) = 1 + sum c_i z^i equal reciprocals of roots of
    // the monic q(w) = w^k + c1 w^{k-1}/ck ... with w = 1/z; easier to
    // just run Durand-Kerner on p itself normalized to monic form.
    let lead = coeffs[k - 1];
    // monic: z^k + a_{k-1} z^{k-1} + ... + a_0, a_i = c_i/lead (c_0 = 1).
    let mut monic = vec![0.0; k + 1];
    monic[0] = 1.0 / lead;
    for i in 1..k {
        monic[i] = coeffs[i - 1] / lead;
    }
    monic[k] = 1.0;

    let eval = |re: f64, im: f64| -> (f64, f64) {
        // Horner in complex arithmetic, highest degree first.
        let (mut pr, mut pi) = (0.0, 0.0);
        for d in (0..=k).rev() {
            let (nr, ni) = (pr * re - pi * im + monic[d], pr * im + pi * re);
            pr = nr;
            pi = ni;
        }
        (pr, pi)
    };

    let mut roots: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let angle = 2.0 * std::f64::consts::PI * i as f64 / k as f64 + 0.35;
            (1.2 * angle.cos(), 1.2 * angle.sin())
        })
        .collect();
    for _ in 0..250 {
        let mut max_step: f64 = 0.0;
        for i in 0..k {
            let (zr, zi) = roots[i];
            let (mut dr, mut di) = (1.0, 0.0);
            for (j, &(wr, wi)) in roots.iter().enumerate() {
                if j == i {
                    continue;
                }
                let (er, ei) = (zr - wr, zi - wi);
                let (nr, ni) = (dr * er - di * ei, dr * ei + di * er);
                dr = nr;
                di = ni;
            }
            let (pr, pi) = eval(zr, zi);
            let denom = dr * dr + di * di;
            if denom < 1e-300 {
                continue;
            }
            let (sr, si) = ((pr * dr + pi * di) / denom, (pi * dr - pr * di) / denom);
            roots[i] = (zr - sr, zi - si);
            max_step = max_step.max((sr * sr + si * si).sqrt());
        }
        if max_step < 1e-12 {
            break;
        }
    }
    roots
        .iter()
        .map(|&(re, im)| (re * re + im * im).sqrt())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_line_exact() {
        let y: Vec<f64> = (0..50).map(|t| 7.0 + 3.0 * t as f64).collect();
        let (a, b, r2) = ols_line(&y);
        assert!((a - 7.0).abs() < 1e-9);
        assert!((b - 3.0).abs() < 1e-9);
        assert!((r2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ols_line_constant() {
        let y = vec![4.0; 20];
        let (a, b, r2) = ols_line(&y);
        assert!((a - 4.0).abs() < 1e-12);
        assert_eq!(b, 0.0);
        assert_eq!(r2, 0.0);
    }

    #[test]
    fn solve_dense_known_system() {
        // [2 1; 1 3] x = [5; 10] -> x = [1, 3]
        let mut a = vec![2.0, 1.0, 1.0, 3.0];
        let mut b = vec![5.0, 10.0];
        let x = solve_dense(&mut a, &mut b, 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn solve_dense_singular() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(solve_dense(&mut a, &mut b, 2).is_none());
    }

    #[test]
    fn ols_recovers_plane() {
        let n = 200;
        let x1: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let x2: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let ones = vec![1.0; n];
        let y: Vec<f64> = (0..n).map(|i| 2.0 + 1.5 * x1[i] - 0.5 * x2[i]).collect();
        let beta = ols(&[&ones, &x1, &x2], &y).unwrap();
        assert!((beta[0] - 2.0).abs() < 1e-8);
        assert!((beta[1] - 1.5).abs() < 1e-8);
        assert!((beta[2] + 0.5).abs() < 1e-8);
    }

    #[test]
    fn nelder_mead_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.5).powi(2) + 2.0 * (x[1] + 0.5).powi(2);
        let x = nelder_mead(f, &[0.0, 0.0], 0.5, 400);
        assert!((x[0] - 1.5).abs() < 1e-4, "{x:?}");
        assert!((x[1] + 0.5).abs() < 1e-4, "{x:?}");
    }

    #[test]
    fn root_modulus_ar1() {
        // 1 - 0.5 z has root z = 2.
        assert!((min_root_modulus(&[-0.5]) - 2.0).abs() < 1e-9);
        // 1 - 1.1 z has root inside 1.
        assert!(min_root_modulus(&[-1.1]) < 1.0);
    }

    #[test]
    fn root_modulus_quadratic() {
        // (1 - 0.9z)(1 - 0.5z) = 1 - 1.4z + 0.45z^2; min-root 1/0.9.
        let m = min_root_modulus(&[-1.4, 0.45]);
        assert!((m - 1.0 / 0.9).abs() < 1e-8, "{m}");
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
