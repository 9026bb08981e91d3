//! Small dense solvers: real least squares, nonnegative least squares and
//! polynomial roots through the companion matrix.

use num_complex::Complex;

use super::matrix::CMatrix;
use crate::scalar::{c, cone, czero, Real};

/// Least-squares solution of `Σ_j x_j·a_j ≈ b` for real columns `a_j`.
///
/// Linearly dependent columns receive a zero coefficient. Returns the
/// coefficients and the residual norm `‖b − A·x‖`.
pub fn lstsq<T: Real>(columns: &[Vec<T>], b: &[T]) -> (Vec<T>, T) {
    let n = columns.len();
    let mut q: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut r: Vec<Vec<T>> = Vec::with_capacity(n); // r[k] = coefficients of column idx[k] on q[0..=k]
    let mut idx: Vec<usize> = Vec::with_capacity(n);
    for (j, a) in columns.iter().enumerate() {
        let anorm = dot(a, a).sqrt();
        if anorm == T::zero() {
            continue;
        }
        let mut v = a.clone();
        let mut coeffs = vec![T::zero(); q.len() + 1];
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let p = dot(qi, &v);
                coeffs[i] += p;
                axpy(&mut v, -p, qi);
            }
        }
        let vn = dot(&v, &v).sqrt();
        if vn <= T::lit(1e-11) * anorm {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vn;
        }
        coeffs[q.len()] = vn;
        q.push(v);
        r.push(coeffs);
        idx.push(j);
    }
    let k = q.len();
    let qtb: Vec<T> = q.iter().map(|qi| dot(qi, b)).collect();
    let mut y = vec![T::zero(); k];
    for i in (0..k).rev() {
        let mut s = qtb[i];
        for j in (i + 1)..k {
            s -= r[j][i] * y[j];
        }
        y[i] = s / r[i][i];
    }
    let mut x = vec![T::zero(); n];
    for (pos, &j) in idx.iter().enumerate() {
        x[j] = y[pos];
    }
    let mut res = b.to_vec();
    for (j, a) in columns.iter().enumerate() {
        if x[j] != T::zero() {
            axpy(&mut res, -x[j], a);
        }
    }
    (x, dot(&res, &res).sqrt())
}

/// Lawson-Hanson nonnegative least squares.
pub fn nnls<T: Real>(columns: &[Vec<T>], b: &[T], max_iter: usize) -> (Vec<T>, T) {
    let n = columns.len();
    let mut x = vec![T::zero(); n];
    let mut passive = vec![false; n];
    let tol = T::lit(1e-13) * dot(b, b).sqrt().max(T::one());
    let residual = |x: &[T]| {
        let mut r = b.to_vec();
        for (j, a) in columns.iter().enumerate() {
            if x[j] != T::zero() {
                axpy(&mut r, -x[j], a);
            }
        }
        r
    };
    for _ in 0..max_iter {
        let r = residual(&x);
        let w: Vec<T> = columns.iter().map(|a| dot(a, &r)).collect();
        let cand = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&i, &j| {
            w[i].partial_cmp(&w[j]).unwrap_or(std::cmp::Ordering::Equal)
        });
        let Some(t) = cand else { break };
        passive[t] = true;
        let mut stalled = true;
        for _ in 0..(3 * n + 10) {
            let pidx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub: Vec<Vec<T>> = pidx.iter().map(|&j| columns[j].clone()).collect();
            let (z, _) = lstsq(&sub, b);
            if z.iter().all(|&v| v > T::zero()) {
                for (pos, &j) in pidx.iter().enumerate() {
                    x[j] = z[pos];
                }
                stalled = false;
                break;
            }
            let mut alpha = T::one();
            for (pos, &j) in pidx.iter().enumerate() {
                if z[pos] <= T::zero() {
                    let denom = x[j] - z[pos];
                    if denom > T::zero() {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            for (pos, &j) in pidx.iter().enumerate() {
                x[j] = x[j] + alpha * (z[pos] - x[j]);
                if x[j] <= T::lit(1e-15) {
                    x[j] = T::zero();
                    passive[j] = false;
                }
            }
        }
        if stalled {
            break;
        }
    }
    let r = residual(&x);
    (x, dot(&r, &r).sqrt())
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn axpy<T: Real>(y: &mut [T], a: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Real>(a: &CMatrix<T>) -> Complex<T> {
    let n = a.rows();
    let mut lu = a.clone();
    let mut det = cone::<T>();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().partial_cmp(&lu[(j, k)].norm()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(k);
        if lu[(p, k)].norm() == T::zero() {
            return czero();
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            det = -det;
        }
        let piv = lu[(k, k)];
        det = det * piv;
        for i in (k + 1)..n {
            let f = lu[(i, k)] / piv;
            for j in (k + 1)..n {
                let t = lu[(k, j)];
                lu[(i, j)] = lu[(i, j)] - f * t;
            }
        }
    }
    det
}

/// Evaluates `Σ coeffs[k]·x^k`.
pub fn poly_eval<T: Real>(coeffs: &[Complex<T>], x: Complex<T>) -> Complex<T> {
    coeffs.iter().rev().fold(czero(), |acc, &a| acc * x + a)
}

/// Roots of `Σ coeffs[k]·x^k` as eigenvalues of the companion matrix, Newton-polished.
///
/// Leading coefficients below `lead_tol` (relative to the largest) are dropped,
/// so the returned list can be shorter than the nominal degree.
pub fn polynomial_roots<T: Real>(coeffs: &[Complex<T>], lead_tol: T) -> Vec<Complex<T>> {
    let scale = coeffs.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if scale == T::zero() {
        return Vec::new();
    }
    let mut deg = coeffs.len() - 1;
    while deg > 0 && coeffs[deg].norm() <= lead_tol * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mut comp = CMatrix::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = cone();
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let mut roots = hessenberg_eigenvalues(comp);
    let dcoeffs: Vec<Complex<T>> = (1..=deg).map(|k| coeffs[k] * T::lit(k as f64)).collect();
    for r in roots.iter_mut() {
        for _ in 0..4 {
            let f = poly_eval(&coeffs[..=deg], *r);
            let df = poly_eval(&dcoeffs, *r);
            if df.norm() == T::zero() {
                break;
            }
            let step = f / df;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *r = *r - step;
        }
    }
    roots
}

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR.
pub fn hessenberg_eigenvalues<T: Real>(mut h: CMatrix<T>) -> Vec<Complex<T>> {
    let n = h.rows();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    loop {
        if hi == 0 {
            out.push(h[(0, 0)]);
            break;
        }
        let mut l = hi;
        while l > 0 {
            let s = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            let s = if s == T::zero() { T::one() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            out.push(h[(hi, hi)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 500 {
            // give up on convergence; report the current diagonal
            for k in (0..=hi).rev() {
                out.push(h[(k, k)]);
            }
            break;
        }
        let mu = if iter % 11 == 10 {
            h[(hi, hi)] + c(h[(hi, hi - 1)].norm(), T::zero())
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let cc = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = T::lit(0.5);
            let tr = (a + d) * half;
            let disc = ((a - d) * (a - d) * T::lit(0.25) + b * cc).sqrt();
            let l1 = tr + disc;
            let l2 = tr - disc;
            if (l1 - d).norm() < (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        for k in l..=hi {
            h[(k, k)] = h[(k, k)] - mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (cs, sn) = if r == T::zero() { (cone(), czero()) } else { (a / r, b / r) };
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = cs.conj() * x + sn.conj() * y;
                h[(k + 1, j)] = -sn * x + cs * y;
            }
            rots.push((cs, sn));
        }
        for (off, &(cs, sn)) in rots.iter().enumerate() {
            let k = l + off;
            for i in l..=(k + 2).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * cs + y * sn;
                h[(i, k + 1)] = -(x * sn.conj()) + y * cs.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] = h[(k, k)] + mu;
        }
    }
    out
}
