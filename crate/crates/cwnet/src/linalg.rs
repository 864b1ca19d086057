//! Dense Hermitian eigendecomposition and the few spectral utilities every
//! analysis module shares.
//!
//! The solver reduces a Hermitian matrix to real symmetric tridiagonal form
//! with complex Householder reflections, rescales the subdiagonal real with a
//! diagonal unitary, and runs implicit-shift QL iterations while accumulating
//! the transformations. Eigenvalues come out real, sorted descending, and the
//! global phase of each eigenvector column is fixed so that its largest
//! component is real positive, which makes outputs reproducible across runs.

use crate::{Error, Result};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub type CMatrix = Array2<Complex64>;
pub type CVector = Array1<Complex64>;

/// Tolerance for accepting an input matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// QL deflation threshold factor: an off-diagonal element is negligible when
/// its magnitude drops below this factor times the neighboring diagonal mass.
const QL_TOL: f64 = 1e-14;
/// Maximum implicit-shift sweeps per eigenvalue.
const MAX_SWEEPS: usize = 30;

/// A unitary eigendecomposition `M = U Λ U*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Real eigenvalues sorted descending (`λ₁ ≥ … ≥ λ_n`).
    pub eigenvalues: Vec<f64>,
    /// Unit-norm eigenvector columns; column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    /// Eigenvalues in ascending order with matching column indices, handy for
    /// smallest-eigenpair consumers.
    pub fn ascending(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        let n = self.eigenvalues.len();
        (0..n).rev().map(|i| (self.eigenvalues[i], i))
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(M + M*)/2` before solving; inputs further
/// than [`HERMITIAN_TOL`] from Hermitian are rejected.
pub fn hermitian_eig(m: &CMatrix) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
    }
    let asym = crate::graph::max_hermitian_asymmetry(m);
    if asym > HERMITIAN_TOL {
        return Err(Error::NotHermitian(asym));
    }

    // Symmetrized working copy.
    let mut a = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        a[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }

    let scale: f64 = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut q = Array2::<Complex64>::eye(n);
    let mut diag = vec![0.0f64; n];
    let mut sub = vec![Complex64::new(0.0, 0.0); n.saturating_sub(1)];

    // Householder reduction to Hermitian tridiagonal form, accumulating Q so
    // that A = Q T Q*.
    for k in 0..n.saturating_sub(1) {
        let m_len = n - k - 1;
        if m_len == 1 {
            sub[k] = a[(k + 1, k)];
            continue;
        }
        let x0 = a[(k + 1, k)];
        let xnorm: f64 = (k + 1..n).map(|r| a[(r, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            sub[k] = Complex64::new(0.0, 0.0);
            continue;
        }
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        // v = x - alpha e1, beta = 2 / (v* v)
        let mut v = vec![Complex64::new(0.0, 0.0); m_len];
        for (r, item) in v.iter_mut().enumerate() {
            *item = a[(k + 1 + r, k)];
        }
        v[0] -= alpha;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            sub[k] = alpha;
            continue;
        }
        let beta = 2.0 / vnorm_sqr;

        // p = beta * A_sub v ; kappa = (beta/2) (v* p) ; w = p - kappa v
        let mut p = vec![Complex64::new(0.0, 0.0); m_len];
        for r in 0..m_len {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..m_len {
                acc += a[(k + 1 + r, k + 1 + c)] * v[c];
            }
            p[r] = acc * beta;
        }
        let vp: Complex64 = v.iter().zip(&p).map(|(vi, pi)| vi.conj() * pi).sum();
        let kappa = vp * (beta / 2.0);
        let w: Vec<Complex64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();

        // A_sub := A_sub - w v* - v w*
        for r in 0..m_len {
            for c in 0..m_len {
                let delta = w[r] * v[c].conj() + v[r] * w[c].conj();
                a[(k + 1 + r, k + 1 + c)] -= delta;
            }
        }
        // The pivot column collapses to alpha e1.
        a[(k + 1, k)] = alpha;
        a[(k, k + 1)] = alpha.conj();
        for r in (k + 2)..n {
            a[(r, k)] = Complex64::new(0.0, 0.0);
            a[(k, r)] = Complex64::new(0.0, 0.0);
        }
        sub[k] = alpha;

        // Q := Q (I - beta v v*)
        for row in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..m_len {
                acc += q[(row, k + 1 + c)] * v[c];
            }
            let acc = acc * beta;
            for c in 0..m_len {
                q[(row, k + 1 + c)] -= acc * v[c].conj();
            }
        }
    }
    for i in 0..n {
        diag[i] = a[(i, i)].re;
    }

    // Rescale the complex subdiagonal to real nonnegative with a diagonal
    // unitary folded into Q. The extra trailing slot is QL scratch space.
    let mut e = vec![0.0f64; n];
    let mut s = Complex64::new(1.0, 0.0);
    for k in 0..n.saturating_sub(1) {
        let mag = sub[k].norm();
        e[k] = mag;
        s = if mag == 0.0 { s } else { sub[k] * s / mag };
        for row in 0..n {
            q[(row, k + 1)] *= s;
        }
    }

    ql_implicit(&mut diag, &mut e, &mut q, scale)?;

    // Sort descending and fix each column's global phase.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = Array2::<Complex64>::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        let mut best = 0usize;
        let mut best_mag = -1.0f64;
        for row in 0..n {
            let mag = q[(row, src)].norm();
            if mag > best_mag {
                best_mag = mag;
                best = row;
            }
        }
        let pivot = q[(best, src)];
        let rot =
            if best_mag == 0.0 { Complex64::new(1.0, 0.0) } else { pivot.conj() / best_mag };
        for row in 0..n {
            eigenvectors[(row, col)] = q[(row, src)] * rot;
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors })
}

/// Implicit-shift QL on a real symmetric tridiagonal, rotating the complex
/// columns of `q` alongside.
fn ql_implicit(d: &mut [f64], e: &mut [f64], q: &mut CMatrix, scale: f64) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let floor_tol = QL_TOL * scale.max(f64::MIN_POSITIVE);
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                let thr = (QL_TOL * dd).max(floor_tol);
                if e[m].abs() <= thr {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::NumericalFailure(format!(
                    "QL iteration exceeded {MAX_SWEEPS} sweeps at index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in 0..q.nrows() {
                    f = q[(row, i + 1)].re;
                    let f_im = q[(row, i + 1)].im;
                    let qi = q[(row, i)];
                    q[(row, i + 1)] = Complex64::new(s * qi.re + c * f, s * qi.im + c * f_im);
                    q[(row, i)] = Complex64::new(c * qi.re - s * f, c * qi.im - s * f_im);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Largest eigenvalue magnitude `ρ(M) = max |λ_i|` of a Hermitian matrix.
pub fn spectral_radius(m: &CMatrix) -> Result<f64> {
    let eig = hermitian_eig(m)?;
    Ok(eig.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l.abs())))
}

/// Evolves a state `t` steps under left multiplication: returns `x(t)` with
/// `x(t)* = x(0)* P^t`, computed by `t` successive vector–matrix products
/// (the operator applied to the stored column state is `P*`).
pub fn evolve_left(p: &CMatrix, x0: &CVector, t: usize) -> Result<CVector> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.ncols() });
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x0.len() });
    }
    let mut x = x0.clone();
    let mut next = Array1::<Complex64>::zeros(n);
    for _ in 0..t {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += p[(i, j)].conj() * x[i];
            }
            next[j] = acc;
        }
        std::mem::swap(&mut x, &mut next);
    }
    Ok(x)
}

/// One step of [`evolve_left`].
pub fn evolve_left_step(p: &CMatrix, x: &CVector) -> Result<CVector> {
    evolve_left(p, x, 1)
}

/// Conjugate transpose.
pub fn adjoint(m: &CMatrix) -> CMatrix {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Array2::zeros((c, r));
    for i in 0..r {
        for j in 0..c {
            out[(j, i)] = m[(i, j)].conj();
        }
    }
    out
}

/// Reconstruction residual `‖M − UΛU*‖_max`.
pub fn reconstruction_error(m: &CMatrix, eig: &EigenDecomposition) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                acc += eig.eigenvectors[(i, k)] * lambda * eig.eigenvectors[(j, k)].conj();
            }
            worst = worst.max((m[(i, j)] - acc).norm());
        }
    }
    worst
}

/// Unitarity residual `‖U*U − I‖_max`.
pub fn unitarity_error(eig: &EigenDecomposition) -> f64 {
    let u = &eig.eigenvectors;
    let n = u.nrows();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..n {
                acc += u[(r, a)].conj() * u[(r, b)];
            }
            if a == b {
                acc -= Complex64::new(1.0, 0.0);
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}
