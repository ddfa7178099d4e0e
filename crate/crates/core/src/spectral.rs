//! Spectral kernels: Hermitian eigendecomposition, SVD, operator norm,
//! positive-semidefinite functional calculus and spectral radii.
//!
//! Full eigendecompositions use cyclic complex Jacobi. Extremal eigenvalues
//! alone (the hot path of the numerical-radius search) go through a
//! Householder reduction to real tridiagonal form followed by Sturm
//! bisection. Singular values come from one-sided (Hestenes) Jacobi, which
//! keeps structurally zero columns exactly zero.

use crate::error::{Error, Result};
use crate::matrix::{inner, vec_norm, CMatrix, CScalar, ONE, ZERO};

/// Relative Hermitian-defect tolerance accepted by the eigensolvers.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Negative eigenvalues down to `-PSD_CLAMP·λ_max` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-13;
const GELFAND_SQUARINGS: usize = 20;

/// Numerical-rank threshold `1e-10 · σ_max · dim`.
pub fn rank_cutoff(largest: f64, dim: usize) -> f64 {
    1e-10 * largest * dim.max(1) as f64
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermEigDecomp {
    pub eigenvalues: Vec<f64>,
    /// Columns are orthonormal eigenvectors, in eigenvalue order.
    pub eigenvectors: CMatrix,
}

impl HermEigDecomp {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `V · diag(f(λ)) · V*`, made exactly Hermitian when `f` is real.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for (k, &f) in fl.iter().enumerate() {
                if f != 0.0 {
                    acc += v.get(i, k) * v.get(j, k).conj() * f;
                }
            }
            acc
        });
        out = out.hermitian_part();
        out
    }

    /// Eigenvalues after the PSD clamp: anything at or below the numerical
    /// rank cutoff becomes exactly zero. Fails on clearly negative spectrum.
    pub fn psd_eigenvalues(&self) -> Result<Vec<f64>> {
        let top = self.max().max(0.0);
        let low = self.min();
        if low < -PSD_CLAMP * top || (top == 0.0 && low < 0.0) {
            return Err(Error::Contract(format!(
                "matrix is not positive semidefinite: λ_min = {low:.3e}, λ_max = {top:.3e}"
            )));
        }
        let cut = rank_cutoff(top, self.dim());
        Ok(self
            .eigenvalues
            .iter()
            .map(|&l| if l <= cut { 0.0 } else { l })
            .collect())
    }

    /// `f(P)` for PSD `P` after the clamp. `f` must be finite on the spectrum.
    pub fn psd_map(&self, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
        let vals = self.psd_eigenvalues()?;
        let mapped: Vec<f64> = vals.iter().map(|&l| f(l)).collect();
        if let Some(bad) = mapped.iter().position(|x| !x.is_finite()) {
            return Err(Error::Numerical(format!(
                "function is not finite at eigenvalue {:.6e}",
                vals[bad]
            )));
        }
        let shadow = HermEigDecomp {
            eigenvalues: mapped,
            eigenvectors: self.eigenvectors.clone(),
        };
        Ok(shadow.map(|x| x))
    }

    /// `P^s` with the convention `0^0 = 1`, so `P^0 = I`.
    pub fn psd_power(&self, s: f64) -> Result<CMatrix> {
        check_exponent(s)?;
        self.psd_map(|l| power_identity_convention(l, s))
    }

    /// `P^s` with `0^s = 0` for every `s`, so `P^0` is the support projection
    /// of `P` (the limit of `P^s` as `s → 0⁺`).
    pub fn psd_power_support(&self, s: f64) -> Result<CMatrix> {
        check_exponent(s)?;
        self.psd_map(|l| if l == 0.0 { 0.0 } else { l.powf(s) })
    }

    /// `‖H V − V Λ‖_F`.
    pub fn residual(&self, h: &CMatrix) -> f64 {
        let hv = h * &self.eigenvectors;
        let vl = CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.eigenvectors.get(i, j) * self.eigenvalues[j]
        });
        (&hv - &vl).frobenius_norm()
    }

    /// `‖V* V − I‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = &self.eigenvectors;
        (&(&v.adjoint() * v) - &CMatrix::identity(self.dim())).frobenius_norm()
    }
}

fn check_exponent(s: f64) -> Result<()> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::Contract(format!(
            "exponent must be a finite non-negative number, got {s}"
        )));
    }
    Ok(())
}

fn power_identity_convention(l: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if l == 0.0 {
        0.0
    } else {
        l.powf(s)
    }
}

fn require_square(a: &CMatrix, what: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "{what} needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

fn require_hermitian(h: &CMatrix) -> Result<()> {
    require_square(h, "Hermitian eigensolver")?;
    let defect = h.hermitian_defect();
    let allowed = HERMITIAN_TOL * h.frobenius_norm().max(1.0);
    if defect > allowed {
        return Err(Error::Contract(format!(
            "matrix is not Hermitian: ‖H − H*‖_F = {defect:.3e} exceeds {allowed:.3e}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Jacobi rotation shared by the eigen and singular value solvers

/// Rotation zeroing the off-diagonal entry `h_pq` of the Hermitian 2×2
/// `[[app, h_pq], [conj(h_pq), aqq]]`. Returns `(c, s, phase, t)` such that
/// new column p = c·col_p − s·conj(phase)·col_q and
/// new column q = s·col_p + c·conj(phase)·col_q.
#[inline]
fn jacobi_rotation(app: f64, aqq: f64, hpq: CScalar) -> (f64, f64, CScalar, f64) {
    let g = hpq.norm();
    let phase = hpq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c, phase, t)
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn rotate_columns(
    data: &mut [CScalar],
    ld: usize,
    nrows: usize,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: CScalar,
) {
    let pc = phase.conj();
    for k in 0..nrows {
        let xp = data[k * ld + p];
        let xq = data[k * ld + q];
        data[k * ld + p] = xp * c - pc * xq * s;
        data[k * ld + q] = xp * s + pc * xq * c;
    }
}

#[inline]
fn rotate_rows(
    data: &mut [CScalar],
    ld: usize,
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    phase: CScalar,
) {
    for k in 0..ld {
        let xp = data[p * ld + k];
        let xq = data[q * ld + k];
        data[p * ld + k] = xp * c - phase * xq * s;
        data[q * ld + k] = xp * s + phase * xq * c;
    }
}

/// Full eigendecomposition by cyclic Jacobi.
pub fn herm_eig(h: &CMatrix) -> Result<HermEigDecomp> {
    require_hermitian(h)?;
    let n = h.rows();
    let mut a: Vec<CScalar> = h.hermitian_part().data().to_vec();
    let mut v: Vec<CScalar> = CMatrix::identity(n).data().to_vec();
    let fro = h.frobenius_norm();

    let off_norm = |a: &[CScalar]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[i * n + j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    };

    let mut converged = fro == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged || off_norm(&a) <= JACOBI_OFF_TOL * fro {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let hpq = a[p * n + q];
                if hpq.norm() <= 1e-300 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p].re, a[q * n + q].re);
                let (c, s, phase, t) = jacobi_rotation(app, aqq, hpq);
                let g = hpq.norm();
                rotate_columns(&mut a, n, n, p, q, c, s, phase);
                rotate_rows(&mut a, n, p, q, c, s, phase);
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p] = CScalar::new(app - t * g, 0.0);
                a[q * n + q] = CScalar::new(aqq + t * g, 0.0);
                rotate_columns(&mut v, n, n, p, q, c, s, phase);
            }
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal mass {:.3e})",
            off_norm(&a)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| a[i * n + i].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Ok(HermEigDecomp {
        eigenvalues,
        eigenvectors,
    })
}

// ---------------------------------------------------------------------------
// extremal eigenvalues

/// Reusable buffers for the tridiagonal path, so the radius search does not
/// allocate per angle.
#[derive(Default)]
pub(crate) struct EigScratch {
    /// Row-major Hermitian input; overwritten by the reduction.
    pub a: Vec<CScalar>,
    d: Vec<f64>,
    /// `e2[0] = 0`, `e2[i] = |subdiag_{i−1}|²`.
    e2: Vec<f64>,
    v: Vec<CScalar>,
    p: Vec<CScalar>,
}

impl EigScratch {
    fn load(&mut self, h: &CMatrix) {
        self.a.clear();
        self.a.extend_from_slice(h.data());
    }

    /// Householder reduction of the `n × n` Hermitian matrix in `a` to a real
    /// symmetric tridiagonal with the same spectrum.
    fn tridiagonalize(&mut self, n: usize) {
        let EigScratch { a, d, e2, v, p } = self;
        d.clear();
        e2.clear();
        e2.resize(n, 0.0);
        v.resize(n, ZERO);
        p.resize(n, ZERO);
        for k in 0..n.saturating_sub(2) {
            let m = n - k - 1;
            let base = k + 1;
            let x2: f64 = (0..m).map(|i| a[(base + i) * n + k].norm_sqr()).sum();
            e2[k + 1] = x2;
            if x2 == 0.0 {
                continue;
            }
            let xnorm = x2.sqrt();
            let x0 = a[base * n + k];
            let phase = if x0.norm() == 0.0 {
                ONE
            } else {
                x0 / x0.norm()
            };
            for i in 0..m {
                v[i] = a[(base + i) * n + k];
            }
            v[0] += phase * xnorm;
            let vnorm = vec_norm(&v[..m]);
            if vnorm == 0.0 {
                continue;
            }
            let inv = 1.0 / vnorm;
            for vi in &mut v[..m] {
                *vi *= inv;
            }
            // p = S v on the trailing block, w = p − (v*p) v, then S −= 2(v w* + w v*).
            // Only the lower triangle of S is read or written.
            for pi in &mut p[..m] {
                *pi = ZERO;
            }
            for i in 0..m {
                let row = &a[(base + i) * n + base..(base + i) * n + base + i + 1];
                let vi = v[i];
                let mut acc = ZERO;
                for j in 0..i {
                    acc += row[j] * v[j];
                    p[j] += row[j].conj() * vi;
                }
                p[i] += acc + row[i] * vi;
            }
            let c: f64 = v[..m]
                .iter()
                .zip(&p[..m])
                .map(|(x, y)| (x.conj() * y).re)
                .sum();
            for i in 0..m {
                p[i] -= v[i] * c;
            }
            for i in 0..m {
                let (vi, wi) = (v[i] * 2.0, p[i] * 2.0);
                let row = &mut a[(base + i) * n + base..(base + i) * n + base + i + 1];
                for ((s, vj), wj) in row.iter_mut().zip(&v[..=i]).zip(&p[..=i]) {
                    *s -= vi * wj.conj() + wi * vj.conj();
                }
            }
        }
        if n >= 2 {
            e2[n - 1] = a[(n - 1) * n + (n - 2)].norm_sqr();
        }
        d.extend((0..n).map(|i| a[i * n + i].re));
    }

    /// Number of eigenvalues strictly below `x`.
    fn sturm_count(&self, x: f64, pivmin: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (di, ei) in self.d.iter().zip(&self.e2) {
            q = di - x - ei / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            count += (q < 0.0) as usize;
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let left = self.e2[i].sqrt();
            let right = if i + 1 < n {
                self.e2[i + 1].sqrt()
            } else {
                0.0
            };
            lo = lo.min(self.d[i] - left - right);
            hi = hi.max(self.d[i] + left + right);
        }
        (lo, hi)
    }

    fn pivmin(&self) -> f64 {
        f64::MIN_POSITIVE * self.e2.iter().fold(1.0f64, |m, &x| m.max(x))
    }

    /// The `k`-th smallest eigenvalue (1-based) by bisection. A `bracket`
    /// known to contain it shortens the search; it is verified first.
    fn kth(&self, k: usize, bracket: Option<(f64, f64)>) -> f64 {
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs());
        if scale == 0.0 {
            return 0.0;
        }
        let pivmin = self.pivmin();
        let slop = 2.0 * f64::EPSILON * scale;
        let (mut lo, mut hi) = (glo - slop, ghi + slop);
        if let Some((blo, bhi)) = bracket {
            let (blo, bhi) = (blo - slop, bhi + slop);
            if blo > lo
                && bhi < hi
                && blo < bhi
                && self.sturm_count(blo, pivmin) < k
                && self.sturm_count(bhi, pivmin) >= k
            {
                (lo, hi) = (blo, bhi);
            }
        }
        self.bisect(k, lo, hi, slop, pivmin)
    }

    fn bisect(&self, k: usize, mut lo: f64, mut hi: f64, slop: f64, pivmin: f64) -> f64 {
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= slop {
                break;
            }
            if self.sturm_count(mid, pivmin) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Largest eigenvalue by Newton's method on `P(x) = det(xI − T)` started
    /// above the spectrum. All roots of `P` are real, so the iterates decrease
    /// monotonically onto `λ_max`; bisection takes over if rounding ever
    /// drops an iterate below it.
    fn largest(&self, bracket: Option<(f64, f64)>) -> f64 {
        let n = self.d.len();
        let (glo, ghi) = self.gershgorin();
        let scale = glo.abs().max(ghi.abs());
        if scale == 0.0 {
            return 0.0;
        }
        let pivmin = self.pivmin();
        let slop = 2.0 * f64::EPSILON * scale;
        let mut lo = glo - slop;
        let mut x = ghi + slop;
        if let Some((blo, bhi)) = bracket {
            let (blo, bhi) = (blo - slop, bhi + slop);
            if blo > lo
                && bhi < x
                && blo < bhi
                && self.sturm_count(blo, pivmin) < n
                && self.sturm_count(bhi, pivmin) >= n
            {
                (lo, x) = (blo, bhi);
            }
        }
        for _ in 0..100 {
            // pivots q_i of xI − T and Σ q_i'/q_i = P'/P = Σ 1/(x − λ_i)
            let (mut q, mut dq, mut ratio) = (1.0, 0.0, 0.0);
            let mut above = true;
            for (di, ei) in self.d.iter().zip(&self.e2) {
                let qi = x - di - ei / q;
                if qi <= 0.0 {
                    above = false;
                    break;
                }
                let dqi = 1.0 + ei * dq / (q * q);
                ratio += dqi / qi;
                q = qi;
                dq = dqi;
            }
            if !above {
                break;
            }
            let step = 1.0 / ratio;
            if step <= slop {
                return x - step;
            }
            x -= step;
        }
        let hi = x + slop;
        self.bisect(n, lo.min(hi - slop), hi, slop, pivmin)
    }
}

/// `(λ_min, λ_max)` of a Hermitian matrix by tridiagonal bisection.
pub fn extreme_eigenvalues(h: &CMatrix) -> Result<(f64, f64)> {
    require_hermitian(h)?;
    Ok(extreme_eigenvalues_unchecked(&h.hermitian_part()))
}

pub(crate) fn extreme_eigenvalues_unchecked(h: &CMatrix) -> (f64, f64) {
    let n = h.rows();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mut s = EigScratch::default();
    s.load(h);
    s.tridiagonalize(n);
    (s.kth(1, None), s.largest(None))
}

pub(crate) fn max_eigenvalue_unchecked(h: &CMatrix) -> f64 {
    let mut s = EigScratch::default();
    s.load(h);
    max_eigenvalue_scratch(&mut s, h.rows(), None)
}

/// `λ_max` of the `n × n` Hermitian matrix already loaded into `s.a`; the
/// inner loop of the radius search.
pub(crate) fn max_eigenvalue_scratch(
    s: &mut EigScratch,
    n: usize,
    bracket: Option<(f64, f64)>,
) -> f64 {
    match n {
        0 => 0.0,
        1 => s.a[0].re,
        _ => {
            s.tridiagonalize(n);
            s.largest(bracket)
        }
    }
}

// ---------------------------------------------------------------------------
// singular values

#[derive(Clone, Debug)]
pub struct SvdDecomp {
    /// `rows × rows` unitary; the first `min(rows, cols)` columns pair with `singular_values`.
    pub u_left: CMatrix,
    /// Descending, length `min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// `cols × cols` unitary.
    pub v_right: CMatrix,
    pub numerical_rank: usize,
}

impl SvdDecomp {
    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn rank_cutoff(&self) -> f64 {
        rank_cutoff(self.largest(), self.u_left.rows().max(self.v_right.rows()))
    }

    /// `U_k · diag(σ) · V_k*`.
    pub fn reconstruct(&self) -> CMatrix {
        let (m, n) = (self.u_left.rows(), self.v_right.rows());
        let k = self.singular_values.len();
        CMatrix::from_fn(m, n, |i, j| {
            (0..k)
                .map(|l| {
                    self.u_left.get(i, l) * self.v_right.get(j, l).conj() * self.singular_values[l]
                })
                .sum()
        })
    }
}

/// SVD by one-sided Jacobi on the columns.
pub fn svd(a: &CMatrix) -> Result<SvdDecomp> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        let t = svd(&a.adjoint())?;
        return Ok(SvdDecomp {
            u_left: t.v_right,
            singular_values: t.singular_values,
            v_right: t.u_left,
            numerical_rank: t.numerical_rank,
        });
    }
    // working columns stored row-major in an m×n buffer
    let mut g: Vec<CScalar> = a.data().to_vec();
    let mut v: Vec<CScalar> = CMatrix::identity(n).data().to_vec();
    let tol = (m.max(1) as f64) * f64::EPSILON;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for k in 0..m {
                    let (x, y) = (g[k * n + p], g[k * n + q]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= tol * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let (c, s, phase, _) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut g, n, m, p, q, c, s, phase);
                rotate_columns(&mut v, n, n, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "one-sided Jacobi SVD did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|k| g[k * n + j].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let largest = singular_values.first().copied().unwrap_or(0.0);
    let cut = rank_cutoff(largest, m);
    let numerical_rank = if largest == 0.0 {
        0
    } else {
        singular_values.iter().filter(|&&s| s > cut).count()
    };

    let mut u_cols: Vec<Vec<CScalar>> = order[..numerical_rank]
        .iter()
        .map(|&j| (0..m).map(|k| g[k * n + j] / norms[j]).collect())
        .collect();
    complete_orthonormal(&mut u_cols, m);
    let u_left = CMatrix::from_columns(m, &u_cols);
    let v_right = CMatrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Ok(SvdDecomp {
        u_left,
        singular_values,
        v_right,
        numerical_rank,
    })
}

/// Extends orthonormal columns to a basis of ℂ^dim by greedy modified
/// Gram–Schmidt over the standard basis.
fn complete_orthonormal(cols: &mut Vec<Vec<CScalar>>, dim: usize) {
    while cols.len() < dim {
        let mut best: Option<(f64, Vec<CScalar>)> = None;
        for k in 0..dim {
            let mut x = vec![ZERO; dim];
            x[k] = ONE;
            for _ in 0..2 {
                for c in cols.iter() {
                    let proj = inner(&x, c);
                    for (xi, ci) in x.iter_mut().zip(c) {
                        *xi -= proj * ci;
                    }
                }
            }
            let nx = vec_norm(&x);
            if best.as_ref().is_none_or(|(b, _)| nx > *b) {
                best = Some((nx, x));
            }
        }
        let (nx, mut x) = best.expect("dim > 0");
        for xi in &mut x {
            *xi /= nx;
        }
        cols.push(x);
    }
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 || a.is_zero() {
        return 0.0;
    }
    if a.is_square() && a.hermitian_defect() == 0.0 {
        let (lo, hi) = extreme_eigenvalues_unchecked(a);
        return lo.abs().max(hi.abs());
    }
    let gram = if a.cols() <= a.rows() {
        &a.adjoint() * a
    } else {
        a * &a.adjoint()
    };
    max_eigenvalue_unchecked(&gram.hermitian_part())
        .max(0.0)
        .sqrt()
}

/// Spectral data of `|A| = (A*A)^{1/2}` and `|A*| = (AA*)^{1/2}` read off one SVD.
/// Singular values below the rank cutoff are recorded as exact zeros.
pub fn abs_spectra(a: &CMatrix) -> Result<(HermEigDecomp, HermEigDecomp, SvdDecomp)> {
    require_square(a, "absolute value")?;
    let s = svd(a)?;
    let n = a.rows();
    let sig: Vec<f64> = s
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &x)| if i < s.numerical_rank { x } else { 0.0 })
        .collect();
    // ascending order = reversed columns
    let rev = |m: &CMatrix| CMatrix::from_fn(n, n, |i, j| m.get(i, n - 1 - j));
    let vals: Vec<f64> = sig.iter().rev().copied().collect();
    let abs_a = HermEigDecomp {
        eigenvalues: vals.clone(),
        eigenvectors: rev(&s.v_right),
    };
    let abs_adj = HermEigDecomp {
        eigenvalues: vals,
        eigenvectors: rev(&s.u_left),
    };
    Ok((abs_a, abs_adj, s))
}

/// `(|A|, |A*|)`.
pub fn abs_factors(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (p, q, _) = abs_spectra(a)?;
    Ok((p.map(|x| x), q.map(|x| x)))
}

/// Eigendecomposition of a Hermitian PSD matrix, validated against the clamp.
pub fn psd_eig(p: &CMatrix) -> Result<HermEigDecomp> {
    let e = herm_eig(p)?;
    e.psd_eigenvalues()?;
    Ok(e)
}

/// `P^s` for Hermitian PSD `P`, with `P^0 = I`.
pub fn psd_power(p: &CMatrix, s: f64) -> Result<CMatrix> {
    psd_eig(p)?.psd_power(s)
}

/// `f(P)` for Hermitian PSD `P`.
pub fn psd_apply(p: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    psd_eig(p)?.psd_map(f)
}

/// Fails unless `P` is Hermitian with `λ_min ≥ −PSD_CLAMP·λ_max`.
pub fn require_psd(p: &CMatrix, what: &str) -> Result<()> {
    require_hermitian(p).map_err(|e| Error::Contract(format!("{what}: {e}")))?;
    let (lo, hi) = extreme_eigenvalues_unchecked(&p.hermitian_part());
    if lo < -PSD_CLAMP * hi.max(0.0) || (hi <= 0.0 && lo < 0.0) {
        return Err(Error::Contract(format!(
            "{what} is not positive semidefinite: λ_min = {lo:.3e}, λ_max = {hi:.3e}"
        )));
    }
    Ok(())
}

/// `r(PQ) = λ_max(Q^{1/2} P Q^{1/2})` for PSD `P`, `Q`.
pub fn spectral_radius_psd_pair(p: &CMatrix, q: &CMatrix) -> Result<f64> {
    if p.rows() != q.rows() || !p.is_square() || !q.is_square() {
        return Err(Error::Dimension(
            "PSD pair must be square and of equal size".into(),
        ));
    }
    require_psd(p, "P")?;
    let q_half = psd_power(q, 0.5)?;
    Ok(spectral_radius_psd_pair_with_root(p, &q_half))
}

/// Same as [`spectral_radius_psd_pair`] given `Q^{1/2}` already.
pub(crate) fn spectral_radius_psd_pair_with_root(p: &CMatrix, q_half: &CMatrix) -> f64 {
    let m = &(q_half * p) * q_half;
    max_eigenvalue_unchecked(&m.hermitian_part()).max(0.0)
}

/// Gelfand estimate `‖A^{2^k}‖^{1/2^k}` by normalized repeated squaring.
///
/// Always at least `r(A)`; converges to it as the squaring count grows.
pub fn spectral_radius_general(a: &CMatrix) -> Result<f64> {
    require_square(a, "spectral radius")?;
    let f0 = a.frobenius_norm();
    if f0 == 0.0 {
        return Ok(0.0);
    }
    let mut m = a.scale_real(1.0 / f0);
    let mut log_r = f0.ln();
    let mut weight = 1.0;
    for _ in 0..GELFAND_SQUARINGS {
        m = &m * &m;
        let f = m.frobenius_norm();
        if f == 0.0 {
            return Ok(0.0);
        }
        m = m.scale_real(1.0 / f);
        weight *= 0.5;
        log_r += weight * f.ln();
    }
    log_r += weight * operator_norm(&m).ln();
    Ok(log_r.exp())
}

/// `r(A)`, exact from the eigenvalues when `A` is Hermitian.
pub fn spectral_radius(a: &CMatrix) -> Result<f64> {
    if a.is_hermitian(1e-12) {
        let (lo, hi) = extreme_eigenvalues_unchecked(&a.hermitian_part());
        return Ok(lo.abs().max(hi.abs()));
    }
    spectral_radius_general(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::example_3x3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| {
            CScalar::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        random_matrix(rng, n).hermitian_part()
    }

    #[test]
    fn herm_eig_examples() {
        let e = herm_eig(&CMatrix::from_real_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        let e = herm_eig(&CMatrix::from_real(2, 2, &[0.0, 2.0, 2.0, 0.0]).unwrap()).unwrap();
        assert!((e.eigenvalues[0] + 2.0).abs() < 1e-14 && (e.eigenvalues[1] - 2.0).abs() < 1e-14);
        let bad = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(herm_eig(&bad), Err(Error::Contract(_))));
    }

    #[test]
    fn herm_eig_residuals_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..12 {
            let h = random_hermitian(&mut rng, n);
            let e = herm_eig(&h).unwrap();
            assert!(e.residual(&h) <= 1e-10 * h.frobenius_norm().max(1.0));
            assert!(e.orthonormality_defect() <= 1e-10);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn extreme_eigenvalues_match_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..15 {
            let h = random_hermitian(&mut rng, n);
            let e = herm_eig(&h).unwrap();
            let (lo, hi) = extreme_eigenvalues(&h).unwrap();
            assert!((lo - e.min()).abs() < 1e-12, "n={n}: {lo} vs {}", e.min());
            assert!((hi - e.max()).abs() < 1e-12, "n={n}: {hi} vs {}", e.max());
        }
    }

    #[test]
    fn svd_examples() {
        let s = CMatrix::from_real(3, 3, &[0.0, 2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]).unwrap();
        let d = svd(&s).unwrap();
        assert_eq!(d.singular_values, vec![3.0, 2.0, 0.0]);
        assert_eq!(d.numerical_rank, 2);
        let d = svd(&CMatrix::identity(4)).unwrap();
        assert!(d.singular_values.iter().all(|&x| x == 1.0));
        let d = svd(&CMatrix::zeros(3, 3)).unwrap();
        assert!(d.singular_values.iter().all(|&x| x == 0.0));
        assert_eq!(d.numerical_rank, 0);
    }

    #[test]
    fn svd_reconstructs_rectangular_and_rank_deficient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (m, n) in [(4, 4), (5, 3), (3, 5), (6, 6)] {
            let a = random_matrix(&mut rng, m.max(n));
            let a = CMatrix::from_fn(m, n, |i, j| a.get(i, j));
            let d = svd(&a).unwrap();
            assert!((&d.reconstruct() - &a).frobenius_norm() <= 1e-9 * a.frobenius_norm().max(1.0));
            let uu = &d.u_left.adjoint() * &d.u_left;
            assert!((&uu - &CMatrix::identity(m)).frobenius_norm() < 1e-12);
            // σ² are the eigenvalues of A*A
            let gram = herm_eig(&(&a.adjoint() * &a)).unwrap();
            for (k, s) in d.singular_values.iter().enumerate() {
                let l = gram.eigenvalues[gram.dim() - 1 - k];
                assert!((s * s - l).abs() < 1e-10);
            }
        }
        // rank two, built from an outer-product sum
        let x = random_matrix(&mut rng, 5);
        let mask = CMatrix::from_real_diag(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        let a = &(&x * &mask) * &x.adjoint();
        assert_eq!(svd(&a).unwrap().numerical_rank, 2);
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&crate::matrix::example_2x2()) - 2.0).abs() < 1e-14);
        assert!((operator_norm(&example_3x3()) - 3.0).abs() < 1e-15);
        assert_eq!(operator_norm(&CMatrix::zeros(3, 3)), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 6);
            let sv = svd(&a).unwrap().largest();
            assert!((operator_norm(&a) - sv).abs() < 1e-12 * sv);
            assert!((operator_norm(&a) - operator_norm(&a.adjoint())).abs() < 1e-10 * sv);
        }
    }

    #[test]
    fn abs_factors_examples() {
        let s = CMatrix::from_real(3, 3, &[0.0, 2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]).unwrap();
        let (p, q) = abs_factors(&s).unwrap();
        assert!((&p - &CMatrix::from_real_diag(&[0.0, 2.0, 3.0])).max_abs() < 1e-15);
        assert!((&q - &CMatrix::from_real_diag(&[2.0, 3.0, 0.0])).max_abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_matrix(&mut rng, 4);
        let psd = &g.adjoint() * &g;
        let (p, q) = abs_factors(&psd).unwrap();
        assert!((&p - &psd).max_abs() < 1e-12 && (&q - &psd).max_abs() < 1e-12);

        let u = svd(&g).unwrap().u_left;
        let (p, q) = abs_factors(&u).unwrap();
        assert!((&p - &CMatrix::identity(4)).max_abs() < 1e-12);
        assert!((&q - &CMatrix::identity(4)).max_abs() < 1e-12);
    }

    #[test]
    fn psd_power_examples() {
        let d = CMatrix::from_real_diag(&[0.0, 4.0, 9.0]);
        let r = psd_power(&d, 0.5).unwrap();
        assert!((&r - &CMatrix::from_real_diag(&[0.0, 2.0, 3.0])).max_abs() < 1e-15);
        assert!((&psd_power(&d, 1.0).unwrap() - &d).max_abs() < 1e-15);
        assert_eq!(psd_power(&d, 0.0).unwrap(), CMatrix::identity(3));
        let supp = psd_eig(&d).unwrap().psd_power_support(0.0).unwrap();
        assert_eq!(supp, CMatrix::from_real_diag(&[0.0, 1.0, 1.0]));

        let neg = CMatrix::from_real_diag(&[-1.0, 2.0]);
        assert!(matches!(psd_power(&neg, 0.5), Err(Error::Contract(_))));
        let tiny_neg = CMatrix::from_real_diag(&[-1e-14, 2.0]);
        assert_eq!(psd_power(&tiny_neg, 0.5).unwrap().get(0, 0), ZERO);
    }

    #[test]
    fn psd_apply_examples() {
        let d = CMatrix::from_real_diag(&[0.0, 2.0, 3.0]);
        assert!((&psd_apply(&d, |x| x).unwrap() - &d).max_abs() < 1e-15);
        let r = psd_apply(&d, |x| x.powf(0.87)).unwrap();
        let want = CMatrix::from_real_diag(&[0.0, 2f64.powf(0.87), 3f64.powf(0.87)]);
        assert!((&r - &want).max_abs() < 1e-15);
        assert_eq!(psd_apply(&d, |_| 1.0).unwrap(), CMatrix::identity(3));
        assert!(matches!(
            psd_apply(&d, |x| 1.0 / x),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn psd_power_semigroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let g = random_matrix(&mut rng, 5);
            let p = &g.adjoint() * &g;
            let e = psd_eig(&p).unwrap();
            let scale = operator_norm(&p).max(1.0);
            let h = e.psd_power(0.5).unwrap();
            assert!((&(&h * &h) - &p).max_abs() <= 1e-9 * scale);
            for (s, u) in [(0.3, 1.1), (1.5, 0.5), (2.0, 2.0)] {
                let lhs = e.psd_power(s + u).unwrap();
                let rhs = &e.psd_power(s).unwrap() * &e.psd_power(u).unwrap();
                assert!((&lhs - &rhs).max_abs() <= 1e-9 * scale.powf(s + u).max(1.0));
            }
        }
    }

    #[test]
    fn psd_pair_radius_examples() {
        let i = CMatrix::identity(3);
        assert!((spectral_radius_psd_pair(&i, &i).unwrap() - 1.0).abs() < 1e-15);
        let p = CMatrix::from_real_diag(&[0.0, 2.0, 3.0, 1.0]);
        let q = CMatrix::from_real_diag(&[2.0, 3.0, 0.0, 1.0]);
        assert!((spectral_radius_psd_pair(&p, &q).unwrap() - 6.0).abs() < 1e-14);
        assert_eq!(
            spectral_radius_psd_pair(&p, &CMatrix::zeros(4, 4)).unwrap(),
            0.0
        );

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (g, h) = (random_matrix(&mut rng, 5), random_matrix(&mut rng, 5));
        let (p, q) = (&g.adjoint() * &g, &h.adjoint() * &h);
        let a = spectral_radius_psd_pair(&p, &q).unwrap();
        let b = spectral_radius_psd_pair(&q, &p).unwrap();
        assert!((a - b).abs() <= 1e-9 * a.max(1.0));
    }

    #[test]
    fn gelfand_examples() {
        let nil = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(spectral_radius_general(&nil).unwrap() < 1e-8);
        let d = CMatrix::from_real_diag(&[2.0, -3.0]);
        assert!((spectral_radius_general(&d).unwrap() - 3.0).abs() < 1e-12);
        assert!((spectral_radius_general(&example_3x3()).unwrap() - 1.0).abs() < 1e-8);
        assert_eq!(spectral_radius_general(&CMatrix::zeros(2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn gelfand_matches_hermitian_spectrum_and_norm_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..8 {
            let h = random_hermitian(&mut rng, n);
            let e = herm_eig(&h).unwrap();
            let want = e.min().abs().max(e.max().abs());
            let scale = h.frobenius_norm().max(1.0);
            assert!((spectral_radius_general(&h).unwrap() - want).abs() <= 1e-6 * scale);
            let a = random_matrix(&mut rng, n);
            let r = spectral_radius_general(&a).unwrap();
            assert!(r <= operator_norm(&a) + 1e-8 * operator_norm(&a).max(1.0));
        }
    }
}
