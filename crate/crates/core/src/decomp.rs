//! Polar decomposition and the t-Aluthge transform.

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, ZERO};
use crate::spectral::{abs_spectra, HermEigDecomp, SvdDecomp};

/// `A = U·P` with `P = |A|` and `U` a partial isometry whose initial space is
/// exactly the range of `P`.
#[derive(Clone, Debug)]
pub struct PolarDecomp {
    pub u: CMatrix,
    pub p: CMatrix,
    pub rank: usize,
    /// Spectral data of `|A|`, kept so powers of `P` need no new eigensolve.
    pub abs_spectrum: HermEigDecomp,
    /// Spectral data of `|A*| = U P U*`.
    pub abs_adj_spectrum: HermEigDecomp,
}

/// Residuals of the three defining properties.
#[derive(Clone, Copy, Debug)]
pub struct PolarResiduals {
    /// `‖U P − A‖_F`
    pub reconstruction: f64,
    /// `‖U U* U − U‖_F`
    pub partial_isometry: f64,
    /// `‖U (I − range projector of P)‖_F`
    pub kernel: f64,
}

impl PolarDecomp {
    pub fn residuals(&self, a: &CMatrix) -> PolarResiduals {
        let n = self.u.rows();
        let u = &self.u;
        let reconstruction = (&(u * &self.p) - a).frobenius_norm();
        let partial_isometry = (&(&(u * &u.adjoint()) * u) - u).frobenius_norm();
        let proj = self.abs_spectrum.map(|l| if l > 0.0 { 1.0 } else { 0.0 });
        let kernel = (u * &(&CMatrix::identity(n) - &proj)).frobenius_norm();
        PolarResiduals {
            reconstruction,
            partial_isometry,
            kernel,
        }
    }
}

fn polar_from_svd(s: &SvdDecomp, abs_a: HermEigDecomp, abs_adj: HermEigDecomp) -> PolarDecomp {
    let n = s.v_right.rows();
    let r = s.numerical_rank;
    let u = CMatrix::from_fn(n, n, |i, j| {
        let mut acc = ZERO;
        for k in 0..r {
            acc += s.u_left.get(i, k) * s.v_right.get(j, k).conj();
        }
        acc
    });
    let p = abs_a.map(|x| x);
    PolarDecomp {
        u,
        p,
        rank: r,
        abs_spectrum: abs_a,
        abs_adj_spectrum: abs_adj,
    }
}

pub fn polar(a: &CMatrix) -> Result<PolarDecomp> {
    let (abs_a, abs_adj, s) = abs_spectra(a)?;
    Ok(polar_from_svd(&s, abs_a, abs_adj))
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Contract(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// `|A|^t U |A|^{1−t}` from an existing polar decomposition.
pub fn aluthge_from_polar(pd: &PolarDecomp, t: f64) -> Result<CMatrix> {
    check_t(t)?;
    let left = pd.abs_spectrum.psd_power(t)?;
    let right = pd.abs_spectrum.psd_power(1.0 - t)?;
    Ok(&(&left * &pd.u) * &right)
}

/// The t-Aluthge transform `Ã_t = |A|^t U |A|^{1−t}`.
pub fn aluthge_t(a: &CMatrix, t: f64) -> Result<CMatrix> {
    check_t(t)?;
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "Aluthge transform needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    aluthge_from_polar(&polar(a)?, t)
}
