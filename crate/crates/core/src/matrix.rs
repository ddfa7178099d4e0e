//! Dense complex matrices stored row-major.
//!
//! [`CMatrix`] is immutable from the outside: every operation returns a new
//! matrix. Construction rejects NaN and infinite entries, so everything
//! downstream can assume finite arithmetic on its inputs.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CScalar = Complex64;

pub const ZERO: CScalar = Complex64::new(0.0, 0.0);
pub const ONE: CScalar = Complex64::new(1.0, 0.0);
pub const I: CScalar = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<CScalar>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<CScalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(k) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Input(format!(
                "non-finite entry at ({}, {})",
                k / cols.max(1),
                k % cols.max(1)
            )));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix from real entries given row by row.
    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| CScalar::new(v, 0.0)).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CScalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_diag(diag: &[CScalar]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                CScalar::new(diag[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<CScalar>]) -> Self {
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[CScalar] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> CScalar {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<CScalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn diagonal(&self) -> Vec<CScalar> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Checked product; the `*` operator panics on a shape mismatch instead.
    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; m * n];
        for i in 0..m {
            let row = &mut out[i * n..(i + 1) * n];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[p * n..(p + 1) * n];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(CMatrix {
            rows: m,
            cols: n,
            data: out,
        })
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn direct_sum(&self, other: &CMatrix) -> Result<CMatrix> {
        if !self.is_square() || !other.is_square() {
            return Err(Error::Dimension(format!(
                "direct sum needs square blocks, got {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (a, b) = (self.rows, other.rows);
        Ok(CMatrix::from_fn(a + b, a + b, |i, j| {
            match (i < a, j < a) {
                (true, true) => self.get(i, j),
                (false, false) => other.get(i - a, j - a),
                _ => ZERO,
            }
        }))
    }

    pub fn mat_vec(&self, x: &[CScalar]) -> Vec<CScalar> {
        assert_eq!(x.len(), self.cols, "vector length must match column count");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn scale(&self, c: CScalar) -> CMatrix {
        self.map(|z| z * c)
    }

    pub fn scale_real(&self, c: f64) -> CMatrix {
        self.map(|z| z * c)
    }

    pub fn map(&self, f: impl Fn(CScalar) -> CScalar) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> CScalar {
        self.diagonal().into_iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&z| z == ZERO)
    }

    /// `‖H − H*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Hermitian within `rel_tol · max(1, ‖H‖_F)`.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.is_square() && self.hermitian_defect() <= rel_tol * self.frobenius_norm().max(1.0)
    }

    /// `(H + H*) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        debug_assert!(self.is_square());
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// The 2×2 block operator matrix `[[a, b], [c, d]]`.
    pub fn block2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> Result<CMatrix> {
        if a.rows != b.rows || c.rows != d.rows || a.cols != c.cols || b.cols != d.cols {
            return Err(Error::Dimension("incompatible block shapes".into()));
        }
        let (r0, c0) = (a.rows, a.cols);
        Ok(CMatrix::from_fn(
            a.rows + c.rows,
            a.cols + b.cols,
            |i, j| match (i < r0, j < c0) {
                (true, true) => a.get(i, j),
                (true, false) => b.get(i, j - c0),
                (false, true) => c.get(i - r0, j),
                (false, false) => d.get(i - r0, j - c0),
            },
        ))
    }

    fn zip_with(
        &self,
        rhs: &CMatrix,
        op: &str,
        f: impl Fn(CScalar, CScalar) -> CScalar,
    ) -> CMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "cannot {op} {}x{} and {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = CScalar;

    fn index(&self, (i, j): (usize, usize)) -> &CScalar {
        &self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, "add", |a, b| a + b)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.zip_with(rhs, "subtract", |a, b| a - b)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

/// Panics on a shape mismatch; use [`CMatrix::matmul`] for a checked product.
impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Mul<CScalar> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, c: CScalar) -> CMatrix {
        self.scale(c)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, c: f64) -> CMatrix {
        self.scale_real(c)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:>11.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// vectors

/// `⟨x, y⟩ = Σ xᵢ·conj(yᵢ)`, linear in the first argument.
pub fn inner(x: &[CScalar], y: &[CScalar]) -> CScalar {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[CScalar]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨Ax, x⟩`.
pub fn quadratic_form(a: &CMatrix, x: &[CScalar]) -> CScalar {
    inner(&a.mat_vec(x), x)
}

// ---------------------------------------------------------------------------
// wire format

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

/// Parses the `{"rows", "cols", "data": [[re, im], ...]}` matrix format.
pub fn parse_matrix(text: &[u8]) -> Result<CMatrix> {
    let wire: MatrixWire = serde_json::from_slice(text).map_err(|e| {
        Error::Input(format!(
            "malformed matrix JSON at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    if wire.rows == 0 || wire.cols == 0 {
        return Err(Error::Input(format!(
            "field `rows`/`cols` must be positive, got {}x{}",
            wire.rows, wire.cols
        )));
    }
    let expected = wire
        .rows
        .checked_mul(wire.cols)
        .ok_or_else(|| Error::Input("shape overflows".into()))?;
    if wire.data.len() != expected {
        return Err(Error::Input(format!(
            "field `data` has {} entries, expected rows*cols = {expected}",
            wire.data.len()
        )));
    }
    if let Some(k) = wire
        .data
        .iter()
        .position(|p| !p[0].is_finite() || !p[1].is_finite())
    {
        return Err(Error::Input(format!(
            "field `data` entry {k} is not finite"
        )));
    }
    let data = wire
        .data
        .into_iter()
        .map(|[re, im]| CScalar::new(re, im))
        .collect();
    CMatrix::new(wire.rows, wire.cols, data)
}

pub fn emit_matrix(a: &CMatrix) -> String {
    let wire = MatrixWire {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&wire).expect("finite matrix always serializes")
}

/// The 3×3 weighted shift `[[0,2,0],[0,0,3],[0,0,0]]` direct-summed with `[1]`.
pub fn example_3x3() -> CMatrix {
    let shift = CMatrix::from_real(3, 3, &[0.0, 2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0]).unwrap();
    shift.direct_sum(&CMatrix::identity(1)).unwrap()
}

/// `[[0,2],[0,0]] ⊕ [1]`.
pub fn example_2x2() -> CMatrix {
    let shift = CMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
    shift.direct_sum(&CMatrix::identity(1)).unwrap()
}
