//! Real Schur decomposition with the diagonal blocks reordered by a
//! unit-circle predicate.
//!
//! The unordered form comes from nalgebra's Francis double-shift iteration.
//! Diagonal blocks are then moved with direct swaps: for adjacent blocks
//! `A11`, `A22` coupled by `A12`, the Sylvester solution of
//! `A11 X - X A22 = A12` gives the invariant basis `[-X; I]` of `A22`, and an
//! orthogonal completion of that basis exchanges the two blocks.

use nalgebra::{Complex, DMatrix, Schur};

use crate::error::{Error, Result};
use crate::linalg;

/// Minimum `|log|λ||` that keeps an eigenvalue off the unit circle.
pub const DEFAULT_UNIT_CIRCLE_TOL: f64 = 1e-7;

const SCHUR_MAX_ITER: usize = 10_000;

/// Which half of the spectrum is moved into the leading block `S11`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumOrdering {
    /// `|λ| > 1` first.
    OutsideFirst,
    /// `|λ| < 1` first.
    InsideFirst,
}

impl SpectrumOrdering {
    pub fn selects(self, modulus: f64) -> bool {
        match self {
            SpectrumOrdering::OutsideFirst => modulus > 1.0,
            SpectrumOrdering::InsideFirst => modulus < 1.0,
        }
    }
}

/// A 1×1 or 2×2 diagonal block of a quasi-upper-triangular matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchurBlock {
    pub start: usize,
    pub size: usize,
    /// One eigenvalue of the block; the conjugate is implied for 2×2 blocks.
    pub eigenvalue: Complex<f64>,
}

impl SchurBlock {
    pub fn modulus(&self) -> f64 {
        self.eigenvalue.norm()
    }
}

/// `Wᵀ M W = S` with `S` quasi-upper-triangular and the selected half of the
/// spectrum in the leading n×n block.
#[derive(Clone, Debug)]
pub struct OrderedSchur {
    w: DMatrix<f64>,
    s: DMatrix<f64>,
    ordering: SpectrumOrdering,
    half: usize,
}

impl OrderedSchur {
    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn ordering(&self) -> SpectrumOrdering {
        self.ordering
    }

    pub fn half_dim(&self) -> usize {
        self.half
    }

    pub fn w11(&self) -> DMatrix<f64> {
        linalg::block(&self.w, 0, 0, self.half, self.half)
    }

    pub fn w12(&self) -> DMatrix<f64> {
        linalg::block(&self.w, 0, self.half, self.half, self.half)
    }

    pub fn w21(&self) -> DMatrix<f64> {
        linalg::block(&self.w, self.half, 0, self.half, self.half)
    }

    pub fn w22(&self) -> DMatrix<f64> {
        linalg::block(&self.w, self.half, self.half, self.half, self.half)
    }

    pub fn s11(&self) -> DMatrix<f64> {
        linalg::block(&self.s, 0, 0, self.half, self.half)
    }

    pub fn s21(&self) -> DMatrix<f64> {
        linalg::block(&self.s, self.half, 0, self.half, self.half)
    }

    pub fn s22(&self) -> DMatrix<f64> {
        linalg::block(&self.s, self.half, self.half, self.half, self.half)
    }

    pub fn blocks(&self) -> Vec<SchurBlock> {
        diagonal_blocks(&self.s)
    }

    /// All eigenvalues read off the diagonal blocks, conjugate pairs expanded.
    pub fn eigenvalues(&self) -> Vec<Complex<f64>> {
        expand(&self.blocks())
    }

    /// Eigenvalues of `S11`.
    pub fn leading_eigenvalues(&self) -> Vec<Complex<f64>> {
        let leading: Vec<_> = self
            .blocks()
            .into_iter()
            .filter(|b| b.start < self.half)
            .collect();
        expand(&leading)
    }
}

fn expand(blocks: &[SchurBlock]) -> Vec<Complex<f64>> {
    blocks
        .iter()
        .flat_map(|b| {
            if b.size == 1 {
                vec![b.eigenvalue]
            } else {
                vec![b.eigenvalue, b.eigenvalue.conj()]
            }
        })
        .collect()
}

fn block_eigenvalue(t: &DMatrix<f64>, start: usize, size: usize) -> Complex<f64> {
    if size == 1 {
        return Complex::new(t[(start, start)], 0.0);
    }
    let (a, b, c, d) = (
        t[(start, start)],
        t[(start, start + 1)],
        t[(start + 1, start)],
        t[(start + 1, start + 1)],
    );
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let disc = half_diff * half_diff + b * c;
    if disc >= 0.0 {
        // Only reached for blocks that are about to be split.
        Complex::new(mean + disc.sqrt(), 0.0)
    } else {
        Complex::new(mean, (-disc).sqrt())
    }
}

/// Block structure read from the nonzero subdiagonal entries.
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<SchurBlock> {
    let dim = t.nrows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < dim {
        let size = if i + 1 < dim && t[(i + 1, i)] != 0.0 {
            2
        } else {
            1
        };
        blocks.push(SchurBlock {
            start: i,
            size,
            eigenvalue: block_eigenvalue(t, i, size),
        });
        i += size;
    }
    blocks
}

/// Applies the orthogonal `g` to rows and columns `j..j+g.nrows()` of `t`
/// (`t ← gᵀ t g`) and accumulates it into `q` (`q ← q g`).
fn apply_local(t: &mut DMatrix<f64>, q: &mut DMatrix<f64>, j: usize, g: &DMatrix<f64>) {
    let s = g.nrows();
    let dim = t.nrows();
    let rows = g.transpose() * t.view((j, 0), (s, dim));
    t.view_mut((j, 0), (s, dim)).copy_from(&rows);
    let cols = t.view((0, j), (dim, s)) * g;
    t.view_mut((0, j), (dim, s)).copy_from(&cols);
    let qcols = q.view((0, j), (dim, s)) * g;
    q.view_mut((0, j), (dim, s)).copy_from(&qcols);
}

/// Triangularizes a 2×2 block at `j` when its eigenvalues are real.
fn split_real_pair(t: &mut DMatrix<f64>, q: &mut DMatrix<f64>, j: usize) {
    let (a, b, c, d) = (t[(j, j)], t[(j, j + 1)], t[(j + 1, j)], t[(j + 1, j + 1)]);
    if c == 0.0 {
        return;
    }
    let half_diff = 0.5 * (a - d);
    let disc = half_diff * half_diff + b * c;
    if disc < 0.0 {
        return;
    }
    let root = disc.sqrt();
    let lambda = 0.5 * (a + d) + if half_diff >= 0.0 { root } else { -root };
    // Two candidate eigenvector forms; keep the better-scaled one.
    let (x1, y1) = (b, lambda - a);
    let (x2, y2) = (lambda - d, c);
    let (x, y) = if x1.hypot(y1) >= x2.hypot(y2) {
        (x1, y1)
    } else {
        (x2, y2)
    };
    let norm = x.hypot(y);
    if norm == 0.0 {
        return;
    }
    let (cs, sn) = (x / norm, y / norm);
    let g = DMatrix::from_row_slice(2, 2, &[cs, -sn, sn, cs]);
    apply_local(t, q, j, &g);
    t[(j + 1, j)] = 0.0;
}

/// Unordered real Schur form `m = q t qᵀ` with 2×2 blocks only for complex pairs.
fn real_schur(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (mut q, mut t) = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::SchurNotConverged)?
        .unpack();
    let dim = t.nrows();
    // Clear roundoff below the quasi-triangle.
    for j in 0..dim {
        for i in j + 2..dim {
            t[(i, j)] = 0.0;
        }
    }
    for block in diagonal_blocks(&t) {
        if block.size == 2 {
            split_real_pair(&mut t, &mut q, block.start);
        }
    }
    Ok((q, t))
}

/// Exchanges the adjacent diagonal blocks of sizes `n1` and `n2` starting at `j`.
fn swap_adjacent(
    t: &mut DMatrix<f64>,
    q: &mut DMatrix<f64>,
    j: usize,
    n1: usize,
    n2: usize,
) -> Result<()> {
    let s = n1 + n2;
    let local_norm = t.view((j, j), (s, s)).norm();
    let a11 = t.view((j, j), (n1, n1)).into_owned();
    let a12 = t.view((j, j + n1), (n1, n2)).into_owned();
    let a22 = t.view((j + n1, j + n1), (n2, n2)).into_owned();

    // (I ⊗ A11 - A22ᵀ ⊗ I) vec(X) = vec(A12), column-major vec.
    let size = n1 * n2;
    let mut kron = DMatrix::zeros(size, size);
    for col in 0..n2 {
        for row in 0..n1 {
            let r = col * n1 + row;
            for k in 0..n1 {
                kron[(r, col * n1 + k)] += a11[(row, k)];
            }
            for k in 0..n2 {
                kron[(r, k * n1 + row)] -= a22[(k, col)];
            }
        }
    }
    let rhs = DMatrix::from_column_slice(size, 1, a12.as_slice());
    let lu = kron.full_piv_lu();
    let x = lu
        .solve(&rhs)
        .filter(|x| x.iter().all(|v| v.is_finite()))
        .ok_or(Error::SwapRejected {
            position: j,
            residual: f64::INFINITY,
        })?;
    let x = DMatrix::from_column_slice(n1, n2, x.as_slice());

    // [-X, I; I, 0]: its leading n2 columns span the invariant subspace of A22.
    let mut basis = DMatrix::zeros(s, s);
    basis.view_mut((0, 0), (n1, n2)).copy_from(&(-&x));
    basis.view_mut((n1, 0), (n2, n2)).fill_with_identity();
    basis.view_mut((0, n2), (n1, n1)).fill_with_identity();
    let g = basis.qr().q();

    let mut t_new = t.clone();
    let mut q_new = q.clone();
    apply_local(&mut t_new, &mut q_new, j, &g);
    let residual = t_new.view((j + n2, j), (n1, n2)).norm();
    let threshold = 100.0 * f64::EPSILON * local_norm.max(f64::MIN_POSITIVE);
    if !(residual <= threshold) {
        return Err(Error::SwapRejected {
            position: j,
            residual,
        });
    }
    t_new.view_mut((j + n2, j), (n1, n2)).fill(0.0);
    if n2 == 2 {
        split_real_pair(&mut t_new, &mut q_new, j);
    }
    if n1 == 2 {
        split_real_pair(&mut t_new, &mut q_new, j + n2);
    }
    *t = t_new;
    *q = q_new;
    Ok(())
}

/// Moves every selected block ahead of every unselected one.
fn reorder(t: &mut DMatrix<f64>, q: &mut DMatrix<f64>, ordering: SpectrumOrdering) -> Result<()> {
    loop {
        let blocks = diagonal_blocks(t);
        let Some(first_unselected) = blocks.iter().position(|b| !ordering.selects(b.modulus()))
        else {
            return Ok(());
        };
        let Some(offset) = blocks[first_unselected..]
            .iter()
            .position(|b| ordering.selects(b.modulus()))
        else {
            return Ok(());
        };
        let target = blocks[first_unselected].start;
        let mut idx = first_unselected + offset;
        let mut current = blocks[idx];
        let mut blocks = blocks;
        while current.start > target {
            let prev = blocks[idx - 1];
            swap_adjacent(t, q, prev.start, prev.size, current.size)?;
            current.start = prev.start;
            blocks = diagonal_blocks(t);
            idx = blocks.iter().position(|b| b.start == current.start).ok_or(
                Error::SwapRejected {
                    position: current.start,
                    residual: f64::NAN,
                },
            )?;
            current = blocks[idx];
        }
    }
}

/// Ordered real Schur decomposition of an even-dimensional matrix whose
/// spectrum splits evenly across the unit circle.
///
/// Fails with [`Error::UnitCircleEigenvalue`] when some eigenvalue has
/// `|log|λ|| <= unit_circle_tol`, and with [`Error::UnbalancedSpectrum`] when
/// the predicate does not select exactly half of the spectrum.
pub fn ordered_real_schur(
    m: &DMatrix<f64>,
    ordering: SpectrumOrdering,
    unit_circle_tol: f64,
) -> Result<OrderedSchur> {
    let (rows, cols) = m.shape();
    if rows != cols || rows % 2 != 0 || rows == 0 {
        return Err(Error::OddDimension { rows, cols });
    }
    let half = rows / 2;
    let (mut q, mut t) = real_schur(m)?;

    let blocks = diagonal_blocks(&t);
    for b in &blocks {
        let margin = b.modulus().ln().abs();
        if !(margin > unit_circle_tol) {
            return Err(Error::UnitCircleEigenvalue {
                re: b.eigenvalue.re,
                im: b.eigenvalue.im,
                margin,
                tol: unit_circle_tol,
            });
        }
    }
    let selected: usize = blocks
        .iter()
        .filter(|b| ordering.selects(b.modulus()))
        .map(|b| b.size)
        .sum();
    if selected != half {
        return Err(Error::UnbalancedSpectrum {
            selected,
            expected: half,
        });
    }

    reorder(&mut t, &mut q, ordering)?;

    let blocks = diagonal_blocks(&t);
    let leading_ok = blocks
        .iter()
        .all(|b| (b.start < half) == ordering.selects(b.modulus()));
    if !leading_ok
        || blocks
            .iter()
            .any(|b| b.start < half && b.start + b.size > half)
    {
        return Err(Error::UnbalancedSpectrum {
            selected: blocks
                .iter()
                .filter(|b| b.start < half && ordering.selects(b.modulus()))
                .map(|b| b.size)
                .sum(),
            expected: half,
        });
    }

    Ok(OrderedSchur {
        w: q,
        s: t,
        ordering,
        half,
    })
}
