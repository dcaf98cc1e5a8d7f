use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::PeriodicDiscreteModel;
use crate::riccati::{validate_input_weight, validate_state_weight};

/// The periodic pencil `E_k z_{k+1} = F z_k` of a plant with constant `Ak`
/// and `Q`.
///
/// ```text
/// E_k = [I, B_k R⁻¹ B_kᵀ; 0, Akᵀ]      F = [Ak, 0; -Q, I]
/// ```
///
/// Every 2n×2n inversion performed through the pencil is counted. The
/// backward product `Γ_k` needs only `F⁻¹`, obtained once in closed form; the
/// forward product `Π_k` needs all `p` inverses `E_k⁻¹`.
#[derive(Debug)]
pub struct SymplecticPencil {
    model: PeriodicDiscreteModel,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    ek: Vec<DMatrix<f64>>,
    f: DMatrix<f64>,
    f_inv: OnceLock<DMatrix<f64>>,
    backward_factors: OnceLock<Vec<DMatrix<f64>>>,
    ek_inv: OnceLock<std::result::Result<Vec<DMatrix<f64>>, usize>>,
    inversions: AtomicUsize,
}

/// Norms recorded while forming a period product, for conditioning checks.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductDiagnostics {
    /// Frobenius norm of each factor, in multiplication order.
    pub factor_norms: Vec<f64>,
    /// Frobenius norm of the running product after each factor.
    pub partial_norms: Vec<f64>,
}

/// Builds `E_k` for every `k` in the period and the constant `F`.
pub fn build_pencil(
    pm: &PeriodicDiscreteModel,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
) -> Result<SymplecticPencil> {
    let n = pm.state_dim();
    let m = pm.input_dim();
    if q.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "Q is {}x{}, expected {n}x{n}",
            q.nrows(),
            q.ncols()
        )));
    }
    if r.shape() != (m, m) {
        return Err(Error::DimensionMismatch(format!(
            "R is {}x{}, expected {m}x{m}",
            r.nrows(),
            r.ncols()
        )));
    }
    validate_state_weight(q)?;
    validate_input_weight(r)?;

    let ak = pm.ak();
    let identity = DMatrix::identity(n, n);
    let zero = DMatrix::zeros(n, n);
    let ek = pm
        .bk_list()
        .iter()
        .map(|b| {
            let g = b * linalg::solve_spd(r, &b.transpose()).ok_or(Error::IndefiniteR)?;
            Ok(linalg::block2x2(&identity, &g, &zero, &ak.transpose()))
        })
        .collect::<Result<Vec<_>>>()?;
    let f = linalg::block2x2(ak, &zero, &(-q), &identity);

    Ok(SymplecticPencil {
        model: pm.clone(),
        q: q.clone(),
        r: r.clone(),
        ek,
        f,
        f_inv: OnceLock::new(),
        backward_factors: OnceLock::new(),
        ek_inv: OnceLock::new(),
        inversions: AtomicUsize::new(0),
    })
}

impl SymplecticPencil {
    pub fn model(&self) -> &PeriodicDiscreteModel {
        &self.model
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn period(&self) -> usize {
        self.ek.len()
    }

    pub fn half_dim(&self) -> usize {
        self.model.state_dim()
    }

    pub fn ek(&self, k: usize) -> &DMatrix<f64> {
        &self.ek[k % self.ek.len()]
    }

    pub fn ek_list(&self) -> &[DMatrix<f64>] {
        &self.ek
    }

    pub fn f(&self) -> &DMatrix<f64> {
        &self.f
    }

    /// Number of 2n×2n inversions performed so far.
    pub fn inversion_count(&self) -> usize {
        self.inversions.load(Ordering::SeqCst)
    }

    /// `F⁻¹ = [Ak⁻¹, 0; Q Ak⁻¹, I]`, computed on first use.
    pub fn f_inv(&self) -> &DMatrix<f64> {
        self.f_inv.get_or_init(|| {
            self.inversions.fetch_add(1, Ordering::SeqCst);
            let n = self.half_dim();
            // The model constructor already rejected a singular Ak.
            let ak_inv = linalg::checked_inverse(self.model.ak())
                .expect("Ak invertibility is checked when the model is built");
            let q_ak_inv = &self.q * &ak_inv;
            linalg::block2x2(
                &ak_inv,
                &DMatrix::zeros(n, n),
                &q_ak_inv,
                &DMatrix::identity(n, n),
            )
        })
    }

    /// The one-step backward map `F⁻¹ E_k`.
    pub fn backward_factor(&self, k: usize) -> &DMatrix<f64> {
        let factors = self
            .backward_factors
            .get_or_init(|| self.ek.iter().map(|e| self.f_inv() * e).collect());
        &factors[k % factors.len()]
    }

    fn check_index(&self, k: usize) -> Result<()> {
        let p = self.period();
        if k >= p {
            return Err(Error::IndexOutOfRange { k, p });
        }
        Ok(())
    }

    /// `Γ_k = (F⁻¹E_k)(F⁻¹E_{k+1})···(F⁻¹E_{k+p-1})`, indices mod `p`.
    ///
    /// Maps `z_{k+p}` back to `z_k`. Uses no inversion beyond the single `F⁻¹`.
    pub fn gamma_product(&self, k: usize) -> Result<DMatrix<f64>> {
        self.gamma_product_with_diagnostics(k).map(|(g, _)| g)
    }

    pub fn gamma_product_with_diagnostics(
        &self,
        k: usize,
    ) -> Result<(DMatrix<f64>, ProductDiagnostics)> {
        self.check_index(k)?;
        let p = self.period();
        let dim = 2 * self.half_dim();
        let mut product = DMatrix::identity(dim, dim);
        let mut diag = ProductDiagnostics {
            factor_norms: Vec::with_capacity(p),
            partial_norms: Vec::with_capacity(p),
        };
        // Right to left: the last factor F⁻¹E_{k+p-1} is applied first.
        for j in (k..k + p).rev() {
            let factor = self.backward_factor(j);
            product = factor * product;
            diag.factor_norms.push(factor.norm());
            diag.partial_norms.push(product.norm());
        }
        log::debug!(
            "gamma_{k}: max factor norm {:.3e}, final norm {:.3e}",
            diag.factor_norms.iter().copied().fold(0.0, f64::max),
            diag.partial_norms.last().copied().unwrap_or(1.0)
        );
        Ok((product, diag))
    }

    fn ek_inverses(&self) -> Result<&[DMatrix<f64>]> {
        let inverses = self.ek_inv.get_or_init(|| {
            self.ek
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    self.inversions.fetch_add(1, Ordering::SeqCst);
                    linalg::checked_inverse(e).ok_or(k)
                })
                .collect()
        });
        match inverses {
            Ok(v) => Ok(v),
            Err(k) => Err(Error::SingularEk { k: *k }),
        }
    }

    /// `Π_k = E_{k+p-1}⁻¹F···E_{k+1}⁻¹F·E_k⁻¹F`, indices mod `p`.
    ///
    /// Maps `z_k` forward to `z_{k+p}`. Inverts every `E_k` once per pencil.
    pub fn pi_product(&self, k: usize) -> Result<DMatrix<f64>> {
        self.check_index(k)?;
        let inverses = self.ek_inverses()?;
        let p = self.period();
        let dim = 2 * self.half_dim();
        let mut product = DMatrix::identity(dim, dim);
        for j in k..k + p {
            product = &inverses[j % p] * (&self.f * product);
        }
        Ok(product)
    }
}
