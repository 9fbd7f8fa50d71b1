//! Density matrices, their validation, spectra, and purity measures.

use nalgebra::SymmetricEigen;

use crate::{hermiticity_defect, CMatrix, CVector, Error, Result, C64};

/// Default absolute tolerance for trace, Hermiticity and eigenvalue checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// An N×N complex matrix meant to be a quantum state.
///
/// Construction only enforces squareness so that invalid candidates can still
/// be inspected with [`DensityMatrix::validate`]. Use [`DensityMatrix::new`]
/// to get a checked state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Eigen-decomposition of a state, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct StateSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVector>,
}

impl DensityMatrix {
    /// Checked constructor: the matrix must pass validation at [`DEFAULT_TOL`].
    pub fn new(m: CMatrix) -> Result<Self> {
        let rho = Self::from_matrix(m)?;
        let report = rho.validate(DEFAULT_TOL);
        if !report.passed {
            if report.hermiticity_defect > DEFAULT_TOL {
                return Err(Error::NotHermitian {
                    what: "density matrix",
                    defect: report.hermiticity_defect,
                });
            }
            return Err(Error::InvalidSystem(format!(
                "not a density matrix: trace defect {:.3e}, min eigenvalue {:.3e}",
                report.trace_defect, report.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    /// Unchecked beyond shape.
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        Ok(Self { m })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let v: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(CMatrix::from_diagonal(&CVector::from_vec(v)))
    }

    /// Projector onto basis state `level` (0-based).
    pub fn basis(dim: usize, level: usize) -> Result<Self> {
        if level >= dim {
            return Err(Error::Dimension { expected: dim, got: level + 1 });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(level, level)] = C64::new(1.0, 0.0);
        Ok(Self { m })
    }

    /// Maximally mixed state I/N.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { m: CMatrix::identity(dim, dim).map(|x| x / dim as f64) }
    }

    /// |ψ⟩⟨ψ| for a normalized state vector.
    pub fn from_statevector(c: &[C64]) -> Result<Self> {
        let norm_sqr: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if c.is_empty() || (norm_sqr - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let v = CVector::from_column_slice(c);
        Ok(Self { m: &v * v.adjoint() })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn population(&self, level: usize) -> f64 {
        self.m[(level, level)].re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.population(k)).collect()
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn validate(&self, tol: f64) -> ValidationReport {
        let hermiticity_defect = hermiticity_defect(&self.m);
        let trace_defect = (self.trace() - C64::new(1.0, 0.0)).norm();
        // Eigenvalues of the Hermitian part; the anti-Hermitian part is
        // already accounted for by the Hermiticity defect.
        let herm = (&self.m + self.m.adjoint()).map(|x| x * 0.5);
        let min_eigenvalue = SymmetricEigen::new(herm)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let passed =
            hermiticity_defect <= tol && trace_defect <= tol && min_eigenvalue >= -tol;
        ValidationReport { hermiticity_defect, trace_defect, min_eigenvalue, tol, passed }
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        // Tr(ρρ) = Σ_ij ρ_ij ρ_ji
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.m[(i, j)] * self.m[(j, i)];
            }
        }
        acc.re
    }

    /// 1 − Tr ρ²; zero for pure states.
    pub fn purity_deficit(&self) -> f64 {
        1.0 - self.purity()
    }

    /// Order-2 Rényi entropy −ln Tr ρ².
    pub fn renyi_entropy(&self) -> f64 {
        -(1.0 - self.purity_deficit()).ln()
    }

    pub fn spectrum(&self) -> Result<StateSpectrum> {
        let defect = hermiticity_defect(&self.m);
        if defect > DEFAULT_TOL {
            return Err(Error::NotHermitian { what: "density matrix", defect });
        }
        let eig = SymmetricEigen::new(self.m.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors = order
            .iter()
            .map(|&k| fix_phase(eig.eigenvectors.column(k).into_owned()))
            .collect();
        Ok(StateSpectrum { eigenvalues, eigenvectors })
    }

    /// Frobenius distance ‖self − other‖.
    pub fn distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok((&self.m - &other.m).norm())
    }
}

/// Rotate the global phase so the largest-magnitude component is real positive.
fn fix_phase(mut v: CVector) -> CVector {
    let mut best = 0;
    for (k, z) in v.iter().enumerate() {
        // Strict comparison with a small margin keeps ties on the first index.
        if z.norm() > v[best].norm() + 1e-12 {
            best = k;
        }
    }
    let pivot = v[best];
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
    v
}

impl StateSpectrum {
    /// Σ w_n |v_n⟩⟨v_n|.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvectors.first().map_or(0, |v| v.len());
        let mut m = CMatrix::zeros(n, n);
        for (w, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m += (v * v.adjoint()).map(|z| z * *w);
        }
        m
    }

    /// Eigenvalues clipped to [0, 1] for reporting only.
    pub fn clipped_weights(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|w| w.clamp(0.0, 1.0)).collect()
    }
}
