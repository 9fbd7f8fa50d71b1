//! Hamiltonian structure and dissipation channels.
//!
//! Rate-matrix index convention: `gamma[(n, k)]` is the rate of the
//! transition |k⟩ → |n⟩, so it multiplies ρ_kk in the gain term of ρ_nn.
//! For two levels (0-based indices) `gamma[(0, 1)]` is the decay |2⟩ → |1⟩
//! and `gamma[(1, 0)]` the excitation |1⟩ → |2⟩.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{dagger, hermiticity_defect, CMatrix, Error, Result, C64};

const HERMITIAN_TOL: f64 = 1e-12;
const RATE_TOL: f64 = 1e-12;

/// A labelled control Hamiltonian H_m.
#[derive(Debug, Clone, PartialEq)]
pub struct Control {
    pub label: String,
    pub hamiltonian: CMatrix,
}

/// Internal Hamiltonian plus M control Hamiltonians: H(f) = H₀ + Σ f_m H_m.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSystem {
    drift: CMatrix,
    controls: Vec<Control>,
}

impl ControlSystem {
    pub fn new(drift: CMatrix, controls: Vec<Control>) -> Result<Self> {
        if drift.nrows() != drift.ncols() {
            return Err(Error::NotSquare { rows: drift.nrows(), cols: drift.ncols() });
        }
        let defect = hermiticity_defect(&drift);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian { what: "internal Hamiltonian", defect });
        }
        for c in &controls {
            if c.hamiltonian.shape() != drift.shape() {
                return Err(Error::Dimension { expected: drift.nrows(), got: c.hamiltonian.nrows() });
            }
            let defect = hermiticity_defect(&c.hamiltonian);
            if defect > HERMITIAN_TOL {
                return Err(Error::NotHermitian { what: "control Hamiltonian", defect });
            }
        }
        Ok(Self { drift, controls })
    }

    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    pub fn drift(&self) -> &CMatrix {
        &self.drift
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn num_controls(&self) -> usize {
        self.controls.len()
    }

    pub fn total_hamiltonian(&self, fields: &[f64]) -> Result<CMatrix> {
        if fields.len() != self.controls.len() {
            return Err(Error::Dimension { expected: self.controls.len(), got: fields.len() });
        }
        let mut h = self.drift.clone();
        for (f, c) in fields.iter().zip(&self.controls) {
            h += c.hamiltonian.map(|z| z * *f);
        }
        Ok(h)
    }
}

/// Population relaxation and dephasing rates.
#[derive(Debug, Clone, PartialEq)]
pub struct RateModel {
    gamma: DMatrix<f64>,
    dephasing: DMatrix<f64>,
}

impl RateModel {
    /// `gamma[(n, k)]`: rate |k⟩ → |n⟩. `dephasing[(k, n)]`: Γ_kn, symmetric.
    ///
    /// Structural invariants are checked here; complete positivity is a
    /// separate check ([`RateModel::check_complete_positivity`]).
    pub fn new(gamma: DMatrix<f64>, dephasing: DMatrix<f64>) -> Result<Self> {
        let n = gamma.nrows();
        if gamma.ncols() != n || dephasing.shape() != (n, n) {
            return Err(Error::InvalidRates("gamma and dephasing must both be N×N".into()));
        }
        for k in 0..n {
            if gamma[(k, k)] != 0.0 || dephasing[(k, k)] != 0.0 {
                return Err(Error::InvalidRates(format!("nonzero diagonal at level {}", k + 1)));
            }
            for j in 0..n {
                let (g, d) = (gamma[(k, j)], dephasing[(k, j)]);
                if !(g.is_finite() && d.is_finite()) || g < 0.0 || d < 0.0 {
                    return Err(Error::InvalidRates(format!(
                        "rates must be finite and nonnegative (entry {},{})",
                        k + 1,
                        j + 1
                    )));
                }
                if (d - dephasing[(j, k)]).abs() > RATE_TOL {
                    return Err(Error::InvalidRates("dephasing matrix must be symmetric".into()));
                }
            }
        }
        Ok(Self { gamma, dephasing })
    }

    pub fn zero(dim: usize) -> Self {
        Self { gamma: DMatrix::zeros(dim, dim), dephasing: DMatrix::zeros(dim, dim) }
    }

    /// Two-level model: `decay_2_to_1` is γ₁₂ (|2⟩→|1⟩), `excite_1_to_2` is γ₂₁.
    pub fn two_level(decay_2_to_1: f64, excite_1_to_2: f64, dephasing: f64) -> Result<Self> {
        Self::new(
            DMatrix::from_row_slice(2, 2, &[0.0, decay_2_to_1, excite_1_to_2, 0.0]),
            DMatrix::from_row_slice(2, 2, &[0.0, dephasing, dephasing, 0.0]),
        )
    }

    /// Decay rates with exactly the dephasing they induce (Γ̃ = 0 everywhere).
    pub fn with_induced_dephasing(gamma: DMatrix<f64>) -> Result<Self> {
        let n = gamma.nrows();
        let out: Vec<f64> = (0..n).map(|k| gamma.column(k).sum()).collect();
        let dephasing =
            DMatrix::from_fn(n, n, |k, j| if k == j { 0.0 } else { 0.5 * (out[k] + out[j]) });
        Self::new(gamma, dephasing)
    }

    pub fn dim(&self) -> usize {
        self.gamma.nrows()
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn dephasing(&self) -> &DMatrix<f64> {
        &self.dephasing
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().chain(self.dephasing.iter()).all(|&x| x == 0.0)
    }

    /// Σ_j γ_jk: total rate out of level k.
    pub fn total_decay_out(&self, k: usize) -> f64 {
        self.gamma.column(k).sum()
    }

    /// Γ̃_kn = Γ_kn − ½(out_k + out_n).
    pub fn residual_dephasing(&self, k: usize, n: usize) -> f64 {
        self.dephasing[(k, n)] - 0.5 * (self.total_decay_out(k) + self.total_decay_out(n))
    }

    /// Pairwise floor Γ_kn ≥ ½(Σ_j γ_jk + Σ_j γ_jn).
    pub fn check_complete_positivity(&self) -> Result<()> {
        let n = self.dim();
        for k in 0..n {
            for j in (k + 1)..n {
                if self.residual_dephasing(k, j) < -RATE_TOL {
                    return Err(Error::CompletePositivity {
                        k: k + 1,
                        n: j + 1,
                        dephasing: self.dephasing[(k, j)],
                        floor: 0.5 * (self.total_decay_out(k) + self.total_decay_out(j)),
                    });
                }
            }
        }
        Ok(())
    }

    /// D(ρ): diagonal gain/loss and pure coherence damping.
    pub fn dissipator(&self, rho: &CMatrix) -> Result<CMatrix> {
        let n = self.dim();
        if rho.shape() != (n, n) {
            return Err(Error::Dimension { expected: n, got: rho.nrows() });
        }
        let mut d = CMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in (0..n).filter(|&k| k != a) {
                        acc += rho[(k, k)] * self.gamma[(a, k)] - rho[(a, a)] * self.gamma[(k, a)];
                    }
                    d[(a, a)] = acc;
                } else {
                    d[(a, b)] = -rho[(a, b)] * self.dephasing[(a, b)];
                }
            }
        }
        Ok(d)
    }

    /// Equivalent Lindblad operators.
    ///
    /// Two levels give exactly three operators: √γ₂₁|2⟩⟨1|, √γ₁₂|1⟩⟨2| and
    /// diag(√(2Γ̃), 0), zeros included. Larger systems get one operator per
    /// nonzero decay channel plus diagonal operators realizing the residual
    /// dephasing Γ̃, obtained from the Gram matrix of the squared-distance
    /// matrix 2Γ̃ (fails if that matrix is not Euclidean).
    pub fn to_lindblad(&self) -> Result<LindbladChannels> {
        self.check_complete_positivity()?;
        let n = self.dim();
        let one = |v: f64, r: usize, c: usize| {
            let mut m = CMatrix::zeros(n, n);
            m[(r, c)] = C64::new(v, 0.0);
            m
        };
        if n == 2 {
            let residual = self.residual_dephasing(0, 1).max(0.0);
            return Ok(LindbladChannels::new(vec![
                one(self.gamma[(1, 0)].sqrt(), 1, 0),
                one(self.gamma[(0, 1)].sqrt(), 0, 1),
                one((2.0 * residual).sqrt(), 0, 0),
            ]));
        }

        let mut ops = Vec::new();
        for k in 0..n {
            for j in 0..n {
                if self.gamma[(j, k)] > 0.0 {
                    ops.push(one(self.gamma[(j, k)].sqrt(), j, k));
                }
            }
        }

        let sq_dist =
            DMatrix::from_fn(n, n, |a, b| if a == b { 0.0 } else { 2.0 * self.residual_dephasing(a, b).max(0.0) });
        if sq_dist.iter().any(|&x| x > 0.0) {
            let centering = DMatrix::<f64>::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
            let gram = (&centering * &sq_dist * &centering) * -0.5;
            let eig = SymmetricEigen::new(gram);
            let scale = sq_dist.camax();
            for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
                if lambda < -1e-10 * scale {
                    return Err(Error::DephasingNotRealizable(lambda));
                }
                if lambda > 1e-14 * scale {
                    let col = eig.eigenvectors.column(k);
                    let diag = col.map(|x| C64::new(x * lambda.sqrt(), 0.0));
                    ops.push(CMatrix::from_diagonal(&diag));
                }
            }
        }
        Ok(LindbladChannels::new(ops))
    }
}

/// Explicit Lindblad operators V_s.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LindbladChannels {
    pub ops: Vec<CMatrix>,
}

impl LindbladChannels {
    pub fn new(ops: Vec<CMatrix>) -> Self {
        Self { ops }
    }

    /// ½ Σ_s ([V_s ρ, V_s†] + [V_s, ρ V_s†]).
    pub fn dissipator(&self, rho: &CMatrix) -> Result<CMatrix> {
        let n = rho.nrows();
        let mut d = CMatrix::zeros(n, rho.ncols());
        for v in &self.ops {
            if v.shape() != rho.shape() {
                return Err(Error::Dimension { expected: v.nrows(), got: n });
            }
            let vd = dagger(v);
            let v_rho = v * rho;
            let rho_vd = rho * &vd;
            let a = &v_rho * &vd - &vd * &v_rho;
            let b = v * &rho_vd - &rho_vd * v;
            d += (a + b).map(|z| z * 0.5);
        }
        Ok(d)
    }
}

/// Driven two-level system with levels E₁ < E₂ and transition dipoles d₁, d₂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelSystem {
    pub e1: f64,
    pub e2: f64,
    pub d1: f64,
    pub d2: f64,
}

impl TwoLevelSystem {
    pub fn new(e1: f64, e2: f64, d1: f64, d2: f64) -> Result<Self> {
        if e1.partial_cmp(&e2) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidSystem(format!("need E1 < E2, got E1 = {e1}, E2 = {e2}")));
        }
        Ok(Self { e1, e2, d1, d2 })
    }

    /// Transition frequency ω = E₂ − E₁.
    pub fn omega(&self) -> f64 {
        self.e2 - self.e1
    }

    /// H₀ = diag(E₁, E₂), H₁ = d₁σx, H₂ = d₂σy.
    pub fn control_system(&self) -> ControlSystem {
        self.with_drift(diag2(self.e1, self.e2))
    }

    /// Same controls in the frame rotating at `carrier`: H₀ = diag(0, ω − ω_c).
    /// Used with static RWA envelopes.
    pub fn rotating_frame(&self, carrier: f64) -> ControlSystem {
        self.with_drift(diag2(0.0, self.omega() - carrier))
    }

    fn with_drift(&self, drift: CMatrix) -> ControlSystem {
        let z = C64::new(0.0, 0.0);
        let sx = CMatrix::from_row_slice(2, 2, &[z, C64::new(self.d1, 0.0), C64::new(self.d1, 0.0), z]);
        let sy = CMatrix::from_row_slice(2, 2, &[z, C64::new(0.0, -self.d2), C64::new(0.0, self.d2), z]);
        ControlSystem::new(
            drift,
            vec![
                Control { label: "x".into(), hamiltonian: sx },
                Control { label: "y".into(), hamiltonian: sy },
            ],
        )
        .expect("two-level matrices are Hermitian by construction")
    }
}

fn diag2(a: f64, b: f64) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[C64::new(a, 0.0), z, z, C64::new(b, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::testutil::random_state;
    use crate::states::DensityMatrix;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()).map(|z| z * 0.5)
    }

    fn random_valid_two_level<R: Rng>(rng: &mut R) -> RateModel {
        let g12 = rng.gen_range(0.0..2.0);
        let g21 = rng.gen_range(0.0..2.0);
        let extra = rng.gen_range(0.0..2.0);
        RateModel::two_level(g12, g21, 0.5 * (g12 + g21) + extra).unwrap()
    }

    #[test]
    fn total_hamiltonian_examples() {
        let sys = TwoLevelSystem::new(0.0, 1.0, 1.0, 1.0).unwrap().control_system();
        assert_eq!(sys.total_hamiltonian(&[0.0, 0.0]).unwrap(), *sys.drift());
        let h = sys.total_hamiltonian(&[1.0, 0.0]).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(h, want);
        assert!(matches!(sys.total_hamiltonian(&[1.0]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn rejects_non_hermitian_pieces() {
        let bad = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(ControlSystem::new(bad.clone(), vec![]).is_err());
        assert!(ControlSystem::new(
            CMatrix::zeros(2, 2),
            vec![Control { label: "bad".into(), hamiltonian: bad }]
        )
        .is_err());
    }

    #[test]
    fn standard_two_level_examples() {
        let sys = TwoLevelSystem::new(0.0, 1.0, 1.0, 1.0).unwrap().control_system();
        let z = c(0.0, 0.0);
        assert_eq!(*sys.drift(), CMatrix::from_row_slice(2, 2, &[z, z, z, c(1.0, 0.0)]));
        assert_eq!(
            sys.controls()[0].hamiltonian,
            CMatrix::from_row_slice(2, 2, &[z, c(1.0, 0.0), c(1.0, 0.0), z])
        );
        assert_eq!(
            sys.controls()[1].hamiltonian,
            CMatrix::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z])
        );

        let no_x = TwoLevelSystem::new(0.0, 1.0, 0.0, 1.0).unwrap().control_system();
        assert_eq!(no_x.controls()[0].hamiltonian, CMatrix::zeros(2, 2));

        assert!(TwoLevelSystem::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(TwoLevelSystem::new(2.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn rate_model_rejects_bad_matrices() {
        assert!(RateModel::two_level(-1.0, 0.0, 1.0).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(RateModel::new(DMatrix::zeros(2, 2), asym).is_err());
        let diag = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(RateModel::new(diag, DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn pure_decay_of_upper_level() {
        let g = 0.7;
        let model = RateModel::two_level(g, 0.0, g / 2.0).unwrap();
        let rho = DensityMatrix::basis(2, 1).unwrap();
        let d = model.dissipator(rho.matrix()).unwrap();
        assert_relative_eq!(d[(0, 0)].re, g);
        assert_relative_eq!(d[(1, 1)].re, -g);
        assert_eq!(d[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn two_level_generic_dissipator() {
        // −γ₂₁ρ₁₁+γ₁₂ρ₂₂, −Γρ₁₂ / −Γρ₂₁, γ₂₁ρ₁₁−γ₁₂ρ₂₂
        let (g12, g21, gam) = (0.3, 0.2, 0.9);
        let model = RateModel::two_level(g12, g21, gam).unwrap();
        let rho = CMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.4, 0.0)]);
        let d = model.dissipator(&rho).unwrap();
        assert_relative_eq!(d[(0, 0)].re, -g21 * 0.6 + g12 * 0.4, epsilon = 1e-15);
        assert_relative_eq!(d[(1, 1)].re, g21 * 0.6 - g12 * 0.4, epsilon = 1e-15);
        assert!((d[(0, 1)] - rho[(0, 1)] * -gam).norm() < 1e-15);
        assert!((d[(1, 0)] - rho[(1, 0)] * -gam).norm() < 1e-15);
        assert!(model.dissipator(&CMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn lindblad_examples() {
        let rho = DensityMatrix::basis(2, 1).unwrap();
        assert_eq!(LindbladChannels::default().dissipator(rho.matrix()).unwrap(), CMatrix::zeros(2, 2));

        // V = √γ|1⟩⟨2|: VρV† = γρ₂₂|1⟩⟨1|, V†V = γ|2⟩⟨2| → diag(γ, −γ).
        let g: f64 = 0.4;
        let mut v = CMatrix::zeros(2, 2);
        v[(0, 1)] = c(g.sqrt(), 0.0);
        let d = LindbladChannels::new(vec![v]).dissipator(rho.matrix()).unwrap();
        assert_relative_eq!(d[(0, 0)].re, g, epsilon = 1e-15);
        assert_relative_eq!(d[(1, 1)].re, -g, epsilon = 1e-15);
    }

    #[test]
    fn to_lindblad_examples() {
        let g: f64 = 0.8;
        let ch = RateModel::two_level(0.0, g, g / 2.0).unwrap().to_lindblad().unwrap();
        assert_eq!(ch.ops.len(), 3);
        assert_relative_eq!(ch.ops[0][(1, 0)].re, g.sqrt());
        assert_eq!(ch.ops[0].iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert_eq!(ch.ops[1], CMatrix::zeros(2, 2));
        assert_eq!(ch.ops[2], CMatrix::zeros(2, 2));

        let gam: f64 = 0.3;
        let ch = RateModel::two_level(0.0, 0.0, gam).unwrap().to_lindblad().unwrap();
        assert_eq!(ch.ops[0], CMatrix::zeros(2, 2));
        assert_eq!(ch.ops[1], CMatrix::zeros(2, 2));
        assert_relative_eq!(ch.ops[2][(0, 0)].re, (2.0 * gam).sqrt());
        assert_eq!(ch.ops[2][(1, 1)], c(0.0, 0.0));

        assert!(matches!(
            RateModel::two_level(1.0, 1.0, 0.5).unwrap().to_lindblad(),
            Err(Error::CompletePositivity { .. })
        ));
    }

    #[test]
    fn pure_dephasing_keeps_populations() {
        let model = RateModel::two_level(0.0, 0.0, 0.5).unwrap();
        let rho = random_state(&mut ChaCha8Rng::seed_from_u64(3), 2);
        let d = model.dissipator(rho.matrix()).unwrap();
        assert_eq!(d[(0, 0)], c(0.0, 0.0));
        assert_eq!(d[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn n_level_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..6 {
            let gamma = DMatrix::from_fn(n, n, |a, b| if a == b { 0.0 } else { rng.gen_range(0.0..1.0) });
            let base = RateModel::with_induced_dephasing(gamma.clone()).unwrap();
            // Add uniform extra dephasing on every pair plus a per-level part
            // (both Euclidean by construction).
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..0.5)).collect();
            let extra = DMatrix::from_fn(n, n, |a, b| {
                if a == b {
                    0.0
                } else {
                    0.2 + 0.5 * (w[a] - w[b]).powi(2)
                }
            });
            let model = RateModel::new(gamma, base.dephasing() + extra).unwrap();
            let ch = model.to_lindblad().unwrap();
            for _ in 0..5 {
                let rho = random_state(&mut rng, n);
                let a = model.dissipator(rho.matrix()).unwrap();
                let b = ch.dissipator(rho.matrix()).unwrap();
                assert!((a - b).camax() < 1e-12);
            }
        }
    }

    #[test]
    fn n_level_cp_violation() {
        let gamma = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let model = RateModel::new(gamma, DMatrix::zeros(3, 3)).unwrap();
        assert!(matches!(model.to_lindblad(), Err(Error::CompletePositivity { .. })));
    }

    #[test]
    fn non_euclidean_dephasing_is_rejected() {
        // One pair strongly dephased, the others not at all: violates the
        // triangle-type condition on √(2Γ̃).
        let deph = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let model = RateModel::new(DMatrix::zeros(3, 3), deph).unwrap();
        assert!(matches!(model.to_lindblad(), Err(Error::DephasingNotRealizable(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn hamiltonian_stays_hermitian(seed in any::<u64>(), n in 1usize..6, m in 0usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let controls = (0..m)
                .map(|k| Control { label: format!("c{k}"), hamiltonian: random_hermitian(&mut rng, n) })
                .collect();
            let sys = ControlSystem::new(random_hermitian(&mut rng, n), controls).unwrap();
            let f: Vec<f64> = (0..m).map(|_| rng.gen_range(-5.0..5.0)).collect();
            prop_assert!(hermiticity_defect(&sys.total_hamiltonian(&f).unwrap()) < 1e-12);
        }

        #[test]
        fn two_level_controls_hermitian(e1 in -5.0..0.0f64, gap in 0.01..5.0f64, d1 in -3.0..3.0f64, d2 in -3.0..3.0f64) {
            let sys = TwoLevelSystem::new(e1, e1 + gap, d1, d2).unwrap().control_system();
            for c in sys.controls() {
                prop_assert_eq!(hermiticity_defect(&c.hamiltonian), 0.0);
            }
        }

        #[test]
        fn rate_and_lindblad_forms_agree(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let model = random_valid_two_level(&mut rng);
            let rho = random_state(&mut rng, 2);
            let a = model.dissipator(rho.matrix()).unwrap();
            let b = model.to_lindblad().unwrap().dissipator(rho.matrix()).unwrap();
            prop_assert!((&a - &b).camax() < 1e-12);
            prop_assert!(a.trace().norm() < 1e-14);
            prop_assert!(hermiticity_defect(&a) < 1e-14);
            prop_assert!(hermiticity_defect(&b) < 1e-14);
        }
    }
}
