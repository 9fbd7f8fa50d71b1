//! Liouville-space representation: vectorized states and N²×N² superoperators.
//!
//! States are flattened row-major, |ρ⟩ = [ρ₁₁, ρ₁₂, …, ρ₁N, ρ₂₁, …, ρ_NN], and
//! the equation of motion reads
//!
//! ```text
//! d/dt |ρ⟩ = −i [L₀ + Σ_m f_m L_m + i L_D] |ρ⟩
//! ```
//!
//! with L₀|ρ⟩ = vec([H₀, ρ]), L_m|ρ⟩ = vec([H_m, ρ]) and L_D|ρ⟩ = vec(D(ρ)).

use nalgebra::{DMatrix, DVector};

use crate::model::{ControlSystem, LindbladChannels, RateModel};
use crate::states::DensityMatrix;
use crate::{dagger, CMatrix, CVector, Error, Result, C64, I};

/// Default support tolerance; the relevant entries are exact zeros.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct VectorizedState {
    dim: usize,
    v: CVector,
}

impl VectorizedState {
    pub fn from_vector(dim: usize, v: CVector) -> Result<Self> {
        if v.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, got: v.len() });
        }
        Ok(Self { dim, v })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_vector(&self) -> &CVector {
        &self.v
    }

    /// Back to an N×N matrix (not re-validated).
    pub fn devectorize(&self) -> DensityMatrix {
        DensityMatrix::from_matrix(unvec(&self.v, self.dim)).expect("square by construction")
    }
}

pub fn vectorize(rho: &DensityMatrix) -> VectorizedState {
    VectorizedState { dim: rho.dim(), v: vec_of(rho.matrix()) }
}

pub fn devectorize(state: &VectorizedState) -> DensityMatrix {
    state.devectorize()
}

/// Row-major flattening of an arbitrary square matrix.
pub fn vec_of(m: &CMatrix) -> CVector {
    let n = m.nrows();
    CVector::from_fn(n * n, |k, _| m[(k / n, k % n)])
}

pub fn unvec(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |a, b| v[a * n + b])
}

/// Superoperator of ρ ↦ [H, ρ].
pub fn commutator_superop(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    let mut l = CMatrix::zeros(n * n, n * n);
    // [H,ρ]_ab = Σ_c H_ac ρ_cb − ρ_ac H_cb
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            for c in 0..n {
                l[(row, c * n + b)] += h[(a, c)];
                l[(row, a * n + c)] -= h[(c, b)];
            }
        }
    }
    l
}

/// Dissipation superoperator with the nonzero elements
/// (L_D)_{kn,kn} = −Γ_kn, (L_D)_{nn,kk} = γ_nk, (L_D)_{nn,nn} = −Σ_k γ_kn.
pub fn rate_superop(model: &RateModel) -> CMatrix {
    let n = model.dim();
    let (gamma, deph) = (model.gamma(), model.dephasing());
    let mut l = CMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            if a == b {
                for k in (0..n).filter(|&k| k != a) {
                    l[(row, k * n + k)] += C64::new(gamma[(a, k)], 0.0);
                    l[(row, row)] -= C64::new(gamma[(k, a)], 0.0);
                }
            } else {
                l[(row, row)] = C64::new(-deph[(a, b)], 0.0);
            }
        }
    }
    l
}

/// Superoperator of the Lindblad dissipator Σ_s V ρ V† − ½{V†V, ρ}.
pub fn lindblad_superop(channels: &LindbladChannels, dim: usize) -> Result<CMatrix> {
    let n = dim;
    let mut l = CMatrix::zeros(n * n, n * n);
    for v in &channels.ops {
        if v.shape() != (n, n) {
            return Err(Error::Dimension { expected: n, got: v.nrows() });
        }
        let vd = dagger(v);
        let vdv = &vd * v;
        // vec_row(A ρ B)_(a,b) = Σ_{c,d} A_ac B_db ρ_cd
        for a in 0..n {
            for b in 0..n {
                let row = a * n + b;
                for c in 0..n {
                    for d in 0..n {
                        let mut x = v[(a, c)] * vd[(d, b)];
                        if d == b {
                            x -= vdv[(a, c)] * 0.5;
                        }
                        if c == a {
                            x -= vdv[(d, b)] * 0.5;
                        }
                        l[(row, c * n + d)] += x;
                    }
                }
            }
        }
    }
    Ok(l)
}

/// Drift, control and dissipative superoperators of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    dim: usize,
    drift: CMatrix,
    controls: Vec<CMatrix>,
    dissipative: CMatrix,
}

impl Liouvillian {
    pub fn build(sys: &ControlSystem, model: &RateModel) -> Result<Self> {
        if sys.dim() != model.dim() {
            return Err(Error::Dimension { expected: sys.dim(), got: model.dim() });
        }
        Ok(Self {
            dim: sys.dim(),
            drift: commutator_superop(sys.drift()),
            controls: sys.controls().iter().map(|c| commutator_superop(&c.hamiltonian)).collect(),
            dissipative: rate_superop(model),
        })
    }

    /// Same coherent part, dissipation given by explicit Lindblad operators.
    pub fn build_lindblad(sys: &ControlSystem, channels: &LindbladChannels) -> Result<Self> {
        Ok(Self {
            dim: sys.dim(),
            drift: commutator_superop(sys.drift()),
            controls: sys.controls().iter().map(|c| commutator_superop(&c.hamiltonian)).collect(),
            dissipative: lindblad_superop(channels, sys.dim())?,
        })
    }

    /// Assemble from raw parts; every matrix must be N²×N².
    pub fn from_parts(dim: usize, drift: CMatrix, controls: Vec<CMatrix>, dissipative: CMatrix) -> Result<Self> {
        let n2 = dim * dim;
        for m in std::iter::once(&drift).chain(&controls).chain(std::iter::once(&dissipative)) {
            if m.shape() != (n2, n2) {
                return Err(Error::Dimension { expected: n2, got: m.nrows() });
            }
        }
        Ok(Self { dim, drift, controls, dissipative })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift(&self) -> &CMatrix {
        &self.drift
    }

    pub fn controls(&self) -> &[CMatrix] {
        &self.controls
    }

    pub fn dissipative(&self) -> &CMatrix {
        &self.dissipative
    }

    pub fn num_controls(&self) -> usize {
        self.controls.len()
    }

    /// G(f) = −i(L₀ + Σ f_m L_m) + L_D.
    pub fn generator(&self, fields: &[f64]) -> Result<CMatrix> {
        if fields.len() != self.controls.len() {
            return Err(Error::Dimension { expected: self.controls.len(), got: fields.len() });
        }
        let mut coherent = self.drift.clone();
        for (f, l) in fields.iter().zip(&self.controls) {
            coherent += l.map(|z| z * *f);
        }
        Ok(coherent.map(|z| -I * z) + &self.dissipative)
    }

    /// Row vector of the trace functional times G(f); zero for a
    /// trace-preserving generator.
    pub fn trace_leak(&self, fields: &[f64]) -> Result<f64> {
        let g = self.generator(fields)?;
        let n = self.dim;
        let mut worst = 0.0f64;
        for col in 0..n * n {
            let s: C64 = (0..n).map(|k| g[(k * n + k, col)]).sum();
            worst = worst.max(s.norm());
        }
        Ok(worst)
    }

    /// Checks that controls and dissipation act on disjoint entries.
    pub fn support_disjointness(&self, tol: f64) -> SupportReport {
        let n2 = self.dim * self.dim;
        let mut overlapping = Vec::new();
        for i in 0..n2 {
            for j in 0..n2 {
                let control = self.controls.iter().any(|l| l[(i, j)].norm() > tol);
                if control && self.dissipative[(i, j)].norm() > tol {
                    overlapping.push((i, j));
                }
            }
        }
        SupportReport { disjoint: overlapping.is_empty(), overlapping }
    }

    /// min over real f of ‖Σ f_m L_m|ρ⟩ + i L_D|ρ⟩‖₂.
    ///
    /// Zero means some static field choice cancels the dissipative action on
    /// this particular state.
    pub fn cancellation_residual(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dim() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: rho.dim() });
        }
        let r = vec_of(rho.matrix());
        let target: CVector = (&self.dissipative * &r).map(|z| -I * z);
        if self.controls.is_empty() {
            return Ok(target.norm());
        }
        // Real least squares on stacked real/imaginary parts.
        let n2 = r.len();
        let m = self.controls.len();
        let columns: Vec<CVector> = self.controls.iter().map(|l| l * &r).collect();
        let a = DMatrix::from_fn(2 * n2, m, |i, k| {
            let z = columns[k][i % n2];
            if i < n2 { z.re } else { z.im }
        });
        let b = DVector::from_fn(2 * n2, |i, _| {
            let z = target[i % n2];
            if i < n2 { z.re } else { z.im }
        });
        let svd = a.clone().svd(true, true);
        let f = svd
            .solve(&b, 1e-12 * a.camax().max(1.0))
            .map_err(|e| Error::InvalidSystem(format!("least squares failed: {e}")))?;
        Ok((a * f - b).norm())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub disjoint: bool,
    /// Superoperator indices (row, col), 0-based.
    pub overlapping: Vec<(usize, usize)>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TwoLevelSystem;
    use crate::states::testutil::random_state;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn vectorize_examples() {
        let rho2 = DensityMatrix::new(CMatrix::from_element(2, 2, c(0.5))).unwrap();
        assert_eq!(vectorize(&rho2).as_vector(), &CVector::from_element(4, c(0.5)));
        let d = DensityMatrix::from_real_diagonal(&[0.3, 0.7]).unwrap();
        let v = vectorize(&d);
        assert_eq!(v.as_vector().as_slice(), &[c(0.3), c(0.0), c(0.0), c(0.7)]);
        assert_eq!(devectorize(&v), d);
        assert!(VectorizedState::from_vector(2, CVector::zeros(3)).is_err());
    }

    #[test]
    fn row_major_order() {
        let m = CMatrix::from_fn(3, 3, |a, b| c((10 * a + b) as f64));
        let v = vec_of(&m);
        assert_eq!(v[1], c(1.0));
        assert_eq!(v[3], c(10.0));
        assert_eq!(unvec(&v, 3), m);
    }

    #[test]
    fn dimension_mismatch() {
        let sys = TwoLevelSystem::new(0.0, 1.0, 1.0, 1.0).unwrap().control_system();
        assert!(Liouvillian::build(&sys, &RateModel::zero(3)).is_err());
    }

    #[test]
    fn commutator_action_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..5 {
            let h = random_matrix(&mut rng, n);
            let rho = random_matrix(&mut rng, n);
            let direct = vec_of(&(&h * &rho - &rho * &h));
            assert!((commutator_superop(&h) * vec_of(&rho) - direct).camax() < 1e-13);
        }
    }

    #[test]
    fn rate_superop_matches_dissipator() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 4;
        let gamma = nalgebra::DMatrix::from_fn(n, n, |a, b| if a == b { 0.0 } else { rng.gen_range(0.0..1.0) });
        let model = RateModel::with_induced_dephasing(gamma).unwrap();
        let rho = random_matrix(&mut rng, n);
        let direct = vec_of(&model.dissipator(&rho).unwrap());
        assert!((rate_superop(&model) * vec_of(&rho) - direct).camax() < 1e-13);
    }

    #[test]
    fn lindblad_superop_matches_dissipator() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 3;
        let ch = LindbladChannels::new(vec![random_matrix(&mut rng, n), random_matrix(&mut rng, n)]);
        let rho = random_matrix(&mut rng, n);
        let direct = vec_of(&ch.dissipator(&rho).unwrap());
        assert!((lindblad_superop(&ch, n).unwrap() * vec_of(&rho) - direct).camax() < 1e-13);
    }

    #[test]
    fn disjointness_detects_constructed_overlap() {
        let sys = TwoLevelSystem::new(0.0, 1.0, 1.0, 1.0).unwrap().control_system();
        let model = RateModel::two_level(0.2, 0.1, 0.5).unwrap();
        let l = Liouvillian::build(&sys, &model).unwrap();
        assert!(l.support_disjointness(SUPPORT_TOL).disjoint);
        let forced = Liouvillian::from_parts(
            2,
            l.drift().clone(),
            vec![l.dissipative().clone(), l.controls()[1].clone()],
            l.dissipative().clone(),
        )
        .unwrap();
        let report = forced.support_disjointness(SUPPORT_TOL);
        assert!(!report.disjoint);
        assert_eq!(report.overlapping.len(), 6);
    }

    #[test]
    fn three_level_ladder_support_scan_runs() {
        // Generic rates on a driven ladder; the scan result is informational.
        let z = c(0.0);
        let h0 = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.0), c(1.0), c(2.1)]));
        let h1 = CMatrix::from_row_slice(3, 3, &[z, c(1.0), z, c(1.0), z, c(0.7), z, c(0.7), z]);
        let sys = ControlSystem::new(h0, vec![crate::model::Control { label: "x".into(), hamiltonian: h1 }]).unwrap();
        let gamma = nalgebra::DMatrix::from_row_slice(3, 3, &[0.0, 0.3, 0.0, 0.0, 0.0, 0.2, 0.0, 0.0, 0.0]);
        let l = Liouvillian::build(&sys, &RateModel::with_induced_dephasing(gamma).unwrap()).unwrap();
        let report = l.support_disjointness(SUPPORT_TOL);
        assert_eq!(report.disjoint, report.overlapping.is_empty());
    }

    #[test]
    fn cancellation_residual_examples() {
        let sys = TwoLevelSystem::new(0.0, 1.0, 1.0, 1.0).unwrap().control_system();
        let closed = Liouvillian::build(&sys, &RateModel::zero(2)).unwrap();
        let rho2 = DensityMatrix::new(CMatrix::from_element(2, 2, c(0.5))).unwrap();
        assert_eq!(closed.cancellation_residual(&rho2).unwrap(), 0.0);

        let deph = Liouvillian::build(&sys, &RateModel::two_level(0.0, 0.0, 0.4).unwrap()).unwrap();
        let diag = DensityMatrix::from_real_diagonal(&[0.3, 0.7]).unwrap();
        assert!(deph.cancellation_residual(&diag).unwrap() < 1e-15);
        assert!(deph.cancellation_residual(&rho2).unwrap() > 0.0);
    }

    #[test]
    fn cancellation_residual_against_grid_oracle() {
        // Brute force over a fine field grid is an upper bound that should
        // approach the least-squares value.
        let sys = TwoLevelSystem::new(0.0, 1.0, 1.0, 0.6).unwrap().control_system();
        let l = Liouvillian::build(&sys, &RateModel::two_level(0.3, 0.1, 0.5).unwrap()).unwrap();
        let rho = random_state(&mut ChaCha8Rng::seed_from_u64(2), 2);
        let r = vec_of(rho.matrix());
        let target = (l.dissipative() * &r).map(|z| I * z);
        let (a, b) = (l.controls()[0].clone() * &r, l.controls()[1].clone() * &r);
        let mut best = f64::INFINITY;
        for i in -400..=400 {
            for j in -400..=400 {
                let (f1, f2) = (i as f64 * 0.005, j as f64 * 0.005);
                let res = (a.map(|z| z * f1) + b.map(|z| z * f2) + &target).norm();
                best = best.min(res);
            }
        }
        let ls = l.cancellation_residual(&rho).unwrap();
        assert!(ls <= best + 1e-12);
        assert!(best - ls < 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn vectorize_roundtrip(seed in any::<u64>(), n in 1usize..6) {
            let rho = random_state(&mut ChaCha8Rng::seed_from_u64(seed), n);
            prop_assert_eq!(devectorize(&vectorize(&rho)), rho);
        }

        #[test]
        fn generator_action_matches_brute_force(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let two = TwoLevelSystem::new(rng.gen_range(-1.0..0.0), rng.gen_range(0.1..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).unwrap();
            let sys = two.control_system();
            let l = Liouvillian::build(&sys, &RateModel::zero(2)).unwrap();
            let f = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let rho = random_state(&mut rng, 2);
            let h = sys.total_hamiltonian(&f).unwrap();
            let want = vec_of(&(&h * rho.matrix() - rho.matrix() * &h).map(|z| -I * z));
            let got = l.generator(&f).unwrap() * vec_of(rho.matrix());
            prop_assert!((got - want).camax() < 1e-13);
        }

        #[test]
        fn generator_is_trace_preserving(seed in any::<u64>(), n in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h0 = { let a = random_matrix(&mut rng, n); (&a + a.adjoint()).map(|z| z * 0.5) };
            let h1 = { let a = random_matrix(&mut rng, n); (&a + a.adjoint()).map(|z| z * 0.5) };
            let sys = ControlSystem::new(h0, vec![crate::model::Control { label: "a".into(), hamiltonian: h1 }]).unwrap();
            let gamma = nalgebra::DMatrix::from_fn(n, n, |a, b| if a == b { 0.0 } else { rng.gen_range(0.0..1.0) });
            let l = Liouvillian::build(&sys, &RateModel::with_induced_dephasing(gamma).unwrap()).unwrap();
            prop_assert!(l.trace_leak(&[rng.gen_range(-5.0..5.0)]).unwrap() < 1e-13);
        }
    }
}
