//! Optical pumping of a degenerate two-level atom (three ground and three
//! excited sublevels) into a dark ground state.
//!
//! Levels are indexed ground-first: ground labels occupy indices 0..G,
//! excited labels G..G+E. The drive is resonant and treated in the rotating
//! frame, so the only Hamiltonian terms are the couplings (strength
//! rabi/2 × dipole) and an optional detuning on the excited manifold.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::model::{Control, ControlSystem, RateModel};
use crate::propagation::{evolve, Frame, IntegratorConfig, PulseSpec, PulseStrength, Trajectory};
use crate::liouville::Liouvillian;
use crate::states::DensityMatrix;
use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pub ground: String,
    pub excited: String,
    pub dipole: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decay {
    pub excited: String,
    pub ground: String,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelScheme {
    pub ground: Vec<String>,
    pub excited: Vec<String>,
    pub couplings: Vec<Coupling>,
    pub decays: Vec<Decay>,
}

impl LevelScheme {
    /// Ground |1⟩,|2⟩,|3⟩ and excited |4⟩,|5⟩,|6⟩ with the drive coupling
    /// 2↔5 and 3↔6. Each excited level decays with total rate
    /// `decay_rate`, split equally: 5 → {1, 2, 3}, 6 → {2, 3}, 4 → {1, 2}.
    pub fn default_scheme(decay_rate: f64) -> Self {
        let s = |x: &str| x.to_string();
        let coupling = |g: &str, e: &str| Coupling { ground: s(g), excited: s(e), dipole: 1.0 };
        let decay = |e: &str, g: &str, r: f64| Decay { excited: s(e), ground: s(g), rate: r };
        Self {
            ground: vec![s("1"), s("2"), s("3")],
            excited: vec![s("4"), s("5"), s("6")],
            couplings: vec![coupling("2", "5"), coupling("3", "6")],
            decays: vec![
                decay("4", "1", decay_rate / 2.0),
                decay("4", "2", decay_rate / 2.0),
                decay("5", "1", decay_rate / 3.0),
                decay("5", "2", decay_rate / 3.0),
                decay("5", "3", decay_rate / 3.0),
                decay("6", "2", decay_rate / 2.0),
                decay("6", "3", decay_rate / 2.0),
            ],
        }
    }

    pub fn without_decays(mut self) -> Self {
        self.decays.clear();
        self
    }

    pub fn dim(&self) -> usize {
        self.ground.len() + self.excited.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.ground.iter().chain(&self.excited)
    }

    #[allow(clippy::type_complexity)]
    fn indices(&self) -> Result<(HashMap<&str, usize>, HashMap<&str, usize>)> {
        let mut ground = HashMap::new();
        let mut excited = HashMap::new();
        for (k, l) in self.ground.iter().enumerate() {
            if ground.insert(l.as_str(), k).is_some() {
                return Err(Error::InvalidScheme(format!("duplicate level label {l}")));
            }
        }
        for (k, l) in self.excited.iter().enumerate() {
            if ground.contains_key(l.as_str()) || excited.insert(l.as_str(), self.ground.len() + k).is_some() {
                return Err(Error::InvalidScheme(format!("duplicate level label {l}")));
            }
        }
        Ok((ground, excited))
    }

    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    /// (ground, excited, dipole) and (excited, ground, rate) as indices.
    #[allow(clippy::type_complexity)]
    fn resolve(&self) -> Result<(Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>)> {
        if self.ground.is_empty() {
            return Err(Error::InvalidScheme("no ground levels".into()));
        }
        let (ground, excited) = self.indices()?;
        let find = |map: &HashMap<&str, usize>, label: &str, kind: &str| {
            map.get(label)
                .copied()
                .ok_or_else(|| Error::InvalidScheme(format!("{label} is not a declared {kind} level")))
        };
        let mut couplings = Vec::new();
        for c in &self.couplings {
            if !c.dipole.is_finite() {
                return Err(Error::InvalidScheme("coupling dipole must be finite".into()));
            }
            couplings.push((find(&ground, &c.ground, "ground")?, find(&excited, &c.excited, "excited")?, c.dipole));
        }
        let mut decays = Vec::new();
        for d in &self.decays {
            if !(d.rate.is_finite() && d.rate > 0.0) {
                return Err(Error::InvalidScheme(format!("decay {} -> {} needs a positive rate", d.excited, d.ground)));
            }
            decays.push((find(&excited, &d.excited, "excited")?, find(&ground, &d.ground, "ground")?, d.rate));
        }
        Ok((couplings, decays))
    }

    /// Uniform mixture over the ground manifold.
    pub fn uniform_ground_mixture(&self) -> DensityMatrix {
        let g = self.ground.len() as f64;
        let diag: Vec<f64> = (0..self.dim()).map(|k| if k < self.ground.len() { 1.0 / g } else { 0.0 }).collect();
        DensityMatrix::from_real_diagonal(&diag).expect("valid by construction")
    }
}

/// Six-level model ready for propagation.
#[derive(Debug, Clone)]
pub struct PumpingSystem {
    pub system: ControlSystem,
    pub rates: RateModel,
    /// Static rotating-frame field on the single drive control (rabi / 2).
    pub drive_field: f64,
    pub rabi: f64,
}

impl PumpingSystem {
    pub fn liouvillian(&self) -> Result<Liouvillian> {
        Liouvillian::build(&self.system, &self.rates)
    }

    /// Constant resonant drive for `duration`, expressed as an RWA pulse.
    pub fn drive(&self, duration: f64) -> PulseSpec {
        PulseSpec::constant(0, duration, PulseStrength::Amplitude(self.rabi), Frame::Rwa)
    }
}

/// Rotating-frame Hamiltonian (H₀ = −Δ on excited levels, one drive control
/// Σ dipole (|g⟩⟨e| + |e⟩⟨g|)) and decay rates with the dephasing they induce.
pub fn build_pumping_system(scheme: &LevelScheme, rabi: f64, detuning: f64) -> Result<PumpingSystem> {
    let (couplings, decays) = scheme.resolve()?;
    if !rabi.is_finite() || !detuning.is_finite() {
        return Err(Error::InvalidScheme("rabi frequency and detuning must be finite".into()));
    }
    let n = scheme.dim();
    let mut drift = CMatrix::zeros(n, n);
    for k in scheme.ground.len()..n {
        drift[(k, k)] = C64::new(-detuning, 0.0);
    }
    let mut drive = CMatrix::zeros(n, n);
    for &(g, e, d) in &couplings {
        drive[(g, e)] += C64::new(d, 0.0);
        drive[(e, g)] += C64::new(d, 0.0);
    }
    let system = ControlSystem::new(drift, vec![Control { label: "drive".into(), hamiltonian: drive }])?;

    let mut gamma = DMatrix::zeros(n, n);
    for &(e, g, r) in &decays {
        gamma[(g, e)] += r;
    }
    let rates = RateModel::with_induced_dephasing(gamma)?;
    Ok(PumpingSystem { system, rates, drive_field: rabi / 2.0, rabi })
}

pub fn simulate_pumping(
    scheme: &LevelScheme,
    rabi: f64,
    detuning: f64,
    duration: f64,
    rho0: &DensityMatrix,
    dt_out: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let sys = build_pumping_system(scheme, rabi, detuning)?;
    let l = sys.liouvillian()?;
    evolve(&l, &vec![sys.drive(duration)], rho0, duration, dt_out, cfg)
}

/// Ground levels the drive never touches.
pub fn dark_state_check(scheme: &LevelScheme) -> Vec<String> {
    scheme
        .ground
        .iter()
        .filter(|g| !scheme.couplings.iter().any(|c| &c.ground == *g && c.dipole != 0.0))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouville::vec_of;

    #[test]
    fn default_hamiltonian_structure() {
        let sys = build_pumping_system(&LevelScheme::default_scheme(1.0), 1.0, 0.0).unwrap();
        let h = sys.system.total_hamiltonian(&[sys.drive_field]).unwrap();
        assert_eq!(h.shape(), (6, 6));
        let off: Vec<(usize, usize)> =
            (0..6).flat_map(|a| (0..6).map(move |b| (a, b))).filter(|&(a, b)| a != b && h[(a, b)].norm() > 0.0).collect();
        assert_eq!(off, vec![(1, 4), (2, 5), (4, 1), (5, 2)]);
        assert_eq!(h[(1, 4)], C64::new(0.5, 0.0));
    }

    #[test]
    fn no_decays_means_zero_rates() {
        let sys = build_pumping_system(&LevelScheme::default_scheme(1.0).without_decays(), 1.0, 0.0).unwrap();
        assert!(sys.rates.is_zero());
    }

    #[test]
    fn default_rates_branching() {
        let sys = build_pumping_system(&LevelScheme::default_scheme(0.9), 1.0, 0.0).unwrap();
        for e in 3..6 {
            assert!((sys.rates.total_decay_out(e) - 0.9).abs() < 1e-15);
        }
        assert_eq!(sys.rates.total_decay_out(0), 0.0);
        sys.rates.check_complete_positivity().unwrap();
        assert!(sys.rates.to_lindblad().is_ok());
    }

    #[test]
    fn generator_preserves_trace() {
        let sys = build_pumping_system(&LevelScheme::default_scheme(1.3), 0.7, 0.2).unwrap();
        let l = sys.liouvillian().unwrap();
        assert!(l.trace_leak(&[sys.drive_field]).unwrap() < 1e-13);
    }

    #[test]
    fn dark_projector_is_stationary() {
        let sys = build_pumping_system(&LevelScheme::default_scheme(1.0), 1.0, 0.0).unwrap();
        let g = sys.liouvillian().unwrap().generator(&[sys.drive_field]).unwrap();
        let dark = DensityMatrix::basis(6, 0).unwrap();
        assert!((g * vec_of(dark.matrix())).norm() < 1e-10);
    }

    #[test]
    fn dark_states() {
        assert_eq!(dark_state_check(&LevelScheme::default_scheme(1.0)), vec!["1".to_string()]);
        let mut all = LevelScheme::default_scheme(1.0);
        all.couplings.push(Coupling { ground: "1".into(), excited: "4".into(), dipole: 1.0 });
        assert!(dark_state_check(&all).is_empty());
        let mut none = LevelScheme::default_scheme(1.0);
        none.couplings.clear();
        assert_eq!(dark_state_check(&none).len(), 3);
    }

    #[test]
    fn invalid_schemes() {
        let mut s = LevelScheme::default_scheme(1.0);
        s.couplings.push(Coupling { ground: "9".into(), excited: "4".into(), dipole: 1.0 });
        assert!(build_pumping_system(&s, 1.0, 0.0).is_err());
        let mut s = LevelScheme::default_scheme(1.0);
        s.decays.push(Decay { excited: "1".into(), ground: "2".into(), rate: 1.0 });
        assert!(s.validate().is_err());
        let mut s = LevelScheme::default_scheme(1.0);
        s.decays[0].rate = 0.0;
        assert!(s.validate().is_err());
        let mut s = LevelScheme::default_scheme(1.0);
        s.excited[0] = "1".into();
        assert!(s.validate().is_err());
    }

    #[test]
    fn pure_dark_state_trajectory_is_constant() {
        let scheme = LevelScheme::default_scheme(1.0);
        let rho0 = DensityMatrix::basis(6, 0).unwrap();
        let traj = simulate_pumping(&scheme, 1.0, 0.0, 20.0, &rho0, 1.0, &IntegratorConfig::default()).unwrap();
        for s in &traj.states {
            assert!((s.matrix() - rho0.matrix()).camax() < 1e-12);
        }
    }

    #[test]
    fn decays_pump_into_dark_state() {
        let scheme = LevelScheme::default_scheme(1.0);
        let rho0 = scheme.uniform_ground_mixture();
        let traj = simulate_pumping(&scheme, 1.0, 0.0, 150.0, &rho0, 5.0, &IntegratorConfig::default()).unwrap();
        let last = traj.final_state().unwrap();
        assert!(last.population(0) >= 0.99);
        assert!(*traj.purity_deficit.last().unwrap() <= 0.02);
        for s in &traj.states {
            assert!((s.trace().re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn without_decays_purity_is_conserved() {
        let scheme = LevelScheme::default_scheme(1.0).without_decays();
        let rho0 = scheme.uniform_ground_mixture();
        let traj = simulate_pumping(&scheme, 1.0, 0.0, 30.0, &rho0, 0.5, &IntegratorConfig::default()).unwrap();
        let d0 = traj.purity_deficit[0];
        assert!(traj.purity_deficit.iter().all(|d| (d - d0).abs() < 1e-7));
        for s in &traj.states {
            assert!((s.population(1) + s.population(4) - 1.0 / 3.0).abs() < 1e-7);
            assert!((s.population(2) + s.population(5) - 1.0 / 3.0).abs() < 1e-7);
            assert!((s.population(0) - 1.0 / 3.0).abs() < 1e-12);
        }
        let p5 = traj.populations(4);
        assert!(p5.iter().cloned().fold(0.0, f64::max) > 0.3);
    }
}
