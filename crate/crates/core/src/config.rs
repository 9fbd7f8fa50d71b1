//! Run configuration: a TOML document with typed sections.
//!
//! Times (durations, output step, maximum step) are given in vibrational
//! periods 2π/ω and energies in units of ħ. Rates are angular frequencies
//! unless `rates.unit = "per_period"`, in which case they count events per
//! period and are scaled by ω/2π.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::control::{Bound, Objective, ObjectiveKind, PulseParameter};
use crate::model::{ControlSystem, RateModel, TwoLevelSystem};
use crate::propagation::{Frame, IntegratorConfig, PulseSpec, PulseStrength};
use crate::pumping::{Coupling, Decay, LevelScheme};
use crate::states::DensityMatrix;
use crate::{CMatrix, Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Simulate,
    Optimize,
    Pump,
    Check,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Simulate => "simulate",
            Scenario::Optimize => "optimize",
            Scenario::Pump => "pump",
            Scenario::Check => "check",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// If present it must agree with the subcommand.
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub system: SystemSection,
    #[serde(default)]
    pub rates: RatesSection,
    #[serde(default)]
    pub state: StateSection,
    pub pulse: Option<PulseSection>,
    #[serde(default)]
    pub integrator: IntegratorSection,
    pub optimize: Option<OptimizeSection>,
    pub pumping: Option<PumpingSection>,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub check: CheckSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameName {
    #[default]
    Rwa,
    Lab,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSection {
    pub e1: f64,
    pub e2: f64,
    pub d1: f64,
    pub d2: f64,
    pub frame: FrameName,
    /// Carrier angular frequency; defaults to resonance.
    pub carrier: Option<f64>,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self { e1: 0.0, e2: 1.0, d1: 1.0, d2: 1.0, frame: FrameName::Rwa, carrier: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnit {
    #[default]
    Omega,
    PerPeriod,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesSection {
    pub unit: RateUnit,
    /// γ₁₂, |2⟩ → |1⟩.
    pub decay: f64,
    /// γ₂₁, |1⟩ → |2⟩.
    pub excitation: f64,
    /// Γ, total coherence damping.
    pub dephasing: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StateSection {
    /// Basis level, 1-based.
    pub level: Option<usize>,
    pub populations: Option<Vec<f64>>,
    /// Row-major (re, im) pairs.
    pub rho: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    #[default]
    Gaussian,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlName {
    #[default]
    X,
    Y,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    pub shape: ShapeName,
    pub control: ControlName,
    /// Periods.
    pub duration: f64,
    /// Effective area in units of π.
    pub area_pi: Option<f64>,
    pub amplitude: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub atol: f64,
    pub rtol: f64,
    /// Periods.
    pub max_step: Option<f64>,
    pub positivity_tol: f64,
    /// Output spacing in periods.
    pub dt_out: f64,
    /// Periods; defaults to the pulse duration.
    pub horizon: Option<f64>,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self { atol: d.atol, rtol: d.rtol, max_step: None, positivity_tol: d.positivity_tol, dt_out: 1.0, horizon: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveName {
    #[default]
    MaxEntropy,
    TargetPopulation,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizeSection {
    pub objective: ObjectiveName,
    /// 1-based level for `target_population`.
    pub level: Option<usize>,
    /// Bounds on the effective area in units of π.
    pub area_pi: Option<[f64; 2]>,
    /// Bounds on the pulse duration in periods.
    pub duration: Option<[f64; 2]>,
    pub budget: usize,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        Self { objective: ObjectiveName::MaxEntropy, level: None, area_pi: Some([0.0, 2.0]), duration: None, budget: 60 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub ground: String,
    pub excited: String,
    #[serde(default = "one")]
    pub dipole: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayEntry {
    pub excited: String,
    pub ground: String,
    pub rate: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpingSection {
    pub rabi: f64,
    pub detuning: f64,
    /// Total decay rate of each excited level; defaults to `rabi`.
    pub decay_rate: Option<f64>,
    /// `false` switches off all dissipation.
    pub decays: bool,
    /// Periods.
    pub duration: f64,
    pub ground: Option<Vec<String>>,
    pub excited: Option<Vec<String>>,
    pub couplings: Option<Vec<CouplingEntry>>,
    pub channels: Option<Vec<DecayEntry>>,
}

impl Default for PumpingSection {
    fn default() -> Self {
        Self {
            rabi: 1.0,
            detuning: 0.0,
            decay_rate: None,
            decays: true,
            duration: 30.0,
            ground: None,
            excited: None,
            couplings: None,
            channels: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: String,
    /// File name prefix; defaults to the scenario name.
    pub prefix: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "out".into(), prefix: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSection {
    /// Random states per equivalence test.
    pub trials: usize,
    /// Random driven evolutions in the conservation test.
    pub evolutions: usize,
    /// Conservation horizon in periods.
    pub horizon: f64,
}

impl Default for CheckSection {
    fn default() -> Self {
        Self { trials: 200, evolutions: 10, horizon: 20.0 }
    }
}

fn field_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn two_level(&self) -> Result<TwoLevelSystem> {
        let s = &self.system;
        for (name, v) in [("e1", s.e1), ("e2", s.e2), ("d1", s.d1), ("d2", s.d2)] {
            if !v.is_finite() {
                return Err(field_err(&format!("system.{name}"), "must be finite"));
            }
        }
        TwoLevelSystem::new(s.e1, s.e2, s.d1, s.d2).map_err(|e| field_err("system", e))
    }

    pub fn omega(&self) -> Result<f64> {
        Ok(self.two_level()?.omega())
    }

    /// Length of one vibrational period 2π/ω.
    pub fn period(&self) -> Result<f64> {
        Ok(2.0 * PI / self.omega()?)
    }

    pub fn carrier(&self) -> Result<f64> {
        let c = self.system.carrier.unwrap_or(self.omega()?);
        if !c.is_finite() {
            return Err(field_err("system.carrier", "must be finite"));
        }
        Ok(c)
    }

    pub fn frame(&self) -> Frame {
        match self.system.frame {
            FrameName::Rwa => Frame::Rwa,
            FrameName::Lab => Frame::Lab,
        }
    }

    /// Hamiltonian in the configured frame.
    pub fn control_system(&self) -> Result<ControlSystem> {
        let tl = self.two_level()?;
        Ok(match self.frame() {
            Frame::Lab => tl.control_system(),
            Frame::Rwa => tl.rotating_frame(self.carrier()?),
        })
    }

    fn rate_scale(&self) -> Result<f64> {
        Ok(match self.rates.unit {
            RateUnit::Omega => 1.0,
            RateUnit::PerPeriod => self.omega()? / (2.0 * PI),
        })
    }

    /// Two-level rates in angular-frequency units. Complete positivity is
    /// not enforced here.
    pub fn rate_model(&self) -> Result<RateModel> {
        let s = self.rate_scale()?;
        let r = &self.rates;
        RateModel::two_level(r.decay * s, r.excitation * s, r.dephasing * s).map_err(|e| field_err("rates", e))
    }

    pub fn initial_state(&self, dim: usize) -> Result<DensityMatrix> {
        let st = &self.state;
        let given = [st.level.is_some(), st.populations.is_some(), st.rho.is_some()];
        if given.iter().filter(|&&b| b).count() > 1 {
            return Err(field_err("state", "give only one of level, populations, rho"));
        }
        if let Some(p) = &st.populations {
            if p.len() != dim {
                return Err(field_err("state.populations", format!("expected {dim} entries, got {}", p.len())));
            }
            return DensityMatrix::from_real_diagonal(p).map_err(|e| field_err("state.populations", e));
        }
        if let Some(r) = &st.rho {
            if r.len() != dim * dim {
                return Err(field_err("state.rho", format!("expected {} (re, im) pairs, got {}", dim * dim, r.len())));
            }
            let m = CMatrix::from_row_iterator(dim, dim, r.iter().map(|[re, im]| C64::new(*re, *im)));
            return DensityMatrix::new(m).map_err(|e| field_err("state.rho", e));
        }
        let level = st.level.unwrap_or(1);
        if level == 0 || level > dim {
            return Err(field_err("state.level", format!("must be between 1 and {dim}")));
        }
        DensityMatrix::basis(dim, level - 1)
    }

    pub fn pulse_spec(&self) -> Result<PulseSpec> {
        let p = self.pulse.as_ref().ok_or_else(|| field_err("pulse", "section is required"))?;
        let tl = self.two_level()?;
        if !(p.duration.is_finite() && p.duration > 0.0) {
            return Err(field_err("pulse.duration", "must be a positive number of periods"));
        }
        let strength = match (p.area_pi, p.amplitude) {
            (Some(a), None) => PulseStrength::Area(a * PI),
            (None, Some(a)) => PulseStrength::Amplitude(a),
            (None, None) => return Err(field_err("pulse", "one of area_pi or amplitude is required")),
            (Some(_), Some(_)) => return Err(field_err("pulse", "give only one of area_pi or amplitude")),
        };
        let (index, coupling) = match p.control {
            ControlName::X => (0, tl.d1.abs()),
            ControlName::Y => (1, tl.d2.abs()),
        };
        if coupling == 0.0 {
            return Err(field_err("pulse.control", "driven dipole moment is zero"));
        }
        let duration = p.duration * self.period()?;
        let spec = match p.shape {
            ShapeName::Gaussian => PulseSpec::gaussian(index, duration, strength, self.frame()),
            ShapeName::Constant => PulseSpec::constant(index, duration, strength, self.frame()),
        }
        .with_carrier(self.carrier()?)
        .with_coupling(coupling);
        spec.validate().map_err(|e| field_err("pulse", e))?;
        Ok(spec)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let i = &self.integrator;
        if !(i.atol > 0.0 && i.rtol > 0.0 && i.positivity_tol > 0.0) {
            return Err(field_err("integrator", "atol, rtol and positivity_tol must be positive"));
        }
        let max_step = match i.max_step {
            Some(m) if !(m.is_finite() && m > 0.0) => return Err(field_err("integrator.max_step", "must be positive")),
            Some(m) => Some(m * self.period()?),
            None => None,
        };
        Ok(IntegratorConfig { atol: i.atol, rtol: i.rtol, max_step, min_step: 0.0, positivity_tol: i.positivity_tol })
    }

    pub fn dt_out(&self) -> Result<f64> {
        let d = self.integrator.dt_out;
        if !(d.is_finite() && d > 0.0) {
            return Err(field_err("integrator.dt_out", "must be positive"));
        }
        Ok(d * self.period()?)
    }

    /// Explicit horizon in time units, if configured.
    pub fn horizon(&self) -> Result<Option<f64>> {
        match self.integrator.horizon {
            Some(h) if !(h.is_finite() && h > 0.0) => Err(field_err("integrator.horizon", "must be positive")),
            Some(h) => Ok(Some(h * self.period()?)),
            None => Ok(None),
        }
    }

    pub fn optimize_section(&self) -> Result<&OptimizeSection> {
        self.optimize.as_ref().ok_or_else(|| field_err("optimize", "section is required"))
    }

    pub fn objective(&self) -> Result<Objective> {
        let o = self.optimize_section()?;
        let kind = match o.objective {
            ObjectiveName::MaxEntropy => ObjectiveKind::MaxEntropyFinal,
            ObjectiveName::TargetPopulation => match o.level {
                Some(l @ 1..=2) => ObjectiveKind::TargetPopulation(l - 1),
                _ => return Err(field_err("optimize.level", "target_population needs level 1 or 2")),
            },
        };
        let obj = Objective::new(kind);
        Ok(match self.horizon()? {
            Some(h) => obj.at(h),
            None => obj,
        })
    }

    pub fn bounds(&self) -> Result<Vec<Bound>> {
        let o = self.optimize_section()?;
        let period = self.period()?;
        let mut bounds = Vec::new();
        let check = |field: &str, [lo, hi]: [f64; 2], min: f64| {
            if lo.is_finite() && hi.is_finite() && min <= lo && lo <= hi {
                Ok(())
            } else {
                Err(field_err(field, format!("need {min} <= lower <= upper")))
            }
        };
        if let Some(a) = o.area_pi {
            check("optimize.area_pi", a, 0.0)?;
            bounds.push(Bound { param: PulseParameter::Area, lower: a[0] * PI, upper: a[1] * PI });
        }
        if let Some(d) = o.duration {
            check("optimize.duration", d, f64::MIN_POSITIVE)?;
            bounds.push(Bound { param: PulseParameter::Duration, lower: d[0] * period, upper: d[1] * period });
        }
        if bounds.is_empty() {
            return Err(field_err("optimize", "no free parameter (set area_pi and/or duration)"));
        }
        if o.budget == 0 {
            return Err(field_err("optimize.budget", "must be at least 1"));
        }
        Ok(bounds)
    }

    pub fn pumping_section(&self) -> PumpingSection {
        self.pumping.clone().unwrap_or_default()
    }

    /// Level scheme in angular-frequency units.
    pub fn level_scheme(&self) -> Result<LevelScheme> {
        let p = self.pumping_section();
        let s = self.rate_scale()?;
        let rate = p.decay_rate.unwrap_or(p.rabi) * s;
        let mut scheme = LevelScheme::default_scheme(rate);
        if let Some(g) = &p.ground {
            scheme.ground = g.clone();
        }
        if let Some(e) = &p.excited {
            scheme.excited = e.clone();
        }
        if let Some(c) = &p.couplings {
            scheme.couplings = c
                .iter()
                .map(|c| Coupling { ground: c.ground.clone(), excited: c.excited.clone(), dipole: c.dipole })
                .collect();
        }
        if let Some(d) = &p.channels {
            scheme.decays = d
                .iter()
                .map(|d| Decay { excited: d.excited.clone(), ground: d.ground.clone(), rate: d.rate * s })
                .collect();
        } else if p.ground.is_some() || p.excited.is_some() {
            return Err(field_err("pumping.channels", "required when the levels are overridden"));
        }
        if !p.decays {
            scheme = scheme.without_decays();
        }
        scheme.validate().map_err(|e| field_err("pumping", e))?;
        Ok(scheme)
    }

    /// Initial pumping state: the configured one, else the uniform ground
    /// mixture.
    pub fn pumping_state(&self, scheme: &LevelScheme) -> Result<DensityMatrix> {
        let st = &self.state;
        if st.level.is_none() && st.populations.is_none() && st.rho.is_none() {
            Ok(scheme.uniform_ground_mixture())
        } else {
            self.initial_state(scheme.dim())
        }
    }

    pub fn output_prefix(&self, scenario: Scenario) -> Result<String> {
        let p = self.output.prefix.clone().unwrap_or_else(|| scenario.name().to_string());
        if p.is_empty() || p.contains(['/', '\\']) {
            return Err(field_err("output.prefix", "must be a plain file name"));
        }
        Ok(p)
    }
}
