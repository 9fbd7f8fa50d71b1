use std::f64::consts::PI;

use crate::{Error, Result};

/// Pulse envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseShape {
    Constant,
    /// A(t) = A₀ exp(−(t − center)² / (2 width²)), truncated to [0, duration].
    Gaussian { center: f64, width: f64 },
}

/// Frame the field value is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// f(t) = A(t) cos(ω_c t); pair with the lab-frame Hamiltonian.
    Lab,
    /// f(t) = A(t) / 2 as a static coupling; pair with the rotating-frame
    /// Hamiltonian.
    Rwa,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseStrength {
    /// Peak envelope A₀ in field units.
    Amplitude(f64),
    /// Effective pulse area θ = coupling · ∫ A(t) dt (radians).
    ///
    /// With H = coupling · f · σx this is the time integral of the resonant
    /// Rabi frequency: a closed two-level system starting in |1⟩ ends with
    /// population sin²(θ/2) in |2⟩ under the RWA.
    Area(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    pub shape: PulseShape,
    /// Index of the control Hamiltonian driven by this pulse (0-based).
    pub field_index: usize,
    pub carrier_frequency: f64,
    pub strength: PulseStrength,
    pub duration: f64,
    pub frame: Frame,
    /// |⟨1|H_m|2⟩| of the driven control, used to convert area to amplitude.
    pub coupling: f64,
}

impl PulseSpec {
    pub fn constant(field_index: usize, duration: f64, strength: PulseStrength, frame: Frame) -> Self {
        Self {
            shape: PulseShape::Constant,
            field_index,
            carrier_frequency: 0.0,
            strength,
            duration,
            frame,
            coupling: 1.0,
        }
    }

    /// Gaussian truncated at ±3σ: width = duration / 6, centered.
    pub fn gaussian(field_index: usize, duration: f64, strength: PulseStrength, frame: Frame) -> Self {
        Self {
            shape: PulseShape::Gaussian { center: duration / 2.0, width: duration / 6.0 },
            field_index,
            carrier_frequency: 0.0,
            strength,
            duration,
            frame,
            coupling: 1.0,
        }
    }

    pub fn with_carrier(mut self, carrier: f64) -> Self {
        self.carrier_frequency = carrier;
        self
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    /// Rescale to a new duration, keeping the Gaussian's relative geometry.
    pub fn with_duration(mut self, duration: f64) -> Self {
        if let PulseShape::Gaussian { center, width } = &mut self.shape {
            let s = duration / self.duration;
            *center *= s;
            *width *= s;
        }
        self.duration = duration;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidPulse(m.to_string()));
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad("duration must be positive");
        }
        if let PulseShape::Gaussian { width, center } = self.shape {
            if !(width.is_finite() && width > 0.0) || !center.is_finite() {
                return bad("gaussian width must be positive");
            }
        }
        match self.strength {
            PulseStrength::Area(a) if !(a.is_finite() && a >= 0.0) => bad("effective area must be nonnegative"),
            PulseStrength::Amplitude(a) if !a.is_finite() => bad("amplitude must be finite"),
            _ if !(self.coupling.is_finite() && self.coupling > 0.0) => bad("coupling must be positive"),
            _ if !self.carrier_frequency.is_finite() => bad("carrier frequency must be finite"),
            _ => Ok(()),
        }
    }

    fn shape_at(&self, t: f64) -> f64 {
        match self.shape {
            PulseShape::Constant => 1.0,
            PulseShape::Gaussian { center, width } => (-(t - center).powi(2) / (2.0 * width * width)).exp(),
        }
    }

    /// ∫₀^T of the unit-peak envelope.
    pub fn envelope_integral(&self) -> f64 {
        match self.shape {
            PulseShape::Constant => self.duration,
            PulseShape::Gaussian { center, width } => {
                let s = width * std::f64::consts::SQRT_2;
                0.5 * s * PI.sqrt() * (libm::erf((self.duration - center) / s) + libm::erf(center / s))
            }
        }
    }

    /// Peak envelope A₀.
    pub fn peak_amplitude(&self) -> f64 {
        match self.strength {
            PulseStrength::Amplitude(a) => a,
            PulseStrength::Area(theta) => theta / (self.coupling * self.envelope_integral()),
        }
    }

    /// Effective area implied by the current strength.
    pub fn effective_area(&self) -> f64 {
        self.coupling * self.peak_amplitude() * self.envelope_integral()
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.peak_amplitude() * self.shape_at(t)
    }

    /// Field value at time t ∈ [0, duration].
    pub fn sample(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::OutsidePulse { t, duration: self.duration });
        }
        Ok(self.sample_unchecked(t))
    }

    fn sample_unchecked(&self, t: f64) -> f64 {
        let a = self.envelope(t);
        match self.frame {
            Frame::Lab => a * (self.carrier_frequency * t).cos(),
            Frame::Rwa => 0.5 * a,
        }
    }
}

/// The integration window currently being stepped through, between two
/// consecutive breakpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
}

/// Time-dependent control fields f_m(t).
pub trait Drive {
    /// Fields at time `t`. `window` identifies the smooth piece `t` belongs
    /// to, which resolves values exactly at a discontinuity.
    fn fields(&self, t: f64, window: Window, out: &mut [f64]);

    /// Times where the fields may be discontinuous.
    fn breakpoints(&self) -> Vec<f64>;

    fn validate(&self, num_controls: usize) -> Result<()>;
}

impl Drive for [PulseSpec] {
    fn fields(&self, t: f64, window: Window, out: &mut [f64]) {
        out.iter_mut().for_each(|f| *f = 0.0);
        for p in self {
            // Active on [0, duration]; windows never straddle the end.
            if window.start < p.duration && t <= p.duration {
                out[p.field_index] += p.sample_unchecked(t.max(0.0));
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.iter().map(|p| p.duration).collect()
    }

    fn validate(&self, num_controls: usize) -> Result<()> {
        for p in self {
            p.validate()?;
            if p.field_index >= num_controls {
                return Err(Error::InvalidPulse(format!(
                    "pulse drives control {} but the system has {num_controls}",
                    p.field_index + 1
                )));
            }
        }
        Ok(())
    }
}

impl Drive for Vec<PulseSpec> {
    fn fields(&self, t: f64, window: Window, out: &mut [f64]) {
        self.as_slice().fields(t, window, out)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.as_slice().breakpoints()
    }

    fn validate(&self, num_controls: usize) -> Result<()> {
        self.as_slice().validate(num_controls)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub duration: f64,
    pub fields: Vec<f64>,
}

/// Fields held constant over consecutive segments; zero after the last one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PiecewiseConstant {
    pub segments: Vec<Segment>,
}

impl PiecewiseConstant {
    pub fn new(segments: Vec<Segment>) -> Self {
        Self { segments }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Segment containing `t`, with its start time; ties go to the later one.
    pub fn segment_at(&self, t: f64) -> Option<(usize, f64)> {
        let mut start = 0.0;
        for (k, s) in self.segments.iter().enumerate() {
            if t < start + s.duration {
                return Some((k, start));
            }
            start += s.duration;
        }
        None
    }
}

impl Drive for PiecewiseConstant {
    fn fields(&self, _t: f64, window: Window, out: &mut [f64]) {
        match self.segment_at(window.start) {
            Some((k, _)) => out.copy_from_slice(&self.segments[k].fields),
            None => out.iter_mut().for_each(|f| *f = 0.0),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.segments
            .iter()
            .scan(0.0, |acc, s| {
                *acc += s.duration;
                Some(*acc)
            })
            .collect()
    }

    fn validate(&self, num_controls: usize) -> Result<()> {
        for s in &self.segments {
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(Error::InvalidPulse("segment duration must be positive".into()));
            }
            if s.fields.len() != num_controls {
                return Err(Error::Dimension { expected: num_controls, got: s.fields.len() });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_area_calibration() {
        let t = 7.0;
        let p = PulseSpec::constant(0, t, PulseStrength::Area(PI), Frame::Rwa);
        // Rabi frequency = coupling · A₀, so Ω·T = π.
        assert_relative_eq!(p.peak_amplitude() * t, PI, epsilon = 1e-14);
        assert_relative_eq!(p.sample(1.0).unwrap(), 0.5 * PI / t, epsilon = 1e-14);
        let p = p.with_coupling(2.0);
        assert_relative_eq!(p.peak_amplitude() * t * 2.0, PI, epsilon = 1e-14);
    }

    #[test]
    fn gaussian_peak_and_tails() {
        let p = PulseSpec::gaussian(0, 60.0, PulseStrength::Amplitude(2.0), Frame::Lab);
        assert_eq!(p.envelope(30.0), 2.0);
        assert_relative_eq!(p.envelope(0.0), 2.0 * (-4.5f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(p.envelope(60.0), 2.0 * (-4.5f64).exp(), epsilon = 1e-15);
        // Lab frame with zero carrier is the bare envelope.
        assert_eq!(p.sample(30.0).unwrap(), 2.0);
        let p = p.with_carrier(1.0);
        assert_relative_eq!(p.sample(30.0).unwrap(), 2.0 * 30f64.cos(), epsilon = 1e-14);
    }

    #[test]
    fn gaussian_integral_matches_quadrature() {
        let p = PulseSpec::gaussian(0, 10.0, PulseStrength::Amplitude(1.0), Frame::Rwa);
        let n = 20_000;
        let h = 10.0 / n as f64;
        // Simpson's rule.
        let mut acc = p.shape_at(0.0) + p.shape_at(10.0);
        for k in 1..n {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * p.shape_at(k as f64 * h);
        }
        assert_relative_eq!(p.envelope_integral(), acc * h / 3.0, epsilon = 1e-12);
        let q = PulseSpec::gaussian(0, 10.0, PulseStrength::Area(1.3), Frame::Rwa);
        assert_relative_eq!(q.effective_area(), 1.3, epsilon = 1e-14);
    }

    #[test]
    fn sample_outside_support_fails() {
        let p = PulseSpec::constant(0, 1.0, PulseStrength::Amplitude(1.0), Frame::Rwa);
        assert!(matches!(p.sample(1.5), Err(Error::OutsidePulse { .. })));
        assert!(p.sample(-0.1).is_err());
    }

    #[test]
    fn validation() {
        let good = PulseSpec::constant(0, 1.0, PulseStrength::Area(1.0), Frame::Rwa);
        assert!(good.validate().is_ok());
        let mut bad = good;
        bad.duration = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.strength = PulseStrength::Area(-1.0);
        assert!(bad.validate().is_err());
        assert!(vec![good].validate(0).is_err());
    }

    #[test]
    fn piecewise_lookup() {
        let pc = PiecewiseConstant::new(vec![
            Segment { duration: 1.0, fields: vec![1.0] },
            Segment { duration: 2.0, fields: vec![2.0] },
        ]);
        assert_eq!(pc.breakpoints(), vec![1.0, 3.0]);
        let mut out = [0.0];
        pc.fields(1.0, Window { start: 0.5, end: 1.0 }, &mut out);
        assert_eq!(out[0], 1.0);
        pc.fields(1.0, Window { start: 1.0, end: 3.0 }, &mut out);
        assert_eq!(out[0], 2.0);
        pc.fields(4.0, Window { start: 3.0, end: 5.0 }, &mut out);
        assert_eq!(out[0], 0.0);
    }
}
