use crate::states::DensityMatrix;

/// Time-stamped states with purity observables.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub purity_deficit: Vec<f64>,
    pub renyi_entropy: Vec<f64>,
}

impl Trajectory {
    pub fn push(&mut self, t: f64, rho: DensityMatrix) {
        self.purity_deficit.push(rho.purity_deficit());
        self.renyi_entropy.push(rho.renyi_entropy());
        self.times.push(t);
        self.states.push(rho);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn final_state(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    pub fn populations(&self, level: usize) -> Vec<f64> {
        self.states.iter().map(|s| s.population(level)).collect()
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.dim())
    }

    /// Largest |ρ(t) − ρ'(t)| entry over common samples.
    pub fn max_deviation(&self, other: &Trajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a.matrix() - b.matrix()).camax())
            .fold(0.0, f64::max)
    }
}
