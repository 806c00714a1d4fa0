//! Piecewise-constant control pulses and the laser-parameter mapping.
//!
//! The optimizer works on the reparameterized amplitudes
//!
//! ```text
//! alpha = (r/4) [1 - (1 + eta) cos(phi)]
//! beta  = (r/4) (1 + eta) sin(phi)
//! ```
//!
//! where eta is the laser intensity ratio relative to the static depth and
//! phi the lattice phase. [`PhysicalPulse`] carries (eta, phi) for reporting
//! lab settings; [`ControlPulse`] carries (alpha, beta) and is the
//! optimization variable.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Piecewise-constant control amplitudes, one (alpha, beta) pair per slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPulse {
    /// Lattice depth the pulse was built for (alpha, beta scale with r).
    pub r: f64,
    /// Slice duration in hbar / E_R.
    pub dt: f64,
    pub n_slices: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    #[serde(default)]
    pub meta: serde_json::Map<String, Value>,
}

impl ControlPulse {
    pub fn new(r: f64, dt: f64, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        let pulse = Self {
            r,
            dt,
            n_slices: alpha.len(),
            alpha,
            beta,
            meta: serde_json::Map::new(),
        };
        pulse.validate()?;
        Ok(pulse)
    }

    /// The zero pulse: the lattice sits idle for `n_slices * dt`.
    pub fn idle(r: f64, dt: f64, n_slices: usize) -> Result<Self> {
        Self::new(r, dt, vec![0.0; n_slices], vec![0.0; n_slices])
    }

    /// A zero-slice pulse is valid and evolves as the identity.
    pub fn validate(&self) -> Result<()> {
        if self.alpha.len() != self.n_slices || self.beta.len() != self.n_slices {
            return Err(Error::DimensionMismatch(format!(
                "pulse declares {} slices but carries {} alpha / {} beta values",
                self.n_slices,
                self.alpha.len(),
                self.beta.len()
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidSliceDuration(self.dt));
        }
        Ok(())
    }

    /// Total duration T = n_slices * dt.
    pub fn duration(&self) -> f64 {
        self.n_slices as f64 * self.dt
    }

    /// Pack (alpha, beta) into one control vector: alphas first, then betas.
    pub fn controls(&self) -> Vec<f64> {
        let mut u = Vec::with_capacity(2 * self.n_slices);
        u.extend_from_slice(&self.alpha);
        u.extend_from_slice(&self.beta);
        u
    }

    /// Inverse of [`ControlPulse::controls`].
    pub fn set_controls(&mut self, u: &[f64]) {
        debug_assert_eq!(u.len(), 2 * self.n_slices);
        self.alpha.copy_from_slice(&u[..self.n_slices]);
        self.beta.copy_from_slice(&u[self.n_slices..]);
    }

    /// Write the pulse as JSON. Amplitudes are printed with 17 significant
    /// digits so the file round-trips to the exact f64 bits.
    pub fn to_json(&self) -> String {
        fn join(values: &[f64]) -> String {
            values
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(", ")
        }
        let meta = Value::Object(self.meta.clone());
        format!(
            "{{\n  \"r\": {r:.16e},\n  \"dt\": {dt:.16e},\n  \"n_slices\": {n},\n  \"alpha\": [{a}],\n  \"beta\": [{b}],\n  \"meta\": {meta}\n}}\n",
            r = self.r,
            dt = self.dt,
            n = self.n_slices,
            a = join(&self.alpha),
            b = join(&self.beta),
        )
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let pulse: ControlPulse = serde_json::from_str(text)
            .map_err(|e| Error::PulseSchema(e.to_string()))?;
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// Laser settings per slice: intensity ratio eta and phase phi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalPulse {
    pub eta: Vec<f64>,
    pub phi: Vec<f64>,
}

impl PhysicalPulse {
    pub fn new(eta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if eta.len() != phi.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} eta values vs {} phi values",
                eta.len(),
                phi.len()
            )));
        }
        for (index, &e) in eta.iter().enumerate() {
            if e < -1.0 {
                return Err(Error::IntensityFloor { index, eta: e });
            }
        }
        Ok(Self { eta, phi })
    }
}

/// Map laser settings to control amplitudes.
pub fn pulse_from_physical(phys: &PhysicalPulse, r: f64, dt: f64) -> Result<ControlPulse> {
    for (index, &e) in phys.eta.iter().enumerate() {
        if e < -1.0 {
            return Err(Error::IntensityFloor { index, eta: e });
        }
    }
    let quarter = r / 4.0;
    let alpha = phys
        .eta
        .iter()
        .zip(&phys.phi)
        .map(|(&e, &p)| quarter * (1.0 - (1.0 + e) * p.cos()))
        .collect();
    let beta = phys
        .eta
        .iter()
        .zip(&phys.phi)
        .map(|(&e, &p)| quarter * (1.0 + e) * p.sin())
        .collect();
    ControlPulse::new(r, dt, alpha, beta)
}

/// Recover laser settings from control amplitudes.
///
/// `1 + eta = hypot(1 - 4 alpha / r, 4 beta / r)` is nonnegative by
/// construction, so the intensity floor holds automatically; phi lands in
/// (-pi, pi].
pub fn physical_from_pulse(pulse: &ControlPulse) -> Result<PhysicalPulse> {
    pulse.validate()?;
    if pulse.r == 0.0 {
        return Err(Error::ZeroDepthPulse);
    }
    let mut eta = Vec::with_capacity(pulse.n_slices);
    let mut phi = Vec::with_capacity(pulse.n_slices);
    for j in 0..pulse.n_slices {
        let x = 1.0 - 4.0 * pulse.alpha[j] / pulse.r;
        let y = 4.0 * pulse.beta[j] / pulse.r;
        eta.push(x.hypot(y) - 1.0);
        phi.push(y.atan2(x));
    }
    Ok(PhysicalPulse { eta, phi })
}
