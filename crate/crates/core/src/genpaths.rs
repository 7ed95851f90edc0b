//! Seeded driver and `ν` generators for the verification campaigns.
//!
//! Randomness comes from Xoshiro256++ seeded through SplitMix64
//! (`SeedableRng::seed_from_u64`), so a [`GenSpec`] pins the path bit for bit.
//! Gaussian variates use the Box–Muller transform, consuming two uniforms per
//! pair and caching the second variate.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pathkit::{CadlagPath, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// Cumulative Gaussian increments with standard deviation `vol √Δt`.
    Brownian,
    /// Compound-Poisson staircase with Gaussian marks, plus `vol` diffusion.
    Jump,
    /// `amplitude · t / T`.
    Ramp,
    /// `amplitude · frac(teeth · t / T)`.
    Sawtooth,
    /// `0` before `T/2`, `amplitude` from `T/2` on.
    Step,
    /// Nondecreasing staircase from 0: Poisson many steps per interval, each
    /// uniform on `[0, jump_scale)`.
    StaircaseNu,
}

fn default_horizon() -> f64 {
    1.0
}
fn default_one() -> f64 {
    1.0
}
fn default_intensity() -> f64 {
    5.0
}
fn default_teeth() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: PathKind,
    #[serde(default)]
    pub seed: u64,
    pub n: usize,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_one")]
    pub vol: f64,
    #[serde(default = "default_intensity")]
    pub intensity: f64,
    #[serde(default = "default_one")]
    pub jump_scale: f64,
    #[serde(default = "default_one")]
    pub amplitude: f64,
    #[serde(default = "default_teeth")]
    pub teeth: f64,
}

impl GenSpec {
    pub fn new(kind: PathKind, seed: u64, n: usize) -> Self {
        Self {
            kind,
            seed,
            n,
            horizon: default_horizon(),
            vol: 1.0,
            intensity: default_intensity(),
            jump_scale: 1.0,
            amplitude: 1.0,
            teeth: default_teeth(),
        }
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_vol(mut self, vol: f64) -> Self {
        self.vol = vol;
        self
    }

    pub fn with_jumps(mut self, intensity: f64, jump_scale: f64) -> Self {
        self.intensity = intensity;
        self.jump_scale = jump_scale;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Input("n must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Input(format!("horizon must be positive, got {}", self.horizon)));
        }
        for (name, v) in [
            ("vol", self.vol),
            ("intensity", self.intensity),
            ("jump_scale", self.jump_scale),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        for (name, v) in [("amplitude", self.amplitude), ("teeth", self.teeth)] {
            if !v.is_finite() {
                return Err(Error::Input(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }
}

/// Standard normal variates by Box–Muller.
#[derive(Debug, Default, Clone)]
pub struct BoxMuller {
    spare: Option<f64>,
}

impl BoxMuller {
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 − U lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - rng.gen::<f64>();
        let u2 = rng.gen::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

pub fn rng_from_seed(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn generate(spec: &GenSpec) -> Result<CadlagPath> {
    spec.validate()?;
    let grid = TimeGrid::uniform(spec.n, spec.horizon)?;
    let mut rng = rng_from_seed(spec.seed);
    let values = sample_values(spec, grid.times(), &mut rng)?;
    CadlagPath::new(grid, values)
}

/// Samples `spec.kind` on arbitrary `times` from a caller-owned generator.
pub fn sample_values<R: Rng + ?Sized>(spec: &GenSpec, times: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let horizon = spec.horizon;
    let mut gauss = BoxMuller::default();
    let mut out = Vec::with_capacity(times.len());
    let mut level = 0.0;
    for (i, &t) in times.iter().enumerate() {
        let dt = if i == 0 { 0.0 } else { t - times[i - 1] };
        let v = match spec.kind {
            PathKind::Ramp => spec.amplitude * t / horizon,
            PathKind::Sawtooth => spec.amplitude * (spec.teeth * t / horizon).fract(),
            PathKind::Step => {
                if t >= 0.5 * horizon {
                    spec.amplitude
                } else {
                    0.0
                }
            }
            PathKind::Brownian => {
                if i > 0 {
                    level += spec.vol * dt.sqrt() * gauss.sample(rng);
                }
                level
            }
            PathKind::Jump => {
                if i > 0 {
                    level += spec.vol * dt.sqrt() * gauss.sample(rng);
                    for _ in 0..poisson_count(spec.intensity * dt, rng)? {
                        level += spec.jump_scale * gauss.sample(rng);
                    }
                }
                level
            }
            PathKind::StaircaseNu => {
                if i > 0 {
                    for _ in 0..poisson_count(spec.intensity * dt, rng)? {
                        level += spec.jump_scale * rng.gen::<f64>();
                    }
                }
                level
            }
        };
        out.push(v);
    }
    Ok(out)
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::Input(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}
