//! Weak measurement of a dipole's energy by a heavy pointer coupled through
//! η(t) p σ^z with a rectangular switching of strength 𝔯 and duration t_P.
//!
//! The pointer is never discretized: every pointer quantity is closed form.
//! σ^z = [σ⁺, σ⁻]/2 has eigenvalues ±½. The dipole-field moments hold to
//! second order in the coupling.

use crate::gauge::GaugeProfile;
use crate::material::MaterialSpectrum;
use crate::multimode::{omega_u_plus_sq, population_breaks, u_plus, ContinuumSpec};
use crate::opalg::{ground_state, tensor, Operator};
use crate::quad::{integrate_pieces, merge_breaks, QuadOptions};
use crate::twolevel::{standard_model, TwoLevelParams};
use crate::{Error, Result};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct PointerSetup {
    /// Pointer displacement scale 𝔯.
    pub r_scale: f64,
    /// Width of the initial Gaussian pointer state.
    pub sigma: f64,
    /// Measurement duration t_P.
    pub t_p: f64,
    /// Gauge relative to which the measured dipole is defined.
    pub gauge: GaugeProfile,
    /// Sharp pointer: drop the σ² term from every variance.
    pub sharp: bool,
}

impl PointerSetup {
    pub fn new(r_scale: f64, sigma: f64, t_p: f64, gauge: GaugeProfile) -> Result<Self> {
        let s = PointerSetup { r_scale, sigma, t_p, gauge, sharp: false };
        s.validate()?;
        Ok(s)
    }

    /// The σ → 0 limit.
    pub fn sharp(r_scale: f64, t_p: f64, gauge: GaugeProfile) -> Result<Self> {
        let s = PointerSetup { r_scale, sigma: 0.0, t_p, gauge, sharp: true };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r_scale.is_finite() {
            return Err(Error::InvalidInput("pointer scale must be finite".into()));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("pointer width must be non-negative, got {}", self.sigma)));
        }
        if !(self.t_p > 0.0 && self.t_p.is_finite()) {
            return Err(Error::InvalidInput(format!("measurement duration must be positive, got {}", self.t_p)));
        }
        self.gauge.validate()
    }

    fn width_sq(&self) -> f64 {
        if self.sharp {
            0.0
        } else {
            self.sigma * self.sigma
        }
    }
}

/// Mean and variance of the pointer position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointerMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Pointer density after measuring a bare qubit with excited probability p₁:
/// two Gaussians of width σ at ∓𝔯/2 weighted by p₀ and p₁.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BarePointer {
    pub p1: f64,
    pub r_scale: f64,
    pub sigma: f64,
    sharp: bool,
}

impl BarePointer {
    /// Density at r. A sharp pointer has no density and returns NaN.
    pub fn density(&self, r: f64) -> f64 {
        if self.sharp || self.sigma == 0.0 {
            return f64::NAN;
        }
        let s = self.sigma;
        let g = |c: f64| (-(r - c).powi(2) / (2.0 * s * s)).exp();
        ((1.0 - self.p1) * g(-self.r_scale / 2.0) + self.p1 * g(self.r_scale / 2.0)) / ((2.0 * PI).sqrt() * s)
    }

    /// ⟨r⟩ = 𝔯(p₁ − ½) and ⟨⟨r⟩⟩ = 𝔯²p₁(1 − p₁) + σ².
    pub fn moments(&self) -> PointerMoments {
        let w = if self.sharp { 0.0 } else { self.sigma * self.sigma };
        PointerMoments {
            mean: self.r_scale * (self.p1 - 0.5),
            variance: self.r_scale.powi(2) * self.p1 * (1.0 - self.p1) + w,
        }
    }
}

pub fn pointer_distribution_bare(p1: f64, setup: &PointerSetup) -> Result<BarePointer> {
    setup.validate()?;
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidInput(format!("excited probability must lie in [0, 1], got {p1}")));
    }
    Ok(BarePointer { p1, r_scale: setup.r_scale, sigma: setup.sigma, sharp: setup.sharp })
}

/// A two-level dipole and one cavity mode of frequency ω in volume v, with
/// `dipole` the projection e·d.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleMode {
    pub omega_m: f64,
    pub omega: f64,
    pub dipole: f64,
    pub volume: f64,
}

impl SingleMode {
    /// The mode in the units of module gauge: ω_m = 1, ω = δ and
    /// |e·d|²/2v = η²δ.
    pub fn from_eta(eta: f64, delta: f64) -> Self {
        SingleMode { omega_m: 1.0, omega: delta, dipole: eta * (2.0 * delta).sqrt(), volume: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0 && self.omega > 0.0 && self.volume > 0.0) || !self.dipole.is_finite() {
            return Err(Error::InvalidInput("frequencies and volume must be positive, the dipole finite".into()));
        }
        if !(self.omega_m.is_finite() && self.omega.is_finite() && self.volume.is_finite()) {
            return Err(Error::InvalidInput("mode parameters must be finite".into()));
        }
        Ok(())
    }
}

/// ⟨σ^z⟩ = −½ + (|e·d|²/2v) ω_m u⁺(ω)²/(ω_m + ω)² in the ground state.
pub fn sigma_z_singlemode(mode: &SingleMode, gauge: &GaugeProfile) -> Result<f64> {
    mode.validate()?;
    gauge.validate()?;
    if let GaugeProfile::JaynesCummings = gauge {
        return Ok(-0.5);
    }
    let (wm, w) = (mode.omega_m, mode.omega);
    let u = u_plus(gauge, wm, w);
    Ok(-0.5 + mode.dipole.powi(2) / (2.0 * mode.volume) * wm * u * u / (wm + w).powi(2))
}

/// ⟨r⟩ = 𝔯⟨σ^z⟩ and ⟨⟨r⟩⟩ = 𝔯²(¼ − ⟨σ^z⟩²) sinc²[(ω_m + ω)t_P/2] + σ².
pub fn pointer_moments_singlemode(mode: &SingleMode, setup: &PointerSetup) -> Result<PointerMoments> {
    setup.validate()?;
    let sz = sigma_z_singlemode(mode, &setup.gauge)?;
    let s = sinc(0.5 * (mode.omega_m + mode.omega) * setup.t_p);
    Ok(PointerMoments {
        mean: setup.r_scale * sz,
        variance: setup.r_scale.powi(2) * (0.25 - sz * sz) * s * s + setup.width_sq(),
    })
}

/// Ground-state ⟨σ^z⟩ of the two-level α-gauge model, by diagonalization.
/// The material's first transition sets ω_m = 1.
pub fn sigma_z_exact(material: &MaterialSpectrum, eta: f64, delta: f64, alpha: f64, n_fock: usize) -> Result<f64> {
    let params = TwoLevelParams { n_fock, ..TwoLevelParams::new(material, delta, eta, alpha) };
    let h = standard_model(&params)?;
    let g = ground_state(&h, 1e-14)?;
    let sz = tensor(&Operator::diagonal(&[-0.5, 0.5]), &Operator::identity(vec![n_fock]));
    Ok(sz.expect(&g.state).re)
}

/// Moments for the mode continuum:
/// ⟨r⟩ = (𝔯/2)(−1 + (Γ/π)∫K) and ⟨⟨r⟩⟩ = (𝔯²Γ/2π)∫K sinc²[(ω_m+ω)t_P/2] + σ²
/// with K = [ω u⁺(ω)/(ω_m(ω_m + ω))]², integrated over [0, ω_M].
pub fn pointer_moments_continuum(spec: &ContinuumSpec, setup: &PointerSetup) -> Result<PointerMoments> {
    spec.validate()?;
    pointer_moments_band(spec, setup, 0.0, spec.omega_max)
}

/// As `pointer_moments_continuum`, with the modes restricted to [lo, hi].
pub fn pointer_moments_band(spec: &ContinuumSpec, setup: &PointerSetup, lo: f64, hi: f64) -> Result<PointerMoments> {
    spec.validate()?;
    setup.validate()?;
    if !(lo >= 0.0 && hi > lo && hi <= spec.omega_max) {
        return Err(Error::InvalidInput(format!("band [{lo}, {hi}] must lie inside [0, {}]", spec.omega_max)));
    }
    let wm = spec.omega_m;
    let kernel = |w: f64| omega_u_plus_sq(&setup.gauge, wm, w) / (wm * (wm + w)).powi(2);
    let opts = QuadOptions::new(spec.abs_tol, spec.rel_tol);

    let mut breaks = vec![lo];
    let mut b = wm.max(lo);
    while b < hi {
        if b > lo {
            breaks.push(b);
        }
        b *= 4.0;
    }
    breaks.push(hi);
    let mean_int = integrate_pieces(kernel, &merge_breaks(breaks, &[]), opts)?;

    let t = setup.t_p;
    let osc = population_breaks(spec, &setup.gauge, t);
    let mut band: Vec<f64> = osc.into_iter().filter(|w| *w > lo && *w < hi).collect();
    band.insert(0, lo);
    band.push(hi);
    let var_int = integrate_pieces(|w| kernel(w) * sinc(0.5 * (wm + w) * t).powi(2), &band, opts)?;

    let g = spec.gamma;
    Ok(PointerMoments {
        mean: 0.5 * setup.r_scale * (-1.0 + g / PI * mean_int.value),
        variance: setup.r_scale.powi(2) * g / (2.0 * PI) * var_int.value + setup.width_sq(),
    })
}

/// sin x / x
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
