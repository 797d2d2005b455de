//! Harmonic dipole coupled to a photon continuum: counter-rotating
//! coefficients, virtual detector excitation, self-energy renormalization,
//! level shifts, emission rates and the resulting master equations.
//!
//! Continuum integrals always run to an explicit cutoff ω_M. The charge is
//! fixed by the emission rate scale, q² = 6π m Γ / ω_m².

use crate::gauge::GaugeProfile;
use crate::material::MaterialSpectrum;
use crate::opalg::{destroy, lindblad_steady, pauli, tensor, DensityMatrix, Operator};
use crate::quad::{integrate_pieces, merge_breaks, periodic_breaks, QuadOptions, QuadResult};
use crate::{Error, Result};
use faer::{Col, Mat};
use std::f64::consts::PI;

/// Population integrals with ω_m t above this are split at kernel zeros.
const SPLIT_THRESHOLD: f64 = 50.0;
/// Frequency differences below this count as resonant and are excluded.
pub const RESONANCE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuumSpec {
    pub omega_m: f64,
    /// Spontaneous emission rate of the oscillator, q²ω_m²/(6πm).
    pub gamma: f64,
    /// Ultraviolet cutoff ω_M.
    pub omega_max: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl ContinuumSpec {
    pub fn new(gamma: f64, omega_max: f64) -> Self {
        ContinuumSpec { omega_m: 1.0, gamma, omega_max, abs_tol: 0.0, rel_tol: 1e-10 }
    }

    pub fn with_cutoff(self, omega_max: f64) -> Self {
        ContinuumSpec { omega_max, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0 && self.omega_m.is_finite()) {
            return Err(Error::InvalidInput("omega_m must be positive".into()));
        }
        if !(self.omega_max > self.omega_m && self.omega_max.is_finite()) {
            return Err(Error::InvalidInput(format!("cutoff {} must exceed omega_m {}", self.omega_max, self.omega_m)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidInput("gamma must be non-negative".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-8) || !(self.abs_tol >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "quadrature tolerances must satisfy 0 < rel_tol <= 1e-8 and abs_tol >= 0 (got {}, {})",
                self.rel_tol, self.abs_tol
            )));
        }
        Ok(())
    }

    /// q² for a dipole of mass m.
    pub fn charge_sq(&self, mass: f64) -> f64 {
        6.0 * PI * mass * self.gamma / (self.omega_m * self.omega_m)
    }

    /// q²/m, independent of the mass.
    pub fn charge_sq_over_mass(&self) -> f64 {
        self.charge_sq(1.0)
    }

    fn quad(&self) -> QuadOptions {
        QuadOptions::new(self.abs_tol, self.rel_tol)
    }
}

/// u⁺(ω) = √(ω_m/ω)[(1−α(ω)) − (ω/ω_m)α(ω)]
pub fn u_plus(profile: &GaugeProfile, omega_m: f64, omega: f64) -> f64 {
    let a = profile.alpha_at(omega_m, omega);
    (omega_m / omega).sqrt() * ((1.0 - a) - omega / omega_m * a)
}

/// (ω u⁺(ω))², written without the square root so that ω → 0 is regular.
pub(crate) fn omega_u_plus_sq(profile: &GaugeProfile, omega_m: f64, omega: f64) -> f64 {
    if let GaugeProfile::JaynesCummings = profile {
        return 0.0;
    }
    let a = profile.alpha_at(omega_m, omega);
    omega * omega_m * ((1.0 - a) - omega / omega_m * a).powi(2)
}

/// Single-mode counter-rotating and rotating coefficients (u⁺, u⁻) for a
/// harmonic dipole with ω_m = 1, mode frequency δ and coupling η.
pub fn u_pm_singlemode(alpha: f64, eta: f64, delta: f64) -> (f64, f64) {
    let c = 0.5 * eta * delta.sqrt();
    (c * ((1.0 - alpha) - delta * alpha), c * ((1.0 - alpha) + delta * alpha))
}

/// Interior kinks of a sampled profile, where the adaptive rule should split.
fn profile_breaks(profile: &GaugeProfile) -> Vec<f64> {
    match profile {
        GaugeProfile::Sampled { omegas, .. } => omegas.clone(),
        _ => vec![],
    }
}

/// ⟨d†d⟩(t) = (2Γ/π)∫₀^{ω_M} dω [ω u⁺(ω)/(ω_m(ω_m+ω))]² sin²((ω_m+ω)t/2)
pub fn detector_population(spec: &ContinuumSpec, profile: &GaugeProfile, t: f64) -> Result<QuadResult> {
    spec.validate()?;
    profile.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    let wm = spec.omega_m;
    let f = |w: f64| {
        let k = omega_u_plus_sq(profile, wm, w) / (wm * (wm + w)).powi(2);
        k * ((wm + w) * t / 2.0).sin().powi(2)
    };
    let breaks = population_breaks(spec, profile, t);
    let r = integrate_pieces(f, &breaks, spec.quad())?;
    let c = 2.0 * spec.gamma / PI;
    Ok(QuadResult { value: c * r.value, error: c * r.error, ..r })
}

/// Breakpoints at the zeros of sin²((ω_m+ω)t/2) once the kernel oscillates
/// rapidly, plus any profile kinks.
pub fn population_breaks(spec: &ContinuumSpec, profile: &GaugeProfile, t: f64) -> Vec<f64> {
    let base = if spec.omega_m * t > SPLIT_THRESHOLD {
        periodic_breaks(0.0, spec.omega_max, -spec.omega_m, 2.0 * PI / t)
    } else {
        vec![0.0, spec.omega_max]
    };
    merge_breaks(base, &profile_breaks(profile))
}

/// R = (Γ/πT)∫₀^{ω_M} dω [ω u⁺(ω)/(ω_m(ω_m+ω))]², the population over T
/// with the oscillating factor replaced by its mean.
pub fn time_averaged_rate(spec: &ContinuumSpec, profile: &GaugeProfile, t_avg: f64) -> Result<QuadResult> {
    spec.validate()?;
    profile.validate()?;
    if !(spec.omega_m * t_avg >= 100.0) || !t_avg.is_finite() {
        return Err(Error::InvalidInput(format!("averaging needs omega_m T >= 100, got {}", spec.omega_m * t_avg)));
    }
    let wm = spec.omega_m;
    let f = |w: f64| omega_u_plus_sq(profile, wm, w) / (wm * (wm + w)).powi(2);
    // Geometric breaks keep the wide range cheap.
    let mut breaks = vec![0.0];
    let mut b = wm;
    while b < spec.omega_max {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.push(spec.omega_max);
    let breaks = merge_breaks(breaks, &profile_breaks(profile));
    let r = integrate_pieces(f, &breaks, spec.quad())?;
    let c = spec.gamma / (PI * t_avg);
    Ok(QuadResult { value: c * r.value, error: c * r.error, ..r })
}

/// A discrete set of modes in a quantization volume v, coupled to a dipole
/// along `dipole`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteModes {
    pub omegas: Vec<f64>,
    pub polarizations: Vec<[f64; 3]>,
    pub dipole: [f64; 3],
    pub volume: f64,
}

impl DiscreteModes {
    pub fn validate(&self) -> Result<()> {
        if self.omegas.len() != self.polarizations.len() || self.omegas.is_empty() {
            return Err(Error::InvalidInput("mode frequencies and polarizations must match".into()));
        }
        if self.omegas.iter().any(|w| !(*w > 0.0)) || !(self.volume > 0.0) {
            return Err(Error::InvalidInput("mode frequencies and volume must be positive".into()));
        }
        Ok(())
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Frequencies after absorbing the order-q² self-energies.
#[derive(Clone, Debug, PartialEq)]
pub struct Renormalized {
    /// ω̃_m
    pub omega_m: f64,
    /// ω_kj = ω_k δ_kj + (ω_k + ω_j)θ_kj
    pub mode_matrix: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
}

/// ω̃_m² = ω_m² + (q²/mv)Σ_k (e_k·û)²α_k² and
/// θ_kj = −(q²/2mv) e_k·e_j (1−α_k)(1−α_j) / (√(ω_k ω_j)(ω_k + ω_j)).
pub fn renormalized_frequencies(spec: &ContinuumSpec, profile: &GaugeProfile, modes: &DiscreteModes) -> Result<Renormalized> {
    profile.validate()?;
    modes.validate()?;
    let c = spec.charge_sq_over_mass() / modes.volume;
    let wm = spec.omega_m;
    let alphas: Vec<f64> = modes.omegas.iter().map(|&w| profile.alpha_at(wm, w)).collect();
    let shift: f64 = modes.polarizations.iter().zip(&alphas).map(|(e, a)| dot(e, &modes.dipole).powi(2) * a * a).sum();
    let n = modes.omegas.len();
    let w = &modes.omegas;
    let theta: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    -0.5 * c * dot(&modes.polarizations[k], &modes.polarizations[j]) * (1.0 - alphas[k]) * (1.0 - alphas[j])
                        / ((w[k] * w[j]).sqrt() * (w[k] + w[j]))
                })
                .collect()
        })
        .collect();
    let mode_matrix = (0..n)
        .map(|k| (0..n).map(|j| if k == j { w[k] } else { 0.0 } + (w[k] + w[j]) * theta[k][j]).collect())
        .collect();
    Ok(Renormalized { omega_m: (wm * wm + c * shift).sqrt(), mode_matrix, theta })
}

/// Modes coupled to a dipole through λ_k = ⟨0|A_k²|0⟩ projected on the dipole
/// axis. In the continuum λ(ω)dω = ω dω/(6π²).
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSet {
    pub omegas: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl ModeSet {
    /// Uniform grid ω_k = kω_M/K, k = 1..K, with trapezoid weights; the ω = 0
    /// end carries no weight because λ vanishes there.
    pub fn continuum(spec: &ContinuumSpec, k_modes: usize) -> Result<ModeSet> {
        spec.validate()?;
        if k_modes < 2 {
            return Err(Error::InvalidInput("a continuum grid needs at least two modes".into()));
        }
        let h = spec.omega_max / k_modes as f64;
        let omegas: Vec<f64> = (1..=k_modes).map(|k| k as f64 * h).collect();
        let lambdas = omegas
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let weight = if i + 1 == k_modes { 0.5 * h } else { h };
                weight * w / (6.0 * PI * PI)
            })
            .collect();
        Ok(ModeSet { omegas, lambdas })
    }

    pub fn single(omega: f64, lambda: f64) -> ModeSet {
        ModeSet { omegas: vec![omega], lambdas: vec![lambda] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelShift {
    pub value: f64,
    /// (material level m, mode index k) pairs dropped as resonant.
    pub excluded: Vec<(usize, usize)>,
}

/// Second-order on-shell shift of level n in gauge α over the lowest `levels`
/// material states:
/// Δⁿ = q²[(1−α)²Σλ_k/2m + α² x²_nn Σω_kλ_k
///        + Σ_k λ_k Σ_{m≠n} |x_nm|² ((1−α)ω_nm + αω_k)² / (ω_nm − ω_k)].
pub fn level_shift(
    material: &MaterialSpectrum,
    spec: &ContinuumSpec,
    alpha: f64,
    n: usize,
    levels: usize,
    modes: &ModeSet,
) -> Result<LevelShift> {
    if levels > material.n_levels() || n >= levels {
        return Err(Error::Dimension(format!("level {n} in a basis of {levels} of {}", material.n_levels())));
    }
    if modes.omegas.len() != modes.lambdas.len() {
        return Err(Error::InvalidInput("mode frequencies and weights must match".into()));
    }
    let mass = material.m_eff;
    let q2 = spec.charge_sq(mass);
    let sum_l: f64 = modes.lambdas.iter().sum();
    let sum_wl: f64 = modes.omegas.iter().zip(&modes.lambdas).map(|(w, l)| w * l).sum();
    let mut value = (1.0 - alpha).powi(2) * sum_l / (2.0 * mass) + alpha * alpha * material.x2(n, n) * sum_wl;
    let mut excluded = vec![];
    for m in (0..levels).filter(|&m| m != n) {
        let x2 = material.x(n, m).powi(2);
        let w_nm = material.omega(n, m);
        let mut acc = 0.0;
        for (k, (&w, &l)) in modes.omegas.iter().zip(&modes.lambdas).enumerate() {
            let den = w_nm - w;
            if den.abs() < RESONANCE_TOL {
                excluded.push((m, k));
                continue;
            }
            acc += l * ((1.0 - alpha) * w_nm + alpha * w).powi(2) / den;
        }
        value += x2 * acc;
    }
    Ok(LevelShift { value: q2 * value, excluded })
}

/// Γ_nm = q²ω_nm³|x_nm|²/(3π) for n > m.
pub fn golden_rule(material: &MaterialSpectrum, spec: &ContinuumSpec, n: usize, m: usize) -> Result<f64> {
    if n <= m || n >= material.n_levels() {
        return Err(Error::InvalidInput(format!("emission needs n > m within the basis (n={n}, m={m})")));
    }
    let q2 = spec.charge_sq(material.m_eff);
    Ok(q2 * material.omega(n, m).powi(3) * material.x(n, m).powi(2) / (3.0 * PI))
}

/// A Lindblad generator with jump terms γ(LρL† − ½{L†L, ρ}).
#[derive(Clone, Debug)]
pub struct MasterEquation {
    pub h: Operator,
    pub jumps: Vec<(f64, Operator)>,
    /// rates[n][m] = Γ_nm for transitions n → m; empty for models not built
    /// from material levels.
    pub rates: Vec<Vec<f64>>,
}

impl MasterEquation {
    pub fn stationary(&self) -> Result<DensityMatrix> {
        lindblad_steady(&self.h, &self.jumps)
    }

    /// Populations under the rate equations implied by `rates`, which is
    /// exact for diagonal initial states since H̄ is diagonal.
    pub fn evolve_populations(&self, p0: &[f64], t_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.rates.len();
        if n == 0 || p0.len() != n {
            return Err(Error::Dimension(format!("{} populations for {n} levels", p0.len())));
        }
        // dP_m/dt = Σ_{k>m} Γ_km P_k − (Σ_j Γ_mj) P_m
        let w = Mat::from_fn(n, n, |m, k| {
            if m == k {
                -self.rates[m].iter().sum::<f64>()
            } else if k > m {
                self.rates[k][m]
            } else {
                0.0
            }
        });
        let mut p = Col::from_fn(n, |i| p0[i]);
        let mut out = vec![p0.to_vec()];
        let mut cached: Option<(f64, Mat<f64>)> = None;
        for win in t_grid.windows(2) {
            let dt = win[1] - win[0];
            let step = match &cached {
                Some((h, e)) if *h == dt => e.clone(),
                _ => {
                    let e = expm(&(&w * faer::Scale(dt)));
                    cached = Some((dt, e.clone()));
                    e
                }
            };
            p = &step * &p;
            out.push((0..n).map(|i| p[i]).collect());
        }
        Ok(out)
    }
}

/// Exponential of an upper-triangular matrix by Parlett's recurrence, with a
/// scaled Taylor series when diagonal entries nearly coincide.
fn expm(a: &Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let close = (0..n).any(|i| {
        (i + 1..n).any(|j| (diag[i] - diag[j]).abs() <= 1e-6 * (1.0 + diag[i].abs().max(diag[j].abs())))
    });
    if !close {
        let mut f = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            f[(i, i)] = diag[i].exp();
        }
        for d in 1..n {
            for i in 0..n - d {
                let j = i + d;
                let mut s = a[(i, j)] * (f[(j, j)] - f[(i, i)]);
                for k in i + 1..j {
                    s += a[(i, k)] * f[(k, j)] - f[(i, k)] * a[(k, j)];
                }
                f[(i, j)] = s / (diag[j] - diag[i]);
            }
        }
        return f;
    }
    let norm = (0..n).map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a * faer::Scale(0.5f64.powi(squarings));
    let mut term = Mat::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=20 {
        term = &term * &b * faer::Scale(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Zero-temperature master equation on the lowest `levels` material states:
/// H̄ = Σ_n (ε_n + Δⁿ)|n⟩⟨n| and jumps |m⟩⟨n| at rate Γ_nm.
pub fn build_master_equation(
    material: &MaterialSpectrum,
    spec: &ContinuumSpec,
    levels: usize,
    alpha: f64,
    modes: &ModeSet,
) -> Result<MasterEquation> {
    spec.validate()?;
    if levels < 2 || levels > material.n_levels() {
        return Err(Error::Dimension(format!("cannot keep {levels} of {} levels", material.n_levels())));
    }
    let mut diag = vec![];
    for n in 0..levels {
        diag.push(material.levels[n] + level_shift(material, spec, alpha, n, material.n_levels(), modes)?.value);
    }
    let mut rates = vec![vec![0.0; levels]; levels];
    let mut jumps = vec![];
    for n in 1..levels {
        for m in 0..n {
            let g = golden_rule(material, spec, n, m)?;
            rates[n][m] = g;
            if g > 0.0 {
                let l = Operator::from_real_fn(vec![levels], |i, j| if i == m && j == n { 1.0 } else { 0.0 });
                jumps.push((g, l));
            }
        }
    }
    Ok(MasterEquation { h: Operator::diagonal(&diag), jumps, rates })
}

/// (ω_m/2)σ^z + ω a†a + g(σ⁺a + σ⁻a†), plus g(σ⁺a† + σ⁻a) when
/// `counter_rotating` is set.
pub fn qubit_cavity_hamiltonian(omega_m: f64, omega: f64, g: f64, n_fock: usize, counter_rotating: bool) -> Operator {
    let a = destroy(n_fock);
    let id_q = Operator::identity(vec![2]);
    let id_f = Operator::identity(vec![n_fock]);
    let sp = tensor(&pauli::plus(), &id_f);
    let sm = tensor(&pauli::minus(), &id_f);
    let a = tensor(&id_q, &a);
    let ad = a.adjoint();
    let mut h = &tensor(&pauli::z(), &id_f).scale_real(0.5 * omega_m) + &(&ad * &a).scale_real(omega);
    h = &h + &(&(&sp * &a) + &(&sm * &ad)).scale_real(g);
    if counter_rotating {
        h = &h + &(&(&sp * &ad) + &(&sm * &a)).scale_real(g);
    }
    h
}

/// Local model: qubit decay at rate Γ and cavity loss at rate κ, each acting
/// on its own subsystem.
pub fn local_master_equation(h: &Operator, gamma: f64, kappa: f64) -> Result<MasterEquation> {
    if h.dims().len() != 2 || h.dims()[0] != 2 {
        return Err(Error::Dimension("local model needs a qubit ⊗ cavity Hamiltonian".into()));
    }
    let nf = h.dims()[1];
    let sm = tensor(&pauli::minus(), &Operator::identity(vec![nf]));
    let a = tensor(&Operator::identity(vec![2]), &destroy(nf));
    Ok(MasterEquation { h: h.clone(), jumps: vec![(gamma, sm), (kappa, a)], rates: vec![] })
}

/// Coupling of the dipole to mode ω in the JC gauge, q√(ω ω_m/mv)/(ω_m+ω);
/// the profile α = ω_m/(ω_m+ω) leaves only this number-conserving term.
pub fn jc_continuum_coupling(spec: &ContinuumSpec, volume: f64, omega: f64) -> f64 {
    let wm = spec.omega_m;
    (spec.charge_sq_over_mass() * omega * wm / volume).sqrt() / (wm + omega)
}
