//! Arbitrary-gauge Dicke model: N two-level dipoles at one point of a
//! single-mode cavity, with the A² term absorbed into the mode.
//!
//! H = ω_m J^z + ½ρd² + ω_α(c†c + ½) − (𝒞_α/N)(J⁺ + J⁻)²
//!     − i(g′_α/√N)(J⁺ − J⁻)(c† + c) + i(g_α/√N)(J⁺ + J⁻)(c† − c)
//!
//! with ω_α² = ω² + (e²/m)(1−α)²ρ, 𝒞_α = ρd²(1−α²)/2,
//! g′_α = (1−α)ω_m d√(ρ/2ω_α) and g_α = αd√(ρω_α/2). The two-level
//! sum rule fixes e²/m = 2ω_m d². τ = ω_m/(2ρd²) and the level offset
//! N(ε₀ + ε₁)/2 is dropped.
//!
//! In the thermodynamic limit the Holstein–Primakoff expansion about the
//! mean field gives a two-boson quadratic form whose symplectic eigenvalues
//! are the polariton energies.

use crate::opalg::{eigvals_hermitian, Operator};
use crate::{Error, Result};
use faer::c64;

/// Largest spin number and boson dimension accepted for exact diagonalization.
pub const MAX_SPINS: usize = 16;
pub const MAX_BOSONS: usize = 60;
/// Stationarity tolerance of the mean-field solve.
const MEAN_FIELD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DickeParams {
    pub omega_m: f64,
    pub omega: f64,
    /// ρ = N/v
    pub rho: f64,
    pub d: f64,
    pub alpha: f64,
    /// Number of dipoles for finite-N runs.
    pub n_spins: usize,
    /// Boson Fock states for finite-N runs.
    pub n_bosons: usize,
}

impl DickeParams {
    /// Parameters at a given τ, with d = 1 and ρ = ω_m/2τ.
    pub fn at_tau(omega_m: f64, omega: f64, tau: f64, alpha: f64) -> Self {
        DickeParams { omega_m, omega, rho: omega_m / (2.0 * tau), d: 1.0, alpha, n_spins: 8, n_bosons: 40 }
    }

    /// Same dipole moment, density set to give τ.
    pub fn with_tau(self, tau: f64) -> Self {
        DickeParams { rho: self.omega_m / (2.0 * tau * self.d * self.d), ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        DickeParams { alpha, ..self }
    }

    pub fn with_size(self, n_spins: usize, n_bosons: usize) -> Self {
        DickeParams { n_spins, n_bosons, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [self.omega_m, self.omega, self.rho];
        if pos.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidInput("omega_m, omega and rho must be positive".into()));
        }
        if !(self.d >= 0.0 && self.d.is_finite()) || !self.alpha.is_finite() {
            return Err(Error::InvalidInput("d must be non-negative and alpha finite".into()));
        }
        Ok(())
    }

    /// τ = ω_m/(2ρd²); infinite for d = 0.
    pub fn tau(&self) -> f64 {
        self.omega_m / (2.0 * self.rho * self.d * self.d)
    }

    /// e²/m = 2ω_m d²
    pub fn charge_sq_over_mass(&self) -> f64 {
        2.0 * self.omega_m * self.d * self.d
    }

    pub fn omega_alpha(&self) -> f64 {
        (self.omega.powi(2) + self.charge_sq_over_mass() * (1.0 - self.alpha).powi(2) * self.rho).sqrt()
    }

    pub fn cal_c(&self) -> f64 {
        self.rho * self.d * self.d * (1.0 - self.alpha * self.alpha) / 2.0
    }

    pub fn g_prime(&self) -> f64 {
        (1.0 - self.alpha) * self.omega_m * self.d * (self.rho / (2.0 * self.omega_alpha())).sqrt()
    }

    pub fn g(&self) -> f64 {
        self.alpha * self.d * (self.rho * self.omega_alpha() / 2.0).sqrt()
    }
}

/// Finite-N Hamiltonian on the symmetric spin-N/2 sector ⊗ Fock space.
/// Basis order: spin index m = 0..N (J^z = m − N/2) outer, boson inner.
pub fn build_dicke_finite_n(p: &DickeParams) -> Result<Operator> {
    p.validate()?;
    let (n, nb) = (p.n_spins, p.n_bosons);
    if n == 0 || n > MAX_SPINS || nb < 2 || nb > MAX_BOSONS {
        return Err(Error::InvalidInput(format!(
            "need 1 <= N <= {MAX_SPINS} and 2 <= boson dimension <= {MAX_BOSONS}, got {n} and {nb}"
        )));
    }
    let j = n as f64 / 2.0;
    let ns = n + 1;
    // ⟨m+1|J⁺|m⟩ with J^z = m − j
    let jp = |m: usize| {
        let mz = m as f64 - j;
        (j * (j + 1.0) - mz * (mz + 1.0)).sqrt()
    };
    let jx = Operator::from_real_fn(vec![ns], |a, b| {
        if a == b + 1 {
            0.5 * jp(b)
        } else if b == a + 1 {
            0.5 * jp(a)
        } else {
            0.0
        }
    });
    // J^y = (J⁺ − J⁻)/2i
    let jy = Operator::from_fn(vec![ns], |a, b| {
        if a == b + 1 {
            c64::new(0.0, -0.5 * jp(b))
        } else if b == a + 1 {
            c64::new(0.0, 0.5 * jp(a))
        } else {
            c64::ZERO
        }
    });
    let jz = Operator::diagonal(&(0..ns).map(|m| m as f64 - j).collect::<Vec<_>>());
    let id_s = Operator::identity(vec![ns]);
    let id_b = Operator::identity(vec![nb]);
    let x = crate::opalg::quad_x(nb);
    let y = crate::opalg::quad_y(nb);
    let wa = p.omega_alpha();
    let field = Operator::diagonal(&(0..nb).map(|k| wa * (k as f64 + 0.5)).collect::<Vec<_>>());
    let sq = 1.0 / (n as f64).sqrt();

    let t = crate::opalg::tensor;
    let mut h = &t(&jz, &id_b).scale_real(p.omega_m) + &t(&id_s, &field);
    h = &h + &t(&id_s, &id_b).scale_real(0.5 * p.rho * p.d * p.d);
    // (J⁺ + J⁻)² = 4(J^x)²
    h = &h - &t(&(&jx * &jx), &id_b).scale_real(4.0 * p.cal_c() / n as f64);
    // −i(J⁺ − J⁻) = 2J^y and i(c† − c) = Y
    h = &h + &t(&jy, &x).scale_real(2.0 * p.g_prime() * sq);
    h = &h + &t(&jx, &y).scale_real(2.0 * p.g() * sq);
    Ok(h)
}

/// Parity exp[iπ(J^z + N/2 + c†c)] commutes with H. Indices of the even
/// (`even = true`) or odd sector in the basis of `build_dicke_finite_n`.
pub fn parity_indices(p: &DickeParams, even: bool) -> Vec<usize> {
    let nb = p.n_bosons;
    (0..=p.n_spins)
        .flat_map(|m| (0..nb).map(move |k| (m, k)))
        .filter(|(m, k)| ((m + k) % 2 == 0) == even)
        .map(|(m, k)| m * nb + k)
        .collect()
}

/// Lowest energies of one parity sector.
pub fn finite_n_levels(p: &DickeParams, even: bool) -> Result<Vec<f64>> {
    let h = build_dicke_finite_n(p)?;
    let idx = parity_indices(p, even);
    eigvals_hermitian(&h.select(&idx, None)?)
}

/// Excitation gap inside the parity sector of the ground state. Near τ = 1
/// it tends to 2E₋ from the normal side and E₋ from the abnormal side.
pub fn finite_n_gap(p: &DickeParams) -> Result<f64> {
    let e = finite_n_levels(p, true)?;
    Ok(e[1] - e[0])
}

/// Weight of the ground state on the highest boson Fock state.
pub fn boson_tail(p: &DickeParams) -> Result<f64> {
    let h = build_dicke_finite_n(p)?;
    let e = crate::opalg::eig_hermitian(&h)?;
    let v = e.vector(0);
    let nb = p.n_bosons;
    Ok((0..=p.n_spins).map(|m| v.amp(m * nb + nb - 1).norm_sqr()).sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Normal,
    Abnormal,
}

/// Mean field of the abnormal phase per dipole: spin polar angle θ, with the
/// spin in the x–z plane at azimuth π, and ⟨c⟩/√N = x + iy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanField {
    pub theta: f64,
    pub x: f64,
    pub y: f64,
    /// Energy per dipole of the classical configuration.
    pub energy: f64,
}

/// E/N = −(ω_m/2)cos θ + ω_α(x² + y²) − 𝒞_α sin²θ − 2g_α y sin θ
fn mean_field_energy(p: &DickeParams, v: [f64; 3]) -> f64 {
    let [th, x, y] = v;
    -0.5 * p.omega_m * th.cos() + p.omega_alpha() * (x * x + y * y) - p.cal_c() * th.sin().powi(2)
        - 2.0 * p.g() * y * th.sin()
}

/// Stationary point of the mean-field energy. The field equations give
/// x = 0 and y = g_α sin θ/ω_α. With them eliminated, the θ equation on the
/// sin θ ≠ 0 branch is linear in cos θ: cos θ = ω_m/4K, K = 𝒞_α + g_α²/ω_α.
/// The full gradient is then checked against the tolerance. The normal
/// phase is θ = 0.
pub fn mean_field(p: &DickeParams) -> Result<MeanField> {
    p.validate()?;
    if p.d == 0.0 || p.tau() >= 1.0 {
        return Ok(MeanField { theta: 0.0, x: 0.0, y: 0.0, energy: -0.5 * p.omega_m });
    }
    let (wm, wa, g, c) = (p.omega_m, p.omega_alpha(), p.g(), p.cal_c());
    let k = c + g * g / wa;
    let co = (wm / (4.0 * k)).min(1.0);
    let s = ((1.0 - co) * (1.0 + co)).sqrt();
    let th = s.atan2(co);
    let y = g * s / wa;
    let grad = [0.5 * wm * s - 2.0 * c * s * co - 2.0 * g * co * y, 0.0, 2.0 * wa * y - 2.0 * g * s];
    let norm = grad.iter().map(|q| q * q).sum::<f64>().sqrt();
    let target = MEAN_FIELD_TOL * wm.max(1.0);
    if !(norm < target) {
        return Err(Error::NonConvergence { depth: 1, achieved: norm, target });
    }
    Ok(MeanField { theta: th, x: 0.0, y, energy: mean_field_energy(p, [th, 0.0, y]) })
}

/// Quadratic fluctuation Hamiltonian
/// A b†b − K X_b² + ω_α c†c + G X_b Y_c + G′ Y_b X_c,
/// with X = a + a† and Y = i(a† − a) for either boson.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticForm {
    pub a: f64,
    pub k: f64,
    pub omega_c: f64,
    pub g: f64,
    pub g_prime: f64,
}

impl QuadraticForm {
    /// Real symmetric M with H = ½ ξᵀ M ξ + const, ξ = (x_b, p_b, x_c, p_c)
    /// and X = √2 x, Y = √2 p.
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = self.a - 4.0 * self.k;
        m[1][1] = self.a;
        m[2][2] = self.omega_c;
        m[3][3] = self.omega_c;
        m[0][3] = 2.0 * self.g;
        m[3][0] = 2.0 * self.g;
        m[1][2] = 2.0 * self.g_prime;
        m[2][1] = 2.0 * self.g_prime;
        m
    }

    /// Symplectic invariants (Δ, det M); the squared normal-mode
    /// frequencies solve E⁴ − ΔE² + det M = 0.
    pub fn invariants(&self) -> (f64, f64) {
        let m = self.matrix();
        let det2 = |a: usize, b: usize, c: usize, d: usize| m[a][c] * m[b][d] - m[a][d] * m[b][c];
        let delta = det2(0, 1, 0, 1) + det2(2, 3, 2, 3) + 2.0 * det2(0, 1, 2, 3);
        // M splits into the (x_b, p_c) and (p_b, x_c) blocks.
        let det = (m[0][0] * m[3][3] - m[0][3] * m[3][0]) * (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
        (delta, det)
    }

    /// Signed squares (E₊², E₋²); E₋² < 0 marks an unstable expansion.
    pub fn frequencies_sq(&self) -> (f64, f64) {
        let (delta, det) = self.invariants();
        let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
        let hi = 0.5 * (delta + disc);
        // det/hi avoids cancellation in the small root.
        let lo = if hi != 0.0 { det / hi } else { 0.0 };
        (hi, lo)
    }

    /// Positive definiteness of M, the condition for a stable quadratic
    /// Hamiltonian with real symplectic eigenvalues.
    pub fn is_positive(&self) -> bool {
        let m = self.matrix();
        let b1 = [m[0][0], m[3][3], m[0][0] * m[3][3] - m[0][3] * m[3][0]];
        let b2 = [m[1][1], m[2][2], m[1][1] * m[2][2] - m[1][2] * m[2][1]];
        b1.iter().chain(&b2).all(|v| *v > 0.0)
    }
}

/// Holstein–Primakoff quadratic form about the phase's mean field. In the
/// abnormal phase the spin frame is rotated to the mean spin (cos θ = τ).
pub fn hp_quadratic(p: &DickeParams, phase: Phase) -> Result<QuadraticForm> {
    p.validate()?;
    let (wa, c, g, gp) = (p.omega_alpha(), p.cal_c(), p.g(), p.g_prime());
    // J^y = −√N Y_b/2 at leading order.
    match phase {
        Phase::Normal => Ok(QuadraticForm { a: p.omega_m, k: c, omega_c: wa, g, g_prime: -gp }),
        Phase::Abnormal => {
            let tau = p.tau();
            if tau > 1.0 {
                return Err(Error::PhaseViolation { tau, what: "abnormal phase requires tau <= 1".into() });
            }
            let mf = mean_field(p)?;
            let (s, co) = mf.theta.sin_cos();
            // b†b coefficient ω_m cos θ + 4𝒞 sin²θ + 4g y sin θ.
            let a = p.omega_m * co + 4.0 * c * s * s + 4.0 * g * mf.y * s;
            Ok(QuadraticForm { a, k: c * co * co, omega_c: wa, g: g * co, g_prime: -gp })
        }
    }
}

/// Polariton energies (E₊, E₋) of the phase. A negative E₋² is reported as
/// a phase violation.
pub fn polariton_energies(p: &DickeParams, phase: Phase) -> Result<(f64, f64)> {
    let tau = p.tau();
    if phase == Phase::Normal && tau < 1.0 {
        return Err(Error::PhaseViolation { tau, what: "normal phase requires tau >= 1".into() });
    }
    let q = hp_quadratic(p, phase)?;
    let (hi, lo) = q.frequencies_sq();
    if lo < 0.0 {
        return Err(Error::PhaseViolation { tau, what: format!("lower polariton energy squared is {lo:.3e}") });
    }
    Ok((hi.sqrt(), lo.sqrt()))
}

/// The stable phase at τ.
pub fn phase_at(p: &DickeParams) -> Phase {
    if p.tau() >= 1.0 {
        Phase::Normal
    } else {
        Phase::Abnormal
    }
}

/// Signed E₋² of the normal-phase form, continued to τ < 1.
pub fn lower_polariton_sq_normal(p: &DickeParams) -> Result<f64> {
    Ok(hp_quadratic(p, Phase::Normal)?.frequencies_sq().1)
}

/// Root of the normal-phase E₋²(τ) on [lo, hi], by bisection to 1e-14.
pub fn critical_tau(p: &DickeParams, lo: f64, hi: f64) -> Result<f64> {
    let f = |t: f64| lower_polariton_sq_normal(&p.with_tau(t));
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::Bracketing { target: 0.0, lo, hi, f_lo: fa, f_hi: fb });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (f(mid)? < 0.0) == (fa < 0.0) {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (a + b))
}

/// Ground energy in the thermodynamic limit: N e_mf + ½ρd² + (E₊ + E₋ − A)/2,
/// where A is the b†b coefficient of the quadratic form.
pub fn thermodynamic_ground_energy(p: &DickeParams, n_spins: f64) -> Result<f64> {
    let phase = phase_at(p);
    let mf = mean_field(p)?;
    let q = hp_quadratic(p, phase)?;
    let (ep, em) = polariton_energies(p, phase)?;
    Ok(n_spins * mf.energy + 0.5 * p.rho * p.d * p.d + 0.5 * (ep + em - q.a))
}

/// Macroscopic α-gauge transverse polarization P_Tα = αd⟨J⁺ + J⁻⟩/v from
/// the mean field; zero in the normal phase.
pub fn order_parameter(p: &DickeParams) -> Result<f64> {
    let mf = mean_field(p)?;
    // ⟨J^x⟩/N = −sin θ/2 on the chosen branch.
    Ok(-p.alpha * p.d * p.rho * mf.theta.sin())
}

/// Macroscopic canonical field Π = √(ω_α/2v)⟨Y⟩ = y√(2ω_α ρ) from the mean field.
pub fn pi_expectation(p: &DickeParams) -> Result<f64> {
    let mf = mean_field(p)?;
    Ok(mf.y * (2.0 * p.omega_alpha() * p.rho).sqrt())
}

/// Gauge-invariant transverse polarization P_T = −ρd sin θ.
pub fn transverse_polarization(p: &DickeParams) -> Result<f64> {
    let mf = mean_field(p)?;
    Ok(-p.d * p.rho * mf.theta.sin())
}
