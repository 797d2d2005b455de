//! Single-mode α-gauge light-matter Hamiltonian in the dipole approximation,
//! the gauge-fixing unitaries that connect different α, photon-number
//! observables and dynamics under a time-dependent coupling.
//!
//! Units: ω_m = 1 (the material's first transition), ω = δ. The coupling
//! scale s = q/√(2ωv) is fixed by s = η/x_01 so that η is the usual
//! dimensionless dipole coupling. With X = a + a†, Y = i(a† − a):
//!
//! H_α = H_m + ω(a†a + ½) − (1−α)(s/m) p X + (1−α)² (s²/2m) X²
//!       + α s ω x Y + α² s² ω x²

use crate::data::TimeSeries;
use crate::material::MaterialSpectrum;
use crate::opalg::{
    eig_hermitian, evolve_schrodinger, expi, expi_from_eigen, ground_state, number, quad_x, quad_x_sq, quad_y,
    tensor, Eigen, EvolveOptions, Operator, StateVector,
};
use crate::{Error, Result};

/// Residual target for Lanczos ground states, relative to ‖H‖.
const GROUND_TOL: f64 = 1e-13;

/// A single-mode cavity coupled to a truncated material.
#[derive(Clone, Copy, Debug)]
pub struct SystemConfig<'a> {
    pub material: &'a MaterialSpectrum,
    /// Material levels retained.
    pub n_levels: usize,
    /// Photon Fock states retained.
    pub n_fock: usize,
    /// Detuning δ = ω/ω_m.
    pub delta: f64,
    /// Dimensionless coupling η = q x_01/√(2ωv).
    pub eta: f64,
    pub alpha: f64,
}

impl<'a> SystemConfig<'a> {
    /// Config with the default photon cutoff for this η.
    pub fn new(material: &'a MaterialSpectrum, n_levels: usize, delta: f64, eta: f64, alpha: f64) -> Result<Self> {
        let cfg = SystemConfig { material, n_levels, n_fock: default_n_fock(eta), delta, eta, alpha };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_fock < 4 {
            return Err(Error::InvalidInput(format!("n_fock = {} is below 4", self.n_fock)));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidInput(format!("eta must be finite and non-negative, got {}", self.eta)));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::InvalidInput(format!("delta must be positive, got {}", self.delta)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidInput("alpha must be finite".into()));
        }
        if self.n_levels < 2 || self.n_levels > self.material.n_levels() {
            return Err(Error::Dimension(format!(
                "{} material levels requested, {} available",
                self.n_levels,
                self.material.n_levels()
            )));
        }
        Ok(())
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        SystemConfig { alpha, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        SystemConfig { eta, ..self }
    }

    pub fn with_fock(self, n_fock: usize) -> Self {
        SystemConfig { n_fock, ..self }
    }

    pub fn with_levels(self, n_levels: usize) -> Self {
        SystemConfig { n_levels, ..self }
    }

    /// Coupling scale s = η/x_01.
    pub fn coupling_scale(&self) -> f64 {
        self.eta / self.material.x01()
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.n_levels, self.n_fock]
    }
}

/// Gauge choice: one α for every mode, the Jaynes-Cummings profile, or
/// α sampled at given frequencies and linearly interpolated between them.
#[derive(Clone, Debug, PartialEq)]
pub enum GaugeProfile {
    Scalar(f64),
    JaynesCummings,
    Sampled { omegas: Vec<f64>, alphas: Vec<f64> },
}

impl GaugeProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            GaugeProfile::Scalar(a) if !a.is_finite() => Err(Error::InvalidInput("alpha must be finite".into())),
            GaugeProfile::Sampled { omegas, alphas } => {
                if omegas.is_empty() || omegas.len() != alphas.len() {
                    return Err(Error::InvalidInput("sampled gauge profile needs matching, non-empty tables".into()));
                }
                if omegas.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidInput("sampled gauge frequencies must increase".into()));
                }
                if alphas.iter().any(|a| !a.is_finite()) {
                    return Err(Error::InvalidInput("alpha must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// α at mode frequency ω for a material transition ω_m.
    pub fn alpha_at(&self, omega_m: f64, omega: f64) -> f64 {
        match self {
            GaugeProfile::Scalar(a) => *a,
            GaugeProfile::JaynesCummings => alpha_jc(omega_m, omega),
            GaugeProfile::Sampled { omegas, alphas } => {
                let k = omegas.partition_point(|&w| w < omega);
                if k == 0 {
                    alphas[0]
                } else if k == omegas.len() {
                    alphas[k - 1]
                } else {
                    let f = (omega - omegas[k - 1]) / (omegas[k] - omegas[k - 1]);
                    alphas[k - 1] + f * (alphas[k] - alphas[k - 1])
                }
            }
        }
    }
}

/// The gauge that removes counter-rotating bilinear terms: ω_m/(ω_m + ω).
pub fn alpha_jc(omega_m: f64, omega: f64) -> f64 {
    omega_m / (omega_m + omega)
}

/// Photon cutoff that keeps the displaced vacuum well inside the basis.
pub fn default_n_fock(eta: f64) -> usize {
    20 + (40.0 * eta * eta).ceil() as usize
}

/// Coupling of a harmonic material in the oscillator convention used for the
/// bilinear coefficients u^± = (η'ω_m/2)√δ[(1−α) ∓ δα]: η' = −2η/√δ.
pub fn oscillator_eta(eta: f64, delta: f64) -> f64 {
    -2.0 * eta / delta.sqrt()
}

/// H_α split by powers of the coupling: H(c) = bare + c·linear + c²·quadratic,
/// where c scales s. The full Hamiltonian is c = 1.
#[derive(Clone, Debug)]
pub struct CouplingParts {
    pub bare: Operator,
    pub linear: Operator,
    pub quadratic: Operator,
}

impl CouplingParts {
    pub fn at(&self, c: f64) -> Operator {
        &(&self.bare + &self.linear.scale_real(c)) + &self.quadratic.scale_real(c * c)
    }
}

/// Material operators on a retained set of levels.
#[derive(Clone, Debug)]
pub struct MatterOps {
    pub h: Operator,
    pub x: Operator,
    /// The operator used for the x² self-energy.
    pub x2: Operator,
    pub p: Operator,
    pub mass: f64,
}

impl MatterOps {
    /// Projections P O P of H_m, x, x² and p onto the lowest `levels` states.
    pub fn projected(spec: &MaterialSpectrum, levels: usize) -> Result<Self> {
        Ok(MatterOps {
            h: spec.h_op(levels)?,
            x: spec.x_op(levels)?,
            x2: spec.x2_op(levels)?,
            p: spec.p_op(levels)?,
            mass: spec.m_eff,
        })
    }

    /// Operators obtained by replacing x and p with PxP and PpP, so the
    /// self-energy uses (PxP)² rather than P x² P.
    pub fn substituted(spec: &MaterialSpectrum, levels: usize) -> Result<Self> {
        let x = spec.x_op(levels)?;
        Ok(MatterOps { h: spec.h_op(levels)?, x2: &x * &x, x, p: spec.p_op(levels)?, mass: spec.m_eff })
    }

    pub fn levels(&self) -> usize {
        self.h.dim()
    }
}

/// Free field energy ω(a†a + ½) on `n_fock` states.
pub fn field_energy(n_fock: usize, omega: f64) -> Operator {
    Operator::diagonal(&(0..n_fock).map(|n| omega * (n as f64 + 0.5)).collect::<Vec<_>>())
}

/// Assemble the coupling-ordered parts of H_α from material operators.
pub fn assemble_parts(matter: &MatterOps, n_fock: usize, delta: f64, s: f64, alpha: f64) -> CouplingParts {
    let (w, a, mass) = (delta, alpha, matter.mass);
    let id_m = Operator::identity(vec![matter.levels()]);
    let id_f = Operator::identity(vec![n_fock]);
    let bare = &tensor(&matter.h, &id_f) + &tensor(&id_m, &field_energy(n_fock, w));
    let linear = &tensor(&matter.p, &quad_x(n_fock)).scale_real(-(1.0 - a) * s / mass)
        + &tensor(&matter.x, &quad_y(n_fock)).scale_real(a * s * w);
    let quadratic = &tensor(&id_m, &quad_x_sq(n_fock)).scale_real((1.0 - a).powi(2) * s * s / (2.0 * mass))
        + &tensor(&matter.x2, &id_f).scale_real(a * a * s * s * w);
    CouplingParts { bare, linear, quadratic }
}

pub fn coupling_parts(cfg: &SystemConfig) -> Result<CouplingParts> {
    cfg.validate()?;
    let matter = MatterOps::projected(cfg.material, cfg.n_levels)?;
    Ok(assemble_parts(&matter, cfg.n_fock, cfg.delta, cfg.coupling_scale(), cfg.alpha))
}

/// The α-gauge Hamiltonian on (material levels) ⊗ (Fock states).
pub fn build_h_alpha(cfg: &SystemConfig) -> Result<Operator> {
    Ok(coupling_parts(cfg)?.at(1.0))
}

/// The gauge generator s·x ⊗ (a + a†), so that R = exp(i(α_from − α_to) G).
pub fn gauge_generator(cfg: &SystemConfig) -> Result<Operator> {
    cfg.validate()?;
    let x = cfg.material.x_op(cfg.n_levels)?;
    Ok(tensor(&x, &quad_x(cfg.n_fock)).scale_real(cfg.coupling_scale()))
}

/// R with H_to = R H_from R†.
pub fn gauge_unitary(cfg: &SystemConfig, alpha_from: f64, alpha_to: f64) -> Result<Operator> {
    let g = gauge_generator(cfg)?;
    expi(&g.scale_real(alpha_from - alpha_to))
}

/// Photon number a†a on the composite space.
pub fn photon_number_rel(cfg: &SystemConfig) -> Result<Operator> {
    cfg.validate()?;
    Ok(tensor(&Operator::identity(vec![cfg.n_levels]), &number(cfg.n_fock)))
}

/// Number operator of the field mode after its A² self-energy is absorbed:
/// ω(a†a + ½) + (1−α)²(s²/2m)X² = ω̃(c†c + ½).
pub fn dressed_photon_number(cfg: &SystemConfig) -> Result<Operator> {
    cfg.validate()?;
    let w = cfg.delta;
    let s = cfg.coupling_scale();
    let kappa = (1.0 - cfg.alpha).powi(2) * s * s / (2.0 * cfg.material.m_eff);
    let w_dressed = w * (1.0 + 4.0 * kappa / w).sqrt();
    let nf = cfg.n_fock;
    let field = &field_energy(nf, w) + &quad_x_sq(nf).scale_real(kappa);
    let c_num = &field.scale_real(1.0 / w_dressed) - &Operator::identity(vec![nf]).scale_real(0.5);
    Ok(tensor(&Operator::identity(vec![cfg.n_levels]), &c_num))
}

/// Ground state of H_α. A near-degenerate ground level is an error that
/// carries the photon number of both lowest states.
pub fn ground(cfg: &SystemConfig) -> Result<StateVector> {
    let h = build_h_alpha(cfg)?;
    let g = ground_state(&h, GROUND_TOL)?;
    let scale = g.energy.abs().max(1.0);
    if g.next_ritz - g.energy < 1e-8 * scale {
        let e = eig_hermitian(&h)?;
        let n = photon_number_rel(cfg)?;
        let branches = vec![n.expect(&e.vector(0)).re, n.expect(&e.vector(1)).re];
        return Err(Error::DegenerateGround { gap: e.values[1] - e.values[0], branches });
    }
    Ok(g.state)
}

/// N_α = ⟨G_α| a†a |G_α⟩.
pub fn ground_photons(cfg: &SystemConfig) -> Result<f64> {
    let psi = ground(cfg)?;
    Ok(photon_number_rel(cfg)?.expect(&psi).re)
}

/// A quantity recomputed at a larger truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Convergence {
    pub value: f64,
    /// Change when n_fock grows by 8.
    pub fock_change: f64,
    /// Change when four more material levels are kept.
    pub level_change: f64,
    pub converged: bool,
}

/// Evaluate `f` at `cfg` and at the enlarged truncations. When the material
/// has too few levels to enlarge, the level change is reported as infinite.
pub fn check_convergence(cfg: &SystemConfig, tol: f64, f: impl Fn(&SystemConfig) -> Result<f64>) -> Result<Convergence> {
    let value = f(cfg)?;
    let fock_change = (f(&cfg.with_fock(cfg.n_fock + 8))? - value).abs();
    let level_change = if cfg.n_levels + 4 <= cfg.material.n_levels() {
        (f(&cfg.with_levels(cfg.n_levels + 4))? - value).abs()
    } else {
        f64::INFINITY
    };
    let scale = value.abs().max(1.0);
    let converged = fock_change <= tol * scale && level_change <= tol * scale;
    Ok(Convergence { value, fock_change, level_change, converged })
}

/// Switching function μ(t) multiplying the coupling, with its analytic derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope {
    Constant(f64),
    /// 1 on [on, off), 0 elsewhere.
    Step { on: f64, off: f64 },
    Gaussian { center: f64, width: f64 },
    /// ½(1 − cos(2π(t − start)/(end − start))) on [start, end], 0 elsewhere.
    RaisedCosine { start: f64, end: f64 },
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Envelope::Constant(c) => c,
            Envelope::Step { on, off } => {
                if t >= on && t < off {
                    1.0
                } else {
                    0.0
                }
            }
            Envelope::Gaussian { center, width } => (-(t - center).powi(2) / (2.0 * width * width)).exp(),
            Envelope::RaisedCosine { start, end } => {
                if t <= start || t >= end {
                    0.0
                } else {
                    0.5 * (1.0 - (2.0 * std::f64::consts::PI * (t - start) / (end - start)).cos())
                }
            }
        }
    }

    /// dμ/dt, or None where the envelope is not differentiable.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        match *self {
            Envelope::Constant(_) => Some(0.0),
            Envelope::Step { .. } => None,
            Envelope::Gaussian { center, width } => Some(-(t - center) / (width * width) * self.value(t)),
            Envelope::RaisedCosine { start, end } => {
                if t <= start || t >= end {
                    Some(0.0)
                } else {
                    let k = 2.0 * std::f64::consts::PI / (end - start);
                    Some(0.5 * k * (k * (t - start)).sin())
                }
            }
        }
    }
}

/// Bare initial state: material ground level and photon vacuum.
pub fn bare_ground(cfg: &SystemConfig) -> StateVector {
    StateVector::basis(cfg.dims(), 0)
}

/// H_α(t) = H_m + H_ph + V^α(η μ(t)).
pub fn h_of_t(cfg: &SystemConfig, envelope: &Envelope, t: f64) -> Result<Operator> {
    Ok(coupling_parts(cfg)?.at(envelope.value(t)))
}

/// Photon number N_α(t) = ⟨g|U_α(t)† a†a U_α(t)|g⟩ starting from the bare ground state.
pub fn evolve_switched(cfg: &SystemConfig, envelope: &Envelope, t_grid: &[f64], opts: EvolveOptions) -> Result<TimeSeries> {
    let parts = coupling_parts(cfg)?;
    let n = photon_number_rel(cfg)?;
    let states = evolve_schrodinger(|t| parts.at(envelope.value(t)), &bare_ground(cfg), t_grid, opts)?;
    let values = states.iter().map(|psi| n.expect(psi).re).collect();
    Ok(TimeSeries::new(t_grid.to_vec(), values))
}

/// Time-dependent gauge change of H_α(t) toward α′ with the coupling switched by μ(t).
struct MovingFrame {
    parts: CouplingParts,
    generator: Eigen,
    /// (α − α′)
    angle: f64,
    envelope: Envelope,
}

impl MovingFrame {
    fn new(cfg: &SystemConfig, alpha_prime: f64, envelope: &Envelope) -> Result<Self> {
        Ok(MovingFrame {
            parts: coupling_parts(cfg)?,
            generator: eig_hermitian(&gauge_generator(cfg)?)?,
            angle: cfg.alpha - alpha_prime,
            envelope: *envelope,
        })
    }

    fn rotation(&self, t: f64) -> Operator {
        expi_from_eigen(&self.generator, self.angle * self.envelope.value(t))
    }

    /// R H_α(t) R† + iṘR†, where iṘR† = −(α−α′) μ̇ G.
    fn hamiltonian(&self, t: f64) -> Result<Operator> {
        let h = self.parts.at(self.envelope.value(t));
        if self.angle == 0.0 {
            return Ok(h);
        }
        let rate = self.envelope.derivative(t).ok_or_else(|| {
            Error::InvalidInput(format!("envelope {:?} has no derivative at t = {t}", self.envelope))
        })?;
        let r = self.rotation(t);
        let g = &self.generator;
        let gen = &(&g.vectors * &Operator::diagonal(&g.values)) * &g.vectors.adjoint();
        Ok(&h.conjugate_by(&r).hermitian_part() - &gen.scale_real(self.angle * rate))
    }
}

/// The Hamiltonian that generates R(t)|ψ_α(t)⟩, with R(t) = exp(i(α−α′) μ(t) s x X).
pub fn transformed_h_of_t(cfg: &SystemConfig, alpha_prime: f64, envelope: &Envelope, t: f64) -> Result<Operator> {
    MovingFrame::new(cfg, alpha_prime, envelope)?.hamiltonian(t)
}

/// N_α(t) computed in the moving frame: evolve R(t₀)|g⟩ under the transformed
/// Hamiltonian and measure R a†a R†.
pub fn evolve_switched_transformed(
    cfg: &SystemConfig,
    alpha_prime: f64,
    envelope: &Envelope,
    t_grid: &[f64],
    opts: EvolveOptions,
) -> Result<TimeSeries> {
    if t_grid.is_empty() {
        return Ok(TimeSeries::new(vec![], vec![]));
    }
    let frame = MovingFrame::new(cfg, alpha_prime, envelope)?;
    for &t in t_grid {
        frame.hamiltonian(t)?;
    }
    let n = photon_number_rel(cfg)?;
    let psi0 = frame.rotation(t_grid[0]).apply(&bare_ground(cfg));
    let h = |t: f64| frame.hamiltonian(t).expect("derivative checked on the grid");
    let states = evolve_schrodinger(h, &psi0, t_grid, opts)?;
    let values = t_grid
        .iter()
        .zip(&states)
        .map(|(&t, psi)| n.conjugate_by(&frame.rotation(t)).expect(psi).re)
        .collect();
    Ok(TimeSeries::new(t_grid.to_vec(), values))
}
