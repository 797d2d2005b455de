//! A two-level dipole at the centre of a 1-D periodic cavity in the
//! independent-boson approximation (dipole frequency dropped).
//!
//! σ^x is conserved, so the polaron transformation diagonalizes the model and
//! every field average is a closed-form mode sum. Quadratic field quantities
//! depend on σ^x only through (σ^x)² = 1, so the two σ^x sectors of the bare
//! initial state give identical maps and their equal-weight average is the
//! map itself.
//!
//! O_α denotes the canonical momentum of the α gauge, O_α = Π + P_T1 − P_Tα,
//! with Π = −D_T. α = 1 gives −D_T and α = 0 gives −E_T.

use crate::data::FieldMap;
use crate::opalg::{expi, pauli, quad_x, quad_y, tensor_all, Operator};
use crate::{Error, Result};
use faer::c64;
use std::f64::consts::PI;

/// Cavity of length L with periodic boundaries at ±L/2 and wavenumbers
/// k = 2πn/L, n = ±1..±N. The dipole sits at x = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CavitySpec {
    pub length: f64,
    pub n_modes: usize,
    pub dipole: f64,
    pub volume: f64,
}

impl CavitySpec {
    pub fn new(length: f64, n_modes: usize, dipole: f64, volume: f64) -> Result<Self> {
        let s = CavitySpec { length, n_modes, dipole, volume };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidInput("cavity length must be positive".into()));
        }
        if self.n_modes < 10 {
            return Err(Error::InvalidInput(format!("need at least 10 positive modes, got {}", self.n_modes)));
        }
        if !(self.volume > 0.0) || !self.dipole.is_finite() {
            return Err(Error::InvalidInput("volume must be positive and the dipole finite".into()));
        }
        Ok(())
    }

    /// Positive wavenumbers k_n = 2πn/L, n = 1..N (ω_k = |k|).
    pub fn wavenumbers(&self) -> Vec<f64> {
        (1..=self.n_modes).map(|n| 2.0 * PI * n as f64 / self.length).collect()
    }

    /// g_k = d√(ω_k/2v), one entry per positive k; −k couples identically.
    pub fn couplings(&self) -> Vec<f64> {
        self.wavenumbers().iter().map(|w| self.dipole * (w / (2.0 * self.volume)).sqrt()).collect()
    }

    /// Polaron displacements g_k/ω_k.
    pub fn displacements(&self) -> Vec<f64> {
        self.wavenumbers().iter().zip(self.couplings()).map(|(w, g)| g / w).collect()
    }

    fn amplitude(&self) -> f64 {
        self.dipole / self.volume
    }

    /// The 2N+1 points x_m = mL/(2N+1), |m| ≤ N, at which the truncated
    /// electrostatic sum Σ_k cos kx vanishes except at the dipole.
    pub fn sampling_grid(&self) -> Vec<f64> {
        let n = self.n_modes as i64;
        let m = (2 * n + 1) as f64;
        (-n..=n).map(|j| j as f64 * self.length / m).collect()
    }

    /// Reference value for normalized maps: the propagating field at the
    /// dipole after one round trip, ⟨O₀⁻O₀⁺⟩(L, 0) = [(d/v)(N + ½)]².
    pub fn map_normalization(&self) -> f64 {
        (self.amplitude() * (self.n_modes as f64 + 0.5)).powi(2)
    }
}

/// Materialized model on 2 ⊗ Fock^{n_fock} ⊗ ... for a chosen set of signed
/// wavenumbers. Small checks of the polaron algebra only.
#[derive(Clone, Debug)]
pub struct PolaronCheck {
    /// Σ ω_k a_k†a_k + i Σ g_k (a_k† − a_k) σ^x (zero-point energy dropped).
    pub hamiltonian: Operator,
    /// exp[i Σ (g_k/ω_k)(a_k† + a_k) σ^x]
    pub unitary: Operator,
    /// −Σ g_k²/ω_k, the energy shift of the diagonalized model.
    pub shift: f64,
    ks: Vec<f64>,
    n_fock: usize,
    spec: CavitySpec,
}

impl PolaronCheck {
    pub fn new(spec: &CavitySpec, ks: &[f64], n_fock: usize) -> Result<Self> {
        spec.validate()?;
        if ks.is_empty() || ks.iter().any(|k| *k == 0.0 || !k.is_finite()) || n_fock < 2 {
            return Err(Error::InvalidInput("need nonzero wavenumbers and at least 2 Fock states".into()));
        }
        let dims: Vec<usize> = std::iter::once(2).chain(ks.iter().map(|_| n_fock)).collect();
        let mut h = Operator::zeros(dims.clone());
        let mut gen = Operator::zeros(dims.clone());
        let mut shift = 0.0;
        for (j, &k) in ks.iter().enumerate() {
            let w = k.abs();
            let g = spec.dipole * (w / (2.0 * spec.volume)).sqrt();
            let number = Operator::from_real_fn(vec![n_fock], |a, b| if a == b { a as f64 } else { 0.0 });
            h = &h + &embed(&Operator::identity(vec![2]), &number, j, ks.len(), n_fock).scale_real(w);
            // i(a† − a) = Y
            h = &h + &embed(&pauli::x(), &quad_y(n_fock), j, ks.len(), n_fock).scale_real(g);
            gen = &gen + &embed(&pauli::x(), &quad_x(n_fock), j, ks.len(), n_fock).scale_real(g / w);
            shift -= g * g / w;
        }
        Ok(PolaronCheck { hamiltonian: h, unitary: expi(&gen)?, shift, ks: ks.to_vec(), n_fock, spec: *spec })
    }

    /// Π(x) = i Σ_k √(ω_k/2v)[a_k† e^{−ikx} − a_k e^{ikx}]
    pub fn pi(&self, x: f64) -> Operator {
        let n = self.n_fock;
        let a = Operator::from_real_fn(vec![n], |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 });
        let ad = a.adjoint();
        let mut out = Operator::zeros(self.hamiltonian.dims().to_vec());
        for (j, &k) in self.ks.iter().enumerate() {
            let c = (k.abs() / (2.0 * self.spec.volume)).sqrt();
            let ph = c64::cis(-k * x);
            let mode = &ad.scale(c64::new(0.0, c) * ph) - &a.scale(c64::new(0.0, c) * ph.conj());
            out = &out + &embed(&Operator::identity(vec![2]), &mode, j, self.ks.len(), n);
        }
        out
    }

    /// P_T1(x) = Σ_k (d/v) σ^x cos kx over the materialized wavenumbers.
    pub fn p_t1(&self, x: f64) -> Operator {
        let s: f64 = self.ks.iter().map(|k| (k * x).cos()).sum();
        let id = Operator::identity(vec![self.n_fock]);
        embed(&pauli::x(), &id, 0, self.ks.len(), self.n_fock).scale_real(self.spec.dipole / self.spec.volume * s)
    }
}

/// q ⊗ 1 ⊗ ... ⊗ m (slot j) ⊗ ... ⊗ 1
fn embed(qubit: &Operator, mode: &Operator, j: usize, modes: usize, n_fock: usize) -> Operator {
    let id = Operator::identity(vec![n_fock]);
    let mut parts: Vec<&Operator> = vec![qubit];
    for i in 0..modes {
        parts.push(if i == j { mode } else { &id });
    }
    tensor_all(&parts)
}

/// Which field average a map shows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    /// ⟨O_α²⟩ − E_vac
    Square,
    /// ⟨O_α⁻ O_α⁺⟩
    Normal,
}

/// Source part of O_α⁻ per unit σ^x for the bare excited state:
/// (d/2v)(1 − α) + Σ_{k>0} (d/v)(e^{iω_k t} − α) cos kx.
pub fn excited_amplitude(spec: &CavitySpec, alpha: f64, t: f64, x: f64) -> c64 {
    let s: c64 = spec.wavenumbers().iter().map(|k| (c64::cis(k * t) - alpha) * (k * x).cos()).sum();
    (c64::new(0.5 * (1.0 - alpha), 0.0) + s) * spec.amplitude()
}

/// Source part of O_α per unit σ^x, summed over every k with |n| ≤ N
/// (including k = 0): Σ_k (d/v)(cos(kx − ω_k t) − α cos kx).
pub fn excited_field(spec: &CavitySpec, alpha: f64, t: f64, x: f64) -> f64 {
    let mut s = 1.0 - alpha;
    for k in spec.wavenumbers() {
        for kk in [k, -k] {
            s += (kk * x - k * t).cos() - alpha * (kk * x).cos();
        }
    }
    spec.amplitude() * s
}

/// Electrostatic field P_Tα per unit σ^x: Σ_k (d/v) α cos kx.
pub fn electrostatic_field(spec: &CavitySpec, alpha: f64, x: f64) -> f64 {
    let s: f64 = 1.0 + 2.0 * spec.wavenumbers().iter().map(|k| (k * x).cos()).sum::<f64>();
    spec.amplitude() * alpha * s
}

/// Field map for the bare multipolar excited state |ε¹, 0⟩; `values[i][j]`
/// is at (x[i], t[j]).
pub fn field_map_excited(spec: &CavitySpec, alpha: f64, observable: Observable, x: &[f64], t: &[f64]) -> Result<FieldMap> {
    spec.validate()?;
    check_alpha(alpha)?;
    let values = x
        .iter()
        .map(|&x| {
            t.iter()
                .map(|&t| match observable {
                    Observable::Square => excited_field(spec, alpha, t, x).powi(2),
                    Observable::Normal => excited_amplitude(spec, alpha, t, x).norm_sqr(),
                })
                .collect()
        })
        .collect();
    Ok(FieldMap { x: x.to_vec(), t: t.to_vec(), values })
}

/// Field map for the ground state: ⟨O_α²⟩_G − E_vac = ⟨P_Tα²⟩ and
/// ⟨O_α⁻O_α⁺⟩_G = ⟨P_Tα²⟩/4, both time independent.
pub fn field_map_ground(spec: &CavitySpec, alpha: f64, observable: Observable, x: &[f64], t: &[f64]) -> Result<FieldMap> {
    spec.validate()?;
    check_alpha(alpha)?;
    let factor = match observable {
        Observable::Square => 1.0,
        Observable::Normal => 0.25,
    };
    let values = x
        .iter()
        .map(|&x| {
            let v = factor * electrostatic_field(spec, alpha, x).powi(2);
            vec![v; t.len()]
        })
        .collect();
    Ok(FieldMap { x: x.to_vec(), t: t.to_vec(), values })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() {
        return Err(Error::InvalidInput("alpha must be finite".into()));
    }
    Ok(())
}
