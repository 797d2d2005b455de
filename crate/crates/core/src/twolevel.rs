//! Two-level truncations of the single-mode α-gauge Hamiltonian and the maps
//! that relate them. P projects onto the lowest material levels; PxP and PpP
//! replace x and p in the standard models.

use crate::gauge::{assemble_parts, build_h_alpha, field_energy, MatterOps, SystemConfig};
use crate::material::MaterialSpectrum;
use crate::opalg::{eig_hermitian, eigvals_hermitian, expi, pauli, quad_x, quad_x_sq, tensor, Operator};
use crate::{Error, Result};

/// Extra photon states used when a projected unitary is built in a larger space.
const EMBED_EXTRA_FOCK: usize = 10;

#[derive(Clone, Copy, Debug)]
pub struct TwoLevelParams<'a> {
    pub material: &'a MaterialSpectrum,
    /// Levels kept by P (two for the two-level models).
    pub levels: usize,
    /// Material levels of the embedding in which P R P is formed.
    pub embed_levels: usize,
    pub n_fock: usize,
    pub delta: f64,
    pub eta: f64,
    pub alpha: f64,
}

impl<'a> TwoLevelParams<'a> {
    /// Two retained levels, the default photon cutoff and an embedding of up
    /// to 24 material levels.
    pub fn new(material: &'a MaterialSpectrum, delta: f64, eta: f64, alpha: f64) -> Self {
        TwoLevelParams {
            material,
            levels: 2,
            embed_levels: material.n_levels().min(24),
            n_fock: crate::gauge::default_n_fock(eta),
            delta,
            eta,
            alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels < 2 || self.levels > self.embed_levels || self.embed_levels > self.material.n_levels() {
            return Err(Error::Dimension(format!(
                "need 2 <= levels ({}) <= embed_levels ({}) <= material levels ({})",
                self.levels,
                self.embed_levels,
                self.material.n_levels()
            )));
        }
        self.system(self.levels).validate()
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        TwoLevelParams { alpha, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        TwoLevelParams { eta, ..self }
    }

    /// Transition dipole x_01.
    pub fn x01(&self) -> f64 {
        self.material.x01()
    }

    pub fn coupling_scale(&self) -> f64 {
        self.eta / self.x01()
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.levels, self.n_fock]
    }

    fn system(&self, n_levels: usize) -> SystemConfig<'a> {
        SystemConfig {
            material: self.material,
            n_levels,
            n_fock: self.n_fock,
            delta: self.delta,
            eta: self.eta,
            alpha: self.alpha,
        }
    }

    /// The untruncated reference configuration with `n_levels` material levels.
    pub fn exact_config(&self, n_levels: usize) -> SystemConfig<'a> {
        self.system(n_levels)
    }
}

/// H_α² = PH_mP + PH_phP + V^α(PxP, PpP).
pub fn standard_model(params: &TwoLevelParams) -> Result<Operator> {
    params.validate()?;
    let matter = MatterOps::substituted(params.material, params.levels)?;
    Ok(assemble_parts(&matter, params.n_fock, params.delta, params.coupling_scale(), params.alpha).at(1.0))
}

/// 𝒢_{αα′} = P R_{αα′} P, with R formed on the embedding and P keeping the
/// retained levels and the first n_fock photon states.
pub fn cal_g(params: &TwoLevelParams, alpha: f64, alpha_prime: f64) -> Result<Operator> {
    params.validate()?;
    let (big_m, big_f) = (params.embed_levels, params.n_fock + EMBED_EXTRA_FOCK);
    let x = params.material.x_op(big_m)?;
    let g = tensor(&x, &quad_x(big_f)).scale_real(params.coupling_scale() * (alpha - alpha_prime));
    let r = expi(&g)?;
    let keep: Vec<usize> =
        (0..params.levels).flat_map(|i| (0..params.n_fock).map(move |j| i * big_f + j)).collect();
    r.select(&keep, Some(params.dims()))
}

/// 𝒯_{αα′} = exp(i(α−α′) s PxP X), unitary on the truncated space.
pub fn cal_t(params: &TwoLevelParams, alpha: f64, alpha_prime: f64) -> Result<Operator> {
    params.validate()?;
    let x = params.material.x_op(params.levels)?;
    let g = tensor(&x, &quad_x(params.n_fock)).scale_real(params.coupling_scale() * (alpha - alpha_prime));
    expi(&g)
}

/// H̃_α² = 𝒢_{1α} PH_mP 𝒢_{1α}† + 𝒢_{0α} PH_phP 𝒢_{0α}†.
pub fn model_tilde(params: &TwoLevelParams, alpha: f64) -> Result<Operator> {
    let g1 = cal_g(params, 1.0, alpha)?;
    let g0 = cal_g(params, 0.0, alpha)?;
    let id_m = Operator::identity(vec![params.levels]);
    let id_f = Operator::identity(vec![params.n_fock]);
    let hm = tensor(&params.material.h_op(params.levels)?, &id_f);
    let hph = tensor(&id_m, &field_energy(params.n_fock, params.delta));
    Ok(&(&(&g1 * &hm) * &g1.adjoint()) + &(&(&g0 * &hph) * &g0.adjoint()))
}

/// h_α²(α′) = 𝒯_{αα′} H_α² 𝒯_{αα′}†.
pub fn model_h(params: &TwoLevelParams, alpha: f64, alpha_prime: f64) -> Result<Operator> {
    let h = standard_model(&params.with_alpha(alpha))?;
    let t = cal_t(params, alpha, alpha_prime)?;
    Ok(h.conjugate_by(&t).hermitian_part())
}

/// Coulomb-gauge two-level model with the self-energy (s²/2m)X² replaced by
/// −ω_m x_01² s² X² σ^z.
pub fn modified_a2(params: &TwoLevelParams) -> Result<Operator> {
    if params.levels != 2 {
        return Err(Error::InvalidInput("the modified self-energy is defined for two levels".into()));
    }
    let p = params.with_alpha(0.0);
    let matter = MatterOps::substituted(p.material, 2)?;
    let s = p.coupling_scale();
    let parts = assemble_parts(&matter, p.n_fock, p.delta, s, 0.0);
    let w_m = p.material.omega(1, 0);
    let replaced = tensor(&pauli::z(), &quad_x_sq(p.n_fock)).scale_real(-w_m * (p.x01() * s).powi(2));
    Ok(&(&parts.bare + &parts.linear) + &replaced)
}

/// Long-range matter momentum K and energy E in a multipolar-gauge
/// two-level truncation.
#[derive(Clone, Debug)]
pub struct MomentumObservables {
    /// Truncation of R₀₁ p R₀₁† and R₀₁ H_m R₀₁† with the standard map.
    pub standard: (Operator, Operator),
    /// Coulomb-side truncations carried over by 𝒯₀₁ as if it were a gauge change.
    pub rotated: (Operator, Operator),
}

pub fn truncated_momentum_observables(params: &TwoLevelParams) -> Result<MomentumObservables> {
    params.validate()?;
    let spec = params.material;
    let (l, nf) = (params.levels, params.n_fock);
    let s = params.coupling_scale();
    let id_m = Operator::identity(vec![l]);
    let id_f = Operator::identity(vec![nf]);
    let p = tensor(&spec.p_op(l)?, &id_f);
    let hm = tensor(&spec.h_op(l)?, &id_f);
    let qa = tensor(&id_m, &quad_x(nf)).scale_real(s);
    let k_std = &p + &qa;
    let e_std = &(&hm + &(&p * &qa).hermitian_part().scale_real(1.0 / spec.m_eff))
        + &tensor(&id_m, &quad_x_sq(nf)).scale_real(s * s / (2.0 * spec.m_eff));
    let t01 = cal_t(params, 0.0, 1.0)?;
    let k_rot = p.conjugate_by(&t01);
    let e_rot = hm.conjugate_by(&t01).hermitian_part();
    Ok(MomentumObservables { standard: (k_std, e_std), rotated: (k_rot, e_rot) })
}

/// Truncated model families compared against the exact spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TwoLevelModel {
    /// H_α²
    Standard(f64),
    /// H̃_α²
    Tilde(f64),
    /// h_α²(α′)
    Rotated(f64, f64),
    /// Coulomb model with the modified self-energy.
    ModifiedA2,
}

impl TwoLevelModel {
    pub fn build(&self, params: &TwoLevelParams) -> Result<Operator> {
        match *self {
            TwoLevelModel::Standard(a) => standard_model(&params.with_alpha(a)),
            TwoLevelModel::Tilde(a) => model_tilde(params, a),
            TwoLevelModel::Rotated(a, b) => model_h(params, a, b),
            TwoLevelModel::ModifiedA2 => modified_a2(params),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TwoLevelModel::Standard(a) => format!("H2[{a}]"),
            TwoLevelModel::Tilde(a) => format!("H2tilde[{a}]"),
            TwoLevelModel::Rotated(a, b) => format!("h2[{a}]({b})"),
            TwoLevelModel::ModifiedA2 => "H2mod".to_string(),
        }
    }
}

/// Transition energies E_k − E_0 for k = 1..=count.
pub fn transitions(h: &Operator, count: usize) -> Result<Vec<f64>> {
    let e = eigvals_hermitian(h)?;
    if e.len() <= count {
        return Err(Error::Dimension(format!("{count} transitions requested from {} levels", e.len())));
    }
    Ok(e[1..=count].iter().map(|v| v - e[0]).collect())
}

/// Truncation used for the exact reference spectrum.
#[derive(Clone, Copy, Debug)]
pub struct ExactReference {
    pub n_levels: usize,
    /// Photon states; None uses the default for each η.
    pub n_fock: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRow {
    pub model: TwoLevelModel,
    pub eta: f64,
    pub exact: Vec<f64>,
    pub approx: Vec<f64>,
    /// |approx − exact| / exact per transition.
    pub rel_errors: Vec<f64>,
}

/// Relative errors of the first `count` transitions of each model against the
/// exact multipolar spectrum, for every η.
pub fn transition_error_scan(
    material: &MaterialSpectrum,
    models: &[TwoLevelModel],
    etas: &[f64],
    delta: f64,
    count: usize,
    reference: ExactReference,
) -> Result<Vec<ErrorRow>> {
    let mut rows = vec![];
    for &eta in etas {
        let params = TwoLevelParams::new(material, delta, eta, 1.0);
        let mut exact_cfg = params.exact_config(reference.n_levels);
        if let Some(nf) = reference.n_fock {
            exact_cfg.n_fock = nf;
        }
        let exact = transitions(&build_h_alpha(&exact_cfg)?, count)?;
        for model in models {
            let approx = transitions(&model.build(&params)?, count)?;
            let rel_errors = approx.iter().zip(&exact).map(|(a, e)| (a - e).abs() / e.abs()).collect();
            rows.push(ErrorRow { model: *model, eta, exact: exact.clone(), approx, rel_errors });
        }
    }
    Ok(rows)
}

/// Projector onto the two lowest eigenstates of a material operator, tensored
/// with the photon identity.
pub fn lowest_pair_projector(matter_h: &Operator, n_fock: usize) -> Result<Operator> {
    let e = eig_hermitian(matter_h)?;
    let m = matter_h.dim();
    let p = Operator::from_fn(vec![m], |i, j| (0..2).map(|k| e.vectors.get(i, k) * e.vectors.get(j, k).conj()).sum());
    Ok(tensor(&p, &Operator::identity(vec![n_fock])))
}
