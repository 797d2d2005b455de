//! Configuration schema. A config is a TOML file with a `scenario` name, an
//! optional output file name and figure label, and a typed `[params]` table.

use crate::error::CliError;
use serde::de::DeserializeOwned;
use serde::Deserialize;

pub const SCENARIOS: [&str; 12] = [
    "spectrum",
    "photons",
    "truncation-compare",
    "switch",
    "detector-rate",
    "pvac",
    "energy-density",
    "udot",
    "cavity-map",
    "pointer",
    "dicke",
    "master",
];

#[derive(Deserialize)]
struct Head {
    scenario: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile<P> {
    /// Dispatched on before typed parsing.
    #[serde(rename = "scenario")]
    _scenario: String,
    /// Output file name inside the output directory.
    pub output: Option<String>,
    /// Figure label written to the header, overriding the scenario default.
    pub figure: Option<String>,
    pub params: P,
}

/// A sweep axis: an explicit list or `{ start, stop, n, log }`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub n: usize,
    #[serde(default)]
    pub log: bool,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::List(v) => v.clone(),
            Axis::Range(r) => {
                if r.n == 0 {
                    return vec![];
                }
                if r.n == 1 {
                    return vec![r.start];
                }
                let step = |k: usize| k as f64 / (r.n - 1) as f64;
                if r.log {
                    let (a, b) = (r.start.ln(), r.stop.ln());
                    (0..r.n).map(|k| (a + (b - a) * step(k)).exp()).collect()
                } else {
                    (0..r.n).map(|k| r.start + (r.stop - r.start) * step(k)).collect()
                }
            }
        }
    }

    fn check(&self, field: &str) -> Result<(), CliError> {
        if let Axis::Range(r) = self {
            if !(r.start.is_finite() && r.stop.is_finite()) {
                return Err(field_err(field, "range bounds must be finite"));
            }
            if r.log && !(r.start > 0.0 && r.stop > 0.0) {
                return Err(field_err(field, "log range needs positive bounds"));
            }
        }
        if self.values().iter().any(|v| !v.is_finite()) {
            return Err(field_err(field, "values must be finite"));
        }
        Ok(())
    }

    fn check_positive(&self, field: &str) -> Result<(), CliError> {
        self.check(field)?;
        if self.values().iter().any(|v| *v <= 0.0) {
            return Err(field_err(field, "values must be positive"));
        }
        Ok(())
    }
}

/// A gauge: a number α or the name "jc".
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum GaugeChoice {
    Alpha(f64),
    Named(String),
}

impl GaugeChoice {
    pub fn label(&self) -> String {
        match self {
            GaugeChoice::Alpha(a) => format!("{a}"),
            GaugeChoice::Named(s) => s.clone(),
        }
    }

    fn check(&self, field: &str) -> Result<(), CliError> {
        match self {
            GaugeChoice::Alpha(a) if !a.is_finite() => Err(field_err(field, "alpha must be finite")),
            GaugeChoice::Named(s) if s != "jc" => Err(field_err(field, &format!("unknown gauge {s:?}, expected a number or \"jc\""))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyName {
    Harmonic,
    DoubleWell,
    Josephson,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub family: FamilyName,
    /// Anharmonicity (ω₂₁ − ω_m)/ω_m; not used for the harmonic family.
    pub mu: Option<f64>,
    /// Material levels to solve for.
    pub levels: usize,
}

impl MaterialSpec {
    fn check(&self, field: &str) -> Result<(), CliError> {
        if self.levels < 2 {
            return Err(field_err(&format!("{field}.levels"), "need at least 2 levels"));
        }
        match (self.family, self.mu) {
            (FamilyName::Harmonic, Some(_)) => Err(field_err(&format!("{field}.mu"), "the harmonic family has mu = 0")),
            (FamilyName::Harmonic, None) => Ok(()),
            (_, Some(mu)) if mu > 0.0 && mu.is_finite() => Ok(()),
            (_, _) => Err(field_err(&format!("{field}.mu"), "a positive anharmonicity is required")),
        }
    }
}

fn default_count() -> usize {
    20
}

fn default_one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub material: MaterialSpec,
    pub delta: f64,
    pub etas: Axis,
    pub gauges: Vec<GaugeChoice>,
    pub n_levels: usize,
    pub n_fock: Option<usize>,
    /// Number of lowest levels written per point.
    #[serde(default = "default_count")]
    pub count: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhotonsParams {
    pub material: MaterialSpec,
    pub delta: f64,
    pub etas: Axis,
    pub gauges: Vec<GaugeChoice>,
    pub n_levels: usize,
    pub n_fock: Option<usize>,
    /// When set, repeat each point with 8 more photons and 4 more levels.
    pub convergence_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Standard,
    Tilde,
    Rotated,
    ModifiedA2,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub alpha: Option<f64>,
    pub alpha_prime: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationParams {
    pub material: MaterialSpec,
    pub delta: f64,
    pub etas: Axis,
    pub models: Vec<ModelSpec>,
    #[serde(default = "default_one")]
    pub count: usize,
    pub reference_levels: usize,
    pub reference_fock: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvelopeSpec {
    Constant { value: f64 },
    Step { on: f64, off: f64 },
    Gaussian { center: f64, width: f64 },
    RaisedCosine { start: f64, end: f64 },
}

fn default_evolve_tol() -> f64 {
    1e-9
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchParams {
    pub material: MaterialSpec,
    pub delta: f64,
    pub eta: f64,
    pub n_levels: usize,
    pub n_fock: usize,
    pub gauges: Vec<GaugeChoice>,
    pub envelope: EnvelopeSpec,
    pub times: Axis,
    /// Also evolve in the moving frame toward this gauge.
    pub alpha_prime: Option<f64>,
    #[serde(default = "default_evolve_tol")]
    pub tol: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorRateParams {
    pub gamma: f64,
    /// Averaging time ω_m T.
    pub t_avg: f64,
    pub cutoffs: Axis,
    pub gauges: Vec<GaugeChoice>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum FieldGaugeName {
    Multipolar,
    Coulomb,
}

fn default_rel_tol() -> f64 {
    1e-10
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PvacParams {
    pub gauges: Vec<FieldGaugeName>,
    /// ω_mn > 0 for emission, < 0 for virtual excitation.
    pub omega_mn: f64,
    pub d_sq: f64,
    pub times: Axis,
    pub cutoffs: Axis,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyDensityParams {
    pub omega_m: f64,
    pub d: f64,
    /// Level of the two-level dipole, 0 or 1.
    pub level: usize,
    pub distances: Axis,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UdotParams {
    pub omega_m: f64,
    pub times: Axis,
    pub positions: Axis,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum StateName {
    Ground,
    Excited,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableName {
    Square,
    Normal,
}

fn default_modes() -> usize {
    50
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityMapParams {
    pub length: f64,
    #[serde(default = "default_modes")]
    pub n_modes: usize,
    pub dipole: f64,
    pub volume: f64,
    pub alphas: Vec<f64>,
    pub state: StateName,
    pub observable: ObservableName,
    pub positions: Axis,
    pub times: Axis,
    /// Divide by the propagating field at the dipole after one round trip.
    #[serde(default = "default_true")]
    pub normalize: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PointerMode {
    Single { eta: f64, delta: f64 },
    Continuum { gamma: f64, cutoffs: Axis },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointerParams {
    pub r_scale: f64,
    /// Initial pointer width; 0 selects the sharp pointer.
    pub sigma: f64,
    pub gauges: Vec<GaugeChoice>,
    pub durations: Axis,
    pub mode: PointerMode,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteN {
    pub n_spins: usize,
    pub n_bosons: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeParamsCfg {
    pub omega_m: f64,
    pub omega: f64,
    pub alphas: Vec<f64>,
    pub taus: Axis,
    pub finite_n: Option<FiniteN>,
}

fn default_steady_levels() -> usize {
    4
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MasterParams {
    pub material: MaterialSpec,
    pub gamma: f64,
    pub omega_max: f64,
    /// Discrete modes sampling the continuum.
    pub n_modes: usize,
    pub alphas: Vec<f64>,
    /// Levels n whose shifts Δⁿ are reported.
    pub shift_levels: Vec<usize>,
    /// Material basis sizes for each shift.
    pub basis_sizes: Vec<usize>,
    #[serde(default = "default_steady_levels")]
    pub steady_levels: usize,
}

/// A parsed configuration with its raw text.
#[derive(Clone, Debug)]
pub struct Config {
    pub text: String,
    pub scenario: Scenario,
    pub output: Option<String>,
    pub figure: Option<String>,
}

#[derive(Clone, Debug)]
pub enum Scenario {
    Spectrum(SpectrumParams),
    Photons(PhotonsParams),
    TruncationCompare(TruncationParams),
    Switch(SwitchParams),
    DetectorRate(DetectorRateParams),
    Pvac(PvacParams),
    EnergyDensity(EnergyDensityParams),
    Udot(UdotParams),
    CavityMap(CavityMapParams),
    Pointer(PointerParams),
    Dicke(DickeParamsCfg),
    Master(MasterParams),
}

impl Scenario {
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Spectrum(_) => "spectrum",
            Scenario::Photons(_) => "photons",
            Scenario::TruncationCompare(_) => "truncation-compare",
            Scenario::Switch(_) => "switch",
            Scenario::DetectorRate(_) => "detector-rate",
            Scenario::Pvac(_) => "pvac",
            Scenario::EnergyDensity(_) => "energy-density",
            Scenario::Udot(_) => "udot",
            Scenario::CavityMap(_) => "cavity-map",
            Scenario::Pointer(_) => "pointer",
            Scenario::Dicke(_) => "dicke",
            Scenario::Master(_) => "master",
        }
    }
}

fn field_err(field: &str, msg: &str) -> CliError {
    CliError::Config(format!("params.{field}: {msg}"))
}

fn typed<P: DeserializeOwned>(text: &str, wrap: fn(P) -> Scenario) -> Result<(Scenario, Option<String>, Option<String>), CliError> {
    let f: ConfigFile<P> = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((wrap(f.params), f.output, f.figure))
}

/// Parse and check a configuration. Errors carry the line or the field path.
pub fn parse(text: &str) -> Result<Config, CliError> {
    let head: Head = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    let (scenario, output, figure) = match head.scenario.as_str() {
        "spectrum" => typed(text, Scenario::Spectrum)?,
        "photons" => typed(text, Scenario::Photons)?,
        "truncation-compare" => typed(text, Scenario::TruncationCompare)?,
        "switch" => typed(text, Scenario::Switch)?,
        "detector-rate" => typed(text, Scenario::DetectorRate)?,
        "pvac" => typed(text, Scenario::Pvac)?,
        "energy-density" => typed(text, Scenario::EnergyDensity)?,
        "udot" => typed(text, Scenario::Udot)?,
        "cavity-map" => typed(text, Scenario::CavityMap)?,
        "pointer" => typed(text, Scenario::Pointer)?,
        "dicke" => typed(text, Scenario::Dicke)?,
        "master" => typed(text, Scenario::Master)?,
        other => {
            return Err(CliError::Config(format!("unknown scenario {other:?}; expected one of {}", SCENARIOS.join(", "))))
        }
    };
    if let Some(o) = &output {
        if o.is_empty() || o.contains(['/', '\\']) {
            return Err(CliError::Config(format!("output: {o:?} must be a plain file name")));
        }
    }
    check(&scenario)?;
    Ok(Config { text: text.to_string(), scenario, output, figure })
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field_err(field, &format!("must be positive and finite, got {v}")))
    }
}

fn finite(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(field_err(field, "must be finite"))
    }
}

fn nonneg_axis(axis: &Axis, field: &str) -> Result<(), CliError> {
    axis.check(field)?;
    if axis.values().iter().any(|v| *v < 0.0) {
        return Err(field_err(field, "values must be non-negative"));
    }
    Ok(())
}

fn gauges(list: &[GaugeChoice]) -> Result<(), CliError> {
    list.iter().enumerate().try_for_each(|(i, g)| g.check(&format!("gauges[{i}]")))
}

fn basis(field: &str, n: usize, material: &MaterialSpec) -> Result<(), CliError> {
    if n < 2 || n > material.levels {
        return Err(field_err(field, &format!("must lie in 2..={}", material.levels)));
    }
    Ok(())
}

fn check(s: &Scenario) -> Result<(), CliError> {
    match s {
        Scenario::Spectrum(p) => {
            p.material.check("material")?;
            positive("delta", p.delta)?;
            nonneg_axis(&p.etas, "etas")?;
            gauges(&p.gauges)?;
            basis("n_levels", p.n_levels, &p.material)?;
            if p.count == 0 {
                return Err(field_err("count", "must be at least 1"));
            }
        }
        Scenario::Photons(p) => {
            p.material.check("material")?;
            positive("delta", p.delta)?;
            nonneg_axis(&p.etas, "etas")?;
            gauges(&p.gauges)?;
            basis("n_levels", p.n_levels, &p.material)?;
            if let Some(t) = p.convergence_tol {
                positive("convergence_tol", t)?;
            }
        }
        Scenario::TruncationCompare(p) => {
            p.material.check("material")?;
            positive("delta", p.delta)?;
            nonneg_axis(&p.etas, "etas")?;
            basis("reference_levels", p.reference_levels, &p.material)?;
            if p.count == 0 {
                return Err(field_err("count", "must be at least 1"));
            }
            for (i, m) in p.models.iter().enumerate() {
                let need = match m.kind {
                    ModelKind::Standard | ModelKind::Tilde => (true, false),
                    ModelKind::Rotated => (true, true),
                    ModelKind::ModifiedA2 => (false, false),
                };
                if need != (m.alpha.is_some(), m.alpha_prime.is_some()) {
                    return Err(field_err(
                        &format!("models[{i}]"),
                        "standard and tilde take alpha, rotated takes alpha and alpha_prime, modified-a2 takes neither",
                    ));
                }
            }
        }
        Scenario::Switch(p) => {
            p.material.check("material")?;
            positive("delta", p.delta)?;
            finite("eta", p.eta)?;
            basis("n_levels", p.n_levels, &p.material)?;
            gauges(&p.gauges)?;
            positive("tol", p.tol)?;
            p.times.check("times")?;
            if p.times.values().windows(2).any(|w| w[1] <= w[0]) {
                return Err(field_err("times", "must increase"));
            }
            if p.alpha_prime.is_some() && matches!(p.envelope, EnvelopeSpec::Step { .. }) {
                return Err(field_err("envelope", "a step envelope has no derivative for the moving frame"));
            }
        }
        Scenario::DetectorRate(p) => {
            positive("gamma", p.gamma)?;
            positive("t_avg", p.t_avg)?;
            p.cutoffs.check_positive("cutoffs")?;
            gauges(&p.gauges)?;
        }
        Scenario::Pvac(p) => {
            finite("omega_mn", p.omega_mn)?;
            positive("d_sq", p.d_sq)?;
            p.times.check_positive("times")?;
            p.cutoffs.check_positive("cutoffs")?;
            positive("rel_tol", p.rel_tol)?;
        }
        Scenario::EnergyDensity(p) => {
            positive("omega_m", p.omega_m)?;
            finite("d", p.d)?;
            if p.level > 1 {
                return Err(field_err("level", "a two-level dipole has levels 0 and 1"));
            }
            p.distances.check_positive("distances")?;
            positive("rel_tol", p.rel_tol)?;
        }
        Scenario::Udot(p) => {
            positive("omega_m", p.omega_m)?;
            p.times.check("times")?;
            p.positions.check_positive("positions")?;
            let ts = p.times.values();
            if p.positions.values().iter().any(|x| ts.contains(x)) {
                return Err(field_err("positions", "the grid must not sample the light cone x = t"));
            }
        }
        Scenario::CavityMap(p) => {
            positive("length", p.length)?;
            positive("volume", p.volume)?;
            finite("dipole", p.dipole)?;
            if p.n_modes == 0 {
                return Err(field_err("n_modes", "must be at least 1"));
            }
            for (i, a) in p.alphas.iter().enumerate() {
                finite(&format!("alphas[{i}]"), *a)?;
            }
            p.positions.check("positions")?;
            p.times.check("times")?;
        }
        Scenario::Pointer(p) => {
            finite("r_scale", p.r_scale)?;
            if !(p.sigma >= 0.0 && p.sigma.is_finite()) {
                return Err(field_err("sigma", "must be non-negative"));
            }
            gauges(&p.gauges)?;
            p.durations.check_positive("durations")?;
            match &p.mode {
                PointerMode::Single { eta, delta } => {
                    finite("mode.eta", *eta)?;
                    positive("mode.delta", *delta)?;
                }
                PointerMode::Continuum { gamma, cutoffs } => {
                    positive("mode.gamma", *gamma)?;
                    cutoffs.check_positive("mode.cutoffs")?;
                }
            }
        }
        Scenario::Dicke(p) => {
            positive("omega_m", p.omega_m)?;
            positive("omega", p.omega)?;
            for (i, a) in p.alphas.iter().enumerate() {
                finite(&format!("alphas[{i}]"), *a)?;
            }
            p.taus.check_positive("taus")?;
            if let Some(f) = &p.finite_n {
                if f.n_spins == 0 || f.n_spins > gaugeqed::dicke::MAX_SPINS {
                    return Err(field_err("finite_n.n_spins", &format!("must lie in 1..={}", gaugeqed::dicke::MAX_SPINS)));
                }
                if f.n_bosons < 2 || f.n_bosons > gaugeqed::dicke::MAX_BOSONS {
                    return Err(field_err("finite_n.n_bosons", &format!("must lie in 2..={}", gaugeqed::dicke::MAX_BOSONS)));
                }
            }
        }
        Scenario::Master(p) => {
            p.material.check("material")?;
            positive("gamma", p.gamma)?;
            positive("omega_max", p.omega_max)?;
            if p.n_modes == 0 {
                return Err(field_err("n_modes", "must be at least 1"));
            }
            for (i, a) in p.alphas.iter().enumerate() {
                finite(&format!("alphas[{i}]"), *a)?;
            }
            for (i, &m) in p.basis_sizes.iter().enumerate() {
                basis(&format!("basis_sizes[{i}]"), m, &p.material)?;
            }
            basis("steady_levels", p.steady_levels, &p.material)?;
        }
    }
    Ok(())
}
