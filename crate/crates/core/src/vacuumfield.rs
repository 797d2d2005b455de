//! Second-order field observables around a dipole at the origin.
//!
//! Photodetection probabilities in the multipolar and Coulomb gauges, the
//! radiation tensors f and g, static electric and magnetic energy densities,
//! the real Poynting flux and the virtual transient u̇(t, x).
//!
//! Directions are handled analytically. Every density reduces to a
//! combination of θ_ij = δ_ij − x̂_i x̂_j and (φ²)_ij = δ_ij + 3x̂_i x̂_j
//! contracted with the dipole, so a density is stored as the two coefficients
//! of d̂·θ·d̂ and d̂·φ²·d̂ for a unit dipole axis d̂.

use crate::material::MaterialSpectrum;
use crate::quad::{gauss_legendre, integrate_pieces, merge_breaks, periodic_breaks, QuadOptions, QuadResult};
use crate::{Error, Result};
use faer::{c64, Mat};
use std::f64::consts::PI;

/// Which split of the field into source and vacuum parts is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldGauge {
    Multipolar,
    Coulomb,
}

/// Level energies and dipole matrix elements d_nm = q x_nm along a common axis.
#[derive(Clone, Debug)]
pub struct DipoleData {
    pub energies: Vec<f64>,
    d: Mat<f64>,
    /// Unit vector of the dipole axis.
    pub axis: [f64; 3],
}

impl DipoleData {
    pub fn new(energies: Vec<f64>, d: Mat<f64>, axis: [f64; 3]) -> Result<Self> {
        let n = energies.len();
        if n < 2 || d.nrows() != n || d.ncols() != n {
            return Err(Error::Dimension(format!("{n} levels need an {n}×{n} dipole matrix")));
        }
        if energies.iter().any(|e| !e.is_finite()) || (0..n).any(|i| (0..n).any(|j| !d[(i, j)].is_finite())) {
            return Err(Error::InvalidInput("dipole data must be finite".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if (d[(i, j)] - d[(j, i)]).abs() > 1e-12 * (d[(i, j)].abs() + d[(j, i)].abs()) {
                    return Err(Error::InvalidInput(format!("d_{i}{j} ≠ d_{j}{i}")));
                }
            }
        }
        Ok(DipoleData { energies, d, axis: unit(axis)? })
    }

    /// Two levels split by ω_m with transition dipole d.
    pub fn two_level(omega_m: f64, d: f64, axis: [f64; 3]) -> Result<Self> {
        if !(omega_m > 0.0) {
            return Err(Error::InvalidInput("ω_m must be positive".into()));
        }
        let m = Mat::from_fn(2, 2, |i, j| if i != j { d } else { 0.0 });
        Self::new(vec![0.0, omega_m], m, axis)
    }

    /// The lowest `levels` levels of a material with charge q.
    pub fn from_material(spec: &MaterialSpectrum, levels: usize, charge: f64, axis: [f64; 3]) -> Result<Self> {
        if levels < 2 || levels > spec.n_levels() {
            return Err(Error::InvalidInput(format!("need 2..={} levels, got {levels}", spec.n_levels())));
        }
        let d = Mat::from_fn(levels, levels, |i, j| charge * spec.x(i, j));
        Self::new(spec.levels[..levels].to_vec(), d, axis)
    }

    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }

    /// ω_nm = ε_n − ε_m
    pub fn omega(&self, n: usize, m: usize) -> f64 {
        self.energies[n] - self.energies[m]
    }

    pub fn d(&self, n: usize, m: usize) -> f64 {
        self.d[(n, m)]
    }

    fn check_level(&self, p: usize) -> Result<()> {
        if p >= self.n_levels() {
            return Err(Error::InvalidInput(format!("level {p} outside {} levels", self.n_levels())));
        }
        Ok(())
    }
}

fn unit(v: [f64; 3]) -> Result<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidInput("direction must be a finite nonzero vector".into()));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// θ_ij = δ_ij − x̂_i x̂_j
pub fn theta(xhat: [f64; 3]) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 } - xhat[i] * xhat[j]))
}

/// φ_ij = δ_ij − 3x̂_i x̂_j
pub fn phi(xhat: [f64; 3]) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 } - 3.0 * xhat[i] * xhat[j]))
}

/// φ̃_ij = −ε_ijk x̂_k
pub fn phi_tilde(xhat: [f64; 3]) -> [[f64; 3]; 3] {
    let [a, b, c] = xhat;
    [[0.0, -c, b], [c, 0.0, -a], [-b, a, 0.0]]
}

fn combine(parts: &[([[f64; 3]; 3], c64)]) -> [[c64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| parts.iter().map(|(t, c)| *c * t[i][j]).sum()))
}

/// f_ij(z) = −θ_ij/z + φ_ij(−i/z² + 1/z³) for direction x̂. The argument is
/// ωx, complex so that imaginary frequencies can be used.
pub fn f_tensor(z: c64, xhat: [f64; 3]) -> Result<[[c64; 3]; 3]> {
    let xhat = unit(xhat)?;
    let (a, b) = f_coeffs(z)?;
    Ok(combine(&[(theta(xhat), a), (phi(xhat), b)]))
}

/// g_ij(z) = φ̃_ij(1/z + i/z²)
pub fn g_tensor(z: c64, xhat: [f64; 3]) -> Result<[[c64; 3]; 3]> {
    let xhat = unit(xhat)?;
    if z == c64::new(0.0, 0.0) {
        return Err(Error::InvalidInput("ωx must be nonzero".into()));
    }
    let w = z.inv();
    Ok(combine(&[(phi_tilde(xhat), w + c64::new(0.0, 1.0) * w * w)]))
}

/// Coefficients of θ and φ in f(z).
fn f_coeffs(z: c64) -> Result<(c64, c64)> {
    if z == c64::new(0.0, 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidInput("ωx must be finite and nonzero".into()));
    }
    let w = z.inv();
    Ok((-w, c64::new(0.0, -1.0) * w * w + w * w * w))
}

/// A density c_θ d̂·θ·d̂ + c_φ² d̂·φ²·d̂, with |d|² already folded into the
/// coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TensorDensity {
    pub theta: f64,
    pub phi_sq: f64,
}

impl TensorDensity {
    /// Value when the dipole axis makes angle χ with x̂.
    pub fn at_cos(&self, cos_chi: f64) -> f64 {
        let c2 = cos_chi * cos_chi;
        self.theta * (1.0 - c2) + self.phi_sq * (1.0 + 3.0 * c2)
    }

    /// Value for a dipole axis and a field direction.
    pub fn evaluate(&self, axis: [f64; 3], xhat: [f64; 3]) -> Result<f64> {
        Ok(self.at_cos(dot(unit(axis)?, unit(xhat)?)))
    }

    /// Average over all directions x̂: ⟨θ⟩ = 2/3, ⟨φ²⟩ = 2.
    pub fn orientation_average(&self) -> f64 {
        2.0 / 3.0 * self.theta + 2.0 * self.phi_sq
    }

    /// x² ∮ dΩ of the density on a sphere of radius x, by Gauss–Legendre in
    /// cos χ (exact for the quadratic angular dependence).
    pub fn sphere_integral(&self, x: f64) -> f64 {
        let (nodes, weights) = gauss_legendre(8);
        let s: f64 = nodes.iter().zip(&weights).map(|(c, w)| w * self.at_cos(*c)).sum();
        2.0 * PI * x * x * s
    }

    fn add(self, o: TensorDensity) -> TensorDensity {
        TensorDensity { theta: self.theta + o.theta, phi_sq: self.phi_sq + o.phi_sq }
    }
}

/// Photodetection probability for the transition m → n after time t:
/// (|d|²/3π)∫₀^{ω_M} dω w(ω) sin²[(ω_mn−ω)t/2]/(π(ω_mn−ω)²/2), with
/// w = ω³ (multipolar) or ω ω_mn² (Coulomb). ω_mn > 0 is emission, ω_mn < 0
/// a virtual excitation of the ground state.
pub fn pvac(gauge: FieldGauge, omega_mn: f64, t: f64, omega_max: f64, d_sq: f64, opts: QuadOptions) -> Result<QuadResult> {
    check_pvac(omega_mn, t, omega_max, d_sq)?;
    if t == 0.0 || d_sq == 0.0 {
        return Ok(QuadResult { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let pre = d_sq / (3.0 * PI);
    let f = |w: f64| {
        let half = 0.5 * (omega_mn - w) * t;
        let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
        pre * weight(gauge, omega_mn, w) * t * t * sinc * sinc / (2.0 * PI)
    };
    integrate_pieces(f, &kernel_breaks(omega_mn, t, omega_max, 2.0 * PI / t), opts)
}

/// dP/dt of [`pvac`]: the kernel becomes sin[(ω_mn−ω)t]/(π(ω_mn−ω)).
pub fn pvac_rate(gauge: FieldGauge, omega_mn: f64, t: f64, omega_max: f64, d_sq: f64, opts: QuadOptions) -> Result<QuadResult> {
    check_pvac(omega_mn, t, omega_max, d_sq)?;
    let pre = d_sq / (3.0 * PI);
    let f = |w: f64| {
        let a = (omega_mn - w) * t;
        let sinc = if a == 0.0 { 1.0 } else { a.sin() / a };
        pre * weight(gauge, omega_mn, w) * t * sinc / PI
    };
    if t == 0.0 {
        return integrate_pieces(f, &merge_breaks(vec![0.0, omega_max], &[omega_mn]), opts);
    }
    integrate_pieces(f, &kernel_breaks(omega_mn, t, omega_max, PI / t), opts)
}

/// Least-squares slope of [`pvac`] against t on `n` evenly spaced times in
/// [t_lo, t_hi]. Inside the window 1/ω_mn ≪ t ≪ 1/Γ this is the emission rate.
pub fn pvac_slope(gauge: FieldGauge, omega_mn: f64, omega_max: f64, d_sq: f64, window: (f64, f64), n: usize, opts: QuadOptions) -> Result<f64> {
    let (lo, hi) = window;
    if !(hi > lo && lo >= 0.0) || n < 2 {
        return Err(Error::InvalidInput("slope window needs t_hi > t_lo ≥ 0 and at least two times".into()));
    }
    let ts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let ps = ts.iter().map(|&t| pvac(gauge, omega_mn, t, omega_max, d_sq, opts).map(|r| r.value)).collect::<Result<Vec<_>>>()?;
    let (mt, mp) = (ts.iter().sum::<f64>() / n as f64, ps.iter().sum::<f64>() / n as f64);
    let cov: f64 = ts.iter().zip(&ps).map(|(t, p)| (t - mt) * (p - mp)).sum();
    let var: f64 = ts.iter().map(|t| (t - mt) * (t - mt)).sum();
    Ok(cov / var)
}

fn weight(gauge: FieldGauge, omega_mn: f64, w: f64) -> f64 {
    match gauge {
        FieldGauge::Multipolar => w * w * w,
        FieldGauge::Coulomb => w * omega_mn * omega_mn,
    }
}

fn check_pvac(omega_mn: f64, t: f64, omega_max: f64, d_sq: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("t must be finite and ≥ 0, got {t}")));
    }
    if !(omega_max > omega_mn.abs()) || !omega_max.is_finite() || omega_mn == 0.0 {
        return Err(Error::InvalidInput(format!("need ω_M > |ω_mn| > 0, got ω_M = {omega_max}, ω_mn = {omega_mn}")));
    }
    if !(d_sq >= 0.0) {
        return Err(Error::InvalidInput("|d|² must be ≥ 0".into()));
    }
    Ok(())
}

/// Zeros of a kernel periodic in ω − ω_mn, plus the resonance itself.
fn kernel_breaks(omega_mn: f64, t: f64, omega_max: f64, period: f64) -> Vec<f64> {
    let base = if omega_max * t > 50.0 { periodic_breaks(0.0, omega_max, omega_mn, period) } else { vec![0.0, omega_max] };
    merge_breaks(base, &[omega_mn])
}

/// Upper end of the rescaled u-integral. Beyond it e^{−2s} times the
/// polynomial numerators is below 1e-25 of the peak.
const S_MAX: f64 = 40.0;

/// Static energy densities of level p at distance x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaticDensity {
    pub electric: TensorDensity,
    pub magnetic: TensorDensity,
}

/// Time-independent electric and magnetic energy densities of a dipole in
/// level p: the on-shell sum over lower levels plus the imaginary-frequency
/// integral over all other levels.
pub fn static_energy_density(dipole: &DipoleData, p: usize, x: f64, opts: QuadOptions) -> Result<StaticDensity> {
    dipole.check_level(p)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("x must be positive, got {x}")));
    }
    let mut e = TensorDensity::default();
    let mut b = TensorDensity::default();
    for l in 0..dipole.n_levels() {
        let d2 = dipole.d(p, l).powi(2);
        let w = dipole.omega(p, l);
        if l == p || d2 == 0.0 {
            continue;
        }
        if w > 0.0 {
            // f*f and g*g on the real axis.
            let z = w * x;
            let pre = d2 * w.powi(6) / (16.0 * PI * PI);
            e = e.add(TensorDensity { theta: pre * (z.powi(-2) - 2.0 * z.powi(-4)), phi_sq: pre * (z.powi(-4) + z.powi(-6)) });
            b = b.add(TensorDensity { theta: pre * (z.powi(-2) + z.powi(-4)), phi_sq: 0.0 });
        }
        // f(iux)f(iux) = −[θ/y + φ(1/y² + 1/y³)]², g(iux)g(iux) = −θ(1/y + 1/y²)²
        // with y = ux; s = ux turns u⁶du/(u²+ω²) into s⁶ds/(x⁵(s²+(ωx)²)).
        let a = w.abs() * x;
        let pre = -d2 * w / (16.0 * PI.powi(3) * x.powi(5));
        let breaks = u_breaks(a);
        let q = |num: fn(f64) -> f64| integrate_pieces(|s| (-2.0 * s).exp() * num(s) / (s * s + a * a), &breaks, opts).map(|r| r.value);
        let e_theta = q(|s| s * s * (s * s + 2.0 * s + 2.0))?;
        let e_phi = q(|s| (s + 1.0) * (s + 1.0))?;
        let b_theta = q(|s| s * s * (s + 1.0) * (s + 1.0))?;
        e = e.add(TensorDensity { theta: pre * e_theta, phi_sq: pre * e_phi });
        b = b.add(TensorDensity { theta: pre * b_theta, phi_sq: 0.0 });
    }
    Ok(StaticDensity { electric: e, magnetic: b })
}

/// Breaks on [0, S_MAX] resolving the 1/(s² + a²) peak of width a.
fn u_breaks(a: f64) -> Vec<f64> {
    let mut b = vec![0.0];
    let mut s = a;
    while s < 1.0 {
        b.push(s);
        s *= 4.0;
    }
    b.extend([1.0, 2.0, 4.0, 8.0, 16.0, S_MAX]);
    merge_breaks(b, &[])
}

/// Electrostatic energy density Σ_l d_pl·φ²·d_lp/(32π²x⁶) of level p.
pub fn electrostatic_density(dipole: &DipoleData, p: usize, x: f64) -> Result<TensorDensity> {
    dipole.check_level(p)?;
    let s: f64 = (0..dipole.n_levels()).map(|l| dipole.d(p, l).powi(2)).sum();
    Ok(TensorDensity { theta: 0.0, phi_sq: s / (32.0 * PI * PI * x.powi(6)) })
}

/// Radial component of the real Poynting vector, (1/8π²x²)Σ_{l<p} ω_pl⁴ d·θ·d.
pub fn poynting_real(dipole: &DipoleData, p: usize, x: f64) -> Result<TensorDensity> {
    let s = radiative_sum(dipole, p)?;
    Ok(TensorDensity { theta: s / (8.0 * PI * PI * x * x), phi_sq: 0.0 })
}

/// Radiative part of the Glauber intensity, (1/4πx)²Σ_{l<p} ω_pl⁴ d·θ·d.
pub fn glauber_radiative(dipole: &DipoleData, p: usize, x: f64) -> Result<TensorDensity> {
    let s = radiative_sum(dipole, p)?;
    Ok(TensorDensity { theta: s / (16.0 * PI * PI * x * x), phi_sq: 0.0 })
}

fn radiative_sum(dipole: &DipoleData, p: usize) -> Result<f64> {
    dipole.check_level(p)?;
    Ok((0..p).map(|l| dipole.omega(p, l).powi(4) * dipole.d(p, l).powi(2)).sum())
}

/// Total radiated power Σ_{l<p} ω_pl Γ_pl with Γ_pl = ω_pl³|d_pl|²/(3π).
pub fn flux(dipole: &DipoleData, p: usize) -> Result<f64> {
    Ok(radiative_sum(dipole, p)? / (3.0 * PI))
}

/// Source and vacuum parts of the electric energy density in one gauge. The
/// vacuum part is measured from the multipolar vacuum density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Partition {
    pub gauge: FieldGauge,
    pub source: TensorDensity,
    pub vacuum: TensorDensity,
}

impl Partition {
    pub fn total(&self) -> TensorDensity {
        self.source.add(self.vacuum)
    }
}

/// Electric source/vacuum split at (t, x) for a dipole prepared in level p at
/// t = 0. Outside the light cone the multipolar source field vanishes while
/// the Coulomb source carries the instantaneous electrostatic field, which
/// the Coulomb vacuum part cancels. Inside it both gauges agree.
pub fn electric_partition(dipole: &DipoleData, p: usize, t: f64, x: f64, gauge: FieldGauge, opts: QuadOptions) -> Result<Partition> {
    if !(t >= 0.0) || !(x > 0.0) {
        return Err(Error::InvalidInput("need t ≥ 0 and x > 0".into()));
    }
    let zero = TensorDensity::default();
    if t >= x {
        let e = static_energy_density(dipole, p, x, opts)?.electric;
        return Ok(Partition { gauge, source: e, vacuum: zero });
    }
    Ok(match gauge {
        FieldGauge::Multipolar => Partition { gauge, source: zero, vacuum: zero },
        FieldGauge::Coulomb => {
            let s = electrostatic_density(dipole, p, x)?;
            Partition { gauge, source: s, vacuum: TensorDensity { theta: -s.theta, phi_sq: -s.phi_sq } }
        }
    })
}

/// Normalized rate of change of the angular-integrated virtual energy
/// density of a ground-state two-level dipole, with q_r = ω_m(t−x) and
/// q_a = ω_m(t+x). Zero outside the light cone; singular on it.
pub fn udot(t: f64, x: f64, omega_m: f64) -> f64 {
    if t < x {
        return 0.0;
    }
    let (qr, qa) = (omega_m * (t - x), omega_m * (t + x));
    8.0 / (omega_m * x * qr * qa) * (2.0 * qa * qr.cos() + (qa * qa - 2.0) * qr.sin())
}
