//! One-dimensional material systems solved on a position grid.
//!
//! The raw Hamiltonian is H = −½∂² + V(ζ) with the dimensionless coordinate
//! ζ. It is discretized with the Colbert–Miller sinc DVR, which converges
//! exponentially in the grid spacing. Energies are then divided by the first
//! transition energy so ω_m = 1 downstream; in those units the effective
//! mass equals the raw gap and positions stay in units of ζ.

use faer::{c64, Mat, Side};

use crate::error::{Error, Result};
use crate::opalg::Operator;

/// Potential family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaterialKind {
    /// V = ½ω_m²ζ²
    Harmonic { omega_m: f64 },
    /// V = ½(−βζ² + ζ⁴/2), the symmetric double well.
    DoubleWell { beta: f64 },
    /// V = ½ζ² + r cos ζ, an inductively shunted Josephson (fluxonium-like)
    /// element biased at half a flux quantum; r is E_J/E_L.
    Josephson { ratio: f64 },
}

impl MaterialKind {
    pub fn potential(&self, z: f64) -> f64 {
        match *self {
            MaterialKind::Harmonic { omega_m } => 0.5 * omega_m * omega_m * z * z,
            MaterialKind::DoubleWell { beta } => 0.5 * (-beta * z * z + 0.5 * z.powi(4)),
            MaterialKind::Josephson { ratio } => 0.5 * z * z + ratio * z.cos(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        true
    }

    fn potential_min(&self) -> f64 {
        match *self {
            MaterialKind::Harmonic { .. } => 0.0,
            MaterialKind::DoubleWell { beta } => -0.25 * beta * beta,
            MaterialKind::Josephson { .. } => {
                // Scan; the potential is smooth and confining.
                (0..4001).map(|k| self.potential(-20.0 + 0.01 * k as f64)).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Uniform symmetric grid ζ_i = −w + (i+1)·2w/(N+1), i = 0..N−1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub half_width: f64,
    pub points: usize,
}

impl Grid {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points + 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.spacing();
        (0..self.points).map(|i| -self.half_width + (i + 1) as f64 * dx).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialModel {
    pub kind: MaterialKind,
    pub grid: Grid,
    pub target_levels: usize,
}

/// Largest boundary amplitude tolerated for any retained level.
pub const BOUNDARY_LEAK_LIMIT: f64 = 1e-8;

impl MaterialModel {
    pub fn new(kind: MaterialKind, grid: Grid, target_levels: usize) -> Result<Self> {
        if target_levels < 2 {
            return Err(Error::InvalidInput("at least two levels are needed".into()));
        }
        if grid.points < 8 * target_levels {
            return Err(Error::InvalidInput(format!(
                "{} grid points is fewer than 8 per target level ({target_levels})",
                grid.points
            )));
        }
        if !(grid.half_width > 0.0) {
            return Err(Error::InvalidInput("grid half width must be positive".into()));
        }
        Ok(Self { kind, grid, target_levels })
    }

    /// Grid sized for `target_levels` converged levels: the box extends well
    /// past the classical turning point of a level somewhat above the last
    /// one kept, and the spacing resolves its local wavelength.
    pub fn auto(kind: MaterialKind, target_levels: usize) -> Result<Self> {
        let probe = target_levels + target_levels / 2 + 8;
        let vmin = kind.potential_min();
        let mut grid = Grid { half_width: 12.0, points: 8 * probe };
        for _ in 0..3 {
            let (levels, _) = dvr_solve(&kind, &grid, probe)?;
            let e_top = levels[probe - 1];
            let zt = turning_point(&kind, e_top);
            let slope = (kind.potential(zt + 1e-3) - kind.potential(zt - 1e-3)).abs() / 2e-3;
            let decay = (2.0 * slope.max(1e-3)).powf(-1.0 / 3.0);
            let half_width = zt + 14.0 * decay + 3.0;
            let kmax = (2.0 * (e_top - vmin)).sqrt();
            let dx = std::f64::consts::PI / (2.0 * kmax + 4.0);
            let points = ((2.0 * half_width / dx).ceil() as usize).max(8 * target_levels);
            let next = Grid { half_width, points };
            if next.points <= grid.points && (next.half_width - grid.half_width).abs() < 0.5 {
                grid = next;
                break;
            }
            grid = next;
        }
        Self::new(kind, grid, target_levels)
    }
}

fn turning_point(kind: &MaterialKind, e: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while kind.potential(hi) < e {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if kind.potential(mid) < e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Lowest `k` raw eigenpairs on the grid (eigenvectors as columns).
fn dvr_solve(kind: &MaterialKind, grid: &Grid, k: usize) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = grid.points;
    let dx = grid.spacing();
    let z = grid.nodes();
    let pi2 = std::f64::consts::PI.powi(2);
    let h = Mat::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            pi2 / (6.0 * dx * dx) + kind.potential(z[i])
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign / (dx * dx * d * d)
        }
    });
    let e = h.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = e.S().column_vector();
    let u = e.U();
    let k = k.min(n);
    let levels = (0..k).map(|i| s[i]).collect();
    let vecs = Mat::from_fn(n, k, |i, j| u[(i, j)]);
    Ok((levels, vecs))
}

/// Levels and dipole matrix elements in normalized units (ω_m = 1).
#[derive(Clone, Debug)]
pub struct MaterialSpectrum {
    pub kind: MaterialKind,
    /// ε_n, ascending, in units of the first transition energy.
    pub levels: Vec<f64>,
    x: Mat<f64>,
    x2: Mat<f64>,
    /// Effective mass in normalized units.
    pub m_eff: f64,
    /// (ω_21 − ω_m)/ω_m
    pub mu: f64,
    /// First transition energy in raw units.
    pub raw_gap: f64,
    /// Largest boundary amplitude among the retained levels.
    pub boundary_leak: f64,
}

impl MaterialSpectrum {
    /// Exact harmonic oscillator with ω_m = 1 and unit mass.
    pub fn harmonic_exact(n_levels: usize) -> Self {
        let x = Mat::from_fn(n_levels, n_levels, |i, j| {
            if j == i + 1 {
                (j as f64 / 2.0).sqrt()
            } else if i == j + 1 {
                (i as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let x2 = Mat::from_fn(n_levels, n_levels, |i, j| {
            let (a, b) = (i.min(j), i.max(j));
            if a == b {
                a as f64 + 0.5
            } else if b == a + 2 {
                0.5 * ((a + 1) as f64 * (a + 2) as f64).sqrt()
            } else {
                0.0
            }
        });
        Self {
            kind: MaterialKind::Harmonic { omega_m: 1.0 },
            levels: (0..n_levels).map(|n| n as f64 + 0.5).collect(),
            x,
            x2,
            m_eff: 1.0,
            mu: 0.0,
            raw_gap: 1.0,
            boundary_leak: 0.0,
        }
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// ⟨n|x|m⟩
    pub fn x(&self, n: usize, m: usize) -> f64 {
        self.x[(n, m)]
    }

    /// ⟨n|x²|m⟩ from the exact square, not the square of the truncated x.
    pub fn x2(&self, n: usize, m: usize) -> f64 {
        self.x2[(n, m)]
    }

    /// ω_nm = ε_n − ε_m
    pub fn omega(&self, n: usize, m: usize) -> f64 {
        self.levels[n] - self.levels[m]
    }

    /// ⟨n|p|m⟩ = i m ω_nm x_nm
    pub fn p(&self, n: usize, m: usize) -> c64 {
        c64::new(0.0, self.m_eff * self.omega(n, m) * self.x(n, m))
    }

    pub fn x01(&self) -> f64 {
        self.x(0, 1)
    }

    /// Keep the lowest `m` levels.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m > self.n_levels() || m < 2 {
            return Err(Error::InvalidInput(format!("cannot keep {m} of {} levels", self.n_levels())));
        }
        Ok(Self {
            kind: self.kind,
            levels: self.levels[..m].to_vec(),
            x: Mat::from_fn(m, m, |i, j| self.x[(i, j)]),
            x2: Mat::from_fn(m, m, |i, j| self.x2[(i, j)]),
            ..*self
        })
    }

    fn check_m(&self, m: usize) -> Result<()> {
        if m > self.n_levels() || m == 0 {
            return Err(Error::InvalidInput(format!("basis size {m} exceeds {} levels", self.n_levels())));
        }
        Ok(())
    }

    pub fn h_op(&self, m: usize) -> Result<Operator> {
        self.check_m(m)?;
        Ok(Operator::diagonal(&self.levels[..m]))
    }

    pub fn x_op(&self, m: usize) -> Result<Operator> {
        self.check_m(m)?;
        Ok(Operator::from_real_fn(vec![m], |i, j| self.x[(i, j)]))
    }

    pub fn x2_op(&self, m: usize) -> Result<Operator> {
        self.check_m(m)?;
        Ok(Operator::from_real_fn(vec![m], |i, j| self.x2[(i, j)]))
    }

    pub fn p_op(&self, m: usize) -> Result<Operator> {
        self.check_m(m)?;
        Ok(Operator::from_fn(vec![m], |i, j| self.p(i, j)))
    }
}

/// Solve the model and normalize so that ω_m = 1.
pub fn solve_material(model: &MaterialModel) -> Result<MaterialSpectrum> {
    let k = model.target_levels;
    let (raw, vecs) = dvr_solve(&model.kind, &model.grid, k)?;
    if raw.len() < k {
        return Err(Error::InvalidInput(format!("grid supports only {} levels", raw.len())));
    }
    let n = model.grid.points;
    let edge = (n / 50).max(1);
    let mut leak = 0.0f64;
    for j in 0..k {
        let peak = (0..n).map(|i| vecs[(i, j)].abs()).fold(0.0, f64::max);
        let tail = (0..edge).chain(n - edge..n).map(|i| vecs[(i, j)].abs()).fold(0.0, f64::max);
        leak = leak.max(tail / peak);
    }
    if leak > BOUNDARY_LEAK_LIMIT {
        return Err(Error::BoundaryLeak { leak, limit: BOUNDARY_LEAK_LIMIT });
    }
    let z = model.grid.nodes();
    let mut v = vecs;
    // Sign convention: ⟨n−1|x|n⟩ > 0 where it is resolvable, otherwise the
    // largest component of the eigenvector is positive.
    for j in 0..k {
        let flip = if j > 0 {
            let xel: f64 = (0..n).map(|i| v[(i, j - 1)] * z[i] * v[(i, j)]).sum();
            if xel.abs() > 1e-9 {
                xel < 0.0
            } else {
                let imax = (0..n).max_by(|&a, &b| v[(a, j)].abs().total_cmp(&v[(b, j)].abs())).unwrap();
                v[(imax, j)] < 0.0
            }
        } else {
            let imax = (0..n).max_by(|&a, &b| v[(a, j)].abs().total_cmp(&v[(b, j)].abs())).unwrap();
            v[(imax, j)] < 0.0
        };
        if flip {
            for i in 0..n {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
    let zv = Mat::from_fn(n, k, |i, j| z[i] * v[(i, j)]);
    let z2v = Mat::from_fn(n, k, |i, j| z[i] * z[i] * v[(i, j)]);
    let x = v.transpose() * &zv;
    let x2 = v.transpose() * &z2v;
    let x = Mat::from_fn(k, k, |i, j| 0.5 * (x[(i, j)] + x[(j, i)]));
    let x2 = Mat::from_fn(k, k, |i, j| 0.5 * (x2[(i, j)] + x2[(j, i)]));
    let gap = raw[1] - raw[0];
    let levels: Vec<f64> = raw.iter().map(|e| e / gap).collect();
    let mu = if k > 2 { levels[2] - levels[1] - 1.0 } else { f64::NAN };
    Ok(MaterialSpectrum { kind: model.kind, levels, x, x2, m_eff: gap, mu, raw_gap: gap, boundary_leak: leak })
}

/// Anharmonicity μ for a potential family member, from a modest solve.
pub fn anharmonicity(kind: MaterialKind) -> Result<f64> {
    let model = MaterialModel::auto(kind, 4)?;
    Ok(solve_material(&model)?.mu)
}

/// Potential family selector for [`calibrate_anharmonicity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Harmonic,
    DoubleWell,
    Josephson,
}

impl Family {
    fn member(self, p: f64) -> MaterialKind {
        match self {
            Family::Harmonic => MaterialKind::Harmonic { omega_m: 1.0 },
            Family::DoubleWell => MaterialKind::DoubleWell { beta: p },
            Family::Josephson => MaterialKind::Josephson { ratio: p },
        }
    }

    /// Parameter range over which μ increases monotonically.
    fn range(self) -> (f64, f64) {
        match self {
            Family::Harmonic => (1.0, 1.0),
            Family::DoubleWell => (0.0, 6.0),
            Family::Josephson => (0.0, 3.0),
        }
    }
}

/// Find the family member with anharmonicity μ_target by bisection, and
/// return a model with an automatic grid for `target_levels` levels.
pub fn calibrate_anharmonicity(family: Family, mu_target: f64, target_levels: usize) -> Result<MaterialModel> {
    if family == Family::Harmonic {
        if mu_target.abs() > 1e-12 {
            return Err(Error::Bracketing { target: mu_target, lo: 0.0, hi: 0.0, f_lo: 0.0, f_hi: 0.0 });
        }
        return MaterialModel::auto(family.member(1.0), target_levels);
    }
    let (mut lo, mut hi) = family.range();
    let f = |p: f64| anharmonicity(family.member(p)).map(|m| m - mu_target);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracketing { target: mu_target, lo, hi, f_lo: f_lo + mu_target, f_hi: f_hi + mu_target });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi.abs().max(1.0) {
            break;
        }
    }
    MaterialModel::auto(family.member(0.5 * (lo + hi)), target_levels)
}

/// Σ_{n<M} ω_nl |x_nl|², which tends to 1/(2 m_eff) as M grows.
pub fn trk_check(spec: &MaterialSpectrum, l: usize, m: usize) -> Result<f64> {
    spec.check_m(m)?;
    if l >= spec.n_levels() {
        return Err(Error::InvalidInput(format!("level {l} not available")));
    }
    Ok((0..m).map(|n| spec.omega(n, l) * spec.x(n, l).powi(2)).sum())
}
