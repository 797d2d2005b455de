//! Dense operator algebra on tensor-product Hilbert spaces.
//!
//! Every Hamiltonian, unitary and observable in the crate is an [`Operator`]:
//! a square complex matrix that remembers the dimensions of its tensor
//! factors. Eigen-decompositions go through faer; real-representable
//! Hermitian matrices (the common case for the gauge Hamiltonians, which are
//! real up to a diagonal phase) take a faster real symmetric path.

use std::collections::VecDeque;
use std::ops::{Add, Mul, Neg, Sub};

use faer::linalg::solvers::Solve;
use faer::{c64, Col, Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Relative tolerance for [`Operator::is_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute tolerance for [`Operator::is_unitary`].
pub const UNITARY_TOL: f64 = 1e-10;

const I: c64 = c64 { re: 0.0, im: 1.0 };

fn cr(x: f64) -> c64 {
    c64::new(x, 0.0)
}

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Dimension(format!("factor dimensions must be >= 1, got {dims:?}")));
    }
    Ok(dims.iter().product())
}

/// Square complex matrix acting on `⊗ dims`.
#[derive(Clone, Debug)]
pub struct Operator {
    dims: Vec<usize>,
    mat: Mat<c64>,
}

impl Operator {
    pub fn new(dims: Vec<usize>, mat: Mat<c64>) -> Result<Self> {
        let n = check_dims(&dims)?;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but dims {dims:?} need {n}x{n}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { dims, mat })
    }

    /// Single-factor operator from a square matrix.
    pub fn from_mat(mat: Mat<c64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operator matrix must be square");
        let n = mat.nrows().max(1);
        Self { dims: vec![n], mat }
    }

    pub fn from_fn(dims: Vec<usize>, f: impl FnMut(usize, usize) -> c64) -> Self {
        let n = check_dims(&dims).expect("valid dims");
        Self { dims, mat: Mat::from_fn(n, n, f) }
    }

    pub fn from_real_fn(dims: Vec<usize>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(dims, |i, j| cr(f(i, j)))
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = check_dims(&dims).expect("valid dims");
        Self { dims, mat: Mat::zeros(n, n) }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = check_dims(&dims).expect("valid dims");
        Self { dims, mat: Mat::identity(n, n) }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(vec![n], |i, j| if i == j { cr(values[i]) } else { c64::ZERO })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    /// Same matrix, different factorization of the space.
    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        let n = check_dims(&dims)?;
        if n != self.dim() {
            return Err(Error::Dimension(format!("cannot view {} as {dims:?}", self.dim())));
        }
        self.dims = dims;
        Ok(self)
    }

    pub fn adjoint(&self) -> Self {
        Self { dims: self.dims.clone(), mat: self.mat.adjoint().to_owned() }
    }

    pub fn scale(&self, s: c64) -> Self {
        Self::from_fn(self.dims.clone(), |i, j| s * self.mat[(i, j)])
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(cr(s))
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                m = m.max(self.mat[(i, j)].norm());
            }
        }
        m
    }

    /// max |O - O†|
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut r = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                r = r.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() <= HERMITIAN_TOL * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn is_unitary(&self) -> bool {
        let p = &self.adjoint() * self;
        max_abs_diff(&p, &Operator::identity(self.dims.clone())) < UNITARY_TOL
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        assert_eq!(self.dim(), psi.dim(), "operator/state dimension mismatch");
        StateVector { dims: psi.dims.clone(), amps: &self.mat * &psi.amps }
    }

    /// ⟨ψ|O|ψ⟩
    pub fn expect(&self, psi: &StateVector) -> c64 {
        psi.inner(&self.apply(psi))
    }

    /// Conjugation U O U†.
    pub fn conjugate_by(&self, u: &Operator) -> Operator {
        &(u * self) * &u.adjoint()
    }

    /// Leading principal block on the index set `idx` (in order). The result
    /// is a single-factor operator unless `dims` is given.
    pub fn select(&self, idx: &[usize], dims: Option<Vec<usize>>) -> Result<Operator> {
        let m = Mat::from_fn(idx.len(), idx.len(), |i, j| self.mat[(idx[i], idx[j])]);
        Operator::new(dims.unwrap_or_else(|| vec![idx.len()]), m)
    }

    /// Hermitian part (O + O†)/2, used to scrub round-off.
    pub fn hermitian_part(&self) -> Operator {
        Operator::from_fn(self.dims.clone(), |i, j| (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5)
    }
}

/// max over entries of |A − B|
pub fn max_abs_diff(a: &Operator, b: &Operator) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let mut m = 0.0f64;
    for j in 0..a.dim() {
        for i in 0..a.dim() {
            m = m.max((a.mat[(i, j)] - b.mat[(i, j)]).norm());
        }
    }
    m
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { dims: self.dims.clone(), mat: &self.mat + &rhs.mat }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { dims: self.dims.clone(), mat: &self.mat - &rhs.mat }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        Operator { dims: self.dims.clone(), mat: &self.mat * &rhs.mat }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale_real(-1.0)
    }
}

/// Normalizable state vector on `⊗ dims`.
#[derive(Clone, Debug)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Col<c64>,
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: Vec<c64>) -> Result<Self> {
        let n = check_dims(&dims)?;
        if amps.len() != n {
            return Err(Error::Dimension(format!("{} amplitudes for dims {dims:?}", amps.len())));
        }
        Ok(Self { dims, amps: Col::from_fn(n, |i| amps[i]) })
    }

    /// Computational basis state |k⟩.
    pub fn basis(dims: Vec<usize>, k: usize) -> Self {
        let n = check_dims(&dims).expect("valid dims");
        assert!(k < n, "basis index out of range");
        Self { dims, amps: Col::from_fn(n, |i| if i == k { c64::ONE } else { c64::ZERO }) }
    }

    pub fn from_col(dims: Vec<usize>, amps: Col<c64>) -> Self {
        assert_eq!(check_dims(&dims).expect("valid dims"), amps.nrows());
        Self { dims, amps }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.nrows()
    }

    pub fn amp(&self, i: usize) -> c64 {
        self.amps[i]
    }

    pub fn amps(&self) -> Vec<c64> {
        (0..self.dim()).map(|i| self.amps[i]).collect()
    }

    pub fn col(&self) -> &Col<c64> {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm_l2()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self { dims: self.dims.clone(), amps: Col::from_fn(self.dim(), |i| self.amps[i] / n) }
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> c64 {
        assert_eq!(self.dim(), other.dim());
        (0..self.dim()).map(|i| self.amps[i].conj() * other.amps[i]).sum()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let (n, m) = (self.dim(), other.dim());
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, amps: Col::from_fn(n * m, |k| self.amps[k / m] * other.amps[k % m]) }
    }

    /// Multiply by a global phase so that the largest-magnitude amplitude is
    /// real and positive.
    pub fn fix_phase(&self) -> Self {
        let mut k = 0;
        for i in 0..self.dim() {
            if self.amps[i].norm() > self.amps[k].norm() {
                k = i;
            }
        }
        let a = self.amps[k];
        if a.norm() == 0.0 {
            return self.clone();
        }
        let ph = a.conj() / a.norm();
        Self { dims: self.dims.clone(), amps: Col::from_fn(self.dim(), |i| self.amps[i] * ph) }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        (0..self.dim()).map(|i| (self.amps[i] - other.amps[i]).norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Density matrix on `⊗ dims`.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: Operator,
}

impl DensityMatrix {
    /// Wraps an operator after checking Hermiticity, unit trace and
    /// positivity (eigenvalues ≥ −1e-10).
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_hermitian() {
            return Err(Error::NotHermitian { residual: op.hermiticity_residual(), scale: op.max_abs() });
        }
        let tr = op.trace();
        if (tr - c64::ONE).norm() > 1e-10 {
            return Err(Error::InvalidInput(format!("density matrix trace {tr} != 1")));
        }
        let ev = eigvals_hermitian(&op)?;
        if ev[0] < -1e-10 {
            return Err(Error::InvalidInput(format!("density matrix eigenvalue {} < 0", ev[0])));
        }
        Ok(Self { op })
    }

    pub fn pure(psi: &StateVector) -> Self {
        let psi = psi.normalized();
        let op = Operator::from_fn(psi.dims.clone(), |i, j| psi.amps[i] * psi.amps[j].conj());
        Self { op }
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn expect(&self, o: &Operator) -> c64 {
        (&self.op * o).trace()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { op: tensor(&self.op, &other.op) }
    }

    pub fn fidelity_with_pure(&self, psi: &StateVector) -> f64 {
        self.op.expect(psi).re
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> Result<f64> {
        let ev = eigvals_hermitian(&self.op)?;
        Ok(ev.iter().filter(|&&p| p > 1e-15).map(|&p| -p * p.ln()).sum())
    }
}

/// Kronecker product; factor dimensions are concatenated.
pub fn tensor(a: &Operator, b: &Operator) -> Operator {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    let (n, m) = (a.dim(), b.dim());
    let mat = Mat::from_fn(n * m, n * m, |r, c| a.mat[(r / m, c / m)] * b.mat[(r % m, c % m)]);
    Operator { dims, mat }
}

/// Kronecker product of a list, left to right.
pub fn tensor_all(ops: &[&Operator]) -> Operator {
    let mut acc = ops[0].clone();
    for o in &ops[1..] {
        acc = tensor(&acc, o);
    }
    acc
}

/// Eigen-decomposition of a Hermitian operator; columns of `vectors` are the
/// eigenvectors, ordered with `values` ascending.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> StateVector {
        let n = self.vectors.dim();
        StateVector::from_col(self.vectors.dims.clone(), Col::from_fn(n, |i| self.vectors.mat[(i, k)]))
    }

    pub fn ground(&self) -> StateVector {
        self.vector(0).fix_phase()
    }
}

fn require_hermitian(h: &Operator) -> Result<()> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian { residual: h.hermiticity_residual(), scale: h.max_abs() });
    }
    Ok(())
}

/// Diagonal phases d with d_i H_ij d_j* real, if they exist.
fn real_gauge(h: &Operator) -> Option<Vec<c64>> {
    let n = h.dim();
    let scale = h.max_abs();
    if scale == 0.0 {
        return Some(vec![c64::ONE; n]);
    }
    let thr = 1e-14 * scale;
    let mut d: Vec<Option<c64>> = vec![None; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(c64::ONE);
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            let di = d[i].unwrap();
            for j in 0..n {
                if d[j].is_some() {
                    continue;
                }
                let hij = h.mat[(i, j)];
                let a = hij.norm();
                if a > thr {
                    // Keep already-real couplings real without flipping signs.
                    let u = if hij.im.abs() <= 1e-15 * a { c64::ONE } else { hij / a };
                    d[j] = Some(di * u);
                    queue.push_back(j);
                }
            }
        }
    }
    let d: Vec<c64> = d.into_iter().map(Option::unwrap).collect();
    let tol = 1e-13 * scale;
    for j in 0..n {
        for i in 0..n {
            let v = d[i] * h.mat[(i, j)] * d[j].conj();
            if v.im.abs() > tol {
                return None;
            }
        }
    }
    Some(d)
}

fn real_symmetric(h: &Operator, d: &[c64]) -> Mat<f64> {
    let n = h.dim();
    Mat::from_fn(n, n, |i, j| {
        let a = (d[i] * h.mat[(i, j)] * d[j].conj()).re;
        let b = (d[j] * h.mat[(j, i)] * d[i].conj()).re;
        0.5 * (a + b)
    })
}

/// Ascending eigenvalues of a Hermitian operator.
pub fn eigvals_hermitian(h: &Operator) -> Result<Vec<f64>> {
    require_hermitian(h)?;
    let vals = if let Some(d) = real_gauge(h) {
        real_symmetric(h, &d).self_adjoint_eigenvalues(Side::Lower)
    } else {
        h.mat.self_adjoint_eigenvalues(Side::Lower)
    };
    let mut vals = vals.map_err(|e| Error::Eigen(format!("{e:?}")))?;
    vals.sort_by(|a, b| a.total_cmp(b));
    Ok(vals)
}

/// Full eigendecomposition of a Hermitian operator.
pub fn eig_hermitian(h: &Operator) -> Result<Eigen> {
    require_hermitian(h)?;
    let n = h.dim();
    let (values, vecs) = if let Some(d) = real_gauge(h) {
        let e = real_symmetric(h, &d)
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let s = e.S().column_vector();
        let u = e.U();
        let values: Vec<f64> = (0..n).map(|k| s[k]).collect();
        // H = D† H_r D, so eigenvectors map back as v = D† v_r.
        let vecs = Mat::from_fn(n, n, |i, k| d[i].conj() * u[(i, k)]);
        (values, vecs)
    } else {
        let e = h.mat.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let s = e.S().column_vector();
        let values: Vec<f64> = (0..n).map(|k| s[k].re).collect();
        (values, e.U().to_owned())
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let values_sorted = order.iter().map(|&k| values[k]).collect();
    let vecs_sorted = Mat::from_fn(n, n, |i, k| vecs[(i, order[k])]);
    Ok(Eigen { values: values_sorted, vectors: Operator { dims: h.dims.clone(), mat: vecs_sorted } })
}

/// Unitary exp(iG) of a Hermitian generator via its eigendecomposition.
pub fn expi(g: &Operator) -> Result<Operator> {
    let e = eig_hermitian(g)?;
    Ok(expi_from_eigen(&e, 1.0))
}

/// exp(i s G) from a precomputed decomposition of G.
pub fn expi_from_eigen(e: &Eigen, s: f64) -> Operator {
    let n = e.values.len();
    let v = &e.vectors.mat;
    let ph: Vec<c64> = e.values.iter().map(|&l| c64::cis(s * l)).collect();
    let vd = Mat::from_fn(n, n, |i, k| v[(i, k)] * ph[k]);
    Operator { dims: e.vectors.dims.clone(), mat: &vd * v.adjoint() }
}

/// Controls for [`evolve_schrodinger`].
#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    /// Acceptance threshold on max_t ‖ψ_fine(t) − ψ_coarse(t)‖.
    pub tol: f64,
    /// Maximum number of substep doublings.
    pub max_depth: usize,
    /// Substeps per grid interval on the first pass.
    pub initial_substeps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_depth: 14, initial_substeps: 1 }
    }
}

fn inf_norm(m: &Mat<c64>) -> f64 {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// One fourth-order Magnus step from t to t+h with the two-point Gauss rule.
/// exp(Ω)ψ is applied by a Taylor series, split into enough sub-exponentials
/// that each has norm below one.
fn magnus_step(h_of_t: &impl Fn(f64) -> Operator, t: f64, h: f64, psi: &Col<c64>) -> Col<c64> {
    let c = 3f64.sqrt() / 6.0;
    let mut h1 = h_of_t(t + (0.5 - c) * h).mat;
    let mut h2 = h_of_t(t + (0.5 + c) * h).mat;
    // Removing the midpoint of the diagonal range shrinks the norm; the shift
    // comes back as an exact global phase.
    let n = h1.nrows();
    let (lo, hi) = (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
        let d = 0.5 * (h1[(i, i)].re + h2[(i, i)].re);
        (lo.min(d), hi.max(d))
    });
    let shift = 0.5 * (lo + hi);
    for i in 0..n {
        h1[(i, i)] -= cr(shift);
        h2[(i, i)] -= cr(shift);
    }
    let k = 3f64.sqrt() / 12.0 * h * h;
    // ‖[H2,H1]‖ = ‖[H2 − H1, H1]‖ ≤ 2‖H2 − H1‖‖H1‖, which stays small for smooth H(t).
    let (n1, n2) = (inf_norm(&h1), inf_norm(&h2));
    let bound = 0.5 * h * (n1 + n2) + 2.0 * k * inf_norm(&(&h2 - &h1)) * n1;
    let pieces = bound.ceil().max(1.0) as usize;
    let w = 1.0 / pieces as f64;
    // Ω v = −i(h/2)(H1+H2)v − k[H2,H1]v
    let omega = |v: &Col<c64>| -> Col<c64> {
        let a = &h1 * v;
        let b = &h2 * v;
        let ab = &h1 * &b;
        let ba = &h2 * &a;
        let n = v.nrows();
        Col::from_fn(n, |i| {
            (-I * (0.5 * h) * (a[i] + b[i]) - cr(k) * (ba[i] - ab[i])) * w
        })
    };
    let mut out = psi.clone();
    for _ in 0..pieces {
        let mut term = out.clone();
        let mut acc = out.clone();
        let scale = out.norm_l2().max(f64::MIN_POSITIVE);
        for j in 1..60 {
            let next = omega(&term);
            term = Col::from_fn(next.nrows(), |i| next[i] / (j as f64));
            acc = &acc + &term;
            if term.norm_l2() < 1e-17 * scale {
                break;
            }
        }
        out = acc;
    }
    let phase = c64::from_polar(1.0, -shift * h);
    Col::from_fn(n, |i| out[i] * phase)
}

fn propagate(
    h_of_t: &impl Fn(f64) -> Operator,
    psi0: &Col<c64>,
    t_grid: &[f64],
    substeps: usize,
) -> Vec<Col<c64>> {
    let mut out = Vec::with_capacity(t_grid.len());
    let mut psi = psi0.clone();
    out.push(psi.clone());
    for w in t_grid.windows(2) {
        let dt = (w[1] - w[0]) / substeps as f64;
        for s in 0..substeps {
            psi = magnus_step(h_of_t, w[0] + s as f64 * dt, dt, &psi);
        }
        out.push(psi.clone());
    }
    out
}

/// Solve i dψ/dt = H(t) ψ on `t_grid`, returning ψ at every grid time
/// (the first entry is ψ0). Substeps per interval are doubled until two
/// successive passes agree to `opts.tol` everywhere on the grid.
pub fn evolve_schrodinger(
    h_of_t: impl Fn(f64) -> Operator,
    psi0: &StateVector,
    t_grid: &[f64],
    opts: EvolveOptions,
) -> Result<Vec<StateVector>> {
    if t_grid.is_empty() {
        return Ok(vec![]);
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
    }
    let h0 = h_of_t(t_grid[0]);
    require_hermitian(&h0)?;
    if h0.dim() != psi0.dim() {
        return Err(Error::Dimension("Hamiltonian and state differ in size".into()));
    }
    let mut sub = opts.initial_substeps.max(1);
    let mut prev = propagate(&h_of_t, &psi0.amps, t_grid, sub);
    let mut achieved = f64::INFINITY;
    for _ in 0..opts.max_depth {
        sub *= 2;
        let next = propagate(&h_of_t, &psi0.amps, t_grid, sub);
        achieved = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (0..a.nrows()).map(|i| (a[i] - b[i]).norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        prev = next;
        if achieved < opts.tol {
            return Ok(prev.into_iter().map(|c| StateVector::from_col(psi0.dims.clone(), c)).collect());
        }
    }
    Err(Error::NonConvergence { depth: opts.max_depth, achieved, target: opts.tol })
}

/// Row-major vectorization: vec(A ρ B) = (A ⊗ Bᵀ) vec(ρ).
fn liouvillian(h: &Operator, jumps: &[(f64, Operator)]) -> Mat<c64> {
    let n = h.dim();
    let id = Mat::<c64>::identity(n, n);
    let kr = |a: MatRef<c64>, b: MatRef<c64>| -> Mat<c64> {
        Mat::from_fn(n * n, n * n, |r, c| a[(r / n, c / n)] * b[(r % n, c % n)])
    };
    let ht = h.mat.transpose().to_owned();
    let mut l = kr(h.mat.as_ref(), id.as_ref()) - kr(id.as_ref(), ht.as_ref());
    l = Mat::from_fn(n * n, n * n, |r, c| -I * l[(r, c)]);
    for (rate, op) in jumps {
        let lm = &op.mat;
        let ldl = lm.adjoint() * lm;
        let lconj = Mat::from_fn(n, n, |i, j| lm[(i, j)].conj());
        let ldlt = ldl.transpose().to_owned();
        let d = kr(lm.as_ref(), lconj.as_ref()) - kr(ldl.as_ref(), id.as_ref()) * faer::Scale(cr(0.5))
            - kr(id.as_ref(), ldlt.as_ref()) * faer::Scale(cr(0.5));
        l += d * faer::Scale(cr(*rate));
    }
    l
}

/// Norm of L(ρ) for the given generator.
pub fn lindblad_residual(h: &Operator, jumps: &[(f64, Operator)], rho: &DensityMatrix) -> f64 {
    let n = h.dim();
    let mut out = h.commutator(rho.operator()).mat * faer::Scale(-I);
    for (rate, op) in jumps {
        let l = &op.mat;
        let ld = l.adjoint().to_owned();
        let r = &rho.op.mat;
        let t = l * r * &ld - (&ld * l * r + r * &ld * l) * faer::Scale(cr(0.5));
        out += t * faer::Scale(cr(*rate));
    }
    let mut m = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            m = m.max(out[(i, j)].norm());
        }
    }
    m
}

/// Stationary state of dρ/dt = −i[H,ρ] + Σ γ (LρL† − ½{L†L, ρ}).
pub fn lindblad_steady(h: &Operator, jumps: &[(f64, Operator)]) -> Result<DensityMatrix> {
    require_hermitian(h)?;
    for (rate, op) in jumps {
        if *rate < 0.0 || !rate.is_finite() {
            return Err(Error::InvalidInput(format!("negative or non-finite rate {rate}")));
        }
        if op.dim() != h.dim() {
            return Err(Error::Dimension("jump operator size differs from H".into()));
        }
    }
    let n = h.dim();
    let l = liouvillian(h, jumps);
    let svd = l.svd().map_err(|e| Error::Solve(format!("{e:?}")))?;
    let s: Vec<f64> = (0..n * n).map(|k| svd.S().column_vector()[k].re).collect();
    let smax = (0..n * n).map(|k| s[k]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let null: Vec<usize> = (0..n * n).filter(|&k| s[k] <= 1e-10 * smax).collect();
    let v = svd.V();
    if null.len() > 1 {
        let basis = null.iter().map(|&k| (0..n * n).map(|r| v[(r, k)].re).collect()).collect();
        return Err(Error::DegenerateSteadyState { basis });
    }
    // The smallest singular value's right vector spans the null space.
    let k = (0..n * n).min_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
    let mut rho = Mat::from_fn(n, n, |i, j| v[(i * n + j, k)]);
    let tr: c64 = (0..n).map(|i| rho[(i, i)]).sum();
    if tr.norm() < 1e-14 {
        return Err(Error::Solve("null vector has zero trace".into()));
    }
    rho = Mat::from_fn(n, n, |i, j| rho[(i, j)] / tr);
    // Replace the equation for ρ_00 by the trace condition; the diagonal rows
    // of L are linearly dependent because L is trace preserving.
    let mut a = l;
    let mut rhs = Mat::<c64>::zeros(n * n, 1);
    for c in 0..n * n {
        a[(0, c)] = c64::ZERO;
    }
    for i in 0..n {
        a[(0, i * n + i)] = c64::ONE;
    }
    rhs[(0, 0)] = c64::ONE;
    let x = a.partial_piv_lu().solve(&rhs);
    let solved = Mat::from_fn(n, n, |i, j| x[(i * n + j, 0)]);
    let finite = (0..n).all(|i| (0..n).all(|j| solved[(i, j)].re.is_finite() && solved[(i, j)].im.is_finite()));
    if finite {
        rho = solved;
    }
    let op = Operator { dims: h.dims.clone(), mat: rho }.hermitian_part();
    DensityMatrix::new(op)
}

/// Reduce ρ onto the factors listed in `keep` (ascending factor indices).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = rho.dims().to_vec();
    let nf = dims.len();
    if keep.is_empty() || keep.iter().any(|&k| k >= nf) || keep.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!("keep set {keep:?} invalid for {nf} factors")));
    }
    let traced: Vec<usize> = (0..nf).filter(|k| !keep.contains(k)).collect();
    let kd: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let td: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let nk: usize = kd.iter().product();
    let nt: usize = td.iter().product();
    let strides: Vec<usize> = (0..nf).map(|k| dims[k + 1..].iter().product()).collect();
    let compose = |kidx: usize, tidx: usize| -> usize {
        let mut idx = 0;
        let mut r = kidx;
        for (p, &f) in keep.iter().enumerate().rev() {
            idx += (r % kd[p]) * strides[f];
            r /= kd[p];
        }
        let mut r = tidx;
        for (p, &f) in traced.iter().enumerate().rev() {
            idx += (r % td[p]) * strides[f];
            r /= td[p];
        }
        idx
    };
    let m = &rho.op.mat;
    let out = Mat::from_fn(nk, nk, |a, b| (0..nt).map(|t| m[(compose(a, t), compose(b, t))]).sum());
    Ok(DensityMatrix { op: Operator { dims: kd, mat: out } })
}

/// Bosonic annihilation operator truncated to `n` Fock states.
pub fn destroy(n: usize) -> Operator {
    Operator::from_real_fn(vec![n], |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

pub fn create(n: usize) -> Operator {
    destroy(n).adjoint()
}

pub fn number(n: usize) -> Operator {
    Operator::from_real_fn(vec![n], |i, j| if i == j { i as f64 } else { 0.0 })
}

/// X = a + a† on `n` Fock states.
pub fn quad_x(n: usize) -> Operator {
    Operator::from_real_fn(vec![n], |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else if i == j + 1 {
            (i as f64).sqrt()
        } else {
            0.0
        }
    })
}

/// Y = i(a† − a) on `n` Fock states.
pub fn quad_y(n: usize) -> Operator {
    Operator::from_fn(vec![n], |i, j| {
        if i == j + 1 {
            I * (i as f64).sqrt()
        } else if j == i + 1 {
            -I * (j as f64).sqrt()
        } else {
            c64::ZERO
        }
    })
}

/// X² projected from the untruncated square, so the truncated matrix is the
/// exact compression of (a + a†)² rather than the square of a truncation.
pub fn quad_x_sq(n: usize) -> Operator {
    Operator::from_real_fn(vec![n], |i, j| {
        let (i, j) = (i.min(j), i.max(j));
        if i == j {
            2.0 * i as f64 + 1.0
        } else if j == i + 2 {
            ((i + 1) as f64 * (i + 2) as f64).sqrt()
        } else {
            0.0
        }
    })
}

/// Two-level operators on the basis {|0⟩ ground, |1⟩ excited}.
pub mod pauli {
    use super::*;

    pub fn x() -> Operator {
        Operator::from_real_fn(vec![2], |i, j| if i != j { 1.0 } else { 0.0 })
    }

    /// σ^y = i(σ⁺ − σ⁻)
    pub fn y() -> Operator {
        Operator::from_fn(vec![2], |i, j| match (i, j) {
            (1, 0) => I,
            (0, 1) => -I,
            _ => c64::ZERO,
        })
    }

    /// σ^z = |1⟩⟨1| − |0⟩⟨0|
    pub fn z() -> Operator {
        Operator::diagonal(&[-1.0, 1.0])
    }

    /// σ⁺ = |1⟩⟨0|
    pub fn plus() -> Operator {
        Operator::from_real_fn(vec![2], |i, j| if i == 1 && j == 0 { 1.0 } else { 0.0 })
    }

    pub fn minus() -> Operator {
        plus().adjoint()
    }
}

/// Lowest eigenpair of a Hermitian operator by Lanczos iteration with full
/// reorthogonalization and restarts. Returns the two lowest Ritz values so
/// callers can judge the gap.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub next_ritz: f64,
    pub state: StateVector,
    pub residual: f64,
}

pub fn ground_state(h: &Operator, tol: f64) -> Result<GroundState> {
    require_hermitian(h)?;
    let n = h.dim();
    if n <= 64 {
        let e = eig_hermitian(h)?;
        let next = if n > 1 { e.values[1] } else { f64::INFINITY };
        return Ok(GroundState { energy: e.values[0], next_ritz: next, state: e.ground(), residual: 0.0 });
    }
    let scale = inf_norm(&h.mat).max(f64::MIN_POSITIVE);
    let krylov = n.min(160);
    // Deterministic start vector with weight on every component.
    let mut start = Col::from_fn(n, |i| c64::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0));
    let mut last = (f64::INFINITY, f64::INFINITY);
    for _restart in 0..60 {
        let nrm = start.norm_l2();
        let mut basis: Vec<Col<c64>> = vec![Col::from_fn(n, |i| start[i] / nrm)];
        let mut alpha = vec![];
        let mut beta: Vec<f64> = vec![];
        for j in 0..krylov {
            let mut w = &h.mat * &basis[j];
            let a: c64 = (0..n).map(|i| basis[j][i].conj() * w[i]).sum();
            alpha.push(a.re);
            for _pass in 0..2 {
                for b in &basis {
                    let c: c64 = (0..n).map(|i| b[i].conj() * w[i]).sum();
                    w = Col::from_fn(n, |i| w[i] - c * b[i]);
                }
            }
            let bnorm = w.norm_l2();
            if j + 1 == krylov || bnorm < 1e-14 * scale {
                break;
            }
            beta.push(bnorm);
            basis.push(Col::from_fn(n, |i| w[i] / bnorm));
        }
        let k = alpha.len();
        let t = Mat::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i == j + 1 {
                beta[j]
            } else if j == i + 1 {
                beta[i]
            } else {
                0.0
            }
        });
        let te = t.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let s = te.S().column_vector();
        let y = te.U();
        let (e0, e1) = (s[0], if k > 1 { s[1] } else { f64::INFINITY });
        let v = Col::from_fn(n, |i| (0..k).map(|j| basis[j][i] * y[(j, 0)]).sum::<c64>());
        let v = Col::from_fn(n, |i| v[i] / v.norm_l2());
        let hv = &h.mat * &v;
        let res = (0..n).map(|i| (hv[i] - v[i] * e0).norm_sqr()).sum::<f64>().sqrt();
        if res < tol * scale {
            let state = StateVector::from_col(h.dims.clone(), v).fix_phase();
            return Ok(GroundState { energy: e0, next_ritz: e1, state, residual: res });
        }
        last = (res, e0);
        start = v;
    }
    Err(Error::NonConvergence { depth: 60, achieved: last.0 / scale, target: tol })
}
