//! Dense `n`-qubit states, the collective spin `Jᶻ`, variance and quantum
//! Fisher information.
//!
//! Qubit 0 is the most significant bit of a basis index. Pure-state paths
//! never build matrices, so they run up to [`PURE_QUBIT_CAP`] qubits; density
//! matrices are limited to [`MIXED_QUBIT_CAP`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bounds::bound_curve;
use crate::classify::{ensemble_depth, pure_depth, Ensemble};
use crate::error::{Error, Result};
use crate::genfun::GenFun;
use crate::partition::Partition;

pub const PURE_QUBIT_CAP: u32 = 20;
pub const MIXED_QUBIT_CAP: u32 = 8;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

fn check_cap(what: &'static str, n: u32, cap: u32) -> Result<()> {
    if n == 0 || n > cap {
        return Err(Error::Cap { what, n, cap });
    }
    Ok(())
}

fn dim(n: u32) -> usize {
    1usize << n
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

// ==== pure states ==========================================================

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Requires `2ⁿ` amplitudes of unit norm.
    pub fn new(n: u32, amps: Vec<Complex64>) -> Result<Self> {
        check_cap("state vector", n, PURE_QUBIT_CAP)?;
        if amps.len() != dim(n) {
            return Err(Error::Dimension(amps.len(), dim(n)));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm² = {norm}")));
        }
        Ok(Self { n, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(n: u32, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::new(n, amps)
    }

    /// Computational basis state; `bits[0]` is qubit 0.
    pub fn basis(bits: &[bool]) -> Result<Self> {
        let n = bits.len() as u32;
        check_cap("state vector", n, PURE_QUBIT_CAP)?;
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b));
        let mut amps = vec![Complex64::new(0.0, 0.0); dim(n)];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// `(|0…0⟩ + e^{iθ}|1…1⟩)/√2`
    pub fn ghz(n: u32, theta: f64) -> Result<Self> {
        check_cap("state vector", n, PURE_QUBIT_CAP)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim(n)];
        let a = std::f64::consts::FRAC_1_SQRT_2;
        amps[0] += a;
        amps[dim(n) - 1] += Complex64::from_polar(a, theta);
        Ok(Self { n, amps })
    }

    /// Haar-like random state from a seeded complex Gaussian vector.
    pub fn random(n: u32, seed: u64) -> Result<Self> {
        check_cap("state vector", n, PURE_QUBIT_CAP)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::normalized(n, (0..dim(n)).map(|_| gaussian(&mut rng)).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n + other.n;
        check_cap("state vector", n, PURE_QUBIT_CAP)?;
        let mut amps = Vec::with_capacity(dim(n));
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self { n, amps })
    }

    /// Moves qubit `q` to position `perm[q]`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n as usize;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Argument(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0usize;
            for (q, &target) in perm.iter().enumerate() {
                let bit = (i >> (n - 1 - q)) & 1;
                j |= bit << (n - 1 - target);
            }
            amps[j] = *a;
        }
        Ok(Self { n: self.n, amps })
    }

    /// `⟨ψ|A|ψ⟩` and `⟨ψ|A²|ψ⟩` for a diagonal `A`.
    fn moments(&self, a: &CollectiveOp) -> (f64, f64) {
        self.amps
            .iter()
            .zip(&a.diagonal)
            .fold((0.0, 0.0), |(m1, m2), (amp, &d)| {
                let p = amp.norm_sqr();
                (m1 + p * d, m2 + p * d * d)
            })
    }
}

/// Tensor product of `x`-qubit GHZ blocks, one per part of `xi`, on
/// contiguous qubits in canonical part order. A block of size one is
/// `(|0⟩+|1⟩)/√2`.
pub fn ghz_product_state(xi: &Partition) -> Result<StateVector> {
    check_cap("ghz product state", xi.n(), PURE_QUBIT_CAP)?;
    let mut blocks = xi.parts().iter().map(|&x| StateVector::ghz(x, 0.0));
    let mut state = blocks.next().expect("nonempty partition")?;
    for b in blocks {
        state = state.tensor(&b?)?;
    }
    Ok(state)
}

/// Product of independent random pure states on contiguous blocks sized by
/// the parts of `xi`.
pub fn random_block_product_state(xi: &Partition, seed: u64) -> Result<StateVector> {
    check_cap("block product state", xi.n(), PURE_QUBIT_CAP)?;
    let mut state: Option<StateVector> = None;
    for (i, &x) in xi.parts().iter().enumerate() {
        let block = StateVector::random(x, seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64))?;
        state = Some(match state {
            None => block,
            Some(s) => s.tensor(&block)?,
        });
    }
    Ok(state.expect("nonempty partition"))
}

// ==== mixed states =========================================================

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: u32,
    mat: DMatrix<Complex64>,
}

/// Eigenvalues (ascending, clamped at 0) and matching eigenvector columns.
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(n: u32, mat: DMatrix<Complex64>) -> Result<Self> {
        check_cap("density matrix", n, MIXED_QUBIT_CAP)?;
        let d = dim(n);
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::Dimension(mat.nrows().max(mat.ncols()), d));
        }
        for i in 0..d {
            for j in i..d {
                if (mat[(i, j)] - mat[(j, i)].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidState(format!("not Hermitian at ({i},{j})")));
                }
            }
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace = {trace}")));
        }
        let rho = Self { n, mat };
        let min = rho.raw_spectrum()?.min_raw;
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
        }
        Ok(rho)
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        check_cap("density matrix", psi.n, MIXED_QUBIT_CAP)?;
        let v = DVector::from_column_slice(&psi.amps);
        Ok(Self { n: psi.n, mat: &v * v.adjoint() })
    }

    pub fn maximally_mixed(n: u32) -> Result<Self> {
        check_cap("density matrix", n, MIXED_QUBIT_CAP)?;
        let d = dim(n);
        Ok(Self {
            n,
            mat: DMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0),
        })
    }

    /// `Σ w_i ρ_i` with positive weights summing to 1.
    pub fn mixture(terms: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Argument("empty mixture".into()))?;
        let n = first.1.n;
        let d = dim(n);
        let mut mat = DMatrix::zeros(d, d);
        let mut total = 0.0;
        for (w, rho) in terms {
            if rho.n != n {
                return Err(Error::Dimension(dim(rho.n), d));
            }
            if !(*w > 0.0) {
                return Err(Error::Argument(format!("mixture weight {w} is not positive")));
            }
            total += w;
            mat += &rho.mat * Complex64::new(*w, 0.0);
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::Argument(format!("mixture weights sum to {total}")));
        }
        Ok(Self { n, mat })
    }

    /// `G G† / tr(G G†)` for a seeded complex Gaussian `2ⁿ × rank` matrix.
    pub fn random(n: u32, rank: usize, seed: u64) -> Result<Self> {
        check_cap("density matrix", n, MIXED_QUBIT_CAP)?;
        if rank == 0 {
            return Err(Error::Argument("rank must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(dim(n), rank, |_, _| gaussian(&mut rng));
        let mut mat = &g * g.adjoint();
        let tr = mat.trace().re;
        mat /= Complex64::new(tr, 0.0);
        hermitize(&mut mat);
        Ok(Self { n, mat })
    }

    /// The two-level family `½(|0…0⟩⟨0…0| + |1…1⟩⟨1…1|) + ½(c|0…0⟩⟨1…1| + h.c.)`,
    /// `|c| ≤ 1`, all of which reach the maximal variance `n²/4` of `Jᶻ`.
    pub fn bhatia_davis(n: u32, c: Complex64) -> Result<Self> {
        check_cap("density matrix", n, MIXED_QUBIT_CAP)?;
        if c.norm() > 1.0 + NORM_TOL {
            return Err(Error::Argument(format!("|c| = {} exceeds 1", c.norm())));
        }
        let d = dim(n);
        let mut mat = DMatrix::zeros(d, d);
        mat[(0, 0)] = Complex64::new(0.5, 0.0);
        mat[(d - 1, d - 1)] = Complex64::new(0.5, 0.0);
        mat[(0, d - 1)] = c * 0.5;
        mat[(d - 1, 0)] = c.conj() * 0.5;
        Ok(Self { n, mat })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Hermitian eigendecomposition with a residual check.
    pub fn spectrum(&self) -> Result<Spectrum> {
        Ok(self.raw_spectrum()?.spectrum)
    }

    fn raw_spectrum(&self) -> Result<RawSpectrum> {
        let eig = self.mat.clone().symmetric_eigen();
        let scale = self.mat.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let d = self.mat.nrows();
        for k in 0..d {
            let v = eig.eigenvectors.column(k);
            let residual = &self.mat * v - v * Complex64::new(eig.eigenvalues[k], 0.0);
            let r = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if r > EIGEN_RESIDUAL_TOL * scale || !r.is_finite() {
                return Err(Error::Eigen(format!("residual {r:e} for eigenpair {k}")));
            }
        }
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let min_raw = order.first().map_or(0.0, |&i| eig.eigenvalues[i]);
        let values = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        let vectors = DMatrix::from_fn(d, d, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(RawSpectrum {
            spectrum: Spectrum { values, vectors },
            min_raw,
        })
    }

    fn moments(&self, a: &CollectiveOp) -> (f64, f64) {
        (0..self.mat.nrows()).fold((0.0, 0.0), |(m1, m2), i| {
            let p = self.mat[(i, i)].re;
            let d = a.diagonal[i];
            (m1 + p * d, m2 + p * d * d)
        })
    }
}

struct RawSpectrum {
    spectrum: Spectrum,
    min_raw: f64,
}

fn hermitize(m: &mut DMatrix<Complex64>) {
    let h = (m.clone() + m.adjoint()) * Complex64::new(0.5, 0.0);
    *m = h;
}

impl DensityMatrix {
    /// Frobenius distance, used to check reconstructions.
    pub fn frobenius_distance(&self, other: &DensityMatrix) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    /// `Σ w_j |ψ_j⟩⟨ψ_j|` without validation of the result.
    pub fn from_decomposition(members: &[(f64, StateVector)]) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Argument("empty decomposition".into()))?;
        let n = first.1.n;
        check_cap("density matrix", n, MIXED_QUBIT_CAP)?;
        let d = dim(n);
        let mut mat = DMatrix::zeros(d, d);
        for (w, psi) in members {
            if psi.n != n {
                return Err(Error::Dimension(dim(psi.n), d));
            }
            let v = DVector::from_column_slice(&psi.amps);
            mat += (&v * v.adjoint()) * Complex64::new(*w, 0.0);
        }
        Ok(Self { n, mat })
    }
}

// ==== operators ============================================================

/// A diagonal collective observable.
#[derive(Clone, Debug, PartialEq)]
pub struct CollectiveOp {
    n: u32,
    diagonal: Vec<f64>,
}

impl CollectiveOp {
    /// `Jᶻ = Σ σᶻ/2`, with eigenvalue `(n₀ − n₁)/2` on a basis state with
    /// `n₀` zeros and `n₁` ones.
    pub fn jz(n: u32) -> Result<Self> {
        check_cap("collective operator", n, PURE_QUBIT_CAP)?;
        let diagonal = (0..dim(n))
            .map(|i| (f64::from(n) - 2.0 * f64::from((i as u64).count_ones())) / 2.0)
            .collect();
        Ok(Self { n, diagonal })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// `a_max − a_min`
    pub fn spectral_width(&self) -> f64 {
        let max = self.diagonal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.diagonal.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Either representation of a state.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn n(&self) -> u32 {
        match self {
            Self::Pure(s) => s.n,
            Self::Mixed(r) => r.n,
        }
    }
}

fn check_op(n: u32, a: &CollectiveOp) -> Result<()> {
    if a.n != n {
        return Err(Error::Dimension(dim(n), a.diagonal.len()));
    }
    Ok(())
}

/// `⟨A²⟩ − ⟨A⟩²`
pub fn variance(state: &QuantumState, a: &CollectiveOp) -> Result<f64> {
    check_op(state.n(), a)?;
    let (m1, m2) = match state {
        QuantumState::Pure(s) => s.moments(a),
        QuantumState::Mixed(r) => r.moments(a),
    };
    Ok((m2 - m1 * m1).max(0.0))
}

/// Pure-state QFI, `4 Var(ψ, A)`.
pub fn qfi_pure(psi: &StateVector, a: &CollectiveOp) -> Result<f64> {
    check_op(psi.n, a)?;
    let (m1, m2) = psi.moments(a);
    Ok(4.0 * (m2 - m1 * m1).max(0.0))
}

/// `F_Q = 2 Σ (λᵢ−λⱼ)²/(λᵢ+λⱼ) |⟨φᵢ|A|φⱼ⟩|²` over pairs with
/// `λᵢ+λⱼ > 10⁻¹²`. Within a degenerate eigenspace every numerator vanishes,
/// so the arbitrary basis the eigensolver picks there does not matter.
pub fn qfi(rho: &DensityMatrix, a: &CollectiveOp) -> Result<f64> {
    check_op(rho.n, a)?;
    let spec = rho.spectrum()?;
    let v = &spec.vectors;
    let d = v.nrows();
    let av = DMatrix::from_fn(d, d, |r, c| v[(r, c)] * a.diagonal[r]);
    let elements = v.adjoint() * av;
    let cutoff = 1e-12 * rho.mat.trace().re;
    let lam = &spec.values;
    let mut f = 0.0;
    for i in 0..d {
        for j in 0..d {
            let s = lam[i] + lam[j];
            if s <= cutoff {
                continue;
            }
            let diff = lam[i] - lam[j];
            f += diff * diff / s * elements[(i, j)].norm_sqr();
        }
    }
    Ok(2.0 * f)
}

/// QFI of either representation; pure states use [`qfi_pure`].
pub fn qfi_state(state: &QuantumState, a: &CollectiveOp) -> Result<f64> {
    match state {
        QuantumState::Pure(s) => qfi_pure(s, a),
        QuantumState::Mixed(r) => qfi(r, a),
    }
}

// ==== decompositions =======================================================

/// Pure-state decomposition `{(w_j, ψ_j)}` of `rho`.
pub type Decomposition = Vec<(f64, StateVector)>;

/// Mixes the scaled eigenvectors `√λᵢ φᵢ` through an `m × r` isometry `u`
/// (`u†u = 1`, `r` = number of nonzero eigenvalues): `w_j = Σᵢ u_{ji} √λᵢ φᵢ`.
pub fn decomposition_with_isometry(rho: &DensityMatrix, u: &DMatrix<Complex64>) -> Result<Decomposition> {
    let spec = rho.spectrum()?;
    let support: Vec<usize> = (0..spec.values.len())
        .filter(|&i| spec.values[i] > PSD_TOL)
        .collect();
    if u.ncols() != support.len() {
        return Err(Error::Dimension(u.ncols(), support.len()));
    }
    let gram = u.adjoint() * u;
    let identity = DMatrix::<Complex64>::identity(support.len(), support.len());
    if (gram - identity).norm() > 1e-9 {
        return Err(Error::Argument("mixing matrix is not an isometry".into()));
    }
    let d = spec.vectors.nrows();
    let mut out = Vec::with_capacity(u.nrows());
    for j in 0..u.nrows() {
        let mut w = vec![Complex64::new(0.0, 0.0); d];
        for (col, &i) in support.iter().enumerate() {
            let c = u[(j, col)] * spec.values[i].sqrt();
            for (wk, vk) in w.iter_mut().zip(spec.vectors.column(i).iter()) {
                *wk += c * vk;
            }
        }
        let p: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        if p > 0.0 {
            out.push((p, StateVector::normalized(rho.n, w)?));
        }
    }
    Ok(out)
}

/// An `m`-member decomposition through a seeded random isometry (QR of a
/// complex Gaussian `m × r` matrix). Requires `m ≥ rank(ρ)`.
pub fn random_decomposition(rho: &DensityMatrix, m: usize, seed: u64) -> Result<Decomposition> {
    let rank = rho.spectrum()?.values.iter().filter(|&&l| l > PSD_TOL).count();
    if m < rank {
        return Err(Error::Argument(format!("m = {m} is below the rank {rank}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(m, rank, |_, _| gaussian(&mut rng));
    let q = g.qr().q();
    decomposition_with_isometry(rho, &q)
}

// ==== criteria =============================================================

/// Separability information certified for the state under test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Finest separating type of a pure state.
    Pure { parts: Partition },
    /// Decomposition into pure states of known finest types.
    Ensemble { ensemble: Ensemble },
}

impl Certificate {
    pub fn n(&self) -> u32 {
        match self {
            Self::Pure { parts } => parts.n(),
            Self::Ensemble { ensemble } => ensemble.n(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub f: GenFun,
    pub fq: f64,
    /// Depth certified by the certificate.
    pub depth: f64,
    /// `b_f(depth)`
    pub bound: f64,
    pub margin: f64,
    /// `Σ p_j b_f(f(ξ_j))`
    pub convex_bound: f64,
    pub convex_margin: f64,
    /// `(a_max − a_min)²` of the operator, the QFI scale of `⊤`.
    pub normalization: f64,
    pub holds: bool,
}

/// Checks `F_Q ≤ b_f(D)` and the convex form `F_Q ≤ Σ p_j b_f(f(ξ_j))`
/// against `Jᶻ`.
pub fn verify_criterion(state: &QuantumState, f: &GenFun, cert: &Certificate) -> Result<CriterionReport> {
    let n = state.n();
    if cert.n() != n {
        return Err(Error::Inconsistent(format!(
            "certificate describes {} parties, state has {n}",
            cert.n()
        )));
    }
    let jz = CollectiveOp::jz(n)?;
    let fq = qfi_state(state, &jz)?;
    let table = bound_curve(f, n)?;
    let ensemble = match cert {
        Certificate::Pure { parts } => Ensemble::pure(parts.clone()),
        Certificate::Ensemble { ensemble } => ensemble.clone(),
    };
    let depth = match cert {
        Certificate::Pure { parts } => pure_depth(f, parts),
        Certificate::Ensemble { ensemble } => ensemble_depth(f, ensemble),
    };
    let bound = table.bound(depth)? as f64;
    let mut convex_bound = 0.0;
    for m in ensemble.members() {
        convex_bound += m.p * table.bound(pure_depth(f, &m.parts))? as f64;
    }
    let tol = 1e-9 * bound.max(1.0);
    Ok(CriterionReport {
        f: f.clone(),
        fq,
        depth,
        bound,
        margin: bound - fq,
        convex_bound,
        convex_margin: convex_bound - fq,
        normalization: jz.spectral_width().powi(2),
        holds: fq <= bound + tol && fq <= convex_bound + tol,
    })
}

// ==== state specs ==========================================================

/// JSON description of a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    GhzProduct { parts: Partition },
    /// Computational basis state, e.g. `"1000"`.
    Basis { bits: String },
    /// `(|0⟩+|1⟩)/√2` on every qubit.
    Plus { n: u32 },
    Mixture { terms: Vec<MixtureTerm> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureTerm {
    pub w: f64,
    pub state: StateSpec,
}

impl StateSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<QuantumState> {
        match self {
            Self::GhzProduct { parts } => Ok(QuantumState::Pure(ghz_product_state(parts)?)),
            Self::Basis { bits } => {
                let bits = bits
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(false),
                        '1' => Ok(true),
                        _ => Err(Error::Parse(format!("bad bit {c:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(QuantumState::Pure(StateVector::basis(&bits)?))
            }
            Self::Plus { n } => Ok(QuantumState::Pure(ghz_product_state(&Partition::bottom(*n))?)),
            Self::Mixture { terms } => {
                let mut parts = Vec::with_capacity(terms.len());
                for t in terms {
                    let rho = match t.state.build()? {
                        QuantumState::Pure(s) => DensityMatrix::from_pure(&s)?,
                        QuantumState::Mixed(r) => r,
                    };
                    parts.push((t.w, rho));
                }
                Ok(QuantumState::Mixed(DensityMatrix::mixture(&parts)?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn jz(n: u32) -> CollectiveOp {
        CollectiveOp::jz(n).unwrap()
    }

    #[test]
    fn jz_spectrum() {
        let a = jz(3);
        assert_eq!(a.diagonal(), &[1.5, 0.5, 0.5, -0.5, 0.5, -0.5, -0.5, -1.5]);
        assert_eq!(a.spectral_width(), 3.0);
    }

    #[test]
    fn variances() {
        let zero = QuantumState::Pure(StateVector::basis(&[false; 4]).unwrap());
        assert_eq!(variance(&zero, &jz(4)).unwrap(), 0.0);
        let ghz = QuantumState::Pure(StateVector::ghz(6, 0.3).unwrap());
        assert!((variance(&ghz, &jz(6)).unwrap() - 9.0).abs() < 1e-12);
        let xi = p(&[3, 2, 2, 1]);
        let psi = QuantumState::Pure(ghz_product_state(&xi).unwrap());
        assert!((variance(&psi, &jz(8)).unwrap() - 18.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn pure_qfi_values() {
        let psi = ghz_product_state(&p(&[4, 3, 2, 1])).unwrap();
        assert!((qfi_pure(&psi, &jz(10)).unwrap() - 30.0).abs() < 1e-9);
        let plus = ghz_product_state(&Partition::bottom(7)).unwrap();
        assert!((qfi_pure(&plus, &jz(7)).unwrap() - 7.0).abs() < 1e-9);
        assert!(ghz_product_state(&Partition::bottom(21)).is_err());
    }

    #[test]
    fn mixed_qfi_values() {
        let psi = StateVector::random(3, 7).unwrap();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        let pure = qfi_pure(&psi, &jz(3)).unwrap();
        assert!((qfi(&rho, &jz(3)).unwrap() - pure).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(qfi(&mixed, &jz(3)).unwrap().abs() < 1e-12);
        let classical = DensityMatrix::bhatia_davis(4, Complex64::new(0.0, 0.0)).unwrap();
        assert!(qfi(&classical, &jz(4)).unwrap().abs() < 1e-12);
        let m = QuantumState::Mixed(classical);
        assert!((variance(&m, &jz(4)).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        let bad = DMatrix::from_element(2, 2, Complex64::new(0.5, 0.0));
        assert!(DensityMatrix::new(1, bad).is_ok());
        let neg = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(1.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(-0.5, 0.0),
        ]);
        assert!(matches!(DensityMatrix::new(1, neg), Err(Error::InvalidState(_))));
        let wrong = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.5));
        assert!(DensityMatrix::new(1, wrong).is_err());
        assert!(matches!(DensityMatrix::maximally_mixed(9), Err(Error::Cap { .. })));
        assert!(StateVector::new(1, vec![Complex64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn decompositions_reconstruct() {
        let ghz = DensityMatrix::from_pure(&StateVector::ghz(4, 0.0).unwrap()).unwrap();
        let flip = DensityMatrix::from_pure(&StateVector::basis(&[true, false, false, false]).unwrap()).unwrap();
        let rho = DensityMatrix::mixture(&[(0.5, ghz), (0.5, flip)]).unwrap();
        let dec = random_decomposition(&rho, 4, 11).unwrap();
        let back = DensityMatrix::from_decomposition(&dec).unwrap();
        assert!(back.frobenius_distance(&rho) < 1e-9);
        assert!(random_decomposition(&rho, 1, 0).is_err());

        let psi = StateVector::random(2, 3).unwrap();
        let pure = DensityMatrix::from_pure(&psi).unwrap();
        let dec = random_decomposition(&pure, 1, 5).unwrap();
        assert_eq!(dec.len(), 1);
        let overlap: Complex64 = dec[0]
            .1
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qubit_permutation() {
        let psi = ghz_product_state(&p(&[2, 1])).unwrap();
        let moved = psi.permute_qubits(&[2, 0, 1]).unwrap();
        assert_ne!(moved, psi);
        assert!((qfi_pure(&moved, &jz(3)).unwrap() - qfi_pure(&psi, &jz(3)).unwrap()).abs() < 1e-12);
        assert!(psi.permute_qubits(&[0, 0, 1]).is_err());
    }

    #[test]
    fn criterion_examples() {
        let xi = p(&[3, 2, 1]);
        let state = QuantumState::Pure(ghz_product_state(&xi).unwrap());
        let cert = Certificate::Pure { parts: xi.clone() };
        let r = verify_criterion(&state, &GenFun::squareability(), &cert).unwrap();
        assert!((r.fq - 14.0).abs() < 1e-9 && r.margin.abs() < 1e-9 && r.holds);
        let r = verify_criterion(&state, &GenFun::width(), &cert).unwrap();
        assert_eq!(r.bound, 18.0);
        assert!(r.margin > 3.9);
        let wrong = Certificate::Pure { parts: p(&[2, 2]) };
        assert!(matches!(verify_criterion(&state, &GenFun::width(), &wrong), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn spec_json() {
        let s = StateSpec::from_json(r#"{"kind":"ghz_product","parts":[2,2]}"#).unwrap();
        let QuantumState::Pure(psi) = s.build().unwrap() else { panic!() };
        assert!((qfi_pure(&psi, &jz(4)).unwrap() - 8.0).abs() < 1e-9);
        let mix = r#"{"kind":"mixture","terms":[
            {"w":0.1,"state":{"kind":"ghz_product","parts":[4]}},
            {"w":0.9,"state":{"kind":"basis","bits":"1000"}}]}"#;
        let QuantumState::Mixed(rho) = StateSpec::from_json(mix).unwrap().build().unwrap() else { panic!() };
        assert!((qfi(&rho, &jz(4)).unwrap() - 1.6).abs() < 1e-9);
    }
}
