//! Truncated Fock-space linear algebra.
//!
//! States and operators of a single bosonic mode are dense complex matrices in
//! the number basis `|0⟩, …, |dim−1⟩`. Displacement matrix elements are exact
//! (closed-form Laguerre expressions), so the only approximation anywhere in
//! this module is the truncation of the state itself.

use std::f64::consts::FRAC_2_PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Numerical tolerances shared by the state containers and maps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub norm_tol: f64,
    pub herm_tol: f64,
    pub trace_tol: f64,
    pub psd_tol: f64,
    pub truncation_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm_tol: 1e-10,
            herm_tol: 1e-10,
            trace_tol: 1e-10,
            psd_tol: 1e-9,
            truncation_tol: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("norm_tol", self.norm_tol),
            ("herm_tol", self.herm_tol),
            ("trace_tol", self.trace_tol),
            ("psd_tol", self.psd_tol),
            ("truncation_tol", self.truncation_tol),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Smallest truncation dimension for a state of mean photon number `nbar`.
///
/// `ceil(4 n̄ + 8 √n̄ + 20)`; keeps the photon-number tail of the states used
/// here (n̄ ≲ 15) well below double precision.
pub fn truncation_dim(nbar: f64) -> usize {
    let n = nbar.max(0.0);
    (4.0 * n + 8.0 * n.sqrt() + 20.0).ceil() as usize
}

/// `ln k!` for `k = 0..len`.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len.max(1));
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..len {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Pure state amplitudes in the number basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amps: DVector<C64>,
}

impl FockVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Dimension("dim must be at least 1".into()));
        }
        Ok(Self {
            amps: DVector::from_vec(amps),
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescale to unit norm. Fails if the vector is numerically zero.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n < 1e-300 {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        self.amps.unscale_mut(n);
        Ok(self)
    }
}

/// Dense operator (or density matrix) on the truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    mat: DMatrix<C64>,
}

impl FockOperator {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() == 0 || mat.nrows() != mat.ncols() {
            return Err(Error::Dimension(format!(
                "operator must be square and non-empty, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_matrix_unchecked(mat: DMatrix<C64>) -> Self {
        debug_assert!(mat.is_square());
        Self { mat }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &FockVector) -> Self {
        Self {
            mat: psi.amps() * psi.amps().adjoint(),
        }
    }

    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        if populations.is_empty() {
            return Err(Error::Dimension("dim must be at least 1".into()));
        }
        let d = DVector::from_iterator(populations.len(), populations.iter().map(|&p| C64::new(p, 0.0)));
        Ok(Self {
            mat: DMatrix::from_diagonal(&d),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn vacuum(dim: usize) -> Self {
        let mut mat = DMatrix::zeros(dim, dim);
        mat[(0, 0)] = C64::new(1.0, 0.0);
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Real parts of the diagonal (photon-number populations for a state).
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.mat[(n, n)].re).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mat: self.mat.scale(factor),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
        }
    }

    /// `Tr[ρ A]`.
    pub fn expect(&self, op: &FockOperator) -> Result<C64> {
        if op.dim() != self.dim() {
            return Err(dim_mismatch(self.dim(), op.dim()));
        }
        let d = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += self.mat[(i, j)] * op.mat[(j, i)];
            }
        }
        Ok(acc)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.mat + self.mat.adjoint()).unscale(2.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Full density-operator check: Hermitian, unit trace, positive semidefinite.
    pub fn check_state(&self, tol: &Tolerances) -> Result<()> {
        self.check_state_cheap(tol.herm_tol, tol.trace_tol)?;
        let lmin = self.min_eigenvalue();
        if lmin < -tol.psd_tol {
            return Err(Error::Contract(format!("minimum eigenvalue {lmin:.3e} < -{:.1e}", tol.psd_tol)));
        }
        Ok(())
    }

    /// Hermiticity and trace only; O(dim²).
    pub(crate) fn check_state_cheap(&self, herm_tol: f64, trace_tol: f64) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > herm_tol {
            return Err(Error::Contract(format!("hermiticity defect {h:.3e} > {herm_tol:.1e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::Contract(format!("trace {tr} differs from 1 by more than {trace_tol:.1e}")));
        }
        Ok(())
    }

    /// Zero-pad or crop to `dim`.
    pub fn resized(&self, dim: usize) -> Self {
        let mut mat = DMatrix::zeros(dim, dim);
        let keep = dim.min(self.dim());
        mat.view_mut((0, 0), (keep, keep))
            .copy_from(&self.mat.view((0, 0), (keep, keep)));
        Self { mat }
    }

    /// Weight on the top `count` basis states, a proxy for truncation error.
    pub fn edge_mass(&self, count: usize) -> f64 {
        let d = self.dim();
        (d.saturating_sub(count)..d).map(|n| self.mat[(n, n)].re.abs()).sum()
    }
}

impl std::ops::Mul for &FockOperator {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator {
            mat: &self.mat * &rhs.mat,
        }
    }
}

fn dim_mismatch(a: usize, b: usize) -> Error {
    Error::Dimension(format!("dimension mismatch: {a} vs {b}"))
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    mat: Vec<[f64; 2]>,
}

impl Serialize for FockOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let mut mat = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.mat[(i, j)];
                mat.push([z.re, z.im]);
            }
        }
        OperatorJson { dim: d, mat }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = OperatorJson::deserialize(d)?;
        if raw.dim == 0 || raw.mat.len() != raw.dim * raw.dim {
            return Err(serde::de::Error::custom(format!(
                "expected {} entries for dim {}, got {}",
                raw.dim * raw.dim,
                raw.dim,
                raw.mat.len()
            )));
        }
        let mat = DMatrix::from_row_iterator(raw.dim, raw.dim, raw.mat.iter().map(|[re, im]| C64::new(*re, *im)));
        Ok(FockOperator { mat })
    }
}

/// Annihilation operator `a`.
pub fn annihilation(dim: usize) -> FockOperator {
    let mut mat = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        mat[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    FockOperator { mat }
}

pub fn number_operator(dim: usize) -> FockOperator {
    let d = DVector::from_iterator(dim, (0..dim).map(|n| C64::new(n as f64, 0.0)));
    FockOperator {
        mat: DMatrix::from_diagonal(&d),
    }
}

/// `Π = (−1)^{a†a}`.
pub fn parity_operator(dim: usize) -> FockOperator {
    let d = DVector::from_iterator(dim, (0..dim).map(|n| C64::new(parity_sign(n), 0.0)));
    FockOperator {
        mat: DMatrix::from_diagonal(&d),
    }
}

#[inline]
pub(crate) fn parity_sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn fock_state(m: usize, dim: usize) -> Result<FockVector> {
    if m >= dim {
        return Err(Error::Dimension(format!("photon number {m} does not fit in dim {dim}")));
    }
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    amps[m] = C64::new(1.0, 0.0);
    FockVector::new(amps)
}

/// `⟨n|α⟩ = e^{−|α|²/2} αⁿ/√n!` for `n < dim`.
pub fn coherent_amplitudes(alpha: C64, dim: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(dim);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        out.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    out
}

/// `⟨n|S(ξ)|0⟩` for `S(ξ) = exp{½ξ a†² − ½ξ* a²}`, `ξ = r e^{iφ}`.
///
/// Only even `n` are populated:
/// `⟨2k|S(ξ)|0⟩ = (cosh r)^{-1/2} (e^{iφ} tanh r / 2)^k √(2k)! / k!`.
pub fn squeezed_vacuum_amplitudes(xi: C64, dim: usize) -> Vec<C64> {
    let r = xi.norm();
    let mut out = vec![C64::new(0.0, 0.0); dim];
    if r == 0.0 {
        out[0] = C64::new(1.0, 0.0);
        return out;
    }
    let ratio = xi / r * (r.tanh() / 2.0);
    let mut c = C64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut k = 0usize;
    while 2 * k < dim {
        out[2 * k] = c;
        // c_{k+1} / c_k = ratio · √((2k+1)(2k+2)) / (k+1)
        let n = 2 * k;
        c = c * ratio * (((n + 1) * (n + 2)) as f64).sqrt() / ((k + 1) as f64);
        k += 1;
    }
    out
}

/// Matrix of `D(β) = exp{β a† − β* a}` from the closed-form elements
///
/// `⟨m|D(β)|n⟩ = √(n!/m!) β^{m−n} e^{−|β|²/2} L_n^{(m−n)}(|β|²)` for `m ≥ n`,
/// and the `(−β*)` counterpart above the diagonal.
pub fn displacement_matrix(beta: C64, dim: usize) -> FockOperator {
    let x = beta.norm_sqr();
    if x == 0.0 {
        return FockOperator::identity(dim);
    }
    let lnf = ln_factorials(dim);
    let ln_abs = beta.norm().ln();
    let theta = beta.arg();
    let mut mat = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let kf = k as f64;
        let below = C64::from_polar(1.0, kf * theta);
        let above = C64::from_polar(parity_sign(k), -kf * theta);
        // Laguerre L_j^{(k)}(x) by the forward three-term recurrence in j.
        let mut l_prev = 0.0;
        let mut l_cur = 1.0;
        for j in 0..dim - k {
            if j > 0 {
                let jf = (j - 1) as f64;
                let next = ((2.0 * jf + 1.0 + kf - x) * l_cur - (jf + kf) * l_prev) / (jf + 1.0);
                l_prev = l_cur;
                l_cur = next;
            }
            if l_cur == 0.0 {
                continue;
            }
            let ln_mag = 0.5 * (lnf[j] - lnf[j + k]) + kf * ln_abs - 0.5 * x + l_cur.abs().ln();
            let v = ln_mag.exp() * l_cur.signum();
            mat[(j + k, j)] = below * v;
            if k > 0 {
                mat[(j, j + k)] = above * v;
            }
        }
    }
    FockOperator { mat }
}

/// Matrix of `S(ξ) = exp{½ξ a†² − ½ξ* a²}`.
///
/// The anti-Hermitian generator is exponentiated at twice the requested
/// dimension and the result cropped, so truncation error lands in the
/// discarded rows.
pub fn squeezing_matrix(xi: C64, dim: usize) -> FockOperator {
    if xi.norm() == 0.0 {
        return FockOperator::identity(dim);
    }
    let padded = 2 * dim + 2;
    let mut gen = DMatrix::<C64>::zeros(padded, padded);
    for n in 0..padded - 2 {
        let c = ((n + 1) as f64 * (n + 2) as f64).sqrt() / 2.0;
        // ⟨n+2|a†²|n⟩ and ⟨n|a²|n+2⟩
        gen[(n + 2, n)] = xi * c;
        gen[(n, n + 2)] = -xi.conj() * c;
    }
    let full = gen.exp();
    FockOperator {
        mat: full.view((0, 0), (dim, dim)).into_owned(),
    }
}

/// `Tr[ρ a†a]`.
pub fn mean_photon(rho: &FockOperator) -> Result<f64> {
    let tol = Tolerances::default();
    rho.check_state_cheap(tol.herm_tol.max(1e-9), tol.truncation_tol)?;
    Ok(photon_number_unchecked(rho))
}

pub(crate) fn photon_number_unchecked(rho: &FockOperator) -> f64 {
    (0..rho.dim()).map(|n| n as f64 * rho.mat[(n, n)].re).sum()
}

/// `Σ_n (−1)ⁿ ρ_nn = P_even − P_odd`.
pub fn parity_expectation(rho: &FockOperator) -> f64 {
    (0..rho.dim()).map(|n| parity_sign(n) * rho.mat[(n, n)].re).sum()
}

/// `⟨a⟩ = Σ_n √(n+1) ρ_{n+1,n}`.
pub fn moment_a(rho: &FockOperator) -> C64 {
    (0..rho.dim().saturating_sub(1))
        .map(|n| rho.mat[(n + 1, n)] * ((n + 1) as f64).sqrt())
        .sum()
}

/// `⟨a²⟩ = Σ_n √((n+1)(n+2)) ρ_{n+2,n}`.
pub fn moment_a2(rho: &FockOperator) -> C64 {
    (0..rho.dim().saturating_sub(2))
        .map(|n| rho.mat[(n + 2, n)] * (((n + 1) * (n + 2)) as f64).sqrt())
        .sum()
}

/// Probability that leaked out of the truncated space under a map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationWarning {
    pub trace_deficit: f64,
    pub tolerance: f64,
}

impl fmt::Display for TruncationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trace deficit {:.3e} exceeds truncation tolerance {:.1e}",
            self.trace_deficit, self.tolerance
        )
    }
}

/// `U ρ U†`. The output is returned even when probability leaked past the
/// truncation; the leak is reported alongside.
pub fn apply_unitary(
    u: &FockOperator,
    rho: &FockOperator,
    tol: &Tolerances,
) -> Result<(FockOperator, Option<TruncationWarning>)> {
    if u.dim() != rho.dim() {
        return Err(dim_mismatch(u.dim(), rho.dim()));
    }
    let out = FockOperator {
        mat: &u.mat * &rho.mat * u.mat.adjoint(),
    };
    let deficit = rho.trace().re - out.trace().re;
    let warning = (deficit.abs() > tol.truncation_tol).then_some(TruncationWarning {
        trace_deficit: deficit,
        tolerance: tol.truncation_tol,
    });
    Ok((out, warning))
}

/// Wigner function `W(z) = (2/π) Tr[ρ D(2z) Π]`.
///
/// Uses `D(z) Π D†(z) = D(2z) Π`; exact for any `ρ` supported on the
/// truncated space since the displacement elements are exact.
pub fn wigner_at(rho: &FockOperator, z: C64) -> f64 {
    let d = rho.dim();
    let disp = displacement_matrix(z * 2.0, d);
    let mut acc = 0.0;
    for m in 0..d {
        let s = parity_sign(m);
        let mut row = 0.0;
        for n in 0..d {
            row += (rho.mat[(m, n)] * disp.mat[(n, m)]).re;
        }
        acc += s * row;
    }
    FRAC_2_PI * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fock_state_examples() {
        let v = fock_state(0, 4).unwrap();
        assert_eq!(v.amps().as_slice(), &[c(1., 0.), c(0., 0.), c(0., 0.), c(0., 0.)]);
        let v = fock_state(1, 4).unwrap();
        assert_eq!(v.amps()[1], c(1., 0.));
        assert!(matches!(fock_state(3, 3), Err(Error::Dimension(_))));
    }

    #[test]
    fn displacement_zero_is_identity() {
        assert_eq!(displacement_matrix(c(0., 0.), 5), FockOperator::identity(5));
    }

    #[test]
    fn displacement_vacuum_overlap() {
        let d = displacement_matrix(c(1., 0.), 24);
        assert!((d.matrix()[(0, 0)].re - (-0.5f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn displacement_columns_match_ladder_recurrence() {
        // D(β)|n+1⟩ = (a† − β*) D(β)|n⟩ / √(n+1), applied one step at a time
        // so that round-off does not accumulate along the recurrence.
        let beta = c(0.7, -1.3);
        let dim = 40;
        let d = displacement_matrix(beta, dim);
        let first = coherent_amplitudes(beta, dim);
        for m in 0..dim {
            assert!((d.matrix()[(m, 0)] - first[m]).norm() < 1e-13);
        }
        for n in 0..dim - 1 {
            for m in 0..dim {
                let up = if m > 0 { d.matrix()[(m - 1, n)] * (m as f64).sqrt() } else { c(0., 0.) };
                let want = (up - beta.conj() * d.matrix()[(m, n)]) / ((n + 1) as f64).sqrt();
                assert!((d.matrix()[(m, n + 1)] - want).norm() < 1e-12, "({m},{n})");
            }
        }
    }

    #[test]
    fn displacement_inverse_on_inner_block() {
        let dim = 60;
        let beta = c(1.1, 0.4);
        let prod = &displacement_matrix(beta, dim) * &displacement_matrix(-beta, dim);
        for i in 0..dim / 2 {
            for j in 0..dim / 2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod.matrix()[(i, j)] - c(want, 0.)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn squeezing_examples() {
        assert_eq!(squeezing_matrix(c(0., 0.), 6), FockOperator::identity(6));
        let s = squeezing_matrix(c(0.5, 0.), 30);
        assert!((s.matrix()[(0, 0)].re - 1.0 / 0.5f64.cosh().sqrt()).abs() < 1e-10);
        for k in 0..15 {
            assert_eq!(s.matrix()[(2 * k + 1, 0)].norm(), 0.0);
        }
    }

    #[test]
    fn squeezing_matrix_matches_closed_form_vacuum_column() {
        let xi = C64::from_polar(0.6, 0.9);
        let dim = 40;
        let s = squeezing_matrix(xi, dim);
        let col = squeezed_vacuum_amplitudes(xi, dim);
        for n in 0..dim {
            assert!((s.matrix()[(n, 0)] - col[n]).norm() < 1e-10, "n={n}");
        }
    }

    #[test]
    fn commutator_is_identity_below_the_edge() {
        let dim = 12;
        let a = annihilation(dim);
        let ad = a.adjoint();
        let comm = (&a * &ad).into_matrix() - (&ad * &a).into_matrix();
        for i in 0..dim - 1 {
            for j in 0..dim - 1 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((comm[(i, j)] - c(want, 0.)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn mean_photon_and_parity() {
        let vac = FockOperator::vacuum(5);
        assert_eq!(mean_photon(&vac).unwrap(), 0.0);
        assert_eq!(parity_expectation(&vac), 1.0);
        let three = FockOperator::pure(&fock_state(3, 6).unwrap());
        assert_eq!(mean_photon(&three).unwrap(), 3.0);
        let one = FockOperator::pure(&fock_state(1, 6).unwrap());
        assert_eq!(parity_expectation(&one), -1.0);
        let mix = FockOperator::diagonal(&[0.75, 0.25]).unwrap();
        assert_eq!(parity_expectation(&mix), 0.5);
    }

    #[test]
    fn mean_photon_rejects_non_states() {
        let bad = FockOperator::diagonal(&[0.5, 0.2]).unwrap();
        assert!(matches!(mean_photon(&bad), Err(Error::Contract(_))));
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 0)] = c(1., 0.);
        m[(0, 1)] = c(0.3, 0.);
        assert!(matches!(mean_photon(&FockOperator::from_matrix(m).unwrap()), Err(Error::Contract(_))));
    }

    #[test]
    fn apply_unitary_examples() {
        let tol = Tolerances::default();
        let rho = FockOperator::diagonal(&[0.6, 0.3, 0.1, 0.0]).unwrap();
        let (out, warn) = apply_unitary(&FockOperator::identity(4), &rho, &tol).unwrap();
        assert_eq!(out, rho);
        assert!(warn.is_none());

        let beta = c(0.8, 0.3);
        let (coh, warn) = apply_unitary(&displacement_matrix(beta, 40), &FockOperator::vacuum(40), &tol).unwrap();
        assert!(warn.is_none());
        assert!((coh.matrix()[(0, 0)].re - (-beta.norm_sqr()).exp()).abs() < 1e-12);

        let (_, warn) = apply_unitary(&displacement_matrix(c(3., 0.), 8), &FockOperator::vacuum(8), &tol).unwrap();
        assert!(warn.is_some());

        assert!(apply_unitary(&FockOperator::identity(3), &rho, &tol).is_err());
    }

    #[test]
    fn squeezing_preserves_parity() {
        let tol = Tolerances::default();
        let rho = FockOperator::diagonal(&[0.5, 0.3, 0.2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
            .unwrap()
            .resized(50);
        let (out, _) = apply_unitary(&squeezing_matrix(c(0.4, 0.1), 50), &rho, &tol).unwrap();
        assert!((parity_expectation(&out) - parity_expectation(&rho)).abs() < 1e-9);
    }

    #[test]
    fn wigner_of_vacuum_and_one_photon() {
        let vac = FockOperator::vacuum(10);
        assert!((wigner_at(&vac, c(0., 0.)) - FRAC_2_PI).abs() < 1e-15);
        let z = c(0.3, -0.2);
        let want = FRAC_2_PI * (-2.0 * z.norm_sqr()).exp();
        assert!((wigner_at(&vac, z) - want).abs() < 1e-14);
        let one = FockOperator::pure(&fock_state(1, 10).unwrap());
        assert!((wigner_at(&one, c(0., 0.)) + FRAC_2_PI).abs() < 1e-15);
    }

    #[test]
    fn json_layout_is_row_major_pairs() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = c(0.25, -0.5);
        let op = FockOperator::from_matrix(m).unwrap();
        let s = serde_json::to_string(&op).unwrap();
        assert_eq!(s, r#"{"dim":2,"mat":[[0.0,0.0],[0.25,-0.5],[0.0,0.0],[0.0,0.0]]}"#);
        let back: FockOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
        assert!(serde_json::from_str::<FockOperator>(r#"{"dim":2,"mat":[[0,0]]}"#).is_err());
    }

    #[test]
    fn truncation_heuristic() {
        assert_eq!(truncation_dim(0.0), 20);
        assert_eq!(truncation_dim(1.0), 32);
        assert_eq!(truncation_dim(4.0), 52);
    }
}
