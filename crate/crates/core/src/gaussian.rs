//! Pure Gaussian states `D(α)S(ξ)|0⟩`, finite mixtures of them (points of
//! the Gaussian convex hull), and their first and second moments.

use std::f64::consts::{FRAC_2_PI, FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, displacement_matrix, squeezed_vacuum_amplitudes, FockOperator, FockVector, Tolerances};

/// Displacement `α = |α|e^{iθ}` and squeezing `ξ = r e^{iφ}` of `D(α)S(ξ)|0⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureGaussianParams {
    pub alpha: C64,
    pub xi: C64,
}

impl PureGaussianParams {
    pub fn new(alpha: C64, xi: C64) -> Self {
        Self { alpha, xi }
    }

    pub fn vacuum() -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Build from photon-number budgets and phases.
    pub fn from_energies(n_d: f64, n_s: f64, theta: f64, phi: f64) -> Self {
        let r = n_s.max(0.0).sqrt().asinh();
        Self::new(C64::from_polar(n_d.max(0.0).sqrt(), theta), C64::from_polar(r, phi))
    }

    pub fn r(&self) -> f64 {
        self.xi.norm()
    }

    /// Displacement photons `|α|²`.
    pub fn n_d(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// Squeezing photons `sinh² r`.
    pub fn n_s(&self) -> f64 {
        self.r().sinh().powi(2)
    }

    pub fn mean_photon(&self) -> f64 {
        self.n_d() + self.n_s()
    }
}

/// `W(0)` of `D(α)S(ξ)|0⟩`:
/// `(2/π) exp{−2|α|²[cosh 2r − cos(2θ − φ) sinh 2r]}`.
///
/// The `−φ` follows from `S(ξ) = exp{½ξ a†² − ½ξ* a²}`, which squeezes the
/// quadrature at angle `φ/2 + π/2`.
pub fn wigner_origin_pure_gaussian(p: &PureGaussianParams) -> f64 {
    let r = p.r();
    let theta = p.alpha.arg();
    let phi = p.xi.arg();
    let bracket = (2.0 * r).cosh() - (2.0 * theta - phi).cos() * (2.0 * r).sinh();
    FRAC_2_PI * (-2.0 * p.n_d() * bracket).exp()
}

/// The pure Gaussian state of mean photon number `n` with the smallest `W(0)`.
///
/// Squeezing photons `n² / (1 + 2n)`, the rest in displacement along the
/// squeezed quadrature (`θ = π/2`, `φ = 0`).
pub fn saturating_state(n: f64) -> Result<PureGaussianParams> {
    if !(n >= 0.0) {
        return Err(Error::Domain(format!("mean photon number must be >= 0, got {n}")));
    }
    let n_s = n * n / (1.0 + 2.0 * n);
    Ok(PureGaussianParams::from_energies(n - n_s, n_s, FRAC_PI_2, 0.0))
}

/// A discrete point of the Gaussian convex hull.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture {
    components: Vec<(f64, PureGaussianParams)>,
}

impl GaussianMixture {
    pub fn new(components: Vec<(f64, PureGaussianParams)>) -> Result<Self> {
        Self::with_tolerance(components, Tolerances::default().norm_tol)
    }

    pub fn with_tolerance(components: Vec<(f64, PureGaussianParams)>, norm_tol: f64) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("mixture needs at least one component".into()));
        }
        if let Some((w, _)) = components.iter().find(|(w, _)| !(*w >= 0.0)) {
            return Err(Error::Domain(format!("negative mixture weight {w}")));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > norm_tol {
            return Err(Error::Domain(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    pub fn single(p: PureGaussianParams) -> Self {
        Self {
            components: vec![(1.0, p)],
        }
    }

    pub fn components(&self) -> &[(f64, PureGaussianParams)] {
        &self.components
    }

    pub fn max_component_energy(&self) -> f64 {
        self.components
            .iter()
            .map(|(_, p)| p.mean_photon())
            .fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct MixtureJson {
    weights: Vec<f64>,
    alphas: Vec<[f64; 2]>,
    xis: Vec<[f64; 2]>,
}

impl Serialize for GaussianMixture {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MixtureJson {
            weights: self.components.iter().map(|(w, _)| *w).collect(),
            alphas: self.components.iter().map(|(_, p)| [p.alpha.re, p.alpha.im]).collect(),
            xis: self.components.iter().map(|(_, p)| [p.xi.re, p.xi.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianMixture {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MixtureJson::deserialize(d)?;
        if raw.weights.len() != raw.alphas.len() || raw.weights.len() != raw.xis.len() {
            return Err(serde::de::Error::custom("weights, alphas and xis must have equal length"));
        }
        let comps = raw
            .weights
            .iter()
            .zip(raw.alphas.iter().zip(&raw.xis))
            .map(|(w, (a, x))| (*w, PureGaussianParams::new(C64::new(a[0], a[1]), C64::new(x[0], x[1]))))
            .collect();
        GaussianMixture::new(comps).map_err(serde::de::Error::custom)
    }
}

/// `Σ wᵢ W_i(0)`.
pub fn mixture_wigner_origin(mix: &GaussianMixture) -> f64 {
    mix.components
        .iter()
        .map(|(w, p)| w * wigner_origin_pure_gaussian(p))
        .sum()
}

pub fn mixture_mean_photon(mix: &GaussianMixture) -> f64 {
    mix.components.iter().map(|(w, p)| w * p.mean_photon()).sum()
}

/// Reproducible random hull state whose components each carry at most
/// `max_energy` photons.
///
/// Displacement and squeezing photons are exponential with mean
/// `max_energy / 4` (rejecting totals above `max_energy`), phases uniform,
/// weights flat on the simplex.
pub fn sample_hull_state(seed: u64, max_energy: f64, n_components: usize) -> Result<GaussianMixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_hull_state_with(&mut rng, max_energy, n_components)
}

pub(crate) fn sample_hull_state_with<R: Rng>(rng: &mut R, max_energy: f64, n_components: usize) -> Result<GaussianMixture> {
    if n_components == 0 {
        return Err(Error::Domain("n_components must be >= 1".into()));
    }
    if !(max_energy >= 0.0) {
        return Err(Error::Domain(format!("max_energy must be >= 0, got {max_energy}")));
    }
    let mut cuts: Vec<f64> = (0..n_components - 1).map(|_| rng.gen::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    let mut weights = Vec::with_capacity(n_components);
    let mut prev = 0.0;
    for c in cuts.iter().chain(std::iter::once(&1.0)) {
        weights.push(c - prev);
        prev = *c;
    }

    let energy = (max_energy > 0.0).then(|| Exp::new(4.0 / max_energy).expect("positive rate"));
    let mut comps = Vec::with_capacity(n_components);
    for w in weights {
        let p = match &energy {
            None => PureGaussianParams::vacuum(),
            Some(dist) => loop {
                let n_d = dist.sample(rng);
                let n_s = dist.sample(rng);
                if n_d + n_s <= max_energy {
                    let theta = rng.gen::<f64>() * 2.0 * PI;
                    let phi = rng.gen::<f64>() * 2.0 * PI;
                    break PureGaussianParams::from_energies(n_d, n_s, theta, phi);
                }
            },
        };
        comps.push((w, p));
    }
    // The spacings sum to 1 up to rounding.
    GaussianMixture::with_tolerance(comps, 1e-12)
}

/// Amplitudes of `D(α)S(ξ)|0⟩` truncated to `dim`.
pub fn pure_to_vector(p: &PureGaussianParams, dim: usize, tol: &Tolerances) -> Result<FockVector> {
    let sq = squeezed_vacuum_amplitudes(p.xi, dim);
    let psi: Vec<C64> = if p.alpha.norm_sqr() == 0.0 {
        sq
    } else if p.r() == 0.0 {
        coherent_amplitudes(p.alpha, dim)
    } else {
        let d = displacement_matrix(p.alpha, dim);
        let v = d.matrix() * nalgebra::DVector::from_vec(sq);
        v.iter().copied().collect()
    };
    let v = FockVector::new(psi)?;
    let lost = 1.0 - v.norm_sqr();
    if lost > tol.truncation_tol {
        return Err(Error::Truncation {
            mass_lost: lost,
            tolerance: tol.truncation_tol,
        });
    }
    Ok(v)
}

pub fn pure_to_fock(p: &PureGaussianParams, dim: usize, tol: &Tolerances) -> Result<FockOperator> {
    Ok(FockOperator::pure(&pure_to_vector(p, dim, tol)?))
}

/// Density operator of the mixture, `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`.
pub fn mixture_to_fock(mix: &GaussianMixture, dim: usize, tol: &Tolerances) -> Result<FockOperator> {
    let mut acc = nalgebra::DMatrix::<C64>::zeros(dim, dim);
    for (w, p) in &mix.components {
        let v = pure_to_vector(p, dim, tol)?;
        acc += (v.amps() * v.amps().adjoint()).scale(*w);
    }
    FockOperator::from_matrix(acc)
}

/// First and second moments of a single-mode Gaussian state.
///
/// `mean = ⟨a⟩`, `n_fluct = ⟨δa†δa⟩`, `m_fluct = ⟨δa²⟩` with `δa = a − ⟨a⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianMoments {
    pub mean: C64,
    pub n_fluct: f64,
    pub m_fluct: C64,
}

impl GaussianMoments {
    pub fn vacuum() -> Self {
        Self {
            mean: C64::new(0.0, 0.0),
            n_fluct: 0.0,
            m_fluct: C64::new(0.0, 0.0),
        }
    }

    pub fn of_pure(p: &PureGaussianParams) -> Self {
        Self::vacuum().squeezed(p.xi).displaced(p.alpha)
    }

    /// Moments of `D(β) ρ D†(β)`.
    pub fn displaced(self, beta: C64) -> Self {
        Self {
            mean: self.mean + beta,
            ..self
        }
    }

    /// Moments of `S(ξ) ρ S†(ξ)`, using `S†aS = a cosh r + e^{iφ} a† sinh r`.
    pub fn squeezed(self, xi: C64) -> Self {
        let r = xi.norm();
        if r == 0.0 {
            return self;
        }
        let ph = xi / r;
        let (mu, nu) = (r.cosh(), r.sinh());
        let n = self.n_fluct;
        let m = self.m_fluct;
        Self {
            mean: self.mean * mu + ph * self.mean.conj() * nu,
            n_fluct: mu * mu * n + mu * nu * 2.0 * (ph * m.conj()).re + nu * nu * (n + 1.0),
            m_fluct: m * (mu * mu) + ph * (mu * nu * (2.0 * n + 1.0)) + ph * ph * m.conj() * (nu * nu),
        }
    }

    /// Moments after a pure-loss channel with loss `eps` (transmissivity `1 − eps`).
    pub fn attenuated(self, eps: f64) -> Self {
        let eta = 1.0 - eps;
        Self {
            mean: self.mean * eta.sqrt(),
            n_fluct: eta * self.n_fluct,
            m_fluct: self.m_fluct * eta,
        }
    }

    pub fn mean_photon(&self) -> f64 {
        self.n_fluct + self.mean.norm_sqr()
    }

    /// Wigner function at `z`, normalized over `d²z = d(Re z) d(Im z)`.
    pub fn wigner(&self, z: C64) -> f64 {
        let s = 2.0 * self.n_fluct + 1.0;
        let suu = (s + 2.0 * self.m_fluct.re) / 4.0;
        let svv = (s - 2.0 * self.m_fluct.re) / 4.0;
        let suv = self.m_fluct.im / 2.0;
        let det = suu * svv - suv * suv;
        let d = z - self.mean;
        let quad = (svv * d.re * d.re - 2.0 * suv * d.re * d.im + suu * d.im * d.im) / det;
        (-0.5 * quad).exp() / (2.0 * PI * det.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{mean_photon, parity_expectation};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn origin_value_examples() {
        let p = PureGaussianParams::new(c(0., 0.), C64::from_polar(0.7, 1.2));
        assert!((wigner_origin_pure_gaussian(&p) - FRAC_2_PI).abs() < 1e-15);
        let p = PureGaussianParams::new(c(1., 0.), c(0., 0.));
        assert!((wigner_origin_pure_gaussian(&p) - FRAC_2_PI * (-2.0f64).exp()).abs() < 1e-15);
        // displacement along the squeezed quadrature
        let (n_d, r) = (0.4f64, 0.3f64);
        let p = PureGaussianParams::new(C64::from_polar(n_d.sqrt(), FRAC_PI_2), c(r, 0.));
        let want = FRAC_2_PI * (-2.0 * n_d * (2.0 * r).exp()).exp();
        assert!((wigner_origin_pure_gaussian(&p) - want).abs() < 1e-14);
    }

    #[test]
    fn saturating_state_examples() {
        let v = saturating_state(0.0).unwrap();
        assert_eq!(v.mean_photon(), 0.0);
        assert!((wigner_origin_pure_gaussian(&v) - FRAC_2_PI).abs() < 1e-15);

        let p = saturating_state(1.0).unwrap();
        assert!((p.n_s() - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.n_d() - 2.0 / 3.0).abs() < 1e-12);
        assert!((wigner_origin_pure_gaussian(&p) - FRAC_2_PI * (-4.0f64).exp()).abs() < 1e-10);

        let big = saturating_state(1e4).unwrap();
        assert!((big.n_s() / 1e4 - 0.5).abs() < 1e-4);

        assert!(matches!(saturating_state(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn mixture_examples() {
        let vac = PureGaussianParams::vacuum();
        let coh = PureGaussianParams::new(c(1., 0.), c(0., 0.));
        let single = GaussianMixture::single(coh);
        assert_eq!(mixture_wigner_origin(&single), wigner_origin_pure_gaussian(&coh));
        let half = GaussianMixture::new(vec![(0.5, vac), (0.5, coh)]).unwrap();
        assert!((mixture_wigner_origin(&half) - (1.0 + (-2.0f64).exp()) / PI).abs() < 1e-15);

        assert_eq!(mixture_mean_photon(&GaussianMixture::single(vac)), 0.0);
        assert_eq!(mixture_mean_photon(&single), 1.0);
        let n3 = PureGaussianParams::from_energies(2.0, 1.0, 0.3, 0.1);
        let m = GaussianMixture::new(vec![(0.5, coh), (0.5, n3)]).unwrap();
        assert!((mixture_mean_photon(&m) - 2.0).abs() < 1e-12);

        assert!(GaussianMixture::new(vec![(0.7, vac)]).is_err());
        assert!(GaussianMixture::new(vec![(1.5, vac), (-0.5, coh)]).is_err());
        assert!(GaussianMixture::new(vec![]).is_err());
    }

    #[test]
    fn sampling_is_reproducible_and_bounded() {
        let a = sample_hull_state(11, 4.0, 5).unwrap();
        let b = sample_hull_state(11, 4.0, 5).unwrap();
        assert_eq!(a, b);
        assert!(mixture_mean_photon(&a) <= 4.0);
        assert!(a.max_component_energy() <= 4.0);
        let v = sample_hull_state(3, 0.0, 1).unwrap();
        assert_eq!(v.components(), &[(1.0, PureGaussianParams::vacuum())]);
        assert!(sample_hull_state(3, 1.0, 0).is_err());
    }

    #[test]
    fn to_fock_examples() {
        let tol = Tolerances::default();
        let vac = pure_to_fock(&PureGaussianParams::vacuum(), 10, &tol).unwrap();
        assert_eq!(vac, FockOperator::vacuum(10));

        let coh = pure_to_fock(&PureGaussianParams::new(c(1., 0.), c(0., 0.)), 40, &tol).unwrap();
        let mut fact = 1.0;
        for n in 0..15 {
            if n > 0 {
                fact *= n as f64;
            }
            let poisson = (-1.0f64).exp() / fact;
            assert!((coh.matrix()[(n, n)].re - poisson).abs() < 1e-14);
        }

        let p = PureGaussianParams::new(C64::from_polar(0.8, 2.0), C64::from_polar(0.4, 0.7));
        let rho = pure_to_fock(&p, 60, &tol).unwrap();
        assert!((FRAC_2_PI * parity_expectation(&rho) - wigner_origin_pure_gaussian(&p)).abs() < 1e-8);
        assert!((mean_photon(&rho).unwrap() - p.mean_photon()).abs() < 1e-9);

        let hot = PureGaussianParams::new(c(4., 0.), c(0., 0.));
        assert!(matches!(pure_to_fock(&hot, 10, &tol), Err(Error::Truncation { .. })));
    }

    #[test]
    fn moments_agree_with_closed_form_origin_value() {
        let p = PureGaussianParams::new(C64::from_polar(0.9, -0.4), C64::from_polar(0.5, 2.2));
        let m = GaussianMoments::of_pure(&p);
        assert!((m.mean_photon() - p.mean_photon()).abs() < 1e-12);
        assert!((m.wigner(c(0., 0.)) - wigner_origin_pure_gaussian(&p)).abs() < 1e-14);
        assert!((GaussianMoments::vacuum().wigner(c(0., 0.)) - FRAC_2_PI).abs() < 1e-15);
    }

    #[test]
    fn mixture_json_round_trip() {
        let m = sample_hull_state(5, 2.0, 3).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with(r#"{"weights":["#));
        let back: GaussianMixture = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
