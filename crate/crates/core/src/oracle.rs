//! Brute-force cross-checks.
//!
//! The checks here avoid the shortcuts used elsewhere in the crate: Wigner
//! values come from literally displacing the state and measuring parity, and
//! hull states are sampled at random and pushed through random Gaussian maps.

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channels::{apply_gaussian_map, apply_loss, lossy_wigner, GaussianMap, LossParam};
use crate::error::{Error, Result};
use crate::exemplars::{fock_wigner_origin_lossy, pac_wigner, pss_wigner, PacParams, PhasePoint, PssParams, StateSpec};
use crate::fock::{apply_unitary, displacement_matrix, fock_state, mean_photon, parity_expectation, truncation_dim, FockOperator, Tolerances};
use crate::gaussian::{mixture_to_fock, pure_to_fock, sample_hull_state_with, wigner_origin_pure_gaussian, GaussianMixture, GaussianMoments, PureGaussianParams};
use crate::quadrature::AdaptiveHermite;
use crate::witness::{delta1, delta1_lossy_fock, pac_displaced_mean_photon, pss_squeezed_mean_photon, DECISION_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub case: String,
    pub expected: f64,
    pub got: f64,
}

/// Summary of one group of checks sharing a tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub checks_run: usize,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub checks_run: usize,
    pub max_abs_deviation: f64,
    pub failures: Vec<Failure>,
    pub sections: Vec<Section>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    fn push_section(&mut self, name: &str, tolerance: f64, cases: Vec<(String, f64, f64)>) {
        let mut worst = 0.0f64;
        for (case, expected, got) in &cases {
            let dev = (expected - got).abs();
            // NaN must count as a failure.
            if !(dev <= tolerance) {
                self.failures.push(Failure {
                    case: format!("{name}/{case}"),
                    expected: *expected,
                    got: *got,
                });
            }
            worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
        }
        self.checks_run += cases.len();
        self.max_abs_deviation = self.max_abs_deviation.max(worst);
        self.sections.push(Section {
            name: name.to_string(),
            checks_run: cases.len(),
            max_abs_deviation: worst,
            tolerance,
        });
    }

    pub fn merge(&mut self, other: OracleReport) {
        self.checks_run += other.checks_run;
        self.max_abs_deviation = self.max_abs_deviation.max(other.max_abs_deviation);
        self.failures.extend(other.failures);
        self.sections.extend(other.sections);
    }
}

/// `(2/π) Tr[Π D(−z) ρ D†(−z)]`, computed on a basis padded enough to hold
/// the displaced state.
pub fn wigner_via_parity(rho: &FockOperator, z: PhasePoint, tol: &Tolerances) -> Result<f64> {
    let r = z.0.norm();
    let pad = rho.dim() + truncation_dim(r * r) + (8.0 * r).ceil() as usize;
    let big = rho.resized(pad);
    let (shifted, warning) = apply_unitary(&displacement_matrix(-z.0, pad), &big, tol)?;
    if let Some(w) = warning {
        return Err(Error::Truncation {
            mass_lost: w.trace_deficit,
            tolerance: w.tolerance,
        });
    }
    Ok(FRAC_2_PI * parity_expectation(&shifted))
}

#[cfg(feature = "parallel")]
fn map_indices<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_indices<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// A random map `D(β) ∘ S(s) ∘ E_ε` in a random order, with `β` complex
/// normal (σ = 1), `s ~ U[−1, 1]`, `ε ~ U[0, 1]`.
pub(crate) fn random_gaussian_map<R: Rng>(rng: &mut R) -> GaussianMap {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("finite sigma");
    let beta = C64::new(normal.sample(rng), normal.sample(rng));
    let s = rng.gen_range(-1.0..=1.0);
    let eps = LossParam::new(rng.gen::<f64>()).expect("eps in [0, 1)");
    let mut maps = vec![GaussianMap::displacement(beta), GaussianMap::squeezing(s), GaussianMap::loss(eps)];
    for i in (1..maps.len()).rev() {
        let j = rng.gen_range(0..=i);
        maps.swap(i, j);
    }
    GaussianMap::Composition { maps }
}

fn mixture_origin_and_energy(parts: &[(f64, GaussianMoments)]) -> (f64, f64) {
    parts.iter().fold((0.0, 0.0), |(w, n), (p, m)| {
        (w + p * m.wigner(C64::new(0.0, 0.0)), n + p * m.mean_photon())
    })
}

fn hull_delta(parts: &[(f64, GaussianMoments)]) -> f64 {
    let (w, n) = mixture_origin_and_energy(parts);
    w - FRAC_2_PI * (-2.0 * n * (1.0 + n)).exp()
}

/// Sample `i` of a campaign: its own ChaCha stream, so that results do not
/// depend on evaluation order.
pub(crate) fn campaign_sample(seed: u64, i: usize, max_energy: f64, n_maps: usize) -> (GaussianMixture, Vec<GaussianMap>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let components = rng.gen_range(1..=3);
    let mix = sample_hull_state_with(&mut rng, max_energy, components).expect("valid sampling parameters");
    let maps = (0..n_maps).map(|_| random_gaussian_map(&mut rng)).collect();
    (mix, maps)
}

/// Tests `Δ₁ ≥ 0` and `Δ₂ ≥ 0` on random members of the Gaussian hull.
///
/// Each sample is a mixture of one to three pure Gaussian states, each with
/// at most `max_energy` photons, evaluated as is and under `n_maps` random
/// Gaussian maps. States are handled through their first and second moments,
/// which is exact for Gaussian states. The reported deviation is the most
/// negative `Δ` seen (zero if none was negative).
pub fn run_hull_campaign(n_samples: usize, max_energy: f64, n_maps: usize, seed: u64) -> Result<OracleReport> {
    if !(max_energy >= 0.0) {
        return Err(Error::Domain(format!("max_energy must be >= 0, got {max_energy}")));
    }
    let per_sample = map_indices(n_samples, |i| {
        let (mix, maps) = campaign_sample(seed, i, max_energy, n_maps);
        let parts: Vec<(f64, GaussianMoments)> = mix
            .components()
            .iter()
            .map(|(w, p)| (*w, GaussianMoments::of_pure(p)))
            .collect();
        let mut deltas = vec![(format!("sample{i}"), hull_delta(&parts))];
        for (k, g) in maps.iter().enumerate() {
            let mapped: Vec<(f64, GaussianMoments)> = parts.iter().map(|(w, m)| (*w, g.apply_to_moments(*m))).collect();
            deltas.push((format!("sample{i}/map{k}"), hull_delta(&mapped)));
        }
        deltas
    });
    let cases: Vec<(String, f64, f64)> = per_sample
        .into_iter()
        .flatten()
        // A non-negative Δ counts as zero deviation.
        .map(|(case, d)| (case, 0.0, d.min(0.0)))
        .collect();
    let mut report = OracleReport::default();
    report.push_section("hull-soundness", DECISION_TOL, cases);
    Ok(report)
}

/// Spot check of the moments route used by the campaign against full
/// Fock-basis evaluation: the same samples are built as density matrices,
/// mapped, and their `Δ` recomputed from parity and photon number.
pub fn check_campaign_route(n_samples: usize, max_energy: f64, n_maps: usize, seed: u64) -> Result<OracleReport> {
    let tol = Tolerances::default();
    let dim = truncation_dim(4.0 * max_energy + 4.0) + 20;
    let rows = map_indices(n_samples, |i| -> Result<Vec<(String, f64, f64)>> {
        let (mix, maps) = campaign_sample(seed, i, max_energy, n_maps);
        let rho = mixture_to_fock(&mix, dim, &tol)?;
        let parts: Vec<(f64, GaussianMoments)> = mix
            .components()
            .iter()
            .map(|(w, p)| (*w, GaussianMoments::of_pure(p)))
            .collect();
        let mut out = vec![(format!("sample{i}"), hull_delta(&parts), delta1(&rho)?.delta)];
        for (k, g) in maps.iter().enumerate() {
            let mapped: Vec<(f64, GaussianMoments)> = parts.iter().map(|(w, m)| (*w, g.apply_to_moments(*m))).collect();
            let fock = apply_gaussian_map(&rho, g, &tol).and_then(|r| delta1(&r));
            match fock {
                Ok(r) => out.push((format!("sample{i}/map{k}"), hull_delta(&mapped), r.delta)),
                // Maps that push the state past the truncation are skipped.
                Err(Error::Truncation { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    });
    let mut cases = Vec::new();
    for r in rows {
        cases.extend(r?);
    }
    let mut report = OracleReport::default();
    report.push_section("campaign-route", 1e-7, cases);
    Ok(report)
}

/// Grid sizes and tolerances for the closed-form cross-validation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormGrid {
    /// Points per formula.
    pub points: usize,
    pub tol: f64,
    /// Tolerance for the quadrature of the loss kernel.
    pub quadrature_tol: f64,
    /// Points for the quadrature comparison, which is slower per point.
    pub quadrature_points: usize,
}

impl Default for ClosedFormGrid {
    fn default() -> Self {
        Self {
            points: 60,
            tol: 1e-7,
            quadrature_tol: 1e-6,
            quadrature_points: 6,
        }
    }
}

impl ClosedFormGrid {
    pub fn empty() -> Self {
        Self {
            points: 0,
            quadrature_points: 0,
            ..Self::default()
        }
    }
}

/// `k`-th point of an additive-recurrence sequence in `[0, 1)^dims`; spreads
/// grid points evenly without a random generator.
fn lattice(k: usize, dims: usize) -> Vec<f64> {
    // Powers of the inverse of the generalized golden ratio.
    let phi = (1..=40).fold(2.0f64, |x, _| (1.0 + x).powf(1.0 / (dims as f64 + 1.0)));
    (1..=dims)
        .map(|j| (0.5 + (k as f64 + 1.0) * phi.powi(-(j as i32))).fract())
        .collect()
}

fn cases<F>(n: usize, f: F) -> Result<Vec<(String, f64, f64)>>
where
    F: Fn(usize) -> Result<(String, f64, f64)> + Sync + Send,
{
    map_indices(n, f).into_iter().collect()
}

/// Compares each closed form against the Fock-basis numerics.
///
/// Sections: Wigner origin of pure Gaussian states; lossy Fock parity and
/// `Δ₁`; PAC and PSS Wigner functions; photon numbers of displaced lossy PAC
/// and squeezed lossy PSS states; loss-kernel quadrature.
pub fn cross_validate_closed_forms(grid: ClosedFormGrid) -> Result<OracleReport> {
    let tol = Tolerances::default();
    let n = grid.points;
    let mut report = OracleReport::default();

    let c = cases(n, |k| {
        let u = lattice(k, 4);
        let p = PureGaussianParams::from_energies(1.5 * u[0], 1.0 * u[1], 2.0 * std::f64::consts::PI * u[2], 2.0 * std::f64::consts::PI * u[3]);
        let rho = pure_to_fock(&p, 90, &tol)?;
        Ok((format!("{p:?}"), wigner_origin_pure_gaussian(&p), wigner_via_parity(&rho, PhasePoint::origin(), &tol)?))
    })?;
    report.push_section("pure-gaussian-origin", grid.tol, c);

    let fock_cases = |k: usize| -> (usize, f64) { (k % 7, ((k / 7) as f64 * 0.113 + 0.01 * (k % 7) as f64).fract()) };
    let c = cases(n, |k| {
        let (m, eps) = fock_cases(k);
        let rho = apply_loss(&FockOperator::pure(&fock_state(m, 12)?), LossParam::new(eps)?);
        Ok((format!("m={m},eps={eps}"), fock_wigner_origin_lossy(m, eps)?, wigner_via_parity(&rho, PhasePoint::origin(), &tol)?))
    })?;
    report.push_section("lossy-fock-origin", grid.tol, c);

    let c = cases(n, |k| {
        let (m, eps) = fock_cases(k);
        let rho = apply_loss(&FockOperator::pure(&fock_state(m, 12)?), LossParam::new(eps)?);
        Ok((format!("m={m},eps={eps}"), delta1_lossy_fock(m, eps)?, delta1(&rho)?.delta))
    })?;
    report.push_section("lossy-fock-delta1", grid.tol, c);

    let c = cases(n, |k| {
        let u = lattice(k, 3);
        let p = PacParams::new(0.1 + 1.4 * u[0])?;
        let z = PhasePoint::new(3.0 * u[1] - 1.5, 3.0 * u[2] - 1.5);
        let rho = StateSpec::Pac(p).to_fock(StateSpec::Pac(p).default_dim(), &tol)?;
        Ok((format!("alpha={},z={}", p.alpha(), z.0), pac_wigner(&p, z), wigner_via_parity(&rho, z, &tol)?))
    })?;
    report.push_section("pac-wigner", grid.tol, c);

    let c = cases(n, |k| {
        let u = lattice(k, 3);
        let p = PssParams::new(0.05 + 0.95 * u[0])?;
        let z = PhasePoint::new(2.0 * u[1] - 1.0, 2.0 * u[2] - 1.0);
        let rho = StateSpec::Pss(p).to_fock(StateSpec::Pss(p).default_dim(), &tol)?;
        Ok((format!("r={},z={}", p.r(), z.0), pss_wigner(&p, z), wigner_via_parity(&rho, z, &tol)?))
    })?;
    report.push_section("pss-wigner", grid.tol, c);

    let c = cases(n, |k| {
        let u = lattice(k, 4);
        let alpha = 1.5 * u[0];
        let eps = 0.95 * u[1];
        let beta = C64::new(3.0 * u[2] - 1.5, 2.0 * u[3] - 1.0);
        let spec = StateSpec::Pac(PacParams::new(alpha)?);
        let dim = spec.default_dim() + truncation_dim((alpha + beta.norm()).powi(2));
        let rho = apply_loss(&spec.to_fock(dim, &tol)?, LossParam::new(eps)?);
        let shifted = apply_gaussian_map(&rho, &GaussianMap::displacement(beta), &tol)?;
        Ok((format!("alpha={alpha},eps={eps},beta={beta}"), pac_displaced_mean_photon(alpha, eps, beta)?, mean_photon(&shifted)?))
    })?;
    report.push_section("pac-displaced-photons", grid.tol, c);

    let c = cases(n, |k| {
        let u = lattice(k, 3);
        let r = 0.05 + 0.75 * u[0];
        let eps = 0.95 * u[1];
        let s = u[2] - 0.6;
        let spec = StateSpec::Pss(PssParams::new(r)?);
        // Squeezing by `s` on top of `r` can reach `r + |s|` worth of photons.
        let dim = spec.default_dim().max(truncation_dim(4.0 * (r + s.abs()).sinh().powi(2) + 2.0) + 10);
        let rho = apply_loss(&spec.to_fock(dim, &tol)?, LossParam::new(eps)?);
        let squeezed = apply_gaussian_map(&rho, &GaussianMap::squeezing(s), &tol)?;
        Ok((format!("r={r},eps={eps},s={s}"), pss_squeezed_mean_photon(r, eps, s)?, mean_photon(&squeezed)?))
    })?;
    report.push_section("pss-squeezed-photons", grid.tol, c);

    let exemplars = [StateSpec::Pac(PacParams::new(0.4)?), StateSpec::Pss(PssParams::new(0.3)?)];
    let c = cases(grid.quadrature_points, |k| {
        let spec = exemplars[k % 2];
        let eps = [0.3, 0.6, 0.9][(k / 2) % 3];
        let loss = LossParam::new(eps)?;
        let rho = apply_loss(&spec.to_fock(spec.default_dim(), &tol)?, loss);
        let quad = lossy_wigner(|z| spec.wigner(z), loss, PhasePoint::origin(), AdaptiveHermite::default())?;
        Ok((format!("{spec},eps={eps}"), wigner_via_parity(&rho, PhasePoint::origin(), &tol)?, quad))
    })?;
    report.push_section("loss-kernel", grid.quadrature_tol, c);

    Ok(report)
}
