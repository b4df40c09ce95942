//! The non-Gaussianity witnesses.
//!
//! Every state in the Gaussian convex hull satisfies `W(0) ≥ B(n̄)` with
//! `B(n) = (2/π) exp{−2n(1+n)}`, and so does its image under any Gaussian
//! map. `Δ = W(0) − B(n̄) < 0` therefore certifies quantum non-Gaussianity,
//! either directly (`delta1`) or after a chosen map (`delta2`).

use std::f64::consts::FRAC_2_PI;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_gaussian_map, apply_loss, GaussianMap, LossParam};
use crate::error::{Error, Result};
use crate::exemplars::{PacParams, PssParams, StateSpec};
use crate::fock::{mean_photon, moment_a, moment_a2, parity_expectation, wigner_at, FockOperator, Tolerances};
use crate::optimize::{golden_section, nelder_mead_2d, scan_then_golden};

/// Margin below zero that `Δ` must reach before a state is declared
/// quantum non-Gaussian.
pub const DECISION_TOL: f64 = 1e-9;

/// `B(n) = (2/π) exp{−2n(1+n)}`, the smallest `W(0)` any hull state of mean
/// photon number `n` can have.
pub fn bound_min(nbar: f64) -> Result<f64> {
    if !(nbar >= 0.0) {
        return Err(Error::Domain(format!("mean photon number must be >= 0, got {nbar}")));
    }
    Ok(bound_unchecked(nbar))
}

fn bound_unchecked(nbar: f64) -> f64 {
    FRAC_2_PI * (-2.0 * nbar * (1.0 + nbar)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    #[serde(rename = "quantum-non-Gaussian")]
    QuantumNonGaussian,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::QuantumNonGaussian => "quantum-non-Gaussian",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One evaluation of the witness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub wigner_at_origin: f64,
    pub mean_photon: f64,
    pub bound: f64,
    pub delta: f64,
    pub map_used: GaussianMap,
    pub verdict: Verdict,
}

impl WitnessReport {
    pub fn new(wigner_at_origin: f64, mean_photon: f64, map_used: GaussianMap) -> Self {
        // Truncated moments can come out a hair below zero for the vacuum.
        let nbar = mean_photon.max(0.0);
        let bound = bound_unchecked(nbar);
        let delta = wigner_at_origin - bound;
        let verdict = if delta < -DECISION_TOL {
            Verdict::QuantumNonGaussian
        } else {
            Verdict::Inconclusive
        };
        Self {
            wigner_at_origin,
            mean_photon: nbar,
            bound,
            delta,
            map_used,
            verdict,
        }
    }
}

/// `Δ₁[ρ] = W[ρ](0) − B(n̄)` with `W(0) = (2/π) Tr[ρΠ]`.
pub fn delta1(rho: &FockOperator) -> Result<WitnessReport> {
    let nbar = mean_photon(rho)?;
    Ok(WitnessReport::new(FRAC_2_PI * parity_expectation(rho), nbar, GaussianMap::Identity))
}

/// `Δ₂[ρ, E_G] = W[E_G(ρ)](0) − B(n̄_E)`.
pub fn delta2(rho: &FockOperator, g: &GaussianMap, tol: &Tolerances) -> Result<WitnessReport> {
    mean_photon(rho)?;
    let mapped = apply_gaussian_map(rho, g, tol)?;
    let nbar = mean_photon(&mapped)?;
    Ok(WitnessReport::new(FRAC_2_PI * parity_expectation(&mapped), nbar, g.clone()))
}

fn check_loss(eps: f64) -> Result<()> {
    LossParam::new(eps).map(|_| ())
}

/// `(2/π){(2ε−1)^m − exp[−2(1−ε)m((1−ε)m + 1)]}`.
pub fn delta1_lossy_fock(m: usize, eps: f64) -> Result<f64> {
    check_loss(eps)?;
    let n = (1.0 - eps) * m as f64;
    Ok(FRAC_2_PI * ((2.0 * eps - 1.0).powi(m as i32) - (-2.0 * n * (n + 1.0)).exp()))
}

/// Mean photon number of `D(β) E_ε(|ψ_pac⟩⟨ψ_pac|) D†(β)`:
/// `(1−ε)n̄₀ + |β|² + √(1−ε)(β*⟨a⟩₀ + β⟨a†⟩₀)`.
pub fn pac_displaced_mean_photon(alpha: f64, eps: f64, beta: C64) -> Result<f64> {
    check_loss(eps)?;
    let p = PacParams::new(alpha)?;
    let a0 = p.mean_a();
    let cross = (1.0 - eps).sqrt() * (beta.conj() * a0 + beta * a0).re;
    let n = (1.0 - eps) * p.mean_photon() + beta.norm_sqr() + cross;
    if n < -1e-12 {
        return Err(Error::Consistency(format!("negative displaced photon number {n}")));
    }
    Ok(n.max(0.0))
}

/// Mean photon number of `S(s) E_ε(|ψ_pss⟩⟨ψ_pss|) S†(s)`:
/// `(1−ε)[n̄₀(μ_s² + ν_s²) + μ_s ν_s(⟨a²⟩₀ + ⟨a†²⟩₀)] + ν_s²`.
pub fn pss_squeezed_mean_photon(r: f64, eps: f64, s: f64) -> Result<f64> {
    check_loss(eps)?;
    let p = PssParams::new(r)?;
    let (mu, nu) = (s.cosh(), s.sinh());
    Ok((1.0 - eps) * (p.mean_photon() * (mu * mu + nu * nu) + mu * nu * 2.0 * p.mean_a2()) + nu * nu)
}

/// Squeezing that minimizes the photon number of a lossy PSS state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingOptimum {
    pub s: f64,
    /// `false` when the closed form was outside its domain and a numeric
    /// minimizer supplied `s`.
    pub analytic: bool,
}

/// `s_opt = −arccosh(μ_opt)` with
/// `μ_opt = (1/√2)(1 + (6(1−ε)μ_r² + 4ε − 3) / √((4ε−3)² + 12(1−ε)ε μ_r²))^{1/2}`.
pub fn pss_optimal_squeezing(r: f64, eps: f64) -> Result<SqueezingOptimum> {
    check_loss(eps)?;
    PssParams::new(r)?;
    let mu_r2 = r.cosh().powi(2);
    let root = ((4.0 * eps - 3.0).powi(2) + 12.0 * (1.0 - eps) * eps * mu_r2).sqrt();
    let mu_opt = (0.5 * (1.0 + (6.0 * (1.0 - eps) * mu_r2 + 4.0 * eps - 3.0) / root)).sqrt();
    if mu_opt.is_finite() && mu_opt >= 1.0 {
        return Ok(SqueezingOptimum {
            s: -mu_opt.acosh(),
            analytic: true,
        });
    }
    let m = golden_section(|s| pss_squeezed_mean_photon(r, eps, s).unwrap_or(f64::INFINITY), -3.0, 3.0, 1e-10);
    Ok(SqueezingOptimum {
        s: m.x,
        analytic: false,
    })
}

/// Where to look for the best displacement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DisplacementSearch {
    /// Real `β` in `[lo, hi]`; enough when the Wigner function is symmetric
    /// under `λ → λ*`.
    RealAxis { lo: f64, hi: f64 },
    /// Complex `β` with `|Re β|, |Im β| ≤ half_width`.
    Plane { half_width: f64 },
}

impl DisplacementSearch {
    /// Box of half-width `|⟨a⟩| + 3`, on the real axis when the state is
    /// real in the number basis.
    pub fn default_for(rho: &FockOperator) -> Self {
        let reach = moment_a(rho).norm() + 3.0;
        let real = rho.matrix().iter().all(|z| z.im.abs() < 1e-14);
        if real {
            DisplacementSearch::RealAxis { lo: -reach, hi: reach }
        } else {
            DisplacementSearch::Plane { half_width: reach }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisplacementOptimum {
    pub beta: C64,
    pub report: WitnessReport,
}

/// `Δ₂` of `D(β) ρ D†(β)` evaluated without forming the displaced state:
/// `W(0) → W(−β)`, `n̄ → n̄ + |β|² + 2 Re(β*⟨a⟩)`.
struct DisplacedWitness<'a> {
    rho: &'a FockOperator,
    nbar: f64,
    mean_a: C64,
}

impl<'a> DisplacedWitness<'a> {
    fn new(rho: &'a FockOperator) -> Result<Self> {
        Ok(Self {
            nbar: mean_photon(rho)?,
            mean_a: moment_a(rho),
            rho,
        })
    }

    fn nbar_at(&self, beta: C64) -> f64 {
        (self.nbar + beta.norm_sqr() + 2.0 * (beta.conj() * self.mean_a).re).max(0.0)
    }

    fn delta(&self, beta: C64) -> f64 {
        wigner_at(self.rho, -beta) - bound_unchecked(self.nbar_at(beta))
    }

    fn report(&self, beta: C64) -> WitnessReport {
        WitnessReport::new(wigner_at(self.rho, -beta), self.nbar_at(beta), GaussianMap::displacement(beta))
    }
}

/// `Δ₂[ρ, D_β]` for one displacement.
pub fn delta_displaced(rho: &FockOperator, beta: C64) -> Result<WitnessReport> {
    Ok(DisplacedWitness::new(rho)?.report(beta))
}

/// Half-width of the finely scanned window around `−⟨a⟩`.
const FINE_WINDOW: f64 = 0.3;

/// Minimizes `Δ₂[ρ, D_β]` over `β` in the search box.
///
/// `Δ(β)` decays to `0⁺` far from the origin and its negative well can be
/// only a few hundredths wide, so the box is scanned coarsely, the window
/// around `β = −⟨a⟩` (where `n̄` is smallest) finely, and the best point is
/// refined by golden-section (or Nelder–Mead) search. `β = 0` is always a
/// candidate.
pub fn optimize_displacement(rho: &FockOperator, search: DisplacementSearch) -> Result<DisplacementOptimum> {
    let w = DisplacedWitness::new(rho)?;
    let zero = C64::new(0.0, 0.0);
    let mut best = (zero, w.delta(zero));
    match search {
        DisplacementSearch::RealAxis { lo, hi } => {
            let f = |x: f64| w.delta(C64::new(x, 0.0));
            let samples = (((hi - lo) / 0.05).ceil() as usize + 1).clamp(41, 401);
            let mut found = vec![scan_then_golden(f, lo, hi, samples, 1e-9)];
            let centre = -w.mean_a.re;
            let (a, b) = ((centre - FINE_WINDOW).max(lo), (centre + FINE_WINDOW).min(hi));
            if a < b {
                found.push(scan_then_golden(f, a, b, 301, 1e-9));
            }
            for m in found {
                if m.value < best.1 {
                    best = (C64::new(m.x, 0.0), m.value);
                }
            }
        }
        DisplacementSearch::Plane { half_width } => {
            let n = 41;
            let step = 2.0 * half_width / (n - 1) as f64;
            let mut start = (zero, best.1);
            let mut consider = |b: C64| {
                if b.re.abs() <= half_width && b.im.abs() <= half_width {
                    let v = w.delta(b);
                    if v < start.1 {
                        start = (b, v);
                    }
                }
            };
            for i in 0..n {
                for j in 0..n {
                    consider(C64::new(-half_width + step * i as f64, -half_width + step * j as f64));
                }
            }
            let fine = 2.0 * FINE_WINDOW / 30.0;
            for i in 0..=30 {
                for j in 0..=30 {
                    consider(-w.mean_a + C64::new(-FINE_WINDOW + fine * i as f64, -FINE_WINDOW + fine * j as f64));
                }
            }
            let step = step.min(4.0 * fine);
            let (p, v) = match nelder_mead_2d(
                |p| w.delta(C64::new(p[0], p[1])),
                [start.0.re, start.0.im],
                step,
                1e-15,
                2000,
            ) {
                Ok(found) => found,
                Err(_) => ([start.0.re, start.0.im], start.1),
            };
            if v < best.1 {
                best = (C64::new(p[0], p[1]), v);
            }
        }
    }
    Ok(DisplacementOptimum {
        beta: best.0,
        report: w.report(best.0),
    })
}

/// Real squeezing `s` minimizing `n̄` of `S(s) ρ S†(s)`; `W(0)` is unchanged
/// by squeezing, so this also minimizes `Δ₂` over squeezing maps.
pub fn optimize_squeezing(rho: &FockOperator) -> Result<(f64, WitnessReport)> {
    let nbar = mean_photon(rho)?;
    let a2 = moment_a2(rho).re;
    let n_at = |s: f64| {
        let (mu, nu) = (s.cosh(), s.sinh());
        (mu * mu + nu * nu) * nbar + 2.0 * mu * nu * a2 + nu * nu
    };
    let m = golden_section(n_at, -3.0, 3.0, 1e-10);
    let (s, n) = if m.value < nbar { (m.x, m.value) } else { (0.0, nbar) };
    let report = WitnessReport::new(FRAC_2_PI * parity_expectation(rho), n, GaussianMap::squeezing(s));
    Ok((s, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    /// `Δ₁`, no extra map.
    First,
    /// `Δ₂` optimized over a family of Gaussian maps.
    Second,
}

impl Criterion {
    pub fn number(self) -> u8 {
        match self {
            Criterion::First => 1,
            Criterion::Second => 2,
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Criterion::First),
            2 => Ok(Criterion::Second),
            _ => Err(Error::Parse(format!("criterion must be 1 or 2, got {n}"))),
        }
    }
}

/// The Gaussian maps searched by the second criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFamily {
    Identity,
    Displacement,
    Squeezing,
}

impl MapFamily {
    /// Displacement for PAC states, squeezing for PSS states, nothing for Fock
    /// states (which are phase-invariant with their Wigner minimum at 0).
    pub fn default_for(spec: &StateSpec) -> Self {
        match spec {
            StateSpec::Fock { .. } => MapFamily::Identity,
            StateSpec::Pac(_) => MapFamily::Displacement,
            StateSpec::Pss(_) => MapFamily::Squeezing,
        }
    }
}

/// A family member sent through the loss channel, with the loss-free data
/// cached so that each `ε` costs one channel application.
pub struct LossyFamily {
    spec: StateSpec,
    rho0: FockOperator,
    pops0: Vec<f64>,
    nbar0: f64,
    a0: C64,
    a2_0: C64,
}

impl LossyFamily {
    pub fn new(spec: StateSpec, dim: usize, tol: &Tolerances) -> Result<Self> {
        let rho0 = spec.to_fock(dim, tol)?;
        Ok(Self {
            pops0: rho0.populations(),
            nbar0: mean_photon(&rho0)?,
            a0: moment_a(&rho0),
            a2_0: moment_a2(&rho0),
            spec,
            rho0,
        })
    }

    pub fn with_default_dim(spec: StateSpec) -> Result<Self> {
        Self::new(spec, spec.default_dim(), &Tolerances::default())
    }

    pub fn spec(&self) -> &StateSpec {
        &self.spec
    }

    pub fn initial_state(&self) -> &FockOperator {
        &self.rho0
    }

    pub fn lossy_state(&self, eps: f64) -> Result<FockOperator> {
        Ok(apply_loss(&self.rho0, LossParam::new(eps)?))
    }

    /// `W(0)` and `n̄` of `E_ε(ρ₀)` from the photon-number distribution of
    /// `ρ₀`: each photon survives independently, so the parity is
    /// `Σ p_n (2ε − 1)^n` and the energy scales by `1 − ε`. Summing powers of
    /// `2ε − 1` keeps full relative precision near `ε = 1/2`, where the
    /// thinned populations would cancel.
    fn origin_and_energy(&self, loss: LossParam) -> (f64, f64) {
        let x = 2.0 * loss.eps() - 1.0;
        let mut parity = 0.0;
        let mut power = 1.0;
        for p in &self.pops0 {
            parity += p * power;
            power *= x;
        }
        (FRAC_2_PI * parity, loss.transmissivity() * self.nbar0)
    }

    /// Witness for `E_ε(ρ₀)` under the chosen criterion and map family.
    pub fn witness(&self, eps: f64, criterion: Criterion, family: MapFamily) -> Result<WitnessReport> {
        let loss = LossParam::new(eps)?;
        let eta = loss.transmissivity();
        let (w0, n) = self.origin_and_energy(loss);
        let plain = WitnessReport::new(w0, n, GaussianMap::Identity);
        if criterion == Criterion::First {
            return Ok(plain);
        }
        let best = match family {
            MapFamily::Identity => plain.clone(),
            MapFamily::Squeezing => match self.spec {
                StateSpec::Pss(p) => {
                    let opt = pss_optimal_squeezing(p.r(), eps)?;
                    let n_s = pss_squeezed_mean_photon(p.r(), eps, opt.s)?;
                    WitnessReport::new(w0, n_s, GaussianMap::squeezing(opt.s))
                }
                _ => {
                    let a2 = self.a2_0.re * eta;
                    let nb = self.nbar0 * eta;
                    let n_at = |s: f64| {
                        let (mu, nu) = (s.cosh(), s.sinh());
                        (mu * mu + nu * nu) * nb + 2.0 * mu * nu * a2 + nu * nu
                    };
                    let m = golden_section(n_at, -3.0, 3.0, 1e-10);
                    WitnessReport::new(w0, m.value, GaussianMap::squeezing(m.x))
                }
            },
            MapFamily::Displacement => {
                let rho = apply_loss(&self.rho0, loss);
                let reach = self.a0.norm() * eta.sqrt() + 3.0;
                let search = if self.a0.im.abs() < 1e-14 && rho.matrix().iter().all(|z| z.im.abs() < 1e-14) {
                    DisplacementSearch::RealAxis { lo: -reach, hi: reach }
                } else {
                    DisplacementSearch::Plane { half_width: reach }
                };
                optimize_displacement(&rho, search)?.report
            }
        };
        Ok(if best.delta <= plain.delta { best } else { plain })
    }
}

/// Grid and refinement settings for the `ε_max` search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSearch {
    pub grid_step: f64,
    pub tol: f64,
}

impl Default for EpsSearch {
    fn default() -> Self {
        Self {
            grid_step: 1e-3,
            tol: 1e-6,
        }
    }
}

/// Largest loss at which a criterion still flags the state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsMaxResult {
    /// `None` when `Δ ≥ 0` on the whole grid.
    pub eps_max: Option<f64>,
    /// Map that attains the optimum at `ε_max`.
    pub criterion: Criterion,
    pub map_at_max: GaussianMap,
    /// Witness at `ε_max`, or at the last grid point below 1 when
    /// `ε_max = 1`.
    pub report_at_max: Option<WitnessReport>,
}

#[cfg(feature = "parallel")]
fn map_grid<T: Send, F: Fn(f64) -> T + Sync>(grid: &[f64], f: F) -> Vec<T> {
    use rayon::prelude::*;
    grid.par_iter().map(|&e| f(e)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_grid<T, F: Fn(f64) -> T>(grid: &[f64], f: F) -> Vec<T> {
    grid.iter().map(|&e| f(e)).collect()
}

/// `sup{ε : Δ[E_ε(ρ)] < 0}`.
///
/// Strict negativity keeps Gaussian states, whose `Δ` can be exactly zero,
/// out; no fixed threshold is used because `|Δ|` near the crossing can be far
/// below `1e−9`. `Δ(ε)` is not monotonic, so `ε` is scanned on `[0, 1)` and
/// the last negative grid point is refined by bisection against its right
/// neighbour. At `ε = 1` every state is the vacuum and `Δ = 0`; that trivial
/// endpoint is excluded, and a violation persisting up to the last grid point
/// is reported as `ε_max = 1`.
pub fn eps_max(family: &LossyFamily, criterion: Criterion, maps: MapFamily, search: EpsSearch) -> Result<EpsMaxResult> {
    if !(search.grid_step > 0.0 && search.grid_step < 1.0 && search.tol > 0.0) {
        return Err(Error::Domain("grid_step must lie in (0, 1) and tol must be positive".into()));
    }
    let points = (1.0 / search.grid_step).round() as usize;
    let grid: Vec<f64> = (0..points).map(|i| i as f64 * search.grid_step).collect();
    let deltas = map_grid(&grid, |e| family.witness(e, criterion, maps).map(|r| r.delta))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;

    let Some(last) = deltas.iter().rposition(|&d| d < 0.0) else {
        return Ok(EpsMaxResult {
            eps_max: None,
            criterion,
            map_at_max: GaussianMap::Identity,
            report_at_max: None,
        });
    };
    // Past the last grid point only ε = 1 remains, where Δ = 0 trivially; the
    // report then describes the last grid point.
    let (eps, at) = if last + 1 == grid.len() {
        (1.0, grid[last])
    } else {
        let (mut lo, mut hi) = (grid[last], grid[last + 1]);
        while hi - lo > search.tol {
            let mid = 0.5 * (lo + hi);
            if family.witness(mid, criterion, maps)?.delta < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, lo)
    };
    let report = family.witness(at, criterion, maps)?;
    Ok(EpsMaxResult {
        eps_max: Some(eps),
        criterion,
        map_at_max: report.map_used.clone(),
        report_at_max: Some(report),
    })
}
