//! The non-Gaussian test families: Fock states, photon-added coherent (PAC)
//! states `a†|α⟩/√(1+α²)` and photon-subtracted squeezed (PSS) states
//! `a S(r)|0⟩ / sinh r`, with their closed-form Wigner functions and moments.

use std::f64::consts::FRAC_2_PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, fock_state, squeezed_vacuum_amplitudes, truncation_dim, FockOperator, FockVector, Tolerances};

/// A point `λ` of phase space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint(pub C64);

impl PhasePoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self(C64::new(re, im))
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0)
    }
}

impl From<C64> for PhasePoint {
    fn from(z: C64) -> Self {
        Self(z)
    }
}

/// Real coherent amplitude of a PAC state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacParams {
    alpha: f64,
}

impl PacParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("PAC amplitude must be a finite real >= 0, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(α⁴ + 3α² + 1) / (1 + α²)`.
    pub fn mean_photon(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        (a2 * a2 + 3.0 * a2 + 1.0) / (1.0 + a2)
    }

    /// `⟨a⟩ = ⟨a†⟩ = α(2 + α²) / (1 + α²)`.
    pub fn mean_a(&self) -> f64 {
        let a = self.alpha;
        a * (2.0 + a * a) / (1.0 + a * a)
    }
}

/// Real squeezing parameter of a PSS state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PssParams {
    r: f64,
}

impl PssParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("PSS squeezing must be a finite real > 0, got {r}")));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `3 sinh² r + 1`.
    pub fn mean_photon(&self) -> f64 {
        3.0 * self.r.sinh().powi(2) + 1.0
    }

    /// `⟨a²⟩ = ⟨a†²⟩ = 3 cosh r sinh r`.
    pub fn mean_a2(&self) -> f64 {
        3.0 * self.r.cosh() * self.r.sinh()
    }
}

fn truncation_checked(psi: Vec<C64>, tol: &Tolerances) -> Result<FockOperator> {
    let v = FockVector::new(psi)?;
    let lost = 1.0 - v.norm_sqr();
    if lost > tol.truncation_tol {
        return Err(Error::Truncation {
            mass_lost: lost,
            tolerance: tol.truncation_tol,
        });
    }
    Ok(FockOperator::pure(&v))
}

fn pac_amplitudes(p: &PacParams, dim: usize) -> Vec<C64> {
    let coh = coherent_amplitudes(C64::new(p.alpha, 0.0), dim);
    let norm = (1.0 + p.alpha * p.alpha).sqrt();
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    for n in 0..dim.saturating_sub(1) {
        psi[n + 1] = coh[n] * (((n + 1) as f64).sqrt() / norm);
    }
    psi
}

pub fn pac_to_fock(p: &PacParams, dim: usize, tol: &Tolerances) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::Dimension("PAC states need dim >= 2".into()));
    }
    truncation_checked(pac_amplitudes(p, dim), tol)
}

/// `W(λ) = (2/π) e^{−2|α−λ|²} (−1 + α² + 4|λ|² − 4α Re λ) / (1 + α²)`.
pub fn pac_wigner(p: &PacParams, z: PhasePoint) -> f64 {
    let a = p.alpha;
    let l = z.0;
    let d2 = (C64::new(a, 0.0) - l).norm_sqr();
    let poly = -1.0 + a * a + 4.0 * l.norm_sqr() - 4.0 * a * l.re;
    FRAC_2_PI * (-2.0 * d2).exp() * poly / (1.0 + a * a)
}

fn pss_amplitudes(p: &PssParams, dim: usize) -> Vec<C64> {
    let sq = squeezed_vacuum_amplitudes(C64::new(p.r, 0.0), dim + 1);
    let norm = p.r.sinh();
    (0..dim).map(|n| sq[n + 1] * (((n + 1) as f64).sqrt() / norm)).collect()
}

pub fn pss_to_fock(p: &PssParams, dim: usize, tol: &Tolerances) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::Dimension("PSS states need dim >= 2".into()));
    }
    truncation_checked(pss_amplitudes(p, dim), tol)
}

/// `W(λ) = −(2/π) e^{−2|λ|² cosh 2r + 2 Re(λ²) sinh 2r} [1 − 4|λ|² cosh 2r + 4 Re(λ²) sinh 2r]`.
pub fn pss_wigner(p: &PssParams, z: PhasePoint) -> f64 {
    let l = z.0;
    let (ch, sh) = ((2.0 * p.r).cosh(), (2.0 * p.r).sinh());
    let mod2 = l.norm_sqr();
    let re_sq = (l * l).re;
    let expo = -2.0 * mod2 * ch + 2.0 * re_sq * sh;
    -FRAC_2_PI * expo.exp() * (1.0 - 4.0 * mod2 * ch + 4.0 * re_sq * sh)
}

/// `W(λ) = (2/π)(−1)^m e^{−2|λ|²} L_m(4|λ|²)` for the Fock state `|m⟩`.
pub fn fock_wigner(m: usize, z: PhasePoint) -> f64 {
    let x = 4.0 * z.0.norm_sqr();
    let (mut prev, mut cur) = (0.0, 1.0);
    for j in 0..m {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 - x) * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    FRAC_2_PI * sign * (-0.5 * x).exp() * cur
}

/// `(2/π)(2ε − 1)^m`.
pub fn fock_wigner_origin_lossy(m: usize, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Domain(format!("loss must lie in [0, 1], got {eps}")));
    }
    Ok(FRAC_2_PI * (2.0 * eps - 1.0).powi(m as i32))
}

/// Probability the default truncation may discard.
const DEFAULT_TAIL: f64 = 1e-12;

/// One of the three families, addressable as `fock:m`, `pac:alpha`, `pss:r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum StateSpec {
    Fock { m: usize },
    Pac(PacParams),
    Pss(PssParams),
}

impl StateSpec {
    pub fn mean_photon(&self) -> f64 {
        match self {
            StateSpec::Fock { m } => *m as f64,
            StateSpec::Pac(p) => p.mean_photon(),
            StateSpec::Pss(p) => p.mean_photon(),
        }
    }

    /// Truncation from the energy heuristic plus a margin, grown until the
    /// discarded tail holds less than `1e−12` of probability (squeezed states
    /// have heavier tails than the heuristic assumes).
    pub fn default_dim(&self) -> usize {
        let tail = |amps: Vec<C64>| 1.0 - amps.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let mut dim = truncation_dim(self.mean_photon()) + 10;
        match self {
            StateSpec::Fock { m } => (m + 1).max(truncation_dim(*m as f64)),
            StateSpec::Pac(p) => {
                while tail(pac_amplitudes(p, dim)) > DEFAULT_TAIL {
                    dim += 10;
                }
                dim
            }
            StateSpec::Pss(p) => {
                while tail(pss_amplitudes(p, dim)) > DEFAULT_TAIL {
                    dim += 10;
                }
                dim
            }
        }
    }

    pub fn to_fock(&self, dim: usize, tol: &Tolerances) -> Result<FockOperator> {
        match self {
            StateSpec::Fock { m } => Ok(FockOperator::pure(&fock_state(*m, dim)?)),
            StateSpec::Pac(p) => pac_to_fock(p, dim, tol),
            StateSpec::Pss(p) => pss_to_fock(p, dim, tol),
        }
    }

    /// Closed-form Wigner function of the loss-free state.
    pub fn wigner(&self, z: PhasePoint) -> f64 {
        match self {
            StateSpec::Fock { m } => fock_wigner(*m, z),
            StateSpec::Pac(p) => pac_wigner(p, z),
            StateSpec::Pss(p) => pss_wigner(p, z),
        }
    }

    /// Family parameter as a float (`m`, `α` or `r`).
    pub fn parameter(&self) -> f64 {
        match self {
            StateSpec::Fock { m } => *m as f64,
            StateSpec::Pac(p) => p.alpha(),
            StateSpec::Pss(p) => p.r(),
        }
    }

    pub fn parameter_name(&self) -> &'static str {
        match self {
            StateSpec::Fock { .. } => "m",
            StateSpec::Pac(_) => "alpha",
            StateSpec::Pss(_) => "r",
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Fock { m } => write!(f, "fock:{m}"),
            StateSpec::Pac(p) => write!(f, "pac:{}", p.alpha()),
            StateSpec::Pss(p) => write!(f, "pss:{}", p.r()),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, value) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("state spec `{s}` must look like fock:m, pac:alpha or pss:r")))?;
        let float = || {
            value
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad parameter in `{s}`: {e}")))
        };
        match family.trim() {
            "fock" => {
                let m = value
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad photon number in `{s}`: {e}")))?;
                Ok(StateSpec::Fock { m })
            }
            "pac" => Ok(StateSpec::Pac(PacParams::new(float()?)?)),
            "pss" => Ok(StateSpec::Pss(PssParams::new(float()?)?)),
            other => Err(Error::Parse(format!("unknown state family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{mean_photon, moment_a, moment_a2, wigner_at};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn pac_zero_is_one_photon() {
        let rho = pac_to_fock(&PacParams::new(0.0).unwrap(), 8, &tol()).unwrap();
        assert_eq!(rho, FockOperator::pure(&fock_state(1, 8).unwrap()));
    }

    #[test]
    fn pac_moments_match_closed_forms() {
        for alpha in [0.3, 1.0, 2.0] {
            let p = PacParams::new(alpha).unwrap();
            let rho = pac_to_fock(&p, 70, &tol()).unwrap();
            assert!((mean_photon(&rho).unwrap() - p.mean_photon()).abs() < 1e-10);
            let a = moment_a(&rho);
            assert!((a.re - p.mean_a()).abs() < 1e-10 && a.im.abs() < 1e-14);
        }
    }

    #[test]
    fn pac_wigner_examples() {
        let z0 = PhasePoint::origin();
        assert!((pac_wigner(&PacParams::new(0.0).unwrap(), z0) + FRAC_2_PI).abs() < 1e-15);
        assert_eq!(pac_wigner(&PacParams::new(1.0).unwrap(), z0), 0.0);
        let p = PacParams::new(0.5).unwrap();
        let rho = pac_to_fock(&p, 50, &tol()).unwrap();
        let z = C64::new(0.3, 0.0);
        assert!((pac_wigner(&p, z.into()) - wigner_at(&rho, z)).abs() < 1e-12);
    }

    #[test]
    fn pss_examples() {
        let p = PssParams::new(0.3).unwrap();
        let rho = pss_to_fock(&p, 60, &tol()).unwrap();
        assert!((mean_photon(&rho).unwrap() - (3.0 * 0.3f64.sinh().powi(2) + 1.0)).abs() < 1e-12);
        let a2 = moment_a2(&rho);
        assert!((a2.re - 3.0 * 0.3f64.cosh() * 0.3f64.sinh()).abs() < 1e-12);
        for k in 0..30 {
            assert_eq!(rho.matrix()[(2 * k, 2 * k)].re, 0.0);
        }
        assert!(matches!(PssParams::new(0.0), Err(Error::Domain(_))));
        assert!(PssParams::new(-0.2).is_err());
    }

    #[test]
    fn pss_wigner_examples() {
        for r in [0.05, 0.3, 1.2] {
            let p = PssParams::new(r).unwrap();
            assert!((pss_wigner(&p, PhasePoint::origin()) + FRAC_2_PI).abs() < 1e-15);
        }
        let p = PssParams::new(0.3).unwrap();
        let rho = pss_to_fock(&p, 60, &tol()).unwrap();
        let z = C64::new(0.2, 0.0);
        assert!((pss_wigner(&p, z.into()) - wigner_at(&rho, z)).abs() < 1e-7);
    }

    #[test]
    fn fock_lossy_origin_examples() {
        for eps in [0.0, 0.3, 1.0] {
            assert_eq!(fock_wigner_origin_lossy(0, eps).unwrap(), FRAC_2_PI);
        }
        assert_eq!(fock_wigner_origin_lossy(1, 0.5).unwrap(), 0.0);
        assert!((fock_wigner_origin_lossy(2, 0.75).unwrap() - FRAC_2_PI * 0.25).abs() < 1e-15);
        assert!(fock_wigner_origin_lossy(2, 1.1).is_err());
        assert!(fock_wigner_origin_lossy(2, -0.1).is_err());
    }

    #[test]
    fn fock_wigner_matches_parity_route() {
        let z = C64::new(0.4, -0.25);
        for m in 0..6 {
            let rho = FockOperator::pure(&fock_state(m, 30).unwrap());
            assert!((fock_wigner(m, z.into()) - wigner_at(&rho, z)).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("fock:3".parse::<StateSpec>().unwrap(), StateSpec::Fock { m: 3 });
        assert_eq!(
            "pac:0.6".parse::<StateSpec>().unwrap(),
            StateSpec::Pac(PacParams::new(0.6).unwrap())
        );
        assert_eq!(
            " pss:0.3 ".parse::<StateSpec>().unwrap(),
            StateSpec::Pss(PssParams::new(0.3).unwrap())
        );
        for bad in ["fock", "fock:-1", "pac:x", "pss:0", "cat:1"] {
            assert!(bad.parse::<StateSpec>().is_err(), "{bad}");
        }
        let s: StateSpec = "pss:0.5".parse().unwrap();
        assert_eq!(s.to_string().parse::<StateSpec>().unwrap(), s);
    }
}
