//! The pure-loss channel `E_ε` and the Gaussian unitaries used by the
//! second criterion.
//!
//! Loss is available in three equivalent forms: a Kraus sum on Fock
//! operators, binomial thinning of photon-number populations, and a Gaussian
//! convolution kernel acting on Wigner functions.

use std::f64::consts::{FRAC_2_PI, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exemplars::PhasePoint;
use crate::fock::{apply_unitary, displacement_matrix, ln_factorials, squeezing_matrix, FockOperator, Tolerances};
use crate::gaussian::GaussianMoments;
use crate::quadrature::{adaptive_2d, AdaptiveHermite};

/// Loss fraction `ε ∈ [0, 1]`; detector efficiency is `1 − ε`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LossParam(f64);

impl LossParam {
    pub fn new(eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("loss must lie in [0, 1], got {eps}")));
        }
        Ok(Self(eps))
    }

    /// `ε = 1 − e^{−γt}` for a damping rate times time `γt ≥ 0`.
    pub fn from_gamma_t(gamma_t: f64) -> Result<Self> {
        if !(gamma_t >= 0.0) {
            return Err(Error::Domain(format!("γt must be >= 0, got {gamma_t}")));
        }
        Self::new(-(-gamma_t).exp_m1())
    }

    pub fn eps(self) -> f64 {
        self.0
    }

    pub fn transmissivity(self) -> f64 {
        1.0 - self.0
    }

    pub fn gamma_t(self) -> f64 {
        -(1.0 - self.0).ln()
    }
}

/// Loss of two channels applied in sequence: `1 − ε = (1 − ε₁)(1 − ε₂)`.
pub fn compose_loss(first: LossParam, second: LossParam) -> LossParam {
    let eta = first.transmissivity() * second.transmissivity();
    LossParam((1.0 - eta).clamp(0.0, 1.0))
}

fn ln_binom(lnf: &[f64], n: usize, k: usize) -> f64 {
    lnf[n] - lnf[k] - lnf[n - k]
}

/// `Σ_k A_k ρ A_k†` with `⟨n−k|A_k|n⟩ = √(C(n,k) (1−ε)^{n−k} ε^k)`.
pub fn apply_loss(rho: &FockOperator, loss: LossParam) -> FockOperator {
    let eps = loss.eps();
    let d = rho.dim();
    if eps == 0.0 {
        return rho.clone();
    }
    if eps == 1.0 {
        return FockOperator::vacuum(d).scaled(rho.trace().re);
    }
    let eta = 1.0 - eps;
    let lnf = ln_factorials(d);
    let (ln_eta, ln_eps) = (eta.ln(), eps.ln());
    let src = rho.matrix();
    let mut out = nalgebra::DMatrix::<C64>::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d - m.max(n) {
                let ln_c = 0.5 * (ln_binom(&lnf, m + k, k) + ln_binom(&lnf, n + k, k))
                    + 0.5 * (m + n) as f64 * ln_eta
                    + k as f64 * ln_eps;
                acc += src[(m + k, n + k)] * ln_c.exp();
            }
            out[(m, n)] = acc;
        }
    }
    FockOperator::from_matrix_unchecked(out)
}

/// Binomial thinning of photon-number populations:
/// `q_l = Σ_n p_n C(n,l) (1−ε)^l ε^{n−l}`.
pub fn lossy_populations(pops: &[f64], loss: LossParam) -> Vec<f64> {
    let eps = loss.eps();
    let d = pops.len();
    if eps == 0.0 {
        return pops.to_vec();
    }
    let mut out = vec![0.0; d];
    if eps == 1.0 {
        out[0] = pops.iter().sum();
        return out;
    }
    let lnf = ln_factorials(d);
    let (ln_eta, ln_eps) = ((1.0 - eps).ln(), eps.ln());
    for (n, &p) in pops.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (l, q) in out.iter_mut().enumerate().take(n + 1) {
            *q += p * (ln_binom(&lnf, n, l) + l as f64 * ln_eta + (n - l) as f64 * ln_eps).exp();
        }
    }
    out
}

/// `K_ε(λ, λ′) = (2/(πε)) exp{−2|λ − λ′√(1−ε)|² / ε}`.
pub fn loss_kernel(loss: LossParam, z: PhasePoint, z_in: PhasePoint) -> f64 {
    let eps = loss.eps();
    let d = z.0 - z_in.0 * loss.transmissivity().sqrt();
    2.0 / (PI * eps) * (-2.0 * d.norm_sqr() / eps).exp()
}

/// Wigner function of `E_ε(ρ)` at `z` from the loss-free Wigner function `w0`,
/// by Gauss–Hermite quadrature of the kernel convolution.
///
/// Substituting `λ′ = (z − √(ε/2)(x + iy)) / √(1−ε)` turns the kernel into the
/// Hermite weight `e^{−x²−y²}`, so the rule is centred on `z / √(1−ε)`.
pub fn lossy_wigner<W: Fn(PhasePoint) -> f64>(w0: W, loss: LossParam, z: PhasePoint, cfg: AdaptiveHermite) -> Result<f64> {
    let eps = loss.eps();
    if eps == 0.0 {
        return Ok(w0(z));
    }
    if eps == 1.0 {
        return Ok(FRAC_2_PI * (-2.0 * z.0.norm_sqr()).exp());
    }
    let eta = 1.0 - eps;
    let spread = (eps / 2.0).sqrt();
    let inv_sqrt_eta = 1.0 / eta.sqrt();
    let integrand = |x: f64, y: f64| w0(PhasePoint((z.0 - C64::new(x, y) * spread) * inv_sqrt_eta));
    let got = adaptive_2d(integrand, cfg)?;
    Ok(got.value / (PI * eta))
}

/// A deterministic single-mode Gaussian map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GaussianMap {
    Identity,
    Displacement { beta: C64 },
    Squeezing { s: f64 },
    Loss { eps: LossParam },
    /// Applied left to right.
    Composition { maps: Vec<GaussianMap> },
}

impl GaussianMap {
    pub fn displacement(beta: C64) -> Self {
        GaussianMap::Displacement { beta }
    }

    pub fn squeezing(s: f64) -> Self {
        GaussianMap::Squeezing { s }
    }

    pub fn loss(eps: LossParam) -> Self {
        GaussianMap::Loss { eps }
    }

    pub fn then(maps: Vec<GaussianMap>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Domain("a composition needs at least one map".into()));
        }
        Ok(GaussianMap::Composition { maps })
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GaussianMap::Identity => true,
            GaussianMap::Displacement { beta } => beta.norm_sqr() == 0.0,
            GaussianMap::Squeezing { s } => *s == 0.0,
            GaussianMap::Loss { eps } => eps.eps() == 0.0,
            GaussianMap::Composition { maps } => maps.iter().all(GaussianMap::is_identity),
        }
    }

    /// Moments of `E_G(ρ)` for a Gaussian `ρ`.
    pub fn apply_to_moments(&self, m: GaussianMoments) -> GaussianMoments {
        match self {
            GaussianMap::Identity => m,
            GaussianMap::Displacement { beta } => m.displaced(*beta),
            GaussianMap::Squeezing { s } => m.squeezed(C64::new(*s, 0.0)),
            GaussianMap::Loss { eps } => m.attenuated(eps.eps()),
            GaussianMap::Composition { maps } => maps.iter().fold(m, |acc, g| g.apply_to_moments(acc)),
        }
    }
}

/// `E_G(ρ)` on the truncated space. Displacement and squeezing fail with a
/// truncation error when more than `truncation_tol` of probability leaks out.
pub fn apply_gaussian_map(rho: &FockOperator, g: &GaussianMap, tol: &Tolerances) -> Result<FockOperator> {
    let unitary = |u: FockOperator| -> Result<FockOperator> {
        let (out, warning) = apply_unitary(&u, rho, tol)?;
        match warning {
            Some(w) => Err(Error::Truncation {
                mass_lost: w.trace_deficit,
                tolerance: w.tolerance,
            }),
            None => Ok(out),
        }
    };
    match g {
        GaussianMap::Identity => Ok(rho.clone()),
        GaussianMap::Displacement { beta } => unitary(displacement_matrix(*beta, rho.dim())),
        GaussianMap::Squeezing { s } => unitary(squeezing_matrix(C64::new(*s, 0.0), rho.dim())),
        GaussianMap::Loss { eps } => Ok(apply_loss(rho, *eps)),
        GaussianMap::Composition { maps } => {
            if maps.is_empty() {
                return Err(Error::Domain("a composition needs at least one map".into()));
            }
            maps.iter()
                .try_fold(rho.clone(), |acc, m| apply_gaussian_map(&acc, m, tol))
        }
    }
}

impl fmt::Display for GaussianMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GaussianMap::Identity => write!(f, "id"),
            GaussianMap::Displacement { beta } => write!(f, "disp:{},{}", beta.re, beta.im),
            GaussianMap::Squeezing { s } => write!(f, "sq:{s}"),
            GaussianMap::Loss { eps } => write!(f, "loss:{}", eps.eps()),
            GaussianMap::Composition { maps } => {
                write!(f, "then(")?;
                for (i, m) in maps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{m}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn parse_f64(s: &str, ctx: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad number `{s}` in `{ctx}`: {e}")))
}

/// Split on `;` outside parentheses.
fn split_top_level(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in `{s}`")));
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in `{s}`")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

/// Grammar: `id | disp:re[,im] | sq:s | loss:eps | then(map;map;...)`.
impl FromStr for GaussianMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "id" || t == "identity" {
            return Ok(GaussianMap::Identity);
        }
        if let Some(inner) = t.strip_prefix("then(").and_then(|r| r.strip_suffix(')')) {
            let maps = split_top_level(inner)?
                .into_iter()
                .filter(|p| !p.trim().is_empty())
                .map(str::parse)
                .collect::<Result<Vec<_>>>()?;
            return GaussianMap::then(maps).map_err(|_| Error::Parse(format!("empty composition `{t}`")));
        }
        let (kind, args) = t
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("map spec `{t}` must be id, disp:re,im, sq:s, loss:eps or then(...)")))?;
        match kind {
            "disp" => {
                let (re, im) = match args.split_once(',') {
                    Some((re, im)) => (parse_f64(re, t)?, parse_f64(im, t)?),
                    None => (parse_f64(args, t)?, 0.0),
                };
                Ok(GaussianMap::displacement(C64::new(re, im)))
            }
            "sq" => Ok(GaussianMap::squeezing(parse_f64(args, t)?)),
            "loss" => Ok(GaussianMap::loss(LossParam::new(parse_f64(args, t)?)?)),
            other => Err(Error::Parse(format!("unknown map kind `{other}`"))),
        }
    }
}
