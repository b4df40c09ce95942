//! Parameter sweeps behind the figure tables, and their CSV form.
//!
//! A CSV starts with `# ` provenance lines, then the header
//! `param,eps,W0,nbar,bound,delta,verdict`. `param` holds `key=value` pairs
//! joined by `;`. Rows reporting `ε_max` put it in `eps` (or `none`) and the
//! witness at that loss in the remaining columns.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exemplars::{PacParams, PssParams, StateSpec};
use crate::fock::Tolerances;
use crate::witness::{delta_displaced, eps_max, optimize_displacement, pss_squeezed_mean_photon, Criterion, DisplacementSearch, EpsSearch, LossyFamily, MapFamily, WitnessReport};

pub const CSV_COLUMNS: &str = "param,eps,W0,nbar,bound,delta,verdict";

/// Inclusive list of sweep values, written `start:stop:step` or `a,b,c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRange(Vec<f64>);

impl ParamRange {
    pub fn stepped(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && start.is_finite() && stop.is_finite() && stop >= start) {
            return Err(Error::Parse(format!("bad range {start}:{stop}:{step}")));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        if count > 1_000_000 {
            return Err(Error::Parse(format!("range {start}:{stop}:{step} has too many points")));
        }
        Ok(Self((0..=count).map(|k| tidy(start + k as f64 * step)).collect()))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ParamRange {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl FromStr for ParamRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number `{t}` in range `{s}`: {e}")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [a, b, step] => Self::stepped(num(a)?, num(b)?, num(step)?),
            [single] => single.split(',').map(num).collect::<Result<Vec<_>>>().map(Self),
            _ => Err(Error::Parse(format!("range `{s}` must be start:stop:step or a comma list"))),
        }
    }
}

/// Strips the round-off that `k · step` picks up, so grid values print as
/// written.
fn tidy(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// Shortest round-trip form, in exponent notation for tiny magnitudes.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn eps_grid(step: f64) -> Vec<f64> {
    let n = (1.0 / step).round() as usize;
    (0..=n).map(|k| k as f64 / n as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Fock,
    Pac,
    Pss,
}

impl Family {
    pub fn state(self, value: f64) -> Result<StateSpec> {
        match self {
            Family::Fock => {
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::Domain(format!("Fock number must be a non-negative integer, got {value}")));
                }
                Ok(StateSpec::Fock { m: value as usize })
            }
            Family::Pac => Ok(StateSpec::Pac(PacParams::new(value)?)),
            Family::Pss => Ok(StateSpec::Pss(PssParams::new(value)?)),
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            Family::Fock => "m",
            Family::Pac => "alpha",
            Family::Pss => "r",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fock" => Ok(Family::Fock),
            "pac" => Ok(Family::Pac),
            "pss" => Ok(Family::Pss),
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

/// Tables of the published figures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigureTag {
    /// `Δ₁` vs `ε` for Fock states 1, 2, 3.
    Fig2Left,
    /// `ε_max⁽¹⁾` vs Fock number.
    Fig2Right,
    /// `Δ₁` vs `ε` for PAC `α ∈ {0.2, 0.4, 0.6}`.
    Fig3Left,
    /// `ε_max⁽¹⁾` vs PAC `α`.
    Fig3Right,
    /// `Δ₁` vs `ε` for PSS `r ∈ {0.1, 0.3, 0.5}`.
    Fig4Left,
    /// `ε_max⁽¹⁾` vs PSS `r`.
    Fig4Right,
    /// `Δ` vs displacement `β` for lossy PAC states at `ε = 0.8`.
    Fig7Left,
    /// Displacement-optimized `Δ` vs `ε` for PAC states.
    Fig7Right,
    /// `Δ` vs squeezing `s` for lossy PSS states at `ε = 0.7`.
    Fig8Left,
    /// Squeezing-optimized `Δ` vs `ε` for PSS states.
    Fig8Right,
    /// `ε_max⁽¹⁾` and `ε_max⁽²⁾` vs PSS `r`.
    Fig9,
}

impl FigureTag {
    pub const ALL: [FigureTag; 11] = [
        FigureTag::Fig2Left,
        FigureTag::Fig2Right,
        FigureTag::Fig3Left,
        FigureTag::Fig3Right,
        FigureTag::Fig4Left,
        FigureTag::Fig4Right,
        FigureTag::Fig7Left,
        FigureTag::Fig7Right,
        FigureTag::Fig8Left,
        FigureTag::Fig8Right,
        FigureTag::Fig9,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureTag::Fig2Left => "fig2-left",
            FigureTag::Fig2Right => "fig2-right",
            FigureTag::Fig3Left => "fig3-left",
            FigureTag::Fig3Right => "fig3-right",
            FigureTag::Fig4Left => "fig4-left",
            FigureTag::Fig4Right => "fig4-right",
            FigureTag::Fig7Left => "fig7-left",
            FigureTag::Fig7Right => "fig7-right",
            FigureTag::Fig8Left => "fig8-left",
            FigureTag::Fig8Right => "fig8-right",
            FigureTag::Fig9 => "fig9",
        }
    }
}

impl fmt::Display for FigureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown figure tag `{s}`")))
    }
}

/// A user-defined sweep: `ε_max` over a parameter range, or `Δ` over a
/// parameter × `ε` grid when `eps` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CustomSweep {
    pub family: Family,
    pub values: ParamRange,
    pub criterion: Criterion,
    /// Defaults to the family's usual map for the second criterion.
    pub maps: Option<MapFamily>,
    pub eps: Option<ParamRange>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    /// `ε` spacing of the `Δ`-vs-`ε` figures.
    pub eps_step: f64,
    pub search: EpsSearch,
    pub tol: Tolerances,
    /// Overrides the per-state truncation.
    pub dim: Option<usize>,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            eps_step: 0.005,
            search: EpsSearch::default(),
            tol: Tolerances::default(),
            dim: None,
        }
    }
}

impl SweepSettings {
    fn family(&self, spec: StateSpec) -> Result<LossyFamily> {
        LossyFamily::new(spec, self.dim.unwrap_or_else(|| spec.default_dim()), &self.tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: Vec<(String, f64)>,
    pub eps: Option<f64>,
    pub report: Option<WitnessReport>,
}

impl SweepRow {
    fn param_field(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={}", num(*v)))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn csv_line(&self) -> String {
        let eps = self.eps.map_or_else(|| "none".to_string(), num);
        match &self.report {
            Some(r) => format!(
                "{},{},{},{},{},{},{}",
                self.param_field(),
                eps,
                num(r.wigner_at_origin),
                num(r.mean_photon),
                num(r.bound),
                num(r.delta),
                r.verdict
            ),
            None => format!("{},{},,,,,", self.param_field(), eps),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub figure_tag: String,
    pub settings: SweepSettings,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// CSV text: the caller's provenance lines, then the settings, then the
    /// table.
    pub fn to_csv(&self, provenance: &[String]) -> String {
        let mut out = String::new();
        for line in provenance {
            let _ = writeln!(out, "# {line}");
        }
        let s = &self.settings;
        let _ = writeln!(out, "# figure: {}", self.figure_tag);
        let _ = writeln!(out, "# wigwitness {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(
            out,
            "# eps_step={} eps_grid={:e} eps_tol={:e} decision_tol={:e}",
            s.eps_step,
            s.search.grid_step,
            s.search.tol,
            crate::witness::DECISION_TOL
        );
        let _ = writeln!(
            out,
            "# norm_tol={:e} herm_tol={:e} trace_tol={:e} psd_tol={:e} truncation_tol={:e} dim={}",
            s.tol.norm_tol,
            s.tol.herm_tol,
            s.tol.trace_tol,
            s.tol.psd_tol,
            s.tol.truncation_tol,
            s.dim.map_or_else(|| "auto".to_string(), |d| d.to_string())
        );
        let _ = writeln!(out, "{CSV_COLUMNS}");
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.csv_line());
        }
        out
    }
}

#[cfg(feature = "parallel")]
fn map_jobs<J: Sync, T: Send, F: Fn(&J) -> T + Sync + Send>(jobs: &[J], f: F) -> Vec<T> {
    use rayon::prelude::*;
    jobs.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_jobs<J, T, F: Fn(&J) -> T>(jobs: &[J], f: F) -> Vec<T> {
    jobs.iter().map(f).collect()
}

fn collect_rows(rows: Vec<Result<SweepRow>>) -> Result<Vec<SweepRow>> {
    rows.into_iter().collect()
}

fn delta_curves(
    family: Family,
    values: &[f64],
    eps: &[f64],
    criterion: Criterion,
    maps: MapFamily,
    settings: &SweepSettings,
) -> Result<Vec<SweepRow>> {
    let states = values
        .iter()
        .map(|&v| settings.family(family.state(v)?))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, f64)> = (0..values.len()).flat_map(|i| eps.iter().map(move |&e| (i, e))).collect();
    collect_rows(map_jobs(&jobs, |&(i, e)| {
        let report = states[i].witness(e, criterion, maps)?;
        let mut params = vec![(family.parameter_name().to_string(), values[i])];
        if let crate::channels::GaussianMap::Displacement { beta } = report.map_used {
            params.push(("beta".into(), beta.re));
        }
        if let crate::channels::GaussianMap::Squeezing { s } = report.map_used {
            params.push(("s".into(), s));
        }
        Ok(SweepRow {
            params,
            eps: Some(e),
            report: Some(report),
        })
    }))
}

fn eps_max_table(
    family: Family,
    values: &[f64],
    criteria: &[Criterion],
    maps: Option<MapFamily>,
    settings: &SweepSettings,
) -> Result<Vec<SweepRow>> {
    let jobs: Vec<(f64, Criterion)> = values.iter().flat_map(|&v| criteria.iter().map(move |&c| (v, c))).collect();
    collect_rows(map_jobs(&jobs, |&(v, c)| {
        let spec = family.state(v)?;
        let fam = settings.family(spec)?;
        let maps = maps.unwrap_or_else(|| MapFamily::default_for(&spec));
        let found = eps_max(&fam, c, maps, settings.search)?;
        let mut params = vec![(family.parameter_name().to_string(), v)];
        if criteria.len() > 1 {
            params.push(("criterion".into(), c.number() as f64));
        }
        Ok(SweepRow {
            params,
            eps: found.eps_max,
            report: found.report_at_max,
        })
    }))
}

/// `Δ` of `D(β) E_ε(ρ_pac)` along real `β`.
fn displacement_curves(alphas: &[f64], eps: f64, betas: &[f64], settings: &SweepSettings) -> Result<Vec<SweepRow>> {
    let states = alphas
        .iter()
        .map(|&a| settings.family(Family::Pac.state(a)?)?.lossy_state(eps))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, f64)> = (0..alphas.len()).flat_map(|i| betas.iter().map(move |&b| (i, b))).collect();
    collect_rows(map_jobs(&jobs, |&(i, b)| {
        Ok(SweepRow {
            params: vec![("alpha".into(), alphas[i]), ("beta".into(), b)],
            eps: Some(eps),
            report: Some(delta_displaced(&states[i], C64::new(b, 0.0))?),
        })
    }))
}

/// `Δ` of `S(s) E_ε(ρ_pss)` along `s`.
fn squeezing_curves(rs: &[f64], eps: f64, ss: &[f64], settings: &SweepSettings) -> Result<Vec<SweepRow>> {
    let origins = rs
        .iter()
        .map(|&r| {
            let fam = settings.family(Family::Pss.state(r)?)?;
            Ok(fam.witness(eps, Criterion::First, MapFamily::Identity)?.wigner_at_origin)
        })
        .collect::<Result<Vec<f64>>>()?;
    let jobs: Vec<(usize, f64)> = (0..rs.len()).flat_map(|i| ss.iter().map(move |&s| (i, s))).collect();
    collect_rows(map_jobs(&jobs, |&(i, s)| {
        let n = pss_squeezed_mean_photon(rs[i], eps, s)?;
        Ok(SweepRow {
            params: vec![("r".into(), rs[i]), ("s".into(), s)],
            eps: Some(eps),
            report: Some(WitnessReport::new(origins[i], n, crate::channels::GaussianMap::squeezing(s))),
        })
    }))
}

pub fn run_figure(tag: FigureTag, settings: &SweepSettings) -> Result<SweepResult> {
    let eps = eps_grid(settings.eps_step);
    let one = [Criterion::First];
    let rows = match tag {
        FigureTag::Fig2Left => delta_curves(Family::Fock, &[1.0, 2.0, 3.0], &eps, Criterion::First, MapFamily::Identity, settings)?,
        FigureTag::Fig2Right => {
            let ms: Vec<f64> = (1..=10).map(f64::from).collect();
            eps_max_table(Family::Fock, &ms, &one, None, settings)?
        }
        FigureTag::Fig3Left => delta_curves(Family::Pac, &[0.2, 0.4, 0.6], &eps, Criterion::First, MapFamily::Identity, settings)?,
        FigureTag::Fig3Right => eps_max_table(Family::Pac, ParamRange::stepped(0.1, 3.0, 0.1)?.values(), &one, None, settings)?,
        FigureTag::Fig4Left => delta_curves(Family::Pss, &[0.1, 0.3, 0.5], &eps, Criterion::First, MapFamily::Identity, settings)?,
        FigureTag::Fig4Right => eps_max_table(Family::Pss, ParamRange::stepped(0.05, 1.5, 0.05)?.values(), &one, None, settings)?,
        FigureTag::Fig7Left => displacement_curves(&[0.2, 0.4, 0.6], 0.8, ParamRange::stepped(-1.5, 1.5, 0.01)?.values(), settings)?,
        FigureTag::Fig7Right => delta_curves(Family::Pac, &[0.2, 0.4, 0.6], &eps, Criterion::Second, MapFamily::Displacement, settings)?,
        FigureTag::Fig8Left => squeezing_curves(&[0.1, 0.3, 0.5], 0.7, ParamRange::stepped(-1.5, 0.5, 0.01)?.values(), settings)?,
        FigureTag::Fig8Right => delta_curves(Family::Pss, &[0.1, 0.3, 0.5], &eps, Criterion::Second, MapFamily::Squeezing, settings)?,
        FigureTag::Fig9 => eps_max_table(
            Family::Pss,
            ParamRange::stepped(0.05, 1.5, 0.05)?.values(),
            &[Criterion::First, Criterion::Second],
            None,
            settings,
        )?,
    };
    Ok(SweepResult {
        figure_tag: tag.to_string(),
        settings: *settings,
        rows,
    })
}

pub fn run_custom(sweep: &CustomSweep, settings: &SweepSettings) -> Result<SweepResult> {
    let mut values = sweep.values.values().to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.is_empty() {
        return Err(Error::Domain("a custom sweep needs at least one parameter value".into()));
    }
    let rows = match &sweep.eps {
        Some(eps) => {
            let mut eps = eps.values().to_vec();
            eps.sort_by(f64::total_cmp);
            eps.dedup();
            let maps = match (sweep.criterion, sweep.maps) {
                (Criterion::First, _) => MapFamily::Identity,
                (Criterion::Second, Some(m)) => m,
                (Criterion::Second, None) => MapFamily::default_for(&sweep.family.state(values[0])?),
            };
            delta_curves(sweep.family, &values, &eps, sweep.criterion, maps, settings)?
        }
        None => eps_max_table(sweep.family, &values, &[sweep.criterion], sweep.maps, settings)?,
    };
    Ok(SweepResult {
        figure_tag: "custom".into(),
        settings: *settings,
        rows,
    })
}

/// Best displacement for a lossy PAC state, searched on the real axis.
pub fn pac_optimal_displacement(alpha: f64, eps: f64, settings: &SweepSettings) -> Result<(C64, WitnessReport)> {
    let rho = settings.family(Family::Pac.state(alpha)?)?.lossy_state(eps)?;
    let reach = alpha * (1.0 - eps).sqrt() + 3.0 + alpha;
    let opt = optimize_displacement(&rho, DisplacementSearch::RealAxis { lo: -reach, hi: reach })?;
    Ok((opt.beta, opt.report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        let r: ParamRange = "0.1:0.5:0.1".parse().unwrap();
        assert_eq!(r.values(), &[0.1, 0.2, 0.3, 0.4, 0.5]);
        let r: ParamRange = "0.05:1.5:0.05".parse().unwrap();
        assert_eq!(r.values().len(), 30);
        assert_eq!(r.values()[29], 1.5);
        let r: ParamRange = "1,2.5".parse().unwrap();
        assert_eq!(r.values(), &[1.0, 2.5]);
        assert!("1:0:0.1".parse::<ParamRange>().is_err());
        assert!("a:b".parse::<ParamRange>().is_err());
    }

    #[test]
    fn eps_grid_ends_exactly() {
        let g = eps_grid(0.005);
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[200], 1.0);
        assert_eq!(g[3], 0.015);
    }

    #[test]
    fn tags_round_trip() {
        for t in FigureTag::ALL {
            assert_eq!(t.as_str().parse::<FigureTag>().unwrap(), t);
        }
        assert!("fig5".parse::<FigureTag>().is_err());
    }

    #[test]
    fn fig2_left_shape() {
        let res = run_figure(FigureTag::Fig2Left, &SweepSettings::default()).unwrap();
        assert_eq!(res.rows.len(), 3 * 201);
        let csv = res.to_csv(&["cmd".into()]);
        let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
        assert_eq!(lines.next(), Some(CSV_COLUMNS));
        assert_eq!(lines.next().unwrap(), format!("m=1,0,{},1,{},{},quantum-non-Gaussian", -std::f64::consts::FRAC_2_PI, 2.0 / std::f64::consts::PI * (-4.0f64).exp(), -std::f64::consts::FRAC_2_PI - 2.0 / std::f64::consts::PI * (-4.0f64).exp()));
    }

    #[test]
    fn none_rows_are_marked() {
        let row = SweepRow {
            params: vec![("r".into(), 0.1)],
            eps: None,
            report: None,
        };
        assert_eq!(row.csv_line(), "r=0.1,none,,,,,");
    }

    #[test]
    fn custom_table_is_sorted_and_deduplicated() {
        let sweep = CustomSweep {
            family: Family::Pss,
            values: vec![0.3, 0.1, 0.3].into(),
            criterion: Criterion::Second,
            maps: None,
            eps: None,
        };
        let settings = SweepSettings {
            search: EpsSearch {
                grid_step: 0.01,
                tol: 1e-4,
            },
            ..SweepSettings::default()
        };
        let res = run_custom(&sweep, &settings).unwrap();
        let rs: Vec<f64> = res.rows.iter().map(|r| r.params[0].1).collect();
        assert_eq!(rs, vec![0.1, 0.3]);
    }
}
