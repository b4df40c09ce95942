use std::error::Error;
use std::fs;
use std::path::Path;

use serde::Serialize;
use wigwitness::oracle::{check_campaign_route, cross_validate_closed_forms, run_hull_campaign, ClosedFormGrid, OracleReport};
use wigwitness::sweep::{run_custom, run_figure, CustomSweep, Family, FigureTag, ParamRange, SweepSettings};
use wigwitness::witness::{optimize_displacement, optimize_squeezing, DisplacementSearch};
use wigwitness::{apply_loss, delta2, Criterion, EpsSearch, FockOperator, GaussianMap, LossParam, MapFamily, StateSpec, Tolerances, Verdict, WitnessReport};

use crate::{emit, Campaign, OracleArgs, SweepArgs, TolArgs, WitnessArgs};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

impl TolArgs {
    fn tolerances(&self) -> Result<Tolerances> {
        let tol = Tolerances {
            norm_tol: self.tol_norm,
            herm_tol: self.tol_herm,
            trace_tol: self.tol_trace,
            psd_tol: self.tol_psd,
            truncation_tol: self.tol_truncation,
        };
        tol.validate()?;
        Ok(tol)
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn load_state(spec: &str, tol: &TolArgs) -> Result<FockOperator> {
    let tolerances = tol.tolerances()?;
    if let Some(path) = spec.strip_prefix("json:") {
        let rho: FockOperator = serde_json::from_str(&fs::read_to_string(path)?)?;
        rho.check_state(&tolerances)?;
        return Ok(match tol.dim {
            Some(d) => rho.resized(d),
            None => rho,
        });
    }
    let state: StateSpec = spec.parse()?;
    Ok(state.to_fock(tol.dim.unwrap_or_else(|| state.default_dim()), &tolerances)?)
}

enum MapChoice {
    Fixed(GaussianMap),
    BestDisplacement,
    BestSqueezing,
}

fn parse_map(stages: &[String]) -> Result<MapChoice> {
    match stages {
        [] => Ok(MapChoice::Fixed(GaussianMap::Identity)),
        [one] if one == "disp:auto" => Ok(MapChoice::BestDisplacement),
        [one] if one == "sq:auto" => Ok(MapChoice::BestSqueezing),
        many => {
            if many.iter().any(|s| s.ends_with(":auto")) {
                return Err("an `auto` map must be the only map stage".into());
            }
            let maps = many.iter().map(|s| s.parse()).collect::<std::result::Result<Vec<GaussianMap>, _>>()?;
            Ok(MapChoice::Fixed(if maps.len() == 1 {
                maps.into_iter().next().expect("one map")
            } else {
                GaussianMap::then(maps)?
            }))
        }
    }
}

pub fn witness(args: &WitnessArgs) -> Result<u8> {
    let tol = args.tol.tolerances()?;
    let mut rho = load_state(&args.state, &args.tol)?;
    let prep = args.stages.iter().take_while(|s| s.starts_with("loss:")).count();
    for stage in &args.stages[..prep] {
        let eps: f64 = stage["loss:".len()..].trim().parse()?;
        rho = apply_loss(&rho, LossParam::new(eps)?);
    }
    let report: WitnessReport = match parse_map(&args.stages[prep..])? {
        MapChoice::Fixed(g) => delta2(&rho, &g, &tol)?,
        MapChoice::BestDisplacement => optimize_displacement(&rho, DisplacementSearch::default_for(&rho))?.report,
        MapChoice::BestSqueezing => optimize_squeezing(&rho)?.1,
    };
    emit(args.out.as_deref(), &to_json(&report)?)?;
    Ok(match report.verdict {
        Verdict::QuantumNonGaussian => 0,
        Verdict::Inconclusive => 1,
    })
}

fn command_line() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("wigwitness {}", args.join(" "))
}

pub fn sweep(args: &SweepArgs) -> Result<u8> {
    let settings = SweepSettings {
        eps_step: args.eps_step,
        search: EpsSearch {
            grid_step: args.eps_grid,
            tol: args.eps_tol,
        },
        tol: args.tol.tolerances()?,
        dim: args.tol.dim,
    };
    if !(settings.eps_step > 0.0 && settings.eps_step <= 1.0) {
        return Err(format!("--eps-step must lie in (0, 1], got {}", settings.eps_step).into());
    }
    let result = if args.target == "custom" {
        let family: Family = args.family.as_deref().ok_or("custom sweeps need --family")?.parse()?;
        let values: ParamRange = args.values.as_deref().ok_or("custom sweeps need --values (or --r/--alpha/--m)")?.parse()?;
        let maps = match args.maps.as_deref() {
            None => None,
            Some("identity") => Some(MapFamily::Identity),
            Some("displacement") => Some(MapFamily::Displacement),
            Some("squeezing") => Some(MapFamily::Squeezing),
            Some(other) => return Err(format!("unknown map family `{other}`").into()),
        };
        let eps = args.eps.as_deref().map(str::parse::<ParamRange>).transpose()?;
        let custom = CustomSweep {
            family,
            values,
            criterion: Criterion::from_number(args.criterion)?,
            maps,
            eps,
        };
        run_custom(&custom, &settings)?
    } else {
        let tag: FigureTag = args.target.parse()?;
        run_figure(tag, &settings)?
    };
    emit(args.out.as_deref(), &result.to_csv(&[command_line()]))?;
    Ok(0)
}

pub fn oracle(args: &OracleArgs) -> Result<u8> {
    let report: OracleReport = match args.campaign {
        Campaign::Hull {
            samples,
            max_energy,
            maps,
            seed,
            fock_check,
        } => {
            let mut report = run_hull_campaign(samples, max_energy, maps, seed)?;
            if fock_check > 0 {
                report.merge(check_campaign_route(fock_check.min(samples), max_energy, maps, seed)?);
            }
            report
        }
        Campaign::ClosedForms { points, tol } => cross_validate_closed_forms(ClosedFormGrid {
            points,
            tol,
            ..ClosedFormGrid::default()
        })?,
    };
    emit(args.out.as_deref(), &to_json(&report)?)?;
    Ok(if report.passed() { 0 } else { 1 })
}

pub fn dump(state: &str, loss: Option<f64>, tol: &TolArgs, out: Option<&Path>) -> Result<u8> {
    let mut rho = load_state(state, tol)?;
    if let Some(eps) = loss {
        rho = apply_loss(&rho, LossParam::new(eps)?);
    }
    let mut text = serde_json::to_string(&rho)?;
    text.push('\n');
    emit(out, &text)?;
    Ok(0)
}
