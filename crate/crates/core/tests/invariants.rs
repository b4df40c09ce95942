use proptest::prelude::*;
use wigwitness::fock::{fock_state, mean_photon, parity_expectation};
use wigwitness::gaussian::{mixture_mean_photon, mixture_to_fock, mixture_wigner_origin, sample_hull_state};
use wigwitness::witness::{delta1_lossy_fock, delta_displaced, optimize_displacement, DisplacementSearch};
use wigwitness::{
    apply_loss, bound_min, compose_loss, delta1, delta2, Complex64, FockOperator, GaussianMap, LossParam, PacParams, PssParams, StateSpec,
    Tolerances,
};

fn state(spec: StateSpec) -> FockOperator {
    spec.to_fock(spec.default_dim(), &Tolerances::default()).unwrap()
}

fn specs() -> impl Strategy<Value = StateSpec> {
    prop_oneof![
        (0usize..6).prop_map(|m| StateSpec::Fock { m }),
        (0.05f64..1.5).prop_map(|a| StateSpec::Pac(PacParams::new(a).unwrap())),
        (0.05f64..0.8).prop_map(|r| StateSpec::Pss(PssParams::new(r).unwrap())),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn loss_composes(spec in specs(), e1 in 0.0f64..1.0, e2 in 0.0f64..1.0) {
        let rho = state(spec);
        let (l1, l2) = (LossParam::new(e1).unwrap(), LossParam::new(e2).unwrap());
        let twice = apply_loss(&apply_loss(&rho, l1), l2);
        let once = apply_loss(&rho, compose_loss(l1, l2));
        prop_assert!((twice.matrix() - once.matrix()).camax() < 1e-12);
    }

    #[test]
    fn loss_scales_photons_and_keeps_trace(spec in specs(), eps in 0.0f64..1.0) {
        let rho = state(spec);
        let out = apply_loss(&rho, LossParam::new(eps).unwrap());
        let n0 = mean_photon(&rho).unwrap();
        prop_assert!((mean_photon(&out).unwrap() - (1.0 - eps) * n0).abs() < 1e-10 * (1.0 + n0));
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(out.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn hull_states_never_violate(seed in any::<u64>(), k in 1usize..4, energy in 0.0f64..4.0) {
        let mix = sample_hull_state(seed, energy, k).unwrap();
        let n = mixture_mean_photon(&mix);
        prop_assert!(mixture_wigner_origin(&mix) - bound_min(n).unwrap() >= -1e-9);
    }

    #[test]
    fn hull_moments_match_fock(seed in any::<u64>(), k in 1usize..4) {
        let mix = sample_hull_state(seed, 1.5, k).unwrap();
        let rho = mixture_to_fock(&mix, 160, &Tolerances::default()).unwrap();
        let r = delta1(&rho).unwrap();
        prop_assert!((r.wigner_at_origin - mixture_wigner_origin(&mix)).abs() < 1e-9);
        prop_assert!((r.mean_photon - mixture_mean_photon(&mix)).abs() < 1e-9);
    }

    #[test]
    fn displaced_witness_matches_map(alpha in 0.1f64..1.0, eps in 0.0f64..0.9, re in -0.8f64..0.8, im in -0.8f64..0.8) {
        let spec = StateSpec::Pac(PacParams::new(alpha).unwrap());
        let rho = apply_loss(&state(spec), LossParam::new(eps).unwrap());
        let beta = Complex64::new(re, im);
        let direct = delta_displaced(&rho, beta).unwrap();
        let padded = rho.resized(rho.dim() + 30);
        let mapped = delta2(&padded, &GaussianMap::displacement(beta), &Tolerances::default()).unwrap();
        prop_assert!((direct.delta - mapped.delta).abs() < 1e-9);
    }

    #[test]
    fn optimized_displacement_never_hurts(alpha in 0.1f64..1.5, eps in 0.0f64..0.95) {
        let spec = StateSpec::Pac(PacParams::new(alpha).unwrap());
        let rho = apply_loss(&state(spec), LossParam::new(eps).unwrap());
        let best = optimize_displacement(&rho, DisplacementSearch::default_for(&rho)).unwrap();
        prop_assert!(best.report.delta <= delta1(&rho).unwrap().delta + 1e-15);
    }
}

#[test]
fn lossy_fock_closed_form_on_a_lattice() {
    for m in 0..=10 {
        let rho = FockOperator::pure(&fock_state(m, m + 1).unwrap());
        for k in 0..=40 {
            let eps = k as f64 / 40.0;
            let lossy = apply_loss(&rho, LossParam::new(eps).unwrap());
            let numeric = delta1(&lossy).unwrap().delta;
            let closed = delta1_lossy_fock(m, eps).unwrap();
            assert!((numeric - closed).abs() < 1e-9, "m={m} eps={eps}: {numeric} vs {closed}");
        }
    }
}

#[test]
fn parity_of_lossy_fock() {
    for m in 1..=6 {
        let rho = FockOperator::pure(&fock_state(m, m + 1).unwrap());
        let eps = 0.3;
        let lossy = apply_loss(&rho, LossParam::new(eps).unwrap());
        assert!((parity_expectation(&lossy) - (2.0 * eps - 1.0f64).powi(m as i32)).abs() < 1e-13);
    }
}

#[test]
fn vacuum_sits_on_the_bound() {
    let r = delta1(&FockOperator::vacuum(4)).unwrap();
    assert_eq!(r.delta, 0.0);
    assert_eq!(r.verdict, wigwitness::Verdict::Inconclusive);
}

#[test]
fn state_json_layout() {
    let rho = apply_loss(&state(StateSpec::Fock { m: 1 }), LossParam::new(0.5).unwrap()).resized(2);
    let text = serde_json::to_string(&rho).unwrap();
    assert_eq!(text, r#"{"dim":2,"mat":[[0.5,0.0],[0.0,0.0],[0.0,0.0],[0.5,0.0]]}"#);
    let back: FockOperator = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rho);
    assert!(serde_json::from_str::<FockOperator>(r#"{"dim":2,"mat":[[1.0,0.0]]}"#).is_err());
}

#[test]
fn gaussian_states_have_no_eps_max() {
    use wigwitness::{eps_max, Criterion, EpsSearch, LossyFamily, MapFamily};
    let vac = LossyFamily::with_default_dim(StateSpec::Fock { m: 0 }).unwrap();
    for (c, m) in [(Criterion::First, MapFamily::Identity), (Criterion::Second, MapFamily::Squeezing)] {
        assert_eq!(eps_max(&vac, c, m, EpsSearch::default()).unwrap().eps_max, None);
    }
}
