use super::*;
use crate::disorder::SeedSpec;
use crate::gibbs::Engine;

fn ea(dims: &[usize]) -> ModelParams {
    ModelParams::Ea { graph: GraphSpec::lattice(dims), beta: 0.0, h: 0.0, chaos: Default::default() }
}

fn rfim(dims: &[usize], beta: f64, sign: f64) -> ModelParams {
    ModelParams::Rfim { graph: GraphSpec::lattice(dims), beta, sign }
}

fn run(theorem: TheoremId, model: &ModelParams, point: &PointParams, n: usize, seed: u64) -> crate::Result<BoundReport> {
    run_theorem(theorem, model, point, &Engine::Exact, n, SeedSpec::new(seed, 0))
}

#[test]
fn theorem_ids_round_trip() {
    for t in TheoremId::ALL {
        assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, format!("\"{}\"", t.as_str()));
    }
    assert!("thm9".parse::<TheoremId>().is_err());
    assert_eq!("hypothesis_failed".parse::<Verdict>().unwrap(), Verdict::HypothesisFailed);
}

#[test]
fn verdict_rule() {
    assert_eq!(Verdict::judge(1.0, 0.0, 1.0), Verdict::Pass);
    assert_eq!(Verdict::judge(1.3, 0.1, 1.0), Verdict::Pass);
    assert_eq!(Verdict::judge(1.31, 0.1, 1.0), Verdict::Fail);
}

#[test]
fn bond_overlap_bound_passes_on_small_lattice() {
    let r = run(TheoremId::Thm2_1, &ea(&[2, 2]), &PointParams::pair(1.0, 1.0, 0.5), 200, 1).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.e_size, Some(4));
    assert!((r.rhs - 8.0 / (4.0f64 * 0.5).sqrt()).abs() < 1e-12);
    assert_eq!(r.recomputed_verdict(), r.verdict);
    assert!(r.extras.contains_key("chatterjee_ref"));
}

#[test]
fn reports_are_reproducible() {
    let go = || run(TheoremId::Thm2_1TwoTemp, &ea(&[2, 3]), &PointParams::pair(0.5, 2.0, 0.25), 50, 7).unwrap();
    assert_eq!(go(), go());
}

#[test]
fn equal_temperature_case_requires_equal_strengths() {
    assert!(run(TheoremId::Main1, &ea(&[2, 2]), &PointParams::pair(1.0, 2.0, 0.5), 10, 1).is_err());
}

#[test]
fn reference_rows_carry_no_claim() {
    let r = run(TheoremId::EqChatt1Ref, &ea(&[2, 2]), &PointParams::pair(1.0, 1.0, 0.5), 10, 1).unwrap();
    assert_eq!(r.verdict, Verdict::Reference);
    assert!((r.rhs - rhs_chatterjee_ref(1.0, 4, 0.5).unwrap()).abs() < 1e-12);
}

#[test]
fn family_mismatch_and_missing_parameters() {
    assert!(run(TheoremId::MixedPspin, &ea(&[2, 2]), &PointParams::pair(1.0, 1.0, 0.5), 10, 1).is_err());
    match run(TheoremId::Thm2_1, &ea(&[2, 2]), &PointParams::new(1.0), 10, 1) {
        Err(crate::Error::MissingParameter { name: "t", .. }) => {}
        other => panic!("{other:?}"),
    }
    match run(TheoremId::Thm5_3Ineq1, &rfim(&[2, 2], 0.5, 1.0), &PointParams::new(1.0), 10, 1) {
        Err(crate::Error::MissingParameter { name: "k", .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn fkg_overlap_passes_and_negative_control_flags() {
    let r = run(TheoremId::FkgOverlap, &rfim(&[2, 3], 0.6, 1.0), &PointParams::new(1.0), 100, 2).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert!(r.extras["worst_fkg_gap"] >= -1e-10);
    assert!((r.rhs - 2.0 / 6f64.sqrt()).abs() < 1e-12);

    let anti = ModelParams::Rfim { graph: GraphSpec::edges(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]), beta: 1.0, sign: -1.0 };
    let r = run(TheoremId::FkgOverlap, &anti, &PointParams::new(1.0), 20, 2).unwrap();
    assert_eq!(r.verdict, Verdict::HypothesisFailed);
    assert_eq!(r.recomputed_verdict(), Verdict::HypothesisFailed);
}

#[test]
fn ck_bound_with_small_gamma_is_dominated_by_the_gamma_free_term() {
    let point = PointParams::new(0.1).with_k(1).with_weights(WeightSpec::Ones);
    let r = run(TheoremId::Thm5_3Ineq2, &rfim(&[2, 2], 0.5, 1.0), &point, 200, 3).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.extras["c_k"], 1.0);
    // C_1 √2! γ^0 ‖a‖₁‖a‖₂ + 1!‖a‖₂² with a = ones(4)
    assert!((r.rhs - (2f64.sqrt() * 4.0 * 2.0 + 4.0)).abs() < 1e-12);
}

#[test]
fn normalized_field_forces_uniform_weights() {
    let point = PointParams::new(1.0).with_weights(WeightSpec::Ones);
    let a = run(TheoremId::Eqlast, &rfim(&[2, 2], 0.5, 1.0), &point, 50, 4).unwrap();
    let b = run(TheoremId::Thm5_1, &rfim(&[2, 2], 0.5, 1.0), &PointParams::new(1.0), 50, 4).unwrap();
    assert_eq!(a.lhs, b.lhs);
    assert!((a.rhs - b.rhs).abs() < 1e-12);
}

#[test]
fn diluted_tail_values() {
    let d = diluted_tail(100.0, 100_000, SeedSpec::new(5, 0)).unwrap();
    assert!((d.mc_value - 0.1003).abs() < 5e-4, "{}", d.mc_value);
    assert!(d.mc_value <= d.cap + 3.0 * d.stderr);
    assert!(diluted_tail(2f64.sqrt() - 0.1, 10, SeedSpec::new(5, 0)).is_err());
    let exact = poisson_inverse_sqrt_mean(100.0).unwrap();
    assert!((d.mc_value - exact).abs() <= 4.0 * d.stderr);
}

#[test]
fn diluted_bound_runs() {
    let model = ModelParams::Diluted { n: 6, lambda: 1.0, p: 2 };
    let r = run(TheoremId::Diluted, &model, &PointParams::pair(1.0, 1.0, 0.5), 100, 6).unwrap();
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.e_size, None);
    assert!(run(TheoremId::Thm2_1, &model, &PointParams::pair(1.0, 1.0, 0.5), 10, 6).is_err());
}

#[test]
fn model_params_deserialize() {
    let m: ModelParams = serde_json::from_str(r#"{"family":"mixed_pspin","n":4,"p":2,"betas":{"1":0.5,"3":0.8}}"#).unwrap();
    assert_eq!(m.mixture().unwrap().len(), 2);
    assert!(serde_json::from_str::<ModelParams>(r#"{"family":"rfim","graph":{"dims":[2]},"beta":1,"bogus":1}"#).is_err());
    let bad: ModelParams = serde_json::from_str(r#"{"family":"mixed_pspin","n":4,"p":2,"betas":{"x":0.5}}"#).unwrap();
    assert!(bad.mixture().is_err());
    let g = GraphSpec { dims: Some(vec![2]), complete: Some(3), ..Default::default() };
    assert!(g.build().is_err());
}
