mod common;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use famverify::checker::{check_simple, run_plan, CheckSettings, Verdict};
use famverify::diagram::{Angle, Diagram, EquationFamily, Language, Mode, PhaseValue};
use famverify::interp::{interpret_simple, InterpretOptions};
use famverify::phasepoly::Coeff;
use famverify::planner::{build_plan, PlanSettings};

fn instantiate_all(d: &Diagram, values: &BTreeMap<String, PhaseValue>) -> Diagram {
    let mut d = d.clone();
    for (k, v) in values {
        d = d.instantiate_phase(k, v).unwrap();
    }
    d
}

fn random_values<R: Rng>(rng: &mut R, lang: Language, vars: &[&str]) -> (BTreeMap<String, PhaseValue>, BTreeMap<String, f64>) {
    let mut pv = BTreeMap::new();
    let mut raw = BTreeMap::new();
    for v in vars {
        let x = match lang {
            Language::Zx => rng.gen_range(0.0..std::f64::consts::TAU),
            _ => rng.gen_range(-2.0..2.0),
        };
        let val = match lang {
            Language::Zx => PhaseValue::Angle(Angle::radians(x)),
            _ => PhaseValue::Complex(Coeff::from_c64(Complex64::new(x, 0.0))),
        };
        pv.insert(v.to_string(), val);
        raw.insert(v.to_string(), x);
    }
    (pv, raw)
}

#[test]
fn engine_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let vars = ["a", "b"];
    for lang in [Language::Zx, Language::Zh, Language::Zw] {
        for _ in 0..60 {
            let n = rng.gen_range(1..5);
            let ins = rng.gen_range(0..3);
            let outs = rng.gen_range(0..3);
            let d = random_diagram(&mut rng, lang, n, ins, outs, &vars, 2);
            let (pv, raw) = random_values(&mut rng, lang, &vars);
            let simple = instantiate_all(&d, &pv);
            let got = interpret_simple(&simple, &InterpretOptions::default()).unwrap();
            let got = coeff_rows(got.rows, got.cols, |r, c| got.get(r, c).clone());
            let want = brute_force(&d, &env_of(lang, &raw));
            let scale = want.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
            assert!(max_diff(&got, &want) <= 1e-9 * scale, "{lang} mismatch on {d:?}");
        }
    }
}

#[test]
fn unfusing_a_spider_keeps_the_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let d = random_diagram(&mut rng, Language::Zx, 3, 1, 1, &["a"], 2);
        let split = unfuse_first_spider(&d);
        let fam = EquationFamily::new(d, split);
        assert!(famverify::checker::symbolic_check(&fam, &InterpretOptions::default()).unwrap());
    }
}

#[test]
fn spider_law_is_verified() {
    let fam = fixture("spider_law.eq");
    let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
    assert_eq!(plan.len(), 100);
    assert_eq!(plan.bounds["d1"], 4);
    assert_eq!(plan.bounds["d2"], 4);
    let report = run_plan(&plan, &CheckSettings::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Verified);
    assert!(report.counterexample.is_none());
}

#[test]
fn spider_law_holds_beyond_the_plan() {
    let fam = fixture("spider_law.eq");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (m, n) in [(5, 0), (0, 6), (5, 5), (7, 2)] {
        let f = fam.instantiate_bangbox("d1", m).unwrap().instantiate_bangbox("d2", n).unwrap();
        for _ in 0..3 {
            let (pv, _) = random_values(&mut rng, Language::Zx, &["a1", "a2"]);
            let c = check_simple(&instantiate_all(&f.lhs, &pv), &instantiate_all(&f.rhs, &pv), &CheckSettings::default()).unwrap();
            assert!(c.pass, "fails at ({m},{n}) with deviation {}", c.deviation);
        }
    }
}

#[test]
fn perturbed_spider_law_is_falsified_at_the_first_member() {
    let fam = fixture("spider_law_perturbed.eq");
    let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
    let report = run_plan(&plan, &CheckSettings::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Falsified);
    assert_eq!(report.counterexample, Some(0));
    assert!(report.records[0].deviation > 0.1);
}

#[test]
fn tolerance_is_monotone() {
    let fam = fixture("spider_law_perturbed.eq");
    let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
    let tight = run_plan(&plan, &CheckSettings::default()).unwrap();
    let worst = tight.max_deviation();
    let mut passes = 0;
    for tol in [1e-12, 1e-3, 0.5, worst * 0.99, worst * 1.01, 10.0] {
        let s = CheckSettings { tolerance: tol, ..Default::default() };
        let r = run_plan(&plan, &s).unwrap();
        let now = r.records.iter().filter(|x| x.pass).count();
        if tol > worst {
            assert_eq!(r.verdict, Verdict::Verified);
        }
        if tol >= 0.5 {
            assert!(now >= passes);
            passes = now;
        }
    }
}

#[test]
fn bang_bound_family() {
    let fam = fixture("bang_bound.eq");
    let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
    assert_eq!(plan.bounds["d"], 6);
    assert_eq!(plan.len(), 7);
    let report = run_plan(&plan, &CheckSettings::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Verified);
    for n in 7..=12 {
        let f = fam.instantiate_bangbox("d", n).unwrap();
        let c = check_simple(&f.lhs, &f.rhs, &CheckSettings::default()).unwrap();
        assert!(c.pass, "fails at {n}");
    }
}

#[test]
fn quotient_family_uses_small_grid() {
    let fam = fixture("clifford_t.eq");
    let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
    assert_eq!(plan.grids["a"].len(), 2);
    let report = run_plan(&plan, &CheckSettings::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Verified);
}

#[test]
fn scalar_families() {
    for name in ["no_params.eq", "zh_scalar.eq"] {
        let fam = fixture(name);
        let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
        let report = run_plan(&plan, &CheckSettings::default()).unwrap();
        assert_eq!(report.verdict, Verdict::Verified, "{name}");
    }
    assert_eq!(build_plan(&fixture("zh_scalar.eq"), &PlanSettings::default()).unwrap().grids["a"].len(), 3);
}

#[test]
fn child_mode_renames_box_local_variables() {
    let fam = fixture("child_phase.eq");
    assert_eq!(fam.mode, Mode::Child);
    let f = fam.instantiate_bangbox("d", 2).unwrap();
    assert!(f.phase_vars.iter().any(|v| v == "a@d.0"));
    assert!(f.phase_vars.iter().any(|v| v == "a@d.1"));
    assert!(!f.phase_vars.iter().any(|v| v == "a"));
    let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
    let report = run_plan(&plan, &CheckSettings::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Verified);
}

#[test]
fn nested_child_mode_family() {
    let fam = fixture("child_nested.eq");
    let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
    let report = run_plan(&plan, &CheckSettings::default()).unwrap();
    assert_eq!(report.verdict, Verdict::Verified);
}

#[test]
fn unseparated_family_is_rejected() {
    let fam = fixture("not_separated.eq");
    let err = build_plan(&fam, &PlanSettings::default()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("d1") && msg.contains("d2"), "{msg}");
}

#[test]
fn runs_are_deterministic() {
    let fam = fixture("spider_law_perturbed.eq");
    let plan = build_plan(&fam, &PlanSettings::default()).unwrap();
    assert_eq!(plan, build_plan(&fam, &PlanSettings::default()).unwrap());
    let one = run_plan(&plan, &CheckSettings { jobs: Some(1), ..Default::default() }).unwrap();
    let many = run_plan(&plan, &CheckSettings { jobs: Some(4), ..Default::default() }).unwrap();
    assert_eq!(one.records, many.records);
    assert_eq!(one.counterexample, many.counterexample);
}

#[test]
fn per_equation_grids_also_verify() {
    let fam = fixture("spider_law.eq");
    let s = PlanSettings { grid: famverify::planner::GridMode::PerEquation, ..Default::default() };
    let plan = build_plan(&fam, &s).unwrap();
    assert!(plan.len() <= 100);
    assert_eq!(run_plan(&plan, &CheckSettings::default()).unwrap().verdict, Verdict::Verified);
}

#[test]
fn verified_family_passes_random_outside_points() {
    let fam = fixture("spider_law.eq");
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let m = rng.gen_range(0..5);
        let n = rng.gen_range(0..5);
        let f = fam.instantiate_bangbox("d1", m).unwrap().instantiate_bangbox("d2", n).unwrap();
        let (pv, _) = random_values(&mut rng, Language::Zx, &["a1", "a2"]);
        let c = check_simple(&instantiate_all(&f.lhs, &pv), &instantiate_all(&f.rhs, &pv), &CheckSettings::default()).unwrap();
        assert!(c.deviation <= 1e-9);
    }
}

#[test]
fn x_spider_is_hadamard_conjugated_z_spider() {
    use famverify::diagram::{DiagramBuilder, NodeKind, PhaseExpr};
    for ins in 0..3 {
        for outs in 0..3 {
            let phase = Some(PhaseExpr::linear(Angle::pi_frac(1, 4), [("a", 1)]));
            let mut x = DiagramBuilder::new(Language::Zx);
            x.node("s", NodeKind::ZxX, phase.clone());
            let mut z = DiagramBuilder::new(Language::Zx);
            z.node("s", NodeKind::ZxZ, phase);
            for (k, slot) in (0..ins).map(|k| format!("i{k}")).chain((0..outs).map(|k| format!("o{k}"))).enumerate() {
                let h = format!("h{k}");
                if slot.starts_with('i') {
                    x.input(&slot);
                    z.input(&slot);
                } else {
                    x.output(&slot);
                    z.output(&slot);
                }
                x.edge(&slot, "s");
                z.node(&h, NodeKind::ZxH, None).edge(&slot, &h).edge(&h, "s");
            }
            let fam = EquationFamily::new(x.build().unwrap(), z.build().unwrap());
            assert!(famverify::checker::symbolic_check(&fam, &InterpretOptions::default()).unwrap(), "{ins} in, {outs} out");
        }
    }
}
