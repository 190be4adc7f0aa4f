mod common;

use proptest::prelude::*;
use wise::concrete::eval_bexpr;
use wise::solver::{emit_smtlib, is_sat, normalize, solve_clause, SatResult, DEFAULT_BUDGET};
use wise::syntax::parse_bexpr;

use common::{bexpr, box_envs, brute_force_model, check_solver_agreement, linear_formula};

proptest! {
    #![proptest_config(common::config(300))]

    #[test]
    fn normal_form_is_equivalent(phi in bexpr(5, -8..=8)) {
        let Ok(clauses) = normalize(&phi) else { return Ok(()) };
        for v in box_envs(-4, 4) {
            let dnf = clauses.iter().any(|c| c.iter().all(|lit| lit.holds(&v)));
            prop_assert_eq!(dnf, eval_bexpr(&phi, &v), "at {}", v);
        }
    }

    #[test]
    fn agreement_with_exhaustive_search(phi in linear_formula(4)) {
        let verdict = check_solver_agreement(&phi)?;
        prop_assert!(!matches!(verdict, SatResult::Unknown(_)), "unknown for {}", phi);
    }

    #[test]
    fn dense_conjunctions(atoms in prop::collection::vec(common::linear_atom(), 3..8)) {
        let phi = atoms.into_iter().reduce(wise::syntax::Bexpr::and).unwrap();
        let verdict = check_solver_agreement(&phi)?;
        prop_assert!(!matches!(verdict, SatResult::Unknown(_)), "unknown for {}", phi);
    }

    #[test]
    fn clauses_agree_with_exhaustive_search(phi in linear_formula(3)) {
        let Ok(clauses) = normalize(&phi) else { return Ok(()) };
        for clause in clauses {
            let verdict = solve_clause(&clause, DEFAULT_BUDGET);
            let conj = clause.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" and ");
            match verdict {
                SatResult::Sat(model) => prop_assert!(clause.iter().all(|c| c.holds(&model))),
                SatResult::Unsat => {
                    for v in box_envs(-10, 10) {
                        prop_assert!(!clause.iter().all(|c| c.holds(&v)), "false Unsat for {} at {}", conj, v);
                    }
                }
                SatResult::Unknown(_) => prop_assert!(false, "unknown for {}", conj),
            }
        }
    }

    #[test]
    fn scripts_declare_each_variable_once(phi in linear_formula(3)) {
        let script = emit_smtlib(&phi);
        prop_assert_eq!(script.matches("(assert ").count(), 1);
        for v in phi.vars() {
            let decl = format!("(declare-const {v} Int)");
            prop_assert_eq!(script.matches(decl.as_str()).count(), 1);
        }
        prop_assert!(script.starts_with("(set-logic QF_LIA)\n"));
        prop_assert!(script.ends_with("(check-sat)\n(get-model)\n"));
    }
}

#[test]
fn sum_example_matches_brute_force() {
    let phi = parse_bexpr("x + y == 3 and (x > 1 and y > 1)").unwrap();
    assert_eq!(brute_force_model(&phi, -10, 10), None);
    assert_eq!(is_sat(&phi, DEFAULT_BUDGET), SatResult::Unsat);
}

#[test]
fn parity_example_matches_brute_force() {
    let phi = parse_bexpr("x + x == 7").unwrap();
    assert_eq!(brute_force_model(&phi, -10, 10), None);
    assert_eq!(is_sat(&phi, DEFAULT_BUDGET), SatResult::Unsat);
}

#[test]
fn integer_gaps_need_exact_elimination() {
    // Real solutions exist (e.g. x = 1.5), integer ones do not.
    let phi = parse_bexpr("3 <= x + x and x + x <= 3").unwrap();
    assert_eq!(is_sat(&phi, DEFAULT_BUDGET), SatResult::Unsat);
    let phi = parse_bexpr("1 <= x + x + x - y - y and x + x + x - y - y <= 1 and 0 <= y and y <= 0").unwrap();
    assert_eq!(is_sat(&phi, DEFAULT_BUDGET), SatResult::Unsat);
    let phi = parse_bexpr("2 <= x + x + x - y - y and x + x + x - y - y <= 2 and 5 <= y and y <= 5").unwrap();
    assert_eq!(is_sat(&phi, DEFAULT_BUDGET), SatResult::Sat(wise::concrete::Env::new().with("x", 4).with("y", 5)));
}

#[test]
fn conditional_path_script() {
    let phi = parse_bexpr("true and x < 0").unwrap();
    let script = emit_smtlib(&phi);
    assert_eq!(
        script,
        "(set-logic QF_LIA)\n(declare-const x Int)\n(assert (and true (< x 0)))\n(check-sat)\n(get-model)\n"
    );
}
