mod common;

use proptest::prelude::*;
use wise::concrete::is_stuck_concrete;
use wise::concrete::ConcState;
use wise::symbolic::{concretize, expand, is_stuck_sym};
use wise::syntax::Stmt;

use common::{
    aexpr, bexpr, box_envs, check_comp_update, check_step_simulation, check_substitution, check_sym_step_step,
    check_sym_steps_path, env, ident, oracle_concretize, small, stmt, store, sym_state, LITS,
};

proptest! {
    #![proptest_config(common::config(1000))]

    #[test]
    fn comp_update(v in env(LITS), s in store(4, LITS), x in ident(), e in aexpr(4, LITS)) {
        check_comp_update(&v, &s, &x, &e)?;
    }

    #[test]
    fn substitution_commutes_with_concretization(
        v in env(LITS), s in store(4, LITS), e in aexpr(4, LITS), b in bexpr(4, LITS)
    ) {
        check_substitution(&v, &s, &e, &b)?;
    }

    #[test]
    fn concretize_matches_oracle(v in env(LITS), s in store(4, LITS)) {
        let got = concretize(&v, &s);
        for (name, value) in oracle_concretize(&v, &s) {
            prop_assert_eq!(small(got.get(&name)), value, "variable {}", name);
        }
    }

    #[test]
    fn branch_count(s in sym_state(4, LITS)) {
        let n = expand(&s).len();
        match common::leftmost(&s.pc) {
            Stmt::Skip if s.pc == Stmt::Skip => prop_assert_eq!(n, 0),
            Stmt::Fail => prop_assert_eq!(n, 0),
            Stmt::If(..) | Stmt::While(..) => prop_assert_eq!(n, 2),
            _ => prop_assert_eq!(n, 1),
        }
    }

    #[test]
    fn stuckness_agrees(s in sym_state(4, LITS), v in env(LITS)) {
        prop_assert_eq!(is_stuck_sym(&s), is_stuck_concrete(&ConcState::new(v, s.pc.clone())));
    }
}

proptest! {
    #![proptest_config(common::config(300))]

    #[test]
    fn sym_steps_path(p in stmt(4, LITS), choices in prop::collection::vec(0usize..2, 1..=6)) {
        check_sym_steps_path(&p, &choices, &box_envs(-6, 6))?;
    }

    #[test]
    fn sym_step_step(s in sym_state(4, LITS)) {
        check_sym_step_step(&s, &box_envs(-3, 3))?;
    }

    #[test]
    fn step_simulation_diagram(s in sym_state(4, LITS)) {
        check_step_simulation(&s, &box_envs(-3, 3))?;
    }
}
