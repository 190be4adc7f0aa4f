//! SMT-LIB2 scripts for external solvers.

use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::syntax::{Aexpr, Bexpr, CmpOp};

/// Symbols that are reserved words or QF_LIA function and sort names in
/// SMT-LIB2 and so must be written in `|quoted|` form.
const SMT_RESERVED: &[&str] = &[
    "_",
    "as",
    "let",
    "exists",
    "forall",
    "match",
    "par",
    "Int",
    "Bool",
    "div",
    "mod",
    "abs",
    "ite",
    "distinct",
    "assert",
    "check-sat",
    "declare-const",
    "declare-fun",
    "define-fun",
    "get-model",
    "set-logic",
    "push",
    "pop",
    "exit",
    "NUMERAL",
    "DECIMAL",
    "STRING",
    "BINARY",
    "HEXADECIMAL",
];

/// A self-contained QF_LIA script asserting `phi`.
pub fn emit_smtlib(phi: &Bexpr) -> String {
    let mut out = String::from("(set-logic QF_LIA)\n");
    for v in phi.vars() {
        let _ = writeln!(out, "(declare-const {} Int)", symbol(&v));
    }
    let _ = writeln!(out, "(assert {})", bexpr(phi));
    out.push_str("(check-sat)\n(get-model)\n");
    out
}

fn symbol(name: &str) -> String {
    if SMT_RESERVED.contains(&name) {
        format!("|{name}|")
    } else {
        name.to_owned()
    }
}

fn numeral(n: &BigInt) -> String {
    if n.is_negative() {
        format!("(- {})", n.abs())
    } else {
        n.to_string()
    }
}

fn aexpr(e: &Aexpr) -> String {
    match e {
        Aexpr::Int(n) => numeral(n),
        Aexpr::Var(x) => symbol(x),
        Aexpr::Add(l, r) => format!("(+ {} {})", aexpr(l), aexpr(r)),
        Aexpr::Sub(l, r) => format!("(- {} {})", aexpr(l), aexpr(r)),
    }
}

fn bexpr(b: &Bexpr) -> String {
    match b {
        Bexpr::True => "true".into(),
        Bexpr::False => "false".into(),
        Bexpr::And(l, r) => format!("(and {} {})", bexpr(l), bexpr(r)),
        Bexpr::Or(l, r) => format!("(or {} {})", bexpr(l), bexpr(r)),
        Bexpr::Not(inner) => format!("(not {})", bexpr(inner)),
        Bexpr::Cmp(op, l, r) => {
            let op = match op {
                CmpOp::Eq => "=",
                CmpOp::Le => "<=",
                CmpOp::Lt => "<",
                CmpOp::Ge => ">=",
                CmpOp::Gt => ">",
            };
            format!("({op} {} {})", aexpr(l), aexpr(r))
        }
    }
}
