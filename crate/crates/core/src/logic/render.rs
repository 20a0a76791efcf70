//! Minimal-parenthesis printer. Sugar is recovered from the primitive
//! shapes the parser produces, so `parse_formula(render_formula(f)) == f`.

use super::formula::Formula;

enum View<'a> {
    True,
    Not(&'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Iff(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Knows(&'a str, &'a Formula),
    Believes(&'a str, &'a Formula),
    Leaf,
}

fn negated(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Implies(l, r) if **r == Formula::Falsum => Some(l),
        _ => None,
    }
}

fn view(f: &Formula) -> View<'_> {
    match f {
        Formula::Atom(_) | Formula::Falsum => View::Leaf,
        Formula::Knows(a, b) => View::Knows(a.as_str(), b),
        Formula::Believes(a, b) => View::Believes(a.as_str(), b),
        Formula::Implies(l, r) => {
            if **r == Formula::Falsum {
                if **l == Formula::Falsum {
                    return View::True;
                }
                if let Formula::Implies(x, ny) = &**l {
                    if let Some(y) = negated(ny) {
                        if let (Formula::Implies(u, v), Formula::Implies(v2, u2)) = (&**x, y) {
                            if u == u2 && v == v2 {
                                return View::Iff(u, v);
                            }
                        }
                        return View::And(x, y);
                    }
                }
                return View::Not(l);
            }
            match negated(l) {
                Some(x) if *x != Formula::Falsum => View::Or(x, r),
                _ => View::Implies(l, r),
            }
        }
    }
}

fn write(f: &Formula, min_level: u8, out: &mut String) {
    let v = view(f);
    let level = match v {
        View::Iff(..) => 0,
        View::Implies(..) => 1,
        View::Or(..) => 2,
        View::And(..) => 3,
        View::Not(_) | View::Knows(..) | View::Believes(..) => 4,
        View::True | View::Leaf => 5,
    };
    let paren = level < min_level;
    if paren {
        out.push('(');
    }
    match v {
        View::Leaf => match f {
            Formula::Atom(p) => out.push_str(p.as_str()),
            _ => out.push_str("false"),
        },
        View::True => out.push_str("true"),
        View::Not(b) => {
            out.push('~');
            write(b, 4, out);
        }
        View::Knows(a, b) | View::Believes(a, b) => {
            out.push(if matches!(f, Formula::Knows(..)) { 'K' } else { 'B' });
            out.push('[');
            out.push_str(a);
            out.push_str("] ");
            write(b, 4, out);
        }
        View::And(l, r) => binary(l, " & ", r, (3, 4), out),
        View::Or(l, r) => binary(l, " | ", r, (2, 3), out),
        View::Implies(l, r) => binary(l, " -> ", r, (2, 1), out),
        View::Iff(l, r) => binary(l, " <-> ", r, (0, 1), out),
    }
    if paren {
        out.push(')');
    }
}

fn binary(l: &Formula, op: &str, r: &Formula, levels: (u8, u8), out: &mut String) {
    write(l, levels.0, out);
    out.push_str(op);
    write(r, levels.1, out);
}

/// Renders `f` with derived connectives restored and redundant parentheses
/// dropped.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write(f, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    #[test]
    fn examples() {
        let p = Formula::atom("p");
        assert_eq!(render_formula(&Formula::implies(p.clone(), Formula::Falsum)), "~p");
        assert_eq!(
            render_formula(&Formula::knows("a", Formula::believes("b", p.clone()))),
            "K[a] B[b] p"
        );
        assert_eq!(render_formula(&Formula::Falsum), "false");
        assert_eq!(render_formula(&Formula::verum()), "true");
    }

    #[test]
    fn sugar_round_trips() {
        for text in [
            "p & q",
            "p | q",
            "p <-> q",
            "~(p -> q)",
            "(p -> q) -> r",
            "p -> q -> r",
            "K[a] (p & q)",
            "~~p",
            "~p | q & r",
            "p <-> q <-> r",
            "p <-> (q <-> r)",
            "true -> p",
            "B[a] (B[b] p -> p)",
            "(p | q) & r",
            "p & false",
            "~K[a] ~p",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(render_formula(&f), text, "render of {text}");
        }
    }

    #[test]
    fn redundant_parens_dropped() {
        let f = parse_formula("((p) -> (q -> (r)))").unwrap();
        assert_eq!(render_formula(&f), "p -> q -> r");
    }
}
