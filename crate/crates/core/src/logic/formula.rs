use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Returns true when `s` matches `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

name_type!(
    /// An agent identifier. Models keep their agents in sorted order.
    Agent
);
name_type!(
    /// A propositional atom.
    Atom
);

/// Formulas of the knowledge/belief language.
///
/// Only the five primitive shapes exist; negation, conjunction,
/// disjunction, the biconditional and `true` are built by the constructor
/// helpers below and are therefore invisible to the evaluators.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Falsum,
    Implies(Arc<Formula>, Arc<Formula>),
    Knows(Agent, Arc<Formula>),
    Believes(Agent, Arc<Formula>),
}

impl Formula {
    pub fn atom(id: impl Into<Atom>) -> Formula {
        Formula::Atom(id.into())
    }

    pub fn falsum() -> Formula {
        Formula::Falsum
    }

    /// `false -> false`
    pub fn verum() -> Formula {
        Formula::implies(Formula::Falsum, Formula::Falsum)
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Arc::new(lhs), Arc::new(rhs))
    }

    pub fn knows(agent: impl Into<Agent>, body: Formula) -> Formula {
        Formula::Knows(agent.into(), Arc::new(body))
    }

    pub fn believes(agent: impl Into<Agent>, body: Formula) -> Formula {
        Formula::Believes(agent.into(), Arc::new(body))
    }

    /// `φ -> false`
    #[allow(clippy::should_implement_trait)]
    pub fn not(body: Formula) -> Formula {
        Formula::implies(body, Formula::Falsum)
    }

    /// `~(φ -> ~ψ)`
    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::not(Formula::implies(lhs, Formula::not(rhs)))
    }

    /// `~φ -> ψ`
    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::implies(Formula::not(lhs), rhs)
    }

    /// `(φ -> ψ) & (ψ -> φ)`
    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::and(
            Formula::implies(lhs.clone(), rhs.clone()),
            Formula::implies(rhs, lhs),
        )
    }

    /// Maximum nesting of `K`/`B` along any root-to-leaf path.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Falsum => 0,
            Formula::Implies(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Knows(_, b) | Formula::Believes(_, b) => 1 + b.modal_depth(),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Falsum => 1,
            Formula::Implies(l, r) => 1 + l.size() + r.size(),
            Formula::Knows(_, b) | Formula::Believes(_, b) => 1 + b.size(),
        }
    }

    /// Visits every agent occurring in a modality.
    pub fn agents(&self) -> std::collections::BTreeSet<Agent> {
        let mut out = std::collections::BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Knows(a, _) | Formula::Believes(a, _) = f {
                out.insert(a.clone());
            }
        });
        out
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = std::collections::BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Atom(_) | Formula::Falsum => {}
            Formula::Implies(l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            Formula::Knows(_, b) | Formula::Believes(_, b) => b.walk(visit),
        }
    }

    /// Rewrites every `B_a` into `K_a`.
    pub fn belief_as_knowledge(&self) -> Formula {
        match self {
            Formula::Atom(_) | Formula::Falsum => self.clone(),
            Formula::Implies(l, r) => {
                Formula::implies(l.belief_as_knowledge(), r.belief_as_knowledge())
            }
            Formula::Knows(a, b) | Formula::Believes(a, b) => {
                Formula::knows(a.clone(), b.belief_as_knowledge())
            }
        }
    }

    /// Replaces atoms by formulas; atoms absent from `subst` are kept.
    pub fn substitute(&self, subst: &dyn Fn(&Atom) -> Option<Formula>) -> Formula {
        match self {
            Formula::Atom(p) => subst(p).unwrap_or_else(|| self.clone()),
            Formula::Falsum => Formula::Falsum,
            Formula::Implies(l, r) => Formula::implies(l.substitute(subst), r.substitute(subst)),
            Formula::Knows(a, b) => Formula::knows(a.clone(), b.substitute(subst)),
            Formula::Believes(a, b) => Formula::believes(a.clone(), b.substitute(subst)),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render_formula(self))
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p) => write!(f, "Atom({p})"),
            Formula::Falsum => write!(f, "Falsum"),
            Formula::Implies(l, r) => write!(f, "Implies({l:?}, {r:?})"),
            Formula::Knows(a, b) => write!(f, "Knows({a}, {b:?})"),
            Formula::Believes(a, b) => write!(f, "Believes({a}, {b:?})"),
        }
    }
}
