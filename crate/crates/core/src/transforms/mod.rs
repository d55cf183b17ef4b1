//! Transformations written against the generic fragments, the injection
//! tables and the flow module. Language behavior enters only through
//! `LanguageOps`, the injection table and the frontend hooks.

mod hoist;
mod tac;
mod testcov;

#[cfg(test)]
mod tests;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::flow::FlowError;
use crate::fragments::{generic, OpsError, ASSIGN_L, BLOCK_ITEM_L, MULTI_DECL_L};
use crate::lang::{IpsError, LanguageDef};
use crate::term::{Sort, Term, TermError};
use crate::traversal::TraversalError;

pub use hoist::{elementary_hoist, hoist, hoist_violations};
pub use tac::{non_atomic_operands, tac};
pub use testcov::testcov;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("{pass} cannot run on {lang}: missing {}", missing.join(", "))]
    RequirementMissing { pass: Pass, lang: String, missing: Vec<String> },
    #[error("local limit exceeded: {0}")]
    LocalLimit(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Ips(#[from] IpsError),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Traversal(#[from] TraversalError),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pass {
    Ident,
    Ehoist,
    Hoist,
    Testcov,
    Tac,
}

impl Pass {
    pub const ALL: [Pass; 5] = [Pass::Ident, Pass::Ehoist, Pass::Hoist, Pass::Testcov, Pass::Tac];

    pub fn name(self) -> &'static str {
        match self {
            Pass::Ident => "ident",
            Pass::Ehoist => "ehoist",
            Pass::Hoist => "hoist",
            Pass::Testcov => "testcov",
            Pass::Tac => "tac",
        }
    }

    pub fn requirements(self) -> PassRequirements {
        let hoist = || PassRequirements {
            kinds: [
                "Ident",
                "Assign",
                "AssignOpEquals",
                "Block",
                "MultiLocalVarDecl",
                "SingleLocalVarDecl",
                "JustLocalVarInit",
                "NoLocalVarInit",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            injections: [(MULTI_DECL_L, BLOCK_ITEM_L), (ASSIGN_L, BLOCK_ITEM_L)]
                .into_iter()
                .map(|(a, b)| (Sort::atomic(a), Sort::atomic(b)))
                .collect(),
            ops: ["var_init_to_rhs", "var_decl_binder_to_lhs"].into_iter().map(String::from).collect(),
        };
        match self {
            Pass::Ident => PassRequirements::default(),
            Pass::Ehoist | Pass::Hoist => hoist(),
            Pass::Testcov => PassRequirements {
                kinds: ["Assign", "AssignOpEquals", "Block"].into_iter().map(String::from).collect(),
                injections: [(Sort::atomic(ASSIGN_L), Sort::atomic(BLOCK_ITEM_L))].into_iter().collect(),
                ops: ["cov_lhs", "true_rhs", "stmt_shape"].into_iter().map(String::from).collect(),
            },
            Pass::Tac => PassRequirements {
                kinds: ["Ident", "Assign", "Block"].into_iter().map(String::from).collect(),
                injections: [(Sort::atomic(ASSIGN_L), Sort::atomic(BLOCK_ITEM_L))].into_iter().collect(),
                ops: ["stmt_shape", "tac"].into_iter().map(String::from).collect(),
            },
        }
    }

    /// Runs the pass on an IPS program term.
    pub fn run(self, term: &Term, lang: &LanguageDef) -> Result<Term, TransformError> {
        match self {
            Pass::Ident => Ok(term.clone()),
            Pass::Ehoist => elementary_hoist(term, lang),
            Pass::Hoist => hoist(term, lang),
            Pass::Testcov => testcov(term, lang).map(|(t, _)| t),
            Pass::Tac => tac(term, lang),
        }
    }
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pass {
    type Err = String;

    fn from_str(s: &str) -> Result<Pass, String> {
        Pass::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown pass {s}"))
    }
}

/// What a pass needs from a language.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PassRequirements {
    /// Generic kinds, by name.
    pub kinds: BTreeSet<String>,
    pub injections: BTreeSet<(Sort, Sort)>,
    /// Language operations, by name.
    pub ops: BTreeSet<String>,
}

impl PassRequirements {
    /// Unmet requirements, described.
    pub fn missing(&self, lang: &LanguageDef) -> Vec<String> {
        let g = generic();
        let mut out = Vec::new();
        for k in &self.kinds {
            let present = g.all().iter().find(|gk| &gk.name == k).is_some_and(|gk| lang.ips.contains(gk));
            if !present {
                out.push(format!("kind {k}"));
            }
        }
        for (a, b) in &self.injections {
            if !lang.injections.has(a, b) {
                out.push(format!("injection {a} -> {b}"));
            }
        }
        let ops = language_ops(lang);
        for o in &self.ops {
            if !ops.contains(o.as_str()) {
                out.push(format!("operation {o}"));
            }
        }
        out
    }

    pub fn check(&self, pass: Pass, lang: &LanguageDef) -> Result<(), TransformError> {
        let missing = self.missing(lang);
        if missing.is_empty() {
            Ok(())
        } else {
            Err(TransformError::RequirementMissing { pass, lang: lang.name.to_string(), missing })
        }
    }
}

/// Operations a language provides.
pub fn language_ops(lang: &LanguageDef) -> BTreeSet<&'static str> {
    let mut ops: BTreeSet<&'static str> =
        ["var_init_to_rhs", "var_decl_binder_to_lhs", "cov_lhs", "true_rhs", "stmt_shape"].into();
    if lang.frontend.tac().is_some() {
        ops.insert("tac");
    }
    ops
}

/// Rebuilds `t` bottom-up, applying `f` to every generic block after its
/// children have been rebuilt.
pub(crate) fn map_blocks(
    t: &Term,
    f: &mut impl FnMut(&Term) -> Result<Term, TransformError>,
) -> Result<Term, TransformError> {
    let kids = t.children().iter().map(|c| map_blocks(c, f)).collect::<Result<Vec<_>, _>>()?;
    let rebuilt =
        if kids.iter().zip(t.children()).all(|(a, b)| a.ptr_eq(b)) { t.clone() } else { t.with_children(kids)? };
    if rebuilt.is("Block") {
        f(&rebuilt)
    } else {
        Ok(rebuilt)
    }
}
