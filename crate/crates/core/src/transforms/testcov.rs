//! Test-coverage instrumentation: each basic block starts by setting its
//! flag in the coverage array.

use std::cmp::Reverse;

use crate::flow::{basic_blocks, build_cfg, insert_at};
use crate::fragments::generic;
use crate::lang::LanguageDef;
use crate::term::Term;

use super::{Pass, TransformError};

/// Returns the instrumented program and the number of basic blocks, which
/// is the size of the coverage array.
pub fn testcov(term: &Term, lang: &LanguageDef) -> Result<(Term, usize), TransformError> {
    Pass::Testcov.requirements().check(Pass::Testcov, lang)?;
    let cfg = build_cfg(term, lang)?;
    let mut blocks = basic_blocks(&cfg);
    let count = blocks.len();
    blocks.sort_by_key(|b| Reverse(b.start.path().clone()));
    let mut out = term.clone();
    for b in blocks {
        let marker = generic().mk_assign(lang.frontend.cov_lhs(lang, b.id)?, lang.frontend.true_rhs(lang)?)?;
        out = insert_at(&out, &b.start.insertion_point(), &[marker], lang)?;
    }
    Ok((out, count))
}
