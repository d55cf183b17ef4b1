//! Differential testing: a pass must not change what a program does.
//!
//! Each program is run as written and again after decompose, pass,
//! recompose, print and re-parse. The two traces must match.

use std::fmt;

use crate::lang::LanguageDef;
use crate::term::Term;
use crate::transforms::{Pass, TransformError};

use super::interp::{interpret, Event, Trace, TrapKind, DEFAULT_FUEL};

/// Transformed programs may legitimately take more steps.
const FUEL_SLACK: u64 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    TraceDiverged { step: usize, expected: Option<Event>, actual: Option<Event> },
    TransformError(String),
    ParseError(String),
}

impl Verdict {
    pub fn is_equal(&self) -> bool {
        matches!(self, Verdict::Equal)
    }

    fn tag(&self) -> &'static str {
        match self {
            Verdict::Equal => "equal",
            Verdict::TraceDiverged { .. } => "diverged",
            Verdict::TransformError(_) => "transform-error",
            Verdict::ParseError(_) => "parse-error",
        }
    }

    fn detail(&self) -> String {
        let ev = |e: &Option<Event>| e.as_ref().map_or("<end>".to_string(), |e| e.to_string());
        match self {
            Verdict::Equal => String::new(),
            Verdict::TraceDiverged { step, expected, actual } => {
                format!("step {step}: expected `{}`, got `{}`", ev(expected), ev(actual))
            }
            Verdict::TransformError(m) | Verdict::ParseError(m) => m.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffReport {
    pub lang: String,
    pub pass: String,
    pub verdicts: Vec<Verdict>,
}

impl DiffReport {
    pub fn passed(&self) -> usize {
        self.verdicts.iter().filter(|v| v.is_equal()).count()
    }

    pub fn total(&self) -> usize {
        self.verdicts.len()
    }

    pub fn pass_rate(&self) -> f64 {
        if self.verdicts.is_empty() {
            1.0
        } else {
            self.passed() as f64 / self.total() as f64
        }
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.total()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.verdicts.iter().enumerate() {
            writeln!(f, "{i}\t{}\t{}", v.tag(), v.detail())?;
        }
        write!(f, "PASS {}/{}", self.passed(), self.total())
    }
}

/// Runs `pass` over every program in `corpus`. With `erase_markers`,
/// coverage events are dropped from both traces before comparing.
pub fn diff_test(lang: &LanguageDef, pass: Pass, corpus: &[String], erase_markers: bool) -> DiffReport {
    let mut report = diff_test_with(lang, |t, l| pass.run(t, l), corpus, erase_markers);
    report.pass = pass.name().to_string();
    report
}

pub fn diff_test_with(
    lang: &LanguageDef,
    mut transform: impl FnMut(&Term, &LanguageDef) -> Result<Term, TransformError>,
    corpus: &[String],
    erase_markers: bool,
) -> DiffReport {
    let verdicts = corpus.iter().map(|src| diff_one(lang, &mut transform, src, erase_markers)).collect();
    DiffReport { lang: lang.name.to_string(), pass: "custom".to_string(), verdicts }
}

pub fn diff_one(
    lang: &LanguageDef,
    transform: &mut impl FnMut(&Term, &LanguageDef) -> Result<Term, TransformError>,
    src: &str,
    erase_markers: bool,
) -> Verdict {
    let ast = match lang.parse(src) {
        Ok(a) => a,
        Err(e) => return Verdict::ParseError(format!("original: {e}")),
    };
    let printed = match lang
        .decompose(&ast)
        .map_err(TransformError::from)
        .and_then(|t| transform(&t, lang))
        .and_then(|t| lang.recompose(&t).map_err(TransformError::from))
    {
        Ok(out) => lang.pretty(&out),
        Err(e) => return Verdict::TransformError(e.to_string()),
    };
    let reparsed = match lang.parse(&printed) {
        Ok(a) => a,
        Err(e) => return Verdict::ParseError(format!("transformed: {e}")),
    };
    let before = interpret(lang.dialect, &ast, DEFAULT_FUEL);
    let after = interpret(lang.dialect, &reparsed, DEFAULT_FUEL * FUEL_SLACK);
    let (before, after) = if erase_markers { (before.without_cover(), after.without_cover()) } else { (before, after) };
    compare(&before, &after)
}

/// Traces must be equal, except that when the original ran out of fuel
/// only its events before the trap are checked.
pub fn compare(before: &Trace, after: &Trace) -> Verdict {
    let out_of_fuel = before.trap() == Some(TrapKind::Fuel);
    let expected = if out_of_fuel { &before.0[..before.0.len() - 1] } else { &before.0[..] };
    for (i, e) in expected.iter().enumerate() {
        if after.0.get(i) != Some(e) {
            return Verdict::TraceDiverged { step: i, expected: Some(e.clone()), actual: after.0.get(i).cloned() };
        }
    }
    if !out_of_fuel && after.0.len() > expected.len() {
        let step = expected.len();
        return Verdict::TraceDiverged { step, expected: None, actual: after.0.get(step).cloned() };
    }
    Verdict::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{block_items, with_items};
    use crate::harness::gen::{corpus, GenConfig};
    use crate::lang::{language, languages};
    use crate::transforms::map_blocks;

    fn drop_first_item(t: &Term, _: &LanguageDef) -> Result<Term, TransformError> {
        map_blocks(t, &mut |b| {
            let mut items = block_items(b)?;
            if items.len() > 1 {
                items.remove(0);
            }
            Ok(with_items(b, items)?)
        })
    }

    #[test]
    fn identity_pass_is_clean() {
        for lang in languages() {
            let progs = corpus(lang, &GenConfig::default(), 40);
            let r = diff_test(lang, Pass::Ident, &progs, false);
            assert!(r.all_passed(), "{}\n{r}", lang.name);
        }
    }

    #[test]
    fn hoisting_shadow_free_programs_is_clean() {
        let cfg = GenConfig { shadowing: false, ..GenConfig::default() };
        for lang in languages() {
            let progs = corpus(lang, &cfg, 60);
            for pass in [Pass::Ehoist, Pass::Hoist] {
                let r = diff_test(lang, pass, &progs, false);
                assert!(r.all_passed(), "{} {pass}\n{r}", lang.name);
            }
        }
    }

    #[test]
    fn dropping_statements_is_caught() {
        for lang in languages() {
            let progs = corpus(lang, &GenConfig::default(), 40);
            let r = diff_test_with(lang, drop_first_item, &progs, false);
            assert!(r.passed() < r.total() / 2, "{}\n{r}", lang.name);
            assert!(r.verdicts.iter().any(|v| matches!(v, Verdict::TraceDiverged { .. })));
        }
    }

    #[test]
    fn markers_count_unless_erased() {
        let lang = language("minijs").unwrap();
        let progs = corpus(lang, &GenConfig::default(), 10);
        assert_eq!(diff_test(lang, Pass::Testcov, &progs, false).passed(), 0);
        assert!(diff_test(lang, Pass::Testcov, &progs, true).all_passed());
    }

    #[test]
    fn unsupported_pass_reports_transform_error() {
        let lang = language("minic").unwrap();
        let r = diff_test(lang, Pass::Tac, &["int main() { return 0; }".to_string()], false);
        assert!(matches!(r.verdicts[0], Verdict::TransformError(_)));
        assert_eq!(r.to_string().lines().last(), Some("PASS 0/1"));
    }

    #[test]
    fn bad_source_reports_parse_error() {
        let lang = language("minic").unwrap();
        let r = diff_test(lang, Pass::Ident, &["int main( {".to_string()], false);
        assert!(matches!(r.verdicts[0], Verdict::ParseError(_)));
    }

    #[test]
    fn fuel_exhaustion_compares_prefix() {
        let before = Trace(vec![Event::Print("1".into()), Event::Trap(TrapKind::Fuel)]);
        let longer = Trace(vec![Event::Print("1".into()), Event::Print("2".into())]);
        assert_eq!(compare(&before, &longer), Verdict::Equal);
        let other = Trace(vec![Event::Print("3".into())]);
        assert!(!compare(&before, &other).is_equal());
        let done = Trace(vec![Event::Print("1".into())]);
        assert!(!compare(&done, &longer).is_equal());
    }
}
