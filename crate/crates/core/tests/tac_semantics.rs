use sortweave::harness::diff::diff_test;
use sortweave::harness::gen::{corpus, GenConfig};
use sortweave::harness::interp::{interpret, Event, DEFAULT_FUEL};
use sortweave::lang::{language, LanguageDef};
use sortweave::modularizer::GenericValue;
use sortweave::transforms::{non_atomic_operands, tac, Pass};

fn calls(lang: &LanguageDef, ast: &GenericValue) -> Vec<Event> {
    interpret(lang.dialect, ast, DEFAULT_FUEL).0.into_iter().filter(|e| matches!(e, Event::Call(..))).collect()
}

fn lowered(lang: &LanguageDef, src: &str) -> GenericValue {
    let t = tac(&lang.decompose(&lang.parse(src).unwrap()).unwrap(), lang).unwrap();
    lang.parse(&lang.pretty(&lang.recompose(&t).unwrap())).unwrap()
}

#[test]
fn short_circuit_calls_happen_exactly_as_before() {
    for key in ["minijs", "minilua"] {
        let lang = language(key).unwrap();
        for src in corpus(lang, &GenConfig::default().with_seed(11), 100) {
            let before = calls(lang, &lang.parse(&src).unwrap());
            assert_eq!(calls(lang, &lowered(lang, &src)), before, "{src}");
        }
    }
}

#[test]
fn right_operand_calls_stay_conditional() {
    let lang = language("minijs").unwrap();
    let src = "function main() { var x = 0; x = x && ext0(1); x = 1 || ext1(2); x = 1 && ext0(3); return x; }";
    let got = calls(lang, &lowered(lang, src));
    assert_eq!(got, calls(lang, &lang.parse(src).unwrap()));
    assert_eq!(got.len(), 1);
}

#[test]
fn lowered_corpus_is_atomic_and_equivalent() {
    for key in ["minijs", "minilua"] {
        let lang = language(key).unwrap();
        let progs = corpus(lang, &GenConfig::default().with_seed(12), 150);
        for src in &progs {
            let t = tac(&lang.decompose(&lang.parse(src).unwrap()).unwrap(), lang).unwrap();
            assert_eq!(non_atomic_operands(&t, lang), Vec::<String>::new(), "{src}");
        }
        let r = diff_test(lang, Pass::Tac, &progs, false);
        assert!(r.all_passed(), "{r}");
    }
}
