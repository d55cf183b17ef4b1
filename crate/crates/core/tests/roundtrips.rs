mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sortweave::harness::gen::{gen_program, GenConfig};
use sortweave::lang::languages;
use sortweave::modularizer::{modularize_schema, Schema, SchemaType};
use sortweave::term::is_well_sorted;

use common::{random_schema, random_value, TermGen};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn modularized_values_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let schema = random_schema(&mut rng, "P");
        let m = modularize_schema(&schema).unwrap();
        for t in &schema.types {
            let v = random_value(&mut rng, &schema, &SchemaType::named(&t.name), 4);
            let term = m.to_modular(&v).unwrap();
            prop_assert_eq!(term.sort(), &m.sort_of[&t.name]);
            prop_assert!(is_well_sorted(&term));
            let back = m.from_modular(&term).unwrap();
            prop_assert_eq!(&back, &v);
            prop_assert_eq!(m.to_modular(&back).unwrap(), term);
        }
    }

    #[test]
    fn schema_text_round_trips(seed in any::<u64>()) {
        let schema = random_schema(&mut ChaCha8Rng::seed_from_u64(seed), "P");
        prop_assert_eq!(Schema::parse("P", &schema.to_text()).unwrap(), schema);
    }

    #[test]
    fn modularizer_dump_is_deterministic(seed in any::<u64>()) {
        let schema = random_schema(&mut ChaCha8Rng::seed_from_u64(seed), "P");
        prop_assert_eq!(modularize_schema(&schema).unwrap().dump(), modularize_schema(&schema.clone()).unwrap().dump());
    }

    #[test]
    fn programs_round_trip_through_terms(seed in any::<u64>()) {
        for lang in languages() {
            let src = gen_program(lang, &GenConfig::default().with_seed(seed));
            let ast = lang.parse(&src).unwrap();
            prop_assert_eq!(lang.pretty(&ast), src.clone());
            let term = lang.decompose(&ast).unwrap();
            prop_assert!(is_well_sorted(&term));
            let back = lang.recompose(&term).unwrap();
            prop_assert_eq!(&back, &ast);
            prop_assert_eq!(lang.decompose(&back).unwrap(), term);
        }
    }

    #[test]
    fn injections_project_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for lang in languages() {
            let gen = TermGen::new(&lang.ips);
            for d in lang.injections.entries() {
                let x = gen.term(&mut rng, &d.from, 3);
                let y = lang.injections.inj_f(x.clone(), &d.to).unwrap();
                prop_assert_eq!(y.sort(), &d.to);
                prop_assert!(is_well_sorted(&y));
                prop_assert_eq!(lang.injections.proj_f(&y, &d.from).unwrap(), Some(x));
            }
        }
    }
}

#[test]
fn every_injection_source_has_terms() {
    for lang in languages() {
        let gen = TermGen::new(&lang.ips);
        for d in lang.injections.entries() {
            assert!(gen.can_generate(&d.from), "{}: {}", lang.name, d.from);
        }
    }
}
