//! Clusters, confusion freeness, pBES validity and the PES correspondence.

mod common;

use std::collections::BTreeSet;

use common::{random_bes, random_pbes, random_pes, rng, TermShape};
use pbes::cluster::{confusion_free_exact, confusion_free_static, immediate_conflicts, Clusters};
use pbes::pbes::validate_pbes;
use pbes::pes::pes_to_bes;
use pbes::ConfigSpace;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn regular_structures_are_confusion_free(seed in any::<u64>()) {
        let (t, p) = random_pbes(&mut rng(seed), TermShape::LARGE, 2, 40);
        let b = p.bes();
        let space = ConfigSpace::new(b);
        prop_assert_eq!(confusion_free_exact(b, &space), Ok(()), "{}", t);
        prop_assert!(Clusters::new(b, &space).is_partition(), "{}", t);
        let report = validate_pbes(&p);
        prop_assert!(report.is_valid(), "{}: {}", t, report);
    }

    #[test]
    fn pes_correspondence(seed in any::<u64>()) {
        let pes = random_pes(&mut rng(seed), 6);
        let b = pes_to_bes(&pes);
        // Event order is preserved, so indices agree.
        prop_assert_eq!(b.events(), pes.events());
        let space = ConfigSpace::new(&b);
        prop_assert_eq!(space.iter().cloned().collect::<BTreeSet<_>>(), pes.configurations());
        prop_assert_eq!(immediate_conflicts(&b, &space), pes.immediate_conflicts());
        prop_assert_eq!(confusion_free_exact(&b, &space).is_ok(), pes.confusion_free());
        if pes.confusion_free() {
            let clusters: BTreeSet<_> = Clusters::new(&b, &space).clusters().iter().cloned().collect();
            prop_assert_eq!(clusters, pes.cells());
        }
    }

    #[test]
    fn static_condition_is_sound(seed in any::<u64>()) {
        let b = random_bes(&mut rng(seed), 6);
        let space = ConfigSpace::new(&b);
        if confusion_free_static(&b, &space) {
            prop_assert_eq!(confusion_free_exact(&b, &space), Ok(()));
        }
    }
}
