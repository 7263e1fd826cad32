mod common;

use common::*;
use faultbasis::sigmatrix::{avg_diversity, jaccard};
use num_rational::BigRational;
use proptest::prelude::*;

fn big(r: num_rational::Ratio<u64>) -> BigRational {
    BigRational::new((*r.numer() as i64).into(), (*r.denom() as i64).into())
}

proptest! {
    #[test]
    fn jaccard_matches_reference(a in 1u32..1024, b in 1u32..1024) {
        let (sa, sb) = (mask_to_sig(a, 10), mask_to_sig(b, 10));
        let ab = jaccard(&sa, &sb).unwrap();
        prop_assert_eq!(ab, jaccard(&sb, &sa).unwrap());
        prop_assert!(*ab.numer() <= *ab.denom());
        prop_assert_eq!(big(ab), jaccard_ref(a, b));
        prop_assert_eq!(jaccard(&sa, &sa).unwrap(), num_rational::Ratio::from_integer(1));
    }

    #[test]
    fn diversity_matches_reference(rows in prop::collection::vec(1u32..4096, 0..9)) {
        let s: Vec<_> = rows.iter().map(|&m| mask_to_sig(m, 12)).collect();
        let refs: Vec<_> = s.iter().collect();
        prop_assert_eq!(avg_diversity(&refs).unwrap(), diversity_ref(&rows));
    }
}

#[test]
fn empty_pair_is_an_error() {
    let z = mask_to_sig(0, 4);
    assert!(jaccard(&z, &z).is_err());
    assert_eq!(big(jaccard(&z, &mask_to_sig(3, 4)).unwrap()), jaccard_ref(0, 3));
}
