use proptest::prelude::*;

use wcl_core::analysis::{count_moduli, weyl_fit};
use wcl_core::classical::{DampingField, OpenMapSpec};
use wcl_core::quantum::{map_spectrum, quantize_open_baker, rank_count, QuantumMapSpec};
use wcl_core::spectral::SpectrumRecord;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn damped_moduli_are_bracketed(b0 in 0.0f64..2.0, b1 in 0.0f64..2.0, k in 1usize..12) {
        let d = DampingField::symbol_constant(vec![b0, b1]).unwrap();
        let rec = map_spectrum(&QuantumMapSpec::damped(d, 2 * k).unwrap()).unwrap();
        let (lo, hi) = (b0.min(b1), b0.max(b1));
        for m in rec.moduli() {
            prop_assert!(m <= (-lo).exp() + 1e-10 && m >= (-hi).exp() - 1e-10);
        }
    }

    #[test]
    fn counting_is_monotone(k in 1usize..10, r1 in 0.0f64..1.1, r2 in 0.0f64..1.1) {
        let map = OpenMapSpec::new(3, vec![0, 2]).unwrap();
        let rec = map_spectrum(&QuantumMapSpec::open(map, 3 * k)).unwrap();
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        prop_assert!(count_moduli(&rec, hi) <= count_moduli(&rec, lo));
        prop_assert_eq!(count_moduli(&rec, 0.0), rec.n);
    }

    #[test]
    fn open_baker_is_a_contraction(k in 1usize..10, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let map = OpenMapSpec::new(4, vec![1, 2]).unwrap();
        let rec = map_spectrum(&QuantumMapSpec::open(map, 4 * k).with_phases((a, b))).unwrap();
        prop_assert!(rec.moduli().all(|m| m <= 1.0 + 1e-10));
    }
}

#[test]
fn closed_baker_exponent_is_one() {
    let recs: Vec<SpectrumRecord> = [8, 16, 32, 64]
        .iter()
        .map(|&n| map_spectrum(&QuantumMapSpec::open(OpenMapSpec::closed(2).unwrap(), n)).unwrap())
        .collect();
    let p = weyl_fit(&recs, 0.5).unwrap();
    assert!((p.exponent.unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn rank_ceiling_grows_linearly() {
    let map = OpenMapSpec::new(3, vec![0, 2]).unwrap();
    for n in [9, 27, 81] {
        let b = quantize_open_baker(&QuantumMapSpec::open(map.clone(), n)).unwrap();
        assert_eq!(rank_count(&b, None), 2 * n / 3);
    }
}

#[test]
fn records_round_trip_through_json() {
    let d = DampingField::symbol_constant(vec![0.0, 1.0]).unwrap();
    let rec = map_spectrum(&QuantumMapSpec::damped(d, 16).unwrap()).unwrap();
    let back = SpectrumRecord::from_json(&rec.to_json()).unwrap();
    assert_eq!(back, rec);
    assert_eq!(back.to_json(), rec.to_json());
}
