use proptest::prelude::*;
use smnoma::modem::{from_bits, make_constellation, sm_map, sm_unmap, split_bits, to_bits, tx_vector};
use smnoma::pairing::AntennaPartition;

#[test]
fn labels_are_a_bijection_with_gray_neighbors() {
    for m in [2usize, 4, 16, 64, 256] {
        let c = make_constellation(m).unwrap();
        let mut seen = vec![false; m];
        for k in 0..m {
            let lab = c.label(k) as usize;
            assert!(!seen[lab]);
            seen[lab] = true;
            assert_eq!(c.index_of_label(lab as u32), k);
        }
        assert!((c.average_energy() - 1.0).abs() < 1e-12);
        for (a, b) in c.grid_neighbors() {
            assert_eq!((c.label(a) ^ c.label(b)).count_ones(), 1, "M={m} {a}-{b}");
        }
    }
}

#[test]
fn unsupported_orders_are_rejected() {
    for m in [0usize, 3, 8, 32, 1024] {
        assert!(make_constellation(m).is_err(), "{m}");
    }
}

#[test]
fn split_rejects_wrong_length() {
    assert!(split_bits(&[true; 7], 4, 16).is_err());
}

proptest! {
    #[test]
    fn sm_round_trip(lb in 0usize..4, mi in 0usize..5, group in 0usize..4, seed in any::<u64>()) {
        let l = 1usize << lb;
        let m = [2usize, 4, 16, 64, 256][mi];
        let c = make_constellation(m).unwrap();
        let width = lb + c.bits_per_symbol();
        let v = (seed as usize) & ((1usize << width) - 1);
        let bits = to_bits(v, width);
        prop_assert_eq!(from_bits(&bits), v);
        let split = split_bits(&bits, l, m).unwrap();
        let sym = sm_map(&split, group, &c);
        prop_assert_eq!(sym.group, group);
        prop_assert!(sym.antenna_local < l);
        prop_assert_eq!(sm_unmap(&sym, l, &c).concat(), bits);

        let part = AntennaPartition::contiguous(4 * l, 4);
        let x = tx_vector(&sym, &part, 4 * l, 2.0, &c);
        let nz: Vec<usize> = (0..x.len()).filter(|&i| x[i].norm() > 0.0).collect();
        prop_assert_eq!(nz, vec![group * l + sym.antenna_local]);
    }
}
