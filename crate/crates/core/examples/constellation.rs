//! Gray-labelled QAM and spatial-modulation bit mapping.
//!
//! `cargo run --example constellation`

use smnoma::modem::{make_constellation, sm_map, sm_unmap, split_bits, to_bits, tx_vector};
use smnoma::pairing::AntennaPartition;

fn main() {
    let qpsk = make_constellation(4).unwrap();
    println!("QPSK (unit average energy {:.3}):", qpsk.average_energy());
    for k in 0..qpsk.order() {
        let p = qpsk.point(k);
        println!("  label {:02b} -> {:+.3}{:+.3}j", qpsk.label(k), p.re, p.im);
    }

    // 4 antennas per group, 16-QAM: 2 index bits + 4 symbol bits.
    let c16 = make_constellation(16).unwrap();
    let bits = to_bits(0b10_0111, 6);
    let split = split_bits(&bits, 4, 16).unwrap();
    let sym = sm_map(&split, 1, &c16);
    println!("\nbits {bits:?}");
    println!(
        "  index bits {:?} -> antenna {} of group {}",
        split.index_bits, sym.antenna_local, sym.group
    );
    println!("  symbol bits {:?} -> point {}", split.symbol_bits, sym.point_index);

    let part = AntennaPartition::contiguous(8, 2);
    let x = tx_vector(&sym, &part, 8, 1.0, &c16);
    let active: Vec<usize> = (0..8).filter(|&a| x[a].norm() > 0.0).collect();
    println!("  active base-station antenna: {active:?}");
    assert_eq!(sm_unmap(&sym, 4, &c16).concat(), bits);
}
