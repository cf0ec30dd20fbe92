//! Fast self-checks against the reference implementations in [`crate::oracle`].

use crate::baseline::{sic_rates, weak_rate_ceiling, zf_beams};
use crate::detect::ml_detect;
use crate::linalg::CVec;
use crate::modem::{make_constellation, sm_map, sm_unmap, split_bits, to_bits};
use crate::oracle::{box_muller, naive_ml, oracle_rng, projection_zf_beams, quadrature_mi, QuadTarget};
use crate::rates::mi_index_user;
use crate::rng::{Domain, StreamKey};
use num_complex::Complex64;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn ml_agreement() -> Check {
    let cst = make_constellation(16).expect("16-QAM");
    let mut rng = oracle_rng(1);
    let mut mismatches = 0;
    for _ in 0..2000 {
        let cols: Vec<Vec<Complex64>> = (0..4).map(|_| (0..2).map(|_| box_muller(&mut rng)).collect()).collect();
        let y: Vec<Complex64> = (0..2).map(|_| box_muller(&mut rng) * 2.0).collect();
        let fast = ml_detect(&y, &cols, &cst);
        if (fast.antenna_local, fast.point_index.unwrap_or(usize::MAX)) != naive_ml(&y, &cols, cst.points()) {
            mismatches += 1;
        }
    }
    check(
        "ml detector matches exhaustive search",
        mismatches == 0,
        format!("{mismatches} mismatches / 2000"),
    )
}

fn zf_residual() -> Check {
    let mut rng = oracle_rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let eff: Vec<CVec> = (0..4).map(|_| CVec::from_fn(8, |_, _| box_muller(&mut rng))).collect();
        let Ok(w) = zf_beams(&eff) else {
            return check("zero-forcing beams", false, "singular draw".into());
        };
        let reference = projection_zf_beams(&eff);
        for (k, wk) in w.iter().enumerate() {
            for (j, e) in eff.iter().enumerate() {
                if j != k {
                    worst = worst.max(e.dotc(wk).norm());
                }
            }
            worst = worst.max(1.0 - reference[k].dotc(wk).norm());
        }
    }
    check(
        "zero-forcing beams",
        worst <= 1e-10,
        format!("max residual {worst:.3e}"),
    )
}

fn mi_quadrature() -> Check {
    let cst = make_constellation(4).expect("QPSK");
    let gains = [Complex64::new(0.9, 0.3), Complex64::new(-0.2, 0.7)];
    let cols: Vec<Vec<Complex64>> = gains.iter().map(|g| vec![*g]).collect();
    let noise = 0.3;
    let mc = mi_index_user(&cols, &cst, noise, 200_000, StreamKey::new(3, Domain::Test, &[]));
    let q = quadrature_mi(&gains, cst.points(), noise, QuadTarget::Index, 300);
    let diff = (mc.value - q).abs();
    check(
        "index mutual information vs quadrature",
        diff < 0.02,
        format!("mc {:.4} quad {q:.4}", mc.value),
    )
}

fn modem_round_trip() -> Check {
    let cst = make_constellation(64).expect("64-QAM");
    let l = 8;
    let width = 3 + 6;
    let ok = (0..1usize << width).all(|v| {
        let bits = to_bits(v, width);
        let split = split_bits(&bits, l, 64).expect("width matches");
        sm_unmap(&sm_map(&split, 0, &cst), l, &cst).concat() == bits
    });
    check("modem round trip", ok, format!("{} words", 1usize << width))
}

fn sic_ceiling() -> Check {
    let mut rng = oracle_rng(4);
    let beta = 0.8;
    let cap = weak_rate_ceiling(beta);
    let over = (0..20_000)
        .filter(|_| {
            let g: f64 = rng.random::<f64>() * 1e6;
            let p: f64 = rng.random::<f64>() * 1e4;
            sic_rates(beta, g, g, p, 1.0).1 > cap + 1e-12
        })
        .count();
    check(
        "weak-user rate ceiling",
        over == 0,
        format!("{over} draws above {cap:.4}"),
    )
}

/// Runs every check; nothing here takes more than a few seconds.
pub fn run_checks() -> Vec<Check> {
    vec![
        ml_agreement(),
        zf_residual(),
        mi_quadrature(),
        modem_round_trip(),
        sic_ceiling(),
    ]
}
