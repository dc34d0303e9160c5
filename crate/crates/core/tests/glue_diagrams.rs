use std::path::PathBuf;

use num_bigint::BigInt;
use orbivertex::glue::{pt_partition, WebDiagram};
use orbivertex::series::Series;
use orbivertex::Error;

fn load(name: &str) -> WebDiagram {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    WebDiagram::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Coefficients of `∏_{k≥1} (1 − (−q)^k v)^k` by `(v-degree, q-degree)`,
/// expanded by brute force over multisets of factors.
fn conifold_oracle(max_v: usize, max_q: i64) -> Vec<Vec<BigInt>> {
    let mut poly = vec![vec![BigInt::from(0); max_q as usize + 1]; max_v + 1];
    poly[0][0] = BigInt::from(1);
    for k in 1..=max_q {
        for _ in 0..k {
            let mut next = poly.clone();
            for j in 0..max_v {
                for e in 0..=(max_q - k) {
                    let c = &poly[j][e as usize] * if k % 2 == 0 { -1 } else { 1 };
                    next[j + 1][(e + k) as usize] += c;
                }
            }
            poly = next;
        }
    }
    poly
}

#[test]
fn conifold_file_matches_product_to_v3() {
    let d = load("conifold.json");
    let z = pt_partition(&d, 3, 7).unwrap();
    let want = conifold_oracle(3, 7);
    for (j, row) in want.iter().enumerate() {
        let s = z.stratum(&[j as i32]);
        for (e, c) in row.iter().enumerate() {
            assert_eq!(s.coeff(&[e as i32, 0, 0, 0, 0]), *c, "v^{j} q^{e}");
        }
    }
}

#[test]
fn chain_file_is_valid_and_reversible() {
    let d = load("z2_chain.json");
    d.validate().unwrap();
    let z = pt_partition(&d, 1, 3).unwrap();
    assert!(z.stratum(&[0, 0, 0]).agrees_to(&Series::one(&z.box_vars), 3));
    for e in ["e", "h"] {
        let r = d.reversed(e).unwrap();
        assert_eq!(pt_partition(&r, 1, 3).unwrap().bar_edge(&r, e), z);
    }
}

#[test]
fn json_round_trip() {
    let d = load("z2_chain.json");
    assert_eq!(WebDiagram::from_json(&d.to_json()).unwrap(), d);
}

#[test]
fn bad_file_lists_violation() {
    match pt_partition(&load("bad_cy.json"), 1, 2) {
        Err(Error::InvalidDiagram(v)) => assert!(v.iter().any(|s| s.contains("expected 0"))),
        other => panic!("{other:?}"),
    }
}
