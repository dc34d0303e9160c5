//! The orbifold DT vertex by direct enumeration of 3D partitions.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::regions::{box_color, for_each_dt, pi_min_colored_volume, BoxDelta, LegTriple};
use crate::series::{Series, VarTable};

/// `‖π‖` by colour for `π = π_min ∪ delta`.
pub fn colored_volume(legs: &LegTriple, delta: &BoxDelta, n: usize) -> Vec<i32> {
    let mut v = pi_min_colored_volume(legs, n);
    for w in &delta.extra {
        v[box_color(w, n)] += 1;
    }
    v
}

/// `V^n_{λμν}` exact to total degree `d`.
pub fn dt_vertex(n: usize, legs: &LegTriple, d: i64) -> Series {
    let vars = VarTable::q(n);
    let base = pi_min_colored_volume(legs, n);
    let floor: i64 = base.iter().map(|&x| x as i64).sum();
    if d < floor {
        return Series::zero(&vars, Some(d)).with_floor(floor);
    }
    let k_max = (d - floor) as usize;
    let mut tally: HashMap<Vec<u32>, u64> = HashMap::new();
    for_each_dt(legs, n, k_max, |f| {
        *tally.entry(f.colors().to_vec()).or_default() += 1;
    });
    let terms = tally.into_iter().map(|(c, count)| {
        let e: Vec<i32> = base.iter().zip(&c).map(|(b, x)| b + *x as i32).collect();
        (e, BigInt::from(count))
    });
    Series::from_terms(&vars, terms, Some(d), floor)
}

/// `V^n_{λμν} = bar(V^n_{μ′λ′ν′})` to degree `d`.
pub fn dt_symmetry_check(n: usize, legs: &LegTriple, d: i64) -> bool {
    let lhs = dt_vertex(n, legs, d);
    let rhs = dt_vertex(n, &legs.transpose(), d)
        .bar_involution(n)
        .expect("q table");
    lhs.agrees_to(&rhs, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::p;

    fn lt(l: &[usize], m: &[usize], n: &[usize]) -> LegTriple {
        LegTriple::new(p(l), p(m), p(n))
    }

    fn n1_coeffs(s: &Series) -> Vec<i64> {
        let m = s.coeffs_by_degree();
        (s.floor()..=s.trunc().unwrap())
            .map(|d| m.get(&d).map(|c| c.try_into().unwrap()).unwrap_or(0))
            .collect()
    }

    #[test]
    fn volume_examples() {
        let e = BoxDelta { extra: vec![] };
        assert_eq!(colored_volume(&LegTriple::vacuum(), &e, 2), vec![0, 0]);
        let one = BoxDelta { extra: vec![[0, 0, 0]] };
        assert_eq!(colored_volume(&LegTriple::vacuum(), &one, 2), vec![1, 0]);
        assert_eq!(colored_volume(&lt(&[1], &[1], &[]), &e, 2), vec![-1, 0]);
    }

    #[test]
    fn vertex_examples() {
        assert_eq!(n1_coeffs(&dt_vertex(1, &LegTriple::vacuum(), 4)), vec![1, 1, 3, 6, 13]);
        let v2 = dt_vertex(2, &LegTriple::vacuum(), 2);
        let vars = VarTable::q(2);
        let want = Series::from_terms(
            &vars,
            vec![
                (vec![0, 0], 1.into()),
                (vec![1, 0], 1.into()),
                (vec![2, 0], 1.into()),
                (vec![1, 1], 2.into()),
            ],
            Some(2),
            0,
        );
        assert_eq!(v2, want);
        assert_eq!(n1_coeffs(&dt_vertex(1, &lt(&[1], &[], &[]), 2)), vec![1, 2, 5]);
    }

    #[test]
    fn floor_tracks_pi_min() {
        let legs = lt(&[1], &[1], &[1]);
        let v = dt_vertex(1, &legs, 1);
        assert_eq!(v.floor(), -2);
        assert_eq!(v.min_degree(), Some(-2));
        assert!(v.is_nonnegative());
    }

    #[test]
    fn symmetry_examples() {
        assert!(dt_symmetry_check(1, &LegTriple::vacuum(), 4));
        assert!(dt_symmetry_check(2, &lt(&[1], &[], &[]), 4));
        assert!(dt_symmetry_check(2, &lt(&[2], &[1], &[1]), 4));
        assert!(dt_symmetry_check(3, &lt(&[2, 1], &[1], &[2]), 3));
    }

    #[test]
    fn collapse_to_one_variable() {
        let legs = lt(&[2], &[1], &[1, 1]);
        let v2 = dt_vertex(2, &legs, 3);
        let v1 = dt_vertex(1, &legs, 3);
        let one = VarTable::q(1);
        let collapsed = v2.substitute(&one, &[vec![1], vec![1]]);
        assert_eq!(collapsed, v1);
    }

    #[test]
    fn vacuum_cyclic_recolouring() {
        use crate::regions::enumerate_dt;
        let n = 3;
        let v = dt_vertex(n, &LegTriple::vacuum(), 4);
        let vars = VarTable::q(n);
        for shift in 0..n as i64 {
            let terms = enumerate_dt(&LegTriple::vacuum(), 4).into_iter().map(|d| {
                let mut e = vec![0i32; n];
                for w in &d.extra {
                    e[crate::partitions::residue(w[0] - w[1] + shift, n)] += 1;
                }
                (e, BigInt::from(1))
            });
            let recoloured = Series::from_terms(&vars, terms, Some(4), 0);
            let perm: Vec<usize> = (0..n).map(|l| (l + shift as usize) % n).collect();
            assert_eq!(recoloured, v.permute(&perm));
        }
    }
}
