//! Skew Schur functions at the monomial alphabet `𝐪_{•−ν}`, the coloured
//! hook product `H_ν`, and loop Schur functions.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::partitions::{hook_color_profile, residue, Partition};
use crate::series::{Series, VarTable};

type Exps = Vec<i32>;

/// Exponent vector of `𝐪_t`, where `𝐪_0 = 1` and `𝐪_t = q_t·𝐪_{t−1}`.
pub fn q_bullet(t: i64, n: usize) -> Exps {
    let mut e = vec![0; n];
    if t > 0 {
        for s in 1..=t {
            e[residue(s, n)] += 1;
        }
    } else {
        for s in 0..-t {
            e[residue(-s, n)] -= 1;
        }
    }
    e
}

fn degree(e: &[i32]) -> i64 {
    e.iter().map(|&x| x as i64).sum()
}

/// Letter `x_i = 𝐪_{i−ν_i}` of the alphabet `𝐪_{•−ν}`.
pub fn alphabet_letter(nu: &Partition, i: usize, n: usize) -> Exps {
    q_bullet(i as i64 - nu.row(i) as i64, n)
}

/// All `κ′ ⊆ ξ` with `κ′/κ` a horizontal strip.
fn horizontal_strips(kappa: &[usize], xi: &Partition) -> Vec<Vec<usize>> {
    let rows = xi.len();
    let mut out = Vec::new();
    let mut cur = vec![0usize; rows];
    fn go(r: usize, kappa: &[usize], xi: &Partition, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if r == cur.len() {
            out.push(cur.clone());
            return;
        }
        let lo = kappa[r];
        let hi = if r == 0 { xi.row(0) } else { xi.row(r).min(kappa[r - 1]) };
        for v in lo..=hi {
            cur[r] = v;
            go(r + 1, kappa, xi, cur, out);
        }
    }
    go(0, kappa, xi, &mut cur, &mut out);
    out
}

fn skew_schur_with_cutoff(xi: &Partition, eta: &Partition, nu: &Partition, n: usize, d: i64, cutoff: usize) -> BTreeMap<Exps, BigInt> {
    let rows = xi.len();
    let start: Vec<usize> = (0..rows).map(|r| eta.row(r)).collect();
    let target: Vec<usize> = (0..rows).map(|r| xi.row(r)).collect();
    let total = xi.size();
    let letters: Vec<Exps> = (0..=cutoff + 1).map(|i| alphabet_letter(nu, i, n)).collect();
    let mut states: HashMap<Vec<usize>, BTreeMap<Exps, BigInt>> = HashMap::new();
    states.insert(start, BTreeMap::from([(vec![0; n], BigInt::from(1))]));
    for i in 0..=cutoff {
        let next_deg = degree(&letters[i + 1]);
        let mut next: HashMap<Vec<usize>, BTreeMap<Exps, BigInt>> = HashMap::new();
        for (kappa, poly) in &states {
            for k2 in horizontal_strips(kappa, xi) {
                let added = k2.iter().sum::<usize>() - kappa.iter().sum::<usize>();
                let remaining = (total - k2.iter().sum::<usize>()) as i64;
                let slot = next.entry(k2).or_default();
                for (e, c) in poly {
                    let e2: Exps = e.iter().zip(&letters[i]).map(|(a, b)| a + b * added as i32).collect();
                    if degree(&e2) + remaining * next_deg > d {
                        continue;
                    }
                    *slot.entry(e2).or_insert_with(BigInt::zero) += c;
                }
            }
        }
        states = next;
    }
    states.remove(&target).unwrap_or_default()
}

/// `s_{ξ/η}(𝐪_{•−ν})` exact to total degree `d`.
pub fn skew_schur_spec(xi: &Partition, eta: &Partition, nu: &Partition, n: usize, d: i64) -> Series {
    let vars = VarTable::q(n);
    let cells = xi.size().saturating_sub(eta.size()) as i64;
    let floor = cells * degree(&alphabet_letter(nu, 0, n)).min(0);
    if !xi.contains_partition(eta) {
        return Series::zero(&vars, Some(d)).with_floor(floor);
    }
    let nu_max = nu.row(0);
    let cutoff = d.max(0) as usize + (xi.size() + 1) * (nu_max + 1);
    let a = skew_schur_with_cutoff(xi, eta, nu, n, d, cutoff);
    let b = skew_schur_with_cutoff(xi, eta, nu, n, d, cutoff + 1);
    assert_eq!(a, b, "entry cutoff {cutoff} not stable for {xi}/{eta} at {nu}");
    Series::from_terms(&vars, a, Some(d), floor)
}

/// Truncated `1/(1 − m)` for a monomial `m` of positive degree.
pub fn geometric(vars: &std::sync::Arc<VarTable>, m: &[i32], d: i64) -> Series {
    let step = degree(m);
    assert!(step >= 1, "geometric series needs a positive-degree ratio");
    let terms = (0..=d.max(-1) / step).map(|k| (m.iter().map(|x| x * k as i32).collect::<Exps>(), BigInt::from(1)));
    Series::from_terms(vars, terms, Some(d), 0)
}

/// `H_ν = ∏_{cells} 1/(1 − ∏_s q_s^{h^s(cell)})` to degree `d`.
pub fn hook_series_h(nu: &Partition, n: usize, d: i64) -> Series {
    let vars = VarTable::q(n);
    let mut acc = Series::one(&vars).truncate(d);
    for (i, j) in nu.cells() {
        let prof: Exps = hook_color_profile(nu, n, (i, j))
            .expect("cell of ν")
            .into_iter()
            .map(|x| x as i32)
            .collect();
        acc = acc.mul(&geometric(&vars, &prof, d)).expect("same table");
    }
    acc
}

/// `∏_{(i,j)∈ν} q_{i−j}^j`.
pub fn loop_schur_prefactor(nu: &Partition, n: usize) -> Exps {
    let mut e = vec![0; n];
    for (i, j) in nu.cells() {
        e[residue(i as i64 - j as i64, n)] += j as i32;
    }
    e
}

/// `𝔰_ν` from the hook product form, exact to degree `d`.
pub fn loop_schur(nu: &Partition, n: usize, d: i64) -> Series {
    let vars = VarTable::q(n);
    let pre = loop_schur_prefactor(nu, n);
    let h = hook_series_h(nu, n, d - degree(&pre));
    Series::monomial(&vars, &pre, 1).mul(&h).expect("same table")
}

/// `𝔰_ν` as a tableau sum: entries `≥ 0`, strictly increasing along each
/// row and weakly increasing up each column, cell `(i, j)` with entry `w`
/// contributing `q_{i−j}^w`.
pub fn loop_schur_ssyt(nu: &Partition, n: usize, d: i64) -> Series {
    let vars = VarTable::q(n);
    let cells: Vec<(usize, usize)> = nu.cells().collect();
    let mut fill: HashMap<(usize, usize), i64> = HashMap::new();
    let mut tally: BTreeMap<Exps, BigInt> = BTreeMap::new();
    let mut e = vec![0i32; n];
    // cells() runs row by row, so the left and lower neighbours are filled first
    fn go(
        k: usize,
        cells: &[(usize, usize)],
        n: usize,
        budget: i64,
        fill: &mut HashMap<(usize, usize), i64>,
        e: &mut Exps,
        tally: &mut BTreeMap<Exps, BigInt>,
    ) {
        if k == cells.len() {
            *tally.entry(e.clone()).or_insert_with(BigInt::zero) += 1;
            return;
        }
        let (i, j) = cells[k];
        let mut lo = 0;
        if j > 0 {
            lo = lo.max(fill[&(i, j - 1)] + 1);
        }
        if i > 0 {
            lo = lo.max(fill[&(i - 1, j)]);
        }
        // remaining cells in this row are forced strictly larger
        let row_len = cells.iter().filter(|c| c.0 == i).count();
        let forced: i64 = (1..(row_len - j) as i64).sum();
        let color = residue(i as i64 - j as i64, n);
        let mut w = lo;
        while w * (row_len - j) as i64 + forced <= budget {
            fill.insert((i, j), w);
            e[color] += w as i32;
            go(k + 1, cells, n, budget - w, fill, e, tally);
            e[color] -= w as i32;
            w += 1;
        }
        fill.remove(&(i, j));
    }
    go(0, &cells, n, d, &mut fill, &mut e, &mut tally);
    Series::from_terms(&vars, tally, Some(d), degree(&loop_schur_prefactor(nu, n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::p;
    use proptest::prelude::*;

    fn one_var(coeffs: &[i64], d: i64) -> Series {
        let vars = VarTable::q(1);
        Series::from_terms(&vars, coeffs.iter().enumerate().map(|(k, &c)| (vec![k as i32], BigInt::from(c))), Some(d), 0)
    }

    #[test]
    fn q_bullet_examples() {
        assert_eq!(q_bullet(0, 3), vec![0, 0, 0]);
        assert_eq!(q_bullet(-2, 3), vec![-1, 0, -1]);
        assert_eq!(q_bullet(2, 2), vec![1, 1]);
        assert_eq!(q_bullet(3, 3), vec![1, 1, 1]);
    }

    proptest! {
        #[test]
        fn q_bullet_ladder(t in -12i64..12, n in 1usize..5) {
            let cur = q_bullet(t, n);
            let prev = q_bullet(t - 1, n);
            let mut step = prev.clone();
            step[residue(t, n)] += 1;
            prop_assert_eq!(&cur, &step);
            prop_assert_eq!(degree(&cur), t);
            let inv = q_bullet(-t, n);
            prop_assert_eq!(degree(&cur) + degree(&inv), 0);
        }
    }

    #[test]
    fn skew_examples() {
        let e = Partition::empty();
        let vars = VarTable::q(2);
        assert_eq!(skew_schur_spec(&p(&[2, 1]), &p(&[2, 1]), &p(&[1]), 2, 3), Series::one(&vars).truncate(3));
        assert_eq!(skew_schur_spec(&p(&[1]), &e, &e, 1, 3), one_var(&[1, 1, 1, 1], 3));
        assert_eq!(skew_schur_spec(&p(&[1]), &p(&[1]), &e, 1, 3), one_var(&[1], 3));
        assert_eq!(
            skew_schur_spec(&p(&[2]), &p(&[1]), &p(&[2, 1]), 3, 4),
            skew_schur_spec(&p(&[1]), &e, &p(&[2, 1]), 3, 4)
        );
        assert!(skew_schur_spec(&p(&[1]), &p(&[2]), &e, 1, 3).is_zero());
    }

    /// `s_ξ(1, q, q², …)` by Jacobi–Trudi with `h_k = ∏_{i ≤ k} 1/(1 − q^i)`.
    fn jacobi_trudi(xi: &Partition, d: i64) -> Series {
        let vars = VarTable::q(1);
        let h = |k: i64| -> Series {
            if k < 0 {
                return Series::zero(&vars, Some(d));
            }
            let mut acc = Series::one(&vars).truncate(d);
            for i in 1..=k {
                acc = acc.mul(&geometric(&vars, &[i as i32], d)).unwrap();
            }
            acc
        };
        let m = xi.len();
        let mat: Vec<Vec<Series>> = (0..m)
            .map(|r| (0..m).map(|c| h(xi.row(r) as i64 - r as i64 + c as i64)).collect())
            .collect();
        fn det(mat: &[Vec<Series>], cols: &[usize], d: i64) -> Series {
            let vars = mat[0][0].vars().clone();
            if cols.is_empty() {
                return Series::one(&vars).truncate(d);
            }
            let row = mat.len() - cols.len();
            let mut acc = Series::zero(&vars, Some(d));
            for (k, &c) in cols.iter().enumerate() {
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = mat[row][c].mul(&det(mat, &rest, d)).unwrap();
                acc = if k % 2 == 0 { acc.add(&term).unwrap() } else { acc.sub(&term).unwrap() };
            }
            acc
        }
        if m == 0 {
            return Series::one(&vars).truncate(d);
        }
        det(&mat, &(0..m).collect::<Vec<_>>(), d)
    }

    #[test]
    fn principal_specialization_matches_jacobi_trudi() {
        for xi in Partition::all_up_to(6) {
            let got = skew_schur_spec(&xi, &Partition::empty(), &Partition::empty(), 1, 10);
            assert_eq!(got, jacobi_trudi(&xi, 10), "{xi}");
        }
    }

    #[test]
    fn hook_examples() {
        let vars = VarTable::q(2);
        assert_eq!(hook_series_h(&Partition::empty(), 2, 4), Series::one(&vars).truncate(4));
        assert_eq!(hook_series_h(&p(&[1]), 2, 3), geometric(&vars, &[1, 0], 3));
        let want = geometric(&vars, &[1, 2], 5)
            .mul(&geometric(&vars, &[0, 1], 5))
            .unwrap()
            .mul(&geometric(&vars, &[0, 1], 5))
            .unwrap();
        assert_eq!(hook_series_h(&p(&[2, 1]), 2, 5), want);
    }

    #[test]
    fn loop_schur_examples() {
        let vars = VarTable::q(2);
        assert_eq!(loop_schur(&Partition::empty(), 2, 3), Series::one(&vars).truncate(3));
        assert_eq!(loop_schur(&p(&[1]), 2, 4), geometric(&vars, &[1, 0], 4));
        let s11 = loop_schur(&p(&[1, 1]), 2, 4);
        assert_eq!(s11.min_degree(), Some(0));
        assert_eq!(s11, loop_schur_ssyt(&p(&[1, 1]), 2, 4));
    }

    #[test]
    fn tableau_sum_matches_hook_form() {
        for n in 1..=3 {
            for nu in Partition::all_up_to(6) {
                assert_eq!(loop_schur(&nu, n, 6), loop_schur_ssyt(&nu, n, 6), "{nu} n={n}");
            }
        }
    }
}
