//! The PT vertex `W^n_{λμν}` three ways: AB enumeration filtered by the
//! double-dimer test, the loop Schur closed form, and the DT ratio.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::doubledimer::MembershipOracle;
use crate::dtvertex::dt_vertex;
use crate::error::{Error, Result};
use crate::partitions::{a_stat, is_multi_regular, Partition};
use crate::regions::{for_each_ab, region_sets, AbConfig, LegTriple};
use crate::series::{Series, VarTable};
use crate::symfun::{hook_series_h, skew_schur_spec};

/// `W^n_{λμν}` exact to degree `d`, summing `∏ q_l^{|A|_l+|B|_l−|II|_l−2|III|_l}`
/// over the AB configurations that pass the double-dimer test.
pub fn pt_vertex_enum(n: usize, legs: &LegTriple, d: i64) -> Result<Series> {
    let vars = VarTable::q(n);
    let rs = region_sets(legs);
    let shift = rs.shift();
    if d + shift < 0 {
        return Ok(Series::zero(&vars, Some(d)).with_floor(-shift));
    }
    let budget = (d + shift) as usize;
    let mut configs: Vec<AbConfig> = Vec::new();
    for_each_ab(legs, budget, |c| configs.push(c.clone()));
    let oracle = MembershipOracle::new(legs, budget)?;
    let base: Vec<i32> = rs
        .ii_colored(n)
        .iter()
        .zip(rs.iii_colored(n))
        .map(|(a, b)| -(*a as i32) - 2 * b as i32)
        .collect();
    let tallies = configs
        .par_iter()
        .map(|cfg| -> Result<Option<Vec<i32>>> {
            if !oracle.contains(cfg)? {
                return Ok(None);
            }
            let e = cfg.colored_counts(n).iter().zip(&base).map(|(c, b)| *c as i32 + b).collect();
            Ok(Some(e))
        })
        .try_fold(HashMap::<Vec<i32>, u64>::new, |mut acc, r| {
            if let Some(e) = r? {
                *acc.entry(e).or_default() += 1;
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            Ok(a)
        })?;
    let terms = tallies.into_iter().map(|(e, c)| (e, BigInt::from(c)));
    Ok(Series::from_terms(&vars, terms, Some(d), -shift))
}

/// Whether the closed form and the DT ratio are known to give `W^n`.
pub fn closed_form_valid(n: usize, legs: &LegTriple) -> bool {
    is_multi_regular(&legs.nu, n) || (legs.lambda.is_empty() && legs.mu.is_empty())
}

fn a_monomial(lambda: &Partition, n: usize) -> Vec<i32> {
    (0..n).map(|k| -(a_stat(lambda, k, n) as i32)).collect()
}

fn intersection(a: &Partition, b: &Partition) -> Partition {
    let rows = a.len().min(b.len());
    Partition::new((0..rows).map(|r| a.row(r).min(b.row(r))).collect()).expect("meet of partitions")
}

/// `W^n_{λμν}` from the loop Schur closed form. Outside its known range the
/// result is only produced with `force`.
pub fn pt_vertex_closed(n: usize, legs: &LegTriple, d: i64, force: bool) -> Result<Series> {
    if !force && !closed_form_valid(n, legs) {
        return Err(Error::OutOfValidity(format!("closed form not established for {legs} at n={n}")));
    }
    let vars = VarTable::q(n);
    let (lambda, mu, nu) = (&legs.lambda, &legs.mu, &legs.nu);
    // the Schur shapes are λ and μ′ in our cell convention
    let (lt, mt, nt) = (lambda.clone(), mu.conjugate(), nu.conjugate());
    let m1 = a_monomial(lambda, n);
    let m2 = Series::monomial(&vars, &a_monomial(&mu.conjugate(), n), 1).bar_involution(n)?;
    let prefix = Series::monomial(&vars, &m1, 1).mul(&m2)?;
    let a: i64 = m1.iter().map(|&x| x as i64).sum::<i64>() + m2.min_degree().unwrap_or(0);
    let target = d - a;
    let meet = intersection(&lt, &mt);
    let etas: Vec<Partition> = Partition::all_up_to(meet.size())
        .into_iter()
        .filter(|eta| meet.contains_partition(eta))
        .collect();
    let low = |xi: &Partition, eta: &Partition, alphabet: &Partition| -> i64 {
        (xi.size() - eta.size()) as i64 * (-(alphabet.row(0) as i64)).min(0)
    };
    let mut sum = Series::zero(&vars, None);
    let mut sum_floor = 0i64;
    for eta in &etas {
        let e = eta.size() as i64;
        let (f1, f2) = (low(&lt, eta, &nt), low(&mt, eta, nu));
        let s1 = skew_schur_spec(&lt, eta, &nt, n, target + e - f2).bar_involution(n)?;
        let s2 = skew_schur_spec(&mt, eta, nu, n, target + e - f1);
        let mut q0 = vec![0; n];
        q0[0] = -(e as i32);
        let term = Series::monomial(&vars, &q0, 1).mul(&s1)?.mul(&s2)?;
        sum_floor = sum_floor.min(-e + f1 + f2);
        sum = sum.add(&term)?;
    }
    let sum = sum.with_floor(sum_floor);
    let h = hook_series_h(nu, n, target - sum_floor);
    let out = prefix.mul(&h.mul(&sum)?)?.truncate(d);
    debug_assert_eq!(out.trunc(), Some(d));
    Ok(out)
}

/// `V^n_{λμν} / V^n_{∅∅∅}` to degree `d`; equals `W^n` when `ν` is
/// multi-regular.
pub fn pt_vertex_dt_ratio(n: usize, legs: &LegTriple, d: i64, force: bool) -> Result<Series> {
    if !force && !is_multi_regular(&legs.nu, n) {
        return Err(Error::OutOfValidity(format!("ν={} is not multi-regular for n={n}", legs.nu)));
    }
    let v = dt_vertex(n, legs, d);
    let v0 = dt_vertex(n, &LegTriple::vacuum(), d - v.floor());
    Ok(v.mul(&v0.invert_unit()?)?.truncate(d))
}

/// `W^n_{λμν} = bar(W^n_{μ′λ′ν′})` on the enumerated series.
pub fn pt_symmetry_check(n: usize, legs: &LegTriple, d: i64) -> Result<bool> {
    let lhs = pt_vertex_enum(n, legs, d)?;
    let rhs = pt_vertex_enum(n, &legs.transpose(), d)?.bar_involution(n)?;
    Ok(lhs.agrees_to(&rhs, d))
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    pub enumerated: Series,
    pub closed: Option<Series>,
    pub dt_ratio: Option<Series>,
}

impl Triangulation {
    pub fn consistent(&self) -> bool {
        let d = self.enumerated.trunc().unwrap_or(0);
        [&self.closed, &self.dt_ratio]
            .into_iter()
            .flatten()
            .all(|s| s.agrees_to(&self.enumerated, d))
    }
}

/// All three pipelines where they apply.
pub fn triangulate(n: usize, legs: &LegTriple, d: i64) -> Result<Triangulation> {
    let enumerated = pt_vertex_enum(n, legs, d)?;
    let closed = closed_form_valid(n, legs).then(|| pt_vertex_closed(n, legs, d, false)).transpose()?;
    let dt_ratio = is_multi_regular(&legs.nu, n).then(|| pt_vertex_dt_ratio(n, legs, d, false)).transpose()?;
    Ok(Triangulation { enumerated, closed, dt_ratio })
}
