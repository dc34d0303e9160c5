//! Sparse multivariate Laurent series with big-integer coefficients,
//! truncated by total degree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Exps = Vec<i32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VarTable {
    names: Vec<String>,
}

impl VarTable {
    pub fn new(names: Vec<String>) -> Result<Arc<Self>> {
        let mut seen = std::collections::HashSet::new();
        for n in &names {
            if !seen.insert(n) {
                return Err(Error::Parse(format!("duplicate variable {n}")));
            }
        }
        Ok(Arc::new(VarTable { names }))
    }

    /// `q_0, …, q_{n−1}`.
    pub fn q(n: usize) -> Arc<Self> {
        VarTable::new((0..n).map(|k| format!("q_{k}")).collect()).unwrap()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `Some(n)` when the table is exactly `q_0, …, q_{n−1}`.
    pub fn q_modulus(&self) -> Option<usize> {
        let n = self.names.len();
        (0..n)
            .all(|k| self.names[k] == format!("q_{k}"))
            .then_some(n)
    }
}

pub fn degree(e: &[i32]) -> i64 {
    e.iter().map(|&x| x as i64).sum()
}

/// Truncated Laurent series. `trunc == None` means exact in every degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    vars: Arc<VarTable>,
    terms: BTreeMap<Exps, BigInt>,
    trunc: Option<i64>,
    floor: i64,
}

fn min_trunc(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn add_trunc(a: Option<i64>, by: i64) -> Option<i64> {
    a.map(|x| x + by)
}

impl Series {
    pub fn zero(vars: &Arc<VarTable>, trunc: Option<i64>) -> Self {
        Series { vars: vars.clone(), terms: BTreeMap::new(), trunc, floor: 0 }
    }

    pub fn one(vars: &Arc<VarTable>) -> Self {
        Series::monomial(vars, &vec![0; vars.len()], BigInt::one())
    }

    pub fn constant(vars: &Arc<VarTable>, c: impl Into<BigInt>) -> Self {
        Series::monomial(vars, &vec![0; vars.len()], c.into())
    }

    pub fn monomial(vars: &Arc<VarTable>, exps: &[i32], coeff: impl Into<BigInt>) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let coeff = coeff.into();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps.to_vec(), coeff);
        }
        Series { vars: vars.clone(), terms, trunc: None, floor: degree(exps) }
    }

    /// Build from a term list, merging repeats and dropping zeros and terms above `trunc`.
    pub fn from_terms<I>(vars: &Arc<VarTable>, terms: I, trunc: Option<i64>, floor: i64) -> Self
    where
        I: IntoIterator<Item = (Exps, BigInt)>,
    {
        let mut map: BTreeMap<Exps, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len());
            if trunc.is_some_and(|t| degree(&e) > t) {
                continue;
            }
            *map.entry(e).or_default() += c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut s = Series { vars: vars.clone(), terms: map, trunc, floor };
        s.floor = s.floor.min(s.min_degree().unwrap_or(s.floor));
        s
    }

    pub fn vars(&self) -> &Arc<VarTable> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Exps, BigInt> {
        &self.terms
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn floor(&self) -> i64 {
        self.floor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[i32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| degree(e)).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().map(|e| degree(e)).max()
    }

    /// Coefficients collected by total degree (useful when `n = 1`).
    pub fn coeffs_by_degree(&self) -> BTreeMap<i64, BigInt> {
        let mut m: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in &self.terms {
            *m.entry(degree(e)).or_default() += c;
        }
        m
    }

    fn same_vars(&self, other: &Series) -> Result<()> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VarTableMismatch)
        }
    }

    /// Drop everything above degree `d`.
    pub fn truncate(&self, d: i64) -> Series {
        let trunc = min_trunc(self.trunc, Some(d));
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| degree(e) <= d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Series { vars: self.vars.clone(), terms, trunc, floor: self.floor }
    }

    pub fn with_floor(mut self, floor: i64) -> Series {
        assert!(self.min_degree().is_none_or(|m| m >= floor));
        self.floor = floor;
        self
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.same_vars(other)?;
        let trunc = min_trunc(self.trunc, other.trunc);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_default();
            *slot += c;
        }
        terms.retain(|e, c| !c.is_zero() && trunc.is_none_or(|t| degree(e) <= t));
        Ok(Series { vars: self.vars.clone(), terms, trunc, floor: self.floor.min(other.floor) })
    }

    pub fn neg(&self) -> Series {
        let terms = self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect();
        Series { vars: self.vars.clone(), terms, trunc: self.trunc, floor: self.floor }
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Series {
        let mut s = self.clone();
        if k.is_zero() {
            s.terms.clear();
        } else {
            for c in s.terms.values_mut() {
                *c *= k;
            }
        }
        s
    }

    /// Product, exact up to `min(trunc_f + floor_g, trunc_g + floor_f)`.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.same_vars(other)?;
        let trunc = min_trunc(add_trunc(self.trunc, other.floor), add_trunc(other.trunc, self.floor));
        let mut by_deg: BTreeMap<i64, Vec<(&Exps, &BigInt)>> = BTreeMap::new();
        for (e, c) in &other.terms {
            by_deg.entry(degree(e)).or_default().push((e, c));
        }
        let mut acc: HashMap<Exps, BigInt> = HashMap::new();
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            for (&db, group) in &by_deg {
                if trunc.is_some_and(|t| da + db > t) {
                    break;
                }
                for (eb, cb) in group {
                    let e: Exps = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                    *acc.entry(e).or_default() += ca * *cb;
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Series { vars: self.vars.clone(), terms, trunc, floor: self.floor + other.floor })
    }

    /// Inverse of a series whose lowest-degree stratum is a single `±` monomial.
    pub fn invert_unit(&self) -> Result<Series> {
        let d0 = self.min_degree().ok_or_else(|| Error::NotAUnit("zero series".into()))?;
        let lowest: Vec<(&Exps, &BigInt)> =
            self.terms.iter().filter(|(e, _)| degree(e) == d0).collect();
        if lowest.len() != 1 || !lowest[0].1.abs().is_one() {
            return Err(Error::NotAUnit(format!(
                "lowest stratum has {} terms, leading coefficient {}",
                lowest.len(),
                lowest[0].1
            )));
        }
        let (m, sign) = (lowest[0].0.clone(), lowest[0].1.clone());
        let m_inv: Exps = m.iter().map(|x| -x).collect();
        let inv_m = Series::monomial(&self.vars, &m_inv, sign.clone());
        // self = m·sign·(1 + h) with h of positive degree
        let unit = self.mul(&inv_m)?;
        let h = unit.sub(&Series::one(&self.vars))?;
        let Some(t) = unit.trunc else {
            if h.is_zero() {
                return Ok(inv_m);
            }
            return Err(Error::NotAUnit("inverse of an exact non-monomial series needs a truncation".into()));
        };
        // (1 + h)^{-1} = Σ (−h)^k, exact to t
        let minus_h = h.neg().truncate(t);
        let mut result = Series::one(&self.vars).truncate(t);
        let mut power = Series::one(&self.vars).truncate(t);
        let min_h = h.min_degree().unwrap_or(t + 1).max(1);
        let mut k = 0;
        while (k + 1) * min_h <= t {
            power = power.mul(&minus_h)?.truncate(t);
            if power.is_zero() {
                break;
            }
            result = result.add(&power)?;
            k += 1;
        }
        let mut out = result.mul(&inv_m)?;
        out.trunc = Some(t - d0);
        out.floor = -d0;
        Ok(out)
    }

    /// Integer power; negative exponents go through [`Series::invert_unit`].
    pub fn pow(&self, k: i64) -> Result<Series> {
        if k < 0 {
            return self.invert_unit()?.pow(-k);
        }
        let mut result = Series::one(&self.vars);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Exchange `q_k ↔ q_{−k}` on a table `q_0, …, q_{n−1}`.
    pub fn bar_involution(&self, n: usize) -> Result<Series> {
        if self.vars.q_modulus() != Some(n) {
            return Err(Error::VarTableMismatch);
        }
        let perm: Vec<usize> = (0..n).map(|k| (n - k) % n).collect();
        Ok(self.permute(&perm))
    }

    /// Move the exponent of variable `k` to variable `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Series {
        assert_eq!(perm.len(), self.vars.len());
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut f = vec![0; e.len()];
                for (k, &x) in e.iter().enumerate() {
                    f[perm[k]] = x;
                }
                (f, c.clone())
            })
            .collect();
        Series { vars: self.vars.clone(), terms, trunc: self.trunc, floor: self.floor }
    }

    /// Multiply each coefficient by `∏ (−1)^{e_k}` over the flagged variables.
    pub fn sign_twist(&self, negate: &[bool]) -> Series {
        assert_eq!(negate.len(), self.vars.len());
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let odd = e
                    .iter()
                    .zip(negate)
                    .filter(|(x, &neg)| neg && x.is_odd())
                    .count();
                (e.clone(), if odd % 2 == 1 { -c } else { c.clone() })
            })
            .collect();
        Series { vars: self.vars.clone(), terms, trunc: self.trunc, floor: self.floor }
    }

    /// Substitute each variable by a monomial of a new table: variable `k`
    /// becomes `∏_m y_m^{images[k][m]}`. Every image must have total degree
    /// one so the filtration is kept.
    pub fn substitute(&self, target: &Arc<VarTable>, images: &[Exps]) -> Series {
        assert_eq!(images.len(), self.vars.len());
        for im in images {
            assert_eq!(im.len(), target.len());
            assert_eq!(degree(im), 1, "substitution must preserve total degree");
        }
        let mut acc: BTreeMap<Exps, BigInt> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut f = vec![0i32; target.len()];
            for (k, &x) in e.iter().enumerate() {
                for (m, &y) in images[k].iter().enumerate() {
                    f[m] += x * y;
                }
            }
            *acc.entry(f).or_default() += c;
        }
        acc.retain(|_, c| !c.is_zero());
        Series { vars: target.clone(), terms: acc, trunc: self.trunc, floor: self.floor }
    }

    /// Coefficientwise equality up to degree `d` (both must be exact there).
    pub fn agrees_to(&self, other: &Series, d: i64) -> bool {
        self.first_difference(other, d).is_none()
    }

    /// Lowest-degree exponent vector where the two differ, up to degree `d`.
    pub fn first_difference(&self, other: &Series, d: i64) -> Option<(Exps, BigInt, BigInt)> {
        let mut keys: Vec<&Exps> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort_by_key(|e| (degree(e), (*e).clone()));
        keys.dedup();
        keys.into_iter()
            .filter(|e| degree(e) <= d)
            .find(|e| self.coeff(e) != other.coeff(e))
            .map(|e| (e.clone(), self.coeff(e), other.coeff(e)))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            vars: self.vars.names.clone(),
            trunc: self.trunc,
            floor: self.floor,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermJson { e: e.clone(), c: c.to_string() })
                .collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Series> {
        let vars = VarTable::new(j.vars.clone())?;
        let terms = j
            .terms
            .iter()
            .map(|t| {
                let c: BigInt = t
                    .c
                    .parse()
                    .map_err(|e| Error::Parse(format!("coefficient {:?}: {e}", t.c)))?;
                if t.e.len() != vars.len() {
                    return Err(Error::Parse("exponent vector length".into()));
                }
                Ok((t.e.clone(), c))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Series::from_terms(&vars, terms, j.trunc, j.floor))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub e: Exps,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub vars: Vec<String>,
    pub trunc: Option<i64>,
    pub floor: i64,
    pub terms: Vec<TermJson>,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Exps> = self.terms.keys().collect();
        keys.sort_by_key(|e| (degree(e), (*e).clone()));
        if keys.is_empty() {
            write!(f, "0")?;
        }
        for (idx, e) in keys.iter().enumerate() {
            let c = &self.terms[*e];
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(k, &x)| {
                    if x == 1 {
                        self.vars.names[k].clone()
                    } else {
                        format!("{}^{}", self.vars.names[k], x)
                    }
                })
                .collect();
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        match self.trunc {
            Some(t) => write!(f, " + O(deg {})", t + 1),
            None => Ok(()),
        }
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r *= n - i;
        r /= i + 1;
    }
    r
}

/// `∏_{m ≥ 1} (1 − v·q^m)^{−m}` to total degree `d`.
pub fn macmahon(vars: &Arc<VarTable>, v: &[i32], q: &[i32], d: i64) -> Result<Series> {
    let dv = degree(v);
    let dq = degree(q);
    if dq < 1 || dv + dq < 1 {
        return Err(Error::NonConvergent(format!("deg v = {dv}, deg q = {dq}")));
    }
    let mut result = Series::one(vars).truncate(d);
    let mut m: i64 = 1;
    while dv + m * dq <= d {
        let x: Exps = v.iter().zip(q).map(|(a, b)| a + (m as i32) * b).collect();
        let dx = dv + m * dq;
        let mut terms = Vec::new();
        let mut k: i64 = 0;
        while k * dx <= d {
            let e: Exps = x.iter().map(|a| a * k as i32).collect();
            terms.push((e, binomial((m + k - 1) as u64, k as u64)));
            k += 1;
        }
        let factor = Series::from_terms(vars, terms, Some(d), 0);
        result = result.mul(&factor)?.truncate(d);
        m += 1;
    }
    Ok(result.with_floor(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q1() -> Arc<VarTable> {
        VarTable::q(1)
    }

    fn coeffs(s: &Series) -> Vec<i64> {
        let m = s.coeffs_by_degree();
        let top = s.trunc().unwrap();
        (0..=top)
            .map(|d| m.get(&d).map(|c| c.try_into().unwrap()).unwrap_or(0))
            .collect()
    }

    #[test]
    fn monomial_examples() {
        let v = VarTable::q(2);
        let s = Series::monomial(&v, &[1, 0], 1);
        assert_eq!(s.to_string(), "q_0");
        assert_eq!(Series::monomial(&v, &[0, 0], 3).to_string(), "3");
        let s = Series::monomial(&v, &[-1, 2], -1);
        assert_eq!(s.to_string(), "-q_0^-1*q_1^2");
        assert_eq!(s.trunc(), None);
    }

    #[test]
    fn product_examples() {
        let v = q1();
        let one = Series::one(&v);
        let q = Series::monomial(&v, &[1], 1);
        let f = one.add(&q).unwrap().truncate(5);
        assert_eq!(f.mul(&one).unwrap(), f);
        let g = one.sub(&q).unwrap().truncate(5);
        let fg = f.mul(&g).unwrap().truncate(2);
        assert_eq!(fg.coeffs_by_degree().into_iter().collect::<Vec<_>>(), vec![(0, 1.into()), (2, (-1).into())]);
        let qi = Series::monomial(&v, &[-1], 1);
        assert_eq!(qi.mul(&q).unwrap(), one);
    }

    #[test]
    fn product_truncation_accounts_for_negative_floors() {
        let v = q1();
        let f = Series::from_terms(&v, vec![(vec![-2], 1.into()), (vec![0], 1.into())], Some(3), -2);
        let g = Series::from_terms(&v, vec![(vec![0], 1.into()), (vec![1], 1.into())], Some(3), 0);
        let h = f.mul(&g).unwrap();
        assert_eq!(h.trunc(), Some(1));
        assert_eq!(h.floor(), -2);
    }

    #[test]
    fn invert_examples() {
        let v = q1();
        let f = Series::from_terms(&v, vec![(vec![0], 1.into()), (vec![1], (-1).into())], Some(6), 0);
        let g = f.invert_unit().unwrap();
        assert_eq!(coeffs(&g), vec![1; 7]);

        let v2 = VarTable::q(2);
        let f = Series::from_terms(&v2, vec![(vec![-1, 0], 1.into()), (vec![-1, 1], 1.into())], Some(5), -1);
        let g = f.invert_unit().unwrap();
        let back = f.mul(&g).unwrap();
        let t = back.trunc().unwrap();
        assert!(t >= 0);
        assert!(back.agrees_to(&Series::one(&v2), t));
        assert_eq!(g.coeff(&[1, 0]), 1.into());
        assert_eq!(g.coeff(&[1, 1]), (-1).into());

        let f = Series::from_terms(
            &v2,
            vec![(vec![0, 0], 1.into()), (vec![1, 0], 1.into()), (vec![0, 1], 1.into())],
            Some(4),
            0,
        );
        let g = f.invert_unit().unwrap();
        assert_eq!(g.coeff(&[1, 0]), (-1).into());
        assert_eq!(g.coeff(&[0, 1]), (-1).into());
        assert!(f.mul(&g).unwrap().agrees_to(&Series::one(&v2), 4));

        let bad = Series::from_terms(&v, vec![(vec![0], 2.into())], Some(3), 0);
        assert!(matches!(bad.invert_unit(), Err(Error::NotAUnit(_))));
        let bad = Series::from_terms(&v2, vec![(vec![1, 0], 1.into()), (vec![0, 1], 1.into())], Some(3), 0);
        assert!(matches!(bad.invert_unit(), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn bar_examples() {
        let v2 = VarTable::q(2);
        let f = Series::from_terms(&v2, vec![(vec![1, 3], 2.into()), (vec![0, 1], 1.into())], Some(5), 0);
        assert_eq!(f.bar_involution(2).unwrap(), f);
        let v3 = VarTable::q(3);
        let q1 = Series::monomial(&v3, &[0, 1, 0], 1);
        assert_eq!(q1.bar_involution(3).unwrap(), Series::monomial(&v3, &[0, 0, 1], 1));
        assert_eq!(q1.bar_involution(3).unwrap().bar_involution(3).unwrap(), q1);
        let other = VarTable::new(vec!["x".into()]).unwrap();
        assert_eq!(Series::one(&other).bar_involution(1), Err(Error::VarTableMismatch));
    }

    #[test]
    fn sign_twist_examples() {
        let v2 = VarTable::q(2);
        let f = Series::monomial(&v2, &[1, 0], 1);
        assert_eq!(f.sign_twist(&[false, false]), f);
        assert_eq!(f.sign_twist(&[true, false]), f.neg());
        let g = Series::monomial(&v2, &[-1, 1], 1);
        assert_eq!(g.sign_twist(&[true, false]), g.neg());
    }

    #[test]
    fn mismatch_is_reported() {
        let a = Series::one(&VarTable::q(1));
        let b = Series::one(&VarTable::q(2));
        assert_eq!(a.add(&b), Err(Error::VarTableMismatch));
        assert_eq!(a.mul(&b), Err(Error::VarTableMismatch));
    }

    #[test]
    fn macmahon_examples() {
        let v = q1();
        let m = macmahon(&v, &[0], &[1], 8).unwrap();
        assert_eq!(coeffs(&m), vec![1, 1, 3, 6, 13, 24, 48, 86, 160]);

        let v2 = VarTable::new(vec!["v".into(), "q".into()]).unwrap();
        let m = macmahon(&v2, &[1, 0], &[0, 1], 4).unwrap();
        assert_eq!(m.coeff(&[1, 1]), 1.into());

        let vq = VarTable::q(2);
        let m = macmahon(&vq, &[0, -1], &[1, 1], 3).unwrap();
        assert_eq!(m.coeff(&[1, 0]), 1.into());
        assert_eq!(m.min_degree(), Some(0));
        let lowest_nonconstant: Vec<_> = m.terms().keys().filter(|e| degree(e) == 1).collect();
        assert_eq!(lowest_nonconstant, vec![&vec![1, 0]]);

        assert!(matches!(macmahon(&v, &[0], &[0], 3), Err(Error::NonConvergent(_))));
        assert!(matches!(macmahon(&vq, &[-2, 0], &[1, 0], 3), Err(Error::NonConvergent(_))));
    }

    #[test]
    fn json_round_trip_is_sorted() {
        let v2 = VarTable::q(2);
        let f = Series::from_terms(
            &v2,
            vec![(vec![2, 0], 5.into()), (vec![-1, 1], (-7).into()), (vec![0, 0], 1.into())],
            Some(4),
            0,
        );
        let j = f.to_json();
        let es: Vec<_> = j.terms.iter().map(|t| t.e.clone()).collect();
        let mut sorted = es.clone();
        sorted.sort();
        assert_eq!(es, sorted);
        let text = serde_json::to_string(&j).unwrap();
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Series::from_json(&back).unwrap(), f);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn series_strategy(n: usize, t: i64) -> impl Strategy<Value = Series> {
            prop::collection::vec((prop::collection::vec(-1i32..3, n), -3i64..4), 0..6).prop_map(move |ts| {
                let vars = VarTable::q(n);
                Series::from_terms(&vars, ts.into_iter().map(|(e, c)| (e, BigInt::from(c))), Some(t), -(n as i64))
            })
        }

        fn unit_strategy(n: usize, t: i64) -> impl Strategy<Value = Series> {
            (series_strategy(n, t), any::<bool>()).prop_map(move |(s, neg)| {
                let vars = VarTable::q(n);
                let pos: Vec<_> = s
                    .terms()
                    .iter()
                    .filter(|(e, _)| degree(e) >= 1)
                    .map(|(e, c)| (e.clone(), c.clone()))
                    .collect();
                let lead = if neg { -1 } else { 1 };
                let mut terms = vec![(vec![0; n], BigInt::from(lead))];
                terms.extend(pos);
                Series::from_terms(&vars, terms, Some(t), 0)
            })
        }

        proptest! {
            #[test]
            fn ring_laws(f in series_strategy(2, 4), g in series_strategy(2, 4), h in series_strategy(2, 4)) {
                let lhs = f.add(&g).unwrap().mul(&h).unwrap();
                let rhs = f.mul(&h).unwrap().add(&g.mul(&h).unwrap()).unwrap();
                let t = lhs.trunc().unwrap().min(rhs.trunc().unwrap());
                prop_assert!(lhs.agrees_to(&rhs, t));
                let a = f.mul(&g).unwrap().mul(&h).unwrap();
                let b = f.mul(&g.mul(&h).unwrap()).unwrap();
                let t = a.trunc().unwrap().min(b.trunc().unwrap());
                prop_assert!(a.agrees_to(&b, t));
                let c1 = f.mul(&g).unwrap();
                let c2 = g.mul(&f).unwrap();
                prop_assert_eq!(c1, c2);
                prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
            }

            #[test]
            fn inverse_times_self_is_one(f in unit_strategy(2, 5)) {
                let g = f.invert_unit().unwrap();
                let prod = f.mul(&g).unwrap();
                prop_assert!(prod.agrees_to(&Series::one(f.vars()), prod.trunc().unwrap()));
            }

            #[test]
            fn bar_is_multiplicative(f in series_strategy(3, 4), g in series_strategy(3, 4)) {
                let lhs = f.mul(&g).unwrap().bar_involution(3).unwrap();
                let rhs = f.bar_involution(3).unwrap().mul(&g.bar_involution(3).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn truncation_is_monotone(f in unit_strategy(2, 6), g in series_strategy(2, 6)) {
                let a = f.truncate(5).invert_unit().unwrap().mul(&g.truncate(5)).unwrap();
                let b = f.truncate(4).invert_unit().unwrap().mul(&g.truncate(4)).unwrap();
                let t = b.trunc().unwrap();
                prop_assert_eq!(a.truncate(t), b);
            }
        }
    }
}
