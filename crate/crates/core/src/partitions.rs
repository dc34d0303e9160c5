//! Integer partitions, Maya diagrams, the r/c/rc boundary moves and the
//! colour statistics of cells.
//!
//! Two indexings coexist. Parts are 1-indexed (`part(1)` is the largest part)
//! as in the diagonal statistics; cells are 0-indexed pairs `(i, j)` with
//! `i` the row and `j < parts[i]` the column, as in the colour statistics.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduce an integer residue into `0..n`.
#[inline]
pub fn residue(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Vec<usize> {
        p.parts
    }
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Partition { parts })
    }

    /// Build from parts that may carry trailing zeros.
    pub fn from_padded(mut parts: Vec<usize>) -> Result<Self> {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition::new(parts)
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// 1-indexed part, zero past the length.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            panic!("parts are 1-indexed");
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// 1-indexed part for signed indices; zero outside `1..=len`.
    pub fn part_i(&self, i: i64) -> i64 {
        if i < 1 {
            0
        } else {
            self.parts.get((i - 1) as usize).copied().unwrap_or(0) as i64
        }
    }

    /// Length of 0-indexed row `i`.
    pub fn row(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        i >= 0 && j >= 0 && (j as usize) < self.row(i as usize)
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(i, &p)| (0..p).map(move |j| (i, j)))
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.row(0);
        let parts = (0..width)
            .map(|j| self.parts.iter().take_while(|&&p| p > j).count())
            .collect();
        Partition { parts }
    }

    /// `true` when every cell of `other` lies in `self`.
    pub fn contains_partition(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.parts.iter().zip(&self.parts).all(|(a, b)| a <= b)
    }

    /// All partitions of `n`, parts in lexicographically decreasing order.
    pub fn all_of_size(n: usize) -> Vec<Partition> {
        fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition { parts: cur.clone() });
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    pub fn all_up_to(n: usize) -> Vec<Partition> {
        (0..=n).flat_map(Partition::all_of_size).collect()
    }

    /// All partitions whose parts are at most `max_part` and size at most `max_size`.
    pub fn bounded(max_size: usize, max_part: usize) -> Vec<Partition> {
        Partition::all_up_to(max_size)
            .into_iter()
            .filter(|p| p.row(0) <= max_part)
            .collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad part {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

/// Convenience constructor for tests and examples. Panics on invalid input.
pub fn p(parts: &[usize]) -> Partition {
    Partition::new(parts.to_vec()).expect("valid partition")
}

/// A half-integer stored as twice its value, so always odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    /// The half-integer `k + 1/2`.
    pub fn above(k: i64) -> Self {
        HalfInt { twice: 2 * k + 1 }
    }

    pub fn from_twice(twice: i64) -> Self {
        assert!(twice.rem_euclid(2) == 1, "half-integers have odd doubles");
        HalfInt { twice }
    }

    pub fn twice(self) -> i64 {
        self.twice
    }

    /// `floor(self)`, so `self = floor + 1/2`.
    pub fn floor(self) -> i64 {
        (self.twice - 1).div_euclid(2)
    }

    pub fn shift(self, by: i64) -> Self {
        HalfInt { twice: self.twice + 2 * by }
    }

    pub fn is_positive(self) -> bool {
        self.twice > 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.twice)
    }
}

/// Finite description of a Maya diagram: its positive elements and the
/// negative half-integers missing from it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MayaDiagram {
    pub positives: BTreeSet<HalfInt>,
    pub negative_gaps: BTreeSet<HalfInt>,
    pub charge: i64,
}

impl MayaDiagram {
    pub fn new(positives: BTreeSet<HalfInt>, negative_gaps: BTreeSet<HalfInt>) -> Self {
        assert!(positives.iter().all(|t| t.is_positive()));
        assert!(negative_gaps.iter().all(|t| !t.is_positive()));
        let charge = positives.len() as i64 - negative_gaps.len() as i64;
        MayaDiagram { positives, negative_gaps, charge }
    }

    pub fn contains(&self, t: HalfInt) -> bool {
        if t.is_positive() {
            self.positives.contains(&t)
        } else {
            !self.negative_gaps.contains(&t)
        }
    }

    /// Elements in decreasing order, as many as asked for.
    pub fn elements_desc(&self, count: usize) -> Vec<HalfInt> {
        let top = self
            .positives
            .iter()
            .next_back()
            .copied()
            .unwrap_or(HalfInt::above(-1));
        let mut out = Vec::with_capacity(count);
        let mut t = top;
        while out.len() < count {
            if self.contains(t) {
                out.push(t);
            }
            t = t.shift(-1);
        }
        out
    }

    fn from_elements(elems: &BTreeSet<HalfInt>, tail_below: HalfInt) -> Self {
        // `elems` lists every element above `tail_below`; everything at or
        // below it is present.
        let positives = elems.iter().copied().filter(|t| t.is_positive()).collect();
        let mut gaps = BTreeSet::new();
        let mut t = HalfInt::above(-1);
        while t > tail_below {
            if !elems.contains(&t) {
                gaps.insert(t);
            }
            t = t.shift(-1);
        }
        MayaDiagram::new(positives, gaps)
    }

    /// The minimal positive element, if any.
    pub fn min_positive(&self) -> Option<HalfInt> {
        self.positives.iter().next().copied()
    }

    /// The largest negative gap, if any.
    pub fn max_gap(&self) -> Option<HalfInt> {
        self.negative_gaps.iter().next_back().copied()
    }

    pub fn without(&self, t: HalfInt) -> Self {
        let mut m = self.clone();
        if t.is_positive() {
            assert!(m.positives.remove(&t));
        } else {
            assert!(m.negative_gaps.insert(t));
        }
        m.charge = m.positives.len() as i64 - m.negative_gaps.len() as i64;
        m
    }

    pub fn with(&self, t: HalfInt) -> Self {
        let mut m = self.clone();
        if t.is_positive() {
            assert!(m.positives.insert(t));
        } else {
            assert!(m.negative_gaps.remove(&t));
        }
        m.charge = m.positives.len() as i64 - m.negative_gaps.len() as i64;
        m
    }
}

/// Maya diagram `{η_i − i + 1/2 + charge}`.
pub fn maya_diagram(eta: &Partition, charge: i64) -> MayaDiagram {
    let l = eta.len() as i64;
    let tail_below = HalfInt::above(-l - 1 + charge.min(0) - 1);
    let mut elems = BTreeSet::new();
    let mut i = 1i64;
    loop {
        let t = HalfInt::above(eta.part_i(i) - i + charge);
        if t <= tail_below {
            break;
        }
        elems.insert(t);
        i += 1;
    }
    let m = MayaDiagram::from_elements(&elems, tail_below);
    debug_assert_eq!(m.charge, charge);
    m
}

/// Inverse of [`maya_diagram`]: the partition whose diagram is `S − c(S)`.
pub fn partition_from_maya(s: &MayaDiagram) -> (Partition, i64) {
    let c = s.charge;
    let depth = s
        .negative_gaps
        .iter()
        .next()
        .map(|t| -t.floor())
        .unwrap_or(0);
    let count = (s.positives.len() as i64 + depth + c.abs() + 2) as usize;
    let elems = s.elements_desc(count);
    let parts: Vec<usize> = elems
        .iter()
        .enumerate()
        .map(|(idx, t)| {
            let v = t.floor() - c + idx as i64 + 1;
            debug_assert!(v >= 0);
            v as usize
        })
        .collect();
    (Partition::from_padded(parts).expect("Maya diagram gives a partition"), c)
}

/// `(d, d̃)` with `d = max{i : η_i ≥ i}` and `d̃ = max{i : η_i ≥ d}`.
pub fn diag_stats(eta: &Partition) -> Result<(usize, usize)> {
    if eta.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let d = (1..=eta.len()).filter(|&i| eta.part(i) >= i).max().unwrap();
    let dt = (1..=eta.len()).filter(|&i| eta.part(i) >= d).max().unwrap();
    Ok((d, dt))
}

/// `d(η)`, extended by `d(∅) = 0`.
pub fn durfee(eta: &Partition) -> usize {
    diag_stats(eta).map(|x| x.0).unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Derivation {
    R,
    C,
    RC,
}

/// The boundary move read off the Maya diagram: drop the smallest positive
/// element (r), add the largest negative gap (c), or both (rc).
pub fn derive_by_maya(eta: &Partition, kind: Derivation) -> Result<Partition> {
    if eta.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let s = maya_diagram(eta, 0);
    let a = s.min_positive().expect("nonempty partition has a positive element");
    let b = s.max_gap().expect("nonempty partition has a negative gap");
    let moved = match kind {
        Derivation::R => s.without(a),
        Derivation::C => s.with(b),
        Derivation::RC => s.without(a).with(b),
    };
    Ok(partition_from_maya(&moved).0)
}

/// The same moves in closed part-wise form.
pub fn derive_closed(eta: &Partition, kind: Derivation) -> Result<Partition> {
    let (d, dt) = diag_stats(eta)?;
    let l = eta.len();
    let parts: Vec<usize> = match kind {
        Derivation::R => (1..=l)
            .map(|i| if i < d { eta.part(i) + 1 } else { eta.part(i + 1) })
            .collect(),
        Derivation::C => (1..=l + 1)
            .map(|i| {
                if i <= dt {
                    eta.part(i) - 1
                } else if i == dt + 1 {
                    d - 1
                } else {
                    eta.part(i - 1)
                }
            })
            .collect(),
        Derivation::RC => (1..=l)
            .map(|i| if i < d || i > dt { eta.part(i) } else { d - 1 })
            .collect(),
    };
    Partition::from_padded(parts)
}

/// `η^r`, `η^c` or `η^rc`, computed both ways and cross-checked.
pub fn derive(eta: &Partition, kind: Derivation) -> Result<Partition> {
    let a = derive_by_maya(eta, kind)?;
    let b = derive_closed(eta, kind)?;
    assert_eq!(a, b, "Maya and closed forms disagree for {eta} ({kind:?})");
    Ok(a)
}

pub fn r(eta: &Partition) -> Partition {
    derive(eta, Derivation::R).expect("nonempty")
}

pub fn c(eta: &Partition) -> Partition {
    derive(eta, Derivation::C).expect("nonempty")
}

pub fn rc(eta: &Partition) -> Partition {
    derive(eta, Derivation::RC).expect("nonempty")
}

/// Which leg a partition sits on decides how its cells are coloured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorRole {
    /// colour `i − j`
    EdgeOrLeg3,
    /// colour `−j`
    Leg1,
    /// colour `i`
    Leg2,
}

pub fn cell_color(role: ColorRole, i: usize, j: usize, n: usize) -> usize {
    let (i, j) = (i as i64, j as i64);
    match role {
        ColorRole::EdgeOrLeg3 => residue(i - j, n),
        ColorRole::Leg1 => residue(-j, n),
        ColorRole::Leg2 => residue(i, n),
    }
}

pub fn colored_count(eta: &Partition, n: usize, role: ColorRole, l: usize) -> usize {
    eta.cells()
        .filter(|&(i, j)| cell_color(role, i, j, n) == residue(l as i64, n))
        .count()
}

/// `|η|_l` for every `l` under the `i − j` colouring.
pub fn colored_counts(eta: &Partition, n: usize) -> Vec<usize> {
    let mut v = vec![0; n];
    for (i, j) in eta.cells() {
        v[cell_color(ColorRole::EdgeOrLeg3, i, j, n)] += 1;
    }
    v
}

pub fn is_multi_regular(eta: &Partition, n: usize) -> bool {
    let counts = colored_counts(eta, n);
    eta.size() % n == 0 && counts.iter().all(|&c| c * n == eta.size())
}

/// Colour profile of the hook at `cell`.
pub fn hook_color_profile(nu: &Partition, n: usize, cell: (usize, usize)) -> Result<Vec<usize>> {
    let (i, j) = cell;
    if !nu.contains(i as i64, j as i64) {
        return Err(Error::CellOutOfShape(i, j));
    }
    let mut v = vec![0; n];
    v[residue(i as i64 - j as i64, n)] += 1;
    for jj in j + 1..nu.row(i) {
        v[residue(i as i64 - jj as i64, n)] += 1;
    }
    let mut ii = i + 1;
    while nu.row(ii) > j {
        v[residue(ii as i64 - j as i64, n)] += 1;
        ii += 1;
    }
    Ok(v)
}

/// `Σ ⌊(i+k)/n⌋` over cells.
pub fn a_stat(lambda: &Partition, k: usize, n: usize) -> u64 {
    lambda.cells().map(|(i, _)| ((i + k) / n) as u64).sum()
}

/// `Σ (−m·i − m′·j + 1)` over all cells, or over the cells with `i − j ≡ k (mod n)`.
pub fn c_stat(lambda: &Partition, m: i64, mp: i64, color_class: Option<(usize, usize)>) -> i64 {
    lambda
        .cells()
        .filter(|&(i, j)| match color_class {
            None => true,
            Some((k, n)) => cell_color(ColorRole::EdgeOrLeg3, i, j, n) == residue(k as i64, n),
        })
        .map(|(i, j)| -m * i as i64 - mp * j as i64 + 1)
        .sum()
}

/// Outcome of one named identity over a family of partitions.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    fn new(name: &str) -> Self {
        IdentityReport { name: name.to_string(), checked: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(witness());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exhaustive check of the structural facts about `η^r`, `η^c`, `η^rc` for
/// every nonempty partition of size at most `max_size`.
pub fn partition_lemma_suite(max_size: usize) -> Vec<IdentityReport> {
    use Derivation::*;
    let mut maya = IdentityReport::new("maya_matches_closed_form");
    let mut shrink = IdentityReport::new("derived_partitions_are_smaller");
    let mut length = IdentityReport::new("length_relations");
    let mut diag = IdentityReport::new("durfee_relations");
    let mut special = IdentityReport::new("special_values");
    let mut transpose = IdentityReport::new("transpose_commutes");
    let mut values = IdentityReport::new("value_sets");
    let mut conj = IdentityReport::new("durfee_under_conjugation");

    for size in 1..=max_size {
        for eta in Partition::all_of_size(size) {
            let mut derived = Vec::new();
            for kind in [R, C, RC] {
                let a = derive_by_maya(&eta, kind).unwrap();
                let b = derive_closed(&eta, kind).unwrap();
                maya.check(a == b, || format!("{eta} {kind:?}: {a} vs {b}"));
                derived.push(a);
            }
            let (er, ec, erc) = (&derived[0], &derived[1], &derived[2]);
            shrink.check(
                er.size() < size && ec.size() < size && erc.size() < size,
                || format!("{eta}"),
            );

            let (d, dt) = diag_stats(&eta).unwrap();
            let l = eta.len();
            let eta1 = eta.part(1);
            let ok_len = if d == 1 && eta1 == 1 {
                er.len() == l - 1 && ec.is_empty() && erc.is_empty()
            } else if d == 1 {
                er.len() == l - 1 && ec.len() == 1 && erc.is_empty()
            } else {
                er.len() == l - 1 && ec.len() == l + 1 && erc.len() == l
            };
            length.check(ok_len, || format!("{eta}"));

            let next = eta.part(d + 1);
            let dr = durfee(er);
            let dc = durfee(ec);
            let ok_r = (dr == d) == (next == d) && (dr + 1 == d) == (next < d);
            let ok_c = (dc == d) == (eta.part(d) > d) && (dc + 1 == d) == (eta.part(d) == d);
            let ok_rc = durfee(erc) + 1 == d;
            diag.check(ok_r && ok_c && ok_rc, || format!("{eta}"));

            let mut ok_sp = true;
            if d > 1 && dr + 1 == d {
                ok_sp &= dt == d;
            }
            if d > 1 && dr == d {
                ok_sp &= dt > d && (d + 1..=dt).all(|i| eta.part(i) == d);
            }
            if d == 1 {
                ok_sp &= dt == l && (2..=l).all(|i| eta.part(i) == 1);
            }
            ok_sp &= ec.is_empty() == (d == 1 && eta1 == 1);
            special.check(ok_sp, || format!("{eta}"));

            let et = eta.conjugate();
            let ok_t = ec.conjugate() == r(&et) && er.conjugate() == c(&et) && erc.conjugate() == rc(&et);
            transpose.check(ok_t, || format!("{eta}"));

            let bound = l + 3;
            let set_r: Vec<usize> = (1..=bound).filter(|&i| er.part(i) > i + 1).collect();
            let set_c: Vec<usize> = (1..=bound).filter(|&i| ec.part(i) + 1 >= i).collect();
            let ok_v = set_r == (1..d).collect::<Vec<_>>() && set_c == (1..=d).collect::<Vec<_>>();
            values.check(ok_v, || format!("{eta}: {set_r:?} {set_c:?}"));

            let (dp, dtp) = diag_stats(&et).unwrap();
            conj.check(dp == d && dtp == eta.part(d), || format!("{eta}"));
        }
    }
    vec![maya, shrink, length, diag, special, transpose, values, conj]
}
