//! Geometry of a leg triple: cylinders, the I⁻/II/III split, and the two
//! brute-force enumerators (3D partitions and raw AB configurations).

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{residue, Partition};

pub type Box3 = [i64; 3];

pub fn box_color(w: &Box3, n: usize) -> usize {
    residue(w[0] - w[1], n)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LegTriple {
    pub lambda: Partition,
    pub mu: Partition,
    pub nu: Partition,
}

impl LegTriple {
    pub fn new(lambda: Partition, mu: Partition, nu: Partition) -> Self {
        LegTriple { lambda, mu, nu }
    }

    pub fn vacuum() -> Self {
        LegTriple::default()
    }

    /// `(μ′, λ′, ν′)`, the triple related by the bar-transpose symmetry.
    pub fn transpose(&self) -> Self {
        LegTriple::new(self.mu.conjugate(), self.lambda.conjugate(), self.nu.conjugate())
    }

    pub fn legs(&self) -> [&Partition; 3] {
        [&self.lambda, &self.mu, &self.nu]
    }

    /// Is `w` in cylinder `l` (0, 1, 2 for the three legs)?
    pub fn in_cyl(&self, l: usize, w: &Box3) -> bool {
        let [i, j, k] = *w;
        match l {
            0 => self.lambda.contains(j, k),
            1 => self.mu.contains(k, i),
            2 => self.nu.contains(i, j),
            _ => unreachable!(),
        }
    }

    pub fn cyl_count(&self, w: &Box3) -> usize {
        (0..3).filter(|&l| self.in_cyl(l, w)).count()
    }

    /// Box of type I⁻: in some cylinder with a negative coordinate.
    pub fn in_iminus(&self, w: &Box3) -> bool {
        w.iter().any(|&x| x < 0) && self.cyl_count(w) > 0
    }

    pub fn in_ii(&self, w: &Box3) -> bool {
        w.iter().all(|&x| x >= 0) && self.cyl_count(w) == 2
    }

    pub fn in_iii(&self, w: &Box3) -> bool {
        self.cyl_count(w) == 3
    }

    /// Bound `b` with every II/III box inside `[0, b)³`.
    pub fn extent(&self) -> i64 {
        self.legs()
            .iter()
            .map(|p| p.row(0).max(p.len()))
            .max()
            .unwrap_or(0) as i64
    }
}

impl fmt::Display for LegTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};{};{}", self.lambda, self.mu, self.nu)
    }
}

impl FromStr for LegTriple {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let pieces: Vec<&str> = s.split(';').collect();
        if pieces.len() != 3 {
            return Err(Error::Parse(format!("expected three ';'-separated partitions, got {s:?}")));
        }
        Ok(LegTriple::new(pieces[0].parse()?, pieces[1].parse()?, pieces[2].parse()?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CylPart {
    Plus,
    Minus,
}

/// Per cylinder: `None` if the box is outside it, else which half.
pub fn cyl_membership(legs: &LegTriple, w: &Box3) -> [Option<CylPart>; 3] {
    let nonneg = w.iter().all(|&x| x >= 0);
    let mut out = [None; 3];
    for (l, slot) in out.iter_mut().enumerate() {
        if legs.in_cyl(l, w) {
            *slot = Some(if nonneg { CylPart::Plus } else { CylPart::Minus });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSets {
    /// `ii_hat[l]`: boxes in the other two cylinders but not in cylinder `l`.
    pub ii_hat: [Vec<Box3>; 3],
    pub iii: Vec<Box3>,
}

impl RegionSets {
    pub fn ii(&self) -> Vec<Box3> {
        let mut v: Vec<Box3> = self.ii_hat.iter().flatten().copied().collect();
        v.sort();
        v
    }

    pub fn ii_len(&self) -> usize {
        self.ii_hat.iter().map(Vec::len).sum()
    }

    pub fn iii_len(&self) -> usize {
        self.iii.len()
    }

    pub fn ii_colored(&self, n: usize) -> Vec<usize> {
        color_counts(self.ii_hat.iter().flatten(), n)
    }

    pub fn iii_colored(&self, n: usize) -> Vec<usize> {
        color_counts(self.iii.iter(), n)
    }

    /// `|II| + 2|III|`, the renormalisation shift.
    pub fn shift(&self) -> i64 {
        (self.ii_len() + 2 * self.iii_len()) as i64
    }
}

pub fn color_counts<'a>(boxes: impl IntoIterator<Item = &'a Box3>, n: usize) -> Vec<usize> {
    let mut v = vec![0; n];
    for w in boxes {
        v[box_color(w, n)] += 1;
    }
    v
}

pub fn region_sets(legs: &LegTriple) -> RegionSets {
    let b = legs.extent();
    let mut ii_hat: [Vec<Box3>; 3] = Default::default();
    let mut iii = Vec::new();
    for i in 0..b {
        for j in 0..b {
            for k in 0..b {
                let w = [i, j, k];
                let inside: Vec<bool> = (0..3).map(|l| legs.in_cyl(l, &w)).collect();
                match inside.iter().filter(|&&x| x).count() {
                    3 => iii.push(w),
                    2 => {
                        let missing = inside.iter().position(|&x| !x).unwrap();
                        ii_hat[missing].push(w);
                    }
                    _ => {}
                }
            }
        }
    }
    RegionSets { ii_hat, iii }
}

/// `‖π_min‖` by colour: `−|II|_l − 2|III|_l`.
pub fn pi_min_colored_volume(legs: &LegTriple, n: usize) -> Vec<i32> {
    let rs = region_sets(legs);
    let ii = rs.ii_colored(n);
    let iii = rs.iii_colored(n);
    (0..n).map(|l| -(ii[l] as i32) - 2 * iii[l] as i32).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxDelta {
    pub extra: Vec<Box3>,
}

/// Height-function view of a 3D partition asymptotic to the legs: `h(i,j)`
/// is the number of boxes above `(i,j)`, infinite on `ν`.
pub struct DtFrame<'a> {
    imax: usize,
    jmax: usize,
    heights: &'a [u32],
    hmin: &'a [u32],
    colors: &'a [u32],
    pub extra: usize,
}

impl DtFrame<'_> {
    /// Extra boxes per colour for the modulus the enumerator was built with.
    pub fn colors(&self) -> &[u32] {
        self.colors
    }

    pub fn to_delta(&self) -> BoxDelta {
        let mut extra = Vec::new();
        for i in 0..self.imax {
            for j in 0..self.jmax {
                let c = i * self.jmax + j;
                for k in self.hmin[c]..self.heights[c] {
                    extra.push([i as i64, j as i64, k as i64]);
                }
            }
        }
        extra.sort();
        BoxDelta { extra }
    }
}

const INF: u32 = u32::MAX;

struct DtEnum<'f, F: FnMut(&DtFrame)> {
    imax: usize,
    jmax: usize,
    n: usize,
    hmin: Vec<u32>,
    heights: Vec<u32>,
    colors: Vec<u32>,
    order: Vec<usize>,
    k_max: usize,
    visit: &'f mut F,
}

impl<F: FnMut(&DtFrame)> DtEnum<'_, F> {
    fn emit(&mut self, extra: usize) {
        let frame = DtFrame {
            imax: self.imax,
            jmax: self.jmax,
            heights: &self.heights,
            hmin: &self.hmin,
            colors: &self.colors,
            extra,
        };
        (self.visit)(&frame);
    }

    fn go(&mut self, pos: usize, extra: usize) {
        if pos == self.order.len() || extra == self.k_max {
            self.emit(extra);
            return;
        }
        let c = self.order[pos];
        let (i, j) = (c / self.jmax, c % self.jmax);
        let up = if i > 0 { self.heights[c - self.jmax] } else { INF };
        let left = if j > 0 { self.heights[c - 1] } else { INF };
        let base = self.hmin[c];
        let cap = up.min(left).min(base + (self.k_max - extra) as u32);
        let color = residue(i as i64 - j as i64, self.n);
        for h in base..=cap {
            let e = (h - base) as usize;
            self.heights[c] = h;
            self.colors[color] += e as u32;
            self.go(pos + 1, extra + e);
            self.colors[color] -= e as u32;
        }
        self.heights[c] = base;
    }
}

/// Visit every 3D partition with at most `k_max` boxes beyond `π_min`, in a
/// fixed order. Extra boxes are tallied by colour `i − j mod n`.
pub fn for_each_dt<F: FnMut(&DtFrame)>(legs: &LegTriple, n: usize, k_max: usize, mut visit: F) {
    let (lam, mu, nu) = (&legs.lambda, &legs.mu, &legs.nu);
    let mu_t = mu.conjugate();
    // an extra box at (i,j) forces one extra box in each column of the
    // row/column segment reaching back to the cylinders
    let imax = mu.row(0).max(nu.len()) + k_max;
    let jmax = lam.len().max(nu.row(0)) + k_max;
    let mut hmin = vec![0; imax * jmax];
    let mut order = Vec::new();
    for i in 0..imax {
        for j in 0..jmax {
            let c = i * jmax + j;
            if nu.contains(i as i64, j as i64) {
                hmin[c] = INF;
            } else {
                hmin[c] = lam.row(j).max(mu_t.row(i)) as u32;
                order.push(c);
            }
        }
    }
    let heights = hmin.clone();
    let mut e = DtEnum {
        imax,
        jmax,
        n,
        hmin,
        heights,
        colors: vec![0; n],
        order,
        k_max,
        visit: &mut visit,
    };
    e.go(0, 0);
}

pub fn enumerate_dt(legs: &LegTriple, k_max: usize) -> Vec<BoxDelta> {
    let mut out = Vec::new();
    for_each_dt(legs, 1, k_max, |f| out.push(f.to_delta()));
    out
}

/// Is `boxes ∪ π_min` closed under stepping toward the origin?
pub fn dt_closure_holds(legs: &LegTriple, delta: &BoxDelta) -> bool {
    let set: HashSet<Box3> = delta.extra.iter().copied().collect();
    let in_pi = |w: &Box3| set.contains(w) || (w.iter().all(|&x| x >= 0) && legs.cyl_count(w) > 0);
    delta.extra.iter().all(|w| {
        w.iter().all(|&x| x >= 0)
            && legs.cyl_count(w) == 0
            && (0..3).all(|a| {
                let mut v = *w;
                v[a] -= 1;
                v[a] < 0 || in_pi(&v)
            })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbConfig {
    pub a: Vec<Box3>,
    pub b: Vec<Box3>,
}

impl AbConfig {
    pub fn new(mut a: Vec<Box3>, mut b: Vec<Box3>) -> Self {
        a.sort();
        b.sort();
        AbConfig { a, b }
    }

    pub fn size(&self) -> usize {
        self.a.len() + self.b.len()
    }

    pub fn colored_counts(&self, n: usize) -> Vec<usize> {
        color_counts(self.a.iter().chain(self.b.iter()), n)
    }
}

/// Closure conditions: A is up-closed inside I⁻∪III, B inside II∪III.
pub fn ab_closure_holds(legs: &LegTriple, cfg: &AbConfig) -> bool {
    let a: HashSet<Box3> = cfg.a.iter().copied().collect();
    let b: HashSet<Box3> = cfg.b.iter().copied().collect();
    let a_dom = |w: &Box3| legs.in_iminus(w) || legs.in_iii(w);
    let b_dom = |w: &Box3| legs.in_ii(w) || legs.in_iii(w);
    let closed = |set: &HashSet<Box3>, dom: &dyn Fn(&Box3) -> bool| {
        set.iter().all(|w| {
            dom(w)
                && (0..3).all(|ax| {
                    let mut v = *w;
                    v[ax] += 1;
                    !dom(&v) || set.contains(&v)
                })
        })
    };
    closed(&a, &a_dom) && closed(&b, &b_dom)
}

/// Up-closed subsets of `dom` (closure taken inside `dom`), by size.
fn upsets(dom: &[Box3], limit: usize) -> Vec<Vec<Box3>> {
    let set: HashSet<Box3> = dom.iter().copied().collect();
    let mut order: Vec<Box3> = dom.to_vec();
    // decide larger boxes first so successors are settled before a box
    order.sort_by_key(|w| std::cmp::Reverse(w[0] + w[1] + w[2]));
    let mut out = Vec::new();
    let mut chosen: HashSet<Box3> = HashSet::new();
    fn rec(
        idx: usize,
        order: &[Box3],
        set: &HashSet<Box3>,
        chosen: &mut HashSet<Box3>,
        limit: usize,
        out: &mut Vec<Vec<Box3>>,
    ) {
        if idx == order.len() {
            let mut v: Vec<Box3> = chosen.iter().copied().collect();
            v.sort();
            out.push(v);
            return;
        }
        let w = order[idx];
        rec(idx + 1, order, set, chosen, limit, out);
        let succ_ok = (0..3).all(|ax| {
            let mut v = w;
            v[ax] += 1;
            !set.contains(&v) || chosen.contains(&v)
        });
        if succ_ok && chosen.len() < limit {
            chosen.insert(w);
            rec(idx + 1, order, set, chosen, limit, out);
            chosen.remove(&w);
        }
    }
    rec(0, &order, &set, &mut chosen, limit, &mut out);
    out.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    out
}

/// A leg cross-section as a list of cells, with the inward neighbours of
/// each and the III box its negative column runs into.
struct LegShape {
    cells: Vec<(usize, usize)>,
    inward: Vec<Vec<usize>>,
    gate: Vec<Option<Box3>>,
}

impl LegShape {
    fn new(shape: &Partition, legs: &LegTriple, to_box: impl Fn(usize, usize, i64) -> Box3) -> Self {
        let cells: Vec<(usize, usize)> = shape.cells().collect();
        let inward = cells
            .iter()
            .map(|&(a, b)| {
                cells
                    .iter()
                    .enumerate()
                    .filter(|(_, &(x, y))| (x + 1 == a && y == b) || (x == a && y + 1 == b))
                    .map(|(idx, _)| idx)
                    .collect()
            })
            .collect();
        let gate = cells
            .iter()
            .map(|&(a, b)| {
                let w = to_box(a, b, 0);
                legs.in_iii(&w).then_some(w)
            })
            .collect();
        LegShape { cells, inward, gate }
    }

    /// Depth functions, weakly increasing away from the origin corner, with
    /// total at most `budget`; cells in `blocked` must stay at depth 0.
    fn fillings(&self, budget: usize, blocked: &[bool]) -> Vec<(usize, Vec<u32>)> {
        let mut out = Vec::new();
        let mut d = vec![0u32; self.cells.len()];
        self.fill(0, budget, blocked, &mut d, 0, &mut out);
        out.sort_by_key(|(s, _)| *s);
        out
    }

    fn fill(
        &self,
        idx: usize,
        budget: usize,
        blocked: &[bool],
        d: &mut Vec<u32>,
        used: usize,
        out: &mut Vec<(usize, Vec<u32>)>,
    ) {
        if idx == self.cells.len() {
            out.push((used, d.clone()));
            return;
        }
        let lo = self.inward[idx].iter().map(|&p| d[p]).max().unwrap_or(0);
        let hi = if blocked[idx] { 0 } else { (budget - used) as u32 };
        let mut v = lo;
        while v <= hi {
            d[idx] = v;
            self.fill(idx + 1, budget, blocked, d, used + v as usize, out);
            v += 1;
        }
        d[idx] = 0;
    }
}

/// Every AB configuration with `|A| + |B| ≤ budget`, in a fixed order.
pub fn for_each_ab<F: FnMut(&AbConfig)>(legs: &LegTriple, budget: usize, mut visit: F) {
    let rs = region_sets(legs);
    let b_dom: Vec<Box3> = rs.ii().into_iter().chain(rs.iii.iter().copied()).collect();
    let b_sets = upsets(&b_dom, budget);
    let u_sets = upsets(&rs.iii, budget);
    let shapes = [
        LegShape::new(&legs.lambda, legs, |j, k, t| [-t, j as i64, k as i64]),
        LegShape::new(&legs.mu, legs, |k, i, t| [i as i64, -t, k as i64]),
        LegShape::new(&legs.nu, legs, |i, j, t| [i as i64, j as i64, -t]),
    ];
    let col_box = |leg: usize, cell: (usize, usize), t: i64| -> Box3 {
        let (a, b) = (cell.0 as i64, cell.1 as i64);
        match leg {
            0 => [-t, a, b],
            1 => [b, -t, a],
            _ => [a, b, -t],
        }
    };
    for bset in &b_sets {
        for uset in &u_sets {
            let used = bset.len() + uset.len();
            if used > budget {
                continue;
            }
            let rem = budget - used;
            let uhash: HashSet<Box3> = uset.iter().copied().collect();
            let fills: Vec<Vec<(usize, Vec<u32>)>> = shapes
                .iter()
                .map(|s| {
                    let blocked: Vec<bool> =
                        s.gate.iter().map(|g| g.is_some_and(|w| !uhash.contains(&w))).collect();
                    s.fillings(rem, &blocked)
                })
                .collect();
            for (s0, d0) in &fills[0] {
                for (s1, d1) in fills[1].iter().take_while(|(s, _)| s0 + s <= rem) {
                    for (_, d2) in fills[2].iter().take_while(|(s, _)| s0 + s1 + s <= rem) {
                        let mut a: Vec<Box3> = uset.clone();
                        for (leg, depths) in [d0, d1, d2].into_iter().enumerate() {
                            for (idx, &dep) in depths.iter().enumerate() {
                                for t in 1..=dep as i64 {
                                    a.push(col_box(leg, shapes[leg].cells[idx], t));
                                }
                            }
                        }
                        visit(&AbConfig::new(a, bset.clone()));
                    }
                }
            }
        }
    }
}

pub fn enumerate_ab_all(legs: &LegTriple, budget: usize) -> Vec<AbConfig> {
    let mut out = Vec::new();
    for_each_ab(legs, budget, |c| out.push(c.clone()));
    out
}

/// Every box set in the given finite domain closed under the given
/// successor test; used by tests as a slow independent oracle.
pub fn brute_force_ab(legs: &LegTriple, budget: usize) -> BTreeSet<AbConfig> {
    let rs = region_sets(legs);
    let mut a_dom: Vec<Box3> = rs.iii.clone();
    let depth = budget as i64;
    for (j, k) in legs.lambda.cells() {
        for t in 1..=depth {
            a_dom.push([-t, j as i64, k as i64]);
        }
    }
    for (k, i) in legs.mu.cells() {
        for t in 1..=depth {
            a_dom.push([i as i64, -t, k as i64]);
        }
    }
    for (i, j) in legs.nu.cells() {
        for t in 1..=depth {
            a_dom.push([i as i64, j as i64, -t]);
        }
    }
    let b_dom: Vec<Box3> = rs.ii().into_iter().chain(rs.iii.iter().copied()).collect();
    let subsets = |dom: &[Box3]| -> Vec<Vec<Box3>> {
        let mut out = vec![Vec::new()];
        for &w in dom {
            let more: Vec<Vec<Box3>> = out
                .iter()
                .filter(|s| s.len() < budget)
                .map(|s| {
                    let mut t = s.clone();
                    t.push(w);
                    t
                })
                .collect();
            out.extend(more);
        }
        out
    };
    let mut found = BTreeSet::new();
    for a in subsets(&a_dom) {
        for b in subsets(&b_dom) {
            if a.len() + b.len() > budget {
                continue;
            }
            let cfg = AbConfig::new(a.clone(), b);
            if ab_closure_holds(legs, &cfg) {
                found.insert(cfg);
            }
        }
    }
    found
}
