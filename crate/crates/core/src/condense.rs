//! Graphical condensation on the series level: the K monomials, the ϖ/ϑ
//! weight evaluators with every quotient identity they satisfy, the vacuum
//! product, and the recurrence and correspondence checkers.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::dtvertex::dt_vertex;
use crate::error::{Error, Result};
use crate::partitions::{c, colored_counts, diag_stats, is_multi_regular, r, rc, residue, Partition};
use crate::ptvertex::pt_vertex_enum;
use crate::regions::{pi_min_colored_volume, region_sets, LegTriple};
use crate::series::{macmahon, Series, VarTable};

/// A Laurent monomial `∏ q_k^{e_k}` with coefficient 1. With `n > 0` the
/// indices live in `ℤ/n`; `n = 0` keeps every integer index apart, which is
/// the strongest form in which the weight identities can be tested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMonomial {
    n: usize,
    exps: BTreeMap<i64, i64>,
}

impl WeightMonomial {
    pub fn one(n: usize) -> Self {
        WeightMonomial { n, exps: BTreeMap::new() }
    }

    pub fn q(n: usize, k: i64, e: i64) -> Self {
        let mut m = Self::one(n);
        m.push(k, e);
        m
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    fn key(&self, k: i64) -> i64 {
        if self.n == 0 {
            k
        } else {
            residue(k, self.n) as i64
        }
    }

    /// Multiply by `q_k^e`.
    pub fn push(&mut self, k: i64, e: i64) {
        if e == 0 {
            return;
        }
        let key = self.key(k);
        let slot = self.exps.entry(key).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.exps.remove(&key);
        }
    }

    pub fn exponent(&self, k: i64) -> i64 {
        self.exps.get(&self.key(k)).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.exps.values().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "monomials over different index sets");
        let mut out = self.clone();
        for (&k, &e) in &other.exps {
            out.push(k, e);
        }
        out
    }

    pub fn pow(&self, p: i64) -> Self {
        WeightMonomial { n: self.n, exps: self.exps.iter().map(|(&k, &e)| (k, e * p)).collect() }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    /// `q_k ↦ q_{−k}`.
    pub fn bar(&self) -> Self {
        let mut out = Self::one(self.n);
        for (&k, &e) in &self.exps {
            out.push(-k, e);
        }
        out
    }

    /// Exponent vector over `q_0 … q_{n−1}`; needs `n > 0`.
    pub fn to_exps(&self) -> Vec<i32> {
        assert!(self.n > 0, "free-index monomial has no exponent vector");
        let mut v = vec![0i32; self.n];
        for (&k, &e) in &self.exps {
            v[k as usize] += e as i32;
        }
        v
    }

    pub fn to_series(&self) -> Series {
        Series::monomial(&VarTable::q(self.n), &self.to_exps(), 1)
    }

    /// Reduce a free-index monomial modulo `n`.
    pub fn reduce(&self, n: usize) -> Self {
        let mut out = Self::one(n);
        for (&k, &e) in &self.exps {
            out.push(k, e);
        }
        out
    }
}

impl fmt::Display for WeightMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.exps.iter().map(|(k, e)| format!("q{k}^{e}")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

fn part(eta: &Partition, i: i64) -> i64 {
    eta.part_i(i)
}

fn len(eta: &Partition) -> i64 {
    eta.len() as i64
}

fn conj(eta: &Partition) -> Partition {
    eta.conjugate()
}

/// `(d, d̃)` as signed integers.
fn dd(eta: &Partition) -> Result<(i64, i64)> {
    let (d, dt) = diag_stats(eta)?;
    Ok((d as i64, dt as i64))
}

// ---------------------------------------------------------------------------
// ϖ evaluators

pub fn varpi1(m: i64, l: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 0..=m {
        for j in 0..=m - l {
            w.push(j - i + k, m - i);
        }
    }
    w
}

pub fn varpi2(eta: &Partition, m: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        for j in 0..=m {
            w.push(j - i + k, part(eta, i));
        }
    }
    w
}

pub fn varpi3(eta: &Partition, m: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        for j in 0..part(eta, i) {
            w.push(j - i + k, -m + i);
        }
    }
    w
}

pub fn varpi4(eta: &Partition, m: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        let e = part(eta, i);
        let top = if i <= e { i - k } else { e };
        for j in 1..=top {
            w.push(m - i + j + k - 1, m + e - i + k - 1);
        }
    }
    w
}

pub fn varpi5(eta: &Partition, m: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        let e = part(eta, i);
        let top = if i <= e { i - k } else { e };
        for j in 1..=top {
            w.push(i - j - k - m + 1, e - j);
        }
    }
    w
}

pub fn varpi6(eta: &Partition, m: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::q(n, m, -(m + part(eta, 1)));
    for i in 2..=len(eta) {
        let e = part(eta, i);
        let top = if i <= e + 1 { i - 2 } else { e };
        for j in 1..=top {
            w.push(m + j + 1 - i, m + 1 + e - i);
        }
    }
    w
}

pub fn varpi7(eta: &Partition, m: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::q(n, -m, -part(eta, 1));
    for i in 2..=len(eta) {
        let e = part(eta, i);
        let top = if i <= e + 1 { i - 2 } else { e };
        for j in 1..=top {
            w.push(i - j - m - 1, e - j);
        }
    }
    w
}

/// `ϖ_id` with the argument list of that evaluator: `ϖ1(m,l,k)`,
/// `ϖ2..5(η,m,k)`, `ϖ6,7(η,m)`.
pub fn varpi(id: u8, eta: &Partition, args: &[i64], n: usize) -> WeightMonomial {
    match id {
        1 => varpi1(args[0], args[1], args[2], n),
        2 => varpi2(eta, args[0], args[1], n),
        3 => varpi3(eta, args[0], args[1], n),
        4 => varpi4(eta, args[0], args[1], n),
        5 => varpi5(eta, args[0], args[1], n),
        6 => varpi6(eta, args[0], n),
        7 => varpi7(eta, args[0], n),
        _ => panic!("no ϖ{id}"),
    }
}

// ---------------------------------------------------------------------------
// ϑ evaluators

pub fn vartheta1(eta: &Partition, m: i64, k: i64, l: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=m - len(eta) - l {
        for j in 1..=i {
            w.push(-m + i - j + 1, i + k);
        }
    }
    w
}

pub fn vartheta2(eta: &Partition, m: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        let e = part(eta, i);
        let top = if i <= e { m - e } else { m - i };
        for j in 1..=top {
            w.push(-i - j + k + 1, m + e - i - k);
        }
    }
    w
}

pub fn vartheta3(eta: &Partition, m: i64, k: i64, l: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=m - len(eta) - 1 {
        for j in len(eta) + 1..=m - i {
            w.push(i + j - l, m + i - k);
        }
    }
    w
}

pub fn vartheta4(eta: &Partition, m: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        let e = part(eta, i);
        let top = if i <= e { m - e - k } else { m - i - k };
        for j in 1..=top {
            w.push(i + j + k - 1, m + e + j + k - 1);
        }
    }
    w
}

pub fn vartheta5(eta: &Partition, m: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        let e = part(eta, i);
        let top = if i <= e + 1 { m - e - 1 } else { m - i };
        for j in 1..=top {
            w.push(-i - j + k + 1, m + e - i - k + 1);
        }
    }
    w
}

pub fn vartheta6(eta: &Partition, m: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        let e = part(eta, i);
        let top = if i <= e + 1 { m - e - 1 } else { m - i };
        for j in 1..=top {
            w.push(i + j - 1, m + e + j);
        }
    }
    w
}

pub fn vartheta7(eta: &Partition, m: i64, k: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        let e = part(eta, i);
        let top = if i < e - 1 { m - e + k } else { m - i + k - 1 };
        for j in 1..=top {
            w.push(-i - j + k, m + e - i - 1);
        }
    }
    w
}

pub fn vartheta8(eta: &Partition, m: i64, k: i64, l: i64, n: usize) -> WeightMonomial {
    let mut w = WeightMonomial::one(n);
    for i in 1..=len(eta) {
        let e = part(eta, i);
        let top = if i < e - k { m - e } else { m - i - k };
        for j in 1..=top {
            w.push(i + j + k - l - 1, m + e + j - 2 * l - 1);
        }
    }
    w
}

/// `ϑ_id` with its argument list: `ϑ1,3,8(η,m,k,l)`, `ϑ2,4,5,7(η,m,k)`,
/// `ϑ6(η,m)`.
pub fn vartheta(id: u8, eta: &Partition, args: &[i64], n: usize) -> WeightMonomial {
    match id {
        1 => vartheta1(eta, args[0], args[1], args[2], n),
        2 => vartheta2(eta, args[0], args[1], n),
        3 => vartheta3(eta, args[0], args[1], args[2], n),
        4 => vartheta4(eta, args[0], args[1], n),
        5 => vartheta5(eta, args[0], args[1], n),
        6 => vartheta6(eta, args[0], n),
        7 => vartheta7(eta, args[0], args[1], n),
        8 => vartheta8(eta, args[0], args[1], args[2], n),
        _ => panic!("no ϑ{id}"),
    }
}

// ---------------------------------------------------------------------------
// Minimal (DT) and base (PT) configuration weights

/// Which configuration of the condensation square a weight belongs to. The
/// shifted frames carry the legs modified as `(λ^r, μ^c, ν)` for `Up`,
/// `(λ^c, μ^r, ν)` for `Down`, `(λ^r, μ, ν^c)` for `LeftUp`,
/// `(λ^c, μ, ν^r)` for `RightDown`, `(λ, μ^r, ν^c)` for `LeftDown` and
/// `(λ, μ^c, ν^r)` for `RightUp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Frame {
    Centre,
    Up,
    Down,
    LeftUp,
    RightDown,
    LeftDown,
    RightUp,
}

impl Frame {
    pub const ALL: [Frame; 7] =
        [Frame::Centre, Frame::Up, Frame::Down, Frame::LeftUp, Frame::RightDown, Frame::LeftDown, Frame::RightUp];

    /// The legs that must be nonempty for this frame to make sense.
    fn needs(self) -> [bool; 3] {
        match self {
            Frame::Centre => [false, false, false],
            Frame::Up | Frame::Down => [true, true, false],
            Frame::LeftUp | Frame::RightDown => [true, false, true],
            Frame::LeftDown | Frame::RightUp => [false, true, true],
        }
    }

    pub fn applies(self, legs: &LegTriple) -> bool {
        self.needs().iter().zip(legs.legs()).all(|(need, p)| !need || !p.is_empty())
    }

    /// The modified leg triple.
    pub fn shifted(self, legs: &LegTriple) -> LegTriple {
        let (l, m, v) = (&legs.lambda, &legs.mu, &legs.nu);
        let t = |a: Partition, b: Partition, c: Partition| LegTriple::new(a, b, c);
        match self {
            Frame::Centre => legs.clone(),
            Frame::Up => t(r(l), c(m), v.clone()),
            Frame::Down => t(c(l), r(m), v.clone()),
            Frame::LeftUp => t(r(l), m.clone(), c(v)),
            Frame::RightDown => t(c(l), m.clone(), r(v)),
            Frame::LeftDown => t(l.clone(), r(m), c(v)),
            Frame::RightUp => t(l.clone(), c(m), r(v)),
        }
    }
}

fn frame_check(frame: Frame, legs: &LegTriple) -> Result<()> {
    if frame.applies(legs) {
        Ok(())
    } else {
        Err(Error::EmptyPartition)
    }
}

/// Product over the rows `i` of `η` of `∏_{j=lo}^{hi(i)} q_{idx(i,j)}^{exp(i,j)}`.
fn rows(
    w: &mut WeightMonomial,
    eta: &Partition,
    hi: impl Fn(i64, i64) -> i64,
    idx: impl Fn(i64, i64) -> i64,
    exp: impl Fn(i64, i64, i64) -> i64,
) {
    for i in 1..=len(eta) {
        let e = part(eta, i);
        for j in 1..=hi(i, e) {
            w.push(idx(i, j), exp(i, j, e));
        }
    }
}

fn block(w: &mut WeightMonomial, i_hi: i64, j_hi: i64, idx: impl Fn(i64, i64) -> i64, exp: impl Fn(i64) -> i64) {
    for i in 0..=i_hi {
        for j in 0..=j_hi {
            w.push(idx(i, j), exp(i));
        }
    }
}

fn cells(w: &mut WeightMonomial, eta: &Partition, idx: impl Fn(i64, i64) -> i64, exp: impl Fn(i64) -> i64) {
    for i in 1..=len(eta) {
        for j in 0..part(eta, i) {
            w.push(idx(i, j), exp(i));
        }
    }
}

fn columns(w: &mut WeightMonomial, eta: &Partition, j_hi: i64, idx: impl Fn(i64, i64) -> i64) {
    for i in 1..=len(eta) {
        for j in 0..=j_hi {
            w.push(idx(i, j), part(eta, i));
        }
    }
}

/// `ω̃` of the minimal dimer configuration for `frame`, as the row-by-row
/// product of horizontal dimer weights.
pub fn dt_weight_explicit(frame: Frame, legs: &LegTriple, big_n: i64, n: usize) -> Result<WeightMonomial> {
    frame_check(frame, legs)?;
    let s = frame.shifted(legs);
    let nn = big_n;
    let lt = conj(&s.lambda);
    let (mu, nu) = (&s.mu, &s.nu);
    let mut w = WeightMonomial::one(n);
    // staircase under the λ corner, shared by the unshifted frames
    let lam_upper = |w: &mut WeightMonomial| {
        rows(w, &lt, |i, e| if i <= e { i - 1 } else { e }, |i, j| nn - i + j, |i, _, e| nn - i + e)
    };
    match frame {
        Frame::Centre => {
            block(&mut w, nn - 1, nn - 1, |i, j| j - i, |i| nn - 1 - i);
            columns(&mut w, &lt, nn - 1, |i, j| j - i + 1);
            columns(&mut w, mu, nn - 1, |i, j| i - j - 1);
            cells(&mut w, nu, |i, j| j - i + 1, |i| -nn + i);
            lam_upper(&mut w);
            rows(&mut w, mu, |i, e| if i <= e { i - 1 } else { e }, |i, j| i - j - nn, |_, j, e| e - j);
        }
        Frame::Up => {
            block(&mut w, nn, nn, |i, j| j - i, |i| nn - i);
            columns(&mut w, &lt, nn, |i, j| j - i + 1);
            columns(&mut w, mu, nn, |i, j| i - j - 1);
            cells(&mut w, nu, |i, j| j - i + 1, |i| -nn - 1 + i);
            lam_corner_shifted(&mut w, &lt, nn);
            mu_corner_shifted(&mut w, mu, nn);
        }
        Frame::Down => {
            block(&mut w, nn - 2, nn - 2, |i, j| j - i, |i| nn - i - 2);
            columns(&mut w, &lt, nn - 2, |i, j| j - i + 1);
            columns(&mut w, mu, nn - 2, |i, j| i - j - 1);
            cells(&mut w, nu, |i, j| j - i + 1, |i| -nn + 1 + i);
            rows(&mut w, &lt, |i, e| if i <= e { i } else { e }, |i, j| nn - i + j - 1, |i, _, e| nn + e - i - 1);
            rows(&mut w, mu, |i, e| if i <= e { i } else { e }, |i, j| i - j - nn + 1, |_, j, e| e - j);
        }
        Frame::LeftUp => {
            block(&mut w, nn, nn - 1, |i, j| j - i + 1, |i| nn - i);
            columns(&mut w, &lt, nn - 1, |i, j| j - i + 2);
            columns(&mut w, mu, nn, |i, j| i - j);
            cells(&mut w, nu, |i, j| j - i + 2, |i| -nn - 1 + i);
            lam_corner_shifted(&mut w, &lt, nn);
            rows(&mut w, mu, |i, e| if i <= e { i - 1 } else { e }, |i, j| i - j - nn, |_, j, e| e - j);
        }
        Frame::RightDown => {
            block(&mut w, nn - 2, nn - 1, |i, j| j - i - 1, |i| nn - i - 2);
            columns(&mut w, &lt, nn - 1, |i, j| j - i);
            columns(&mut w, mu, nn - 2, |i, j| i - j - 2);
            cells(&mut w, nu, |i, j| j - i, |i| -nn + i + 1);
            rows(&mut w, &lt, |i, e| if i <= e { i } else { e }, |i, j| nn - i + j - 1, |i, _, e| nn + e - i - 1);
            rows(&mut w, mu, |i, e| if i <= e { i - 1 } else { e }, |i, j| i - j - nn, |_, j, e| e - j);
        }
        Frame::LeftDown => {
            block(&mut w, nn - 1, nn - 2, |i, j| j - i + 1, |i| nn - i - 1);
            columns(&mut w, &lt, nn - 2, |i, j| j - i + 2);
            columns(&mut w, mu, nn - 1, |i, j| i - j);
            cells(&mut w, nu, |i, j| j - i + 2, |i| -nn + i);
            lam_upper(&mut w);
            rows(&mut w, mu, |i, e| if i <= e { i } else { e }, |i, j| i - j - nn + 1, |_, j, e| e - j);
        }
        Frame::RightUp => {
            block(&mut w, nn - 1, nn, |i, j| j - i - 1, |i| nn - i - 1);
            columns(&mut w, &lt, nn, |i, j| j - i);
            columns(&mut w, mu, nn - 1, |i, j| i - j - 2);
            cells(&mut w, nu, |i, j| j - i, |i| -nn + i);
            lam_upper(&mut w);
            mu_corner_shifted(&mut w, mu, nn);
        }
    }
    Ok(w)
}

fn lam_corner_shifted(w: &mut WeightMonomial, lt: &Partition, nn: i64) {
    w.push(nn, -(nn + part(lt, 1)));
    for i in 2..=len(lt) {
        let e = part(lt, i);
        let top = if i <= e + 1 { i - 2 } else { e };
        for j in 1..=top {
            w.push(nn + j + 1 - i, nn + 1 + e - i);
        }
    }
}

fn mu_corner_shifted(w: &mut WeightMonomial, mu: &Partition, nn: i64) {
    w.push(-nn, -part(mu, 1));
    for i in 2..=len(mu) {
        let e = part(mu, i);
        let top = if i <= e + 1 { i - 2 } else { e };
        for j in 1..=top {
            w.push(i - j - nn - 1, e - j);
        }
    }
}

/// `ω̃` of the minimal dimer configuration for `frame` in ϖ-factored form.
pub fn dt_weight_factored(frame: Frame, legs: &LegTriple, big_n: i64, n: usize) -> Result<WeightMonomial> {
    frame_check(frame, legs)?;
    let nn = big_n;
    let (l, m, v) = (&legs.lambda, &legs.mu, &legs.nu);
    let lt = conj(l);
    let f = |xs: [WeightMonomial; 6]| xs.into_iter().fold(WeightMonomial::one(n), |a, b| a.mul(&b));
    Ok(match frame {
        Frame::Centre => f([
            varpi1(nn - 1, 0, 0, n),
            varpi2(&lt, nn - 1, 1, n),
            varpi2(m, nn - 1, 1, n).bar(),
            varpi3(v, nn, 1, n),
            varpi4(&lt, nn, 1, n),
            varpi5(m, nn, 1, n),
        ]),
        Frame::Up => f([
            varpi1(nn, 0, 0, n),
            varpi2(&c(&lt), nn, 1, n),
            varpi2(&c(m), nn, 1, n).bar(),
            varpi3(v, nn + 1, 1, n),
            varpi6(&c(&lt), nn, n),
            varpi7(&c(m), nn, n),
        ]),
        Frame::Down => f([
            varpi1(nn - 2, 0, 0, n),
            varpi2(&r(&lt), nn - 2, 1, n),
            varpi2(&r(m), nn - 2, 1, n).bar(),
            varpi3(v, nn - 1, 1, n),
            varpi4(&r(&lt), nn, 0, n),
            varpi5(&r(m), nn, 0, n),
        ]),
        Frame::LeftUp => f([
            varpi1(nn, 1, 1, n),
            varpi2(&c(&lt), nn - 1, 2, n),
            varpi2(m, nn, 0, n).bar(),
            varpi3(&c(v), nn + 1, 2, n),
            varpi6(&c(&lt), nn, n),
            varpi5(m, nn, 1, n),
        ]),
        Frame::RightDown => f([
            varpi1(nn - 2, -1, -1, n),
            varpi2(&r(&lt), nn - 1, 0, n),
            varpi2(m, nn - 2, 2, n).bar(),
            varpi3(&r(v), nn - 1, 0, n),
            varpi4(&r(&lt), nn, 0, n),
            varpi5(m, nn, 1, n),
        ]),
        Frame::LeftDown => f([
            varpi1(nn - 1, 1, 1, n),
            varpi2(&lt, nn - 2, 2, n),
            varpi2(&r(m), nn - 1, 0, n).bar(),
            varpi3(&c(v), nn, 2, n),
            varpi4(&lt, nn, 1, n),
            varpi5(&r(m), nn, 0, n),
        ]),
        Frame::RightUp => f([
            varpi1(nn - 1, -1, -1, n),
            varpi2(&lt, nn, 0, n),
            varpi2(&c(m), nn - 1, 2, n).bar(),
            varpi3(&r(v), nn, 0, n),
            varpi4(&lt, nn, 1, n),
            varpi7(&c(m), nn, n),
        ]),
    })
}

/// Edge weight of the base double-dimer configuration for `frame`, as the
/// product of horizontal dimer weights group by group.
pub fn pt_weight_explicit(frame: Frame, legs: &LegTriple, big_n: i64, n: usize) -> Result<WeightMonomial> {
    frame_check(frame, legs)?;
    let s = frame.shifted(legs);
    let nn = big_n;
    let lt = conj(&s.lambda);
    let (mu, nu) = (&s.mu, &s.nu);
    let (ll, lm) = (len(&lt), len(mu));
    let mut w = WeightMonomial::one(n);
    // the group beyond the last part of λ′: ∏_{i=1}^{hi} ∏_{j=1}^{i} q_{-N+i-j+1}^{i+de}
    let tail_l = |w: &mut WeightMonomial, hi: i64, de: i64| {
        for i in 1..=hi {
            for j in 1..=i {
                w.push(-nn + i - j + 1, i + de);
            }
        }
    };
    // the group beyond the last part of μ: ∏_{i=1}^{hi} ∏_{j=ℓ+1}^{top-i} q_{i+j+di}^{N+i+de}
    let tail_m = |w: &mut WeightMonomial, hi: i64, top: i64, di: i64, de: i64| {
        for i in 1..=hi {
            for j in lm + 1..=top - i {
                w.push(i + j + di, nn + i + de);
            }
        }
    };
    match frame {
        Frame::Centre => {
            tail_l(&mut w, nn - ll - 1, 0);
            rows(&mut w, &lt, |i, e| if i <= e { nn - e } else { nn - i }, |i, j| -i - j + 1, |i, _, e| nn + e - i);
            tail_m(&mut w, nn - lm - 1, nn, -1, -1);
            rows(&mut w, mu, |i, e| if i <= e { nn - e } else { nn - i }, |i, j| i + j - 1, |_, j, e| nn + e + j - 1);
            cells(&mut w, nu, |i, j| j - i + 1, |i| nn - i);
            block(&mut w, nn - 1, nn - 1, |i, j| j - i, |i| nn - i - 1);
        }
        Frame::Up => {
            tail_l(&mut w, nn - ll - 1, 1);
            rows(&mut w, &lt, |i, e| if i <= e + 1 { nn - e - 1 } else { nn - i }, |i, j| -i - j + 1, |i, _, e| nn + e - i + 1);
            tail_m(&mut w, nn - lm - 1, nn, -1, 0);
            rows(&mut w, mu, |i, e| if i <= e + 1 { nn - e - 1 } else { nn - i }, |i, j| i + j - 1, |_, j, e| nn + e + j);
            w.push(nn, -nn);
            cells(&mut w, nu, |i, j| j - i + 1, |i| nn - i + 1);
            block(&mut w, nn, nn, |i, j| j - i, |i| nn - i);
        }
        Frame::Down => {
            tail_l(&mut w, nn - ll - 1, -1);
            rows(&mut w, &lt, |i, e| if i < e - 1 { nn - e + 1 } else { nn - i }, |i, j| -i - j + 1, |i, _, e| nn + e - i - 1);
            tail_m(&mut w, nn - lm - 1, nn, -1, -2);
            rows(&mut w, mu, |i, e| if i < e - 1 { nn - e + 1 } else { nn - i }, |i, j| i + j - 1, |_, j, e| nn + e + j - 2);
            cells(&mut w, nu, |i, j| j - i + 1, |i| nn - i - 1);
            block(&mut w, nn - 2, nn - 2, |i, j| j - i, |i| nn - i - 2);
        }
        Frame::LeftUp => {
            tail_l(&mut w, nn - ll, 0);
            rows(&mut w, &lt, |i, e| if i <= e + 1 { nn - e } else { nn + 1 - i }, |i, j| -i - j + 2, |i, _, e| nn + e - i + 1);
            tail_m(&mut w, nn - lm - 2, nn - 1, 0, 0);
            rows(&mut w, mu, |i, e| if i <= e { nn - e - 1 } else { nn - i - 1 }, |i, j| i + j, |_, j, e| nn + e + j);
            w.push(nn, -nn);
            cells(&mut w, nu, |i, j| j - i + 2, |i| nn - i + 1);
            block(&mut w, nn, nn - 1, |i, j| j - i + 1, |i| nn - i);
        }
        Frame::RightDown => {
            tail_l(&mut w, nn - ll - 2, 0);
            rows(&mut w, &lt, |i, e| if i < e - 1 { nn - e } else { nn - i - 1 }, |i, j| -i - j, |i, _, e| nn + e - i - 1);
            tail_m(&mut w, nn - lm, nn + 1, -2, -2);
            rows(&mut w, mu, |i, e| if i <= e { nn - e + 1 } else { nn - i + 1 }, |i, j| i + j - 2, |_, j, e| nn + e + j - 2);
            cells(&mut w, nu, |i, j| j - i, |i| nn - i - 1);
            block(&mut w, nn - 2, nn - 1, |i, j| j - i - 1, |i| nn - i - 2);
        }
        Frame::LeftDown => {
            tail_l(&mut w, nn - ll, -1);
            rows(&mut w, &lt, |i, e| if i <= e { nn - e + 1 } else { nn + 1 - i }, |i, j| -i - j + 2, |i, _, e| nn + e - i);
            tail_m(&mut w, nn - lm - 2, nn - 1, 0, -1);
            rows(&mut w, mu, |i, e| if i < e - 1 { nn - e } else { nn - i - 1 }, |i, j| i + j, |_, j, e| nn + e + j - 1);
            cells(&mut w, nu, |i, j| j - i + 2, |i| nn - i);
            block(&mut w, nn - 1, nn - 2, |i, j| j - i + 1, |i| nn - i - 1);
        }
        Frame::RightUp => {
            tail_l(&mut w, nn - ll - 2, 1);
            rows(&mut w, &lt, |i, e| if i <= e { nn - e - 1 } else { nn - i - 1 }, |i, j| -i - j, |i, _, e| nn + e - i);
            tail_m(&mut w, nn - lm, nn + 1, -2, -1);
            rows(&mut w, mu, |i, e| if i < e + 1 { nn - e } else { nn - i + 1 }, |i, j| i + j - 2, |_, j, e| nn + e + j - 1);
            cells(&mut w, nu, |i, j| j - i, |i| nn - i);
            block(&mut w, nn - 1, nn, |i, j| j - i - 1, |i| nn - i - 1);
        }
    }
    Ok(w)
}

/// Edge weight of the base double-dimer configuration in ϑ-factored form.
pub fn pt_weight_factored(frame: Frame, legs: &LegTriple, big_n: i64, n: usize) -> Result<WeightMonomial> {
    frame_check(frame, legs)?;
    let nn = big_n;
    let (l, m, v) = (&legs.lambda, &legs.mu, &legs.nu);
    let lt = conj(l);
    let f = |xs: Vec<WeightMonomial>| xs.into_iter().fold(WeightMonomial::one(n), |a, b| a.mul(&b));
    let qn = WeightMonomial::q(n, nn, -nn);
    Ok(match frame {
        Frame::Centre => f(vec![
            vartheta1(&lt, nn, 0, 1, n),
            vartheta2(&lt, nn, 0, n),
            vartheta3(m, nn, 1, 1, n),
            vartheta4(m, nn, 0, n),
            varpi3(v, nn, 1, n).inv(),
            varpi1(nn - 1, 0, 0, n),
        ]),
        Frame::Up => f(vec![
            vartheta1(&c(&lt), nn, 1, 1, n),
            vartheta5(&c(&lt), nn, 0, n),
            vartheta3(&c(m), nn, 0, 1, n),
            vartheta6(&c(m), nn, n),
            varpi3(v, nn + 1, 1, n).inv(),
            varpi1(nn, 0, 0, n),
            qn,
        ]),
        Frame::Down => f(vec![
            vartheta1(&r(&lt), nn, -1, 1, n),
            vartheta7(&r(&lt), nn, 1, n),
            vartheta3(&r(m), nn, 2, 1, n),
            vartheta8(&r(m), nn + 1, 1, 1, n),
            varpi3(v, nn - 1, 1, n).inv(),
            varpi1(nn - 2, 0, 0, n),
        ]),
        Frame::LeftUp => f(vec![
            vartheta1(&c(&lt), nn, 0, 0, n),
            vartheta5(&c(&lt), nn + 1, 1, n),
            vartheta3(m, nn - 1, -1, 0, n),
            vartheta4(m, nn, 1, n),
            varpi3(&c(v), nn + 1, 2, n).inv(),
            varpi1(nn, 1, 1, n),
            qn,
        ]),
        Frame::RightDown => f(vec![
            vartheta1(&r(&lt), nn, 0, 2, n),
            vartheta7(&r(&lt), nn, 0, n),
            vartheta3(m, nn + 1, 3, 2, n),
            vartheta4(m, nn, -1, n),
            varpi3(&r(v), nn - 1, 0, n).inv(),
            varpi1(nn - 2, -1, -1, n),
        ]),
        Frame::LeftDown => f(vec![
            vartheta1(&lt, nn, -1, 0, n),
            vartheta2(&lt, nn + 1, 1, n),
            vartheta3(&r(m), nn - 1, 0, 0, n),
            vartheta8(&r(m), nn, 1, 0, n),
            varpi3(&c(v), nn, 2, n).inv(),
            varpi1(nn - 1, 1, 1, n),
        ]),
        Frame::RightUp => f(vec![
            vartheta1(&lt, nn, 1, 2, n),
            vartheta2(&lt, nn - 1, -1, n),
            vartheta3(&c(m), nn + 1, 2, 2, n),
            vartheta8(&c(m), nn, -1, 0, n),
            varpi3(&r(v), nn, 0, n).inv(),
            varpi1(nn - 1, -1, -1, n),
        ]),
    })
}

// ---------------------------------------------------------------------------
// K monomials

/// `q^{K_which(λ,μ,ν)}`, the cross-term weight of recurrence `which`.
pub fn k_monomial(which: u8, legs: &LegTriple, n: usize) -> Result<WeightMonomial> {
    let (l, m, v) = (&legs.lambda, &legs.mu, &legs.nu);
    let lt = conj(l);
    let mut w = WeightMonomial::one(n);
    match which {
        1 => {
            let (dl, dtl) = dd(&lt)?;
            let (dm, dtm) = dd(m)?;
            w.push(-dtl, dl);
            w.push(dtm, dm);
            for i in -dtl..=dtm {
                w.push(i, -1);
            }
            for i in dtl + 1..=len(&lt) {
                w.push(-i, part(&lt, i));
                w.push(-i + 1, -part(&lt, i));
            }
            for i in dtm + 1..=len(m) {
                w.push(i, part(m, i));
                w.push(i - 1, -part(m, i));
            }
        }
        2 => {
            let (dl, _) = dd(&lt)?;
            let (dv, _) = dd(v)?;
            w.push(1 - dl, -part(&lt, dl));
            for i in 1..dl {
                w.push(-i, 1 + part(&lt, i));
                w.push(-i + 1, -part(&lt, i));
            }
            for i in 1..=len(m) {
                w.push(i, part(m, i));
                w.push(i - 1, -part(m, i));
            }
            for i in 1..=part(v, dv) - dv {
                w.push(i, -1);
            }
        }
        3 => {
            let (dm, _) = dd(m)?;
            let (dv, dtv) = dd(v)?;
            w.push(dm - 1, -part(m, dm));
            for i in 1..dm {
                w.push(i, 1 + part(m, i));
                w.push(i - 1, -part(m, i));
            }
            for i in 1..=len(&lt) {
                w.push(-i, part(&lt, i));
                w.push(-i + 1, -part(&lt, i));
            }
            for i in 1..=dtv - dv {
                w.push(-i, -1);
            }
        }
        _ => return Err(Error::Parse(format!("no recurrence {which}"))),
    }
    Ok(w)
}

/// `q^{K₂(λ,μ,ν)} = bar(q^{K₃(μ′,λ′,ν′)})`.
pub fn k_symmetry_check(legs: &LegTriple, n: usize) -> Result<bool> {
    let k2 = k_monomial(2, legs, n)?;
    let k3 = k_monomial(3, &legs.transpose(), n)?;
    Ok(k2 == k3.bar())
}

/// The frames whose weights enter recurrence `which`: the rc-modified
/// centre, and the two shifted frames.
fn square(which: u8) -> (Frame, Frame) {
    match which {
        1 => (Frame::Up, Frame::Down),
        2 => (Frame::LeftUp, Frame::RightDown),
        3 => (Frame::LeftDown, Frame::RightUp),
        _ => panic!("no recurrence {which}"),
    }
}

/// The four centre-frame leg triples `(λ,μ,ν)`, `(rc,rc)`, `(rc,·)`, `(·,rc)`
/// of recurrence `which`.
pub fn recurrence_corners(which: u8, legs: &LegTriple) -> [LegTriple; 4] {
    let (l, m, v) = (&legs.lambda, &legs.mu, &legs.nu);
    let t = |a: &Partition, b: &Partition, c: &Partition| LegTriple::new(a.clone(), b.clone(), c.clone());
    match which {
        1 => [t(l, m, v), t(&rc(l), &rc(m), v), t(&rc(l), m, v), t(l, &rc(m), v)],
        2 => [t(l, m, v), t(&rc(l), m, &rc(v)), t(&rc(l), m, v), t(l, m, &rc(v))],
        3 => [t(l, m, v), t(l, &rc(m), &rc(v)), t(l, &rc(m), v), t(l, m, &rc(v))],
        _ => panic!("no recurrence {which}"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    Dt,
    Pt,
}

fn side_weight(side: Side, frame: Frame, legs: &LegTriple, big_n: i64, n: usize) -> Result<WeightMonomial> {
    match side {
        Side::Dt => dt_weight_factored(frame, legs, big_n, n),
        Side::Pt => pt_weight_factored(frame, legs, big_n, n),
    }
}

/// The two weight quotients of recurrence `which` at size `N`: the one that
/// should be 1, and the one that should be `q^{±K}` (`+` on the DT side).
pub fn square_quotients(which: u8, side: Side, legs: &LegTriple, big_n: i64, n: usize) -> Result<(WeightMonomial, WeightMonomial)> {
    let [a, b, x, y] = recurrence_corners(which, legs);
    let w = |t: &LegTriple| side_weight(side, Frame::Centre, t, big_n, n);
    let (wa, wb) = (w(&a)?, w(&b)?);
    let unit = w(&x)?.mul(&w(&y)?).div(&wa.mul(&wb));
    let (f1, f2) = square(which);
    let cross = side_weight(side, f1, legs, big_n, n)?
        .mul(&side_weight(side, f2, legs, big_n, n)?)
        .div(&wa.mul(&wb));
    Ok((unit, cross))
}

// ---------------------------------------------------------------------------
// Quotient identities for a single partition

/// One quotient identity among the ϖ/ϑ factors, stated for a partition `η`
/// and a size `N`. The DT ones feed the three minimal-weight quotients, the
/// PT ones the base-weight quotients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WeightLemma {
    DtFrameUpDown,
    DtVarpi2UpDown,
    DtVarpi3Stretch,
    DtLambdaCornerUpDown,
    DtMuCornerUpDown,
    DtFrameLeftUpRightDown,
    DtVarpi2LeftUpRightDown,
    DtVarpi2Slide,
    DtVarpi3LeftUpRightDown,
    DtFrameLeftDownRightUp,
    DtVarpi3LeftDownRightUp,
    PtTheta1UpDown,
    PtLambdaCornerUpDown,
    PtTheta3UpDown,
    PtMuCornerUpDown,
    PtTheta1LeftUpRightDown,
    PtLambdaCornerLeftUpRightDown,
    PtTheta3Slide,
    PtTheta4Slide,
    PtTheta1Slide,
    PtTheta2Slide,
    PtTheta3LeftDownRightUp,
    PtMuCornerLeftDownRightUp,
}

impl WeightLemma {
    pub const ALL: [WeightLemma; 23] = [
        WeightLemma::DtFrameUpDown,
        WeightLemma::DtVarpi2UpDown,
        WeightLemma::DtVarpi3Stretch,
        WeightLemma::DtLambdaCornerUpDown,
        WeightLemma::DtMuCornerUpDown,
        WeightLemma::DtFrameLeftUpRightDown,
        WeightLemma::DtVarpi2LeftUpRightDown,
        WeightLemma::DtVarpi2Slide,
        WeightLemma::DtVarpi3LeftUpRightDown,
        WeightLemma::DtFrameLeftDownRightUp,
        WeightLemma::DtVarpi3LeftDownRightUp,
        WeightLemma::PtTheta1UpDown,
        WeightLemma::PtLambdaCornerUpDown,
        WeightLemma::PtTheta3UpDown,
        WeightLemma::PtMuCornerUpDown,
        WeightLemma::PtTheta1LeftUpRightDown,
        WeightLemma::PtLambdaCornerLeftUpRightDown,
        WeightLemma::PtTheta3Slide,
        WeightLemma::PtTheta4Slide,
        WeightLemma::PtTheta1Slide,
        WeightLemma::PtTheta2Slide,
        WeightLemma::PtTheta3LeftDownRightUp,
        WeightLemma::PtMuCornerLeftDownRightUp,
    ];

    pub fn name(self) -> String {
        let s = format!("{self:?}");
        let mut out = String::new();
        for (i, ch) in s.chars().enumerate() {
            if ch.is_uppercase() && i > 0 {
                out.push('_');
            }
            out.extend(ch.to_lowercase());
        }
        out
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == name)
    }

    /// Whether the identity only makes sense for `η ≠ ∅`.
    pub fn needs_nonempty(self) -> bool {
        !matches!(
            self,
            WeightLemma::DtFrameUpDown
                | WeightLemma::DtVarpi3Stretch
                | WeightLemma::DtFrameLeftUpRightDown
                | WeightLemma::DtVarpi2Slide
                | WeightLemma::DtFrameLeftDownRightUp
                | WeightLemma::PtTheta3Slide
                | WeightLemma::PtTheta4Slide
                | WeightLemma::PtTheta1Slide
                | WeightLemma::PtTheta2Slide
        )
    }

    /// Smallest `N` at which the identity is claimed for `η`: the frame has
    /// to hold `η` with a row and column to spare.
    pub fn min_size(self, eta: &Partition) -> i64 {
        len(eta).max(part(eta, 1)) + 1
    }

    /// Both sides of the identity.
    pub fn sides(self, eta: &Partition, big_n: i64, n: usize) -> Result<(WeightMonomial, WeightMonomial)> {
        use WeightLemma::*;
        if self.needs_nonempty() && eta.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let nn = big_n;
        let one = || WeightMonomial::one(n);
        let ratio = |a: WeightMonomial, b: WeightMonomial, x: WeightMonomial, y: WeightMonomial| a.mul(&b).div(&x.mul(&y));
        let ll = len(eta);
        let e = |i: i64| part(eta, i);
        let (d, dt) = if eta.is_empty() { (0, 0) } else { dd(eta)? };
        // the three shapes of the case split in the PT identities
        let case = if d > 1 {
            0
        } else if e(1) > 1 {
            1
        } else {
            2
        };
        let (ec, er, erc) = if eta.is_empty() {
            (Partition::empty(), Partition::empty(), Partition::empty())
        } else {
            (c(eta), r(eta), rc(eta))
        };
        let mut rhs = one();
        let lhs = match self {
            DtFrameUpDown => {
                rhs.push(nn, nn);
                for i in 1 - nn..nn {
                    rhs.push(i, 1);
                }
                ratio(varpi1(nn, 0, 0, n), varpi1(nn - 2, 0, 0, n), varpi1(nn - 1, 0, 0, n), varpi1(nn - 1, 0, 0, n))
            }
            DtVarpi2UpDown => {
                rhs.push(-dt, d - 1);
                for i in dt + 1..=ll {
                    rhs.push(-i, e(i));
                    rhs.push(-i + 1, -e(i));
                }
                for i in 1..=dt {
                    rhs.push(nn - i + 1, e(i) - 1);
                }
                for i in 0..nn {
                    rhs.push(i - dt + 1, -1);
                }
                for i in 1..d {
                    rhs.push(nn - i, -(e(i) + 1));
                }
                for i in nn - dt + 1..=nn - d {
                    rhs.push(i, -d);
                }
                ratio(varpi2(&ec, nn, 1, n), varpi2(&er, nn - 2, 1, n), varpi2(eta, nn - 1, 1, n), varpi2(&erc, nn - 1, 1, n))
            }
            DtVarpi3Stretch => ratio(varpi3(eta, nn + 1, 1, n), varpi3(eta, nn - 1, 1, n), varpi3(eta, nn, 1, n), varpi3(eta, nn, 1, n)),
            DtLambdaCornerUpDown => {
                rhs.push(nn, -nn);
                for i in 1..d {
                    rhs.push(nn - i, e(i) - i);
                }
                for i in 1..=d {
                    rhs.push(nn - i + 1, -(e(i) - i));
                }
                ratio(varpi6(&ec, nn, n), varpi4(&er, nn, 0, n), varpi4(eta, nn, 1, n), varpi4(&erc, nn, 1, n))
            }
            DtMuCornerUpDown => {
                for i in 1..d {
                    rhs.push(i - nn, e(i));
                }
                for i in 1..=d {
                    rhs.push(i - nn - 1, -(e(i) - 1));
                }
                ratio(varpi7(&ec, nn, n), varpi5(&er, nn, 0, n), varpi5(eta, nn, 1, n), varpi5(&erc, nn, 1, n))
            }
            DtFrameLeftUpRightDown => {
                rhs.push(0, 1 - nn);
                rhs.push(nn, nn);
                for i in 1..nn {
                    rhs.push(i, 1);
                }
                ratio(varpi1(nn, 1, 1, n), varpi1(nn - 2, -1, -1, n), varpi1(nn - 1, 0, 0, n), varpi1(nn - 1, 0, 0, n))
            }
            DtVarpi2LeftUpRightDown => {
                rhs.push(1 - d, -e(d));
                for i in 1..d {
                    rhs.push(-i, e(i) + 1);
                    rhs.push(-i + 1, -e(i));
                    rhs.push(nn - i, -e(i));
                }
                for i in 1..=d {
                    rhs.push(nn - i + 1, e(i) - 1);
                }
                for i in 1..nn {
                    rhs.push(i, -1);
                }
                ratio(varpi2(&ec, nn - 1, 2, n), varpi2(&er, nn - 1, 0, n), varpi2(eta, nn - 1, 1, n), varpi2(&erc, nn - 1, 1, n))
            }
            DtVarpi2Slide => {
                for i in 1..=ll {
                    rhs.push(-i, e(i));
                    rhs.push(-i + 1, -e(i));
                }
                ratio(varpi2(eta, nn, 0, n), varpi2(eta, nn - 2, 2, n), varpi2(eta, nn - 1, 1, n), varpi2(eta, nn - 1, 1, n))
            }
            DtVarpi3LeftUpRightDown => {
                rhs.push(0, nn - 1);
                for i in 1..=e(d) - d {
                    rhs.push(i, -1);
                }
                ratio(varpi3(&ec, nn + 1, 2, n), varpi3(&er, nn - 1, 0, n), varpi3(eta, nn, 1, n), varpi3(&erc, nn, 1, n))
            }
            DtFrameLeftDownRightUp => {
                rhs.push(0, 1 - nn);
                for i in 1..nn {
                    rhs.push(-i, 1);
                }
                ratio(varpi1(nn - 1, 1, 1, n), varpi1(nn - 1, -1, -1, n), varpi1(nn - 1, 0, 0, n), varpi1(nn - 1, 0, 0, n))
            }
            DtVarpi3LeftDownRightUp => {
                rhs.push(0, nn);
                for i in 0..=dt - d {
                    rhs.push(-i, -1);
                }
                ratio(varpi3(&ec, nn, 2, n), varpi3(&er, nn, 0, n), varpi3(eta, nn, 1, n), varpi3(&erc, nn, 1, n))
            }
            PtTheta1UpDown => {
                match case {
                    0 => {
                        rhs.push(-ll, nn - ll - 1);
                        for i in 1 - nn..=-ll - 1 {
                            rhs.push(i, -1);
                        }
                    }
                    1 => {
                        for i in 1 - nn..=-ll {
                            rhs.push(i, -1);
                        }
                        for i in 1 - ll..=-1 {
                            rhs.push(i, -nn - i);
                        }
                    }
                    _ => {
                        for i in 1 - nn..=-ll {
                            rhs.push(i, nn - 1);
                        }
                        for i in 1 - ll..=-1 {
                            rhs.push(i, -i);
                        }
                    }
                }
                ratio(
                    vartheta1(&ec, nn, 1, 1, n),
                    vartheta1(&er, nn, -1, 1, n),
                    vartheta1(eta, nn, 0, 1, n),
                    vartheta1(&erc, nn, 0, 1, n),
                )
            }
            PtLambdaCornerUpDown => {
                match case {
                    // with d̃ = ℓ the telescoped boundary term is all that is left
                    0 if dt == ll => rhs.push(-ll, -nn - d + ll + 1),
                    0 => {
                        rhs.push(-dt, -d);
                        rhs.push(-ll, -nn + ll);
                        for i in dt + 1..ll {
                            rhs.push(-i, -1);
                        }
                        for i in dt + 1..=ll {
                            rhs.push(-i + 1, e(i));
                            rhs.push(-i, -e(i));
                        }
                    }
                    1 => {
                        for i in 1..ll {
                            rhs.push(-i, nn - i);
                        }
                    }
                    _ => {
                        for i in 1..ll {
                            rhs.push(-i, -i);
                        }
                        for i in ll..nn {
                            rhs.push(-i, -nn);
                        }
                    }
                }
                ratio(vartheta5(&ec, nn, 0, n), vartheta7(&er, nn, 1, n), vartheta2(eta, nn, 0, n), vartheta2(&erc, nn, 0, n))
            }
            PtTheta3UpDown => {
                match case {
                    0 => {
                        rhs.push(ll, nn - 1);
                        for i in ll + 1..nn {
                            rhs.push(i, -1);
                        }
                    }
                    1 => {
                        for i in ll..nn {
                            rhs.push(i, -1);
                        }
                        for i in 1..ll {
                            rhs.push(i, -nn);
                        }
                    }
                    _ => {
                        for i in 1..ll {
                            rhs.push(i, i);
                        }
                        for i in ll..nn {
                            rhs.push(i, nn + i - 1);
                        }
                    }
                }
                ratio(
                    vartheta3(&ec, nn, 0, 1, n),
                    vartheta3(&er, nn, 2, 1, n),
                    vartheta3(eta, nn, 1, 1, n),
                    vartheta3(&erc, nn, 1, 1, n),
                )
            }
            PtMuCornerUpDown => {
                match case {
                    0 => {
                        rhs.push(dt, nn);
                        rhs.push(ll, -nn);
                        for i in dt + 1..=ll {
                            rhs.push(i - 1, e(i));
                            rhs.push(i, -e(i));
                        }
                        rhs.push(dt, -(nn + d - 1));
                        for i in dt..ll {
                            rhs.push(i, -1);
                        }
                    }
                    1 => {
                        for i in 1..ll {
                            rhs.push(i, nn);
                        }
                    }
                    _ => {
                        for i in 1..ll {
                            rhs.push(i, -i);
                        }
                        for i in ll..nn {
                            rhs.push(i, -nn - i);
                        }
                    }
                }
                ratio(vartheta6(&ec, nn, n), vartheta8(&er, nn + 1, 1, 1, n), vartheta4(eta, nn, 0, n), vartheta4(&erc, nn, 0, n))
            }
            PtTheta1LeftUpRightDown => {
                if case == 2 {
                    for i in 0..nn {
                        rhs.push(-i, nn);
                    }
                }
                ratio(
                    vartheta1(&ec, nn, 0, 0, n),
                    vartheta1(&er, nn, 0, 2, n),
                    vartheta1(eta, nn, 0, 1, n),
                    vartheta1(&erc, nn, 0, 1, n),
                )
            }
            PtLambdaCornerLeftUpRightDown => {
                match case {
                    0 => {
                        rhs.push(0, nn - 1);
                        rhs.push(1 - d, e(d));
                        for i in 1..d {
                            rhs.push(-i, -1);
                            rhs.push(-i + 1, e(i));
                            rhs.push(-i, -e(i));
                        }
                    }
                    1 => rhs.push(0, nn + e(1) - 1),
                    _ => {
                        for i in 1..nn {
                            rhs.push(-i, -nn);
                        }
                    }
                }
                ratio(vartheta5(&ec, nn + 1, 1, n), vartheta7(&er, nn, 0, n), vartheta2(eta, nn, 0, n), vartheta2(&erc, nn, 0, n))
            }
            PtTheta3Slide => {
                rhs.push(ll, nn - 1);
                for i in ll + 1..nn {
                    rhs.push(i, -1);
                }
                ratio(
                    vartheta3(eta, nn - 1, -1, 0, n),
                    vartheta3(eta, nn + 1, 3, 2, n),
                    vartheta3(eta, nn, 1, 1, n),
                    vartheta3(eta, nn, 1, 1, n),
                )
            }
            PtTheta4Slide => {
                if !eta.is_empty() {
                    rhs.push(0, nn - 1);
                    rhs.push(ll, -nn);
                    for i in 1..ll {
                        rhs.push(i, -1);
                    }
                    for i in 1..=ll {
                        rhs.push(i - 1, e(i));
                        rhs.push(i, -e(i));
                    }
                }
                ratio(vartheta4(eta, nn, 1, n), vartheta4(eta, nn, -1, n), vartheta4(eta, nn, 0, n), vartheta4(eta, nn, 0, n))
            }
            PtTheta1Slide => {
                rhs.push(-ll, nn - ll - 1);
                for i in 1 - nn..=-ll - 1 {
                    rhs.push(i, -1);
                }
                ratio(
                    vartheta1(eta, nn, -1, 0, n),
                    vartheta1(eta, nn, 1, 2, n),
                    vartheta1(eta, nn, 0, 1, n),
                    vartheta1(eta, nn, 0, 1, n),
                )
            }
            PtTheta2Slide => {
                if !eta.is_empty() {
                    rhs.push(0, nn - 1);
                    rhs.push(-ll, ll - nn);
                    for i in 1..ll {
                        rhs.push(-i, -1);
                    }
                    for i in 1..=ll {
                        rhs.push(-i + 1, e(i));
                        rhs.push(-i, -e(i));
                    }
                }
                ratio(vartheta2(eta, nn + 1, 1, n), vartheta2(eta, nn - 1, -1, n), vartheta2(eta, nn, 0, n), vartheta2(eta, nn, 0, n))
            }
            PtTheta3LeftDownRightUp => {
                if case == 2 {
                    rhs.push(nn - 1, 2 * nn - 1);
                    for i in 0..=nn - 2 {
                        rhs.push(i, nn + i);
                    }
                }
                ratio(
                    vartheta3(&ec, nn + 1, 2, 2, n),
                    vartheta3(&er, nn - 1, 0, 0, n),
                    vartheta3(eta, nn, 1, 1, n),
                    vartheta3(&erc, nn, 1, 1, n),
                )
            }
            PtMuCornerLeftDownRightUp => {
                match case {
                    0 => {
                        rhs.push(0, nn - 1);
                        rhs.push(d - 1, e(d));
                        for i in 1..d {
                            rhs.push(i, -1);
                            rhs.push(i - 1, e(i));
                            rhs.push(i, -e(i));
                        }
                    }
                    1 => rhs.push(0, nn + e(1) - 1),
                    _ => {
                        for i in 1..nn {
                            rhs.push(i, -nn - i);
                        }
                    }
                }
                ratio(vartheta8(&ec, nn, -1, 0, n), vartheta8(&er, nn, 1, 0, n), vartheta4(eta, nn, 0, n), vartheta4(&erc, nn, 0, n))
            }
        };
        Ok((lhs, rhs))
    }
}

/// Check one identity for every `N` in `sizes`. Sizes below the admissible
/// window are refused.
pub fn weight_lemma_check(lemma: WeightLemma, eta: &Partition, sizes: RangeInclusive<i64>, n: usize) -> Result<usize> {
    let lo = lemma.min_size(eta);
    if *sizes.start() < lo {
        return Err(Error::OutOfValidity(format!("{} needs N ≥ {lo} for η={eta}", lemma.name())));
    }
    let mut checked = 0;
    for big_n in sizes {
        let (lhs, rhs) = lemma.sides(eta, big_n, n)?;
        if lhs != rhs {
            return Err(Error::LemmaViolated(format!(
                "{} at η={eta}, N={big_n}, n={n}: lhs {lhs}, rhs {rhs}",
                lemma.name()
            )));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Smallest size at which every frame of `legs` fits, with room for the
/// `r` modification.
pub fn triple_min_size(legs: &LegTriple) -> i64 {
    legs.legs().iter().map(|p| len(p).max(part(p, 1))).max().unwrap_or(0) + 2
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteFailure {
    pub check: String,
    pub subject: String,
    pub size: i64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct WeightSuiteReport {
    pub n: usize,
    pub identities: usize,
    pub frames: usize,
    pub squares: usize,
    pub failures: Vec<SuiteFailure>,
}

impl WeightSuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

enum SuiteItem {
    Identity(WeightLemma, Partition),
    Frames(LegTriple),
    Square(u8, LegTriple),
}

fn run_item(item: &SuiteItem, window: i64, n: usize) -> (usize, usize, usize, Vec<SuiteFailure>) {
    let mut fails = Vec::new();
    let mut fail = |check: String, subject: String, size: i64, detail: String| {
        fails.push(SuiteFailure { check, subject, size, detail });
    };
    match item {
        SuiteItem::Identity(lemma, eta) => {
            let lo = lemma.min_size(eta);
            if let Err(e) = weight_lemma_check(*lemma, eta, lo..=lo + window - 1, n) {
                fail(lemma.name(), eta.to_string(), lo, e.to_string());
            }
            (1, 0, 0, fails)
        }
        SuiteItem::Frames(legs) => {
            let lo = triple_min_size(legs);
            for big_n in lo..lo + window {
                for frame in Frame::ALL.into_iter().filter(|f| f.applies(legs)) {
                    let pairs = [
                        ("dt", dt_weight_explicit(frame, legs, big_n, n), dt_weight_factored(frame, legs, big_n, n)),
                        ("pt", pt_weight_explicit(frame, legs, big_n, n), pt_weight_factored(frame, legs, big_n, n)),
                    ];
                    for (side, a, b) in pairs {
                        match (a, b) {
                            (Ok(a), Ok(b)) if a == b => {}
                            (a, b) => fail(format!("{side}_frame_{frame:?}"), legs.to_string(), big_n, format!("{a:?} vs {b:?}")),
                        }
                    }
                }
            }
            (0, 1, 0, fails)
        }
        SuiteItem::Square(which, legs) => {
            let lo = triple_min_size(legs);
            let Ok(k) = k_monomial(*which, legs, n) else {
                return (0, 0, 0, fails);
            };
            for big_n in lo..lo + window {
                for side in [Side::Dt, Side::Pt] {
                    let want = if side == Side::Dt { k.clone() } else { k.inv() };
                    let name = format!("square{which}_{side:?}");
                    match square_quotients(*which, side, legs, big_n, n) {
                        Ok((unit, cross)) => {
                            if !unit.is_one() {
                                fail(name.clone(), legs.to_string(), big_n, format!("unit quotient {unit}"));
                            }
                            if cross != want {
                                fail(name, legs.to_string(), big_n, format!("cross quotient {cross}, expected {want}"));
                            }
                        }
                        Err(e) => fail(name, legs.to_string(), big_n, e.to_string()),
                    }
                }
            }
            (0, 0, 1, fails)
        }
    }
}

/// Every single-partition identity for `|η| ≤ max_eta`, the explicit and
/// factored frame weights on `triples`, and the square quotients (unit and
/// `q^{±K}`) on `triples`, each over `window` consecutive admissible sizes.
/// `n = 0` keeps the indices free.
pub fn weight_suite(max_eta: usize, triples: &[LegTriple], window: i64, n: usize) -> WeightSuiteReport {
    let mut items = Vec::new();
    for eta in Partition::all_up_to(max_eta) {
        for lemma in WeightLemma::ALL {
            if !(lemma.needs_nonempty() && eta.is_empty()) {
                items.push(SuiteItem::Identity(lemma, eta.clone()));
            }
        }
    }
    for legs in triples {
        items.push(SuiteItem::Frames(legs.clone()));
        for which in 1..=3 {
            items.push(SuiteItem::Square(which, legs.clone()));
        }
    }
    let parts: Vec<_> = items.par_iter().map(|it| run_item(it, window, n)).collect();
    let mut report = WeightSuiteReport { n, ..Default::default() };
    for (a, b, c, f) in parts {
        report.identities += a;
        report.frames += b;
        report.squares += c;
        report.failures.extend(f);
    }
    report
}

/// All leg triples with total size at most `max_total` and parts at most
/// `max_part`.
pub fn small_triples(max_total: usize, max_part: usize) -> Vec<LegTriple> {
    let shapes: Vec<Partition> = Partition::all_up_to(max_total)
        .into_iter()
        .filter(|p| p.row(0) <= max_part)
        .collect();
    let mut out = Vec::new();
    for a in &shapes {
        for b in &shapes {
            for c in &shapes {
                if a.size() + b.size() + c.size() <= max_total {
                    out.push(LegTriple::new(a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Series-level identities

/// The vacuum product `M(1,q)^n ∏_{0<a≤b<n} M(q_a⋯q_b, q) M(q_a^{-1}⋯q_b^{-1}, q)`
/// with `q = q_0⋯q_{n−1}`, to degree `d`.
pub fn v_empty(n: usize, d: i64) -> Result<Series> {
    let vars = VarTable::q(n);
    let q = vec![1; n];
    let mut out = macmahon(&vars, &vec![0; n], &q, d)?.pow(n as i64)?.truncate(d);
    for a in 1..n {
        for b in a..n {
            let v: Vec<i32> = (0..n).map(|k| i32::from(a <= k && k <= b)).collect();
            let v_inv: Vec<i32> = v.iter().map(|x| -x).collect();
            out = out
                .mul(&macmahon(&vars, &v, &q, d)?)?
                .mul(&macmahon(&vars, &v_inv, &q, d)?)?
                .truncate(d);
        }
    }
    Ok(out)
}

/// The exponents `−2|ν|_k + |ν|_{k+1} + |ν|_{k−1}` of the shifted vacua in `O_ν`.
pub fn o_nu_exponents(nu: &Partition, n: usize) -> Vec<i64> {
    let c: Vec<i64> = colored_counts(nu, n).into_iter().map(|x| x as i64).collect();
    (0..n)
        .map(|k| -2 * c[k] + c[(k + 1) % n] + c[(k + n - 1) % n])
        .collect()
}

/// `O_ν`: the product of the cyclically shifted vacuum series raised to
/// [`o_nu_exponents`], to degree `d`.
pub fn o_nu(nu: &Partition, n: usize, d: i64) -> Result<Series> {
    let vars = VarTable::q(n);
    let mut out = Series::one(&vars).truncate(d);
    let exps = o_nu_exponents(nu, n);
    if exps.iter().all(|&e| e == 0) {
        return Ok(out);
    }
    let vac = v_empty(n, d)?;
    for (k, &e) in exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let perm: Vec<usize> = (0..n).map(|l| (l + k) % n).collect();
        out = out.mul(&vac.permute(&perm).pow(e)?)?.truncate(d);
    }
    Ok(out)
}

fn vertex_floor(side: Side, legs: &LegTriple, n: usize) -> i64 {
    match side {
        Side::Dt => pi_min_colored_volume(legs, n).iter().map(|&x| x as i64).sum(),
        Side::Pt => -region_sets(legs).shift(),
    }
}

fn vertex(side: Side, legs: &LegTriple, n: usize, d: i64) -> Result<Series> {
    match side {
        Side::Dt => Ok(dt_vertex(n, legs, d)),
        Side::Pt => pt_vertex_enum(n, legs, d),
    }
}

/// `f(s)·f(t)` exact to degree `d`.
fn vertex_product(side: Side, s: &LegTriple, t: &LegTriple, n: usize, d: i64) -> Result<Series> {
    let a = vertex(side, s, n, d - vertex_floor(side, t, n))?;
    let b = vertex(side, t, n, d - vertex_floor(side, s, n))?;
    Ok(a.mul(&b)?.truncate(d))
}

fn conjugate_legs(t: &LegTriple) -> LegTriple {
    LegTriple::new(t.lambda.conjugate(), t.mu.conjugate(), t.nu.conjugate())
}

/// Colour shifts of the two cross-term vertices: the diagonal frames of
/// recurrences 2 and 3 move the origin onto a neighbouring colour.
pub fn cross_shifts(which: u8) -> (i64, i64) {
    match which {
        1 => (0, 0),
        _ => (1, -1),
    }
}

fn recolour(s: Series, shift: i64, n: usize) -> Series {
    if shift.rem_euclid(n as i64) == 0 {
        return s;
    }
    let perm: Vec<usize> = (0..n).map(|l| (l as i64 + shift).rem_euclid(n as i64) as usize).collect();
    s.permute(&perm)
}

/// The six leg triples of recurrence `which` in the vertex convention:
/// `[(λ,μ,ν), (rc,rc), (rc,·), (·,rc), first cross, second cross]`. The row
/// and column moves act on the conjugate shapes.
pub fn recurrence_triples(which: u8, legs: &LegTriple) -> [LegTriple; 6] {
    let frame = conjugate_legs(legs);
    let [a, b, x, y] = recurrence_corners(which, &frame);
    let (f1, f2) = square(which);
    [a, b, x, y, f1.shifted(&frame), f2.shifted(&frame)].map(|t| conjugate_legs(&t))
}

/// Both sides of recurrence `which` to degree `d`, legs in the vertex
/// convention. On the DT side the vacuum normalisation is multiplied
/// through, so the identity is checked on `V` directly.
pub fn recurrence_sides(which: u8, side: Side, legs: &LegTriple, n: usize, d: i64) -> Result<(Series, Series)> {
    if n == 0 {
        return Err(Error::VarTableMismatch);
    }
    let k = k_monomial(which, &conjugate_legs(legs), n)?;
    let [a, b, x, y, u, v] = recurrence_triples(which, legs);
    let lhs = vertex_product(side, &a, &b, n, d)?;
    let (su, sv) = cross_shifts(which);
    let dc = d - k.degree();
    let fu = recolour(vertex(side, &u, n, dc - vertex_floor(side, &v, n))?, su, n);
    let fv = recolour(vertex(side, &v, n, dc - vertex_floor(side, &u, n))?, sv, n);
    let cross = k.to_series().mul(&fu.mul(&fv)?.truncate(dc))?.truncate(d);
    let rhs = vertex_product(side, &x, &y, n, d)?.add(&cross)?;
    Ok((lhs, rhs))
}

/// Recurrence `which` on the given side, coefficientwise to degree `d`.
pub fn recurrence_check(which: u8, side: Side, legs: &LegTriple, n: usize, d: i64) -> Result<()> {
    let (lhs, rhs) = recurrence_sides(which, side, legs, n, d)?;
    match lhs.first_difference(&rhs, d) {
        None => Ok(()),
        Some((e, l, r)) => Err(Error::RecurrenceViolated(format!(
            "recurrence {which} ({side:?}) at {legs}, n={n}: coefficient of {e:?} is {l} on the left, {r} on the right"
        ))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    pub legs: String,
    pub n: usize,
    pub degree: i64,
    pub multi_regular: bool,
    pub holds: bool,
    pub witness: Option<String>,
    /// Only for a lone `ν` leg: whether `V = O_ν·V_∅·W` holds.
    pub corrected_holds: Option<bool>,
    pub corrected_witness: Option<String>,
}

fn witness(a: &Series, b: &Series, d: i64) -> Option<String> {
    a.first_difference(b, d)
        .map(|(e, l, r)| format!("coefficient of {e:?}: {l} vs {r}"))
}

/// `V^n = V^n_∅·W^n` to degree `d`, plus the `O_ν` correction when only `ν`
/// is nonempty.
pub fn correspondence_check(legs: &LegTriple, n: usize, d: i64) -> Result<CorrespondenceReport> {
    let shift = region_sets(legs).shift();
    let v = dt_vertex(n, legs, d);
    let w = pt_vertex_enum(n, legs, d)?;
    let vac = v_empty(n, d + shift)?;
    let plain = vac.mul(&w)?.truncate(d);
    let wit = witness(&v, &plain, d);
    let mut report = CorrespondenceReport {
        legs: legs.to_string(),
        n,
        degree: d,
        multi_regular: is_multi_regular(&legs.nu, n),
        holds: wit.is_none(),
        witness: wit,
        corrected_holds: None,
        corrected_witness: None,
    };
    if legs.lambda.is_empty() && legs.mu.is_empty() && !legs.nu.is_empty() {
        let corrected = o_nu(&legs.nu, n, d + shift)?.mul(&vac)?.truncate(d + shift).mul(&w)?.truncate(d);
        let wit = witness(&v, &corrected, d);
        report.corrected_holds = Some(wit.is_none());
        report.corrected_witness = wit;
    }
    Ok(report)
}
