//! Honeycomb patches, the stepped-surface → matching map, double-dimer
//! superposition and the path-sector membership test for AB configurations.
//!
//! Coordinates: the face of the honeycomb under box `w` is `P(w) = (w₁−w₃,
//! w₂−w₃) ∈ ℤ²`. Honeycomb vertices are lattice triangles, `U(p)` with
//! corners `p, p+(1,0), p+(1,1)` and `D(p)` with corners `p, p+(0,1),
//! p+(1,1)`. The patch `H(N)` keeps the triangles inside the hexagon
//! `|x|, |y|, |x−y| ≤ N`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{maya_diagram, residue, HalfInt};
use crate::regions::{region_sets, AbConfig, Box3, LegTriple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TriKind {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tri {
    pub kind: TriKind,
    pub p: (i64, i64),
}

impl Tri {
    pub fn up(x: i64, y: i64) -> Self {
        Tri { kind: TriKind::Up, p: (x, y) }
    }

    pub fn down(x: i64, y: i64) -> Self {
        Tri { kind: TriKind::Down, p: (x, y) }
    }

    pub fn corners(&self) -> [(i64, i64); 3] {
        let (x, y) = self.p;
        match self.kind {
            TriKind::Up => [(x, y), (x + 1, y), (x + 1, y + 1)],
            TriKind::Down => [(x, y), (x, y + 1), (x + 1, y + 1)],
        }
    }

    pub fn neighbours(&self) -> [Tri; 3] {
        let (x, y) = self.p;
        match self.kind {
            TriKind::Up => [Tri::down(x, y), Tri::down(x, y - 1), Tri::down(x + 1, y)],
            TriKind::Down => [Tri::up(x, y), Tri::up(x, y + 1), Tri::up(x - 1, y)],
        }
    }
}

/// Triangles with `c` as a corner.
fn tris_at(c: (i64, i64)) -> [Tri; 6] {
    let (x, y) = c;
    [
        Tri::up(x, y),
        Tri::up(x - 1, y),
        Tri::up(x - 1, y - 1),
        Tri::down(x, y),
        Tri::down(x, y - 1),
        Tri::down(x - 1, y - 1),
    ]
}

pub fn face_of_box(w: &Box3) -> (i64, i64) {
    (w[0] - w[2], w[1] - w[2])
}

fn hex_norm(c: (i64, i64)) -> i64 {
    c.0.abs().max(c.1.abs()).max((c.0 - c.1).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rgb {
    Red,
    Green,
    Blue,
}

/// Boundary data of an outer triangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outer {
    /// 0, 1, 2 for the λ, μ, ν sectors.
    pub sector: usize,
    pub label: HalfInt,
}

#[derive(Clone, Debug)]
pub struct HoneycombPatch {
    pub size: usize,
    tris: Vec<Tri>,
    index: Vec<u32>,
    outer: Vec<Option<Outer>>,
}

const NONE: u32 = u32::MAX;

impl HoneycombPatch {
    pub fn new(size: usize) -> Self {
        let nn = size as i64;
        let width = (2 * nn + 3) as usize;
        let mut index = vec![NONE; width * width * 2];
        let mut tris = Vec::new();
        for x in -nn - 1..=nn {
            for y in -nn - 1..=nn {
                for t in [Tri::up(x, y), Tri::down(x, y)] {
                    if t.corners().iter().all(|&c| hex_norm(c) <= nn) {
                        let slot = Self::slot_of(nn, &t);
                        index[slot] = tris.len() as u32;
                        tris.push(t);
                    }
                }
            }
        }
        let mut outer = vec![None; tris.len()];
        let mut mark = |t: Tri, sector: usize, side: usize, k: i64| {
            let v = index[Self::slot_of(nn, &t)];
            assert_ne!(v, NONE, "boundary triangle {t:?} outside patch");
            let magnitude = HalfInt::above(k - 1);
            // side 1 of each corner carries the positive labels
            let label = if side == 1 {
                magnitude
            } else {
                HalfInt::from_twice(-magnitude.twice())
            };
            assert!(outer[v as usize].is_none());
            outer[v as usize] = Some(Outer { sector, label });
        };
        for m in 0..nn {
            // λ sector around the corner (−N, 0)
            mark(Tri::up(m - nn, m), 0, 0, m + 1);
            mark(Tri::down(-nn, -m - 1), 0, 1, m + 1);
            // μ sector around (0, −N)
            mark(Tri::up(-m - 1, -nn), 1, 0, m + 1);
            mark(Tri::down(m, m - nn), 1, 1, m + 1);
            // ν sector around (N, N)
            mark(Tri::up(nn - 1, nn - 1 - m), 2, 0, m + 1);
            mark(Tri::down(nn - 1 - m, nn - 1), 2, 1, m + 1);
        }
        HoneycombPatch { size, tris, index, outer }
    }

    fn slot_of(nn: i64, t: &Tri) -> usize {
        let width = 2 * nn + 3;
        let (x, y) = (t.p.0 + nn + 1, t.p.1 + nn + 1);
        if x < 0 || y < 0 || x >= width || y >= width {
            return usize::MAX;
        }
        ((x * width + y) * 2 + matches!(t.kind, TriKind::Down) as i64) as usize
    }

    pub fn len(&self) -> usize {
        self.tris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty()
    }

    pub fn tri(&self, v: u32) -> Tri {
        self.tris[v as usize]
    }

    pub fn tris(&self) -> &[Tri] {
        &self.tris
    }

    pub fn index(&self, t: &Tri) -> Option<u32> {
        let slot = Self::slot_of(self.size as i64, t);
        self.index.get(slot).copied().filter(|&v| v != NONE)
    }

    pub fn outer(&self, v: u32) -> Option<Outer> {
        self.outer[v as usize]
    }

    /// Faces with all six surrounding triangles in the patch.
    pub fn interior_faces(&self) -> usize {
        let nn = self.size as i64;
        let mut count = 0;
        for x in -nn..=nn {
            for y in -nn..=nn {
                if tris_at((x, y)).iter().all(|t| self.index(t).is_some()) {
                    count += 1;
                }
            }
        }
        count
    }

    /// Weight of the edge `u–d` as `(colour, exponent)`: the edge shared by
    /// `U(p)` and `D(p)` carries `q_{p_x−p_y}^{N−1−p_y}`, all others weight 1.
    pub fn edge_weight(&self, u: u32, d: u32, n: usize) -> Option<(usize, i64)> {
        let (tu, td) = (self.tri(u), self.tri(d));
        let (tu, td) = if tu.kind == TriKind::Up { (tu, td) } else { (td, tu) };
        (tu.p == td.p).then(|| (residue(tu.p.0 - tu.p.1, n), self.size as i64 - 1 - tu.p.1))
    }

    /// Weights of the edges `U(p)–D(p)` along one diagonal `p_x − p_y = c`,
    /// listed by decreasing `p_y`.
    pub fn column_weights(&self, c: i64, n: usize) -> Vec<(usize, i64)> {
        let nn = self.size as i64;
        let mut out = Vec::new();
        for y in (-nn..=nn).rev() {
            let (u, d) = (Tri::up(c + y, y), Tri::down(c + y, y));
            if let (Some(u), Some(d)) = (self.index(&u), self.index(&d)) {
                out.push(self.edge_weight(u, d, n).unwrap());
            }
        }
        out
    }
}

/// The two stepped surfaces attached to an AB configuration.
pub struct Surfaces<'a> {
    legs: &'a LegTriple,
    a: HashSet<Box3>,
    b: HashSet<Box3>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

fn median3(a: i64, b: i64, c: i64) -> i64 {
    a.max(b).min(a.min(b).max(c))
}

impl<'a> Surfaces<'a> {
    pub fn new(legs: &'a LegTriple, cfg: &AbConfig) -> Self {
        Surfaces {
            legs,
            a: cfg.a.iter().copied().collect(),
            b: cfg.b.iter().copied().collect(),
        }
    }

    /// Highest `t` with `(c_x+t, c_y+t, t)` on the given side's solid.
    pub fn height(&self, side: Side, c: (i64, i64)) -> i64 {
        let (cx, cy) = c;
        let point = |t: i64| [cx + t, cy + t, t];
        match side {
            Side::A => {
                let mut t = median3(-cx, -cy, 0);
                loop {
                    let w = point(t);
                    if (self.legs.in_iminus(&w) || self.legs.in_iii(&w)) && !self.a.contains(&w) {
                        t += 1;
                    } else {
                        return t - 1;
                    }
                }
            }
            Side::B => {
                let mut t = 0.max(-cx).max(-cy);
                loop {
                    let w = point(t);
                    if (self.legs.in_ii(&w) || self.legs.in_iii(&w)) && !self.b.contains(&w) {
                        t += 1;
                    } else {
                        return t - 1;
                    }
                }
            }
        }
    }

    /// The `D` triangle matched to `U(p)`.
    pub fn up_partner(&self, side: Side, p: (i64, i64)) -> Tri {
        let a = self.height(side, p);
        let b = self.height(side, (p.0 + 1, p.1));
        let d = self.height(side, (p.0 + 1, p.1 + 1));
        match (a - b, b - d) {
            (0, 0) => Tri::down(p.0, p.1),
            (1, 0) => Tri::down(p.0, p.1 - 1),
            (0, 1) => Tri::down(p.0 + 1, p.1),
            other => panic!("surface is not a stepped surface at {p:?}: {other:?}"),
        }
    }

    pub fn partner(&self, side: Side, t: Tri) -> Tri {
        match t.kind {
            TriKind::Up => self.up_partner(side, t.p),
            TriKind::Down => {
                let hits: Vec<Tri> = t
                    .neighbours()
                    .into_iter()
                    .filter(|u| self.up_partner(side, u.p) == t)
                    .collect();
                assert_eq!(hits.len(), 1, "down triangle {t:?} matched {} times", hits.len());
                hits[0]
            }
        }
    }
}

/// A matching on a patch; `None` marks a partner outside the patch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimerConfig {
    pub partner: Vec<Option<u32>>,
}

impl DimerConfig {
    pub fn is_perfect(&self) -> bool {
        self.partner.iter().all(Option::is_some)
    }

    pub fn unmatched(&self) -> Vec<u32> {
        (0..self.partner.len() as u32)
            .filter(|&v| self.partner[v as usize].is_none())
            .collect()
    }
}

pub fn dimers_from_boxset(
    patch: &HoneycombPatch,
    side: Side,
    legs: &LegTriple,
    cfg: &AbConfig,
) -> Result<DimerConfig> {
    let surf = Surfaces::new(legs, cfg);
    let partner: Vec<Option<u32>> = patch
        .tris()
        .iter()
        .map(|&t| patch.index(&surf.partner(side, t)))
        .collect();
    let d = DimerConfig { partner };
    if side == Side::B && !d.is_perfect() {
        return Err(Error::PatchTooSmall(format!(
            "B-side matching leaves {} vertices unmatched at N={}",
            d.unmatched().len(),
            patch.size
        )));
    }
    Ok(d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdPath {
    pub verts: Vec<u32>,
    pub ends: (u32, u32),
    pub sectors: (usize, usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DoubleDimerConfig {
    pub paths: Vec<DdPath>,
    pub loops: Vec<Vec<u32>>,
    pub doubled: Vec<(u32, u32)>,
}

impl DoubleDimerConfig {
    pub fn paths_within_sectors(&self) -> bool {
        self.paths.iter().all(|p| p.sectors.0 == p.sectors.1)
    }

    /// Endpoint pairs, each ordered, sorted.
    pub fn pairing(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = self
            .paths
            .iter()
            .map(|p| (p.ends.0.min(p.ends.1), p.ends.0.max(p.ends.1)))
            .collect();
        v.sort();
        v
    }

    pub fn render(&self, patch: &HoneycombPatch) -> String {
        let mut s = String::new();
        for (idx, p) in self.paths.iter().enumerate() {
            let (a, b) = (patch.tri(p.ends.0), patch.tri(p.ends.1));
            let _ = writeln!(
                s,
                "path {idx}: {:?}{:?} (sector {}) -> {:?}{:?} (sector {}), {} vertices",
                a.kind,
                a.p,
                p.sectors.0 + 1,
                b.kind,
                b.p,
                p.sectors.1 + 1,
                p.verts.len()
            );
        }
        let _ = writeln!(s, "{} loops, {} doubled edges", self.loops.len(), self.doubled.len());
        s
    }
}

/// Decompose the superposition of an A-side partial matching and a B-side
/// perfect matching.
pub fn superimpose(patch: &HoneycombPatch, da: &DimerConfig, db: &DimerConfig) -> Result<DoubleDimerConfig> {
    let total = patch.len();
    let b_of = |v: u32| {
        db.partner[v as usize].ok_or_else(|| Error::PatchTooSmall("B-side matching is not perfect".into()))
    };
    let mut seen = vec![false; total];
    let mut out = DoubleDimerConfig::default();
    let sector_of = |v: u32| -> Result<usize> {
        patch
            .outer(v)
            .map(|o| o.sector)
            .ok_or_else(|| Error::PatchTooSmall(format!("node {:?} is not on the boundary", patch.tri(v))))
    };
    for start in 0..total as u32 {
        if seen[start as usize] || da.partner[start as usize].is_some() {
            continue;
        }
        let mut verts = vec![start];
        seen[start as usize] = true;
        let mut cur = start;
        loop {
            let w = b_of(cur)?;
            verts.push(w);
            seen[w as usize] = true;
            match da.partner[w as usize] {
                None => break,
                Some(x) => {
                    verts.push(x);
                    seen[x as usize] = true;
                    cur = x;
                }
            }
        }
        let end = *verts.last().unwrap();
        out.paths.push(DdPath { ends: (start, end), sectors: (sector_of(start)?, sector_of(end)?), verts });
    }
    for start in 0..total as u32 {
        if seen[start as usize] {
            continue;
        }
        let mut cyc = vec![start];
        seen[start as usize] = true;
        let mut cur = start;
        loop {
            let w = da.partner[cur as usize].expect("unmatched vertex outside a path");
            let x = b_of(w)?;
            if w != start {
                cyc.push(w);
                seen[w as usize] = true;
            }
            if x == start {
                break;
            }
            cyc.push(x);
            seen[x as usize] = true;
            cur = x;
        }
        if cyc.len() == 2 {
            out.doubled.push((cyc[0].min(cyc[1]), cyc[0].max(cyc[1])));
        } else {
            out.loops.push(cyc);
        }
    }
    Ok(out)
}

/// Edge-weight exponents of the superposition, `q^{w}` as a colour vector.
pub fn double_dimer_weight(patch: &HoneycombPatch, da: &DimerConfig, db: &DimerConfig, n: usize) -> Vec<i64> {
    let mut e = vec![0i64; n];
    for d in [da, db] {
        for (v, t) in patch.tris().iter().enumerate() {
            if t.kind != TriKind::Up {
                continue;
            }
            if let Some(w) = d.partner[v] {
                if let Some((c, x)) = patch.edge_weight(v as u32, w, n) {
                    e[c] += x;
                }
            }
        }
    }
    e
}

pub fn base_config(legs: &LegTriple) -> AbConfig {
    let rs = region_sets(legs);
    let b = rs.ii().into_iter().chain(rs.iii.iter().copied()).collect();
    AbConfig::new(rs.iii.clone(), b)
}

/// Patch size used for membership of a configuration with `boxes` boxes.
pub fn stabilization_size(legs: &LegTriple, boxes: usize) -> usize {
    let rs = region_sets(legs);
    let leg_extent: usize = legs.legs().iter().map(|p| p.row(0) + p.len()).sum();
    2 * (boxes + rs.shift() as usize + leg_extent) + 4
}

/// Full (non-incremental) membership verdict on one patch.
pub fn path_test_full(patch: &HoneycombPatch, legs: &LegTriple, cfg: &AbConfig) -> Result<bool> {
    let da = dimers_from_boxset(patch, Side::A, legs, cfg)?;
    let db = dimers_from_boxset(patch, Side::B, legs, cfg)?;
    Ok(superimpose(patch, &da, &db)?.paths_within_sectors())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Node {
    pub tri: Tri,
    pub sector: usize,
    pub label: HalfInt,
    pub color: Rgb,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NodeSet {
    pub nodes: Vec<Node>,
    /// Rainbow pairing as indices into `nodes`.
    pub pairing: Vec<(usize, usize)>,
}

const COLORS: [[Rgb; 2]; 3] = [[Rgb::Blue, Rgb::Red], [Rgb::Red, Rgb::Green], [Rgb::Green, Rgb::Blue]];

/// Outer vertices whose label is not in the leg's Maya diagram, coloured and
/// rainbow-paired per sector.
pub fn nodes(legs: &LegTriple, patch: &HoneycombPatch) -> Result<NodeSet> {
    let nn = patch.size as i64;
    let mut out = NodeSet { nodes: Vec::new(), pairing: Vec::new() };
    for (s, leg) in legs.legs().iter().enumerate() {
        let maya = maya_diagram(leg, 0);
        let excluded: HashSet<HalfInt> = maya.positives.iter().chain(maya.negative_gaps.iter()).copied().collect();
        if excluded.iter().any(|h| h.twice().abs() > 2 * nn - 1) {
            return Err(Error::PatchTooSmall(format!("leg {leg} needs labels beyond ±{}/2", 2 * nn - 1)));
        }
        let mut in_sector: Vec<(HalfInt, u32)> = (0..patch.len() as u32)
            .filter_map(|v| patch.outer(v).filter(|o| o.sector == s).map(|o| (o.label, v)))
            .filter(|(l, _)| !excluded.contains(l))
            .collect();
        in_sector.sort_by(|a, b| b.0.cmp(&a.0));
        let first = out.nodes.len();
        for &(label, v) in &in_sector {
            let color = COLORS[s][if label.is_positive() { 0 } else { 1 }];
            out.nodes.push(Node { tri: patch.tri(v), sector: s, label, color });
        }
        let r = in_sector.len();
        for j in 0..r / 2 {
            out.pairing.push((first + j, first + r - 1 - j));
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Edge {
    A,
    B,
}

impl Edge {
    fn other(self) -> Edge {
        match self {
            Edge::A => Edge::B,
            Edge::B => Edge::A,
        }
    }
}

struct Chain {
    verts: Vec<u32>,
    is_loop: bool,
}

impl Chain {
    /// Type of the edge between positions `i` and `i + 1` (cyclically for loops).
    fn edge(&self, i: usize) -> Edge {
        match (self.is_loop, i % 2 == 0) {
            (false, true) | (true, false) => Edge::B,
            _ => Edge::A,
        }
    }
}

enum End {
    Node(u32),
    Loop,
}

/// Path-sector test on one patch size, evaluated by comparing against the
/// base configuration and re-tracing only near the changed faces.
pub struct MembershipEngine {
    legs: LegTriple,
    patch: HoneycombPatch,
    base_a: Vec<Option<u32>>,
    base_b: Vec<u32>,
    chain_of: Vec<u32>,
    pos: Vec<u32>,
    chains: Vec<Chain>,
}

impl MembershipEngine {
    pub fn new(legs: &LegTriple, size: usize) -> Result<Self> {
        let patch = HoneycombPatch::new(size);
        let base = base_config(legs);
        let da = dimers_from_boxset(&patch, Side::A, legs, &base)?;
        let db = dimers_from_boxset(&patch, Side::B, legs, &base)?;
        let dd = superimpose(&patch, &da, &db)?;
        if !dd.paths_within_sectors() {
            return Err(Error::PatchTooSmall(format!("base configuration fails the sector test at N={size}")));
        }
        let total = patch.len();
        let mut chains = Vec::new();
        for p in &dd.paths {
            chains.push(Chain { verts: p.verts.clone(), is_loop: false });
        }
        for l in &dd.loops {
            chains.push(Chain { verts: l.clone(), is_loop: true });
        }
        for &(x, y) in &dd.doubled {
            chains.push(Chain { verts: vec![x, y], is_loop: true });
        }
        let mut chain_of = vec![NONE; total];
        let mut pos = vec![0; total];
        for (c, ch) in chains.iter().enumerate() {
            for (i, &v) in ch.verts.iter().enumerate() {
                chain_of[v as usize] = c as u32;
                pos[v as usize] = i as u32;
            }
        }
        assert!(chain_of.iter().all(|&c| c != NONE));
        let base_b = db.partner.iter().map(|p| p.unwrap()).collect();
        Ok(MembershipEngine { legs: legs.clone(), patch, base_a: da.partner, base_b, chain_of, pos, chains })
    }

    pub fn size(&self) -> usize {
        self.patch.size
    }

    pub fn patch(&self) -> &HoneycombPatch {
        &self.patch
    }

    /// Faces whose heights differ from the base configuration.
    fn changed_faces(&self, cfg: &AbConfig) -> Vec<(i64, i64)> {
        let legs = &self.legs;
        let a: HashSet<Box3> = cfg.a.iter().copied().collect();
        let b: HashSet<Box3> = cfg.b.iter().copied().collect();
        let rs = region_sets(legs);
        let mut faces: Vec<(i64, i64)> = Vec::new();
        faces.extend(cfg.a.iter().filter(|w| legs.in_iminus(w)).map(face_of_box));
        faces.extend(rs.iii.iter().filter(|w| !a.contains(*w)).map(face_of_box));
        faces.extend(rs.ii().iter().chain(rs.iii.iter()).filter(|w| !b.contains(*w)).map(face_of_box));
        faces.sort();
        faces.dedup();
        faces
    }

    pub fn verdict(&self, cfg: &AbConfig) -> Result<bool> {
        let faces = self.changed_faces(cfg);
        let nn = self.patch.size as i64;
        if faces.iter().any(|&c| hex_norm(c) > nn - 3) {
            return Err(Error::PatchTooSmall(format!("configuration reaches the boundary of H({nn})")));
        }
        let mut region: Vec<u32> = Vec::new();
        for &c in &faces {
            for t in tris_at(c) {
                for s in std::iter::once(t).chain(t.neighbours()) {
                    region.push(self.patch.index(&s).expect("interior triangle"));
                }
            }
        }
        region.sort_unstable();
        region.dedup();
        let surf = Surfaces::new(&self.legs, cfg);
        let slot: HashMap<u32, usize> = region.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut ra = Vec::with_capacity(region.len());
        let mut rb = Vec::with_capacity(region.len());
        for &v in &region {
            let t = self.patch.tri(v);
            ra.push(self.patch.index(&surf.partner(Side::A, t)));
            rb.push(
                self.patch
                    .index(&surf.partner(Side::B, t))
                    .ok_or_else(|| Error::PatchTooSmall("B-side matching leaves the patch".into()))?,
            );
        }
        let mut rpos: HashMap<u32, Vec<u32>> = HashMap::new();
        for &v in &region {
            rpos.entry(self.chain_of[v as usize]).or_default().push(self.pos[v as usize]);
        }
        for list in rpos.values_mut() {
            list.sort_unstable();
        }
        let walk = Walk { eng: self, slot: &slot, ra: &ra, rb: &rb, rpos: &rpos };
        let mut visited = vec![false; region.len()];
        for (i, &u) in region.iter().enumerate() {
            if visited[i] {
                continue;
            }
            visited[i] = true;
            let e1 = walk.half(u, Edge::A, &mut visited)?;
            let End::Node(x) = e1 else { continue };
            let End::Node(y) = walk.half(u, Edge::B, &mut visited)? else {
                unreachable!("open walk closed up in one direction only");
            };
            let sx = self.patch.outer(x).map(|o| o.sector);
            let sy = self.patch.outer(y).map(|o| o.sector);
            if sx.is_none() || sy.is_none() {
                return Err(Error::PatchTooSmall("path ends off the boundary".into()));
            }
            if sx != sy {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

struct Walk<'a> {
    eng: &'a MembershipEngine,
    slot: &'a HashMap<u32, usize>,
    ra: &'a [Option<u32>],
    rb: &'a [u32],
    rpos: &'a HashMap<u32, Vec<u32>>,
}

impl Walk<'_> {
    fn partner(&self, v: u32, e: Edge) -> Option<u32> {
        match (self.slot.get(&v), e) {
            (Some(&s), Edge::A) => self.ra[s],
            (Some(&s), Edge::B) => Some(self.rb[s]),
            (None, Edge::A) => self.eng.base_a[v as usize],
            (None, Edge::B) => Some(self.eng.base_b[v as usize]),
        }
    }

    fn half(&self, start: u32, first: Edge, visited: &mut [bool]) -> Result<End> {
        let mut cur = start;
        let mut t = first;
        let limit = 4 * self.eng.patch.len() + 16;
        for _ in 0..limit {
            let Some(w) = self.partner(cur, t) else {
                return Ok(End::Node(cur));
            };
            let (next, arrived) = if self.slot.contains_key(&w) {
                (w, t)
            } else {
                match self.jump(w, t) {
                    Jump::Reached(r, e) => (r, e),
                    Jump::End(v) => return Ok(End::Node(v)),
                }
            };
            if next == start {
                return Ok(End::Loop);
            }
            visited[self.slot[&next]] = true;
            cur = next;
            t = arrived.other();
            if t == Edge::A && self.partner(cur, Edge::A).is_none() {
                return Ok(End::Node(cur));
            }
        }
        Err(Error::PatchTooSmall("walk did not terminate".into()))
    }

    /// Follow the base chain through `w`, entered by an edge of type `t`,
    /// to the next region vertex or the end of the chain.
    fn jump(&self, w: u32, t: Edge) -> Jump {
        let eng = self.eng;
        let c = eng.chain_of[w as usize];
        let ch = &eng.chains[c as usize];
        let len = ch.verts.len();
        let pw = eng.pos[w as usize] as usize;
        let leave = t.other();
        let forward_ok = ch.is_loop || pw + 1 < len;
        let dir_fwd = forward_ok && ch.edge(pw) == leave;
        if !dir_fwd {
            let backward_ok = ch.is_loop || pw > 0;
            let back_edge = if pw > 0 { ch.edge(pw - 1) } else { ch.edge(len - 1) };
            if !backward_ok || back_edge != leave {
                return Jump::End(w);
            }
        }
        let list = self.rpos.get(&c).map(Vec::as_slice).unwrap_or(&[]);
        let found = if dir_fwd {
            let i = list.partition_point(|&x| (x as usize) <= pw);
            list.get(i).or(if ch.is_loop { list.first() } else { None })
        } else {
            let i = list.partition_point(|&x| (x as usize) < pw);
            (if i > 0 { list.get(i - 1) } else { None }).or(if ch.is_loop { list.last() } else { None })
        };
        match found {
            Some(&pr) => {
                let pr = pr as usize;
                let arrived = if dir_fwd { ch.edge((pr + len - 1) % len) } else { ch.edge(pr) };
                Jump::Reached(ch.verts[pr], arrived)
            }
            None => Jump::End(if dir_fwd { ch.verts[len - 1] } else { ch.verts[0] }),
        }
    }
}

enum Jump {
    Reached(u32, Edge),
    End(u32),
}

/// Membership in 𝒜ℬ for every configuration of one leg triple with at most
/// `max_boxes` boxes; one engine per patch size is built up front.
pub struct MembershipOracle {
    legs: LegTriple,
    engines: HashMap<usize, MembershipEngine>,
}

impl MembershipOracle {
    pub fn new(legs: &LegTriple, max_boxes: usize) -> Result<Self> {
        let sizes: Vec<usize> = (0..=max_boxes + 1).map(|b| stabilization_size(legs, b)).collect();
        let engines = sizes
            .into_par_iter()
            .map(|size| MembershipEngine::new(legs, size).map(|e| (size, e)))
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(MembershipOracle { legs: legs.clone(), engines })
    }

    /// Verdict at the stabilization size and two sizes up; they must agree.
    pub fn contains(&self, cfg: &AbConfig) -> Result<bool> {
        let size = stabilization_size(&self.legs, cfg.size());
        let engine = |s: usize| {
            self.engines
                .get(&s)
                .ok_or_else(|| Error::PatchTooSmall(format!("no engine prepared for N={s}")))
        };
        let v1 = engine(size)?.verdict(cfg)?;
        let v2 = engine(size + 2)?.verdict(cfg)?;
        if v1 != v2 {
            return Err(Error::Unstable(size, size + 2));
        }
        Ok(v1)
    }
}

pub fn ab_membership(legs: &LegTriple, cfg: &AbConfig) -> Result<bool> {
    MembershipOracle::new(legs, cfg.size())?.contains(cfg)
}

/// A label on a type III box: one of the three coordinate lines or a
/// generic line (distinct generic indices are distinct lines).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Axis(usize),
    Generic(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Span {
    Zero,
    Line(Label),
    Plane,
}

impl Span {
    fn join(self, other: Span) -> Span {
        match (self, other) {
            (Span::Zero, x) | (x, Span::Zero) => x,
            (Span::Line(a), Span::Line(b)) if a == b => Span::Line(a),
            _ => Span::Plane,
        }
    }
}

/// Direct test of whether `(A, B)` comes from a labelled box configuration:
/// boxes `A ∪ B`, unlabelled boxes `A ∩ B`, and some choice of labels on
/// the remaining type III boxes satisfying the forcing rules.
pub fn labelled_box_filter(legs: &LegTriple, cfg: &AbConfig) -> bool {
    let a: HashSet<Box3> = cfg.a.iter().copied().collect();
    let b: HashSet<Box3> = cfg.b.iter().copied().collect();
    let boxes: HashSet<Box3> = a.union(&b).copied().collect();
    let unlabelled: HashSet<Box3> = a.intersection(&b).copied().collect();
    let labelled: Vec<Box3> = boxes
        .iter()
        .filter(|w| legs.in_iii(w) && !unlabelled.contains(*w))
        .copied()
        .collect();
    // every box must live in I⁻ ∪ II ∪ III
    if boxes.iter().any(|w| !(legs.in_iminus(w) || legs.in_ii(w) || legs.in_iii(w))) {
        return false;
    }
    // candidate positions where a rule could be violated
    let mut cand: HashSet<Box3> = HashSet::new();
    for w in &boxes {
        for ax in 0..3 {
            let mut v = *w;
            v[ax] += 1;
            cand.insert(v);
        }
        cand.insert(*w);
    }
    let cand: Vec<Box3> = cand.into_iter().collect();
    let m = labelled.len();
    let choices: Vec<Label> = (0..3).map(Label::Axis).chain((0..m).map(Label::Generic)).collect();
    let mut assign = vec![0usize; m];
    loop {
        let labels: HashMap<Box3, Label> =
            labelled.iter().zip(&assign).map(|(w, &c)| (*w, choices[c])).collect();
        if rules_hold(legs, &boxes, &unlabelled, &labels, &cand) {
            return true;
        }
        // next assignment
        let mut i = 0;
        loop {
            if i == m {
                return false;
            }
            assign[i] += 1;
            if assign[i] < choices.len() {
                break;
            }
            assign[i] = 0;
            i += 1;
        }
    }
}

fn rules_hold(
    legs: &LegTriple,
    boxes: &HashSet<Box3>,
    unlabelled: &HashSet<Box3>,
    labels: &HashMap<Box3, Label>,
    cand: &[Box3],
) -> bool {
    let preds = |w: Box3| {
        (0..3).filter_map(move |ax| {
            let mut v = w;
            v[ax] -= 1;
            boxes.contains(&v).then_some(v)
        })
    };
    for w in cand {
        let is_box = boxes.contains(w);
        if legs.in_iminus(w) {
            if !is_box && preds(*w).next().is_some() {
                return false;
            }
        } else if legs.in_ii(w) {
            if is_box {
                continue;
            }
            let hat = (0..3).find(|&l| !legs.in_cyl(l, w)).unwrap();
            let forced = preds(*w).any(|v| !(legs.in_iii(&v) && labels.get(&v) == Some(&Label::Axis(hat))));
            if forced {
                return false;
            }
        } else if legs.in_iii(w) {
            let mut span = Span::Zero;
            for v in preds(*w) {
                let induced = if legs.in_iminus(&v) {
                    let l = (0..3).find(|&l| legs.in_cyl(l, &v) && v[l] < 0).unwrap();
                    Span::Line(Label::Axis(l))
                } else if unlabelled.contains(&v) {
                    Span::Plane
                } else {
                    Span::Line(labels[&v])
                };
                span = span.join(induced);
            }
            match (is_box, unlabelled.contains(w), span) {
                (false, _, Span::Zero) => {}
                (false, _, _) => return false,
                (true, true, _) => {}
                (true, false, Span::Zero) => {}
                (true, false, Span::Line(l)) => {
                    if labels[w] != l {
                        return false;
                    }
                }
                (true, false, Span::Plane) => return false,
            }
        }
    }
    true
}
