//! Web diagrams of toric CY 3-orbifolds with transverse `A_{n−1}`
//! singularities and the PT partition function glued from vertices.
//!
//! Every edge owns its own variables `q_{e,k}` and, when compact, `v_{e,k}`.
//! The glued sum is stored per curve class (a `v` exponent vector), each
//! stratum being a series in all `q_{e,k}` truncated by total box degree.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{a_stat, c_stat, colored_count, colored_counts, residue, ColorRole, Partition};
use crate::ptvertex::{closed_form_valid, pt_vertex_closed, pt_vertex_enum};
use crate::regions::{region_sets, LegTriple};
use crate::series::{degree, Exps, Series, SeriesJson, VarTable};

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    /// Counterclockwise; the last one is `e₃`.
    pub edges: [String; 3],
}

/// Neighbours of a compact edge: `f`, `f′` at the tail, `g`, `g′` at the head.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjacent {
    pub f: String,
    pub fp: String,
    pub g: String,
    pub gp: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<String>,
    pub compact: bool,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub m: i64,
    #[serde(default)]
    pub mp: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adj: Option<Adjacent>,
    /// Optional `[δ₀, δ′₀, δ_∞, δ′_∞]`, checked against the derived flags.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<[u8; 4]>,
}

/// The four δ flags of a compact edge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Deltas {
    pub zero: bool,
    pub zero_p: bool,
    pub inf: bool,
    pub inf_p: bool,
}

impl Deltas {
    fn as_array(self) -> [u8; 4] {
        [self.zero, self.zero_p, self.inf, self.inf_p].map(u8::from)
    }

    fn sum(self) -> i64 {
        self.as_array().iter().map(|&x| x as i64).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WebDiagram {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl WebDiagram {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serialises")
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn compact_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.compact)
    }

    fn n_of(&self, id: &str) -> usize {
        self.edge(id).map_or(1, |e| e.n)
    }

    fn is_e3(&self, vertex: &Option<String>, edge: &str) -> bool {
        vertex
            .as_deref()
            .and_then(|v| self.vertex(v))
            .is_some_and(|v| v.edges[2] == edge)
    }

    /// δ flags of a compact edge, read off the `e₃` labels at its endpoints.
    pub fn deltas(&self, e: &Edge) -> Deltas {
        let Some(adj) = &e.adj else { return Deltas::default() };
        Deltas {
            zero: self.is_e3(&e.tail, &adj.f),
            zero_p: self.is_e3(&e.tail, &adj.fp),
            inf: self.is_e3(&e.head, &adj.g),
            inf_p: self.is_e3(&e.head, &adj.gp),
        }
    }

    /// Every violated structural condition; empty when the diagram is usable.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for v in &self.vertices {
            if !seen.insert(&v.id) {
                out.push(format!("duplicate vertex id {}", v.id));
            }
        }
        let mut seen = HashSet::new();
        for e in &self.edges {
            if !seen.insert(&e.id) {
                out.push(format!("duplicate edge id {}", e.id));
            }
        }
        for v in &self.vertices {
            let [a, b, c] = &v.edges;
            if a == b || b == c || a == c {
                out.push(format!("vertex {} repeats an edge", v.id));
            }
            for id in &v.edges {
                match self.edge(id) {
                    None => out.push(format!("vertex {} lists unknown edge {id}", v.id)),
                    Some(e) => {
                        let ends = [&e.tail, &e.head].iter().filter(|x| x.as_deref() == Some(&v.id)).count();
                        if ends != 1 {
                            out.push(format!("edge {id} is listed at vertex {} but does not end there once", v.id));
                        }
                        if e.n > 1 && v.edges[2] != *id {
                            out.push(format!("edge {id} has n={} but is not e3 at vertex {}", e.n, v.id));
                        }
                    }
                }
            }
        }
        for e in &self.edges {
            if e.n == 0 {
                out.push(format!("edge {} has n=0", e.id));
            }
            for end in [&e.tail, &e.head].into_iter().flatten() {
                match self.vertex(end) {
                    None => out.push(format!("edge {} ends at unknown vertex {end}", e.id)),
                    Some(v) if !v.edges.contains(&e.id) => {
                        out.push(format!("edge {} ends at vertex {end}, which does not list it", e.id))
                    }
                    _ => {}
                }
            }
            let ends = usize::from(e.tail.is_some()) + usize::from(e.head.is_some());
            if e.compact && ends != 2 {
                out.push(format!("compact edge {} needs both a tail and a head", e.id));
            }
            if !e.compact && ends != 1 {
                out.push(format!("non-compact edge {} needs exactly one endpoint", e.id));
            }
            if e.compact && ends == 2 {
                self.check_compact(e, &mut out);
            }
        }
        out
    }

    fn check_compact(&self, e: &Edge, out: &mut Vec<String>) {
        if e.tail == e.head {
            out.push(format!("edge {} is a loop", e.id));
            return;
        }
        let Some(adj) = &e.adj else {
            out.push(format!("compact edge {} has no adjacency data", e.id));
            return;
        };
        // counterclockwise around the tail: e, f′, f; around the head: e, g, g′
        let next = |vid: &str, id: &str| -> Option<String> {
            let v = self.vertex(vid)?;
            let i = v.edges.iter().position(|x| x == id)?;
            Some(v.edges[(i + 1) % 3].clone())
        };
        let (tail, head) = (e.tail.as_deref().unwrap(), e.head.as_deref().unwrap());
        if next(tail, &e.id).as_deref() != Some(&adj.fp) || next(tail, &adj.fp).as_deref() != Some(&adj.f) {
            out.push(format!("edge {}: (e, f', f) is not the counterclockwise order at {tail}", e.id));
        }
        if next(head, &e.id).as_deref() != Some(&adj.g) || next(head, &adj.g).as_deref() != Some(&adj.gp) {
            out.push(format!("edge {}: (e, g, g') is not the counterclockwise order at {head}", e.id));
        }
        let d = self.deltas(e);
        if let Some(given) = e.delta {
            if given != d.as_array() {
                out.push(format!("edge {}: delta {:?} disagrees with derived {:?}", e.id, given, d.as_array()));
            }
        }
        let cy = e.m + e.mp - d.sum() + 2;
        if cy != 0 {
            out.push(format!(
                "edge {}: m + m' - deltas + 2 = {} + {} - {} + 2 = {cy}, expected 0",
                e.id,
                e.m,
                e.mp,
                d.sum()
            ));
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDiagram(v))
        }
    }

    /// The same geometry with one compact edge pointing the other way.
    pub fn reversed(&self, edge_id: &str) -> Result<WebDiagram> {
        let mut out = self.clone();
        let e = out
            .edges
            .iter_mut()
            .find(|e| e.id == edge_id && e.compact)
            .ok_or_else(|| Error::InvalidDiagram(vec![format!("no compact edge {edge_id}")]))?;
        std::mem::swap(&mut e.tail, &mut e.head);
        std::mem::swap(&mut e.m, &mut e.mp);
        if let Some(a) = &e.adj {
            e.adj = Some(Adjacent { f: a.gp.clone(), fp: a.g.clone(), g: a.fp.clone(), gp: a.f.clone() });
        }
        e.delta = e.delta.map(|[z, zp, i, ip]| [ip, i, zp, z]);
        Ok(out)
    }

    /// Curve variables `v_{e,k}` (compact edges) and box variables `q_{e,k}` (all edges).
    pub fn variables(&self) -> DiagramVars {
        let mut curve = Vec::new();
        let mut boxes = Vec::new();
        let mut curve_at = HashMap::new();
        let mut box_at = HashMap::new();
        for e in &self.edges {
            box_at.insert(e.id.clone(), boxes.len());
            boxes.extend((0..e.n).map(|k| format!("q_{}_{k}", e.id)));
            if e.compact {
                curve_at.insert(e.id.clone(), curve.len());
                curve.extend((0..e.n).map(|k| format!("v_{}_{k}", e.id)));
            }
        }
        DiagramVars {
            curve: VarTable::new(curve).expect("edge ids are unique"),
            boxes: VarTable::new(boxes).expect("edge ids are unique"),
            curve_at,
            box_at,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiagramVars {
    pub curve: Arc<VarTable>,
    pub boxes: Arc<VarTable>,
    curve_at: HashMap<String, usize>,
    box_at: HashMap<String, usize>,
}

impl DiagramVars {
    /// Index of `q_{e,k}`, `k` taken mod `n_e`.
    pub fn q(&self, diagram: &WebDiagram, edge: &str, k: i64) -> usize {
        self.box_at[edge] + residue(k, diagram.n_of(edge))
    }

    pub fn v(&self, diagram: &WebDiagram, edge: &str, k: i64) -> usize {
        self.curve_at[edge] + residue(k, diagram.n_of(edge))
    }
}

/// Partitions on compact edges; anything missing is `∅`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeAssignment {
    pub parts: BTreeMap<String, Partition>,
}

impl EdgeAssignment {
    pub fn get(&self, edge: &str) -> Partition {
        self.parts.get(edge).cloned().unwrap_or_else(Partition::empty)
    }

    pub fn curve_degree(&self) -> usize {
        self.parts.values().map(Partition::size).sum()
    }

    /// Outgoing triple at `v`: `λ_e` on outward edges, `λ′_e` on inward ones.
    pub fn vertex_legs(&self, diagram: &WebDiagram, v: &Vertex) -> LegTriple {
        let leg = |id: &String| {
            let lam = self.get(id);
            let inward = diagram.edge(id).is_some_and(|e| e.head.as_deref() == Some(&v.id));
            if inward {
                lam.conjugate()
            } else {
                lam
            }
        };
        LegTriple::new(leg(&v.edges[0]), leg(&v.edges[1]), leg(&v.edges[2]))
    }

    /// All assignments with total size at most `d_curve`, in a fixed order.
    pub fn enumerate(diagram: &WebDiagram, d_curve: usize) -> Vec<EdgeAssignment> {
        let ids: Vec<String> = diagram.compact_edges().map(|e| e.id.clone()).collect();
        let shapes = Partition::all_up_to(d_curve);
        let mut out = Vec::new();
        fn go(
            ids: &[String],
            shapes: &[Partition],
            budget: usize,
            cur: &mut BTreeMap<String, Partition>,
            out: &mut Vec<EdgeAssignment>,
        ) {
            let Some((first, rest)) = ids.split_first() else {
                out.push(EdgeAssignment { parts: cur.clone() });
                return;
            };
            for s in shapes.iter().filter(|s| s.size() <= budget) {
                if s.is_empty() {
                    cur.remove(first);
                } else {
                    cur.insert(first.clone(), s.clone());
                }
                go(rest, shapes, budget - s.size(), cur, out);
            }
            cur.remove(first);
        }
        go(&ids, &shapes, d_curve, &mut BTreeMap::new(), &mut out);
        out
    }
}

/// A signed monomial in the curve and box variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeFactor {
    pub sign: i64,
    pub curve: Exps,
    pub boxes: Exps,
}

/// Exponent of the edge sign `(−1)^𝐒`.
pub fn edge_sign_exponent(lambda: &Partition, n: usize, m: i64, mp: i64, d: Deltas) -> i64 {
    let cnt: Vec<i64> = colored_counts(lambda, n).into_iter().map(|c| c as i64).collect();
    let at = |k: i64| cnt[residue(k, n)];
    let slope = 1 + m + i64::from(d.zero) + i64::from(d.inf);
    (0..n as i64)
        .map(|k| {
            let c = c_stat(lambda, m, mp, Some((k as usize, n)));
            c * (at(k - 1) - at(k + 1)) + at(k) * (1 + slope * at(k - 1))
        })
        .sum()
}

/// `E^e_λ`: sign, `∏ v_{e,k}^{|λ|_k}`, `q_e^C` and the `A` corrections on
/// the neighbours flagged by δ.
pub fn edge_factor(diagram: &WebDiagram, edge_id: &str, lambda: &Partition) -> Result<EdgeFactor> {
    let vars = diagram.variables();
    let e = diagram
        .edge(edge_id)
        .ok_or_else(|| Error::InvalidDiagram(vec![format!("unknown edge {edge_id}")]))?;
    let mut curve = vec![0; vars.curve.len()];
    let mut boxes = vec![0; vars.boxes.len()];
    if lambda.is_empty() {
        return Ok(EdgeFactor { sign: 1, curve, boxes });
    }
    if !e.compact {
        return Err(Error::InvalidDiagram(vec![format!("non-compact edge {edge_id} carries {lambda}")]));
    }
    let n = e.n;
    let d = diagram.deltas(e);
    let s = edge_sign_exponent(lambda, n, e.m, e.mp, d);
    for (k, c) in colored_counts(lambda, n).into_iter().enumerate() {
        curve[vars.v(diagram, &e.id, k as i64)] += c as i32;
        boxes[vars.q(diagram, &e.id, k as i64)] += c_stat(lambda, e.m, e.mp, Some((k, n))) as i32;
    }
    let adj = e.adj.as_ref().expect("validated compact edge");
    let conj = lambda.conjugate();
    for (on, nb, shape, barred) in [
        (d.zero, &adj.f, lambda, true),
        (d.zero_p, &adj.fp, &conj, false),
        (d.inf, &adj.g, lambda, false),
        (d.inf_p, &adj.gp, &conj, true),
    ] {
        if !on {
            continue;
        }
        let nf = diagram.n_of(nb);
        for k in 0..nf {
            let slot = if barred { -(k as i64) } else { k as i64 };
            boxes[vars.q(diagram, nb, slot)] += a_stat(shape, k, nf) as i32;
        }
    }
    Ok(EdgeFactor { sign: if s.rem_euclid(2) == 0 { 1 } else { -1 }, curve, boxes })
}

/// `Ξ = Σ_k |λ₃|_k(|λ₁|_k + |λ₂|_k + |λ₁|_{k+1} + |λ₂|_{k−1})`, legs coloured as at a
/// `Z_n` vertex.
pub fn xi_stat(legs: &LegTriple, n: usize) -> i64 {
    let c1 = |k: i64| colored_count(&legs.lambda, n, ColorRole::Leg1, residue(k, n)) as i64;
    let c2 = |k: i64| colored_count(&legs.mu, n, ColorRole::Leg2, residue(k, n)) as i64;
    let c3 = colored_counts(&legs.nu, n);
    (0..n as i64)
        .map(|k| c3[k as usize] as i64 * (c1(k) + c2(k) + c1(k + 1) + c2(k - 1)))
        .sum()
}

/// `s̃_k(λ₃) = |λ₃|_{k−1} + |λ₃|_{k+1}` for each colour.
pub fn twist_exponents(nu: &Partition, n: usize) -> Vec<i64> {
    let c = colored_counts(nu, n);
    (0..n as i64)
        .map(|k| (c[residue(k - 1, n)] + c[residue(k + 1, n)]) as i64)
        .collect()
}

fn vertex_w(n: usize, legs: &LegTriple, d: i64) -> Result<Series> {
    let floor = -region_sets(legs).shift();
    let w = if closed_form_valid(n, legs) {
        pt_vertex_closed(n, legs, d, false)?
    } else {
        pt_vertex_enum(n, legs, d)?
    };
    Ok(w.with_floor(floor))
}

fn vertex_floor(legs: &LegTriple) -> i64 {
    -region_sets(legs).shift()
}

/// `(−1)^Ξ · W^n(legs)` in the `q` variables of `e₃`, barred when `e₃`
/// points inward, each slot twisted by `(−1)^{s̃_k}`; exact to box degree `d`.
pub fn vertex_factor(diagram: &WebDiagram, vertex_id: &str, assignment: &EdgeAssignment, d: i64) -> Result<Series> {
    let vars = diagram.variables();
    vertex_factor_in(diagram, &vars, vertex_id, assignment, d)
}

fn vertex_factor_in(
    diagram: &WebDiagram,
    vars: &DiagramVars,
    vertex_id: &str,
    assignment: &EdgeAssignment,
    d: i64,
) -> Result<Series> {
    let v = diagram
        .vertex(vertex_id)
        .ok_or_else(|| Error::InvalidDiagram(vec![format!("unknown vertex {vertex_id}")]))?;
    let e3 = diagram
        .edge(&v.edges[2])
        .ok_or_else(|| Error::InvalidDiagram(vec![format!("unknown edge {}", v.edges[2])]))?;
    let n = e3.n;
    let legs = assignment.vertex_legs(diagram, v);
    let w = vertex_w(n, &legs, d)?;
    let negate: Vec<bool> = twist_exponents(&legs.nu, n).iter().map(|s| s % 2 == 1).collect();
    let w = w.sign_twist(&negate);
    let inward = e3.head.as_deref() == Some(&v.id);
    let images: Vec<Exps> = (0..n as i64)
        .map(|k| {
            let mut im = vec![0; vars.boxes.len()];
            im[vars.q(diagram, &e3.id, if inward { -k } else { k })] = 1;
            im
        })
        .collect();
    let w = w.substitute(&vars.boxes, &images);
    Ok(if xi_stat(&legs, n) % 2 == 0 { w } else { w.neg() })
}

/// The glued PT partition function, one box series per curve class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PtPartition {
    pub curve_vars: Arc<VarTable>,
    pub box_vars: Arc<VarTable>,
    pub curve_degree: usize,
    pub box_degree: i64,
    pub strata: BTreeMap<Exps, Series>,
}

#[derive(Serialize)]
pub struct StratumJson {
    pub curve: BTreeMap<String, i32>,
    pub series: SeriesJson,
}

#[derive(Serialize)]
pub struct PtPartitionJson {
    pub curve_degree: usize,
    pub box_degree: i64,
    pub strata: Vec<StratumJson>,
}

impl PtPartition {
    /// The stratum of a curve class, zero when absent.
    pub fn stratum(&self, curve: &[i32]) -> Series {
        self.strata
            .get(curve)
            .cloned()
            .unwrap_or_else(|| Series::zero(&self.box_vars, Some(self.box_degree)))
    }

    /// Exchange `q_{e,k} ↔ q_{e,−k}` and `v_{e,k} ↔ v_{e,−k}` on one edge.
    pub fn bar_edge(&self, diagram: &WebDiagram, edge_id: &str) -> PtPartition {
        let vars = diagram.variables();
        let n = diagram.n_of(edge_id) as i64;
        let mut qperm: Vec<usize> = (0..self.box_vars.len()).collect();
        for k in 0..n {
            qperm[vars.q(diagram, edge_id, k)] = vars.q(diagram, edge_id, -k);
        }
        let mut vperm: Vec<usize> = (0..self.curve_vars.len()).collect();
        if vars.curve_at.contains_key(edge_id) {
            for k in 0..n {
                vperm[vars.v(diagram, edge_id, k)] = vars.v(diagram, edge_id, -k);
            }
        }
        let strata = self
            .strata
            .iter()
            .map(|(c, s)| {
                let mut c2 = vec![0; c.len()];
                for (k, &x) in c.iter().enumerate() {
                    c2[vperm[k]] = x;
                }
                (c2, s.permute(&qperm))
            })
            .collect();
        PtPartition { strata, ..self.clone() }
    }

    pub fn to_json(&self) -> PtPartitionJson {
        let names = self.curve_vars.names();
        PtPartitionJson {
            curve_degree: self.curve_degree,
            box_degree: self.box_degree,
            strata: self
                .strata
                .iter()
                .map(|(c, s)| StratumJson {
                    curve: c.iter().zip(names).filter(|(x, _)| **x != 0).map(|(x, nm)| (nm.clone(), *x)).collect(),
                    series: s.to_json(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for PtPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.curve_vars.names();
        let mut keys: Vec<&Exps> = self.strata.keys().collect();
        keys.sort_by_key(|c| (degree(c), (*c).clone()));
        for c in keys {
            let mono: Vec<String> = c
                .iter()
                .zip(names)
                .filter(|(x, _)| **x != 0)
                .map(|(x, nm)| if *x == 1 { nm.clone() } else { format!("{nm}^{x}") })
                .collect();
            let label = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
            writeln!(f, "[{label}] {}", self.strata[c])?;
        }
        Ok(())
    }
}

/// One assignment's term `∏ E^e · ∏ (vertex factors)`, before the global
/// sign substitution. `None` when nothing survives below `d_box`.
fn assignment_term(
    diagram: &WebDiagram,
    vars: &DiagramVars,
    a: &EdgeAssignment,
    d_box: i64,
) -> Result<Option<(Exps, Series)>> {
    let mut sign = 1i64;
    let mut curve = vec![0; vars.curve.len()];
    let mut boxes = vec![0; vars.boxes.len()];
    for (id, lam) in &a.parts {
        let ef = edge_factor(diagram, id, lam)?;
        sign *= ef.sign;
        curve.iter_mut().zip(&ef.curve).for_each(|(x, y)| *x += y);
        boxes.iter_mut().zip(&ef.boxes).for_each(|(x, y)| *x += y);
    }
    let floors: Vec<i64> = diagram
        .vertices
        .iter()
        .map(|v| vertex_floor(&a.vertex_legs(diagram, v)))
        .collect();
    let room = d_box - degree(&boxes) - floors.iter().sum::<i64>();
    if room < 0 {
        return Ok(None);
    }
    let mut term = Series::monomial(&vars.boxes, &boxes, sign);
    for (v, f) in diagram.vertices.iter().zip(&floors) {
        term = term.mul(&vertex_factor_in(diagram, vars, &v.id, a, f + room)?)?;
    }
    Ok(Some((curve, term.truncate(d_box))))
}

/// `PT(𝒳)` over assignments of total size `≤ d_curve`, each stratum exact to
/// box degree `d_box`, after `q_{e,0} → −q_{e,0}` on every edge.
pub fn pt_partition(diagram: &WebDiagram, d_curve: usize, d_box: i64) -> Result<PtPartition> {
    diagram.validate()?;
    let vars = diagram.variables();
    let assignments = EdgeAssignment::enumerate(diagram, d_curve);
    let terms: Vec<Option<(Exps, Series)>> = assignments
        .par_iter()
        .map(|a| assignment_term(diagram, &vars, a, d_box))
        .collect::<Result<_>>()?;
    let negate: Vec<bool> = vars.boxes.names().iter().map(|nm| nm.ends_with("_0")).collect();
    let mut strata: BTreeMap<Exps, Series> = BTreeMap::new();
    for (curve, s) in terms.into_iter().flatten() {
        let slot = strata
            .entry(curve)
            .or_insert_with(|| Series::zero(&vars.boxes, Some(d_box)));
        *slot = slot.add(&s)?;
    }
    for s in strata.values_mut() {
        *s = s.sign_twist(&negate);
    }
    strata.retain(|_, s| !s.is_zero());
    Ok(PtPartition { curve_vars: vars.curve, box_vars: vars.boxes, curve_degree: d_curve, box_degree: d_box, strata })
}

/// Inputs of the vertex parity: colored lengths `ℓ(π̃)_k`, colored sizes
/// `‖π̄‖_k`, and the outgoing legs.
#[derive(Clone, Debug, Default)]
pub struct VertexParityData {
    pub labelled_lengths: Vec<i64>,
    pub boxed_sizes: Vec<i64>,
    pub legs: LegTriple,
}

/// Vertex parity: `ℓ_0 + Σ_k (ℓ_k + ‖π̄‖_k) s̃_k(λ₃) + Ξ` mod 2.
pub fn parity_v(data: &VertexParityData, n: usize) -> u8 {
    let at = |v: &[i64], k: usize| v.get(k).copied().unwrap_or(0);
    let tw = twist_exponents(&data.legs.nu, n);
    let mut s = at(&data.labelled_lengths, 0);
    for (k, t) in tw.iter().enumerate() {
        s += (at(&data.labelled_lengths, k) + at(&data.boxed_sizes, k)) * t;
    }
    s += xi_stat(&data.legs, n);
    s.rem_euclid(2) as u8
}

/// Edge parity: `|λ|(m + δ₀ + δ_∞)` when `n = 1`, otherwise
/// `Σ_k C[k](|λ|_{k−1} − |λ|_{k+1}) + |λ|_k(1 + (1+m)|λ|_{k−1})`, mod 2.
pub fn parity_e(lambda: &Partition, n: usize, m: i64, mp: i64, d: Deltas) -> u8 {
    let s = if n == 1 {
        lambda.size() as i64 * (m + i64::from(d.zero) + i64::from(d.inf))
    } else {
        edge_sign_exponent(lambda, n, m, mp, Deltas::default())
    };
    s.rem_euclid(2) as u8
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::partitions::p;

    pub(crate) fn single_vertex(n: usize) -> WebDiagram {
        WebDiagram::from_json(&format!(
            r#"{{"vertices":[{{"id":"v","edges":["a","b","c"]}}],
               "edges":[{{"id":"a","tail":"v","compact":false}},
                        {{"id":"b","tail":"v","compact":false}},
                        {{"id":"c","tail":"v","compact":false,"n":{n}}}]}}"#
        ))
        .unwrap()
    }

    /// One compact edge `e` from `u` to `w`, `e₃` at both ends.
    pub(crate) fn one_edge(n: usize, m: i64, mp: i64) -> WebDiagram {
        WebDiagram::from_json(&format!(
            r#"{{"vertices":[{{"id":"u","edges":["fp","f","e"]}},{{"id":"w","edges":["g","gp","e"]}}],
               "edges":[{{"id":"e","tail":"u","head":"w","compact":true,"n":{n},"m":{m},"mp":{mp},
                          "adj":{{"f":"f","fp":"fp","g":"g","gp":"gp"}}}},
                        {{"id":"f","tail":"u","compact":false}},{{"id":"fp","tail":"u","compact":false}},
                        {{"id":"g","head":"w","compact":false}},{{"id":"gp","head":"w","compact":false}}]}}"#
        ))
        .unwrap()
    }

    /// `u –e→ w –h→ x` with `h` the `Z_2` edge, so `δ_∞(e) = 1`.
    pub(crate) fn chain() -> WebDiagram {
        WebDiagram::from_json(
            r#"{"vertices":[{"id":"u","edges":["a","b","e"]},{"id":"w","edges":["gp","e","h"]},
                            {"id":"x","edges":["c","d","h"]}],
               "edges":[{"id":"e","tail":"u","head":"w","compact":true,"n":1,"m":-1,"mp":0,
                         "adj":{"f":"b","fp":"a","g":"h","gp":"gp"}},
                        {"id":"h","tail":"w","head":"x","compact":true,"n":2,"m":-1,"mp":-1,
                         "adj":{"f":"e","fp":"gp","g":"c","gp":"d"}},
                        {"id":"a","tail":"u","compact":false},{"id":"b","tail":"u","compact":false},
                        {"id":"gp","tail":"w","compact":false},
                        {"id":"c","head":"x","compact":false},{"id":"d","head":"x","compact":false}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(single_vertex(1).validate().is_ok());
        assert!(one_edge(1, -1, -1).validate().is_ok());
        let bad = one_edge(1, 0, 0).validate().unwrap_err();
        let Error::InvalidDiagram(v) = bad else { panic!() };
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("= 2"), "{v:?}");
        assert!(chain().validate().is_ok(), "{:?}", chain().violations());
        assert_eq!(chain().deltas(chain().edge("e").unwrap()), Deltas { inf: true, ..Deltas::default() });
    }

    #[test]
    fn validate_catches_structure() {
        let mut d = single_vertex(2);
        d.vertices[0].edges = ["c".into(), "a".into(), "b".into()];
        assert!(d.violations().iter().any(|s| s.contains("not e3")));
        let mut d = one_edge(1, -1, -1);
        d.edges[0].adj.as_mut().unwrap().f = "fp".into();
        assert!(d.violations().iter().any(|s| s.contains("counterclockwise")));
        let mut d = one_edge(1, -1, -1);
        d.edges[0].delta = Some([1, 0, 0, 0]);
        assert!(d.violations().iter().any(|s| s.contains("disagrees")));
        let mut d = one_edge(1, -1, -1);
        d.vertices[1].edges[0] = "zz".into();
        assert!(d.violations().iter().any(|s| s.contains("unknown edge zz")));
    }

    #[test]
    fn reversal_keeps_validity() {
        for d in [one_edge(2, -1, -1), chain()] {
            for e in d.compact_edges() {
                let r = d.reversed(&e.id).unwrap();
                assert!(r.validate().is_ok(), "{:?}", r.violations());
                assert_eq!(r.reversed(&e.id).unwrap(), d);
            }
        }
    }

    #[test]
    fn edge_factor_examples() {
        let d = one_edge(1, -1, -1);
        let ef = edge_factor(&d, "e", &Partition::empty()).unwrap();
        assert_eq!(ef, EdgeFactor { sign: 1, curve: vec![0], boxes: vec![0; 5] });
        let ef = edge_factor(&d, "e", &p(&[1])).unwrap();
        assert_eq!(ef.sign, -1);
        assert_eq!(ef.curve, vec![1]);
        assert_eq!(ef.boxes, vec![1, 0, 0, 0, 0]);
        // C = Σ (i + j + 1) = 1 + 2 for (2)
        let ef = edge_factor(&d, "e", &p(&[2])).unwrap();
        assert_eq!((ef.sign, ef.boxes[0]), (1, 3));
        let d = one_edge(2, -1, -1);
        let ef = edge_factor(&d, "e", &p(&[1])).unwrap();
        assert_eq!(ef.curve, vec![1, 0]);
        assert_eq!(&ef.boxes[..2], &[1, 0]);
    }

    #[test]
    fn edge_factor_a_correction() {
        let d = chain();
        let vars = d.variables();
        // δ_∞(e) = 1 with g = h: q_h^{A_λ} unbarred
        let lam = p(&[1, 1]);
        let ef = edge_factor(&d, "e", &lam).unwrap();
        for k in 0..2 {
            assert_eq!(ef.boxes[vars.q(&d, "h", k as i64)], a_stat(&lam, k, 2) as i32);
        }
        assert_eq!(d.deltas(d.edge("h").unwrap()), Deltas::default());
    }

    #[test]
    fn twist_and_xi_examples() {
        assert_eq!(twist_exponents(&p(&[1]), 2), vec![0, 2]);
        let legs = LegTriple::new(p(&[1]), Partition::empty(), p(&[1]));
        assert_eq!(xi_stat(&legs, 2), 1);
        assert_eq!(xi_stat(&LegTriple::vacuum(), 3), 0);
    }

    #[test]
    fn vertex_factor_examples() {
        let d = single_vertex(2);
        let s = vertex_factor(&d, "v", &EdgeAssignment::default(), 4).unwrap();
        assert!(s.agrees_to(&Series::one(&d.variables().boxes), 4));
        // inward e₃ bars the variables: w sees λ′ and q_{e,−k}
        let d = one_edge(3, -1, -1);
        let mut a = EdgeAssignment::default();
        a.parts.insert("e".into(), p(&[2]));
        let vars = d.variables();
        let at_w = vertex_factor(&d, "w", &a, 3).unwrap();
        let legs = LegTriple::new(Partition::empty(), Partition::empty(), p(&[1, 1]));
        let w = pt_vertex_closed(3, &legs, 3, false).unwrap();
        let neg: Vec<bool> = twist_exponents(&legs.nu, 3).iter().map(|s| s % 2 == 1).collect();
        let images: Vec<Exps> = (0..3)
            .map(|k| {
                let mut im = vec![0; vars.boxes.len()];
                im[vars.q(&d, "e", -k)] = 1;
                im
            })
            .collect();
        let want = w.sign_twist(&neg).substitute(&vars.boxes, &images);
        assert!(at_w.agrees_to(&want, 3));
    }

    #[test]
    fn single_vertex_is_one() {
        for n in 1..=3 {
            let z = pt_partition(&single_vertex(n), 2, 4).unwrap();
            assert_eq!(z.strata.len(), 1);
            assert!(z.stratum(&[]).agrees_to(&Series::one(&z.box_vars), 4));
        }
    }

    /// `∏_{k≥1} (1 − (−q)^k v)^k` to `v²`, `q^d`.
    fn conifold(d: i64) -> [Vec<BigInt>; 3] {
        let mut poly = [vec![BigInt::from(0); d as usize + 1], vec![BigInt::from(0); d as usize + 1], vec![BigInt::from(0); d as usize + 1]];
        poly[0][0] = BigInt::from(1);
        for k in 1..=d {
            let c = if k % 2 == 0 { BigInt::from(-1) } else { BigInt::from(1) };
            for _ in 0..k {
                // multiply by 1 − (−1)^k q^k v
                for j in (1..3).rev() {
                    for e in (k..=d).rev() {
                        let add = poly[j - 1][(e - k) as usize].clone() * &c;
                        poly[j][e as usize] += add;
                    }
                }
            }
        }
        poly
    }

    #[test]
    fn smooth_edge_matches_conifold_product() {
        let d = one_edge(1, -1, -1);
        let z = pt_partition(&d, 2, 6).unwrap();
        let want = conifold(6);
        for (j, row) in want.iter().enumerate() {
            let s = z.stratum(&[j as i32]);
            for (e, c) in row.iter().enumerate() {
                assert_eq!(s.coeff(&[e as i32, 0, 0, 0, 0]), *c, "v^{j} q^{e}");
            }
        }
    }

    #[test]
    fn orientation_reversal_invariant() {
        for d in [one_edge(1, -1, -1), one_edge(2, -1, -1), one_edge(3, -1, -1), chain()] {
            let z = pt_partition(&d, 1, 3).unwrap();
            for e in d.compact_edges() {
                let r = d.reversed(&e.id).unwrap();
                let zr = pt_partition(&r, 1, 3).unwrap().bar_edge(&r, &e.id);
                assert_eq!(z, zr, "reversing {}", e.id);
            }
        }
    }

    #[test]
    fn parity_examples() {
        let vac = VertexParityData::default();
        assert_eq!(parity_v(&vac, 2), 0);
        assert_eq!(parity_e(&Partition::empty(), 2, 0, 0, Deltas::default()), 0);
        assert_eq!(parity_e(&p(&[1]), 1, -1, -1, Deltas::default()), 1);
        // n = 2, (1): C[0] (|λ|_1 − |λ|_1) + |λ|_0 (1 + 0·|λ|_1) = 1
        assert_eq!(parity_e(&p(&[1]), 2, -1, -1, Deltas::default()), 1);
    }

    #[test]
    fn smooth_edge_parity_matches_sign() {
        for lam in Partition::all_up_to(6) {
            for m in -3..=1 {
                for bits in 0..4u8 {
                    let d = Deltas { zero: bits & 1 == 1, inf: bits & 2 == 2, ..Deltas::default() };
                    let s = edge_sign_exponent(&lam, 1, m, -2 - m, d).rem_euclid(2) as u8;
                    assert_eq!(parity_e(&lam, 1, m, -2 - m, d), s, "{lam} m={m}");
                }
            }
        }
    }
}
