//! Perfect matchings of the tiling graph and dimer configurations on patches.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::cover::{CoverPatch, LiftedTile};
use crate::error::{Error, Result};
use crate::fterm::Engine;
use crate::tiling::{BraneTiling, Color, EdgeId, VertexId};

/// A set of edges covering every vertex exactly once, sorted by id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct PerfectMatching(pub Vec<EdgeId>);

impl PerfectMatching {
    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn is_perfect(&self, t: &BraneTiling) -> bool {
        let mut hits = vec![0u32; t.vertices().len()];
        for &e in &self.0 {
            let edge = t.edge(e);
            hits[edge.black.0] += 1;
            hits[edge.white.0] += 1;
        }
        hits.iter().all(|&h| h == 1)
    }
}

/// All perfect matchings, in lexicographic order of their sorted edge ids.
pub fn enumerate_matchings(t: &BraneTiling) -> Vec<PerfectMatching> {
    let nv = t.vertices().len();
    let mut order: Vec<usize> = (0..nv).collect();
    order.sort_by_key(|&v| (t.degree(VertexId(v)), v));
    let mut covered = vec![false; nv];
    let mut chosen = Vec::new();
    let mut out = Vec::new();
    fn go(
        t: &BraneTiling,
        order: &[usize],
        covered: &mut [bool],
        chosen: &mut Vec<EdgeId>,
        out: &mut Vec<PerfectMatching>,
    ) {
        let Some(&v) = order.iter().find(|&&v| !covered[v]) else {
            let mut m = chosen.clone();
            m.sort();
            out.push(PerfectMatching(m));
            return;
        };
        covered[v] = true;
        let mut incident: Vec<EdgeId> = t.rotation(VertexId(v)).to_vec();
        incident.sort();
        for e in incident {
            let edge = t.edge(e);
            let w = if edge.black.0 == v {
                edge.white.0
            } else {
                edge.black.0
            };
            if covered[w] {
                continue;
            }
            covered[w] = true;
            chosen.push(e);
            go(t, order, covered, chosen, out);
            chosen.pop();
            covered[w] = false;
        }
        covered[v] = false;
    }
    go(t, &order, &mut covered, &mut chosen, &mut out);
    out.sort();
    out
}

/// Edges of `t` that lie in no perfect matching; empty when nondegenerate.
pub fn nondegeneracy(t: &BraneTiling, matchings: &[PerfectMatching]) -> Vec<EdgeId> {
    (0..t.edges().len())
        .map(EdgeId)
        .filter(|&e| !matchings.iter().any(|m| m.contains(e)))
        .collect()
}

/// Positive edge weights with a common vertex sum `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Grading {
    pub weights: Vec<u64>,
    pub c: u64,
    pub family: Vec<PerfectMatching>,
}

/// Weights from a greedy covering family of perfect matchings.
///
/// Any positive solution of the vertex-sum equations is, after scaling, a
/// fractional perfect matching with full support, hence a positive
/// combination of perfect matchings that together cover every edge. So a
/// covering family exists exactly when positive homogeneous weights do,
/// and the failure case reports the uncovered edges.
pub fn homogeneous_grading(t: &BraneTiling) -> Result<Grading> {
    let matchings = enumerate_matchings(t);
    let uncovered = nondegeneracy(t, &matchings);
    if !uncovered.is_empty() {
        return Err(Error::NoGrading {
            uncovered: uncovered.iter().map(|&e| t.edge(e).name.clone()).collect(),
        });
    }
    let ne = t.edges().len();
    let mut covered = vec![false; ne];
    let mut family: Vec<PerfectMatching> = Vec::new();
    while covered.iter().any(|c| !c) {
        let gain = |m: &PerfectMatching| m.0.iter().filter(|e| !covered[e.0]).count();
        // max gain, earliest in lexicographic order on ties
        let mut best = &matchings[0];
        for m in &matchings {
            if gain(m) > gain(best) {
                best = m;
            }
        }
        for e in &best.0 {
            covered[e.0] = true;
        }
        family.push(best.clone());
    }
    let mut weights = vec![0u64; ne];
    for m in &family {
        for e in &m.0 {
            weights[e.0] += 1;
        }
    }
    Ok(Grading {
        weights,
        c: family.len() as u64,
        family,
    })
}

/// A dimer configuration on a finite region of a patch: `members` are
/// lifted edge ids, all on the boundary of some region tile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimerWindow {
    pub region: BTreeSet<LiftedTile>,
    pub members: BTreeSet<usize>,
}

impl DimerWindow {
    /// Lifted edges on the boundary of some region tile.
    pub fn decided(&self, patch: &CoverPatch) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &t in &self.region {
            for k in 0..patch.boundary_len(t) {
                out.insert(patch.edge_at(t, k));
            }
        }
        out
    }

    /// Flips along the given edge set (symmetric difference).
    pub fn flipped(&self, edges: &BTreeSet<usize>) -> DimerWindow {
        DimerWindow {
            region: self.region.clone(),
            members: self.members.symmetric_difference(edges).copied().collect(),
        }
    }

    /// Checks the matching condition at every vertex of the region.
    pub fn check(&self, patch: &CoverPatch) -> Result<()> {
        let mut hits: HashMap<usize, u32> = HashMap::new();
        for &t in &self.region {
            for k in 0..patch.boundary_len(t) {
                hits.entry(patch.corner_vertex(t, k)).or_insert(0);
            }
        }
        for &e in &self.members {
            let le = &patch.edges()[e];
            for v in [le.black, le.white] {
                *hits.entry(v).or_insert(0) += 1;
            }
        }
        match hits.iter().find(|(_, &h)| h != 1) {
            Some((v, h)) => Err(Error::Invariant(format!(
                "lifted vertex {v} is covered {h} times"
            ))),
            None => Ok(()),
        }
    }
}

/// A closed walk in the lifted graph; `vertices[k]` to `vertices[k+1]`
/// along `edges[k]` (indices wrap).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrientedLoop {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl OrientedLoop {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge_set(&self) -> BTreeSet<usize> {
        self.edges.iter().copied().collect()
    }
}

fn other_end(patch: &CoverPatch, e: usize, v: usize) -> usize {
    let le = &patch.edges()[e];
    if le.black == v {
        le.white
    } else {
        le.black
    }
}

/// The symmetric difference of two configurations split into loops, each
/// oriented black to white along `d` and white to black along `d2`.
pub fn difference_loops(
    patch: &CoverPatch,
    d: &DimerWindow,
    d2: &DimerWindow,
) -> Result<Vec<OrientedLoop>> {
    let diff: BTreeSet<usize> = d
        .members
        .symmetric_difference(&d2.members)
        .copied()
        .collect();
    let mut at: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in &diff {
        let le = &patch.edges()[e];
        at.entry(le.black).or_default().push(e);
        at.entry(le.white).or_default().push(e);
    }
    if at.values().any(|es| es.len() != 2) {
        return Err(Error::NotCycles);
    }
    let mut used = HashSet::new();
    let mut loops = Vec::new();
    for &e0 in &diff {
        if used.contains(&e0) {
            continue;
        }
        let le = &patch.edges()[e0];
        // start at the black end of a `d` edge, or the white end of a `d2` edge
        let mut v = if d.members.contains(&e0) {
            le.black
        } else {
            le.white
        };
        let mut e = e0;
        let mut lp = OrientedLoop {
            vertices: Vec::new(),
            edges: Vec::new(),
        };
        loop {
            used.insert(e);
            lp.vertices.push(v);
            lp.edges.push(e);
            v = other_end(patch, e, v);
            let next = at[&v]
                .iter()
                .copied()
                .find(|&x| x != e)
                .ok_or(Error::NotCycles)?;
            if next == e0 {
                break;
            }
            e = next;
        }
        loops.push(lp);
    }
    Ok(loops)
}

/// Region tiles with heights; the complement of the region is height zero.
pub type Heights = std::collections::BTreeMap<LiftedTile, i64>;

/// Oriented crossing count of the difference loops of `d` and `d2`,
/// measured from outside the region.
pub fn height_function(patch: &CoverPatch, d: &DimerWindow, d2: &DimerWindow) -> Result<Heights> {
    let loops = difference_loops(patch, d, d2)?;
    // orientation sign per loop edge: +1 for white to black, -1 for black to white
    let mut sign: HashMap<usize, i64> = HashMap::new();
    for lp in &loops {
        for (k, &e) in lp.edges.iter().enumerate() {
            let from = lp.vertices[k];
            sign.insert(
                e,
                if patch.edges()[e].black == from {
                    -1
                } else {
                    1
                },
            );
        }
    }
    let region = &d.region;
    let mut h: HashMap<LiftedTile, i64> = HashMap::new();
    let mut queue = VecDeque::new();
    // seed from edges leaving the region
    for &t in region {
        for k in 0..patch.boundary_len(t) {
            let outside = match patch.neighbor(t, k) {
                Some((n, _)) => !region.contains(&n),
                None => true,
            };
            if outside {
                let e = patch.edge_at(t, k);
                if sign.contains_key(&e) {
                    return Err(Error::WindowTooSmall(
                        "a difference loop meets the region boundary".into(),
                    ));
                }
                if h.insert(t, 0).is_none() {
                    queue.push_back(t);
                }
            }
        }
    }
    while let Some(a) = queue.pop_front() {
        let ha = h[&a];
        for k in 0..patch.boundary_len(a) {
            let Some((b, _)) = patch.neighbor(a, k) else {
                continue;
            };
            if !region.contains(&b) {
                continue;
            }
            let e = patch.edge_at(a, k);
            let delta = match sign.get(&e) {
                None => 0,
                Some(&s) => {
                    let with_arrow = patch.edges()[e].tail_side.map(|(x, _)| x) == Some(a);
                    s * if with_arrow { 1 } else { -1 }
                }
            };
            match h.get(&b) {
                None => {
                    h.insert(b, ha + delta);
                    queue.push_back(b);
                }
                Some(&hb) if hb != ha + delta => {
                    return Err(Error::Invariant(
                        "height function is not well defined".into(),
                    ));
                }
                Some(_) => {}
            }
        }
    }
    if h.len() != region.len() {
        return Err(Error::WindowTooSmall(
            "region is not connected to its boundary".into(),
        ));
    }
    Ok(h.into_iter().collect())
}

/// Simple cycles of length at most `cap` in the lifted graph of the region
/// whose alternate edges lie in `d`, each oriented black to white along its
/// `d` edges.
pub fn obtainable_loops(patch: &CoverPatch, d: &DimerWindow, cap: usize) -> Vec<OrientedLoop> {
    let decided = d.decided(patch);
    let mut at: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in &decided {
        let le = &patch.edges()[e];
        at.entry(le.black).or_default().push(e);
        at.entry(le.white).or_default().push(e);
    }
    let mut partner: HashMap<usize, usize> = HashMap::new();
    for &e in &d.members {
        let le = &patch.edges()[e];
        partner.insert(le.black, e);
        partner.insert(le.white, e);
    }
    let mut out = Vec::new();
    // each loop is found from its least `d` edge, leaving its black end
    for &e0 in &d.members {
        let start = patch.edges()[e0].black;
        let mut path_v = vec![start];
        let mut path_e = vec![e0];
        let mut on_path: HashSet<usize> = HashSet::from([start]);
        fn dfs(
            patch: &CoverPatch,
            at: &HashMap<usize, Vec<usize>>,
            partner: &HashMap<usize, usize>,
            members: &BTreeSet<usize>,
            e0: usize,
            cap: usize,
            path_v: &mut Vec<usize>,
            path_e: &mut Vec<usize>,
            on_path: &mut HashSet<usize>,
            out: &mut Vec<OrientedLoop>,
        ) {
            let last_e = *path_e.last().unwrap();
            let v = other_end(patch, last_e, *path_v.last().unwrap());
            // at v: leave by a non-member edge
            if path_e.len() + 1 > cap {
                return;
            }
            for &f in at.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if members.contains(&f) {
                    continue;
                }
                let w = other_end(patch, f, v);
                if w == path_v[0] {
                    if path_e.len() + 1 >= 4 {
                        let mut vs = path_v.clone();
                        vs.push(v);
                        let mut es = path_e.clone();
                        es.push(f);
                        out.push(OrientedLoop {
                            vertices: vs,
                            edges: es,
                        });
                    }
                    continue;
                }
                if on_path.contains(&w) || on_path.contains(&v) && v != *path_v.last().unwrap() {
                    continue;
                }
                let Some(&g) = partner.get(&w) else { continue };
                if g < e0 || path_e.len() + 2 > cap {
                    continue;
                }
                let x = other_end(patch, g, w);
                if x == path_v[0] || on_path.contains(&x) || x == v {
                    continue;
                }
                path_v.push(v);
                path_e.push(f);
                path_v.push(w);
                path_e.push(g);
                on_path.insert(v);
                on_path.insert(w);
                dfs(
                    patch, at, partner, members, e0, cap, path_v, path_e, on_path, out,
                );
                on_path.remove(&w);
                on_path.remove(&v);
                path_v.truncate(path_v.len() - 2);
                path_e.truncate(path_e.len() - 2);
            }
        }
        dfs(
            patch,
            &at,
            &partner,
            &d.members,
            e0,
            cap,
            &mut path_v,
            &mut path_e,
            &mut on_path,
            &mut out,
        );
    }
    // each cycle is traversed in both directions from its least edge; keep one
    let mut seen = HashSet::new();
    out.retain(|lp| {
        let mut key = lp.edges.clone();
        key.sort();
        seen.insert(key)
    });
    out
}

/// The boundary of a finite set of tiles as one loop. Errors when the set
/// touches the patch boundary or its boundary is not a single simple loop.
pub fn region_boundary(patch: &CoverPatch, tiles: &BTreeSet<LiftedTile>) -> Result<OrientedLoop> {
    let mut edges = BTreeSet::new();
    for &t in tiles {
        for k in 0..patch.boundary_len(t) {
            match patch.neighbor(t, k) {
                None => {
                    return Err(Error::WindowTooSmall(
                        "region touches the patch boundary".into(),
                    ))
                }
                Some((n, _)) if !tiles.contains(&n) => {
                    edges.insert(patch.edge_at(t, k));
                }
                _ => {}
            }
        }
    }
    let mut at: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in &edges {
        let le = &patch.edges()[e];
        at.entry(le.black).or_default().push(e);
        at.entry(le.white).or_default().push(e);
    }
    if at.values().any(|es| es.len() != 2) {
        return Err(Error::InvalidHeight(
            "region boundary is not a disjoint union of simple loops".into(),
        ));
    }
    let Some(&e0) = edges.iter().next() else {
        return Err(Error::InvalidHeight("empty region".into()));
    };
    let mut v = patch.edges()[e0].black;
    let mut e = e0;
    let mut lp = OrientedLoop {
        vertices: Vec::new(),
        edges: Vec::new(),
    };
    loop {
        lp.vertices.push(v);
        lp.edges.push(e);
        v = other_end(patch, e, v);
        let next = at[&v]
            .iter()
            .copied()
            .find(|&x| x != e)
            .expect("degree two");
        if next == e0 {
            break;
        }
        e = next;
    }
    if lp.edges.len() != edges.len() {
        return Err(Error::InvalidHeight(
            "region boundary has several loops".into(),
        ));
    }
    Ok(lp)
}

/// Tie-break among tiles of equal minimal weight when extending the tile
/// order to a total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    Ascending,
    Descending,
}

/// The canonical configuration near the root together with its region
/// (the tiles processed, in order).
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalDimer {
    pub window: DimerWindow,
    pub order: Vec<LiftedTile>,
}

/// Builds the canonical configuration tile by tile along a total order
/// refining the tile order, on every tile whose minimal weight is certified
/// by the patch.
pub fn canonical_dimer(engine: &Engine, tie: TieBreak) -> Result<CanonicalDimer> {
    let patch = engine.patch();
    let root = patch.root();
    let mut tiles: Vec<LiftedTile> = patch.tiles().filter(|&t| engine.is_certified(t)).collect();
    tiles.sort_by(|&a, &b| {
        let key = engine.min_weight(a).cmp(&engine.min_weight(b));
        key.then(match tie {
            TieBreak::Ascending => a.cmp(&b),
            TieBreak::Descending => b.cmp(&a),
        })
    });
    if tiles.first() != Some(&root) {
        return Err(Error::Invariant(
            "root is not first in the tile order".into(),
        ));
    }
    let edges = patch.edges();
    let mut region: BTreeSet<LiftedTile> = BTreeSet::from([root]);
    let mut members = BTreeSet::new();
    for k in 0..patch.boundary_len(root) {
        let e = patch.edge_at(root, k);
        // in-positions: the black-to-white side of the edge faces the root
        if edges[e].head_side == Some((root, k)) {
            members.insert(e);
        }
    }
    let mut order = vec![root];
    for &t in &tiles[1..] {
        let len = patch.boundary_len(t);
        let shared: Vec<bool> = (0..len)
            .map(|k| matches!(patch.neighbor(t, k), Some((n, _)) if region.contains(&n)))
            .collect();
        let count = shared.iter().filter(|&&s| s).count();
        if count == 0 || count == len {
            return Err(Error::Forcing(format!(
                "tile {} does not attach along an arc",
                t.0
            )));
        }
        // the free arc starts right after the shared arc
        let s = (0..len)
            .find(|&k| !shared[k] && shared[(k + len - 1) % len])
            .expect("mixed boundary");
        let free: Vec<usize> = (0..len - count).map(|j| (s + j) % len).collect();
        if free.iter().any(|&k| shared[k]) {
            return Err(Error::Forcing(format!(
                "tile {} meets the region in more than one arc",
                t.0
            )));
        }
        let first_vertex = patch.corner_vertex(t, s);
        let last = *free.last().unwrap();
        let last_vertex = patch.corner_vertex(t, (last + 1) % len);
        if patch.vertices()[first_vertex].color != Color::White
            || patch.vertices()[last_vertex].color != Color::Black
        {
            return Err(Error::Forcing(format!(
                "free arc of tile {} does not run from white to black",
                t.0
            )));
        }
        // interior vertices of the free arc must be new
        let mut region_vertices: HashSet<usize> = HashSet::new();
        for &r in &region {
            for k in 0..patch.boundary_len(r) {
                region_vertices.insert(patch.corner_vertex(r, k));
            }
        }
        for &k in &free[1..] {
            if region_vertices.contains(&patch.corner_vertex(t, k)) {
                return Err(Error::Forcing(format!("tile {} pinches the region", t.0)));
            }
        }
        region.insert(t);
        // the continuing boundary edges at both ends must already be members
        for (v, own) in [(first_vertex, free[0]), (last_vertex, last)] {
            let own_edge = patch.edge_at(t, own);
            let cont = boundary_edges_at(patch, &region, v)?
                .into_iter()
                .find(|&e| e != own_edge)
                .ok_or_else(|| Error::Forcing("boundary does not continue".into()))?;
            if !members.contains(&cont) {
                return Err(Error::Forcing(format!(
                    "boundary edge {cont} next to tile {} is not in the configuration",
                    t.0
                )));
            }
        }
        for j in (1..free.len()).step_by(2) {
            members.insert(patch.edge_at(t, free[j]));
        }
        order.push(t);
    }
    Ok(CanonicalDimer {
        window: DimerWindow { region, members },
        order,
    })
}

/// Edges at lifted vertex `v` with exactly one side in `region`.
fn boundary_edges_at(
    patch: &CoverPatch,
    region: &BTreeSet<LiftedTile>,
    v: usize,
) -> Result<Vec<usize>> {
    let mut out = BTreeSet::new();
    for &(t, k) in &patch.vertices()[v].corners {
        let len = patch.boundary_len(t);
        for pos in [k, (k + len - 1) % len] {
            let e = patch.edge_at(t, pos);
            let inside = patch
                .edge_tiles(e)
                .iter()
                .filter(|x| region.contains(x))
                .count();
            let sides = patch.edge_tiles(e).len();
            if sides < 2 && inside == 1 {
                return Err(Error::WindowTooSmall(
                    "region reaches the patch boundary".into(),
                ));
            }
            if inside == 1 {
                out.insert(e);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Whether alternate edges of the loop lie in `d`.
pub fn is_obtainable(lp: &OrientedLoop, d: &DimerWindow) -> bool {
    let n = lp.edges.len();
    if !n.is_multiple_of(2) {
        return false;
    }
    (0..2).any(|p| (0..n).all(|k| d.members.contains(&lp.edges[k]) == (k % 2 == p)))
}
