//! Finite patches of the universal cover.
//!
//! A patch is grown by face pairing: every lifted face is a copy of its
//! base face, glued to neighbours edge by edge. Around a lifted vertex the
//! corners form a fan; a fan that is one gluing short of the full vertex
//! degree is closed, and a walk that goes all the way round but lands on a
//! different copy of the starting corner identifies the two copies. This
//! is coset enumeration with vertex links as relators, so no group theory
//! is needed and the same code serves every genus.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice;
use crate::tiling::{
    dual_quiver, vertex_cycle, Arrow, BraneTiling, Color, Dart, DualQuiver, EdgeId, FaceId,
    VertexId,
};

/// Default bound on the number of lifted faces a development may create.
pub const DEFAULT_PATCH_CAP: usize = 100_000;

/// A tile of the universal cover, identified by its index in a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct LiftedTile(pub u32);

impl LiftedTile {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A lifted vertex: the corners of patch tiles that meet at it.
#[derive(Debug, Clone, Serialize)]
pub struct LiftedVertex {
    pub base: VertexId,
    pub color: Color,
    /// Corners `(tile, position)`; corner `k` is the origin of dart `k`.
    pub corners: Vec<(LiftedTile, usize)>,
    /// True when every face around the vertex lies in the patch.
    pub complete: bool,
}

/// A lifted edge with the patch tiles on either side.
#[derive(Debug, Clone, Serialize)]
pub struct LiftedEdge {
    pub base: EdgeId,
    pub black: usize,
    pub white: usize,
    /// Side where the edge is traversed black to white: the head of its arrow.
    pub head_side: Option<(LiftedTile, usize)>,
    /// Side where the edge is traversed white to black: the tail of its arrow.
    pub tail_side: Option<(LiftedTile, usize)>,
}

#[derive(Debug, Clone)]
struct TileData {
    face: FaceId,
    dist: usize,
    glue: Vec<Option<(LiftedTile, usize)>>,
    label: Vec<i64>,
    vertex: Vec<usize>,
    edge: Vec<usize>,
}

/// Per-arrow homology classes in `Z^(2g)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyLabels {
    pub genus: usize,
    pub labels: Vec<Vec<i64>>,
}

impl HomologyLabels {
    pub fn of(&self, a: Arrow) -> &[i64] {
        &self.labels[a.index()]
    }

    pub fn word_sum(&self, w: &[Arrow]) -> Vec<i64> {
        let mut s = vec![0; 2 * self.genus];
        for a in w {
            for (x, y) in s.iter_mut().zip(self.of(*a)) {
                *x += y;
            }
        }
        s
    }
}

/// A developed patch around a base tile.
#[derive(Debug, Clone)]
pub struct CoverPatch {
    base: FaceId,
    radius: usize,
    genus: usize,
    closed: bool,
    tiles: Vec<TileData>,
    vertices: Vec<LiftedVertex>,
    edges: Vec<LiftedEdge>,
    quiver: DualQuiver,
    labels: HomologyLabels,
    by_label: HashMap<(FaceId, Vec<i64>), LiftedTile>,
    face_boundary: Vec<Vec<Dart>>,
}

impl CoverPatch {
    pub fn root(&self) -> LiftedTile {
        LiftedTile(0)
    }

    pub fn base_face(&self) -> FaceId {
        self.base
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// True when the development closed up: the patch is the whole cover.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn tiles(&self) -> impl Iterator<Item = LiftedTile> + '_ {
        (0..self.tiles.len()).map(|k| LiftedTile(k as u32))
    }

    pub fn face(&self, t: LiftedTile) -> FaceId {
        self.tiles[t.index()].face
    }

    /// Face-graph distance from the root.
    pub fn dist(&self, t: LiftedTile) -> usize {
        self.tiles[t.index()].dist
    }

    /// Homology label of the tile (empty on the sphere).
    pub fn label(&self, t: LiftedTile) -> &[i64] {
        &self.tiles[t.index()].label
    }

    pub fn labels(&self) -> &HomologyLabels {
        &self.labels
    }

    pub fn quiver(&self) -> &DualQuiver {
        &self.quiver
    }

    /// Tile with the given base face and homology label (torus only).
    pub fn find_by_label(&self, face: FaceId, label: &[i64]) -> Option<LiftedTile> {
        self.by_label.get(&(face, label.to_vec())).copied()
    }

    /// Neighbour across boundary position `pos`, with its matching position.
    pub fn neighbor(&self, t: LiftedTile, pos: usize) -> Option<(LiftedTile, usize)> {
        self.tiles[t.index()].glue[pos]
    }

    /// Tile reached by following arrow `a` forward from `t`.
    pub fn step(&self, t: LiftedTile, a: Arrow) -> Option<LiftedTile> {
        let data = &self.quiver.arrows[a.index()];
        if data.tail != self.face(t) {
            return None;
        }
        self.neighbor(t, data.out_pos).map(|(n, _)| n)
    }

    /// Tile reached by following arrow `a` backward from `t`.
    pub fn step_back(&self, t: LiftedTile, a: Arrow) -> Option<LiftedTile> {
        let data = &self.quiver.arrows[a.index()];
        if data.head != self.face(t) {
            return None;
        }
        self.neighbor(t, data.in_pos).map(|(n, _)| n)
    }

    /// Lifted arrows leaving `t` that stay in the patch, in arrow order.
    pub fn out_steps(&self, t: LiftedTile) -> Vec<(Arrow, LiftedTile)> {
        let f = self.face(t);
        self.quiver
            .out_arrows(f)
            .filter_map(|a| self.step(t, a).map(|n| (a, n)))
            .collect()
    }

    /// Lifted arrows entering `t` from inside the patch.
    pub fn in_steps(&self, t: LiftedTile) -> Vec<(Arrow, LiftedTile)> {
        let f = self.face(t);
        self.quiver
            .in_arrows(f)
            .filter_map(|a| self.step_back(t, a).map(|n| (a, n)))
            .collect()
    }

    /// Endpoint of the lift of `w` starting at `start`.
    pub fn lift_path(&self, start: LiftedTile, w: &[Arrow]) -> Result<LiftedTile> {
        let mut t = start;
        for pair in w.windows(2) {
            if self.quiver.head(pair[0]) != self.quiver.tail(pair[1]) {
                return Err(Error::NotComposable(pair[0].index(), pair[1].index()));
            }
        }
        for &a in w {
            if self.quiver.tail(a) != self.face(t) {
                return Err(Error::NotComposable(usize::MAX, a.index()));
            }
            t = self.step(t, a).ok_or(Error::PatchExhausted {
                radius: self.radius,
            })?;
        }
        Ok(t)
    }

    /// Every tile visited by the lift of `w`, including `start`.
    pub fn lift_tiles(&self, start: LiftedTile, w: &[Arrow]) -> Result<Vec<LiftedTile>> {
        let mut out = Vec::with_capacity(w.len() + 1);
        out.push(start);
        let mut t = start;
        for &a in w {
            if self.quiver.tail(a) != self.face(t) {
                return Err(Error::NotComposable(usize::MAX, a.index()));
            }
            t = self.step(t, a).ok_or(Error::PatchExhausted {
                radius: self.radius,
            })?;
            out.push(t);
        }
        Ok(out)
    }

    pub fn vertices(&self) -> &[LiftedVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[LiftedEdge] {
        &self.edges
    }

    /// Lifted vertex at corner `k` of `t`.
    pub fn corner_vertex(&self, t: LiftedTile, k: usize) -> usize {
        self.tiles[t.index()].vertex[k]
    }

    /// Lifted edge at boundary position `k` of `t`.
    pub fn edge_at(&self, t: LiftedTile, k: usize) -> usize {
        self.tiles[t.index()].edge[k]
    }

    pub fn boundary_len(&self, t: LiftedTile) -> usize {
        self.tiles[t.index()].glue.len()
    }

    /// Tiles on either side of a lifted edge that lie in the patch.
    pub fn edge_tiles(&self, e: usize) -> Vec<LiftedTile> {
        let le = &self.edges[e];
        le.head_side
            .iter()
            .chain(le.tail_side.iter())
            .map(|&(t, _)| t)
            .collect()
    }
}

/// Homology labels: zero a spanning tree of the quiver, then reduce the
/// cycle space modulo the vertex cycles (face boundaries of the surface).
pub fn homology_labels(t: &BraneTiling) -> Result<HomologyLabels> {
    let q = dual_quiver(t);
    let genus = t.genus();
    let nf = q.num_nodes;
    // BFS spanning tree over arrows in both directions
    let mut seen = vec![false; nf];
    let mut tree = vec![false; q.arrows.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(f) = queue.pop_front() {
        for (k, a) in q.arrows.iter().enumerate() {
            let other = if a.tail.0 == f {
                a.head.0
            } else if a.head.0 == f {
                a.tail.0
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                tree[k] = true;
                queue.push_back(other);
            }
        }
    }
    let cotree: Vec<usize> = (0..q.arrows.len()).filter(|&k| !tree[k]).collect();
    let col_of: HashMap<usize, usize> = cotree.iter().enumerate().map(|(c, &k)| (k, c)).collect();
    let m = cotree.len();
    let rows: lattice::IMat = (0..t.vertices().len())
        .map(|v| {
            let mut row = vec![0i64; m];
            for a in vertex_cycle(t, VertexId(v)) {
                if let Some(&c) = col_of.get(&a.index()) {
                    row[c] += 1;
                }
            }
            row
        })
        .collect();
    let snf = lattice::smith(&rows, rows.len(), m)?;
    if snf.diag.iter().any(|&d| d != 1) {
        return Err(Error::Invariant("first homology has torsion".into()));
    }
    let r = snf.rank();
    if m - r != 2 * genus {
        return Err(Error::Invariant(format!(
            "homology rank {} does not match genus {genus}",
            m - r
        )));
    }
    let labels = (0..q.arrows.len())
        .map(|k| match col_of.get(&k) {
            Some(&c) => snf.v[c][r..].to_vec(),
            None => vec![0; 2 * genus],
        })
        .collect();
    Ok(HomologyLabels { genus, labels })
}

struct Dev<'a> {
    t: &'a BraneTiling,
    face: Vec<FaceId>,
    glue: Vec<Vec<Option<(usize, usize)>>>,
    parent: Vec<usize>,
    processed: Vec<bool>,
    pending: Vec<(usize, usize)>,
    cap: usize,
}

impl<'a> Dev<'a> {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn len(&self, n: usize) -> usize {
        self.glue[n].len()
    }

    fn g(&mut self, n: usize, k: usize) -> Option<(usize, usize)> {
        let n = self.find(n);
        let (m, p) = self.glue[n][k]?;
        Some((self.find(m), p))
    }

    fn dart(&self, n: usize, k: usize) -> Dart {
        self.t.face(self.face[n]).boundary[k]
    }

    fn new_node(&mut self, face: FaceId) -> Result<usize> {
        if self.face.len() >= self.cap {
            return Err(Error::PatchCap { cap: self.cap });
        }
        let n = self.face.len();
        let len = self.t.face(face).len();
        self.face.push(face);
        self.glue.push(vec![None; len]);
        self.parent.push(n);
        self.processed.push(false);
        Ok(n)
    }

    fn join(&mut self, a: usize, pa: usize, b: usize, pb: usize) -> Result<()> {
        let (a, b) = (self.find(a), self.find(b));
        if self.dart(a, pa).reverse() != self.dart(b, pb) {
            return Err(Error::Development(format!(
                "gluing mismatch between faces {} and {}",
                self.face[a], self.face[b]
            )));
        }
        for (x, px, y, py) in [(a, pa, b, pb), (b, pb, a, pa)] {
            match self.g(x, px) {
                Some((m, pm)) if (m, pm) != (y, py) => self.pending.push((m, y)),
                _ => {}
            }
            self.glue[x][px] = Some((y, py));
        }
        self.settle()
    }

    fn settle(&mut self) -> Result<()> {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            if self.face[a] != self.face[b] {
                return Err(Error::Development(format!(
                    "coincidence between lifts of different faces {} and {}",
                    self.face[a], self.face[b]
                )));
            }
            let (keep, gone) = (a.min(b), a.max(b));
            self.parent[gone] = keep;
            self.processed[keep] |= self.processed[gone];
            for k in 0..self.len(keep) {
                let theirs = self.glue[gone][k];
                let ours = self.glue[keep][k];
                match (ours, theirs) {
                    (None, Some(x)) => self.glue[keep][k] = Some(x),
                    (Some((m, _)), Some((n, _))) if self.find(m) != self.find(n) => {
                        self.pending.push((m, n));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn ccw(&mut self, (n, k): (usize, usize)) -> Option<(usize, usize)> {
        let (m, p) = self.g(n, k)?;
        Some((m, (p + 1) % self.len(m)))
    }

    fn cw(&mut self, (n, k): (usize, usize)) -> Option<(usize, usize)> {
        let prev = (k + self.len(n) - 1) % self.len(n);
        self.g(n, prev)
    }

    /// Fills the fan around corner `(c, k)`. With `grow == false` only
    /// deductions are made and no faces are created. Returns whether
    /// anything changed.
    fn complete_star(&mut self, c: usize, k: usize, grow: bool) -> Result<bool> {
        let c0 = self.find(c);
        let deg = self.t.degree(self.t.origin(self.dart(c0, k)));
        let mut changed = false;
        loop {
            let start = (self.find(c), k);
            let mut cur = start;
            let mut a = 0;
            while a < deg {
                match self.ccw(cur) {
                    Some(next) => {
                        cur = next;
                        a += 1;
                    }
                    None => break,
                }
            }
            if a == deg {
                if cur != start {
                    self.pending.push((cur.0, start.0));
                    self.settle()?;
                    changed = true;
                    continue;
                }
                return Ok(changed);
            }
            let ccw_end = cur;
            let mut cur = start;
            let mut b = 0;
            while a + b < deg {
                match self.cw(cur) {
                    Some(next) => {
                        cur = next;
                        b += 1;
                    }
                    None => break,
                }
            }
            if a + b == deg {
                if cur != ccw_end {
                    self.pending.push((cur.0, ccw_end.0));
                    self.settle()?;
                    changed = true;
                    continue;
                }
                return Err(Error::Development("asymmetric gluing".into()));
            }
            let cw_end = cur;
            if a + b + 1 == deg {
                let prev = (cw_end.1 + self.len(cw_end.0) - 1) % self.len(cw_end.0);
                self.join(ccw_end.0, ccw_end.1, cw_end.0, prev)?;
                return Ok(true);
            }
            if !grow {
                return Ok(changed);
            }
            let d = self.dart(ccw_end.0, ccw_end.1).reverse();
            let (f, p) = self.t.dart_face(d);
            let n = self.new_node(f)?;
            self.join(ccw_end.0, ccw_end.1, n, p)?;
            changed = true;
        }
    }

    fn alive(&self) -> Vec<usize> {
        (0..self.face.len())
            .filter(|&n| self.parent[n] == n)
            .collect()
    }

    fn distances(&mut self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.face.len()];
        let root = self.find(0);
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(n) = queue.pop_front() {
            for k in 0..self.len(n) {
                if let Some((m, _)) = self.g(n, k) {
                    if dist[m] == usize::MAX {
                        dist[m] = dist[n] + 1;
                        queue.push_back(m);
                    }
                }
            }
        }
        dist
    }
}

/// Develops the universal cover around a lift of `base`, keeping every
/// lifted face within face-graph distance `radius`.
pub fn develop(t: &BraneTiling, base: FaceId, radius: usize) -> Result<CoverPatch> {
    develop_with_cap(t, base, radius, DEFAULT_PATCH_CAP)
}

pub fn develop_with_cap(
    t: &BraneTiling,
    base: FaceId,
    radius: usize,
    cap: usize,
) -> Result<CoverPatch> {
    if base.0 >= t.faces().len() {
        return Err(Error::Invariant(format!("no face {base}")));
    }
    let mut dev = Dev {
        t,
        face: Vec::new(),
        glue: Vec::new(),
        parent: Vec::new(),
        processed: Vec::new(),
        pending: Vec::new(),
        cap,
    };
    dev.new_node(base)?;
    // process faces ring by ring; a processed face has complete vertex fans
    let internal = radius + 2;
    for r in 0..=internal {
        loop {
            let dist = dev.distances();
            let todo: Vec<usize> = {
                let mut v: Vec<usize> = dev
                    .alive()
                    .into_iter()
                    .filter(|&n| dist[n] <= r && !dev.processed[n])
                    .collect();
                v.sort_by_key(|&n| (dist[n], n));
                v
            };
            if todo.is_empty() {
                break;
            }
            for n in todo {
                let n = dev.find(n);
                if dev.processed[n] {
                    continue;
                }
                for k in 0..dev.len(n) {
                    dev.complete_star(n, k, true)?;
                }
                let n = dev.find(n);
                dev.processed[n] = true;
            }
        }
    }
    // deductions only, to a fixpoint
    loop {
        let mut changed = false;
        for n in dev.alive() {
            if dev.parent[n] != n {
                continue;
            }
            for k in 0..dev.len(n) {
                changed |= dev.complete_star(n, k, false)?;
            }
        }
        if !changed {
            break;
        }
    }
    let dist = dev.distances();
    let alive = dev.alive();
    let closed = alive
        .iter()
        .all(|&n| (0..dev.len(n)).all(|k| dev.glue[n][k].is_some()));

    // renumber kept nodes in BFS order
    let root = dev.find(0);
    let mut index = vec![usize::MAX; dev.face.len()];
    let mut order = vec![root];
    index[root] = 0;
    let mut head = 0;
    while head < order.len() {
        let n = order[head];
        head += 1;
        for k in 0..dev.len(n) {
            if let Some((m, _)) = dev.g(n, k) {
                if index[m] == usize::MAX && dist[m] <= radius {
                    index[m] = order.len();
                    order.push(m);
                }
            }
        }
    }
    let labels = homology_labels(t)?;
    let quiver = dual_quiver(t);
    let mut tiles: Vec<TileData> = Vec::with_capacity(order.len());
    for &n in &order {
        let glue = (0..dev.len(n))
            .map(|k| {
                dev.g(n, k)
                    .filter(|&(m, _)| index[m] != usize::MAX)
                    .map(|(m, p)| (LiftedTile(index[m] as u32), p))
            })
            .collect();
        tiles.push(TileData {
            face: dev.face[n],
            dist: dist[n],
            glue,
            label: Vec::new(),
            vertex: Vec::new(),
            edge: Vec::new(),
        });
    }
    let mut patch = CoverPatch {
        base,
        radius,
        genus: t.genus(),
        closed,
        tiles,
        vertices: Vec::new(),
        edges: Vec::new(),
        quiver,
        labels,
        by_label: HashMap::new(),
        face_boundary: t.faces().iter().map(|f| f.boundary.clone()).collect(),
    };
    assign_labels(&mut patch)?;
    build_skeleton(t, &mut patch);
    Ok(patch)
}

fn assign_labels(p: &mut CoverPatch) -> Result<()> {
    let g2 = 2 * p.genus;
    let mut label: Vec<Option<Vec<i64>>> = vec![None; p.tiles.len()];
    label[0] = Some(vec![0; g2]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        let here = label[n].clone().expect("queued tiles are labelled");
        let f = p.tiles[n].face;
        for k in 0..p.tiles[n].glue.len() {
            let Some((m, _)) = p.tiles[n].glue[k] else {
                continue;
            };
            let d = p.quiver_dart(f, k);
            let arrow = Arrow::of_edge(d.edge());
            // odd darts leave this tile along the arrow, even darts enter it
            let sign = if d.from_black() { -1 } else { 1 };
            let there: Vec<i64> = here
                .iter()
                .zip(p.labels.of(arrow))
                .map(|(x, y)| x + sign * y)
                .collect();
            match &label[m.index()] {
                None => {
                    label[m.index()] = Some(there);
                    queue.push_back(m.index());
                }
                Some(existing) if *existing != there => {
                    return Err(Error::Development(
                        "homology labels disagree around a closed walk".into(),
                    ));
                }
                Some(_) => {}
            }
        }
    }
    for (n, l) in label.into_iter().enumerate() {
        p.tiles[n].label = l.expect("patch is connected");
    }
    if p.genus == 1 {
        for n in 0..p.tiles.len() {
            let key = (p.tiles[n].face, p.tiles[n].label.clone());
            if p.by_label.insert(key, LiftedTile(n as u32)).is_some() {
                return Err(Error::Development(
                    "two patch tiles share a base face and homology label".into(),
                ));
            }
        }
    }
    Ok(())
}

impl CoverPatch {
    fn quiver_dart(&self, f: FaceId, k: usize) -> Dart {
        self.face_boundary[f.index()][k]
    }
}

fn build_skeleton(t: &BraneTiling, p: &mut CoverPatch) {
    let n = p.tiles.len();
    // corners: union along ccw steps
    let mut vid: Vec<Vec<usize>> = p
        .tiles
        .iter()
        .map(|d| vec![usize::MAX; d.glue.len()])
        .collect();
    let mut vertices: Vec<LiftedVertex> = Vec::new();
    for s in 0..n {
        for k in 0..p.tiles[s].glue.len() {
            if vid[s][k] != usize::MAX {
                continue;
            }
            let base = t.origin(t.face(p.tiles[s].face).boundary[k]);
            let deg = t.degree(base);
            let id = vertices.len();
            let mut corners = vec![(LiftedTile(s as u32), k)];
            vid[s][k] = id;
            // walk both ways from the corner
            let mut cur = (s, k);
            let mut closed = false;
            while let Some((m, pm)) = p.tiles[cur.0].glue[cur.1] {
                let next = (m.index(), (pm + 1) % p.tiles[m.index()].glue.len());
                if next == (s, k) {
                    closed = true;
                    break;
                }
                vid[next.0][next.1] = id;
                corners.push((LiftedTile(next.0 as u32), next.1));
                cur = next;
            }
            if !closed {
                let mut cur = (s, k);
                loop {
                    let len = p.tiles[cur.0].glue.len();
                    let Some((m, pm)) = p.tiles[cur.0].glue[(cur.1 + len - 1) % len] else {
                        break;
                    };
                    let next = (m.index(), pm);
                    vid[next.0][next.1] = id;
                    corners.insert(0, (LiftedTile(next.0 as u32), next.1));
                    cur = next;
                }
            }
            debug_assert!(corners.len() <= deg);
            vertices.push(LiftedVertex {
                base,
                color: t.vertex(base).color,
                corners,
                complete: closed,
            });
        }
    }
    let mut eid: Vec<Vec<usize>> = p
        .tiles
        .iter()
        .map(|d| vec![usize::MAX; d.glue.len()])
        .collect();
    let mut edges: Vec<LiftedEdge> = Vec::new();
    for s in 0..n {
        let len = p.tiles[s].glue.len();
        for k in 0..len {
            if eid[s][k] != usize::MAX {
                continue;
            }
            let d = t.face(p.tiles[s].face).boundary[k];
            let here = (LiftedTile(s as u32), k);
            let there = p.tiles[s].glue[k];
            let id = edges.len();
            eid[s][k] = id;
            if let Some((m, pm)) = there {
                eid[m.index()][pm] = id;
            }
            let (origin, head) = (vid[s][k], vid[s][(k + 1) % len]);
            let (black, white) = if d.from_black() {
                (origin, head)
            } else {
                (head, origin)
            };
            let (head_side, tail_side) = if d.from_black() {
                (Some(here), there)
            } else {
                (there, Some(here))
            };
            edges.push(LiftedEdge {
                base: d.edge(),
                black,
                white,
                head_side,
                tail_side,
            });
        }
    }
    for (s, data) in p.tiles.iter_mut().enumerate() {
        data.vertex = std::mem::take(&mut vid[s]);
        data.edge = std::mem::take(&mut eid[s]);
    }
    p.vertices = vertices;
    p.edges = edges;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::tiling::{superpotential, Word};

    fn word(t: &BraneTiling, s: &str) -> Word {
        crate::tiling::parse_word(t, s).unwrap()
    }

    #[test]
    fn c3_rings() {
        let t = examples::c3();
        let sizes: Vec<usize> = (0..4)
            .map(|r| develop(&t, FaceId(0), r).unwrap().len())
            .collect();
        assert_eq!(sizes, vec![1, 7, 19, 37]);
    }

    #[test]
    fn conifold_rings() {
        let t = examples::conifold();
        let sizes: Vec<usize> = (0..4)
            .map(|r| develop(&t, FaceId(0), r).unwrap().len())
            .collect();
        assert_eq!(sizes, vec![1, 5, 13, 25]);
    }

    #[test]
    fn cube_closes() {
        let t = examples::cube();
        for r in 3..6 {
            let p = develop(&t, FaceId(2), r).unwrap();
            assert_eq!(p.len(), 6);
            assert!(p.is_closed());
            assert!(p.vertices().iter().all(|v| v.complete));
            assert_eq!(p.vertices().len(), 8);
            assert_eq!(p.edges().len(), 12);
        }
    }

    #[test]
    fn lifts() {
        let t = examples::c3();
        let p = develop(&t, FaceId(0), 3).unwrap();
        let root = p.root();
        assert_eq!(p.lift_path(root, &[]).unwrap(), root);
        assert_eq!(p.lift_path(root, &word(&t, "x y z")).unwrap(), root);
        let x = p.lift_path(root, &word(&t, "x")).unwrap();
        assert_ne!(x, root);
        assert_eq!(p.label(x), p.labels().of(word(&t, "x")[0]));
        assert!(matches!(
            p.lift_path(root, &word(&t, "x x x x")),
            Err(Error::PatchExhausted { .. })
        ));
    }

    #[test]
    fn labels() {
        for t in [examples::c3(), examples::conifold(), examples::cube()] {
            let h = homology_labels(&t).unwrap();
            for term in superpotential(&t).terms {
                assert!(h.word_sum(&term.cycle).iter().all(|&x| x == 0));
            }
            assert!(h.labels.iter().all(|l| l.len() == 2 * t.genus()));
        }
    }

    #[test]
    fn monotone_in_radius() {
        let t = examples::conifold();
        let small = develop(&t, FaceId(1), 2).unwrap();
        let big = develop(&t, FaceId(1), 3).unwrap();
        for s in small.tiles() {
            let b = big.find_by_label(small.face(s), small.label(s)).unwrap();
            assert_eq!(big.dist(b), small.dist(s));
        }
    }
}
