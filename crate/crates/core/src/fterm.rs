//! The F-term rewrite engine.
//!
//! Paths are words of base arrows lifted to a [`CoverPatch`] from a start
//! tile. A basic move replaces one broken loop factor by its partner; two
//! paths are equivalent when a chain of moves joins them. With a positive
//! homogeneous grading every move preserves weight and endpoints, so the
//! closure of a word is finite and computed exhaustively.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet, VecDeque};
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::cover::{develop_with_cap, CoverPatch, LiftedTile, DEFAULT_PATCH_CAP};
use crate::error::{Error, Result};
use crate::matchings::{homogeneous_grading, Grading};
use crate::tiling::{
    dual_quiver, fterm_pair, vertex_cycle, Arrow, BraneTiling, Color, DualQuiver, EdgeId, FaceId,
    VertexId, Word,
};

/// Closure size above which a class computation gives up.
pub const DEFAULT_CLASS_CAP: usize = 2_000_000;

/// Everything about a tiling the engine needs, independent of any patch.
#[derive(Debug, Clone)]
pub struct Model {
    tiling: BraneTiling,
    quiver: DualQuiver,
    grading: Option<Grading>,
    weight: Vec<u64>,
    pairs: Vec<(Word, Word)>,
    moves_from: Vec<Vec<(Word, Word)>>,
    loops_from: Vec<Vec<Word>>,
    /// Longest word expanded by the closure when there is no grading.
    pub length_budget: usize,
    pub class_cap: usize,
    /// Lifted tiles allowed in a patch developed by [`Engine::develop`].
    pub patch_cap: usize,
}

impl Model {
    pub fn new(t: &BraneTiling) -> Model {
        let quiver = dual_quiver(t);
        let grading = homogeneous_grading(t).ok();
        let ne = t.edges().len();
        let weight = match &grading {
            Some(g) => g.weights.clone(),
            None => vec![1; ne],
        };
        let pairs: Vec<(Word, Word)> = (0..ne)
            .map(|e| fterm_pair(t, EdgeId(e)).expect("edge exists"))
            .collect();
        let mut moves_from = vec![Vec::new(); ne];
        for (b, w) in &pairs {
            if b != w {
                moves_from[b[0].index()].push((b.clone(), w.clone()));
                moves_from[w[0].index()].push((w.clone(), b.clone()));
            }
        }
        let mut loops_from = vec![Vec::new(); ne];
        for v in 0..t.vertices().len() {
            let cyc = vertex_cycle(t, VertexId(v));
            for s in 0..cyc.len() {
                let rot: Word = (0..cyc.len()).map(|k| cyc[(s + k) % cyc.len()]).collect();
                if !loops_from[rot[0].index()].contains(&rot) {
                    loops_from[rot[0].index()].push(rot);
                }
            }
        }
        let max_degree = (0..t.vertices().len())
            .map(|v| t.degree(VertexId(v)))
            .max()
            .unwrap_or(0);
        Model {
            tiling: t.clone(),
            quiver,
            grading,
            weight,
            pairs,
            moves_from,
            loops_from,
            length_budget: 4 * max_degree,
            class_cap: DEFAULT_CLASS_CAP,
            patch_cap: DEFAULT_PATCH_CAP,
        }
    }

    pub fn tiling(&self) -> &BraneTiling {
        &self.tiling
    }

    pub fn quiver(&self) -> &DualQuiver {
        &self.quiver
    }

    pub fn grading(&self) -> Option<&Grading> {
        self.grading.as_ref()
    }

    /// Weight of a simple loop, or `None` without a grading.
    pub fn c(&self) -> Option<u64> {
        self.grading.as_ref().map(|g| g.c)
    }

    pub fn arrow_weight(&self, a: Arrow) -> u64 {
        self.weight[a.index()]
    }

    /// Grading weight of a word; its length when there is no grading.
    pub fn weight(&self, w: &[Arrow]) -> u64 {
        w.iter().map(|&a| self.weight[a.index()]).sum()
    }

    /// Broken loop pair `(black, white)` of an arrow.
    pub fn pair(&self, a: Arrow) -> &(Word, Word) {
        &self.pairs[a.index()]
    }

    /// Words one basic move away from `w`, in order of position then move.
    pub fn basic_moves(&self, w: &[Arrow]) -> Vec<Word> {
        let mut out = Vec::new();
        for i in 0..w.len() {
            for (pat, rep) in &self.moves_from[w[i].index()] {
                if w[i..].starts_with(pat) {
                    let mut v = Vec::with_capacity(w.len() - pat.len() + rep.len());
                    v.extend_from_slice(&w[..i]);
                    v.extend_from_slice(rep);
                    v.extend_from_slice(&w[i + pat.len()..]);
                    out.push(v);
                }
            }
        }
        out
    }

    /// Whether some factor of `w` is a full revolution around a vertex.
    pub fn contains_simple_loop(&self, w: &[Arrow]) -> bool {
        (0..w.len()).any(|i| {
            self.loops_from[w[i].index()]
                .iter()
                .any(|l| w[i..].starts_with(l))
        })
    }

    /// The simple loop around the vertex at corner `k` of face `f`.
    pub fn simple_loop_at_corner(&self, f: FaceId, k: usize) -> Word {
        let boundary = &self.tiling.face(f).boundary;
        let len = boundary.len();
        let v = self.tiling.origin(boundary[k]);
        let out = match self.tiling.vertex(v).color {
            Color::Black => boundary[(k + len - 1) % len].edge(),
            Color::White => boundary[k].edge(),
        };
        let cyc = vertex_cycle(&self.tiling, v);
        let s = cyc
            .iter()
            .position(|a| a.edge() == out)
            .expect("arrow on its vertex cycle");
        (0..cyc.len()).map(|j| cyc[(s + j) % cyc.len()]).collect()
    }

    /// The simple loop at `f` around `v`.
    pub fn simple_loop(&self, f: FaceId, v: VertexId) -> Result<Word> {
        let boundary = &self.tiling.face(f).boundary;
        let k = boundary
            .iter()
            .position(|&d| self.tiling.origin(d) == v)
            .ok_or(Error::VertexNotOnFace {
                vertex: v.0,
                face: f.0,
            })?;
        Ok(self.simple_loop_at_corner(f, k))
    }

    /// The reference simple loop `omega` at `f`.
    pub fn omega(&self, f: FaceId) -> Word {
        self.simple_loop_at_corner(f, 0)
    }
}

/// An equivalence class of lifted paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassSet {
    pub start: LiftedTile,
    pub end: LiftedTile,
    /// Sorted; the first member is the canonical representative.
    pub members: Vec<Word>,
    pub weight: u64,
    /// Set when the closure was cut by the length budget (no grading).
    pub bounded: bool,
}

impl ClassSet {
    pub fn contains(&self, w: &[Arrow]) -> bool {
        self.members
            .binary_search_by(|m| m.as_slice().cmp(w))
            .is_ok()
    }

    pub fn representative(&self) -> &Word {
        &self.members[0]
    }
}

/// Canonical form of a class of paths: endpoints and the exponent of the
/// simple loop over a minimal path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct G1Grade {
    pub start: LiftedTile,
    pub end: LiftedTile,
    pub n: u64,
}

/// Least path weights from `from` inside the patch, following arrows
/// forwards, or backwards when `reverse`. `pred[t]` is the step into `t`.
pub fn shortest_weights(
    model: &Model,
    patch: &CoverPatch,
    from: LiftedTile,
    reverse: bool,
) -> (Vec<u64>, Vec<Option<(LiftedTile, Arrow)>>) {
    let n = patch.len();
    let mut dist = vec![u64::MAX; n];
    let mut pred = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[from.index()] = 0;
    heap.push(Reverse((0u64, from)));
    while let Some(Reverse((d, t))) = heap.pop() {
        if d > dist[t.index()] {
            continue;
        }
        let steps = if reverse {
            patch.in_steps(t)
        } else {
            patch.out_steps(t)
        };
        for (a, s) in steps {
            let nd = d + model.arrow_weight(a);
            if nd < dist[s.index()] {
                dist[s.index()] = nd;
                pred[s.index()] = Some((t, a));
                heap.push(Reverse((nd, s)));
            }
        }
    }
    (dist, pred)
}

type Memo = RwLock<HashMap<(LiftedTile, Word), Arc<ClassSet>>>;

/// Rewrite engine on one developed patch, rooted at the patch root.
pub struct Engine<'a> {
    model: &'a Model,
    patch: CoverPatch,
    memo: Memo,
    minwt: Vec<u64>,
    pred: Vec<Option<(LiftedTile, Arrow)>>,
    trusted: u64,
}

impl<'a> Engine<'a> {
    pub fn new(model: &'a Model, patch: CoverPatch) -> Engine<'a> {
        let (minwt, pred) = shortest_weights(model, &patch, patch.root(), false);
        // a path leaving the patch crosses a tile with a missing neighbour
        let trusted = patch
            .tiles()
            .filter(|&t| (0..patch.boundary_len(t)).any(|k| patch.neighbor(t, k).is_none()))
            .map(|t| minwt[t.index()])
            .min()
            .unwrap_or(u64::MAX);
        Engine {
            model,
            patch,
            memo: RwLock::new(HashMap::new()),
            minwt,
            pred,
            trusted,
        }
    }

    /// Develops a patch of `radius` around `base` and wraps it, within the
    /// model's patch cap.
    pub fn develop(model: &'a Model, base: FaceId, radius: usize) -> Result<Engine<'a>> {
        Self::develop_with_cap(model, base, radius, model.patch_cap)
    }

    pub fn develop_with_cap(
        model: &'a Model,
        base: FaceId,
        radius: usize,
        cap: usize,
    ) -> Result<Engine<'a>> {
        Ok(Engine::new(
            model,
            develop_with_cap(model.tiling(), base, radius, cap)?,
        ))
    }

    pub fn model(&self) -> &'a Model {
        self.model
    }

    pub fn patch(&self) -> &CoverPatch {
        &self.patch
    }

    pub fn root(&self) -> LiftedTile {
        self.patch.root()
    }

    /// Least weight of a patch path from the root; `u64::MAX` if none.
    pub fn min_weight(&self, t: LiftedTile) -> u64 {
        self.minwt[t.index()]
    }

    /// Least weight over tiles where a path could leave the patch.
    pub fn trusted_bound(&self) -> u64 {
        self.trusted
    }

    /// Whether the patch minimal weight of `t` is the true one: every path
    /// that leaves the patch is strictly heavier.
    pub fn is_certified(&self, t: LiftedTile) -> bool {
        self.minwt[t.index()] < self.trusted
    }

    /// Root-to-`t` path of least weight found by the shortest path search.
    pub fn lightest_path(&self, t: LiftedTile) -> Option<Word> {
        if self.minwt[t.index()] == u64::MAX {
            return None;
        }
        let mut w = Vec::new();
        let mut cur = t;
        while let Some((p, a)) = self.pred[cur.index()] {
            w.push(a);
            cur = p;
        }
        w.reverse();
        Some(w)
    }

    fn check_start(&self, start: LiftedTile, w: &[Arrow]) -> Result<()> {
        self.model.quiver.check_word(w)?;
        if let Some(a) = w.first() {
            if self.model.quiver.tail(*a) != self.patch.face(start) {
                return Err(Error::NotComposable(usize::MAX, a.index()));
            }
        }
        Ok(())
    }

    /// The full closure of `w` under basic moves, lifted from `start`.
    pub fn equiv_class(&self, start: LiftedTile, w: &[Arrow]) -> Result<Arc<ClassSet>> {
        let key = (start, w.to_vec());
        if let Some(c) = self.memo.read().expect("memo lock").get(&key) {
            return Ok(c.clone());
        }
        self.check_start(start, w)?;
        let end = self.patch.lift_path(start, w)?;
        let graded = self.model.grading.is_some();
        let mut seen: HashSet<Word> = HashSet::from([w.to_vec()]);
        let mut queue = VecDeque::from([w.to_vec()]);
        let mut bounded = false;
        while let Some(u) = queue.pop_front() {
            if !graded && u.len() > self.model.length_budget {
                bounded = true;
                continue;
            }
            for v in self.model.basic_moves(&u) {
                if seen.contains(&v) {
                    continue;
                }
                // the lift must stay in the patch for the move to be seen
                self.patch.lift_path(start, &v)?;
                seen.insert(v.clone());
                if seen.len() > self.model.class_cap {
                    return Err(Error::Budget(format!(
                        "class size exceeds {}",
                        self.model.class_cap
                    )));
                }
                queue.push_back(v);
            }
        }
        let mut members: Vec<Word> = seen.into_iter().collect();
        members.sort();
        let class = Arc::new(ClassSet {
            start,
            end,
            weight: self.model.weight(w),
            members,
            bounded,
        });
        let mut memo = self.memo.write().expect("memo lock");
        for m in &class.members {
            memo.entry((start, m.clone()))
                .or_insert_with(|| class.clone());
        }
        Ok(class)
    }

    pub fn equivalent(&self, start: LiftedTile, u: &[Arrow], v: &[Arrow]) -> Result<bool> {
        if u == v {
            return Ok(true);
        }
        self.check_start(start, v)?;
        if self.patch.lift_path(start, u)? != self.patch.lift_path(start, v)? {
            return Ok(false);
        }
        if self.model.grading.is_some() && self.model.weight(u) != self.model.weight(v) {
            return Ok(false);
        }
        Ok(self.equiv_class(start, u)?.contains(v))
    }

    /// No member of the class contains a simple loop.
    pub fn is_minimal(&self, start: LiftedTile, u: &[Arrow]) -> Result<bool> {
        let class = self.equiv_class(start, u)?;
        Ok(!class
            .members
            .iter()
            .any(|m| self.model.contains_simple_loop(m)))
    }

    /// A minimal path from the root to `t`. The lightest path is tried
    /// first; otherwise heavier words are searched up to `extra` above the
    /// least weight.
    pub fn minimal_path(&self, t: LiftedTile, extra: u64) -> Result<Word> {
        let root = self.root();
        let light = self.lightest_path(t).ok_or_else(|| Error::PatchExhausted {
            radius: self.patch.radius(),
        })?;
        if self.is_minimal(root, &light)? {
            return Ok(light);
        }
        let limit = self.minwt[t.index()] + extra;
        let mut cands: Vec<(u64, Word)> = self
            .enumerate_words(root, limit)
            .into_iter()
            .filter(|(_, e)| *e == t)
            .map(|(w, _)| (self.model.weight(&w), w))
            .collect();
        cands.sort();
        for (_, w) in cands {
            if self.is_minimal(root, &w)? {
                return Ok(w);
            }
        }
        Err(Error::Budget(format!(
            "no minimal path to tile {} within weight {limit}",
            t.0
        )))
    }

    /// Canonical form of a path from the root, certified by an equivalence
    /// check against a minimal path followed by powers of the simple loop.
    pub fn canonical_form(&self, u: &[Arrow]) -> Result<G1Grade> {
        let root = self.root();
        let c = self
            .model
            .c()
            .ok_or(Error::Certification("no grading".into()))?;
        self.check_start(root, u)?;
        let end = self.patch.lift_path(root, u)?;
        if !self.is_certified(end) {
            return Err(Error::PatchExhausted {
                radius: self.patch.radius(),
            });
        }
        let wt = self.model.weight(u);
        let base = self.minwt[end.index()];
        if wt < base || !(wt - base).is_multiple_of(c) {
            return Err(Error::Certification(format!(
                "weight {wt} is not {base} plus a multiple of {c}"
            )));
        }
        let n = (wt - base) / c;
        let mut target = self.minimal_path(end, 0)?;
        let omega = self.model.omega(self.patch.face(end));
        for _ in 0..n {
            target.extend_from_slice(&omega);
        }
        if !self.equivalent(root, u, &target)? {
            return Err(Error::Certification(format!(
                "path is not equivalent to a minimal path times omega^{n}"
            )));
        }
        Ok(G1Grade {
            start: root,
            end,
            n,
        })
    }

    /// Whether `v` is reachable from `u` by moves through words whose lifts
    /// never visit `k` after the start.
    pub fn k_avoiding_equivalent(
        &self,
        start: LiftedTile,
        u: &[Arrow],
        v: &[Arrow],
        k: LiftedTile,
    ) -> Result<bool> {
        if u == v {
            return Ok(true);
        }
        let visits = |w: &[Arrow]| -> Result<bool> {
            Ok(self.patch.lift_tiles(start, w)?[1..].contains(&k))
        };
        if visits(u)? || visits(v)? {
            return Ok(false);
        }
        if !self.equivalent(start, u, v)? {
            return Ok(false);
        }
        let mut seen: HashSet<Word> = HashSet::from([u.to_vec()]);
        let mut queue = VecDeque::from([u.to_vec()]);
        while let Some(w) = queue.pop_front() {
            for x in self.model.basic_moves(&w) {
                if seen.contains(&x) || visits(&x)? {
                    continue;
                }
                if x == v {
                    return Ok(true);
                }
                seen.insert(x.clone());
                queue.push_back(x);
            }
        }
        Ok(false)
    }

    /// All words from `start` of weight at most `max_weight` whose lifts
    /// stay in the patch, with their end tiles, in lexicographic order.
    pub fn enumerate_words(&self, start: LiftedTile, max_weight: u64) -> Vec<(Word, LiftedTile)> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        fn go(
            e: &Engine,
            t: LiftedTile,
            budget: u64,
            stack: &mut Word,
            out: &mut Vec<(Word, LiftedTile)>,
        ) {
            out.push((stack.clone(), t));
            for (a, s) in e.patch.out_steps(t) {
                let w = e.model.arrow_weight(a);
                if w <= budget {
                    stack.push(a);
                    go(e, s, budget - w, stack, out);
                    stack.pop();
                }
            }
        }
        go(self, start, max_weight, &mut stack, &mut out);
        out
    }

    /// Tiles visited by the members of the class of `u`, after the start.
    pub fn class_support(&self, start: LiftedTile, u: &[Arrow]) -> Result<BTreeSet<LiftedTile>> {
        let class = self.equiv_class(start, u)?;
        let mut out = BTreeSet::new();
        for m in &class.members {
            out.extend(self.patch.lift_tiles(start, m)?.into_iter().skip(1));
        }
        Ok(out)
    }
}
