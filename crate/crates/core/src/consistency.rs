//! Bounded checks of consistency, MR2 and the tile order.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cover::LiftedTile;
use crate::error::{Error, Result};
use crate::fterm::{shortest_weights, Engine, Model};
use crate::par;
use crate::tiling::{FaceId, Word};

/// Least `n <= n_max` with `u omega^n ~ v omega^n`, the loop taken at the
/// common end tile.
pub fn weak_equivalence(
    e: &Engine,
    start: LiftedTile,
    u: &[crate::Arrow],
    v: &[crate::Arrow],
    n_max: u64,
) -> Result<Option<u64>> {
    let p = e.patch();
    let end = p.lift_path(start, u)?;
    if end != p.lift_path(start, v)? {
        return Ok(None);
    }
    let omega = e.model().omega(p.face(end));
    let (mut uu, mut vv) = (u.to_vec(), v.to_vec());
    for n in 0..=n_max {
        if e.equivalent(start, &uu, &vv)? {
            return Ok(Some(n));
        }
        uu.extend_from_slice(&omega);
        vv.extend_from_slice(&omega);
    }
    Ok(None)
}

/// Two inequivalent paths that become equivalent after `n` simple loops.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Counterexample {
    pub base: FaceId,
    pub u: Word,
    pub v: Word,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ConsistencyStatus {
    ConsistentUpTo,
    Counterexample(Counterexample),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConsistencyVerdict {
    pub status: ConsistencyStatus,
    pub weight_bound: u64,
    pub radius: usize,
    pub n_max: u64,
    /// Words enumerated over all base tiles.
    pub words: usize,
    /// Distinct classes among them.
    pub classes: usize,
    /// Class pairs tested for weak equivalence.
    pub pairs: usize,
    /// Words skipped because their class leaves the patch.
    pub skipped: usize,
    /// True when the engine ran without a grading (length budgets).
    pub bounded: bool,
}

impl ConsistencyVerdict {
    pub fn is_consistent(&self) -> bool {
        self.status == ConsistencyStatus::ConsistentUpTo
    }
}

struct FaceReport {
    words: usize,
    classes: usize,
    pairs: usize,
    skipped: usize,
    bounded: bool,
    counterexample: Option<Counterexample>,
}

fn check_face(
    model: &Model,
    f: FaceId,
    bound: u64,
    radius: usize,
    n_max: u64,
) -> Result<FaceReport> {
    let e = Engine::develop(model, f, radius)?;
    let root = e.root();
    let words = e.enumerate_words(root, bound);
    let classes = par::map(&words, |(w, _)| e.equiv_class(root, w));
    // group classes by (end tile, weight)
    let mut groups: BTreeMap<(LiftedTile, u64), Vec<Word>> = BTreeMap::new();
    let mut skipped = 0;
    let mut bounded = false;
    for ((w, end), c) in words.iter().zip(classes) {
        match c {
            Ok(c) => {
                bounded |= c.bounded;
                let key = (
                    *end,
                    if model.grading().is_some() {
                        model.weight(w)
                    } else {
                        0
                    },
                );
                let reps = groups.entry(key).or_default();
                if !reps.contains(c.representative()) {
                    reps.push(c.representative().clone());
                }
            }
            Err(Error::PatchExhausted { .. }) => skipped += 1,
            Err(err) => return Err(err),
        }
    }
    let mut pairs = Vec::new();
    for reps in groups.values_mut() {
        reps.sort();
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                pairs.push((reps[i].clone(), reps[j].clone()));
            }
        }
    }
    let results = par::map(&pairs, |(u, v)| weak_equivalence(&e, root, u, v, n_max));
    let mut counterexample = None;
    for ((u, v), r) in pairs.iter().zip(results) {
        match r {
            Ok(Some(n)) if n > 0 => {
                let cx = Counterexample {
                    base: f,
                    u: u.clone(),
                    v: v.clone(),
                    n,
                };
                if counterexample.as_ref().is_none_or(|c| cx < *c) {
                    counterexample = Some(cx);
                }
            }
            Ok(_) => {}
            Err(Error::PatchExhausted { .. }) => skipped += 1,
            Err(err) => return Err(err),
        }
    }
    Ok(FaceReport {
        words: words.len(),
        classes: groups.values().map(Vec::len).sum(),
        pairs: pairs.len(),
        skipped,
        bounded,
        counterexample,
    })
}

/// Tests every pair of inequivalent paths from each base tile with equal
/// end tile and weight at most `bound` for weak equivalence, with up to
/// `bound / c` simple loops appended.
pub fn check_consistency(model: &Model, bound: u64, radius: usize) -> Result<ConsistencyVerdict> {
    let n_max = match model.c() {
        Some(c) => bound / c,
        None => {
            let t = model.tiling();
            let min_deg = (0..t.vertices().len())
                .map(|v| t.degree(crate::VertexId(v)))
                .min()
                .unwrap_or(1);
            bound / min_deg as u64
        }
    };
    let faces: Vec<FaceId> = (0..model.tiling().faces().len()).map(FaceId).collect();
    let reports = par::try_map(&faces, |&f| check_face(model, f, bound, radius, n_max))?;
    let counterexample = reports
        .iter()
        .filter_map(|r| r.counterexample.clone())
        .min();
    Ok(ConsistencyVerdict {
        status: match counterexample {
            Some(c) => ConsistencyStatus::Counterexample(c),
            None => ConsistencyStatus::ConsistentUpTo,
        },
        weight_bound: bound,
        radius,
        n_max,
        words: reports.iter().map(|r| r.words).sum(),
        classes: reports.iter().map(|r| r.classes).sum(),
        pairs: reports.iter().map(|r| r.pairs).sum(),
        skipped: reports.iter().map(|r| r.skipped).sum(),
        bounded: model.grading().is_none() || reports.iter().any(|r| r.bounded),
    })
}

/// A tile for which no arrow extends the minimal path (or, dually, no
/// arrow precedes the minimal path back) to a minimal path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Mr2Violation {
    pub base: FaceId,
    pub tile: LiftedTile,
    pub dual: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mr2Verdict {
    pub violations: Vec<Mr2Violation>,
    pub weight_bound: u64,
    pub radius: usize,
    /// Tile pairs checked, both directions counted.
    pub checked: usize,
}

impl Mr2Verdict {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn mr2_face(
    model: &Model,
    f: FaceId,
    bound: u64,
    radius: usize,
) -> Result<(Vec<Mr2Violation>, usize)> {
    let e = Engine::develop(model, f, radius)?;
    let p = e.patch();
    let root = e.root();
    let mut violations = Vec::new();
    let forward: Vec<LiftedTile> = p
        .tiles()
        .filter(|&t| e.is_certified(t) && e.min_weight(t) <= bound)
        .collect();
    let found = par::try_map(&forward, |&j| -> Result<bool> {
        let v = e.minimal_path(j, 0)?;
        for (a, _) in p.out_steps(j) {
            let mut va = v.clone();
            va.push(a);
            if e.is_minimal(root, &va)? {
                return Ok(true);
            }
        }
        Ok(false)
    })?;
    for (&j, ok) in forward.iter().zip(found) {
        if !ok {
            violations.push(Mr2Violation {
                base: f,
                tile: j,
                dual: false,
            });
        }
    }
    // dual: paths into the root
    let (back, pred) = shortest_weights(model, p, root, true);
    let trusted = p
        .tiles()
        .filter(|&t| (0..p.boundary_len(t)).any(|k| p.neighbor(t, k).is_none()))
        .map(|t| back[t.index()])
        .min()
        .unwrap_or(u64::MAX);
    let backward: Vec<LiftedTile> = p
        .tiles()
        .filter(|&t| back[t.index()] < trusted && back[t.index()] <= bound)
        .collect();
    let found = par::try_map(&backward, |&j| -> Result<bool> {
        let mut v = Vec::new();
        let mut cur = j;
        while let Some((next, a)) = pred[cur.index()] {
            v.push(a);
            cur = next;
        }
        if !e.is_minimal(j, &v)? {
            return Err(Error::Invariant(format!(
                "lightest path from tile {} to the root is not minimal",
                j.0
            )));
        }
        for (a, k) in p.in_steps(j) {
            let mut av = vec![a];
            av.extend_from_slice(&v);
            if e.is_minimal(k, &av)? {
                return Ok(true);
            }
        }
        Ok(false)
    })?;
    for (&j, ok) in backward.iter().zip(found) {
        if !ok {
            violations.push(Mr2Violation {
                base: f,
                tile: j,
                dual: true,
            });
        }
    }
    Ok((violations, forward.len() + backward.len()))
}

/// MR2 and its dual for every base tile and every tile whose minimal
/// weight from (or to) it is at most `bound`.
pub fn check_mr2(model: &Model, bound: u64, radius: usize) -> Result<Mr2Verdict> {
    let faces: Vec<FaceId> = (0..model.tiling().faces().len()).map(FaceId).collect();
    let parts = par::try_map(&faces, |&f| mr2_face(model, f, bound, radius))?;
    let mut violations: Vec<Mr2Violation> = parts.iter().flat_map(|(v, _)| v.clone()).collect();
    violations.sort();
    Ok(Mr2Verdict {
        violations,
        weight_bound: bound,
        radius,
        checked: parts.iter().map(|(_, n)| n).sum(),
    })
}

/// The relation `j <= k`: some minimal path from the root to `k` visits `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TileOrder {
    pub tiles: Vec<LiftedTile>,
    /// `leq[a][b]` for `tiles[a] <= tiles[b]`.
    pub leq: Vec<Vec<bool>>,
}

impl TileOrder {
    pub fn index(&self, t: LiftedTile) -> Option<usize> {
        self.tiles.binary_search(&t).ok()
    }

    pub fn le(&self, j: LiftedTile, k: LiftedTile) -> Option<bool> {
        Some(self.leq[self.index(j)?][self.index(k)?])
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.tiles.len()).all(|a| self.leq[a][a])
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.tiles.len();
        (0..n).all(|a| (0..n).all(|b| a == b || !(self.leq[a][b] && self.leq[b][a])))
    }

    /// Transitivity among the window tiles.
    pub fn is_transitive(&self) -> bool {
        let n = self.tiles.len();
        (0..n).all(|a| {
            (0..n).all(|b| !self.leq[a][b] || (0..n).all(|c| !self.leq[b][c] || self.leq[a][c]))
        })
    }
}

/// The tile order on `window`, sorted. All minimal paths to a tile are
/// equivalent on a consistent tiling, so one class per tile decides it.
pub fn tile_order(e: &Engine, window: &[LiftedTile]) -> Result<TileOrder> {
    let mut tiles = window.to_vec();
    tiles.sort();
    tiles.dedup();
    let root = e.root();
    let supports = par::try_map(&tiles, |&k| {
        let v = e.minimal_path(k, 0)?;
        let mut s = e.class_support(root, &v)?;
        s.insert(root);
        Ok::<_, Error>(s)
    })?;
    let leq = tiles
        .iter()
        .map(|j| supports.iter().map(|s| s.contains(j)).collect())
        .collect();
    Ok(TileOrder { tiles, leq })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn bundled_torus_examples_are_consistent() {
        for t in [examples::c3(), examples::conifold()] {
            let m = Model::new(&t);
            let v = check_consistency(&m, 4, 5).unwrap();
            assert!(v.is_consistent());
            assert_eq!(v.skipped, 0);
            assert!(check_mr2(&m, 4, 5).unwrap().holds());
        }
    }
}
