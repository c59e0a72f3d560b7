//! Cyclic graded modules as finite prefix-closed sets of grades, their
//! height functions, bungalow filtrations and the matching dimers.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cover::LiftedTile;
use crate::error::{Error, Result};
use crate::fterm::{Engine, G1Grade};
use crate::matchings::{
    height_function, is_obtainable, region_boundary, CanonicalDimer, DimerWindow, OrientedLoop,
};
use crate::par;
use crate::tiling::Arrow;

/// A finite set of grades of paths from the root, closed under removing
/// the last arrow.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CrystalModule {
    /// Sorted.
    pub grades: Vec<G1Grade>,
}

pub type ModuleHeights = BTreeMap<LiftedTile, u64>;

impl CrystalModule {
    pub fn dim(&self) -> usize {
        self.grades.len()
    }

    pub fn contains(&self, g: &G1Grade) -> bool {
        self.grades.binary_search(g).is_ok()
    }

    /// Column heights: the number of grades ending at each tile.
    pub fn heights(&self) -> ModuleHeights {
        let mut h = ModuleHeights::new();
        for g in &self.grades {
            *h.entry(g.end).or_insert(0) += 1;
        }
        h
    }

    /// Grades per base face.
    pub fn dimension_vector(&self, e: &Engine) -> Vec<usize> {
        let mut v = vec![0; e.model().tiling().faces().len()];
        for g in &self.grades {
            v[e.patch().face(g.end).index()] += 1;
        }
        v
    }

    fn from_set(grades: BTreeSet<G1Grade>) -> CrystalModule {
        CrystalModule {
            grades: grades.into_iter().collect(),
        }
    }
}

fn certified(e: &Engine, t: LiftedTile) -> Result<()> {
    if e.is_certified(t) {
        Ok(())
    } else {
        Err(Error::WindowTooSmall(format!(
            "tile {} is beyond the certified part of the patch",
            t.0
        )))
    }
}

fn grade_shift(e: &Engine, from: LiftedTile, a: Arrow, to: LiftedTile) -> Result<u64> {
    let c = e
        .model()
        .c()
        .ok_or(Error::Certification("no grading".into()))?;
    let num = e.min_weight(from) + e.model().arrow_weight(a);
    let base = e.min_weight(to);
    if num < base || !(num - base).is_multiple_of(c) {
        return Err(Error::Invariant(format!(
            "arrow {} does not shift grades by whole loops",
            a.index()
        )));
    }
    Ok((num - base) / c)
}

/// Grade of `u a` for `u` of grade `g`; `None` if `a` does not leave the
/// end tile's face.
pub fn successor(e: &Engine, g: G1Grade, a: Arrow) -> Result<Option<G1Grade>> {
    let p = e.patch();
    if e.model().quiver().tail(a) != p.face(g.end) {
        return Ok(None);
    }
    let next = p
        .step(g.end, a)
        .ok_or_else(|| Error::WindowTooSmall("module reaches the patch boundary".into()))?;
    certified(e, g.end)?;
    certified(e, next)?;
    let t = grade_shift(e, g.end, a, next)?;
    Ok(Some(G1Grade {
        start: g.start,
        end: next,
        n: g.n + t,
    }))
}

/// Grades `h` with `g` the grade of `u a` for some `u` of grade `h`.
pub fn predecessors(e: &Engine, g: G1Grade) -> Result<Vec<G1Grade>> {
    let p = e.patch();
    let f = p.face(g.end);
    certified(e, g.end)?;
    let mut out = Vec::new();
    for a in e.model().quiver().in_arrows(f) {
        let k = p
            .step_back(g.end, a)
            .ok_or_else(|| Error::WindowTooSmall("module reaches the patch boundary".into()))?;
        certified(e, k)?;
        let t = grade_shift(e, k, a, g.end)?;
        if g.n >= t {
            out.push(G1Grade {
                start: g.start,
                end: k,
                n: g.n - t,
            });
        }
    }
    Ok(out)
}

fn is_closed(e: &Engine, grades: &BTreeSet<G1Grade>) -> Result<bool> {
    for &g in grades {
        if predecessors(e, g)?.iter().any(|h| !grades.contains(h)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks prefix closure and that the module is cyclic from the root.
pub fn validate(e: &Engine, m: &CrystalModule) -> Result<()> {
    let set: BTreeSet<G1Grade> = m.grades.iter().copied().collect();
    if set.is_empty() {
        return Ok(());
    }
    let root = G1Grade {
        start: e.root(),
        end: e.root(),
        n: 0,
    };
    if !set.contains(&root) {
        return Err(Error::InvalidHeight(
            "module does not contain the trivial grade".into(),
        ));
    }
    if !is_closed(e, &set)? {
        return Err(Error::InvalidHeight(
            "grade set is not prefix closed".into(),
        ));
    }
    Ok(())
}

/// All modules of each dimension `0..=n`, built as order ideals one grade
/// at a time. Entry `k` lists the modules of dimension `k` in sorted order.
pub fn enumerate_modules_upto(e: &Engine, n: usize) -> Result<Vec<Vec<CrystalModule>>> {
    let root = G1Grade {
        start: e.root(),
        end: e.root(),
        n: 0,
    };
    let q = e.model().quiver();
    let mut levels = vec![vec![CrystalModule { grades: Vec::new() }]];
    for _ in 0..n {
        let prev = levels.last().expect("level zero exists");
        let grown = par::try_map(prev, |m| -> Result<Vec<CrystalModule>> {
            let set: BTreeSet<G1Grade> = m.grades.iter().copied().collect();
            let mut cands = BTreeSet::new();
            if set.is_empty() {
                cands.insert(root);
            }
            for &g in &set {
                for a in q.out_arrows(e.patch().face(g.end)) {
                    if let Some(h) = successor(e, g, a)? {
                        if !set.contains(&h) {
                            cands.insert(h);
                        }
                    }
                }
            }
            let mut out = Vec::new();
            for h in cands {
                if predecessors(e, h)?.iter().all(|x| set.contains(x)) {
                    let mut s = set.clone();
                    s.insert(h);
                    out.push(CrystalModule::from_set(s));
                }
            }
            Ok(out)
        })?;
        let next: BTreeSet<CrystalModule> = grown.into_iter().flatten().collect();
        levels.push(next.into_iter().collect());
    }
    Ok(levels)
}

pub fn enumerate_modules(e: &Engine, n: usize) -> Result<Vec<CrystalModule>> {
    Ok(enumerate_modules_upto(e, n)?
        .pop()
        .expect("at least one level"))
}

/// Layers `{j : H(j) >= s}` for `s = 1..=max H`, outermost first.
pub fn bungalow_supports(h: &ModuleHeights) -> Vec<BTreeSet<LiftedTile>> {
    let top = h.values().copied().max().unwrap_or(0);
    (1..=top)
        .map(|s| h.iter().filter(|(_, &v)| v >= s).map(|(&t, _)| t).collect())
        .collect()
}

/// The bungalow filtration: each layer as a module of height at most one.
pub fn bungalow_filtration(m: &CrystalModule) -> Vec<CrystalModule> {
    let root = m.grades.first().map(|g| g.start);
    bungalow_supports(&m.heights())
        .into_iter()
        .map(|tiles| CrystalModule {
            grades: tiles
                .into_iter()
                .map(|t| G1Grade {
                    start: root.expect("nonempty module"),
                    end: t,
                    n: 0,
                })
                .collect(),
        })
        .collect()
}

/// Boundary loops of the bungalow layers, outermost first.
pub fn bungalow_loops(e: &Engine, m: &CrystalModule) -> Result<Vec<OrientedLoop>> {
    bungalow_supports(&m.heights())
        .iter()
        .map(|tiles| region_boundary(e.patch(), tiles))
        .collect()
}

/// Flips the canonical configuration along the bungalow loops of `m`.
pub fn dimer_of_module(
    e: &Engine,
    m: &CrystalModule,
    base: &CanonicalDimer,
) -> Result<DimerWindow> {
    let region = &base.window.region;
    let p = e.patch();
    for g in &m.grades {
        let inside = (0..p.boundary_len(g.end))
            .all(|k| matches!(p.neighbor(g.end, k), Some((n, _)) if region.contains(&n)));
        if !region.contains(&g.end) || !inside {
            return Err(Error::WindowTooSmall(
                "module support needs a one-tile margin in the dimer window".into(),
            ));
        }
    }
    let mut d = base.window.clone();
    for lp in bungalow_loops(e, m)? {
        if !is_obtainable(&lp, &base.window) {
            return Err(Error::Invariant(
                "bungalow loop is not obtainable from the canonical configuration".into(),
            ));
        }
        d = d.flipped(&lp.edge_set());
    }
    Ok(d)
}

/// The module whose heights are `h(d, base)`.
pub fn module_of_dimer(
    e: &Engine,
    d: &DimerWindow,
    base: &CanonicalDimer,
) -> Result<CrystalModule> {
    let h = height_function(e.patch(), d, &base.window)?;
    let mut grades = BTreeSet::new();
    for (&t, &v) in &h {
        if v < 0 {
            return Err(Error::InvalidHeight(format!(
                "negative height at tile {}",
                t.0
            )));
        }
        for n in 0..v as u64 {
            grades.insert(G1Grade {
                start: e.root(),
                end: t,
                n,
            });
        }
    }
    let m = CrystalModule::from_set(grades);
    validate(e, &m)?;
    Ok(m)
}
