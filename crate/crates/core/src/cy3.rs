//! Graded pieces of the length-three complex resolving a vertex simple
//! module, their shapes around the start tile, and exactness by ranks.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::cover::LiftedTile;
use crate::error::{Error, Result};
use crate::fterm::{Engine, Model};
use crate::linalg;
use crate::par;
use crate::tiling::{Arrow, FaceId, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// The class contains a path through a simple loop.
    NonMinimal,
    /// The marked boundary positions form one arc ending in out-arrows
    /// (possibly empty, for the trivial path).
    Line,
    /// Every boundary position is marked.
    Loop,
}

/// Boundary data of the class of a path `u` from tile `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundarySets {
    /// Arrows into `i` whose broken loop starts some member.
    pub e1: Vec<Arrow>,
    /// Arrows out of `i` that start some member.
    pub e2: Vec<Arrow>,
    pub minimal: bool,
    pub trivial: bool,
}

pub fn boundary_sets(e: &Engine, start: LiftedTile, u: &[Arrow]) -> Result<BoundarySets> {
    let model = e.model();
    let q = model.quiver();
    let f = e.patch().face(start);
    let class = e.equiv_class(start, u)?;
    let mut e2 = BTreeSet::new();
    let mut e1 = BTreeSet::new();
    for m in &class.members {
        if let Some(&a) = m.first() {
            e2.insert(a);
        }
    }
    for a in q.in_arrows(f) {
        let (b, w) = model.pair(a);
        if class
            .members
            .iter()
            .any(|m| m.starts_with(b) || m.starts_with(w))
        {
            e1.insert(a);
        }
    }
    let minimal = !class.members.iter().any(|m| model.contains_simple_loop(m));
    Ok(BoundarySets {
        e1: e1.into_iter().collect(),
        e2: e2.into_iter().collect(),
        minimal,
        trivial: u.is_empty(),
    })
}

/// Shape of the marked positions around face `f`.
pub fn classify(model: &Model, f: FaceId, sets: &BoundarySets) -> Result<Shape> {
    let q = model.quiver();
    let ins: Vec<Arrow> = q.in_arrows(f).collect();
    let outs: Vec<Arrow> = q.out_arrows(f).collect();
    let len = model.tiling().face(f).len();
    if !sets.minimal {
        if sets.e1 != ins || sets.e2 != outs {
            return Err(Error::Invariant(
                "non-minimal class without full boundary sets".into(),
            ));
        }
        return Ok(Shape::NonMinimal);
    }
    let mut marked = vec![false; len];
    for &a in &sets.e1 {
        marked[q.arrows[a.index()].in_pos] = true;
    }
    for &a in &sets.e2 {
        marked[q.arrows[a.index()].out_pos] = true;
    }
    // each marked in-arrow has both neighbouring out-arrows marked
    for &a in &sets.e1 {
        let p = q.arrows[a.index()].in_pos;
        if !marked[(p + 1) % len] || !marked[(p + len - 1) % len] {
            return Err(Error::Invariant(
                "marked in-arrow next to an unmarked out-arrow".into(),
            ));
        }
    }
    let count = marked.iter().filter(|&&m| m).count();
    if count == len {
        return Ok(Shape::Loop);
    }
    if count == 0 {
        return Ok(Shape::Line);
    }
    let starts: Vec<usize> = (0..len)
        .filter(|&k| marked[k] && !marked[(k + len - 1) % len])
        .collect();
    if starts.len() != 1 {
        return Err(Error::Invariant("marked positions are not one arc".into()));
    }
    let s = starts[0];
    let end = (s + count - 1) % len;
    let is_out = |k: usize| outs.iter().any(|a| q.arrows[a.index()].out_pos == k);
    if !is_out(s) || !is_out(end) {
        return Err(Error::Invariant("arc does not end in out-arrows".into()));
    }
    Ok(Shape::Line)
}

/// The graded piece of the complex
/// `0 -> M3 -> M2 -> M1 -> M0 -> S -> 0` at the grade of `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedComplex {
    /// Dimensions `[M3, M2, M1, M0, S]`.
    pub dims: [usize; 5],
    /// Matrices of the four maps, rows indexed by the target.
    pub maps: [Vec<Vec<i64>>; 4],
}

impl GradedComplex {
    pub fn build(model: &Model, sets: &BoundarySets) -> GradedComplex {
        let m3 = usize::from(!sets.minimal);
        let (e1, e2) = (&sets.e1, &sets.e2);
        let s = usize::from(sets.trivial);
        let tau = (0..e1.len()).map(|_| vec![1; m3]).collect();
        let mut sigma = vec![vec![0i64; e1.len()]; e2.len()];
        for (j, &a) in e1.iter().enumerate() {
            let (b, w) = model.pair(a);
            for (first, sign) in [(b[0], 1), (w[0], -1)] {
                if let Some(r) = e2.iter().position(|&x| x == first) {
                    sigma[r][j] += sign;
                }
            }
        }
        let rho = vec![vec![1; e2.len()]];
        let eps = (0..s).map(|_| vec![1]).collect();
        GradedComplex {
            dims: [m3, e1.len(), e2.len(), 1, s],
            maps: [tau, sigma, rho, eps],
        }
    }

    pub fn ranks(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|k| linalg::rank(&self.maps[k]))
    }

    /// Whether consecutive maps compose to zero.
    pub fn is_complex(&self) -> bool {
        (0..3).all(|k| {
            let (a, b) = (&self.maps[k], &self.maps[k + 1]);
            let inner = self.dims[k + 1];
            b.iter().all(|row| {
                (0..self.dims[k]).all(|c| (0..inner).map(|j| row[j] * a[j][c]).sum::<i64>() == 0)
            })
        })
    }

    pub fn is_exact(&self) -> bool {
        let r = self.ranks();
        let d = self.dims;
        r[0] == d[0]
            && r[1] == d[1] - r[0]
            && r[2] == d[2] - r[1]
            && r[3] == d[3] - r[2]
            && r[3] == d[4]
    }

    pub fn euler(&self) -> i64 {
        let d = self.dims.map(|x| x as i64);
        d[3] - d[2] + d[1] - d[0] - d[4]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradedPiece {
    pub base: FaceId,
    pub end: LiftedTile,
    /// Least member of the class.
    pub word: Word,
    pub sets: BoundarySets,
    pub shape: Shape,
    pub dims: [usize; 5],
    pub exact: bool,
    pub euler: i64,
}

impl GradedPiece {
    /// Exactness computed by ranks agrees with the shape criterion.
    pub fn agrees(&self) -> bool {
        self.exact == (self.shape != Shape::Loop)
    }
}

/// Builds and classifies the graded piece of `u` from `start`.
pub fn graded_piece(e: &Engine, start: LiftedTile, u: &[Arrow]) -> Result<GradedPiece> {
    let f = e.patch().face(start);
    let sets = boundary_sets(e, start, u)?;
    let shape = classify(e.model(), f, &sets)?;
    let cx = GradedComplex::build(e.model(), &sets);
    if !cx.is_complex() {
        return Err(Error::Invariant(
            "graded maps do not compose to zero".into(),
        ));
    }
    let class = e.equiv_class(start, u)?;
    Ok(GradedPiece {
        base: f,
        end: class.end,
        word: class.representative().clone(),
        shape,
        dims: cx.dims,
        exact: cx.is_exact(),
        euler: cx.euler(),
        sets,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Cy3Status {
    /// No loop-shaped piece within the bound on a surface of positive genus.
    Cy3Evidence,
    /// A loop-shaped piece: the complex is not a resolution.
    NotCy3 { witness: Box<GradedPiece> },
    /// Genus zero but no witness within the bound.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cy3Verdict {
    pub status: Cy3Status,
    pub genus: usize,
    pub weight_bound: u64,
    pub radius: usize,
    pub pieces: usize,
    pub loops: usize,
    /// Pieces whose rank exactness disagrees with their shape.
    pub disagreements: usize,
    pub skipped: usize,
}

fn scan_face(
    model: &Model,
    f: FaceId,
    bound: u64,
    radius: usize,
) -> Result<(Vec<GradedPiece>, usize)> {
    let e = Engine::develop(model, f, radius)?;
    let root = e.root();
    let words = e.enumerate_words(root, bound);
    let mut reps: BTreeSet<Word> = BTreeSet::new();
    let mut skipped = 0;
    for (w, _) in &words {
        match e.equiv_class(root, w) {
            Ok(c) => {
                reps.insert(c.representative().clone());
            }
            Err(Error::PatchExhausted { .. }) => skipped += 1,
            Err(err) => return Err(err),
        }
    }
    let reps: Vec<Word> = reps.into_iter().collect();
    let pieces = par::try_map(&reps, |w| graded_piece(&e, root, w))?;
    Ok((pieces, skipped))
}

/// Every graded piece for paths of weight at most `bound` from each base
/// tile, with the verdict.
pub fn cy3_scan_pieces(
    model: &Model,
    bound: u64,
    radius: usize,
) -> Result<(Cy3Verdict, Vec<GradedPiece>)> {
    let faces: Vec<FaceId> = (0..model.tiling().faces().len()).map(FaceId).collect();
    let parts = par::try_map(&faces, |&f| scan_face(model, f, bound, radius))?;
    let skipped = parts.iter().map(|(_, s)| s).sum();
    let pieces: Vec<GradedPiece> = parts.into_iter().flat_map(|(p, _)| p).collect();
    let genus = model.tiling().genus();
    let witness = pieces
        .iter()
        .filter(|p| p.shape == Shape::Loop)
        .min_by(|a, b| (a.base, &a.word).cmp(&(b.base, &b.word)));
    let status = match witness {
        Some(w) => Cy3Status::NotCy3 {
            witness: Box::new(w.clone()),
        },
        None if genus == 0 => Cy3Status::Inconclusive,
        None => Cy3Status::Cy3Evidence,
    };
    let verdict = Cy3Verdict {
        status,
        genus,
        weight_bound: bound,
        radius,
        pieces: pieces.len(),
        loops: pieces.iter().filter(|p| p.shape == Shape::Loop).count(),
        disagreements: pieces.iter().filter(|p| !p.agrees()).count(),
        skipped,
    };
    Ok((verdict, pieces))
}

pub fn cy3_scan(model: &Model, bound: u64, radius: usize) -> Result<Cy3Verdict> {
    Ok(cy3_scan_pieces(model, bound, radius)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::tiling::parse_word;

    #[test]
    fn c3_small_pieces() {
        let t = examples::c3();
        let m = Model::new(&t);
        let e = Engine::develop(&m, FaceId(0), 4).unwrap();
        let r = e.root();
        let w = |s: &str| parse_word(&t, s).unwrap();
        let p = graded_piece(&e, r, &w("x")).unwrap();
        assert_eq!((p.sets.e1.clone(), p.sets.e2.clone()), (vec![], w("x")));
        assert_eq!(p.shape, Shape::Line);
        assert!(p.exact);
        let p = graded_piece(&e, r, &w("x y")).unwrap();
        assert_eq!(p.sets.e1, w("z"));
        assert_eq!(p.sets.e2, w("x y"));
        assert_eq!(p.dims, [0, 1, 2, 1, 0]);
        assert!(p.exact);
        let p = graded_piece(&e, r, &w("x y z")).unwrap();
        assert_eq!(p.shape, Shape::NonMinimal);
        assert!(p.exact);
        let p = graded_piece(&e, r, &[]).unwrap();
        assert!(p.exact && p.shape == Shape::Line);
    }

    #[test]
    fn cube_has_a_witness() {
        let m = Model::new(&examples::cube());
        let v = cy3_scan(&m, 4, 4).unwrap();
        let Cy3Status::NotCy3 { witness } = v.status else {
            panic!("no witness")
        };
        assert!(!witness.exact);
        assert_eq!(witness.euler, 1);
        assert_eq!(v.disagreements, 0);
    }
}
