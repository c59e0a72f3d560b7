//! Symmetry tori as integer lattices, tangent spaces at torus-fixed
//! modules, and signed fixed-point counts on the torus.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::crystal::{enumerate_modules_upto, CrystalModule};
use crate::error::{Error, Result};
use crate::fterm::{Engine, G1Grade};
use crate::lattice::{self, IMat};
use crate::linalg::{self, SparseRow};
use crate::par;
use crate::tiling::{dual_quiver, Arrow, BraneTiling, FaceId, VertexId};

/// A sublattice of `Z^cols` (edge coweights) given by a row basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightLattice {
    pub basis: IMat,
    pub cols: usize,
}

impl WeightLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }
}

fn vertex_sum_row(t: &BraneTiling, v: VertexId) -> Vec<i64> {
    let mut row = vec![0; t.edges().len()];
    for e in t.rotation(v) {
        row[e.0] += 1;
    }
    row
}

fn difference_rows(t: &BraneTiling) -> IMat {
    let first = vertex_sum_row(t, VertexId(0));
    (1..t.vertices().len())
        .map(|v| {
            vertex_sum_row(t, VertexId(v))
                .iter()
                .zip(&first)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect()
}

/// Edge weights under which every vertex cycle has the same weight, so
/// that every F-term relation is homogeneous.
pub fn potential_torus_lattice(t: &BraneTiling) -> Result<WeightLattice> {
    let cols = t.edges().len();
    Ok(WeightLattice {
        basis: lattice::kernel(&difference_rows(t), cols)?,
        cols,
    })
}

/// Per-face generators: `+1` on arrows into the face, `-1` on arrows out.
pub fn gauge_generators(t: &BraneTiling) -> IMat {
    let q = dual_quiver(t);
    (0..q.num_nodes)
        .map(|f| {
            let mut row = vec![0i64; t.edges().len()];
            for (k, a) in q.arrows.iter().enumerate() {
                if a.head.index() == f {
                    row[k] += 1;
                }
                if a.tail.index() == f {
                    row[k] -= 1;
                }
            }
            row
        })
        .collect()
}

pub fn gauge_sublattice(t: &BraneTiling) -> Result<WeightLattice> {
    let cols = t.edges().len();
    Ok(WeightLattice {
        basis: lattice::row_basis(&gauge_generators(t), cols)?,
        cols,
    })
}

/// The torus acting trivially on simple loops, modulo gauge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwLattice {
    pub potential: WeightLattice,
    /// Potential weights vanishing on the simple loops.
    pub loop_trivial: WeightLattice,
    pub gauge: WeightLattice,
    /// Representatives of a basis of the free part of the quotient.
    pub basis: IMat,
    pub torsion: Vec<i64>,
    pub rank: usize,
}

/// The quotient lattice; its rank is computed from an adapted basis and
/// again by subtracting ranks, and the two must agree.
pub fn tw_lattice(t: &BraneTiling) -> Result<TwLattice> {
    let cols = t.edges().len();
    let potential = potential_torus_lattice(t)?;
    let mut rows = difference_rows(t);
    rows.push(vertex_sum_row(t, VertexId(0)));
    let loop_trivial = WeightLattice {
        basis: lattice::kernel(&rows, cols)?,
        cols,
    };
    let gauge = gauge_sublattice(t)?;
    let q = lattice::quotient(&loop_trivial.basis, &gauge.basis, cols)?;
    let rank = q.free_basis.len();
    if rank != loop_trivial.rank() - gauge.rank() {
        return Err(Error::Invariant(
            "quotient rank disagrees with the rank difference".into(),
        ));
    }
    Ok(TwLattice {
        potential,
        loop_trivial,
        gauge,
        basis: q.free_basis,
        torsion: q.torsion,
        rank,
    })
}

/// Tangent data at a fixed point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TangentReport {
    pub dim: usize,
    pub sign: i64,
    pub zero_weight: usize,
    /// Multiplicity of each torus weight, sorted by weight.
    pub spectrum: Vec<(Vec<i64>, usize)>,
}

/// The module as 0/1 matrices: per face, the grades ending there.
struct Realization {
    /// Basis grades per face.
    basis: Vec<Vec<G1Grade>>,
    /// `act[a][r] = Some(s)`: arrow `a` sends basis row `r` of its tail to
    /// row `s` of its head.
    act: Vec<Vec<Option<usize>>>,
}

fn realize(e: &Engine, m: &CrystalModule) -> Result<Realization> {
    let q = e.model().quiver();
    let mut basis = vec![Vec::new(); q.num_nodes];
    for g in &m.grades {
        basis[e.patch().face(g.end).index()].push(*g);
    }
    let pos: HashMap<G1Grade, usize> = basis
        .iter()
        .flat_map(|b| b.iter().enumerate().map(|(k, &g)| (g, k)))
        .collect();
    let mut act = Vec::with_capacity(q.arrows.len());
    for (k, data) in q.arrows.iter().enumerate() {
        let a = Arrow(k as u32);
        let mut col = Vec::new();
        for &g in &basis[data.tail.index()] {
            let image = crate::crystal::successor(e, g, a)?;
            col.push(image.and_then(|h| pos.get(&h).copied()));
        }
        act.push(col);
    }
    Ok(Realization { basis, act })
}

/// Partial map along a word: basis row `r` at the word's start to a row
/// at its end, if the path acts nonzero.
fn follow(real: &Realization, word: &[Arrow], r: usize) -> Option<usize> {
    word.iter().try_fold(r, |cur, a| real.act[a.index()][cur])
}

/// Tangent space of the framed moduli at `m`, split by torus weight.
pub fn tangent(e: &Engine, tw: &TwLattice, m: &CrystalModule) -> Result<TangentReport> {
    let model = e.model();
    let q = model.quiver();
    let genus = model.tiling().genus();
    if genus != 1 {
        return Err(Error::GenusUnsupported(genus));
    }
    let real = realize(e, m)?;
    let rank = tw.rank;
    let arrow_wt = |a: usize| -> Vec<i64> { tw.basis.iter().map(|row| row[a]).collect() };
    let mut chi: HashMap<G1Grade, Vec<i64>> = HashMap::new();
    for g in &m.grades {
        let path = e
            .lightest_path(g.end)
            .ok_or_else(|| Error::WindowTooSmall("grade outside the patch".into()))?;
        let mut w = vec![0i64; rank];
        for a in path {
            for (x, y) in w.iter_mut().zip(arrow_wt(a.index())) {
                *x += y;
            }
        }
        chi.insert(*g, w);
    }
    let diff = |base: Vec<i64>, plus: &[i64], minus: &[i64]| -> Vec<i64> {
        base.iter()
            .zip(plus)
            .zip(minus)
            .map(|((b, p), m)| b + p - m)
            .collect()
    };
    let zero = vec![0i64; rank];
    let root_face = e.patch().face(e.root()).index();
    let dims: Vec<usize> = real.basis.iter().map(Vec::len).collect();

    // coordinates: delta X_a[r][s], then delta f[r]
    let mut coord_index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut coord_weight: Vec<Vec<i64>> = Vec::new();
    for (k, data) in q.arrows.iter().enumerate() {
        let (bt, bh) = (
            &real.basis[data.tail.index()],
            &real.basis[data.head.index()],
        );
        for (r, g) in bt.iter().enumerate() {
            for (s, h) in bh.iter().enumerate() {
                coord_index.insert((k, r, s), coord_weight.len());
                coord_weight.push(diff(arrow_wt(k), &chi[g], &chi[h]));
            }
        }
    }
    let n_dx = coord_weight.len();
    for g in &real.basis[root_face] {
        coord_weight.push(diff(zero.clone(), &zero, &chi[g]));
    }

    // linearized relations: one equation per (arrow, row at head, row at tail)
    let mut equations: Vec<(Vec<i64>, SparseRow)> = Vec::new();
    for (k, data) in q.arrows.iter().enumerate() {
        let a = Arrow(k as u32);
        let (b, w) = model.pair(a);
        let (h, t) = (data.head.index(), data.tail.index());
        for p in 0..dims[h] {
            for qq in 0..dims[t] {
                let mut row: HashMap<usize, i64> = HashMap::new();
                for (word, sign) in [(b, 1i64), (w, -1i64)] {
                    for pos in 0..word.len() {
                        let Some(s) = follow(&real, &word[..pos], p) else {
                            continue;
                        };
                        let x = word[pos].index();
                        let xd = &q.arrows[x];
                        for tt in 0..dims[xd.head.index()] {
                            if follow(&real, &word[pos + 1..], tt) == Some(qq) {
                                *row.entry(coord_index[&(x, s, tt)]).or_insert(0) += sign;
                            }
                        }
                    }
                }
                let wt = diff(
                    word_weight(&arrow_wt, b, rank),
                    &chi[&real.basis[h][p]],
                    &chi[&real.basis[t][qq]],
                );
                let row: SparseRow = row.into_iter().filter(|&(_, v)| v != 0).collect();
                equations.push((wt, row));
            }
        }
    }

    // gauge action: xi_f[r][s] moves delta X and delta f
    let mut gauge: Vec<(Vec<i64>, SparseRow)> = Vec::new();
    for (f, bf) in real.basis.iter().enumerate() {
        for r in 0..bf.len() {
            for s in 0..bf.len() {
                let mut row: HashMap<usize, i64> = HashMap::new();
                for (k, data) in q.arrows.iter().enumerate() {
                    // (xi X)_a: rows at the tail
                    if data.tail.index() == f {
                        for (tt, img) in real.act[k].iter().enumerate() {
                            if let (true, Some(img)) = (tt == s, img) {
                                *row.entry(coord_index[&(k, r, *img)]).or_insert(0) += 1;
                            }
                        }
                    }
                    // -(X xi)_a: columns at the head
                    if data.head.index() == f {
                        for (src, img) in real.act[k].iter().enumerate() {
                            if *img == Some(r) {
                                *row.entry(coord_index[&(k, src, s)]).or_insert(0) -= 1;
                            }
                        }
                    }
                }
                if f == root_face {
                    // framing is the trivial grade, row 0 of the root face
                    let trivial = real.basis[f]
                        .iter()
                        .position(|g| g.end == e.root() && g.n == 0);
                    if trivial == Some(r) {
                        *row.entry(n_dx + s).or_insert(0) -= 1;
                    }
                }
                let wt = diff(zero.clone(), &chi[&bf[r]], &chi[&bf[s]]);
                let row: SparseRow = row.into_iter().filter(|&(_, v)| v != 0).collect();
                gauge.push((wt, row));
            }
        }
    }
    let gauge_dim: usize = dims.iter().map(|d| d * d).sum();

    // split everything by weight
    let mut blocks: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (c, w) in coord_weight.iter().enumerate() {
        blocks.entry(w.clone()).or_default().push(c);
    }
    let keys: Vec<Vec<i64>> = blocks.keys().cloned().collect();
    let results = par::map(&keys, |w| {
        let cols = &blocks[w];
        let local: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let restrict = |rows: &[(Vec<i64>, SparseRow)]| -> Vec<SparseRow> {
            rows.iter()
                .filter(|(rw, _)| rw == w)
                .map(|(_, r)| r.iter().map(|&(c, v)| (local[&c], v)).collect())
                .collect()
        };
        let eqs = restrict(&equations);
        let gs = restrict(&gauge);
        let n_dx_here = cols.iter().filter(|&&c| c < n_dx).count();
        let n_f_here = cols.len() - n_dx_here;
        let eq_rank = linalg::rank_sparse(&eqs, cols.len());
        let g_rank = linalg::rank_sparse(&gs, cols.len());
        (n_dx_here + n_f_here - eq_rank - g_rank, g_rank)
    });
    // equations and gauge vectors whose weight carries no coordinate vanish
    for (w, r) in equations.iter().chain(&gauge) {
        if !blocks.contains_key(w) && !r.is_empty() {
            return Err(Error::Invariant(
                "weight bookkeeping lost a nonzero row".into(),
            ));
        }
    }
    let total_gauge: usize = results.iter().map(|(_, g)| g).sum();
    if total_gauge != gauge_dim {
        return Err(Error::Invariant(format!(
            "gauge orbit has dimension {total_gauge}, expected {gauge_dim}; stabilizer is not trivial"
        )));
    }
    let mut spectrum = Vec::new();
    for (w, (mult, _)) in keys.into_iter().zip(&results) {
        if *mult > 0 {
            spectrum.push((w, *mult));
        }
    }
    let dim: usize = spectrum.iter().map(|(_, m)| m).sum();
    let zero_weight = spectrum
        .iter()
        .find(|(w, _)| w.iter().all(|&x| x == 0))
        .map_or(0, |(_, m)| *m);
    Ok(TangentReport {
        dim,
        sign: if dim.is_multiple_of(2) { 1 } else { -1 },
        zero_weight,
        spectrum,
    })
}

fn word_weight(arrow_wt: &impl Fn(usize) -> Vec<i64>, w: &[Arrow], rank: usize) -> Vec<i64> {
    let mut out = vec![0; rank];
    for a in w {
        for (x, y) in out.iter_mut().zip(arrow_wt(a.index())) {
            *x += y;
        }
    }
    out
}

/// Signed count at one dimension vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DtEntry {
    pub dims: Vec<usize>,
    pub fixed_points: usize,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DtTable {
    pub base: FaceId,
    /// Signed counts by total dimension `0..=n_max`.
    pub series: Vec<i64>,
    /// Signed counts by dimension vector, sorted.
    pub entries: Vec<DtEntry>,
}

/// Signed fixed-point counts up to total dimension `n_max` for framing at
/// the root face. Refuses if any tangent space has a trivial weight.
pub fn dt_series(e: &Engine, n_max: usize) -> Result<DtTable> {
    let genus = e.model().tiling().genus();
    if genus != 1 {
        return Err(Error::GenusUnsupported(genus));
    }
    let tw = tw_lattice(e.model().tiling())?;
    let levels = enumerate_modules_upto(e, n_max)?;
    let mut series = Vec::new();
    let mut by_dims: BTreeMap<Vec<usize>, (usize, i64)> = BTreeMap::new();
    for level in &levels {
        let reports = par::try_map(level, |m| tangent(e, &tw, m))?;
        let mut sum = 0;
        for (m, r) in level.iter().zip(&reports) {
            if r.zero_weight > 0 {
                return Err(Error::ZeroWeight(format!("{:?}", m.grades)));
            }
            sum += r.sign;
            let entry = by_dims.entry(m.dimension_vector(e)).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += r.sign;
        }
        series.push(sum);
    }
    Ok(DtTable {
        base: e.patch().base_face(),
        series,
        entries: by_dims
            .into_iter()
            .map(|(dims, (fixed_points, value))| DtEntry {
                dims,
                fixed_points,
                value,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::fterm::Model;

    #[test]
    fn lattice_ranks() {
        let expect = [
            (examples::c3(), 3, 0, 2),
            (examples::conifold(), 4, 1, 2),
            (examples::cube(), 6, 5, 0),
        ];
        for (t, p, g, w) in expect {
            assert_eq!(potential_torus_lattice(&t).unwrap().rank(), p);
            assert_eq!(gauge_sublattice(&t).unwrap().rank(), g);
            let tw = tw_lattice(&t).unwrap();
            assert_eq!(tw.rank, w);
            assert_eq!(tw.rank, 2 * t.genus());
            assert!(tw.torsion.is_empty());
        }
    }

    #[test]
    fn c3_series() {
        let m = Model::new(&examples::c3());
        let e = Engine::develop(&m, FaceId(0), 6).unwrap();
        let table = dt_series(&e, 4).unwrap();
        assert_eq!(table.series, vec![1, -1, 3, -6, 13]);
    }

    #[test]
    fn c3_first_tangents() {
        let m = Model::new(&examples::c3());
        let e = Engine::develop(&m, FaceId(0), 5).unwrap();
        let tw = tw_lattice(m.tiling()).unwrap();
        let levels = enumerate_modules_upto(&e, 2).unwrap();
        assert_eq!(tangent(&e, &tw, &levels[0][0]).unwrap().dim, 0);
        let one = tangent(&e, &tw, &levels[1][0]).unwrap();
        assert_eq!(one.dim, 3);
        assert_eq!(one.spectrum.len(), 3);
        for m in &levels[2] {
            assert_eq!(tangent(&e, &tw, m).unwrap().dim, 6);
        }
    }
}
