//! Oracles shared by the integration tests. They work from the rotation
//! system by brute force or plain linear algebra; the fixed-point search
//! asks the engine only to name the grade of a path.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use branetile::tiling::{dual_quiver, fterm_pair, DualQuiver};
use branetile::{parse_tiling, Arrow, BraneTiling, EdgeId, FaceId};

pub fn fixture(name: &str) -> BraneTiling {
    let text = match name {
        "conifold_twisted" => include_str!("../data/conifold_twisted.tiling"),
        "c3_pendant" => include_str!("../data/c3_pendant.tiling"),
        _ => panic!("no fixture {name}"),
    };
    parse_tiling(text).unwrap()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Incremental row echelon form over Q with sparse integer rows.
#[derive(Default)]
pub struct Echelon {
    pivots: BTreeMap<usize, BTreeMap<usize, i128>>,
}

impl Echelon {
    fn reduce(&self, mut row: BTreeMap<usize, i128>) -> BTreeMap<usize, i128> {
        let mut floor = 0;
        loop {
            let Some((&col, &val)) = row.range(floor..).next() else {
                return row;
            };
            match self.pivots.get(&col) {
                None => floor = col + 1,
                Some(p) => {
                    let pv = p[&col];
                    let mut next = BTreeMap::new();
                    for (&k, &x) in &row {
                        next.insert(k, x * pv);
                    }
                    for (&k, &y) in p {
                        *next.entry(k).or_insert(0) -= val * y;
                    }
                    next.retain(|_, x| *x != 0);
                    let g = next.values().fold(0, |g, &x| gcd(g, x));
                    if g > 1 {
                        next.values_mut().for_each(|x| *x /= g);
                    }
                    row = next;
                }
            }
        }
    }

    /// Adds a row; true if it raised the rank.
    pub fn insert(&mut self, row: BTreeMap<usize, i128>) -> bool {
        let r = self.reduce(row);
        match r.keys().next() {
            Some(&c) => {
                self.pivots.insert(c, r);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, row: BTreeMap<usize, i128>) -> bool {
        self.reduce(row).is_empty()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn dense_rank(rows: &[Vec<i64>]) -> usize {
    let mut ech = Echelon::default();
    for r in rows {
        let row = r
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(k, &x)| (k, x as i128))
            .collect();
        ech.insert(row);
    }
    ech.rank()
}

/// Membership in the two-sided ideal generated by the F-term differences,
/// decided separately in each piece of fixed endpoints and weight.
pub struct IdealOracle {
    quiver: DualQuiver,
    weights: Vec<u64>,
    pairs: Vec<(Vec<Arrow>, Vec<Arrow>)>,
    pieces: HashMap<(FaceId, FaceId, u64), (HashMap<Vec<Arrow>, usize>, Echelon)>,
}

impl IdealOracle {
    /// `weights` must make every relation homogeneous.
    pub fn new(t: &BraneTiling, weights: Vec<u64>) -> IdealOracle {
        let pairs: Vec<_> = (0..t.edges().len())
            .map(|e| fterm_pair(t, EdgeId(e)).unwrap())
            .collect();
        for (b, w) in &pairs {
            let wt = |p: &[Arrow]| p.iter().map(|a| weights[a.index()]).sum::<u64>();
            assert_eq!(wt(b), wt(w), "relation weights differ");
        }
        IdealOracle {
            quiver: dual_quiver(t),
            weights,
            pairs,
            pieces: HashMap::new(),
        }
    }

    pub fn weight(&self, w: &[Arrow]) -> u64 {
        w.iter().map(|a| self.weights[a.index()]).sum()
    }

    fn words(&self, from: FaceId, to: FaceId, weight: u64) -> Vec<Vec<Arrow>> {
        fn go(
            q: &DualQuiver,
            wts: &[u64],
            at: FaceId,
            to: FaceId,
            left: u64,
            cur: &mut Vec<Arrow>,
            out: &mut Vec<Vec<Arrow>>,
        ) {
            if left == 0 {
                if at == to {
                    out.push(cur.clone());
                }
                return;
            }
            for a in q.out_arrows(at) {
                let w = wts[a.index()];
                assert!(w > 0);
                if w <= left {
                    cur.push(a);
                    go(q, wts, q.head(a), to, left - w, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(
            &self.quiver,
            &self.weights,
            from,
            to,
            weight,
            &mut Vec::new(),
            &mut out,
        );
        out
    }

    fn piece(
        &mut self,
        from: FaceId,
        to: FaceId,
        weight: u64,
    ) -> &(HashMap<Vec<Arrow>, usize>, Echelon) {
        if !self.pieces.contains_key(&(from, to, weight)) {
            let words = self.words(from, to, weight);
            let index: HashMap<Vec<Arrow>, usize> = words
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, w)| (w, i))
                .collect();
            let mut ech = Echelon::default();
            // generators p (B - W) q
            for m in &words {
                for i in 0..m.len() {
                    for (b, w) in &self.pairs {
                        if m[i..].starts_with(b) {
                            let mut m2 = m[..i].to_vec();
                            m2.extend_from_slice(w);
                            m2.extend_from_slice(&m[i + b.len()..]);
                            let j = index[&m2];
                            if j != index[m] {
                                ech.insert(BTreeMap::from([(index[m], 1), (j, -1)]));
                            }
                        }
                    }
                }
            }
            self.pieces.insert((from, to, weight), (index, ech));
        }
        &self.pieces[&(from, to, weight)]
    }

    /// Whether `u - v` lies in the ideal. Both must be paths of the quiver.
    pub fn equivalent(&mut self, u: &[Arrow], v: &[Arrow]) -> bool {
        let ends = |w: &[Arrow], q: &DualQuiver| (q.tail(w[0]), q.head(*w.last().unwrap()));
        if u.is_empty() || v.is_empty() {
            return u == v;
        }
        let (eu, ev) = (ends(u, &self.quiver), ends(v, &self.quiver));
        let (wu, wv) = (self.weight(u), self.weight(v));
        if eu != ev || wu != wv {
            return false;
        }
        let (index, ech) = self.piece(eu.0, eu.1, wu);
        let (i, j) = (index[u], index[v]);
        i == j || ech.contains(BTreeMap::from([(i, 1), (j, -1)]))
    }
}

/// Perfect matchings by trying every edge subset.
pub fn brute_matchings(t: &BraneTiling) -> BTreeSet<Vec<EdgeId>> {
    let n = t.edges().len();
    assert!(n <= 20);
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let mut seen = vec![0; t.vertices().len()];
        for e in 0..n {
            if mask >> e & 1 == 1 {
                let edge = t.edge(EdgeId(e));
                seen[edge.black.0] += 1;
                seen[edge.white.0] += 1;
            }
        }
        if seen.iter().all(|&c| c == 1) {
            out.insert((0..n).filter(|e| mask >> e & 1 == 1).map(EdgeId).collect());
        }
    }
    out
}

/// Plane partitions of `n`, counted by filling rows of weakly decreasing
/// entries, each row dominated by the one above.
pub fn plane_partitions(n: usize) -> usize {
    fn rows(left: usize, above: &[usize]) -> usize {
        if left == 0 {
            return 1;
        }
        // choose the next row, nonempty and bounded by `above`
        let mut total = 0;
        let mut row = Vec::new();
        fill(left, above, &mut row, &mut total);
        total
    }
    fn fill(left: usize, above: &[usize], row: &mut Vec<usize>, total: &mut usize) {
        let used: usize = row.iter().sum();
        if !row.is_empty() {
            *total += rows(left - used, row);
        }
        let k = row.len();
        if k >= above.len() {
            return;
        }
        let cap = above[k]
            .min(row.last().copied().unwrap_or(usize::MAX))
            .min(left - used);
        for v in 1..=cap {
            row.push(v);
            fill(left, above, row, total);
            row.pop();
        }
    }
    rows(n, &vec![usize::MAX; n])
}

/// Order ideals of size `n` in N^3 (the monomials outside a monomial
/// ideal of colength `n`).
pub fn monomial_staircases(n: usize) -> BTreeSet<BTreeSet<[u32; 3]>> {
    let mut level: BTreeSet<BTreeSet<[u32; 3]>> = BTreeSet::from([BTreeSet::new()]);
    for _ in 0..n {
        let mut next = BTreeSet::new();
        for s in &level {
            let mut cands = vec![[0, 0, 0]];
            for m in s {
                for k in 0..3 {
                    let mut c = *m;
                    c[k] += 1;
                    cands.push(c);
                }
            }
            for c in cands {
                if s.contains(&c) {
                    continue;
                }
                let closed = (0..3).all(|k| {
                    c[k] == 0 || {
                        let mut d = c;
                        d[k] -= 1;
                        s.contains(&d)
                    }
                });
                if closed {
                    let mut t = s.clone();
                    t.insert(c);
                    next.insert(t);
                }
            }
        }
        level = next;
    }
    level
}

/// `dim Hom(I, C[x,y,z]/I)` for the monomial ideal `I` whose standard
/// monomials are `staircase`, computed on the truncation of `I` to total
/// degree at most `top`.
pub fn hom_ideal_quotient(staircase: &BTreeSet<[u32; 3]>, top: u32) -> usize {
    let basis: Vec<[u32; 3]> = staircase.iter().copied().collect();
    let pos: HashMap<[u32; 3], usize> = basis.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let n = basis.len();
    let mut ideal = Vec::new();
    for a in 0..=top {
        for b in 0..=top - a {
            for c in 0..=top - a - b {
                if !staircase.contains(&[a, b, c]) {
                    ideal.push([a, b, c]);
                }
            }
        }
    }
    let idx: HashMap<[u32; 3], usize> = ideal.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    // unknown (g, j): coefficient of basis[j] in phi(g)
    let var = |g: usize, j: usize| g * n + j;
    let mut ech = Echelon::default();
    for (g, m) in ideal.iter().enumerate() {
        for k in 0..3 {
            let mut up = *m;
            up[k] += 1;
            let Some(&h) = idx.get(&up) else { continue };
            // phi(x_k m) = x_k phi(m)
            for j in 0..n {
                let mut row = BTreeMap::new();
                row.insert(var(h, j), 1i128);
                for (i, b) in basis.iter().enumerate() {
                    let mut bx = *b;
                    bx[k] += 1;
                    if pos.get(&bx) == Some(&j) {
                        *row.entry(var(g, i)).or_insert(0) -= 1;
                    }
                }
                row.retain(|_, x| *x != 0);
                ech.insert(row);
            }
        }
    }
    ideal.len() * n - ech.rank()
}

/// Torus-fixed cyclic representations of dimension `n` found by searching
/// all 0/1 monomial matrices: each basis vector is sent by each arrow to
/// one basis vector or to zero. Kept are those that satisfy the F-terms,
/// are generated by vector 0 at the root face, and are homogeneous for the
/// full grading. Each is returned as the set of grades of its basis.
pub fn brute_fixed_points(
    e: &branetile::fterm::Engine,
    n: usize,
) -> BTreeSet<Vec<branetile::fterm::G1Grade>> {
    use branetile::fterm::G1Grade;
    let model = e.model();
    let t = model.tiling();
    let q = model.quiver();
    let pairs: Vec<_> = (0..t.edges().len())
        .map(|k| fterm_pair(t, EdgeId(k)).unwrap())
        .collect();
    let root_face = e.patch().face(e.root());
    let mut out = BTreeSet::new();
    if n == 0 {
        out.insert(Vec::new());
        return out;
    }
    let nf = t.faces().len();
    // faces of vectors 1..n
    for code in 0..nf.pow(n as u32 - 1) {
        let mut face = vec![root_face];
        let mut c = code;
        for _ in 1..n {
            face.push(FaceId(c % nf));
            c /= nf;
        }
        // slots (vector, arrow) with their candidate targets
        let mut slots = Vec::new();
        for v in 0..n {
            for a in q.out_arrows(face[v]) {
                let targets: Vec<Option<usize>> = std::iter::once(None)
                    .chain((0..n).filter(|&w| face[w] == q.head(a)).map(Some))
                    .collect();
                slots.push((v, a, targets));
            }
        }
        let mut choice = vec![0usize; slots.len()];
        loop {
            let act = |v: usize, a: Arrow| -> Option<usize> {
                let k = slots
                    .iter()
                    .position(|(sv, sa, _)| *sv == v && *sa == a)
                    .unwrap();
                slots[k].2[choice[k]]
            };
            let follow = |mut v: usize, w: &[Arrow]| -> Option<usize> {
                for &a in w {
                    v = act(v, a)?;
                }
                Some(v)
            };
            let relations = (0..n).all(|v| {
                pairs
                    .iter()
                    .all(|(b, w)| q.tail(b[0]) != face[v] || follow(v, b) == follow(v, w))
            });
            if relations {
                // spanning paths from vector 0
                let mut path: Vec<Option<Vec<Arrow>>> = vec![None; n];
                path[0] = Some(Vec::new());
                let mut queue = std::collections::VecDeque::from([0]);
                while let Some(v) = queue.pop_front() {
                    for a in q.out_arrows(face[v]) {
                        if let Some(w) = act(v, a) {
                            if path[w].is_none() {
                                let mut p = path[v].clone().unwrap();
                                p.push(a);
                                path[w] = Some(p);
                                queue.push_back(w);
                            }
                        }
                    }
                }
                if path.iter().all(Option::is_some) {
                    let grade = |w: &[Arrow]| -> Option<G1Grade> {
                        if w.is_empty() {
                            Some(G1Grade {
                                start: e.root(),
                                end: e.root(),
                                n: 0,
                            })
                        } else {
                            e.canonical_form(w).ok()
                        }
                    };
                    let grades: Vec<Option<G1Grade>> =
                        path.iter().map(|p| grade(p.as_ref().unwrap())).collect();
                    let homogeneous = grades.iter().all(Option::is_some)
                        && (0..n).all(|v| {
                            q.out_arrows(face[v]).all(|a| match act(v, a) {
                                None => true,
                                Some(w) => {
                                    let mut p = path[v].clone().unwrap();
                                    p.push(a);
                                    grade(&p) == grades[w]
                                }
                            })
                        });
                    let distinct = grades.iter().collect::<BTreeSet<_>>().len() == n;
                    if homogeneous && distinct {
                        let mut gs: Vec<G1Grade> = grades.into_iter().map(Option::unwrap).collect();
                        gs.sort();
                        out.insert(gs);
                    }
                }
            }
            // odometer
            match (0..slots.len()).find(|&k| choice[k] + 1 < slots[k].2.len()) {
                Some(k) => {
                    choice[k] += 1;
                    choice[..k].iter_mut().for_each(|c| *c = 0);
                }
                None => break,
            }
        }
    }
    out
}

/// `dim Hom(I, M)` for `M = e_0 A / I`, with `I` spanned by the grades
/// outside `M` of weight at most `top`.
pub fn hom_graded(
    e: &branetile::fterm::Engine,
    md: &branetile::crystal::CrystalModule,
    top: u64,
) -> usize {
    let c = e.model().c().unwrap();
    let p = e.patch();
    let q = e.model().quiver();
    assert!(top < e.trusted_bound());
    let mut ideal = Vec::new();
    for t in p.tiles() {
        let mut n = 0;
        while e.min_weight(t) + c * n <= top {
            let g = branetile::fterm::G1Grade {
                start: e.root(),
                end: t,
                n,
            };
            if !md.contains(&g) {
                ideal.push(g);
            }
            n += 1;
        }
    }
    let idx: HashMap<branetile::fterm::G1Grade, usize> =
        ideal.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let basis = &md.grades;
    let pos: HashMap<branetile::fterm::G1Grade, usize> =
        basis.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    // unknowns: phi(g) on basis vectors over the same face
    let mut var = HashMap::new();
    for (gi, g) in ideal.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            if p.face(b.end) == p.face(g.end) {
                let k = var.len();
                var.insert((gi, j), k);
            }
        }
    }
    let mut ech = Echelon::default();
    for (gi, g) in ideal.iter().enumerate() {
        for a in q.out_arrows(p.face(g.end)) {
            let Some(h) = branetile::crystal::successor(e, *g, a).unwrap() else {
                continue;
            };
            let Some(&hi) = idx.get(&h) else { continue };
            // phi(g a) = phi(g) a
            for j in 0..basis.len() {
                let Some(&v) = var.get(&(hi, j)) else {
                    continue;
                };
                let mut row = BTreeMap::from([(v, 1i128)]);
                for (i, bi) in basis.iter().enumerate() {
                    let image = branetile::crystal::successor(e, *bi, a)
                        .unwrap()
                        .and_then(|s| pos.get(&s).copied());
                    if image == Some(j) {
                        *row.entry(var[&(gi, i)]).or_insert(0) -= 1;
                    }
                }
                row.retain(|_, x| *x != 0);
                ech.insert(row);
            }
        }
    }
    var.len() - ech.rank()
}

pub fn top_weight(e: &branetile::fterm::Engine, md: &branetile::crystal::CrystalModule) -> u64 {
    let c = e.model().c().unwrap();
    md.grades
        .iter()
        .map(|g| e.min_weight(g.end) + c * g.n)
        .max()
        .unwrap_or(0)
        + 2 * c
}

/// Signed counts by dimension vector from the brute-force fixed points and
/// the graded Hom oracle.
pub fn brute_dt(e: &branetile::fterm::Engine, n_max: usize) -> BTreeMap<Vec<usize>, (usize, i64)> {
    let c = e.model().c().unwrap();
    let mut out: BTreeMap<Vec<usize>, (usize, i64)> = BTreeMap::new();
    for n in 0..=n_max {
        for grades in brute_fixed_points(e, n) {
            let md = branetile::crystal::CrystalModule { grades };
            let dims = md.dimension_vector(e);
            let dim = if n == 0 {
                0
            } else {
                let top = top_weight(e, &md);
                let d = hom_graded(e, &md, top);
                assert_eq!(d, hom_graded(e, &md, top + c), "truncation not stable");
                d
            };
            let entry = out.entry(dims).or_default();
            entry.0 += 1;
            entry.1 += if dim % 2 == 0 { 1 } else { -1 };
        }
    }
    out
}
