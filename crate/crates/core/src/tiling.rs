//! Brane tilings as rotation systems.
//!
//! A tiling is a bipartite graph together with a counterclockwise cyclic
//! order of the edges around every vertex. Everything else is derived:
//! faces are traced from the rotation system, the dual quiver has one arrow
//! per edge, and the superpotential has one term per vertex.
//!
//! Darts: edge `e` carries dart `2e` (black to white) and `2e + 1`
//! (white to black). Faces are the orbits of `d -> sigma(alpha(d))`, which
//! walks each face boundary clockwise with the face on the right of every
//! dart. The dual arrow of `e` runs from the face left of its black-to-white
//! dart to the face on its right, so the black endpoint is on the arrow's
//! right and arrows circle black vertices clockwise.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

macro_rules! index_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        #[serde(transparent)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

index_type!(VertexId);
index_type!(EdgeId);
index_type!(FaceId);

/// An arrow of the dual quiver. Arrow `k` is dual to edge `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Arrow(pub u32);

impl Arrow {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 as usize)
    }

    #[inline]
    pub fn of_edge(e: EdgeId) -> Arrow {
        Arrow(e.0 as u32)
    }
}

pub type Word = Vec<Arrow>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub name: String,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub name: String,
    pub black: VertexId,
    pub white: VertexId,
}

/// A dart: an edge with a direction. Even darts leave the black endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Dart(pub usize);

impl Dart {
    #[inline]
    pub fn edge(self) -> EdgeId {
        EdgeId(self.0 / 2)
    }

    #[inline]
    pub fn from_black(self) -> bool {
        self.0.is_multiple_of(2)
    }

    #[inline]
    pub fn reverse(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    #[inline]
    pub fn black_to_white(e: EdgeId) -> Dart {
        Dart(2 * e.0)
    }

    #[inline]
    pub fn white_to_black(e: EdgeId) -> Dart {
        Dart(2 * e.0 + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub id: FaceId,
    /// Clockwise boundary walk; the face lies to the right of every dart.
    pub boundary: Vec<Dart>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }
}

/// A validated tiling with its faces traced.
#[derive(Debug, Clone)]
pub struct BraneTiling {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    rotation: Vec<Vec<EdgeId>>,
    rotation_pos: Vec<usize>,
    faces: Vec<Face>,
    dart_face: Vec<(FaceId, usize)>,
}

impl BraneTiling {
    /// Builds a tiling from raw parts, checking every structural invariant.
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        rotation: Vec<Vec<EdgeId>>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Empty);
        }
        for e in &edges {
            if vertices[e.black.0].color != Color::Black
                || vertices[e.white.0].color != Color::White
            {
                return Err(Error::NotBipartite {
                    edge: e.name.clone(),
                });
            }
        }
        let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); vertices.len()];
        for (k, e) in edges.iter().enumerate() {
            incident[e.black.0].push(EdgeId(k));
            incident[e.white.0].push(EdgeId(k));
        }
        for (v, rot) in rotation.iter().enumerate() {
            let mut listed = rot.clone();
            listed.sort();
            let mut expected = incident[v].clone();
            expected.sort();
            if listed != expected {
                return Err(Error::RotationMismatch {
                    vertex: vertices[v].name.clone(),
                });
            }
            if rot.len() < 2 {
                return Err(Error::DegreeTooSmall {
                    vertex: vertices[v].name.clone(),
                    degree: rot.len(),
                });
            }
        }
        // connectivity
        let mut seen = vec![false; vertices.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &e in &incident[v] {
                let edge = &edges[e.0];
                for w in [edge.black.0, edge.white.0] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Disconnected);
        }

        let mut rotation_pos = vec![0; 2 * edges.len()];
        for (v, rot) in rotation.iter().enumerate() {
            let black = vertices[v].color == Color::Black;
            for (k, &e) in rot.iter().enumerate() {
                let d = if black {
                    Dart::black_to_white(e)
                } else {
                    Dart::white_to_black(e)
                };
                rotation_pos[d.0] = k;
            }
        }
        let mut t = BraneTiling {
            vertices,
            edges,
            rotation,
            rotation_pos,
            faces: Vec::new(),
            dart_face: Vec::new(),
        };
        t.faces = trace_faces(&t);
        let mut dart_face = vec![(FaceId(0), 0); 2 * t.edges.len()];
        for f in &t.faces {
            for (k, d) in f.boundary.iter().enumerate() {
                dart_face[d.0] = (f.id, k);
            }
        }
        t.dart_face = dart_face;
        let chi = t.euler_characteristic();
        if chi % 2 != 0 || chi > 2 {
            return Err(Error::OddEuler(chi));
        }
        Ok(t)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn face(&self, f: FaceId) -> &Face {
        &self.faces[f.0]
    }

    /// Counterclockwise rotation at `v`.
    pub fn rotation(&self, v: VertexId) -> &[EdgeId] {
        &self.rotation[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v.0].len()
    }

    pub fn num_darts(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn origin(&self, d: Dart) -> VertexId {
        let e = &self.edges[d.edge().0];
        if d.from_black() {
            e.black
        } else {
            e.white
        }
    }

    pub fn head(&self, d: Dart) -> VertexId {
        self.origin(d.reverse())
    }

    /// Next dart counterclockwise around the origin of `d`.
    pub fn sigma(&self, d: Dart) -> Dart {
        let v = self.origin(d);
        let rot = &self.rotation[v.0];
        let next = rot[(self.rotation_pos[d.0] + 1) % rot.len()];
        if d.from_black() {
            Dart::black_to_white(next)
        } else {
            Dart::white_to_black(next)
        }
    }

    /// Face-tracing permutation: reverse, then turn counterclockwise.
    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma(d.reverse())
    }

    /// Face containing `d` on its boundary, and the position of `d` there.
    pub fn dart_face(&self, d: Dart) -> (FaceId, usize) {
        self.dart_face[d.0]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .map(VertexId)
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.name == name).map(EdgeId)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn genus(&self) -> usize {
        genus(self)
    }

    /// The same tiling with every rotation reversed (mirror image).
    pub fn mirrored(&self) -> BraneTiling {
        let rotation = self
            .rotation
            .iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        BraneTiling::new(self.vertices.clone(), self.edges.clone(), rotation)
            .expect("mirror of a valid tiling is valid")
    }

    /// Serializes back to the line format accepted by [`parse_tiling`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            let c = match v.color {
                Color::Black => "black",
                Color::White => "white",
            };
            s.push_str(&format!("vertex {} {}\n", v.name, c));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "edge {} {} {}\n",
                e.name, self.vertices[e.black.0].name, self.vertices[e.white.0].name
            ));
        }
        for (v, rot) in self.rotation.iter().enumerate() {
            s.push_str(&format!("rotation {}", self.vertices[v].name));
            for e in rot {
                s.push(' ');
                s.push_str(&self.edges[e.0].name);
            }
            s.push('\n');
        }
        s
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the line-oriented tiling format.
///
/// ```text
/// vertex <name> black|white
/// edge <name> <black-vertex> <white-vertex>
/// rotation <vertex> <edge> ...      # counterclockwise
/// ```
pub fn parse_tiling(text: &str) -> Result<BraneTiling> {
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut vindex: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut eindex: HashMap<String, usize> = HashMap::new();
    // rotations are resolved after all edges are known
    let mut rotations: BTreeMap<usize, (usize, Vec<(String, usize)>)> = BTreeMap::new();
    let mut pending_rot: Vec<(usize, String, usize, Vec<(String, usize)>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        // tokens with 1-based columns
        let mut tokens: Vec<(String, usize)> = Vec::new();
        let mut start = None;
        for (k, ch) in content.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push((content[s..k].to_string(), s + 1));
                }
            } else if start.is_none() {
                start = Some(k);
            }
        }
        if let Some(s) = start {
            tokens.push((content[s..].to_string(), s + 1));
        }
        if tokens.is_empty() {
            continue;
        }
        let syntax = |column: usize, message: String| Error::Syntax {
            line,
            column,
            message,
        };
        for (tok, col) in &tokens[1..] {
            if !valid_name(tok) {
                return Err(syntax(*col, format!("invalid name `{tok}`")));
            }
        }
        let (kw, kwcol) = (&tokens[0].0, tokens[0].1);
        match kw.as_str() {
            "vertex" => {
                if tokens.len() != 3 {
                    return Err(syntax(kwcol, "expected `vertex <name> black|white`".into()));
                }
                let color = match tokens[2].0.as_str() {
                    "black" => Color::Black,
                    "white" => Color::White,
                    other => return Err(syntax(tokens[2].1, format!("unknown color `{other}`"))),
                };
                let name = tokens[1].0.clone();
                if vindex.contains_key(&name) {
                    return Err(Error::Duplicate {
                        line,
                        kind: "vertex",
                        name,
                    });
                }
                vindex.insert(name.clone(), vertices.len());
                vertices.push(Vertex { name, color });
            }
            "edge" => {
                if tokens.len() != 4 {
                    return Err(syntax(
                        kwcol,
                        "expected `edge <name> <black> <white>`".into(),
                    ));
                }
                let name = tokens[1].0.clone();
                if eindex.contains_key(&name) {
                    return Err(Error::Duplicate {
                        line,
                        kind: "edge",
                        name,
                    });
                }
                let lookup = |t: &(String, usize)| {
                    vindex.get(&t.0).copied().ok_or_else(|| Error::UnknownName {
                        line,
                        kind: "vertex",
                        name: t.0.clone(),
                    })
                };
                let b = lookup(&tokens[2])?;
                let w = lookup(&tokens[3])?;
                if vertices[b].color != Color::Black || vertices[w].color != Color::White {
                    return Err(Error::NotBipartite { edge: name });
                }
                eindex.insert(name.clone(), edges.len());
                edges.push(Edge {
                    name,
                    black: VertexId(b),
                    white: VertexId(w),
                });
            }
            "rotation" => {
                if tokens.len() < 2 {
                    return Err(syntax(
                        kwcol,
                        "expected `rotation <vertex> <edge> ...`".into(),
                    ));
                }
                pending_rot.push((line, tokens[1].0.clone(), tokens[1].1, tokens[2..].to_vec()));
            }
            other => return Err(syntax(kwcol, format!("unknown keyword `{other}`"))),
        }
    }
    for (line, vname, _col, list) in pending_rot {
        let v = *vindex.get(&vname).ok_or_else(|| Error::UnknownName {
            line,
            kind: "vertex",
            name: vname.clone(),
        })?;
        if rotations.contains_key(&v) {
            return Err(Error::Duplicate {
                line,
                kind: "rotation for vertex",
                name: vname,
            });
        }
        rotations.insert(v, (line, list));
    }
    let mut rotation = Vec::with_capacity(vertices.len());
    for (v, vert) in vertices.iter().enumerate() {
        let (line, list) = rotations.remove(&v).ok_or_else(|| Error::MissingRotation {
            vertex: vert.name.clone(),
        })?;
        let mut rot = Vec::with_capacity(list.len());
        for (ename, _) in list {
            let e = *eindex.get(&ename).ok_or_else(|| Error::UnknownName {
                line,
                kind: "edge",
                name: ename.clone(),
            })?;
            rot.push(EdgeId(e));
        }
        rotation.push(rot);
    }
    BraneTiling::new(vertices, edges, rotation)
}

/// Orbits of the face-tracing permutation, each listed as a clockwise walk.
pub fn trace_faces(t: &BraneTiling) -> Vec<Face> {
    let n = t.num_darts();
    let mut seen = vec![false; n];
    let mut faces = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut boundary = Vec::new();
        let mut d = Dart(start);
        while !seen[d.0] {
            seen[d.0] = true;
            boundary.push(d);
            d = t.phi(d);
        }
        faces.push(Face {
            id: FaceId(faces.len()),
            boundary,
        });
    }
    faces
}

/// Genus from the Euler characteristic `V - E + F = 2 - 2g`.
pub fn genus(t: &BraneTiling) -> usize {
    let chi = t.euler_characteristic();
    debug_assert!(chi % 2 == 0 && chi <= 2);
    ((2 - chi) / 2) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArrowData {
    pub tail: FaceId,
    pub head: FaceId,
    pub edge: EdgeId,
    /// Boundary position of this arrow's edge in the tail face.
    pub out_pos: usize,
    /// Boundary position of this arrow's edge in the head face.
    pub in_pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualQuiver {
    pub num_nodes: usize,
    pub arrows: Vec<ArrowData>,
}

impl DualQuiver {
    pub fn tail(&self, a: Arrow) -> FaceId {
        self.arrows[a.index()].tail
    }

    pub fn head(&self, a: Arrow) -> FaceId {
        self.arrows[a.index()].head
    }

    pub fn out_arrows(&self, f: FaceId) -> impl Iterator<Item = Arrow> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.tail == f)
            .map(|(k, _)| Arrow(k as u32))
    }

    pub fn in_arrows(&self, f: FaceId) -> impl Iterator<Item = Arrow> + '_ {
        self.arrows
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.head == f)
            .map(|(k, _)| Arrow(k as u32))
    }

    /// Checks that `w` is a composable sequence of arrows.
    pub fn check_word(&self, w: &[Arrow]) -> Result<()> {
        for pair in w.windows(2) {
            if self.head(pair[0]) != self.tail(pair[1]) {
                return Err(Error::NotComposable(pair[0].index(), pair[1].index()));
            }
        }
        Ok(())
    }
}

pub fn dual_quiver(t: &BraneTiling) -> DualQuiver {
    let arrows = (0..t.edges().len())
        .map(|k| {
            let e = EdgeId(k);
            let (head, in_pos) = t.dart_face(Dart::black_to_white(e));
            let (tail, out_pos) = t.dart_face(Dart::white_to_black(e));
            ArrowData {
                tail,
                head,
                edge: e,
                out_pos,
                in_pos,
            }
        })
        .collect();
    DualQuiver {
        num_nodes: t.faces().len(),
        arrows,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuperpotentialTerm {
    pub vertex: VertexId,
    pub sign: i8,
    /// Directed cycle of arrows around the vertex.
    pub cycle: Vec<Arrow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Superpotential {
    pub terms: Vec<SuperpotentialTerm>,
}

/// Directed arrow cycle around `v`: clockwise (reversed rotation) at black
/// vertices, counterclockwise at white ones.
pub fn vertex_cycle(t: &BraneTiling, v: VertexId) -> Vec<Arrow> {
    let rot = t.rotation(v);
    match t.vertex(v).color {
        Color::Black => rot.iter().rev().map(|&e| Arrow::of_edge(e)).collect(),
        Color::White => rot.iter().map(|&e| Arrow::of_edge(e)).collect(),
    }
}

pub fn superpotential(t: &BraneTiling) -> Superpotential {
    let terms = (0..t.vertices().len())
        .map(|k| {
            let v = VertexId(k);
            SuperpotentialTerm {
                vertex: v,
                sign: if t.vertex(v).color == Color::Black {
                    1
                } else {
                    -1
                },
                cycle: vertex_cycle(t, v),
            }
        })
        .collect();
    Superpotential { terms }
}

/// Rotates `cycle` so that `a` comes first and drops it.
fn broken_loop(cycle: &[Arrow], a: Arrow) -> Vec<Arrow> {
    let k = cycle
        .iter()
        .position(|&x| x == a)
        .expect("arrow lies on its vertex cycles");
    (1..cycle.len())
        .map(|j| cycle[(k + j) % cycle.len()])
        .collect()
}

/// The two broken loops of the arrow dual to `e`, black first. Both run
/// from the head of the arrow back to its tail.
pub fn fterm_pair(t: &BraneTiling, e: EdgeId) -> Result<(Word, Word)> {
    if e.0 >= t.edges().len() {
        return Err(Error::UnknownArrow(e.0.to_string()));
    }
    let edge = t.edge(e);
    let a = Arrow::of_edge(e);
    let black = broken_loop(&vertex_cycle(t, edge.black), a);
    let white = broken_loop(&vertex_cycle(t, edge.white), a);
    Ok((black, white))
}

/// Parses whitespace-separated arrow (edge) names.
pub fn parse_word(t: &BraneTiling, text: &str) -> Result<Word> {
    text.split_whitespace()
        .map(|name| {
            t.edge_by_name(name)
                .map(Arrow::of_edge)
                .ok_or_else(|| Error::UnknownArrow(name.to_string()))
        })
        .collect()
}

pub fn format_word(t: &BraneTiling, w: &[Arrow]) -> String {
    w.iter()
        .map(|a| t.edge(a.edge()).name.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}
