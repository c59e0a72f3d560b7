//! One function per subcommand, each building a [`Report`].

use std::collections::BTreeMap;

use branetile::consistency::{check_consistency, check_mr2, ConsistencyStatus};
use branetile::crystal::{
    bungalow_loops, dimer_of_module, enumerate_modules, module_of_dimer, CrystalModule,
};
use branetile::cy3::{cy3_scan, Cy3Status};
use branetile::dt::{dt_series, tw_lattice};
use branetile::fterm::{Engine, Model};
use branetile::matchings::{
    canonical_dimer, enumerate_matchings, homogeneous_grading, nondegeneracy, TieBreak,
};
use branetile::tiling::{dual_quiver, format_word, superpotential};
use branetile::{Arrow, BraneTiling, EdgeId, Error, FaceId};
use serde_json::{json, Value};

use crate::{Failure, Report};

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn edge_name(t: &BraneTiling, e: EdgeId) -> &str {
    &t.edge(e).name
}

fn face_name(f: FaceId) -> String {
    format!("f{}", f.0)
}

fn words(t: &BraneTiling, w: &[Arrow]) -> Value {
    Value::from(w.iter().map(|a| edge_name(t, a.edge())).collect::<Vec<_>>())
}

fn model(t: &BraneTiling, cap: usize) -> Model {
    let mut m = Model::new(t);
    m.patch_cap = cap;
    m
}

fn framing_face(t: &BraneTiling, face: usize) -> Result<FaceId, Failure> {
    if face < t.faces().len() {
        Ok(FaceId(face))
    } else {
        Err(Failure::Usage(format!(
            "face {face} does not exist; the tiling has {}",
            plural(t.faces().len(), "face", "faces")
        )))
    }
}

pub fn validate(t: &BraneTiling) -> Report {
    let mut r = Report::new("validate");
    r.verdict = "valid".into();
    let (g, f, e, v) = (
        t.genus(),
        t.faces().len(),
        t.edges().len(),
        t.vertices().len(),
    );
    r.data = json!({ "genus": g, "faces": f, "edges": e, "vertices": v });
    r.line(format!(
        "genus {g}, {}, {}",
        plural(f, "face", "faces"),
        plural(e, "edge", "edges")
    ));
    r
}

pub fn faces(t: &BraneTiling) -> Report {
    let mut r = Report::new("faces");
    let mut list = Vec::new();
    for f in t.faces() {
        let names: Vec<&str> = f.boundary.iter().map(|d| edge_name(t, d.edge())).collect();
        r.line(format!("{}: {}", face_name(f.id), names.join(" ")));
        list.push(json!({ "face": f.id.0, "boundary": names }));
    }
    r.data = json!({ "faces": list });
    r
}

pub fn quiver(t: &BraneTiling) -> Report {
    let mut r = Report::new("quiver");
    let q = dual_quiver(t);
    let mut arrows = Vec::new();
    for (k, a) in q.arrows.iter().enumerate() {
        let name = edge_name(t, EdgeId(k));
        r.line(format!(
            "{name}: {} -> {}",
            face_name(a.tail),
            face_name(a.head)
        ));
        arrows.push(json!({ "arrow": name, "tail": a.tail.0, "head": a.head.0 }));
    }
    let mut terms = Vec::new();
    for term in superpotential(t).terms {
        let v = &t.vertex(term.vertex).name;
        let sign = if term.sign > 0 { "+" } else { "-" };
        r.line(format!("{sign} {} ({v})", format_word(t, &term.cycle)));
        terms.push(json!({ "vertex": v, "sign": term.sign, "cycle": words(t, &term.cycle) }));
    }
    r.data = json!({ "nodes": q.num_nodes, "arrows": arrows, "superpotential": terms });
    r
}

pub fn matchings(t: &BraneTiling) -> Report {
    let mut r = Report::new("matchings");
    let ms = enumerate_matchings(t);
    let bad = nondegeneracy(t, &ms);
    let list: Vec<Vec<&str>> = ms
        .iter()
        .map(|m| m.0.iter().map(|&e| edge_name(t, e)).collect())
        .collect();
    let uncovered: Vec<&str> = bad.iter().map(|&e| edge_name(t, e)).collect();
    r.line(plural(ms.len(), "perfect matching", "perfect matchings"));
    for m in &list {
        r.line(format!("  {}", m.join(" ")));
    }
    if bad.is_empty() {
        r.verdict = "nondegenerate".into();
    } else {
        r.negative("degenerate");
        r.line(format!("in no matching: {}", uncovered.join(" ")));
    }
    r.data = json!({ "count": ms.len(), "matchings": list, "uncovered": uncovered });
    r
}

pub fn grade(t: &BraneTiling) -> Report {
    let mut r = Report::new("grade");
    match homogeneous_grading(t) {
        Ok(g) => {
            r.verdict = "graded".into();
            let weights: BTreeMap<&str, u64> = (0..t.edges().len())
                .map(|k| (edge_name(t, EdgeId(k)), g.weights[k]))
                .collect();
            r.line(format!("vertex weight {}", g.c));
            for k in 0..t.edges().len() {
                r.line(format!("{}: {}", edge_name(t, EdgeId(k)), g.weights[k]));
            }
            let family: Vec<Vec<&str>> = g
                .family
                .iter()
                .map(|m| m.0.iter().map(|&e| edge_name(t, e)).collect())
                .collect();
            r.data = json!({ "c": g.c, "weights": weights, "family": family });
        }
        Err(Error::NoGrading { uncovered }) => {
            r.negative("no-grading");
            r.line(format!("in no matching: {}", uncovered.join(" ")));
            r.data = json!({ "uncovered": uncovered });
        }
        Err(e) => r.line(e.to_string()),
    }
    r
}

fn budget(r: &mut Report, bound: u64, radius: usize) {
    r.param("weight_bound", bound);
    r.param("radius", radius);
}

pub fn consistency(
    t: &BraneTiling,
    bound: u64,
    radius: usize,
    cap: usize,
) -> Result<Report, Failure> {
    let mut r = Report::new("consistency");
    budget(&mut r, bound, radius);
    let m = model(t, cap);
    let v = check_consistency(&m, bound, radius)?;
    let mut data = json!({
        "n_max": v.n_max,
        "words": v.words,
        "classes": v.classes,
        "pairs": v.pairs,
        "skipped": v.skipped,
        "graded": !v.bounded,
    });
    match &v.status {
        ConsistencyStatus::ConsistentUpTo => {
            r.verdict = "consistent-up-to".into();
            r.line(format!("no counterexample up to weight {bound}"));
        }
        ConsistencyStatus::Counterexample(cx) => {
            r.negative("counterexample");
            r.line(format!(
                "from {}: [{}] and [{}] differ, but agree after {}",
                face_name(cx.base),
                format_word(t, &cx.u),
                format_word(t, &cx.v),
                plural(cx.n as usize, "simple loop", "simple loops")
            ));
            data["counterexample"] =
                json!({ "base": cx.base.0, "u": words(t, &cx.u), "v": words(t, &cx.v), "n": cx.n });
        }
    }
    r.line(format!(
        "{} words, {} classes, {} pairs tested, {} skipped",
        v.words, v.classes, v.pairs, v.skipped
    ));
    if v.bounded {
        r.line("no grading: closures bounded by word length");
    }
    r.data = data;
    Ok(r)
}

pub fn mr2(t: &BraneTiling, bound: u64, radius: usize, cap: usize) -> Result<Report, Failure> {
    let mut r = Report::new("mr2");
    budget(&mut r, bound, radius);
    let m = model(t, cap);
    let v = check_mr2(&m, bound, radius)?;
    let violations: Vec<Value> = v
        .violations
        .iter()
        .map(|x| json!({ "base": x.base.0, "tile": x.tile.0, "dual": x.dual }))
        .collect();
    if v.holds() {
        r.verdict = "holds".into();
    } else {
        r.negative("violated");
    }
    r.line(format!(
        "{} checked, {}",
        v.checked,
        plural(v.violations.len(), "violation", "violations")
    ));
    r.data = json!({ "checked": v.checked, "violations": violations });
    Ok(r)
}

pub fn cy3(t: &BraneTiling, bound: u64, radius: usize, cap: usize) -> Result<Report, Failure> {
    let mut r = Report::new("cy3");
    budget(&mut r, bound, radius);
    let m = model(t, cap);
    let v = cy3_scan(&m, bound, radius)?;
    let mut data = json!({
        "genus": v.genus,
        "pieces": v.pieces,
        "loops": v.loops,
        "disagreements": v.disagreements,
        "skipped": v.skipped,
    });
    match &v.status {
        Cy3Status::Cy3Evidence => {
            r.verdict = "cy3-evidence".into();
            r.line(format!("no loop-shaped piece up to weight {bound}"));
        }
        Cy3Status::Inconclusive => {
            r.verdict = "inconclusive".into();
            r.line(format!(
                "genus {} but no loop-shaped piece up to weight {bound}",
                v.genus
            ));
        }
        Cy3Status::NotCy3 { witness } => {
            r.negative("not-cy3");
            r.line(format!(
                "loop-shaped piece at [{}] from {}: dims {:?}, euler characteristic {}",
                format_word(t, &witness.word),
                face_name(witness.base),
                witness.dims,
                witness.euler
            ));
            data["witness"] = json!({
                "base": witness.base.0,
                "word": words(t, &witness.word),
                "dims": witness.dims,
                "exact": witness.exact,
                "euler": witness.euler,
            });
        }
    }
    r.line(format!(
        "{} pieces, {} loop-shaped, {} disagreements",
        v.pieces, v.loops, v.disagreements
    ));
    if v.disagreements > 0 && r.code == 0 {
        r.negative("disagreement");
    }
    r.data = data;
    Ok(r)
}

fn describe(e: &Engine, md: &CrystalModule) -> Result<(Value, String), Error> {
    let t = e.model().tiling();
    let mut grades = Vec::new();
    let mut parts = Vec::new();
    for g in &md.grades {
        let w = e.minimal_path(g.end, 0)?;
        let face = e.patch().face(g.end);
        grades.push(json!({ "face": face.0, "path": words(t, &w), "loops": g.n }));
        let mut s = if w.is_empty() {
            "e".to_string()
        } else {
            format_word(t, &w).replace(' ', ".")
        };
        if g.n > 0 {
            s += &format!("+{}w", g.n);
        }
        parts.push(s);
    }
    let dims = md.dimension_vector(e);
    Ok((
        json!({ "dimension_vector": dims, "grades": grades }),
        format!("{dims:?} {{{}}}", parts.join(", ")),
    ))
}

pub fn modules(
    t: &BraneTiling,
    dim: usize,
    face: usize,
    radius: usize,
    cap: usize,
) -> Result<Report, Failure> {
    let mut r = Report::new("modules");
    r.param("dim", dim);
    r.param("face", face);
    r.param("radius", radius);
    let f = framing_face(t, face)?;
    let m = model(t, cap);
    let e = Engine::develop(&m, f, radius)?;
    let list = enumerate_modules(&e, dim)?;
    r.line(plural(list.len(), "module", "modules"));
    let mut out = Vec::new();
    for md in &list {
        let (v, s) = describe(&e, md)?;
        r.line(format!("  {s}"));
        out.push(v);
    }
    r.data = json!({ "count": list.len(), "modules": out });
    Ok(r)
}

pub fn dimers(
    t: &BraneTiling,
    dim: usize,
    face: usize,
    radius: usize,
    cap: usize,
) -> Result<Report, Failure> {
    let mut r = Report::new("dimers");
    r.param("dim", dim);
    r.param("face", face);
    r.param("radius", radius);
    let f = framing_face(t, face)?;
    let m = model(t, cap);
    let e = Engine::develop(&m, f, radius)?;
    let cd = canonical_dimer(&e, TieBreak::Ascending)?;
    let list = enumerate_modules(&e, dim)?;
    let mut out = Vec::new();
    let mut failures = 0;
    for md in &list {
        let d = dimer_of_module(&e, md, &cd)?;
        let back = module_of_dimer(&e, &d, &cd)?;
        let ok = &back == md;
        failures += usize::from(!ok);
        let flipped = d.members.symmetric_difference(&cd.window.members).count();
        let loops: Vec<usize> = bungalow_loops(&e, md)?.iter().map(|l| l.len()).collect();
        let (v, s) = describe(&e, md)?;
        r.line(format!(
            "  {s}: {flipped} edges flipped, loop lengths {loops:?}"
        ));
        out.push(json!({ "module": v, "flipped_edges": flipped, "loop_lengths": loops, "round_trip": ok }));
    }
    r.lines.insert(
        0,
        format!(
            "{} in a window of {} tiles",
            plural(list.len(), "dimer", "dimers"),
            cd.window.region.len()
        ),
    );
    if failures == 0 {
        r.verdict = "round-trip".into();
    } else {
        r.negative("round-trip-failed");
    }
    r.data = json!({ "count": list.len(), "window_tiles": cd.window.region.len(), "dimers": out });
    Ok(r)
}

pub fn tw(t: &BraneTiling) -> Result<Report, Failure> {
    let mut r = Report::new("tw");
    let tw = tw_lattice(t)?;
    let g = t.genus();
    if tw.rank == 2 * g {
        r.verdict = "rank-2g".into();
    } else {
        r.negative("rank-mismatch");
    }
    let names: Vec<&str> = (0..t.edges().len())
        .map(|k| edge_name(t, EdgeId(k)))
        .collect();
    r.line(format!("columns: {}", names.join(" ")));
    for (label, rows) in [
        ("potential", &tw.potential.basis),
        ("loop-trivial", &tw.loop_trivial.basis),
        ("gauge", &tw.gauge.basis),
        ("quotient", &tw.basis),
    ] {
        r.line(format!("{label}: rank {}", rows.len()));
        for row in rows {
            r.line(format!("  {row:?}"));
        }
    }
    r.line(format!("torus rank {} (genus {g})", tw.rank));
    if !tw.torsion.is_empty() {
        r.line(format!("torsion {:?}", tw.torsion));
    }
    r.data = json!({
        "columns": names,
        "genus": g,
        "rank": tw.rank,
        "potential": tw.potential.basis,
        "loop_trivial": tw.loop_trivial.basis,
        "gauge": tw.gauge.basis,
        "quotient": tw.basis,
        "torsion": tw.torsion,
    });
    Ok(r)
}

pub fn dt(
    t: &BraneTiling,
    max_dim: usize,
    face: usize,
    radius: usize,
    cap: usize,
) -> Result<Report, Failure> {
    let mut r = Report::new("dt");
    r.param("max_dim", max_dim);
    r.param("face", face);
    r.param("radius", radius);
    let f = framing_face(t, face)?;
    let m = model(t, cap);
    let e = Engine::develop(&m, f, radius)?;
    match dt_series(&e, max_dim) {
        Ok(table) => {
            r.line(format!("series: {:?}", table.series));
            if t.faces().len() > 1 {
                for x in &table.entries {
                    r.line(format!(
                        "  {:?}: {} ({})",
                        x.dims,
                        x.value,
                        plural(x.fixed_points, "fixed point", "fixed points")
                    ));
                }
            }
            let entries: Vec<Value> = table
                .entries
                .iter()
                .map(
                    |x| json!({ "dims": x.dims, "value": x.value, "fixed_points": x.fixed_points }),
                )
                .collect();
            r.data = json!({ "series": table.series, "entries": entries });
        }
        Err(Error::ZeroWeight(at)) => {
            r.negative("trivial-weight");
            r.line(format!(
                "a tangent space has a trivial torus weight at {at}"
            ));
            r.data = json!({ "fixed_point": at });
        }
        Err(err) => return Err(err.into()),
    }
    Ok(r)
}
