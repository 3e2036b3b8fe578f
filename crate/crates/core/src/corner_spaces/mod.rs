//! Combinatorial manifolds with corners and quasihomogeneous blowups.
//!
//! A [`Space`] is a product of one-boundary-face factors followed by a
//! history of blowups.  Every boundary hypersurface carries its valuation:
//! the vanishing orders, at a generic point of the face, of the base boundary
//! defining functions and of the interior difference labels.  Incidence,
//! containment and emptiness questions are answered by replaying test curves
//! (see [`curve`]), never by charts.

pub mod bmap;
pub mod curve;
pub mod dot;
pub mod rewrite;

pub use bmap::{BMap, FaceImage};
pub use rewrite::{rewrite_step, BlowupSeq, Rule, SeqStep};

use curve::{bump_closure, generic_point, Curve};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Order of a submanifold defined to every order (e.g. a genuine interior
/// submanifold or a boundary corner).
pub const ANY_ORDER: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("unknown face {0:?}")]
    UnknownFace(String),
    #[error("unknown interior label {0:?}")]
    UnknownLabel(String),
    #[error("{0:?} is not in the registry")]
    NotInRegistry(String),
    #[error("center {center:?} is defined to order {defined} but blown up to order {requested}")]
    OrderDeficit { center: String, defined: u32, requested: u32 },
    #[error("blowup order must be positive")]
    ZeroOrder,
    #[error("center {0:?} is empty")]
    EmptyCenter(String),
    #[error("face name {0:?} already in use")]
    DuplicateFace(String),
    #[error("lift of {name:?} is undefined: {reason}")]
    UndefinedLift { name: String, reason: String },
    #[error("factors must share their interior coordinate groups")]
    MismatchedFactors,
    #[error("map composition across different spaces ({0} vs {1})")]
    DomainMismatch(String, String),
    #[error("face {0:?} is not connected and embedded after the blowup")]
    NotEmbedded(String),
    #[error("{0}")]
    Invalid(String),
}

/// A group of interior coordinates, e.g. `y` with its dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    pub name: String,
    pub dim: usize,
}

/// Pairwise difference label `d_ij` on one coordinate level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label {
    pub name: String,
    pub pair: (usize, usize),
    pub level: usize,
}

/// Interior labels of a product with their relations `d_ij + d_jk = d_ik`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSystem {
    pub points: usize,
    pub levels: Vec<Level>,
    pub labels: Vec<Label>,
    tri: Vec<[usize; 3]>,
}

impl LabelSystem {
    pub fn new(points: usize, levels: Vec<Level>) -> Self {
        let mut labels = Vec::new();
        for (l, lev) in levels.iter().enumerate() {
            for i in 0..points {
                for j in i + 1..points {
                    labels.push(Label { name: Self::label_name(i, j, &lev.name), pair: (i, j), level: l });
                }
            }
        }
        let mut ls = LabelSystem { points, levels, labels, tri: Vec::new() };
        let mut tri = Vec::new();
        for l in 0..ls.levels.len() {
            for i in 0..points {
                for j in i + 1..points {
                    for k in j + 1..points {
                        tri.push([ls.pair_label(i, j, l), ls.pair_label(j, k, l), ls.pair_label(i, k, l)]);
                    }
                }
            }
        }
        ls.tri = tri;
        ls
    }

    pub fn label_name(i: usize, j: usize, level: &str) -> String {
        format!("d{}{}:{}", i + 1, j + 1, level)
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.name == name)
    }

    pub fn pair_label(&self, i: usize, j: usize, level: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.labels.iter().position(|l| l.pair == (i, j) && l.level == level).expect("label exists")
    }

    /// Label triples `(d_ij, d_jk, d_ik)` linked by a relation.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.tri
    }

    /// Human-readable relations.
    pub fn relations(&self) -> Vec<String> {
        self.tri
            .iter()
            .map(|t| format!("{} + {} = {}", self.labels[t[0]].name, self.labels[t[1]].name, self.labels[t[2]].name))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Boundary face of the given factor.
    Base { point: usize },
    /// Front face of the given history step.
    Front { step: usize },
}

/// Vanishing orders at a generic point of a face: of each base boundary
/// defining function (the total exponent row to the base) and of each
/// interior label (the interior order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Valuation {
    pub e: Vec<i64>,
    pub o: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub name: String,
    pub provenance: Provenance,
    pub valuation: Valuation,
}

/// p-submanifold described by the faces and labels that vanish on it, and
/// the order to which it is defined.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PSub {
    pub name: String,
    pub faces: BTreeSet<String>,
    pub interior: BTreeSet<String>,
    pub order: u32,
}

impl PSub {
    pub fn new<S: AsRef<str>, T: AsRef<str>>(name: &str, faces: &[S], interior: &[T], order: u32) -> Self {
        PSub {
            name: name.to_string(),
            faces: faces.iter().map(|s| s.as_ref().to_string()).collect(),
            interior: interior.iter().map(|s| s.as_ref().to_string()).collect(),
            order,
        }
    }

    /// Description of the intersection (not checked for cleanness).
    pub fn meet(&self, other: &PSub, name: &str) -> PSub {
        PSub {
            name: name.to_string(),
            faces: self.faces.union(&other.faces).cloned().collect(),
            interior: self.interior.union(&other.interior).cloned().collect(),
            order: self.order.min(other.order),
        }
    }

    pub fn with_order(mut self, order: u32) -> PSub {
        self.order = order;
        self
    }

    pub fn with_name(mut self, name: &str) -> PSub {
        self.name = name.to_string();
        self
    }
}

impl fmt::Display for PSub {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let faces: Vec<&str> = self.faces.iter().map(|s| s.as_str()).collect();
        let labels: Vec<&str> = self.interior.iter().map(|s| s.as_str()).collect();
        write!(f, "{{{}}}", faces.join(", "))?;
        if !labels.is_empty() {
            write!(f, " ∩ {{{}}}", labels.join(", "))?;
        }
        Ok(())
    }
}

/// One blowup in a space's history, with the center resolved to indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub center: PSub,
    pub faces: Vec<usize>,
    /// Center labels, closed under the relations valid on the center.
    pub labels: Vec<usize>,
    pub order: u32,
    pub ff: usize,
    /// Interior codimension of the center.
    pub codim: usize,
}

/// Factor of a product: its boundary face name and interior coordinate groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorDescriptor {
    pub face: String,
    pub levels: Vec<Level>,
}

#[derive(Debug, Clone)]
pub struct Space {
    pub name: String,
    pub(crate) faces: Vec<Face>,
    pub(crate) labels: Arc<LabelSystem>,
    pub(crate) base_faces: usize,
    pub(crate) history: Vec<Step>,
    pub(crate) registry: Vec<PSub>,
    incidence: OnceLock<Vec<Vec<usize>>>,
}

/// Product of one-boundary-face factors: one bhs per factor, all meeting,
/// with pairwise difference labels on every coordinate level.
pub fn product_space(name: &str, factors: &[FactorDescriptor]) -> Result<Space, SpaceError> {
    let Some(first) = factors.first() else {
        return Err(SpaceError::Invalid("a product needs at least one factor".into()));
    };
    if factors.iter().any(|f| f.levels != first.levels) {
        return Err(SpaceError::MismatchedFactors);
    }
    let mut seen = BTreeSet::new();
    for f in factors {
        if !seen.insert(f.face.clone()) {
            return Err(SpaceError::DuplicateFace(f.face.clone()));
        }
    }
    let n = factors.len();
    let labels = LabelSystem::new(n, first.levels.clone());
    let nl = labels.labels.len();
    let faces = factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut e = vec![0; n];
            e[i] = 1;
            Face { name: f.face.clone(), provenance: Provenance::Base { point: i }, valuation: Valuation { e, o: vec![0; nl] } }
        })
        .collect();
    Ok(Space {
        name: name.to_string(),
        faces,
        labels: Arc::new(labels),
        base_faces: n,
        history: Vec::new(),
        registry: Vec::new(),
        incidence: OnceLock::new(),
    })
}

impl PartialEq for Space {
    fn eq(&self, o: &Space) -> bool {
        self.name == o.name && self.faces == o.faces && self.labels == o.labels && self.history == o.history && self.registry == o.registry
    }
}

impl Space {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_name(&self, i: usize) -> &str {
        &self.faces[i].name
    }

    pub fn face_names(&self) -> Vec<String> {
        self.faces.iter().map(|f| f.name.clone()).collect()
    }

    pub fn face_index(&self, name: &str) -> Option<usize> {
        self.faces.iter().position(|f| f.name == name)
    }

    pub fn base_face_count(&self) -> usize {
        self.base_faces
    }

    pub fn labels(&self) -> &LabelSystem {
        &self.labels
    }

    pub fn history(&self) -> &[Step] {
        &self.history
    }

    pub fn registry(&self) -> &[PSub] {
        &self.registry
    }

    pub fn registered(&self, name: &str) -> Option<&PSub> {
        self.registry.iter().find(|p| p.name == name)
    }

    pub fn renamed(mut self, name: &str) -> Space {
        self.name = name.to_string();
        self
    }

    /// Blowup order that created a face (`None` for base faces).
    pub fn creation_order(&self, face: usize) -> Option<u32> {
        match self.faces[face].provenance {
            Provenance::Base { .. } => None,
            Provenance::Front { step } => Some(self.history[step].order),
        }
    }

    /// Creation order where it matters: boundary centers (no interior
    /// equations) give the same space at every order.
    pub fn effective_order(&self, face: usize) -> Option<u32> {
        match self.faces[face].provenance {
            Provenance::Front { step } if !self.history[step].labels.is_empty() => Some(self.history[step].order),
            _ => None,
        }
    }

    /// Same faces and labels (used to check that maps compose).
    pub fn same_shape(&self, o: &Space) -> bool {
        self.faces.len() == o.faces.len()
            && self.faces.iter().zip(&o.faces).all(|(a, b)| a.name == b.name)
            && self.labels == o.labels
    }

    pub fn resolve(&self, p: &PSub) -> Result<(Vec<usize>, Vec<usize>), SpaceError> {
        let faces = p
            .faces
            .iter()
            .map(|f| self.face_index(f).ok_or_else(|| SpaceError::UnknownFace(f.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let labels = p
            .interior
            .iter()
            .map(|l| self.labels.id(l).ok_or_else(|| SpaceError::UnknownLabel(l.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((faces, labels))
    }

    pub fn is_nonempty(&self, p: &PSub) -> Result<bool, SpaceError> {
        let (f, l) = self.resolve(p)?;
        Ok(generic_point(self, &f, &l).is_some())
    }

    /// `inner ⊆ outer`, decided at a generic point of `inner`.
    pub fn contains(&self, outer: &PSub, inner: &PSub) -> Result<bool, SpaceError> {
        let (fi, li) = self.resolve(inner)?;
        let (fo, lo) = self.resolve(outer)?;
        Ok(match generic_point(self, &fi, &li) {
            None => true,
            Some(end) => end.on(&fo, &lo),
        })
    }

    pub fn same_locus(&self, p: &PSub, q: &PSub) -> Result<bool, SpaceError> {
        Ok(self.contains(p, q)? && self.contains(q, p)?)
    }

    pub fn intersects(&self, p: &PSub, q: &PSub) -> Result<bool, SpaceError> {
        self.is_nonempty(&p.meet(q, "meet"))
    }

    /// Whether all the given faces have a common point.
    pub fn meets(&self, faces: &[usize]) -> bool {
        generic_point(self, faces, &[]).is_some()
    }

    /// Labels implied by `labels` on the stratum of `faces`.
    pub fn label_closure(&self, faces: &[usize], labels: &[usize]) -> Vec<usize> {
        let base = self.stratum_curve(faces);
        match bump_closure(&self.labels, &base, labels) {
            Some(b) => b.iter().enumerate().filter(|(_, x)| **x).map(|(i, _)| i).collect(),
            None => labels.to_vec(),
        }
    }

    fn stratum_curve(&self, faces: &[usize]) -> Curve {
        let mut base = Curve::zero(self.base_faces, self.labels.labels.len());
        for &f in faces {
            let v = &self.faces[f].valuation;
            base.add_valuation(&v.e, &v.o);
        }
        base
    }

    /// Number of independent interior equations cutting out `p` inside its
    /// boundary stratum, weighted by the coordinate dimensions.
    pub fn interior_codim(&self, p: &PSub) -> Result<usize, SpaceError> {
        let (faces, labels) = self.resolve(p)?;
        Ok(self.codim_of(&faces, &labels))
    }

    fn codim_of(&self, faces: &[usize], labels: &[usize]) -> usize {
        let ls = &self.labels;
        let base = self.stratum_curve(faces);
        let mut total = 0;
        for (lvl, level) in ls.levels.iter().enumerate() {
            let ids: Vec<usize> = (0..ls.labels.len()).filter(|&i| ls.labels[i].level == lvl).collect();
            let pos = |id: usize| ids.iter().position(|&x| x == id).unwrap();
            let n = ids.len();
            let mut rel: Vec<Vec<i64>> = Vec::new();
            for t in ls.triangles().iter().filter(|t| ls.labels[t[0]].level == lvl) {
                let v: Vec<_> = t.iter().map(|&l| base.o[l]).collect();
                let m = *v.iter().min().unwrap();
                let mins: Vec<usize> = (0..3).filter(|&k| v[k] == m).collect();
                let mut row = vec![0i64; n];
                if mins.len() == 3 {
                    row[pos(t[0])] = 1;
                    row[pos(t[1])] = 1;
                    row[pos(t[2])] = -1;
                } else if mins.len() == 2 {
                    row[pos(t[mins[0]])] = 1;
                    row[pos(t[mins[1]])] = -1;
                }
                rel.push(row);
            }
            let mut with: Vec<Vec<i64>> = rel.clone();
            for &l in labels.iter().filter(|&&l| ls.labels[l].level == lvl) {
                let mut row = vec![0i64; n];
                row[pos(l)] = 1;
                with.push(row);
            }
            total += (rank(with) - rank(rel)) * level.dim;
        }
        total
    }

    /// Maximal sets of faces with a common point.
    pub fn incidence(&self) -> &[Vec<usize>] {
        self.incidence.get_or_init(|| {
            let all = self.meeting_sets();
            let mut max: Vec<Vec<usize>> = Vec::new();
            for s in &all {
                let dominated = all.iter().any(|t| t.len() > s.len() && s.iter().all(|x| t.contains(x)));
                if !dominated {
                    max.push(s.clone());
                }
            }
            max
        })
    }

    /// Every nonempty set of faces with a common point, in lexicographic order.
    pub fn meeting_sets(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.faces.len()).rev().map(|i| vec![i]).collect();
        while let Some(s) = stack.pop() {
            if !self.meets(&s) {
                continue;
            }
            let last = *s.last().unwrap();
            for j in ((last + 1)..self.faces.len()).rev() {
                let mut t = s.clone();
                t.push(j);
                stack.push(t);
            }
            out.push(s);
        }
        out
    }

    /// Faces met by a registered or ad-hoc submanifold.
    pub fn faces_met_by(&self, p: &PSub) -> Result<Vec<usize>, SpaceError> {
        let mut out = Vec::new();
        for (i, f) in self.faces.iter().enumerate() {
            let mut q = p.clone();
            q.faces.insert(f.name.clone());
            if self.is_nonempty(&q)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    pub fn register(&self, p: PSub) -> Result<Space, SpaceError> {
        self.resolve(&p)?;
        if !self.is_nonempty(&p)? {
            return Err(SpaceError::EmptyCenter(p.name));
        }
        let mut out = self.clone();
        out.registry.retain(|q| q.name != p.name);
        out.registry.push(p);
        out.incidence = OnceLock::new();
        Ok(out)
    }

    /// Blowup of a registered submanifold.
    pub fn blowup_registered(&self, name: &str, a: u32, ff: &str) -> Result<(Space, BMap), SpaceError> {
        let c = self.registered(name).ok_or_else(|| SpaceError::NotInRegistry(name.to_string()))?.clone();
        self.blowup(&c, a, ff)
    }

    /// Quasihomogeneous blowup of `center` to order `a`; the new front face
    /// is called `ff`.  Registered submanifolds are lifted.
    pub fn blowup(&self, center: &PSub, a: u32, ff: &str) -> Result<(Space, BMap), SpaceError> {
        if a == 0 {
            return Err(SpaceError::ZeroOrder);
        }
        let (cf, cl) = self.resolve(center)?;
        if center.order < a {
            return Err(SpaceError::OrderDeficit { center: center.name.clone(), defined: center.order, requested: a });
        }
        if cl.is_empty() && cf.len() == 1 {
            // Blowing up a hypersurface changes nothing.
            let me = Arc::new(self.clone());
            return Ok((self.clone(), BMap::identity(me)));
        }
        if self.face_index(ff).is_some() {
            return Err(SpaceError::DuplicateFace(ff.to_string()));
        }
        if generic_point(self, &cf, &cl).is_none() {
            return Err(SpaceError::EmptyCenter(center.name.clone()));
        }
        let labels = self.label_closure(&cf, &cl);
        let codim = self.codim_of(&cf, &labels);
        let nl = self.labels.labels.len();
        let mut e = vec![0i64; self.base_faces];
        let mut o = vec![0i64; nl];
        for &g in &cf {
            for (x, v) in e.iter_mut().zip(&self.faces[g].valuation.e) {
                *x += v;
            }
            for (x, v) in o.iter_mut().zip(&self.faces[g].valuation.o) {
                *x += v;
            }
        }
        for &l in &labels {
            o[l] += a as i64;
        }
        let mut registry = Vec::with_capacity(self.registry.len());
        for p in &self.registry {
            registry.push(lift_in(self, center, a, ff, p)?);
        }
        let mut out = self.clone();
        let ffi = out.faces.len();
        out.faces.push(Face {
            name: ff.to_string(),
            provenance: Provenance::Front { step: out.history.len() },
            valuation: Valuation { e, o },
        });
        out.history.push(Step { center: center.clone(), faces: cf.clone(), labels: labels.clone(), order: a, ff: ffi, codim });
        out.registry = registry;
        out.incidence = OnceLock::new();
        out.check_faces()?;

        let old = Arc::new(self.clone());
        let new = Arc::new(out.clone());
        let mut exponents = vec![vec![0u32; self.faces.len()]; out.faces.len()];
        for (g, row) in exponents.iter_mut().enumerate().take(self.faces.len()) {
            row[g] = 1;
        }
        for &g in &cf {
            exponents[ffi][g] = 1;
        }
        let mut interior_orders = vec![vec![0u32; out.faces.len()]; nl];
        for &l in &labels {
            interior_orders[l][ffi] = a;
        }
        let beta = BMap { domain: new, codomain: old, exponents, label_map: (0..nl).map(Some).collect(), interior_orders };
        Ok((out, beta))
    }

    /// Each face must be hit, alone and transversally, by its own generic curve.
    fn check_faces(&self) -> Result<(), SpaceError> {
        for (i, f) in self.faces.iter().enumerate() {
            let mut c = Curve::zero(self.base_faces, self.labels.labels.len());
            c.add_valuation(&f.valuation.e, &f.valuation.o);
            let end = curve::simulate(self, &c);
            if end.faces() != vec![i] || end.e[i] != curve::Dual::int(1) {
                return Err(SpaceError::NotEmbedded(f.name.clone()));
            }
        }
        Ok(())
    }

    /// Total exponent matrix to the base product (rows: faces).
    pub fn total_exponents(&self) -> Vec<Vec<i64>> {
        self.faces.iter().map(|f| f.valuation.e.clone()).collect()
    }
}

fn rank(mut m: Vec<Vec<i64>>) -> usize {
    use num::rational::Ratio;
    let mut a: Vec<Vec<Ratio<i64>>> = m.drain(..).map(|r| r.into_iter().map(Ratio::from_integer).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| a[i][c] != Ratio::from_integer(0)) else { continue };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && a[i][c] != Ratio::from_integer(0) {
                let f = a[i][c] / a[r][c];
                for k in 0..cols {
                    let v = a[r][k] * f;
                    a[i][k] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Description of the full preimage of `p ⊆ c` under the blowup of `c`.
pub fn preimage_in(x: &Space, p: &PSub, c: &PSub, ff: &str) -> Result<PSub, SpaceError> {
    let (cf, cl) = x.resolve(c)?;
    let closed: BTreeSet<String> = x.label_closure(&cf, &cl).into_iter().map(|l| x.labels.labels[l].name.clone()).collect();
    let mut faces: BTreeSet<String> = p.faces.difference(&c.faces).cloned().collect();
    faces.insert(ff.to_string());
    let interior = p.interior.difference(&closed).cloned().collect();
    Ok(PSub { name: p.name.clone(), faces, interior, order: p.order })
}

/// Lift of `p` under the blowup of `c` (in `x`) to order `b`.
///
/// Inside the center the lift lies in the front face: with order `a - b`
/// when the center has interior equations and `a > b`, as the full preimage
/// when `a = b`, and unchanged when the center is a boundary corner.
/// Otherwise it is the strict transform, which keeps its description.
pub fn lift_in(x: &Space, c: &PSub, b: u32, ff: &str, p: &PSub) -> Result<PSub, SpaceError> {
    if !x.contains(c, p)? {
        return Ok(p.clone());
    }
    let mut faces: BTreeSet<String> = p.faces.difference(&c.faces).cloned().collect();
    faces.insert(ff.to_string());
    if c.interior.is_empty() {
        return Ok(PSub { faces, ..p.clone() });
    }
    if p.order == ANY_ORDER || p.order > b {
        let order = if p.order == ANY_ORDER { ANY_ORDER } else { p.order - b };
        return Ok(PSub { faces, order, ..p.clone() });
    }
    if p.order == b {
        return preimage_in(x, p, c, ff);
    }
    Err(SpaceError::UndefinedLift {
        name: p.name.clone(),
        reason: format!("contained in the center but defined only to order {} < {}", p.order, b),
    })
}

/// Lift along a blowdown map produced by [`Space::blowup`].
pub fn lift(beta: &BMap, p: &PSub) -> Result<PSub, SpaceError> {
    let step = beta
        .domain
        .history
        .last()
        .ok_or_else(|| SpaceError::Invalid("map is not a blowdown".into()))?;
    let ff = beta.domain.face_name(step.ff).to_string();
    lift_in(&beta.codomain, &step.center, step.order, &ff, p)
}

/// A face bijection `X -> Y` preserving valuations (total exponents and
/// interior orders to the common base), incidence and the incidence of
/// registered submanifolds.  Creation orders are not compared: the same
/// face can arise from differently described centers at different orders,
/// and the valuation already records how it sits over the base.
pub fn isomorphic(x: &Space, y: &Space) -> Option<Vec<usize>> {
    if x.faces.len() != y.faces.len() || x.labels != y.labels || x.base_faces != y.base_faces {
        return None;
    }
    if (0..x.base_faces).any(|i| x.faces[i].name != y.faces[i].name) {
        return None;
    }
    let cands: Vec<Vec<usize>> = (0..x.faces.len())
        .map(|i| {
            (0..y.faces.len())
                .filter(|&j| {
                    x.faces[i].valuation == y.faces[j].valuation
                        && matches!(
                            (&x.faces[i].provenance, &y.faces[j].provenance),
                            (Provenance::Base { .. }, Provenance::Base { .. }) | (Provenance::Front { .. }, Provenance::Front { .. })
                        )
                })
                .collect()
        })
        .collect();
    if cands.iter().any(|c| c.is_empty()) {
        return None;
    }
    let norm = |s: &[Vec<usize>], map: Option<&[usize]>| -> BTreeSet<Vec<usize>> {
        s.iter()
            .map(|set| {
                let mut v: Vec<usize> = set.iter().map(|&i| map.map_or(i, |m| m[i])).collect();
                v.sort();
                v
            })
            .collect()
    };
    let target = norm(y.incidence(), None);
    let xinc = x.incidence().to_vec();
    let mut reg_pairs = Vec::new();
    for p in &x.registry {
        let q = y.registered(&p.name)?;
        reg_pairs.push((x.faces_met_by(p).ok()?, y.faces_met_by(q).ok()?.into_iter().collect::<BTreeSet<_>>()));
    }
    if x.registry.len() != y.registry.len() {
        return None;
    }
    let mut assign = vec![usize::MAX; x.faces.len()];
    let mut used = vec![false; y.faces.len()];
    fn search(
        i: usize,
        cands: &[Vec<usize>],
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ok: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if i == cands.len() {
            return ok(assign);
        }
        for &j in &cands[i] {
            if !used[j] {
                used[j] = true;
                assign[i] = j;
                if search(i + 1, cands, assign, used, ok) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    let ok = |m: &[usize]| -> bool {
        norm(&xinc, Some(m)) == target
            && reg_pairs.iter().all(|(xs, ys)| xs.iter().map(|&i| m[i]).collect::<BTreeSet<_>>() == *ys)
    };
    search(0, &cands, &mut assign, &mut used, &ok).then_some(assign)
}

#[cfg(test)]
mod tests;
