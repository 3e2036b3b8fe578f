//! Index sets, index families and weight vectors.
//!
//! An [`IndexSet`] is stored as the antichain of its maximal generators; the
//! set it stands for is the closure under `(z,p) -> (z,q)` for `q <= p` and
//! `(z,p) -> (z+1,p)`.  Everything here is exact.

use crate::corner_spaces::BMap;
use crate::rational::{self, Rational};
use indexmap::IndexMap;
use num::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("index family has no entry for face {0:?}")]
    MissingFace(String),
    #[error("malformed index term: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn real(re: Rational) -> Self {
        ComplexRational { re, im: Rational::zero() }
    }

    pub fn new(re: Rational, im: Rational) -> Self {
        ComplexRational { re, im }
    }

    /// `Some(n)` when `self - other` is a non-negative integer.
    fn nat_offset(&self, other: &Self) -> Option<Rational> {
        if self.im != other.im {
            return None;
        }
        let d = &self.re - &other.re;
        (d.is_integer() && !d.is_negative()).then_some(d)
    }

    fn same_coset(&self, other: &Self) -> bool {
        self.im == other.im && (&self.re - &other.re).is_integer()
    }
}

impl std::ops::Add for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, o: &ComplexRational) -> ComplexRational {
        ComplexRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", rational::Show(&self.re))
        } else {
            write!(f, "{}{}{}i", rational::Show(&self.re), if self.im.is_negative() { "" } else { "+" }, rational::Show(&self.im))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexTerm {
    pub z: ComplexRational,
    pub p: u32,
}

impl IndexTerm {
    pub fn new(re: Rational, p: u32) -> Self {
        IndexTerm { z: ComplexRational::real(re), p }
    }

    pub fn complex(re: Rational, im: Rational, p: u32) -> Self {
        IndexTerm { z: ComplexRational::new(re, im), p }
    }

    /// `self` lies in the closure of `g`.
    fn below(&self, g: &IndexTerm) -> bool {
        self.p <= g.p && self.z.nat_offset(&g.z).is_some()
    }

    fn sort_key(&self) -> (&Rational, &Rational, u32) {
        (&self.z.im, &self.z.re, self.p)
    }
}

/// Finite generator antichain for a discrete subset of C x N0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet {
    gens: Vec<IndexTerm>,
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet { gens: Vec::new() }
    }

    /// gen{(0,0)}: the index set of smooth functions.
    pub fn smooth() -> Self {
        Self::single(Rational::zero(), 0)
    }

    pub fn single(re: Rational, p: u32) -> Self {
        IndexSet { gens: vec![IndexTerm::new(re, p)] }
    }

    pub fn generators(&self) -> &[IndexTerm] {
        &self.gens
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains(&self, t: &IndexTerm) -> bool {
        self.gens.iter().any(|g| t.below(g))
    }

    /// Minimum real part; `None` stands for +infinity (the empty set).
    pub fn inf_re(&self) -> Option<Rational> {
        self.gens.iter().map(|g| g.z.re.clone()).min()
    }

    pub fn add(&self, other: &IndexSet) -> IndexSet {
        let mut terms = Vec::with_capacity(self.gens.len() * other.gens.len());
        for g in &self.gens {
            for h in &other.gens {
                terms.push(IndexTerm { z: &g.z + &h.z, p: g.p + h.p });
            }
        }
        normalize(terms)
    }

    pub fn ext_union(&self, other: &IndexSet) -> IndexSet {
        let mut terms: Vec<IndexTerm> = self.gens.iter().chain(&other.gens).cloned().collect();
        for g in &self.gens {
            for h in &other.gens {
                if g.z.same_coset(&h.z) {
                    let z = if g.z.re >= h.z.re { g.z.clone() } else { h.z.clone() };
                    terms.push(IndexTerm { z, p: g.p + h.p + 1 });
                }
            }
        }
        normalize(terms)
    }

    pub fn shift(&self, w: &Rational) -> IndexSet {
        let gens = self
            .gens
            .iter()
            .map(|g| IndexTerm { z: ComplexRational::new(&g.z.re + w, g.z.im.clone()), p: g.p })
            .collect();
        normalize(gens)
    }

    /// Closure of `{(e z, p)}`; `e = 0` collapses to gen{(0,0)} for nonempty sets.
    pub fn scale(&self, e: u32) -> IndexSet {
        if e == 0 {
            return if self.is_empty() { IndexSet::empty() } else { IndexSet::smooth() };
        }
        let k = rational::int(e as i64);
        normalize(
            self.gens
                .iter()
                .map(|g| IndexTerm { z: ComplexRational::new(&g.z.re * &k, &g.z.im * &k), p: g.p })
                .collect(),
        )
    }

    /// Closure of `{(z/e, p)}`, realized by the seeds `(g+j)/e`, `j < e`.
    pub fn divide(&self, e: u32) -> IndexSet {
        assert!(e > 0, "division of an index set by 0");
        let k = rational::int(e as i64);
        let mut terms = Vec::new();
        for g in &self.gens {
            for j in 0..e {
                let re = (&g.z.re + rational::int(j as i64)) / &k;
                terms.push(IndexTerm { z: ComplexRational::new(re, &g.z.im / &k), p: g.p });
            }
        }
        normalize(terms)
    }

    /// All closure members with `Re z <= re_max` and `p <= p_max`.
    pub fn window(&self, re_max: &Rational, p_max: u32) -> BTreeSet<(Rational, Rational, u32)> {
        let mut out = BTreeSet::new();
        for g in &self.gens {
            let mut re = g.z.re.clone();
            while &re <= re_max {
                for p in 0..=g.p.min(p_max) {
                    out.insert((g.z.im.clone(), re.clone(), p));
                }
                re += Rational::one();
            }
        }
        out
    }

    pub fn window_eq(&self, other: &IndexSet, re_max: &Rational, p_max: u32) -> bool {
        self.window(re_max, p_max) == other.window(re_max, p_max)
    }

    /// Closure inclusion `self ⊆ other`.
    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }
}

/// Antichain of maximal generators for the closure of `terms`.
pub fn normalize(terms: Vec<IndexTerm>) -> IndexSet {
    let mut terms = terms;
    terms.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    terms.dedup();
    let mut keep: Vec<IndexTerm> = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        let dominated = terms.iter().enumerate().any(|(j, g)| j != i && t.below(g) && (t != g));
        if !dominated {
            keep.push(t.clone());
        }
    }
    IndexSet { gens: keep }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "gen{{")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({},{})", g.z, g.p)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.gens.len()))?;
        for g in &self.gens {
            let row = (rational::encode(&g.z.re), rational::encode(&g.z.im), g.p);
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let rows: Vec<serde_json::Value> = Vec::deserialize(d)?;
        let mut terms = Vec::with_capacity(rows.len());
        for row in rows {
            let arr = row.as_array().ok_or_else(|| D::Error::custom("index term must be [re, im, p]"))?;
            if arr.len() != 3 {
                return Err(D::Error::custom("index term must be [re, im, p]"));
            }
            let q = |v: &serde_json::Value| -> Result<Rational, D::Error> {
                match v {
                    serde_json::Value::String(s) => rational::parse(s).map_err(D::Error::custom),
                    serde_json::Value::Number(n) => rational::parse(&n.to_string()).map_err(D::Error::custom),
                    _ => Err(D::Error::custom("rational expected")),
                }
            };
            let p = arr[2].as_u64().ok_or_else(|| D::Error::custom("log power must be a natural number"))?;
            terms.push(IndexTerm::complex(q(&arr[0])?, q(&arr[1])?, p as u32));
        }
        Ok(normalize(terms))
    }
}

/// Random index set: up to `max_gens` generators with real parts in
/// `[−re_bound, re_bound]` (denominators 1 to 3), an imaginary part `±1`
/// now and then, and log powers `≤ p_max`.
pub fn random_index_set<R: Rng + ?Sized>(rng: &mut R, max_gens: usize, re_bound: i64, p_max: u32) -> IndexSet {
    let n = rng.gen_range(0..=max_gens);
    let terms = (0..n)
        .map(|_| {
            let den = rng.gen_range(1..=3);
            let re = Rational::new(rng.gen_range(-re_bound * den..=re_bound * den).into(), den.into());
            let im = if rng.gen_bool(0.2) { rational::int(if rng.gen_bool(0.5) { 1 } else { -1 }) } else { Rational::zero() };
            IndexTerm::complex(re, im, rng.gen_range(0..=p_max))
        })
        .collect();
    normalize(terms)
}

/// Face name -> index set, in face order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexFamily(pub IndexMap<String, IndexSet>);

impl IndexFamily {
    pub fn new() -> Self {
        IndexFamily(IndexMap::new())
    }

    pub fn uniform<S: AsRef<str>>(faces: &[S], set: &IndexSet) -> Self {
        IndexFamily(faces.iter().map(|f| (f.as_ref().to_string(), set.clone())).collect())
    }

    pub fn get(&self, face: &str) -> Result<&IndexSet, IndexError> {
        self.0.get(face).ok_or_else(|| IndexError::MissingFace(face.to_string()))
    }

    pub fn set(&mut self, face: &str, g: IndexSet) {
        self.0.insert(face.to_string(), g);
    }

    /// Facewise sum.
    pub fn add(&self, other: &IndexFamily) -> Result<IndexFamily, IndexError> {
        let mut out = IndexFamily::new();
        for (f, g) in &self.0 {
            out.set(f, g.add(other.get(f)?));
        }
        Ok(out)
    }

    /// Facewise shift by a weight vector.
    pub fn shift(&self, w: &WeightVector) -> IndexFamily {
        IndexFamily(self.0.iter().map(|(f, g)| (f.clone(), g.shift(&w.get(f)))).collect())
    }

    pub fn window_eq(&self, other: &IndexFamily, re_max: &Rational, p_max: u32) -> bool {
        self.0.len() == other.0.len()
            && self.0.iter().all(|(f, g)| other.0.get(f).is_some_and(|h| g.window_eq(h, re_max, p_max)))
    }
}

impl fmt::Display for IndexFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (face, g)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{face}: {g}")?;
        }
        Ok(())
    }
}

/// Face name -> rational weight, zero when absent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightVector(pub IndexMap<String, Rational>);

impl WeightVector {
    pub fn new() -> Self {
        WeightVector(IndexMap::new())
    }

    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, i64)]) -> Self {
        WeightVector(pairs.iter().map(|(f, w)| (f.as_ref().to_string(), rational::int(*w))).collect())
    }

    pub fn get(&self, face: &str) -> Rational {
        self.0.get(face).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, face: &str, w: Rational) {
        self.0.insert(face.to_string(), w);
    }

    pub fn add(&self, other: &WeightVector) -> WeightVector {
        let mut out = self.clone();
        for (f, w) in &other.0 {
            let v = out.get(f) + w;
            out.set(f, v);
        }
        out
    }

    pub fn neg(&self) -> WeightVector {
        WeightVector(self.0.iter().map(|(f, w)| (f.clone(), -w.clone())).collect())
    }

    pub fn scale(&self, c: &Rational) -> WeightVector {
        WeightVector(self.0.iter().map(|(f, w)| (f.clone(), w * c)).collect())
    }

    /// Pullback along a b-map: `(f^# w)(G) = sum_H e(G,H) w(H)`.
    pub fn pullback(&self, f: &BMap) -> WeightVector {
        let mut out = WeightVector::new();
        for (g, row) in f.exponents.iter().enumerate() {
            let mut s = Rational::zero();
            for (h, &e) in row.iter().enumerate() {
                if e > 0 {
                    s += self.get(f.codomain.face_name(h)) * rational::int(e as i64);
                }
            }
            out.set(f.domain.face_name(g), s);
        }
        out
    }

    /// Values on the given faces, in that order.
    pub fn values<S: AsRef<str>>(&self, faces: &[S]) -> Vec<Rational> {
        faces.iter().map(|f| self.get(f.as_ref())).collect()
    }
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (f, w) in &self.0 {
            m.serialize_entry(f, &rational::encode(w))?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let m: IndexMap<String, String> = IndexMap::deserialize(d)?;
        let mut out = WeightVector::new();
        for (f, s) in m {
            out.set(&f, rational::parse(&s).map_err(D::Error::custom)?);
        }
        Ok(out)
    }
}

/// Pullback of an index family along a b-map.
pub fn pullback_family(f: &BMap, e: &IndexFamily) -> Result<IndexFamily, IndexError> {
    let mut out = IndexFamily::new();
    for (g, row) in f.exponents.iter().enumerate() {
        let mut acc = IndexSet::smooth();
        for (h, &k) in row.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let eh = e.get(f.codomain.face_name(h))?;
            acc = acc.add(&eh.scale(k));
        }
        out.set(f.domain.face_name(g), acc);
    }
    Ok(out)
}

/// Pushforward of an index family along a b-fibration, together with the
/// domain faces mapped onto the whole codomain whose index set fails the
/// integrability condition `inf Re > 0`.
pub fn pushforward_family(f: &BMap, e: &IndexFamily) -> Result<(IndexFamily, Vec<String>), IndexError> {
    let mut out = IndexFamily::new();
    for h in 0..f.codomain.face_count() {
        let mut acc = IndexSet::empty();
        for (g, row) in f.exponents.iter().enumerate() {
            let k = row[h];
            if k > 0 {
                acc = acc.ext_union(&e.get(f.domain.face_name(g))?.divide(k));
            }
        }
        out.set(f.codomain.face_name(h), acc);
    }
    let mut violations = Vec::new();
    for (g, row) in f.exponents.iter().enumerate() {
        if row.iter().all(|&k| k == 0) {
            let name = f.domain.face_name(g);
            let bad = match e.get(name)?.inf_re() {
                None => false,
                Some(q) => !q.is_positive(),
            };
            if bad {
                violations.push(name.to_string());
            }
        }
    }
    Ok((out, violations))
}

/// Algebraic laws of index sets as predicates, shared by the property tests
/// and the acceptance run.  Closure comparisons use [`IndexSet::window_eq`].
pub mod laws {
    use super::*;
    use std::sync::Arc;

    /// `normalize` is idempotent, ignores term order, and preserves membership.
    pub fn normalize_idempotent(terms: &[IndexTerm], probes: &[IndexTerm]) -> bool {
        let n = normalize(terms.to_vec());
        let mut rev = terms.to_vec();
        rev.reverse();
        normalize(n.gens.clone()) == n
            && normalize(rev) == n
            && probes.iter().all(|t| n.contains(t) == terms.iter().any(|g| t.below(g)))
    }

    pub fn add_laws(a: &IndexSet, b: &IndexSet, c: &IndexSet, re_max: &Rational, p_max: u32) -> bool {
        a.add(b) == b.add(a)
            && a.add(b).add(c).window_eq(&a.add(&b.add(c)), re_max, p_max)
            && a.add(&IndexSet::empty()).is_empty()
            && a.add(&IndexSet::smooth()).window_eq(a, re_max, p_max)
    }

    pub fn ext_union_commutative(a: &IndexSet, b: &IndexSet) -> bool {
        a.ext_union(b) == b.ext_union(a)
    }

    pub fn ext_union_associative(a: &IndexSet, b: &IndexSet, c: &IndexSet, re_max: &Rational, p_max: u32) -> bool {
        a.ext_union(b).ext_union(c).window_eq(&a.ext_union(&b.ext_union(c)), re_max, p_max)
    }

    /// `inf Re(G + H) = inf Re G + inf Re H` for nonempty `G`, `H`.
    pub fn inf_additive(a: &IndexSet, b: &IndexSet) -> bool {
        match (a.inf_re(), b.inf_re()) {
            (Some(x), Some(y)) => a.add(b).inf_re() == Some(x + y),
            _ => a.add(b).is_empty(),
        }
    }

    pub fn shift_additive(a: &IndexSet, v: &Rational, w: &Rational) -> bool {
        a.shift(v).shift(w) == a.shift(&(v + w))
    }

    /// Pull back along the face permutation `σ` of `space`, then push forward:
    /// the identity on families.
    pub fn permutation_round_trip(space: &Arc<crate::corner_spaces::Space>, sigma: &[usize], e: &IndexFamily) -> bool {
        let f = BMap::identity(space.clone()).precompose_relabel(space.clone(), sigma);
        let Ok(pulled) = pullback_family(&f, e) else { return false };
        let Ok((pushed, _)) = pushforward_family(&f, &pulled) else { return false };
        (0..space.face_count()).all(|h| {
            let name = space.face_name(h);
            pushed.get(name).ok() == e.get(name).ok()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn g(terms: &[(i64, u32)]) -> IndexSet {
        normalize(terms.iter().map(|&(r, p)| IndexTerm::new(int(r), p)).collect())
    }

    #[test]
    fn normalize_examples() {
        assert!(normalize(vec![]).is_empty());
        assert_eq!(g(&[(0, 0), (1, 0)]), g(&[(0, 0)]));
        assert_eq!(g(&[(0, 1), (0, 0)]).generators(), &[IndexTerm::new(int(0), 1)]);
    }

    #[test]
    fn contains_examples() {
        let s = g(&[(0, 2)]);
        assert!(s.contains(&IndexTerm::new(int(3), 1)));
        assert!(!s.contains(&IndexTerm::new(int(-1), 0)));
        assert!(!s.contains(&IndexTerm::new(frac(1, 2), 0)));
        assert!(!IndexSet::empty().contains(&IndexTerm::new(int(0), 0)));
    }

    #[test]
    fn inf_examples() {
        let s = normalize(vec![IndexTerm::new(frac(1, 2), 0), IndexTerm::new(int(2), 3)]);
        assert_eq!(s.inf_re(), Some(frac(1, 2)));
        assert_eq!(IndexSet::empty().inf_re(), None);
        assert_eq!(IndexSet::smooth().inf_re(), Some(int(0)));
    }

    #[test]
    fn add_examples() {
        assert_eq!(g(&[(1, 0)]).add(&g(&[(2, 1)])), g(&[(3, 1)]));
        assert!(g(&[(1, 0)]).add(&IndexSet::empty()).is_empty());
        assert_eq!(IndexSet::smooth().add(&IndexSet::smooth()), IndexSet::smooth());
    }

    #[test]
    fn ext_union_examples() {
        let s = IndexSet::smooth();
        assert_eq!(s.ext_union(&s), g(&[(0, 1)]));
        assert_eq!(g(&[(2, 1)]).ext_union(&IndexSet::empty()), g(&[(2, 1)]));
        assert_eq!(s.ext_union(&g(&[(3, 0)])), g(&[(0, 0), (3, 1)]));
        // different cosets do not interact
        let h = IndexSet::single(frac(1, 2), 0);
        assert_eq!(s.ext_union(&h).generators().len(), 2);
        assert!(!s.ext_union(&h).contains(&IndexTerm::new(int(3), 1)));
    }

    /// Oracle: the defining formula evaluated pointwise on a window.
    #[test]
    fn ext_union_matches_pointwise_definition() {
        let a = g(&[(0, 1), (2, 3)]);
        let b = g(&[(1, 0), (-1, 0)]);
        let u = a.ext_union(&b);
        let max_p = |s: &IndexSet, re: i64| -> Option<u32> {
            (0..10).rev().find(|&p| s.contains(&IndexTerm::new(int(re), p)))
        };
        for re in -2..8 {
            let expect = match (max_p(&a, re), max_p(&b, re)) {
                (Some(p), Some(q)) => Some(p + q + 1),
                (x, None) => x,
                (None, y) => y,
            };
            assert_eq!(max_p(&u, re), expect, "at Re z = {re}");
        }
    }

    #[test]
    fn shift_examples() {
        assert_eq!(IndexSet::smooth().shift(&int(5)), g(&[(5, 0)]));
        assert!(IndexSet::empty().shift(&int(3)).is_empty());
        assert_eq!(g(&[(1, 2)]).shift(&int(-1)), g(&[(0, 2)]));
    }

    #[test]
    fn divide_examples() {
        let d = g(&[(1, 0)]).divide(2);
        assert_eq!(d, normalize(vec![IndexTerm::new(frac(1, 2), 0), IndexTerm::new(int(1), 0)]));
        // oracle: {(1+n)/2} for n < 20 is exactly the window of the result
        let w = d.window(&int(10), 0);
        let expect: BTreeSet<_> = (0..20).map(|n| (int(0), frac(1 + n, 2), 0u32)).collect();
        assert_eq!(w, expect);
    }

    #[test]
    fn json_round_trip() {
        let s = normalize(vec![IndexTerm::complex(frac(-3, 2), int(1), 2), IndexTerm::new(int(4), 0)]);
        let txt = serde_json::to_string(&s).unwrap();
        assert_eq!(txt, r#"[["4/1","0/1",0],["-3/2","1/1",2]]"#);
        let back: IndexSet = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, s);
        let mut fam = IndexFamily::new();
        fam.set("rf", IndexSet::empty());
        fam.set("lf", s.clone());
        let txt = serde_json::to_string(&fam).unwrap();
        let back: IndexFamily = serde_json::from_str(&txt).unwrap();
        assert_eq!(back, fam);
        assert_eq!(serde_json::to_string(&back).unwrap(), txt);
    }
}
