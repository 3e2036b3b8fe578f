//! Test curves through a blown-up space.
//!
//! A curve `s -> 0` in the base product is recorded by the vanishing orders of
//! the base boundary defining functions and of the interior labels.  Replaying
//! the blowup history on those orders tells us which faces the limit point
//! lies on; this is how incidence, containment and emptiness are decided.
//! Orders live in `Q + Q·ε` (ordered lexicographically) so that "generic
//! point of a submanifold" can be expressed with an infinitesimal bump.

use super::{LabelSystem, Space};
use num::rational::Ratio;
use num::{Signed, Zero};
use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Mul, Sub, SubAssign};

pub type Q64 = Ratio<i64>;

/// `a + b·ε` with `ε` positive and infinitesimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dual {
    pub a: Q64,
    pub b: Q64,
}

impl Dual {
    pub const fn zero() -> Dual {
        Dual { a: Ratio::new_raw(0, 1), b: Ratio::new_raw(0, 1) }
    }

    pub fn int(n: i64) -> Dual {
        Dual { a: Q64::from_integer(n), b: Q64::zero() }
    }

    pub fn eps() -> Dual {
        Dual { a: Q64::zero(), b: Q64::from_integer(1) }
    }

    pub fn is_positive(&self) -> bool {
        self.a.is_positive() || (self.a.is_zero() && self.b.is_positive())
    }

    pub fn is_negative(&self) -> bool {
        self.a.is_negative() || (self.a.is_zero() && self.b.is_negative())
    }

    pub fn div_int(self, n: u32) -> Dual {
        let d = Q64::from_integer(n as i64);
        Dual { a: self.a / d, b: self.b / d }
    }
}

impl Ord for Dual {
    fn cmp(&self, o: &Self) -> Ordering {
        self.a.cmp(&o.a).then(self.b.cmp(&o.b))
    }
}

impl PartialOrd for Dual {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual { a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual { a: self.a - o.a, b: self.b - o.b }
    }
}

impl AddAssign for Dual {
    fn add_assign(&mut self, o: Dual) {
        *self = *self + o;
    }
}

impl SubAssign for Dual {
    fn sub_assign(&mut self, o: Dual) {
        *self = *self - o;
    }
}

impl Mul<u32> for Dual {
    type Output = Dual;
    fn mul(self, n: u32) -> Dual {
        let k = Q64::from_integer(n as i64);
        Dual { a: self.a * k, b: self.b * k }
    }
}

/// Orders of a curve: one per base face and one per interior label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    pub e: Vec<Dual>,
    pub o: Vec<Dual>,
}

impl Curve {
    pub fn zero(base_faces: usize, labels: usize) -> Curve {
        Curve { e: vec![Dual::zero(); base_faces], o: vec![Dual::zero(); labels] }
    }

    pub fn add_valuation(&mut self, e: &[i64], o: &[i64]) {
        for (x, v) in self.e.iter_mut().zip(e) {
            *x += Dual::int(*v);
        }
        for (x, v) in self.o.iter_mut().zip(o) {
            *x += Dual::int(*v);
        }
    }
}

/// Final orders after replaying the history: one per current face and label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveEnd {
    pub e: Vec<Dual>,
    pub o: Vec<Dual>,
}

impl CurveEnd {
    pub fn faces(&self) -> Vec<usize> {
        self.e.iter().enumerate().filter(|(_, x)| x.is_positive()).map(|(i, _)| i).collect()
    }

    pub fn on(&self, faces: &[usize], labels: &[usize]) -> bool {
        faces.iter().all(|&f| self.e[f].is_positive()) && labels.iter().all(|&l| self.o[l].is_positive())
    }
}

/// Whether a base curve with these orders exists.
///
/// Level-0 labels compare `x_j/x_i` with 1, so they can only vanish when the
/// two factors approach the boundary at the same rate.  On each level the
/// pairwise differences obey `d_ij + d_jk = d_ik`, which forces the minimum
/// order in every triangle to be attained at least twice.
pub fn realizable(ls: &LabelSystem, c: &Curve) -> bool {
    if c.e.iter().chain(&c.o).any(|x| x.is_negative()) {
        return false;
    }
    for (id, lab) in ls.labels.iter().enumerate() {
        if lab.level == 0 && c.o[id].is_positive() && c.e[lab.pair.0] != c.e[lab.pair.1] {
            return false;
        }
    }
    for tri in ls.triangles() {
        let v = [c.o[tri[0]], c.o[tri[1]], c.o[tri[2]]];
        let m = *v.iter().min().unwrap();
        if v.iter().filter(|&&x| x == m).count() < 2 {
            return false;
        }
    }
    true
}

/// Replays the blowup history on a base curve.
pub fn simulate(space: &Space, c: &Curve) -> CurveEnd {
    let mut e = c.e.clone();
    e.resize(space.faces.len(), Dual::zero());
    let mut o = c.o.clone();
    for step in &space.history {
        let hits = step.faces.iter().all(|&g| e[g].is_positive()) && step.labels.iter().all(|&l| o[l].is_positive());
        if !hits {
            continue;
        }
        let mut r: Option<Dual> = None;
        for &g in &step.faces {
            r = Some(r.map_or(e[g], |x| x.min(e[g])));
        }
        for &l in &step.labels {
            let v = o[l].div_int(step.order);
            r = Some(r.map_or(v, |x| x.min(v)));
        }
        let Some(r) = r else { continue };
        e[step.ff] = r;
        for &g in &step.faces {
            e[g] -= r;
        }
        for &l in &step.labels {
            o[l] -= r * step.order;
        }
    }
    CurveEnd { e, o }
}

/// Smallest set of labels containing `want` whose ε-bump keeps `base`
/// realizable on every triangle; `None` if no such bump exists.
pub fn bump_closure(ls: &LabelSystem, base: &Curve, want: &[usize]) -> Option<Vec<bool>> {
    let mut bumped = vec![false; ls.labels.len()];
    for &l in want {
        bumped[l] = true;
    }
    loop {
        let mut changed = false;
        for tri in ls.triangles() {
            let v: Vec<Dual> = tri.iter().map(|&l| base.o[l]).collect();
            let m = *v.iter().min().unwrap();
            let mins: Vec<usize> = tri.iter().zip(&v).filter(|(_, x)| **x == m).map(|(l, _)| *l).collect();
            let hit = mins.iter().filter(|&&l| bumped[l]).count();
            let miss: Vec<usize> = mins.iter().copied().filter(|&l| !bumped[l]).collect();
            if hit > 0 && miss.len() == 1 {
                bumped[miss[0]] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Some(bumped)
}

/// A curve ending at a generic point of the locus cut out by `faces` and
/// `labels`, or `None` if our search finds no such curve.
pub fn generic_point(space: &Space, faces: &[usize], labels: &[usize]) -> Option<CurveEnd> {
    let ls = &space.labels;
    let nb = space.base_faces;
    let mut base = Curve::zero(nb, ls.labels.len());
    for &f in faces {
        let v = &space.faces[f].valuation;
        base.add_valuation(&v.e, &v.o);
    }
    let bumped = bump_closure(ls, &base, labels)?;
    for (l, b) in bumped.iter().enumerate() {
        if *b {
            base.o[l] += Dual::eps();
        }
    }
    if !realizable(ls, &base) {
        return None;
    }
    let end = simulate(space, &base);
    end.on(faces, labels).then_some(end)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_order_is_lexicographic() {
        assert!(Dual::eps().is_positive());
        assert!(Dual::int(1) > Dual::eps() * 1000);
        assert!((Dual::int(0) - Dual::eps()).is_negative());
        assert_eq!((Dual::int(3) + Dual::eps()).div_int(3), Dual { a: Q64::from_integer(1), b: Q64::new(1, 3) });
    }
}
