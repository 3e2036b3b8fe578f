//! Lifting **a**-vector fields from the left factor of `M²` through the three
//! blowups of the depth-2 double space, in explicit projective coordinates.
//!
//! Coordinates at each stage share one slot layout:
//!
//! | stage | 0 | 1 | `y`-slots | second `y`-slots | `z`-slots | second `z`-slots | `w` | `w'` |
//! |-------|---|---|-----------|------------------|-----------|------------------|-----|------|
//! | base  | x | x' | y | y' | z | z' | w | w' |
//! | x     | x | t = x'/x | y | y' | z | z' | w | w' |
//! | y     | x | T = (1−t)/x^{a1} | y | Y = (y−y')/x^{a1} | z | z' | w | w' |
//! | z     | x | 𝒯 = T/x^{a2} | y | 𝒴 = Y/x^{a2} | z | 𝒵 = (z−z')/x^{a2} | w | w' |

use super::algebra::{DiffRing, LPoly, Weyl};
use super::Dims;
use crate::rational::{int, Rational};
use num::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stage {
    Base,
    X,
    Y,
    Z,
}

impl Stage {
    pub fn parse(s: &str) -> Option<Stage> {
        match s {
            "base" => Some(Stage::Base),
            "x" => Some(Stage::X),
            "y" => Some(Stage::Y),
            "z" => Some(Stage::Z),
            _ => None,
        }
    }
}

/// A coordinate direction on the left factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    X,
    Y(usize),
    Z(usize),
    W(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("direction {0:?} does not exist for this tower")]
    BadDirection(Direction),
    #[error("lifted field is singular at the front face: {0}")]
    Singular(String),
    #[error("substitution produced a negative power of a non-monomial")]
    Substitution,
    #[error("a field at stage {from:?} cannot be pushed to stage {to:?} in one step")]
    Stage { from: Stage, to: Stage },
}

/// `Σ c · x^p ∂_dir` on the left factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AVectorField {
    pub terms: Vec<(i64, Direction, Rational)>,
}

impl AVectorField {
    pub fn term(x_power: i64, dir: Direction) -> AVectorField {
        AVectorField { terms: vec![(x_power, dir, Rational::one())] }
    }

    /// Minimal `x`-power for `x^p ∂_dir` to be an **a**-vector field.
    pub fn threshold(d: &Dims, dir: Direction) -> i64 {
        match dir {
            Direction::X => 1 + (d.a1 + d.a2) as i64,
            Direction::Y(_) => (d.a1 + d.a2) as i64,
            Direction::Z(_) => d.a2 as i64,
            Direction::W(_) => 0,
        }
    }

    /// The generator `x^{threshold} ∂_dir`.
    pub fn basis(d: &Dims, dir: Direction) -> AVectorField {
        AVectorField::term(AVectorField::threshold(d, dir), dir)
    }

    /// Generators in the order `x, y_i, z_j, w_k`.
    pub fn frame(d: &Dims) -> Vec<AVectorField> {
        d.directions().into_iter().map(|dir| AVectorField::basis(d, dir)).collect()
    }

    pub fn is_a_field(&self, d: &Dims) -> bool {
        self.terms.iter().all(|(p, dir, c)| c.is_zero() || *p >= AVectorField::threshold(d, *dir))
    }
}

/// Slot indices of the common layout.
#[derive(Debug, Clone, Copy)]
pub struct Slots {
    pub b: usize,
    pub f1: usize,
    pub f2: usize,
}

impl Slots {
    pub fn new(d: &Dims) -> Slots {
        Slots { b: d.b, f1: d.f1, f2: d.f2 }
    }
    pub fn n(&self) -> usize {
        2 + 2 * (self.b + self.f1 + self.f2)
    }
    pub fn y(&self, i: usize) -> usize {
        2 + i
    }
    pub fn y2(&self, i: usize) -> usize {
        2 + self.b + i
    }
    pub fn z(&self, j: usize) -> usize {
        2 + 2 * self.b + j
    }
    pub fn z2(&self, j: usize) -> usize {
        2 + 2 * self.b + self.f1 + j
    }
    pub fn w(&self, k: usize) -> usize {
        2 + 2 * (self.b + self.f1) + k
    }
    pub fn w2(&self, k: usize) -> usize {
        2 + 2 * (self.b + self.f1) + self.f2 + k
    }

    pub fn left(&self, dir: Direction) -> usize {
        match dir {
            Direction::X => 0,
            Direction::Y(i) => self.y(i),
            Direction::Z(j) => self.z(j),
            Direction::W(k) => self.w(k),
        }
    }

    /// Slot of the coordinate whose derivative the lift of `dir` reduces to
    /// at the front face of the last blowup.
    pub fn front(&self, dir: Direction) -> usize {
        match dir {
            Direction::X => 1,
            Direction::Y(i) => self.y2(i),
            Direction::Z(j) => self.z2(j),
            Direction::W(k) => self.w(k),
        }
    }

    pub fn names(&self, stage: Stage) -> Vec<String> {
        let idx = |s: &str, i: usize, n: usize| if n == 1 { s.to_string() } else { format!("{s}{}", i + 1) };
        let (one, y2, z2) = match stage {
            Stage::Base => ("x'", "y'", "z'"),
            Stage::X => ("t", "y'", "z'"),
            Stage::Y => ("T", "Y", "z'"),
            Stage::Z => ("𝒯", "𝒴", "𝒵"),
        };
        let mut v = vec!["x".to_string(), one.to_string()];
        v.extend((0..self.b).map(|i| idx("y", i, self.b)));
        v.extend((0..self.b).map(|i| idx(y2, i, self.b)));
        v.extend((0..self.f1).map(|i| idx("z", i, self.f1)));
        v.extend((0..self.f1).map(|i| idx(z2, i, self.f1)));
        v.extend((0..self.f2).map(|i| idx("w", i, self.f2)));
        v.extend((0..self.f2).map(|i| idx("w'", i, self.f2)));
        v
    }
}

/// A vector field `Σ_j c_j ∂_j` in the coordinates of some stage.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedField {
    pub stage: Stage,
    pub names: Vec<String>,
    pub components: Vec<LPoly>,
}

impl LiftedField {
    /// `Σ c_j ∂_{slot_j}` in the coordinates of `stage`.
    pub fn new(d: &Dims, stage: Stage, terms: &[(usize, LPoly)]) -> LiftedField {
        let sl = Slots::new(d);
        let n = sl.n();
        let mut components = vec![LPoly::zero_in(n); n];
        for (j, c) in terms {
            components[*j] = components[*j].add(c);
        }
        LiftedField { stage, names: sl.names(stage), components }
    }

    /// Restriction to `x = 0`.
    pub fn at_front_face(&self) -> Result<LiftedField, LiftError> {
        let components = self
            .components
            .iter()
            .map(|c| c.at_zero(0).ok_or_else(|| LiftError::Singular(self.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(LiftedField { components, ..self.clone() })
    }

    /// As a first-order operator.
    pub fn as_operator(&self) -> Weyl<LPoly> {
        let n = self.components.len();
        let mut w = Weyl::zero(n);
        for (j, c) in self.components.iter().enumerate() {
            let mut b = vec![0; n];
            b[j] = 1;
            w.add_term(b, c.clone());
        }
        w
    }

    /// `1 · ∂_slot` and nothing else.
    pub fn is_unit(&self, slot: usize) -> bool {
        self.components.iter().enumerate().all(|(j, c)| {
            let want = if j == slot { Rational::one() } else { Rational::zero() };
            c.constant_value() == Some(want)
        })
    }
}

impl fmt::Display for LiftedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut s = c.render(&self.names);
            let d = format!("∂{}", self.names[j]);
            if s == "1" {
                s = d;
            } else if s == "−1" {
                s = format!("−{d}");
            } else if c.terms.len() == 1 {
                s = format!("{s}{d}");
            } else {
                s = format!("({s}){d}");
            }
            if first {
                write!(f, "{s}")?;
            } else if let Some(r) = s.strip_prefix('−') {
                write!(f, " − {r}")?;
            } else {
                write!(f, " + {s}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

struct Transition {
    /// Old coordinates in terms of the new ones.
    images: Vec<LPoly>,
    /// Old coordinate fields in terms of the new ones.
    fields: Vec<Vec<LPoly>>,
}

fn transition(d: &Dims, sl: &Slots, to: Stage) -> Transition {
    let n = sl.n();
    let var = |v: usize| LPoly::var_pow(n, v, 1, int(1));
    let zero = || LPoly::zero_in(n);
    let mono = |pairs: &[(usize, i64)], q: i64| {
        let mut e = vec![0; n];
        for &(v, k) in pairs {
            e[v] += k;
        }
        LPoly::monomial(n, e, int(q))
    };
    let unit = |j: usize| -> Vec<LPoly> { (0..n).map(|i| if i == j { LPoly::constant(n, int(1)) } else { zero() }).collect() };
    let mut images: Vec<LPoly> = (0..n).map(var).collect();
    let mut fields: Vec<Vec<LPoly>> = (0..n).map(unit).collect();
    let (a1, a2) = (d.a1 as i64, d.a2 as i64);
    match to {
        Stage::Base => {}
        Stage::X => {
            images[1] = mono(&[(0, 1), (1, 1)], 1);
            fields[0][1] = mono(&[(0, -1), (1, 1)], -1);
            fields[1] = unit(1);
            fields[1][1] = mono(&[(0, -1)], 1);
        }
        Stage::Y => {
            images[1] = LPoly::constant(n, int(1)).add(&mono(&[(0, a1), (1, 1)], -1));
            fields[0][1] = mono(&[(0, -1), (1, 1)], -a1);
            fields[1] = vec![zero(); n];
            fields[1][1] = mono(&[(0, -a1)], -1);
            for i in 0..sl.b {
                let (y, yy) = (sl.y(i), sl.y2(i));
                images[yy] = var(y).add(&mono(&[(0, a1), (yy, 1)], -1));
                fields[0][yy] = mono(&[(0, -1), (yy, 1)], -a1);
                fields[y][yy] = mono(&[(0, -a1)], 1);
                fields[yy] = vec![zero(); n];
                fields[yy][yy] = mono(&[(0, -a1)], -1);
            }
        }
        Stage::Z => {
            images[1] = mono(&[(0, a2), (1, 1)], 1);
            fields[0][1] = mono(&[(0, -1), (1, 1)], -a2);
            fields[1] = vec![zero(); n];
            fields[1][1] = mono(&[(0, -a2)], 1);
            for i in 0..sl.b {
                let yy = sl.y2(i);
                images[yy] = mono(&[(0, a2), (yy, 1)], 1);
                fields[0][yy] = mono(&[(0, -1), (yy, 1)], -a2);
                fields[yy] = vec![zero(); n];
                fields[yy][yy] = mono(&[(0, -a2)], 1);
            }
            for j in 0..sl.f1 {
                let (z, zz) = (sl.z(j), sl.z2(j));
                images[zz] = var(z).add(&mono(&[(0, a2), (zz, 1)], -1));
                fields[0][zz] = mono(&[(0, -1), (zz, 1)], -a2);
                fields[z][zz] = mono(&[(0, -a2)], 1);
                fields[zz] = vec![zero(); n];
                fields[zz][zz] = mono(&[(0, -a2)], -1);
            }
        }
    }
    Transition { images, fields }
}

fn push(field: &[LPoly], t: &Transition, n: usize) -> Result<Vec<LPoly>, LiftError> {
    let mut out = vec![LPoly::zero_in(n); n];
    for (i, c) in field.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let c = c.subst(&t.images, n).ok_or(LiftError::Substitution)?;
        for (j, g) in t.fields[i].iter().enumerate() {
            if !g.is_zero() {
                out[j] = out[j].add(&c.mul(g));
            }
        }
    }
    Ok(out)
}

/// Push a field through the single blowup that produces `to`.
pub fn lift_step(d: &Dims, field: &LiftedField, to: Stage) -> Result<LiftedField, LiftError> {
    let from = match to {
        Stage::Base => Stage::Base,
        Stage::X => Stage::Base,
        Stage::Y => Stage::X,
        Stage::Z => Stage::Y,
    };
    if field.stage != from {
        return Err(LiftError::Stage { from: field.stage, to });
    }
    if to == Stage::Base {
        return Ok(field.clone());
    }
    let sl = Slots::new(d);
    let components = push(&field.components, &transition(d, &sl, to), sl.n())?;
    Ok(LiftedField { stage: to, names: sl.names(to), components })
}

/// Lift a left-factor field to the coordinates of `stage`.
pub fn lift_vf(d: &Dims, v: &AVectorField, stage: Stage) -> Result<LiftedField, LiftError> {
    let sl = Slots::new(d);
    let n = sl.n();
    let mut terms = Vec::new();
    for &(p, dir, ref c) in &v.terms {
        let ok = match dir {
            Direction::X => true,
            Direction::Y(i) => i < d.b,
            Direction::Z(j) => j < d.f1,
            Direction::W(k) => k < d.f2,
        };
        if !ok {
            return Err(LiftError::BadDirection(dir));
        }
        terms.push((sl.left(dir), LPoly::var_pow(n, 0, p, c.clone())));
    }
    let mut field = LiftedField::new(d, Stage::Base, &terms);
    for s in [Stage::X, Stage::Y, Stage::Z] {
        if s > stage {
            break;
        }
        field = lift_step(d, &field, s)?;
    }
    Ok(field)
}

/// Whether the lifts of `fields` to the last front face, at the lifted
/// diagonal, span a complement of its tangent space.  Decided by an exact
/// rank computation on the normal components `(𝒯, 𝒴, 𝒵, w − w')`.
pub fn transversality_with(d: &Dims, fields: &[AVectorField]) -> Result<bool, LiftError> {
    let sl = Slots::new(d);
    let mut normal_slots: Vec<usize> = vec![1];
    normal_slots.extend((0..d.b).map(|i| sl.y2(i)));
    normal_slots.extend((0..d.f1).map(|j| sl.z2(j)));
    let mut rows = Vec::new();
    for v in fields {
        let l = lift_vf(d, v, Stage::Z)?.at_front_face()?;
        let mut row = Vec::new();
        let at_diag = |c: &LPoly| -> Result<Rational, LiftError> {
            let mut c = c.clone();
            for &s in &normal_slots {
                c = c.at_zero(s).ok_or_else(|| LiftError::Singular(l.to_string()))?;
            }
            c.constant_value().ok_or_else(|| LiftError::Singular(l.to_string()))
        };
        for &s in &normal_slots {
            row.push(at_diag(&l.components[s])?);
        }
        for k in 0..d.f2 {
            row.push(at_diag(&l.components[sl.w(k)])? - at_diag(&l.components[sl.w2(k)])?);
        }
        rows.push(row);
    }
    let n = 1 + d.b + d.f1 + d.f2;
    Ok(rank_q(rows) == n)
}

/// The full frame.
pub fn transversality_check(d: &Dims) -> Result<bool, LiftError> {
    transversality_with(d, &AVectorField::frame(d))
}

fn rank_q(mut a: Vec<Vec<Rational>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[r][c];
                for k in 0..cols {
                    let v = &a[r][k] * &f;
                    a[i][k] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Lifted frame at the last stage, as first-order operators.
pub fn lifted_frame(d: &Dims) -> Result<Vec<(Direction, Weyl<LPoly>)>, LiftError> {
    d.directions().into_iter().map(|dir| Ok((dir, lift_vf(d, &AVectorField::basis(d, dir), Stage::Z)?.as_operator()))).collect()
}

/// Restrict an operator to `x = 0`.
pub fn restrict_front(w: &Weyl<LPoly>) -> Result<Weyl<LPoly>, LiftError> {
    let mut out = Weyl::zero(w.nvars);
    for (b, c) in &w.terms {
        out.add_term(b.clone(), c.at_zero(0).ok_or(LiftError::Singular("operator".into()))?);
    }
    Ok(out)
}

/// `b_β(0) = a_β(0)` check for one multi-index: the composite of the
/// lifted frame fields, restricted to the front face, is the constant
/// coefficient monomial `∂^β` in the front-face coordinates.
pub fn lifted_monomial_is_exact(d: &Dims, frame: &[(Direction, Weyl<LPoly>)], beta: &[u32]) -> Result<bool, LiftError> {
    let sl = Slots::new(d);
    let n = sl.n();
    let mut op = Weyl::mult(n, LPoly::constant(n, int(1)));
    let mut want = vec![0u32; n];
    for ((dir, l), &e) in frame.iter().zip(beta) {
        op = op.compose(&l.pow(e));
        want[sl.front(*dir)] += e;
    }
    let r = restrict_front(&op)?;
    Ok(r.terms.len() == 1 && r.terms.get(&want).and_then(|c| c.constant_value()) == Some(Rational::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(a1: u32, a2: u32, b: usize, f1: usize, f2: usize) -> Dims {
        Dims { a1, a2, b, f1, f2 }
    }

    #[test]
    fn x_stage_identity() {
        let d = dims(1, 1, 1, 1, 1);
        let l = lift_vf(&d, &AVectorField::term(1, Direction::X), Stage::X).unwrap();
        assert_eq!(l.to_string(), "x∂x − t∂t");
    }

    #[test]
    fn y_stage_identity() {
        for (a1, a2) in [(1, 1), (2, 3)] {
            let d = dims(a1, a2, 2, 1, 1);
            let l = lift_vf(&d, &AVectorField::term(1 + a1 as i64, Direction::X), Stage::Y).unwrap();
            assert!(l.at_front_face().unwrap().is_unit(1), "{l}");
            let ly = lift_vf(&d, &AVectorField::term(a1 as i64, Direction::Y(1)), Stage::Y).unwrap();
            assert!(ly.at_front_face().unwrap().is_unit(Slots::new(&d).y2(1)), "{ly}");
        }
    }

    #[test]
    fn z_stage_identity() {
        let d = dims(2, 1, 1, 2, 1);
        let sl = Slots::new(&d);
        for dir in d.directions() {
            let l = lift_vf(&d, &AVectorField::basis(&d, dir), Stage::Z).unwrap();
            assert!(l.at_front_face().unwrap().is_unit(sl.front(dir)), "{dir:?}: {l}");
        }
        let l = lift_vf(&d, &AVectorField::basis(&d, Direction::X), Stage::Z).unwrap();
        assert_eq!(l.to_string(), "x^4∂x + (−4x^3𝒯 + 1)∂𝒯 − 3x^3𝒴∂𝒴 − x^3𝒵1∂𝒵1 − x^3𝒵2∂𝒵2");
        // one power short is singular at the front face
        let bad = lift_vf(&d, &AVectorField::term(3, Direction::X), Stage::Z).unwrap();
        assert!(bad.at_front_face().is_err());
    }

    #[test]
    fn transversality() {
        let d = dims(1, 2, 1, 1, 2);
        assert!(transversality_check(&d).unwrap());
        let no_w: Vec<_> = AVectorField::frame(&d).into_iter().filter(|v| !matches!(v.terms[0].1, Direction::W(_))).collect();
        assert!(!transversality_with(&d, &no_w).unwrap());
        let d0 = dims(1, 1, 1, 1, 0);
        assert!(transversality_check(&d0).unwrap());
    }

    #[test]
    fn single_steps() {
        let d = dims(2, 3, 1, 1, 1);
        let sl = Slots::new(&d);
        let n = sl.n();
        let x_pow = |p: i64| LPoly::var_pow(n, 0, p, int(1));
        let at_y = LiftedField::new(&d, Stage::X, &[(1, x_pow(2))]);
        assert_eq!(lift_step(&d, &at_y, Stage::Y).unwrap().to_string(), "−∂T");
        let euler = LiftedField::new(&d, Stage::X, &[(0, x_pow(1))]);
        assert_eq!(lift_step(&d, &euler, Stage::Y).unwrap().to_string(), "x∂x − 2T∂T − 2Y∂Y");
        assert!(lift_step(&d, &euler, Stage::Z).is_err());
    }

    #[test]
    fn lifted_monomials() {
        let d = dims(1, 1, 1, 1, 1);
        let frame = lifted_frame(&d).unwrap();
        for beta in [[2, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0]] {
            assert!(lifted_monomial_is_exact(&d, &frame, &beta).unwrap());
        }
    }
}
