//! **a**-differential operators `Σ a_β(x,y,z,w) V_x^α V_y^I V_z^J V_w^K`
//! with `V_x = x^{1+a1+a2}D_x`, `V_y = x^{a1+a2}D_y`, `V_z = x^{a2}D_z`,
//! `V_w = D_w` (`D = −i∂`), on `[0,1)_x × T^b × T^{f1} × T^{f2}` with tori
//! of period one.
//!
//! Coefficients are polynomials in `x` times trigonometric polynomials.
//! Composition goes through the ordinary normal-ordered form `Σ c_β ∂^β`
//! and back, so all commutator terms are exact.

use super::algebra::{Coeff, DiffRing, Weyl};
use super::scalar::Scalar;
use super::{Dims, ModelError};
use crate::rational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ADiffOp {
    pub dims: Dims,
    /// Multi-index `(α, I, J, K)` flattened to length `1 + b + f1 + f2`.
    pub terms: BTreeMap<Vec<u32>, Coeff>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigSpec {
    pub k: Vec<i64>,
    pub c: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffSpec {
    /// Coefficients of `1, x, x², …` (rationals); absent means `1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_poly: Option<Vec<String>>,
    /// Terms `c · e^{2πi k·(y,z,w)}`; absent means `1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trig: Option<Vec<TrigSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(default)]
    pub alpha: u32,
    #[serde(rename = "I", default)]
    pub i: Vec<u32>,
    #[serde(rename = "J", default)]
    pub j: Vec<u32>,
    #[serde(rename = "K", default)]
    pub k: Vec<u32>,
    pub coeff: CoeffSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpSpec {
    Terms { terms: Vec<TermSpec> },
    List(Vec<TermSpec>),
}

impl OpSpec {
    pub fn terms(&self) -> &[TermSpec] {
        match self {
            OpSpec::Terms { terms } | OpSpec::List(terms) => terms,
        }
    }
}

impl ADiffOp {
    pub fn zero(dims: Dims) -> ADiffOp {
        ADiffOp { dims, terms: BTreeMap::new() }
    }

    /// `c · V^β`.
    pub fn term(dims: Dims, beta: Vec<u32>, c: Coeff) -> ADiffOp {
        let mut out = ADiffOp::zero(dims);
        out.add_term(beta, c);
        out
    }

    pub fn constant(dims: Dims, s: Scalar) -> ADiffOp {
        let n = dims.nvars();
        ADiffOp::term(dims, vec![0; n], Coeff::constant(0, s))
    }

    /// `V_x² + Σ V_y² + Σ V_z² + Σ V_w²`: the product model Laplacian.
    pub fn laplacian(dims: Dims) -> ADiffOp {
        let mut out = ADiffOp::zero(dims);
        for v in 0..dims.nvars() {
            let mut b = vec![0; dims.nvars()];
            b[v] = 2;
            out.add_term(b, Coeff::constant(0, Scalar::one()));
        }
        out
    }

    pub fn add_term(&mut self, beta: Vec<u32>, c: Coeff) {
        let v = match self.terms.get(&beta) {
            Some(o) => o.add(&c),
            None => c,
        };
        if v.is_zero() {
            self.terms.remove(&beta);
        } else {
            self.terms.insert(beta, v);
        }
    }

    pub fn add(&self, o: &ADiffOp) -> ADiffOp {
        let mut out = self.clone();
        for (b, c) in &o.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> ADiffOp {
        let mut out = ADiffOp::zero(self.dims);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), c.scale(s));
        }
        out
    }

    pub fn sub(&self, o: &ADiffOp) -> ADiffOp {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Differential order (`0` for the zero operator).
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|b| b.iter().sum()).max().unwrap_or(0)
    }

    /// Largest frequency in the fibre variables `w`.
    pub fn fibre_trig_degree(&self) -> u64 {
        let r = self.dims.b + self.dims.f1..self.dims.nvars() - 1;
        self.terms.values().map(|c| c.trig_degree(r.clone())).max().unwrap_or(0)
    }

    /// Whether any coefficient depends on `(y, z)`.
    pub fn depends_on_base(&self) -> bool {
        let r = 0..self.dims.b + self.dims.f1;
        self.terms.values().any(|c| c.trig_degree(r.clone()) > 0)
    }

    /// `V^β` in normal-ordered form.
    fn basis_raw(&self, beta: &[u32]) -> Weyl<Coeff> {
        let d = &self.dims;
        let n = d.nvars();
        let vx = Weyl::zero(n).plus_term(unit(n, 0), Coeff::monomial(1 + d.a1 + d.a2, vec![], Scalar::i().neg()));
        let rest: u32 = beta[1..].iter().sum();
        let xw: u32 = d.weight(beta) - beta[0] * (1 + d.a1 + d.a2);
        let mut tail = beta.to_vec();
        tail[0] = 0;
        let t = Weyl::zero(n).plus_term(tail, Coeff::monomial(xw, vec![], Scalar::i_pow(3 * rest as i64)));
        vx.pow(beta[0]).compose(&t)
    }

    pub fn to_raw(&self) -> Weyl<Coeff> {
        let mut out = Weyl::zero(self.dims.nvars());
        for (b, a) in &self.terms {
            out = out.add(&self.basis_raw(b).left_mul(a));
        }
        out
    }

    /// Inverse of [`ADiffOp::to_raw`]; fails unless the operator lies in the
    /// algebra generated by the frame.
    pub fn from_raw(dims: Dims, raw: &Weyl<Coeff>) -> Result<ADiffOp, ModelError> {
        let mut r = raw.clone();
        let mut out = ADiffOp::zero(dims);
        while let Some(m) = r.order() {
            let top: Vec<(Vec<u32>, Coeff)> =
                r.terms.iter().filter(|(b, _)| b.iter().sum::<u32>() == m).map(|(b, c)| (b.clone(), c.clone())).collect();
            let mut piece = ADiffOp::zero(dims);
            for (b, c) in top {
                let a = c
                    .div_x(dims.weight(&b))
                    .ok_or_else(|| ModelError::NotAOperator(format!("∂^{b:?} with coefficient {}", c.render(&dims.theta_names()))))?
                    .scale(&Scalar::i_pow(m as i64));
                piece.add_term(b, a);
            }
            r = r.sub(&piece.to_raw());
            out = out.add(&piece);
        }
        Ok(out)
    }

    pub fn compose(&self, o: &ADiffOp) -> Result<ADiffOp, ModelError> {
        if self.dims != o.dims {
            return Err(ModelError::Dims("operators live on different towers".into()));
        }
        ADiffOp::from_raw(self.dims, &self.to_raw().compose(&o.to_raw()))
    }

    /// Formal adjoint for `dx dy dz dw`.
    pub fn adjoint(&self) -> Result<ADiffOp, ModelError> {
        let n = self.dims.nvars();
        let mut out = Weyl::zero(n);
        for (b, c) in &self.to_raw().terms {
            let sign: u32 = b.iter().sum();
            let d = Weyl::zero(n).plus_term(b.clone(), Coeff::one()).compose(&Weyl::mult(n, c.conj()));
            out = out.add(&if sign % 2 == 1 { d.neg() } else { d });
        }
        ADiffOp::from_raw(self.dims, &out)
    }

    pub fn principal_symbol(&self) -> SymbolPoly {
        let m = self.order();
        SymbolPoly {
            dims: self.dims,
            order: m,
            terms: self.terms.iter().filter(|(b, _)| b.iter().sum::<u32>() == m).map(|(b, c)| (b.clone(), c.clone())).collect(),
        }
    }

    pub fn from_spec(dims: Dims, spec: &OpSpec) -> Result<ADiffOp, ModelError> {
        let mut out = ADiffOp::zero(dims);
        let bad = |m: String| ModelError::Spec(m);
        let nd = dims.b + dims.f1 + dims.f2;
        for t in spec.terms() {
            let pad = |v: &[u32], len: usize, what: &str| -> Result<Vec<u32>, ModelError> {
                match v.len() {
                    0 => Ok(vec![0; len]),
                    l if l == len => Ok(v.to_vec()),
                    l => Err(bad(format!("{what} has length {l}, expected {len}"))),
                }
            };
            let mut beta = vec![t.alpha];
            beta.extend(pad(&t.i, dims.b, "I")?);
            beta.extend(pad(&t.j, dims.f1, "J")?);
            beta.extend(pad(&t.k, dims.f2, "K")?);
            let xp = match &t.coeff.x_poly {
                None => Coeff::constant(0, Scalar::one()),
                Some(v) => {
                    let mut c = Coeff::default();
                    for (n, q) in v.iter().enumerate() {
                        let q = rational::parse(q).map_err(|e| bad(e.to_string()))?;
                        c = c.add(&Coeff::monomial(n as u32, vec![], Scalar::from_q(q)));
                    }
                    c
                }
            };
            let tp = match &t.coeff.trig {
                None => Coeff::constant(0, Scalar::one()),
                Some(v) => {
                    let mut c = Coeff::default();
                    for tr in v {
                        if tr.k.len() != nd {
                            return Err(bad(format!("frequency {:?} should have length {nd}", tr.k)));
                        }
                        let s = Scalar::parse(&tr.c).map_err(|e| bad(e.to_string()))?;
                        c = c.add(&Coeff::monomial(0, tr.k.clone(), s));
                    }
                    c
                }
            };
            out.add_term(beta, xp.mul(&tp));
        }
        Ok(out)
    }

    pub fn from_json(dims: Dims, text: &str) -> Result<ADiffOp, ModelError> {
        let spec: OpSpec = serde_json::from_str(text).map_err(|e| ModelError::Spec(e.to_string()))?;
        ADiffOp::from_spec(dims, &spec)
    }

    /// One spec term per monomial `s x^n e^{2πik·θ} V^β`.
    pub fn to_spec(&self) -> OpSpec {
        let d = &self.dims;
        let nd = d.b + d.f1 + d.f2;
        let mut terms = Vec::new();
        for (b, c) in &self.terms {
            for ((n, k), s) in &c.terms {
                let mut xp = vec!["0".to_string(); *n as usize + 1];
                xp[*n as usize] = "1".into();
                let kk: Vec<i64> = (0..nd).map(|j| Coeff::freq(k, j)).collect();
                terms.push(TermSpec {
                    alpha: b[0],
                    i: b[1..1 + d.b].to_vec(),
                    j: b[1 + d.b..1 + d.b + d.f1].to_vec(),
                    k: b[1 + d.b + d.f1..].to_vec(),
                    coeff: CoeffSpec { x_poly: Some(xp), trig: Some(vec![TrigSpec { k: kk, c: s.to_string() }]) },
                });
            }
        }
        OpSpec::Terms { terms }
    }
}

fn unit(n: usize, v: usize) -> Vec<u32> {
    let mut b = vec![0; n];
    b[v] = 1;
    b
}

impl fmt::Display for ADiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.dims.frame_names();
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(b, c)| format!("[{}]{}", c.render(&self.dims.theta_names()), monomial(&names, b)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn monomial(names: &[String], b: &[u32]) -> String {
    b.iter()
        .zip(names)
        .filter(|(e, _)| **e > 0)
        .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect::<Vec<_>>()
        .join("")
}

/// Homogeneous polynomial in the covariables `(τ, η, ζ, θ)` with `Coeff`
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolPoly {
    pub dims: Dims,
    pub order: u32,
    pub terms: BTreeMap<Vec<u32>, Coeff>,
}

impl SymbolPoly {
    pub fn mul(&self, o: &SymbolPoly) -> SymbolPoly {
        let mut terms: BTreeMap<Vec<u32>, Coeff> = BTreeMap::new();
        for (b, c) in &self.terms {
            for (g, d) in &o.terms {
                let key: Vec<u32> = b.iter().zip(g).map(|(x, y)| x + y).collect();
                let v = c.mul(d);
                let e = terms.remove(&key).map_or(v.clone(), |old| old.add(&v));
                if !e.is_zero() {
                    terms.insert(key, e);
                }
            }
        }
        SymbolPoly { dims: self.dims, order: self.order + o.order, terms }
    }

    /// Numerical value at `(x, θ)` and covector `ξ`.
    pub fn eval_f64(&self, x: f64, theta: &[f64], xi: &[f64]) -> num::complex::Complex<f64> {
        self.terms
            .iter()
            .map(|(b, c)| c.eval_f64(x, theta) * b.iter().zip(xi).map(|(e, v)| v.powi(*e as i32)).product::<f64>())
            .sum()
    }

    /// Constant-coefficient `Σ c_v ξ_v²` with all `c_v > 0` rational:
    /// positive definite, decided exactly.
    pub fn is_positive_diagonal_quadratic(&self) -> bool {
        let n = self.dims.nvars();
        self.order == 2
            && self.terms.len() == n
            && self.terms.iter().all(|(b, c)| {
                b.iter().filter(|e| **e == 2).count() == 1
                    && c.terms.len() == 1
                    && c.terms.iter().all(|((xn, k), s)| {
                        *xn == 0
                            && k.is_empty()
                            && s.as_cq().is_some_and(|q| num::Zero::is_zero(&q.im) && num::Signed::is_positive(&q.re))
                    })
            })
    }
}

impl fmt::Display for SymbolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.dims.covariable_names();
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(b, c)| {
                let m = monomial(&names, b);
                let cs = c.render(&self.dims.theta_names());
                if cs == "(1)" {
                    m
                } else {
                    format!("{cs}{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Dims {
        Dims { a1: 1, a2: 1, b: 1, f1: 1, f2: 1 }
    }

    fn vx() -> ADiffOp {
        ADiffOp::term(d(), vec![1, 0, 0, 0], Coeff::constant(0, Scalar::one()))
    }

    fn vy() -> ADiffOp {
        ADiffOp::term(d(), vec![0, 1, 0, 0], Coeff::constant(0, Scalar::one()))
    }

    #[test]
    fn raw_round_trip() {
        let p = ADiffOp::laplacian(d()).add(&ADiffOp::term(d(), vec![1, 0, 1, 0], Coeff::monomial(1, vec![0, 1, 1], Scalar::i())));
        assert_eq!(ADiffOp::from_raw(d(), &p.to_raw()).unwrap(), p);
    }

    #[test]
    fn commutator_of_frame() {
        // [V_x, V_y] = −i(a1+a2) x^{a1+a2} V_y
        let c = vx().compose(&vy()).unwrap().sub(&vy().compose(&vx()).unwrap());
        let want = ADiffOp::term(d(), vec![0, 1, 0, 0], Coeff::monomial(2, vec![], Scalar::from_int(-2).mul(&Scalar::i())));
        assert_eq!(c, want);
    }

    #[test]
    fn not_an_a_operator() {
        let n = d().nvars();
        let raw = Weyl::zero(n).plus_term(vec![1, 0, 0, 0], Coeff::monomial(1, vec![], Scalar::one()));
        assert!(matches!(ADiffOp::from_raw(d(), &raw), Err(ModelError::NotAOperator(_))));
    }

    #[test]
    fn adjoint_of_frame() {
        // (x^3 D_x)* = x^3 D_x − 3i x^2
        let want = vx().add(&ADiffOp::term(d(), vec![0; 4], Coeff::monomial(2, vec![], Scalar::from_int(-3).mul(&Scalar::i()))));
        assert_eq!(vx().adjoint().unwrap(), want);
        let l = ADiffOp::laplacian(d());
        assert_eq!(l.adjoint().unwrap().adjoint().unwrap(), l);
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"terms":[{"alpha":2,"coeff":{}},{"K":[2],"coeff":{"x_poly":["1","0","1/2"],"trig":[{"k":[0,0,1],"c":"1+i"}]}}]}"#;
        let p = ADiffOp::from_json(d(), json).unwrap();
        assert_eq!(p.order(), 2);
        assert_eq!(p.fibre_trig_degree(), 1);
        let back = ADiffOp::from_spec(d(), &p.to_spec()).unwrap();
        assert_eq!(back, p);
        assert!(ADiffOp::from_json(d(), r#"[{"I":[1,1],"coeff":{}}]"#).is_err());
    }

    #[test]
    fn symbols() {
        let l = ADiffOp::laplacian(d());
        let s = l.principal_symbol();
        assert!(s.is_positive_diagonal_quadratic());
        assert_eq!(s.to_string(), "τ^2 + η^2 + ζ^2 + θ^2");
        let ll = l.compose(&l).unwrap();
        assert_eq!(ll.principal_symbol(), s.mul(&s));
    }
}
