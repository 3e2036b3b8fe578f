//! Differential operators with coefficients in a differential ring, composed
//! exactly with the Leibniz rule, and the two coefficient rings used here:
//! Laurent polynomials over `ℚ` (for blowup coordinates) and
//! `x`-polynomials times trigonometric polynomials over `ℚ(i)[π]`.

use super::scalar::Scalar;
use crate::rational::{int, Rational};
use num::Zero;
use std::collections::BTreeMap;

pub trait DiffRing: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale_int(&self, n: i64) -> Self;
    /// Partial derivative in variable `var`.
    fn deriv(&self, var: usize) -> Self;

    fn neg(&self) -> Self {
        self.scale_int(-1)
    }
}

fn binom(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// `Σ c_β ∂^β` with coefficients on the left.
#[derive(Debug, Clone, PartialEq)]
pub struct Weyl<C> {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, C>,
}

impl<C: DiffRing> Weyl<C> {
    pub fn zero(nvars: usize) -> Self {
        Weyl { nvars, terms: BTreeMap::new() }
    }

    /// Multiplication by `c`.
    pub fn mult(nvars: usize, c: C) -> Self {
        Weyl::zero(nvars).plus_term(vec![0; nvars], c)
    }

    /// `∂_var`.
    pub fn partial(nvars: usize, var: usize) -> Self {
        let mut b = vec![0; nvars];
        b[var] = 1;
        Weyl::zero(nvars).plus_term(b, C::one())
    }

    pub fn plus_term(mut self, beta: Vec<u32>, c: C) -> Self {
        self.add_term(beta, c);
        self
    }

    pub fn add_term(&mut self, beta: Vec<u32>, c: C) {
        let v = match self.terms.get(&beta) {
            Some(old) => old.add(&c),
            None => c,
        };
        if v.is_zero() {
            self.terms.remove(&beta);
        } else {
            self.terms.insert(beta, v);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (b, c) in &o.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Weyl { nvars: self.nvars, terms: self.terms.iter().map(|(b, c)| (b.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Left multiplication by a coefficient.
    pub fn left_mul(&self, c: &C) -> Self {
        let mut out = Weyl::zero(self.nvars);
        for (b, d) in &self.terms {
            out.add_term(b.clone(), c.mul(d));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total derivative count (`None` for the zero operator).
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|b| b.iter().sum()).max()
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Self) -> Self {
        let mut out = Weyl::zero(self.nvars);
        for (beta, c) in &self.terms {
            for (gamma, d) in &o.terms {
                for delta in sub_indices(beta) {
                    let mut k = 1i64;
                    let mut dd = d.clone();
                    for (v, (&bv, &dv)) in beta.iter().zip(&delta).enumerate() {
                        k *= binom(bv, dv);
                        for _ in 0..dv {
                            dd = dd.deriv(v);
                        }
                    }
                    if dd.is_zero() {
                        continue;
                    }
                    let key: Vec<u32> = (0..self.nvars).map(|v| beta[v] - delta[v] + gamma[v]).collect();
                    out.add_term(key, c.mul(&dd).scale_int(k));
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Weyl::mult(self.nvars, C::one());
        for _ in 0..e {
            out = out.compose(self);
        }
        out
    }

    /// Map every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Weyl::zero(self.nvars);
        for (b, c) in &self.terms {
            out.add_term(b.clone(), f(c));
        }
        out
    }
}

/// All multi-indices `δ ≤ β`.
pub fn sub_indices(beta: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &b in beta {
        out = out.into_iter().flat_map(|p: Vec<u32>| (0..=b).map(move |d| [p.clone(), vec![d]].concat())).collect();
    }
    out
}

/// Laurent polynomial over `ℚ` in a fixed number of variables.
#[derive(Debug, Clone, Eq)]
pub struct LPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<i64>, Rational>,
}

impl LPoly {
    pub fn constant(nvars: usize, q: Rational) -> LPoly {
        LPoly::monomial(nvars, vec![0; nvars], q)
    }

    pub fn monomial(nvars: usize, exps: Vec<i64>, q: Rational) -> LPoly {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(exps, q);
        }
        LPoly { nvars, terms }
    }

    /// `q · v^e` in a single variable.
    pub fn var_pow(nvars: usize, v: usize, e: i64, q: Rational) -> LPoly {
        let mut exps = vec![0; nvars];
        exps[v] = e;
        LPoly::monomial(nvars, exps, q)
    }

    pub fn zero_in(nvars: usize) -> LPoly {
        LPoly { nvars, terms: BTreeMap::new() }
    }

    fn add_mono(&mut self, e: Vec<i64>, q: Rational) {
        let v = self.terms.get(&e).cloned().unwrap_or_else(Rational::zero) + q;
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn pow(&self, e: u32) -> LPoly {
        (0..e).fold(LPoly::constant(self.nvars, int(1)), |acc, _| acc.mul(self))
    }

    /// Substitute a polynomial for every variable (`images[v]` in the new
    /// ring).  Negative powers are only allowed for monomial images.
    pub fn subst(&self, images: &[LPoly], target_vars: usize) -> Option<LPoly> {
        let mut out = LPoly::zero_in(target_vars);
        for (e, q) in &self.terms {
            let mut m = LPoly::constant(target_vars, q.clone());
            for (v, &k) in e.iter().enumerate() {
                if k >= 0 {
                    m = m.mul(&images[v].pow(k as u32));
                } else {
                    let img = &images[v];
                    if img.terms.len() != 1 {
                        return None;
                    }
                    let (ie, iq) = img.terms.iter().next().expect("one term");
                    let inv = LPoly::monomial(target_vars, ie.iter().map(|x| -x).collect(), Rational::from_integer(1.into()) / iq);
                    m = m.mul(&inv.pow((-k) as u32));
                }
            }
            out = out.add(&m);
        }
        Some(out)
    }

    /// Set variable `v` to zero; `None` if it occurs with a negative power.
    pub fn at_zero(&self, v: usize) -> Option<LPoly> {
        let mut out = LPoly::zero_in(self.nvars);
        for (e, q) in &self.terms {
            if e[v] < 0 {
                return None;
            }
            if e[v] == 0 {
                out.add_mono(e.clone(), q.clone());
            }
        }
        Some(out)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&vec![0; self.nvars]).cloned(),
            _ => None,
        }
    }

    /// Render with the given variable names.
    pub fn render(&self, names: &[String]) -> String {
        use crate::rational::Show;
        use num::{One, Signed};
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (e, q)) in self.terms.iter().rev().enumerate() {
            let mono: String = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k != 0)
                .map(|(v, &k)| if k == 1 { names[v].clone() } else { format!("{}^{}", names[v], k) })
                .collect::<Vec<_>>()
                .join("");
            let neg = q.is_negative();
            if idx > 0 {
                s.push_str(if neg { " − " } else { " + " });
            } else if neg {
                s.push('−');
            }
            let mag = q.abs();
            if !mag.is_one() || mono.is_empty() {
                s.push_str(&Show(&mag).to_string());
            }
            s.push_str(&mono);
        }
        s
    }
}

impl DiffRing for LPoly {
    fn zero() -> Self {
        LPoly::zero_in(0)
    }
    fn one() -> Self {
        LPoly::constant(0, int(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let n = self.nvars.max(o.nvars);
        let mut out = self.widen(n);
        for (e, q) in &o.widen(n).terms {
            out.add_mono(e.clone(), q.clone());
        }
        out
    }
    fn mul(&self, o: &Self) -> Self {
        let n = self.nvars.max(o.nvars);
        let (a, b) = (self.widen(n), o.widen(n));
        let mut out = LPoly::zero_in(n);
        for (e, q) in &a.terms {
            for (f, r) in &b.terms {
                out.add_mono(e.iter().zip(f).map(|(x, y)| x + y).collect(), q * r);
            }
        }
        out
    }
    fn scale_int(&self, n: i64) -> Self {
        let mut out = LPoly::zero_in(self.nvars);
        for (e, q) in &self.terms {
            out.add_mono(e.clone(), q * int(n));
        }
        out
    }
    fn deriv(&self, var: usize) -> Self {
        let mut out = LPoly::zero_in(self.nvars);
        for (e, q) in &self.terms {
            if var < e.len() && e[var] != 0 {
                let mut f = e.clone();
                f[var] -= 1;
                out.add_mono(f, q * int(e[var]));
            }
        }
        out
    }
}

impl PartialEq for LPoly {
    fn eq(&self, o: &Self) -> bool {
        let n = self.nvars.max(o.nvars);
        self.widen(n).terms == o.widen(n).terms
    }
}

impl LPoly {
    /// Constants built by the trait have no variables; pad them.
    fn widen(&self, n: usize) -> LPoly {
        if self.nvars == n {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(e, q)| {
                let mut f = e.clone();
                f.resize(n, 0);
                (f, q.clone())
            })
            .collect();
        LPoly { nvars: n, terms }
    }
}

/// `Σ s · x^n e^{2πi k·θ}`: polynomial in `x`, trigonometric polynomial in
/// the periodic variables `θ`, coefficients in `ℚ(i)[π]`.  Variable 0 is `x`,
/// variable `1 + j` is `θ_j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coeff {
    pub terms: BTreeMap<(u32, Vec<i64>), Scalar>,
}

impl Coeff {
    pub fn zero_c() -> Coeff {
        Coeff::default()
    }

    pub fn constant(d: usize, s: Scalar) -> Coeff {
        Coeff::monomial(0, vec![0; d], s)
    }

    pub fn monomial(n: u32, k: Vec<i64>, s: Scalar) -> Coeff {
        let mut out = Coeff::default();
        if !s.is_zero() {
            out.add_mono((n, k), s);
        }
        out
    }

    /// Frequency `k_j` of a stored key.
    pub fn freq(k: &[i64], j: usize) -> i64 {
        k.get(j).copied().unwrap_or(0)
    }

    fn add_mono(&mut self, key: (u32, Vec<i64>), s: Scalar) {
        // Frequency vectors are stored without trailing zeros.
        let (n, mut k) = key;
        while k.last() == Some(&0) {
            k.pop();
        }
        let key = (n, k);
        let v = match self.terms.get(&key) {
            Some(o) => o.add(&s),
            None => s,
        };
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn scale(&self, s: &Scalar) -> Coeff {
        let mut out = Coeff::default();
        for (k, v) in &self.terms {
            out.add_mono(k.clone(), v.mul(s));
        }
        out
    }

    /// Complex conjugate (frequencies flip sign).
    pub fn conj(&self) -> Coeff {
        let mut out = Coeff::default();
        for ((n, k), v) in &self.terms {
            out.add_mono((*n, k.iter().map(|x| -x).collect()), v.conj());
        }
        out
    }

    /// The `x^0` part.
    pub fn at_x0(&self) -> Coeff {
        Coeff { terms: self.terms.iter().filter(|((n, _), _)| *n == 0).map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    /// Divide by `x^w`; `None` unless every term carries at least `x^w`.
    pub fn div_x(&self, w: u32) -> Option<Coeff> {
        let mut out = Coeff::default();
        for ((n, k), v) in &self.terms {
            if *n < w {
                return None;
            }
            out.add_mono((n - w, k.clone()), v.clone());
        }
        Some(out)
    }

    pub fn mul_x(&self, w: u32) -> Coeff {
        Coeff { terms: self.terms.iter().map(|((n, k), v)| ((n + w, k.clone()), v.clone())).collect() }
    }

    /// Largest `|k_j|` over the given periodic variables.
    pub fn trig_degree(&self, vars: std::ops::Range<usize>) -> u64 {
        self.terms.keys().flat_map(|(_, k)| vars.clone().map(|j| Coeff::freq(k, j).unsigned_abs()).collect::<Vec<_>>()).max().unwrap_or(0)
    }

    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(|(n, _)| *n).max().unwrap_or(0)
    }

    /// Evaluate the periodic variables in `vars` at points of the quarter
    /// lattice (exact, since `e^{2πik/4}` is a power of `i`); the remaining
    /// frequencies are kept.
    pub fn eval_quarter(&self, vars: std::ops::Range<usize>, p4: &[i64]) -> Coeff {
        let mut out = Coeff::default();
        for ((n, k), v) in &self.terms {
            let phase: i64 = vars.clone().zip(p4).map(|(j, b)| Coeff::freq(k, j) * b).sum();
            let mut k2 = k.clone();
            for j in vars.clone() {
                if j < k2.len() {
                    k2[j] = 0;
                }
            }
            out.add_mono((*n, k2), v.mul(&Scalar::i_pow(phase)));
        }
        out
    }

    /// Numerical value at a point `(x, θ)`.
    pub fn eval_f64(&self, x: f64, theta: &[f64]) -> num::complex::Complex<f64> {
        let mut out = num::complex::Complex::new(0.0, 0.0);
        for ((n, k), v) in &self.terms {
            let ph: f64 = k.iter().zip(theta).map(|(a, b)| *a as f64 * b).sum::<f64>() * 2.0 * std::f64::consts::PI;
            out += v.to_c64() * x.powi(*n as i32) * num::complex::Complex::new(ph.cos(), ph.sin());
        }
        out
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((n, k), v)| {
                let mut s = format!("({v})");
                if *n > 0 {
                    s.push_str(&if *n == 1 { "x".into() } else { format!("x^{n}") });
                }
                let phase: Vec<String> = k
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(j, &c)| if c == 1 { names[j].clone() } else { format!("{c}{}", names[j]) })
                    .collect();
                if !phase.is_empty() {
                    s.push_str(&format!("e(2πi({}))", phase.join("+")));
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

impl DiffRing for Coeff {
    fn zero() -> Self {
        Coeff::default()
    }
    fn one() -> Self {
        Coeff::monomial(0, vec![], Scalar::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_mono(k.clone(), v.clone());
        }
        out
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Coeff::default();
        for ((n, k), v) in &self.terms {
            for ((m, l), w) in &o.terms {
                let d = k.len().max(l.len());
                let key: Vec<i64> = (0..d).map(|j| k.get(j).copied().unwrap_or(0) + l.get(j).copied().unwrap_or(0)).collect();
                out.add_mono((n + m, key), v.mul(w));
            }
        }
        out
    }
    fn scale_int(&self, n: i64) -> Self {
        self.scale(&Scalar::from_int(n))
    }
    fn deriv(&self, var: usize) -> Self {
        let mut out = Coeff::default();
        for ((n, k), v) in &self.terms {
            if var == 0 {
                if *n > 0 {
                    out.add_mono((n - 1, k.clone()), v.scale_int(*n as i64));
                }
            } else {
                let kj = Coeff::freq(k, var - 1);
                if kj != 0 {
                    // ∂_θ e^{2πikθ} = 2πik e^{2πikθ}
                    let f = Scalar::i().mul(&Scalar::pi_pow(1)).scale_int(2 * kj);
                    out.add_mono((*n, k.clone()), v.mul(&f));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leibniz() {
        // ∂x ∘ x = x ∂x + 1
        let x = LPoly::var_pow(1, 0, 1, int(1));
        let d = Weyl::<LPoly>::partial(1, 0);
        let xm = Weyl::mult(1, x.clone());
        let lhs = d.compose(&xm);
        let rhs = xm.compose(&d).add(&Weyl::mult(1, LPoly::constant(1, int(1))));
        assert_eq!(lhs, rhs);
        // (x∂x)² = x²∂x² + x∂x
        let e = xm.compose(&d);
        let sq = e.compose(&e);
        let want = Weyl::zero(1).plus_term(vec![2], x.pow(2)).plus_term(vec![1], x);
        assert_eq!(sq, want);
    }

    #[test]
    fn trig_derivative() {
        let c = Coeff::monomial(2, vec![3], Scalar::one());
        let dx = c.deriv(0);
        assert_eq!(dx, Coeff::monomial(1, vec![3], Scalar::from_int(2)));
        let dt = c.deriv(1);
        assert_eq!(dt, Coeff::monomial(2, vec![3], Scalar::parse("6i pi").unwrap()));
        assert_eq!(c.eval_quarter(0..1, &[1]), Coeff::monomial(2, vec![], Scalar::i_pow(3)));
        assert_eq!(Coeff::one().add(&Coeff::constant(3, Scalar::one())), Coeff::constant(2, Scalar::from_int(2)));
    }

    #[test]
    fn substitution() {
        // t = 1 − x T in variables (x, T)
        let t = LPoly::constant(2, int(1)).add(&LPoly::monomial(2, vec![1, 1], int(-1)));
        let x = LPoly::var_pow(2, 0, 1, int(1));
        let p = LPoly::monomial(2, vec![-1, 1], int(1));
        let s = p.subst(&[x.clone(), t.clone()], 2).unwrap();
        assert_eq!(s, LPoly::monomial(2, vec![-1, 0], int(1)).add(&LPoly::monomial(2, vec![0, 1], int(-1))));
        assert!(LPoly::monomial(2, vec![0, -1], int(1)).subst(&[x, t], 2).is_none());
    }
}
