//! Exact scalars in `ℚ(i)[π]`: enough to write Fourier symbols on tori of
//! period one (`D_w e^{2πikw} = 2πk e^{2πikw}`) without rounding.

use crate::rational::{self, int, Rational};
use num::complex::Complex;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type CQ = Complex<Rational>;

pub fn cq(re: Rational, im: Rational) -> CQ {
    Complex::new(re, im)
}

fn cq_is_zero(c: &CQ) -> bool {
    c.re.is_zero() && c.im.is_zero()
}

/// Polynomial in `π` with Gaussian-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scalar(BTreeMap<u32, CQ>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar {0:?}")]
pub struct ScalarParseError(pub String);

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar(BTreeMap::new())
    }

    pub fn one() -> Scalar {
        Scalar::from_q(Rational::one())
    }

    pub fn from_q(q: Rational) -> Scalar {
        Scalar::from_cq(cq(q, Rational::zero()))
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_q(int(n))
    }

    pub fn from_cq(c: CQ) -> Scalar {
        Scalar::term(0, c)
    }

    pub fn i() -> Scalar {
        Scalar::from_cq(cq(Rational::zero(), Rational::one()))
    }

    /// `c π^n`.
    pub fn term(n: u32, c: CQ) -> Scalar {
        let mut m = BTreeMap::new();
        if !cq_is_zero(&c) {
            m.insert(n, c);
        }
        Scalar(m)
    }

    pub fn pi_pow(n: u32) -> Scalar {
        Scalar::term(n, cq(Rational::one(), Rational::zero()))
    }

    /// `i^n`.
    pub fn i_pow(n: i64) -> Scalar {
        match n.rem_euclid(4) {
            0 => Scalar::from_int(1),
            1 => Scalar::i(),
            2 => Scalar::from_int(-1),
            _ => Scalar::i().neg(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        let mut m = self.0.clone();
        for (k, c) in &o.0 {
            let v = m.get(k).cloned().unwrap_or_else(CQ::zero) + c;
            if cq_is_zero(&v) {
                m.remove(k);
            } else {
                m.insert(*k, v);
            }
        }
        Scalar(m)
    }

    pub fn neg(&self) -> Scalar {
        Scalar(self.0.iter().map(|(k, c)| (*k, -c.clone())).collect())
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (k, c) in &self.0 {
            for (l, d) in &o.0 {
                out = out.add(&Scalar::term(k + l, c * d));
            }
        }
        out
    }

    pub fn scale_q(&self, q: &Rational) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar(self.0.iter().map(|(k, c)| (*k, c * q.clone())).collect())
    }

    pub fn scale_int(&self, n: i64) -> Scalar {
        self.scale_q(&int(n))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        (0..e).fold(Scalar::one(), |acc, _| acc.mul(self))
    }

    pub fn conj(&self) -> Scalar {
        Scalar(self.0.iter().map(|(k, c)| (*k, c.conj())).collect())
    }

    /// The value when free of `π`.
    pub fn as_cq(&self) -> Option<CQ> {
        match self.0.len() {
            0 => Some(CQ::zero()),
            1 => self.0.get(&0).cloned(),
            _ => None,
        }
    }

    /// Coefficient of `π^k`.
    pub fn pi_coeff(&self, k: u32) -> CQ {
        self.0.get(&k).cloned().unwrap_or_else(CQ::zero)
    }

    /// Powers of `π` that occur.
    pub fn pi_degrees(&self) -> Vec<u32> {
        self.0.keys().copied().collect()
    }

    /// No imaginary part (`π` is real).
    pub fn is_real(&self) -> bool {
        self.0.values().all(|c| c.im.is_zero())
    }

    pub fn to_c64(&self) -> Complex<f64> {
        let mut out = Complex::new(0.0, 0.0);
        for (k, c) in &self.0 {
            let p = std::f64::consts::PI.powi(*k as i32);
            out += Complex::new(rational::to_f64(&c.re) * p, rational::to_f64(&c.im) * p);
        }
        out
    }

    /// `|s|²` as a real scalar.
    pub fn norm_sqr(&self) -> Scalar {
        self.mul(&self.conj())
    }

    /// Parse sums like `-3+2i`, `4pi^2`, `1/2 - i/3`, `i`.
    pub fn parse(text: &str) -> Result<Scalar, ScalarParseError> {
        let err = || ScalarParseError(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().replace('π', "pi");
        if s.is_empty() {
            return Err(err());
        }
        let mut terms = Vec::new();
        let mut cur = String::new();
        for (idx, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && idx > 0 && !s[..idx].ends_with(['e', '^']) {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        terms.push(cur);
        let mut out = Scalar::zero();
        for t in terms {
            let (neg, body) = match t.strip_prefix('-') {
                Some(r) => (true, r),
                None => (false, t.strip_prefix('+').unwrap_or(&t)),
            };
            if body.is_empty() {
                return Err(err());
            }
            let mut rest = body.to_string();
            let mut pi = 0u32;
            if let Some(pos) = rest.find("pi") {
                let tail = rest[pos + 2..].to_string();
                pi = if let Some(e) = tail.strip_prefix('^') {
                    e.parse().map_err(|_| err())?
                } else if tail.is_empty() {
                    1
                } else {
                    return Err(err());
                };
                rest.truncate(pos);
            }
            let mut imag = false;
            if let Some(r) = rest.strip_suffix('i') {
                imag = true;
                rest = r.to_string();
            } else if let Some(r) = rest.strip_prefix('i') {
                imag = true;
                rest = r.to_string();
                if let Some(d) = rest.strip_prefix('/') {
                    rest = format!("1/{d}");
                }
            }
            let rest = rest.trim_end_matches('*');
            let q = if rest.is_empty() { Rational::one() } else { rational::parse(rest).map_err(|_| err())? };
            let q = if neg { -q } else { q };
            let c = if imag { cq(Rational::zero(), q) } else { cq(q, Rational::zero()) };
            out = out.add(&Scalar::term(pi, c));
        }
        Ok(out)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().rev() {
            let pi = match k {
                0 => String::new(),
                1 => "π".into(),
                n => format!("π^{n}"),
            };
            for (part, unit) in [(&c.re, ""), (&c.im, "i")] {
                if part.is_zero() {
                    continue;
                }
                let neg = part.is_negative();
                let mag = part.abs();
                if !first {
                    write!(f, "{}", if neg { " - " } else { " + " })?;
                } else if neg {
                    write!(f, "-")?;
                }
                first = false;
                let num = if mag.is_one() && !(unit.is_empty() && pi.is_empty()) {
                    String::new()
                } else {
                    rational::Show(&mag).to_string()
                };
                write!(f, "{num}{unit}{pi}")?;
            }
        }
        Ok(())
    }
}

/// Decimal rendering with 17 significant digits.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..17).contains(&e) {
        let decimals = (16 - e).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.16e}", x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn parse_and_print() {
        assert_eq!(Scalar::parse("-3+2i").unwrap(), Scalar::from_cq(cq(int(-3), int(2))));
        assert_eq!(Scalar::parse("4pi^2").unwrap(), Scalar::pi_pow(2).scale_int(4));
        assert_eq!(Scalar::parse("i").unwrap(), Scalar::i());
        assert_eq!(Scalar::parse("1/2-i/3").unwrap(), Scalar::from_cq(cq(frac(1, 2), frac(-1, 3))));
        assert_eq!(Scalar::parse("-1").unwrap(), Scalar::from_int(-1));
        assert!(Scalar::parse("").is_err());
        assert!(Scalar::parse("3x").is_err());
        assert_eq!(Scalar::parse("4pi^2 - 1").unwrap().to_string(), "4π^2 - 1");
        assert_eq!(Scalar::parse("-3+2i").unwrap().to_string(), "-3 + 2i");
    }

    #[test]
    fn arithmetic() {
        let a = Scalar::parse("1+i").unwrap();
        assert_eq!(a.mul(&a), Scalar::parse("2i").unwrap());
        assert_eq!(a.norm_sqr(), Scalar::from_int(2));
        let p = Scalar::pi_pow(1).scale_int(2);
        assert_eq!(p.mul(&p).sub(&Scalar::parse("4pi^2").unwrap()), Scalar::zero());
        assert!((Scalar::pi_pow(2).to_c64().re - std::f64::consts::PI.powi(2)).abs() < 1e-12);
        assert_eq!(Scalar::i_pow(3), Scalar::i().neg());
    }

    #[test]
    fn digits() {
        assert_eq!(sig17(1.0), "1");
        assert_eq!(sig17(13f64.sqrt()), "3.6055512754639891");
        assert_eq!(sig17(0.25), "0.25");
    }
}
