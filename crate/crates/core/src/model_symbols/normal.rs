//! Normal families `N̂(P)(p, μ)`: the operator on the fibre torus obtained by
//! freezing coefficients at `x = 0`, base point `p`, and replacing the base
//! frame fields by the covariables `μ = (τ, η, ζ)`.
//!
//! Base points are taken on the quarter lattice so that the frozen
//! coefficients stay exact; matrices are written in the Fourier modes
//! `e^{2πik·w}`, `|k|_∞ ≤ N`.

use super::algebra::{Coeff, DiffRing, Weyl};
use super::lift::lifted_frame;
use super::ops::ADiffOp;
use super::scalar::{sig17, Scalar};
use super::{Dims, ModelError};
use crate::rational::{self, int, Rational};
use nalgebra::DMatrix;
use num::complex::Complex;
use num::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Singular values at or below this count as zero.
pub const INVERTIBILITY_TOL: f64 = 1e-12;

type C64 = Complex<f64>;

/// A point `(y, z) = p4 / 4` of the base.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasePoint(pub Vec<i64>);

impl BasePoint {
    pub fn origin(d: &Dims) -> BasePoint {
        BasePoint(vec![0; d.b + d.f1])
    }

    pub fn from_rationals(d: &Dims, p: &[Rational]) -> Result<BasePoint, ModelError> {
        if p.len() != d.b + d.f1 {
            return Err(ModelError::BasePoint(format!("expected {} coordinates, got {}", d.b + d.f1, p.len())));
        }
        p.iter()
            .map(|q| {
                let v = q * int(4);
                if v.is_integer() {
                    Ok(v.to_integer().try_into().unwrap_or(0))
                } else {
                    Err(ModelError::BasePoint(format!("{} is not a multiple of 1/4", rational::Show(q))))
                }
            })
            .collect::<Result<_, _>>()
            .map(BasePoint)
    }

    pub fn parse(d: &Dims, text: &str) -> Result<BasePoint, ModelError> {
        if text.trim().is_empty() {
            return BasePoint::from_rationals(d, &[]);
        }
        let qs = text
            .split(',')
            .map(|s| rational::parse(s).map_err(|e| ModelError::BasePoint(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        BasePoint::from_rationals(d, &qs)
    }

    pub fn render(&self) -> Vec<String> {
        self.0.iter().map(|v| rational::Show(&rational::frac(*v, 4)).to_string()).collect()
    }

    /// All points of `{0, 1/4, 1/2, 3/4}^{b+f1}`.
    pub fn quarter_lattice(d: &Dims) -> Vec<BasePoint> {
        let mut pts = vec![vec![]];
        for _ in 0..d.b + d.f1 {
            pts = pts.into_iter().flat_map(|p: Vec<i64>| (0..4).map(move |v| [p.clone(), vec![v]].concat())).collect();
        }
        pts.into_iter().map(BasePoint).collect()
    }
}

/// `N̂(P)(p, ·)` as a polynomial in `μ` with fibre-operator coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalFamily {
    pub dims: Dims,
    pub point: BasePoint,
    /// `μ`-exponent → fibre operator (only `w`-derivatives, `x^0`).
    pub parts: BTreeMap<Vec<u32>, Weyl<Coeff>>,
    /// Fibre trigonometric degree of the coefficients.
    pub degree: u64,
}

pub fn normal_family(p: &ADiffOp, point: &BasePoint) -> Result<NormalFamily, ModelError> {
    let d = p.dims;
    if point.0.len() != d.b + d.f1 {
        return Err(ModelError::BasePoint(format!("expected {} coordinates", d.b + d.f1)));
    }
    let nb = d.base_vars();
    let n = d.nvars();
    let mut parts: BTreeMap<Vec<u32>, Weyl<Coeff>> = BTreeMap::new();
    for (beta, a) in &p.terms {
        let a0 = a.at_x0().eval_quarter(0..d.b + d.f1, &point.0);
        if a0.is_zero() {
            continue;
        }
        let kk: u32 = beta[nb..].iter().sum();
        let mut fib = vec![0u32; n];
        fib[nb..].copy_from_slice(&beta[nb..]);
        // D_w^K = (−i)^{|K|} ∂_w^K
        let term = Weyl::zero(n).plus_term(fib, a0.scale(&Scalar::i_pow(3 * kk as i64)));
        let e = parts.entry(beta[..nb].to_vec()).or_insert_with(|| Weyl::zero(n));
        *e = e.add(&term);
    }
    parts.retain(|_, w| !w.is_zero());
    Ok(NormalFamily { dims: d, point: point.clone(), parts, degree: p.fibre_trig_degree() })
}

fn modes(f2: usize, n: usize) -> Vec<Vec<i64>> {
    let n = n as i64;
    let mut out = vec![vec![]];
    for _ in 0..f2 {
        out = out.into_iter().flat_map(|m: Vec<i64>| (-n..=n).map(move |k| [m.clone(), vec![k]].concat())).collect();
    }
    out
}

impl NormalFamily {
    /// The fibre operator at an exact `μ`.
    pub fn at(&self, mu: &[Rational]) -> Weyl<Coeff> {
        let mut out = Weyl::zero(self.dims.nvars());
        for (e, w) in &self.parts {
            let m: Rational = e.iter().zip(mu).map(|(k, v)| num::pow(v.clone(), *k as usize)).product();
            out = out.add(&w.map_coeffs(|c| c.scale(&Scalar::from_q(m.clone()))));
        }
        out
    }

    /// Fourier matrix of a fibre operator on modes `|k|_∞ ≤ n`, exact.
    pub fn fibre_matrix(d: &Dims, op: &Weyl<Coeff>, n: usize) -> (Vec<Vec<i64>>, Vec<Vec<Scalar>>) {
        let ms = modes(d.f2, n);
        let index: BTreeMap<&Vec<i64>, usize> = ms.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let nb = d.base_vars();
        let off = d.b + d.f1;
        let mut a = vec![vec![Scalar::zero(); ms.len()]; ms.len()];
        for (col, k) in ms.iter().enumerate() {
            for (beta, c) in &op.terms {
                let kb = &beta[nb..];
                let order: u32 = kb.iter().sum();
                let mono: i64 = kb.iter().zip(k).map(|(e, v)| v.pow(*e)).product();
                // ∂^K e_k = (2πi)^{|K|} k^K e_k
                let f = Scalar::i_pow(order as i64).mul(&Scalar::pi_pow(order)).scale_int(mono * 2i64.pow(order));
                if f.is_zero() {
                    continue;
                }
                for ((_, j), s) in &c.terms {
                    let target: Vec<i64> = (0..d.f2).map(|m| k[m] + Coeff::freq(j, off + m)).collect();
                    if let Some(&row) = index.get(&target) {
                        a[row][col] = a[row][col].add(&s.mul(&f));
                    }
                }
            }
        }
        (ms, a)
    }

    /// Entries as polynomials in `μ`, converted to `f64` once.
    fn numeric_poly(&self, n: usize) -> (Vec<Vec<i64>>, Vec<(Vec<u32>, DMatrix<C64>)>, bool) {
        let mut out = Vec::new();
        let mut ms = modes(self.dims.f2, n);
        let mut diagonal = true;
        for (e, w) in &self.parts {
            let (m, a) = NormalFamily::fibre_matrix(&self.dims, w, n);
            ms = m;
            let k = a.len();
            let mat = DMatrix::from_fn(k, k, |i, j| a[i][j].to_c64());
            diagonal &= (0..k).all(|i| (0..k).all(|j| i == j || a[i][j].is_zero()));
            out.push((e.clone(), mat));
        }
        (ms, out, diagonal)
    }
}

/// `N̂(P)(p, μ)` on Fourier modes `|k|_∞ ≤ n`.
#[derive(Debug, Clone)]
pub struct FamilyMatrix {
    pub modes: Vec<Vec<i64>>,
    pub exact: Vec<Vec<Scalar>>,
    pub numeric: DMatrix<C64>,
}

impl FamilyMatrix {
    pub fn is_diagonal(&self) -> bool {
        self.exact.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, s)| i == j || s.is_zero()))
    }

    pub fn min_singular_value(&self) -> f64 {
        min_singular_value(&self.numeric, self.is_diagonal())
    }
}

fn check_truncation(p: &ADiffOp, n: usize) -> Result<(), ModelError> {
    let degree = p.fibre_trig_degree();
    if (n as u64) < degree {
        return Err(ModelError::Truncation { n, degree });
    }
    Ok(())
}

pub fn normal_family_matrix(p: &ADiffOp, point: &BasePoint, mu: &[Rational], n: usize) -> Result<FamilyMatrix, ModelError> {
    check_truncation(p, n)?;
    if mu.len() != p.dims.base_vars() {
        return Err(ModelError::Dims(format!("μ needs {} components", p.dims.base_vars())));
    }
    let nf = normal_family(p, point)?;
    let (modes, exact) = NormalFamily::fibre_matrix(&p.dims, &nf.at(mu), n);
    let k = exact.len();
    let numeric = DMatrix::from_fn(k, k, |i, j| exact[i][j].to_c64());
    Ok(FamilyMatrix { modes, exact, numeric })
}

fn min_singular_value(m: &DMatrix<C64>, diagonal: bool) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    if diagonal {
        return (0..m.nrows()).map(|i| m[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    }
    m.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Centered cubic lattice in `μ`-space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    #[serde(with = "rational::serde_q")]
    pub radius: Rational,
    #[serde(with = "rational::serde_q")]
    pub step: Rational,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { radius: int(10), step: rational::frac(1, 2) }
    }
}

impl GridSpec {
    fn axis(&self) -> Vec<Rational> {
        let m = (&self.radius / &self.step).floor().to_integer();
        let m: i64 = m.try_into().unwrap_or(0);
        (-m..=m).map(|i| int(i) * self.step.clone()).collect()
    }

    fn point(&self, axis: &[Rational], dim: usize, mut idx: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); dim];
        for c in v.iter_mut().rev() {
            *c = axis[idx % axis.len()].clone();
            idx /= axis.len();
        }
        v
    }
}

/// How invertibility beyond the grid is argued.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Tail {
    /// Only the grid was checked.
    GridOnly,
    /// A proof valid for all `μ`, stated in words.
    Analytic(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub base_point: Vec<String>,
    pub mu: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub fully_elliptic: bool,
    pub symbol_elliptic: bool,
    /// `exact` or `sampled`.
    pub symbol_check: String,
    #[serde(serialize_with = "ser_sig17")]
    pub min_singular_value: f64,
    pub argmin: GridPoint,
    pub grid: GridSpec,
    pub grid_points: usize,
    pub base_points: usize,
    pub modes: usize,
    pub tail: String,
}

fn ser_sig17<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&sig17(*x))
}

/// Symbol ellipticity: exact for constant positive diagonal quadratics,
/// otherwise sampled at quarter-lattice points, `x ∈ {0, 1/2}`, and the
/// covectors `±e_v` and `(±1, …, ±1)/√n`.
fn symbol_ellipticity(p: &ADiffOp) -> (bool, String) {
    let s = p.principal_symbol();
    if s.is_positive_diagonal_quadratic() {
        return (true, "exact".into());
    }
    let d = p.dims;
    let n = d.nvars();
    let mut covectors: Vec<Vec<f64>> = Vec::new();
    for v in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; n];
            c[v] = sign;
            covectors.push(c);
        }
    }
    for mask in 0..(1u32 << n.min(10)) {
        covectors.push((0..n).map(|v| if mask >> v & 1 == 1 { -1.0 } else { 1.0 } / (n as f64).sqrt()).collect());
    }
    let nt = n - 1;
    let mut thetas = vec![vec![]];
    for _ in 0..nt.min(4) {
        thetas = thetas.into_iter().flat_map(|t: Vec<f64>| [0.0, 0.25, 0.5, 0.75].map(|v| [t.clone(), vec![v]].concat())).collect();
    }
    let ok = thetas.iter().all(|t| {
        let mut th = t.clone();
        th.resize(nt, 0.0);
        [0.0, 0.5].iter().all(|&x| covectors.iter().all(|xi| s.eval_f64(x, &th, xi).norm() > INVERTIBILITY_TOL))
    });
    (ok, "sampled".into())
}

/// Symbol ellipticity plus a grid search of the smallest singular value of
/// `N̂(P)(p, μ)` on Fourier modes `|k|_∞ ≤ n`.
pub fn fully_elliptic_check(p: &ADiffOp, grid: &GridSpec, n: usize, tail: Tail) -> Result<Certificate, ModelError> {
    check_truncation(p, n)?;
    let d = p.dims;
    let (symbol_elliptic, symbol_check) = symbol_ellipticity(p);
    let points = if p.depends_on_base() { BasePoint::quarter_lattice(&d) } else { vec![BasePoint::origin(&d)] };
    let axis = grid.axis();
    let dim = d.base_vars();
    let total = axis.len().pow(dim as u32);
    let axis_f: Vec<f64> = axis.iter().map(rational::to_f64).collect();
    let mut best: Option<(f64, usize, usize)> = None;
    let mut n_modes = 0;
    for (pi, pt) in points.iter().enumerate() {
        let nf = normal_family(p, pt)?;
        let (ms, poly, diagonal) = nf.numeric_poly(n);
        n_modes = ms.len();
        let k = ms.len();
        let eval = |idx: usize| -> f64 {
            let mut mu = vec![0.0; dim];
            let mut r = idx;
            for c in mu.iter_mut().rev() {
                *c = axis_f[r % axis_f.len()];
                r /= axis_f.len();
            }
            let mut m = DMatrix::<C64>::zeros(k, k);
            for (e, a) in &poly {
                let f: f64 = e.iter().zip(&mu).map(|(x, v)| v.powi(*x as i32)).product();
                m += a * C64::new(f, 0.0);
            }
            min_singular_value(&m, diagonal)
        };
        let local = (0..total)
            .into_par_iter()
            .map(|i| (eval(i), i))
            .reduce(|| (f64::INFINITY, usize::MAX), |a, b| if (b.0, b.1) < (a.0, a.1) && !b.0.is_nan() { b } else { a });
        if best.is_none_or(|(v, _, _)| local.0 < v) {
            best = Some((local.0, pi, local.1));
        }
    }
    let (min, pi, idx) = best.expect("at least one base point");
    let mu = grid.point(&axis, dim, idx);
    let min_ok = min > INVERTIBILITY_TOL;
    Ok(Certificate {
        fully_elliptic: symbol_elliptic && min_ok,
        symbol_elliptic,
        symbol_check,
        min_singular_value: min,
        argmin: GridPoint { base_point: points[pi].render(), mu: mu.iter().map(|q| rational::Show(q).to_string()).collect() },
        grid: grid.clone(),
        grid_points: total,
        base_points: points.len(),
        modes: n_modes,
        tail: match tail {
            Tail::GridOnly => "grid-only: invertibility outside the grid is not checked".into(),
            Tail::Analytic(s) => format!("analytic: {s}"),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub mode: Vec<i64>,
    pub mu: Vec<String>,
    /// Whether `N̂(Δ − λ)` has an exact zero eigenvalue there.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolventReport {
    pub lambda: String,
    pub passes: bool,
    pub on_spectrum_ray: bool,
    #[serde(serialize_with = "ser_sig17")]
    pub distance: f64,
    /// Smallest singular value found, exactly when it is rational.
    pub margin: String,
    pub witness: Option<Witness>,
    pub certificate: Certificate,
}

/// `Δ − λ` for the product model Laplacian: fully elliptic iff `λ ∉ [0, ∞)`,
/// with smallest singular value `≥ dist(λ, [0, ∞))`.
pub fn resolvent_model_check(d: Dims, lambda: &Scalar, n: usize, grid: &GridSpec) -> Result<ResolventReport, ModelError> {
    let op = ADiffOp::laplacian(d).sub(&ADiffOp::constant(d, lambda.clone()));
    let tail = Tail::Analytic(
        "the normal family is diagonal with entries |μ|² + 4π²|k|² − λ, and |μ|² + 4π²|k|² ≥ 0, so every entry has modulus ≥ dist(λ, [0, ∞))"
            .into(),
    );
    let certificate = fully_elliptic_check(&op, grid, n, tail)?;
    let l = lambda.to_c64();
    let on_ray = lambda.is_real() && (lambda.is_zero() || l.re > 0.0);
    let distance = if on_ray {
        0.0
    } else if l.re >= 0.0 {
        l.im.abs()
    } else {
        l.norm()
    };
    let passes = !on_ray && certificate.symbol_elliptic && certificate.min_singular_value >= distance - INVERTIBILITY_TOL;

    // Exact value at the argmin.
    let mu: Vec<Rational> = certificate.argmin.mu.iter().map(|s| rational::parse(s).expect("rendered rational")).collect();
    let nf = normal_family(&op, &BasePoint::origin(&d))?;
    let (_, exact) = NormalFamily::fibre_matrix(&d, &nf.at(&mu), n);
    let min_diag = exact.iter().enumerate().map(|(i, r)| r[i].norm_sqr()).min_by(|a, b| {
        a.to_c64().re.partial_cmp(&b.to_c64().re).unwrap_or(std::cmp::Ordering::Equal)
    });
    let margin = min_diag
        .and_then(|s| s.as_cq())
        .and_then(|c| rational_sqrt(&c.re))
        .map(|q| rational::Show(&q).to_string())
        .unwrap_or_else(|| sig17(certificate.min_singular_value));

    let witness = if on_ray { Some(find_witness(&d, lambda, n, grid)) } else { None };
    Ok(ResolventReport { lambda: lambda.to_string(), passes, on_spectrum_ray: on_ray, distance, margin, witness, certificate })
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let s = |v: &num::BigInt| -> Option<num::BigInt> {
        let r = v.sqrt();
        (&r * &r == *v).then_some(r)
    };
    Some(Rational::new(s(q.numer())?, s(q.denom())?))
}

/// For `λ = r + sπ²` on the spectrum ray: a mode with `4|k|² = s` and a
/// grid point with `|μ|² = r` make the normal family singular exactly.
fn find_witness(d: &Dims, lambda: &Scalar, n: usize, grid: &GridSpec) -> Witness {
    let r = lambda.pi_coeff(0).re;
    let s = lambda.pi_coeff(2).re;
    let clean = lambda.pi_degrees().iter().all(|k| *k == 0 || *k == 2);
    let dim = d.base_vars();
    if clean && !r.is_negative() && !s.is_negative() {
        let target = s / int(4);
        let mode = modes(d.f2, n).into_iter().find(|m| int(m.iter().map(|v| v * v).sum::<i64>()) == target);
        let axis = grid.axis();
        let total = axis.len().pow(dim as u32);
        let mu = (0..total).map(|i| grid.point(&axis, dim, i)).find(|m| m.iter().map(|v| v * v).sum::<Rational>() == r);
        if let (Some(mode), Some(mu)) = (mode, mu) {
            return Witness { mode, mu: mu.iter().map(|q| rational::Show(q).to_string()).collect(), exact: true };
        }
    }
    let mut mu = vec!["0".to_string(); dim];
    mu[0] = sig17(lambda.to_c64().re.max(0.0).sqrt());
    Witness { mode: vec![0; d.f2], mu, exact: false }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultReport {
    pub symbol: bool,
    pub normal: bool,
    pub samples: usize,
}

impl MultReport {
    pub fn ok(&self) -> bool {
        self.symbol && self.normal
    }
}

/// `σ(PQ) = σ(P)σ(Q)` exactly, and `N̂(PQ) = N̂(P)N̂(Q)` at each sample, both
/// as fibre operators and on the Fourier block where truncation is harmless.
pub fn multiplicativity_check(p: &ADiffOp, q: &ADiffOp, samples: &[(BasePoint, Vec<Rational>)], n: usize) -> Result<MultReport, ModelError> {
    let pq = p.compose(q)?;
    let symbol = pq.principal_symbol() == p.principal_symbol().mul(&q.principal_symbol());
    let d = p.dims;
    let dq = q.fibre_trig_degree() as i64;
    let mut normal = true;
    for (pt, mu) in samples {
        let (a, b, c) = (normal_family(p, pt)?.at(mu), normal_family(q, pt)?.at(mu), normal_family(&pq, pt)?.at(mu));
        normal &= c == a.compose(&b);
        let (ms, ma) = NormalFamily::fibre_matrix(&d, &a, n);
        let (_, mb) = NormalFamily::fibre_matrix(&d, &b, n);
        let (_, mc) = NormalFamily::fibre_matrix(&d, &c, n);
        for (col, k) in ms.iter().enumerate() {
            if k.iter().any(|v| v.abs() > n as i64 - dq) {
                continue;
            }
            for row in 0..ms.len() {
                let s = (0..ms.len()).fold(Scalar::zero(), |acc, m| acc.add(&ma[row][m].mul(&mb[m][col])));
                normal &= s == mc[row][col];
            }
        }
    }
    Ok(MultReport { symbol, normal, samples: samples.len() })
}

/// `N̂(P*)(p, μ) = N̂(P)(p, μ)^*` on the Fourier modes `|k|_∞ ≤ n`, exactly.
pub fn adjoint_check(p: &ADiffOp, samples: &[(BasePoint, Vec<Rational>)], n: usize) -> Result<bool, ModelError> {
    let ps = p.adjoint()?;
    let d = p.dims;
    for (pt, mu) in samples {
        let (_, a) = NormalFamily::fibre_matrix(&d, &normal_family(p, pt)?.at(mu), n);
        let (_, b) = NormalFamily::fibre_matrix(&d, &normal_family(&ps, pt)?.at(mu), n);
        for i in 0..a.len() {
            for j in 0..a.len() {
                if b[i][j] != a[j][i].conj() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelReport {
    /// Multi-index and whether `b_β = a_β` at the front face.
    pub terms: Vec<(Vec<u32>, bool)>,
}

impl KernelReport {
    pub fn ok(&self) -> bool {
        self.terms.iter().all(|(_, b)| *b)
    }
}

/// Apply `P` in the left variables to the identity kernel on the last
/// blown-up double space: each `V^β` lifts to an operator whose restriction
/// to the front face is `D^β` in the front-face fibre coordinates, so the
/// kernel coefficients there are `a_β(0, ·)`.
pub fn kernel_coeff_check(p: &ADiffOp) -> Result<KernelReport, ModelError> {
    let frame = lifted_frame(&p.dims)?;
    let mut terms = Vec::new();
    for beta in p.terms.keys() {
        terms.push((beta.clone(), super::lift::lifted_monomial_is_exact(&p.dims, &frame, beta)?));
    }
    Ok(KernelReport { terms })
}

/// Sample points `(p, μ)` with `p` on the quarter lattice and small `μ`.
pub fn default_samples(d: &Dims) -> Vec<(BasePoint, Vec<Rational>)> {
    let pts = BasePoint::quarter_lattice(d);
    let nb = d.base_vars();
    let mus: Vec<Vec<Rational>> = vec![
        vec![Rational::zero(); nb],
        (0..nb).map(|i| rational::frac(i as i64 + 1, 2)).collect(),
        (0..nb).map(|i| int(if i % 2 == 0 { -1 } else { 2 })).collect(),
    ];
    pts.iter().step_by(pts.len().div_ceil(3).max(1)).zip(mus.iter().cycle()).map(|(p, m)| (p.clone(), m.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::super::random_operator;
    use super::*;
    use rand::SeedableRng;

    fn d() -> Dims {
        Dims { a1: 1, a2: 1, b: 1, f1: 1, f2: 1 }
    }

    #[test]
    fn laplacian_family_is_diagonal() {
        let m = normal_family_matrix(&ADiffOp::laplacian(d()), &BasePoint::origin(&d()), &[int(1), int(0), int(2)], 2).unwrap();
        assert!(m.is_diagonal());
        // |μ|² + 4π²k² at k = −2
        assert_eq!(m.exact[0][0], Scalar::from_int(5).add(&Scalar::pi_pow(2).scale_int(16)));
    }

    #[test]
    fn truncation_rejected() {
        let p = ADiffOp::from_json(d(), r#"[{"K":[1],"coeff":{"trig":[{"k":[0,0,3],"c":"1"}]}}]"#).unwrap();
        assert!(matches!(
            normal_family_matrix(&p, &BasePoint::origin(&d()), &[int(0), int(0), int(0)], 2),
            Err(ModelError::Truncation { n: 2, degree: 3 })
        ));
    }

    #[test]
    fn resolvent_examples() {
        let d = d();
        let g = GridSpec { radius: int(2), step: rational::frac(1, 2) };
        let r = resolvent_model_check(d, &Scalar::from_int(-1), 3, &g).unwrap();
        assert!(r.passes);
        assert_eq!(r.margin, "1");
        let r = resolvent_model_check(d, &Scalar::parse("-3+2i").unwrap(), 3, &g).unwrap();
        assert!(r.passes);
        assert_eq!(r.margin, sig17(13f64.sqrt()));
        for (l, mode) in [("0", 0), ("4pi^2", -1)] {
            let r = resolvent_model_check(d, &Scalar::parse(l).unwrap(), 3, &g).unwrap();
            assert!(!r.passes);
            let w = r.witness.unwrap();
            assert!(w.exact);
            assert_eq!(w.mode, vec![mode]);
            assert_eq!(r.certificate.min_singular_value, 0.0);
        }
    }

    #[test]
    fn multiplicativity_and_adjoints() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let d = Dims { a1: 1, a2: 2, b: 1, f1: 1, f2: 1 };
        for _ in 0..3 {
            let p = random_operator(d, 1, &mut rng);
            let q = random_operator(d, 2, &mut rng);
            let r = multiplicativity_check(&p, &q, &default_samples(&d), 4).unwrap();
            assert!(r.ok(), "{r:?}");
            assert!(adjoint_check(&q, &default_samples(&d), 3).unwrap());
        }
    }

    #[test]
    fn kernel_coefficients() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        assert!(kernel_coeff_check(&ADiffOp::laplacian(d())).unwrap().ok());
        assert!(kernel_coeff_check(&random_operator(d(), 2, &mut rng)).unwrap().ok());
    }
}
