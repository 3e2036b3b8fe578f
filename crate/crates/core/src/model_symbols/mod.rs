//! Model **a**-operators on a depth-2 tower: lifted vector fields, principal
//! symbols, normal families on the fibre torus, and ellipticity and
//! resolvent checks.
//!
//! The model space is `[0,1)_x × T^b_y × T^{f1}_z × T^{f2}_w` with tori of
//! period one.  Exact arithmetic is done in `ℚ(i)[π]`; numerical checks use
//! `f64` only once the exact matrices are assembled.

pub mod algebra;
pub mod lift;
pub mod normal;
pub mod ops;
pub mod scalar;

pub use lift::{lift_step, lift_vf, transversality_check, transversality_with, AVectorField, Direction, LiftError, LiftedField, Stage};
pub use normal::{
    fully_elliptic_check, kernel_coeff_check, multiplicativity_check, normal_family, normal_family_matrix, resolvent_model_check,
    BasePoint, Certificate, FamilyMatrix, GridSpec, KernelReport, MultReport, NormalFamily, ResolventReport, Tail,
};
pub use ops::{ADiffOp, OpSpec, SymbolPoly};
pub use scalar::{sig17, Scalar};

use crate::a_spaces::{Tower, TowerError};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// The data of a depth-2 tower that the model operators need.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub a1: u32,
    pub a2: u32,
    pub b: usize,
    pub f1: usize,
    pub f2: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("not an a-operator: {0}")]
    NotAOperator(String),
    #[error("{0}")]
    Dims(String),
    #[error("Fourier truncation N = {n} is below the fibre trigonometric degree {degree}")]
    Truncation { n: usize, degree: u64 },
    #[error("bad base point: {0}")]
    BasePoint(String),
    #[error("bad operator spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

impl Dims {
    pub fn from_tower(t: &Tower) -> Result<Dims, ModelError> {
        t.validate()?;
        if t.k != 2 {
            return Err(ModelError::Dims(format!("model operators need a depth-2 tower, got k = {}", t.k)));
        }
        Ok(Dims { a1: t.a[1], a2: t.a[2], b: t.b, f1: t.f[0], f2: t.f[1] })
    }

    /// Number of frame fields `1 + b + f1 + f2`.
    pub fn nvars(&self) -> usize {
        1 + self.b + self.f1 + self.f2
    }

    /// Base covariables `(τ, η, ζ)`.
    pub fn base_vars(&self) -> usize {
        1 + self.b + self.f1
    }

    pub fn directions(&self) -> Vec<Direction> {
        let mut v = vec![Direction::X];
        v.extend((0..self.b).map(Direction::Y));
        v.extend((0..self.f1).map(Direction::Z));
        v.extend((0..self.f2).map(Direction::W));
        v
    }

    /// `x`-power carried by `V^β`.
    pub fn weight(&self, beta: &[u32]) -> u32 {
        let a = self.a1 + self.a2;
        let (b, f1) = (self.b, self.f1);
        beta[0] * (1 + a) + beta[1..1 + b].iter().sum::<u32>() * a + beta[1 + b..1 + b + f1].iter().sum::<u32>() * self.a2
    }

    fn names(&self, sym: [&str; 4]) -> Vec<String> {
        let idx = |s: &str, i: usize, n: usize| if n == 1 { s.to_string() } else { format!("{s}{}", i + 1) };
        let mut v = vec![sym[0].to_string()];
        v.extend((0..self.b).map(|i| idx(sym[1], i, self.b)));
        v.extend((0..self.f1).map(|i| idx(sym[2], i, self.f1)));
        v.extend((0..self.f2).map(|i| idx(sym[3], i, self.f2)));
        v
    }

    /// `y…, z…, w…` (the periodic variables).
    pub fn theta_names(&self) -> Vec<String> {
        self.names(["x", "y", "z", "w"])[1..].to_vec()
    }

    pub fn covariable_names(&self) -> Vec<String> {
        self.names(["τ", "η", "ζ", "θ"])
    }

    pub fn frame_names(&self) -> Vec<String> {
        self.names(["Vx", "Vy", "Vz", "Vw"])
    }
}

/// A random operator of order `≤ max_order`: each frame monomial is present
/// with probability one half, with coefficient `(c0 + c1 x)·(s0 + s1 e^{2πik·θ})`
/// for small integers and frequencies in `{−1, 0, 1}`.
pub fn random_operator<R: Rng>(d: Dims, max_order: u32, rng: &mut R) -> ADiffOp {
    use algebra::{Coeff, DiffRing};
    let n = d.nvars();
    let mut out = ADiffOp::zero(d);
    let mut keys = vec![vec![]];
    for _ in 0..n {
        keys = keys.into_iter().flat_map(|k: Vec<u32>| (0..=max_order).map(move |e| [k.clone(), vec![e]].concat())).collect();
    }
    let small = |rng: &mut R| Scalar::from_cq(scalar::cq(crate::rational::int(rng.gen_range(-2..=2)), crate::rational::int(rng.gen_range(-1..=1))));
    for k in keys.into_iter().filter(|k| k.iter().sum::<u32>() <= max_order) {
        let top = k.iter().sum::<u32>() == max_order;
        if !top && rng.gen_bool(0.5) {
            continue;
        }
        let xp = Coeff::constant(0, Scalar::from_int(rng.gen_range(1..=2)))
            .add(&Coeff::monomial(1, vec![], Scalar::from_int(rng.gen_range(-2..=2))));
        let freq: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-1..=1)).collect();
        let tp = Coeff::constant(0, small(rng)).add(&Coeff::monomial(0, freq, small(rng)));
        out.add_term(k, xp.mul(&tp));
    }
    out
}
