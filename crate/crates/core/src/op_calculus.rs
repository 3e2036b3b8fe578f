//! Operator classes of the full calculus and their class-level algebra:
//! composition through the triple space, action on polyhomogeneous
//! functions, adjoints, conjugation by powers of `x`, the parametrix
//! remainder chain and the compactness criteria.

use crate::a_spaces::{double_space, triple_space, Tower, TowerError};
use crate::corner_spaces::BMap;
use crate::densities::{double_weights, gamma, triple_weights};
use crate::index_algebra::{pullback_family, pushforward_family, random_index_set, IndexError, IndexFamily, IndexSet, WeightVector};
use crate::rational::{self, frac, int, Rational};
use num::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Faces of the depth-2 double space in the order used for families.
pub const DOUBLE_FACES: [&str; 5] = ["rf", "lf", "ff_zx", "ff_zy", "ff_z"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalcError {
    #[error("not integrable at {}: {reason}", faces.join(", "))]
    NonIntegrable { faces: Vec<String>, reason: String },
    #[error("operator classes live over different towers")]
    TowerMismatch,
    #[error("index family must be given on exactly rf, lf, ff_zx, ff_zy, ff_z")]
    BadFamily,
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// Operator order: a rational number or `−∞` (smoothing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Order {
    Finite(Rational),
    NegInf,
}

impl Order {
    pub fn int(n: i64) -> Order {
        Order::Finite(int(n))
    }

    pub fn plus(&self, other: &Order) -> Order {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::NegInf,
        }
    }

    pub fn le(&self, other: &Order) -> bool {
        match (self, other) {
            (Order::NegInf, _) => true,
            (_, Order::NegInf) => false,
            (Order::Finite(a), Order::Finite(b)) => a <= b,
        }
    }

    pub fn parse(s: &str) -> Result<Order, rational::ParseRationalError> {
        match s.trim() {
            "-inf" | "-∞" => Ok(Order::NegInf),
            t => rational::parse(t).map(Order::Finite),
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(q) => write!(f, "{}", rational::Show(q)),
            Order::NegInf => write!(f, "-inf"),
        }
    }
}

impl Serialize for Order {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Order::Finite(q) => s.serialize_str(&rational::encode(q)),
            Order::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => Order::parse(&s).map_err(D::Error::custom),
            serde_json::Value::Number(n) => Order::parse(&n.to_string()).map_err(D::Error::custom),
            _ => Err(D::Error::custom("order must be a rational or \"-inf\"")),
        }
    }
}

/// Vanishing weight `x^c`; `Inf` is `x^∞`, absorbing under addition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weight {
    Finite(Rational),
    Inf,
}

impl Weight {
    pub fn int(n: i64) -> Weight {
        Weight::Finite(int(n))
    }

    /// Index set at `ff_z` of the small class `x^c Ψ`.
    pub fn index_set(&self) -> IndexSet {
        match self {
            Weight::Finite(c) => IndexSet::single(c.clone(), 0),
            Weight::Inf => IndexSet::empty(),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(q) => write!(f, "{}", rational::Show(q)),
            Weight::Inf => write!(f, "inf"),
        }
    }
}

/// `Ψ^{m,𝒥}` over a depth-2 tower.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorClass {
    pub order: Order,
    pub family: IndexFamily,
    pub tower: Tower,
}

/// Serialized form `{order, family}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub order: Order,
    pub family: IndexFamily,
}

impl OperatorClass {
    pub fn new(tower: &Tower, order: Order, family: IndexFamily) -> Result<OperatorClass, CalcError> {
        if family.0.len() != DOUBLE_FACES.len() || DOUBLE_FACES.iter().any(|f| !family.0.contains_key(*f)) {
            return Err(CalcError::BadFamily);
        }
        let family = IndexFamily(DOUBLE_FACES.iter().map(|f| (f.to_string(), family.0[*f].clone())).collect());
        Ok(OperatorClass { order, family, tower: tower.clone() })
    }

    pub fn from_spec(tower: &Tower, spec: ClassSpec) -> Result<OperatorClass, CalcError> {
        OperatorClass::new(tower, spec.order, spec.family)
    }

    pub fn from_json(tower: &Tower, text: &str) -> Result<OperatorClass, CalcError> {
        let spec: ClassSpec = serde_json::from_str(text).map_err(|e| IndexError::Malformed(e.to_string()))?;
        OperatorClass::from_spec(tower, spec)
    }

    pub fn spec(&self) -> ClassSpec {
        ClassSpec { order: self.order.clone(), family: self.family.clone() }
    }

    pub fn at(&self, face: &str) -> &IndexSet {
        &self.family.0[face]
    }

    fn with(&self, face: &str, set: IndexSet) -> OperatorClass {
        let mut out = self.clone();
        out.family.set(face, set);
        out
    }

    /// Trivial index sets away from `ff_z`.
    pub fn is_small(&self) -> bool {
        DOUBLE_FACES[..4].iter().all(|f| self.at(f).is_empty())
    }

    /// `other ⊆ self`: lower order and facewise smaller index sets.
    pub fn includes(&self, other: &OperatorClass) -> bool {
        self.tower == other.tower
            && other.order.le(&self.order)
            && DOUBLE_FACES.iter().all(|f| other.at(f).is_subset(self.at(f)))
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order {}; {}", self.order, self.family)
    }
}

/// A random class: integer order in `[−2, 2]`, and on every face up to two
/// generators with `|Re z| ≤ re_bound` and log powers `≤ p_max`.
pub fn random_class<R: rand::Rng + ?Sized>(t: &Tower, rng: &mut R, re_bound: i64, p_max: u32) -> OperatorClass {
    let order = Order::int(rng.gen_range(-2..=2));
    let mut family = IndexFamily::new();
    for f in DOUBLE_FACES {
        family.set(f, random_index_set(rng, 2, re_bound, p_max));
    }
    OperatorClass { order, family, tower: t.clone() }
}

/// The small class `x^c Ψ^m`: empty index sets except `gen{(c,0)}` at `ff_z`.
pub fn small(t: &Tower, m: Order, c: Weight) -> OperatorClass {
    let mut family = IndexFamily::uniform(&DOUBLE_FACES, &IndexSet::empty());
    family.set("ff_z", c.index_set());
    OperatorClass { order: m, family, tower: t.clone() }
}

/// Projections and weights of one tower, built once.
pub struct Composer {
    pub tower: Tower,
    /// `π_1, π_2, π_3`.
    pub triple: Vec<BMap>,
    /// Weight `W_a` on the triple space and `w_a` on the double space.
    pub triple_weight: WeightVector,
    pub double_weight: WeightVector,
    pub proj_l: BMap,
    pub proj_r: BMap,
}

impl Composer {
    pub fn new(t: &Tower) -> Result<Composer, CalcError> {
        if t.k != 2 {
            return Err(TowerError::Unsupported("the operator calculus is set up for depth-2 towers".into()).into());
        }
        let tr = triple_space(t)?;
        let tw = triple_weights(t)?;
        let dw = double_weights(t)?;
        let d = double_space(t)?;
        Ok(Composer {
            tower: t.clone(),
            triple: tr.projections,
            triple_weight: tw.w_a,
            double_weight: dw.w_a,
            proj_l: d.proj_l,
            proj_r: d.proj_r,
        })
    }

    /// Shared instance for `t`.
    pub fn for_tower(t: &Tower) -> Result<Arc<Composer>, CalcError> {
        static CACHE: OnceLock<Mutex<HashMap<Tower, Arc<Composer>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(c) = cache.lock().expect("cache lock").get(t) {
            return Ok(c.clone());
        }
        let c = Arc::new(Composer::new(t)?);
        cache.lock().expect("cache lock").insert(t.clone(), c.clone());
        Ok(c)
    }

    /// `(π_2)_#[π_3^# 𝓘 + π_1^# 𝓙 + W_a] − w_a`.
    pub fn compose(&self, p: &OperatorClass, q: &OperatorClass) -> Result<OperatorClass, CalcError> {
        if p.tower != self.tower || q.tower != self.tower {
            return Err(CalcError::TowerMismatch);
        }
        let lifted = pullback_family(&self.triple[2], &p.family)?
            .add(&pullback_family(&self.triple[0], &q.family)?)?
            .shift(&self.triple_weight);
        let (pushed, violations) = pushforward_family(&self.triple[1], &lifted)?;
        let pair = p.at("rf").add(q.at("lf"));
        let pair_ok = pair.inf_re().is_none_or(|x| x.is_positive());
        if !violations.is_empty() || !pair_ok {
            let reason = match pair.inf_re() {
                Some(x) if !x.is_positive() => format!("inf Re of P(rf) + Q(lf) is {}, must be > 0", rational::Show(&x)),
                _ => "pushforward does not converge".to_string(),
            };
            let faces = if violations.is_empty() { vec!["rf".into(), "lf".into()] } else { violations };
            return Err(CalcError::NonIntegrable { faces, reason });
        }
        let family = pushed.shift(&self.double_weight.neg());
        OperatorClass::new(&self.tower, p.order.plus(&q.order), family)
    }

    /// Index set of `Pu` for `u` with index set `i`.
    pub fn act(&self, p: &OperatorClass, i: &IndexSet) -> Result<IndexSet, CalcError> {
        if p.tower != self.tower {
            return Err(CalcError::TowerMismatch);
        }
        let u = IndexFamily(std::iter::once(("bM".to_string(), i.clone())).collect());
        let lifted = pullback_family(&self.proj_r, &u)?.add(&p.family)?;
        let (pushed, violations) = pushforward_family(&self.proj_l, &lifted)?;
        if !violations.is_empty() {
            let inf = p.at("rf").add(i).inf_re().unwrap_or_else(Rational::zero);
            return Err(CalcError::NonIntegrable {
                faces: violations,
                reason: format!("inf Re of P(rf) + I is {}, must be > 0", rational::Show(&inf)),
            });
        }
        Ok(pushed.get("bM")?.clone())
    }
}

pub fn compose(p: &OperatorClass, q: &OperatorClass) -> Result<OperatorClass, CalcError> {
    if p.tower != q.tower {
        return Err(CalcError::TowerMismatch);
    }
    Composer::for_tower(&p.tower)?.compose(p, q)
}

pub fn act(p: &OperatorClass, i: &IndexSet) -> Result<IndexSet, CalcError> {
    Composer::for_tower(&p.tower)?.act(p, i)
}

/// The four-term formula for the index set of `P∘Q` at `ff_z`.
pub fn ffz_closed_form(p: &OperatorClass, q: &OperatorClass) -> Result<IndexSet, CalcError> {
    if p.tower != q.tower {
        return Err(CalcError::TowerMismatch);
    }
    let pair = p.at("rf").add(q.at("lf"));
    if let Some(x) = pair.inf_re() {
        if !x.is_positive() {
            return Err(CalcError::NonIntegrable {
                faces: vec!["rf".into(), "lf".into()],
                reason: format!("inf Re of P(rf) + Q(lf) is {}, must be > 0", rational::Show(&x)),
            });
        }
    }
    let g = gamma(&p.tower);
    let (gy, gz) = (int(g.at(1) as i64), int(g.at(2) as i64));
    let sum = |f: &str, h: &str| p.at(f).add(q.at(h));
    Ok(sum("ff_z", "ff_z")
        .ext_union(&sum("lf", "rf").shift(&gz))
        .ext_union(&sum("ff_zx", "ff_zx").shift(&gz))
        .ext_union(&sum("ff_zy", "ff_zy").shift(&(gz - gy))))
}

/// The mapping formula `𝒥(lf) ∪̄ (𝒥(ff_zx)+I) ∪̄ (𝒥(ff_zy)+I) ∪̄ (𝒥(ff_z)+I)`.
pub fn act_closed_form(p: &OperatorClass, i: &IndexSet) -> IndexSet {
    p.at("lf")
        .ext_union(&p.at("ff_zx").add(i))
        .ext_union(&p.at("ff_zy").add(i))
        .ext_union(&p.at("ff_z").add(i))
}

/// Swap the index sets at `lf` and `rf`.
pub fn adjoint(p: &OperatorClass) -> OperatorClass {
    p.with("rf", p.at("lf").clone()).with("lf", p.at("rf").clone())
}

/// Result of conjugating by `x^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conjugated {
    pub class: OperatorClass,
    /// Set when the rule applied goes beyond small-calculus invariance
    /// (shifts at `rf`/`lf` derived from the kernel factor `(x'/x)^α`).
    pub derived_extension: bool,
}

pub fn conjugate_x(p: &OperatorClass, alpha: &Rational) -> Conjugated {
    if p.is_small() || alpha.is_zero() {
        return Conjugated { class: p.clone(), derived_extension: false };
    }
    let class = p.with("rf", p.at("rf").shift(alpha)).with("lf", p.at("lf").shift(&-alpha.clone()));
    Conjugated { class, derived_extension: true }
}

/// `x^p Ψ^k` is compact on weighted Sobolev spaces when `p > 0`, `k < 0`.
pub fn compact(p: &Rational, k: &Rational) -> bool {
    p.is_positive() && k.is_negative()
}

/// Hilbert–Schmidt when `p > (γ_z − 1)/2` and `k < −dim M / 2`.
pub fn hilbert_schmidt(p: &Rational, k: &Rational, t: &Tower) -> bool {
    let gz = int(gamma(t).top() as i64);
    p > &((gz - int(1)) / int(2)) && k < &(-int(t.dim() as i64) / int(2))
}

/// Conormal order of a distribution with symbol order `s`, conormal to a
/// submanifold of codimension `codim` in a space of dimension `dim`.
pub fn conormal_order(s: &Rational, dim: usize, codim: usize) -> Rational {
    s + frac(dim as i64, 4) - frac(codim as i64, 2)
}

/// Conormal orders through composition for operators of orders `m`, `m2` on
/// an `n`-manifold: kernels on `M²`, their pullbacks to `M³`, the product
/// (conormal to the triple diagonal), and the pushforward along a fibration
/// with `n`-dimensional fibres.  Returns the stages; the last entry is the
/// operator order of the composite.
pub fn order_bookkeeping(m: &Rational, m2: &Rational, n: usize) -> [Rational; 5] {
    // Kernel of an order-m operator: symbol order m in the n conormal variables.
    let kp = conormal_order(m, 2 * n, n);
    let kq = conormal_order(m2, 2 * n, n);
    // Pullback by a fibration keeps the symbol order; the space grows.
    let pp = &kp + frac(n as i64, 4);
    let pq = &kq + frac(n as i64, 4);
    // Product of transversal conormals: symbols multiply in separate variables.
    let s = (&pp - frac(3 * n as i64, 4) + frac(n as i64, 2)) + (&pq - frac(3 * n as i64, 4) + frac(n as i64, 2));
    let prod = conormal_order(&s, 3 * n, 2 * n);
    // Integration over n fibre variables raises the order by n/4.
    let pushed = &prod + frac(n as i64, 4);
    [kp, pp, pq, prod, pushed]
}

/// How a ledger step's output is obtained from its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LedgerRule {
    /// `P Q_0 = I + R_1`: invert the principal symbol; the error drops one order.
    SymbolInversion,
    /// Sum `Σ R_1^j` asymptotically; the error is smoothing.
    AsymptoticSummation,
    /// Correct with the inverse normal operator; the error gains a power of `x`.
    NormalOperatorSequence,
    /// Neumann series in `R_{f,1}`; the error vanishes to infinite order.
    NeumannSeries,
    /// Left and right parametrices agree modulo the residual class.
    LeftRightParametrix,
}

impl LedgerRule {
    pub fn name(self) -> &'static str {
        match self {
            LedgerRule::SymbolInversion => "symbol inversion",
            LedgerRule::AsymptoticSummation => "asymptotic summation",
            LedgerRule::NormalOperatorSequence => "normal operator exact sequence",
            LedgerRule::NeumannSeries => "Neumann series",
            LedgerRule::LeftRightParametrix => "left and right parametrix",
        }
    }

    /// Output class from the inputs.
    pub fn rerun(self, inputs: &[OperatorClass]) -> Result<OperatorClass, CalcError> {
        let t = &inputs[0].tower;
        Ok(match self {
            LedgerRule::SymbolInversion => {
                let pq = compose(&inputs[0], &inputs[1])?;
                let order = pq.order.plus(&Order::int(-1));
                OperatorClass { order, ..pq }
            }
            LedgerRule::AsymptoticSummation => OperatorClass { order: Order::NegInf, ..inputs[0].clone() },
            LedgerRule::NormalOperatorSequence => {
                let r = &inputs[0];
                r.with("ff_z", r.at("ff_z").shift(&int(1)))
            }
            LedgerRule::NeumannSeries | LedgerRule::LeftRightParametrix => small(t, Order::NegInf, Weight::Inf),
        })
    }
}

/// `compose(left, right) ⊆ claimed`, recorded with its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionCheck {
    pub what: String,
    pub left: OperatorClass,
    pub right: OperatorClass,
    pub claimed: OperatorClass,
    pub holds: bool,
}

impl InclusionCheck {
    fn run(what: String, left: &OperatorClass, right: &OperatorClass, claimed: &OperatorClass) -> Result<Self, CalcError> {
        let got = compose(left, right)?;
        Ok(InclusionCheck { what, left: left.clone(), right: right.clone(), claimed: claimed.clone(), holds: claimed.includes(&got) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerStep {
    pub description: String,
    pub rule: LedgerRule,
    pub inputs: Vec<OperatorClass>,
    pub output: OperatorClass,
    pub checks: Vec<InclusionCheck>,
}

/// Class-level record of the parametrix construction for a fully elliptic
/// operator of order `m` (full ellipticity is a hypothesis here).
#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    pub order: Order,
    pub steps: Vec<LedgerStep>,
}

impl Ledger {
    /// Remainder classes in order of construction.
    pub fn remainders(&self) -> Vec<&OperatorClass> {
        self.steps.iter().take(4).map(|s| &s.output).collect()
    }

    /// Re-run every rule and every inclusion.
    pub fn verify(&self) -> Result<bool, CalcError> {
        for s in &self.steps {
            if s.rule.rerun(&s.inputs)? != s.output {
                return Ok(false);
            }
            for c in &s.checks {
                let got = compose(&c.left, &c.right)?;
                if !c.holds || !c.claimed.includes(&got) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Ledger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{}. {} [{}] -> {}", i + 1, s.description, s.rule.name(), s.output)?;
            for c in &s.checks {
                writeln!(f, "     {}: {}", c.what, if c.holds { "verified" } else { "FAILED" })?;
            }
        }
        Ok(())
    }
}

/// Number of powers of `R_{f,1}` checked by composition.
pub const NEUMANN_DEPTH: i64 = 5;

pub fn parametrix_ledger(t: &Tower, m: &Rational) -> Result<Ledger, CalcError> {
    let neg = |w: i64| small(t, Order::NegInf, Weight::int(w));
    let p = small(t, Order::Finite(m.clone()), Weight::int(0));
    let q0 = small(t, Order::Finite(-m.clone()), Weight::int(0));
    let mut steps = Vec::new();

    let r1 = LedgerRule::SymbolInversion.rerun(&[p.clone(), q0.clone()])?;
    let checks = vec![
        InclusionCheck::run("P Q_0 in Psi^0".into(), &p, &q0, &small(t, Order::int(0), Weight::int(0)))?,
        InclusionCheck::run("P R_1 in Psi^{m-1}".into(), &p, &r1, &small(t, Order::Finite(m - int(1)), Weight::int(0)))?,
    ];
    steps.push(LedgerStep {
        description: "right parametrix modulo Psi^{-1}".into(),
        rule: LedgerRule::SymbolInversion,
        inputs: vec![p.clone(), q0.clone()],
        output: r1.clone(),
        checks,
    });

    let rs = LedgerRule::AsymptoticSummation.rerun(std::slice::from_ref(&r1))?;
    let mut checks = Vec::new();
    let mut pow = r1.clone();
    for j in 2..=NEUMANN_DEPTH {
        let claimed = small(t, Order::int(-j), Weight::int(0));
        checks.push(InclusionCheck::run(format!("R_1^{j} in Psi^{}", -j), &pow, &r1, &claimed)?);
        pow = compose(&pow, &r1)?;
    }
    steps.push(LedgerStep {
        description: "remainder made smoothing".into(),
        rule: LedgerRule::AsymptoticSummation,
        inputs: vec![r1.clone()],
        output: rs.clone(),
        checks,
    });

    let rf1 = LedgerRule::NormalOperatorSequence.rerun(std::slice::from_ref(&rs))?;
    let checks = vec![
        InclusionCheck::run("P R_s in Psi^{-inf}".into(), &p, &rs, &neg(0))?,
        InclusionCheck::run("R_{f,1} R_s in x Psi^{-inf}".into(), &rf1, &rs, &neg(1))?,
    ];
    steps.push(LedgerStep {
        description: "remainder vanishing at the front face".into(),
        rule: LedgerRule::NormalOperatorSequence,
        inputs: vec![rs.clone()],
        output: rf1.clone(),
        checks,
    });

    let rf = LedgerRule::NeumannSeries.rerun(std::slice::from_ref(&rf1))?;
    let mut checks = Vec::new();
    let mut pow = rf1.clone();
    for n in 2..=NEUMANN_DEPTH {
        checks.push(InclusionCheck::run(format!("R_{{f,1}}^{n} in x^{n} Psi^{{-inf}}"), &pow, &rf1, &neg(n))?);
        pow = compose(&pow, &rf1)?;
    }
    steps.push(LedgerStep {
        description: "remainder vanishing to infinite order".into(),
        rule: LedgerRule::NeumannSeries,
        inputs: vec![rf1.clone()],
        output: rf.clone(),
        checks,
    });

    let out = LedgerRule::LeftRightParametrix.rerun(&[q0.clone(), rf.clone()])?;
    let checks = vec![
        InclusionCheck::run("Q R_f in x^inf Psi^{-inf}".into(), &q0, &rf, &rf)?,
        InclusionCheck::run("R_f Q in x^inf Psi^{-inf}".into(), &rf, &q0, &rf)?,
    ];
    steps.push(LedgerStep {
        description: "left and right parametrices agree".into(),
        rule: LedgerRule::LeftRightParametrix,
        inputs: vec![q0, rf],
        output: out,
        checks,
    });
    Ok(Ledger { order: Order::Finite(m.clone()), steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower() -> Tower {
        Tower::depth2(1, 1, 1, 1, 1)
    }

    fn cls(order: i64, faces: &[(&str, IndexSet)]) -> OperatorClass {
        let mut c = small(&tower(), Order::int(order), Weight::int(0));
        for (f, s) in faces {
            c.family.set(f, s.clone());
        }
        c
    }

    #[test]
    fn small_composition() {
        let t = tower();
        let k = compose(&small(&t, Order::int(1), Weight::int(0)), &small(&t, Order::int(2), Weight::int(0))).unwrap();
        assert_eq!(k, small(&t, Order::int(3), Weight::int(0)));
    }

    #[test]
    fn cross_term_example() {
        let p = cls(0, &[("lf", IndexSet::single(int(1), 0))]);
        let q = cls(0, &[("rf", IndexSet::single(int(2), 0))]);
        let want = IndexSet::single(int(0), 0).ext_union(&IndexSet::single(int(8), 0));
        assert_eq!(ffz_closed_form(&p, &q).unwrap(), want);
        assert_eq!(compose(&p, &q).unwrap().at("ff_z"), &want);
        assert!(want.contains(&crate::index_algebra::IndexTerm::new(int(8), 1)));
    }

    #[test]
    fn boundary_integrability() {
        let p = cls(0, &[("rf", IndexSet::smooth())]);
        let q = cls(0, &[("lf", IndexSet::smooth())]);
        match compose(&p, &q) {
            Err(CalcError::NonIntegrable { faces, .. }) => assert_eq!(faces, vec!["H_2".to_string()]),
            other => panic!("{other:?}"),
        }
        assert!(ffz_closed_form(&p, &q).is_err());
    }

    #[test]
    fn mapping() {
        let t = tower();
        let s = small(&t, Order::int(2), Weight::int(0));
        assert_eq!(act(&s, &IndexSet::smooth()).unwrap(), IndexSet::smooth());
        for (alpha, p) in [(int(3), 1), (frac(1, 2), 0)] {
            let c = cls(0, &[("lf", IndexSet::single(alpha.clone(), 0))]);
            let got = act(&c, &IndexSet::smooth()).unwrap();
            assert_eq!(got, act_closed_form(&c, &IndexSet::smooth()));
            assert!(got.contains(&crate::index_algebra::IndexTerm::new(alpha, p)));
            assert_eq!(got.generators().len(), 2);
        }
        assert!(act(&s, &IndexSet::single(int(-1), 0)).is_ok());
        let bad = cls(0, &[("rf", IndexSet::single(int(1), 0))]);
        assert!(act(&bad, &IndexSet::single(int(-1), 0)).is_err());
    }

    #[test]
    fn adjoint_and_conjugation() {
        let t = tower();
        let s = small(&t, Order::int(1), Weight::int(2));
        assert_eq!(adjoint(&s), s);
        let c = cls(0, &[("lf", IndexSet::single(int(1), 0)), ("rf", IndexSet::single(int(3), 0))]);
        assert_eq!(adjoint(&adjoint(&c)), c);
        assert_eq!(adjoint(&c).at("rf"), c.at("lf"));
        assert_eq!(conjugate_x(&s, &int(5)).class, s);
        let k = conjugate_x(&c, &int(1));
        assert!(k.derived_extension);
        assert_eq!(k.class.at("lf"), &IndexSet::smooth());
        assert_eq!(conjugate_x(&c, &int(0)).class, c);
    }

    #[test]
    fn ledger_chain() {
        for m in 0..=2 {
            let l = parametrix_ledger(&tower(), &int(m)).unwrap();
            assert!(l.verify().unwrap(), "{l}");
            let t = tower();
            let want = [
                small(&t, Order::int(-1), Weight::int(0)),
                small(&t, Order::NegInf, Weight::int(0)),
                small(&t, Order::NegInf, Weight::int(1)),
                small(&t, Order::NegInf, Weight::Inf),
            ];
            assert_eq!(l.remainders(), want.iter().collect::<Vec<_>>());
        }
    }

    #[test]
    fn compactness() {
        let t = tower();
        assert!(compact(&int(1), &int(-1)));
        assert!(!compact(&int(0), &int(-1)));
        assert!(hilbert_schmidt(&int(3), &int(-3), &t));
        assert!(!hilbert_schmidt(&int(2), &int(-3), &t));
    }

    #[test]
    fn order_identity() {
        for n in 1..6 {
            for (m, m2) in [(int(0), int(0)), (frac(3, 2), int(-4)), (int(2), frac(-1, 3))] {
                assert_eq!(order_bookkeeping(&m, &m2, n)[4], &m + &m2);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let c = cls(2, &[("lf", IndexSet::single(frac(1, 2), 1))]);
        let text = serde_json::to_string(&c.spec()).unwrap();
        assert_eq!(OperatorClass::from_json(&tower(), &text).unwrap(), c);
        let neg = small(&tower(), Order::NegInf, Weight::Inf);
        assert_eq!(OperatorClass::from_json(&tower(), &serde_json::to_string(&neg.spec()).unwrap()).unwrap(), neg);
    }
}
