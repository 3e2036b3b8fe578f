//! Weight vectors of density bundles on the double and triple spaces.
//!
//! Weights are computed from blowup data: a b-density lifted through a
//! quasihomogeneous blowup of order `a` whose center has interior
//! codimension `m` picks up `ρ^{a·m}` at the new front face, on top of the
//! weights of the faces containing the center.  Closed forms are kept
//! alongside and compared.

use crate::a_spaces::{double_front_names, double_space, triple::face, triple_space, Tower, TowerError};
use crate::corner_spaces::Space;
use crate::index_algebra::WeightVector;
use crate::rational::{int, Rational};
use serde::Serialize;

/// `γ_l` for `l = 1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaWeights {
    pub gamma: Vec<u64>,
}

impl GammaWeights {
    /// `γ_l`, 1-based; `γ_0 = 0`.
    pub fn at(&self, l: usize) -> u64 {
        if l == 0 {
            0
        } else {
            self.gamma[l - 1]
        }
    }

    /// Top weight `γ_k` (zero for `k = 0`).
    pub fn top(&self) -> u64 {
        self.gamma.last().copied().unwrap_or(0)
    }
}

pub fn gamma(t: &Tower) -> GammaWeights {
    let mut gamma = Vec::with_capacity(t.k);
    let mut acc = 0u64;
    let mut rank = 1 + t.b as u64;
    for i in 1..=t.k {
        acc += t.a[i] as u64 * rank;
        gamma.push(acc);
        rank += t.f[i - 1] as u64;
    }
    GammaWeights { gamma }
}

/// Lift a weight vector on the base faces through the whole blowup history.
pub fn lift_weights(space: &Space, base: &WeightVector) -> WeightVector {
    let mut w: Vec<Rational> = (0..space.face_count())
        .map(|i| if i < space.base_face_count() { base.get(space.face_name(i)) } else { int(0) })
        .collect();
    for step in space.history() {
        let mut v: Rational = step.faces.iter().map(|&g| w[g].clone()).sum();
        v += int(step.order as i64 * step.codim as i64);
        w[step.ff] = v;
    }
    WeightVector((0..space.face_count()).map(|i| (space.face_name(i).to_string(), w[i].clone())).collect())
}

/// Lifted b-densities `w_a0`, the full-calculus bundle `w_a = −w_a0`, and the
/// small-calculus bundle `w_tilde`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoubleWeights {
    pub w_a0: WeightVector,
    pub w_a: WeightVector,
    pub w_tilde: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("weight mismatch for {what} at {face}: blowup data gives {computed}, closed form {closed}")]
pub struct WeightMismatch {
    pub what: String,
    pub face: String,
    pub computed: String,
    pub closed: String,
}

fn compare(what: &str, computed: &WeightVector, closed: &WeightVector, faces: &[String]) -> Result<(), TowerError> {
    for f in faces {
        let (a, b) = (computed.get(f), closed.get(f));
        if a != b {
            let m = WeightMismatch { what: what.into(), face: f.clone(), computed: a.to_string(), closed: b.to_string() };
            return Err(TowerError::Invalid(m.to_string()));
        }
    }
    Ok(())
}

/// Closed forms over `(rf, lf, ff…)`.
pub fn double_weights_closed(t: &Tower) -> DoubleWeights {
    let g = gamma(t);
    let top = int(g.top() as i64);
    let names = double_front_names(t.k);
    let mut w_a0 = WeightVector::new();
    let mut w_tilde = WeightVector::new();
    for side in ["rf", "lf"] {
        w_a0.set(side, int(0));
        w_tilde.set(side, -top.clone());
    }
    for (l, n) in names.iter().enumerate() {
        let gl = int(g.at(l) as i64);
        w_a0.set(n, gl.clone());
        w_tilde.set(n, gl - top.clone() * int(2));
    }
    let w_a = w_a0.neg();
    DoubleWeights { w_a0, w_a, w_tilde }
}

/// Double-space weights from blowup data, checked against the closed forms.
pub fn double_weights(t: &Tower) -> Result<DoubleWeights, TowerError> {
    let d = double_space(t)?;
    let top = int(gamma(t).top() as i64);
    let w_a0 = lift_weights(&d.space, &WeightVector::new());
    let mut extra = WeightVector::new();
    extra.set("rf", -top.clone());
    extra.set("lf", -top);
    let w_tilde = lift_weights(&d.space, &extra);
    let w_a = w_a0.neg();
    let out = DoubleWeights { w_a0, w_a, w_tilde };
    let closed = double_weights_closed(t);
    let faces: Vec<String> = d.space.face_names().into_iter().map(String::from).collect();
    compare("w_a0", &out.w_a0, &closed.w_a0, &faces)?;
    compare("w_a", &out.w_a, &closed.w_a, &faces)?;
    compare("w_tilde", &out.w_tilde, &closed.w_tilde, &faces)?;
    Ok(out)
}

/// `W_a0` (lifted b-densities on the triple space) and `W_a`, together with
/// the shift `Σ π_i^# w_0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleWeights {
    pub w_a0: WeightVector,
    pub shift: WeightVector,
    pub w_a: WeightVector,
}

/// The faces carrying nonzero weights, in the order used for display.
pub fn triple_weight_faces() -> Vec<String> {
    let mut v = vec!["V_y".to_string()];
    v.extend((1..=3).map(|i| face("G", i, 1)));
    v.extend((1..=3).map(|i| face("E", i, 1)));
    v.push("V_z".into());
    for kind in ["F", "G", "E"] {
        v.extend((1..=3).map(|i| face(kind, i, 2)));
    }
    v
}

/// Seven-slot summary `(V_y, G_y, E_y; V_z, F_z, G_z, E_z)` of a symmetric
/// weight vector on the triple space.
pub fn triple_summary(w: &WeightVector) -> [Rational; 7] {
    [
        w.get("V_y"),
        w.get(&face("G", 1, 1)),
        w.get(&face("E", 1, 1)),
        w.get("V_z"),
        w.get(&face("F", 1, 2)),
        w.get(&face("G", 1, 2)),
        w.get(&face("E", 1, 2)),
    ]
}

fn from_summary(s: [i64; 7]) -> WeightVector {
    let mut w = WeightVector::new();
    w.set("V_y", int(s[0]));
    for i in 1..=3 {
        w.set(&face("G", i, 1), int(s[1]));
        w.set(&face("E", i, 1), int(s[2]));
        w.set(&face("F", i, 2), int(s[4]));
        w.set(&face("G", i, 2), int(s[5]));
        w.set(&face("E", i, 2), int(s[6]));
    }
    w.set("V_z", int(s[3]));
    w
}

/// Closed form of `W_a0`.
pub fn triple_w_a0_closed(t: &Tower) -> WeightVector {
    let g = gamma(t);
    let (gy, gz) = (g.at(1) as i64, g.at(2) as i64);
    from_summary([2 * gy, gy, gy, 2 * gz, gy + gz, gz, gz])
}

/// `W_a` as obtained from the intermediate arithmetic: `(−γ_y,0,0; −γ_z,−γ_y,0,0)`.
pub fn triple_w_a_closed(t: &Tower) -> WeightVector {
    let g = gamma(t);
    let (gy, gz) = (g.at(1) as i64, g.at(2) as i64);
    from_summary([-gy, 0, 0, -gz, -gy, 0, 0])
}

/// The overall-sign form `−(γ_y,0,0; −γ_z,−γ_y,0,0)`, kept for comparison;
/// it disagrees with [`triple_w_a_closed`] on the z-level entries.
pub fn triple_w_a_displayed(t: &Tower) -> WeightVector {
    let g = gamma(t);
    let (gy, gz) = (g.at(1) as i64, g.at(2) as i64);
    from_summary([-gy, 0, 0, gz, gy, 0, 0])
}

/// Triple-space weights from blowup data and the three projections.
pub fn triple_weights(t: &Tower) -> Result<TripleWeights, TowerError> {
    if t.k != 2 {
        return Err(TowerError::Unsupported("triple weights are computed for depth-2 towers".into()));
    }
    let tr = triple_space(t)?;
    let dw = double_weights(t)?;
    let w0 = dw.w_a.add(&dw.w_a0.neg()).scale(&Rational::new(1.into(), 2.into()));
    let mut shift = WeightVector::new();
    for p in &tr.projections {
        shift = shift.add(&w0.pullback(p));
    }
    let w_a0 = lift_weights(&tr.space, &WeightVector::new());
    let w_a = w_a0.add(&shift);
    let faces: Vec<String> = tr.space.face_names().into_iter().map(String::from).collect();
    compare("W_a0", &w_a0, &triple_w_a0_closed(t), &faces)?;
    Ok(TripleWeights { w_a0, shift, w_a })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(a1: u32, a2: u32, b: usize, f1: usize) -> Tower {
        Tower::depth2(a1, a2, b, f1, 1)
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma(&t(1, 1, 1, 1)).gamma, vec![2, 5]);
        assert_eq!(gamma(&t(2, 3, 0, 2)).gamma, vec![2, 11]);
        assert_eq!(gamma(&t(1, 1, 0, 0)).gamma, vec![1, 2]);
        assert_eq!(gamma(&Tower { k: 0, a: vec![1], b: 3, f: vec![] }).gamma, Vec::<u64>::new());
    }

    #[test]
    fn gamma_matches_blowup_counts() {
        for a1 in 1..=5 {
            for a2 in 1..=5 {
                for b in 0..=4 {
                    for f1 in 0..=4 {
                        let t = t(a1, a2, b, f1);
                        let g = gamma(&t);
                        assert!(g.gamma.windows(2).all(|w| w[0] < w[1]));
                        let d = double_weights(&t).unwrap();
                        assert_eq!(d.w_a0.get("ff_zy"), int(g.at(1) as i64));
                        assert_eq!(d.w_a0.get("ff_z"), int(g.at(2) as i64));
                    }
                }
            }
        }
        for a1 in 1..=5 {
            for b in 0..=4 {
                for f1 in 0..=4 {
                    let t = Tower { k: 1, a: vec![1, a1], b, f: vec![f1] };
                    assert_eq!(double_weights(&t).unwrap().w_a0.get("ff_y"), int(gamma(&t).at(1) as i64));
                }
            }
        }
    }

    #[test]
    fn double_example() {
        let d = double_weights(&t(1, 1, 1, 1)).unwrap();
        assert_eq!(d.w_tilde.values(&["rf", "lf", "ff_zx", "ff_zy", "ff_z"]), [-5, -5, -10, -8, -5].map(int).to_vec());
        assert_eq!(d.w_a.get("ff_z"), int(-5));
        assert_eq!(d.w_a0.get("ff_zy"), int(2));
    }

    #[test]
    fn triple_weight_values() {
        let tw = triple_weights(&t(1, 1, 1, 1)).unwrap();
        assert_eq!(tw.w_a0.get("V_z"), int(10));
        assert_eq!(triple_summary(&tw.w_a), [-2, 0, 0, -5, -2, 0, 0].map(int));
        assert_eq!(triple_summary(&tw.shift), [-6, -2, -2, -15, -9, -5, -5].map(int));
        let closed = triple_w_a_closed(&t(1, 1, 1, 1));
        for f in triple_weight_faces() {
            assert_eq!(tw.w_a.get(&f), closed.get(&f), "{f}");
        }
        for f in ["H_1", "V_x", "E_{2,x}"] {
            assert_eq!(tw.w_a.get(f), int(0));
        }
        assert_ne!(triple_summary(&triple_w_a_displayed(&t(1, 1, 1, 1))), triple_summary(&tw.w_a));
    }
}
