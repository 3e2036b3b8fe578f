//! Admissible coordinate changes and the algebra of **a**-functions, in
//! terms of x-power thresholds.
//!
//! Levels run from `-1` (the boundary defining function `x`) to `k`.  A
//! quantity on level `j` may depend on level `i > j` only through terms
//! vanishing to order `a_{j+1} + … + a_i`.

use super::{Tower, TowerError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossTerm {
    /// Deepest coordinate level the term depends on.
    pub source: i32,
    /// Power of `x` in front of it.
    pub power: u32,
}

/// The transformed coordinate on one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: i32,
    pub terms: Vec<CrossTerm>,
    /// Power of `x` in the unrestricted remainder (`None` if there is none).
    pub remainder: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordChangeSpec {
    pub rows: Vec<LevelRow>,
}

/// Terms `x^d u(x, y⁽⁰⁾, …, y⁽ˡ⁾)` of a formal expansion, as `(d, l)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalASeries {
    pub terms: Vec<(u32, i32)>,
}

/// `a_{from} + … + a_{to}` with indices clamped to the tower.
fn threshold(t: &Tower, from: i32, to: i32) -> u32 {
    (from.max(0)..=to).map(|i| t.a[i as usize]).sum()
}

/// Whether the coordinate change respects the structure of order `a`.
pub fn check_coord_change(t: &Tower, c: &CoordChangeSpec) -> Result<bool, TowerError> {
    t.validate()?;
    let k = t.k as i32;
    for row in &c.rows {
        let j = row.level;
        if j < -1 || j > k {
            return Err(TowerError::Invalid(format!("level {j} outside -1..={k}")));
        }
        for term in &row.terms {
            if term.source < -1 || term.source > k {
                return Err(TowerError::Invalid(format!("source level {} outside -1..={k}", term.source)));
            }
            if term.source > j && term.power < threshold(t, j + 1, term.source) {
                return Ok(false);
            }
        }
        if let Some(r) = row.remainder {
            if j < k && r < threshold(t, j + 1, k) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether the expansion lies in the algebra of **a**-functions.
pub fn a_function_member(t: &Tower, s: &FormalASeries) -> Result<bool, TowerError> {
    t.validate()?;
    let k = t.k as i32;
    for &(d, l) in &s.terms {
        if l < -1 || l > k {
            return Err(TowerError::Invalid(format!("level {l} outside -1..={k}")));
        }
        if l >= 0 && d < threshold(t, 0, l) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(level: i32, terms: &[(i32, u32)], remainder: Option<u32>) -> LevelRow {
        LevelRow { level, terms: terms.iter().map(|&(source, power)| CrossTerm { source, power }).collect(), remainder }
    }

    #[test]
    fn b_structure_order_two() {
        let t = Tower { k: 0, a: vec![2], b: 1, f: vec![] };
        let c = CoordChangeSpec { rows: vec![row(-1, &[], Some(2))] };
        assert!(check_coord_change(&t, &c).unwrap());
        let c = CoordChangeSpec { rows: vec![row(-1, &[(0, 1)], Some(2))] };
        assert!(!check_coord_change(&t, &c).unwrap());
    }

    #[test]
    fn fibred_boundary() {
        let t = Tower { k: 1, a: vec![1, 1], b: 1, f: vec![1] };
        let c = CoordChangeSpec { rows: vec![row(-1, &[(0, 1)], Some(2))] };
        assert!(check_coord_change(&t, &c).unwrap());
    }

    #[test]
    fn cross_level_without_vanishing() {
        let t = Tower::depth2(1, 1, 1, 1, 1);
        let c = CoordChangeSpec { rows: vec![row(0, &[(1, 0)], None)] };
        assert!(!check_coord_change(&t, &c).unwrap());
        let c = CoordChangeSpec { rows: vec![row(0, &[(1, 1), (2, 2)], Some(2))] };
        assert!(check_coord_change(&t, &c).unwrap());
    }

    #[test]
    fn a_functions() {
        let t = Tower::depth2(2, 1, 1, 1, 1);
        assert!(a_function_member(&t, &FormalASeries { terms: vec![(1, 0)] }).unwrap());
        assert!(!a_function_member(&t, &FormalASeries { terms: vec![(0, 2)] }).unwrap());
        assert!(a_function_member(&t, &FormalASeries { terms: vec![] }).unwrap());
        assert!(a_function_member(&t, &FormalASeries { terms: vec![(0, -1), (3, 1), (4, 2)] }).unwrap());
        assert!(!a_function_member(&t, &FormalASeries { terms: vec![(2, 1)] }).unwrap());
    }
}
