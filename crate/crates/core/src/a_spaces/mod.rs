//! Towers of boundary fibrations and the spaces built from them: the
//! **a**-double space with its projections, the **a**-triple space with its
//! three projections, and the coordinate-level checks on a tower.

pub mod coords;
pub mod tables;
pub mod triple;

pub use coords::{a_function_member, check_coord_change, CoordChangeSpec, CrossTerm, FormalASeries, LevelRow};
pub use triple::{triple_projections, triple_space, verify_facemaps, ASpaceTriple, FacemapReport};

use crate::corner_spaces::{product_space, BMap, FactorDescriptor, Level, PSub, Space, SpaceError, ANY_ORDER};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TowerError {
    #[error("invalid tower: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("rewrite script failed: {0}")]
    Rewrite(String),
}

/// Depth `k`, orders `a = (a_0, …, a_k)`, base dimension `b` and fibre
/// dimensions `f = (f_1, …, f_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tower {
    pub k: usize,
    pub a: Vec<u32>,
    pub b: usize,
    pub f: Vec<usize>,
}

impl Tower {
    pub fn new(a: Vec<u32>, b: usize, f: Vec<usize>) -> Result<Tower, TowerError> {
        let t = Tower { k: f.len(), a, b, f };
        t.validate()?;
        Ok(t)
    }

    /// The common `k = 2` tower with `a_0 = 1`.
    pub fn depth2(a1: u32, a2: u32, b: usize, f1: usize, f2: usize) -> Tower {
        Tower { k: 2, a: vec![1, a1, a2], b, f: vec![f1, f2] }
    }

    pub fn validate(&self) -> Result<(), TowerError> {
        if self.a.len() != self.k + 1 {
            return Err(TowerError::Invalid(format!("expected {} orders, got {}", self.k + 1, self.a.len())));
        }
        if self.f.len() != self.k {
            return Err(TowerError::Invalid(format!("expected {} fibre dimensions, got {}", self.k, self.f.len())));
        }
        if self.a.iter().any(|&x| x == 0) {
            return Err(TowerError::Invalid("orders must be at least 1".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Tower, TowerError> {
        let t: Tower = serde_json::from_str(text).map_err(|e| TowerError::Invalid(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn dim(&self) -> usize {
        1 + self.b + self.f.iter().sum::<usize>()
    }

    fn require_space_ready(&self) -> Result<(), TowerError> {
        self.validate()?;
        if self.a[0] != 1 {
            return Err(TowerError::Unsupported("space constructions need a_0 = 1".into()));
        }
        Ok(())
    }

    /// Coordinate groups of one factor: the boundary ratio, then `y`, then
    /// one group per fibre.
    pub fn levels(&self) -> Vec<Level> {
        let mut dims = vec![1, self.b];
        dims.extend(self.f.iter().copied());
        dims.into_iter().enumerate().map(|(i, dim)| Level { name: level_name(i), dim }).collect()
    }

    /// `a_1 + … + a_l`.
    pub fn order_sum(&self, from: usize, to: usize) -> u32 {
        self.a[from..=to].iter().sum()
    }
}

pub fn level_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "w".into(),
        n => format!("l{n}"),
    }
}

/// Names of the front faces of the double space, corner first.
pub fn double_front_names(k: usize) -> Vec<String> {
    match k {
        0 => vec!["ff_x".into()],
        1 => vec!["ff_yx".into(), "ff_y".into()],
        2 => vec!["ff_zx".into(), "ff_zy".into(), "ff_z".into()],
        _ => (0..=k).map(|i| format!("ff_{i}")).collect(),
    }
}

/// Labels of the pair `(i, j)` on levels `0..=top`.
pub fn pair_labels(i: usize, j: usize, top: usize) -> Vec<String> {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    (0..=top).map(|l| format!("d{}{}:{}", i + 1, j + 1, level_name(l))).collect()
}

#[derive(Debug, Clone)]
pub struct ASpaceDouble {
    pub tower: Tower,
    pub space: Arc<Space>,
    pub diag: PSub,
    pub proj_l: BMap,
    pub proj_r: BMap,
    /// Total blowdown to `M²`.
    pub blowdown: BMap,
}

/// The one-boundary-face model `M`.
pub fn single_space(t: &Tower) -> Result<Space, TowerError> {
    Ok(product_space("M", &[FactorDescriptor { face: "bM".into(), levels: t.levels() }])?)
}

/// `M²` with the right factor first: faces `(rf, lf)`.
pub fn double_product(t: &Tower) -> Result<Space, TowerError> {
    let lv = t.levels();
    Ok(product_space(
        "M2",
        &[FactorDescriptor { face: "rf".into(), levels: lv.clone() }, FactorDescriptor { face: "lf".into(), levels: lv }],
    )?)
}

/// Blow up the corner, then the boundary fibre diagonals level by level.
pub fn double_space(t: &Tower) -> Result<ASpaceDouble, TowerError> {
    t.require_space_ready()?;
    let names = double_front_names(t.k);
    let base = double_product(t)?;
    let top = t.k + 1;
    let mut x = base.clone();
    for l in 1..=t.k {
        x = x.register(PSub::new(&format!("dDelta_{l}"), &["rf", "lf"], &pair_labels(0, 1, l), t.order_sum(1, l)))?;
    }
    x = x.register(PSub::new("Delta", &[] as &[&str], &pair_labels(0, 1, top), ANY_ORDER))?;
    let corner = PSub::new("corner", &["rf", "lf"], &[] as &[&str], ANY_ORDER);
    let (mut x, mut total) = x.blowup(&corner, 1, &names[0])?;
    for l in 1..=t.k {
        let (y, beta) = x.blowup_registered(&format!("dDelta_{l}"), t.a[l], &names[l])?;
        total = beta.then(&total)?;
        x = y;
    }
    let x = x.renamed(&double_name(t.k));
    let diag = x.registered("Delta").expect("registered").clone();
    let space = Arc::new(x);
    let blowdown = BMap { domain: space.clone(), ..total };
    let m = Arc::new(single_space(t)?);
    let bp = blowdown.codomain.clone();
    let pl = BMap::projection(bp.clone(), m.clone(), &[None, Some(0)])?;
    let pr = BMap::projection(bp, m, &[Some(0), None])?;
    Ok(ASpaceDouble {
        tower: t.clone(),
        proj_l: blowdown.then(&pl)?,
        proj_r: blowdown.then(&pr)?,
        space,
        diag,
        blowdown,
    })
}

fn double_name(k: usize) -> String {
    match k {
        0 => "M2_x".into(),
        1 => "M2_y".into(),
        2 => "M2_z".into(),
        _ => format!("M2_{k}"),
    }
}

/// Exponent vectors of the left and right projections.
pub fn double_projections(t: &Tower) -> Result<(BMap, BMap), TowerError> {
    let d = double_space(t)?;
    Ok((d.proj_l, d.proj_r))
}

/// Keep the first `l` fibrations; deeper fibres become non-degenerate directions.
pub fn reduce(t: &Tower, l: usize) -> Result<Tower, TowerError> {
    t.validate()?;
    if l > t.k {
        return Err(TowerError::Invalid(format!("cannot reduce depth {} to {}", t.k, l)));
    }
    if l == t.k {
        return Ok(t.clone());
    }
    let a = t.a[..=l].to_vec();
    if l == 0 {
        return Ok(Tower { k: 0, a, b: t.b + t.f.iter().sum::<usize>(), f: vec![] });
    }
    let mut f = t.f[..l - 1].to_vec();
    f.push(t.f[l - 1..].iter().sum());
    Ok(Tower { k: l, a, b: t.b, f })
}

/// Rank of the normal bundle of order `(a_0, …, a_l)`: `1 + b + f_1 + … + f_{l−1}`.
pub fn normal_bundle_rank(t: &Tower, l: usize) -> Result<usize, TowerError> {
    t.validate()?;
    if l > t.k {
        return Err(TowerError::Invalid(format!("level {l} exceeds depth {}", t.k)));
    }
    Ok(match l {
        0 => 1,
        _ => 1 + t.b + t.f[..l - 1].iter().sum::<usize>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_space_faces() {
        let t = Tower::depth2(1, 1, 1, 1, 1);
        let d = double_space(&t).unwrap();
        assert_eq!(d.space.face_names(), vec!["rf", "lf", "ff_zx", "ff_zy", "ff_z"]);
        let met = d.space.faces_met_by(&d.diag).unwrap();
        assert_eq!(met, vec![4]);
        assert_eq!(d.proj_l.exponent_row("rf").unwrap(), &[0]);
    }

    #[test]
    fn projection_vectors() {
        for (t, l, r) in [
            (Tower { k: 0, a: vec![1], b: 2, f: vec![] }, vec![0, 1, 1], vec![1, 0, 1]),
            (Tower { k: 1, a: vec![1, 3], b: 1, f: vec![2] }, vec![0, 1, 1, 1], vec![1, 0, 1, 1]),
            (Tower::depth2(2, 3, 1, 0, 1), vec![0, 1, 1, 1, 1], vec![1, 0, 1, 1, 1]),
        ] {
            let (pl, pr) = double_projections(&t).unwrap();
            let col = |m: &BMap| m.exponents.iter().map(|r| r[0]).collect::<Vec<_>>();
            assert_eq!(col(&pl), l);
            assert_eq!(col(&pr), r);
            assert!(pl.is_b_fibration() && pr.is_b_fibration());
        }
    }

    #[test]
    fn deep_towers_build() {
        let t = Tower { k: 3, a: vec![1, 1, 2, 1], b: 1, f: vec![1, 1, 1] };
        let d = double_space(&t).unwrap();
        assert_eq!(d.space.face_count(), 6);
        assert_eq!(d.space.faces_met_by(&d.diag).unwrap(), vec![5]);
    }

    #[test]
    fn reduction() {
        let t = Tower::depth2(2, 3, 1, 2, 4);
        assert_eq!(reduce(&t, 2).unwrap(), t);
        assert_eq!(reduce(&t, 0).unwrap(), Tower { k: 0, a: vec![1], b: 7, f: vec![] });
        assert_eq!(reduce(&t, 1).unwrap(), Tower { k: 1, a: vec![1, 2], b: 1, f: vec![6] });
        for l in 0..=2 {
            for l2 in 0..=l {
                assert_eq!(reduce(&reduce(&t, l).unwrap(), l2).unwrap(), reduce(&t, l2).unwrap());
            }
            assert_eq!(reduce(&t, l).unwrap().dim(), t.dim());
        }
    }

    #[test]
    fn normal_ranks() {
        let t = Tower::depth2(1, 1, 1, 1, 3);
        assert_eq!(normal_bundle_rank(&t, 2).unwrap(), 3);
        assert_eq!(normal_bundle_rank(&t, 0).unwrap(), 1);
        assert_eq!(normal_bundle_rank(&Tower::depth2(1, 1, 0, 0, 0), 2).unwrap(), 1);
    }

    #[test]
    fn bad_towers() {
        assert!(Tower::from_json(r#"{"k":2,"a":[1,1],"b":1,"f":[1,1]}"#).is_err());
        assert!(Tower::from_json(r#"{"k":1,"a":[1,0],"b":1,"f":[1]}"#).is_err());
        let t = Tower::from_json(r#"{"k":1,"a":[2,1],"b":1,"f":[1]}"#).unwrap();
        assert!(double_space(&t).is_err());
    }
}
