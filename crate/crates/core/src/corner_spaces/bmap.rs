//! b-maps between corner spaces: exponent matrices, face images, composition.

use super::{Space, SpaceError, PSub};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Where a boundary hypersurface of the domain goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaceImage {
    /// Onto the whole codomain.
    Interior,
    /// Into the face with this index.
    Face(usize),
    /// Into the corner where these faces meet.
    Corner(Vec<usize>),
}

/// Boundary-respecting map.  `exponents[g][h]` is the power of the defining
/// function of codomain face `h` in the pullback to domain face `g`;
/// `interior_orders[λ][g]` is the vanishing order at `g` of the pulled-back
/// interior label `λ` of the codomain.
#[derive(Debug, Clone)]
pub struct BMap {
    pub domain: Arc<Space>,
    pub codomain: Arc<Space>,
    pub exponents: Vec<Vec<u32>>,
    /// Codomain label → domain label it pulls back to (if any).
    pub label_map: Vec<Option<usize>>,
    pub interior_orders: Vec<Vec<u32>>,
}

impl BMap {
    pub fn identity(space: Arc<Space>) -> BMap {
        let n = space.face_count();
        let nl = space.labels.labels.len();
        let exponents = (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect();
        BMap { domain: space.clone(), codomain: space, exponents, label_map: (0..nl).map(Some).collect(), interior_orders: vec![vec![0; n]; nl] }
    }

    /// Projection of one product onto another forgetting factors.
    /// `point_map[p]` is the codomain factor the domain factor `p` goes to.
    pub fn projection(domain: Arc<Space>, codomain: Arc<Space>, point_map: &[Option<usize>]) -> Result<BMap, SpaceError> {
        if !domain.history.is_empty() || !codomain.history.is_empty() {
            return Err(SpaceError::Invalid("projections are defined between products".into()));
        }
        if point_map.len() != domain.base_faces || domain.labels.levels != codomain.labels.levels {
            return Err(SpaceError::MismatchedFactors);
        }
        let mut inv = vec![None; codomain.base_faces];
        for (p, c) in point_map.iter().enumerate() {
            if let Some(c) = *c {
                if c >= codomain.base_faces || inv[c].is_some() {
                    return Err(SpaceError::Invalid("factor map is not injective".into()));
                }
                inv[c] = Some(p);
            }
        }
        if inv.iter().any(|x| x.is_none()) {
            return Err(SpaceError::Invalid("factor map is not onto".into()));
        }
        let exponents = (0..domain.base_faces)
            .map(|p| (0..codomain.base_faces).map(|c| u32::from(point_map[p] == Some(c))).collect())
            .collect();
        let label_map = codomain
            .labels
            .labels
            .iter()
            .map(|l| {
                let (i, j) = (inv[l.pair.0].unwrap(), inv[l.pair.1].unwrap());
                Some(domain.labels.pair_label(i, j, l.level))
            })
            .collect();
        let nl = codomain.labels.labels.len();
        let nd = domain.face_count();
        Ok(BMap { domain, codomain, exponents, label_map, interior_orders: vec![vec![0; nd]; nl] })
    }

    pub fn face_image(&self, g: usize) -> FaceImage {
        let hs: Vec<usize> = (0..self.codomain.face_count()).filter(|&h| self.exponents[g][h] > 0).collect();
        match hs.len() {
            0 => FaceImage::Interior,
            1 => FaceImage::Face(hs[0]),
            _ => FaceImage::Corner(hs),
        }
    }

    pub fn face_map(&self) -> Vec<FaceImage> {
        (0..self.domain.face_count()).map(|g| self.face_image(g)).collect()
    }

    /// Row criterion: every domain face maps to a face or onto everything.
    pub fn is_b_fibration(&self) -> bool {
        self.exponents.iter().all(|row| row.iter().filter(|&&e| e > 0).count() <= 1)
    }

    /// `self: X → Y` followed by `g: Y → Z`.
    pub fn then(&self, g: &BMap) -> Result<BMap, SpaceError> {
        if !self.codomain.same_shape(&g.domain) {
            return Err(SpaceError::DomainMismatch(self.codomain.name.clone(), g.domain.name.clone()));
        }
        let nx = self.domain.face_count();
        let ny = self.codomain.face_count();
        let nz = g.codomain.face_count();
        let mut exponents = vec![vec![0u32; nz]; nx];
        for (gx, row) in exponents.iter_mut().enumerate() {
            for (hz, e) in row.iter_mut().enumerate() {
                *e = (0..ny).map(|hy| self.exponents[gx][hy] * g.exponents[hy][hz]).sum();
            }
        }
        let label_map: Vec<Option<usize>> = g.label_map.iter().map(|m| m.and_then(|l| self.label_map[l])).collect();
        let interior_orders = (0..g.label_map.len())
            .map(|mu| {
                (0..nx)
                    .map(|gx| {
                        let through: u32 = (0..ny).map(|hy| self.exponents[gx][hy] * g.interior_orders[mu][hy]).sum();
                        let own = g.label_map[mu].map_or(0, |s| self.interior_orders[s][gx]);
                        through + own
                    })
                    .collect()
            })
            .collect();
        Ok(BMap { domain: self.domain.clone(), codomain: g.codomain.clone(), exponents, label_map, interior_orders })
    }

    /// Composition in the usual order: `compose(f, g) = g ∘ f`.
    pub fn compose(f: &BMap, g: &BMap) -> Result<BMap, SpaceError> {
        f.then(g)
    }

    /// Preimage classes `codomain face → [domain faces]`, plus `None` for
    /// faces mapping onto the whole codomain, in domain order.
    pub fn preimage_classes(&self) -> Vec<(Option<usize>, Vec<usize>)> {
        let mut out: Vec<(Option<usize>, Vec<usize>)> = vec![(None, Vec::new())];
        out.extend((0..self.codomain.face_count()).map(|h| (Some(h), Vec::new())));
        for g in 0..self.domain.face_count() {
            match self.face_image(g) {
                FaceImage::Interior => out[0].1.push(g),
                FaceImage::Face(h) => out[h + 1].1.push(g),
                FaceImage::Corner(hs) => {
                    for h in hs {
                        out[h + 1].1.push(g);
                    }
                }
            }
        }
        out
    }

    /// Transport the domain along a face bijection `σ: X' → X` (as produced
    /// by [`super::isomorphic`] with `X'` first).
    pub fn precompose_relabel(&self, new_domain: Arc<Space>, sigma: &[usize]) -> BMap {
        let exponents = sigma.iter().map(|&i| self.exponents[i].clone()).collect();
        let interior_orders = self.interior_orders.iter().map(|row| sigma.iter().map(|&i| row[i]).collect()).collect();
        BMap { domain: new_domain, codomain: self.codomain.clone(), exponents, label_map: self.label_map.clone(), interior_orders }
    }

    pub fn exponent_row(&self, face: &str) -> Option<&[u32]> {
        self.domain.face_index(face).map(|g| self.exponents[g].as_slice())
    }
}

impl fmt::Display for BMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} -> {}", self.domain.name, self.codomain.name)?;
        let cols: Vec<&str> = (0..self.codomain.face_count()).map(|h| self.codomain.face_name(h)).collect();
        writeln!(f, "  [{}]", cols.join(", "))?;
        for (g, row) in self.exponents.iter().enumerate() {
            let r: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            writeln!(f, "  {}: ({})", self.domain.face_name(g), r.join(","))?;
        }
        Ok(())
    }
}

/// Given `f: X → Y` and a center `C` of `Y`, blow up `C` in `Y` and its
/// preimage in `X`, returning the lifted map `[X; f⁻¹C] → [Y; C]` and the new
/// spaces' blowdowns.  The preimage is the face set pulled back along
/// single-exponent rows, with the corresponding labels.
pub fn pullback_blowup(
    f: &BMap,
    center: &PSub,
    a: u32,
    ff_codomain: &str,
    ff_domain: &str,
) -> Result<(BMap, BMap, BMap), SpaceError> {
    let (cf, cl) = f.codomain.resolve(center)?;
    let mut faces = BTreeSet::new();
    for &h in &cf {
        let pre: Vec<usize> = (0..f.domain.face_count()).filter(|&g| f.exponents[g][h] > 0).collect();
        if pre.len() != 1 || f.exponents[pre[0]][h] != 1 {
            return Err(SpaceError::Invalid(format!(
                "face {} does not pull back to a single simple face",
                f.codomain.face_name(h)
            )));
        }
        faces.insert(f.domain.face_name(pre[0]).to_string());
    }
    let mut interior = BTreeSet::new();
    for &l in &cl {
        let dl = f.label_map[l].ok_or_else(|| SpaceError::UnknownLabel(f.codomain.labels.labels[l].name.clone()))?;
        if f.interior_orders[l].iter().any(|&m| m > 0) {
            return Err(SpaceError::Invalid("pulled-back label vanishes on a face".into()));
        }
        interior.insert(f.domain.labels.labels[dl].name.clone());
    }
    let pre = PSub { name: center.name.clone(), faces, interior, order: center.order };
    let (y2, beta_y) = f.codomain.blowup(center, a, ff_codomain)?;
    let (x2, beta_x) = f.domain.blowup(&pre, a, ff_domain)?;
    let (x2, y2) = (Arc::new(x2), Arc::new(y2));
    let gi = x2.face_index(ff_domain).expect("new face");
    let hi = y2.face_index(ff_codomain).expect("new face");
    let mut exponents: Vec<Vec<u32>> = f.exponents.iter().map(|r| {
        let mut r = r.clone();
        r.push(0);
        r
    }).collect();
    let mut row = vec![0u32; y2.face_count()];
    row[hi] = 1;
    exponents.push(row);
    debug_assert_eq!(gi, exponents.len() - 1);
    let mut interior_orders: Vec<Vec<u32>> = f.interior_orders.iter().map(|r| {
        let mut r = r.clone();
        r.push(0);
        r
    }).collect();
    // Labels of the center are rescaled on both sides; the rest vanish at the
    // new face to the same order as on the pulled-back center faces.
    let closed_y = &y2.history.last().unwrap().labels;
    let closed_x = &x2.history.last().unwrap().labels;
    for (mu, orders) in interior_orders.iter_mut().enumerate() {
        let on_y = closed_y.contains(&mu);
        let on_x = f.label_map[mu].is_some_and(|l| closed_x.contains(&l));
        orders[gi] = match (on_y, on_x) {
            (true, true) | (false, false) => 0,
            (false, true) => a,
            (true, false) => {
                return Err(SpaceError::Invalid("center label does not pull back into the preimage center".into()));
            }
        };
    }
    let lifted = BMap { domain: x2, codomain: y2, exponents, label_map: f.label_map.clone(), interior_orders };
    Ok((lifted, beta_x, beta_y))
}
