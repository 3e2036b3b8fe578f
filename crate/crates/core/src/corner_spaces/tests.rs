use super::*;

fn quadrant() -> Space {
    let lv = vec![Level { name: "x".into(), dim: 1 }, Level { name: "y".into(), dim: 1 }];
    product_space(
        "M2",
        &[FactorDescriptor { face: "rf".into(), levels: lv.clone() }, FactorDescriptor { face: "lf".into(), levels: lv }],
    )
    .unwrap()
}

#[test]
fn corner_blowup_rows() {
    let x = quadrant();
    let (y, beta) = x.blowup(&PSub::new("c", &["rf", "lf"], &[] as &[&str], ANY_ORDER), 1, "ff").unwrap();
    assert_eq!(y.face_count(), 3);
    assert_eq!(beta.exponent_row("ff").unwrap(), &[1, 1]);
    assert_eq!(beta.exponent_row("rf").unwrap(), &[1, 0]);
    assert_eq!(beta.exponent_row("lf").unwrap(), &[0, 1]);
    assert!(!y.meets(&[0, 1]));
    assert!(y.meets(&[0, 2]) && y.meets(&[1, 2]));
}

#[test]
fn quasihomogeneous_interior_order() {
    let x = quadrant();
    let (_, b1) = x.blowup(&PSub::new("c", &["rf", "lf"], &[] as &[&str], ANY_ORDER), 1, "ffx").unwrap();
    let y = b1.domain.as_ref().clone();
    let (z, b2) = y.blowup(&PSub::new("d", &["ffx"], &["d12:x", "d12:y"], ANY_ORDER), 2, "ffy").unwrap();
    let ffy = z.face_index("ffy").unwrap();
    let ly = z.labels().id("d12:y").unwrap();
    assert_eq!(b2.interior_orders[ly][ffy], 2);
    // the diagonal meets only the newest front face
    let diag = PSub::new("diag", &[] as &[&str], &["d12:x", "d12:y"], ANY_ORDER);
    assert_eq!(z.faces_met_by(&diag).unwrap(), vec![ffy]);
}

#[test]
fn hypersurface_blowup_is_identity_like() {
    let x = quadrant();
    let (y, beta) = x.blowup(&PSub::new("c", &["rf"], &[] as &[&str], ANY_ORDER), 1, "ff").unwrap();
    assert_eq!(y.face_count(), 2);
    assert!(isomorphic(&x, &y).is_some());
    assert_eq!(beta.exponents, vec![vec![1, 0], vec![0, 1]]);
}

#[test]
fn lift_inside_center_lowers_order() {
    let x = quadrant();
    let (y, _) = x.blowup(&PSub::new("c", &["rf", "lf"], &[] as &[&str], ANY_ORDER), 1, "ffx").unwrap();
    let v = PSub::new("v", &["ffx"], &["d12:x", "d12:y"], 3);
    let y = y.register(v.clone()).unwrap();
    let (_, beta) = y.blowup(&v.clone().with_order(3), 1, "ffy").unwrap();
    let l = lift(&beta, &v).unwrap();
    assert_eq!(l.order, 2);
    assert!(l.faces.contains("ffy"));
    let y2 = beta.domain.registered("v").unwrap();
    assert_eq!(y2.order, 2);
}

#[test]
fn registry_errors() {
    let x = quadrant();
    assert!(matches!(x.blowup_registered("nope", 1, "ff"), Err(SpaceError::NotInRegistry(_))));
    let c = PSub::new("c", &["rf", "lf"], &["d12:y"], 1);
    assert!(matches!(x.blowup(&c, 2, "ff"), Err(SpaceError::OrderDeficit { .. })));
}

#[test]
fn compose_with_identity() {
    let x = quadrant();
    let (_, b) = x.blowup(&PSub::new("c", &["rf", "lf"], &[] as &[&str], ANY_ORDER), 1, "ff").unwrap();
    let id = BMap::identity(b.codomain.clone());
    let c = b.then(&id).unwrap();
    assert_eq!(c.exponents, b.exponents);
    assert!(b.is_b_fibration() == false);
}

#[test]
fn self_isomorphism_is_identity() {
    let x = quadrant();
    let (y, _) = x.blowup(&PSub::new("c", &["rf", "lf"], &[] as &[&str], ANY_ORDER), 1, "ff").unwrap();
    assert_eq!(isomorphic(&y, &y), Some(vec![0, 1, 2]));
    assert_eq!(isomorphic(&x, &y), None);
}
