use acalc::a_spaces::{double_space, triple_space, Tower};
use acalc::corner_spaces::{isomorphic, rewrite_step, FaceImage, PSub, Space, ANY_ORDER};
use std::sync::Arc;

fn towers() -> Vec<Tower> {
    vec![Tower::depth2(1, 1, 1, 1, 1), Tower::depth2(2, 3, 1, 1, 1), Tower::depth2(3, 1, 2, 1, 2)]
}

#[test]
fn single_steps_have_binary_exponents_and_front_faces_cover_their_center() {
    for t in towers() {
        let tr = triple_space(&t).unwrap();
        let mut x: Space = tr.sequence.base.clone();
        for st in &tr.sequence.steps {
            let (y, beta) = x.blowup(&st.center(), st.order, &st.name).unwrap();
            assert!(beta.exponents.iter().flatten().all(|&e| e <= 1), "{}: {beta}", st.name);
            let ff = y.face_index(&st.name).unwrap();
            let want: Vec<usize> = st.faces.iter().map(|f| x.face_index(f).unwrap()).collect();
            let got = match beta.face_image(ff) {
                FaceImage::Face(h) => vec![h],
                FaceImage::Corner(hs) => hs,
                FaceImage::Interior => vec![],
            };
            let mut want = want;
            want.sort();
            assert_eq!(got, want, "front face {} of {t:?}", st.name);
            x = y;
        }
    }
}

#[test]
fn rewrite_steps_preserve_the_space() {
    for t in towers() {
        let tr = triple_space(&t).unwrap();
        let mut cur = tr.sequence.clone();
        let reference = cur.realize().unwrap();
        assert!(!tr.scripts[0].is_empty());
        for &(rule, pos) in &tr.scripts[0] {
            cur = rewrite_step(&cur, rule, pos).unwrap();
            assert!(isomorphic(&reference, &cur.realize().unwrap()).is_some(), "{rule:?} at {pos}");
        }
        assert_eq!(cur.names(), tr.commuted[0].names());
    }
}

#[test]
fn composition_is_associative() {
    for t in towers() {
        let tr = triple_space(&t).unwrap();
        let mut x: Space = tr.sequence.base.clone();
        let mut betas = Vec::new();
        for st in &tr.sequence.steps {
            let (y, beta) = x.blowup(&st.center(), st.order, &st.name).unwrap();
            betas.push(beta);
            x = y;
        }
        for w in betas.windows(3) {
            let (b1, b2, b3) = (&w[0], &w[1], &w[2]);
            let left = b3.then(b2).unwrap().then(b1).unwrap();
            let right = b3.then(&b2.then(b1).unwrap()).unwrap();
            assert_eq!(left.exponents, right.exponents);
            assert_eq!(left.interior_orders, right.interior_orders);
        }
    }
}

#[test]
fn b_fibrations_stay_b_fibrations_after_blowing_up_a_corner() {
    for t in towers() {
        let d = double_space(&t).unwrap();
        let s: &Space = &d.space;
        let names = s.face_names();
        for i in 0..s.face_count() {
            for j in i + 1..s.face_count() {
                if !s.meets(&[i, j]) {
                    continue;
                }
                let c = PSub::new("c", &[&names[i], &names[j]], &[] as &[&str], ANY_ORDER);
                let (_, beta) = s.blowup(&c, 1, "new").unwrap();
                let beta = acalc::corner_spaces::BMap { codomain: Arc::clone(&d.space), ..beta };
                for p in [&d.proj_l, &d.proj_r] {
                    assert!(p.is_b_fibration());
                    assert!(beta.then(p).unwrap().is_b_fibration(), "{} ∩ {}", names[i], names[j]);
                }
            }
        }
    }
}
