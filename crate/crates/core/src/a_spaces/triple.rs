//! The **a**-triple space and its three projections to the double space.
//!
//! The symmetric construction blows up `M³` in the order: vertex, axes, then
//! for each level the triple boundary diagonal and the double fibre
//! diagonals meeting `V`, `G` and `E` faces.  A projection is obtained by
//! rewriting that sequence (with the commutation rules) into one that starts
//! with the pullback of the double-space construction along `M³ → M²`, and
//! composing the remaining blowdowns with the lifted projection.

use super::tables::{self, Table};
use super::{double_space, level_name, pair_labels, reduce, ASpaceDouble, Tower, TowerError};
use crate::corner_spaces::bmap::pullback_blowup;
use crate::corner_spaces::rewrite::{rewrite_step, BlowupSeq, Rule, SeqStep};
use crate::corner_spaces::{isomorphic, product_space, BMap, FaceImage, FactorDescriptor, PSub, Space, ANY_ORDER};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A permutation of the three factors, `σ(i)` for `i = 1, 2, 3` (1-based).
pub type Perm = [usize; 3];

/// Relabelings taking the first projection to the `i`-th: the forgotten
/// factor is `σ(1)`, the left factor `σ(2)`, the right factor `σ(3)`.
pub const SIGMA: [Perm; 3] = [[1, 2, 3], [2, 1, 3], [3, 1, 2]];

#[derive(Debug, Clone)]
pub struct ASpaceTriple {
    pub tower: Tower,
    pub space: Arc<Space>,
    pub sequence: BlowupSeq,
    pub double: ASpaceDouble,
    /// `π_1, π_2, π_3` to the double space.
    pub projections: Vec<BMap>,
    /// The rewritten sequences, one per projection.
    pub commuted: Vec<BlowupSeq>,
    /// The `(rule, position)` scripts that produced them.
    pub scripts: Vec<Vec<(Rule, usize)>>,
}

pub fn face(kind: &str, i: usize, level: usize) -> String {
    format!("{}_{{{},{}}}", kind, i, level_name(level))
}

/// `M³` with faces `H_1, H_2, H_3` and the pair and triple diagonals registered.
pub fn triple_product(t: &Tower) -> Result<Space, TowerError> {
    let lv = t.levels();
    let mut x = product_space(
        "M3",
        &(1..=3).map(|i| FactorDescriptor { face: format!("H_{i}"), levels: lv.clone() }).collect::<Vec<_>>(),
    )?;
    let top = t.k + 1;
    for (i, (p, q)) in [(1, 2), (0, 2), (0, 1)].into_iter().enumerate() {
        x = x.register(PSub::new(&format!("Delta_{}", i + 1), &[] as &[&str], &pair_labels(p, q, top), ANY_ORDER))?;
    }
    let all: Vec<String> = [(0, 1), (0, 2), (1, 2)].iter().flat_map(|&(p, q)| pair_labels(p, q, top)).collect();
    x = x.register(PSub::new("Delta3", &[] as &[&str], &all, ANY_ORDER))?;
    Ok(x)
}

/// The blowup sequence of the symmetric construction.
pub fn symmetric_sequence(t: &Tower) -> Result<BlowupSeq, TowerError> {
    t.validate()?;
    if t.k > 2 {
        return Err(TowerError::Unsupported("triple spaces are constructed for depth k <= 2 only".into()));
    }
    if t.a[0] != 1 {
        return Err(TowerError::Unsupported("space constructions need a_0 = 1".into()));
    }
    let base = triple_product(t)?;
    let other = |i: usize| -> (usize, usize) {
        match i {
            1 => (1, 2),
            2 => (0, 2),
            _ => (0, 1),
        }
    };
    let all = |top: usize| -> Vec<String> { [(0, 1), (0, 2), (1, 2)].iter().flat_map(|&(p, q)| pair_labels(p, q, top)).collect() };
    let none: &[&str] = &[];
    let mut steps = vec![SeqStep::new("V_x", &["H_1", "H_2", "H_3"], none, 1)];
    for i in 1..=3 {
        let hs: Vec<String> = (1..=3).filter(|&j| j != i).map(|j| format!("H_{j}")).collect();
        steps.push(SeqStep::new(&face("E", i, 0), &hs, none, 1));
    }
    if t.k >= 1 {
        let a = t.a[1];
        steps.push(SeqStep::new("V_y", &["V_x"], &all(1), a));
        for i in 1..=3 {
            let (p, q) = other(i);
            steps.push(SeqStep::new(&face("G", i, 1), &["V_x"], &pair_labels(p, q, 1), a));
        }
        for i in 1..=3 {
            let (p, q) = other(i);
            steps.push(SeqStep::new(&face("E", i, 1), &[face("E", i, 0)], &pair_labels(p, q, 1), a));
        }
    }
    if t.k >= 2 {
        let a = t.a[2];
        steps.push(SeqStep::new("V_z", &["V_y"], &all(2), a));
        for i in 1..=3 {
            let (p, q) = other(i);
            steps.push(SeqStep::new(&face("F", i, 2), &["V_y"], &pair_labels(p, q, 2), a));
        }
        for i in 1..=3 {
            let (p, q) = other(i);
            steps.push(SeqStep::new(&face("G", i, 2), &[face("G", i, 1)], &pair_labels(p, q, 2), a));
        }
        for i in 1..=3 {
            let (p, q) = other(i);
            steps.push(SeqStep::new(&face("E", i, 2), &[face("E", i, 1)], &pair_labels(p, q, 2), a));
        }
    }
    Ok(BlowupSeq::new(base, steps))
}

/// Apply `σ` to a face or label name.
pub fn relabel_name(name: &str, s: &Perm) -> String {
    if let Some(rest) = name.strip_prefix("H_") {
        if let Ok(i) = rest.parse::<usize>() {
            return format!("H_{}", s[i - 1]);
        }
    }
    for kind in ["E", "G", "F"] {
        if let Some(rest) = name.strip_prefix(&format!("{kind}_{{")) {
            if let Some((i, lvl)) = rest.trim_end_matches('}').split_once(',') {
                if let Ok(i) = i.parse::<usize>() {
                    return format!("{kind}_{{{},{}}}", s[i - 1], lvl);
                }
            }
        }
    }
    if let Some(rest) = name.strip_prefix('d') {
        if let Some((pair, lvl)) = rest.split_once(':') {
            let b = pair.as_bytes();
            if b.len() == 2 {
                let p = s[(b[0] - b'0') as usize - 1];
                let q = s[(b[1] - b'0') as usize - 1];
                let (p, q) = if p < q { (p, q) } else { (q, p) };
                return format!("d{p}{q}:{lvl}");
            }
        }
    }
    name.to_string()
}

fn relabel_step(st: &SeqStep, s: &Perm) -> SeqStep {
    SeqStep {
        name: relabel_name(&st.name, s),
        faces: st.faces.iter().map(|f| relabel_name(f, s)).collect(),
        interior: st.interior.iter().map(|f| relabel_name(f, s)).collect(),
        order: st.order,
    }
}

/// Named script operations for the first projection; relabeled for the others.
#[derive(Debug, Clone)]
enum Op {
    Nested(String),
    Clean(String),
    /// Move the first step right, past the second, by disjoint swaps.
    After(String, String),
    /// Move the first step left, in front of the second, by disjoint swaps.
    Before(String, String),
}

fn ops(k: usize) -> Vec<Op> {
    use Op::*;
    let s = |x: &str| x.to_string();
    let mut v = vec![Nested(s("V_x"))];
    if k >= 1 {
        v.extend([
            Before(s("E_{1,y}"), s("G_{2,y}")),
            Nested(s("V_y")),
            After(s("V_y"), s("E_{1,y}")),
            After(s("E_{3,x}"), s("E_{1,y}")),
            After(s("E_{2,x}"), s("E_{1,y}")),
            Clean(s("V_x")),
        ]);
    }
    if k >= 2 {
        v.extend([
            Before(s("G_{1,z}"), s("F_{2,z}")),
            Before(s("E_{1,z}"), s("F_{2,z}")),
            Nested(s("V_z")),
            After(s("V_z"), s("E_{1,z}")),
            After(s("E_{3,y}"), s("E_{1,z}")),
            After(s("E_{2,y}"), s("E_{1,z}")),
            After(s("G_{3,y}"), s("E_{1,z}")),
            After(s("G_{2,y}"), s("E_{1,z}")),
            After(s("E_{3,x}"), s("E_{1,z}")),
            After(s("E_{2,x}"), s("E_{1,z}")),
            Clean(s("V_y")),
            Before(s("E_{1,z}"), s("F_{1,z}")),
            After(s("V_x"), s("E_{1,z}")),
            Clean(s("G_{1,y}")),
        ]);
    }
    v
}

fn run_ops(seq: &BlowupSeq, ops: &[Op], s: &Perm) -> Result<(BlowupSeq, Vec<(Rule, usize)>), TowerError> {
    let mut cur = seq.clone();
    let mut script = Vec::new();
    let pos = |cur: &BlowupSeq, n: &str| -> Result<usize, TowerError> {
        let n = relabel_name(n, s);
        cur.position(&n).ok_or_else(|| TowerError::Rewrite(format!("no step named {n}")))
    };
    let mut apply = |cur: &mut BlowupSeq, rule: Rule, p: usize| -> Result<(), TowerError> {
        *cur = rewrite_step(cur, rule, p).map_err(|e| TowerError::Rewrite(format!("{e}\n{cur}")))?;
        script.push((rule, p));
        Ok(())
    };
    for op in ops {
        match op {
            Op::Nested(n) => {
                let p = pos(&cur, n)?;
                apply(&mut cur, Rule::Nested, p)?;
            }
            Op::Clean(n) => {
                let p = pos(&cur, n)?;
                apply(&mut cur, Rule::Clean, p)?;
            }
            Op::After(n, m) => {
                let (mut p, q) = (pos(&cur, n)?, pos(&cur, m)?);
                while p < q {
                    apply(&mut cur, Rule::Disjoint, p)?;
                    p += 1;
                }
            }
            Op::Before(n, m) => {
                let (mut p, q) = (pos(&cur, n)?, pos(&cur, m)?);
                while p > q {
                    apply(&mut cur, Rule::Disjoint, p - 1)?;
                    p -= 1;
                }
            }
        }
    }
    Ok((cur, script))
}

/// The symmetric sequence relabeled by `σ` and rewritten so that it starts
/// with the pullback of the double-space construction.
pub fn commuted_sequence(t: &Tower, sym: &BlowupSeq, s: &Perm) -> Result<(BlowupSeq, Vec<(Rule, usize)>), TowerError> {
    let relabeled = BlowupSeq::new(sym.base.clone(), sym.steps.iter().map(|st| relabel_step(st, s)).collect());
    run_ops(&relabeled, &ops(t.k), s)
}

/// Build the triple space (symmetric construction) and its projections.
pub fn triple_space(t: &Tower) -> Result<ASpaceTriple, TowerError> {
    let sequence = symmetric_sequence(t)?;
    let space = Arc::new(sequence.realize()?.renamed(&triple_name(t.k)));
    let double = double_space(t)?;
    let mut projections = Vec::new();
    let mut commuted = Vec::new();
    let mut scripts = Vec::new();
    for s in &SIGMA {
        let (p, c, sc) = projection_for(t, &sequence, &space, &double, s)?;
        projections.push(p);
        commuted.push(c);
        scripts.push(sc);
    }
    Ok(ASpaceTriple { tower: t.clone(), space, sequence, double, projections, commuted, scripts })
}

/// Projection `π_i` (1-based) of the triple space.
pub fn triple_projections(t: &Tower, i: usize) -> Result<BMap, TowerError> {
    if !(1..=3).contains(&i) {
        return Err(TowerError::Invalid(format!("projection index {i} not in 1..=3")));
    }
    let sequence = symmetric_sequence(t)?;
    let space = Arc::new(sequence.realize()?.renamed(&triple_name(t.k)));
    let double = double_space(t)?;
    Ok(projection_for(t, &sequence, &space, &double, &SIGMA[i - 1])?.0)
}

fn triple_name(k: usize) -> String {
    format!("M3_{}", level_name(k))
}

fn projection_for(
    t: &Tower,
    sym: &BlowupSeq,
    sym_space: &Arc<Space>,
    double: &ASpaceDouble,
    s: &Perm,
) -> Result<(BMap, BlowupSeq, Vec<(Rule, usize)>), TowerError> {
    let (com, script) = commuted_sequence(t, sym, s)?;

    // Pull the double-space construction back along M³ → M².
    let m3 = Arc::new(sym.base.clone());
    let m2 = double.blowdown.codomain.clone();
    let mut point_map = vec![None; 3];
    point_map[s[1] - 1] = Some(1);
    point_map[s[2] - 1] = Some(0);
    let mut f = BMap::projection(m3, m2, &point_map)?;
    for (l, step) in double.space.history().iter().enumerate() {
        let ff_cod = double.space.face_name(step.ff).to_string();
        let ff_dom = relabel_name(&face("E", 1, l), s);
        let (lifted, _, _) = pullback_blowup(&f, &step.center, step.order, &ff_cod, &ff_dom)?;
        let got = &lifted.domain.history().last().expect("blown up").center;
        let want = &com.steps[l];
        let boundary = want.interior.is_empty();
        if want.name != ff_dom || got.faces != want.faces || got.interior != want.interior || (!boundary && want.order != step.order) {
            return Err(TowerError::Rewrite(format!(
                "commuted step {l} is {want}, expected the pullback {ff_dom} = [{got}]_{}",
                step.order
            )));
        }
        f = lifted;
    }
    let mut x = f.domain.as_ref().clone();
    let mut total: Option<BMap> = None;
    for st in &com.steps[t.k + 1..] {
        let (y, beta) = x.blowup(&st.center(), st.order, &st.name)?;
        total = Some(match total {
            None => beta,
            Some(tt) => beta.then(&tt)?,
        });
        x = y;
    }
    let proj = match total {
        Some(tt) => tt.then(&f)?,
        None => f,
    };
    if !proj.codomain.same_shape(&double.space) {
        return Err(TowerError::Rewrite("lifted projection lands in a different double space".into()));
    }
    let proj = BMap { codomain: double.space.clone(), ..proj };
    let com_space = proj.domain.clone();
    let sigma = isomorphic(sym_space, &com_space)
        .ok_or_else(|| TowerError::Rewrite("commuted construction is not isomorphic to the symmetric one".into()))?;
    for (i, &j) in sigma.iter().enumerate() {
        if sym_space.face_name(i) != com_space.face_name(j) {
            return Err(TowerError::Rewrite(format!(
                "isomorphism pairs {} with {}",
                sym_space.face_name(i),
                com_space.face_name(j)
            )));
        }
    }
    Ok((proj.precompose_relabel(sym_space.clone(), &sigma), com, script))
}

/// Preimage classes of a projection keyed by double-space face (or
/// `interior`), each sorted.
pub fn face_partition(p: &BMap) -> Result<BTreeMap<String, Vec<String>>, TowerError> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    out.insert("interior".into(), Vec::new());
    for h in 0..p.codomain.face_count() {
        out.insert(p.codomain.face_name(h).to_string(), Vec::new());
    }
    for g in 0..p.domain.face_count() {
        let key = match p.face_image(g) {
            FaceImage::Interior => "interior".to_string(),
            FaceImage::Face(h) => p.codomain.face_name(h).to_string(),
            FaceImage::Corner(_) => {
                return Err(TowerError::Rewrite(format!("{} maps into a corner", p.domain.face_name(g))));
            }
        };
        out.get_mut(&key).expect("class exists").push(p.domain.face_name(g).to_string());
    }
    for v in out.values_mut() {
        v.sort();
    }
    Ok(out)
}

/// Reference table relabeled for the `i`-th projection.
pub fn expected_partition(table: Table, s: &Perm) -> BTreeMap<String, Vec<String>> {
    table
        .iter()
        .map(|(k, v)| {
            let mut v: Vec<String> = v.iter().map(|n| relabel_name(n, s)).collect();
            v.sort();
            (k.to_string(), v)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub level: usize,
    pub projection: usize,
    pub class: String,
    pub expected: Vec<String>,
    pub computed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacemapReport {
    pub tables: usize,
    pub classes: usize,
    pub faces: Vec<usize>,
    pub mismatches: Vec<Mismatch>,
}

impl fmt::Display for FacemapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} tables, {} mismatches", self.tables, self.mismatches.len())?;
        for m in &self.mismatches {
            writeln!(
                f,
                "  level {} pi_{} {}: expected {{{}}}, computed {{{}}}",
                level_name(m.level),
                m.projection,
                m.class,
                m.expected.join(", "),
                m.computed.join(", ")
            )?;
        }
        Ok(())
    }
}

/// Compare all three projections at the x-, y- and z-levels with the
/// reference tables (relabeled for the second and third projection).
pub fn verify_facemaps(t: &Tower) -> Result<FacemapReport, TowerError> {
    if t.k != 2 {
        return Err(TowerError::Unsupported("face tables are checked on depth-2 towers".into()));
    }
    let mut report = FacemapReport { tables: 0, classes: 0, faces: Vec::new(), mismatches: Vec::new() };
    for level in 0..=2 {
        let tl = reduce(t, level)?;
        let tr = triple_space(&tl)?;
        let table = tables::table(level).expect("levels 0..=2 have tables");
        report.tables += 1;
        report.classes += table.len();
        report.faces.push(tr.space.face_count());
        for (i, p) in tr.projections.iter().enumerate() {
            let got = face_partition(p)?;
            let want = expected_partition(table, &SIGMA[i]);
            let keys: std::collections::BTreeSet<&String> = got.keys().chain(want.keys()).collect();
            for key in keys {
                let g = got.get(key).cloned().unwrap_or_default();
                let w = want.get(key).cloned().unwrap_or_default();
                if g != w {
                    report.mismatches.push(Mismatch { level, projection: i + 1, class: key.clone(), expected: w, computed: g });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeling() {
        let s = [3, 1, 2];
        assert_eq!(relabel_name("E_{2,z}", &s), "E_{1,z}");
        assert_eq!(relabel_name("H_1", &s), "H_3");
        assert_eq!(relabel_name("d12:y", &s), "d13:y");
        assert_eq!(relabel_name("d23:x", &s), "d12:x");
        assert_eq!(relabel_name("V_z", &s), "V_z");
    }

    #[test]
    fn symmetric_face_counts() {
        let counts: Vec<usize> = (0..=2)
            .map(|k| symmetric_sequence(&reduce(&Tower::depth2(2, 1, 1, 1, 1), k).unwrap()).unwrap().realize().unwrap().face_count())
            .collect();
        assert_eq!(counts, vec![7, 14, 24]);
    }

    #[test]
    fn x_level_projection() {
        let t = Tower { k: 0, a: vec![1], b: 1, f: vec![] };
        let tr = triple_space(&t).unwrap();
        let got = face_partition(&tr.projections[0]).unwrap();
        assert_eq!(got, expected_partition(tables::X_LEVEL, &SIGMA[0]));
    }

    #[test]
    fn facemaps_match_tables() {
        for t in [Tower::depth2(1, 1, 1, 1, 1), Tower::depth2(2, 3, 1, 1, 1)] {
            let r = verify_facemaps(&t).unwrap();
            assert_eq!((r.tables, r.mismatches.len()), (3, 0), "{r}");
            assert_eq!(r.faces, vec![7, 14, 24]);
        }
    }

    #[test]
    fn projections_are_b_fibrations() {
        let tr = triple_space(&Tower::depth2(2, 1, 1, 1, 1)).unwrap();
        for p in &tr.projections {
            assert!(p.is_b_fibration());
            let n: usize = face_partition(p).unwrap().values().map(|v| v.len()).sum();
            assert_eq!(n, 24);
        }
    }
}
