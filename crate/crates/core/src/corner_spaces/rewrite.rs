//! Blowup sequences and the commutation rewrite rules.
//!
//! The engine only *verifies* supplied rewrites: each rule checks its own
//! applicability on the spaces it acts on and returns the rewritten sequence.
//! Front faces keep their names through a rewrite, so a correct rewrite
//! yields a space isomorphic to the original by the identity on names.

use super::{preimage_in, BMap, PSub, Space, SpaceError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

/// One blowup: center description (in the space it is blown up in), order
/// and the name of the new front face.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqStep {
    pub name: String,
    pub faces: BTreeSet<String>,
    pub interior: BTreeSet<String>,
    pub order: u32,
}

impl SeqStep {
    pub fn new<S: AsRef<str>, T: AsRef<str>>(name: &str, faces: &[S], interior: &[T], order: u32) -> SeqStep {
        SeqStep {
            name: name.to_string(),
            faces: faces.iter().map(|s| s.as_ref().to_string()).collect(),
            interior: interior.iter().map(|s| s.as_ref().to_string()).collect(),
            order,
        }
    }

    pub fn center(&self) -> PSub {
        PSub { name: self.name.clone(), faces: self.faces.clone(), interior: self.interior.clone(), order: self.order }
    }

    fn from_center(p: &PSub, name: &str, order: u32) -> SeqStep {
        SeqStep { name: name.to_string(), faces: p.faces.clone(), interior: p.interior.clone(), order }
    }

    fn mentions(&self, face: &str) -> bool {
        self.faces.contains(face)
    }
}

impl fmt::Display for SeqStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = [{}]_{}", self.name, self.center(), self.order)
    }
}

/// Structured script entry: `{center: {faces, interior}, order, name?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub center: ScriptCenter,
    pub order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptCenter {
    pub faces: Vec<String>,
    #[serde(default)]
    pub interior: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupSeq {
    pub base: Space,
    pub steps: Vec<SeqStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// Disjoint centers commute.
    Disjoint,
    /// Nested centers of equal order: `[[X;A];B̃] = [[X;B];Ã]`.
    Nested,
    /// Cleanly intersecting centers, three-step exchange.
    Clean,
    /// Equal-order variant of [`Rule::Clean`], blowing up the intersection first.
    CleanEqual,
}

impl Rule {
    pub fn number(self) -> u8 {
        match self {
            Rule::Disjoint => 1,
            Rule::Nested => 2,
            Rule::Clean | Rule::CleanEqual => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RewriteError {
    #[error("rule {rule:?} not applicable at {pos}: {reason}")]
    NotApplicable { rule: Rule, pos: usize, reason: String },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("script step {index}: {source}")]
    Script { index: usize, source: Box<RewriteError> },
    #[error("malformed script: {0}")]
    Malformed(String),
}

impl BlowupSeq {
    pub fn new(base: Space, steps: Vec<SeqStep>) -> BlowupSeq {
        BlowupSeq { base, steps }
    }

    /// Space after the first `n` steps.
    pub fn prefix(&self, n: usize) -> Result<Space, SpaceError> {
        let mut x = self.base.clone();
        for s in &self.steps[..n] {
            x = x.blowup(&s.center(), s.order, &s.name)?.0;
        }
        Ok(x)
    }

    pub fn realize(&self) -> Result<Space, SpaceError> {
        self.prefix(self.steps.len())
    }

    /// Final space together with the total blowdown to the base.
    pub fn realize_with_blowdown(&self) -> Result<(Space, BMap), SpaceError> {
        let mut x = self.base.clone();
        let mut total: Option<BMap> = None;
        for s in &self.steps {
            let (y, beta) = x.blowup(&s.center(), s.order, &s.name)?;
            total = Some(match total {
                None => beta,
                Some(t) => beta.then(&t)?,
            });
            x = y;
        }
        let total = total.unwrap_or_else(|| BMap::identity(std::sync::Arc::new(x.clone())));
        Ok((x, total))
    }

    pub fn names(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.steps.iter().position(|s| s.name == name)
    }

    pub fn from_script(base: Space, text: &str) -> Result<BlowupSeq, RewriteError> {
        let entries: Vec<ScriptEntry> = serde_json::from_str(text).map_err(|e| RewriteError::Malformed(e.to_string()))?;
        let steps = entries
            .into_iter()
            .enumerate()
            .map(|(i, e)| SeqStep {
                name: e.name.unwrap_or_else(|| format!("ff_{i}")),
                faces: e.center.faces.into_iter().collect(),
                interior: e.center.interior.into_iter().collect(),
                order: e.order,
            })
            .collect();
        Ok(BlowupSeq { base, steps })
    }

    pub fn to_script(&self) -> String {
        let entries: Vec<ScriptEntry> = self
            .steps
            .iter()
            .map(|s| ScriptEntry {
                center: ScriptCenter { faces: s.faces.iter().cloned().collect(), interior: s.interior.iter().cloned().collect() },
                order: s.order,
                name: Some(s.name.clone()),
            })
            .collect();
        serde_json::to_string_pretty(&entries).expect("serializable")
    }
}

impl fmt::Display for BlowupSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{i:>3}: {s}")?;
        }
        Ok(())
    }
}

fn na(rule: Rule, pos: usize, reason: impl Into<String>) -> RewriteError {
    RewriteError::NotApplicable { rule, pos, reason: reason.into() }
}

/// Apply one commutation rule to the steps starting at `pos`.
pub fn rewrite_step(seq: &BlowupSeq, rule: Rule, pos: usize) -> Result<BlowupSeq, RewriteError> {
    let need = match rule {
        Rule::Disjoint | Rule::Nested => 2,
        Rule::Clean | Rule::CleanEqual => 3,
    };
    if pos + need > seq.steps.len() {
        return Err(na(rule, pos, "not enough steps"));
    }
    let x = seq.prefix(pos)?;
    let s = &seq.steps;
    let replaced: Vec<SeqStep> = match rule {
        Rule::Disjoint => {
            let (y, w) = (&s[pos], &s[pos + 1]);
            if w.mentions(&y.name) {
                return Err(na(rule, pos, format!("{} lies in {}", w.name, y.name)));
            }
            if x.intersects(&y.center(), &w.center())? {
                return Err(na(rule, pos, format!("{} and {} meet", y.name, w.name)));
            }
            vec![w.clone(), y.clone()]
        }
        Rule::Nested => {
            let (first, second) = (&s[pos], &s[pos + 1]);
            if first.order != second.order {
                return Err(na(rule, pos, "orders differ"));
            }
            if second.mentions(&first.name) {
                // [[X;B];Ã] -> [[X;A];B̃]
                let (b, at) = (first, second);
                let mut faces: BTreeSet<String> = at.faces.clone();
                faces.remove(&b.name);
                faces.extend(b.faces.iter().cloned());
                let interior = at.interior.union(&b.interior).cloned().collect();
                let a = PSub { name: at.name.clone(), faces, interior, order: at.order };
                if !x.contains(&b.center(), &a)? || x.contains(&a, &b.center())? {
                    return Err(na(rule, pos, "the centers are not strictly nested"));
                }
                let xb = x.blowup(&b.center(), b.order, &b.name)?.0;
                let pre = preimage_in(&x, &a, &b.center(), &b.name)?;
                if !xb.same_locus(&pre, &at.center())? {
                    return Err(na(rule, pos, format!("{} is not the preimage of its image", at.name)));
                }
                vec![SeqStep::from_center(&a, &at.name, at.order), b.clone()]
            } else {
                // [[X;A];B̃] -> [[X;B];Ã]
                let (a, b) = (first, second);
                if !x.contains(&b.center(), &a.center())? || x.contains(&a.center(), &b.center())? {
                    return Err(na(rule, pos, format!("{} is not strictly inside {}", a.name, b.name)));
                }
                let pre = preimage_in(&x, &a.center(), &b.center(), &b.name)?;
                vec![b.clone(), SeqStep::from_center(&pre, &a.name, a.order)]
            }
        }
        Rule::Clean | Rule::CleanEqual => {
            let (y, at, w) = (&s[pos], &s[pos + 1], &s[pos + 2]);
            if at.order != w.order {
                return Err(na(rule, pos, "the last two orders differ"));
            }
            if rule == Rule::CleanEqual && y.order != w.order {
                return Err(na(rule, pos, "orders differ"));
            }
            if w.mentions(&y.name) || w.mentions(&at.name) {
                return Err(na(rule, pos, format!("{} is described through an earlier front face", w.name)));
            }
            let (yc, wc) = (y.center(), w.center());
            let a = yc.meet(&wc, &at.name);
            if !x.is_nonempty(&a)? {
                return Err(na(rule, pos, "the centers do not meet"));
            }
            if x.contains(&wc, &yc)? || x.contains(&yc, &wc)? {
                return Err(na(rule, pos, "one center contains the other"));
            }
            let xy = x.blowup(&yc, y.order, &y.name)?.0;
            let pre = preimage_in(&x, &a, &yc, &y.name)?;
            if !xy.same_locus(&pre, &at.center())? {
                return Err(na(rule, pos, format!("{} is not the preimage of the intersection", at.name)));
            }
            if rule == Rule::Clean {
                let pre_w = preimage_in(&x, &a, &wc, &w.name)?;
                vec![w.clone(), SeqStep::from_center(&pre_w, &at.name, y.order), y.clone()]
            } else {
                vec![SeqStep::from_center(&a, &at.name, y.order), y.clone(), w.clone()]
            }
        }
    };
    let mut steps = seq.steps[..pos].to_vec();
    steps.extend(replaced);
    steps.extend_from_slice(&seq.steps[pos + need..]);
    let out = BlowupSeq { base: seq.base.clone(), steps };
    // The rewritten prefix must itself be constructible.
    out.prefix(pos + need)?;
    Ok(out)
}

/// Run a script of `(rule, position)` pairs.
pub fn apply_script(seq: &BlowupSeq, script: &[(Rule, usize)]) -> Result<BlowupSeq, RewriteError> {
    let mut cur = seq.clone();
    for (index, &(rule, pos)) in script.iter().enumerate() {
        cur = rewrite_step(&cur, rule, pos).map_err(|e| RewriteError::Script { index, source: Box::new(e) })?;
    }
    Ok(cur)
}
