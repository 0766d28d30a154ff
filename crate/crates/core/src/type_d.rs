//! Type D structures over 𝒜(T²), presented by coefficient maps.
//!
//! A structure is a vector space split by idempotent together with seven F₂
//! matrices D_∅, D_1, …, D_123. `D_I` sends generators in the summand of the
//! left idempotent of ρ_I to the summand of its right idempotent, so
//! `D_1: V⁰ → V¹`. Matrices are indexed `(target, source)`.
//!
//! Alexander gradings are carried doubled so they stay integral: ι₀
//! generators have even doubled grading, ι₁ generators odd.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::f2::{BitMatrix, BitVec};
use crate::torus_algebra::{Idempotent, RhoIndex};

/// A label in 𝔑′: `None` is the empty word (coefficient 𝟏).
pub type Label = Option<RhoIndex>;

pub const LABELS: [Label; 7] = [
    None,
    Some(RhoIndex::R1),
    Some(RhoIndex::R2),
    Some(RhoIndex::R3),
    Some(RhoIndex::R12),
    Some(RhoIndex::R23),
    Some(RhoIndex::R123),
];

fn slot(label: Label) -> usize {
    match label {
        None => 0,
        Some(i) => 1 + RhoIndex::ALL.iter().position(|&j| j == i).unwrap(),
    }
}

/// Idempotents `(source, target)` of `D_label`.
pub fn label_sides(label: Label) -> Option<(Idempotent, Idempotent)> {
    label.map(RhoIndex::idempotent_sides)
}

/// Product of labels in 𝔑′, `None` outer meaning the product vanishes.
pub fn label_product(a: Label, b: Label) -> Option<Label> {
    match (a, b) {
        (None, x) | (x, None) => Some(x),
        (Some(i), Some(j)) => i.product(j).map(Some),
    }
}

/// Doubled Alexander degree of `D_label`: D₁ −1, D₂ +1, D₃ +1, D₁₂ 0,
/// D₂₃ +2, D₁₂₃ +1, D_∅ 0.
pub fn label_degree2(label: Label) -> i32 {
    match label {
        None | Some(RhoIndex::R12) => 0,
        Some(RhoIndex::R1) => -1,
        Some(RhoIndex::R2) | Some(RhoIndex::R3) | Some(RhoIndex::R123) => 1,
        Some(RhoIndex::R23) => 2,
    }
}

pub fn label_text(label: Label) -> String {
    match label {
        None => "1".to_string(),
        Some(i) => format!("r{}", i.label()),
    }
}

pub fn parse_label(s: &str) -> Result<Label, ParseError> {
    match s {
        "1" | "" => Ok(None),
        _ => s.parse().map(Some),
    }
}

/// Renders a doubled grading as an integer or half-integer.
pub fn format_half(a2: i32) -> String {
    if a2 % 2 == 0 {
        format!("{}", a2 / 2)
    } else {
        format!("{}/2", a2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDStructure {
    names: Vec<String>,
    idempotents: Vec<Idempotent>,
    maps: [BitMatrix; 7],
    alexander2: Option<Vec<i32>>,
}

impl TypeDStructure {
    pub fn new(generators: Vec<(String, Idempotent)>) -> Self {
        let n = generators.len();
        let (names, idempotents) = generators.into_iter().unzip();
        TypeDStructure {
            names,
            idempotents,
            maps: std::array::from_fn(|_| BitMatrix::zeros(n, n)),
            alexander2: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn dim0(&self) -> usize {
        self.summand(Idempotent::I0).count()
    }

    pub fn dim1(&self) -> usize {
        self.summand(Idempotent::I1).count()
    }

    pub fn summand(&self, e: Idempotent) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&i| self.idempotents[i] == e)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn idempotent(&self, i: usize) -> Idempotent {
        self.idempotents[i]
    }

    pub fn idempotents(&self) -> &[Idempotent] {
        &self.idempotents
    }

    pub fn map(&self, label: Label) -> &BitMatrix {
        &self.maps[slot(label)]
    }

    pub fn map_mut(&mut self, label: Label) -> &mut BitMatrix {
        &mut self.maps[slot(label)]
    }

    /// Adds (over F₂) the arrow `source --D_label--> target`.
    pub fn add_arrow(&mut self, source: usize, label: Label, target: usize) -> Result<()> {
        let (s, t) = (self.idempotents[source], self.idempotents[target]);
        let ok = match label_sides(label) {
            None => s == t,
            Some((l, r)) => s == l && t == r,
        };
        if !ok {
            return Err(Error::InvalidTypeD(format!(
                "arrow {} --{}--> {} joins {} to {}",
                self.names[source],
                label_text(label),
                self.names[target],
                s,
                t
            )));
        }
        self.map_mut(label).flip(target, source);
        Ok(())
    }

    /// Adds an arrow from `source` to every generator in `targets`.
    pub fn add_arrows_to(&mut self, source: usize, label: Label, targets: &BitVec) -> Result<()> {
        for t in targets.ones() {
            self.add_arrow(source, label, t)?;
        }
        Ok(())
    }

    pub fn alexander2(&self) -> Option<&[i32]> {
        self.alexander2.as_deref()
    }

    pub fn set_alexander2(&mut self, gradings: Option<Vec<i32>>) {
        if let Some(g) = &gradings {
            assert_eq!(g.len(), self.dim());
        }
        self.alexander2 = gradings;
    }

    /// Nonzero entries as `(source, label, target)` in label order.
    pub fn arrows(&self) -> Vec<(usize, Label, usize)> {
        let mut out = Vec::new();
        for label in LABELS {
            let mut es: Vec<(usize, usize)> = self.map(label).entries().map(|(t, s)| (s, t)).collect();
            es.sort_unstable();
            out.extend(es.into_iter().map(|(s, t)| (s, label, t)));
        }
        out
    }

    /// `D_{I_r} ∘ ⋯ ∘ D_{I_1}`.
    pub fn compose(&self, labels: &[RhoIndex]) -> BitMatrix {
        let mut m = BitMatrix::identity(self.dim());
        for &i in labels {
            m = self.map(Some(i)).mul(&m);
        }
        m
    }

    /// `D_{I_r} ∘ ⋯ ∘ D_{I_1}(v)`.
    pub fn apply_sequence(&self, labels: &[RhoIndex], v: &BitVec) -> BitVec {
        labels
            .iter()
            .fold(v.clone(), |acc, &i| self.map(Some(i)).apply(&acc))
    }

    pub fn is_reduced(&self) -> bool {
        self.map(None).is_zero()
    }

    /// Checks idempotent typing, the structure equation for all seven words
    /// in 𝔑′, and grading homogeneity when gradings are present.
    pub fn check_structure(&self) -> StructureReport {
        let mut report = StructureReport::default();
        for label in LABELS {
            for (t, s) in self.map(label).entries() {
                let (si, ti) = (self.idempotents[s], self.idempotents[t]);
                let ok = match label_sides(label) {
                    None => si == ti,
                    Some((l, r)) => si == l && ti == r,
                };
                if !ok {
                    report.typing.push((s, label, t));
                }
            }
        }
        for target in LABELS {
            let mut sum = BitMatrix::zeros(self.dim(), self.dim());
            for j in LABELS {
                for k in LABELS {
                    if label_product(j, k) == Some(target) {
                        sum.add_assign(&self.map(k).mul(self.map(j)));
                    }
                }
            }
            if !sum.is_zero() {
                report.relations.push(RelationFailure {
                    word: target,
                    entries: sum.entries().map(|(t, s)| (s, t)).collect(),
                });
            }
        }
        if let Some(a) = &self.alexander2 {
            for (i, e) in self.idempotents.iter().enumerate() {
                if a[i].rem_euclid(2) as usize != e.index() {
                    report.grading_parity.push(i);
                }
            }
            for label in LABELS {
                for (t, s) in self.map(label).entries() {
                    if a[t] - a[s] != label_degree2(label) {
                        report.homogeneity.push((s, label, t));
                    }
                }
            }
        }
        report
    }

    /// Cancels D_∅ arrows one at a time, lowest source then lowest target
    /// first, until none remain.
    pub fn reduce(&self) -> TypeDStructure {
        let mut cur = self.clone();
        while let Some((y, x)) = cur
            .map(None)
            .entries()
            .min_by_key(|&(t, s)| (s, t))
        {
            cur = cur.cancel(x, y);
        }
        cur
    }

    /// Cancels the arrow `x --D_∅--> y` by homological perturbation: every
    /// zig-zag `z → y ⇝ x → w` contributes the product of its labels.
    fn cancel(&self, x: usize, y: usize) -> TypeDStructure {
        debug_assert!(self.map(None).get(y, x));
        let keep: Vec<usize> = (0..self.dim()).filter(|&i| i != x && i != y).collect();
        let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let mut out = TypeDStructure::new(
            keep.iter()
                .map(|&i| (self.names[i].clone(), self.idempotents[i]))
                .collect(),
        );
        out.alexander2 = self
            .alexander2
            .as_ref()
            .map(|a| keep.iter().map(|&i| a[i]).collect());
        for &z in &keep {
            // pending[label] = coefficient of y carrying that label
            let mut pending = [false; 7];
            for label in LABELS {
                for t in self.map(label).column(z).ones() {
                    if t == y {
                        pending[slot(label)] ^= true;
                    } else if t != x {
                        out.map_mut(label).flip(pos[&t], pos[&z]);
                    }
                }
            }
            while pending.iter().any(|&p| p) {
                let mut next = [false; 7];
                for i in LABELS.into_iter().filter(|&i| pending[slot(i)]) {
                    for j in LABELS {
                        let Some(k) = label_product(i, j) else { continue };
                        for t in self.map(j).column(x).ones() {
                            if j.is_none() && t == y {
                                continue;
                            }
                            if t == y {
                                next[slot(k)] ^= true;
                            } else if t != x {
                                out.map_mut(k).flip(pos[&t], pos[&z]);
                            }
                        }
                    }
                }
                pending = next;
            }
        }
        out
    }

    /// Conjugates every coefficient map by an idempotent-preserving change of
    /// basis `P` (new coordinates = `P` · old coordinates).
    pub fn change_basis(&self, p: &BitMatrix) -> Result<TypeDStructure> {
        let n = self.dim();
        if p.rows() != n || p.cols() != n {
            return Err(Error::InvalidTypeD("basis change has wrong size".into()));
        }
        if p.entries().any(|(r, c)| self.idempotents[r] != self.idempotents[c]) {
            return Err(Error::InvalidTypeD("basis change mixes idempotents".into()));
        }
        let q = p
            .inverse()
            .ok_or_else(|| Error::InvalidTypeD("basis change is singular".into()))?;
        let mut out = self.clone();
        for label in LABELS {
            *out.map_mut(label) = p.mul(self.map(label)).mul(&q);
        }
        let homogeneous = self
            .alexander2
            .as_ref()
            .is_some_and(|a| p.entries().all(|(r, c)| a[r] == a[c]));
        if !homogeneous {
            out.alexander2 = None;
        }
        Ok(out)
    }

    /// Depth-first enumeration of label sequences with nonzero composition.
    pub fn nonzero_paths(&self, budget: usize) -> PathEnumeration {
        let mut result = PathEnumeration::default();
        let mut stack: Vec<(Vec<RhoIndex>, BitMatrix)> = Vec::new();
        for i in RhoIndex::ALL.into_iter().rev() {
            let m = self.map(Some(i)).clone();
            if !m.is_zero() && budget > 0 {
                stack.push((vec![i], m));
            }
        }
        while let Some((seq, m)) = stack.pop() {
            let at_budget = seq.len() >= budget;
            for i in RhoIndex::ALL.into_iter().rev() {
                let next = self.map(Some(i)).mul(&m);
                if next.is_zero() {
                    continue;
                }
                if at_budget {
                    result.truncated = true;
                    break;
                }
                let mut s = seq.clone();
                s.push(i);
                stack.push((s, next));
            }
            result.paths.push((seq, m));
        }
        result
    }

    pub fn to_dot(&self, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", escape(title));
        let _ = writeln!(s, "  rankdir=LR;");
        for (i, name) in self.names.iter().enumerate() {
            let shape = match self.idempotents[i] {
                Idempotent::I0 => "ellipse",
                Idempotent::I1 => "box",
            };
            let grading = self
                .alexander2
                .as_ref()
                .map(|a| format!("\\nA={}", format_half(a[i])))
                .unwrap_or_default();
            let _ = writeln!(s, "  n{i} [label=\"{}{grading}\", shape={shape}];", escape(name));
        }
        for (src, label, tgt) in self.arrows() {
            let text = label.map_or("1".to_string(), |l| format!("D{}", l.label()));
            let _ = writeln!(s, "  n{src} -> n{tgt} [label=\"{text}\"];");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> TypeDJson {
        TypeDJson {
            generators: (0..self.dim())
                .map(|i| TypeDGeneratorJson {
                    name: self.names[i].clone(),
                    idempotent: self.idempotents[i],
                    alexander: self.alexander2.as_ref().map(|a| a[i] as f64 / 2.0),
                })
                .collect(),
            arrows: self
                .arrows()
                .into_iter()
                .map(|(s, l, t)| TypeDArrowJson {
                    from: self.names[s].clone(),
                    to: self.names[t].clone(),
                    label: label_text(l),
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &TypeDJson) -> Result<TypeDStructure> {
        let mut d = TypeDStructure::new(
            doc.generators
                .iter()
                .map(|g| (g.name.clone(), g.idempotent))
                .collect(),
        );
        let mut seen = HashMap::new();
        for (i, g) in doc.generators.iter().enumerate() {
            if seen.insert(g.name.as_str(), i).is_some() {
                return Err(ParseError::Field {
                    field: format!("generators[{i}].name"),
                    message: format!("duplicate name `{}`", g.name),
                }
                .into());
            }
        }
        let all_graded = doc.generators.iter().all(|g| g.alexander.is_some());
        let none_graded = doc.generators.iter().all(|g| g.alexander.is_none());
        if !(all_graded || none_graded) {
            return Err(ParseError::Field {
                field: "generators".into(),
                message: "either every generator or none carries an alexander grading".into(),
            }
            .into());
        }
        if all_graded && !doc.generators.is_empty() {
            let mut a2 = Vec::new();
            for (i, g) in doc.generators.iter().enumerate() {
                let v = g.alexander.unwrap() * 2.0;
                if v.fract() != 0.0 {
                    return Err(ParseError::Field {
                        field: format!("generators[{i}].alexander"),
                        message: "must be a multiple of 1/2".into(),
                    }
                    .into());
                }
                a2.push(v as i32);
            }
            d.alexander2 = Some(a2);
        }
        for (k, a) in doc.arrows.iter().enumerate() {
            let lookup = |name: &str, which: &str| {
                seen.get(name).copied().ok_or_else(|| ParseError::UnknownGenerator {
                    field: format!("arrows[{k}].{which}"),
                    name: name.to_string(),
                })
            };
            let s = lookup(&a.from, "from")?;
            let t = lookup(&a.to, "to")?;
            let label = parse_label(&a.label).map_err(|_| ParseError::Field {
                field: format!("arrows[{k}].label"),
                message: format!("unknown coefficient `{}`", a.label),
            })?;
            d.add_arrow(s, label, t)?;
        }
        Ok(d)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationFailure {
    /// The word I ∈ 𝔑′ whose relation fails.
    pub word: Label,
    /// Nonzero `(source, target)` entries of Σ D_K ∘ D_J.
    pub entries: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructureReport {
    pub typing: Vec<(usize, Label, usize)>,
    pub relations: Vec<RelationFailure>,
    pub grading_parity: Vec<usize>,
    pub homogeneity: Vec<(usize, Label, usize)>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.typing.is_empty()
            && self.relations.is_empty()
            && self.grading_parity.is_empty()
            && self.homogeneity.is_empty()
    }

    pub fn describe(&self, d: &TypeDStructure) -> Vec<String> {
        let mut out = Vec::new();
        for &(s, l, t) in &self.typing {
            out.push(format!(
                "idempotent mismatch: {} --{}--> {}",
                d.name(s),
                label_text(l),
                d.name(t)
            ));
        }
        for f in &self.relations {
            let word = f.word.map_or("empty".to_string(), |w| w.label().to_string());
            for &(s, t) in &f.entries {
                out.push(format!(
                    "structure relation for {word} fails from {} to {}",
                    d.name(s),
                    d.name(t)
                ));
            }
        }
        for &i in &self.grading_parity {
            out.push(format!("grading of {} has the wrong parity for its idempotent", d.name(i)));
        }
        for &(s, l, t) in &self.homogeneity {
            out.push(format!(
                "arrow {} --{}--> {} is not homogeneous",
                d.name(s),
                label_text(l),
                d.name(t)
            ));
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct PathEnumeration {
    pub paths: Vec<(Vec<RhoIndex>, BitMatrix)>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeDGeneratorJson {
    pub name: String,
    pub idempotent: Idempotent,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alexander: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeDArrowJson {
    pub from: String,
    pub to: String,
    pub label: String,
}

/// JSON form: `{"generators": [{"name", "idempotent", "alexander"?}], "arrows": [{"from", "to", "label"}]}`
/// with labels `r1 … r123`, and `1` for the identity coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeDJson {
    pub generators: Vec<TypeDGeneratorJson>,
    pub arrows: Vec<TypeDArrowJson>,
}
