//! A∞-modules over 𝒜(T²) obtained from reduced type D structures.
//!
//! The module shares its underlying vector space with the type D structure.
//! Multiplications are never tabulated: `m_{k+1}(· ⊗ ρ_{I_1} ⊗ ⋯ ⊗ ρ_{I_k})`
//! is the composition of coefficient maps read off by `a_index_to_d_labels`.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cfd_builder::Violation;
use crate::error::{Error, Result};
use crate::f2::{BitMatrix, BitVec};
use crate::torus_algebra::{Generator, Idempotent, RhoIndex};
use crate::type_d::{label_product, Label, TypeDStructure, LABELS};
use crate::word_calculus::{a_index_to_d_labels, concat, d_labels_to_a_index};

/// A right A∞-module over 𝒜(T²) presented by its multiplications on ρ
/// basis elements. `m1` is assumed zero.
pub trait AInfinityModule {
    fn dim(&self) -> usize;

    /// Matrix of `m_{k+1}(· ⊗ ρ_{I_1} ⊗ ⋯ ⊗ ρ_{I_k})`, indexed `(target, source)`.
    fn multiplication(&self, rhos: &[RhoIndex]) -> BitMatrix;
}

#[derive(Clone, Debug)]
pub struct ImplicitTypeA {
    source: TypeDStructure,
}

impl ImplicitTypeA {
    pub fn new(source: TypeDStructure) -> Result<Self> {
        if !source.is_reduced() {
            return Err(Error::InvalidTypeD(
                "the type A conversion needs a reduced structure".into(),
            ));
        }
        Ok(ImplicitTypeA { source })
    }

    pub fn source(&self) -> &TypeDStructure {
        &self.source
    }

    pub fn name(&self, i: usize) -> String {
        a_side_name(self.source.name(i))
    }

    /// `m(v ⊗ ρ_{I_1} ⊗ ⋯ ⊗ ρ_{I_k})`.
    pub fn eval_m(&self, v: &BitVec, rhos: &[RhoIndex]) -> BitVec {
        match a_index_to_d_labels(rhos) {
            Some(labels) => self.source.apply_sequence(&labels, v),
            None => BitVec::zeros(self.source.dim()),
        }
    }

    /// Like `eval_m` but over arbitrary algebra generators, applying the
    /// unit axioms for idempotents.
    pub fn eval_m_generators(&self, v: &BitVec, algebra: &[Generator]) -> BitVec {
        let n = self.source.dim();
        let rhos: Option<Vec<RhoIndex>> = algebra.iter().map(|g| g.rho()).collect();
        match (algebra, rhos) {
            ([], _) => BitVec::zeros(n),
            (_, Some(rhos)) => self.eval_m(v, &rhos),
            ([g], None) => {
                let e = match g {
                    Generator::I0 => Idempotent::I0,
                    _ => Idempotent::I1,
                };
                BitVec::from_indices(n, v.ones().filter(|&i| self.source.idempotent(i) == e))
            }
            _ => BitVec::zeros(n),
        }
    }

    /// Every nonzero multiplication whose D-side composition has at most
    /// `max_len` factors, as `(source, ρ sequence, target)`.
    pub fn multiplications(&self, max_len: usize) -> Vec<(usize, Vec<RhoIndex>, usize)> {
        let mut out = Vec::new();
        for (labels, m) in self.source.nonzero_paths(max_len).paths {
            let Some(rhos) = d_labels_to_a_index(&labels) else {
                continue;
            };
            for (t, s) in m.entries() {
                out.push((s, rhos.clone(), t));
            }
        }
        out.sort();
        out
    }

    pub fn to_dot(&self, title: &str, max_len: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{title}\" {{");
        for i in 0..self.source.dim() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", self.name(i));
        }
        for (src, rhos, tgt) in self.multiplications(max_len) {
            let label: Vec<String> = rhos.iter().map(|r| format!("r{}", r.label())).collect();
            let _ = writeln!(s, "  n{src} -> n{tgt} [label=\"{}\"];", label.join(", "));
        }
        s.push_str("}\n");
        s
    }
}

impl AInfinityModule for ImplicitTypeA {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn multiplication(&self, rhos: &[RhoIndex]) -> BitMatrix {
        match a_index_to_d_labels(rhos) {
            Some(labels) => self.source.compose(&labels),
            None => BitMatrix::zeros(self.source.dim(), self.source.dim()),
        }
    }
}

/// Capitalized display name used on the type A side: `xi_1` ↦ `Xi_1`,
/// `kappa` ↦ `K`, `mu_2` ↦ `M_2`.
pub fn a_side_name(name: &str) -> String {
    for (lower, upper) in [("xi", "Xi"), ("eta", "Eta"), ("kappa", "K"), ("lambda", "Lambda"), ("mu", "M")] {
        if let Some(rest) = name.strip_prefix(lower) {
            return format!("{upper}{rest}");
        }
    }
    let mut c = name.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

/// A failing A∞ relation: the generator and the ρ sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AinftyFailure {
    pub generator: usize,
    pub rhos: Vec<RhoIndex>,
}

#[derive(Clone, Debug, Default)]
pub struct AinftyReport {
    pub sequences_checked: usize,
    pub failures: Vec<AinftyFailure>,
}

impl AinftyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn junction_ok(a: RhoIndex, b: RhoIndex) -> bool {
    a.last() > b.first()
}

/// Checks the A∞ relations on all ρ sequences of length 2..=`max_len`
/// whose concatenation is alternating and which have at most one junction
/// with `last(I_i) ≤ first(I_{i+1})`. Other sequences only produce terms
/// that contain such a junction inside a single multiplication, and those
/// vanish for modules defined through Ψ.
pub fn check_ainfty<M: AInfinityModule + ?Sized>(module: &M, max_len: usize) -> AinftyReport {
    let n = module.dim();
    let mut cache: HashMap<Vec<RhoIndex>, BitMatrix> = HashMap::new();
    let mut mult = |seq: &[RhoIndex]| -> BitMatrix {
        if let Some(m) = cache.get(seq) {
            return m.clone();
        }
        let m = module.multiplication(seq);
        cache.insert(seq.to_vec(), m.clone());
        m
    };
    let mut report = AinftyReport::default();
    let mut stack: Vec<(Vec<RhoIndex>, bool)> = RhoIndex::ALL.iter().map(|&r| (vec![r], false)).collect();
    while let Some((seq, bad_used)) = stack.pop() {
        if seq.len() >= 2 {
            report.sequences_checked += 1;
            let mut total = BitMatrix::zeros(n, n);
            for i in 1..seq.len() {
                let inner = mult(&seq[..i]);
                if !inner.is_zero() {
                    total.add_assign(&mult(&seq[i..]).mul(&inner));
                }
                if let Some(p) = seq[i - 1].product(seq[i]) {
                    let mut merged = seq[..i - 1].to_vec();
                    merged.push(p);
                    merged.extend_from_slice(&seq[i + 1..]);
                    total.add_assign(&mult(&merged));
                }
            }
            for g in (0..n).filter(|&c| !total.column(c).is_zero()) {
                report.failures.push(AinftyFailure {
                    generator: g,
                    rhos: seq.clone(),
                });
            }
        }
        if seq.len() == max_len {
            continue;
        }
        let last = *seq.last().unwrap();
        for r in RhoIndex::ALL {
            if last.last().abs_diff(r.first()) != 1 {
                continue;
            }
            let good = junction_ok(last, r);
            if !good && bad_used {
                continue;
            }
            let mut s = seq.clone();
            s.push(r);
            stack.push((s, bad_used || !good));
        }
    }
    report
}

/// One arrow of the DD identity bimodule: `left ⊗ right` from `from` to `to`,
/// generators indexed 0 = p (ι₀⊗ι₀), 1 = q (ι₁⊗ι₁).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DdArrow {
    pub from: usize,
    pub left: RhoIndex,
    pub right: RhoIndex,
    pub to: usize,
}

/// δ₁(p) = (ρ₁⊗ρ₃ + ρ₃⊗ρ₁ + ρ₁₂₃⊗ρ₁₂₃)⊗q, δ₁(q) = ρ₂⊗ρ₂⊗p.
pub struct DDIdentity;

impl DDIdentity {
    pub const ARROWS: [DdArrow; 4] = [
        DdArrow { from: 0, left: RhoIndex::R1, right: RhoIndex::R3, to: 1 },
        DdArrow { from: 0, left: RhoIndex::R3, right: RhoIndex::R1, to: 1 },
        DdArrow { from: 0, left: RhoIndex::R123, right: RhoIndex::R123, to: 1 },
        DdArrow { from: 1, left: RhoIndex::R2, right: RhoIndex::R2, to: 0 },
    ];

    pub fn idempotent(generator: usize) -> Idempotent {
        if generator == 0 {
            Idempotent::I0
        } else {
            Idempotent::I1
        }
    }

    /// All arrow sequences whose left labels multiply to a nonzero element,
    /// as `(start, left product, right labels, end)`.
    pub fn paths() -> Vec<(usize, Label, Vec<RhoIndex>, usize)> {
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Label, Vec<RhoIndex>, usize)> =
            vec![(0, None, Vec::new(), 0), (1, None, Vec::new(), 1)];
        while let Some((start, left, rights, at)) = stack.pop() {
            out.push((start, left, rights.clone(), at));
            for arrow in Self::ARROWS.iter().filter(|a| a.from == at) {
                if let Some(prod) = label_product(left, Some(arrow.left)) {
                    let mut r = rights.clone();
                    r.push(arrow.right);
                    stack.push((start, prod, r, arrow.to));
                }
            }
        }
        out
    }
}

/// `(V, {m_k}) ⊠ CFDD(𝕀)` as a type D structure on the same generators.
///
/// For `v ⊗ x` the coefficient of `a_1⋯a_k ⊗ (w ⊗ y)` is
/// `m_{k+1}(v, b_1, …, b_k)` summed over DD paths `x → ⋯ → y` labelled
/// `a_i ⊗ b_i`; the `k = 0` term pairs with `m_1 = 0`.
pub fn box_with_dd_identity(a: &ImplicitTypeA) -> Result<TypeDStructure> {
    let src = a.source();
    let n = src.dim();
    let gens = (0..n)
        .map(|i| (src.name(i).to_string(), src.idempotent(i)))
        .collect();
    let mut out = TypeDStructure::new(gens);
    for (start, left, rights, end) in DDIdentity::paths() {
        if rights.is_empty() {
            continue;
        }
        let m = a.multiplication(&rights);
        for (w, v) in m.entries() {
            if src.idempotent(v) != DDIdentity::idempotent(start)
                || src.idempotent(w) != DDIdentity::idempotent(end)
            {
                continue;
            }
            out.add_arrow(v, left, w)?;
        }
    }
    out.set_alexander2(src.alexander2().map(|g| g.to_vec()));
    Ok(out)
}

/// How `box_with_dd_identity(to_type_a(D))` compares with `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoundTrip {
    Exact,
    /// Equal to `D` except that the ρ₁₂₃ coefficient also has `D₁∘D₂∘D₃`.
    ExtraTripleComposite,
    /// Differs in the listed coefficient maps in some other way.
    Mismatch(Vec<Label>),
}

pub fn round_trip(d: &TypeDStructure) -> Result<RoundTrip> {
    let boxed = box_with_dd_identity(&ImplicitTypeA::new(d.clone())?)?;
    let differs = |t: &TypeDStructure| -> Vec<Label> {
        LABELS.iter().copied().filter(|&l| t.map(l) != boxed.map(l)).collect()
    };
    let direct = differs(d);
    if direct.is_empty() {
        return Ok(RoundTrip::Exact);
    }
    let mut expected = d.clone();
    expected
        .map_mut(Some(RhoIndex::R123))
        .add_assign(&d.compose(&[RhoIndex::R3, RhoIndex::R2, RhoIndex::R1]));
    if differs(&expected).is_empty() {
        Ok(RoundTrip::ExtraTripleComposite)
    } else {
        Ok(RoundTrip::Mismatch(direct))
    }
}

/// Constraints on multiplications touching B and V, checked over every
/// nonzero multiplication whose D-side composition has at most `max_len` factors.
pub fn extremal_violations_a(a: &ImplicitTypeA, b: &[usize], v: &[usize], max_len: usize) -> Vec<Violation> {
    use RhoIndex::*;
    let mut out = Vec::new();
    for (s, rhos, t) in a.multiplications(max_len) {
        let mut flag = |rule: &'static str, generator: usize| {
            out.push(Violation {
                rule,
                generator,
                labels: rhos.clone(),
            })
        };
        if b.contains(&t) {
            flag("no multiplication into B", s);
        }
        if b.contains(&s) {
            // Pulled back from the D-side rule: ρ₃ must open 321 or 32121…,
            // and ρ₁₂₃ must open 12321….
            let w = concat(&rhos);
            let ok = match rhos[0] {
                R3 => w == [3, 2, 1] || w.starts_with(&[3, 2, 1, 2, 1]),
                R123 => w.starts_with(&[1, 2, 3, 2, 1]),
                _ => true,
            };
            if !ok {
                flag("multiplications out of B", s);
            }
        }
        if v.contains(&t) && !(rhos == [R3] || rhos == [R3, R2, R1]) {
            flag("multiplications into V", s);
        }
        if v.contains(&s) && rhos[0] != R2 {
            flag("multiplications out of V", s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfd_builder::build_cfd;
    use crate::cfk_complex::CfkComplex;
    use RhoIndex::*;

    fn cfa_r() -> ImplicitTypeA {
        let nf = CfkComplex::staircase(&[1, 1]).simplify().unwrap();
        ImplicitTypeA::new(build_cfd(&nf).unwrap().structure).unwrap()
    }

    fn unit(a: &ImplicitTypeA, name: &str) -> BitVec {
        BitVec::unit(a.dim(), a.source().index_of(name).unwrap())
    }

    #[test]
    fn right_trefoil_examples() {
        let a = cfa_r();
        let k = unit(&a, "kappa");
        assert_eq!(a.eval_m(&unit(&a, "xi_2"), &[R3, R2, R1]), k);
        assert_eq!(a.eval_m(&unit(&a, "xi_1"), &[R12]), unit(&a, "xi_0"));
        for g in 0..a.dim() {
            assert!(a.eval_m(&BitVec::unit(a.dim(), g), &[R1, R3]).is_zero());
        }
    }

    #[test]
    fn unit_axioms() {
        let a = cfa_r();
        let x = unit(&a, "xi_1");
        assert_eq!(a.eval_m_generators(&x, &[Generator::I0]), x);
        assert!(a.eval_m_generators(&x, &[Generator::I1]).is_zero());
        assert!(a.eval_m_generators(&x, &[Generator::I0, Generator::R1]).is_zero());
        assert!(a.eval_m_generators(&x, &[]).is_zero());
    }

    #[test]
    fn right_trefoil_known_edges() {
        let a = cfa_r();
        let mut edges: Vec<(String, String, String)> = a
            .multiplications(6)
            .into_iter()
            .map(|(s, r, t)| {
                let l: Vec<&str> = r.iter().map(|x| x.label()).collect();
                (a.name(s), l.join(","), a.name(t))
            })
            .collect();
        edges.sort();
        let mut expected: Vec<(String, String, String)> = [
            ("Xi_1", "1", "Lambda"),
            ("Lambda", "2", "Xi_0"),
            ("Xi_1", "3", "K"),
            ("Xi_2", "3,2,1", "K"),
            ("Xi_2", "1", "M_1"),
            ("M_1", "2,1", "M_2"),
            ("Xi_0", "3", "M_2"),
            ("Lambda", "23", "M_2"),
            ("Xi_1", "123", "M_2"),
            ("Xi_1", "12", "Xi_0"),
            ("Xi_2", "12,1", "M_2"),
        ]
        .iter()
        .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
        .collect();
        expected.sort();
        assert_eq!(edges, expected);
    }

    #[test]
    fn ainfty_and_round_trip() {
        let a = cfa_r();
        let r = check_ainfty(&a, 8);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.sequences_checked > 0);
        // The ρ₁₂₃ coefficient picks up m₂(v, ρ₁₂₃) = D₁∘D₂∘D₃(v).
        let d = a.source();
        let boxed = box_with_dd_identity(&a).unwrap();
        let mut expected = d.clone();
        expected.map_mut(Some(R123)).add_assign(&d.compose(&[R3, R2, R1]));
        assert_eq!(boxed, expected);
        assert_ne!(&boxed, d);
    }

    #[test]
    fn left_trefoil_round_trip_is_exact() {
        let nf = CfkComplex::staircase(&[1, 1]).mirror().simplify().unwrap();
        let a = ImplicitTypeA::new(build_cfd(&nf).unwrap().structure).unwrap();
        assert!(check_ainfty(&a, 8).passed());
        assert_eq!(&box_with_dd_identity(&a).unwrap(), a.source());
        assert_eq!(round_trip(a.source()).unwrap(), RoundTrip::Exact);
        let r = build_cfd(&CfkComplex::staircase(&[1, 1]).simplify().unwrap()).unwrap();
        assert_eq!(round_trip(&r.structure).unwrap(), RoundTrip::ExtraTripleComposite);
    }

    struct Corrupted<'a>(&'a ImplicitTypeA);

    impl AInfinityModule for Corrupted<'_> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn multiplication(&self, rhos: &[RhoIndex]) -> BitMatrix {
            let mut m = self.0.multiplication(rhos);
            if rhos == [R2] {
                let lambda = self.0.source().index_of("lambda").unwrap();
                m.flip(0, lambda);
            }
            m
        }
    }

    #[test]
    fn corrupted_table_fails() {
        let a = cfa_r();
        let r = check_ainfty(&Corrupted(&a), 4);
        assert!(!r.passed());
    }
}
