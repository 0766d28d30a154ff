//! Box tensor products CFA(X_{K₁}) ⊠ CFD(X_{K₂}) and splice reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cfd_builder::{build_cfd, CfdLayout};
use crate::cfk_complex::KnotNormalForm;
use crate::error::{Error, Result};
use crate::f2::{sparse_rank, BitMatrix, BitVec};
use crate::torus_algebra::RhoIndex;
use crate::type_a::ImplicitTypeA;
use crate::type_d::TypeDStructure;
use crate::word_calculus::{phi, psi, DecreasingRun};

/// Length beyond which every box-differential term vanishes for a pair of
/// knots of genus `g1`, `g2` in L-space homology spheres.
pub fn boundedness_bound(g1: u32, g2: u32) -> usize {
    2 * (8 * g1.max(g2) as usize + 4)
}

/// One term of the box differential: `m(x ⊗ ρ…) ⊗ D…(y)` hit `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contribution {
    pub source: usize,
    pub target: usize,
    pub rhos: Vec<RhoIndex>,
}

#[derive(Clone, Debug)]
pub struct BoxComplex {
    /// `(A-side generator, D-side generator)` with matching idempotents.
    pub generators: Vec<(usize, usize)>,
    pub names: Vec<String>,
    /// Doubled sum of the two Alexander gradings, when both sides are graded.
    pub grading2: Option<Vec<i32>>,
    /// Indexed `(target, source)`.
    pub boundary: BitMatrix,
    pub provenance: Vec<Contribution>,
}

impl BoxComplex {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Nonzero boundary entries as `(source, target)`.
    pub fn arrows(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.boundary.entries().map(|(t, s)| (s, t)).collect();
        v.sort_unstable();
        v
    }

    /// The grading `s` of the summand `C_s` containing generator `i`.
    pub fn summand(&self, i: usize) -> Option<i32> {
        self.grading2.as_ref().map(|g| g[i] / 2)
    }

    /// `dim C_s` for every `s` that occurs.
    pub fn summand_dims(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for i in 0..self.dim() {
            if let Some(s) = self.summand(i) {
                *out.entry(s).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn squares_to_zero(&self) -> bool {
        self.boundary.mul(&self.boundary).is_zero()
    }

    pub fn homology_rank(&self) -> Result<usize> {
        if !self.squares_to_zero() {
            return Err(Error::BoundaryNotSquareZero);
        }
        let cols: Vec<Vec<usize>> = (0..self.dim())
            .map(|c| self.boundary.column(c).ones().collect())
            .collect();
        Ok(self.dim() - 2 * sparse_rank(cols))
    }

    /// Graph of the complex; generators listed in `bold` are drawn bold.
    pub fn to_dot(&self, title: &str, bold: &[usize]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{title}\" {{");
        for (i, name) in self.names.iter().enumerate() {
            let font = if bold.contains(&i) { ", fontname=\"bold\", penwidth=2" } else { "" };
            let _ = writeln!(s, "  n{i} [label=\"{name}\"{font}];");
        }
        for (src, tgt) in self.arrows() {
            let _ = writeln!(s, "  n{src} -> n{tgt};");
        }
        s.push_str("}\n");
        s
    }
}

fn apply_runs(d: &TypeDStructure, runs: &[DecreasingRun], v: &BitVec) -> BitVec {
    runs.iter()
        .fold(v.clone(), |acc, &j| d.map(Some(phi(j))).apply(&acc))
}

struct Node {
    seq: Vec<RhoIndex>,
    digits: Vec<u8>,
    fixed: usize,
    a_vec: BitVec,
    d_vec: BitVec,
}

/// `∂^⊠(x ⊗ y) = Σ m_{r+1}(x ⊗ ρ_{I_1} ⊗ ⋯ ⊗ ρ_{I_r}) ⊗ D_{I_r}∘⋯∘D_{I_1}(y)`.
///
/// Sequences are grown one label at a time and dropped as soon as the
/// D-side composition on `y` vanishes or the A-side part that can no longer
/// change does. Ψ of a longer sequence only ever merges the last run with the
/// new label, so every run but the last is final. A sequence still alive
/// past `budget` labels is an error.
pub fn box_tensor(a: &ImplicitTypeA, d: &TypeDStructure, budget: usize) -> Result<BoxComplex> {
    let src = a.source();
    let mut generators = Vec::new();
    for x in 0..src.dim() {
        for y in 0..d.dim() {
            if src.idempotent(x) == d.idempotent(y) {
                generators.push((x, y));
            }
        }
    }
    let index: BTreeMap<(usize, usize), usize> =
        generators.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let names = generators
        .iter()
        .map(|&(x, y)| format!("{} {}", a.name(x), d.name(y)))
        .collect();
    let grading2 = match (src.alexander2(), d.alexander2()) {
        (Some(ga), Some(gd)) => Some(generators.iter().map(|&(x, y)| ga[x] + gd[y]).collect()),
        _ => None,
    };
    let total = generators.len();
    let mut boundary = BitMatrix::zeros(total, total);
    let mut provenance = Vec::new();

    for (gi, &(x, y)) in generators.iter().enumerate() {
        let mut stack: Vec<Node> = Vec::new();
        let x_vec = BitVec::unit(src.dim(), x);
        let y_vec = BitVec::unit(d.dim(), y);
        let push = |stack: &mut Vec<Node>, seq: Vec<RhoIndex>, digits: Vec<u8>, fixed: usize, a_vec: &BitVec, d_vec: BitVec| {
            if d_vec.is_zero() {
                return;
            }
            let runs = psi(&digits).expect("alternating by construction");
            let now_fixed = runs.len() - 1;
            let a_vec = apply_runs(src, &runs[fixed..now_fixed], a_vec);
            if a_vec.is_zero() {
                return;
            }
            stack.push(Node { seq, digits, fixed: now_fixed, a_vec, d_vec });
        };
        for r in RhoIndex::ALL {
            push(&mut stack, vec![r], r.digits().to_vec(), 0, &x_vec, d.map(Some(r)).apply(&y_vec));
        }
        while let Some(node) = stack.pop() {
            if node.seq.len() > budget {
                return Err(Error::RelativeBoundedness {
                    budget,
                    a_generator: a.name(x),
                    d_generator: d.name(y).to_string(),
                });
            }
            let runs = psi(&node.digits).expect("alternating by construction");
            let m = apply_runs(src, &runs[node.fixed..], &node.a_vec);
            for w in m.ones() {
                for z in node.d_vec.ones() {
                    let Some(&ti) = index.get(&(w, z)) else {
                        continue;
                    };
                    boundary.flip(ti, gi);
                    provenance.push(Contribution {
                        source: gi,
                        target: ti,
                        rhos: node.seq.clone(),
                    });
                }
            }
            let last = *node.seq.last().unwrap();
            for r in RhoIndex::ALL {
                // Alternating and last(I_i) > first(I_{i+1}).
                if last.last() != r.first() + 1 {
                    continue;
                }
                let mut seq = node.seq.clone();
                seq.push(r);
                let mut digits = node.digits.clone();
                digits.extend_from_slice(r.digits());
                push(&mut stack, seq, digits, node.fixed, &node.a_vec, d.map(Some(r)).apply(&node.d_vec));
            }
        }
    }
    Ok(BoxComplex {
        generators,
        names,
        grading2,
        boundary,
        provenance,
    })
}

/// The two summands of the rank certificate and whether they survive.
#[derive(Clone, Debug, Serialize)]
pub struct SurvivalReport {
    pub b_generators: Vec<String>,
    pub v_generators: Vec<String>,
    /// B⊗B is all of the lowest summand.
    pub lowest_summand_is_b: bool,
    /// V⊗V lies in the summand just above the lowest.
    pub v_in_next_summand: bool,
    /// No boundary out of, or into, B⊗B and V⊗V.
    pub isolated: bool,
    pub dimension: usize,
}

impl SurvivalReport {
    pub fn holds(&self) -> bool {
        self.lowest_summand_is_b && self.v_in_next_summand && self.isolated
    }
}

fn pairs_of(b: &BoxComplex, left: &[usize], right: &[usize]) -> Vec<usize> {
    b.generators
        .iter()
        .enumerate()
        .filter(|(_, (x, y))| left.contains(x) && right.contains(y))
        .map(|(i, _)| i)
        .collect()
}

/// Checks that B_{K₁}⊗B_{K₂} and V_{K₁}⊗V_{K₂} are isolated in the box
/// complex, which makes them survive in homology.
pub fn extremal_survival(k1: &CfdLayout, k2: &CfdLayout, b: &BoxComplex) -> Result<SurvivalReport> {
    if k1.genus == 0 || k2.genus == 0 {
        return Err(Error::TrivialKnot);
    }
    let bb = pairs_of(b, &k1.b_set, &k2.b_set);
    let vv = pairs_of(b, &k1.v_set, &k2.v_set);
    let lowest = -(k1.genus + k2.genus);
    let lowest_members: Vec<usize> = (0..b.dim()).filter(|&i| b.summand(i) == Some(lowest)).collect();
    let isolated = bb.iter().chain(&vv).all(|&i| {
        b.boundary.column(i).is_zero() && (0..b.dim()).all(|s| !b.boundary.get(i, s))
    });
    let name = |v: &[usize]| v.iter().map(|&i| b.names[i].clone()).collect::<Vec<_>>();
    Ok(SurvivalReport {
        b_generators: name(&bb),
        v_generators: name(&vv),
        lowest_summand_is_b: lowest_members == bb,
        v_in_next_summand: vv.iter().all(|&i| b.summand(i) == Some(lowest + 1)),
        isolated,
        dimension: bb.len() + vv.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpliceReport {
    pub total_rank: usize,
    /// `dim C_s` keyed by `s`.
    pub ranks_by_grading: BTreeMap<i32, usize>,
    /// `2·dim HFK(K₁, −g₁)·dim HFK(K₂, −g₂)`; absent when a knot is trivial.
    pub lower_bound: Option<usize>,
    pub lower_bound_holds: Option<bool>,
    pub bold_generators: Vec<String>,
}

/// Everything computed for a splice, for callers that want more than the report.
pub struct Splice {
    pub left: CfdLayout,
    pub right: CfdLayout,
    pub module: ImplicitTypeA,
    pub complex: BoxComplex,
    pub survival: Option<SurvivalReport>,
    pub report: SpliceReport,
}

pub fn default_budget(k1: &KnotNormalForm, k2: &KnotNormalForm) -> usize {
    boundedness_bound(k1.genus().unsigned_abs(), k2.genus().unsigned_abs()) + 4
}

pub fn splice(k1: &KnotNormalForm, k2: &KnotNormalForm) -> Result<SpliceReport> {
    Ok(splice_with_budget(k1, k2, default_budget(k1, k2))?.report)
}

pub fn splice_with_budget(k1: &KnotNormalForm, k2: &KnotNormalForm, budget: usize) -> Result<Splice> {
    let left = build_cfd(k1)?;
    let right = build_cfd(k2)?;
    let module = ImplicitTypeA::new(left.structure.clone())?;
    let complex = box_tensor(&module, &right.structure, budget)?;
    let total_rank = complex.homology_rank()?;
    let trivial = left.genus == 0 || right.genus == 0;
    let survival = if trivial {
        None
    } else {
        Some(extremal_survival(&left, &right, &complex)?)
    };
    let lower_bound = (!trivial).then(|| {
        2 * k1.hfk_dimension(-k1.genus()) * k2.hfk_dimension(-k2.genus())
    });
    let mut bold_generators: Vec<String> = survival
        .iter()
        .flat_map(|s| s.b_generators.iter().chain(&s.v_generators).cloned())
        .collect();
    bold_generators.sort();
    let report = SpliceReport {
        total_rank,
        ranks_by_grading: complex.summand_dims(),
        lower_bound,
        lower_bound_holds: lower_bound.map(|lb| total_rank >= lb),
        bold_generators,
    };
    Ok(Splice {
        left,
        right,
        module,
        complex,
        survival,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfk_complex::CfkComplex;

    fn r() -> KnotNormalForm {
        CfkComplex::staircase(&[1, 1]).simplify().unwrap()
    }

    fn l() -> KnotNormalForm {
        CfkComplex::staircase(&[1, 1]).mirror().simplify().unwrap()
    }

    fn unknot() -> KnotNormalForm {
        CfkComplex::staircase(&[]).simplify().unwrap()
    }

    #[test]
    fn bounds() {
        assert_eq!(boundedness_bound(1, 1), 24);
        assert_eq!(boundedness_bound(0, 0), 8);
        assert_eq!(boundedness_bound(2, 1), 40);
    }

    #[test]
    fn trefoil_ranks() {
        assert_eq!(splice(&r(), &l()).unwrap().total_rank, 9);
        assert_eq!(splice(&r(), &r()).unwrap().total_rank, 7);
        assert_eq!(splice(&l(), &l()).unwrap().total_rank, 7);
        assert_eq!(splice(&l(), &r()).unwrap().total_rank, 9);
    }

    #[test]
    fn unknot_ranks() {
        assert_eq!(splice(&unknot(), &unknot()).unwrap().total_rank, 1);
        let rep = splice(&unknot(), &r()).unwrap();
        assert_eq!(rep.total_rank, 1);
        assert_eq!(rep.lower_bound, None);
        assert_eq!(splice(&r(), &unknot()).unwrap().total_rank, 1);
    }

    #[test]
    fn bold_generators_for_trefoil_pairs() {
        let rep = splice(&r(), &l()).unwrap();
        assert_eq!(rep.bold_generators, ["K mu_1", "Xi_2 xi_0"]);
        assert_eq!(rep.lower_bound, Some(2));
        let rep = splice(&r(), &r()).unwrap();
        assert_eq!(rep.bold_generators, ["K kappa", "Xi_2 xi_2"]);
    }

    #[test]
    fn zero_differential_rank() {
        let c = BoxComplex {
            generators: vec![(0, 0), (1, 1), (2, 2)],
            names: vec!["a".into(), "b".into(), "c".into()],
            grading2: None,
            boundary: BitMatrix::zeros(3, 3),
            provenance: Vec::new(),
        };
        assert_eq!(c.homology_rank().unwrap(), 3);
    }
}
