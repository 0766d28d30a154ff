//! CFD of a knot complement from a knot normal form.
//!
//! Generators are ordered ξ₀…ξ_{2n}, then the vertical chains by j, the
//! horizontal chains by j, and finally the unstable chain. The η basis lives
//! in the same ι₀ summand and is carried as F₂ combinations of ξ generators.

use serde::Serialize;

use crate::cfk_complex::KnotNormalForm;
use crate::error::{Error, Result};
use crate::f2::BitVec;
use crate::torus_algebra::{Idempotent, RhoIndex};
use crate::type_d::TypeDStructure;

/// Where a generator sits in the chain decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "chain", rename_all = "snake_case")]
pub enum ChainPosition {
    Xi { p: usize },
    Vertical { j: usize, i: usize },
    Horizontal { j: usize, i: usize },
    Unstable { i: usize },
}

#[derive(Clone, Debug)]
pub struct CfdLayout {
    pub structure: TypeDStructure,
    /// `η_p` in ξ coordinates.
    pub eta: Vec<BitVec>,
    pub chain_index: Vec<ChainPosition>,
    pub genus: i32,
    pub tau: i32,
    pub b_set: Vec<usize>,
    pub v_set: Vec<usize>,
    pub h_set: Vec<usize>,
}

impl CfdLayout {
    pub fn xi_index(&self, p: usize) -> usize {
        p
    }

    pub fn dim0(&self) -> usize {
        self.eta.len()
    }
}

fn chain_name(base: &str, n: usize, j: usize, len: usize, i: usize) -> String {
    let mut s = base.to_string();
    if n > 1 {
        s.push_str(&format!("^{j}"));
    }
    if len > 1 {
        s.push_str(&format!("_{i}"));
    }
    s
}

pub fn build_cfd(nf: &KnotNormalForm) -> Result<CfdLayout> {
    nf.validate()?;
    let n = nf.n;
    let dim0 = nf.dim();
    let tau = nf.tau;
    let t = 2 * tau.unsigned_abs() as usize;
    let a = &nf.basis_change_a;
    let b = &nf.basis_change_b;

    let mut gens: Vec<(String, Idempotent)> = Vec::new();
    let mut grading2: Vec<i32> = Vec::new();
    let mut chain_index = Vec::new();
    for p in 0..dim0 {
        gens.push((format!("xi_{p}"), Idempotent::I0));
        grading2.push(2 * nf.xi_alexander(p));
        chain_index.push(ChainPosition::Xi { p });
    }
    let mut kappa_start = Vec::new();
    for (j0, arrow) in nf.vertical_arrows.iter().enumerate() {
        let j = j0 + 1;
        let k = arrow.length as usize;
        kappa_start.push(gens.len());
        for i in 1..=k {
            gens.push((chain_name("kappa", n, j, k, i), Idempotent::I1));
            grading2.push(2 * nf.xi_alexander(2 * j) + 2 * i as i32 - 1);
            chain_index.push(ChainPosition::Vertical { j, i });
        }
    }
    let mut lambda_start = Vec::new();
    for (j0, arrow) in nf.horizontal_arrows.iter().enumerate() {
        let j = j0 + 1;
        let l = arrow.length as usize;
        lambda_start.push(gens.len());
        for i in 1..=l {
            gens.push((chain_name("lambda", n, j, l, i), Idempotent::I1));
            grading2.push(2 * nf.eta_alexander(2 * j - 1) + 2 * i as i32 - 1);
            chain_index.push(ChainPosition::Horizontal { j, i });
        }
    }
    let mu_start = gens.len();
    let mu_base = if tau > 0 { nf.eta_alexander(0) } else { tau };
    for i in 1..=t {
        gens.push((format!("mu_{i}"), Idempotent::I1));
        grading2.push(2 * mu_base + 2 * i as i32 - 1);
        chain_index.push(ChainPosition::Unstable { i });
    }

    let total = gens.len();
    let mut d = TypeDStructure::new(gens);
    let eta: Vec<BitVec> = (0..dim0)
        .map(|p| BitVec::from_indices(total, b.row(p).ones()))
        .collect();
    // Generators ξ_q with a nonzero η_p component.
    let eta_support = |p: usize| (0..dim0).filter(move |&q| a.get(q, p));
    let (d1, d2, d3) = (Some(RhoIndex::R1), Some(RhoIndex::R2), Some(RhoIndex::R3));
    let (d12, d23, d123) = (Some(RhoIndex::R12), Some(RhoIndex::R23), Some(RhoIndex::R123));

    for (j0, arrow) in nf.vertical_arrows.iter().enumerate() {
        let j = j0 + 1;
        let s = kappa_start[j0];
        let k = arrow.length as usize;
        d.add_arrow(2 * j, d123, s)?;
        for i in 0..k - 1 {
            d.add_arrow(s + i, d23, s + i + 1)?;
        }
        d.add_arrow(2 * j - 1, d1, s + k - 1)?;
    }
    for (j0, arrow) in nf.horizontal_arrows.iter().enumerate() {
        let j = j0 + 1;
        let s = lambda_start[j0];
        let l = arrow.length as usize;
        for q in eta_support(2 * j - 1) {
            d.add_arrow(q, d3, s)?;
        }
        for i in 0..l - 1 {
            d.add_arrow(s + i, d23, s + i + 1)?;
        }
        d.add_arrows_to(s + l - 1, d2, &eta[2 * j])?;
    }
    match tau.signum() {
        1 => {
            for q in eta_support(0) {
                d.add_arrow(q, d3, mu_start)?;
            }
            for i in 0..t - 1 {
                d.add_arrow(mu_start + i, d23, mu_start + i + 1)?;
            }
            d.add_arrow(0, d1, mu_start + t - 1)?;
        }
        0 => d.add_arrows_to(0, d12, &eta[0])?,
        _ => {
            d.add_arrow(0, d123, mu_start)?;
            for i in 0..t - 1 {
                d.add_arrow(mu_start + i, d23, mu_start + i + 1)?;
            }
            d.add_arrows_to(mu_start + t - 1, d2, &eta[0])?;
        }
    }
    d.set_alexander2(Some(grading2));

    let report = d.check_structure();
    if !report.passed() {
        return Err(Error::InvalidTypeD(report.describe(&d).join("; ")));
    }

    let genus = nf.genus();
    let mut layout = CfdLayout {
        structure: d,
        eta,
        chain_index,
        genus,
        tau,
        b_set: Vec::new(),
        v_set: Vec::new(),
        h_set: Vec::new(),
    };
    if genus > 0 {
        let (bs, vs, hs) = extremal_subspaces(&layout)?;
        layout.b_set = bs;
        layout.v_set = vs;
        layout.h_set = hs;
    }
    Ok(layout)
}

/// The generators spanning B (grading −g), V and H (grading −g + ½).
pub fn extremal_subspaces(layout: &CfdLayout) -> Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    let g = layout.genus;
    if g == 0 {
        return Err(Error::TrivialKnot);
    }
    let a2 = layout.structure.alexander2().expect("built layouts are graded");
    let bs: Vec<usize> = (0..layout.dim0()).filter(|&p| a2[p] == -2 * g).collect();
    let mut vs = Vec::new();
    let mut hs = Vec::new();
    for (idx, pos) in layout.chain_index.iter().enumerate() {
        match *pos {
            ChainPosition::Vertical { j, i: 1 } if a2[2 * j] == -2 * g => vs.push(idx),
            // λ^j_1 sits half a step above η_{2j−1}.
            ChainPosition::Horizontal { i: 1, .. } if a2[idx] - 1 == -2 * g => hs.push(idx),
            ChainPosition::Unstable { i: 1 } => {
                if layout.tau == -g {
                    vs.push(idx);
                } else if layout.tau == g {
                    hs.push(idx);
                }
            }
            _ => {}
        }
    }
    Ok((bs, vs, hs))
}

/// One violated extremal-subspace constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: &'static str,
    pub generator: usize,
    pub labels: Vec<RhoIndex>,
}

fn restricted_nonzero(m: &crate::f2::BitMatrix, rows: Option<&[usize]>, cols: &[usize]) -> Vec<usize> {
    cols.iter()
        .copied()
        .filter(|&c| match rows {
            Some(rs) => rs.iter().any(|&r| m.get(r, c)),
            None => !m.column(c).is_zero(),
        })
        .collect()
}

/// Constraints on sequences of coefficient maps touching B and V.
///
/// Paths are enumerated up to `budget` labels. Witnesses are reported per
/// starting generator (for outgoing rules) or per source generator whose
/// image lands in the subspace (for incoming rules).
pub fn extremal_violations(
    d: &TypeDStructure,
    b: &[usize],
    v: &[usize],
    h: &[usize],
    budget: usize,
) -> Vec<Violation> {
    use RhoIndex::*;
    let mut out = Vec::new();
    let all: Vec<usize> = (0..d.dim()).collect();
    for label in crate::type_d::LABELS {
        for s in restricted_nonzero(d.map(label), Some(b), &all) {
            out.push(Violation {
                rule: "no coefficient map into B",
                generator: s,
                labels: label.into_iter().collect(),
            });
        }
    }
    for (seq, m) in d.nonzero_paths(budget).paths {
        let r = seq.len();
        for s in restricted_nonzero(&m, None, b) {
            let ok = match seq[0] {
                R123 => r == 1 || seq[1] == R23,
                R3 => {
                    r == 1
                        || (seq[1] == R23)
                        || (seq[1] == R2 && (r == 2 || seq[2] == R123))
                }
                _ => false,
            };
            if !ok {
                out.push(Violation {
                    rule: "paths out of B",
                    generator: s,
                    labels: seq.clone(),
                });
            }
        }
        for s in restricted_nonzero(&m, Some(v), &all) {
            if !(r == 1 && matches!(seq[0], R123 | R1)) {
                out.push(Violation {
                    rule: "paths into V",
                    generator: s,
                    labels: seq.clone(),
                });
            }
        }
        for s in restricted_nonzero(&m, None, v) {
            if seq[0] != R23 {
                out.push(Violation {
                    rule: "paths out of V",
                    generator: s,
                    labels: seq.clone(),
                });
            }
        }
    }
    for (label, target, rule) in [
        (R123, v, "D123 restricts to an isomorphism B -> V"),
        (R3, h, "D3 restricts to an isomorphism B -> H"),
    ] {
        let m = d.map(Some(label));
        let sub = m.submatrix(target, b);
        if target.len() != b.len() || sub.rank() != b.len() {
            out.push(Violation {
                rule,
                generator: b.first().copied().unwrap_or(0),
                labels: vec![label],
            });
        }
    }
    out
}
