//! Reduced knot Floer complexes CFK⁻ over F₂[U] and their normal forms.
//!
//! A complex is a free F₂[U]-module on generators `x_k` carrying Alexander
//! gradings `A_k`, with `∂x_p = Σ_q d_{pq} x_q`. Multiplication by `U` drops
//! the Alexander filtration by one.
//!
//! [`CfkComplex::simplify`] produces a vertically simplified basis `ξ` and a
//! horizontally simplified basis `η` that agree in the way the CFD
//! construction needs (ξ₀ is one of η₀, η₁, η₂ depending on ε, and each basis
//! is a same-level combination of the other), then records the arrow data in
//! a [`KnotNormalForm`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::f2::{kernel, solve, BitMatrix, BitVec, EchelonBasis};

/// An element of F₂[U], stored as its set of exponents.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UPoly {
    exps: BTreeSet<u32>,
}

impl UPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(e: u32) -> Self {
        UPoly {
            exps: BTreeSet::from([e]),
        }
    }

    pub fn from_exponents(es: impl IntoIterator<Item = u32>) -> Self {
        let mut p = UPoly::zero();
        for e in es {
            p.toggle(e);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        self.exps.iter().copied()
    }

    pub fn contains(&self, e: u32) -> bool {
        self.exps.contains(&e)
    }

    pub fn min_exponent(&self) -> Option<u32> {
        self.exps.first().copied()
    }

    pub fn toggle(&mut self, e: u32) {
        if !self.exps.remove(&e) {
            self.exps.insert(e);
        }
    }

    pub fn add_assign(&mut self, other: &UPoly) {
        for e in other.exponents() {
            self.toggle(e);
        }
    }

    /// `U^d · self`.
    pub fn shifted(&self, d: u32) -> UPoly {
        UPoly {
            exps: self.exps.iter().map(|e| e + d).collect(),
        }
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        let mut out = UPoly::zero();
        for a in self.exponents() {
            for b in other.exponents() {
                out.toggle(a + b);
            }
        }
        out
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exponents()
            .map(|e| match e {
                0 => "1".to_string(),
                1 => "U".to_string(),
                e => format!("U^{e}"),
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

/// An element of C⁻ in the generator basis.
pub type Chain = Vec<UPoly>;

fn chain_zero(n: usize) -> Chain {
    vec![UPoly::zero(); n]
}

fn chain_add(a: &mut Chain, b: &Chain) {
    for (x, y) in a.iter_mut().zip(b) {
        x.add_assign(y);
    }
}

fn chain_shift(a: &Chain, d: u32) -> Chain {
    a.iter().map(|p| p.shifted(d)).collect()
}

fn chain_from_bits(v: &BitVec) -> Chain {
    (0..v.len())
        .map(|k| {
            if v.get(k) {
                UPoly::monomial(0)
            } else {
                UPoly::zero()
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfkComplex {
    names: Vec<String>,
    alexander: Vec<i32>,
    differential: BTreeMap<(usize, usize), UPoly>,
}

impl CfkComplex {
    pub fn new(generators: Vec<(String, i32)>) -> Self {
        let (names, alexander) = generators.into_iter().unzip();
        CfkComplex {
            names,
            alexander,
            differential: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn alexander(&self) -> &[i32] {
        &self.alexander
    }

    /// Adds `U^e` (for each `e`) to the coefficient of `x_to` in `∂x_from`.
    pub fn add_term(&mut self, from: usize, to: usize, poly: &UPoly) {
        let entry = self.differential.entry((from, to)).or_default();
        entry.add_assign(poly);
        if entry.is_zero() {
            self.differential.remove(&(from, to));
        }
    }

    pub fn coefficient(&self, from: usize, to: usize) -> UPoly {
        self.differential
            .get(&(from, to))
            .cloned()
            .unwrap_or_default()
    }

    /// Nonzero entries `(from, to, poly)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &UPoly)> {
        self.differential.iter().map(|(&(p, q), u)| (p, q, u))
    }

    /// `∂` applied to a chain.
    pub fn boundary(&self, c: &Chain) -> Chain {
        let mut out = chain_zero(self.len());
        for (&(p, q), poly) in &self.differential {
            if !c[p].is_zero() {
                out[q].add_assign(&c[p].mul(poly));
            }
        }
        out
    }

    fn unit_chain(&self, k: usize) -> Chain {
        let mut c = chain_zero(self.len());
        c[k] = UPoly::monomial(0);
        c
    }

    /// Filtration level `max_k (A_k − min exponent)`, or `None` for zero.
    pub fn level(&self, c: &Chain) -> Option<i32> {
        c.iter()
            .enumerate()
            .filter_map(|(k, p)| p.min_exponent().map(|e| self.alexander[k] - e as i32))
            .max()
    }

    /// Reduction modulo U.
    fn mod_u(&self, c: &Chain) -> BitVec {
        BitVec::from_indices(self.len(), (0..self.len()).filter(|&k| c[k].contains(0)))
    }

    /// Image in `F_level / F_{level-1}`, normalized: bit `k` is the
    /// coefficient of `U^{A_k - level} x_k`.
    fn leading(&self, c: &Chain, level: i32) -> BitVec {
        BitVec::from_indices(
            self.len(),
            (0..self.len()).filter(|&k| {
                let e = self.alexander[k] - level;
                e >= 0 && c[k].contains(e as u32)
            }),
        )
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let n = self.len();

        let mut sq = Vec::new();
        for p in 0..n {
            let d2 = self.boundary(&self.boundary(&self.unit_chain(p)));
            for (q, poly) in d2.iter().enumerate() {
                if !poly.is_zero() {
                    sq.push(format!(
                        "d^2({}) has coefficient {} on {}",
                        self.names[p], poly, self.names[q]
                    ));
                }
            }
        }
        report.push("d^2 = 0", sq);

        report.push(
            "odd rank",
            if n % 2 == 1 {
                vec![]
            } else {
                vec![format!("rank {n} is even")]
            },
        );

        let mut filt = Vec::new();
        let mut reduced = Vec::new();
        for (p, q, poly) in self.entries() {
            for e in poly.exponents() {
                if self.alexander[q] - e as i32 > self.alexander[p] {
                    filt.push(format!(
                        "U^{e} {} in d({}) raises the filtration",
                        self.names[q], self.names[p]
                    ));
                }
            }
            if poly.contains(0) && self.alexander[q] >= self.alexander[p] {
                reduced.push(format!(
                    "not reduced: d({}) contains {} with no U factor",
                    self.names[p], self.names[q]
                ));
            }
        }
        report.push("filtration", filt);
        report.push("reduced", reduced);

        let sym = match (self.alexander.iter().max(), self.alexander.iter().min()) {
            (Some(&hi), Some(&lo)) if hi != -lo => {
                vec![format!("maximal grading {hi} is not minus the minimal grading {lo}")]
            }
            _ => vec![],
        };
        report.push("genus symmetry", sym);

        let dv = self.vertical_matrix();
        let hv = n - 2 * dv.rank();
        report.push(
            "vertical homology has rank 1",
            if hv == 1 || !report.passed() {
                vec![]
            } else {
                vec![format!("vertical homology has rank {hv}")]
            },
        );
        report
    }

    pub fn genus(&self) -> i32 {
        self.alexander.iter().copied().max().unwrap_or(0)
    }

    pub fn hfk_dimension(&self, a: i32) -> usize {
        self.alexander.iter().filter(|&&x| x == a).count()
    }

    /// Column `p` is `∂^v x_p`.
    fn vertical_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.len(), self.len());
        for (p, q, poly) in self.entries() {
            if poly.contains(0) {
                m.set(q, p, true);
            }
        }
        m
    }

    /// Column `p` is `∂^h` of `U^{A_p} x_p`, in the basis `U^{A_k} x_k`.
    fn horizontal_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.len(), self.len());
        for (p, q, poly) in self.entries() {
            let e = self.alexander[q] - self.alexander[p];
            if e >= 0 && poly.contains(e as u32) {
                m.set(q, p, true);
            }
        }
        m
    }

    /// Lifts a horizontal-complex vector to C⁻ at filtration `level`.
    fn lift_horizontal(&self, v: &BitVec, level: i32) -> Chain {
        let mut c = chain_zero(self.len());
        for k in v.ones() {
            c[k] = UPoly::monomial((self.alexander[k] - level) as u32);
        }
        c
    }

    pub fn tau(&self) -> Result<i32> {
        Ok(self.simplify_bases()?.tau)
    }

    pub fn epsilon(&self) -> Result<i8> {
        Ok(self.simplify_bases()?.epsilon)
    }

    pub fn simplify(&self) -> Result<KnotNormalForm> {
        Ok(self.simplify_bases()?.normal_form())
    }

    /// Computes compatible vertically and horizontally simplified bases.
    pub fn simplify_bases(&self) -> Result<SimplifiedBases> {
        let report = self.validate();
        if !report.passed() {
            return Err(Error::InvalidComplex(report.failures().join("; ")));
        }
        let n = self.len();
        let a = &self.alexander;
        let dv = self.vertical_matrix();
        let dh = self.horizontal_matrix();

        let mut vorder: Vec<usize> = (0..n).collect();
        vorder.sort_by_key(|&k| (a[k], k));
        let vert = persistence(&dv, &vorder);
        let mut horder: Vec<usize> = (0..n).collect();
        horder.sort_by_key(|&k| (-a[k], k));
        let horz = persistence(&dh, &horder);

        if vert.essential.len() != 1 || horz.essential.len() != 1 {
            return Err(Error::Simplify(format!(
                "expected one surviving generator, found {} vertical and {} horizontal",
                vert.essential.len(),
                horz.essential.len()
            )));
        }

        // Vertical basis: constant-coefficient chains.
        let vlevel = |v: &BitVec| v.ones().map(|k| a[k]).max().unwrap();
        let mut xi: Vec<Chain> = vec![chain_from_bits(&vert.essential[0])];
        let mut xi_level = vec![vlevel(&vert.essential[0])];
        for (src, tgt) in &vert.pairs {
            xi.push(chain_from_bits(src));
            xi.push(chain_from_bits(tgt));
            xi_level.push(vlevel(src));
            xi_level.push(vlevel(tgt));
        }
        let tau = xi_level[0];

        // Horizontal basis: chains homogeneous at their filtration level.
        let hlevel = |v: &BitVec| v.ones().map(|k| a[k]).min().unwrap();
        let h0 = &horz.essential[0];
        let mut eta: Vec<Chain> = vec![self.lift_horizontal(h0, hlevel(h0))];
        let mut eta_level = vec![hlevel(h0)];
        for (src, tgt) in &horz.pairs {
            let (ls, lt) = (hlevel(src), hlevel(tgt));
            eta.push(self.lift_horizontal(src, ls));
            eta.push(self.lift_horizontal(tgt, lt));
            eta_level.push(ls);
            eta_level.push(lt);
        }
        if -eta_level[0] != tau {
            return Err(Error::Simplify(format!(
                "vertical generator at grading {tau} but horizontal generator at {}",
                eta_level[0]
            )));
        }

        let vboundaries = EchelonBasis::from_vectors(vert.pairs.iter().map(|(_, t)| t));
        let hboundaries = EchelonBasis::from_vectors(horz.pairs.iter().map(|(_, t)| t));
        let epsilon = self.hook_epsilon()?;
        let mirrored = -self.mirror().hook_epsilon()?;
        if epsilon != mirrored {
            return Err(Error::Simplify(format!(
                "epsilon is {epsilon} but the mirror gives {}",
                -mirrored
            )));
        }

        let ell: Vec<i32> = (0..n / 2)
            .map(|j| eta_level[2 * j + 2] - eta_level[2 * j + 1])
            .collect();
        self.make_compatible(
            &mut xi,
            &mut eta,
            &mut eta_level,
            &ell,
            tau,
            epsilon,
            &dv,
            &vboundaries,
        )?;

        if epsilon != 0 {
            self.settle_eta0(&mut eta, eta_level[0], epsilon, &dv, &vboundaries)?;
        }
        let eps_eta = classify(&self.mod_u(&eta[0]), &dv, &vboundaries);
        let eps_xi = classify(&self.leading(&xi[0], tau), &dh, &hboundaries);
        if eps_eta != epsilon || eps_xi != epsilon {
            return Err(Error::Simplify(format!(
                "epsilon is {epsilon}, but the eta generator reads {eps_eta} and the xi generator reads {eps_xi}"
            )));
        }

        // Express η in the ξ basis through normalized leading vectors and keep
        // only the same-level monomials.
        let lxi = BitMatrix::from_rows(
            (0..n).map(|q| self.leading(&xi[q], xi_level[q])).collect(),
            n,
        );
        let lxi_inv = lxi
            .inverse()
            .ok_or_else(|| Error::Simplify("vertical basis is not a filtered basis".into()))?;
        let leta = BitMatrix::from_rows(
            (0..n).map(|p| self.leading(&eta[p], eta_level[p])).collect(),
            n,
        );
        let bfull = leta.mul(&lxi_inv);
        let mut eta_new = Vec::with_capacity(n);
        for p in 0..n {
            let mut c = chain_zero(n);
            for q in bfull.row(p).ones() {
                let d = xi_level[q] - eta_level[p];
                if d < 0 {
                    return Err(Error::Simplify("basis change raises the filtration".into()));
                }
                chain_add(&mut c, &chain_shift(&xi[q], d as u32));
            }
            eta_new.push(c);
        }
        let mut b = BitMatrix::zeros(n, n);
        for (p, q) in bfull.entries() {
            if xi_level[q] == eta_level[p] {
                b.set(p, q, true);
            }
        }
        let a_mat = b
            .inverse()
            .ok_or_else(|| Error::Simplify("same-level basis change is singular".into()))?;

        let bases = SimplifiedBases {
            xi,
            eta: eta_new,
            xi_level,
            eta_level,
            b_full: bfull,
            a: a_mat,
            b,
            tau,
            epsilon,
        };
        let problems = self.verify_bases(&bases);
        if !problems.is_empty() {
            return Err(Error::Simplify(problems.join("; ")));
        }
        Ok(bases)
    }

    /// Adjusts ξ₀ and the η basis so that ξ₀ = η₀, η₁ or η₂ according to ε.
    ///
    /// The candidate for the shared element starts from an η generator at
    /// grading τ (η₀, a horizontal source, or a horizontal target) and may be
    /// modified by any change that keeps η horizontally simplified: adding
    /// same-level horizontal cycles, same-level generators with compatible
    /// arrow lengths, or anything of lower filtration. Among those it must
    /// reduce mod U to a vertical cycle that is not a boundary.
    #[allow(clippy::too_many_arguments)]
    fn make_compatible(
        &self,
        xi: &mut [Chain],
        eta: &mut [Chain],
        eta_level: &mut [i32],
        ell: &[i32],
        tau: i32,
        epsilon: i8,
        dv: &BitMatrix,
        vboundaries: &EchelonBasis,
    ) -> Result<()> {
        let n = self.len();
        let pairs = n / 2;
        let src = |j: usize| 2 * j + 1;
        let tgt = |j: usize| 2 * j + 2;
        let lower: Vec<Chain> = (0..n)
            .filter(|&k| self.alexander[k] < tau)
            .map(|k| self.unit_chain(k))
            .collect();

        // (pair index or None for η₀, chosen base element)
        let bases: Vec<(Option<usize>, usize)> = match epsilon {
            0 => vec![(None, 0)],
            -1 => (0..pairs)
                .filter(|&j| eta_level[src(j)] == tau)
                .map(|j| (Some(j), src(j)))
                .collect(),
            _ => (0..pairs)
                .filter(|&j| eta_level[tgt(j)] == tau)
                .map(|j| (Some(j), tgt(j)))
                .collect(),
        };

        for (pair, base) in bases {
            // Each direction: the chain added to the candidate, plus the
            // companion update keeping the arrow structure (index, chain).
            let mut dirs: Vec<(Chain, Option<(usize, Chain)>)> = Vec::new();
            let same_level_cycles = (0..pairs)
                .map(tgt)
                .chain(std::iter::once(0))
                .filter(|&i| i != base && eta_level[i] == tau);
            match epsilon {
                0 => {
                    for i in (0..pairs).map(tgt).filter(|&i| eta_level[i] == tau) {
                        dirs.push((eta[i].clone(), None));
                    }
                }
                -1 => {
                    let j = pair.unwrap();
                    for i in same_level_cycles {
                        dirs.push((eta[i].clone(), None));
                    }
                    for k in (0..pairs).filter(|&k| k != j && eta_level[src(k)] == tau) {
                        if ell[k] >= ell[j] {
                            let d = (ell[k] - ell[j]) as u32;
                            dirs.push((eta[src(k)].clone(), Some((tgt(j), chain_shift(&eta[tgt(k)], d)))));
                        }
                    }
                }
                _ => {
                    let j = pair.unwrap();
                    for k in (0..pairs).filter(|&k| k != j && eta_level[tgt(k)] == tau) {
                        if ell[k] <= ell[j] {
                            let d = (ell[j] - ell[k]) as u32;
                            dirs.push((eta[tgt(k)].clone(), Some((src(j), chain_shift(&eta[src(k)], d)))));
                        }
                    }
                }
            }
            for l in &lower {
                dirs.push((l.clone(), None));
            }

            let z0 = self.mod_u(&eta[base]);
            let w: Vec<BitVec> = dirs.iter().map(|(c, _)| self.mod_u(c)).collect();
            let Some(choice) = find_nonboundary_cycle(&z0, &w, dv, vboundaries) else {
                continue;
            };
            let mut cand = eta[base].clone();
            for i in choice.ones() {
                let (c, companion) = &dirs[i];
                chain_add(&mut cand, c);
                if let Some((idx, extra)) = companion {
                    chain_add(&mut eta[*idx], extra);
                }
            }
            if self.level(&cand) != Some(tau) {
                continue;
            }
            eta[base] = cand.clone();
            xi[0] = cand;
            if let Some(j) = pair {
                // Move the matched pair to the front.
                if j != 0 {
                    eta.swap(src(0), src(j));
                    eta.swap(tgt(0), tgt(j));
                    eta_level.swap(src(0), src(j));
                    eta_level.swap(tgt(0), tgt(j));
                }
            }
            return Ok(());
        }
        Err(Error::Simplify(format!(
            "no compatible choice of bases found for epsilon = {epsilon}"
        )))
    }

    /// Differential of the subquotient spanned by `U^{k_m} x_m`, one element
    /// per generator. Column `p` is the boundary of the `p`-th element.
    fn subquotient(&self, k: &[i32]) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.len(), self.len());
        for (p, q, poly) in self.entries() {
            let e = k[q] - k[p];
            if e >= 0 && poly.contains(e as u32) {
                m.set(q, p, true);
            }
        }
        m
    }

    /// ε from the maps between the vertical line `i = 0` and the two hook
    /// complexes `min(i, j − τ) = 0` and `max(i, j − τ) = 0`: the first map
    /// kills the generator when ε = 1, the second misses it when ε = −1.
    fn hook_epsilon(&self) -> Result<i8> {
        let n = self.len();
        let a = &self.alexander;
        let dv = self.vertical_matrix();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&k| (a[k], k));
        let vert = persistence(&dv, &order);
        let [xi0] = vert.essential.as_slice() else {
            return Err(Error::Simplify("vertical homology is not one-dimensional".into()));
        };
        let tau = xi0.ones().map(|k| a[k]).max().unwrap();
        let column_space = |m: &BitMatrix| {
            let cols: Vec<BitVec> = (0..n).map(|c| m.column(c)).collect();
            EchelonBasis::from_vectors(cols.iter())
        };

        let hook_k: Vec<i32> = a.iter().map(|&x| (x - tau).min(0)).collect();
        let hook_image = column_space(&self.subquotient(&hook_k));
        let projected = BitVec::from_indices(n, xi0.ones().filter(|&k| a[k] >= tau));
        let f_trivial = hook_image.contains(&projected);

        let cap_k: Vec<i32> = a.iter().map(|&x| (x - tau).max(0)).collect();
        let vertical_image = column_space(&dv);
        let g_trivial = kernel(&self.subquotient(&cap_k)).iter().all(|z| {
            let restricted = BitVec::from_indices(n, z.ones().filter(|&k| cap_k[k] == 0));
            vertical_image.contains(&restricted)
        });

        match (f_trivial, g_trivial) {
            (true, true) => Err(Error::Simplify(
                "both hook maps vanish on the vertical generator".into(),
            )),
            (true, false) => Ok(1),
            (false, true) => Ok(-1),
            (false, false) => Ok(0),
        }
    }

    /// Replaces η₀ by another horizontal generator at the same grading whose
    /// reduction mod U is a vertical boundary (ε = 1) or not a vertical
    /// cycle (ε = −1). Allowed changes are same-grading horizontal targets
    /// and anything of lower filtration.
    fn settle_eta0(
        &self,
        eta: &mut [Chain],
        level: i32,
        epsilon: i8,
        dv: &BitMatrix,
        vboundaries: &EchelonBasis,
    ) -> Result<()> {
        let n = self.len();
        let z0 = self.mod_u(&eta[0]);
        if classify(&z0, dv, vboundaries) == epsilon {
            return Ok(());
        }
        let mut dirs: Vec<Chain> = (0..n / 2)
            .map(|j| 2 * j + 2)
            .filter(|&i| self.level(&eta[i]) == Some(level))
            .map(|i| eta[i].clone())
            .collect();
        dirs.extend(
            (0..n)
                .filter(|&k| self.alexander[k] < level)
                .map(|k| self.unit_chain(k)),
        );
        let w: Vec<BitVec> = dirs.iter().map(|c| self.mod_u(c)).collect();
        let choice = if epsilon == 1 {
            let mut cols = w.clone();
            cols.extend(vboundaries.vectors());
            solve(&cols, &z0).map(|(x, _)| {
                BitVec::from_indices(w.len(), x.ones().filter(|&i| i < w.len()))
            })
        } else {
            (0..w.len())
                .find(|&i| !dv.apply(&w[i]).is_zero())
                .map(|i| BitVec::unit(w.len(), i))
        };
        let choice = choice.ok_or_else(|| {
            Error::Simplify(format!("no horizontal generator fits epsilon = {epsilon}"))
        })?;
        for i in choice.ones() {
            chain_add(&mut eta[0], &dirs[i]);
        }
        Ok(())
    }

    /// Checks the vertical and horizontal simplification conditions, the
    /// ε-compatibility, and that both basis changes are same-level.
    pub fn verify_bases(&self, s: &SimplifiedBases) -> Vec<String> {
        let n = self.len();
        let mut problems = Vec::new();
        let pairs = n / 2;
        for (which, basis, levels) in [("xi", &s.xi, &s.xi_level), ("eta", &s.eta, &s.eta_level)] {
            for p in 0..n {
                if self.level(&basis[p]) != Some(levels[p]) {
                    problems.push(format!("{which}_{p} is not at its recorded level"));
                }
            }
            if !self.is_filtered_basis(basis, levels) {
                problems.push(format!("{which} is not a filtered basis"));
            }
        }
        for p in 0..=pairs {
            if !self.mod_u(&self.boundary(&s.xi[2 * p])).is_zero() {
                problems.push(format!("d(xi_{}) is not divisible by U", 2 * p));
            }
        }
        for j in 1..=pairs {
            let (i1, i2) = (2 * j - 1, 2 * j);
            let k = s.xi_level[i1] - s.xi_level[i2];
            let mut diff = self.boundary(&s.xi[i1]);
            chain_add(&mut diff, &s.xi[i2]);
            if k <= 0 || !self.mod_u(&diff).is_zero() {
                problems.push(format!("vertical arrow {j} is malformed"));
            }
            let l = s.eta_level[i2] - s.eta_level[i1];
            let mut diff = self.boundary(&s.eta[i1]);
            if l > 0 {
                chain_add(&mut diff, &chain_shift(&s.eta[i2], l as u32));
            }
            if l <= 0 || self.level(&diff).is_some_and(|lv| lv >= s.eta_level[i1]) {
                problems.push(format!("horizontal arrow {j} is malformed"));
            }
        }
        for p in 0..=pairs {
            let d = self.boundary(&s.eta[2 * p]);
            if self.level(&d).is_some_and(|lv| lv >= s.eta_level[2 * p]) {
                problems.push(format!("d(eta_{}) does not drop the filtration", 2 * p));
            }
        }
        let i = match s.epsilon {
            -1 => 1,
            0 => 0,
            _ => 2,
        };
        if s.xi[0] != s.eta[i] {
            problems.push(format!("xi_0 differs from eta_{i}"));
        }
        if s.b.mul(&s.a) != BitMatrix::identity(n) {
            problems.push("basis changes are not inverse".into());
        }
        // η_p must equal the same-level combination of ξ recorded in b_full,
        // and conversely with the inverse matrix.
        let expand = |coeffs: &BitMatrix, from: &[Chain], from_level: &[i32], to_level: &[i32], p: usize| {
            let mut c = chain_zero(n);
            for q in coeffs.row(p).ones() {
                let d = from_level[q] - to_level[p];
                if d < 0 {
                    return None;
                }
                chain_add(&mut c, &chain_shift(&from[q], d as u32));
            }
            Some(c)
        };
        for p in 0..n {
            if expand(&s.b_full, &s.xi, &s.xi_level, &s.eta_level, p).as_ref() != Some(&s.eta[p]) {
                problems.push(format!("eta_{p} is not a same-level combination of xi"));
            }
        }
        let leta = BitMatrix::from_rows(
            (0..n).map(|p| self.leading(&s.eta[p], s.eta_level[p])).collect(),
            n,
        );
        let lxi = BitMatrix::from_rows(
            (0..n).map(|p| self.leading(&s.xi[p], s.xi_level[p])).collect(),
            n,
        );
        match leta.inverse() {
            Some(inv) => {
                let afull = lxi.mul(&inv);
                for p in 0..n {
                    if expand(&afull, &s.eta, &s.eta_level, &s.xi_level, p).as_ref() != Some(&s.xi[p]) {
                        problems.push(format!("xi_{p} is not a same-level combination of eta"));
                    }
                }
            }
            None => problems.push("eta leading terms are dependent".into()),
        }
        problems
    }

    /// A family of chains is a filtered basis iff its normalized leading
    /// matrix is invertible and the levels sum to the generator gradings.
    fn is_filtered_basis(&self, basis: &[Chain], levels: &[i32]) -> bool {
        let n = self.len();
        if basis.len() != n {
            return false;
        }
        let l = BitMatrix::from_rows(
            (0..n).map(|p| self.leading(&basis[p], levels[p])).collect(),
            n,
        );
        l.inverse().is_some()
            && levels.iter().sum::<i32>() == self.alexander.iter().sum::<i32>()
    }

    /// The staircase with the given step lengths `h₁, v₁, h₂, v₂, …`: each odd
    /// generator has a horizontal arrow of length `hᵢ` to its predecessor and
    /// a vertical arrow of length `vᵢ` to its successor.
    pub fn staircase(steps: &[u32]) -> CfkComplex {
        assert!(steps.len() % 2 == 0, "staircase steps come in pairs");
        let total: u32 = steps.iter().sum();
        let mut grading = total as i32 / 2;
        let mut gens = vec![("x0".to_string(), grading)];
        for (i, &s) in steps.iter().enumerate() {
            grading -= s as i32;
            gens.push((format!("x{}", i + 1), grading));
        }
        let mut c = CfkComplex::new(gens);
        for (m, pair) in steps.chunks(2).enumerate() {
            let odd = 2 * m + 1;
            c.add_term(odd, odd - 1, &UPoly::monomial(pair[0]));
            c.add_term(odd, odd + 1, &UPoly::monomial(0));
        }
        c
    }

    /// The complex of the mirror knot: dual differential, negated gradings.
    pub fn mirror(&self) -> CfkComplex {
        let mut c = CfkComplex::new(
            self.names
                .iter()
                .cloned()
                .zip(self.alexander.iter().map(|a| -a))
                .collect(),
        );
        for (p, q, poly) in self.entries() {
            c.add_term(q, p, poly);
        }
        c
    }

    /// Tensor product over F₂[U], the complex of the connected sum.
    pub fn tensor(&self, other: &CfkComplex) -> CfkComplex {
        let m = other.len();
        let mut gens = Vec::new();
        for i in 0..self.len() {
            for j in 0..m {
                gens.push((
                    format!("{}{}", self.names[i], other.names[j]),
                    self.alexander[i] + other.alexander[j],
                ));
            }
        }
        let mut c = CfkComplex::new(gens);
        for (p, q, poly) in self.entries() {
            for j in 0..m {
                c.add_term(p * m + j, q * m + j, poly);
            }
        }
        for (p, q, poly) in other.entries() {
            for i in 0..self.len() {
                c.add_term(i * m + p, i * m + q, poly);
            }
        }
        c
    }

    pub fn to_json(&self) -> CfkJson {
        CfkJson {
            generators: self
                .names
                .iter()
                .zip(&self.alexander)
                .map(|(name, &alexander)| CfkGeneratorJson {
                    name: name.clone(),
                    alexander,
                })
                .collect(),
            differential: self
                .entries()
                .map(|(p, q, poly)| CfkTermJson {
                    from: self.names[p].clone(),
                    to: self.names[q].clone(),
                    u_powers: poly.exponents().collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &CfkJson) -> Result<CfkComplex> {
        let mut index = HashMap::new();
        for (i, g) in doc.generators.iter().enumerate() {
            if index.insert(g.name.as_str(), i).is_some() {
                return Err(ParseError::Field {
                    field: format!("generators[{i}].name"),
                    message: format!("duplicate name `{}`", g.name),
                }
                .into());
            }
        }
        let mut c = CfkComplex::new(
            doc.generators
                .iter()
                .map(|g| (g.name.clone(), g.alexander))
                .collect(),
        );
        for (k, t) in doc.differential.iter().enumerate() {
            let lookup = |name: &str, which: &str| {
                index.get(name).copied().ok_or_else(|| ParseError::UnknownGenerator {
                    field: format!("differential[{k}].{which}"),
                    name: name.to_string(),
                })
            };
            let p = lookup(&t.from, "from")?;
            let q = lookup(&t.to, "to")?;
            c.add_term(p, q, &UPoly::from_exponents(t.u_powers.iter().copied()));
        }
        Ok(c)
    }
}

/// Persistence pairing of a filtered differential.
struct Persistence {
    /// `(source chain V, target chain R = ∂V)` in birth order.
    pairs: Vec<(BitVec, BitVec)>,
    essential: Vec<BitVec>,
}

/// Standard column reduction. `order` lists generators by increasing
/// filtration position; `d` must map each generator to earlier ones.
fn persistence(d: &BitMatrix, order: &[usize]) -> Persistence {
    let n = order.len();
    let mut pos = vec![0; n];
    for (i, &k) in order.iter().enumerate() {
        pos[k] = i;
    }
    let low = |r: &BitVec| r.ones().max_by_key(|&k| pos[k]);
    let mut pivots: HashMap<usize, (BitVec, BitVec)> = HashMap::new();
    let mut zero_cols = Vec::new();
    let mut paired = Vec::new();
    for &j in order {
        let mut v = BitVec::unit(n, j);
        let mut r = d.column(j);
        while let Some(l) = low(&r) {
            match pivots.get(&l) {
                Some((pv, pr)) => {
                    v.xor_assign(pv);
                    r.xor_assign(pr);
                }
                None => break,
            }
        }
        match low(&r) {
            Some(l) => {
                pivots.insert(l, (v.clone(), r.clone()));
                paired.push((v, r, l));
            }
            None => zero_cols.push((j, v)),
        }
    }
    let lows: BTreeSet<usize> = paired.iter().map(|(_, _, l)| *l).collect();
    Persistence {
        pairs: paired.into_iter().map(|(v, r, _)| (v, r)).collect(),
        essential: zero_cols
            .into_iter()
            .filter(|(j, _)| !lows.contains(j))
            .map(|(_, v)| v)
            .collect(),
    }
}

/// `-1` if `v` is not a cycle, `1` if it is a boundary, `0` otherwise.
fn classify(v: &BitVec, d: &BitMatrix, boundaries: &EchelonBasis) -> i8 {
    if !d.apply(v).is_zero() {
        -1
    } else if boundaries.contains(v) {
        1
    } else {
        0
    }
}

/// Finds a subset `S` of `w` with `z = z0 + Σ_{i∈S} w_i` a cycle of `d`
/// that is not in `boundaries`.
fn find_nonboundary_cycle(
    z0: &BitVec,
    w: &[BitVec],
    d: &BitMatrix,
    boundaries: &EchelonBasis,
) -> Option<BitVec> {
    let dw: Vec<BitVec> = w.iter().map(|x| d.apply(x)).collect();
    let (lambda, kernel) = solve(&dw, &d.apply(z0))?;
    let mut z = z0.clone();
    for i in lambda.ones() {
        z.xor_assign(&w[i]);
    }
    if !boundaries.contains(&z) {
        return Some(lambda);
    }
    kernel.into_iter().find_map(|kv| {
        let mut moved = BitVec::zeros(z0.len());
        for i in kv.ones() {
            moved.xor_assign(&w[i]);
        }
        (!boundaries.contains(&moved)).then(|| {
            let mut lam = lambda.clone();
            lam.xor_assign(&kv);
            lam
        })
    })
}

/// Compatible simplified bases, as chains in the generator basis.
#[derive(Clone, Debug)]
pub struct SimplifiedBases {
    pub xi: Vec<Chain>,
    pub eta: Vec<Chain>,
    pub xi_level: Vec<i32>,
    pub eta_level: Vec<i32>,
    /// Bit `(p, q)` set when `η_p` contains `U^{A(ξ_q) − A(η_p)} ξ_q`.
    pub b_full: BitMatrix,
    /// `b` and its inverse `a`, reduced modulo U.
    pub b: BitMatrix,
    pub a: BitMatrix,
    pub tau: i32,
    pub epsilon: i8,
}

impl SimplifiedBases {
    pub fn normal_form(&self) -> KnotNormalForm {
        let pairs = self.xi.len() / 2;
        let arrows = |levels: &[i32]| -> Vec<ArrowData> {
            (1..=pairs)
                .map(|j| {
                    let (s, t) = (levels[2 * j - 1], levels[2 * j]);
                    ArrowData {
                        length: (s - t).unsigned_abs(),
                        source_alexander: s,
                        target_alexander: t,
                    }
                })
                .collect()
        };
        KnotNormalForm {
            n: pairs,
            vertical_arrows: arrows(&self.xi_level),
            horizontal_arrows: arrows(&self.eta_level),
            tau: self.tau,
            epsilon: self.epsilon,
            basis_change_a: self.a.clone(),
            basis_change_b: self.b.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: &str, failures: Vec<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            failures,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures.is_empty())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .flat_map(|c| c.failures.iter().map(move |f| format!("{}: {f}", c.name)))
            .collect()
    }
}

/// One arrow of a simplified basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowData {
    pub length: u32,
    pub source_alexander: i32,
    pub target_alexander: i32,
}

/// The data from which CFD of the knot complement is assembled.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "NormalFormJson", into = "NormalFormJson")]
pub struct KnotNormalForm {
    pub n: usize,
    pub vertical_arrows: Vec<ArrowData>,
    pub horizontal_arrows: Vec<ArrowData>,
    pub tau: i32,
    pub epsilon: i8,
    /// `ξ_p = Σ a_{pq} η_q` modulo U.
    pub basis_change_a: BitMatrix,
    /// `η_p = Σ b_{pq} ξ_q` modulo U.
    pub basis_change_b: BitMatrix,
}

impl KnotNormalForm {
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn xi_alexander(&self, p: usize) -> i32 {
        match p {
            0 => self.tau,
            p if p % 2 == 1 => self.vertical_arrows[p / 2].source_alexander,
            p => self.vertical_arrows[p / 2 - 1].target_alexander,
        }
    }

    pub fn eta_alexander(&self, p: usize) -> i32 {
        match p {
            0 => -self.tau,
            p if p % 2 == 1 => self.horizontal_arrows[p / 2].source_alexander,
            p => self.horizontal_arrows[p / 2 - 1].target_alexander,
        }
    }

    pub fn genus(&self) -> i32 {
        (0..self.dim()).map(|p| self.xi_alexander(p)).max().unwrap_or(0)
    }

    pub fn hfk_dimension(&self, a: i32) -> usize {
        (0..self.dim()).filter(|&p| self.xi_alexander(p) == a).count()
    }

    /// The index `i` with `ξ₀ = η_i`.
    pub fn matched_eta(&self) -> usize {
        match self.epsilon {
            -1 => 1,
            0 => 0,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidNormalForm(m));
        let dim = self.dim();
        if self.vertical_arrows.len() != self.n || self.horizontal_arrows.len() != self.n {
            return bad(format!("expected {} arrows of each kind", self.n));
        }
        for (j, v) in self.vertical_arrows.iter().enumerate() {
            if v.length == 0 || v.source_alexander - v.target_alexander != v.length as i32 {
                return bad(format!("vertical arrow {} has inconsistent length", j + 1));
            }
        }
        for (j, h) in self.horizontal_arrows.iter().enumerate() {
            if h.length == 0 || h.target_alexander - h.source_alexander != h.length as i32 {
                return bad(format!("horizontal arrow {} has inconsistent length", j + 1));
            }
        }
        let mut ks: Vec<u32> = self.vertical_arrows.iter().map(|a| a.length).collect();
        let mut ls: Vec<u32> = self.horizontal_arrows.iter().map(|a| a.length).collect();
        ks.sort_unstable();
        ls.sort_unstable();
        if ks != ls {
            return bad("vertical and horizontal arrow lengths differ as multisets".into());
        }
        if !(-1..=1).contains(&self.epsilon) {
            return bad(format!("epsilon {} is not in {{-1, 0, 1}}", self.epsilon));
        }
        if self.epsilon == 0 && self.tau != 0 {
            return bad("epsilon = 0 requires tau = 0".into());
        }
        if self.n == 0 && self.epsilon != 0 {
            return bad("a single generator forces epsilon = 0".into());
        }
        for m in [&self.basis_change_a, &self.basis_change_b] {
            if m.rows() != dim || m.cols() != dim {
                return bad(format!("basis change matrices must be {dim}x{dim}"));
            }
        }
        if self.basis_change_a.mul(&self.basis_change_b) != BitMatrix::identity(dim) {
            return bad("basis_change_a and basis_change_b are not inverse".into());
        }
        for (p, q) in self.basis_change_b.entries() {
            if self.eta_alexander(p) != self.xi_alexander(q) {
                return bad(format!("b[{p}][{q}] joins different Alexander gradings"));
            }
        }
        for (p, q) in self.basis_change_a.entries() {
            if self.xi_alexander(p) != self.eta_alexander(q) {
                return bad(format!("a[{p}][{q}] joins different Alexander gradings"));
            }
        }
        let i = self.matched_eta();
        if self.basis_change_a.row(0) != &BitVec::unit(dim, i) {
            return bad(format!("xi_0 must equal eta_{i} for epsilon = {}", self.epsilon));
        }
        let mut xs: Vec<i32> = (0..dim).map(|p| self.xi_alexander(p)).collect();
        xs.sort_unstable();
        if xs.first().copied() != xs.last().map(|x| -x) {
            return bad("Alexander gradings are not symmetric".into());
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct NormalFormJson {
    n: usize,
    vertical_arrows: Vec<ArrowData>,
    horizontal_arrows: Vec<ArrowData>,
    tau: i32,
    epsilon: i8,
    basis_change_a: Vec<String>,
    basis_change_b: Vec<String>,
}

fn matrix_to_rows(m: &BitMatrix) -> Vec<String> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| if m.get(r, c) { '1' } else { '0' })
                .collect()
        })
        .collect()
}

fn rows_to_matrix(rows: &[String], field: &str) -> Result<BitMatrix, String> {
    let n = rows.len();
    let mut m = BitMatrix::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        if row.chars().count() != n {
            return Err(format!("{field}[{r}] must have {n} entries"));
        }
        for (c, ch) in row.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => m.set(r, c, true),
                _ => return Err(format!("{field}[{r}] contains `{ch}`")),
            }
        }
    }
    Ok(m)
}

impl TryFrom<NormalFormJson> for KnotNormalForm {
    type Error = String;

    fn try_from(j: NormalFormJson) -> Result<Self, String> {
        Ok(KnotNormalForm {
            n: j.n,
            vertical_arrows: j.vertical_arrows,
            horizontal_arrows: j.horizontal_arrows,
            tau: j.tau,
            epsilon: j.epsilon,
            basis_change_a: rows_to_matrix(&j.basis_change_a, "basis_change_a")?,
            basis_change_b: rows_to_matrix(&j.basis_change_b, "basis_change_b")?,
        })
    }
}

impl From<KnotNormalForm> for NormalFormJson {
    fn from(k: KnotNormalForm) -> Self {
        NormalFormJson {
            n: k.n,
            vertical_arrows: k.vertical_arrows,
            horizontal_arrows: k.horizontal_arrows,
            tau: k.tau,
            epsilon: k.epsilon,
            basis_change_a: matrix_to_rows(&k.basis_change_a),
            basis_change_b: matrix_to_rows(&k.basis_change_b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfkGeneratorJson {
    pub name: String,
    pub alexander: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfkTermJson {
    pub from: String,
    pub to: String,
    pub u_powers: Vec<u32>,
}

/// `{"generators": [{"name", "alexander"}], "differential": [{"from", "to", "u_powers"}]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfkJson {
    pub generators: Vec<CfkGeneratorJson>,
    pub differential: Vec<CfkTermJson>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trefoil_r() -> CfkComplex {
        CfkComplex::staircase(&[1, 1])
    }

    fn figure8() -> CfkComplex {
        let mut c = CfkComplex::new(vec![
            ("a".into(), 0),
            ("b".into(), 1),
            ("c".into(), -1),
            ("d".into(), 0),
            ("e".into(), 0),
        ]);
        c.add_term(0, 1, &UPoly::monomial(1));
        c.add_term(0, 2, &UPoly::monomial(0));
        c.add_term(1, 3, &UPoly::monomial(0));
        c.add_term(2, 3, &UPoly::monomial(1));
        c
    }

    #[test]
    fn trefoil_invariants() {
        let c = trefoil_r();
        assert!(c.validate().passed(), "{:?}", c.validate().failures());
        let nf = c.simplify().unwrap();
        assert_eq!((nf.n, nf.tau, nf.epsilon), (1, 1, 1));
        assert_eq!(nf.vertical_arrows[0].length, 1);
        assert_eq!(nf.horizontal_arrows[0].length, 1);
        nf.validate().unwrap();

        let m = c.mirror();
        let nf = m.simplify().unwrap();
        assert_eq!((nf.n, nf.tau, nf.epsilon), (1, -1, -1));
        nf.validate().unwrap();
    }

    #[test]
    fn figure8_invariants() {
        let c = figure8();
        assert!(c.validate().passed());
        assert_eq!(c.genus(), 1);
        assert_eq!(c.hfk_dimension(0), 3);
        let nf = c.simplify().unwrap();
        assert_eq!((nf.n, nf.tau, nf.epsilon), (2, 0, 0));
        nf.validate().unwrap();
    }

    #[test]
    fn unreduced_rejected() {
        let mut c = CfkComplex::new(vec![("a".into(), 0), ("b".into(), 0), ("c".into(), 0)]);
        c.add_term(0, 1, &UPoly::monomial(0));
        let r = c.validate();
        assert!(!r.check("reduced").unwrap().failures.is_empty());
        assert!(c.simplify().is_err());
    }

    #[test]
    fn connected_sum_of_trefoils() {
        let t = trefoil_r();
        let c = t.tensor(&t);
        assert!(c.validate().passed());
        let nf = c.simplify().unwrap();
        assert_eq!((nf.tau, nf.epsilon, nf.genus()), (2, 1, 2));
        let c = t.tensor(&t.mirror());
        let nf = c.simplify().unwrap();
        assert_eq!((nf.tau, nf.epsilon, nf.genus()), (0, 0, 2));
    }

    #[test]
    fn connected_sums_are_additive() {
        let knots = [
            (trefoil_r(), 1, 1),
            (trefoil_r().mirror(), -1, -1),
            (figure8(), 0, 0),
            (CfkComplex::staircase(&[1, 1, 1, 1]), 2, 1),
            (CfkComplex::staircase(&[1, 2, 2, 1]), 3, 1),
        ];
        for (k, tk, ek) in &knots {
            for (j, tj, ej) in &knots {
                let nf = k.tensor(j).simplify().unwrap();
                assert_eq!(nf.tau, tk + tj);
                if *ej == 0 {
                    assert_eq!(nf.epsilon, *ek);
                } else if *ek == 0 || ek == ej {
                    assert_eq!(nf.epsilon, *ej);
                }
                nf.validate().unwrap();
            }
        }
    }

    #[test]
    fn normal_form_json_roundtrip() {
        let nf = trefoil_r().simplify().unwrap();
        let s = serde_json::to_string(&nf).unwrap();
        let back: KnotNormalForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, nf);
    }
}
