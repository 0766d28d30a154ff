//! Word combinatorics linking A-side multiplications to D-side compositions.
//!
//! A digit string over {1,2,3} is alternating when consecutive digits differ
//! in parity, i.e. every step is ±1. Such a string splits uniquely into
//! decreasing runs (Ψ), and the digit swap 1↔3 (φ) turns each decreasing run
//! into a chord label.

use std::fmt;

use crate::error::{Error, Result};
use crate::torus_algebra::RhoIndex;

/// A nonempty strictly decreasing run of consecutive digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecreasingRun {
    D1,
    D2,
    D3,
    D21,
    D32,
    D321,
}

impl DecreasingRun {
    pub const ALL: [DecreasingRun; 6] = [
        DecreasingRun::D1,
        DecreasingRun::D2,
        DecreasingRun::D3,
        DecreasingRun::D21,
        DecreasingRun::D32,
        DecreasingRun::D321,
    ];

    pub fn digits(self) -> &'static [u8] {
        match self {
            DecreasingRun::D1 => &[1],
            DecreasingRun::D2 => &[2],
            DecreasingRun::D3 => &[3],
            DecreasingRun::D21 => &[2, 1],
            DecreasingRun::D32 => &[3, 2],
            DecreasingRun::D321 => &[3, 2, 1],
        }
    }

    pub fn from_digits(d: &[u8]) -> Option<DecreasingRun> {
        Some(match d {
            [1] => DecreasingRun::D1,
            [2] => DecreasingRun::D2,
            [3] => DecreasingRun::D3,
            [2, 1] => DecreasingRun::D21,
            [3, 2] => DecreasingRun::D32,
            [3, 2, 1] => DecreasingRun::D321,
            _ => return None,
        })
    }

    pub fn first(self) -> u8 {
        self.digits()[0]
    }

    pub fn last(self) -> u8 {
        *self.digits().last().unwrap()
    }
}

impl fmt::Display for DecreasingRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&digits_to_string(self.digits()))
    }
}

pub fn digits_to_string(d: &[u8]) -> String {
    d.iter().map(|x| char::from(b'0' + x)).collect()
}

/// Parses `"3212121"` into digits; rejects anything outside {1,2,3}.
pub fn parse_digits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '1'..='3' => Ok(c as u8 - b'0'),
            _ => Err(Error::NotAlternating(s.to_string())),
        })
        .collect()
}

pub fn is_alternating(s: &[u8]) -> bool {
    s.iter().all(|d| (1..=3).contains(d)) && s.windows(2).all(|w| w[0].abs_diff(w[1]) == 1)
}

/// Unique splitting of an alternating string into decreasing runs with
/// `last(J_i) < first(J_{i+1})`. Greedy: a run continues while the next digit
/// is one smaller.
pub fn psi(s: &[u8]) -> Result<Vec<DecreasingRun>> {
    if s.is_empty() || !is_alternating(s) {
        return Err(Error::NotAlternating(digits_to_string(s)));
    }
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=s.len() {
        if i == s.len() || s[i] > s[i - 1] {
            out.push(DecreasingRun::from_digits(&s[start..i]).expect("alternating run"));
            start = i;
        }
    }
    Ok(out)
}

/// 1↦3, 2↦2, 3↦1, 21↦23, 32↦12, 321↦123.
pub fn phi(j: DecreasingRun) -> RhoIndex {
    match j {
        DecreasingRun::D1 => RhoIndex::R3,
        DecreasingRun::D2 => RhoIndex::R2,
        DecreasingRun::D3 => RhoIndex::R1,
        DecreasingRun::D21 => RhoIndex::R23,
        DecreasingRun::D32 => RhoIndex::R12,
        DecreasingRun::D321 => RhoIndex::R123,
    }
}

pub fn phi_inverse(i: RhoIndex) -> DecreasingRun {
    DecreasingRun::ALL
        .into_iter()
        .find(|&j| phi(j) == i)
        .expect("phi is a bijection")
}

pub fn swap_digit(d: u8) -> u8 {
    4 - d
}

pub fn concat(labels: &[RhoIndex]) -> Vec<u8> {
    labels.iter().flat_map(|i| i.digits().iter().copied()).collect()
}

/// The D-side labels whose composition defines `m_{k+1}(· ⊗ ρ_{I_1} ⊗ ⋯ ⊗ ρ_{I_k})`,
/// or `None` when that multiplication vanishes by definition.
pub fn a_index_to_d_labels(labels: &[RhoIndex]) -> Option<Vec<RhoIndex>> {
    if labels.is_empty() {
        return None;
    }
    if labels.windows(2).any(|w| w[0].last() <= w[1].first()) {
        return None;
    }
    let runs = psi(&concat(labels)).ok()?;
    Some(runs.into_iter().map(phi).collect())
}

/// Inverse direction: swap 1↔3 in the concatenation and cut it at every
/// descent into increasing words.
///
/// Only sequences of the form φ(Ψ(·)) have a preimage, so a result is
/// returned only if it maps back to `labels`. For instance `(1, 2)` swaps to
/// `"32"`, whose A-side parse `(3, 2)` corresponds to the single label `(12)`.
pub fn d_labels_to_a_index(labels: &[RhoIndex]) -> Option<Vec<RhoIndex>> {
    if labels.is_empty() {
        return None;
    }
    let swapped: Vec<u8> = concat(labels).into_iter().map(swap_digit).collect();
    if !is_alternating(&swapped) {
        return None;
    }
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=swapped.len() {
        if i == swapped.len() || swapped[i] < swapped[i - 1] {
            out.push(RhoIndex::from_digits(&swapped[start..i])?);
            start = i;
        }
    }
    (a_index_to_d_labels(&out).as_deref() == Some(labels)).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use RhoIndex::*;

    fn alternating_strings(max_len: usize) -> Vec<Vec<u8>> {
        let mut all: Vec<Vec<u8>> = vec![vec![1], vec![2], vec![3]];
        let mut frontier = all.clone();
        for _ in 1..max_len {
            let mut next = Vec::new();
            for s in &frontier {
                for d in 1..=3u8 {
                    if s.last().unwrap().abs_diff(d) == 1 {
                        let mut t = s.clone();
                        t.push(d);
                        next.push(t);
                    }
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all
    }

    #[test]
    fn psi_examples() {
        use DecreasingRun::*;
        assert_eq!(psi(&parse_digits("3212121").unwrap()).unwrap(), vec![D321, D21, D21]);
        assert_eq!(psi(&[2]).unwrap(), vec![D2]);
        assert_eq!(psi(&parse_digits("1212").unwrap()).unwrap(), vec![D1, D21, D2]);
        assert!(psi(&[1, 3]).is_err());
        assert!(psi(&[]).is_err());
    }

    #[test]
    fn phi_table() {
        assert_eq!(phi(DecreasingRun::D321), R123);
        assert_eq!(phi(DecreasingRun::D2), R2);
        assert_eq!(phi(DecreasingRun::D32), R12);
        for j in DecreasingRun::ALL {
            let swapped: Vec<u8> = j.digits().iter().map(|&d| swap_digit(d)).collect();
            assert_eq!(phi(j).digits(), swapped.as_slice());
        }
    }

    #[test]
    fn translation_examples() {
        assert_eq!(a_index_to_d_labels(&[R3, R2, R12, R12, R1]), Some(vec![R123, R23, R23]));
        assert_eq!(a_index_to_d_labels(&[R12, R12]), Some(vec![R3, R23, R2]));
        assert_eq!(a_index_to_d_labels(&[R1, R3]), None);
        assert_eq!(d_labels_to_a_index(&[R123, R23, R23]), Some(vec![R3, R2, R12, R12, R1]));
        assert_eq!(d_labels_to_a_index(&[R12]), Some(vec![R3, R2]));
        assert_eq!(d_labels_to_a_index(&[R1]), Some(vec![R3]));
        assert_eq!(d_labels_to_a_index(&[R1, R2]), None);
    }

    #[test]
    fn psi_runs_increase_between() {
        for s in alternating_strings(8) {
            let runs = psi(&s).unwrap();
            let flat: Vec<u8> = runs.iter().flat_map(|r| r.digits().to_vec()).collect();
            assert_eq!(flat, s);
            assert!(runs.windows(2).all(|w| w[0].last() < w[1].first()));
        }
    }
}
