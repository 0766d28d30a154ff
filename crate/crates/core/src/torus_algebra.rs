//! The torus algebra 𝒜(T²) over F₂.
//!
//! Eight basis elements: the idempotents ι₀, ι₁ and the Reeb chords ρ₁, ρ₂,
//! ρ₃, ρ₁₂, ρ₂₃, ρ₁₂₃. The differential is zero. Two chords multiply to a
//! nonzero element exactly when their digit strings concatenate to a
//! consecutive increasing run.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// One of the two orthogonal idempotents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Idempotent {
    #[serde(rename = "i0")]
    I0,
    #[serde(rename = "i1")]
    I1,
}

impl Idempotent {
    pub fn from_index(i: usize) -> Self {
        match i % 2 {
            0 => Idempotent::I0,
            _ => Idempotent::I1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Idempotent::I0 => 0,
            Idempotent::I1 => 1,
        }
    }

    pub fn generator(self) -> Generator {
        match self {
            Idempotent::I0 => Generator::I0,
            Idempotent::I1 => Generator::I1,
        }
    }
}

impl fmt::Display for Idempotent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.generator().name())
    }
}

/// A nonempty increasing run of consecutive digits from {1,2,3}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhoIndex {
    R1,
    R2,
    R3,
    R12,
    R23,
    R123,
}

impl RhoIndex {
    pub const ALL: [RhoIndex; 6] = [
        RhoIndex::R1,
        RhoIndex::R2,
        RhoIndex::R3,
        RhoIndex::R12,
        RhoIndex::R23,
        RhoIndex::R123,
    ];

    pub fn digits(self) -> &'static [u8] {
        match self {
            RhoIndex::R1 => &[1],
            RhoIndex::R2 => &[2],
            RhoIndex::R3 => &[3],
            RhoIndex::R12 => &[1, 2],
            RhoIndex::R23 => &[2, 3],
            RhoIndex::R123 => &[1, 2, 3],
        }
    }

    /// The run with the given digits, if it is one.
    pub fn from_digits(d: &[u8]) -> Option<RhoIndex> {
        Some(match d {
            [1] => RhoIndex::R1,
            [2] => RhoIndex::R2,
            [3] => RhoIndex::R3,
            [1, 2] => RhoIndex::R12,
            [2, 3] => RhoIndex::R23,
            [1, 2, 3] => RhoIndex::R123,
            _ => return None,
        })
    }

    pub fn first(self) -> u8 {
        self.digits()[0]
    }

    pub fn last(self) -> u8 {
        *self.digits().last().unwrap()
    }

    /// `(left, right)` with `ι_left · ρ_I · ι_right = ρ_I`.
    pub fn idempotent_sides(self) -> (Idempotent, Idempotent) {
        (
            Idempotent::from_index(self.first() as usize - 1),
            Idempotent::from_index(self.last() as usize),
        )
    }

    /// `ρ_I · ρ_J` as a chord, or `None` when the product vanishes.
    pub fn product(self, other: RhoIndex) -> Option<RhoIndex> {
        if self.last() + 1 != other.first() {
            return None;
        }
        let mut d = self.digits().to_vec();
        d.extend_from_slice(other.digits());
        RhoIndex::from_digits(&d)
    }

    /// Compact label such as `"123"`.
    pub fn label(self) -> &'static str {
        match self {
            RhoIndex::R1 => "1",
            RhoIndex::R2 => "2",
            RhoIndex::R3 => "3",
            RhoIndex::R12 => "12",
            RhoIndex::R23 => "23",
            RhoIndex::R123 => "123",
        }
    }

    pub fn generator(self) -> Generator {
        match self {
            RhoIndex::R1 => Generator::R1,
            RhoIndex::R2 => Generator::R2,
            RhoIndex::R3 => Generator::R3,
            RhoIndex::R12 => Generator::R12,
            RhoIndex::R23 => Generator::R23,
            RhoIndex::R123 => Generator::R123,
        }
    }
}

impl fmt::Display for RhoIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RhoIndex {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.strip_prefix('r').unwrap_or(s);
        let digits: Option<Vec<u8>> = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect();
        digits
            .and_then(|d| RhoIndex::from_digits(&d))
            .ok_or_else(|| ParseError::UnknownLabel(s.to_string()))
    }
}

impl Serialize for RhoIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for RhoIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A basis element of 𝒜(T²).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    I0,
    I1,
    R1,
    R2,
    R3,
    R12,
    R23,
    R123,
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::I0,
        Generator::I1,
        Generator::R1,
        Generator::R2,
        Generator::R3,
        Generator::R12,
        Generator::R23,
        Generator::R123,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::I0 => "i0",
            Generator::I1 => "i1",
            Generator::R1 => "r1",
            Generator::R2 => "r2",
            Generator::R3 => "r3",
            Generator::R12 => "r12",
            Generator::R23 => "r23",
            Generator::R123 => "r123",
        }
    }

    pub fn rho(self) -> Option<RhoIndex> {
        Some(match self {
            Generator::I0 | Generator::I1 => return None,
            Generator::R1 => RhoIndex::R1,
            Generator::R2 => RhoIndex::R2,
            Generator::R3 => RhoIndex::R3,
            Generator::R12 => RhoIndex::R12,
            Generator::R23 => RhoIndex::R23,
            Generator::R123 => RhoIndex::R123,
        })
    }

    pub fn sides(self) -> (Idempotent, Idempotent) {
        match self {
            Generator::I0 => (Idempotent::I0, Idempotent::I0),
            Generator::I1 => (Idempotent::I1, Idempotent::I1),
            g => g.rho().unwrap().idempotent_sides(),
        }
    }

    /// Product of two basis elements.
    pub fn product(self, other: Generator) -> Option<Generator> {
        match (self.rho(), other.rho()) {
            (None, None) => (self == other).then_some(self),
            (None, Some(_)) => (self.sides().1 == other.sides().0).then_some(other),
            (Some(_), None) => (self.sides().1 == other.sides().0).then_some(self),
            (Some(a), Some(b)) => a.product(b).map(RhoIndex::generator),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Generator {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Generator::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| ParseError::UnknownLabel(s.to_string()))
    }
}

/// An F₂-linear combination of basis elements, stored as a support bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    support: u8,
}

impl AlgebraElement {
    pub const ZERO: AlgebraElement = AlgebraElement { support: 0 };

    /// The unit ι₀ + ι₁, which is also ρ_∅.
    pub fn one() -> Self {
        Generator::I0.into_element() + Generator::I1.into_element()
    }

    pub fn from_generators(gens: impl IntoIterator<Item = Generator>) -> Self {
        gens.into_iter()
            .fold(Self::ZERO, |acc, g| acc + g.into_element())
    }

    /// ρ_I, with `None` meaning ρ_∅ = 𝟏.
    pub fn rho(i: Option<RhoIndex>) -> Self {
        match i {
            None => Self::one(),
            Some(i) => i.generator().into_element(),
        }
    }

    pub fn is_zero(self) -> bool {
        self.support == 0
    }

    pub fn contains(self, g: Generator) -> bool {
        self.support & g.bit() != 0
    }

    pub fn support(self) -> impl Iterator<Item = Generator> {
        Generator::ALL.into_iter().filter(move |g| self.contains(*g))
    }
}

impl Generator {
    pub fn into_element(self) -> AlgebraElement {
        AlgebraElement { support: self.bit() }
    }
}

impl From<Generator> for AlgebraElement {
    fn from(g: Generator) -> Self {
        g.into_element()
    }
}

impl Add for AlgebraElement {
    type Output = AlgebraElement;

    fn add(self, rhs: Self) -> Self {
        AlgebraElement {
            support: self.support ^ rhs.support,
        }
    }
}

impl Mul for AlgebraElement {
    type Output = AlgebraElement;

    fn mul(self, rhs: Self) -> Self {
        multiply(self, rhs)
    }
}

/// Bilinear extension of the generator multiplication table.
pub fn multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::ZERO;
    for x in a.support() {
        for y in b.support() {
            if let Some(z) = x.product(y) {
                out = out + z.into_element();
            }
        }
    }
    out
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let names: Vec<&str> = self.support().map(Generator::name).collect();
        f.write_str(&names.join("+"))
    }
}
