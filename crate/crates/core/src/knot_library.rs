//! Built-in fixtures, stored as JSON in `fixtures/`.

use std::collections::BTreeMap;

use crate::cfd_builder::build_cfd;
use crate::cfk_complex::{CfkComplex, CfkJson, KnotNormalForm};
use crate::error::{Error, ParseError, Result};
use crate::type_d::{TypeDJson, TypeDStructure};

pub const NAMES: [&str; 5] = ["unknot", "trefoil_r", "trefoil_l", "figure8", "sigma237_core_cfd"];

#[derive(Clone, Debug)]
pub enum Payload {
    Complex(CfkComplex),
    TypeD(TypeDStructure),
}

#[derive(Clone, Debug)]
pub struct FixtureEntry {
    pub name: &'static str,
    pub payload: Payload,
    /// Invariants the fixture is known to have, e.g. `genus`, `tau`, `epsilon`,
    /// `hfk_bottom` (dim HFK in grading −g).
    pub expected: BTreeMap<&'static str, i64>,
}

impl FixtureEntry {
    pub fn complex(&self) -> Option<&CfkComplex> {
        match &self.payload {
            Payload::Complex(c) => Some(c),
            Payload::TypeD(_) => None,
        }
    }

    pub fn normal_form(&self) -> Result<KnotNormalForm> {
        match &self.payload {
            Payload::Complex(c) => c.simplify(),
            Payload::TypeD(_) => Err(Error::InvalidNormalForm(format!(
                "`{}` is a type D structure, not a knot complex",
                self.name
            ))),
        }
    }

    pub fn cfd(&self) -> Result<TypeDStructure> {
        match &self.payload {
            Payload::Complex(c) => Ok(build_cfd(&c.simplify()?)?.structure),
            Payload::TypeD(d) => Ok(d.clone()),
        }
    }
}

fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "unknot" => include_str!("../fixtures/unknot.json"),
        "trefoil_r" => include_str!("../fixtures/trefoil_r.json"),
        "trefoil_l" => include_str!("../fixtures/trefoil_l.json"),
        "figure8" => include_str!("../fixtures/figure8.json"),
        // The accompanying prose lists η₀ among the vertical-homology
        // generators; the diagram itself has η₁ and η₂ and is encoded as drawn.
        "sigma237_core_cfd" => include_str!("../fixtures/sigma237_core_cfd.json"),
        _ => return None,
    })
}

fn expected(name: &str) -> BTreeMap<&'static str, i64> {
    let pairs: &[(&'static str, i64)] = match name {
        "unknot" => &[("genus", 0), ("tau", 0), ("epsilon", 0), ("hfk_bottom", 1)],
        "trefoil_r" => &[("genus", 1), ("tau", 1), ("epsilon", 1), ("hfk_bottom", 1)],
        "trefoil_l" => &[("genus", 1), ("tau", -1), ("epsilon", -1), ("hfk_bottom", 1)],
        "figure8" => &[("genus", 1), ("tau", 0), ("epsilon", 0), ("hfk_bottom", 1)],
        "sigma237_core_cfd" => &[("genus", 1), ("generators", 9), ("arrows", 11)],
        _ => &[],
    };
    pairs.iter().copied().collect()
}

/// Loads and validates a built-in fixture.
pub fn get(name: &str) -> Result<FixtureEntry> {
    let text = source(name).ok_or_else(|| Error::UnknownFixture(name.to_string()))?;
    let name = NAMES.iter().copied().find(|n| *n == name).unwrap();
    let payload = if name.ends_with("_cfd") {
        let doc: TypeDJson = serde_json::from_str(text).map_err(ParseError::from)?;
        let d = TypeDStructure::from_json(&doc)?;
        let report = d.check_structure();
        if !report.passed() || !d.is_reduced() {
            return Err(Error::InvalidTypeD(report.describe(&d).join("; ")));
        }
        Payload::TypeD(d)
    } else {
        let doc: CfkJson = serde_json::from_str(text).map_err(ParseError::from)?;
        let c = CfkComplex::from_json(&doc)?;
        let report = c.validate();
        if !report.passed() {
            return Err(Error::InvalidComplex(report.failures().join("; ")));
        }
        Payload::Complex(c)
    };
    Ok(FixtureEntry {
        name,
        payload,
        expected: expected(name),
    })
}

pub fn all() -> Result<Vec<FixtureEntry>> {
    NAMES.iter().map(|n| get(n)).collect()
}
