//! JSON file formats for distributions and mechanisms.
//!
//! ```json
//! {"label": "x", "types": [{"v": "3/2", "w": "1", "prob": "1/2"}, ...]}
//! {"label": "x", "types": [{"v": "3/2", "w": "1", "q": "1", "p": "1"}, ...]}
//! ```
//!
//! Rationals are strings `"a/b"` or `"a"`; they are reduced to lowest terms
//! on load and always written reduced, so a load/store cycle is byte-stable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{BuyerDistribution, Lottery, Mechanism, Rational, TypeKey, TypePoint};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    label: String,
    types: Vec<TypePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MechanismRow {
    pub v: Rational,
    pub w: Rational,
    pub q: Rational,
    pub p: Rational,
}

#[derive(Serialize, Deserialize)]
struct MechanismFile {
    label: String,
    types: Vec<MechanismRow>,
}

/// Pretty JSON with a trailing newline; the one serializer every output uses.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn distribution_to_json(d: &BuyerDistribution) -> Result<String> {
    to_json_string(&DistributionFile {
        label: d.label().to_string(),
        types: d.points().to_vec(),
    })
}

pub fn distribution_from_json(s: &str) -> Result<BuyerDistribution> {
    let file: DistributionFile = serde_json::from_str(s)?;
    BuyerDistribution::new(file.label, file.types)
}

/// One row per type in canonical order; the shape used inside every JSON
/// output that embeds a mechanism.
pub fn mechanism_rows(mech: &Mechanism) -> Vec<MechanismRow> {
    mech.iter()
        .map(|(k, l)| MechanismRow {
            v: k.v.clone(),
            w: k.w.clone(),
            q: l.q.clone(),
            p: l.p.clone(),
        })
        .collect()
}

pub fn mechanism_to_json(mech: &Mechanism, label: &str) -> Result<String> {
    to_json_string(&MechanismFile {
        label: label.to_string(),
        types: mechanism_rows(mech),
    })
}

/// Returns the mechanism and its label.
pub fn mechanism_from_json(s: &str) -> Result<(Mechanism, String)> {
    let file: MechanismFile = serde_json::from_str(s)?;
    let mut assignment = BTreeMap::new();
    for row in file.types {
        let key = TypeKey::new(row.v, row.w);
        let lottery = Lottery::new(row.q, row.p)?;
        if assignment.insert(key.clone(), lottery).is_some() {
            return Err(Error::Parse(format!("type {key} listed twice")));
        }
    }
    Ok((Mechanism::new(assignment), file.label))
}
