//! Synthetic projection profiles and their line-oriented text form.
//!
//! ```text
//! # comment
//! top 7.0
//! nonannular V1 12.0
//! annular A1 0.01 1.0 40.0      # label l_x l_y d_C
//! ```

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{annular_distance, HoroballPair};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EntryKind {
    NonAnnular { d: f64 },
    Annular { lx: f64, ly: f64, dc: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub label: String,
    #[serde(flatten)]
    pub kind: EntryKind,
}

impl Entry {
    /// The entry's distance: `d` itself, or `d_A` for annular entries.
    pub fn value(&self) -> Result<f64> {
        match self.kind {
            EntryKind::NonAnnular { d } => Ok(d),
            EntryKind::Annular { lx, ly, dc } => annular_distance(&HoroballPair::new(lx, ly, dc)?),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectionProfile {
    pub d_s: f64,
    pub entries: Vec<Entry>,
}

fn nonneg(x: f64, what: &str) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite and nonnegative, got {x}")))
    }
}

impl ProjectionProfile {
    pub fn validate(&self) -> Result<()> {
        nonneg(self.d_s, "top-level value")?;
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.label.as_str()) {
                return Err(Error::Domain(format!("duplicate label {:?}", e.label)));
            }
            match e.kind {
                EntryKind::NonAnnular { d } => nonneg(d, "projection value")?,
                EntryKind::Annular { lx, ly, dc } => {
                    HoroballPair::new(lx, ly, dc)?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for ProjectionProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut profile = ProjectionProfile::default();
        let mut top_seen = false;
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse(format!("line {}: {msg}: {raw:?}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<f64> {
                fields.get(i).ok_or_else(|| bad("missing value"))?.parse::<f64>().map_err(|_| bad("bad number"))
            };
            match fields[0] {
                "top" if fields.len() == 2 => {
                    if top_seen {
                        return Err(bad("repeated top record"));
                    }
                    top_seen = true;
                    profile.d_s = num(1)?;
                }
                "nonannular" if fields.len() == 3 => profile.entries.push(Entry {
                    label: fields[1].to_string(),
                    kind: EntryKind::NonAnnular { d: num(2)? },
                }),
                "annular" if fields.len() == 5 => profile.entries.push(Entry {
                    label: fields[1].to_string(),
                    kind: EntryKind::Annular { lx: num(2)?, ly: num(3)?, dc: num(4)? },
                }),
                _ => return Err(bad("unrecognised record")),
            }
        }
        profile.validate()?;
        Ok(profile)
    }
}

impl fmt::Display for ProjectionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "top {:?}", self.d_s)?;
        for e in &self.entries {
            match e.kind {
                EntryKind::NonAnnular { d } => writeln!(f, "nonannular {} {:?}", e.label, d)?,
                EntryKind::Annular { lx, ly, dc } => writeln!(f, "annular {} {:?} {:?} {:?}", e.label, lx, ly, dc)?,
            }
        }
        Ok(())
    }
}
