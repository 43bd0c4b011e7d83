//! Machine-readable experiment reports.
//!
//! Every number in a report is a [`Quantity`] that names how it was
//! obtained, so numbers without provenance cannot be written.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

/// Bumped whenever the JSON layout changes incompatibly.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    /// Exact formula, no sampling involved.
    ClosedForm,
    /// Supremum or infimum over a sample of the given mesh.
    Sampled { mesh: f64 },
    /// Output of an iteration stopped at the given residual tolerance.
    Iterated { tol: f64 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ClosedForm => f.write_str("closed_form"),
            Provenance::Sampled { mesh } => write!(f, "sampled(mesh={mesh})"),
            Provenance::Iterated { tol } => write!(f, "iterated(tol={tol:e})"),
        }
    }
}

impl Serialize for Provenance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A real or a count. Non-finite reals are written as strings, since JSON
/// has no literal for them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Number {
    Real(f64),
    Count(u64),
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Number::Real(x) if x.is_finite() => s.serialize_f64(x),
            Number::Real(x) if x.is_nan() => s.serialize_str("nan"),
            Number::Real(x) if x > 0.0 => s.serialize_str("inf"),
            Number::Real(_) => s.serialize_str("-inf"),
            Number::Count(n) => s.serialize_u64(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantity {
    pub value: Number,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Entry {
    Quantity(Quantity),
    Text(String),
    Flag(bool),
    List(Vec<Entry>),
    Group(Group),
}

/// Named entries, written in key order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Group(BTreeMap<String, Entry>);

impl Group {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn real(&mut self, key: &str, value: f64, provenance: Provenance) -> &mut Self {
        self.entry(
            key,
            Entry::Quantity(Quantity {
                value: Number::Real(value),
                provenance,
            }),
        )
    }

    pub fn count(&mut self, key: &str, value: usize, provenance: Provenance) -> &mut Self {
        self.entry(
            key,
            Entry::Quantity(Quantity {
                value: Number::Count(value as u64),
                provenance,
            }),
        )
    }

    pub fn reals(&mut self, key: &str, values: &[f64], provenance: Provenance) -> &mut Self {
        let list = values
            .iter()
            .map(|&v| {
                Entry::Quantity(Quantity {
                    value: Number::Real(v),
                    provenance,
                })
            })
            .collect();
        self.entry(key, Entry::List(list))
    }

    pub fn text(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.entry(key, Entry::Text(value.to_string()))
    }

    pub fn texts<T: fmt::Display>(&mut self, key: &str, values: &[T]) -> &mut Self {
        let list = values.iter().map(|v| Entry::Text(v.to_string())).collect();
        self.entry(key, Entry::List(list))
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.entry(key, Entry::Flag(value))
    }

    pub fn group(&mut self, key: &str, group: Group) -> &mut Self {
        self.entry(key, Entry::Group(group))
    }

    pub fn groups(&mut self, key: &str, groups: Vec<Group>) -> &mut Self {
        self.entry(
            key,
            Entry::List(groups.into_iter().map(Entry::Group).collect()),
        )
    }

    pub fn entry(&mut self, key: &str, entry: Entry) -> &mut Self {
        self.0.insert(key.to_string(), entry);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.0.get(key)
    }

    /// The value of a real or count quantity under `key`.
    pub fn value(&self, key: &str) -> Option<f64> {
        match self.0.get(key)? {
            Entry::Quantity(Quantity {
                value: Number::Real(x),
                ..
            }) => Some(*x),
            Entry::Quantity(Quantity {
                value: Number::Count(n),
                ..
            }) => Some(*n as f64),
            _ => None,
        }
    }
}

/// One asserted property of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    /// Effective settings, as text.
    pub config: BTreeMap<String, String>,
    pub results: Group,
    pub checks: Vec<Check>,
    /// `false` when assertions were disabled: the checks are informational.
    pub assertions_enabled: bool,
    pub passed: bool,
}

impl Report {
    pub fn new(experiment: &str, config: BTreeMap<String, String>, assertions: bool) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            config,
            results: Group::new(),
            checks: Vec::new(),
            assertions_enabled: assertions,
            passed: true,
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
        if self.assertions_enabled && !passed {
            self.passed = false;
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
