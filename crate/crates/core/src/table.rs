//! Flat result tables shared by the analysis layers and the CLI.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Quantity {
    Probability,
    WeakValueRe,
    WeakValueIm,
    MeterStat,
    Check,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Probability => "probability",
            Quantity::WeakValueRe => "weakValueRe",
            Quantity::WeakValueIm => "weakValueIm",
            Quantity::MeterStat => "meterStat",
            Quantity::Check => "check",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Source {
    ClosedForm,
    Circuit,
    Sampled,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::ClosedForm => "closedForm",
            Source::Circuit => "circuit",
            Source::Sampled => "sampled",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub theta: f64,
    pub phi: f64,
    pub scheme: String,
    pub label: String,
    pub quantity: Quantity,
    pub value: f64,
    pub source: Source,
}

impl Row {
    pub fn new(
        theta: f64,
        phi: f64,
        scheme: impl Into<String>,
        label: impl Into<String>,
        quantity: Quantity,
        value: f64,
        source: Source,
    ) -> Self {
        Row {
            theta,
            phi,
            scheme: scheme.into(),
            label: label.into(),
            quantity,
            value,
            source,
        }
    }
}

/// Ordered collection of [`Row`]s.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ScenarioTable {
    rows: Vec<Row>,
}

impl ScenarioTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: ScenarioTable) {
        self.rows.extend(other.rows);
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Stable sort by `(theta, phi, scheme, label)`.
    pub fn sort_canonical(&mut self) {
        self.rows.sort_by(|x, y| {
            x.theta
                .total_cmp(&y.theta)
                .then(x.phi.total_cmp(&y.phi))
                .then_with(|| x.scheme.cmp(&y.scheme))
                .then_with(|| x.label.cmp(&y.label))
        });
    }

    pub fn find(&self, scheme: &str, label: &str, quantity: Quantity, source: Source) -> Option<&Row> {
        self.rows.iter().find(|r| {
            r.scheme == scheme && r.label == label && r.quantity == quantity && r.source == source
        })
    }

    pub fn value(&self, scheme: &str, label: &str, quantity: Quantity, source: Source) -> Option<f64> {
        self.find(scheme, label, quantity, source).map(|r| r.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter()
    }

    /// Rows whose probability lies outside `[0, 1]` by more than `tol`.
    pub fn out_of_range_probabilities(&self, tol: f64) -> Vec<&Row> {
        self.rows
            .iter()
            .filter(|r| r.quantity == Quantity::Probability)
            .filter(|r| r.value < -tol || r.value > 1.0 + tol)
            .collect()
    }

    /// Sum of probability rows sharing `(theta, phi, scheme, source)`.
    pub fn probability_sum(&self, theta: f64, phi: f64, scheme: &str, source: Source) -> f64 {
        self.rows
            .iter()
            .filter(|r| {
                r.quantity == Quantity::Probability
                    && r.theta.total_cmp(&theta) == Ordering::Equal
                    && r.phi.total_cmp(&phi) == Ordering::Equal
                    && r.scheme == scheme
                    && r.source == source
            })
            .map(|r| r.value)
            .sum()
    }
}

impl FromIterator<Row> for ScenarioTable {
    fn from_iter<T: IntoIterator<Item = Row>>(iter: T) -> Self {
        ScenarioTable {
            rows: iter.into_iter().collect(),
        }
    }
}

impl IntoIterator for ScenarioTable {
    type Item = Row;
    type IntoIter = std::vec::IntoIter<Row>;

    fn into_iter(self) -> Self::IntoIter {
        self.rows.into_iter()
    }
}
