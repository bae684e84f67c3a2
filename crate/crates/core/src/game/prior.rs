use serde::{Deserialize, Serialize};

use crate::radix::Radix;
use crate::INGEST_TOL;

/// Prior as it appears in a game file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PriorSpec {
    Product { rows: Vec<Vec<f64>> },
    Tabular { table: Vec<f64> },
}

/// Common prior with marginals and per-type conditionals precomputed.
#[derive(Debug, Clone)]
pub struct PriorModel {
    spec: PriorSpec,
    joint: Vec<f64>,
    marginals: Vec<Vec<f64>>,
    /// `conditionals[i][θ_i]` over Θ_{-i} in mixed-radix order; empty when ρ_i(θ_i) = 0.
    conditionals: Vec<Vec<Vec<f64>>>,
}

impl PriorModel {
    /// Builds the model; the spec must already have passed validation.
    pub(crate) fn build(spec: PriorSpec, radix: &Radix) -> Self {
        let n = radix.len();
        let total = radix.total();
        let joint: Vec<f64> = match &spec {
            PriorSpec::Product { rows } => (0..total)
                .map(|t| (0..n).map(|i| rows[i][radix.digit(t, i)]).product())
                .collect(),
            PriorSpec::Tabular { table } => table.clone(),
        };
        let marginals: Vec<Vec<f64>> = match &spec {
            PriorSpec::Product { rows } => rows.clone(),
            PriorSpec::Tabular { .. } => (0..n)
                .map(|i| {
                    let mut m = vec![0.0; radix.dims()[i]];
                    for (t, p) in joint.iter().enumerate() {
                        m[radix.digit(t, i)] += p;
                    }
                    m
                })
                .collect(),
        };
        let conditionals = (0..n)
            .map(|i| {
                (0..radix.dims()[i])
                    .map(|ti| {
                        let mass = marginals[i][ti];
                        if mass <= 0.0 {
                            return Vec::new();
                        }
                        match &spec {
                            PriorSpec::Product { rows } => (0..radix.others_total(i))
                                .map(|o| {
                                    let t = radix.join(i, ti, o);
                                    (0..n)
                                        .filter(|&j| j != i)
                                        .map(|j| rows[j][radix.digit(t, j)])
                                        .product()
                                })
                                .collect(),
                            PriorSpec::Tabular { .. } => (0..radix.others_total(i))
                                .map(|o| joint[radix.join(i, ti, o)] / mass)
                                .collect(),
                        }
                    })
                    .collect()
            })
            .collect();
        PriorModel {
            spec,
            joint,
            marginals,
            conditionals,
        }
    }

    pub fn spec(&self) -> &PriorSpec {
        &self.spec
    }

    pub fn is_product(&self) -> bool {
        matches!(self.spec, PriorSpec::Product { .. })
    }

    /// ρ(θ) for a full type-profile index.
    pub fn joint(&self, t: usize) -> f64 {
        self.joint[t]
    }

    pub fn joint_table(&self) -> &[f64] {
        &self.joint
    }

    /// ρ_i over Θ_i.
    pub fn marginal(&self, i: usize) -> &[f64] {
        &self.marginals[i]
    }

    /// ρ|θ_i over Θ_{-i}, or `None` for a zero-mass type.
    pub fn conditional(&self, i: usize, ti: usize) -> Option<&[f64]> {
        let c = &self.conditionals[i][ti];
        if c.is_empty() {
            None
        } else {
            Some(c)
        }
    }
}

/// Checks that `v` is a probability vector within the ingestion tolerance.
pub(crate) fn prob_vector_problem(v: &[f64]) -> Option<String> {
    if v.is_empty() {
        return Some("empty probability vector".into());
    }
    if let Some((k, x)) = v
        .iter()
        .enumerate()
        .find(|(_, x)| !(**x >= 0.0) || !x.is_finite())
    {
        return Some(format!("entry {k} = {x} is negative or not finite"));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > INGEST_TOL {
        return Some(format!("mass {s} != 1"));
    }
    None
}
