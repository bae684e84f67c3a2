use serde::{Deserialize, Serialize};

use super::Dims;
use crate::error::{Error, Result};
use crate::radix::Radix;
use crate::{DERIVED_TOL, INGEST_TOL};

/// One player's per-type action distribution, stored row-major over (θ, a).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TypeWisePolicy {
    n_types: usize,
    n_actions: usize,
    probs: Vec<f64>,
}

impl TypeWisePolicy {
    pub fn uniform(n_types: usize, n_actions: usize) -> Self {
        TypeWisePolicy {
            n_types,
            n_actions,
            probs: vec![1.0 / n_actions as f64; n_types * n_actions],
        }
    }

    /// Deterministic policy playing `actions[θ]` at each type.
    pub fn pure(n_actions: usize, actions: &[usize]) -> Self {
        let mut probs = vec![0.0; actions.len() * n_actions];
        for (t, &a) in actions.iter().enumerate() {
            probs[t * n_actions + a] = 1.0;
        }
        TypeWisePolicy {
            n_types: actions.len(),
            n_actions,
            probs,
        }
    }

    /// Validated constructor for ingested data.
    pub fn new(n_types: usize, n_actions: usize, probs: Vec<f64>) -> Result<Self> {
        Self::checked(n_types, n_actions, probs, INGEST_TOL)
    }

    /// Validated constructor for computed data, at the derived tolerance.
    pub fn from_derived(n_types: usize, n_actions: usize, probs: Vec<f64>) -> Result<Self> {
        Self::checked(n_types, n_actions, probs, DERIVED_TOL)
    }

    fn checked(n_types: usize, n_actions: usize, probs: Vec<f64>, tol: f64) -> Result<Self> {
        if n_types == 0 || n_actions == 0 || probs.len() != n_types * n_actions {
            return Err(Error::BadDims(format!(
                "policy of {} entries for {n_types} types x {n_actions} actions",
                probs.len()
            )));
        }
        for t in 0..n_types {
            let row = &probs[t * n_actions..(t + 1) * n_actions];
            if row.iter().any(|p| !(*p >= -tol) || !p.is_finite()) {
                return Err(Error::NotStochastic(format!(
                    "policy row {t} has a negative entry"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::NotStochastic(format!("policy row {t} sums to {s}")));
            }
        }
        Ok(TypeWisePolicy {
            n_types,
            n_actions,
            probs,
        })
    }

    pub fn n_types(&self) -> usize {
        self.n_types
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, t: usize, a: usize) -> f64 {
        self.probs[t * self.n_actions + a]
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.probs[t * self.n_actions..(t + 1) * self.n_actions]
    }

    /// The flat vector x ∈ X indexed by θ·|A| + a.
    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }
}

impl TryFrom<Vec<Vec<f64>>> for TypeWisePolicy {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_types = rows.len();
        let n_actions = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_actions) {
            return Err(Error::BadDims("ragged policy rows".into()));
        }
        TypeWisePolicy::new(n_types, n_actions, rows.concat())
    }
}

impl From<TypeWisePolicy> for Vec<Vec<f64>> {
    fn from(p: TypeWisePolicy) -> Self {
        p.probs.chunks(p.n_actions).map(|c| c.to_vec()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub policies: Vec<TypeWisePolicy>,
}

/// π(θ;a) = Σ_t w_t Π_i π_i^t(θ_i;a_i).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureDistribution {
    pub components: Vec<MixtureComponent>,
}

impl MixtureDistribution {
    pub fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        let m = MixtureDistribution { components };
        m.check(INGEST_TOL)?;
        Ok(m)
    }

    /// Equal-weight mixture of the given product profiles.
    pub fn uniform(profiles: Vec<Vec<TypeWisePolicy>>) -> Self {
        let w = 1.0 / profiles.len() as f64;
        MixtureDistribution {
            components: profiles
                .into_iter()
                .map(|policies| MixtureComponent {
                    weight: w,
                    policies,
                })
                .collect(),
        }
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidInput("mixture has no components".into()));
        }
        let s = compensated_sum(self.components.iter().map(|c| c.weight));
        if (s - 1.0).abs() > tol || self.components.iter().any(|c| !(c.weight >= 0.0)) {
            return Err(Error::NotStochastic(format!("mixture weights sum to {s}")));
        }
        Ok(())
    }

    pub fn check_dims(&self, dims: &Dims) -> Result<()> {
        for (k, c) in self.components.iter().enumerate() {
            let ok = c.policies.len() == dims.n_players()
                && c.policies
                    .iter()
                    .enumerate()
                    .all(|(i, p)| p.n_types() == dims.types[i] && p.n_actions() == dims.actions[i]);
            if !ok {
                return Err(Error::BadDims(format!(
                    "mixture component {k} does not match the game"
                )));
            }
        }
        Ok(())
    }

    /// Probability of action profile `a` at type profile `theta` (per-player ordinals).
    pub fn eval(&self, theta: &[usize], a: &[usize]) -> f64 {
        self.components
            .iter()
            .map(|c| {
                c.weight
                    * c.policies
                        .iter()
                        .enumerate()
                        .map(|(i, p)| p.get(theta[i], a[i]))
                        .product::<f64>()
            })
            .sum()
    }

    /// Flattens to an explicit table over (Θ, A).
    pub fn to_tabular(&self, dims: &Dims, cap: usize) -> Result<TabularDistribution> {
        self.check_dims(dims)?;
        let size = Radix::size_of(&[dims.type_radix.total(), dims.action_radix.total()]);
        if size > cap as u128 {
            return Err(Error::SupportTooLarge { size, cap });
        }
        let na = dims.action_radix.total();
        let nt = dims.type_radix.total();
        let n = dims.n_players();
        let mut data = vec![0.0; nt * na];
        let mut prod = vec![0.0; na];
        for c in &self.components {
            for t in 0..nt {
                let theta = dims.type_radix.decode(t);
                product_over_profiles(
                    &dims.action_radix,
                    n,
                    |i, ai| c.policies[i].get(theta[i], ai),
                    &mut prod,
                );
                for (d, p) in data[t * na..(t + 1) * na].iter_mut().zip(&prod) {
                    *d += c.weight * p;
                }
            }
        }
        Ok(TabularDistribution {
            dims: dims.clone(),
            data,
        })
    }
}

/// Neumaier-compensated sum, so long runs of 1/T weights still sum to 1 within 1e-12.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// Fills `out[a] = Π_i f(i, a_i)` over every profile of `radix`.
pub(crate) fn product_over_profiles(
    radix: &Radix,
    n: usize,
    f: impl Fn(usize, usize) -> f64,
    out: &mut [f64],
) {
    out[0] = 1.0;
    let mut len = 1;
    for i in 0..n {
        let d = radix.dims()[i];
        for k in (0..len).rev() {
            let base = out[k];
            for ai in (0..d).rev() {
                out[k * d + ai] = base * f(i, ai);
            }
        }
        len *= d;
    }
}

/// Explicit type-wise distribution π ∈ Δ(A)^Θ, row-major over (θ, a).
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDistribution {
    dims: Dims,
    data: Vec<f64>,
}

impl TabularDistribution {
    pub fn new(dims: &Dims, data: Vec<f64>) -> Result<Self> {
        Self::checked(dims, data, INGEST_TOL)
    }

    pub fn from_derived(dims: &Dims, data: Vec<f64>) -> Result<Self> {
        Self::checked(dims, data, DERIVED_TOL)
    }

    fn checked(dims: &Dims, data: Vec<f64>, tol: f64) -> Result<Self> {
        let na = dims.action_radix.total();
        let nt = dims.type_radix.total();
        if data.len() != nt * na {
            return Err(Error::BadDims(format!(
                "table of {} entries, expected {}",
                data.len(),
                nt * na
            )));
        }
        for t in 0..nt {
            let row = &data[t * na..(t + 1) * na];
            if row.iter().any(|p| !(*p >= -tol)) {
                return Err(Error::NotStochastic(format!(
                    "type profile {t} has a negative entry"
                )));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::NotStochastic(format!(
                    "type profile {t} sums to {s}"
                )));
            }
        }
        Ok(TabularDistribution {
            dims: dims.clone(),
            data,
        })
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn get(&self, t: usize, a: usize) -> f64 {
        self.data[t * self.dims.action_radix.total() + a]
    }

    /// Distribution over action profiles at type profile index `t`.
    pub fn row(&self, t: usize) -> &[f64] {
        let na = self.dims.action_radix.total();
        &self.data[t * na..(t + 1) * na]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}
