//! Mixed-radix indexing, first digit most significant.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radix {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Radix {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        let mut acc = 1usize;
        for k in (0..dims.len()).rev() {
            strides[k] = acc;
            acc = acc.saturating_mul(dims[k]);
        }
        Radix {
            dims: dims.to_vec(),
            strides,
            total: acc,
        }
    }

    /// Product of all dims computed without overflow, for cap checks before construction.
    pub fn size_of(dims: &[usize]) -> u128 {
        dims.iter()
            .fold(1u128, |acc, &d| acc.saturating_mul(d as u128))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn decode(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for k in 0..self.dims.len() {
            out[k] = idx / self.strides[k];
            idx %= self.strides[k];
        }
        out
    }

    pub fn digit(&self, idx: usize, k: usize) -> usize {
        (idx / self.strides[k]) % self.dims[k]
    }

    pub fn with_digit(&self, idx: usize, k: usize, v: usize) -> usize {
        idx - self.digit(idx, k) * self.strides[k] + v * self.strides[k]
    }

    /// Number of profiles with digit `k` fixed.
    pub fn others_total(&self, k: usize) -> usize {
        self.total / self.dims[k]
    }

    /// Full index of the `o`-th profile (in mixed-radix order of the remaining
    /// digits) among those whose digit `k` equals `v`.
    pub fn join(&self, k: usize, v: usize, o: usize) -> usize {
        let s = self.strides[k];
        (o / s) * s * self.dims[k] + v * s + o % s
    }

    /// Index among the profiles sharing digit `k`, inverse of [`Radix::join`].
    pub fn split(&self, idx: usize, k: usize) -> usize {
        let s = self.strides[k];
        (idx / (s * self.dims[k])) * s + idx % s
    }
}
