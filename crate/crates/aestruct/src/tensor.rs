//! Dense point-local tensor values with index bookkeeping.
//!
//! A `TensorValue` is a real multi-index array at a single point, with a
//! declared valence (one `Slot` per index, upper or lower) and row-major
//! storage. Slots all share the chart dimension. Operations are pure and
//! tolerance-free; numerical comparisons live with the callers.
//!
//! Index conventions: Gamma^k_ij means nabla_{d_i} d_j = Gamma^k_ij d_k;
//! (nabla J)^k_ij means ((nabla_{d_i} J) d_j)^k; T^k_ij = Gamma^k_ij -
//! Gamma^k_ji.

use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Slot {
    Upper,
    Lower,
}

#[derive(Error, Debug, PartialEq)]
pub enum TensorError {
    #[error("data length {got} does not match {expect} for rank {rank}, dim {dim}")]
    DataLength {
        got: usize,
        expect: usize,
        rank: usize,
        dim: usize,
    },
    #[error("slot pattern mismatch: {0}")]
    SlotMismatch(String),
    #[error("singular metric: |det g| = {0:e} below 1e-12")]
    SingularMetric(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorValue {
    valence: Vec<Slot>,
    dim: usize,
    data: Vec<f64>,
}

impl TensorValue {
    pub fn new(valence: Vec<Slot>, dim: usize, data: Vec<f64>) -> Result<Self, TensorError> {
        let expect = dim.pow(valence.len() as u32);
        if data.len() != expect {
            return Err(TensorError::DataLength {
                got: data.len(),
                expect,
                rank: valence.len(),
                dim,
            });
        }
        Ok(TensorValue { valence, dim, data })
    }

    pub fn zeros(valence: Vec<Slot>, dim: usize) -> Self {
        let len = dim.pow(valence.len() as u32);
        TensorValue {
            valence,
            dim,
            data: vec![0.0; len],
        }
    }

    pub fn from_fn(valence: Vec<Slot>, dim: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = TensorValue::zeros(valence, dim);
        let rank = t.rank();
        for idx in indices(rank, dim) {
            let flat = t.flat(&idx);
            t.data[flat] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.valence.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> &[Slot] {
        &self.valence
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        let mut flat = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            flat = flat * self.dim + i;
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let flat = self.flat(idx);
        self.data[flat] = v;
    }

    /// Value of a rank-0 tensor.
    pub fn scalar(&self) -> f64 {
        debug_assert_eq!(self.rank(), 0);
        self.data[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, c: f64) -> TensorValue {
        TensorValue {
            valence: self.valence.clone(),
            dim: self.dim,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn add(&self, other: &TensorValue) -> TensorValue {
        debug_assert_eq!(self.valence, other.valence);
        TensorValue {
            valence: self.valence.clone(),
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &TensorValue) -> TensorValue {
        debug_assert_eq!(self.valence, other.valence);
        TensorValue {
            valence: self.valence.clone(),
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest componentwise difference; shapes must agree.
    pub fn max_abs_diff(&self, other: &TensorValue) -> f64 {
        debug_assert_eq!(self.valence, other.valence);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Trace over one upper and one lower slot; both are removed.
    pub fn contract(&self, slot_a: usize, slot_b: usize) -> Result<TensorValue, TensorError> {
        let rank = self.rank();
        if slot_a >= rank || slot_b >= rank || slot_a == slot_b {
            return Err(TensorError::SlotMismatch(format!(
                "contract needs two distinct slots below rank {rank}, got {slot_a}, {slot_b}"
            )));
        }
        let (va, vb) = (self.valence[slot_a], self.valence[slot_b]);
        if va == vb {
            return Err(TensorError::SlotMismatch(
                "contract pairs one upper slot with one lower slot".into(),
            ));
        }
        let mut out_valence = Vec::with_capacity(rank - 2);
        for (s, &v) in self.valence.iter().enumerate() {
            if s != slot_a && s != slot_b {
                out_valence.push(v);
            }
        }
        let n = self.dim;
        let mut out = TensorValue::zeros(out_valence, n);
        let out_rank = rank - 2;
        let mut full = vec![0usize; rank];
        for idx in indices(out_rank, n) {
            let mut pos = 0;
            for s in 0..rank {
                if s != slot_a && s != slot_b {
                    full[s] = idx[pos];
                    pos += 1;
                }
            }
            let mut sum = 0.0;
            for m in 0..n {
                full[slot_a] = m;
                full[slot_b] = m;
                sum += self.get(&full);
            }
            out.set(&idx, sum);
        }
        Ok(out)
    }

    /// Lower an upper slot with the metric g (a symmetric (0,2) tensor).
    pub fn lower_index(&self, slot: usize, g: &TensorValue) -> Result<TensorValue, TensorError> {
        self.musical(slot, g, Slot::Upper, Slot::Lower)
    }

    /// Raise a lower slot with the inverse metric (a (2,0) tensor).
    pub fn raise_index(&self, slot: usize, g_inv: &TensorValue) -> Result<TensorValue, TensorError> {
        self.musical(slot, g_inv, Slot::Lower, Slot::Upper)
    }

    fn musical(
        &self,
        slot: usize,
        g: &TensorValue,
        from: Slot,
        to: Slot,
    ) -> Result<TensorValue, TensorError> {
        let rank = self.rank();
        if slot >= rank || self.valence[slot] != from {
            return Err(TensorError::SlotMismatch(format!(
                "slot {slot} is not {from:?} in valence {:?}",
                self.valence
            )));
        }
        if g.rank() != 2 || g.dim != self.dim {
            return Err(TensorError::SlotMismatch(
                "metric must be a rank-2 tensor of the same dimension".into(),
            ));
        }
        let det = det_matrix(self.dim, g.data());
        if det.abs() < 1e-12 {
            return Err(TensorError::SingularMetric(det.abs()));
        }
        let n = self.dim;
        let mut out_valence = self.valence.clone();
        out_valence[slot] = to;
        let mut out = TensorValue::zeros(out_valence, n);
        let mut src = vec![0usize; rank];
        for idx in indices(rank, n) {
            src.copy_from_slice(&idx);
            let j = idx[slot];
            let mut sum = 0.0;
            for m in 0..n {
                src[slot] = m;
                sum += self.get(&src) * g.get(&[m, j]);
            }
            out.set(&idx, sum);
        }
        Ok(out)
    }

    /// Deviation of a (0,3) tensor from being totally skew: the largest
    /// |t_{perm(ijk)} - sign(perm) t_{ijk}| over all triples and
    /// permutations. Zero exactly for 3-forms.
    pub fn antisymmetry_residual(&self) -> Result<f64, TensorError> {
        if self.rank() != 3 || self.valence.iter().any(|&s| s != Slot::Lower) {
            return Err(TensorError::SlotMismatch(
                "antisymmetry residual needs three lower slots".into(),
            ));
        }
        const PERMS: [([usize; 3], f64); 6] = [
            ([0, 1, 2], 1.0),
            ([1, 2, 0], 1.0),
            ([2, 0, 1], 1.0),
            ([0, 2, 1], -1.0),
            ([1, 0, 2], -1.0),
            ([2, 1, 0], -1.0),
        ];
        let n = self.dim;
        let mut worst = 0.0f64;
        for idx in indices(3, n) {
            let base = self.get(&idx);
            for (p, sign) in PERMS {
                let permuted = [idx[p[0]], idx[p[1]], idx[p[2]]];
                worst = worst.max((self.get(&permuted) - sign * base).abs());
            }
        }
        Ok(worst)
    }
}

/// All multi-indices of the given rank over 0..dim, in row-major order.
pub fn indices(rank: usize, dim: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0usize; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

/// Determinant of an n x n matrix in row-major storage, by LU with
/// partial pivoting.
pub fn det_matrix(n: usize, a: &[f64]) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row * n + col].abs() > m[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if m[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        det *= m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= f * m[col * n + k];
            }
        }
    }
    det
}

/// Inverse of an n x n matrix in row-major storage by Gauss-Jordan with
/// partial pivoting; None when a pivot vanishes.
pub fn invert_matrix(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row * n + col].abs() > m[pivot * n + col].abs() {
                pivot = row;
            }
        }
        if m[pivot * n + col] == 0.0 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
                inv.swap(col * n + k, pivot * n + k);
            }
        }
        let p = m[col * n + col];
        for k in 0..n {
            m[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for row in 0..n {
            if row != col && m[row * n + col] != 0.0 {
                let f = m[row * n + col];
                for k in 0..n {
                    m[row * n + k] -= f * m[col * n + k];
                    inv[row * n + k] -= f * inv[col * n + k];
                }
            }
        }
    }
    Some(inv)
}

/// Leading principal minors all positive, i.e. the matrix is symmetric
/// positive definite by Sylvester's criterion.
pub fn leading_minors_positive(n: usize, a: &[f64]) -> bool {
    for k in 1..=n {
        let mut sub = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                sub[i * k + j] = a[i * n + j];
            }
        }
        if det_matrix(k, &sub) <= 0.0 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    fn j_rotation() -> TensorValue {
        // J = [[0, -1], [1, 0]] as a (1,1)-tensor, entry [i][j] = J^i_j.
        TensorValue::new(
            vec![Slot::Upper, Slot::Lower],
            2,
            vec![0.0, -1.0, 1.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn contract_trace_of_rotation_is_zero() {
        let j = j_rotation();
        let tr = j.contract(0, 1).unwrap();
        assert_eq!(tr.rank(), 0);
        assert!(approx_eq(tr.scalar(), 0.0, 1e-15));
    }

    #[test]
    fn contract_identity_gives_dimension() {
        for n in 1..=5 {
            let id = TensorValue::from_fn(vec![Slot::Upper, Slot::Lower], n, |idx| {
                if idx[0] == idx[1] {
                    1.0
                } else {
                    0.0
                }
            });
            assert!(approx_eq(id.contract(0, 1).unwrap().scalar(), n as f64, 1e-15));
        }
    }

    #[test]
    fn contract_j_squared_trace_is_alpha_n() {
        // J^2 = -Id for the rotation, so the trace is -2 = alpha * n.
        let j = j_rotation();
        let jj = TensorValue::from_fn(vec![Slot::Upper, Slot::Lower], 2, |idx| {
            (0..2).map(|m| j.get(&[idx[0], m]) * j.get(&[m, idx[1]])).sum()
        });
        assert!(approx_eq(jj.contract(0, 1).unwrap().scalar(), -2.0, 1e-15));
    }

    #[test]
    fn contract_rejects_like_slots() {
        let g = TensorValue::zeros(vec![Slot::Lower, Slot::Lower], 2);
        assert!(g.contract(0, 1).is_err());
    }

    #[test]
    fn contract_is_linear() {
        let mut r = crate::rng::SplitMix64::new(11);
        let a = TensorValue::from_fn(vec![Slot::Upper, Slot::Lower, Slot::Lower], 3, |_| {
            r.uniform(-1.0, 1.0)
        });
        let b = TensorValue::from_fn(vec![Slot::Upper, Slot::Lower, Slot::Lower], 3, |_| {
            r.uniform(-1.0, 1.0)
        });
        let lhs = a.scale(2.5).add(&b.scale(-0.75)).contract(0, 2).unwrap();
        let rhs = a
            .contract(0, 2)
            .unwrap()
            .scale(2.5)
            .add(&b.contract(0, 2).unwrap().scale(-0.75));
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn lower_rotation_with_identity_metric() {
        // Lowering is in place: with g = Id the data is untouched, only the
        // valence changes. The lowered J is the bilinear form g(J.,.) up to
        // the slot-labeling convention.
        let j = j_rotation();
        let g = TensorValue::from_fn(vec![Slot::Lower, Slot::Lower], 2, |idx| {
            if idx[0] == idx[1] {
                1.0
            } else {
                0.0
            }
        });
        let phi = j.lower_index(0, &g).unwrap();
        assert_eq!(phi.valence(), &[Slot::Lower, Slot::Lower]);
        assert_eq!(phi.data(), j.data());
    }

    #[test]
    fn lower_diagonal_metric_flips_signs_per_slot() {
        let g = TensorValue::new(vec![Slot::Lower, Slot::Lower], 2, vec![1.0, 0.0, 0.0, -1.0])
            .unwrap();
        // e2 (x) e2 with both slots upper.
        let mut t = TensorValue::zeros(vec![Slot::Upper, Slot::Upper], 2);
        t.set(&[1, 1], 1.0);
        let once = t.lower_index(0, &g).unwrap();
        assert!(approx_eq(once.get(&[1, 1]), -1.0, 1e-15));
        let twice = once.lower_index(1, &g).unwrap();
        assert!(approx_eq(twice.get(&[1, 1]), 1.0, 1e-15));
    }

    #[test]
    fn raise_after_lower_roundtrips_with_random_spd_metric() {
        let mut r = crate::rng::SplitMix64::new(5);
        for n in 2..=4 {
            let mut a = vec![0.0; n * n];
            for x in a.iter_mut() {
                *x = r.uniform(-1.0, 1.0);
            }
            // g = a^T a + 0.1 Id is symmetric positive definite.
            let mut gm = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += a[k * n + i] * a[k * n + j];
                    }
                    gm[i * n + j] = s + if i == j { 0.1 } else { 0.0 };
                }
            }
            let g = TensorValue::new(vec![Slot::Lower, Slot::Lower], n, gm.clone()).unwrap();
            let ginv = TensorValue::new(
                vec![Slot::Upper, Slot::Upper],
                n,
                invert_matrix(n, &gm).unwrap(),
            )
            .unwrap();
            let t = TensorValue::from_fn(vec![Slot::Upper, Slot::Lower, Slot::Lower], n, |_| {
                r.uniform(-2.0, 2.0)
            });
            for slot in [1usize, 2] {
                let raised = t.raise_index(slot, &ginv).unwrap();
                let back = raised.lower_index(slot, &g).unwrap();
                assert!(t.max_abs_diff(&back) < 1e-12);
            }
        }
    }

    #[test]
    fn musical_rejects_singular_metric() {
        let g = TensorValue::zeros(vec![Slot::Lower, Slot::Lower], 2);
        let t = TensorValue::zeros(vec![Slot::Upper], 2);
        assert!(matches!(
            t.lower_index(0, &g),
            Err(TensorError::SingularMetric(_))
        ));
    }

    #[test]
    fn antisymmetry_residual_zero_tensor() {
        let t = TensorValue::zeros(vec![Slot::Lower; 3], 3);
        assert_eq!(t.antisymmetry_residual().unwrap(), 0.0);
    }

    #[test]
    fn antisymmetry_residual_of_constructed_3form() {
        // t_{123} = 1 extended as a 3-form over its orbit.
        let mut t = TensorValue::zeros(vec![Slot::Lower; 3], 3);
        t.set(&[0, 1, 2], 1.0);
        t.set(&[1, 2, 0], 1.0);
        t.set(&[2, 0, 1], 1.0);
        t.set(&[1, 0, 2], -1.0);
        t.set(&[0, 2, 1], -1.0);
        t.set(&[2, 1, 0], -1.0);
        assert_eq!(t.antisymmetry_residual().unwrap(), 0.0);
    }

    #[test]
    fn antisymmetry_residual_of_symmetric_tensor() {
        // Symmetric in the first two slots with a single magnitude: the
        // worst transposition violation is twice that magnitude.
        let mut t = TensorValue::zeros(vec![Slot::Lower; 3], 2);
        t.set(&[0, 1, 0], 0.7);
        t.set(&[1, 0, 0], 0.7);
        assert!(approx_eq(t.antisymmetry_residual().unwrap(), 1.4, 1e-15));
    }

    #[test]
    fn antisymmetry_residual_invariant_under_signed_permutation() {
        let mut r = crate::rng::SplitMix64::new(9);
        let t = TensorValue::from_fn(vec![Slot::Lower; 3], 3, |_| r.uniform(-1.0, 1.0));
        let base = t.antisymmetry_residual().unwrap();
        // Pre-permute the data as a signed permutation of a 3-form would.
        let perm = [1usize, 2, 0];
        let permuted = TensorValue::from_fn(vec![Slot::Lower; 3], 3, |idx| {
            t.get(&[idx[perm[0]], idx[perm[1]], idx[perm[2]]])
        });
        assert!(approx_eq(permuted.antisymmetry_residual().unwrap(), base, 1e-15));
    }

    #[test]
    fn antisymmetry_residual_needs_three_lower_slots() {
        let t = TensorValue::zeros(vec![Slot::Lower, Slot::Lower], 2);
        assert!(t.antisymmetry_residual().is_err());
        let u = TensorValue::zeros(vec![Slot::Upper, Slot::Lower, Slot::Lower], 2);
        assert!(u.antisymmetry_residual().is_err());
    }

    #[test]
    fn determinant_and_inverse_agree() {
        let a = vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let det = det_matrix(3, &a);
        assert!(approx_eq(det, 8.0, 1e-12));
        let inv = invert_matrix(3, &a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = 0.0;
                for k in 0..3 {
                    s += a[i * 3 + k] * inv[k * 3 + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(approx_eq(s, expect, 1e-12));
            }
        }
    }

    #[test]
    fn leading_minors_detect_definiteness() {
        assert!(leading_minors_positive(2, &[2.0, 0.0, 0.0, 3.0]));
        assert!(!leading_minors_positive(2, &[1.0, 0.0, 0.0, -1.0]));
        assert!(!leading_minors_positive(2, &[-1.0, 0.0, 0.0, -1.0]));
    }
}
