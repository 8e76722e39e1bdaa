//! Arbitrary-precision upper-unitriangular integer matrices.
//!
//! A [`UniMatrix`] is an `m x m` integer matrix with ones on the diagonal
//! and zeros below it.  Only the nonzero strictly-upper entries are stored,
//! keyed by 1-based `(row, col)` pairs, so two matrices are equal exactly
//! when their entry tables are equal.  The group operations (product,
//! inverse, powers) stay inside this class, and all arithmetic is exact.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// An upper-unitriangular integer matrix in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UniMatrix {
    dim: u32,
    entries: BTreeMap<(u32, u32), BigInt>,
}

impl UniMatrix {
    /// The identity matrix of size `dim`.
    pub fn identity(dim: u32) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        UniMatrix {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// `I + v * E_{i,j}` with 1-based indices, `1 <= i < j <= dim`.
    pub fn elementary(dim: u32, i: u32, j: u32, v: impl Into<BigInt>) -> Self {
        let mut m = UniMatrix::identity(dim);
        m.add_to_entry(i, j, &v.into());
        m
    }

    /// Builds a matrix from strictly-upper entries, dropping zeros and
    /// summing duplicates.
    pub fn from_entries<I>(dim: u32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = ((u32, u32), BigInt)>,
    {
        let mut m = UniMatrix::identity(dim);
        for ((i, j), v) in entries {
            if !(1 <= i && i < j && j <= dim) {
                return Err(Error::Json(format!(
                    "entry ({i},{j}) outside the strict upper triangle of a {dim}x{dim} matrix"
                )));
            }
            m.add_to_entry(i, j, &v);
        }
        Ok(m)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Number of stored (nonzero strictly-upper) entries.
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Entry at 1-based `(i, j)`, including the implicit diagonal and zeros.
    pub fn get(&self, i: u32, j: u32) -> BigInt {
        if i == j {
            BigInt::one()
        } else {
            self.entries
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(BigInt::zero)
        }
    }

    /// Iterates over stored entries in lexicographic `(i, j)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.entries.iter()
    }

    pub fn is_identity(&self) -> bool {
        self.entries.is_empty()
    }

    fn add_to_entry(&mut self, i: u32, j: u32, v: &BigInt) {
        debug_assert!(1 <= i && i < j && j <= self.dim);
        if v.is_zero() {
            return;
        }
        match self.entries.get_mut(&(i, j)) {
            Some(e) => {
                *e += v;
                if e.is_zero() {
                    self.entries.remove(&(i, j));
                }
            }
            None => {
                self.entries.insert((i, j), v.clone());
            }
        }
    }

    /// Exact matrix product.  Errors if the dimensions differ.
    pub fn multiply(&self, other: &UniMatrix) -> Result<UniMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        let mut out = UniMatrix::identity(self.dim);
        // (AB)_{ij} = A_{ij} + B_{ij} + sum_{i<t<j} A_{it} B_{tj}
        for (&(i, j), v) in &self.entries {
            out.add_to_entry(i, j, v);
        }
        for (&(i, j), v) in &other.entries {
            out.add_to_entry(i, j, v);
        }
        for (&(i, t), a) in &self.entries {
            for (&(_, j), b) in other.entries.range((t, t + 1)..=(t, u32::MAX)) {
                out.add_to_entry(i, j, &(a * b));
            }
        }
        Ok(out)
    }

    /// Exact inverse via the terminating Neumann series of the nilpotent
    /// strictly-upper part: `(I + N)^{-1} = I - N + N^2 - ...`.
    pub fn inverse(&self) -> UniMatrix {
        let strict = UniMatrix {
            dim: self.dim,
            entries: self.entries.clone(),
        };
        let mut out = UniMatrix::identity(self.dim);
        let mut power = strict.clone();
        let mut negate = true;
        while !power.is_identity() {
            for (&(i, j), v) in &power.entries {
                let term = if negate { -v } else { v.clone() };
                out.add_to_entry(i, j, &term);
            }
            power = power.strict_product(&strict);
            negate = !negate;
        }
        out
    }

    /// Product of the strictly-upper parts only (no implicit diagonal).
    fn strict_product(&self, other: &UniMatrix) -> UniMatrix {
        let mut out = UniMatrix::identity(self.dim);
        for (&(i, t), a) in &self.entries {
            for (&(_, j), b) in other.entries.range((t, t + 1)..=(t, u32::MAX)) {
                out.add_to_entry(i, j, &(a * b));
            }
        }
        out
    }

    /// Block-diagonal sum `self (+) other`.
    pub fn direct_sum(&self, other: &UniMatrix) -> UniMatrix {
        let off = self.dim;
        let mut entries = self.entries.clone();
        for (&(i, j), v) in &other.entries {
            entries.insert((i + off, j + off), v.clone());
        }
        UniMatrix {
            dim: self.dim + other.dim,
            entries,
        }
    }

    /// Appends `k` block-diagonal copies of `block`.
    pub fn direct_sum_k(&self, block: &UniMatrix, k: usize) -> UniMatrix {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.direct_sum(block);
        }
        out
    }

    /// Appends an identity block of `extra` rows; a no-op for `extra == 0`.
    pub fn pad(&self, extra: u32) -> UniMatrix {
        if extra == 0 {
            self.clone()
        } else {
            self.direct_sum(&UniMatrix::identity(extra))
        }
    }
}

/// Accumulates a block-diagonal matrix in one pass.  Folding
/// [`UniMatrix::direct_sum`] copies the accumulated entries at every step;
/// this builder stays linear in the total entry count, which matters for
/// gadgets with thousands of blocks.
#[derive(Default)]
pub struct BlockDiagonalBuilder {
    dim: u32,
    entries: Vec<((u32, u32), BigInt)>,
}

impl BlockDiagonalBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Current size; the next block starts at row `dim() + 1`.
    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn push(&mut self, block: &UniMatrix) {
        let off = self.dim;
        for (&(i, j), v) in block.iter() {
            self.entries.push(((i + off, j + off), v.clone()));
        }
        self.dim += block.dim();
    }

    pub fn push_identity(&mut self, extra: u32) {
        self.dim += extra;
    }

    pub fn finish(self) -> UniMatrix {
        UniMatrix::from_entries(self.dim, self.entries).expect("blocks stay in range")
    }
}

impl UniMatrix {

    /// The `q x q` Jordan block with ones on and directly above the diagonal.
    pub fn jordan_block(q: u32) -> UniMatrix {
        assert!(q >= 1);
        let mut m = UniMatrix::identity(q);
        for i in 1..q {
            m.add_to_entry(i, i + 1, &BigInt::one());
        }
        m
    }

    /// `jordan_block(q)^p` in closed form: entry `(i, j)` is `C(p, j - i)`.
    ///
    /// The generalized binomial makes this valid for negative `p` as well,
    /// where it equals the corresponding inverse power.
    pub fn jordan_power(q: u32, p: i64) -> UniMatrix {
        assert!(q >= 1);
        let mut m = UniMatrix::identity(q);
        for i in 1..=q {
            for j in (i + 1)..=q {
                let c = arith::binomial_i64(p, (j - i) as u64);
                m.add_to_entry(i, j, &c);
            }
        }
        m
    }

    /// Reflection along the main antidiagonal:
    /// `out[i, j] = self[m + 1 - j, m + 1 - i]`.  An involution that maps
    /// the class of unitriangular matrices to itself.
    pub fn antidiag_reflect(&self) -> UniMatrix {
        let m = self.dim;
        let mut entries = BTreeMap::new();
        for (&(i, j), v) in &self.entries {
            entries.insert((m + 1 - j, m + 1 - i), v.clone());
        }
        UniMatrix { dim: m, entries }
    }

    /// The antidiagonal automorphism `X -> reflect(X)^{-1}`, a group
    /// homomorphism used to reverse the order of Jordan blocks.
    pub fn antidiag_automorphism(&self) -> UniMatrix {
        self.antidiag_reflect().inverse()
    }

    /// `self^e` by binary exponentiation, with the inverse for `e < 0`.
    pub fn power(&self, e: i64) -> UniMatrix {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = UniMatrix::identity(self.dim);
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.multiply(&sq).expect("equal dims");
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.multiply(&sq).expect("equal dims");
            }
        }
        acc
    }

    pub fn commutes_with(&self, other: &UniMatrix) -> Result<bool> {
        Ok(self.multiply(other)? == other.multiply(self)?)
    }

    /// Deterministic byte encoding of the matrix; see [`CanonicalKey`].
    pub fn canonical_key(&self) -> CanonicalKey {
        let mut bytes = Vec::with_capacity(8 + 16 * self.entries.len());
        bytes.extend_from_slice(&self.dim.to_be_bytes());
        bytes.extend_from_slice(&(self.entries.len() as u32).to_be_bytes());
        for (&(i, j), v) in &self.entries {
            bytes.extend_from_slice(&i.to_be_bytes());
            bytes.extend_from_slice(&j.to_be_bytes());
            let (sign, mag) = v.clone().into_parts();
            bytes.push(if sign == num_bigint::Sign::Minus { 1 } else { 0 });
            let mag_bytes = mag.to_bytes_be();
            bytes.extend_from_slice(&(mag_bytes.len() as u32).to_be_bytes());
            bytes.extend_from_slice(&mag_bytes);
        }
        CanonicalKey(bytes)
    }

    /// Decodes a [`CanonicalKey`] back into the matrix it encodes.
    pub fn from_canonical_key(key: &CanonicalKey) -> Result<UniMatrix> {
        let b = &key.0;
        let bad = || Error::Json("malformed canonical key".into());
        let read_u32 = |at: usize| -> Result<u32> {
            let s: [u8; 4] = b.get(at..at + 4).ok_or_else(bad)?.try_into().unwrap();
            Ok(u32::from_be_bytes(s))
        };
        let dim = read_u32(0)?;
        let count = read_u32(4)? as usize;
        let mut pos = 8;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let i = read_u32(pos)?;
            let j = read_u32(pos + 4)?;
            let neg = *b.get(pos + 8).ok_or_else(bad)? == 1;
            let len = read_u32(pos + 9)? as usize;
            let mag = b.get(pos + 13..pos + 13 + len).ok_or_else(bad)?;
            let mut v = BigInt::from_bytes_be(num_bigint::Sign::Plus, mag);
            if neg {
                v = -v;
            }
            entries.push(((i, j), v));
            pos += 13 + len;
        }
        if pos != b.len() {
            return Err(bad());
        }
        UniMatrix::from_entries(dim, entries)
    }

    /// JSON interchange form:
    /// `{"dim": m, "entries": [[i, j, "decimal"], ...]}` with 1-based
    /// indices sorted lexicographically and entries as decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(&(i, j), v)| serde_json::json!([i, j, arith::to_decimal(v)]))
            .collect();
        serde_json::json!({ "dim": self.dim, "entries": entries })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<UniMatrix> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Json("matrix must be a JSON object".into()))?;
        let dim = obj
            .get("dim")
            .and_then(|d| d.as_u64())
            .ok_or_else(|| Error::Json("matrix needs a positive \"dim\"".into()))?;
        if dim == 0 || dim > u32::MAX as u64 {
            return Err(Error::Json(format!("bad matrix dimension {dim}")));
        }
        let raw = obj
            .get("entries")
            .and_then(|e| e.as_array())
            .ok_or_else(|| Error::Json("matrix needs an \"entries\" array".into()))?;
        let mut entries = Vec::with_capacity(raw.len());
        for e in raw {
            let triple = e
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::Json("matrix entry must be [i, j, \"decimal\"]".into()))?;
            let i = triple[0]
                .as_u64()
                .ok_or_else(|| Error::Json("matrix entry row must be an integer".into()))?;
            let j = triple[1]
                .as_u64()
                .ok_or_else(|| Error::Json("matrix entry column must be an integer".into()))?;
            let s = triple[2]
                .as_str()
                .ok_or_else(|| Error::Json("matrix entry value must be a decimal string".into()))?;
            entries.push(((i as u32, j as u32), arith::from_decimal(s)?));
        }
        UniMatrix::from_entries(dim as u32, entries)
    }
}

impl fmt::Debug for UniMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniMatrix(dim={}", self.dim)?;
        for (&(i, j), v) in &self.entries {
            write!(f, ", [{i},{j}]={v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for UniMatrix {
    /// Dense rendering, intended for small matrices in reports and tests.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim {
            for j in 1..=self.dim {
                if j > 1 {
                    write!(f, " ")?;
                }
                let v = if i < j {
                    self.get(i, j)
                } else if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                };
                write!(f, "{v}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Deterministic byte encoding of a matrix.  Two matrices produce equal
/// keys exactly when they are equal, which makes the key usable as an
/// element identity in walk tables and serialized reports.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonicalKey(pub Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Dense multiplication oracle, independent of the sparse path.
    #[allow(clippy::needless_range_loop)]
    fn dense_mul(a: &UniMatrix, b: &UniMatrix) -> Vec<Vec<BigInt>> {
        let m = a.dim() as usize;
        let get = |x: &UniMatrix, i: usize, j: usize| -> BigInt {
            if i == j {
                BigInt::one()
            } else if i < j {
                x.get(i as u32, j as u32)
            } else {
                BigInt::zero()
            }
        };
        let mut out = vec![vec![BigInt::zero(); m + 1]; m + 1];
        for i in 1..=m {
            for j in 1..=m {
                let mut acc = BigInt::zero();
                for t in 1..=m {
                    acc += get(a, i, t) * get(b, t, j);
                }
                out[i][j] = acc;
            }
        }
        out
    }

    #[allow(clippy::needless_range_loop)]
    fn assert_matches_dense(product: &UniMatrix, dense: &[Vec<BigInt>]) {
        let m = product.dim() as usize;
        for i in 1..=m {
            for j in 1..=m {
                let expect = &dense[i][j];
                let got = if i <= j {
                    product.get(i as u32, j as u32)
                } else {
                    BigInt::zero()
                };
                assert_eq!(&got, expect, "entry ({i},{j})");
            }
        }
    }

    fn random_matrix(rng: &mut ChaCha8Rng, dim: u32) -> UniMatrix {
        let mut entries = Vec::new();
        for i in 1..=dim {
            for j in (i + 1)..=dim {
                let v: i64 = rng.gen_range(-5..=5);
                if v != 0 {
                    entries.push(((i, j), BigInt::from(v)));
                }
            }
        }
        UniMatrix::from_entries(dim, entries).unwrap()
    }

    #[test]
    fn elementary_products() {
        let a = UniMatrix::elementary(5, 1, 2, 1);
        let b = UniMatrix::elementary(5, 2, 3, 1);
        let prod = a.multiply(&b).unwrap();
        let expect = UniMatrix::from_entries(
            5,
            [
                ((1, 2), BigInt::from(1)),
                ((2, 3), BigInt::from(1)),
                ((1, 3), BigInt::from(1)),
            ],
        )
        .unwrap();
        assert_eq!(prod, expect);

        let id = UniMatrix::identity(5);
        assert_eq!(id.multiply(&a).unwrap(), a);
        assert_eq!(a.multiply(&id).unwrap(), a);
    }

    #[test]
    fn jordan_square_matches_dense_oracle() {
        let j3 = UniMatrix::jordan_block(3);
        let sq = j3.multiply(&j3).unwrap();
        assert_matches_dense(&sq, &dense_mul(&j3, &j3));
        assert_eq!(sq.get(1, 1), BigInt::one());
        assert_eq!(sq.get(1, 2), BigInt::from(2));
        assert_eq!(sq.get(1, 3), BigInt::from(1));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = UniMatrix::identity(3);
        let b = UniMatrix::identity(4);
        assert!(matches!(a.multiply(&b), Err(Error::DimMismatch(3, 4))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(UniMatrix::identity(7).inverse(), UniMatrix::identity(7));

        let e = UniMatrix::elementary(3, 1, 2, 1);
        assert_eq!(e.inverse(), UniMatrix::elementary(3, 1, 2, -1));

        let j3 = UniMatrix::jordan_block(3);
        let inv = j3.inverse();
        let expect = UniMatrix::from_entries(
            3,
            [
                ((1, 2), BigInt::from(-1)),
                ((2, 3), BigInt::from(-1)),
                ((1, 3), BigInt::from(1)),
            ],
        )
        .unwrap();
        assert_eq!(inv, expect);
        assert!(j3.multiply(&inv).unwrap().is_identity());
    }

    #[test]
    fn inverse_round_trip_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let dim = rng.gen_range(1..=8);
            let a = random_matrix(&mut rng, dim);
            let inv = a.inverse();
            assert!(a.multiply(&inv).unwrap().is_identity());
            assert_eq!(inv.inverse(), a);
        }
    }

    #[test]
    fn direct_sum_examples() {
        let i2 = UniMatrix::identity(2);
        let i3 = UniMatrix::identity(3);
        assert_eq!(i2.direct_sum(&i3), UniMatrix::identity(5));

        let j2 = UniMatrix::jordan_block(2);
        let sum = j2.direct_sum(&j2);
        let expect =
            UniMatrix::from_entries(4, [((1, 2), BigInt::one()), ((3, 4), BigInt::one())])
                .unwrap();
        assert_eq!(sum, expect);

        let rep = UniMatrix::identity(1).direct_sum_k(&j2, 3);
        let expect = UniMatrix::from_entries(
            7,
            [
                ((2, 3), BigInt::one()),
                ((4, 5), BigInt::one()),
                ((6, 7), BigInt::one()),
            ],
        )
        .unwrap();
        assert_eq!(rep, expect);
    }

    #[test]
    fn direct_sum_distributes_over_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 4);
            let c = random_matrix(&mut rng, 4);
            let b = random_matrix(&mut rng, 3);
            let d = random_matrix(&mut rng, 3);
            let lhs = a.direct_sum(&b).multiply(&c.direct_sum(&d)).unwrap();
            let rhs = a.multiply(&c).unwrap().direct_sum(&b.multiply(&d).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn jordan_power_closed_form() {
        assert_eq!(UniMatrix::jordan_power(2, 5).get(1, 2), BigInt::from(5));
        assert_eq!(UniMatrix::jordan_power(4, 0), UniMatrix::identity(4));

        let p3 = UniMatrix::jordan_power(4, 3);
        assert_eq!(p3.get(1, 2), BigInt::from(3));
        assert_eq!(p3.get(1, 3), BigInt::from(3));
        assert_eq!(p3.get(1, 4), BigInt::from(1));
    }

    #[test]
    fn jordan_power_matches_repeated_multiplication() {
        for q in 1..=6u32 {
            let j = UniMatrix::jordan_block(q);
            let mut acc = UniMatrix::identity(q);
            for p in 0..=10i64 {
                assert_eq!(UniMatrix::jordan_power(q, p), acc, "q={q} p={p}");
                acc = acc.multiply(&j).unwrap();
            }
        }
    }

    #[test]
    fn jordan_power_negative_exponent() {
        let m = UniMatrix::jordan_power(3, -2);
        assert_eq!(m.get(1, 2), BigInt::from(-2));
        assert_eq!(m.get(1, 3), BigInt::from(3));
        let j3 = UniMatrix::jordan_block(3);
        let j3sq = j3.multiply(&j3).unwrap();
        assert!(j3sq.multiply(&m).unwrap().is_identity());
        assert_eq!(UniMatrix::jordan_block(3).power(-2), m);
    }

    #[test]
    fn power_examples() {
        let e = UniMatrix::elementary(4, 1, 2, 1);
        assert_eq!(e.power(0), UniMatrix::identity(4));
        assert_eq!(e.power(7), UniMatrix::elementary(4, 1, 2, 7));
        assert_eq!(e.power(-3), UniMatrix::elementary(4, 1, 2, -3));
    }

    #[test]
    fn antidiag_reflect_is_an_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 6);
            assert_eq!(a.antidiag_reflect().antidiag_reflect(), a);
        }
    }

    #[test]
    fn antidiag_automorphism_examples() {
        let id = UniMatrix::identity(6);
        assert_eq!(id.antidiag_automorphism(), id);

        // Flipping J3 (+) I3 moves the block to the bottom-right corner and
        // inverts it there: entries (4,5) = -1, (4,6) = 1, (5,6) = -1.
        let b = UniMatrix::jordan_block(3).direct_sum(&UniMatrix::identity(3));
        let phi = b.antidiag_automorphism();
        let expect = UniMatrix::from_entries(
            6,
            [
                ((4, 5), BigInt::from(-1)),
                ((4, 6), BigInt::from(1)),
                ((5, 6), BigInt::from(-1)),
            ],
        )
        .unwrap();
        assert_eq!(phi, expect);
    }

    #[test]
    fn antidiag_automorphism_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let a = random_matrix(&mut rng, 5);
            let b = random_matrix(&mut rng, 5);
            let lhs = a.multiply(&b).unwrap().antidiag_automorphism();
            let rhs = a
                .antidiag_automorphism()
                .multiply(&b.antidiag_automorphism())
                .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn canonical_key_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..30 {
            let dim = rng.gen_range(1..=8);
            let a = random_matrix(&mut rng, dim);
            let key = a.canonical_key();
            let back = UniMatrix::from_canonical_key(&key).unwrap();
            assert_eq!(back, a);
            assert_eq!(back.canonical_key(), key);
        }
        // Distinct matrices give distinct keys.
        let a = UniMatrix::elementary(3, 1, 2, 1);
        let b = UniMatrix::elementary(3, 1, 2, -1);
        assert_ne!(a.canonical_key(), b.canonical_key());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 7);
            let v = a.to_json();
            assert_eq!(UniMatrix::from_json(&v).unwrap(), a);
        }
        let bad = serde_json::json!({"dim": 2, "entries": [[2, 1, "1"]]});
        assert!(UniMatrix::from_json(&bad).is_err());
    }

    #[test]
    fn random_products_match_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..25 {
            let dim = rng.gen_range(2..=8);
            let a = random_matrix(&mut rng, dim);
            let b = random_matrix(&mut rng, dim);
            let prod = a.multiply(&b).unwrap();
            assert_matches_dense(&prod, &dense_mul(&a, &b));
        }
    }
}
