//! Weighted symmetric generating sets and the two-set construction fed to
//! the counting engine.
//!
//! A [`GeneratingSet`] is a symmetric multiset of matrices: each generator
//! carries a positive integer weight (its multiplicity), duplicates merge
//! by adding weights, and the inverse of every generator is present with
//! the same weight.  [`build_st`] assembles the pair `(S, T)` from a
//! compiled gadget: the letters `A_i` at weight 1, `P` and `Q` at weight
//! `u`, the standard elementary generators at weight `u^10`, and - only in
//! `T` - a commuting letter `R` at weight `u^5`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::arith;
use crate::error::{Error, Result};
use crate::gadget::{GadgetLevel, GadgetSet};
use crate::matrix::UniMatrix;

/// A symmetric multiset of generators with multiplicity weights.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratingSet {
    dim: u32,
    label: String,
    u: Option<BigUint>,
    gens: Vec<(UniMatrix, BigUint)>,
}

impl GeneratingSet {
    /// Canonicalizes (merges duplicates, sorts) and validates symmetry:
    /// every generator's inverse must be present with the same weight.
    pub fn new<I>(label: &str, dim: u32, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (UniMatrix, BigUint)>,
    {
        let mut merged: BTreeMap<UniMatrix, BigUint> = BTreeMap::new();
        for (m, w) in pairs {
            if m.dim() != dim {
                return Err(Error::DimMismatch(dim, m.dim()));
            }
            if w.is_zero() {
                continue;
            }
            *merged.entry(m).or_insert_with(BigUint::zero) += w;
        }
        for (m, w) in &merged {
            let inv = m.inverse();
            if merged.get(&inv) != Some(w) {
                return Err(Error::NotSymmetric);
            }
        }
        Ok(GeneratingSet {
            dim,
            label: label.to_string(),
            u: None,
            gens: merged.into_iter().collect(),
        })
    }

    pub fn with_u(mut self, u: BigUint) -> Self {
        self.u = Some(u);
        self
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn u(&self) -> Option<&BigUint> {
        self.u.as_ref()
    }

    /// Distinct generators with their weights, in canonical order.
    pub fn generators(&self) -> &[(UniMatrix, BigUint)] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    /// Sum of all weights (the multiset cardinality `|S|`).
    pub fn total_weight(&self) -> BigUint {
        self.gens.iter().map(|(_, w)| w).sum()
    }

    pub fn weight_of(&self, m: &UniMatrix) -> Option<&BigUint> {
        self.gens
            .binary_search_by(|(g, _)| g.cmp(m))
            .ok()
            .map(|i| &self.gens[i].1)
    }

    /// The set with every generator replaced by its inverse.  Symmetry
    /// makes this equal to the original; kept as an explicit operation so
    /// tests can assert exactly that.
    pub fn inverted(&self) -> GeneratingSet {
        let pairs: Vec<_> = self
            .gens
            .iter()
            .map(|(m, w)| (m.inverse(), w.clone()))
            .collect();
        let mut out = GeneratingSet::new(&self.label, self.dim, pairs)
            .expect("inverting a symmetric set keeps it symmetric");
        out.u = self.u.clone();
        out
    }

    /// Drops every generator whose weight is divisible by `modulus`.
    /// Counting modulo `modulus` over the pruned set agrees with counting
    /// over the full set, because any word using such a letter contributes
    /// a weight divisible by the modulus.
    pub fn prune_by_modulus(&self, modulus: &BigUint) -> Result<GeneratingSet> {
        if *modulus < BigUint::from(2u32) {
            return Err(Error::Json(format!(
                "pruning modulus must be at least 2, got {modulus}"
            )));
        }
        let pairs: Vec<_> = self
            .gens
            .iter()
            .filter(|(_, w)| !(w % modulus).is_zero())
            .map(|(m, w)| (m.clone(), w.clone()))
            .collect();
        let mut out = GeneratingSet::new(&self.label, self.dim, pairs)?;
        out.u = self.u.clone();
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<serde_json::Value> = self
            .gens
            .iter()
            .map(|(m, w)| {
                serde_json::json!({
                    "matrix": m.to_json(),
                    "weight": arith::biguint_to_decimal(w),
                })
            })
            .collect();
        let mut obj = serde_json::json!({
            "dim": self.dim,
            "label": self.label,
            "generators": gens,
        });
        if let Some(u) = &self.u {
            obj.as_object_mut()
                .unwrap()
                .insert("u".into(), arith::biguint_to_decimal(u).into());
        }
        obj
    }

    pub fn from_json(v: &serde_json::Value) -> Result<GeneratingSet> {
        let dim = v
            .get("dim")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Json("generating set needs a \"dim\"".into()))?
            as u32;
        let label = v
            .get("label")
            .and_then(|x| x.as_str())
            .unwrap_or("S")
            .to_string();
        let raw = v
            .get("generators")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Json("generating set needs a \"generators\" array".into()))?;
        let mut pairs = Vec::with_capacity(raw.len());
        for g in raw {
            let m = UniMatrix::from_json(
                g.get("matrix")
                    .ok_or_else(|| Error::Json("generator needs a \"matrix\"".into()))?,
            )?;
            let w = arith::biguint_from_decimal(
                g.get("weight")
                    .and_then(|x| x.as_str())
                    .ok_or_else(|| Error::Json("generator needs a decimal \"weight\"".into()))?,
            )?;
            pairs.push((m, w));
        }
        let mut out = GeneratingSet::new(&label, dim, pairs)?;
        if let Some(u) = v.get("u").and_then(|x| x.as_str()) {
            out.u = Some(arith::biguint_from_decimal(u)?);
        }
        Ok(out)
    }
}

/// The standard generators `I +- E_{i,i+1}` of the unitriangular group.
pub fn standard_generators(dim: u32) -> Vec<UniMatrix> {
    let mut out = Vec::with_capacity(2 * (dim as usize - 1));
    for i in 1..dim {
        out.push(UniMatrix::elementary(dim, i, i + 1, 1));
        out.push(UniMatrix::elementary(dim, i, i + 1, -1));
    }
    out
}

/// The generating-set pair plus the extended gadget it was built from.
#[derive(Clone, Debug)]
pub struct StPair {
    pub s: GeneratingSet,
    pub t: GeneratingSet,
    /// The gadget extended by the 3x3 tail block, with `R` populated.
    pub extended: GadgetSet,
}

/// Builds the pair `(S, T)` from a subword- or charged-level gadget.
///
/// The gadget matrices are extended by a 3x3 tail: `P` gains `I + E_12`,
/// `Q` gains `I + E_23`, every letter is padded by the identity, and
/// `R = I (+) (I - E_13)` commutes with all of them (checked here).  Then
///
/// ```text
/// S = {A-letters at weight 1} + u * {P, Q and inverses}
///                             + u^10 * {standard generators}
/// T = S + u^5 * {R, R^-1}
/// ```
pub fn build_st(g: &GadgetSet, u: &BigUint) -> Result<StPair> {
    if !matches!(g.level, GadgetLevel::Subword | GadgetLevel::Charged) {
        return Err(Error::Level {
            op: "build_st",
            expected: "subword or charged",
            found: g.level.name(),
        });
    }
    if u.is_zero() {
        return Err(Error::Json("the weight parameter u must be positive".into()));
    }
    let m = g.dim;
    let dim = m + 3;

    let tail_p = UniMatrix::elementary(3, 1, 2, 1);
    let tail_q = UniMatrix::elementary(3, 2, 3, 1);
    let tail_r = UniMatrix::elementary(3, 1, 3, -1);

    let mut extended = g.clone();
    extended.dim = dim;
    extended.p = g.p.direct_sum(&tail_p);
    extended.q = g.q.direct_sum(&tail_q);
    extended.r = Some(UniMatrix::identity(m).direct_sum(&tail_r));
    extended.a = g.a.iter().map(|a| a.pad(3)).collect();
    extended.charged = g
        .charged
        .iter()
        .map(|c| crate::gadget::ChargedPair {
            plus: c.plus.pad(3),
            minus: c.minus.pad(3),
        })
        .collect();

    let r = extended.r.clone().unwrap();
    assert!(
        r.commutes_with(&extended.p)? && r.commutes_with(&extended.q)?,
        "R must commute with P and Q"
    );
    for letter in extended.a_letters() {
        assert!(
            r.commutes_with(&letter)?,
            "R must commute with every A-letter"
        );
    }

    let u1 = BigUint::from(1u32);
    let u5 = u.pow(5);
    let u10 = u.pow(10);

    let mut s_pairs: Vec<(UniMatrix, BigUint)> = Vec::new();
    for letter in extended.a_letters() {
        s_pairs.push((letter, u1.clone()));
    }
    for pq in [&extended.p, &extended.q] {
        s_pairs.push((pq.clone(), u.clone()));
        s_pairs.push((pq.inverse(), u.clone()));
    }
    for e in standard_generators(dim) {
        s_pairs.push((e, u10.clone()));
    }

    let mut t_pairs = s_pairs.clone();
    t_pairs.push((r.clone(), u5.clone()));
    t_pairs.push((r.inverse(), u5.clone()));

    let s = GeneratingSet::new("S", dim, s_pairs)?.with_u(u.clone());
    let t = GeneratingSet::new("T", dim, t_pairs)?.with_u(u.clone());
    Ok(StPair { s, t, extended })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::compile_subword;
    use crate::poly::MultiPoly;

    fn st_for(src: &str, u: u32) -> StPair {
        let f = MultiPoly::parse(src).unwrap();
        let g = compile_subword(&f, true).unwrap();
        build_st(&g, &BigUint::from(u)).unwrap()
    }

    #[test]
    fn merges_duplicates_and_checks_symmetry() {
        let a = UniMatrix::elementary(3, 1, 2, 1);
        let b = a.inverse();
        let set = GeneratingSet::new(
            "S",
            3,
            [
                (a.clone(), BigUint::from(2u32)),
                (a.clone(), BigUint::from(3u32)),
                (b.clone(), BigUint::from(5u32)),
            ],
        )
        .unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.weight_of(&a), Some(&BigUint::from(5u32)));
        assert_eq!(set.total_weight(), BigUint::from(10u32));

        assert!(matches!(
            GeneratingSet::new("S", 3, [(a.clone(), BigUint::from(1u32))]),
            Err(Error::NotSymmetric)
        ));
        // Same matrices, different weights: still asymmetric.
        assert!(GeneratingSet::new(
            "S",
            3,
            [(a, BigUint::from(1u32)), (b, BigUint::from(2u32))]
        )
        .is_err());
    }

    #[test]
    fn build_st_weights_and_counts() {
        let st = st_for("x - 2", 16);
        let m = 20u32; // subword gadget size for x - 2
        assert_eq!(st.s.dim(), m + 3);
        // 2k + 4 + 2(m + 2) distinct generators
        assert_eq!(st.s.len(), 2 + 4 + 2 * (m as usize + 2));
        // T adds exactly {R, R^-1} at weight u^5.
        assert_eq!(st.t.len(), st.s.len() + 2);
        let r = st.extended.r.clone().unwrap();
        assert_eq!(st.t.weight_of(&r), Some(&BigUint::from(16u32).pow(5)));
        assert_eq!(st.s.weight_of(&r), None);

        // Every standard generator carries weight u^10.
        let e12 = UniMatrix::elementary(m + 3, 1, 2, 1);
        assert_eq!(st.s.weight_of(&e12), Some(&BigUint::from(16u32).pow(10)));
        // P carries weight u.
        assert_eq!(st.s.weight_of(&st.extended.p), Some(&BigUint::from(16u32)));
        // A-letters carry weight 1.
        assert_eq!(
            st.s.weight_of(&st.extended.a[0]),
            Some(&BigUint::from(1u32))
        );
    }

    #[test]
    fn r_commutes_with_everything() {
        let st = st_for("x - 2", 2);
        let r = st.extended.r.clone().unwrap();
        assert!(r.commutes_with(&st.extended.p).unwrap());
        assert!(r.commutes_with(&st.extended.q).unwrap());
        for letter in st.extended.a_letters() {
            assert!(r.commutes_with(&letter).unwrap());
        }
    }

    #[test]
    fn pruning_keeps_low_weight_letters() {
        let st = st_for("x - 2", 16);
        let modulus = BigUint::from(16u32).pow(10);
        let pruned_s = st.s.prune_by_modulus(&modulus).unwrap();
        // Exactly the A, P, Q letters survive: 2k + 4 of them.
        assert_eq!(pruned_s.len(), 2 + 4);
        let pruned_t = st.t.prune_by_modulus(&modulus).unwrap();
        assert_eq!(pruned_t.len(), 2 + 4 + 2);

        // A modulus not dividing any weight prunes nothing.
        let odd = st.s.prune_by_modulus(&BigUint::from(3u32)).unwrap();
        assert_eq!(odd.len(), st.s.len());
    }

    #[test]
    fn inverted_set_is_identical() {
        let st = st_for("x - 2", 2);
        assert_eq!(st.s.inverted(), st.s);
        assert_eq!(st.t.inverted(), st.t);
    }

    #[test]
    fn json_round_trip() {
        let st = st_for("x - 2", 2);
        let back = GeneratingSet::from_json(&st.t.to_json()).unwrap();
        assert_eq!(back, st.t);
    }

    #[test]
    fn charged_gadget_accepted() {
        let f = MultiPoly::parse("x").unwrap();
        let sub = compile_subword(&f, true).unwrap();
        let charged = crate::gadget::charge_extend(&sub).unwrap();
        let st = build_st(&charged, &BigUint::from(16u32)).unwrap();
        // 4k A-letters (neutral and charged variants of each sign).
        let m = charged.dim;
        assert_eq!(st.s.len(), 4 + 4 + 2 * (m as usize + 2));

        let basic = crate::gadget::compile_basic(&f);
        assert!(matches!(
            build_st(&basic, &BigUint::from(2u32)),
            Err(Error::Level { .. })
        ));
    }
}
