//! Compiles a polynomial into matrix gadgets.
//!
//! The basic gadget produces matrices `P, Q, A_1, ..., A_k` such that for
//! every integer vector `x`, with `A = A_1^{x_1} ... A_k^{x_k}`,
//!
//! ```text
//! P A Q A^-1 P^-1 A Q^-1 A^-1  =  I + f(x) E_{1,c}
//! ```
//!
//! where `c` marks the top-right corner of the basic block.  Each `A_i` is
//! a direct sum of frames, one per multi-index `d` with `|d| <= deg f`,
//! carrying a Jordan block whose powers put the binomial `C(x_i, d_i)` in a
//! known corner; `P` and `Q` pick those corners out and weight them by the
//! binomial-basis coefficients `b_d`.
//!
//! Three extensions refine which words are forced to compute `f`:
//!
//! - the *sync* level quadruples the matrices so a pattern word
//!   `P W1 Q W2 P^-1 W3 Q^-1 W4` evaluates to the identity only if
//!   `W1 = W2^-1 = W3 = W4^-1` as matrices;
//! - the *subword* level appends, per frame, a reversed copy of the Jordan
//!   blocks under the antidiagonal automorphism together with pick-out
//!   corners, forcing each `W_i` to be a sorted power word
//!   `A_1^{x_1} ... A_k^{x_k}`;
//! - the *charged* level adds per-variable 5x5 blocks in which positively
//!   and negatively charged copies of each letter accumulate a net charge
//!   that must cancel part by part.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{BlockDiagonalBuilder, UniMatrix};
use crate::poly::{multi_indices, MultiPoly};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GadgetLevel {
    Basic,
    Sync,
    Subword,
    Charged,
}

impl GadgetLevel {
    pub fn name(self) -> &'static str {
        match self {
            GadgetLevel::Basic => "basic",
            GadgetLevel::Sync => "sync",
            GadgetLevel::Subword => "subword",
            GadgetLevel::Charged => "charged",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(GadgetLevel::Basic),
            "sync" => Ok(GadgetLevel::Sync),
            "subword" => Ok(GadgetLevel::Subword),
            "charged" => Ok(GadgetLevel::Charged),
            other => Err(Error::Json(format!("unknown gadget level {other:?}"))),
        }
    }
}

/// Corner bookkeeping for one frame: the multi-index `d` and the 1-based
/// coordinates `(alpha, beta)` of its top-right entry inside the `A_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockLayout {
    pub d: Vec<u32>,
    pub alpha: u32,
    pub beta: u32,
}

/// Positively and negatively charged variants of one letter pair
/// `(A_j, A_j^-1)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChargedPair {
    pub plus: UniMatrix,
    pub minus: UniMatrix,
}

/// A compiled gadget: the matrices, their level, and the frame layout.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GadgetSet {
    pub level: GadgetLevel,
    pub k: usize,
    pub degree: u32,
    pub dim: u32,
    /// Column of the entry where `f(x)` appears (the basic block corner).
    pub corner_col: u32,
    pub p: UniMatrix,
    pub q: UniMatrix,
    /// Commuting extension letter; present only on generating-set builds.
    pub r: Option<UniMatrix>,
    pub a: Vec<UniMatrix>,
    /// One charged pair per variable at the charged level, empty otherwise.
    pub charged: Vec<ChargedPair>,
    pub layout: Vec<BlockLayout>,
    /// True when a degree-1 polynomial was compiled at subword level.
    pub deg1_allowed: bool,
}

/// The frame matrix for multi-index `d` and variable `i` (1-based): an
/// identity of size `|d| + 1` with the Jordan block `J_{d_i + 1}` placed
/// after the first `d_1 + ... + d_{i-1}` rows.
pub fn basic_block(d: &[u32], i: usize) -> UniMatrix {
    assert!(1 <= i && i <= d.len());
    let frame: u32 = d.iter().sum::<u32>() + 1;
    let pre: u32 = d[..i - 1].iter().sum();
    let entries = (1..=d[i - 1]).map(|r| ((pre + r, pre + r + 1), BigInt::one()));
    UniMatrix::from_entries(frame, entries).expect("superdiagonal entries")
}

/// Strictly-upper positions of the `|d| + 1` frame lying outside the
/// row-and-column span of every reversed Jordan block, in ascending order.
/// These are the entries the subword level pins to zero.
pub fn outside_positions(d: &[u32]) -> Vec<(u32, u32)> {
    let frame: u32 = d.iter().sum::<u32>() + 1;
    let mut spans = Vec::with_capacity(d.len());
    let mut pre = 0u32;
    for &di in d {
        // Original block spans pre+1 ..= pre+di+1; reflect across the
        // antidiagonal of the frame.
        spans.push((frame - pre - di, frame - pre));
        pre += di;
    }
    let mut out = Vec::new();
    for alpha in 1..frame {
        for beta in (alpha + 1)..=frame {
            let covered = spans.iter().any(|&(lo, hi)| alpha >= lo && beta <= hi);
            if !covered {
                out.push((alpha, beta));
            }
        }
    }
    out
}

/// Builds the basic gadget.  The constructed size is
/// `m = 2 + sum_{|d| <= D} (|d| + 1) <= (D + 1) C(D + k, k) + 2`.
pub fn compile_basic(f: &MultiPoly) -> GadgetSet {
    let k = f.k();
    let deg = f.degree();
    let binom = f.to_binomial_basis();
    let ds = multi_indices(k, deg);

    let mut layout = Vec::with_capacity(ds.len());
    let mut offset = 1u32; // leading 1x1 identity frame
    for d in &ds {
        let size: u32 = d.iter().sum::<u32>() + 1;
        layout.push(BlockLayout {
            d: d.clone(),
            alpha: offset + 1,
            beta: offset + size,
        });
        offset += size;
    }
    let dim = offset + 1; // trailing 1x1 identity frame

    let mut a = Vec::with_capacity(k);
    for i in 1..=k {
        let mut builder = BlockDiagonalBuilder::new();
        builder.push_identity(1);
        for d in &ds {
            builder.push(&basic_block(d, i));
        }
        builder.push_identity(1);
        let ai = builder.finish();
        debug_assert_eq!(ai.dim(), dim);
        a.push(ai);
    }

    let mut p_entries = Vec::new();
    let mut q_entries = Vec::new();
    for entry in &layout {
        p_entries.push(((1, entry.alpha), BigInt::one()));
        let b = binom.coeff(&entry.d);
        if !b.is_zero() {
            q_entries.push(((entry.beta, dim), b));
        }
    }
    let p = UniMatrix::from_entries(dim, p_entries).expect("valid corners");
    let q = UniMatrix::from_entries(dim, q_entries).expect("valid corners");

    GadgetSet {
        level: GadgetLevel::Basic,
        k,
        degree: deg,
        dim,
        corner_col: dim,
        p,
        q,
        r: None,
        a,
        charged: Vec::new(),
        layout,
        deg1_allowed: false,
    }
}

/// Extends the basic gadget to the sync level: four diagonal copies with
/// coupling blocks in `P` and `Q` so that pattern words evaluate to the
/// identity only when `W1 = W2^-1 = W3 = W4^-1`.
pub fn compile_sync(f: &MultiPoly) -> GadgetSet {
    let basic = compile_basic(f);
    let m = basic.dim;
    let dim = 4 * m;

    // The coupling blocks sit on rows/columns disjoint from the basic
    // entries, so they can be written directly.
    let couple = |base: &UniMatrix, row_block: u32| -> UniMatrix {
        let mut entries: Vec<((u32, u32), BigInt)> =
            base.iter().map(|(&(i, j), v)| ((i, j), v.clone())).collect();
        for t in 1..=m {
            entries.push(((row_block * m + t, 3 * m + t), BigInt::one()));
        }
        UniMatrix::from_entries(dim, entries).expect("disjoint blocks")
    };
    let p = couple(&basic.p, 1);
    let q = couple(&basic.q, 2);

    let a = basic
        .a
        .iter()
        .map(|ai| ai.direct_sum(&UniMatrix::identity(2 * m)).direct_sum(ai))
        .collect();

    GadgetSet {
        level: GadgetLevel::Sync,
        dim,
        p,
        q,
        a,
        ..basic
    }
}

/// Extends the sync gadget to the subword level.  For each frame `d` and
/// each strictly-upper position outside the reversed Jordan blocks, a
/// component of size `|d| + 3` is appended: `P` gains a pick-out row
/// entry, `Q` a pick-out column entry, and each `A_i` the reversed block
/// under the antidiagonal automorphism.
///
/// Degree 0 is rejected; degree 1 is accepted only with `allow_deg1`
/// (recorded in the output), since nothing forces letter order below
/// degree 2.
pub fn compile_subword(f: &MultiPoly, allow_deg1: bool) -> Result<GadgetSet> {
    let deg = f.degree();
    if deg == 0 || (deg == 1 && !allow_deg1) {
        return Err(Error::DegreeTooLow(deg));
    }

    let sync = compile_sync(f);
    let k = sync.k;
    let mut pb = BlockDiagonalBuilder::new();
    let mut qb = BlockDiagonalBuilder::new();
    pb.push(&sync.p);
    qb.push(&sync.q);
    let mut ab: Vec<BlockDiagonalBuilder> = sync
        .a
        .iter()
        .map(|ai| {
            let mut b = BlockDiagonalBuilder::new();
            b.push(ai);
            b
        })
        .collect();

    for entry in &sync.layout {
        let frame: u32 = entry.d.iter().sum::<u32>() + 1;
        let reversed: Vec<UniMatrix> = (1..=k)
            .map(|i| {
                UniMatrix::identity(1)
                    .direct_sum(&basic_block(&entry.d, i).antidiag_automorphism())
                    .direct_sum(&UniMatrix::identity(1))
            })
            .collect();
        for (alpha, beta) in outside_positions(&entry.d) {
            let comp = frame + 2;
            // The pick-out identity needs 1 < a <= b < comp; alpha < beta
            // within the frame guarantees it after the shift by one.
            debug_assert!(alpha + 1 > 1 && beta + 1 < comp);
            pb.push(&UniMatrix::elementary(comp, 1, alpha + 1, 1));
            qb.push(&UniMatrix::elementary(comp, beta + 1, comp, 1));
            for (builder, rev) in ab.iter_mut().zip(&reversed) {
                builder.push(rev);
            }
        }
    }

    let p = pb.finish();
    let q = qb.finish();
    let a: Vec<UniMatrix> = ab.into_iter().map(|b| b.finish()).collect();
    let dim = p.dim();
    Ok(GadgetSet {
        level: GadgetLevel::Subword,
        dim,
        p,
        q,
        a,
        deg1_allowed: deg == 1,
        ..sync
    })
}

/// Adds the charged apparatus to a subword-level gadget: `P` and `Q` gain
/// `k` copies of fixed 5x5 blocks, and each letter acquires charged
/// variants writing `+1`/`-1` into its own block.  A pattern word over the
/// charged alphabet evaluates to the identity only if its uncharged
/// projection does and every part has net charge zero in every variable.
pub fn charge_extend(g: &GadgetSet) -> Result<GadgetSet> {
    if g.level != GadgetLevel::Subword {
        return Err(Error::Level {
            op: "charge_extend",
            expected: "subword",
            found: g.level.name(),
        });
    }
    let k = g.k;
    let dim = g.dim + 5 * k as u32;

    let p_block = UniMatrix::elementary(5, 1, 3, 1);
    let q_block =
        UniMatrix::from_entries(5, [((2, 3), BigInt::one()), ((4, 5), BigInt::one())])
            .expect("valid entries");
    let charge_block = UniMatrix::elementary(5, 3, 4, 1);

    let p = g.p.direct_sum_k(&p_block, k);
    let q = g.q.direct_sum_k(&q_block, k);

    let mut a = Vec::with_capacity(k);
    let mut charged = Vec::with_capacity(k);
    for (j, aj) in g.a.iter().enumerate() {
        let neutral = aj.pad(5 * k as u32);
        let plus = aj
            .pad(5 * j as u32)
            .direct_sum(&charge_block)
            .pad(5 * (k - 1 - j) as u32);
        let minus = plus.inverse();
        a.push(neutral);
        charged.push(ChargedPair { plus, minus });
    }

    Ok(GadgetSet {
        level: GadgetLevel::Charged,
        dim,
        p,
        q,
        a,
        charged,
        ..g.clone()
    })
}

impl GadgetSet {
    /// The letters pattern-word gaps range over: `A_i` and its inverse,
    /// plus the charged variants at the charged level.
    pub fn a_letters(&self) -> Vec<UniMatrix> {
        let mut out = Vec::new();
        for ai in &self.a {
            out.push(ai.clone());
            out.push(ai.inverse());
        }
        for pair in &self.charged {
            out.push(pair.plus.clone());
            out.push(pair.minus.clone());
        }
        out
    }

    /// Net exponent contributed by the letter at `index` in
    /// [`Self::a_letters`] order, as `(variable, +-1)`.
    pub fn letter_exponent(&self, index: usize) -> (usize, i64) {
        let var = (index / 2) % self.k;
        let sign = if index.is_multiple_of(2) { 1 } else { -1 };
        (var, sign)
    }

    /// True when the letter at `index` is a charged variant.
    pub fn letter_is_charged(&self, index: usize) -> bool {
        index >= 2 * self.a.len()
    }

    /// The sorted power word `A_1^{x_1} ... A_k^{x_k}`.
    pub fn power_word(&self, x: &[i64]) -> Result<UniMatrix> {
        if x.len() != self.k {
            return Err(Error::Arity {
                expected: self.k,
                got: x.len(),
            });
        }
        let mut acc = UniMatrix::identity(self.dim);
        for (ai, &xi) in self.a.iter().zip(x) {
            acc = acc.multiply(&ai.power(xi))?;
        }
        Ok(acc)
    }

    /// Evaluates the pattern `P W1 Q W2 P^-1 W3 Q^-1 W4`.
    pub fn pattern_product(&self, w: &[UniMatrix; 4]) -> Result<UniMatrix> {
        let mut acc = self.p.multiply(&w[0])?;
        acc = acc.multiply(&self.q)?;
        acc = acc.multiply(&w[1])?;
        acc = acc.multiply(&self.p.inverse())?;
        acc = acc.multiply(&w[2])?;
        acc = acc.multiply(&self.q.inverse())?;
        acc.multiply(&w[3])
    }

    /// The eight-factor product at the point `x`, using coherent powers
    /// `W1 = W3 = A^x` and `W2 = W4 = A^{-x}`.
    pub fn product_at(&self, x: &[i64]) -> Result<UniMatrix> {
        let fwd = self.power_word(x)?;
        let bwd = fwd.inverse();
        self.pattern_product(&[fwd.clone(), bwd.clone(), fwd, bwd])
    }

    /// The matrix the eight-factor product must equal at `x`, namely
    /// `I + f(x) E_{1,c}` with `c` the basic corner column.
    pub fn expected_at(&self, f: &MultiPoly, x: &[i64]) -> Result<UniMatrix> {
        let val = f.eval_i64(x)?;
        Ok(
            UniMatrix::from_entries(self.dim, [((1, self.corner_col), val)])
                .expect("corner inside matrix"),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let layout: Vec<serde_json::Value> = self
            .layout
            .iter()
            .map(|b| serde_json::json!({ "d": b.d, "alpha": b.alpha, "beta": b.beta }))
            .collect();
        let mut obj = serde_json::json!({
            "level": self.level.name(),
            "k": self.k,
            "degree": self.degree,
            "dim": self.dim,
            "corner_col": self.corner_col,
            "deg1_allowed": self.deg1_allowed,
            "P": self.p.to_json(),
            "Q": self.q.to_json(),
            "A": self.a.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
            "layout": layout,
        });
        let map = obj.as_object_mut().unwrap();
        if let Some(r) = &self.r {
            map.insert("R".into(), r.to_json());
        }
        if !self.charged.is_empty() {
            map.insert(
                "charged".into(),
                serde_json::Value::Array(
                    self.charged
                        .iter()
                        .map(|c| {
                            serde_json::json!({
                                "plus": c.plus.to_json(),
                                "minus": c.minus.to_json(),
                            })
                        })
                        .collect(),
                ),
            );
        }
        obj
    }

    pub fn from_json(v: &serde_json::Value) -> Result<GadgetSet> {
        let get = |name: &str| -> Result<&serde_json::Value> {
            v.get(name)
                .ok_or_else(|| Error::Json(format!("gadget is missing {name:?}")))
        };
        let as_u64 = |name: &str| -> Result<u64> {
            get(name)?
                .as_u64()
                .ok_or_else(|| Error::Json(format!("gadget {name:?} must be an integer")))
        };
        let level = GadgetLevel::from_name(
            get("level")?
                .as_str()
                .ok_or_else(|| Error::Json("gadget level must be a string".into()))?,
        )?;
        let k = as_u64("k")? as usize;
        let degree = as_u64("degree")? as u32;
        let dim = as_u64("dim")? as u32;
        let corner_col = as_u64("corner_col")? as u32;
        let deg1_allowed = v
            .get("deg1_allowed")
            .and_then(|x| x.as_bool())
            .unwrap_or(false);
        let p = UniMatrix::from_json(get("P")?)?;
        let q = UniMatrix::from_json(get("Q")?)?;
        let r = match v.get("R") {
            Some(rv) => Some(UniMatrix::from_json(rv)?),
            None => None,
        };
        let a = get("A")?
            .as_array()
            .ok_or_else(|| Error::Json("gadget A must be an array".into()))?
            .iter()
            .map(UniMatrix::from_json)
            .collect::<Result<Vec<_>>>()?;
        let charged = match v.get("charged") {
            Some(arr) => arr
                .as_array()
                .ok_or_else(|| Error::Json("gadget charged must be an array".into()))?
                .iter()
                .map(|c| {
                    Ok(ChargedPair {
                        plus: UniMatrix::from_json(
                            c.get("plus")
                                .ok_or_else(|| Error::Json("charged pair missing plus".into()))?,
                        )?,
                        minus: UniMatrix::from_json(
                            c.get("minus")
                                .ok_or_else(|| Error::Json("charged pair missing minus".into()))?,
                        )?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let layout = get("layout")?
            .as_array()
            .ok_or_else(|| Error::Json("gadget layout must be an array".into()))?
            .iter()
            .map(|b| {
                let d = b
                    .get("d")
                    .and_then(|x| x.as_array())
                    .ok_or_else(|| Error::Json("layout entry needs d".into()))?
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|v| v as u32)
                            .ok_or_else(|| Error::Json("layout d must be integers".into()))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                let alpha = b
                    .get("alpha")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::Json("layout entry needs alpha".into()))?
                    as u32;
                let beta = b
                    .get("beta")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::Json("layout entry needs beta".into()))?
                    as u32;
                Ok(BlockLayout { d, alpha, beta })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GadgetSet {
            level,
            k,
            degree,
            dim,
            corner_col,
            p,
            q,
            r,
            a,
            charged,
            layout,
            deg1_allowed,
        })
    }
}

/// Result of checking the eight-factor identity over a box of points.
#[derive(Debug)]
pub struct GadgetCheck {
    pub level: GadgetLevel,
    pub dim: u32,
    pub points_checked: u64,
    pub failures: Vec<Vec<i64>>,
}

/// Checks `product_at(x) == I + f(x) E_{1,c}` for every `x` in
/// `[-B, B]^k`.  All comparisons are exact.
pub fn verify_gadget_identity(g: &GadgetSet, f: &MultiPoly, bound: u64) -> Result<GadgetCheck> {
    let k = g.k;
    let b = bound as i64;
    let side = (2 * bound + 1) as u128;
    let mut points: u128 = 1;
    for _ in 0..k {
        points = points.saturating_mul(side);
        if points > 1_000_000 {
            return Err(Error::BoxTooLarge {
                side: 2 * bound + 1,
                vars: k,
                points,
                limit: 1_000_000,
            });
        }
    }

    let mut failures = Vec::new();
    let mut checked = 0u64;
    let mut x = vec![-b; k];
    'outer: loop {
        let got = g.product_at(&x)?;
        let expect = g.expected_at(f, &x)?;
        checked += 1;
        if got != expect {
            failures.push(x.clone());
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            if x[pos] < b {
                x[pos] += 1;
                for slot in x.iter_mut().skip(pos + 1) {
                    *slot = -b;
                }
                break;
            }
        }
    }
    Ok(GadgetCheck {
        level: g.level,
        dim: g.dim,
        points_checked: checked,
        failures,
    })
}

/// The three size bounds for a degree-`D`, `k`-variable build.  The
/// subword bound can be half-integral and is reported both as an exact
/// rational and as its ceiling.
#[derive(Debug, Clone)]
pub struct SizeReport {
    pub degree: u32,
    pub k: u32,
    pub basic: BigUint,
    pub sync: BigUint,
    pub subword_exact: BigRational,
    pub subword_ceil: BigUint,
}

pub fn size_report(degree: u32, k: u32) -> SizeReport {
    assert!(degree >= 1 && k >= 1);
    let choose = crate::arith::binomial_u64((degree + k) as u64, k as u64);
    let d1 = BigUint::from(degree + 1);
    let basic = &d1 * &choose + BigUint::from(2u32);
    let sync = BigUint::from(4u32) * &d1 * &choose + BigUint::from(8u32);
    // sync + C(D+k,k) (D+1)^3 / 2, kept exact over denominator 2
    let numerator = BigInt::from(2u32) * BigInt::from(sync.clone())
        + BigInt::from(choose) * BigInt::from(degree + 1).pow(3);
    let subword_exact = BigRational::new(numerator.clone(), BigInt::from(2));
    let subword_ceil = ((numerator + BigInt::one()) / BigInt::from(2))
        .to_biguint()
        .expect("positive bound");
    SizeReport {
        degree,
        k,
        basic,
        sync,
        subword_exact,
        subword_ceil,
    }
}

impl SizeReport {
    /// Bound for the gadget level actually constructed.  The charged
    /// extension adds `5k` on top of the subword bound.
    pub fn for_level(&self, level: GadgetLevel) -> BigRational {
        match level {
            GadgetLevel::Basic => BigRational::from_integer(BigInt::from(self.basic.clone())),
            GadgetLevel::Sync => BigRational::from_integer(BigInt::from(self.sync.clone())),
            GadgetLevel::Subword => self.subword_exact.clone(),
            GadgetLevel::Charged => {
                self.subword_exact.clone() + BigRational::from_integer(BigInt::from(5 * self.k))
            }
        }
    }
}
