//! Multivariate integer polynomials, the binomial-basis conversion, the
//! root-separation transform, and brute-force root search.
//!
//! A polynomial is stored as a table from exponent multi-indices to nonzero
//! big-integer coefficients.  The binomial basis writes
//! `f(x) = sum_d b_d * C(x, d)` over multi-indices `d` of total degree at
//! most `deg f`, where `C(x, d)` is the product of componentwise binomial
//! coefficients; it is what the gadget compiler consumes.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith;
use crate::error::{Error, Result};

const BOX_POINT_LIMIT: u128 = 100_000_000;

/// A polynomial in `Z[x_1, ..., x_k]` with nonzero stored coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiPoly {
    k: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

/// The coefficients `b_d` of a polynomial in the binomial basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BinomialForm {
    k: usize,
    coeffs: BTreeMap<Vec<u32>, BigInt>,
}

impl MultiPoly {
    pub fn zero(k: usize) -> Self {
        assert!(k >= 1, "polynomials have at least one variable");
        MultiPoly {
            k,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(k: usize, c: impl Into<BigInt>) -> Self {
        let mut p = MultiPoly::zero(k);
        p.add_term(&vec![0; k], &c.into());
        p
    }

    /// The variable `x_i` (1-based) as a polynomial in `k` variables.
    pub fn variable(k: usize, i: usize) -> Self {
        assert!(1 <= i && i <= k);
        let mut exp = vec![0u32; k];
        exp[i - 1] = 1;
        let mut p = MultiPoly::zero(k);
        p.add_term(&exp, &BigInt::one());
        p
    }

    pub fn from_terms<I>(k: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut p = MultiPoly::zero(k);
        for (exp, coeff) in terms {
            if exp.len() != k {
                return Err(Error::Arity {
                    expected: k,
                    got: exp.len(),
                });
            }
            p.add_term(&exp, &coeff);
        }
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial reports degree 0.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|d| d.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exp: &[u32]) -> BigInt {
        self.terms.get(exp).cloned().unwrap_or_else(BigInt::zero)
    }

    fn add_term(&mut self, exp: &[u32], coeff: &BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(exp) {
            Some(c) => {
                *c += coeff;
                if c.is_zero() {
                    self.terms.remove(exp);
                }
            }
            None => {
                self.terms.insert(exp.to_vec(), coeff.clone());
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.k, other.k);
        let mut out = self.clone();
        for (exp, c) in &other.terms {
            out.add_term(exp, c);
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            k: self.k,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.k, other.k);
        let mut out = MultiPoly::zero(self.k);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(&exp, &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut out = MultiPoly::constant(self.k, 1);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Scales coefficients by an integer.
    pub fn scale(&self, c: impl Into<BigInt>) -> MultiPoly {
        let c = c.into();
        let mut out = MultiPoly::zero(self.k);
        for (e, v) in &self.terms {
            out.add_term(e, &(v * &c));
        }
        out
    }

    /// Reinterprets the polynomial in `new_k >= k` variables.
    pub fn extend_vars(&self, new_k: usize) -> MultiPoly {
        assert!(new_k >= self.k);
        let mut out = MultiPoly::zero(new_k);
        for (e, c) in &self.terms {
            let mut exp = e.clone();
            exp.resize(new_k, 0);
            out.add_term(&exp, c);
        }
        out
    }

    /// Exact evaluation at an integer point.
    pub fn eval(&self, x: &[BigInt]) -> Result<BigInt> {
        if x.len() != self.k {
            return Err(Error::Arity {
                expected: self.k,
                got: x.len(),
            });
        }
        let mut acc = BigInt::zero();
        for (exp, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (xi, &di) in x.iter().zip(exp) {
                term *= xi.pow(di);
            }
            acc += term;
        }
        Ok(acc)
    }

    pub fn eval_i64(&self, x: &[i64]) -> Result<BigInt> {
        let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.eval(&xs)
    }

    /// Converts to the binomial basis.  The coefficient at `d` is the
    /// iterated forward difference of `f` at the origin,
    /// `b_d = sum_{e <= d} (-1)^{|d - e|} C(d, e) f(e)`.
    pub fn to_binomial_basis(&self) -> BinomialForm {
        let deg = self.degree();
        let mut coeffs = BTreeMap::new();
        for d in multi_indices(self.k, deg) {
            let mut b = BigInt::zero();
            for e in sub_indices(&d) {
                let fe = self
                    .eval(&e.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>())
                    .expect("arity matches by construction");
                let parity: u32 = d.iter().zip(&e).map(|(a, b)| a - b).sum();
                let mut weight = BigInt::one();
                for (&di, &ei) in d.iter().zip(&e) {
                    weight *= arith::binomial_i64(di as i64, ei as u64);
                }
                let term = weight * fe;
                if parity.is_multiple_of(2) {
                    b += term;
                } else {
                    b -= term;
                }
            }
            if !b.is_zero() {
                coeffs.insert(d, b);
            }
        }
        BinomialForm { k: self.k, coeffs }
    }

    /// JSON interchange form:
    /// `{"k": k, "terms": [{"exp": [d1, ..., dk], "coeff": "decimal"}, ...]}`
    /// with terms sorted by exponent.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(e, c)| serde_json::json!({ "exp": e, "coeff": arith::to_decimal(c) }))
            .collect();
        serde_json::json!({ "k": self.k, "terms": terms })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<MultiPoly> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Json("polynomial must be a JSON object".into()))?;
        let k = obj
            .get("k")
            .and_then(|x| x.as_u64())
            .ok_or_else(|| Error::Json("polynomial needs a positive \"k\"".into()))?
            as usize;
        if k == 0 {
            return Err(Error::Json("polynomial needs k >= 1".into()));
        }
        let raw = obj
            .get("terms")
            .and_then(|x| x.as_array())
            .ok_or_else(|| Error::Json("polynomial needs a \"terms\" array".into()))?;
        let mut terms = Vec::with_capacity(raw.len());
        for t in raw {
            let exp: Vec<u32> = t
                .get("exp")
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::Json("term needs an \"exp\" array".into()))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|v| v as u32)
                        .ok_or_else(|| Error::Json("exponents must be nonnegative integers".into()))
                })
                .collect::<Result<_>>()?;
            let coeff = t
                .get("coeff")
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::Json("term needs a decimal-string \"coeff\"".into()))?;
            terms.push((exp, arith::from_decimal(coeff)?));
        }
        MultiPoly::from_terms(k, terms)
    }

    /// Parses expressions like `x1^2 - 13*x2^2 - 1`; `x` is a synonym for
    /// `x1`, and the variable count is the largest index mentioned.
    pub fn parse(input: &str) -> Result<MultiPoly> {
        parse_poly_literal(input)
    }
}

impl BinomialForm {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, d: &[u32]) -> BigInt {
        self.coeffs.get(d).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn degree(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|d| d.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Evaluates `sum_d b_d * C(x, d)` directly.
    pub fn eval(&self, x: &[BigInt]) -> Result<BigInt> {
        if x.len() != self.k {
            return Err(Error::Arity {
                expected: self.k,
                got: x.len(),
            });
        }
        let mut acc = BigInt::zero();
        for (d, b) in &self.coeffs {
            acc += b * multi_binomial(x, d);
        }
        Ok(acc)
    }

    /// Expands `sum_d b_d * C(x, d)` back into the monomial basis.  The
    /// intermediate coefficients are rational; the result is asserted to be
    /// integral, which holds for any form produced from an integer
    /// polynomial.
    pub fn to_monomial_basis(&self) -> MultiPoly {
        let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
        for (d, b) in &self.coeffs {
            let expanded = multi_binomial_poly(self.k, d);
            let scale = BigRational::from_integer(b.clone());
            for (exp, c) in expanded {
                let entry = acc.entry(exp).or_insert_with(BigRational::zero);
                *entry += c * &scale;
            }
        }
        let mut terms = Vec::new();
        for (exp, c) in acc {
            if c.is_zero() {
                continue;
            }
            assert!(
                c.denom().is_one(),
                "binomial-basis expansion of an integer polynomial must be integral"
            );
            terms.push((exp, c.numer().clone()));
        }
        MultiPoly::from_terms(self.k, terms).expect("arity matches")
    }
}

/// The product of componentwise binomial coefficients
/// `C(x, d) = C(x_1, d_1) ... C(x_k, d_k)`, with the generalized binomial
/// for negative coordinates.
pub fn multi_binomial(x: &[BigInt], d: &[u32]) -> BigInt {
    assert_eq!(x.len(), d.len(), "multi-index arity mismatch");
    let mut acc = BigInt::one();
    for (xi, &di) in x.iter().zip(d) {
        if acc.is_zero() {
            break;
        }
        acc *= arith::binomial(xi, di as u64);
    }
    acc
}

/// All multi-indices `d` in `N^k` with `|d| <= max_total`, in graded
/// lexicographic order (by total degree, then lexicographic).  This is the
/// block enumeration order used by the gadget compiler.
pub fn multi_indices(k: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=max_total {
        let mut stack = vec![(Vec::new(), total)];
        while let Some((prefix, rest)) = stack.pop() {
            if prefix.len() == k - 1 {
                let mut d = prefix.clone();
                d.push(rest);
                out.push(d);
                continue;
            }
            // Descending push so the ascending-lex order pops first.
            for v in (0..=rest).rev() {
                let mut p = prefix.clone();
                p.push(v);
                stack.push((p, rest - v));
            }
        }
    }
    out
}

/// All `e` with `0 <= e <= d` componentwise.
fn sub_indices(d: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &di in d {
        let mut next = Vec::with_capacity(out.len() * (di as usize + 1));
        for prefix in &out {
            for v in 0..=di {
                let mut e = prefix.clone();
                e.push(v);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

/// `C(x, n)` for a single variable as a rational-coefficient monomial table.
fn binomial_poly_univariate(n: u32) -> Vec<BigRational> {
    // coeffs[j] is the coefficient of x^j in x(x-1)...(x-n+1)/n!
    let mut coeffs = vec![BigRational::one()];
    for t in 0..n {
        let shift = BigRational::from_integer(BigInt::from(t));
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * &shift;
        }
        coeffs = next;
    }
    let fact = BigRational::from_integer((1..=n as u64).map(BigInt::from).product::<BigInt>()
        .max(BigInt::one()));
    coeffs.into_iter().map(|c| c / &fact).collect()
}

/// `C(x, d)` over all `k` variables as a rational-coefficient term table.
fn multi_binomial_poly(k: usize, d: &[u32]) -> Vec<(Vec<u32>, BigRational)> {
    let mut acc: Vec<(Vec<u32>, BigRational)> = vec![(Vec::new(), BigRational::one())];
    for &di in d {
        let uni = binomial_poly_univariate(di);
        let mut next = Vec::with_capacity(acc.len() * uni.len());
        for (exp, c) in &acc {
            for (j, cj) in uni.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let mut e = exp.clone();
                e.push(j as u32);
                next.push((e, c * cj));
            }
        }
        acc = next;
    }
    debug_assert!(acc.iter().all(|(e, _)| e.len() == k));
    acc
}

/// The root-separation transform.  Adds one variable so that the integer
/// roots of the output correspond bijectively to those of the input, all
/// have even l1 norm, and have pairwise distinct l1 norms.
///
/// With `v = 4(y_1^2 + ... + y_k^2 + 1)` the output is
/// `g(y)^2 + (-y_{k+1} + v^{k+3} + sum_i y_i v^{i+1} + sum_i y_i)^2`,
/// expanded to monomial form.
pub fn separate(g: &MultiPoly) -> MultiPoly {
    let k = g.k();
    let kk = k + 1;
    let g_lift = g.extend_vars(kk);

    let mut v = MultiPoly::constant(kk, 1);
    for i in 1..=k {
        v = v.add(&MultiPoly::variable(kk, i).pow(2));
    }
    let v = v.scale(4);

    let mut inner = MultiPoly::variable(kk, kk).neg();
    inner = inner.add(&v.pow(k as u32 + 3));
    for i in 1..=k {
        let yi = MultiPoly::variable(kk, i);
        inner = inner.add(&yi.mul(&v.pow(i as u32 + 1)));
        inner = inner.add(&yi);
    }

    g_lift.pow(2).add(&inner.pow(2))
}

/// The last coordinate forced on a root of [`separate`]'s output: given a
/// root `y` of `g`, the unique `y_{k+1}` making the separated polynomial
/// vanish at `(y, y_{k+1})`.
pub fn separation_forced_coordinate(y: &[BigInt]) -> BigInt {
    let k = y.len();
    let mut v = BigInt::one();
    for yi in y {
        v += yi * yi;
    }
    v *= 4;
    let mut out = v.pow(k as u32 + 3);
    for (i, yi) in y.iter().enumerate() {
        out += yi * v.pow(i as u32 + 2);
        out += yi;
    }
    out
}

/// All integer roots of `f` in the box `[-B, B]^k`, sorted by l1 norm and
/// then lexicographically.  Errors when the box holds more than 10^8 points.
pub fn root_search_box(f: &MultiPoly, bound: u64) -> Result<Vec<Vec<BigInt>>> {
    let k = f.k();
    let side = 2 * bound + 1;
    let mut points: u128 = 1;
    for _ in 0..k {
        points = points.saturating_mul(side as u128);
        if points > BOX_POINT_LIMIT {
            return Err(Error::BoxTooLarge {
                side,
                vars: k,
                points,
                limit: BOX_POINT_LIMIT,
            });
        }
    }

    let b = bound as i64;
    let mut roots = Vec::new();
    let mut x = vec![-b; k];
    loop {
        if f.eval_i64(&x)?.is_zero() {
            roots.push(x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
        }
        // odometer increment
        let mut pos = k;
        loop {
            if pos == 0 {
                let mut sorted = roots;
                sorted.sort_by_key(|r| (arith::l1_norm(r), r.clone()));
                return Ok(sorted);
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
}

/// Evidence that [`separate`] behaves as promised on a toy polynomial whose
/// roots all lie in `[-B, B]^k`: the lifted roots (with the forced last
/// coordinate), plus the evenness / distinct-norm / degree-bound facts.
#[derive(Debug)]
pub struct SeparationReport {
    pub base_roots: Vec<Vec<BigInt>>,
    pub lifted_roots: Vec<Vec<BigInt>>,
    pub lifted_norms: Vec<BigUint>,
    pub all_norms_even: bool,
    pub norms_distinct: bool,
    pub separated_degree: u32,
    pub degree_bound: u32,
}

pub fn separation_report(g: &MultiPoly, bound: u64) -> Result<SeparationReport> {
    let g_sep = separate(g);
    let base_roots = root_search_box(g, bound)?;
    let mut lifted_roots = Vec::new();
    let mut lifted_norms = Vec::new();
    for root in &base_roots {
        let last = separation_forced_coordinate(root);
        let mut lifted = root.clone();
        lifted.push(last);
        debug_assert!(g_sep.eval(&lifted).map(|v| v.is_zero()).unwrap_or(false));
        lifted_norms.push(arith::l1_norm(&lifted));
        lifted_roots.push(lifted);
    }
    let all_norms_even = lifted_norms
        .iter()
        .all(|n| (n % 2u32) == BigUint::zero());
    let mut sorted = lifted_norms.clone();
    sorted.sort();
    sorted.dedup();
    let norms_distinct = sorted.len() == lifted_norms.len();
    let degree_bound = (2 * g.degree()).max(4 * g.k() as u32 + 12);
    Ok(SeparationReport {
        base_roots,
        lifted_roots,
        lifted_norms,
        all_norms_even,
        norms_distinct,
        separated_degree: g_sep.degree(),
        degree_bound,
    })
}

/// Numeric check of the inequality
/// `(2 + v^{k+1}) * v / 4 <= v^{k+3} - (v-1)^{k+3}`
/// that the separation argument relies on; returns the `(k, v)` pairs where
/// it fails (expected none on the scanned grid).
pub fn separation_inequality_failures(max_k: usize, max_v: u64) -> Vec<(usize, u64)> {
    let mut failures = Vec::new();
    for k in 1..=max_k {
        let e = k as u32 + 3;
        let mut v = 4u64;
        while v <= max_v {
            let vb = BigInt::from(v);
            let lhs = (BigInt::from(2) + vb.pow(e - 2)) * &vb / 4;
            let rhs = vb.pow(e) - (&vb - BigInt::one()).pow(e);
            if lhs > rhs {
                failures.push((k, v));
            }
            v += 4;
        }
    }
    failures
}

/// Recursive-descent parser for polynomial literals.
///
/// Grammar: integer coefficients, variables `x1..xk` (with `x` meaning
/// `x1`), `+`, `-`, `*`, `^` with nonnegative integer exponents, and
/// parentheses.  Reports the byte offset of the first error.
fn parse_poly_literal(input: &str) -> Result<MultiPoly> {
    struct Parser<'a> {
        bytes: &'a [u8],
        pos: usize,
        max_var: usize,
    }

    type Terms = Vec<(BTreeMap<usize, u32>, BigInt)>;

    impl<'a> Parser<'a> {
        fn err<T>(&self, msg: &str) -> Result<T> {
            Err(Error::Parse {
                offset: self.pos,
                msg: msg.to_string(),
            })
        }

        fn skip_ws(&mut self) {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }

        fn peek(&mut self) -> Option<u8> {
            self.skip_ws();
            self.bytes.get(self.pos).copied()
        }

        fn expr(&mut self) -> Result<Terms> {
            let mut negate = false;
            if let Some(c) = self.peek() {
                if c == b'+' || c == b'-' {
                    self.pos += 1;
                    negate = c == b'-';
                }
            }
            let mut acc = self.term()?;
            if negate {
                negate_terms(&mut acc);
            }
            while let Some(c) = self.peek() {
                if c != b'+' && c != b'-' {
                    break;
                }
                self.pos += 1;
                let mut rhs = self.term()?;
                if c == b'-' {
                    negate_terms(&mut rhs);
                }
                acc.extend(rhs);
            }
            Ok(acc)
        }

        fn term(&mut self) -> Result<Terms> {
            let mut acc = self.factor()?;
            while let Some(b'*') = self.peek() {
                self.pos += 1;
                let rhs = self.factor()?;
                acc = mul_terms(&acc, &rhs);
            }
            Ok(acc)
        }

        fn factor(&mut self) -> Result<Terms> {
            let base = self.atom()?;
            if let Some(b'^') = self.peek() {
                self.pos += 1;
                let e = self.uint()?;
                let e: u32 = match e.try_into() {
                    Ok(e) => e,
                    Err(_) => return self.err("exponent too large"),
                };
                let mut acc: Terms = vec![(BTreeMap::new(), BigInt::one())];
                for _ in 0..e {
                    acc = mul_terms(&acc, &base);
                }
                return Ok(acc);
            }
            Ok(base)
        }

        fn atom(&mut self) -> Result<Terms> {
            match self.peek() {
                Some(b'(') => {
                    self.pos += 1;
                    let inner = self.expr()?;
                    match self.peek() {
                        Some(b')') => {
                            self.pos += 1;
                            Ok(inner)
                        }
                        _ => self.err("expected ')'"),
                    }
                }
                Some(b'-') => {
                    self.pos += 1;
                    let mut inner = self.atom()?;
                    negate_terms(&mut inner);
                    Ok(inner)
                }
                Some(c) if c.is_ascii_digit() => {
                    let n = self.uint()?;
                    Ok(vec![(BTreeMap::new(), BigInt::from(n))])
                }
                Some(b'x') => {
                    self.pos += 1;
                    let idx = if self
                        .bytes
                        .get(self.pos)
                        .is_some_and(|c| c.is_ascii_digit())
                    {
                        let n = self.uint()?;
                        if n == 0 {
                            return self.err("variable indices start at 1");
                        }
                        n as usize
                    } else {
                        1
                    };
                    self.max_var = self.max_var.max(idx);
                    let mut exp = BTreeMap::new();
                    exp.insert(idx, 1u32);
                    Ok(vec![(exp, BigInt::one())])
                }
                _ => self.err("expected a number, variable, or '('"),
            }
        }

        fn uint(&mut self) -> Result<u64> {
            self.skip_ws();
            let start = self.pos;
            while self
                .bytes
                .get(self.pos)
                .is_some_and(|c| c.is_ascii_digit())
            {
                self.pos += 1;
            }
            if self.pos == start {
                return self.err("expected an integer");
            }
            let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
            s.parse::<u64>().map_err(|_| Error::Parse {
                offset: start,
                msg: "integer literal too large".into(),
            })
        }
    }

    fn negate_terms(terms: &mut Terms) {
        for (_, c) in terms.iter_mut() {
            *c = -&*c;
        }
    }

    fn mul_terms(a: &Terms, b: &Terms) -> Terms {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for (ea, ca) in a {
            for (eb, cb) in b {
                let mut exp = ea.clone();
                for (&var, &e) in eb {
                    *exp.entry(var).or_insert(0) += e;
                }
                out.push((exp, ca * cb));
            }
        }
        out
    }

    let mut p = Parser {
        bytes: input.as_bytes(),
        pos: 0,
        max_var: 1,
    };
    let terms = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    let k = p.max_var;
    let mut poly = MultiPoly::zero(k);
    for (exp_map, coeff) in terms {
        let mut exp = vec![0u32; k];
        for (var, e) in exp_map {
            exp[var - 1] += e;
        }
        poly.add_term(&exp, &coeff);
    }
    Ok(poly)
}
