//! Counting pattern words `P V1 Q V2 P^-1 V3 Q^-1 V4` whose product is the
//! identity, where the gaps `V_i` are words over the gadget's A-letters.
//!
//! The fast path splits the `n - 4` gap letters into `(l1, l2, l3, l4)`,
//! builds per-length distribution tables over A-letter products, and
//! convolves them through the four fixed letters; the final gap is closed
//! by pairing against the inverted table.  A naive word-enumeration path
//! serves as the oracle at small lengths, and [`rigidity_scan`] lists the
//! identity words themselves so their structure can be checked letter by
//! letter.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::gadget::GadgetSet;
use crate::matrix::UniMatrix;
use crate::poly::MultiPoly;

type Dist = HashMap<UniMatrix, BigUint>;

/// Per-length tables of A-letter products: `tables[l][g]` is the number of
/// length-`l` words over the letters evaluating to `g`.
fn letter_distributions(g: &GadgetSet, max_len: usize) -> Vec<Dist> {
    let letters = g.a_letters();
    let mut tables = Vec::with_capacity(max_len + 1);
    let mut current: Dist = HashMap::new();
    current.insert(UniMatrix::identity(g.dim), BigUint::one());
    tables.push(current);
    for _ in 0..max_len {
        let prev = tables.last().unwrap();
        let mut next: Dist = HashMap::with_capacity(prev.len() * letters.len());
        for (h, c) in prev {
            for m in &letters {
                let prod = h.multiply(m).expect("letters share the gadget dimension");
                *next.entry(prod).or_insert_with(BigUint::zero) += c;
            }
        }
        tables.push(next);
    }
    tables
}

fn shift_right(dist: &Dist, fixed: &UniMatrix) -> Dist {
    dist.iter()
        .map(|(h, c)| (h.multiply(fixed).expect("same dim"), c.clone()))
        .collect()
}

fn convolve(a: &Dist, b: &Dist) -> Dist {
    let mut out: Dist = HashMap::with_capacity(a.len().max(b.len()));
    for (ga, ca) in a {
        for (gb, cb) in b {
            let prod = ga.multiply(gb).expect("same dim");
            *out.entry(prod).or_insert_with(BigUint::zero) += ca * cb;
        }
    }
    out
}

/// The counts `c_n` for all `n <= n_max`: the number of identity-valued
/// pattern words of total length `n` (four fixed letters plus `n - 4` gap
/// letters).  Entries below `n = 4` are zero.
///
/// The word splits at the middle into a prefix `P V1 Q V2 P^-1` and a
/// suffix `V3 Q^-1 V4`; both halves are tabulated by total gap length and
/// paired, so only two convolution levels (instead of four nested gaps)
/// touch the large tables.
pub fn pattern_counts_up_to(g: &GadgetSet, n_max: usize) -> Result<Vec<BigUint>> {
    let mut counts = vec![BigUint::zero(); n_max + 1];
    if n_max < 4 {
        return Ok(counts);
    }
    let l_max = n_max - 4;
    let dists = letter_distributions(g, l_max);

    let p_inv = g.p.inverse();
    let q_inv = g.q.inverse();
    let p_start: Dist = HashMap::from([(g.p.clone(), BigUint::one())]);

    // Prefix heads P V1 Q, one table per |V1|.
    let heads: Vec<Dist> = (0..=l_max)
        .map(|l1| shift_right(&convolve(&p_start, &dists[l1]), &g.q))
        .collect();
    // Prefix distributions by total gap letters j = |V1| + |V2|.
    let mut left: Vec<Dist> = vec![HashMap::new(); l_max + 1];
    for l1 in 0..=l_max {
        for l2 in 0..=l_max - l1 {
            let m = shift_right(&convolve(&heads[l1], &dists[l2]), &p_inv);
            let slot = &mut left[l1 + l2];
            for (h, c) in m {
                *slot.entry(h).or_insert_with(BigUint::zero) += c;
            }
        }
    }
    // Suffix distributions V3 Q^-1 V4 by j = |V3| + |V4|, stored by the
    // inverse element so the pairing is a direct lookup.
    let shifted: Vec<Dist> = (0..=l_max)
        .map(|l3| shift_right(&dists[l3], &q_inv))
        .collect();
    let mut right_inv: Vec<Dist> = vec![HashMap::new(); l_max + 1];
    for l3 in 0..=l_max {
        for l4 in 0..=l_max - l3 {
            let m = convolve(&shifted[l3], &dists[l4]);
            let slot = &mut right_inv[l3 + l4];
            for (h, c) in m {
                *slot.entry(h.inverse()).or_insert_with(BigUint::zero) += c;
            }
        }
    }

    for j1 in 0..=l_max {
        for j2 in 0..=l_max - j1 {
            let mut acc = BigUint::zero();
            let (small, large) = if left[j1].len() <= right_inv[j2].len() {
                (&left[j1], &right_inv[j2])
            } else {
                (&right_inv[j2], &left[j1])
            };
            for (h, c) in small {
                if let Some(c2) = large.get(h) {
                    acc += c * c2;
                }
            }
            counts[4 + j1 + j2] += acc;
        }
    }
    Ok(counts)
}

/// `c_n` for a single total length `n`.
pub fn pattern_count(g: &GadgetSet, n: usize) -> Result<BigUint> {
    Ok(pattern_counts_up_to(g, n)?.pop().unwrap())
}

/// Word-enumeration oracle for `c_n`; exponential in `n`, for tests and
/// small cross-checks only.
pub fn pattern_count_naive(g: &GadgetSet, n: usize) -> Result<BigUint> {
    if n < 4 {
        return Ok(BigUint::zero());
    }
    let letters = g.a_letters();
    let l_total = n - 4;
    let p_inv = g.p.inverse();
    let q_inv = g.q.inverse();

    // Enumerate raw words per length.
    let mut words: Vec<Vec<UniMatrix>> = vec![vec![UniMatrix::identity(g.dim)]];
    for l in 1..=l_total {
        let mut next = Vec::with_capacity(words[l - 1].len() * letters.len());
        for w in &words[l - 1] {
            for m in &letters {
                next.push(w.multiply(m)?);
            }
        }
        words.push(next);
    }

    let mut count = BigUint::zero();
    for l1 in 0..=l_total {
        for l2 in 0..=l_total - l1 {
            for l3 in 0..=l_total - l1 - l2 {
                let l4 = l_total - l1 - l2 - l3;
                for w1 in &words[l1] {
                    let s1 = g.p.multiply(w1)?.multiply(&g.q)?;
                    for w2 in &words[l2] {
                        let s2 = s1.multiply(w2)?.multiply(&p_inv)?;
                        for w3 in &words[l3] {
                            let s3 = s2.multiply(w3)?.multiply(&q_inv)?;
                            for w4 in &words[l4] {
                                if s3.multiply(w4)?.is_identity() {
                                    count += BigUint::one();
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(count)
}

/// One identity-valued pattern word found by [`rigidity_scan`], with the
/// structural facts checked on it.
#[derive(Debug, Clone)]
pub struct IdentityWord {
    /// Letter indices (into `GadgetSet::a_letters`) of the four gaps.
    pub gaps: [Vec<usize>; 4],
    /// Total length including the four fixed letters.
    pub total_length: usize,
    /// Gap evaluations satisfy `W1 = W2^-1 = W3 = W4^-1`.
    pub coherent: bool,
    /// `W1` evaluates to the sorted power word of its net exponent.
    pub sorted_power: bool,
    /// Net exponent vector of `W1`.
    pub net_exponent: Vec<i64>,
    /// The polynomial vanishes at the net exponent.
    pub at_root: bool,
}

/// Exhaustive scan over pattern words with at most `max_gap_letters`
/// A-letters in total.
#[derive(Debug)]
pub struct RigidityScan {
    pub words_scanned: u64,
    pub identity_words: Vec<IdentityWord>,
    /// Identity-word counts keyed by total word length (matches `c_n`).
    pub counts_by_length: BTreeMap<usize, BigUint>,
    pub all_coherent: bool,
    pub all_sorted_powers: bool,
    pub all_at_roots: bool,
}

impl RigidityScan {
    pub fn shortest_identity_length(&self) -> Option<usize> {
        self.identity_words.iter().map(|w| w.total_length).min()
    }
}

/// Enumerates every pattern word whose gaps hold at most
/// `max_gap_letters` letters, evaluates it, and records the identity
/// words together with the structural checks on each.
pub fn rigidity_scan(g: &GadgetSet, f: &MultiPoly, max_gap_letters: usize) -> Result<RigidityScan> {
    let letters = g.a_letters();
    let p_inv = g.p.inverse();
    let q_inv = g.q.inverse();

    // words[l]: all letter-index words of length l with their evaluations.
    let mut words: Vec<Vec<(Vec<usize>, UniMatrix)>> =
        vec![vec![(Vec::new(), UniMatrix::identity(g.dim))]];
    for l in 1..=max_gap_letters {
        let mut next = Vec::with_capacity(words[l - 1].len() * letters.len());
        for (w, eval) in &words[l - 1] {
            for (idx, m) in letters.iter().enumerate() {
                let mut word = w.clone();
                word.push(idx);
                next.push((word, eval.multiply(m)?));
            }
        }
        words.push(next);
    }
    // Inverted-element -> word indices, so the last gap closes by looking
    // up s3 itself: s3 * e4 = I exactly when e4^-1 = s3.
    let by_inverse_eval: Vec<HashMap<UniMatrix, Vec<usize>>> = words
        .iter()
        .map(|list| {
            let mut map: HashMap<UniMatrix, Vec<usize>> = HashMap::new();
            for (i, (_, eval)) in list.iter().enumerate() {
                map.entry(eval.inverse()).or_default().push(i);
            }
            map
        })
        .collect();

    let mut scan = RigidityScan {
        words_scanned: 0,
        identity_words: Vec::new(),
        counts_by_length: BTreeMap::new(),
        all_coherent: true,
        all_sorted_powers: true,
        all_at_roots: true,
    };

    for l1 in 0..=max_gap_letters {
        for (w1, e1) in &words[l1] {
            let s1 = g.p.multiply(e1)?.multiply(&g.q)?;
            for l2 in 0..=max_gap_letters - l1 {
                for (w2, e2) in &words[l2] {
                    let s2 = s1.multiply(e2)?.multiply(&p_inv)?;
                    for l3 in 0..=max_gap_letters - l1 - l2 {
                        for (w3, e3) in &words[l3] {
                            let s3 = s2.multiply(e3)?.multiply(&q_inv)?;
                            for l4 in 0..=max_gap_letters - l1 - l2 - l3 {
                                scan.words_scanned += words[l4].len() as u64;
                                let Some(hits) = by_inverse_eval[l4].get(&s3) else {
                                    continue;
                                };
                                for &i4 in hits {
                                    let (w4, e4) = &words[l4][i4];
                                    let total = 4 + l1 + l2 + l3 + l4;
                                    let word = inspect_identity_word(
                                        g,
                                        f,
                                        [w1, w2, w3, w4],
                                        [e1, e2, e3, e4],
                                        total,
                                    )?;
                                    scan.all_coherent &= word.coherent;
                                    scan.all_sorted_powers &= word.sorted_power;
                                    scan.all_at_roots &= word.at_root;
                                    *scan
                                        .counts_by_length
                                        .entry(total)
                                        .or_insert_with(BigUint::zero) += BigUint::one();
                                    scan.identity_words.push(word);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(scan)
}

fn inspect_identity_word(
    g: &GadgetSet,
    f: &MultiPoly,
    gaps: [&Vec<usize>; 4],
    evals: [&UniMatrix; 4],
    total_length: usize,
) -> Result<IdentityWord> {
    let coherent = evals[0] == evals[2]
        && evals[1] == evals[3]
        && evals[0].multiply(evals[1])?.is_identity();

    let mut net = vec![0i64; g.k];
    for &idx in gaps[0] {
        let (var, sign) = g.letter_exponent(idx);
        net[var] += sign;
    }
    let sorted_power = *evals[0] == g.power_word(&net)?;
    let at_root = f.eval_i64(&net)?.is_zero();

    Ok(IdentityWord {
        gaps: [
            gaps[0].clone(),
            gaps[1].clone(),
            gaps[2].clone(),
            gaps[3].clone(),
        ],
        total_length,
        coherent,
        sorted_power,
        net_exponent: net,
        at_root,
    })
}
