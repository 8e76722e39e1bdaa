//! Exact and modular counting of weighted closed walks on the Cayley
//! multigraph of a generating set - the cogrowth sequence.
//!
//! The state of the dynamic program is a table from group elements (in
//! canonical sparse form) to counts: `T_{n+1}(g) = sum_s w(s) T_n(g s^-1)`
//! over the generators.  Counts live either in exact big integers or in a
//! residue ring; residues mod `M <= 2^64` use fixed-width accumulation,
//! larger moduli fall back to big integers.  Two strategies compute the
//! sequence:
//!
//! - *frontier*: expand the table length by length and read off the count
//!   at the identity;
//! - *meet in the middle*: build tables to half depth and pair them,
//!   `cog(n) = sum_g T_a(g) T_b(g^-1)` with `a + b = n`, using a single
//!   inverse pass per half table.
//!
//! A memory guard bounds both the number of table entries and the total
//! number of stored matrix entries, turning blow-ups into clean errors -
//! never a wrong answer.  Tables are deterministic: entries depend only on
//! the generating set, never on scheduling or worker count.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::genset::GeneratingSet;
use crate::matrix::UniMatrix;

/// Exact counting, or counting in residues modulo a fixed integer >= 2.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CountMode {
    Exact,
    Modular(BigUint),
}

impl CountMode {
    pub fn modular_u64(m: u64) -> CountMode {
        CountMode::Modular(BigUint::from(m))
    }

    pub fn name(&self) -> String {
        match self {
            CountMode::Exact => "exact".to_string(),
            CountMode::Modular(m) => format!("mod:{m}"),
        }
    }

    pub fn parse(s: &str) -> Result<CountMode> {
        if s == "exact" {
            return Ok(CountMode::Exact);
        }
        if let Some(m) = s.strip_prefix("mod:") {
            let m = arith::biguint_from_decimal(m)?;
            if m < BigUint::from(2u32) {
                return Err(Error::Json("modulus must be at least 2".into()));
            }
            return Ok(CountMode::Modular(m));
        }
        Err(Error::Json(format!(
            "unknown count mode {s:?}; expected \"exact\" or \"mod:M\""
        )))
    }
}

/// How to compute a sequence.  `Auto` uses the frontier below the
/// configured depth threshold and meet-in-the-middle above it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    Frontier,
    MeetInMiddle,
    Auto,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Frontier => "frontier",
            Strategy::MeetInMiddle => "meet_in_middle",
            Strategy::Auto => "auto",
        }
    }

    pub fn parse(s: &str) -> Result<Strategy> {
        match s {
            "frontier" => Ok(Strategy::Frontier),
            "mitm" | "meet_in_middle" => Ok(Strategy::MeetInMiddle),
            "auto" => Ok(Strategy::Auto),
            other => Err(Error::Json(format!("unknown strategy {other:?}"))),
        }
    }
}

/// Engine limits and strategy selection.
#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub strategy: Strategy,
    /// Depth at which `Auto` switches to meet-in-the-middle.
    pub auto_threshold: usize,
    /// Cap on elements per walk table.
    pub max_table_entries: usize,
    /// Cap on total stored matrix entries per walk table.
    pub max_stored_entries: usize,
    /// Worker threads for table expansion (results are identical for any
    /// worker count).
    pub workers: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            strategy: Strategy::Auto,
            auto_threshold: 8,
            max_table_entries: 10_000_000,
            max_stored_entries: 50_000_000,
            workers: 1,
        }
    }
}

/// Count values in one of the supported rings.  The engine is generic
/// over this so the modular fast path stays machine-width.
trait CountSpace: Sync {
    type Value: Clone + Send + Sync;
    fn inject(&self, w: &BigUint) -> Self::Value;
    fn zero(&self) -> Self::Value;
    fn add_assign(&self, acc: &mut Self::Value, v: &Self::Value);
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn is_zero(&self, v: &Self::Value) -> bool;
    fn to_biguint(&self, v: &Self::Value) -> BigUint;
}

struct ExactSpace;

impl CountSpace for ExactSpace {
    type Value = BigUint;
    fn inject(&self, w: &BigUint) -> BigUint {
        w.clone()
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn add_assign(&self, acc: &mut BigUint, v: &BigUint) {
        *acc += v;
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b
    }
    fn is_zero(&self, v: &BigUint) -> bool {
        v.is_zero()
    }
    fn to_biguint(&self, v: &BigUint) -> BigUint {
        v.clone()
    }
}

/// Residues modulo an `M` that fits in 64 bits; products go through u128.
struct ModSmallSpace {
    modulus: u64,
}

impl CountSpace for ModSmallSpace {
    type Value = u64;
    fn inject(&self, w: &BigUint) -> u64 {
        (w % BigUint::from(self.modulus)).to_u64().unwrap()
    }
    fn zero(&self) -> u64 {
        0
    }
    fn add_assign(&self, acc: &mut u64, v: &u64) {
        *acc = ((*acc as u128 + *v as u128) % self.modulus as u128) as u64;
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }
    fn is_zero(&self, v: &u64) -> bool {
        *v == 0
    }
    fn to_biguint(&self, v: &u64) -> BigUint {
        BigUint::from(*v)
    }
}

struct ModBigSpace {
    modulus: BigUint,
}

impl CountSpace for ModBigSpace {
    type Value = BigUint;
    fn inject(&self, w: &BigUint) -> BigUint {
        w % &self.modulus
    }
    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn add_assign(&self, acc: &mut BigUint, v: &BigUint) {
        *acc += v;
        if *acc >= self.modulus {
            *acc -= &self.modulus;
        }
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }
    fn is_zero(&self, v: &BigUint) -> bool {
        v.is_zero()
    }
    fn to_biguint(&self, v: &BigUint) -> BigUint {
        v.clone()
    }
}

type Table<V> = HashMap<UniMatrix, V>;

/// Walk counts at a fixed word length: element -> weighted number of words
/// whose product is that element.  Counts are exact integers or residues,
/// depending on the mode the table was built under.
#[derive(Clone, Debug)]
pub struct WalkTable {
    pub length: usize,
    pub mode: CountMode,
    counts: HashMap<UniMatrix, BigUint>,
}

impl WalkTable {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count_of(&self, g: &UniMatrix) -> BigUint {
        self.counts.get(g).cloned().unwrap_or_else(BigUint::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&UniMatrix, &BigUint)> {
        self.counts.iter()
    }

    /// Total mass: in exact mode this equals `(sum of weights)^length`.
    pub fn total(&self) -> BigUint {
        self.counts.values().sum()
    }

    /// Entries sorted by canonical key, for deterministic serialization.
    pub fn sorted_entries(&self) -> Vec<(&UniMatrix, &BigUint)> {
        let mut v: Vec<_> = self.counts.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }
}

/// Result of a sequence run: `counts[n]` is `cog(n)` for `0 <= n <= n_max`
/// (exact or mod `M` per the mode).
#[derive(Clone, Debug)]
pub struct SequenceResult {
    pub counts: Vec<BigUint>,
    pub mode: CountMode,
    pub strategy_used: Strategy,
}

impl SequenceResult {
    /// JSON form: `{"n": [...], "count": ["decimal", ...], "mode": ...,
    /// "strategy": ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": (0..self.counts.len()).collect::<Vec<_>>(),
            "count": self
                .counts
                .iter()
                .map(arith::biguint_to_decimal)
                .collect::<Vec<_>>(),
            "mode": self.mode.name(),
            "strategy": self.strategy_used.name(),
        })
    }

    /// Aligned two-column text table for human reading.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .counts
            .iter()
            .map(|c| c.to_string().len())
            .max()
            .unwrap_or(1)
            .max(5);
        out.push_str(&format!("{:>4}  {:>width$}\n", "n", "count"));
        for (n, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{n:>4}  {c:>width$}\n"));
        }
        out
    }
}

struct Expander<'a, S: CountSpace> {
    space: &'a S,
    gens: Vec<(UniMatrix, S::Value)>,
    config: &'a EngineConfig,
}

impl<'a, S: CountSpace> Expander<'a, S> {
    fn new(space: &'a S, set: &GeneratingSet, config: &'a EngineConfig) -> Self {
        let gens = set
            .generators()
            .iter()
            .map(|(m, w)| (m.clone(), space.inject(w)))
            .collect();
        Expander {
            space,
            gens,
            config,
        }
    }

    fn guard(&self, depth: usize, entries: usize, stored: usize) -> Result<()> {
        if entries > self.config.max_table_entries || stored > self.config.max_stored_entries {
            return Err(Error::Resource {
                depth,
                entries,
                stored,
                entry_cap: self.config.max_table_entries,
                stored_cap: self.config.max_stored_entries,
            });
        }
        Ok(())
    }

    /// Expands one slice of the table.  The guard is enforced while the
    /// output grows, so a blow-up aborts mid-expansion instead of
    /// exhausting memory first.
    fn expand_chunk(&self, depth: usize, chunk: &[(&UniMatrix, &S::Value)]) -> Result<Table<S::Value>> {
        let mut out: Table<S::Value> = HashMap::new();
        let mut stored = 0usize;
        for (g, c) in chunk {
            for (m, w) in &self.gens {
                let prod = g.multiply(m).expect("generators share the set dimension");
                let term = self.space.mul(c, w);
                match out.get_mut(&prod) {
                    Some(acc) => self.space.add_assign(acc, &term),
                    None => {
                        stored += prod.nnz();
                        out.insert(prod, term);
                    }
                }
            }
            self.guard(depth, out.len(), stored)?;
        }
        Ok(out)
    }

    /// One step of the dynamic program, optionally sharded over worker
    /// threads.  Merging is plain addition, so the result is identical for
    /// any worker count.
    fn step(&self, depth: usize, table: &Table<S::Value>) -> Result<Table<S::Value>> {
        let items: Vec<(&UniMatrix, &S::Value)> = table.iter().collect();
        let workers = self.config.workers.max(1).min(items.len().max(1));
        let mut next = if workers <= 1 {
            self.expand_chunk(depth, &items)?
        } else {
            let chunk_size = items.len().div_ceil(workers);
            let partials = std::thread::scope(|scope| {
                let handles: Vec<_> = items
                    .chunks(chunk_size)
                    .map(|chunk| scope.spawn(move || self.expand_chunk(depth, chunk)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect::<Result<Vec<_>>>()
            })?;
            let mut merged: Table<S::Value> = HashMap::new();
            for partial in partials {
                for (g, v) in partial {
                    match merged.get_mut(&g) {
                        Some(acc) => self.space.add_assign(acc, &v),
                        None => {
                            merged.insert(g, v);
                        }
                    }
                }
            }
            merged
        };
        // Residues can cancel to zero; drop them to keep the table sparse.
        next.retain(|_, v| !self.space.is_zero(v));
        let stored: usize = next.keys().map(|m| m.nnz()).sum();
        self.guard(depth, next.len(), stored)?;
        Ok(next)
    }

    /// Tables for all lengths `0 ..= depth`.
    fn tables_to(&self, dim: u32, depth: usize) -> Result<Vec<Table<S::Value>>> {
        let mut tables = Vec::with_capacity(depth + 1);
        let mut current: Table<S::Value> = HashMap::new();
        current.insert(UniMatrix::identity(dim), self.space.inject(&BigUint::one()));
        tables.push(current);
        for d in 1..=depth {
            let next = self.step(d, tables.last().unwrap())?;
            tables.push(next);
        }
        Ok(tables)
    }
}

fn sequence_with_space<S: CountSpace>(
    space: &S,
    set: &GeneratingSet,
    n_max: usize,
    config: &EngineConfig,
) -> Result<(Vec<BigUint>, Strategy)> {
    let strategy = match config.strategy {
        Strategy::Auto => {
            if n_max > config.auto_threshold {
                Strategy::MeetInMiddle
            } else {
                Strategy::Frontier
            }
        }
        s => s,
    };
    let expander = Expander::new(space, set, config);
    let identity = UniMatrix::identity(set.dim());

    let counts = match strategy {
        Strategy::Frontier => {
            let tables = expander.tables_to(set.dim(), n_max)?;
            tables
                .iter()
                .map(|t| {
                    t.get(&identity)
                        .map(|v| space.to_biguint(v))
                        .unwrap_or_else(BigUint::zero)
                })
                .collect()
        }
        Strategy::MeetInMiddle | Strategy::Auto => {
            let half = n_max.div_ceil(2);
            let tables = expander.tables_to(set.dim(), half)?;
            // cog(n) pairs tables[n/2] with the inverted table at the
            // upper half; each inverted table serves n = 2b-1 and n = 2b,
            // so only one is alive at a time (a single inverse pass per
            // half table).
            let mut counts = vec![BigUint::zero(); n_max + 1];
            for b in 0..=half {
                let inverted: Table<S::Value> = tables[b]
                    .iter()
                    .map(|(g, v)| (g.inverse(), v.clone()))
                    .collect();
                for n in [2 * b, (2 * b).wrapping_sub(1)] {
                    if n > n_max || n == usize::MAX {
                        continue;
                    }
                    let a = n - b;
                    let mut acc = space.zero();
                    for (g, va) in &tables[a] {
                        if let Some(vb) = inverted.get(g) {
                            let term = space.mul(va, vb);
                            space.add_assign(&mut acc, &term);
                        }
                    }
                    counts[n] = space.to_biguint(&acc);
                }
            }
            counts
        }
    };
    Ok((counts, strategy))
}

/// The cogrowth sequence `cog(0..=n_max)` of a generating set: the number
/// of length-`n` words (weighted by generator multiplicities) whose
/// product is the identity.
pub fn cogrowth_sequence(
    set: &GeneratingSet,
    n_max: usize,
    mode: &CountMode,
    config: &EngineConfig,
) -> Result<SequenceResult> {
    let (counts, strategy_used) = match mode {
        CountMode::Exact => sequence_with_space(&ExactSpace, set, n_max, config)?,
        CountMode::Modular(m) => {
            if *m < BigUint::from(2u32) {
                return Err(Error::Json("modulus must be at least 2".into()));
            }
            match m.to_u64() {
                Some(small) => {
                    sequence_with_space(&ModSmallSpace { modulus: small }, set, n_max, config)?
                }
                None => sequence_with_space(
                    &ModBigSpace {
                        modulus: m.clone(),
                    },
                    set,
                    n_max,
                    config,
                )?,
            }
        }
    };
    Ok(SequenceResult {
        counts,
        mode: mode.clone(),
        strategy_used,
    })
}

/// Like [`cogrowth_sequence`], but a memory-guard trip truncates the
/// sequence instead of failing: returns the counts that were completed and
/// the error that stopped the run, if any.
pub fn cogrowth_sequence_capped(
    set: &GeneratingSet,
    n_max: usize,
    mode: &CountMode,
    config: &EngineConfig,
) -> (SequenceResult, Option<Error>) {
    match cogrowth_sequence(set, n_max, mode, config) {
        Ok(r) => (r, None),
        Err(err) => {
            // Walk the target down below the failing depth and retry.
            let failed_depth = match &err {
                Error::Resource { depth, .. } => *depth,
                _ => {
                    return (
                        SequenceResult {
                            counts: Vec::new(),
                            mode: mode.clone(),
                            strategy_used: config.strategy,
                        },
                        Some(err),
                    )
                }
            };
            // Meet-in-the-middle covers n <= 2 (failed_depth - 1).
            let reachable = 2 * (failed_depth.saturating_sub(1));
            let mut capped = config.clone();
            capped.strategy = Strategy::MeetInMiddle;
            let mut n = reachable.min(n_max);
            loop {
                match cogrowth_sequence(set, n, mode, &capped) {
                    Ok(r) => return (r, Some(err)),
                    Err(_) if n > 0 => n -= 1,
                    Err(e2) => {
                        return (
                            SequenceResult {
                                counts: Vec::new(),
                                mode: mode.clone(),
                                strategy_used: capped.strategy,
                            },
                            Some(e2),
                        )
                    }
                }
            }
        }
    }
}

/// The walk table at a single length, built by the frontier strategy.
pub fn walk_table(
    set: &GeneratingSet,
    n: usize,
    mode: &CountMode,
    config: &EngineConfig,
) -> Result<WalkTable> {
    fn build<S: CountSpace>(
        space: &S,
        set: &GeneratingSet,
        n: usize,
        config: &EngineConfig,
    ) -> Result<HashMap<UniMatrix, BigUint>> {
        let expander = Expander::new(space, set, config);
        let tables = expander.tables_to(set.dim(), n)?;
        Ok(tables
            .into_iter()
            .last()
            .unwrap()
            .iter()
            .map(|(g, v)| (g.clone(), space.to_biguint(v)))
            .collect())
    }
    let counts = match mode {
        CountMode::Exact => build(&ExactSpace, set, n, config)?,
        CountMode::Modular(m) => match m.to_u64() {
            Some(small) => build(&ModSmallSpace { modulus: small }, set, n, config)?,
            None => build(
                &ModBigSpace {
                    modulus: m.clone(),
                },
                set,
                n,
                config,
            )?,
        },
    };
    Ok(WalkTable {
        length: n,
        mode: mode.clone(),
        counts,
    })
}
