//! Expected products of normalized traces of words in independent
//! uniformly random permutation matrices with restricted cycle lengths.
//!
//! Three evaluation routes are provided and must agree where they
//! overlap:
//!
//! - `exact_expected_trace`: the congruence sum
//!   `(1/N^n) * sum over congruences pi of N!/(N-|pi|)! *
//!   prod_r p_N^(A_r)[(Gamma/pi)(r)]`
//!   over the disjoint union `Gamma` of the word-graphs;
//! - `brute_expected_trace`: the full average over all tuples of
//!   restricted permutations;
//! - `mc_expected_trace`: a seeded Monte Carlo estimate.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cyclecount::{enumerate_restricted, CountTable, CycleSet, Sampler};
use crate::error::{Error, Result};
use crate::graphs::{ColoredGraph, DEFAULT_VERTEX_BOUND};
use crate::numeric::rational_to_f64;
use crate::words::{haar_moment, Order, Signature, Word};
use crate::asympt::slope_fit;

/// Default cap on the brute-force tuple space `prod_r a_N^(A_r)`.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Samples per deterministic Monte Carlo stream.
const MC_BATCH: u64 = 8192;

/// An independent family: one cycle set per generator, with
/// `sup A_r` matching the signature order `d_r`.
#[derive(Debug, Clone)]
pub struct Model {
    sig: Signature,
    sets: Vec<CycleSet>,
}

impl Model {
    pub fn new(sig: Signature, sets: Vec<CycleSet>) -> Result<Model> {
        if sets.len() != sig.s() {
            return Err(Error::invalid(format!(
                "{} cycle sets for {} generators",
                sets.len(),
                sig.s()
            )));
        }
        for (r, set) in sets.iter().enumerate() {
            let d = sig.order(r + 1)?;
            if set.sup() != d {
                return Err(Error::invalid(format!(
                    "sup {} = {} but generator {} has order {}",
                    set,
                    match set.sup() {
                        Order::Finite(v) => v.to_string(),
                        Order::Infinite => "inf".into(),
                    },
                    r + 1,
                    d
                )));
            }
        }
        Ok(Model { sig, sets })
    }

    /// Infer the signature from the sets (`d_r = sup A_r`).
    pub fn from_sets(sets: Vec<CycleSet>) -> Result<Model> {
        let orders = sets.iter().map(|s| s.sup()).collect();
        Model::new(Signature::new(orders)?, sets)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn sets(&self) -> &[CycleSet] {
        &self.sets
    }
}

/// Methods by which an expectation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMethod {
    Exact,
    Brute,
    Mc,
}

impl TraceMethod {
    pub fn name(self) -> &'static str {
        match self {
            TraceMethod::Exact => "exact",
            TraceMethod::Brute => "brute",
            TraceMethod::Mc => "mc",
        }
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// One evaluated expectation, tagged with its provenance.
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub words: Vec<Word>,
    pub n: u64,
    pub method: TraceMethod,
    pub value: TraceValue,
}

#[derive(Debug, Clone)]
pub enum TraceValue {
    Exact(BigRational),
    Mc(McEstimate),
}

/// Per-word row of a freeness verdict.
#[derive(Debug, Clone)]
pub struct FreenessRow {
    pub word: Word,
    pub phi: u8,
    /// `(N, exact expectation)` along the grid.
    pub values: Vec<(u64, BigRational)>,
    /// `|E tr U_w - phi|` along the grid.
    pub deviations: Vec<f64>,
    /// Log-log slope of `|E tr U_w|` for words with `phi = 0`, fitted
    /// on the top half of the grid; `None` when not applicable.
    pub fitted_slope: Option<f64>,
}

/// Outcome of comparing a whole grid of exact expectations against the
/// limiting *-free moments.
#[derive(Debug, Clone)]
pub struct FreenessReport {
    pub rows: Vec<FreenessRow>,
    /// Largest deviation per grid point.
    pub max_deviation: Vec<(u64, f64)>,
    /// Envelope constant: pass requires `|E - phi| <= tolerance / N`.
    pub tolerance: f64,
    pub pass: bool,
}

type GraphKey = (usize, u64, Vec<u64>, Vec<u64>);

/// Evaluation engine: a model plus count tables covering sizes up to a
/// fixed bound, with memoized graph probabilities, permutation
/// enumerations, and samplers.
pub struct Engine {
    model: Model,
    tables: Vec<CountTable>,
    budget: u128,
    vertex_bound: usize,
    graph_prob_cache: Mutex<HashMap<GraphKey, BigRational>>,
    enumeration_cache: Mutex<HashMap<(usize, usize), std::sync::Arc<Vec<Vec<u32>>>>>,
    sampler_cache: Mutex<HashMap<(usize, usize), std::sync::Arc<Sampler>>>,
}

impl Engine {
    /// Build tables for every generator up to `n_max`.
    pub fn new(model: Model, n_max: usize) -> Engine {
        let tables = model
            .sets
            .iter()
            .map(|s| CountTable::build(s, n_max))
            .collect();
        Engine {
            model,
            tables,
            budget: DEFAULT_BUDGET,
            vertex_bound: DEFAULT_VERTEX_BOUND,
            graph_prob_cache: Mutex::new(HashMap::new()),
            enumeration_cache: Mutex::new(HashMap::new()),
            sampler_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_budget(mut self, budget: u128) -> Engine {
        self.budget = budget;
        self
    }

    pub fn with_vertex_bound(mut self, bound: usize) -> Engine {
        self.vertex_bound = bound;
        self
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn table(&self, r: usize) -> &CountTable {
        &self.tables[r]
    }

    /// Every `S_N^(A_r)` non-empty at this size?
    pub fn is_feasible(&self, n: u64) -> Result<bool> {
        for table in &self.tables {
            if !table.is_feasible(n as usize)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All feasible sizes in `lo..=hi` (at most `max_points`, evenly
    /// thinned when more exist).
    pub fn feasible_grid(&self, lo: u64, hi: u64, max_points: usize) -> Result<Vec<u64>> {
        let mut all = Vec::new();
        for n in lo..=hi.min(self.tables[0].n_max() as u64) {
            if self.is_feasible(n)? {
                all.push(n);
            }
        }
        if all.len() <= max_points || max_points == 0 {
            return Ok(all);
        }
        let mut thinned = Vec::with_capacity(max_points);
        for i in 0..max_points {
            let idx = i * (all.len() - 1) / (max_points - 1).max(1);
            thinned.push(all[idx]);
        }
        thinned.dedup();
        Ok(thinned)
    }

    fn require_feasible(&self, n: u64) -> Result<()> {
        for (r, table) in self.tables.iter().enumerate() {
            if !table.is_feasible(n as usize)? {
                return Err(Error::EmptyPermutationSet {
                    set: self.model.sets[r].to_string(),
                    n,
                });
            }
        }
        Ok(())
    }

    fn check_words(&self, words: &[Word]) -> Result<()> {
        for w in words {
            self.model.sig.check_word(w)?;
        }
        Ok(())
    }

    /// Memoized graph probability; the value depends only on the loop
    /// and string length multisets of the monochrome graph.
    fn graph_probability(&self, r: usize, n: u64, graph: &ColoredGraph) -> Result<BigRational> {
        let mut loops = Vec::new();
        let mut strings = Vec::new();
        for p in graph.paths()? {
            if p.is_loop {
                loops.push(p.length as u64);
            } else {
                strings.push(p.length as u64);
            }
        }
        loops.sort_unstable();
        strings.sort_unstable();
        let key = (r, n, loops, strings);
        if let Some(hit) = self.graph_prob_cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let value = self.tables[r].graph_probability(n as usize, graph)?;
        self.graph_prob_cache
            .lock()
            .unwrap()
            .insert(key, value.clone());
        Ok(value)
    }

    /// Is the monochrome graph an `A_r`-graph (all loops in `A_r`, all
    /// strings shorter than `sup A_r`)?
    fn is_a_graph(&self, r: usize, graph: &ColoredGraph) -> Result<bool> {
        if !graph.is_admissible() {
            return Ok(false);
        }
        let sup = self.model.sets[r].sup();
        for p in graph.paths()? {
            if p.is_loop {
                if !self.model.sets[r].contains(p.length as u64) {
                    return Ok(false);
                }
            } else if let Order::Finite(d) = sup {
                if p.length as u64 >= d {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Exact `E(prod_a tr U_{w_a})` by the congruence sum over the
    /// disjoint union of the word-graphs. Empty words contribute the
    /// constant factor 1 and are dropped.
    pub fn exact_expected_trace(&self, words: &[Word], n: u64) -> Result<BigRational> {
        self.check_words(words)?;
        self.require_feasible(n)?;
        let nonempty: Vec<&Word> = words.iter().filter(|w| !w.is_empty()).collect();
        if nonempty.is_empty() {
            return Ok(BigRational::one());
        }
        let parts: Vec<ColoredGraph> = nonempty
            .iter()
            .map(|w| ColoredGraph::word_graph(w))
            .collect::<Result<_>>()?;
        let gamma = ColoredGraph::disjoint_union(&parts.iter().collect::<Vec<_>>())?;
        let congruences = gamma.congruences(self.vertex_bound)?;
        let s = self.model.sig.s();
        let factors = nonempty.len() as u32;

        let terms: Vec<BigRational> = congruences
            .par_iter()
            .map(|pi| -> Result<BigRational> {
                if pi.num_blocks() as u64 > n {
                    return Ok(BigRational::zero());
                }
                let quotient = gamma.quotient(pi)?;
                let mut product = BigRational::one();
                for r in 0..s {
                    let mono = quotient.monochrome(r + 1);
                    if !self.is_a_graph(r, &mono)? {
                        return Ok(BigRational::zero());
                    }
                    product *= self.graph_probability(r, n, &mono)?;
                    if product.is_zero() {
                        return Ok(product);
                    }
                }
                // N!/(N - |pi|)!
                let mut falling = BigInt::one();
                for i in 0..pi.num_blocks() as u64 {
                    falling *= BigInt::from(n - i);
                }
                Ok(product * BigRational::from_integer(falling))
            })
            .collect::<Result<_>>()?;

        let sum: BigRational = terms.into_iter().sum();
        let scale = BigRational::from_integer(BigInt::from(n)).pow(factors as i32);
        Ok(sum / scale)
    }

    fn enumeration(&self, r: usize, n: u64) -> std::sync::Arc<Vec<Vec<u32>>> {
        let key = (r, n as usize);
        if let Some(hit) = self.enumeration_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let perms = std::sync::Arc::new(enumerate_restricted(&self.model.sets[r], n as usize));
        self.enumeration_cache
            .lock()
            .unwrap()
            .insert(key, perms.clone());
        perms
    }

    /// Exact `E(prod_a tr U_{w_a})` by averaging over every tuple of
    /// restricted permutations. Errors out when the tuple space
    /// exceeds the budget.
    pub fn brute_expected_trace(&self, words: &[Word], n: u64) -> Result<BigRational> {
        self.check_words(words)?;
        self.require_feasible(n)?;
        let nonempty: Vec<&Word> = words.iter().filter(|w| !w.is_empty()).collect();
        if nonempty.is_empty() {
            return Ok(BigRational::one());
        }

        let s = self.model.sig.s();
        let mut space: u128 = 1;
        let mut factorial: u128 = 1;
        for i in 1..=n as u128 {
            factorial = factorial.saturating_mul(i);
        }
        for table in &self.tables {
            let count = table
                .a(n as usize)?
                .to_u128()
                .ok_or(Error::BudgetExceeded {
                    estimate: u128::MAX,
                    budget: self.budget,
                })?;
            space = space.saturating_mul(count);
        }
        let estimate = space.max(factorial);
        if estimate > self.budget {
            return Err(Error::BudgetExceeded {
                estimate,
                budget: self.budget,
            });
        }

        let perms: Vec<std::sync::Arc<Vec<Vec<u32>>>> =
            (0..s).map(|r| self.enumeration(r, n)).collect();
        let inverses: Vec<Vec<Vec<u32>>> = perms
            .iter()
            .map(|list| list.iter().map(|p| invert(p)).collect())
            .collect();

        // mixed-radix iteration over the tuple space
        let mut indices = vec![0usize; s];
        let mut numerator: u128 = 0;
        let mut tuples: u128 = 0;
        loop {
            let mut product: u128 = 1;
            for w in &nonempty {
                let fixed = fixed_points(w, &perms, &inverses, &indices, n as usize);
                product = product
                    .checked_mul(fixed as u128)
                    .ok_or(Error::BudgetExceeded {
                        estimate: u128::MAX,
                        budget: self.budget,
                    })?;
                if product == 0 {
                    break;
                }
            }
            numerator = numerator
                .checked_add(product)
                .ok_or(Error::BudgetExceeded {
                    estimate: u128::MAX,
                    budget: self.budget,
                })?;
            tuples += 1;
            // advance
            let mut pos = 0;
            loop {
                if pos == s {
                    debug_assert_eq!(tuples, space);
                    let denom = BigInt::from(tuples)
                        * BigInt::from(n).pow(nonempty.len() as u32);
                    return Ok(BigRational::new(BigInt::from(numerator), denom));
                }
                indices[pos] += 1;
                if indices[pos] < perms[pos].len() {
                    break;
                }
                indices[pos] = 0;
                pos += 1;
            }
        }
    }

    fn sampler(&self, r: usize, n: u64) -> Result<std::sync::Arc<Sampler>> {
        let key = (r, n as usize);
        if let Some(hit) = self.sampler_cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let sampler = std::sync::Arc::new(Sampler::new(&self.tables[r], n as usize)?);
        self.sampler_cache
            .lock()
            .unwrap()
            .insert(key, sampler.clone());
        Ok(sampler)
    }

    /// Monte Carlo estimate of `E(prod_a tr U_{w_a})`.
    ///
    /// Samples are drawn in fixed-size batches, one independent ChaCha
    /// stream per batch, and batch sums are combined in index order, so
    /// results are deterministic for a given seed regardless of the
    /// worker count.
    pub fn mc_expected_trace(
        &self,
        words: &[Word],
        n: u64,
        samples: u64,
        seed: u64,
    ) -> Result<McEstimate> {
        self.check_words(words)?;
        self.require_feasible(n)?;
        if samples == 0 {
            return Err(Error::invalid("at least one sample is required"));
        }
        let nonempty: Vec<&Word> = words.iter().filter(|w| !w.is_empty()).collect();
        let s = self.model.sig.s();
        let samplers: Vec<std::sync::Arc<Sampler>> = (0..s)
            .map(|r| self.sampler(r, n))
            .collect::<Result<_>>()?;

        let batches = samples.div_ceil(MC_BATCH);
        let partial: Vec<(f64, f64)> = (0..batches)
            .into_par_iter()
            .map(|batch| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(batch);
                let count = MC_BATCH.min(samples - batch * MC_BATCH);
                let mut sum = 0.0f64;
                let mut sum_sq = 0.0f64;
                let mut maps: Vec<Vec<u32>> = Vec::with_capacity(s);
                let mut invs: Vec<Vec<u32>> = Vec::with_capacity(s);
                for _ in 0..count {
                    maps.clear();
                    invs.clear();
                    for sampler in &samplers {
                        let sample = sampler.sample(&mut rng);
                        invs.push(invert(&sample.map));
                        maps.push(sample.map);
                    }
                    let mut value = 1.0f64;
                    for w in &nonempty {
                        let fixed = fixed_points_direct(w, &maps, &invs, n as usize);
                        value *= fixed as f64 / n as f64;
                    }
                    sum += value;
                    sum_sq += value * value;
                }
                (sum, sum_sq)
            })
            .collect();

        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for (a, b) in partial {
            sum += a;
            sum_sq += b;
        }
        let m = samples as f64;
        let estimate = sum / m;
        let stderr = if samples > 1 {
            let variance = ((sum_sq - m * estimate * estimate) / (m - 1.0)).max(0.0);
            (variance / m).sqrt()
        } else {
            0.0
        };
        Ok(McEstimate {
            estimate,
            stderr,
            samples,
            seed,
        })
    }

    /// `E(tr w1 tr w2) - E(tr w1) E(tr w2)` at every grid point, exact.
    pub fn covariance_scan(
        &self,
        w1: &Word,
        w2: &Word,
        grid: &[u64],
    ) -> Result<Vec<(u64, BigRational)>> {
        let mut out = Vec::with_capacity(grid.len());
        for &n in grid {
            let joint =
                self.exact_expected_trace(&[w1.clone(), w2.clone()], n)?;
            let e1 = self.exact_expected_trace(std::slice::from_ref(w1), n)?;
            let e2 = self.exact_expected_trace(std::slice::from_ref(w2), n)?;
            out.push((n, joint - e1 * e2));
        }
        Ok(out)
    }

    /// Compare exact expectations against the limiting *-free moments
    /// for every word up to `max_len`, over a grid of sizes. Passes
    /// when `|E tr U_w - phi(u_w)| <= tolerance / N` throughout.
    pub fn freeness_verdict(
        &self,
        max_len: usize,
        grid: &[u64],
        tolerance: f64,
    ) -> Result<FreenessReport> {
        let words: Vec<Word> =
            crate::words::enumerate_words(self.model.sig.s(), max_len).collect();
        let envelope = BigRational::from_float(tolerance)
            .ok_or_else(|| Error::invalid("tolerance must be finite"))?;

        let rows: Vec<FreenessRow> = words
            .par_iter()
            .map(|w| -> Result<FreenessRow> {
                let phi = haar_moment(w, &self.model.sig)?;
                let mut values = Vec::with_capacity(grid.len());
                for &n in grid {
                    values.push((n, self.exact_expected_trace(std::slice::from_ref(w), n)?));
                }
                let deviations: Vec<f64> = values
                    .iter()
                    .map(|(_, v)| {
                        let dev = v - BigRational::from_integer(BigInt::from(phi));
                        rational_to_f64(&dev.abs())
                    })
                    .collect();
                let fitted_slope = if phi == 0 {
                    let points: Vec<(f64, f64)> = values
                        .iter()
                        .skip(values.len() / 2)
                        .filter(|(_, v)| !v.is_zero())
                        .map(|(n, v)| (*n as f64, rational_to_f64(&v.abs())))
                        .collect();
                    slope_fit(&points).ok()
                } else {
                    None
                };
                Ok(FreenessRow {
                    word: w.clone(),
                    phi,
                    values,
                    deviations,
                    fitted_slope,
                })
            })
            .collect::<Result<_>>()?;

        let mut pass = true;
        for row in &rows {
            let phi = BigRational::from_integer(BigInt::from(row.phi));
            for (n, value) in &row.values {
                let bound = &envelope / BigRational::from_integer(BigInt::from(*n));
                if (value - &phi).abs() > bound {
                    pass = false;
                }
            }
        }
        let max_deviation: Vec<(u64, f64)> = grid
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let max = rows
                    .iter()
                    .map(|r| r.deviations[i])
                    .fold(0.0f64, f64::max);
                (n, max)
            })
            .collect();
        Ok(FreenessReport {
            rows,
            max_deviation,
            tolerance,
            pass,
        })
    }
}

fn invert(map: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; map.len()];
    for (i, &v) in map.iter().enumerate() {
        inv[v as usize] = i as u32;
    }
    inv
}

/// Fixed points of the composite permutation read off a word: a matrix
/// word in permutation matrices corresponds to composing the letter
/// permutations with the rightmost letter applied first.
fn fixed_points(
    w: &Word,
    perms: &[std::sync::Arc<Vec<Vec<u32>>>],
    inverses: &[Vec<Vec<u32>>],
    indices: &[usize],
    n: usize,
) -> u64 {
    let mut fixed = 0;
    for start in 0..n as u32 {
        let mut point = start;
        for letter in w.letters().iter().rev() {
            let r = letter.color - 1;
            point = if letter.starred {
                inverses[r][indices[r]][point as usize]
            } else {
                perms[r][indices[r]][point as usize]
            };
        }
        if point == start {
            fixed += 1;
        }
    }
    fixed
}

fn fixed_points_direct(w: &Word, maps: &[Vec<u32>], invs: &[Vec<u32>], n: usize) -> u64 {
    let mut fixed = 0;
    for start in 0..n as u32 {
        let mut point = start;
        for letter in w.letters().iter().rev() {
            let r = letter.color - 1;
            point = if letter.starred {
                invs[r][point as usize]
            } else {
                maps[r][point as usize]
            };
        }
        if point == start {
            fixed += 1;
        }
    }
    fixed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(sig: &str, sets: &[&str]) -> Model {
        Model::new(
            Signature::parse(sig).unwrap(),
            sets.iter().map(|s| CycleSet::parse(s).unwrap()).collect(),
        )
        .unwrap()
    }

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn model_validation() {
        assert!(Model::new(
            Signature::parse("2").unwrap(),
            vec![CycleSet::parse("all").unwrap()]
        )
        .is_err());
        assert!(Model::new(
            Signature::parse("2").unwrap(),
            vec![CycleSet::parse("finite:1,2").unwrap()]
        )
        .is_ok());
        let inferred = Model::from_sets(vec![CycleSet::parse("finite:2,4").unwrap()]).unwrap();
        assert_eq!(inferred.signature().order(1).unwrap(), Order::Finite(4));
    }

    #[test]
    fn identity_word_has_unit_trace() {
        let engine = Engine::new(model("inf", &["all"]), 8);
        for n in [2u64, 5, 8] {
            assert_eq!(
                engine.brute_expected_trace(&[w("g1 g1*")], n).unwrap(),
                BigRational::one()
            );
            assert_eq!(
                engine.exact_expected_trace(&[w("g1 g1*")], n).unwrap(),
                BigRational::one()
            );
        }
    }

    #[test]
    fn single_generator_examples() {
        let engine = Engine::new(model("2", &["finite:1,2"]), 4);
        assert_eq!(
            engine.brute_expected_trace(&[w("g1")], 2).unwrap(),
            rational(1, 2)
        );
        assert_eq!(
            engine.exact_expected_trace(&[w("g1")], 2).unwrap(),
            rational(1, 2)
        );

        let matchings = Engine::new(model("2", &["finite:2"]), 4);
        assert_eq!(
            matchings.brute_expected_trace(&[w("g1 g1")], 2).unwrap(),
            BigRational::one()
        );
        assert_eq!(
            matchings.brute_expected_trace(&[w("g1 g1")], 4).unwrap(),
            BigRational::one()
        );

        let uniform = Engine::new(model("inf", &["all"]), 5);
        assert_eq!(
            uniform.exact_expected_trace(&[w("g1")], 5).unwrap(),
            rational(1, 5)
        );
    }

    #[test]
    fn empty_words_are_unit_factors() {
        let engine = Engine::new(model("inf", &["all"]), 4);
        assert_eq!(
            engine.exact_expected_trace(&[Word::empty()], 4).unwrap(),
            BigRational::one()
        );
        let with_empty = engine
            .exact_expected_trace(&[Word::empty(), w("g1")], 4)
            .unwrap();
        let without = engine.exact_expected_trace(&[w("g1")], 4).unwrap();
        assert_eq!(with_empty, without);
    }

    #[test]
    fn exact_equals_brute_spot_checks() {
        let engine = Engine::new(model("inf,inf", &["all", "all"]), 5);
        for text in ["g1 g2", "g1 g2 g1* g2*", "g1 g1 g2*"] {
            for n in [2u64, 3, 4] {
                assert_eq!(
                    engine.exact_expected_trace(&[w(text)], n).unwrap(),
                    engine.brute_expected_trace(&[w(text)], n).unwrap(),
                    "{text} at N = {n}"
                );
            }
        }
        // a pair of words
        let pair = [w("g1"), w("g2 g1")];
        for n in [2u64, 3, 4] {
            assert_eq!(
                engine.exact_expected_trace(&pair, n).unwrap(),
                engine.brute_expected_trace(&pair, n).unwrap()
            );
        }
    }

    #[test]
    fn budget_guard_trips() {
        let engine = Engine::new(model("inf", &["all"]), 12).with_budget(100);
        assert!(matches!(
            engine.brute_expected_trace(&[w("g1")], 12),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn infeasible_size_is_rejected() {
        let engine = Engine::new(model("2", &["finite:2"]), 5);
        assert!(matches!(
            engine.exact_expected_trace(&[w("g1")], 3),
            Err(Error::EmptyPermutationSet { .. })
        ));
    }

    #[test]
    fn mc_identity_is_exact() {
        let engine = Engine::new(model("inf", &["all"]), 30);
        let est = engine.mc_expected_trace(&[w("g1 g1*")], 30, 5000, 1).unwrap();
        assert_eq!(est.estimate, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn mc_is_deterministic_per_seed() {
        let engine = Engine::new(model("inf", &["all"]), 20);
        let a = engine.mc_expected_trace(&[w("g1")], 20, 20000, 42).unwrap();
        let b = engine.mc_expected_trace(&[w("g1")], 20, 20000, 42).unwrap();
        assert_eq!(a, b);
        let c = engine.mc_expected_trace(&[w("g1")], 20, 20000, 43).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn mc_close_to_exact() {
        let engine = Engine::new(model("inf", &["all"]), 50);
        let exact = engine.exact_expected_trace(&[w("g1")], 50).unwrap();
        let exact_f = rational_to_f64(&exact);
        let est = engine.mc_expected_trace(&[w("g1")], 50, 40000, 9).unwrap();
        assert!(
            (est.estimate - exact_f).abs() <= 5.0 * est.stderr,
            "{est:?} vs {exact_f}"
        );
    }

    #[test]
    fn covariance_of_identity_word_vanishes() {
        let engine = Engine::new(model("inf", &["all"]), 6);
        let scan = engine
            .covariance_scan(&w("g1 g1*"), &w("g1"), &[2, 4, 6])
            .unwrap();
        for (_, cov) in scan {
            assert!(cov.is_zero());
        }
    }

    #[test]
    fn variance_of_trace_matches_brute_force() {
        // Var(tr U) over uniform S_N, N in {2,3,4}
        let engine = Engine::new(model("inf", &["all"]), 4);
        for n in [2u64, 3, 4] {
            let joint = engine
                .brute_expected_trace(&[w("g1"), w("g1")], n)
                .unwrap();
            let single = engine.brute_expected_trace(&[w("g1")], n).unwrap();
            let brute_var = joint - &single * &single;
            let scan = engine.covariance_scan(&w("g1"), &w("g1"), &[n]).unwrap();
            assert_eq!(scan[0].1, brute_var);
        }
        // degenerate one-element family
        let singleton = Engine::new(model("2", &["finite:2"]), 2);
        let scan = singleton.covariance_scan(&w("g1"), &w("g1"), &[2]).unwrap();
        assert!(scan[0].1.is_zero());
    }

    #[test]
    fn freeness_verdict_desk_scale() {
        let engine = Engine::new(model("inf", &["all"]), 60);
        let report = engine.freeness_verdict(2, &[20, 40, 60], 2.0).unwrap();
        assert!(report.pass);
        // the identity row deviates by zero
        let row = report
            .rows
            .iter()
            .find(|r| r.word == w("g1 g1*"))
            .unwrap();
        assert!(row.deviations.iter().all(|&d| d == 0.0));
        assert_eq!(row.phi, 1);
    }

    #[test]
    fn feasible_grid_respects_sets() {
        let engine = Engine::new(model("2", &["finite:2"]), 20);
        let grid = engine.feasible_grid(1, 20, 0).unwrap();
        assert_eq!(grid, vec![2, 4, 6, 8, 10, 12, 14, 16, 18, 20]);
        let thinned = engine.feasible_grid(1, 20, 4).unwrap();
        assert_eq!(thinned.len(), 4);
        assert_eq!(thinned[0], 2);
        assert_eq!(*thinned.last().unwrap(), 20);
    }
}
