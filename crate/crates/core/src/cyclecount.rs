//! Exact counting of permutations with cycle lengths restricted to a
//! set `A`, the associated cycle and graph-compatibility probabilities,
//! and exact uniform sampling from `S_N^(A)`.
//!
//! Everything here is exact big-integer / big-rational arithmetic;
//! floating point never enters.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graphs::{all_partitions, ColoredGraph};
use crate::words::Order;

/// A set of allowed cycle lengths.
///
/// The representable shapes are an explicit finite set, the complement
/// of a finite set, all multiples of a fixed `D`, and all positive
/// integers. Counting `S_N^(A)` needs complete membership knowledge of
/// `A` up to `N`, so more general predicates (e.g. "non-squares") are
/// deliberately not representable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CycleSet {
    All,
    Finite(BTreeSet<u64>),
    Cofinite(BTreeSet<u64>),
    Multiples(u64),
}

impl CycleSet {
    pub fn finite(values: impl IntoIterator<Item = u64>) -> Result<Self> {
        let set: BTreeSet<u64> = values.into_iter().collect();
        if set.is_empty() {
            return Err(Error::invalid("finite cycle set must be non-empty"));
        }
        if set.contains(&0) {
            return Err(Error::invalid("cycle lengths are positive"));
        }
        Ok(CycleSet::Finite(set))
    }

    pub fn cofinite(excluded: impl IntoIterator<Item = u64>) -> Result<Self> {
        let set: BTreeSet<u64> = excluded.into_iter().collect();
        if set.contains(&0) {
            return Err(Error::invalid("cycle lengths are positive"));
        }
        Ok(CycleSet::Cofinite(set))
    }

    pub fn multiples(d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("multiples divisor must be positive"));
        }
        Ok(CycleSet::Multiples(d))
    }

    pub fn contains(&self, j: u64) -> bool {
        if j == 0 {
            return false;
        }
        match self {
            CycleSet::All => true,
            CycleSet::Finite(set) => set.contains(&j),
            CycleSet::Cofinite(excluded) => !excluded.contains(&j),
            CycleSet::Multiples(d) => j % d == 0,
        }
    }

    /// `sup A`, infinite for every unbounded variant.
    pub fn sup(&self) -> Order {
        match self {
            CycleSet::Finite(set) => Order::Finite(*set.iter().next_back().unwrap()),
            _ => Order::Infinite,
        }
    }

    /// Greatest common divisor of the elements.
    pub fn gcd(&self) -> u64 {
        match self {
            CycleSet::All | CycleSet::Cofinite(_) => 1,
            CycleSet::Multiples(d) => *d,
            CycleSet::Finite(set) => set.iter().fold(0u64, |acc, &k| acc.gcd(&k)),
        }
    }

    /// The elements of `A ∩ [n]`, ascending.
    pub fn members_up_to(&self, n: u64) -> Vec<u64> {
        match self {
            CycleSet::All => (1..=n).collect(),
            CycleSet::Finite(set) => set.iter().copied().take_while(|&k| k <= n).collect(),
            CycleSet::Cofinite(excluded) => {
                (1..=n).filter(|j| !excluded.contains(j)).collect()
            }
            CycleSet::Multiples(d) => (1..).map(|m| m * d).take_while(|&k| k <= n).collect(),
        }
    }

    /// Text syntax: `all`, `finite:1,3,5`, `cofinite:1`, `multiples:3`.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.eq_ignore_ascii_case("all") {
            return Ok(CycleSet::All);
        }
        let (kind, rest) = trimmed
            .split_once(':')
            .ok_or_else(|| Error::parse("cycle set", text))?;
        let values: Result<Vec<u64>> = rest
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::parse("cycle set", text))
            })
            .collect();
        let values = values?;
        match kind.trim() {
            "finite" => CycleSet::finite(values),
            "cofinite" => CycleSet::cofinite(values),
            "multiples" => {
                if values.len() != 1 {
                    return Err(Error::parse("cycle set", text));
                }
                CycleSet::multiples(values[0])
            }
            _ => Err(Error::parse("cycle set", text)),
        }
    }
}

impl fmt::Display for CycleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(set: &BTreeSet<u64>) -> String {
            set.iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
        match self {
            CycleSet::All => write!(f, "all"),
            CycleSet::Finite(set) => write!(f, "finite:{}", join(set)),
            CycleSet::Cofinite(excluded) => write!(f, "cofinite:{}", join(excluded)),
            CycleSet::Multiples(d) => write!(f, "multiples:{d}"),
        }
    }
}

/// Exact table of `a_N = |S_N^(A)|` for `N` up to a bound, built from
/// the one-point recurrence
/// `a_N = sum over j in A∩[N] of (N-1)!/(N-j)! * a_(N-j)`.
#[derive(Debug, Clone)]
pub struct CountTable {
    set: CycleSet,
    a: Vec<BigUint>,
    factorials: Vec<BigUint>,
}

impl CountTable {
    pub fn build(set: &CycleSet, n_max: usize) -> CountTable {
        let mut table = CountTable {
            set: set.clone(),
            a: vec![BigUint::one()],
            factorials: vec![BigUint::one()],
        };
        table.extend_to(n_max);
        table
    }

    /// Grow the table (no-op if already large enough).
    pub fn extend_to(&mut self, n_max: usize) {
        while self.factorials.len() <= n_max {
            let n = self.factorials.len();
            let next = &self.factorials[n - 1] * BigUint::from(n);
            self.factorials.push(next);
        }
        while self.a.len() <= n_max {
            let n = self.a.len();
            let next = match &self.set {
                // a_N = N! for the unrestricted set
                CycleSet::All => self.factorials[n].clone(),
                _ => {
                    let mut sum = BigUint::zero();
                    let mut falling = BigUint::one();
                    let mut prev_j = 1u64;
                    for j in self.set.members_up_to(n as u64) {
                        // extend (N-1)(N-2)...(N-j+1) from the previous j
                        for i in prev_j..j {
                            falling *= BigUint::from(n as u64 - i);
                        }
                        prev_j = j;
                        sum += &falling * &self.a[n - j as usize];
                    }
                    sum
                }
            };
            self.a.push(next);
        }
    }

    pub fn set(&self) -> &CycleSet {
        &self.set
    }

    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    fn check_range(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::TableTooSmall {
                n: n as u64,
                max: self.n_max() as u64,
            });
        }
        Ok(())
    }

    /// `a_N`, exact.
    pub fn a(&self, n: usize) -> Result<&BigUint> {
        self.check_range(n)?;
        Ok(&self.a[n])
    }

    pub fn factorial(&self, n: usize) -> Result<&BigUint> {
        self.check_range(n)?;
        Ok(&self.factorials[n])
    }

    /// `t_N = a_N / N!`.
    pub fn t(&self, n: usize) -> Result<BigRational> {
        self.check_range(n)?;
        Ok(BigRational::new(
            BigInt::from(self.a[n].clone()),
            BigInt::from(self.factorials[n].clone()),
        ))
    }

    /// `S_N^(A)` non-empty?
    pub fn is_feasible(&self, n: usize) -> Result<bool> {
        Ok(!self.a(n)?.is_zero())
    }

    /// Smallest `N0` such that every multiple of `gcd(A)` in
    /// `[N0, n_max]` is feasible (a scan of the stored table).
    pub fn feasibility_threshold(&self) -> u64 {
        let g = self.set.gcd();
        let mut threshold = g;
        let mut m = g;
        while m as usize <= self.n_max() {
            if self.a[m as usize].is_zero() {
                threshold = m + g;
            }
            m += g;
        }
        threshold
    }

    fn require_nonempty(&self, n: usize) -> Result<()> {
        if self.a(n)?.is_zero() {
            return Err(Error::EmptyPermutationSet {
                set: self.set.to_string(),
                n: n as u64,
            });
        }
        Ok(())
    }

    /// Probability that a fixed point of `[N]` lies in a cycle of
    /// length `k` under the uniform distribution on `S_N^(A)`:
    /// `(N-1)!/(N-k)! * a_(N-k) / a_N`.
    pub fn cycle_probability(&self, n: usize, k: u64) -> Result<BigRational> {
        self.require_nonempty(n)?;
        if !self.set.contains(k) {
            return Err(Error::CycleLengthNotInSet {
                k,
                set: self.set.to_string(),
            });
        }
        if k as usize > n {
            return Err(Error::invalid(format!("cycle length {k} exceeds N = {n}")));
        }
        let num = self.cycle_weight(n, k);
        Ok(BigRational::new(
            BigInt::from(num),
            BigInt::from(self.a[n].clone()),
        ))
    }

    /// `(N-1)(N-2)...(N-k+1) * a_(N-k)`: the number of permutations in
    /// `S_N^(A)` whose cycle through a fixed point has length `k`.
    fn cycle_weight(&self, n: usize, k: u64) -> BigUint {
        let mut falling = BigUint::one();
        for i in 1..k {
            falling *= BigUint::from(n as u64 - i);
        }
        falling * &self.a[n - k as usize]
    }

    /// Probability that a uniform element of `S_N^(A)` is compatible
    /// with (an embedded copy of) a monocolored admissible graph:
    /// `sigma(i) = j` for every edge `i -> j`.
    ///
    /// Forced loops must be cycles with length in `A`; strings contract
    /// to weighted atoms which are assembled into cycles together with
    /// free points. The sum runs over set partitions of the atoms and,
    /// per assembled cycle, over the number of free points inserted.
    pub fn graph_probability(&self, n: usize, graph: &ColoredGraph) -> Result<BigRational> {
        self.require_nonempty(n)?;
        let mut colors: Vec<usize> = graph.edges().iter().map(|e| e.color).collect();
        colors.dedup();
        if colors.len() > 1 {
            return Err(Error::NotMonocolored);
        }
        if !graph.is_admissible() {
            return Err(Error::NotAdmissible);
        }
        if graph.num_vertices() > n {
            return Err(Error::invalid(format!(
                "graph has {} vertices but N = {n}",
                graph.num_vertices()
            )));
        }

        let mut loop_points = 0u64;
        let mut atom_weights: Vec<u64> = Vec::new();
        for path in graph.paths()? {
            if path.is_loop {
                if !self.set.contains(path.length as u64) {
                    return Ok(BigRational::zero());
                }
                loop_points += path.length as u64;
            } else {
                atom_weights.push(path.length as u64 + 1);
            }
        }
        let after_loops = n as u64 - loop_points;
        let atom_total: u64 = atom_weights.iter().sum();
        let free = (after_loops - atom_total) as usize;

        let coefficients = self.atom_assembly_counts(&atom_weights, free);

        // card = sum over T of F!/(F-T)! * a_(F-T) * C[T]
        let mut card = BigUint::zero();
        let mut falling = BigUint::one();
        for (t, coeff) in coefficients.iter().enumerate() {
            if !coeff.is_zero() {
                card += &falling * &self.a[free - t] * coeff;
            }
            if t < free {
                falling *= BigUint::from((free - t) as u64);
            }
        }
        Ok(BigRational::new(
            BigInt::from(card),
            BigInt::from(self.a[n].clone()),
        ))
    }

    /// `C[T]`: over all ways to partition the atoms into cycles, the
    /// weighted count of assignments using exactly `T` free points,
    /// where a cycle made of `m` atoms and `t` chosen free points
    /// contributes `(m+t-1)!/t! = (t+1)(t+2)...(t+m-1)` arrangements
    /// and is admitted only if its total length lies in `A`.
    fn atom_assembly_counts(&self, atom_weights: &[u64], free: usize) -> Vec<BigUint> {
        let m = atom_weights.len();
        let mut total = vec![BigUint::zero(); free + 1];
        if m == 0 {
            total[0] = BigUint::one();
            return total;
        }
        for partition in all_partitions(m) {
            // convolve the per-cycle polynomials
            let mut acc = vec![BigUint::zero(); free + 1];
            acc[0] = BigUint::one();
            let mut dead = false;
            for block in partition.blocks() {
                let group_size = block.len() as u64;
                let weight: u64 = block.iter().map(|&i| atom_weights[i]).sum();
                let mut poly = vec![BigUint::zero(); free + 1];
                let mut any = false;
                for (t, item) in poly.iter_mut().enumerate() {
                    if self.set.contains(weight + t as u64) {
                        let mut c = BigUint::one();
                        for i in 1..group_size {
                            c *= BigUint::from(t as u64 + i);
                        }
                        *item = c;
                        any = true;
                    }
                }
                if !any {
                    dead = true;
                    break;
                }
                let mut next = vec![BigUint::zero(); free + 1];
                for (i, a) in acc.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, p) in poly.iter().take(free + 1 - i).enumerate() {
                        if !p.is_zero() {
                            next[i + j] += a * p;
                        }
                    }
                }
                acc = next;
            }
            if !dead {
                for (t, a) in acc.into_iter().enumerate() {
                    total[t] += a;
                }
            }
        }
        total
    }
}

/// Coefficient-by-coefficient check of the exponential generating
/// function identity: the truncated exponential of
/// `sum over k in A of z^k/k` must reproduce every `t_N` exactly.
///
/// The exponential is evaluated as the partial sum of powers
/// `sum f^m / m!`, a route independent of the counting recurrence.
pub fn egf_crosscheck(table: &CountTable) -> bool {
    let n_max = table.n_max();
    let zero = BigRational::zero();
    // f = sum z^k/k over A∩[n_max]  (f_0 = 0)
    let mut f = vec![zero.clone(); n_max + 1];
    for k in table.set().members_up_to(n_max as u64) {
        f[k as usize] = BigRational::new(BigInt::one(), BigInt::from(k));
    }
    let mut result = vec![zero.clone(); n_max + 1];
    result[0] = BigRational::one();
    let mut power = result.clone(); // f^0
    let mut m_factorial = BigRational::one();
    for m in 1..=n_max {
        // power <- power * f, truncated
        let mut next = vec![zero.clone(); n_max + 1];
        for (i, p) in power.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, fj) in f.iter().take(n_max + 1 - i).enumerate() {
                if !fj.is_zero() {
                    let prod = p * fj;
                    next[i + j] += prod;
                }
            }
        }
        power = next;
        m_factorial *= BigRational::from_integer(BigInt::from(m));
        for (i, p) in power.iter().enumerate() {
            if !p.is_zero() {
                result[i] += p / &m_factorial;
            }
        }
    }
    (0..=n_max).all(|n| table.t(n).unwrap() == result[n])
}

/// Cycle type of a 0-based one-line permutation, sorted ascending.
pub fn cycle_type(map: &[u32]) -> Vec<u64> {
    let mut seen = vec![false; map.len()];
    let mut lengths = Vec::new();
    for start in 0..map.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            len += 1;
            cur = map[cur] as usize;
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    lengths
}

/// Brute-force enumeration of `S_N^(A)` as 0-based one-line arrays, in
/// lexicographic order. Exponential in `N`; intended as an oracle and
/// for small brute-force expectations.
pub fn enumerate_restricted(set: &CycleSet, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut perm: Vec<u32> = (0..n as u32).collect();
    loop {
        if cycle_type(&perm).iter().all(|&l| set.contains(l)) {
            out.push(perm.clone());
        }
        // next lexicographic permutation
        let mut i = n - 1;
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let mut j = n - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
}

/// A sampled permutation: 0-based one-line form plus its cycle type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSample {
    pub n: usize,
    /// `map[i]` is the image of `i`.
    pub map: Vec<u32>,
    pub cycle_type: Vec<u64>,
}

/// Exactly uniform sampler over `S_N^(A)`.
///
/// The cycle through the smallest unplaced point gets its length `k`
/// with the exact conditional probability for the remaining point
/// count, then the cycle is filled with a uniformly random ordered
/// selection of the other remaining points; recurse on the rest.
#[derive(Debug, Clone)]
pub struct Sampler {
    n: usize,
    /// Per remaining-count `M`: admissible lengths and cumulative
    /// big-integer weights (the last entry equals `a_M`). `None` for
    /// infeasible `M` (never reached during sampling).
    choices: Vec<Option<(Vec<u64>, Vec<BigUint>)>>,
}

impl Sampler {
    pub fn new(table: &CountTable, n: usize) -> Result<Sampler> {
        table.require_nonempty(n)?;
        let mut choices = Vec::with_capacity(n + 1);
        for m in 0..=n {
            if table.a(m)?.is_zero() {
                choices.push(None);
                continue;
            }
            let mut lengths = Vec::new();
            let mut cumulative = Vec::new();
            let mut running = BigUint::zero();
            for k in table.set().members_up_to(m as u64) {
                let w = table.cycle_weight(m, k);
                if w.is_zero() {
                    continue;
                }
                running += w;
                lengths.push(k);
                cumulative.push(running.clone());
            }
            debug_assert!(m == 0 || &running == table.a(m).unwrap());
            choices.push(Some((lengths, cumulative)));
        }
        Ok(Sampler { n, choices })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PermutationSample {
        let n = self.n;
        let mut map: Vec<u32> = vec![0; n];
        let mut pool: Vec<u32> = (0..n as u32).collect();
        let mut cycle_type = Vec::new();
        while !pool.is_empty() {
            let m = pool.len();
            // smallest unplaced point anchors the next cycle
            let (min_pos, _) = pool
                .iter()
                .enumerate()
                .min_by_key(|&(_, v)| v)
                .unwrap();
            let anchor = pool.swap_remove(min_pos);
            let (lengths, cumulative) = self.choices[m]
                .as_ref()
                .expect("reachable remaining counts are feasible");
            let total = cumulative.last().unwrap();
            let draw = rng.gen_biguint_below(total);
            let idx = cumulative.partition_point(|c| *c <= draw);
            let k = lengths[idx];
            cycle_type.push(k);
            let mut prev = anchor;
            for _ in 1..k {
                let pick = rng.gen_range(0..pool.len());
                let point = pool.swap_remove(pick);
                map[prev as usize] = point;
                prev = point;
            }
            map[prev as usize] = anchor;
        }
        cycle_type.sort_unstable();
        PermutationSample { n, map, cycle_type }
    }
}
