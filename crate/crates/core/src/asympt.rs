//! Floating-point diagnostics confirming asymptotic laws implied by
//! the exact count tables: the cycle-probability power law, the
//! graph-compatibility power law, coefficient-ratio behavior of the
//! counting EGF, the limiting density for cofinite sets, the
//! multiples-of-D closed form, and the construction of a set whose
//! cycle probability violates the power law.
//!
//! Ratios are computed from exact rationals and converted to floating
//! point only at the end; integer-exponent cases never round at all.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use crate::cyclecount::{CountTable, CycleSet};
use crate::error::{Error, Result};
use crate::graphs::ColoredGraph;
use crate::numeric::{biguint_ratio_to_f64, rational_to_f64};
use crate::words::Order;

/// Observed-over-predicted ratios along a grid, with a trend verdict.
#[derive(Debug, Clone)]
pub struct AsymptoticReport {
    pub law: String,
    pub grid: Vec<u64>,
    pub observed: Vec<f64>,
    pub predicted: Vec<f64>,
    pub ratio: Vec<f64>,
    /// OLS slope of `log observed` against `log N`, when meaningful.
    pub fitted_exponent: Option<f64>,
    pub tolerance: f64,
    /// The observed quantity is identically zero (e.g. the graph is
    /// not an A-graph), so no ratios exist.
    pub identically_zero: bool,
    pub pass: bool,
}

/// Ordinary least squares slope of `log y` against `log x`.
pub fn slope_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::invalid("slope fit needs at least 3 points"));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::invalid("slope fit needs positive coordinates"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    if sxx == 0.0 {
        return Err(Error::invalid("slope fit needs distinct x values"));
    }
    Ok(sxy / sxx)
}

/// Mean `|ratio - 1|` over the last third must not exceed the first
/// third, and the final ratio must land within the tolerance band.
fn trend_pass(ratio: &[f64], tolerance: f64) -> bool {
    if ratio.is_empty() {
        return false;
    }
    let k = ratio.len();
    let third = (k / 3).max(1);
    let first = ratio[..third].iter().map(|r| (r - 1.0).abs()).sum::<f64>() / third as f64;
    let last = ratio[k - third..]
        .iter()
        .map(|r| (r - 1.0).abs())
        .sum::<f64>()
        / third as f64;
    last <= first + 1e-12 && (ratio[k - 1] - 1.0).abs() <= tolerance
}

fn check_grid(grid: &[u64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("empty grid"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("grid must be strictly increasing"));
    }
    Ok(())
}

fn fit_exponent(grid: &[u64], observed: &[f64]) -> Option<f64> {
    let points: Vec<(f64, f64)> = grid
        .iter()
        .zip(observed)
        .map(|(&n, &v)| (n as f64, v))
        .collect();
    slope_fit(&points).ok()
}

/// Trend of `p_N(k)` against the predicted power `N^(k/d - 1)` with
/// `d = sup A` (and `k/infinity = 0`). Default tolerance: 0.2 for
/// finite `A`, 1e-6 otherwise.
pub fn cycle_probability_trend(
    table: &CountTable,
    k: u64,
    grid: &[u64],
    tolerance: Option<f64>,
) -> Result<AsymptoticReport> {
    check_grid(grid)?;
    let sup = table.set().sup();
    let tolerance = tolerance.unwrap_or(match sup {
        Order::Finite(_) => 0.2,
        Order::Infinite => 1e-6,
    });
    let mut observed = Vec::with_capacity(grid.len());
    let mut predicted = Vec::with_capacity(grid.len());
    let mut ratio = Vec::with_capacity(grid.len());
    for &n in grid {
        let p = table.cycle_probability(n as usize, k)?;
        observed.push(rational_to_f64(&p));
        match sup {
            // integer exponents stay exact until the final conversion
            Order::Infinite => {
                predicted.push(1.0 / n as f64);
                let exact = &p * BigRational::from_integer(BigInt::from(n));
                ratio.push(rational_to_f64(&exact));
            }
            Order::Finite(d) if d == k => {
                predicted.push(1.0);
                ratio.push(rational_to_f64(&p));
            }
            Order::Finite(d) => {
                let exponent = k as f64 / d as f64 - 1.0;
                let pred = (n as f64).powf(exponent);
                predicted.push(pred);
                ratio.push(rational_to_f64(&p) / pred);
            }
        }
    }
    let pass = trend_pass(&ratio, tolerance);
    Ok(AsymptoticReport {
        law: format!("cycle-probability p_N({k}) for {}", table.set()),
        grid: grid.to_vec(),
        fitted_exponent: fit_exponent(grid, &observed),
        observed,
        predicted,
        ratio,
        tolerance,
        identically_zero: false,
        pass,
    })
}

/// Trend of the graph-compatibility probability against the predicted
/// power `N^(-E + L + sum over loops (l/d - 1))`. A graph that is not
/// an `A`-graph has probability identically zero and is reported as
/// such rather than rejected.
pub fn graph_probability_trend(
    table: &CountTable,
    graph: &ColoredGraph,
    grid: &[u64],
    tolerance: Option<f64>,
) -> Result<AsymptoticReport> {
    check_grid(grid)?;
    let tolerance = tolerance.unwrap_or(0.2);
    let paths = graph.paths()?;
    let edges = graph.num_edges() as i64;
    let loops: Vec<u64> = paths
        .iter()
        .filter(|p| p.is_loop)
        .map(|p| p.length as u64)
        .collect();
    let strings_ok = match table.set().sup() {
        Order::Finite(d) => paths
            .iter()
            .filter(|p| !p.is_loop)
            .all(|p| (p.length as u64) < d),
        Order::Infinite => true,
    };
    let is_a_graph = strings_ok && loops.iter().all(|&l| table.set().contains(l));

    if !is_a_graph {
        let mut observed = Vec::with_capacity(grid.len());
        for &n in grid {
            let p = table.graph_probability(n as usize, graph)?;
            observed.push(rational_to_f64(&p));
        }
        let pass = observed.iter().all(|&v| v == 0.0);
        return Ok(AsymptoticReport {
            law: format!("graph-probability for {} (not an A-graph)", table.set()),
            grid: grid.to_vec(),
            observed,
            predicted: vec![0.0; grid.len()],
            ratio: Vec::new(),
            fitted_exponent: None,
            tolerance,
            identically_zero: true,
            pass,
        });
    }

    // exponent -E + L + sum over loops of (l/d - 1)
    let loop_count = loops.len() as i64;
    let (int_exponent, frac_part) = match table.set().sup() {
        Order::Infinite => (-edges + loop_count - loop_count, 0.0),
        Order::Finite(d) => {
            let num: u64 = loops.iter().sum();
            (
                -edges,
                num as f64 / d as f64,
            )
        }
    };
    let mut observed = Vec::with_capacity(grid.len());
    let mut predicted = Vec::with_capacity(grid.len());
    let mut ratio = Vec::with_capacity(grid.len());
    for &n in grid {
        let p = table.graph_probability(n as usize, graph)?;
        observed.push(rational_to_f64(&p));
        if frac_part == 0.0 {
            // integer exponent: exact ratio
            let exponent = int_exponent;
            let mut scale = BigRational::one();
            for _ in 0..exponent.unsigned_abs() {
                scale *= BigRational::from_integer(BigInt::from(n));
            }
            let exact = if exponent >= 0 { &p / &scale } else { &p * &scale };
            predicted.push((n as f64).powi(exponent as i32));
            ratio.push(rational_to_f64(&exact));
        } else {
            let exponent = int_exponent as f64 + frac_part;
            let pred = (n as f64).powf(exponent);
            predicted.push(pred);
            ratio.push(rational_to_f64(&p) / pred);
        }
    }
    let pass = trend_pass(&ratio, tolerance);
    Ok(AsymptoticReport {
        law: format!("graph-probability for {}", table.set()),
        grid: grid.to_vec(),
        fitted_exponent: fit_exponent(grid, &observed),
        observed,
        predicted,
        ratio,
        tolerance,
        identically_zero: false,
        pass,
    })
}

/// Coefficient-ratio law for a finite set: with `D = gcd(A)` and
/// `d = max A`, the ratio `t_(N-D) / t_N` behaves like `N^(D/d)`.
/// Grid entries are sizes `N` (multiples of `D` above the feasibility
/// threshold).
pub fn hayman_ratio_check(table: &CountTable, grid: &[u64]) -> Result<AsymptoticReport> {
    check_grid(grid)?;
    let set = table.set().clone();
    let d_max = match set.sup() {
        Order::Finite(d) => d,
        Order::Infinite => {
            return Err(Error::invalid("coefficient-ratio check needs a finite set"))
        }
    };
    let d_gcd = set.gcd();
    let singleton = d_gcd == d_max;
    let tolerance = if singleton { 0.01 } else { 0.2 };
    let mut observed = Vec::with_capacity(grid.len());
    let mut predicted = Vec::with_capacity(grid.len());
    let mut ratio = Vec::with_capacity(grid.len());
    for &n in grid {
        if n % d_gcd != 0 || n < d_gcd {
            return Err(Error::invalid(format!(
                "grid point {n} is not a positive multiple of gcd = {d_gcd}"
            )));
        }
        if !table.is_feasible(n as usize)? || !table.is_feasible((n - d_gcd) as usize)? {
            return Err(Error::EmptyPermutationSet {
                set: set.to_string(),
                n,
            });
        }
        let t_ratio = table.t((n - d_gcd) as usize)? / table.t(n as usize)?;
        observed.push(rational_to_f64(&t_ratio));
        if singleton {
            // exact prediction N; compare exactly
            predicted.push(n as f64);
            let exact = t_ratio / BigRational::from_integer(BigInt::from(n));
            ratio.push(rational_to_f64(&exact));
        } else {
            let pred = (n as f64).powf(d_gcd as f64 / d_max as f64);
            predicted.push(pred);
            ratio.push(rational_to_f64(&t_ratio) / pred);
        }
    }
    let pass = trend_pass(&ratio, tolerance);
    Ok(AsymptoticReport {
        law: format!("coefficient-ratio for {set}"),
        grid: grid.to_vec(),
        observed,
        predicted,
        ratio,
        fitted_exponent: None,
        tolerance,
        identically_zero: false,
        pass,
    })
}

/// Limiting density for a cofinite set: `t_N` converges to
/// `exp(-sum of 1/j over the excluded lengths)`.
pub fn hildebrand_limit(
    table: &CountTable,
    grid: &[u64],
    tolerance: Option<f64>,
) -> Result<AsymptoticReport> {
    check_grid(grid)?;
    let tolerance = tolerance.unwrap_or(1e-6);
    let excluded: Vec<u64> = match table.set() {
        CycleSet::All => Vec::new(),
        CycleSet::Cofinite(excluded) => excluded.iter().copied().collect(),
        _ => {
            return Err(Error::invalid(
                "limiting density applies to cofinite sets",
            ))
        }
    };
    let limit = (-excluded.iter().map(|&j| 1.0 / j as f64).sum::<f64>()).exp();
    let mut observed = Vec::with_capacity(grid.len());
    let mut ratio = Vec::with_capacity(grid.len());
    for &n in grid {
        let t = rational_to_f64(&table.t(n as usize)?);
        observed.push(t);
        ratio.push(t / limit);
    }
    let pass = (observed.last().unwrap() - limit).abs() < tolerance;
    Ok(AsymptoticReport {
        law: format!("limiting density for {}", table.set()),
        grid: grid.to_vec(),
        observed,
        predicted: vec![limit; grid.len()],
        ratio,
        fitted_exponent: None,
        tolerance,
        identically_zero: false,
        pass,
    })
}

/// For `A` = multiples of `D`, the density has the exact closed form
/// `t_(DN) = (1/N!) * (1/D)(1/D + 1)...(1/D + N - 1)`. Checks the
/// recurrence against the closed form for all `N <= n_max`, and that
/// `DN * p_(DN)(D)` trends to 1.
pub fn multiples_closed_form(d: u64, n_max: usize) -> Result<bool> {
    let set = CycleSet::multiples(d)?;
    let table = CountTable::build(&set, d as usize * n_max);
    let inv_d = BigRational::new(BigInt::one(), BigInt::from(d));
    let mut rising = BigRational::one();
    let mut factorial = BigRational::one();
    for n in 1..=n_max {
        rising *= &inv_d + BigRational::from_integer(BigInt::from(n as u64 - 1));
        factorial *= BigRational::from_integer(BigInt::from(n as u64));
        let closed = &rising / &factorial;
        if table.t(d as usize * n)? != closed {
            return Ok(false);
        }
    }
    // DN * p_(DN)(D) -> 1 despite the divergent complement
    let mut deviations = Vec::new();
    for n in 1..=n_max {
        let size = d * n as u64;
        let p = table.cycle_probability(size as usize, d)?;
        let scaled = p * BigRational::from_integer(BigInt::from(size));
        deviations.push((rational_to_f64(&scaled) - 1.0).abs());
    }
    Ok(deviations.last().unwrap() <= deviations.first().unwrap())
}

/// One stage of the anomalous-set construction.
#[derive(Debug, Clone)]
pub struct CounterexampleStage {
    pub stage: usize,
    /// The witnessed size `N_k`.
    pub n: u64,
    /// The set the product was evaluated against.
    pub set: Vec<u64>,
    /// `N_k * p_(N_k)(1) > 2`.
    pub product: f64,
}

#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    pub stages: Vec<CounterexampleStage>,
    /// The search for some stage exhausted the size cap.
    pub hit_cap: bool,
}

/// Greedily build `N_1 < N_2 < ...` with
/// `A_k = {1, N_1 + 1, ..., N_k + 1}` such that
/// `N_(k+1) * p_(N_(k+1))^(A_k)(1) > 2` at every stage,
/// demonstrating that `p_N(1)` need not behave like `1/N`.
/// The inequality is decided in exact integer arithmetic.
pub fn counterexample_sequence(stages: usize, n_cap: u64) -> Result<CounterexampleReport> {
    let mut elements: Vec<u64> = vec![1];
    let mut out = Vec::new();
    let mut prev_n = 0u64;
    for stage in 1..=stages {
        let set = CycleSet::finite(elements.iter().copied())?;
        let mut table = CountTable::build(&set, prev_n as usize);
        let mut found = None;
        for n in (prev_n + 1)..=n_cap {
            table.extend_to(n as usize);
            // N * a_(N-1) > 2 * a_N, exactly
            let lhs = table.a(n as usize - 1)?.clone() * BigUint::from(n);
            let rhs = table.a(n as usize)?.clone() * BigUint::from(2u32);
            if lhs > rhs {
                let product = biguint_ratio_to_f64(&lhs, &(rhs / BigUint::from(2u32)));
                found = Some((n, product));
                break;
            }
        }
        match found {
            Some((n, product)) => {
                out.push(CounterexampleStage {
                    stage,
                    n,
                    set: elements.clone(),
                    product,
                });
                elements.push(n + 1);
                elements.sort_unstable();
                prev_n = n;
            }
            None => {
                return Ok(CounterexampleReport {
                    stages: out,
                    hit_cap: true,
                })
            }
        }
    }
    Ok(CounterexampleReport {
        stages: out,
        hit_cap: false,
    })
}
