use crate::model::{balance_row, enumerate_states, ModelError, RateParams, SchemeConfig};

use super::{InitialGuess, SolverError, SolverSettings, StationaryDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct IterativeSolution {
    pub distribution: StationaryDistribution,
    /// Full sweeps performed.
    pub iterations: usize,
}

/// Solves `π(n) = ε_A(n) / ε_B(n)` by in-place sweeps in lexicographic state
/// order, normalizing after each sweep.
///
/// Stops once every state satisfies `|π - π_old| <= α·π`; states that are
/// zero in both iterates are skipped. States with neither inflow nor outflow
/// are unreachable and stay at zero.
pub fn solve_iterative(
    config: &SchemeConfig,
    rates: &RateParams,
    settings: &SolverSettings,
) -> Result<IterativeSolution, SolverError> {
    settings.validate()?;
    rates.validate()?;
    let space = enumerate_states(config)?;
    let n = space.len();
    let rows: Vec<_> = (0..n).map(|i| balance_row(&space, i, rates)).collect();
    for (row, s) in rows.iter().zip(space.states()) {
        if row.outflow == 0.0 && !row.inflow.is_empty() {
            return Err(ModelError::DegenerateState(*s).into());
        }
    }

    let mut pi = initial(&settings.init, n)?;
    let mut old = vec![0.0; n];
    let mut max_change = f64::INFINITY;
    for sweep in 1..=settings.max_iterations {
        old.copy_from_slice(&pi);
        for i in 0..n {
            let row = &rows[i];
            pi[i] = if row.outflow > 0.0 {
                row.eps_a(&pi) / row.outflow
            } else {
                0.0
            };
        }
        let g: f64 = pi.iter().sum();
        if !(g > 0.0 && g.is_finite()) {
            return Err(SolverError::Numerical(format!("normalization constant is {g} after sweep {sweep}")));
        }
        pi.iter_mut().for_each(|p| *p /= g);

        max_change = 0.0;
        let mut converged = true;
        for (p, q) in pi.iter().zip(&old) {
            if *p == 0.0 && *q == 0.0 {
                continue;
            }
            let change = (p - q).abs();
            if change > settings.alpha * p {
                converged = false;
            }
            max_change = max_change.max(if *p > 0.0 { change / p } else { f64::INFINITY });
        }
        if converged {
            let distribution = StationaryDistribution::new(space, pi)?;
            return Ok(IterativeSolution {
                distribution,
                iterations: sweep,
            });
        }
    }
    Err(SolverError::NonConvergence {
        iterations: settings.max_iterations,
        max_change,
    })
}

fn initial(init: &InitialGuess, n: usize) -> Result<Vec<f64>, SolverError> {
    match init {
        InitialGuess::Uniform => Ok(vec![1.0 / n as f64; n]),
        InitialGuess::Custom(v) => {
            if v.len() != n {
                return Err(SolverError::Settings(format!(
                    "initial guess has {} entries, state space has {n}",
                    v.len()
                )));
            }
            if v.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
                return Err(SolverError::Settings("initial guess must be finite and non-negative".into()));
            }
            let g: f64 = v.iter().sum();
            if g <= 0.0 {
                return Err(SolverError::Settings("initial guess has zero mass".into()));
            }
            Ok(v.iter().map(|p| p / g).collect())
        }
    }
}
