use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use crate::model::{enumerate_states, transition_list, ModelError, RateParams, SchemeConfig, SystemState};

use super::{SolverError, StationaryDistribution};

const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DirectSolution {
    pub distribution: StationaryDistribution,
    /// States outside the recurrent class, held at zero probability.
    pub pruned: Vec<SystemState>,
}

/// Solves `πQ = 0, Σπ = 1` on the unique closed communicating class of the
/// generator built from [`transition_list`].
pub fn solve_direct(config: &SchemeConfig, rates: &RateParams) -> Result<DirectSolution, SolverError> {
    rates.validate()?;
    let space = enumerate_states(config)?;
    let n = space.len();

    let mut edges: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for s in space.states() {
        let mut out = Vec::new();
        for t in transition_list(s, config, rates) {
            let j = space
                .index_of(&t.target)
                .ok_or(ModelError::UnknownState(t.target))?;
            out.push((j, t.rate));
        }
        edges.push(out);
    }

    let class = recurrent_class(&edges)?;
    let mut in_class = vec![None; n];
    for (k, &i) in class.iter().enumerate() {
        in_class[i] = Some(k);
    }

    let m = class.len();
    // Transposed generator restricted to the class; the last balance row is
    // replaced by the normalization condition.
    let mut a = DMatrix::<f64>::zeros(m, m);
    for (k, &i) in class.iter().enumerate() {
        for &(j, r) in &edges[i] {
            if let Some(l) = in_class[j] {
                a[(l, k)] += r;
                a[(k, k)] -= r;
            }
        }
    }
    let generator = a.clone();
    for k in 0..m {
        a[(m - 1, k)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(m);
    b[m - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| SolverError::Numerical("generator system is singular".into()))?;

    let scale = edges
        .iter()
        .map(|e| e.iter().map(|&(_, r)| r).sum::<f64>())
        .fold(1.0, f64::max);
    let residual = (&generator * &x).amax();
    if residual > RESIDUAL_TOLERANCE * scale {
        return Err(SolverError::Numerical(format!("balance residual {residual:e} too large")));
    }

    let mut pi = vec![0.0; n];
    for (k, &i) in class.iter().enumerate() {
        pi[i] = x[k].max(0.0);
    }
    let g: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= g);

    let pruned = space
        .states()
        .iter()
        .enumerate()
        .filter(|(i, _)| in_class[*i].is_none())
        .map(|(_, s)| *s)
        .collect();
    let distribution = StationaryDistribution::new(space, pi)?;
    Ok(DirectSolution { distribution, pruned })
}

/// Members of the single closed communicating class, in index order.
///
/// States with no transitions in either direction are unreachable and are
/// ignored; any other closed class, including an absorbing state, counts.
fn recurrent_class(edges: &[Vec<(usize, f64)>]) -> Result<Vec<usize>, SolverError> {
    let n = edges.len();
    let mut has_in = vec![false; n];
    for out in edges {
        for &(j, _) in out {
            has_in[j] = true;
        }
    }
    let reach: Vec<Vec<bool>> = (0..n).map(|i| reachable(edges, i)).collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] || (edges[i].is_empty() && !has_in[i]) {
            continue;
        }
        let closed = (0..n).all(|j| !reach[i][j] || reach[j][i]);
        if !closed {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
        for &j in &members {
            assigned[j] = true;
        }
        classes.push(members);
    }
    match classes.len() {
        1 => Ok(classes.pop().unwrap_or_default()),
        k => Err(SolverError::SingularSystem { classes: k }),
    }
}

fn reachable(edges: &[Vec<(usize, f64)>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; edges.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for &(j, _) in &edges[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen
}
