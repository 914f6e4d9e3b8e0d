use super::{Move, ModelError, RateParams, SchemeConfig, StateSpace, SystemState};

/// One outgoing transition of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub via: Move,
    pub target: SystemState,
    pub rate: f64,
}

/// Enabled transitions out of `state` with positive rate.
pub fn transition_list(state: &SystemState, config: &SchemeConfig, rates: &RateParams) -> Vec<Transition> {
    Move::ALL
        .iter()
        .filter(|mv| mv.enabled(state, config))
        .filter_map(|&mv| {
            let rate = mv.rate(state, rates);
            let target = mv.target(state)?;
            (rate > 0.0).then_some(Transition { via: mv, target, rate })
        })
        .collect()
}

/// The two sides of the balance equation `π(n)·ε_B(n) = ε_A(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalanceTerms {
    /// Probability flow into the state.
    pub eps_a: f64,
    /// Total rate out of the state.
    pub eps_b: f64,
}

/// Rate-weighted inflow sources and total outflow rate of one state,
/// independent of `π`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceRow {
    /// `(index of source state, rate of the move from it)`.
    pub inflow: Vec<(usize, f64)>,
    pub outflow: f64,
}

impl BalanceRow {
    pub fn eps_a(&self, pi: &[f64]) -> f64 {
        self.inflow.iter().map(|&(j, r)| r * pi[j]).sum()
    }
}

/// Builds the balance row of `space.states()[idx]`.
///
/// `ε_B` sums the enabled outgoing moves; `ε_A` sums, over incoming moves,
/// the rate of that move evaluated at the neighbour it starts from.
pub fn balance_row(space: &StateSpace, idx: usize, rates: &RateParams) -> BalanceRow {
    let config = space.config();
    let state = &space.states()[idx];
    let outflow = Move::ALL
        .iter()
        .filter(|mv| mv.enabled(state, config))
        .map(|mv| mv.rate(state, rates))
        .sum();
    let inflow = Move::ALL
        .iter()
        .filter_map(|&mv| {
            let src = mv.enabled_into(state, config)?;
            let j = space.index_of(&src)?;
            let rate = mv.rate(&src, rates);
            (rate > 0.0).then_some((j, rate))
        })
        .collect();
    BalanceRow { inflow, outflow }
}

/// Evaluates `ε_A` and `ε_B` at `state` for a probability assignment `pi`.
///
/// Fails with [`ModelError::DegenerateState`] when no transition leaves the
/// state while some transition enters it.
pub fn balance_terms<F>(
    state: &SystemState,
    space: &StateSpace,
    pi: F,
    rates: &RateParams,
) -> Result<BalanceTerms, ModelError>
where
    F: Fn(&SystemState) -> f64,
{
    let idx = space
        .index_of(state)
        .ok_or(ModelError::UnknownState(*state))?;
    let row = balance_row(space, idx, rates);
    if row.outflow == 0.0 && !row.inflow.is_empty() {
        return Err(ModelError::DegenerateState(*state));
    }
    let states = space.states();
    let eps_a = row.inflow.iter().map(|&(j, r)| r * pi(&states[j])).sum();
    Ok(BalanceTerms {
        eps_a,
        eps_b: row.outflow,
    })
}
