//! The 24 indicator predicates.
//!
//! Twelve of them gate a transition leaving the state; the other twelve gate
//! the matching transition arriving from a neighbour. Each outgoing
//! predicate is one [`Move`]; an incoming indicator is the outgoing predicate
//! of the same move evaluated at the neighbour the move starts from.

use std::ops::Index;

use super::{Phase, RateParams, Scheme, SchemeConfig, SystemState};

/// One kind of state change of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    /// LAA arrival takes a free channel (`x + 1`).
    LaaSeize,
    /// Wi-Fi arrival takes a free channel (`y + 1`).
    WifiSeize,
    /// LAA arrival joins the buffer (`z + 1`).
    LaaEnqueue,
    /// Wi-Fi completion hands its channel to the head of the buffer.
    WifiHandover,
    /// Head of the buffer starts on a free channel after the `μ'_on` delay.
    QueueStart,
    /// LAA completion frees its channel.
    LaaRelease,
    /// Wi-Fi completion frees its channel.
    WifiRelease,
    /// LAA completion, next buffered LAA packet takes over the channel.
    LaaNext,
    /// Sensing finds the channel idle with work waiting: go ON.
    SensingToOn,
    /// OFF expires with work waiting: start sensing.
    OffToSensing,
    /// Sensing gives up: go OFF.
    SensingToOff,
    /// ON expires: sense again.
    OnExpiry,
}

impl Move {
    pub const ALL: [Move; 12] = [
        Move::LaaSeize,
        Move::WifiSeize,
        Move::LaaEnqueue,
        Move::WifiHandover,
        Move::QueueStart,
        Move::LaaRelease,
        Move::WifiRelease,
        Move::LaaNext,
        Move::SensingToOn,
        Move::OffToSensing,
        Move::SensingToOff,
        Move::OnExpiry,
    ];

    /// Index of the indicator gating this move out of a state.
    pub fn outgoing_index(self) -> usize {
        match self {
            Move::LaaSeize => 1,
            Move::WifiSeize => 3,
            Move::LaaEnqueue => 5,
            Move::WifiHandover => 7,
            Move::QueueStart => 8,
            Move::LaaRelease => 10,
            Move::WifiRelease => 12,
            Move::LaaNext => 14,
            Move::SensingToOn => 17,
            Move::OffToSensing => 18,
            Move::SensingToOff => 23,
            Move::OnExpiry => 24,
        }
    }

    /// Index of the indicator gating this move into a state.
    pub fn incoming_index(self) -> usize {
        match self {
            Move::LaaSeize => 9,
            Move::WifiSeize => 11,
            Move::LaaEnqueue => 13,
            Move::WifiHandover => 15,
            Move::QueueStart => 16,
            Move::LaaRelease => 2,
            Move::WifiRelease => 4,
            Move::LaaNext => 6,
            Move::SensingToOn => 21,
            Move::OffToSensing => 22,
            Move::SensingToOff => 19,
            Move::OnExpiry => 20,
        }
    }

    /// State reached from `s`, or `None` if a coordinate would go negative
    /// or the phase would leave `{0, 1, 2}`.
    pub fn target(self, s: &SystemState) -> Option<SystemState> {
        let w = s.phase;
        match self {
            Move::LaaSeize => s.shifted(w, 1, 0, 0),
            Move::WifiSeize => s.shifted(w, 0, 1, 0),
            Move::LaaEnqueue => s.shifted(w, 0, 0, 1),
            Move::WifiHandover => s.shifted(w, 1, -1, -1),
            Move::QueueStart => s.shifted(w, 1, 0, -1),
            Move::LaaRelease => s.shifted(w, -1, 0, 0),
            Move::WifiRelease => s.shifted(w, 0, -1, 0),
            Move::LaaNext => s.shifted(w, 0, 0, -1),
            Move::SensingToOn | Move::OffToSensing => s.shifted(w.up()?, 0, 0, 0),
            Move::SensingToOff | Move::OnExpiry => s.shifted(w.down()?, 0, 0, 0),
        }
    }

    /// The neighbour from which this move lands in `s`.
    pub fn source(self, s: &SystemState) -> Option<SystemState> {
        let w = s.phase;
        match self {
            Move::LaaSeize => s.shifted(w, -1, 0, 0),
            Move::WifiSeize => s.shifted(w, 0, -1, 0),
            Move::LaaEnqueue => s.shifted(w, 0, 0, -1),
            Move::WifiHandover => s.shifted(w, -1, 1, 1),
            Move::QueueStart => s.shifted(w, -1, 0, 1),
            Move::LaaRelease => s.shifted(w, 1, 0, 0),
            Move::WifiRelease => s.shifted(w, 0, 1, 0),
            Move::LaaNext => s.shifted(w, 0, 0, 1),
            Move::SensingToOn | Move::OffToSensing => s.shifted(w.down()?, 0, 0, 0),
            Move::SensingToOff | Move::OnExpiry => s.shifted(w.up()?, 0, 0, 0),
        }
    }

    /// Rate of the move out of `from`, including the `x·μ_ℓu` and `y·μ_w`
    /// multiplicities.
    pub fn rate(self, from: &SystemState, rates: &RateParams) -> f64 {
        match self {
            Move::LaaSeize | Move::LaaEnqueue => rates.lambda_l,
            Move::WifiSeize => rates.lambda_w,
            Move::WifiHandover | Move::WifiRelease => f64::from(from.wifi) * rates.mu_w,
            Move::QueueStart => rates.mu_on_prime(),
            Move::LaaRelease | Move::LaaNext => f64::from(from.laa) * rates.mu_lu,
            Move::SensingToOn | Move::SensingToOff => rates.mu_s,
            Move::OffToSensing => rates.mu_off,
            Move::OnExpiry => rates.mu_on,
        }
    }

    /// The scheme's outgoing predicate for this move at `s`.
    pub fn enabled(self, s: &SystemState, config: &SchemeConfig) -> bool {
        match config.scheme {
            Scheme::Ufa => ufa(self, s, config),
            Scheme::Ufab => ufab(self, s, config),
            Scheme::Uta | Scheme::Utab => uta(self, s, config),
        }
    }

    /// Incoming indicator: the move is enabled at a legal neighbour that it
    /// takes to `s`.
    pub fn enabled_into(self, s: &SystemState, config: &SchemeConfig) -> Option<SystemState> {
        self.source(s)
            .filter(|n| n.is_legal(config) && self.enabled(n, config))
    }
}

fn ufa(mv: Move, s: &SystemState, c: &SchemeConfig) -> bool {
    let (x, y, z) = (s.laa, s.wifi, s.queued);
    let full = x + y >= c.channels;
    match mv {
        Move::LaaSeize => !full && z == 0,
        Move::WifiSeize => !full && z == 0,
        Move::LaaEnqueue => z < c.queue && full,
        Move::WifiHandover => y > 0 && z > 0 && full,
        Move::LaaRelease => x > 0 && z == 0,
        Move::WifiRelease => y > 0 && z == 0,
        Move::LaaNext => z > 0 && full && x > 0,
        _ => false,
    }
}

fn ufab(mv: Move, s: &SystemState, c: &SchemeConfig) -> bool {
    let (x, y, z) = (s.laa, s.wifi, s.queued);
    let full = x + y >= c.channels;
    let serve = z >= c.threshold;
    match mv {
        Move::LaaSeize => !full && serve,
        Move::WifiSeize => !full && !serve,
        Move::LaaEnqueue => z < c.queue && (full || !serve),
        Move::WifiHandover => y > 0 && z > 0 && full && serve,
        Move::LaaRelease => x > 0 && !serve,
        Move::WifiRelease => y > 0 && !serve,
        Move::LaaNext => z > 0 && full && x > 0 && serve,
        _ => false,
    }
}

fn uta(mv: Move, s: &SystemState, c: &SchemeConfig) -> bool {
    let (w, x, y, z) = (s.phase, s.laa, s.wifi, s.queued);
    let full = x + y >= c.channels;
    let on = w == Phase::On;
    let buffered = c.scheme == Scheme::Utab;
    // Work waiting that justifies going (or staying) ON.
    let waiting = if buffered { z > c.threshold } else { z > 0 };
    let idle_queue = if buffered { z < c.threshold } else { z == 0 };
    match mv {
        Move::LaaSeize => on && !full && z == 0,
        Move::WifiSeize => !full,
        Move::LaaEnqueue => z < c.queue && (!on || full || z > 0),
        Move::WifiHandover => on && y > 0 && z > 0 && full,
        Move::QueueStart => on && y == 0 && z > 0 && !full,
        Move::LaaRelease => x > 0 && (!on || z == 0),
        Move::WifiRelease => y > 0 && !(on && z > 0),
        Move::LaaNext => on && z > 0,
        Move::SensingToOn => w == Phase::Sensing && x == 0 && y == 0 && waiting,
        Move::OffToSensing => w == Phase::Off && waiting,
        Move::SensingToOff => w == Phase::Sensing && ((x == 0 && y > 0) || idle_queue),
        Move::OnExpiry => on,
    }
}

/// Values of `δ1 .. δ24` at one state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DeltaVector([bool; 24]);

impl DeltaVector {
    /// Indicator `δi` for `i` in `1..=24`.
    pub fn get(&self, i: usize) -> bool {
        assert!((1..=24).contains(&i), "delta index {i} out of 1..=24");
        self.0[i - 1]
    }

    /// Indicator as 0 or 1.
    pub fn value(&self, i: usize) -> u8 {
        u8::from(self.get(i))
    }

    fn set(&mut self, i: usize, v: bool) {
        self.0[i - 1] = v;
    }

    /// Indices of the indicators that are 1.
    pub fn ones(&self) -> Vec<usize> {
        (1..=24).filter(|&i| self.get(i)).collect()
    }
}

impl Index<usize> for DeltaVector {
    type Output = bool;

    fn index(&self, i: usize) -> &bool {
        assert!((1..=24).contains(&i), "delta index {i} out of 1..=24");
        &self.0[i - 1]
    }
}

/// Evaluates all 24 indicators at `state`.
pub fn delta_vector(state: &SystemState, config: &SchemeConfig) -> DeltaVector {
    let mut d = DeltaVector::default();
    for mv in Move::ALL {
        d.set(mv.outgoing_index(), mv.enabled(state, config));
        d.set(mv.incoming_index(), mv.enabled_into(state, config).is_some());
    }
    d
}
