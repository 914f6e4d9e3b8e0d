use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;

use crate::model::{Move, Phase, SystemState};

use super::dist::{sample, DistributionSpec, Quantity};
use super::stats::{BatchCounters, SimStats};
use super::{SimConfig, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    LaaArrival,
    WifiArrival,
    LaaDeparture,
    WifiDeparture,
    /// ON or OFF period ran out.
    PhaseTimerExpiry,
    SensingComplete,
    /// Head-of-buffer packet starts on a free channel while ON.
    ServiceStart,
}

impl EventKind {
    /// Tie-break rank for events at the same instant; lower runs first.
    fn priority(self) -> u8 {
        match self {
            EventKind::LaaDeparture | EventKind::WifiDeparture => 0,
            EventKind::PhaseTimerExpiry => 1,
            EventKind::SensingComplete => 2,
            EventKind::ServiceStart => 3,
            EventKind::LaaArrival | EventKind::WifiArrival => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EventKind::LaaArrival => "laa_arrival",
            EventKind::WifiArrival => "wifi_arrival",
            EventKind::LaaDeparture => "laa_departure",
            EventKind::WifiDeparture => "wifi_departure",
            EventKind::PhaseTimerExpiry => "phase_timer_expiry",
            EventKind::SensingComplete => "sensing_complete",
            EventKind::ServiceStart => "service_start",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        const KINDS: [EventKind; 7] = [
            EventKind::LaaArrival,
            EventKind::WifiArrival,
            EventKind::LaaDeparture,
            EventKind::WifiDeparture,
            EventKind::PhaseTimerExpiry,
            EventKind::SensingComplete,
            EventKind::ServiceStart,
        ];
        KINDS
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown event kind '{s}'"))
    }
}

/// One processed event and the state right after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
    pub state: SystemState,
}

/// Timers that only run while their enabling condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Clock {
    ServiceStart = 0,
    On = 1,
    Off = 2,
    Sensing = 3,
}

const CLOCKS: [Clock; 4] = [Clock::ServiceStart, Clock::On, Clock::Off, Clock::Sensing];

#[derive(Debug, Clone, Copy)]
struct Scheduled {
    time: f64,
    kind: EventKind,
    seq: u64,
    /// Clock and generation for timer events.
    clock: Option<(Clock, u64)>,
}

impl Scheduled {
    fn key(&self) -> (f64, u8, u64) {
        (self.time, self.kind.priority(), self.seq)
    }
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    // Reversed so that `BinaryHeap` pops the earliest event.
    fn cmp(&self, other: &Self) -> Ordering {
        let (ta, pa, sa) = self.key();
        let (tb, pb, sb) = other.key();
        tb.total_cmp(&ta).then(pb.cmp(&pa)).then(sb.cmp(&sa))
    }
}

/// The event loop of one simulation run.
pub struct Simulator {
    config: SimConfig,
    laws: [Option<DistributionSpec>; 7],
    service_start: DistributionSpec,
    rng: ChaCha8Rng,
    heap: BinaryHeap<Scheduled>,
    seq: u64,
    now: f64,
    state: SystemState,
    clocks: [Option<u64>; 4],
    generation: u64,
    stats: SimStats,
    batches: Vec<BatchCounters>,
    occupancy: BTreeMap<SystemState, f64>,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Simulator, SimError> {
        config.validate()?;
        let laws = Quantity::ALL.map(|q| config.law(q));
        let service_start = DistributionSpec::exponential(config.rates.mu_on_prime());
        let phase = if config.scheme.scheme.has_phases() {
            Phase::Off
        } else {
            Phase::On
        };
        let mut sim = Simulator {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            batches: vec![BatchCounters::default(); config.batches as usize],
            config,
            laws,
            service_start,
            heap: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            state: SystemState::new(phase, 0, 0, 0),
            clocks: [None; 4],
            generation: 0,
            stats: SimStats::default(),
            occupancy: BTreeMap::new(),
        };
        sim.schedule_arrival(EventKind::LaaArrival);
        sim.schedule_arrival(EventKind::WifiArrival);
        sim.sync_clocks();
        Ok(sim)
    }

    pub fn state(&self) -> SystemState {
        self.state
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn is_finished(&self) -> bool {
        self.stats.laa_arrivals + self.stats.wifi_arrivals >= self.config.sessions
    }

    /// Processes exactly one live event.
    pub fn step(&mut self) -> Result<EventRecord, SimError> {
        if self.is_finished() {
            return Err(SimError::Finished);
        }
        let ev = loop {
            let ev = self
                .heap
                .pop()
                .ok_or_else(|| SimError::Config("event list ran empty".into()))?;
            match ev.clock {
                Some((c, g)) if self.clocks[c as usize] != Some(g) => continue,
                Some((c, _)) => {
                    self.clocks[c as usize] = None;
                    break ev;
                }
                None => break ev,
            }
        };

        *self.occupancy.entry(self.state).or_insert(0.0) += ev.time - self.now;
        self.now = ev.time;
        self.stats.events += 1;

        match ev.kind {
            EventKind::LaaArrival => self.laa_arrival(),
            EventKind::WifiArrival => self.wifi_arrival(),
            EventKind::LaaDeparture => self.laa_departure(),
            EventKind::WifiDeparture => self.wifi_departure(),
            EventKind::ServiceStart => {
                self.state.laa += 1;
                self.state.queued -= 1;
                self.schedule_service(EventKind::LaaDeparture);
            }
            EventKind::PhaseTimerExpiry => self.state.phase = Phase::Sensing,
            EventKind::SensingComplete => {
                let cfg = &self.config.scheme;
                if Move::SensingToOn.enabled(&self.state, cfg) {
                    self.state.phase = Phase::On;
                } else if Move::SensingToOff.enabled(&self.state, cfg) {
                    self.state.phase = Phase::Off;
                }
            }
        }
        self.sync_clocks();

        Ok(EventRecord {
            time: ev.time,
            kind: ev.kind,
            state: self.state,
        })
    }

    /// Runs to the session target and returns the statistics.
    pub fn finish(mut self) -> Result<SimStats, SimError> {
        while !self.is_finished() {
            self.step()?;
        }
        Ok(self.into_stats())
    }

    fn into_stats(self) -> SimStats {
        let mut stats = self.stats;
        stats.sim_time = self.now;
        stats.finalize(&self.batches, self.occupancy);
        stats
    }

    fn batch(&mut self) -> &mut BatchCounters {
        let done = self.stats.laa_arrivals + self.stats.wifi_arrivals;
        let b = (u128::from(done) * self.batches.len() as u128 / u128::from(self.config.sessions)) as usize;
        let last = self.batches.len() - 1;
        &mut self.batches[b.min(last)]
    }

    fn laa_arrival(&mut self) {
        let cfg = self.config.scheme;
        let dropped = if Move::LaaSeize.enabled(&self.state, &cfg) {
            self.state.laa += 1;
            self.schedule_service(EventKind::LaaDeparture);
            self.stats.laa_served_direct += 1;
            false
        } else if Move::LaaEnqueue.enabled(&self.state, &cfg) {
            self.state.queued += 1;
            self.stats.laa_buffered += 1;
            false
        } else {
            self.stats.laa_drops += 1;
            true
        };
        let b = self.batch();
        b.laa_arrivals += 1;
        b.laa_drops += u64::from(dropped);
        self.stats.laa_arrivals += 1;
        self.schedule_arrival(EventKind::LaaArrival);
    }

    fn wifi_arrival(&mut self) {
        let cfg = self.config.scheme;
        let mut occupied = false;
        if Move::WifiSeize.enabled(&self.state, &cfg) {
            self.state.wifi += 1;
            self.schedule_service(EventKind::WifiDeparture);
        } else {
            self.stats.wifi_drops_total += 1;
            if self.state.laa == cfg.channels {
                self.stats.wifi_drops_laa_occupied += 1;
                occupied = true;
            }
        }
        let b = self.batch();
        b.wifi_arrivals += 1;
        b.wifi_drops += u64::from(occupied);
        self.stats.wifi_arrivals += 1;
        self.schedule_arrival(EventKind::WifiArrival);
    }

    fn laa_departure(&mut self) {
        let cfg = self.config.scheme;
        self.stats.laa_completed += 1;
        if Move::LaaNext.enabled(&self.state, &cfg) {
            self.state.queued -= 1;
            self.schedule_service(EventKind::LaaDeparture);
        } else {
            // LaaRelease, or a plain release where no rule applies (D > 1).
            self.state.laa -= 1;
        }
    }

    fn wifi_departure(&mut self) {
        let cfg = self.config.scheme;
        if Move::WifiHandover.enabled(&self.state, &cfg) {
            self.state.wifi -= 1;
            self.state.laa += 1;
            self.state.queued -= 1;
            self.schedule_service(EventKind::LaaDeparture);
        } else {
            self.state.wifi -= 1;
        }
    }

    fn push(&mut self, delay: f64, kind: EventKind, clock: Option<(Clock, u64)>) {
        self.seq += 1;
        self.heap.push(Scheduled {
            time: self.now + delay,
            kind,
            seq: self.seq,
            clock,
        });
    }

    fn draw(&mut self, quantity: Quantity) -> Option<f64> {
        let law = self.laws[quantity as usize]?;
        Some(sample(&law, &mut self.rng))
    }

    fn schedule_arrival(&mut self, kind: EventKind) {
        let q = match kind {
            EventKind::LaaArrival => Quantity::LaaInterArrival,
            _ => Quantity::WifiInterArrival,
        };
        if let Some(dt) = self.draw(q) {
            self.push(dt, kind, None);
        }
    }

    fn schedule_service(&mut self, kind: EventKind) {
        let q = match kind {
            EventKind::LaaDeparture => Quantity::LaaService,
            _ => Quantity::WifiService,
        };
        let dt = self.draw(q).unwrap_or(0.0);
        self.push(dt, kind, None);
    }

    fn clock_enabled(&self, clock: Clock) -> bool {
        let s = &self.state;
        let cfg = &self.config.scheme;
        match clock {
            Clock::ServiceStart => Move::QueueStart.enabled(s, cfg),
            Clock::On => Move::OnExpiry.enabled(s, cfg),
            Clock::Off => Move::OffToSensing.enabled(s, cfg),
            Clock::Sensing => Move::SensingToOn.enabled(s, cfg) || Move::SensingToOff.enabled(s, cfg),
        }
    }

    /// Starts timers whose condition became true and invalidates timers
    /// whose condition no longer holds.
    fn sync_clocks(&mut self) {
        for clock in CLOCKS {
            let enabled = self.clock_enabled(clock);
            let slot = clock as usize;
            match (enabled, self.clocks[slot]) {
                (true, None) => {
                    let (dt, kind) = match clock {
                        Clock::ServiceStart => (sample(&self.service_start, &mut self.rng), EventKind::ServiceStart),
                        Clock::On => (self.draw(Quantity::OnDuration).unwrap_or(0.0), EventKind::PhaseTimerExpiry),
                        Clock::Off => (self.draw(Quantity::OffDuration).unwrap_or(0.0), EventKind::PhaseTimerExpiry),
                        Clock::Sensing => (self.draw(Quantity::Sensing).unwrap_or(0.0), EventKind::SensingComplete),
                    };
                    self.generation += 1;
                    self.clocks[slot] = Some(self.generation);
                    self.push(dt, kind, Some((clock, self.generation)));
                }
                (false, Some(_)) => self.clocks[slot] = None,
                _ => {}
            }
        }
    }
}

/// Simulates until the session target is reached.
pub fn run(config: &SimConfig) -> Result<SimStats, SimError> {
    Simulator::new(config.clone())?.finish()
}

/// Like [`run`], also returning every processed event.
pub fn run_with_trace(config: &SimConfig) -> Result<(SimStats, Vec<EventRecord>), SimError> {
    let mut sim = Simulator::new(config.clone())?;
    let mut trace = Vec::new();
    while !sim.is_finished() {
        trace.push(sim.step()?);
    }
    Ok((sim.into_stats(), trace))
}
