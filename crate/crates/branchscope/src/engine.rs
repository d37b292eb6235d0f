//! Event-driven simulation of one branching tree up to a horizon.
//!
//! The simulator holds a min-heap of pending death events and never
//! stores the tree: processing a death at `d <= t` records one interior
//! edge and draws the joint `(T, L)` for each child born at `d`; a child
//! whose own death falls past the horizon is folded into the running
//! statistics immediately (alive count, martingale term, pendant edge,
//! census) and never enters the queue. Memory is O(pending deaths +
//! retained atoms).
//!
//! Determinism: one [`RunStream`] per run, draws consumed in event order
//! (root first, then deaths in FIFO-by-death-time order, children in
//! birth order); simultaneous deaths are processed in insertion order.
//! Identical `(model, profile, config)` reproduce the result bit for bit.

use crate::malthus::MalthusProfile;
use crate::model::LifetimeOffspringModel;
use crate::piecewise::PiecewiseLinear;
use crate::rng::RunStream;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Default retention window `A` for recentred atoms.
pub const DEFAULT_WINDOW: f64 = 3.0;
/// Default hard bound on the number of individuals per run.
pub const DEFAULT_EDGE_CAP: u64 = 10_000_000;

/// Per-run simulation parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Horizon `t`.
    pub horizon: f64,
    /// Window `A`: atoms with recentred position below `-A` are dropped.
    pub window: f64,
    /// Hard bound on total individuals processed.
    pub edge_cap: u64,
    /// Stream key for this run.
    pub seed: u64,
    /// Whether to keep the recentred atom lists.
    pub record_atoms: bool,
}

impl SimulationConfig {
    pub fn new(horizon: f64, seed: u64) -> Self {
        Self {
            horizon,
            window: DEFAULT_WINDOW,
            edge_cap: DEFAULT_EDGE_CAP,
            seed,
            record_atoms: true,
        }
    }

    pub(crate) fn assert_valid(&self) {
        assert!(self.horizon > 0.0, "horizon must be positive");
        assert!(self.window > 0.0, "window must be positive");
        assert!(self.edge_cap >= 1, "edge cap must allow at least the root");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// At least one individual is alive at the horizon.
    Survived,
    /// The tree died out before the horizon.
    Extinct,
    /// The run hit the edge cap; its results are discarded and it must
    /// be excluded from statistics.
    Capped,
}

/// Finite point process on the real line: a sorted multiset of atom
/// positions. The maximum of the empty process is reported as `None`
/// (the `-infinity` convention).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointProcess {
    atoms: Vec<f64>,
}

impl PointProcess {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_positions(mut atoms: Vec<f64>) -> Self {
        atoms.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        Self { atoms }
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.atoms.last().copied()
    }

    /// Number of atoms at or above `x`.
    pub fn count_at_or_above(&self, x: f64) -> usize {
        let idx = self.atoms.partition_point(|&a| a < x);
        self.atoms.len() - idx
    }
}

/// A labelled census characteristic: the run reports the sum of
/// `weight(age)` over individuals alive at the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Characteristic {
    pub label: String,
    pub weight: PiecewiseLinear,
}

impl Characteristic {
    pub fn new(label: impl Into<String>, weight: PiecewiseLinear) -> Self {
        Self {
            label: label.into(),
            weight,
        }
    }
}

/// One labelled census value.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusValue {
    pub label: String,
    pub value: f64,
}

/// One simulated tree reduced to the statistics the limit laws speak
/// about.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub status: RunStatus,
    /// Individuals alive at the horizon.
    pub n_alive: u64,
    /// Individuals ever born (including the root).
    pub n_born: u64,
    /// Individuals dead by the horizon (interior edges before windowing).
    pub n_dead: u64,
    /// Malthusian martingale value: sum of `L exp(-alpha d)` over alive
    /// individuals.
    pub z_t: f64,
    /// Longest pendant edge (age of the oldest individual alive), raw.
    pub m_pendant: Option<f64>,
    /// Longest interior edge (lifetime of the longest-lived dead
    /// individual), raw.
    pub m_interior: Option<f64>,
    /// Pendant edge lengths recentred by `ell_t`, truncated below `-A`.
    pub pendant_atoms: PointProcess,
    /// Interior edge lengths recentred by `ell_t`, truncated below `-A`.
    pub interior_atoms: PointProcess,
    /// Census values for the registered characteristics.
    pub census: Vec<CensusValue>,
    /// Horizon the run was stopped at.
    pub horizon: f64,
    /// Characteristic length used for recentring.
    pub ell_t: f64,
    /// Retention window `A`.
    pub window: f64,
}

struct DeathEvent {
    at: f64,
    born: f64,
    brood: u32,
    seq: u32,
}

impl PartialEq for DeathEvent {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for DeathEvent {}

impl Ord for DeathEvent {
    // reversed so the max-heap pops the earliest death, FIFO on ties
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .at
            .total_cmp(&self.at)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}
impl PartialOrd for DeathEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Monotone calendar queue over `[0, horizon]`.
///
/// Insertions never precede the event being processed (a child dies
/// after its parent), so events are binned by death time into fixed
/// buckets and only the bucket currently draining is kept as a heap.
/// Pop order is exactly ascending `(death time, insertion seq)`: the
/// bucket index is a monotone function of the death time, so later
/// buckets never hold earlier deaths, and arrivals that land in the
/// draining bucket go straight into its heap. This keeps the hot heap
/// small and cache-resident for populations in the millions.
struct DeathQueue {
    per_unit_time: f64,
    buckets: Vec<Vec<DeathEvent>>,
    cursor: usize,
    active: BinaryHeap<DeathEvent>,
    pending: usize,
}

impl DeathQueue {
    fn new(horizon: f64) -> Self {
        let count = ((horizon * 1024.0).clamp(64.0, 65536.0)) as usize;
        Self {
            per_unit_time: count as f64 / horizon,
            buckets: (0..=count).map(|_| Vec::new()).collect(),
            cursor: 0,
            active: BinaryHeap::new(),
            pending: 0,
        }
    }

    #[inline]
    fn push(&mut self, event: DeathEvent) {
        let idx = ((event.at * self.per_unit_time) as usize).min(self.buckets.len() - 1);
        self.pending += 1;
        if idx <= self.cursor {
            self.active.push(event);
        } else {
            self.buckets[idx].push(event);
        }
    }

    #[inline]
    fn pop(&mut self) -> Option<DeathEvent> {
        loop {
            if let Some(event) = self.active.pop() {
                self.pending -= 1;
                return Some(event);
            }
            if self.pending == 0 {
                return None;
            }
            self.cursor += 1;
            let bucket = std::mem::take(&mut self.buckets[self.cursor]);
            self.active = BinaryHeap::from(bucket);
        }
    }
}

struct Tally<'a> {
    horizon: f64,
    ell: f64,
    min_length: f64,
    alpha: f64,
    record_atoms: bool,
    characteristics: &'a [Characteristic],
    n_alive: u64,
    n_dead: u64,
    z_t: f64,
    m_pendant: Option<f64>,
    m_interior: Option<f64>,
    pendant_atoms: Vec<f64>,
    interior_atoms: Vec<f64>,
    census: Vec<f64>,
}

impl<'a> Tally<'a> {
    fn new(
        horizon: f64,
        ell: f64,
        window: f64,
        alpha: f64,
        record_atoms: bool,
        characteristics: &'a [Characteristic],
    ) -> Self {
        Self {
            horizon,
            ell,
            min_length: ell - window,
            alpha,
            record_atoms,
            characteristics,
            n_alive: 0,
            n_dead: 0,
            z_t: 0.0,
            m_pendant: None,
            m_interior: None,
            pendant_atoms: Vec::new(),
            interior_atoms: Vec::new(),
            census: vec![0.0; characteristics.len()],
        }
    }

    #[inline]
    fn accept_alive(&mut self, born: f64, death: f64, brood: u32) {
        self.n_alive += 1;
        self.z_t += f64::from(brood) * (-self.alpha * death).exp();
        let age = self.horizon - born;
        if self.m_pendant.is_none_or(|m| age > m) {
            self.m_pendant = Some(age);
        }
        if self.record_atoms && age >= self.min_length {
            self.pendant_atoms.push(age - self.ell);
        }
        for (acc, c) in self.census.iter_mut().zip(self.characteristics) {
            *acc += c.weight.eval(age);
        }
    }

    #[inline]
    fn record_interior(&mut self, born: f64, death: f64) {
        self.n_dead += 1;
        let length = death - born;
        if self.m_interior.is_none_or(|m| length > m) {
            self.m_interior = Some(length);
        }
        if self.record_atoms && length >= self.min_length {
            self.interior_atoms.push(length - self.ell);
        }
    }

    fn finish(self, status: RunStatus, n_born: u64, window: f64) -> RunResult {
        RunResult {
            status,
            n_alive: self.n_alive,
            n_born,
            n_dead: self.n_dead,
            z_t: self.z_t,
            m_pendant: self.m_pendant,
            m_interior: self.m_interior,
            pendant_atoms: PointProcess::from_positions(self.pendant_atoms),
            interior_atoms: PointProcess::from_positions(self.interior_atoms),
            census: self
                .characteristics
                .iter()
                .zip(&self.census)
                .map(|(c, &value)| CensusValue {
                    label: c.label.clone(),
                    value,
                })
                .collect(),
            horizon: self.horizon,
            ell_t: self.ell,
            window,
        }
    }
}

pub(crate) fn capped_result(
    config: &SimulationConfig,
    ell: f64,
    characteristics: &[Characteristic],
) -> RunResult {
    RunResult {
        status: RunStatus::Capped,
        n_alive: 0,
        n_born: 0,
        n_dead: 0,
        z_t: 0.0,
        m_pendant: None,
        m_interior: None,
        pendant_atoms: PointProcess::empty(),
        interior_atoms: PointProcess::empty(),
        census: characteristics
            .iter()
            .map(|c| CensusValue {
                label: c.label.clone(),
                value: 0.0,
            })
            .collect(),
        horizon: config.horizon,
        ell_t: ell,
        window: config.window,
    }
}

/// Simulates one tree up to `config.horizon`.
pub fn run(
    model: &LifetimeOffspringModel,
    profile: &MalthusProfile,
    config: &SimulationConfig,
    characteristics: &[Characteristic],
) -> RunResult {
    config.assert_valid();
    let t = config.horizon;
    let ell = profile.characteristic_length(model, t);
    let mut tally = Tally::new(
        t,
        ell,
        config.window,
        profile.alpha,
        config.record_atoms,
        characteristics,
    );

    let mut stream = RunStream::new(config.seed);
    let mut queue = DeathQueue::new(t);
    let mut n_born: u64 = 1;
    let mut seq: u32 = 0;

    let (root_lifetime, root_brood) = model.sample_pair(&mut stream);
    if root_lifetime > t {
        tally.accept_alive(0.0, root_lifetime, root_brood);
    } else {
        queue.push(DeathEvent {
            at: root_lifetime,
            born: 0.0,
            brood: root_brood,
            seq,
        });
    }

    while let Some(event) = queue.pop() {
        tally.record_interior(event.born, event.at);
        for _ in 0..event.brood {
            if n_born == config.edge_cap {
                return capped_result(config, ell, characteristics);
            }
            n_born += 1;
            let (lifetime, brood) = model.sample_pair(&mut stream);
            let death = event.at + lifetime;
            if death > t {
                tally.accept_alive(event.at, death, brood);
            } else {
                seq += 1;
                queue.push(DeathEvent {
                    at: death,
                    born: event.at,
                    brood,
                    seq,
                });
            }
        }
    }

    let status = if tally.n_alive > 0 {
        RunStatus::Survived
    } else {
        RunStatus::Extinct
    };
    tally.finish(status, n_born, config.window)
}
