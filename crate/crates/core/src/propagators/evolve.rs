use std::fmt;
use std::str::FromStr;

use super::hamiltonian::Diagonals;
use crate::error::{Error, Result};
use crate::model::{Schedule, SpinSystem, TimeGrid};
use crate::statevector::{expm_apply, ExpmBackend, PauliSum, StateVector};

/// The compared evolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Converged stand-in for the exact time-ordered dynamics.
    Reference,
    /// One exact exponential of `H(t_m)` per slice.
    Discretized,
    /// First-order product of `ZZ`, `Z` and `X` rotations with point-sampled angles.
    Trotterized,
    /// Diagonal rotations with integrated angles `δΛ(t_m)`, then the commuting
    /// off-diagonal sector.
    PhaseDecomposed,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Reference,
        Method::Discretized,
        Method::Trotterized,
        Method::PhaseDecomposed,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Reference => "reference",
            Method::Discretized => "discretized",
            Method::Trotterized => "trotterized",
            Method::PhaseDecomposed => "phase-decomposed",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "reference" => Ok(Method::Reference),
            "discretized" => Ok(Method::Discretized),
            "trotterized" | "trotter" => Ok(Method::Trotterized),
            "phase-decomposed" | "phase" => Ok(Method::PhaseDecomposed),
            other => Err(Error::Configuration(format!("unknown method '{other}'"))),
        }
    }
}

/// Time at which point-sampled coefficients are evaluated within a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SliceSampling {
    #[default]
    RightEndpoint,
    Midpoint,
}

impl SliceSampling {
    fn time(self, a: f64, b: f64) -> f64 {
        match self {
            SliceSampling::RightEndpoint => b,
            SliceSampling::Midpoint => 0.5 * (a + b),
        }
    }
}

/// Per-slice propagator used by the reference refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReferenceIntegrator {
    /// Fourth-order commutator-free Magnus step: two exact exponentials of
    /// Hamiltonians sampled at the Gauss–Legendre points of the slice.
    #[default]
    Magnus4,
    /// Exact exponential of `H(t_m)`, i.e. the discretized evolution.
    RightEndpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    /// Stop when successive refinements differ by less than this in 2-norm.
    pub tolerance: f64,
    pub start_slices: usize,
    pub max_slices: usize,
    pub integrator: ReferenceIntegrator,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        ReferenceOptions {
            tolerance: 1e-10,
            start_slices: 64,
            max_slices: 1 << 21,
            integrator: ReferenceIntegrator::Magnus4,
        }
    }
}

impl ReferenceOptions {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance >= 1e-12 && self.tolerance.is_finite()) {
            return Err(Error::Domain {
                what: "reference tolerance",
                value: self.tolerance,
                lo: 1e-12,
                hi: f64::INFINITY,
            });
        }
        if self.start_slices == 0 || self.start_slices > self.max_slices {
            return Err(Error::Configuration(format!(
                "reference slices start at {} with ceiling {}",
                self.start_slices, self.max_slices
            )));
        }
        Ok(())
    }
}

/// What to keep at every slice boundary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordOptions {
    pub snapshots: bool,
    /// Basis states whose probabilities are tracked.
    pub watch: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionPlan {
    pub method: Method,
    /// `M`. For the reference this is the recording grid; refinement picks its
    /// own slice count.
    pub slices: usize,
    pub record: Option<RecordOptions>,
    pub sampling: SliceSampling,
    pub backend: ExpmBackend,
    pub reference: ReferenceOptions,
}

impl EvolutionPlan {
    pub fn new(method: Method, slices: usize) -> Self {
        EvolutionPlan {
            method,
            slices,
            record: None,
            sampling: SliceSampling::default(),
            backend: ExpmBackend::default(),
            reference: ReferenceOptions::default(),
        }
    }

    pub fn with_record(mut self, record: RecordOptions) -> Self {
        self.record = Some(record);
        self
    }

    pub fn with_sampling(mut self, sampling: SliceSampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_backend(mut self, backend: ExpmBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_reference(mut self, reference: ReferenceOptions) -> Self {
        self.reference = reference;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub m: usize,
    pub time: f64,
    pub parity: f64,
    /// Probabilities of [`RecordOptions::watch`], in order.
    pub watched: Vec<f64>,
    pub snapshot: Option<StateVector>,
}

/// Per-boundary record `t_0, t_1, …, t_M`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn record(&mut self, opts: &RecordOptions, m: usize, time: f64, state: &StateVector) {
        let amps = state.amplitudes();
        self.points.push(TrajectoryPoint {
            m,
            time,
            parity: state.parity_expectation(),
            watched: opts.watch.iter().map(|&s| amps[s].norm_sqr()).collect(),
            snapshot: opts.snapshots.then(|| state.clone()),
        });
    }
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: StateVector,
    pub trajectory: Option<Trajectory>,
    /// Slices actually propagated (the refined count for the reference).
    pub slices: usize,
    /// 2-norm difference between the last two reference refinements.
    pub reference_difference: Option<f64>,
}

/// Run `plan` on a uniform grid over `[0, T]`.
pub fn evolve(system: &SpinSystem, schedule: &Schedule, plan: &EvolutionPlan) -> Result<Evolution> {
    let grid = TimeGrid::uniform(schedule.total_time(), plan.slices)?;
    evolve_on_grid(system, schedule, &grid, plan)
}

/// Run `plan` on an explicit grid; `plan.slices` is ignored.
pub fn evolve_on_grid(
    system: &SpinSystem,
    schedule: &Schedule,
    grid: &TimeGrid,
    plan: &EvolutionPlan,
) -> Result<Evolution> {
    schedule.check_grid(grid)?;
    if let Some(rec) = &plan.record {
        if let Some(&bad) = rec.watch.iter().find(|&&s| s >= system.dim()) {
            return Err(Error::Index {
                what: "watched basis state",
                index: bad,
                lo: 0,
                hi: system.dim() - 1,
            });
        }
    }
    let ctx = Context::new(system, schedule, plan.backend)?;
    match plan.method {
        Method::Reference => reference(&ctx, grid, &plan.reference, plan.record.as_ref()),
        method => {
            if matches!(method, Method::Trotterized | Method::PhaseDecomposed) {
                system.check_factorizable()?;
            }
            let step = |s: &mut StateVector, a: f64, b: f64| match method {
                Method::Discretized => ctx.step_discretized(s, a, b, plan.sampling),
                Method::Trotterized => ctx.step_trotterized(s, a, b, plan.sampling),
                _ => ctx.step_phase_decomposed(s, a, b, plan.sampling),
            };
            let (state, trajectory) = run_grid(&ctx, grid, 1, plan.record.as_ref(), step)?;
            Ok(Evolution {
                state,
                trajectory,
                slices: grid.slices(),
                reference_difference: None,
            })
        }
    }
}

/// Converged reference state at `T` (refinement by slice doubling).
pub fn evolve_reference(
    system: &SpinSystem,
    schedule: &Schedule,
    options: &ReferenceOptions,
) -> Result<Evolution> {
    let plan = EvolutionPlan::new(Method::Reference, 1).with_reference(*options);
    evolve(system, schedule, &plan)
}

pub fn evolve_discretized(
    system: &SpinSystem,
    schedule: &Schedule,
    slices: usize,
) -> Result<StateVector> {
    evolve(
        system,
        schedule,
        &EvolutionPlan::new(Method::Discretized, slices),
    )
    .map(|e| e.state)
}

pub fn evolve_trotterized(
    system: &SpinSystem,
    schedule: &Schedule,
    slices: usize,
) -> Result<StateVector> {
    evolve(
        system,
        schedule,
        &EvolutionPlan::new(Method::Trotterized, slices),
    )
    .map(|e| e.state)
}

pub fn evolve_phase_decomposed(
    system: &SpinSystem,
    schedule: &Schedule,
    slices: usize,
) -> Result<StateVector> {
    evolve(
        system,
        schedule,
        &EvolutionPlan::new(Method::PhaseDecomposed, slices),
    )
    .map(|e| e.state)
}

/// Applies the off-diagonal sector `exp(−iδt[(1−λ)V + λ(1−λ)(ΣK XX + αΣY)])`
/// as gates, with coefficients sampled at `t`. Exact whenever the XX and Y
/// catalysts are not both present.
pub fn apply_off_diagonal_sector(
    system: &SpinSystem,
    schedule: &Schedule,
    state: &mut StateVector,
    t: f64,
    dt: f64,
) -> Result<()> {
    system.check_factorizable()?;
    let lambda = schedule.value(t);
    let weight = lambda * (1.0 - lambda);
    if let Some(cat) = system.catalyst() {
        for k in &cat.xx_couplings {
            state.apply_rxx(k.i, k.j, -dt * weight * k.strength)?;
        }
    }
    let y_angle = system.y_field().map(|alpha| -dt * weight * alpha.eval(t));
    for (q, g) in system.fields_x().iter().enumerate() {
        let x_angle = dt * (1.0 - lambda) * g;
        match y_angle {
            // exp(i(aX + bY)) = rotation by hypot(a, b) about the tilted axis
            Some(b) => state.apply_tilted_rotation(q, x_angle.hypot(b), b.atan2(x_angle))?,
            None => state.apply_rx(q, x_angle)?,
        }
    }
    Ok(())
}

struct Context<'a> {
    system: &'a SpinSystem,
    schedule: &'a Schedule,
    diagonals: Diagonals,
    backend: ExpmBackend,
}

// Gauss–Legendre nodes and weights of the fourth-order commutator-free step.
const GL_LO: f64 = 0.5 - 0.288_675_134_594_812_9;
const GL_HI: f64 = 0.5 + 0.288_675_134_594_812_9;
const CF_A: f64 = 0.25 - 0.288_675_134_594_812_9;
const CF_B: f64 = 0.25 + 0.288_675_134_594_812_9;

impl<'a> Context<'a> {
    fn new(system: &'a SpinSystem, schedule: &'a Schedule, backend: ExpmBackend) -> Result<Self> {
        Ok(Context {
            system,
            schedule,
            diagonals: Diagonals::new(system)?,
            backend,
        })
    }

    fn initial_state(&self) -> Result<StateVector> {
        StateVector::driver_ground_state(self.system)
    }

    fn hamiltonian(&self, t: f64) -> Result<PauliSum> {
        self.diagonals.hamiltonian_at(self.system, self.schedule, t)
    }

    fn step_discretized(
        &self,
        s: &mut StateVector,
        a: f64,
        b: f64,
        sampling: SliceSampling,
    ) -> Result<()> {
        let h = self.hamiltonian(sampling.time(a, b))?;
        expm_apply(&h, b - a, s, self.backend)
    }

    fn step_magnus4(&self, s: &mut StateVector, a: f64, b: f64) -> Result<()> {
        let dt = b - a;
        let h1 = self.hamiltonian(a + GL_LO * dt)?;
        let h2 = self.hamiltonian(a + GL_HI * dt)?;
        let first = PauliSum::linear_combination(&[(CF_B, &h1), (CF_A, &h2)])?;
        let second = PauliSum::linear_combination(&[(CF_A, &h1), (CF_B, &h2)])?;
        expm_apply(&first, dt, s, self.backend)?;
        expm_apply(&second, dt, s, self.backend)
    }

    /// `exp(−iθ_P H_P)` as `R_ZZ` then `R_Z`, plus the Z catalyst with angle `θ_C`.
    fn diagonal_gates(
        &self,
        s: &mut StateVector,
        theta_problem: f64,
        theta_bias: f64,
    ) -> Result<()> {
        for c in self.system.couplings() {
            s.apply_rzz(c.i, c.j, theta_problem * c.strength)?;
        }
        for (q, h) in self.system.fields_z().iter().enumerate() {
            s.apply_rz(q, theta_problem * h)?;
        }
        if let Some(bias) = self.system.catalyst().and_then(|c| c.bias_z.as_ref()) {
            for (q, h) in bias.iter().enumerate() {
                s.apply_rz(q, -theta_bias * h)?;
            }
        }
        Ok(())
    }

    fn step_trotterized(
        &self,
        s: &mut StateVector,
        a: f64,
        b: f64,
        sampling: SliceSampling,
    ) -> Result<()> {
        let t = sampling.time(a, b);
        let dt = b - a;
        let lambda = self.schedule.value(t);
        self.diagonal_gates(s, dt * lambda, dt * lambda * (1.0 - lambda))?;
        apply_off_diagonal_sector(self.system, self.schedule, s, t, dt)
    }

    fn step_phase_decomposed(
        &self,
        s: &mut StateVector,
        a: f64,
        b: f64,
        sampling: SliceSampling,
    ) -> Result<()> {
        let theta_problem = self.schedule.integral(a, b);
        let theta_bias = self.schedule.catalyst_integral(a, b);
        self.diagonal_gates(s, theta_problem, theta_bias)?;
        apply_off_diagonal_sector(self.system, self.schedule, s, sampling.time(a, b), b - a)
    }
}

/// Propagate over `grid`, each slice split into `substeps` equal pieces;
/// records at the grid boundaries.
fn run_grid(
    ctx: &Context<'_>,
    grid: &TimeGrid,
    substeps: usize,
    record: Option<&RecordOptions>,
    mut step: impl FnMut(&mut StateVector, f64, f64) -> Result<()>,
) -> Result<(StateVector, Option<Trajectory>)> {
    let mut state = ctx.initial_state()?;
    let mut trajectory = record.map(|_| Trajectory::default());
    if let (Some(tr), Some(opts)) = (trajectory.as_mut(), record) {
        tr.record(opts, 0, 0.0, &state);
    }
    for (m, a, b) in grid.iter() {
        let width = (b - a) / substeps as f64;
        for k in 0..substeps {
            let lo = a + width * k as f64;
            let hi = if k + 1 == substeps { b } else { lo + width };
            step(&mut state, lo, hi)?;
        }
        if let (Some(tr), Some(opts)) = (trajectory.as_mut(), record) {
            tr.record(opts, m, b, &state);
        }
    }
    Ok((state, trajectory))
}

fn reference(
    ctx: &Context<'_>,
    grid: &TimeGrid,
    opts: &ReferenceOptions,
    record: Option<&RecordOptions>,
) -> Result<Evolution> {
    opts.validate()?;
    let coarse = grid.slices();
    let mut substeps = 1usize;
    while coarse * substeps < opts.start_slices {
        substeps *= 2;
    }
    let run = |substeps: usize| {
        run_grid(ctx, grid, substeps, record, |s, a, b| {
            match opts.integrator {
                ReferenceIntegrator::Magnus4 => ctx.step_magnus4(s, a, b),
                ReferenceIntegrator::RightEndpoint => {
                    ctx.step_discretized(s, a, b, SliceSampling::RightEndpoint)
                }
            }
        })
    };
    let mut previous = run(substeps)?;
    loop {
        let next_substeps = substeps * 2;
        if coarse * next_substeps > opts.max_slices {
            let last_difference = f64::INFINITY;
            return Err(Error::Convergence {
                last_difference,
                slices: coarse * substeps,
                ceiling: opts.max_slices,
            });
        }
        let next = run(next_substeps)?;
        let diff = distance(&previous.0, &next.0);
        substeps = next_substeps;
        if diff < opts.tolerance {
            return Ok(Evolution {
                state: next.0,
                trajectory: next.1,
                slices: coarse * substeps,
                reference_difference: Some(diff),
            });
        }
        if coarse * substeps * 2 > opts.max_slices {
            return Err(Error::Convergence {
                last_difference: diff,
                slices: coarse * substeps,
                ceiling: opts.max_slices,
            });
        }
        previous = next;
    }
}

fn distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}
