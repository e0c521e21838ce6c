"""Direct time integration and discrete dynamic models.

The implicit update solves, each step,

    (M + gamma*dt*C + beta*dt^2*K) a+ = F+ - C*(v + (1-gamma)*dt*a)
                                          - K*(u + dt*v + (1/2-beta)*dt^2*a)

then u+ = u* + beta*dt^2*a+ and v+ = v* + gamma*dt*a+, where u*, v* are the
predictor terms above.  With gamma=1/2, beta=1/4 (average acceleration) the
scheme is unconditionally stable for linear systems and adds no algorithmic
damping.  The effective matrix is factorized once per run.

Beams are reduced to mass-spring chains by lumping rho*A over nodal tributary
lengths and reusing the static bending stiffness; damping, when requested, is
Rayleigh stiffness-proportional fitted to a first-mode damping ratio.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .model import (
    BeamSpec,
    BoundarySpec,
    HarmonicPointLoad,
    MovingPointLoad,
    NonConvergenceError,
    PointLoad,
    RankDeficiencyError,
    SolverError,
    SpatialGrid,
    TimeGrid,
    TimeSeriesResult,
    UdlLoad,
    ValidationError,
    check_load_positions,
)
from .statics import (
    beam_stiffness_matrix,
    point_load_vector,
    trapezoid_weights,
    udl_load_vector,
)


@dataclass(frozen=True)
class RayleighCoeffs:
    """C = mass_coeff * M + stiffness_coeff * K."""

    mass_coeff: float = 0.0
    stiffness_coeff: float = 0.0

    def __post_init__(self):
        if self.mass_coeff < 0.0 or self.stiffness_coeff < 0.0:
            raise ValidationError("Rayleigh coefficients must be nonnegative")

    @classmethod
    def for_first_mode(cls, zeta1: float, omega1: float) -> "RayleighCoeffs":
        """Stiffness-proportional fit hitting damping ratio zeta1 at omega1.

        zeta(omega) = stiffness_coeff * omega / 2 grows with frequency, so
        higher modes are damped harder: convenient for steady-state sweeps.
        """
        if zeta1 < 0.0:
            raise ValidationError(f"zeta1 must be nonnegative, got {zeta1}")
        if omega1 <= 0.0:
            raise ValidationError(f"omega1 must be positive, got {omega1}")
        return cls(mass_coeff=0.0, stiffness_coeff=2.0 * zeta1 / omega1)


@dataclass(frozen=True)
class IntegratorConfig:
    """Newmark parameters; dt may be left None and taken from the TimeGrid."""

    gamma: float = 0.5
    beta_nm: float = 0.25
    dt: float | None = None

    def __post_init__(self):
        if self.gamma < 0.5:
            raise ValidationError(f"gamma must be >= 1/2, got {self.gamma}")
        if self.beta_nm < 0.5 * self.gamma:
            raise ValidationError(
                f"beta_nm must be >= gamma/2 for unconditional stability, got {self.beta_nm}"
            )
        if self.dt is not None and self.dt <= 0.0:
            raise ValidationError(f"dt must be positive, got {self.dt}")


def _symmetric(name: str, matrix: np.ndarray) -> None:
    scale = np.max(np.abs(matrix)) or 1.0
    if not np.allclose(matrix, matrix.T, rtol=0, atol=1e-10 * scale):
        raise ValidationError(f"{name} matrix must be symmetric")


@dataclass(frozen=True)
class MdofSystem:
    """Mass, damping and stiffness matrices plus labeling metadata.

    For beam systems the matrices cover the free (non-Dirichlet) nodes only;
    `grid` and `free_mask` let results be scattered back onto the full grid.
    """

    mass: np.ndarray
    damping: np.ndarray
    stiffness: np.ndarray
    labels: tuple[str, ...]
    grid: SpatialGrid | None = None
    free_mask: np.ndarray | None = None
    rank_warning: str | None = None

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float)
        damping = np.array(self.damping, dtype=float)
        stiffness = np.array(self.stiffness, dtype=float)
        n = mass.shape[0]
        for name, matrix in (("mass", mass), ("damping", damping), ("stiffness", stiffness)):
            if matrix.shape != (n, n):
                raise ValidationError(f"{name} matrix must be {n}x{n}, got {matrix.shape}")
            _symmetric(name, matrix)
        try:
            np.linalg.cholesky(mass)
        except np.linalg.LinAlgError as exc:
            raise ValidationError("mass matrix must be positive definite") from exc
        if len(self.labels) != n:
            raise ValidationError(f"expected {n} dof labels, got {len(self.labels)}")
        for matrix in (mass, damping, stiffness):
            matrix.setflags(write=False)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "damping", damping)
        object.__setattr__(self, "stiffness", stiffness)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def size(self) -> int:
        return self.mass.shape[0]

    @property
    def is_damped(self) -> bool:
        return bool(np.any(self.damping))


@dataclass(frozen=True)
class DynamicState:
    """Displacement, velocity, acceleration and the time they belong to."""

    displacement: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    time: float

    def __post_init__(self):
        u = np.array(self.displacement, dtype=float)
        v = np.array(self.velocity, dtype=float)
        a = np.array(self.acceleration, dtype=float)
        if not (u.shape == v.shape == a.shape) or u.ndim != 1:
            raise ValidationError("state vectors must share one dimension")
        if not all(np.all(np.isfinite(x)) for x in (u, v, a)):
            raise ValidationError("state contains non-finite values")
        for x in (u, v, a):
            x.setflags(write=False)
        object.__setattr__(self, "displacement", u)
        object.__setattr__(self, "velocity", v)
        object.__setattr__(self, "acceleration", a)


def initial_state(
    system: MdofSystem, u0, v0, force0: np.ndarray, t0: float = 0.0
) -> DynamicState:
    """Consistent starting state: solves M a0 = F(0) - C v0 - K u0."""
    u0 = np.asarray(u0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    rhs = force0 - system.damping @ v0 - system.stiffness @ u0
    a0 = np.linalg.solve(system.mass, rhs)
    return DynamicState(u0, v0, a0, t0)


def _check_force(force: np.ndarray, n: int, t: float) -> np.ndarray:
    force = np.asarray(force, dtype=float)
    if force.shape != (n,):
        raise ValidationError(f"force at t={t} has shape {force.shape}, expected ({n},)")
    if not np.all(np.isfinite(force)):
        raise ValidationError(f"force at t={t} is not finite")
    return force


def newmark_step(
    system: MdofSystem,
    state: DynamicState,
    force_next: np.ndarray,
    cfg: IntegratorConfig,
) -> DynamicState:
    """One implicit step of size cfg.dt from `state`.

    Exact for constant acceleration over the step.  Raises on a singular
    effective matrix and on non-finite force input.
    """
    if cfg.dt is None:
        raise ValidationError("newmark_step requires cfg.dt")
    dt = cfg.dt
    force_next = _check_force(force_next, system.size, state.time + dt)
    effective = (
        system.mass + cfg.gamma * dt * system.damping + cfg.beta_nm * dt**2 * system.stiffness
    )
    try:
        lu = scipy.linalg.lu_factor(effective)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"effective matrix factorization failed: {exc}") from exc
    u_pred = state.displacement + dt * state.velocity + (0.5 - cfg.beta_nm) * dt**2 * state.acceleration
    v_pred = state.velocity + (1.0 - cfg.gamma) * dt * state.acceleration
    rhs = force_next - system.damping @ v_pred - system.stiffness @ u_pred
    a_next = scipy.linalg.lu_solve(lu, rhs)
    u_next = u_pred + cfg.beta_nm * dt**2 * a_next
    v_next = v_pred + cfg.gamma * dt * a_next
    return DynamicState(u_next, v_next, a_next, state.time + dt)


def integrate(
    system: MdofSystem,
    force_schedule,
    u0,
    v0,
    tgrid: TimeGrid,
    cfg: IntegratorConfig = IntegratorConfig(),
    stride: int = 1,
) -> TimeSeriesResult:
    """March the system over `tgrid`, recording every `stride`-th sample.

    `force_schedule` maps time to the force vector.  The effective matrix is
    factorized once.  Systems flagged rank-deficient are rejected unless they
    carry damping.
    """
    if stride < 1:
        raise ValidationError(f"stride must be >= 1, got {stride}")
    if cfg.dt is not None and abs(cfg.dt - tgrid.dt) > 1e-12 * tgrid.dt:
        raise ValidationError(
            f"integrator dt {cfg.dt} conflicts with time grid dt {tgrid.dt}"
        )
    if system.rank_warning and not system.is_damped:
        raise RankDeficiencyError(
            f"cannot integrate undamped rank-deficient system: {system.rank_warning}"
        )
    n = system.size
    dt = tgrid.dt
    gamma, beta = cfg.gamma, cfg.beta_nm
    mass, damping, stiffness = system.mass, system.damping, system.stiffness
    damped = system.is_damped

    force0 = _check_force(force_schedule(tgrid.start), n, tgrid.start)
    state = initial_state(system, u0, v0, force0, tgrid.start)
    u, v, a = (
        state.displacement.copy(),
        state.velocity.copy(),
        state.acceleration.copy(),
    )

    effective = mass + gamma * dt * damping + beta * dt**2 * stiffness
    try:
        lu = scipy.linalg.lu_factor(effective)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"effective matrix factorization failed: {exc}") from exc

    steps = tgrid.step_count
    record_count = steps // stride + 1
    frames = np.empty((record_count, n))
    frames[0] = u
    recorded = 1

    c_upred = (0.5 - beta) * dt**2
    c_vpred = (1.0 - gamma) * dt
    for i in range(1, steps + 1):
        t = tgrid.start + i * dt
        force = _check_force(force_schedule(t), n, t)
        u_pred = u + dt * v + c_upred * a
        v_pred = v + c_vpred * a
        rhs = force - stiffness @ u_pred
        if damped:
            rhs -= damping @ v_pred
        a = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
        u = u_pred + beta * dt**2 * a
        v = v_pred + gamma * dt * a
        if i % stride == 0:
            frames[recorded] = u
            recorded += 1

    times = tgrid.start + dt * np.arange(0, steps + 1, stride)
    meta = {
        "solver": "newmark",
        "gamma": gamma,
        "beta_nm": beta,
        "dt": dt,
        "stride": stride,
        "columns": list(system.labels),
    }
    return TimeSeriesResult(times, frames[:recorded], meta=meta)


def system_energy(system: MdofSystem, u: np.ndarray, v: np.ndarray) -> float:
    """Total mechanical energy, kinetic plus elastic."""
    return 0.5 * float(v @ system.mass @ v + u @ system.stiffness @ u)


def sdof_system(m: float, c: float, k: float) -> MdofSystem:
    """Single mass-spring-damper: M=[m], C=[c], K=[k]."""
    if m <= 0.0:
        raise ValidationError(f"mass must be positive, got {m}")
    if c < 0.0 or k < 0.0:
        raise ValidationError("damping and stiffness must be nonnegative")
    return MdofSystem(
        mass=np.array([[m]]),
        damping=np.array([[c]]),
        stiffness=np.array([[k]]),
        labels=("u",),
    )


def bridge_2d_system(m: float, c: float, k: float) -> MdofSystem:
    """Two uncoupled axes with identical mass, damping and stiffness."""
    if m <= 0.0:
        raise ValidationError(f"mass must be positive, got {m}")
    if c < 0.0 or k < 0.0:
        raise ValidationError("damping and stiffness must be nonnegative")
    eye = np.eye(2)
    return MdofSystem(
        mass=m * eye, damping=c * eye, stiffness=k * eye, labels=("x", "y")
    )


def discretize_beam(
    beam: BeamSpec,
    bc: BoundarySpec,
    n_nodes: int,
    damping: RayleighCoeffs = RayleighCoeffs(),
) -> MdofSystem:
    """Lumped-mass finite-difference beam model over the free nodes.

    Mass lumps rho*A over nodal tributary lengths (half cells at the ends);
    stiffness is the static bending operator; C = a*M + b*K (Rayleigh).
    Under-constrained support sets are allowed (for eigen comparisons) but
    tagged with a rank warning that `integrate` honors.
    """
    if n_nodes < 7:
        raise ValidationError(f"n_nodes must be >= 7, got {n_nodes}")
    grid = SpatialGrid.for_beam(beam, n_nodes)
    stiffness_full, free = beam_stiffness_matrix(beam, bc, grid)
    masses_full = beam.section.mass_per_length * trapezoid_weights(grid)
    stiffness = stiffness_full[np.ix_(free, free)]
    mass = np.diag(masses_full[free])
    damping_matrix = damping.mass_coeff * mass + damping.stiffness_coeff * stiffness
    warning = None
    if bc.constraint_count < 2:
        warning = (
            f"end conditions {bc.left.kind}-{bc.right.kind} leave rigid-body modes free"
        )
    labels = tuple(f"x={float(pos)!r}" for pos in grid.positions[free])
    return MdofSystem(
        mass=mass,
        damping=damping_matrix,
        stiffness=stiffness,
        labels=labels,
        grid=grid,
        free_mask=free,
        rank_warning=warning,
    )


def eigenfrequencies(system: MdofSystem, count: int) -> np.ndarray:
    """Lowest `count` undamped circular frequencies of (K, M), ascending."""
    if count < 1 or count > system.size:
        raise ValidationError(f"count must be in [1, {system.size}], got {count}")
    values = scipy.linalg.eigh(
        system.stiffness, system.mass, eigvals_only=True, subset_by_index=[0, count - 1]
    )
    return np.sqrt(np.clip(values, 0.0, None))


def moving_load_force(
    p: float, speed: float, x0: float, grid: SpatialGrid, t: float
) -> np.ndarray:
    """Full-grid nodal force for a load at x0 + speed*t; zero once off-span.

    While the load is on the span the vector sums exactly to p (linear split
    between the bracketing nodes).
    """
    if t < 0.0:
        raise ValidationError(f"time must be nonnegative, got {t}")
    position = x0 + speed * t
    if position < 0.0 or position > grid.length:
        return np.zeros(grid.node_count)
    return point_load_vector(p, position, grid)


def build_force_schedule(loads, beam: BeamSpec, grid: SpatialGrid, free: np.ndarray):
    """Time-to-force closure over the free dofs for a mixed load list."""
    check_load_positions(loads, beam.length)
    static_part = np.zeros(grid.node_count)
    harmonic_parts = []
    moving_parts = []
    for load in loads:
        if isinstance(load, UdlLoad):
            static_part += udl_load_vector(load.q, grid)
        elif isinstance(load, PointLoad):
            static_part += point_load_vector(load.p, load.position, grid)
        elif isinstance(load, HarmonicPointLoad):
            harmonic_parts.append(
                (point_load_vector(load.p0, load.position, grid), 2.0 * math.pi * load.f_hz)
            )
        elif isinstance(load, MovingPointLoad):
            moving_parts.append(load)
        else:
            raise ValidationError(f"unknown load case {load!r}")

    static_free = static_part[free]
    harmonic_free = [(vec[free], omega) for vec, omega in harmonic_parts]

    def schedule(t: float) -> np.ndarray:
        force = static_free.copy()
        for vec, omega in harmonic_free:
            force += math.sin(omega * t) * vec
        for load in moving_parts:
            force += moving_load_force(load.p, load.speed, load.x0, grid, t)[free]
        return force

    return schedule


def beam_time_response(
    beam: BeamSpec,
    bc: BoundarySpec,
    n_nodes: int,
    loads,
    tgrid: TimeGrid,
    cfg: IntegratorConfig = IntegratorConfig(),
    zeta1: float = 0.0,
    stride: int = 1,
) -> TimeSeriesResult:
    """Integrate a discretized beam from rest and report full-grid frames.

    zeta1 > 0 adds stiffness-proportional Rayleigh damping fitted to the
    discrete first mode.
    """
    system = discretize_beam(beam, bc, n_nodes)
    if zeta1 > 0.0:
        omega1 = float(eigenfrequencies(system, 1)[0])
        coeffs = RayleighCoeffs.for_first_mode(zeta1, omega1)
        system = replace(
            system, damping=coeffs.stiffness_coeff * np.asarray(system.stiffness)
        )
    grid = system.grid
    schedule = build_force_schedule(loads, beam, grid, system.free_mask)
    zeros = np.zeros(system.size)
    dof_result = integrate(system, schedule, zeros, zeros, tgrid, cfg, stride=stride)

    frames = np.zeros((dof_result.times.size, grid.node_count))
    frames[:, system.free_mask] = dof_result.frames
    meta = {
        "solver": "newmark_beam",
        "gamma": cfg.gamma,
        "beta_nm": cfg.beta_nm,
        "dt": tgrid.dt,
        "stride": stride,
        "zeta1": zeta1,
        "grid_nodes": grid.node_count,
        "columns": [f"x={float(pos)!r}" for pos in grid.positions],
    }
    return TimeSeriesResult(dof_result.times, frames, meta=meta)


@dataclass(frozen=True)
class SweepPoint:
    f_hz: float
    amplitude_m: float


#: Growth beyond this ratio between the measure and settle windows means no
#: steady state was reached.
GROWTH_LIMIT = 1.2
#: Integration points per forcing period in a sweep.
SWEEP_STEPS_PER_PERIOD = 100


def frequency_sweep(
    beam: BeamSpec,
    bc: BoundarySpec,
    n_nodes: int,
    p0: float,
    xload: float,
    freqs,
    cfg: IntegratorConfig = IntegratorConfig(),
    settle_periods: int = 30,
    measure_periods: int = 10,
    zeta1: float = 0.02,
    workers: int = 1,
) -> list[SweepPoint]:
    """Steady-state midspan amplitude of a harmonic point load, per frequency.

    Each frequency integrates settle+measure periods at a step of at most one
    hundredth of the forcing period; the reported amplitude is the max
    absolute midspan displacement over the measure window.  If that window
    still grows past the settle window the run has no steady state and a
    NonConvergenceError names the frequency.  Runs are independent, so they
    may execute on a thread pool; results keep the input frequency order.
    """
    freqs = [float(f) for f in freqs]
    if any(f <= 0.0 for f in freqs):
        raise ValidationError("sweep frequencies must be positive")
    if settle_periods < 1 or measure_periods < 1:
        raise ValidationError("settle_periods and measure_periods must be >= 1")
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    mid_node = SpatialGrid.for_beam(beam, n_nodes).nearest_node(beam.length / 2.0)

    def run_one(f_hz: float) -> SweepPoint:
        period_step = 1.0 / (SWEEP_STEPS_PER_PERIOD * f_hz)
        dt = period_step if cfg.dt is None else min(cfg.dt, period_step)
        total = (settle_periods + measure_periods) / f_hz
        tgrid = TimeGrid(0.0, total, dt)
        result = beam_time_response(
            beam,
            bc,
            n_nodes,
            [HarmonicPointLoad(p0, f_hz, xload)],
            tgrid,
            replace(cfg, dt=None),
            zeta1=zeta1,
        )
        mid = result.frames[:, mid_node]
        boundary = settle_periods / f_hz
        settle = np.abs(mid[result.times < boundary])
        measure = np.abs(mid[result.times >= boundary])
        amplitude = float(measure.max())
        settle_peak = float(settle.max())
        if settle_peak > 0.0 and amplitude > GROWTH_LIMIT * settle_peak:
            raise NonConvergenceError(
                f"no steady state at f_hz={f_hz}: amplitude grew from "
                f"{settle_peak:.3e} to {amplitude:.3e}"
            )
        return SweepPoint(f_hz=f_hz, amplitude_m=amplitude)

    if workers == 1:
        return [run_one(f) for f in freqs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_one, freqs))
