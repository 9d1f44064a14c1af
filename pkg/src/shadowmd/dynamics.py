"""Damped co-evolution of the bond coordinate and the circuit parameters.

Per step k (superscripts follow the update equations literally):

* ``R(k) = R(k-1) + v(k-1) dt``
* ``v(k) = (1 - gamma dt) v(k-1) + F(R(k-1), theta(k-1)) / m * dt``
* ``theta(k) = theta(k-1) + xi(k-1) dt``
* ``xi(k) = (1 - zeta dt) xi(k-1) + F_theta(R(k), theta(k-1)) / mu * dt``

The only stochasticity is the finite-sample noise of the force estimators;
no explicit random kick is injected. With the shadow estimator the nuclear
force costs one batch of N_S snapshots per step regardless of how many force
components there are; the direct estimator pays N_shot shots per non-identity
Pauli term. Parameter forces use the two-term shift rule, one fresh batch per
shifted state (reusing a batch across different states would bias them).

Units at the interface: R in Angstrom, v in Angstrom/fs, t in fs, energies in
Hartree, masses in electron masses; ``constants.ACCEL_FACTOR`` bridges force
to acceleration. The parameter mass mu is the tuning scalar the (theta, xi)
update arithmetic requires (Hartree fs^2/rad^2).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .constants import ACCEL_FACTOR, H2_REDUCED_MASS_ME, inverse_temperature
from .errors import BondRangeError, ConfigurationError, ConvergenceError
from .hamiltonian import HamiltonianTable, force_observable, hamiltonian_at
from .pauli import (
    Observable,
    expectation_values,
    ground_state_exact,
    _exact_word_values,
)
from .shadows import _collect_rows, _direct_means, _word_estimate_matrix, median_of_means
from .statevector import AnsatzConfig, _prepare_rows
from .streams import TRAJECTORY, stream


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ShadowEstimator:
    """Estimate all observables of a state from one batch of random snapshots."""

    n_snapshots: int = 51
    n_groups: int = 3

    def __post_init__(self):
        if not 1 <= self.n_groups <= self.n_snapshots:
            raise ConfigurationError(
                f"need N_S >= K >= 1, got N_S={self.n_snapshots}, K={self.n_groups}"
            )


@dataclass(frozen=True)
class DirectEstimator:
    """Measure every non-identity Pauli term individually."""

    n_shots: int = 51

    def __post_init__(self):
        if self.n_shots < 1:
            raise ConfigurationError(f"n_shots must be >= 1, got {self.n_shots}")


@dataclass(frozen=True)
class ExactEstimator:
    """Noise-free expectation values (diagnostic only, zero preparations)."""


@dataclass(frozen=True)
class FixedDissipation:
    """Constant friction coefficients in 1/fs."""

    gamma: float = 0.8
    zeta: float = 0.8


@dataclass(frozen=True)
class AdaptiveDissipation:
    """Friction recomputed from a sliding window of realized force estimates."""

    window: int = 100

    def __post_init__(self):
        if self.window < 2:
            raise ConfigurationError(f"window must be >= 2, got {self.window}")


@dataclass(frozen=True)
class DynamicsConfig:
    ansatz: AnsatzConfig
    dt: float = 0.1  # fs
    mass: float = H2_REDUCED_MASS_ME  # electron masses
    mu: float = 0.1  # Hartree fs^2 / rad^2
    temperature: float = 70.0  # Kelvin
    estimator: object = field(default_factory=ShadowEstimator)
    dissipation: object = field(default_factory=FixedDissipation)
    fd_step: float = 1e-3  # Angstrom
    total_time: float = 4000.0  # fs
    burn_in: float = 250.0  # fs
    seed: int = 1
    freeze_theta: bool = False

    def __post_init__(self):
        if self.dt <= 0 or self.mass <= 0 or self.mu <= 0 or self.fd_step <= 0:
            raise ConfigurationError("dt, mass, mu and fd_step must be positive")
        if self.total_time <= 0 or self.burn_in < 0:
            raise ConfigurationError("total_time must be positive, burn_in >= 0")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed}")
        if not isinstance(
            self.estimator, (ShadowEstimator, DirectEstimator, ExactEstimator)
        ):
            raise ConfigurationError(f"unknown estimator {self.estimator!r}")
        if isinstance(self.dissipation, FixedDissipation):
            d = self.dissipation
            if d.gamma < 0 or d.zeta < 0:
                raise ConfigurationError("dissipation coefficients must be >= 0")
            if d.gamma * self.dt >= 1.0 or d.zeta * self.dt >= 1.0:
                raise ConfigurationError(
                    "gamma*dt and zeta*dt must stay below 1 for positive damping"
                )
        elif not isinstance(self.dissipation, AdaptiveDissipation):
            raise ConfigurationError(f"unknown dissipation mode {self.dissipation!r}")

    @property
    def beta(self) -> float:
        """Inverse temperature, 1/Hartree."""
        return inverse_temperature(self.temperature)

    @property
    def n_steps(self) -> int:
        return int(round(self.total_time / self.dt))


@dataclass(frozen=True)
class MDState:
    """Dynamical variables at one timestep."""

    r: float  # Angstrom
    v: float  # Angstrom / fs
    theta: np.ndarray  # radians
    xi: np.ndarray  # radians / fs
    step: int = 0

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))
        if not (
            math.isfinite(self.r)
            and math.isfinite(self.v)
            and np.all(np.isfinite(self.theta))
            and np.all(np.isfinite(self.xi))
        ):
            raise ValueError("non-finite dynamical variable")
        if self.theta.shape != self.xi.shape:
            raise ConfigurationError("theta and xi must have the same length")


def initial_state(r: float, theta: np.ndarray) -> MDState:
    """State at rest: v = 0, xi = 0, step 0."""
    theta = np.asarray(theta, dtype=float)
    return MDState(r=r, v=0.0, theta=theta, xi=np.zeros_like(theta))


# ---------------------------------------------------------------------------
# force estimation


def _estimate_energies(rows, obs, estimator, rng):
    """Estimate <obs> for each row state; returns (values, preparations).

    Shadow mode collects one independent batch per row and evaluates every
    term of ``obs`` from it; direct mode measures each non-identity term with
    its own shots; exact mode evaluates the expectations analytically.
    """
    if isinstance(estimator, ExactEstimator):
        return expectation_values(rows, obs), 0
    if isinstance(estimator, ShadowEstimator):
        bases, outcomes = _collect_rows(rows, estimator.n_snapshots, rng)
        vals = _word_estimate_matrix(bases, outcomes, obs.word_codes())
        moms = median_of_means(vals, estimator.n_groups)
        return moms @ obs.coefficients, rows.shape[0] * estimator.n_snapshots
    codes = obs.word_codes()
    heavy = codes.any(axis=1)
    identity_part = float(obs.coefficients[~heavy].sum())
    means = _direct_means(rows, codes[heavy], estimator.n_shots, rng)
    values = means @ obs.coefficients[heavy] + identity_part
    preparations = rows.shape[0] * int(heavy.sum()) * estimator.n_shots
    return values, preparations


def nuclear_force(
    table: HamiltonianTable,
    r: float,
    theta: np.ndarray,
    config: DynamicsConfig,
    rng: np.random.Generator,
) -> tuple[float, int]:
    """Estimated force on the bond coordinate (Hartree/Angstrom).

    Minus the estimated expectation of the central-difference Hamiltonian
    gradient on the ansatz state.
    """
    fobs = force_observable(table, r, config.fd_step)
    rows = _prepare_rows(config.ansatz, np.asarray(theta, dtype=float)[None, :])
    values, preparations = _estimate_energies(rows, fobs, config.estimator, rng)
    return -float(values[0]), preparations


def _shifted_parameters(theta: np.ndarray) -> np.ndarray:
    """(2P, P) matrix of +pi/2 / -pi/2 single-parameter shifts, interleaved."""
    p = theta.shape[0]
    out = np.tile(theta, (2 * p, 1))
    for i in range(p):
        out[2 * i, i] += 0.5 * np.pi
        out[2 * i + 1, i] -= 0.5 * np.pi
    return out


def parameter_force(
    table: HamiltonianTable,
    r: float,
    theta: np.ndarray,
    config: DynamicsConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Shift-rule force on every circuit parameter (Hartree/rad).

    Component i is ``-(L(theta + pi/2 e_i) - L(theta - pi/2 e_i)) / 2`` with
    the energy L estimated at bond length ``r``; each shifted state gets a
    fresh estimate.
    """
    theta = np.asarray(theta, dtype=float)
    p = theta.shape[0]
    if p == 0:
        return np.zeros(0), 0
    obs = hamiltonian_at(table, r)
    rows = _prepare_rows(config.ansatz, _shifted_parameters(theta))
    values, preparations = _estimate_energies(rows, obs, config.estimator, rng)
    return -0.5 * (values[0::2] - values[1::2]), preparations


def dissipation_coefficients(
    force_variance: float,
    param_force_variance: np.ndarray,
    config: DynamicsConfig,
) -> tuple[float, np.ndarray]:
    """Friction from force statistics: f^2 beta dt / (2 mass), in 1/fs.

    ``force_variance`` is in (Hartree/Angstrom)^2 and converts through the
    same bridge as the acceleration; the parameter-sector variance is in
    (Hartree/rad)^2 and needs no conversion given mu's mixed units.
    """
    f2 = float(force_variance)
    ft2 = np.asarray(param_force_variance, dtype=float)
    if f2 < 0.0 or np.any(ft2 < 0.0):
        raise ValueError("variances must be non-negative")
    gamma = f2 * config.beta * config.dt * ACCEL_FACTOR / (2.0 * config.mass)
    zeta = ft2 * config.beta * config.dt / (2.0 * config.mu)
    return gamma, zeta


class _ForceWindow:
    """Sliding window of realized force estimates for adaptive dissipation."""

    def __init__(self, size: int, n_params: int):
        self.size = size
        self.forces: list[float] = []
        self.param_forces: list[np.ndarray] = []
        self.n_params = n_params

    def push(self, force: float, param_force: np.ndarray) -> None:
        self.forces.append(force)
        self.param_forces.append(np.asarray(param_force, dtype=float))
        if len(self.forces) > self.size:
            self.forces.pop(0)
            self.param_forces.pop(0)

    def variances(self) -> tuple[float, np.ndarray]:
        if len(self.forces) < 2:
            return 0.0, np.zeros(self.n_params)
        f2 = float(np.var(self.forces, ddof=1))
        ft2 = np.var(np.stack(self.param_forces), axis=0, ddof=1)
        return f2, ft2


def _step(
    state: MDState,
    table: HamiltonianTable,
    config: DynamicsConfig,
    rng: np.random.Generator,
    window: _ForceWindow | None = None,
) -> tuple[MDState, float, int]:
    """One update of (R, v, theta, xi); returns (new state, force, preparations)."""
    dt = config.dt
    r_new = state.r + state.v * dt

    force, preps = nuclear_force(table, state.r, state.theta, config, rng)

    if config.freeze_theta or state.theta.shape[0] == 0:
        f_theta = np.zeros_like(state.xi)
        preps_theta = 0
    else:
        f_theta, preps_theta = parameter_force(
            table, r_new, state.theta, config, rng
        )

    if isinstance(config.dissipation, FixedDissipation):
        gamma = config.dissipation.gamma
        zeta: float | np.ndarray = config.dissipation.zeta
    else:
        if window is not None:
            window.push(force, f_theta)
            f2, ft2 = window.variances()
        else:
            f2, ft2 = 0.0, np.zeros_like(state.xi)
        gamma, zeta = dissipation_coefficients(f2, ft2, config)

    v_new = (1.0 - gamma * dt) * state.v + force * ACCEL_FACTOR / config.mass * dt

    if config.freeze_theta:
        theta_new = state.theta
        xi_new = state.xi
    else:
        theta_new = state.theta + state.xi * dt
        xi_new = (1.0 - zeta * dt) * state.xi + f_theta / config.mu * dt

    new_state = MDState(r_new, v_new, theta_new, xi_new, state.step + 1)
    return new_state, force, preps + preps_theta


def qcpmd_step(
    state: MDState,
    table: HamiltonianTable,
    config: DynamicsConfig,
    rng: np.random.Generator,
    window: _ForceWindow | None = None,
) -> MDState:
    """Advance the dynamical variables by one timestep."""
    return _step(state, table, config, rng, window)[0]


# ---------------------------------------------------------------------------
# trajectories


@dataclass
class TrajectoryRecord:
    """Column-wise per-step log; row 0 is the initial condition (force 0)."""

    times: np.ndarray  # fs
    r: np.ndarray  # Angstrom
    v: np.ndarray  # Angstrom/fs
    force: np.ndarray  # Hartree/Angstrom, estimate used in that step's v update
    energy: np.ndarray  # Hartree, exact energy of the recorded state
    preparations: np.ndarray  # cumulative state preparations
    aborted: bool = False

    def __len__(self):
        return self.times.shape[0]

    def rows_after(self, burn_in: float) -> np.ndarray:
        return np.flatnonzero(self.times > burn_in)


@dataclass(frozen=True)
class TrajectorySummary:
    mean_r: float
    std_r: float
    total_preparations: int
    aborted: bool
    n_steps: int
    burn_in: float


class _EnergyDiagnostic:
    """Exact L(R, theta) evaluator reusing one template observable."""

    def __init__(self, table: HamiltonianTable, ansatz: AnsatzConfig):
        self.table = table
        self.ansatz = ansatz
        self.template = Observable(
            (1.0, w) for w in table.words
        )

    def __call__(self, r: float, theta: np.ndarray) -> float:
        rows = _prepare_rows(self.ansatz, np.asarray(theta, dtype=float)[None, :])
        word_values = _exact_word_values(rows, self.template)[0]
        return float(self.table.coefficients_at(r) @ word_values)


def run_trajectory(
    config: DynamicsConfig,
    initial: MDState,
    table: HamiltonianTable,
    trial: int = 0,
) -> tuple[TrajectoryRecord, TrajectorySummary]:
    """Integrate for total_time/dt steps with per-step derived RNG streams.

    A bond length leaving the tabulated range aborts the trajectory; records
    up to the abort are preserved and flagged. Post-burn-in statistics cover
    rows with time strictly greater than ``config.burn_in``.
    """
    n_steps = config.n_steps
    rows = n_steps + 1
    times = np.arange(rows) * config.dt
    r = np.empty(rows)
    v = np.empty(rows)
    force = np.zeros(rows)
    energy = np.empty(rows)
    preparations = np.zeros(rows, dtype=np.int64)

    diagnostic = _EnergyDiagnostic(table, config.ansatz)
    window = (
        _ForceWindow(config.dissipation.window, initial.theta.shape[0])
        if isinstance(config.dissipation, AdaptiveDissipation)
        else None
    )

    state = initial
    r[0], v[0] = state.r, state.v
    energy[0] = diagnostic(state.r, state.theta)
    aborted = False
    filled = 1
    for k in range(1, rows):
        rng = stream(config.seed, TRAJECTORY, trial, k)
        try:
            state, step_force, step_preps = _step(state, table, config, rng, window)
            energy_k = diagnostic(state.r, state.theta)
        except BondRangeError:
            aborted = True
            break
        r[k], v[k] = state.r, state.v
        force[k] = step_force
        energy[k] = energy_k
        preparations[k] = preparations[k - 1] + step_preps
        filled = k + 1

    record = TrajectoryRecord(
        times=times[:filled],
        r=r[:filled],
        v=v[:filled],
        force=force[:filled],
        energy=energy[:filled],
        preparations=preparations[:filled],
        aborted=aborted,
    )
    keep = record.rows_after(config.burn_in)
    if keep.size:
        mean_r = float(record.r[keep].mean())
        std_r = float(record.r[keep].std())
    else:
        mean_r = float("nan")
        std_r = float("nan")
    summary = TrajectorySummary(
        mean_r=mean_r,
        std_r=std_r,
        total_preparations=int(record.preparations[-1]),
        aborted=aborted,
        n_steps=filled - 1,
        burn_in=config.burn_in,
    )
    return record, summary


# ---------------------------------------------------------------------------
# sample accounting


@dataclass(frozen=True)
class SampleBudget:
    """Closed-form state preparations per timestep."""

    nuclear_per_step: int
    parameter_per_step: int

    @property
    def total_per_step(self) -> int:
        return self.nuclear_per_step + self.parameter_per_step


def sample_budget(
    config: DynamicsConfig,
    n_coordinates: int,
    n_params: int,
    n_hamiltonian_terms: int,
) -> SampleBudget:
    """Preparation counts per step for ``n_coordinates`` nuclear coordinates.

    ``n_hamiltonian_terms`` counts non-identity Pauli terms. With shadows the
    nuclear-force cost is one batch regardless of the coordinate count; the
    direct estimator pays per coordinate and per term. Parameter forces cost
    two estimates per parameter either way.
    """
    est = config.estimator
    if isinstance(est, ExactEstimator):
        return SampleBudget(0, 0)
    if isinstance(est, ShadowEstimator):
        return SampleBudget(est.n_snapshots, 2 * n_params * est.n_snapshots)
    per_state = n_hamiltonian_terms * est.n_shots
    return SampleBudget(n_coordinates * per_state, 2 * n_params * per_state)


# ---------------------------------------------------------------------------
# variational baseline

_RESTART_ENTROPY = 0x5AD0


def vqe_optimize(
    table: HamiltonianTable,
    r: float,
    ansatz_config: AnsatzConfig,
    theta_init: np.ndarray,
    tol: float = 1e-5,
    max_iterations: int = 10_000,
    max_restarts: int = 8,
) -> np.ndarray:
    """Minimize the exact ansatz energy at bond length ``r`` with BFGS.

    Gradients come from the two-term shift rule (exact for this ansatz).
    Convergence means the gradient infinity-norm fell below ``tol`` and the
    energy sits within 1e-4 Ha of the dense-diagonalization ground energy;
    otherwise deterministic random restarts are tried before raising
    ``ConvergenceError`` with the best parameters seen.
    """
    obs = hamiltonian_at(table, r)
    e_ground = ground_state_exact(obs)[0]
    theta_init = np.asarray(theta_init, dtype=float).reshape(-1)
    p = ansatz_config.parameter_count
    if theta_init.shape[0] != p:
        raise ConfigurationError(
            f"theta_init has {theta_init.shape[0]} entries, ansatz needs {p}"
        )

    def fun(theta):
        rows = _prepare_rows(ansatz_config, theta[None, :])
        return float(expectation_values(rows, obs)[0])

    def jac(theta):
        rows = _prepare_rows(ansatz_config, _shifted_parameters(theta))
        values = expectation_values(rows, obs)
        return 0.5 * (values[0::2] - values[1::2])

    if p == 0:
        gap = fun(theta_init) - e_ground
        if gap < 1e-4:
            return theta_init
        raise ConvergenceError(
            "parameter-free ansatz cannot reach the ground energy", theta_init, gap
        )

    best_theta = theta_init
    best_energy = fun(theta_init)
    start = theta_init
    for attempt in range(max_restarts + 1):
        result = minimize(
            fun,
            start,
            jac=jac,
            method="BFGS",
            options={"gtol": tol, "maxiter": max_iterations},
        )
        energy = float(result.fun)
        if energy < best_energy:
            best_energy = energy
            best_theta = np.asarray(result.x, dtype=float)
        grad_inf = float(np.max(np.abs(jac(np.asarray(result.x, dtype=float)))))
        if grad_inf < tol and energy - e_ground < 1e-4:
            return np.asarray(result.x, dtype=float)
        start = stream(_RESTART_ENTROPY, attempt).uniform(0.0, 2.0 * np.pi, p)
    raise ConvergenceError(
        f"VQE did not converge at R={r}", best_theta, best_energy - e_ground
    )
