"""Experiment presets and their file outputs.

Every preset writes into an output directory and returns a summary payload.
Outputs are bit-reproducible for a fixed (config, seed): CSV floats use
``repr`` round-tripping, JSON is sorted-key pretty-printed, and the SVG
writer embeds nothing run-dependent.

Defaults reproduce the reference experiments: 70 K, dt = 0.1 fs, mu = 0.1,
depth-4 four-qubit ansatz, shadow batches of 51 snapshots in 3 groups vs 51
direct shots, 4000 fs equilibrium runs and 2000 fs quenches with a 250 fs
burn-in. The per-step damping factors are 1 - gamma*dt = 1 - zeta*dt = 0.2;
see the README note on why the dissipation constants are read per-step.
"""

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import (
    DirectEstimator,
    DynamicsConfig,
    ExactEstimator,
    FixedDissipation,
    AdaptiveDissipation,
    MDState,
    ShadowEstimator,
    TrajectoryRecord,
    initial_state,
    run_trajectory,
    vqe_optimize,
)
from .errors import ConfigurationError
from .hamiltonian import (
    HamiltonianTable,
    default_table_path,
    ground_state_curve_point,
    hamiltonian_at,
    load_table,
)
from .pauli import Observable, PauliWord, expectation_exact, ground_state_exact
from .shadows import collect_snapshots, direct_pauli_estimate, estimate_pauli_mom
from .statevector import AnsatzConfig, prepare_ansatz_state
from .streams import BENCH, THETA_INIT, VQE, stream
from .svgplot import histogram_svg, line_svg

PRESETS = ("equilibrium", "quench", "variance-bench", "vqe", "curve")

# Fixed 0.002 A bins over [0.6, 1.2] A for bond-length histograms
HIST_EDGES = np.round(0.6 + 0.002 * np.arange(301), 3)

THREAD_ENV = "QCPMD_THREADS"


@dataclass(frozen=True)
class RunConfig:
    """Flat run configuration; file keys match field names one to one."""

    preset: str = "equilibrium"
    hamiltonian_table: str = ""  # empty -> packaged fixture
    out: str = "runs"
    seed: int = 1
    trials: int = 5
    initial_r: float = 0.735
    theta_policy: str = "vqe"  # vqe | random | file
    theta_file: str = ""
    dt: float = 0.1
    mass: float = 918.735
    mu: float = 0.1
    temperature: float = 70.0
    estimator: str = "shadows"  # shadows | direct | exact (single-mode presets)
    n_snapshots: int = 51
    k_groups: int = 3
    n_shots: int = 51
    dissipation: str = "fixed"  # fixed | adaptive
    gamma: float = 8.0  # 1/fs; gamma*dt = 0.8 per step
    zeta: float = 8.0  # 1/fs; zeta*dt = 0.8 per step
    adaptive_window: int = 100
    fd_step: float = 1e-3
    total_time: float = 4000.0
    burn_in: float = 250.0
    ansatz_qubits: int = 4
    ansatz_depth: int = 4
    ansatz_layout: str = "real-layered"
    initial_occupation: str = "0011"
    vqe_tol: float = 1e-5
    bench_repetitions: int = 1000
    bench_param_sets: int = 5

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigurationError(
                f"unknown preset {self.preset!r}; choose from {', '.join(PRESETS)}"
            )
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed}")
        if self.theta_policy not in ("vqe", "random", "file"):
            raise ConfigurationError(f"unknown theta_policy {self.theta_policy!r}")
        if self.estimator not in ("shadows", "direct", "exact"):
            raise ConfigurationError(f"unknown estimator {self.estimator!r}")
        if self.dissipation not in ("fixed", "adaptive"):
            raise ConfigurationError(f"unknown dissipation {self.dissipation!r}")

    def ansatz(self) -> AnsatzConfig:
        return AnsatzConfig(
            self.ansatz_qubits,
            self.ansatz_depth,
            self.ansatz_layout,
            self.initial_occupation,
        )

    def estimator_spec(self, name: str | None = None):
        name = name or self.estimator
        if name == "shadows":
            return ShadowEstimator(self.n_snapshots, self.k_groups)
        if name == "direct":
            return DirectEstimator(self.n_shots)
        return ExactEstimator()

    def dissipation_spec(self):
        if self.dissipation == "adaptive":
            return AdaptiveDissipation(self.adaptive_window)
        return FixedDissipation(self.gamma, self.zeta)

    def dynamics(self, estimator_name: str | None = None) -> DynamicsConfig:
        return DynamicsConfig(
            ansatz=self.ansatz(),
            dt=self.dt,
            mass=self.mass,
            mu=self.mu,
            temperature=self.temperature,
            estimator=self.estimator_spec(estimator_name),
            dissipation=self.dissipation_spec(),
            fd_step=self.fd_step,
            total_time=self.total_time,
            burn_in=self.burn_in,
            seed=self.seed,
        )

    def load_table(self) -> HamiltonianTable:
        path = self.hamiltonian_table or default_table_path()
        return load_table(path)


# Per-preset field defaults applied before config-file overrides
PRESET_DEFAULTS: dict[str, dict] = {
    "equilibrium": {"initial_r": 0.735, "total_time": 4000.0, "theta_policy": "vqe"},
    "quench": {"initial_r": 1.0, "total_time": 2000.0, "theta_policy": "random"},
    "variance-bench": {},
    "vqe": {"theta_policy": "random"},
    "curve": {},
}

def _type_name(annotation) -> str:
    return annotation if isinstance(annotation, str) else annotation.__name__


_FIELD_TYPES = {f.name: _type_name(f.type) for f in fields(RunConfig)}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse the flat ``key = value`` format with ``#`` comments."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(
                f"{source}:{lineno}: expected 'key = value', got {raw!r}"
            )
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        kind = _FIELD_TYPES[key]
        try:
            if kind == "int":
                values[key] = int(value)
            elif kind == "float":
                values[key] = float(value)
            else:
                values[key] = value
        except ValueError:
            raise ConfigurationError(
                f"{source}:{lineno}: cannot parse {value!r} as {kind} for {key}"
            ) from None
    return values


def build_run_config(
    preset: str,
    config_path: str | None = None,
    seed: int | None = None,
    out: str | None = None,
) -> RunConfig:
    """Layer defaults, preset defaults, config file, then CLI overrides."""
    if preset not in PRESETS:
        raise ConfigurationError(
            f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}"
        )
    values = dict(PRESET_DEFAULTS[preset])
    values["preset"] = preset
    if config_path:
        path = Path(config_path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        file_values = parse_config_text(text, source=str(path))
        file_values.pop("preset", None)  # the CLI owns preset selection
        values.update(file_values)
    if seed is not None:
        values["seed"] = seed
    if out is not None:
        values["out"] = out
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# output helpers

TRAJECTORY_HEADER = (
    "step,time_fs,R_angstrom,v_angstrom_per_fs,force_ha_per_angstrom,"
    "energy_ha,preparations"
)


def _f(x) -> str:
    """Shortest round-trip decimal for a float (bit-exact reload)."""
    return repr(float(x))


def write_trajectory_csv(path: Path, record: TrajectoryRecord) -> None:
    lines = [TRAJECTORY_HEADER]
    for k in range(len(record)):
        lines.append(
            f"{k},{_f(record.times[k])},{_f(record.r[k])},{_f(record.v[k])},"
            f"{_f(record.force[k])},{_f(record.energy[k])},"
            f"{int(record.preparations[k])}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if math.isnan(x) else x
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_summary_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _post_burn_in_histogram(record: TrajectoryRecord, burn_in: float) -> np.ndarray:
    keep = record.rows_after(burn_in)
    counts, _ = np.histogram(record.r[keep], bins=HIST_EDGES)
    return counts


@dataclass
class PresetOutcome:
    summary: dict
    files: list[Path]
    aborted: bool


def _thread_cap() -> int:
    raw = os.environ.get(THREAD_ENV, "").strip()
    if not raw:
        return 0
    try:
        return max(0, int(raw))
    except ValueError:
        raise ConfigurationError(
            f"{THREAD_ENV} must be an integer, got {raw!r}"
        ) from None


def _run_trials(tasks, workers: int):
    """Run ``tasks`` (callables) sequentially or on a thread pool, in order."""
    if workers >= 2:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(t) for t in tasks]
            return [f.result() for f in futures]
    return [t() for t in tasks]


def resolve_initial_theta(
    run: RunConfig, table: HamiltonianTable, trial: int
) -> np.ndarray:
    """Initial parameter vector per the configured policy."""
    ansatz = run.ansatz()
    p = ansatz.parameter_count
    if run.theta_policy == "random":
        return stream(run.seed, THETA_INIT, trial).uniform(0.0, 2.0 * np.pi, p)
    if run.theta_policy == "file":
        if not run.theta_file:
            raise ConfigurationError("theta_policy=file needs theta_file")
        try:
            data = json.loads(Path(run.theta_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(
                f"cannot load theta_file {run.theta_file}: {exc}"
            ) from None
        theta = np.asarray(data, dtype=float).reshape(-1)
        if theta.shape[0] != p:
            raise ConfigurationError(
                f"theta_file has {theta.shape[0]} entries, ansatz needs {p}"
            )
        return theta
    init = stream(run.seed, VQE, trial).uniform(0.0, 2.0 * np.pi, p)
    return vqe_optimize(table, run.initial_r, ansatz, init, tol=run.vqe_tol)


# ---------------------------------------------------------------------------
# presets


def preset_equilibrium(run: RunConfig) -> PresetOutcome:
    """Start at the equilibrium distance with optimized parameters; run one
    trajectory per estimator mode and compare bond-length statistics."""
    out = Path(run.out)
    out.mkdir(parents=True, exist_ok=True)
    table = run.load_table()
    theta0 = resolve_initial_theta(run, table, trial=0)
    obs = hamiltonian_at(table, run.initial_r)
    start_energy = expectation_exact(
        prepare_ansatz_state(run.ansatz(), theta0), obs
    )
    e_ground = ground_state_exact(obs)[0]

    files: list[Path] = []
    modes: dict[str, dict] = {}
    hist_series = []
    total_preparations = 0
    aborted_any = False
    for idx, mode in enumerate(("shadows", "direct")):
        config = run.dynamics(mode)
        record, summary = run_trajectory(
            config, initial_state(run.initial_r, theta0), table, trial=idx
        )
        csv_path = out / f"equilibrium_{mode}_trajectory.csv"
        write_trajectory_csv(csv_path, record)
        files.append(csv_path)
        hist_series.append((mode, _post_burn_in_histogram(record, run.burn_in)))
        modes[mode] = {
            "mean_r": summary.mean_r,
            "std_r": summary.std_r,
            "total_preparations": summary.total_preparations,
            "aborted": summary.aborted,
            "n_steps": summary.n_steps,
        }
        total_preparations += summary.total_preparations
        aborted_any |= summary.aborted

    svg_path = out / "equilibrium_histogram.svg"
    histogram_svg(
        svg_path,
        HIST_EDGES,
        hist_series,
        title="Bond-length distribution after burn-in",
        x_label="R (Angstrom)",
    )
    files.append(svg_path)

    summary_payload = {
        "preset": run.preset,
        "seed": run.seed,
        "total_preparations": total_preparations,
        "post_burn_in": {m: {"mean_r": v["mean_r"], "std_r": v["std_r"]} for m, v in modes.items()},
        "aborted": {m: v["aborted"] for m, v in modes.items()},
        "modes": modes,
        "initial_r": run.initial_r,
        "burn_in": run.burn_in,
        "theta_policy": run.theta_policy,
        "start_energy_ha": start_energy,
        "ground_energy_ha": e_ground,
    }
    json_path = out / "equilibrium_summary.json"
    write_summary_json(json_path, summary_payload)
    files.append(json_path)
    return PresetOutcome(summary_payload, files, aborted_any)


def preset_quench(run: RunConfig) -> PresetOutcome:
    """Relax from a stretched bond and random parameters, several trials."""
    out = Path(run.out)
    out.mkdir(parents=True, exist_ok=True)
    table = run.load_table()
    ansatz = run.ansatz()
    p = ansatz.parameter_count
    config = run.dynamics()

    def make_task(trial: int):
        theta0 = stream(run.seed, THETA_INIT, trial).uniform(0.0, 2.0 * np.pi, p)
        if run.theta_policy != "random":
            theta0 = resolve_initial_theta(run, table, trial)

        def task():
            return run_trajectory(
                config, initial_state(run.initial_r, theta0), table, trial=trial
            )

        return task

    results = _run_trials(
        [make_task(t) for t in range(run.trials)], _thread_cap()
    )

    files: list[Path] = []
    trials_payload = []
    svg_series = []
    total_preparations = 0
    for trial, (record, summary) in enumerate(results):
        csv_path = out / f"quench_trial{trial}_trajectory.csv"
        write_trajectory_csv(csv_path, record)
        files.append(csv_path)
        stride = max(1, len(record) // 500)
        svg_series.append(
            ("", record.times[::stride], record.r[::stride], 1.0, 0.35)
        )
        trials_payload.append(
            {
                "trial": trial,
                "mean_r": summary.mean_r,
                "std_r": summary.std_r,
                "aborted": summary.aborted,
                "total_preparations": summary.total_preparations,
                "n_steps": summary.n_steps,
            }
        )
        total_preparations += summary.total_preparations

    # mean trajectory over trials still alive at each step
    max_len = max(len(record) for record, _ in results)
    times = results[0][0].times
    mean_rows = []
    for k in range(max_len):
        alive = [rec.r[k] for rec, _ in results if len(rec) > k]
        mean_rows.append((k, float(k * run.dt), float(np.mean(alive)), len(alive)))
    mean_csv = out / "quench_mean_trajectory.csv"
    mean_csv.write_text(
        "\n".join(
            ["step,time_fs,mean_R_angstrom,trials_alive"]
            + [f"{k},{_f(t)},{_f(r)},{n}" for k, t, r, n in mean_rows]
        )
        + "\n",
        encoding="utf-8",
    )
    files.append(mean_csv)

    mean_times = np.array([row[1] for row in mean_rows])
    mean_r = np.array([row[2] for row in mean_rows])
    stride = max(1, mean_times.shape[0] // 500)
    svg_series.append(
        ("mean of trials", mean_times[::stride], mean_r[::stride], 2.0, 1.0)
    )
    svg_path = out / "quench_trajectories.svg"
    line_svg(
        svg_path,
        svg_series,
        title="Bond-length relaxation from R = "
        f"{run.initial_r:g} A, random parameters",
        x_label="t (fs)",
        y_label="R (Angstrom)",
    )
    files.append(svg_path)

    survivors = [t["mean_r"] for t in trials_payload if not t["aborted"]]
    grand_mean = float(np.mean(survivors)) if survivors else float("nan")
    summary_payload = {
        "preset": run.preset,
        "seed": run.seed,
        "estimator": run.estimator,
        "total_preparations": total_preparations,
        "post_burn_in": {
            "grand_mean_r": grand_mean,
            "trials": [
                {"mean_r": t["mean_r"], "std_r": t["std_r"]} for t in trials_payload
            ],
        },
        "aborted": [t["aborted"] for t in trials_payload],
        "trials": trials_payload,
        "initial_r": run.initial_r,
        "burn_in": run.burn_in,
    }
    json_path = out / "quench_summary.json"
    write_summary_json(json_path, summary_payload)
    files.append(json_path)
    return PresetOutcome(summary_payload, files, any(t["aborted"] for t in trials_payload))


def preset_variance_bench(run: RunConfig) -> PresetOutcome:
    """Estimator-variance comparison on <Z_0> over repeated estimates."""
    out = Path(run.out)
    out.mkdir(parents=True, exist_ok=True)
    ansatz = run.ansatz()
    word = PauliWord("Z" + "I" * (ansatz.n - 1))
    z_obs = Observable([(1.0, word)])

    rows = []
    for t in range(run.bench_param_sets):
        theta = stream(run.seed, BENCH, t, 0).uniform(
            0.0, 2.0 * np.pi, ansatz.parameter_count
        )
        state = prepare_ansatz_state(ansatz, theta)
        exact_z = expectation_exact(state, z_obs)
        rng_direct = stream(run.seed, BENCH, t, 1)
        direct_vals = np.array(
            [
                direct_pauli_estimate(state, word, run.n_shots, rng_direct)
                for _ in range(run.bench_repetitions)
            ]
        )
        rng_shadow = stream(run.seed, BENCH, t, 2)
        shadow_vals = np.array(
            [
                estimate_pauli_mom(
                    collect_snapshots(
                        state, run.n_snapshots, run.k_groups, rng_shadow
                    ),
                    word,
                )
                for _ in range(run.bench_repetitions)
            ]
        )
        rows.append(
            {
                "trial": t,
                "exact_z": exact_z,
                "direct_variance": float(np.var(direct_vals, ddof=1)),
                "shadow_variance": float(np.var(shadow_vals, ddof=1)),
                "direct_mean": float(direct_vals.mean()),
                "shadow_mean": float(shadow_vals.mean()),
            }
        )

    csv_path = out / "variance_bench_trials.csv"
    csv_path.write_text(
        "\n".join(
            ["trial,exact_z,direct_variance,shadow_variance,variance_ratio"]
            + [
                f"{r['trial']},{_f(r['exact_z'])},{_f(r['direct_variance'])},"
                f"{_f(r['shadow_variance'])},"
                f"{_f(r['shadow_variance'] / r['direct_variance'])}"
                for r in rows
            ]
        )
        + "\n",
        encoding="utf-8",
    )

    samples_per_rep = run.n_shots + run.n_snapshots
    summary_payload = {
        "preset": run.preset,
        "seed": run.seed,
        "total_preparations": run.bench_param_sets
        * run.bench_repetitions
        * samples_per_rep,
        "post_burn_in": None,
        "aborted": False,
        "repetitions": run.bench_repetitions,
        "param_sets": run.bench_param_sets,
        "n_shots": run.n_shots,
        "n_snapshots": run.n_snapshots,
        "k_groups": run.k_groups,
        "trials": rows,
        "averaged_direct_variance": float(
            np.mean([r["direct_variance"] for r in rows])
        ),
        "averaged_shadow_variance": float(
            np.mean([r["shadow_variance"] for r in rows])
        ),
        "min_variance_ratio": float(
            min(r["shadow_variance"] / r["direct_variance"] for r in rows)
        ),
    }
    json_path = out / "variance_bench_summary.json"
    write_summary_json(json_path, summary_payload)
    return PresetOutcome(summary_payload, [csv_path, json_path], False)


def preset_curve(run: RunConfig) -> PresetOutcome:
    """Exact ground-energy curve over the fixture grid plus refined argmin."""
    out = Path(run.out)
    out.mkdir(parents=True, exist_ok=True)
    table = run.load_table()
    energies = np.array(
        [ground_state_curve_point(table, float(r)) for r in table.grid]
    )
    csv_path = out / "curve_energies.csv"
    csv_path.write_text(
        "\n".join(
            ["R_angstrom,energy_ha"]
            + [f"{_f(r)},{_f(e)}" for r, e in zip(table.grid, energies)]
        )
        + "\n",
        encoding="utf-8",
    )

    i_min = int(np.argmin(energies))
    lo = float(table.grid[max(0, i_min - 2)])
    hi = float(table.grid[min(len(table.grid) - 1, i_min + 2)])
    refined = minimize_scalar(
        lambda r: ground_state_curve_point(table, r),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-7},
    )
    summary_payload = {
        "preset": run.preset,
        "seed": run.seed,
        "total_preparations": 0,
        "post_burn_in": None,
        "aborted": False,
        "grid_points": int(table.grid.shape[0]),
        "argmin_grid_r": float(table.grid[i_min]),
        "argmin_r": float(refined.x),
        "min_energy_ha": float(refined.fun),
    }
    json_path = out / "curve_summary.json"
    write_summary_json(json_path, summary_payload)
    return PresetOutcome(summary_payload, [csv_path, json_path], False)


def preset_vqe(run: RunConfig) -> PresetOutcome:
    """Optimize the ansatz at the configured bond length and report the gap."""
    out = Path(run.out)
    out.mkdir(parents=True, exist_ok=True)
    table = run.load_table()
    ansatz = run.ansatz()
    obs = hamiltonian_at(table, run.initial_r)
    e_ground = ground_state_exact(obs)[0]
    theta = resolve_initial_theta(
        replace(run, theta_policy="vqe"), table, trial=0
    )
    energy = expectation_exact(prepare_ansatz_state(ansatz, theta), obs)
    summary_payload = {
        "preset": run.preset,
        "seed": run.seed,
        "total_preparations": 0,
        "post_burn_in": None,
        "aborted": False,
        "r_angstrom": run.initial_r,
        "energy_ha": energy,
        "ground_energy_ha": e_ground,
        "energy_gap_ha": energy - e_ground,
        "theta": theta,
        "tolerance": run.vqe_tol,
    }
    json_path = out / "vqe_summary.json"
    write_summary_json(json_path, summary_payload)
    return PresetOutcome(summary_payload, [json_path], False)


PRESET_RUNNERS = {
    "equilibrium": preset_equilibrium,
    "quench": preset_quench,
    "variance-bench": preset_variance_bench,
    "vqe": preset_vqe,
    "curve": preset_curve,
}


def run_preset(run: RunConfig) -> PresetOutcome:
    return PRESET_RUNNERS[run.preset](run)
