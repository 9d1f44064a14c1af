"""Classical shadows with random Pauli-basis measurements.

One snapshot is a per-qubit (measurement basis, outcome bit) record. Its
reconstruction is the tensor product over qubits of ``3 U^dag |b><b| U - I``,
and the expectation of a Pauli word against that product collapses to a
closed form: the word estimate is zero unless every supported qubit was
measured in the word's own basis, in which case each supported qubit
contributes ``3 * (+/-1)`` from its outcome. Estimation therefore never
materializes the 2^n x 2^n snapshot; the dense form (``snapshot_density``)
is kept as a test oracle.

A single batch of snapshots serves every observable evaluated at that state,
which is what makes the force estimate cost independent of the number of
force components. The median-of-means path splits the batch into K
consecutive groups and returns the median of the group means.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigurationError, DimensionError
from .pauli import Observable, PauliWord
from .statevector import (
    LETTERS,
    ROTATION_FOR_CODE,
    StateVector,
    _indices_to_bits,
    _rotate_rows,
    _sample_rows,
    _sample_rows_many,
    basis_codes,
)

DENSITY_QUBIT_LIMIT = 8


@dataclass(frozen=True)
class Snapshot:
    """One randomized measurement: per-qubit bases (XYZ letters) and outcome bits."""

    bases: str
    outcomes: str

    def __post_init__(self):
        if len(self.bases) != len(self.outcomes):
            raise DimensionError(
                f"bases {self.bases!r} and outcomes {self.outcomes!r} differ in length"
            )
        if set(self.bases) - {"X", "Y", "Z"} or set(self.outcomes) - {"0", "1"}:
            raise ValueError(f"malformed snapshot ({self.bases!r}, {self.outcomes!r})")

    @property
    def n(self) -> int:
        return len(self.bases)


class ShadowBatch:
    """A collection of snapshots plus the median-of-means group count K.

    Snapshots are stored as two (N_S, n) uint8 arrays (basis codes 1..3 and
    outcome bits). The trailing ``N_S mod K`` snapshots carry no weight in
    median-of-means but stay in the batch for diagnostics.
    """

    __slots__ = ("bases", "outcomes", "k_groups")

    def __init__(self, bases: np.ndarray, outcomes: np.ndarray, k_groups: int):
        bases = np.asarray(bases, dtype=np.uint8)
        outcomes = np.asarray(outcomes, dtype=np.uint8)
        if bases.ndim != 2 or bases.shape != outcomes.shape:
            raise DimensionError("bases and outcomes must both be (N_S, n) arrays")
        n_s = bases.shape[0]
        if not 1 <= k_groups <= n_s:
            raise ConfigurationError(
                f"need 1 <= K <= N_S, got K={k_groups}, N_S={n_s}"
            )
        if bases.min(initial=1) < 1 or bases.max(initial=1) > 3:
            raise ValueError("basis codes must be in {1, 2, 3} (X, Y, Z)")
        if outcomes.max(initial=0) > 1:
            raise ValueError("outcomes must be bits")
        self.bases = bases
        self.outcomes = outcomes
        self.k_groups = k_groups

    @property
    def n_snapshots(self) -> int:
        return self.bases.shape[0]

    @property
    def n(self) -> int:
        return self.bases.shape[1]

    @property
    def group_size(self) -> int:
        return self.n_snapshots // self.k_groups

    def snapshot(self, i: int) -> Snapshot:
        return Snapshot(
            "".join(LETTERS[c] for c in self.bases[i]),
            "".join(str(int(b)) for b in self.outcomes[i]),
        )

    def __iter__(self):
        return (self.snapshot(i) for i in range(self.n_snapshots))

    def __len__(self):
        return self.n_snapshots


def _collect_rows(
    rows: np.ndarray, n_snapshots: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Collect ``n_snapshots`` randomized measurements from each row state.

    Returns basis codes and outcome bits of shape (B, N_S, n). Basis letters
    are i.i.d. uniform over {X, Y, Z} per qubit per snapshot; the draw order
    (all bases, then all outcomes) is part of the reproducibility contract.
    """
    b, dim = rows.shape
    n = dim.bit_length() - 1
    bases = rng.integers(1, 4, size=(b, n_snapshots, n), dtype=np.uint8)
    work = np.repeat(rows[:, None, :], n_snapshots, axis=1).reshape(-1, dim)
    _rotate_rows(work, n, bases.reshape(-1, n))
    indices = _sample_rows(work, rng)
    outcomes = _indices_to_bits(indices, n).astype(np.uint8).reshape(b, n_snapshots, n)
    return bases, outcomes


def collect_snapshots(
    state: StateVector, n_snapshots: int, k_groups: int, rng: np.random.Generator
) -> ShadowBatch:
    """Run the randomized-measurement protocol N_S times on one state."""
    if n_snapshots < 1 or k_groups < 1 or n_snapshots < k_groups:
        raise ConfigurationError(
            f"need N_S >= K >= 1, got N_S={n_snapshots}, K={k_groups}"
        )
    bases, outcomes = _collect_rows(state.amplitudes[None, :], n_snapshots, rng)
    return ShadowBatch(bases[0], outcomes[0], k_groups)


# ---------------------------------------------------------------------------
# estimation


def _word_estimate_matrix(
    bases: np.ndarray, outcomes: np.ndarray, codes: np.ndarray
) -> np.ndarray:
    """Per-snapshot estimates of many words at once.

    ``bases`` and ``outcomes`` have shape (..., S, n); ``codes`` is (W, n)
    with 0 marking identity. Returns (..., W, S). Unsupported qubits
    contribute nothing; a basis mismatch on any supported qubit zeroes the
    whole product, otherwise each supported qubit contributes 3*(1 - 2 bit).

    Both the match test and the outcome-sign product reduce to counting, so
    they are evaluated as matrix products: a word is alive when the number
    of supported qubits measured in the matching basis equals its weight,
    and the sign is the parity of the outcome bits over its support. Small
    integers are exact in float64, so this stays bit-deterministic.
    """
    supported = (codes != 0).astype(float)  # (W, n)
    weights = supported.sum(axis=1)
    # one-hot planes over the three bases; identity codes match no plane
    base_planes = np.stack(
        [bases == 1, bases == 2, bases == 3], axis=-1
    ).astype(float)
    code_planes = np.stack(
        [codes == 1, codes == 2, codes == 3], axis=-1
    ).astype(float)
    lead = bases.shape[:-2]
    s, n = bases.shape[-2:]
    w = codes.shape[0]
    match_count = base_planes.reshape(*lead, s, 3 * n) @ code_planes.reshape(
        w, 3 * n
    ).T  # (..., S, W)
    alive = match_count == weights
    parity = (outcomes.astype(float) @ supported.T) % 2.0  # (..., S, W)
    signs = 1.0 - 2.0 * parity
    vals = alive * signs * (3.0**weights)
    return np.swapaxes(vals, -1, -2)


def median_of_means(values: np.ndarray, k_groups: int) -> np.ndarray:
    """Median of K consecutive group means along the last axis.

    Uses the first ``K * floor(S/K)`` entries. For even K the lower-indexed
    middle value after sorting is taken, so the result is always a realized
    group mean.
    """
    s = values.shape[-1]
    g = s // k_groups
    means = values[..., : k_groups * g].reshape(*values.shape[:-1], k_groups, g).mean(
        axis=-1
    )
    means.sort(axis=-1)
    return means[..., (k_groups + 1) // 2 - 1]


def snapshot_pauli_estimate(snapshot: Snapshot, word: PauliWord) -> float:
    """Closed-form Tr[P * snapshot_density] for a single snapshot."""
    if snapshot.n != word.n:
        raise DimensionError(
            f"snapshot on {snapshot.n} qubits, word on {word.n}"
        )
    bases = basis_codes(snapshot.bases)
    outcomes = np.array([int(ch) for ch in snapshot.outcomes], dtype=np.uint8)
    return float(
        _word_estimate_matrix(bases[None, :], outcomes[None, :], word.codes()[None, :])[
            0, 0
        ]
    )


def estimate_pauli_mom(batch: ShadowBatch, word: PauliWord) -> float:
    """Median-of-means estimate of one Pauli expectation from a batch."""
    if batch.n != word.n:
        raise DimensionError(f"batch on {batch.n} qubits, word on {word.n}")
    vals = _word_estimate_matrix(batch.bases, batch.outcomes, word.codes()[None, :])
    return float(median_of_means(vals, batch.k_groups)[0])


def estimate_observable(batch: ShadowBatch, obs: Observable) -> float:
    """Estimate a weighted Pauli sum; every term reuses the same snapshots."""
    if batch.n != obs.n:
        raise DimensionError(f"batch on {batch.n} qubits, observable on {obs.n}")
    vals = _word_estimate_matrix(batch.bases, batch.outcomes, obs.word_codes())
    moms = median_of_means(vals, batch.k_groups)
    return float(obs.coefficients @ moms)


def snapshot_density(snapshot: Snapshot) -> np.ndarray:
    """Dense snapshot reconstruction (test oracle, n <= 8).

    Tensor product over qubits of ``3 U^dag |b><b| U - I``; its trace is 1
    and averaging over the measurement distribution recovers the state.
    """
    if snapshot.n > DENSITY_QUBIT_LIMIT:
        raise CapacityError(
            f"snapshot density for n={snapshot.n} exceeds the "
            f"n<={DENSITY_QUBIT_LIMIT} guard"
        )
    out = np.array([[1.0 + 0.0j]])
    for letter, bit in zip(snapshot.bases, snapshot.outcomes):
        u = ROTATION_FOR_CODE[basis_codes(letter)[0]]
        ket = np.zeros((2, 1), dtype=complex)
        ket[int(bit), 0] = 1.0
        if u is not None:
            ket = u.conj().T @ ket
        out = np.kron(out, 3.0 * (ket @ ket.conj().T) - np.eye(2))
    return out


def _direct_means(
    rows: np.ndarray, codes: np.ndarray, shots: int, rng: np.random.Generator
) -> np.ndarray:
    """Ordinary per-term measurement means for a batch of states.

    ``rows`` is (B, 2^n), ``codes`` is (W, n) non-identity words. Every
    (state, word) pair is rotated into the word's eigenbasis and measured
    with its own ``shots`` samples; returns the (B, W) means of the
    eigenvalue products over each word's support.
    """
    b, dim = rows.shape
    n = dim.bit_length() - 1
    w = codes.shape[0]
    if w == 0:
        return np.zeros((b, 0))
    work = np.repeat(rows[:, None, :], w, axis=1).reshape(-1, dim)
    tiled = np.tile(codes, (b, 1))
    _rotate_rows(work, n, tiled)
    indices = _sample_rows_many(work, shots, rng)
    bits = _indices_to_bits(indices, n)
    supported = tiled[:, None, :] != 0
    signs = np.where(supported, 1 - 2 * bits.astype(np.int64), 1).prod(axis=2)
    return signs.mean(axis=1).reshape(b, w)


def direct_pauli_estimate(
    state: StateVector, word: PauliWord, shots: int, rng: np.random.Generator
) -> float:
    """Measure one Pauli word the ordinary way: rotate its support, sample shots."""
    if state.n != word.n:
        raise DimensionError(f"state on {state.n} qubits, word on {word.n}")
    if shots < 1:
        raise ConfigurationError(f"shots must be >= 1, got {shots}")
    if not word.support:
        return 1.0
    means = _direct_means(
        state.amplitudes[None, :], word.codes()[None, :], shots, rng
    )
    return float(means[0, 0])
