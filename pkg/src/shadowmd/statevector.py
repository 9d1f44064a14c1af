"""Dense statevector simulation: ansatz preparation, basis rotations, sampling.

Conventions used across the package:

* Qubit 0 is the leftmost character of every string (Pauli words, occupation
  bitstrings, measurement outcomes) and the most significant bit of a
  basis-state index, so ``|0011>`` is amplitude index 3 on four qubits.
* Letters map to integer codes I=0, X=1, Y=2, Z=3; the compact array paths
  use the codes, the public types use the strings.

States are immutable by convention: gate helpers always act on copies owned
by the caller.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError

LETTERS = "IXYZ"
LETTER_CODE = {ch: i for i, ch in enumerate(LETTERS)}

SQRT_HALF = 1.0 / np.sqrt(2.0)
# Measurement-basis rotations: the composite sends the chosen Pauli's
# eigenbasis to the computational basis.
_H_MATRIX = np.array([[SQRT_HALF, SQRT_HALF], [SQRT_HALF, -SQRT_HALF]], dtype=complex)
_HSDG_MATRIX = np.array([[SQRT_HALF, -1j * SQRT_HALF], [SQRT_HALF, 1j * SQRT_HALF]])
ROTATION_FOR_CODE = {1: _H_MATRIX, 2: _HSDG_MATRIX, 3: None}  # X, Y, Z


class StateVector:
    """Normalized n-qubit state as a dense complex amplitude vector."""

    __slots__ = ("amplitudes", "n")

    def __init__(self, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        dim = amps.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise DimensionError(f"amplitude count {dim} is not a power of two >= 2")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"state not normalized: |amps| = {norm!r}")
        self.amplitudes = amps
        self.n = dim.bit_length() - 1

    @classmethod
    def from_bitstring(cls, bits: str) -> "StateVector":
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"invalid bitstring {bits!r}")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self):
        return f"StateVector(n={self.n})"


# ---------------------------------------------------------------------------
# gate kernels; all operate in place on the last axis of (..., 2^n) arrays


def _apply_one_qubit(amps: np.ndarray, n: int, qubit: int, m: np.ndarray) -> None:
    lead = amps.shape[:-1]
    view = amps.reshape(*lead, 2**qubit, 2, 2 ** (n - qubit - 1))
    x0 = view[..., 0, :]
    x1 = view[..., 1, :]
    new0 = m[0, 0] * x0 + m[0, 1] * x1
    new1 = m[1, 0] * x0 + m[1, 1] * x1
    view[..., 0, :] = new0
    view[..., 1, :] = new1


def _apply_ry_rows(amps: np.ndarray, n: int, qubit: int, angles: np.ndarray) -> None:
    """Row-wise Ry(angle) on (B, 2^n) amplitudes, one angle per row."""
    b = amps.shape[0]
    view = amps.reshape(b, 2**qubit, 2, 2 ** (n - qubit - 1))
    c = np.cos(0.5 * angles)[:, None, None]
    s = np.sin(0.5 * angles)[:, None, None]
    x0 = view[:, :, 0, :]
    x1 = view[:, :, 1, :]
    new0 = c * x0 - s * x1
    new1 = s * x0 + c * x1
    view[:, :, 0, :] = new0
    view[:, :, 1, :] = new1


def _apply_cnot(amps: np.ndarray, n: int, control: int, target: int) -> None:
    lead = amps.shape[:-1]
    q1, q2 = (control, target) if control < target else (target, control)
    view = amps.reshape(
        *lead, 2**q1, 2, 2 ** (q2 - q1 - 1), 2, 2 ** (n - q2 - 1)
    )
    if control < target:
        a = view[..., 1, :, 0, :]
        b = view[..., 1, :, 1, :]
    else:
        a = view[..., 0, :, 1, :]
        b = view[..., 1, :, 1, :]
    tmp = a.copy()
    a[...] = b
    b[...] = tmp


def _rotate_rows(amps: np.ndarray, n: int, codes: np.ndarray) -> None:
    """Apply per-row measurement-basis rotations.

    ``codes`` is (B, n) with entries in {0..3}; code 0 (identity) and 3 (Z)
    leave the qubit untouched, 1 (X) applies H, 2 (Y) applies the S-dagger
    then H composite.
    """
    for q in range(n):
        col = codes[:, q]
        for code in (1, 2):
            mask = col == code
            if not mask.any():
                continue
            sub = amps[mask]
            _apply_one_qubit(sub, n, q, ROTATION_FOR_CODE[code])
            amps[mask] = sub


def _sample_rows(amps: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw one basis-state index per row of (B, 2^n) amplitudes."""
    probs = np.abs(amps) ** 2
    cum = np.cumsum(probs, axis=1)
    u = rng.random(amps.shape[0])
    idx = (cum < u[:, None]).sum(axis=1)
    return np.minimum(idx, amps.shape[1] - 1)


def _sample_many(amps: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``count`` i.i.d. basis-state indices from one state."""
    cdf = np.cumsum(np.abs(amps) ** 2)
    idx = np.searchsorted(cdf, rng.random(count), side="right")
    return np.minimum(idx, amps.shape[0] - 1)


def _sample_rows_many(
    amps: np.ndarray, count: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``count`` indices from each row of (R, 2^n) amplitudes -> (R, count)."""
    cum = np.cumsum(np.abs(amps) ** 2, axis=1)
    u = rng.random((amps.shape[0], count))
    idx = (cum[:, None, :] < u[:, :, None]).sum(axis=2)
    return np.minimum(idx, amps.shape[1] - 1)


def _indices_to_bits(indices: np.ndarray, n: int) -> np.ndarray:
    """(...,) indices -> (..., n) bit array, qubit 0 first."""
    shifts = np.arange(n - 1, -1, -1)
    return (indices[..., None] >> shifts) & 1


# ---------------------------------------------------------------------------
# ansatz

LAYOUT_REAL_LAYERED = "real-layered"
LAYOUT_FIXED = "fixed"


@dataclass(frozen=True)
class AnsatzConfig:
    """Parameterized-circuit family preparing the trial state.

    The default ``real-layered`` layout starts from the computational-basis
    state given by ``initial_occupation`` and applies depth+1 layers of one
    Ry rotation per qubit with a CNOT chain (qubit i controls i+1) between
    consecutive layers. All amplitudes stay real and every gate generator is
    a single Pauli Y, so the two-term shift rule for gradients is exact.

    The ``fixed`` layout has no parameters and prepares the occupation state
    as-is (useful as a frozen-electron baseline).
    """

    n: int
    depth: int
    layout: str = LAYOUT_REAL_LAYERED
    initial_occupation: str = "0011"

    def __post_init__(self):
        if self.n < 1:
            raise ConfigurationError(f"need at least one qubit, got n={self.n}")
        if self.depth < 0:
            raise ConfigurationError(f"depth must be >= 0, got {self.depth}")
        if self.layout not in (LAYOUT_REAL_LAYERED, LAYOUT_FIXED):
            raise ConfigurationError(f"unknown ansatz layout {self.layout!r}")
        if len(self.initial_occupation) != self.n or set(
            self.initial_occupation
        ) - {"0", "1"}:
            raise ConfigurationError(
                f"initial_occupation {self.initial_occupation!r} is not an "
                f"{self.n}-bit string"
            )

    @property
    def parameter_count(self) -> int:
        if self.layout == LAYOUT_FIXED:
            return 0
        return self.n * (self.depth + 1)


def _prepare_rows(config: AnsatzConfig, thetas: np.ndarray) -> np.ndarray:
    """Prepare a (B, 2^n) batch of ansatz states, one parameter row each."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    b = thetas.shape[0]
    if thetas.shape[1] != config.parameter_count:
        raise DimensionError(
            f"expected {config.parameter_count} parameters, got {thetas.shape[1]}"
        )
    n = config.n
    amps = np.zeros((b, 2**n), dtype=complex)
    amps[:, int(config.initial_occupation, 2)] = 1.0
    if config.layout == LAYOUT_FIXED:
        return amps
    for layer in range(config.depth + 1):
        for q in range(n):
            _apply_ry_rows(amps, n, q, thetas[:, layer * n + q])
        if layer < config.depth:
            for q in range(n - 1):
                _apply_cnot(amps, n, q, q + 1)
    return amps


def prepare_ansatz_state(config: AnsatzConfig, params) -> StateVector:
    """Prepare the deterministic trial state for one parameter vector."""
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.shape[0] != config.parameter_count:
        raise DimensionError(
            f"expected {config.parameter_count} parameters, got {params.shape[0]}"
        )
    return StateVector(_prepare_rows(config, params[None, :])[0])


# ---------------------------------------------------------------------------
# measurement-basis rotation and sampling on single states


def basis_codes(basis: str, n: int | None = None) -> np.ndarray:
    if set(basis) - {"X", "Y", "Z"}:
        raise ValueError(f"basis letters must be X, Y or Z, got {basis!r}")
    if n is not None and len(basis) != n:
        raise DimensionError(f"basis {basis!r} does not address {n} qubits")
    return np.array([LETTER_CODE[ch] for ch in basis], dtype=np.uint8)


def apply_basis_rotation(state: StateVector, basis: str) -> StateVector:
    """Rotate so measuring Z afterwards equals measuring ``basis`` before."""
    codes = basis_codes(basis, state.n)
    amps = state.amplitudes[None, :].copy()
    _rotate_rows(amps, state.n, codes[None, :])
    return StateVector(amps[0])


def sample_bitstrings(
    state: StateVector, count: int, rng: np.random.Generator
) -> list[str]:
    """Draw ``count`` computational-basis outcomes from the Born distribution."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if count == 0:
        return []
    indices = _sample_many(state.amplitudes, count, rng)
    return [format(int(i), f"0{state.n}b") for i in indices]
