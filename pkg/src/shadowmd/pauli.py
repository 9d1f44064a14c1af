"""Pauli-string algebra, exact expectation values, and the dense oracle.

A Pauli word acts on computational-basis states as a signed permutation:
X and Y flip the addressed bit, Z and Y contribute a sign from it, and Y
additionally contributes a factor of i. ``expectation_exact`` exploits this
to stream each word over the state in O(2^n) without building matrices; the
dense path (``to_dense`` / ``ground_state_exact``) exists as the ground-truth
oracle for tests and for exact potential-curve evaluation.
"""

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DimensionError
from .statevector import LETTER_CODE, LETTERS, StateVector

DENSE_QUBIT_LIMIT = 12

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


@dataclass(frozen=True)
class PauliWord:
    """Tensor product of single-qubit Paulis, e.g. ``"IXYZ"`` (qubit 0 first)."""

    ops: str

    def __post_init__(self):
        if not self.ops:
            raise ValueError("empty Pauli word")
        bad = set(self.ops) - set(LETTERS)
        if bad:
            raise ValueError(f"invalid Pauli letters {sorted(bad)} in {self.ops!r}")

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, ch in enumerate(self.ops) if ch != "I")

    @property
    def weight(self) -> int:
        return len(self.support)

    def codes(self) -> np.ndarray:
        return np.array([LETTER_CODE[ch] for ch in self.ops], dtype=np.uint8)

    def __str__(self):
        return self.ops


def identity_word(n: int) -> PauliWord:
    return PauliWord("I" * n)


class Observable:
    """Real-weighted sum of Pauli words on a common qubit count.

    Terms are deduplicated at construction (coefficients of repeated words are
    summed, first-seen order kept). Instances are immutable and cache the code
    and signed-permutation arrays used by the fast expectation paths.
    """

    __slots__ = ("terms", "n", "_codes", "_coeffs", "_perm", "_phase")

    def __init__(self, terms: Iterable[tuple[float, PauliWord]]):
        merged: dict[str, float] = {}
        n = None
        for coeff, word in terms:
            coeff = float(coeff)
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff!r} for {word}")
            if n is None:
                n = word.n
            elif word.n != n:
                raise DimensionError(
                    f"mixed qubit counts in observable: {word.n} vs {n}"
                )
            merged[word.ops] = merged.get(word.ops, 0.0) + coeff
        if n is None:
            raise ValueError("observable needs at least one term")
        self.n = n
        self.terms = tuple((c, PauliWord(ops)) for ops, c in merged.items())
        self._coeffs = np.array([c for c, _ in self.terms], dtype=float)
        self._codes = np.array([w.codes() for _, w in self.terms], dtype=np.uint8)
        self._perm = None
        self._phase = None

    @property
    def coefficients(self) -> np.ndarray:
        return self._coeffs

    @property
    def words(self) -> tuple[PauliWord, ...]:
        return tuple(w for _, w in self.terms)

    def word_codes(self) -> np.ndarray:
        return self._codes

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"Observable(n={self.n}, terms={len(self.terms)})"

    def signed_permutations(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-word arrays (perm, phase) realizing P|i> = phase[i] |perm[i]>.

        Cached; both have shape (terms, 2^n). ``perm`` is its own inverse
        because the flip pattern is an XOR mask.
        """
        if self._perm is None:
            self._perm, self._phase = _signed_permutations(self._codes, self.n)
        return self._perm, self._phase


def _signed_permutations(codes: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    dim = 2**n
    w = codes.shape[0]
    idx = np.arange(dim, dtype=np.int64)
    perm = np.empty((w, dim), dtype=np.int64)
    phase = np.empty((w, dim), dtype=complex)
    for t in range(w):
        flip = 0
        parity = np.zeros(dim, dtype=np.int64)
        n_y = 0
        for q, code in enumerate(codes[t]):
            bitpos = n - 1 - q
            if code in (1, 2):  # X, Y flip the bit
                flip |= 1 << bitpos
            if code in (2, 3):  # Y, Z read a sign from it
                parity ^= (idx >> bitpos) & 1
            if code == 2:
                n_y += 1
        perm[t] = idx ^ flip
        phase[t] = (1j**n_y) * np.where(parity, -1.0, 1.0)
    return perm, phase


def _exact_word_values(rows: np.ndarray, obs: Observable) -> np.ndarray:
    """<psi|P|psi> for every row state and observable word, shape (B, terms)."""
    perm, phase = obs.signed_permutations()
    b = rows.shape[0]
    w = perm.shape[0]
    out = np.empty((b, w))
    conj = rows.conj()
    for t in range(w):
        moved = (phase[t] * rows)[:, perm[t]]
        out[:, t] = np.einsum("bi,bi->b", conj, moved).real
    return out


def expectation_values(rows: np.ndarray, obs: Observable) -> np.ndarray:
    """Exact energies of a (B, 2^n) batch of states under ``obs``."""
    if rows.shape[1] != 2**obs.n:
        raise DimensionError(
            f"state dimension {rows.shape[1]} vs observable on {obs.n} qubits"
        )
    return _exact_word_values(rows, obs) @ obs.coefficients


def expectation_exact(state: StateVector, obs: Observable) -> float:
    """Exact <psi|O|psi> in Hartree; the tiny imaginary residue is discarded."""
    if state.n != obs.n:
        raise DimensionError(f"state on {state.n} qubits, observable on {obs.n}")
    return float(expectation_values(state.amplitudes[None, :], obs)[0])


def to_dense(obs: Observable) -> np.ndarray:
    """Dense Hermitian matrix of the observable (oracle path, n <= 12)."""
    if obs.n > DENSE_QUBIT_LIMIT:
        raise CapacityError(
            f"dense matrix for n={obs.n} qubits exceeds the n<={DENSE_QUBIT_LIMIT} guard"
        )
    dim = 2**obs.n
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, word in obs.terms:
        m = np.array([[1.0]], dtype=complex)
        for ch in word.ops:
            m = np.kron(m, PAULI_MATRICES[ch])
        out += coeff * m
    return out


def ground_state_exact(obs: Observable) -> tuple[float, StateVector]:
    """Lowest eigenpair of the dense observable matrix."""
    h = to_dense(obs)
    energies, vectors = np.linalg.eigh(h)
    return float(energies[0]), StateVector(vectors[:, 0])


def observable_from_strings(
    pairs: Sequence[tuple[float, str]]
) -> Observable:
    """Convenience constructor from (coefficient, word-string) pairs."""
    return Observable((c, PauliWord(w)) for c, w in pairs)
