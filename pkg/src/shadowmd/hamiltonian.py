"""Bond-length-resolved qubit Hamiltonian from a shipped coefficient table.

The table maps a grid of bond lengths to one coefficient per Pauli word;
the identity column carries the nuclear repulsion, so finite differences of
the interpolated coefficients automatically include the core-core force.
Columns are interpolated with a natural cubic spline, smooth enough that the
central difference used for force observables is clean at the 1e-3 Angstrom
scale.

CSV format (see ``data/h2_sto3g.csv``): header ``R_angstrom,<word>,...`` with
n-letter Pauli labels, one row per grid point, coefficients in Hartree. The
sidecar ``.meta`` file records the generation conventions (qubit ordering,
Hartree-Fock occupation).
"""

from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BondRangeError, TableError
from .pauli import Observable, PauliWord


@dataclass(frozen=True)
class HamiltonianTable:
    """Pauli coefficients tabulated over bond length, with spline interpolation."""

    words: tuple[PauliWord, ...]
    grid: np.ndarray  # (rows,) Angstrom, strictly increasing
    coefficients: np.ndarray  # (rows, words) Hartree
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        coeffs = np.asarray(self.coefficients, dtype=float)
        if grid.ndim != 1 or grid.size < 4:
            raise TableError(f"need at least 4 grid points, got {grid.size}")
        if np.any(np.diff(grid) <= 0.0):
            raise TableError("grid bond lengths must be strictly increasing")
        if coeffs.shape != (grid.size, len(self.words)):
            raise TableError(
                f"coefficient block {coeffs.shape} does not match "
                f"{grid.size} rows x {len(self.words)} words"
            )
        if not all(w.n == self.words[0].n for w in self.words):
            raise TableError("table words must share one qubit count")
        if len({w.ops for w in self.words}) != len(self.words):
            raise TableError("duplicate Pauli word column")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(
            self, "_spline", CubicSpline(grid, coeffs, axis=0, bc_type="natural")
        )

    @property
    def n(self) -> int:
        return self.words[0].n

    @property
    def r_min(self) -> float:
        return float(self.grid[0])

    @property
    def r_max(self) -> float:
        return float(self.grid[-1])

    def n_nonidentity_terms(self) -> int:
        return sum(1 for w in self.words if w.weight > 0)

    def coefficients_at(self, r: float) -> np.ndarray:
        if not self.r_min <= r <= self.r_max:
            raise BondRangeError(r, self.r_min, self.r_max)
        return self._spline(r)

    def derivative_at(self, r: float) -> np.ndarray:
        """Analytic spline derivative of every column (test oracle)."""
        if not self.r_min <= r <= self.r_max:
            raise BondRangeError(r, self.r_min, self.r_max)
        return self._spline(r, 1)


def default_table_path() -> Path:
    return Path(str(files("shadowmd").joinpath("data/h2_sto3g.csv")))


def load_table(path) -> HamiltonianTable:
    """Parse and validate a coefficient-table CSV."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableError(f"cannot read table {path}: {exc}") from None
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise TableError("empty table file", line=1)

    header = lines[0].split(",")
    if header[0] != "R_angstrom" or len(header) < 2:
        raise TableError(
            "header must be 'R_angstrom,<word>,...'", line=1
        )
    try:
        words = tuple(PauliWord(ops) for ops in header[1:])
    except ValueError as exc:
        raise TableError(str(exc), line=1) from None

    grid = []
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise TableError(
                f"expected {len(header)} columns, got {len(cells)}", line=lineno
            )
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise TableError(f"non-numeric cell in {line!r}", line=lineno) from None
        grid.append(values[0])
        rows.append(values[1:])
    if not rows:
        raise TableError("table has a header but no rows", line=2)

    grid = np.array(grid)
    if np.any(np.diff(grid) <= 0.0):
        bad = int(np.flatnonzero(np.diff(grid) <= 0.0)[0])
        raise TableError(
            f"grid not strictly increasing at R={grid[bad + 1]!r}", line=bad + 3
        )
    try:
        return HamiltonianTable(words, grid, np.array(rows))
    except TableError:
        raise
    except ValueError as exc:
        raise TableError(str(exc)) from None


def load_default_table() -> HamiltonianTable:
    return load_table(default_table_path())


def hamiltonian_at(table: HamiltonianTable, r: float) -> Observable:
    """Interpolated Hamiltonian observable at bond length ``r`` (Angstrom)."""
    return Observable(zip(table.coefficients_at(r), table.words))


def ground_state_curve_point(table: HamiltonianTable, r: float) -> float:
    """Exact ground energy (Hartree) of the interpolated Hamiltonian at ``r``."""
    from .pauli import ground_state_exact

    return ground_state_exact(hamiltonian_at(table, r))[0]


def force_observable(table: HamiltonianTable, r: float, d: float) -> Observable:
    """Central-difference Hamiltonian gradient (dH/dR, Hartree/Angstrom).

    The physical force on the bond coordinate is MINUS the expectation of
    this observable.
    """
    if d <= 0.0:
        raise ValueError(f"finite-difference step must be positive, got {d}")
    if r - d < table.r_min or r + d > table.r_max:
        raise BondRangeError(r, table.r_min + d, table.r_max - d)
    plus = table.coefficients_at(r + d)
    minus = table.coefficients_at(r - d)
    return Observable(zip((plus - minus) / (2.0 * d), table.words))
