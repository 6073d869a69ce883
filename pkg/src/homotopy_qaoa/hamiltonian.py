"""Ising diagonal for weighted Max-Cut and the mixer/objective interpolation.

Basis convention: qubit ``i`` is bit ``i`` of the basis index (LSB first),
and ``z_i(k) = +1`` when that bit is 0, ``-1`` when it is 1.  The mixer is
``H_mix = -sum_i X_i`` throughout; the interpolated operator is
``H(alpha) = (1 - alpha) * H_mix + alpha * H_obj``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh

from .exceptions import NumericalError, ResourceError
from .graph import WeightedGraph

MAX_QUBITS = 20

# below this dimension a direct eigensolve beats ARPACK start-up cost
_DENSE_DIM = 256
# dense fallback stays affordable up to 2^12 x 2^12
_DENSE_FALLBACK_MAX_QUBITS = 12


@dataclass(frozen=True)
class IsingDiagonal:
    """Diagonal of ``sum_{(u,v,w)} w * Z_u Z_v`` over the computational basis.

    The entries are integers, so the spectrum collapses to few distinct
    levels; ``levels``/``level_index`` cache that factorization for the phase
    layers (phases are computed per level, then gathered).
    """

    n: int
    energies: np.ndarray
    emin: float
    emax: float
    levels: np.ndarray
    level_index: np.ndarray

    @classmethod
    def from_energies(cls, n: int, energies: np.ndarray) -> "IsingDiagonal":
        energies = np.asarray(energies, dtype=np.float64)
        if energies.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} energies for n={n}, got {energies.shape}")
        levels, level_index = np.unique(energies, return_inverse=True)
        return cls(
            n=n,
            energies=energies,
            emin=float(energies.min()),
            emax=float(energies.max()),
            levels=levels,
            level_index=level_index.astype(np.int32),
        )


def maxcut_objective(g: WeightedGraph, max_qubits: int = MAX_QUBITS) -> IsingDiagonal:
    """Diagonal objective whose minimum encodes the maximum-weight cut of ``g``."""
    if g.n > max_qubits:
        raise ResourceError(
            f"{g.n} qubits exceed the configured limit of {max_qubits} "
            f"(2^{g.n} amplitudes)"
        )
    idx = np.arange(1 << g.n, dtype=np.int64)
    energies = np.zeros(1 << g.n, dtype=np.float64)
    for u, v, w in g.edges:
        # +w when bits u and v agree (same partition), -w when the edge is cut
        energies += w * (1.0 - 2.0 * (((idx >> u) ^ (idx >> v)) & 1))
    return IsingDiagonal.from_energies(g.n, energies)


def num_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim <= 0 or (1 << n) != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    return n


def flip_qubit(psi: np.ndarray, i: int) -> np.ndarray:
    """Amplitudes with bit ``i`` of the basis index toggled (the X_i permutation)."""
    block = psi.reshape(-1, 2, 1 << i)
    return block[:, ::-1, :].reshape(psi.shape)


# row i holds k ^ (1 << i): one gather applies all n flips at once.
# cached up to n=14 (a few MB); larger registers fall back to per-qubit flips
_FLIP_TABLE_MAX_QUBITS = 14
_flip_tables: dict[int, np.ndarray] = {}


def flip_index_table(n: int) -> np.ndarray | None:
    if n > _FLIP_TABLE_MAX_QUBITS:
        return None
    table = _flip_tables.get(n)
    if table is None:
        idx = np.arange(1 << n, dtype=np.int32)
        table = np.empty((n, 1 << n), dtype=np.int32)
        for i in range(n):
            table[i] = idx ^ (1 << i)
        _flip_tables[n] = table
    return table


def mixer_matvec(psi: np.ndarray) -> np.ndarray:
    """Apply ``H_mix = -sum_i X_i``."""
    n = num_qubits(psi.shape[-1])
    table = flip_index_table(n)
    if table is not None:
        return -psi[table].sum(axis=0)
    out = np.zeros_like(psi)
    for i in range(n):
        out -= flip_qubit(psi, i)
    return out


@dataclass(frozen=True)
class HomotopyHamiltonian:
    """``(1 - alpha) * H_mix + alpha * H_obj``; diagonal at alpha=1, pure mixer at 0."""

    alpha: float
    diag: IsingDiagonal

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def n(self) -> int:
        return self.diag.n


def apply_homotopy(h: HomotopyHamiltonian, psi: np.ndarray) -> np.ndarray:
    """Matrix-free ``H(alpha) @ psi``; no dense operator is ever materialized."""
    dim = 1 << h.n
    if psi.shape != (dim,):
        raise ValueError(f"state has shape {psi.shape}, expected ({dim},)")
    if h.alpha == 0.0:
        return mixer_matvec(psi)
    out = (h.alpha * h.diag.energies) * psi
    if h.alpha != 1.0:
        out += (1.0 - h.alpha) * mixer_matvec(psi)
    return out


def dense_homotopy_matrix(h: HomotopyHamiltonian) -> np.ndarray:
    """Explicit real-symmetric H(alpha); only for small n (fallbacks, tests)."""
    dim = 1 << h.n
    mat = np.zeros((dim, dim))
    rows = np.arange(dim)
    for i in range(h.n):
        mat[rows, rows ^ (1 << i)] -= 1.0 - h.alpha
    mat[rows, rows] += h.alpha * h.diag.energies
    return mat


def normalize_energy(e: float, emin_alpha: float, emax_alpha: float) -> float:
    """Affine rescaling sending the ground energy to 0 and the top energy to 1."""
    if not emax_alpha > emin_alpha:
        raise ValueError(
            f"degenerate energy window: emin={emin_alpha}, emax={emax_alpha}"
        )
    return float((e - emin_alpha) / (emax_alpha - emin_alpha))


def _lanczos_end(
    h: HomotopyHamiltonian, which: str, v0: np.ndarray, tol: float, maxiter=None
) -> tuple[float, np.ndarray]:
    """One spectrum end via implicitly restarted Lanczos on the matrix-free product."""
    dim = 1 << h.n
    op = LinearOperator(
        (dim, dim), matvec=lambda x: apply_homotopy(h, x), dtype=np.float64
    )
    vals, vecs = eigsh(op, k=1, which=which, v0=v0, tol=tol, maxiter=maxiter)
    return float(vals[0]), vecs[:, 0]


def _start_vector(dim: int) -> np.ndarray:
    # fixed generator so repeated solves replay bit-identically
    return np.random.default_rng(0x5EED).standard_normal(dim)


class ExtremeEigenSolver:
    """Extreme eigenvalues of H(alpha) for one instance, cached across alphas.

    Consecutive alphas reuse the previous Ritz vectors as start vectors, which
    cuts the Lanczos work roughly five-fold on fine homotopy schedules.  All
    results are cached by alpha.  Small problems (and ARPACK failures up to
    n=12) are solved densely.
    """

    def __init__(self, diag: IsingDiagonal, tol: float = 1e-10):
        if not tol > 0:
            raise ValueError(f"tol must be positive, got {tol}")
        self.diag = diag
        self.tol = tol
        self._cache: dict[float, tuple[float, float]] = {}
        self._vmin = None
        self._vmax = None

    def extremes(self, alpha: float) -> tuple[float, float]:
        key = float(alpha)
        if key in self._cache:
            return self._cache[key]
        lo, hi = self._solve(HomotopyHamiltonian(key, self.diag))
        self._cache[key] = (lo, hi)
        return lo, hi

    def _solve(self, h: HomotopyHamiltonian) -> tuple[float, float]:
        if h.alpha == 0.0:
            return -float(h.n), float(h.n)
        if h.alpha == 1.0:
            return self.diag.emin, self.diag.emax
        dim = 1 << h.n
        if dim < _DENSE_DIM:
            vals = np.linalg.eigvalsh(dense_homotopy_matrix(h))
            return float(vals[0]), float(vals[-1])
        try:
            v0_min = self._vmin if self._vmin is not None else _start_vector(dim)
            v0_max = self._vmax if self._vmax is not None else v0_min
            lo, self._vmin = _lanczos_end(h, "SA", v0_min, self.tol)
            hi, self._vmax = _lanczos_end(h, "LA", v0_max, self.tol)
            return lo, hi
        except (ArpackNoConvergence, ArpackError) as exc:
            if h.n <= _DENSE_FALLBACK_MAX_QUBITS:
                vals = np.linalg.eigvalsh(dense_homotopy_matrix(h))
                return float(vals[0]), float(vals[-1])
            best = getattr(exc, "eigenvalues", None)
            raise NumericalError(
                f"Lanczos failed to converge at alpha={h.alpha} for n={h.n}",
                best=best,
            ) from exc

    def save_cache(self, path) -> None:
        """Persist computed windows as a ``alpha,emin,emax`` CSV sidecar."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["alpha", "emin", "emax"])
            for alpha in sorted(self._cache):
                lo, hi = self._cache[alpha]
                writer.writerow([repr(alpha), repr(lo), repr(hi)])

    def load_cache(self, path) -> None:
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                self._cache[float(row["alpha"])] = (
                    float(row["emin"]),
                    float(row["emax"]),
                )


def extreme_eigenvalues(
    h: HomotopyHamiltonian, tol: float = 1e-10, method: str = "auto"
) -> tuple[float, float]:
    """(min, max) eigenvalue of H(alpha) to absolute accuracy ``tol``.

    ``method`` is "auto" (alpha shortcuts, dense for small n, Lanczos above),
    "lanczos" or "dense"; the explicit methods skip the size heuristic but
    keep the exact alpha=0/1 windows.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if h.alpha == 0.0:
        return -float(h.n), float(h.n)
    if h.alpha == 1.0:
        return h.diag.emin, h.diag.emax
    if method == "auto":
        return ExtremeEigenSolver(h.diag, tol).extremes(h.alpha)
    if method == "dense":
        vals = np.linalg.eigvalsh(dense_homotopy_matrix(h))
        return float(vals[0]), float(vals[-1])
    if method == "lanczos":
        dim = 1 << h.n
        v0 = _start_vector(dim)
        try:
            lo, _ = _lanczos_end(h, "SA", v0, tol)
            hi, _ = _lanczos_end(h, "LA", v0, tol)
        except (ArpackNoConvergence, ArpackError) as exc:
            raise NumericalError(
                f"Lanczos failed to converge at alpha={h.alpha} for n={h.n}",
                best=getattr(exc, "eigenvalues", None),
            ) from exc
        return lo, hi
    raise ValueError(f"unknown method {method!r}")
