"""Single-parameter energy scans and their cosine-sum frequency analysis.

Sweeping one angle theta of the circuit while freezing everything else
produces an energy curve of the form C + sum A cos(theta * d + B), where the
frequencies d range over differences of eigenvalues of the generator the
swept gate exponentiates.  For integer spectra the curve is 2pi-periodic, so
a DFT over one exact period resolves every admissible frequency into its own
bin and the structure becomes an equality test instead of a fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import IsingDiagonal
from .simulator import (
    QaoaParams,
    apply_mixer_layer,
    apply_objective_layer,
    plus_state,
    state_energy,
)

PARAM_KINDS = ("gamma", "beta")


@dataclass(frozen=True)
class ScanContext:
    """What was swept and what stayed frozen."""

    param_kind: str  # "gamma" (objective angle) or "beta" (mixer angle)
    layer_index: int | None
    alpha: float
    frozen: QaoaParams | None = None


@dataclass(frozen=True)
class ScanResult:
    thetas: np.ndarray
    energies: np.ndarray
    context: ScanContext

    def __post_init__(self):
        if self.thetas.shape != self.energies.shape or self.thetas.ndim != 1:
            raise ValueError("thetas and energies must be equal-length vectors")
        if self.thetas.size > 1:
            steps = np.diff(self.thetas)
            if steps.min() <= 0:
                raise ValueError("theta grid must be strictly increasing")


@dataclass(frozen=True)
class CosineTerm:
    frequency: float
    amplitude: float
    phase: float


@dataclass(frozen=True)
class CosineModel:
    """C + sum A cos(theta * frequency + B) with nonnegative amplitudes."""

    constant: float
    terms: tuple[CosineTerm, ...]

    def evaluate(self, thetas: np.ndarray) -> np.ndarray:
        out = np.full_like(np.asarray(thetas, dtype=np.float64), self.constant)
        for t in self.terms:
            out += t.amplitude * np.cos(t.frequency * np.asarray(thetas) + t.phase)
        return out


@dataclass(frozen=True)
class CosineVerification:
    contained: bool
    surviving: tuple[CosineTerm, ...]
    off_gap_frequencies: tuple[float, ...]
    max_off_gap_ratio: float  # strongest off-gap bin relative to the peak bin
    reconstruction_error: float
    model: CosineModel


def _apply_op(psi, kind, angle, diag):
    if kind == "gamma":
        return apply_objective_layer(psi, angle, diag)
    if kind == "beta":
        return apply_mixer_layer(psi, angle)
    raise ValueError(f"unknown parameter kind {kind!r}")


def scan_parameter(
    prefix_state: np.ndarray,
    param_kind: str,
    diag: IsingDiagonal,
    alpha: float,
    suffix_ops,
    thetas: np.ndarray,
    context: ScanContext | None = None,
) -> ScanResult:
    """Energy versus the swept angle, everything else frozen.

    ``prefix_state`` is the state right before the swept gate; ``suffix_ops``
    are the remaining gates after it as (kind, angle) pairs; the observable is
    the alpha-mixture on ``diag``.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    if thetas.size == 0:
        raise ValueError("theta grid must be nonempty")
    energies = np.empty(thetas.size)
    for i, theta in enumerate(thetas):
        psi = _apply_op(prefix_state, param_kind, theta, diag)
        for kind, angle in suffix_ops:
            psi = _apply_op(psi, kind, angle, diag)
        energies[i] = state_energy(psi, alpha, diag)
    if context is None:
        context = ScanContext(param_kind=param_kind, layer_index=None, alpha=alpha)
    return ScanResult(thetas=thetas, energies=energies, context=context)


def scan_circuit_parameter(
    diag: IsingDiagonal,
    params: QaoaParams,
    layer_index: int,
    param_kind: str,
    thetas: np.ndarray,
    alpha: float = 1.0,
) -> ScanResult:
    """Sweep gamma or beta of one layer of the full circuit."""
    if param_kind not in PARAM_KINDS:
        raise ValueError(f"param_kind must be one of {PARAM_KINDS}, got {param_kind!r}")
    if not 0 <= layer_index < params.layers:
        raise ValueError(f"layer index {layer_index} outside 0..{params.layers - 1}")

    psi = plus_state(diag.n)
    for j in range(layer_index):
        psi = apply_objective_layer(psi, params.gammas[j], diag)
        psi = apply_mixer_layer(psi, params.betas[j])
    suffix: list[tuple[str, float]] = []
    if param_kind == "gamma":
        suffix.append(("beta", params.betas[layer_index]))
    else:
        psi = apply_objective_layer(psi, params.gammas[layer_index], diag)
    for j in range(layer_index + 1, params.layers):
        suffix.append(("gamma", params.gammas[j]))
        suffix.append(("beta", params.betas[j]))

    context = ScanContext(param_kind, layer_index, alpha, frozen=params)
    return scan_parameter(psi, param_kind, diag, alpha, suffix, thetas, context)


def eigenvalue_gaps(spectrum: np.ndarray) -> np.ndarray:
    """Deduplicated positive differences |E_i - E_j| of a spectrum."""
    uniq = np.unique(np.asarray(spectrum, dtype=np.float64))
    diffs = uniq[:, None] - uniq[None, :]
    return np.unique(diffs[diffs > 0])


def mixer_spectrum(n: int) -> np.ndarray:
    """Eigenvalues of -sum_i X_i: the integers -n, -n+2, ..., n."""
    return np.arange(-n, n + 1, 2, dtype=np.float64)


def gaps_for_scan(diag: IsingDiagonal, param_kind: str) -> np.ndarray:
    """Gap set of the generator swept by a gamma or beta scan."""
    if param_kind == "gamma":
        return eigenvalue_gaps(diag.energies)
    if param_kind == "beta":
        return eigenvalue_gaps(mixer_spectrum(diag.n))
    raise ValueError(f"param_kind must be one of {PARAM_KINDS}, got {param_kind!r}")


def period_grid(size: int) -> np.ndarray:
    """Uniform grid over [0, 2pi), endpoint excluded: one exact DFT period."""
    if size < 1:
        raise ValueError("grid size must be at least 1")
    return np.linspace(0.0, 2.0 * np.pi, size, endpoint=False)


def default_grid_size(max_gap: float) -> int:
    """Smallest odd grid putting every integer frequency up to max_gap in its own bin."""
    return 2 * int(np.ceil(max_gap)) + 1


def _check_period_grid(thetas: np.ndarray) -> float:
    if thetas.size < 2:
        raise ValueError("need at least two grid points to analyze frequencies")
    steps = np.diff(thetas)
    dtheta = steps[0]
    if np.max(np.abs(steps - dtheta)) > 1e-12 * max(1.0, abs(dtheta)):
        raise ValueError("theta grid must be uniformly spaced")
    span = thetas.size * dtheta
    if abs(span - 2.0 * np.pi) > 1e-9:
        raise ValueError(
            f"grid must cover exactly one full period 2pi (got span {span:.6f})"
        )
    return dtheta


def verify_cosine_structure(
    scan: ScanResult, gaps: np.ndarray, tol: float = 1e-9
) -> CosineVerification:
    """DFT the scan over one period and check every surviving frequency is a gap.

    A bin survives when its magnitude exceeds ``tol`` times the largest bin
    magnitude.  The fitted model collects the free term from the zero bin and
    one cosine per surviving bin; its reconstruction error on the grid is the
    reported residual.
    """
    _check_period_grid(scan.thetas)
    m = scan.thetas.size
    coeffs = np.fft.rfft(scan.energies) / m
    mags = np.abs(coeffs)
    threshold = tol * mags.max()

    gaps = np.asarray(gaps, dtype=np.float64)
    theta0 = scan.thetas[0]
    terms = []
    off_gap = []
    max_off_ratio = 0.0
    for bin_index in range(1, mags.size):
        if mags[bin_index] <= threshold:
            continue
        freq = float(bin_index)
        # bins below Nyquist carry half of the cosine's amplitude
        doubled = 2 * bin_index != m
        amplitude = (2.0 if doubled else 1.0) * mags[bin_index]
        phase = float(np.angle(coeffs[bin_index]) - freq * theta0)
        terms.append(CosineTerm(frequency=freq, amplitude=float(amplitude), phase=phase))
        if gaps.size == 0 or np.min(np.abs(gaps - freq)) > 1e-6:
            off_gap.append(freq)
            max_off_ratio = max(max_off_ratio, float(mags[bin_index] / mags.max()))

    model = CosineModel(constant=float(coeffs[0].real), terms=tuple(terms))
    residual = float(np.max(np.abs(model.evaluate(scan.thetas) - scan.energies)))
    return CosineVerification(
        contained=not off_gap,
        surviving=tuple(terms),
        off_gap_frequencies=tuple(off_gap),
        max_off_gap_ratio=max_off_ratio,
        reconstruction_error=residual,
        model=model,
    )
