"""Exact state-vector simulation of the alternating-layer ansatz.

A circuit with angles (gammas, betas) of length L prepares

    |psi> = M(beta_L) O(gamma_L) ... M(beta_1) O(gamma_1) |+...+>

where O(gamma) = exp(-i gamma H_obj) is a diagonal phase layer and
M(beta) = exp(-i beta H_mix) = prod_i exp(+i beta X_i) since
H_mix = -sum_i X_i.  The objective layer acts first within each block.

Expectation values are evaluated as Rayleigh quotients (divided by the
state norm, which unitarity keeps at 1 up to rounding); this makes the
mixer ground state evaluate to exactly ``-n`` in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ResourceError
from .hamiltonian import (
    MAX_QUBITS,
    IsingDiagonal,
    flip_index_table,
    flip_qubit,
    mixer_matvec,
    num_qubits,
)


@dataclass(frozen=True)
class QaoaParams:
    """Angle vectors of the ansatz; unconstrained reals, equal lengths L >= 1."""

    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gammas", np.atleast_1d(np.asarray(self.gammas, dtype=np.float64)))
        object.__setattr__(self, "betas", np.atleast_1d(np.asarray(self.betas, dtype=np.float64)))
        if self.gammas.shape != self.betas.shape or self.gammas.ndim != 1:
            raise ValueError(
                f"gammas and betas must be equal-length vectors, got shapes "
                f"{self.gammas.shape} and {self.betas.shape}"
            )
        if self.layers < 1:
            raise ValueError("at least one layer is required")

    @property
    def layers(self) -> int:
        return self.gammas.size

    def flatten(self) -> np.ndarray:
        """[gamma_1..gamma_L, beta_1..beta_L]; inverse of :meth:`from_flat`."""
        return np.concatenate([self.gammas, self.betas])

    @classmethod
    def from_flat(cls, x: np.ndarray) -> "QaoaParams":
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.size % 2 != 0 or x.size == 0:
            raise ValueError(f"expected a flat vector of even length, got shape {x.shape}")
        half = x.size // 2
        return cls(gammas=x[:half], betas=x[half:])


def plus_state(n: int, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    """Uniform superposition |+...+>, the ground state of the mixer."""
    if n < 1:
        raise ValueError(f"need at least one qubit, got n={n}")
    if n > max_qubits:
        raise ResourceError(f"{n} qubits exceed the configured limit of {max_qubits}")
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=np.complex128)


def _check_dim(psi: np.ndarray, diag: IsingDiagonal) -> None:
    if psi.shape != diag.energies.shape:
        raise ValueError(
            f"state of shape {psi.shape} does not match {diag.n}-qubit diagonal"
        )


def apply_objective_layer(psi: np.ndarray, gamma: float, diag: IsingDiagonal) -> np.ndarray:
    """exp(-i gamma H_obj) |psi>: a pure phase per basis state."""
    _check_dim(psi, diag)
    # one exponential per distinct level, gathered back onto the basis
    return np.exp(-1j * gamma * diag.levels)[diag.level_index] * psi


def apply_mixer_layer(psi: np.ndarray, beta: float) -> np.ndarray:
    """exp(-i beta H_mix) |psi> as n single-qubit rotations.

    Each qubit is one 2 x (dim/2) GEMM.  Qubits are deliberately not fused
    into larger blocks: two-term dot products are order-independent in
    floating point, which keeps the uniform state exactly uniform and the
    mixer ground energy exactly -n.
    """
    n = num_qubits(psi.shape[-1])
    dim = psi.shape[-1]
    c = float(np.cos(beta))
    js = 1j * float(np.sin(beta))
    rot = np.array([[c, js], [js, c]])
    out = psi
    for i in range(n):
        k = 1 << i
        v = out.reshape(-1, 2, k).transpose(1, 0, 2).reshape(2, -1)
        w = rot @ v
        out = w.reshape(2, -1, k).transpose(1, 0, 2).reshape(dim)
    return out


def prepare_state(params: QaoaParams, diag: IsingDiagonal, max_qubits: int = MAX_QUBITS) -> np.ndarray:
    psi = plus_state(diag.n, max_qubits)
    for gamma, beta in zip(params.gammas, params.betas):
        psi = apply_objective_layer(psi, gamma, diag)
        psi = apply_mixer_layer(psi, beta)
    return psi


def mixer_expectation(psi: np.ndarray) -> float:
    """<psi|H_mix|psi> / <psi|psi>.

    Each single-qubit term is normalized separately: on the uniform state
    every term divides two bit-identical sums (the norm is evaluated through
    the same row-sum codepath), so the result is exactly -n there.
    """
    n = num_qubits(psi.shape[-1])
    table = flip_index_table(n)
    conj = psi.conj()
    if table is not None:
        rows = np.empty((n + 1, psi.size), dtype=psi.dtype)
        np.take(psi, table, out=rows[:n])
        rows[n] = psi
        sums = (conj * rows).sum(axis=1).real  # last row is <psi|psi>
        return -float((sums[:n] / sums[n]).sum())
    norm2 = np.vdot(psi, psi).real
    total = 0.0
    for i in range(n):
        total += np.vdot(psi, flip_qubit(psi, i)).real / norm2
    return -float(total)


def objective_expectation(psi: np.ndarray, diag: IsingDiagonal) -> float:
    """<psi|H_obj|psi> / <psi|psi> from the diagonal."""
    _check_dim(psi, diag)
    probs = psi.real * psi.real + psi.imag * psi.imag
    return float(np.dot(diag.energies, probs) / probs.sum())


def state_energy(psi: np.ndarray, alpha: float, diag: IsingDiagonal) -> float:
    """(1 - alpha) <H_mix> + alpha <H_obj> for an already-prepared state."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    e = 0.0
    if alpha != 1.0:
        e += (1.0 - alpha) * mixer_expectation(psi)
    if alpha != 0.0:
        e += alpha * objective_expectation(psi, diag)
    return e


def energy(params: QaoaParams, alpha: float, diag: IsingDiagonal) -> float:
    return state_energy(prepare_state(params, diag), alpha, diag)


def _observable_matvec(psi: np.ndarray, alpha: float, diag: IsingDiagonal) -> np.ndarray:
    out = np.zeros_like(psi)
    if alpha != 0.0:
        out += (alpha * diag.energies) * psi
    if alpha != 1.0:
        out += (1.0 - alpha) * mixer_matvec(psi)
    return out


def _adjoint_gradient(
    psi: np.ndarray,
    params: QaoaParams,
    alpha: float,
    diag: IsingDiagonal,
    method: str,
) -> np.ndarray:
    """Reverse-pass derivatives of <psi|H(alpha)|psi> wrt all 2L angles.

    ``method`` picks how intermediate kets are obtained: "inverse" undoes
    layers (memory O(2^n)), "stored" keeps every intermediate state from a
    second forward pass (memory O(L * 2^n)).  Both orderings of the same
    arithmetic agree to rounding and exist for cross-checking.
    """
    if method not in ("inverse", "stored"):
        raise ValueError(f"unknown gradient method {method!r}")
    layers = params.layers
    norm2 = np.vdot(psi, psi).real

    stored = None
    if method == "stored":
        stored = [plus_state(diag.n)]
        for gamma, beta in zip(params.gammas, params.betas):
            stored.append(apply_objective_layer(stored[-1], gamma, diag))
            stored.append(apply_mixer_layer(stored[-1], beta))

    bra = _observable_matvec(psi, alpha, diag)  # H(alpha) |psi>
    ket = psi
    d_gamma = np.empty(layers)
    d_beta = np.empty(layers)
    for j in range(layers - 1, -1, -1):
        # ket must sit right after the mixer of layer j
        if stored:
            ket = stored[2 * j + 2]
        d_beta[j] = 2.0 * np.vdot(bra, mixer_matvec(ket)).imag / norm2
        bra = apply_mixer_layer(bra, -params.betas[j])
        ket = stored[2 * j + 1] if stored else apply_mixer_layer(ket, -params.betas[j])
        d_gamma[j] = 2.0 * np.vdot(bra, diag.energies * ket).imag / norm2
        bra = apply_objective_layer(bra, -params.gammas[j], diag)
        if not stored:
            ket = apply_objective_layer(ket, -params.gammas[j], diag)
    return np.concatenate([d_gamma, d_beta])


def energy_and_gradient(
    params: QaoaParams, alpha: float, diag: IsingDiagonal, method: str = "inverse"
) -> tuple[float, np.ndarray]:
    """One forward pass shared between the energy and its adjoint gradient."""
    psi = prepare_state(params, diag)
    e = state_energy(psi, alpha, diag)
    grad = _adjoint_gradient(psi, params, alpha, diag, method)
    return e, grad


def gradient(
    params: QaoaParams, alpha: float, diag: IsingDiagonal, method: str = "inverse"
) -> np.ndarray:
    """d E_alpha / d(gamma_j, beta_j), laid out as [gammas..., betas...]."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return energy_and_gradient(params, alpha, diag, method)[1]
