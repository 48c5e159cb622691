"""Average-Hamiltonian diagnostics for one control cycle.

Given the frame sequence of a cycle with equal slots, the toggled
Hamiltonians are H_k = g_k† H g_k and the leading Magnus terms are

    H0_bar = (1/M) sum_k H_k
    H1_bar = (-i dt^2 / (2 T_c)) sum_{k>l} [H_k, H_l]

The exact effective Hamiltonian is recovered from the cycle propagator
by a principal-branch matrix log; the second-order residuals the
concatenated scheme cannot remove are then read off from its Pauli
decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import BranchAmbiguityError, ValidationError
from .hamiltonian import HamiltonianMatrix
from .pauli import PauliDecomposition, conjugate_matrix, decompose

BRANCH_GUARD = 1e-6

# 1 - F ~ T^a * (|G| dt)^b * kappa^c with unit prefactor; NRD uses dt itself.
_BOUND_TABLE = {
    "PDD": (2, 2, 4),
    "SDD": (2, 4, 6),
    "NRD": (1, 1, 2),
    "RPD": (1, 3, 4),
    "EMD": (1, 3, 4),
    "SRPD": (1, 5, 6),
}


@dataclass(frozen=True)
class CycleDescription:
    """One cycle: frame per slot, slot length and the driving Hamiltonian."""

    frames: tuple
    delta_t: float
    h: HamiltonianMatrix

    def __post_init__(self):
        if not self.frames:
            raise ValidationError("a cycle needs at least one slot")
        if any(not f.is_phase_free for f in self.frames):
            raise ValidationError("cycle frames must be phase-free")

    @property
    def cycle_time(self) -> float:
        return len(self.frames) * self.delta_t

    def toggled(self):
        return [conjugate_matrix(f, self.h.matrix) for f in self.frames]


def magnus0(cycle: CycleDescription) -> np.ndarray:
    """Zeroth-order average Hamiltonian (the group/path average)."""
    hs = cycle.toggled()
    return sum(hs) / len(hs)


def magnus1(cycle: CycleDescription) -> np.ndarray:
    """First-order Magnus term for piecewise-constant equal slots."""
    hs = cycle.toggled()
    acc = np.zeros_like(hs[0])
    running = np.zeros_like(hs[0])  # sum of H_l for l < k
    for k, hk in enumerate(hs):
        if k:
            acc += hk @ running - running @ hk
        running += hk
    return (-1j * cycle.delta_t**2 / (2 * cycle.cycle_time)) * acc


def effective_hamiltonian(u_cycle: np.ndarray, cycle_time: float,
                          branch_guard: float = BRANCH_GUARD) -> np.ndarray:
    """H_eff with exp(-i H_eff T_c) = u_cycle, principal branch.

    Unitaries are normal, so the complex Schur form is diagonal; the
    eigenphases give the log directly.  An eigenphase within
    branch_guard of ±pi is reported as a branch ambiguity, not guessed.
    """
    if cycle_time <= 0:
        raise ValidationError("cycle time must be positive")
    d = u_cycle.shape[0]
    if np.linalg.norm(u_cycle.conj().T @ u_cycle - np.eye(d)) > 1e-8:
        raise ValidationError("cycle propagator is not unitary")
    t, q = scipy.linalg.schur(u_cycle, output="complex")
    eigvals = np.diag(t)
    thetas = np.angle(eigvals)
    if np.any(np.pi - np.abs(thetas) < branch_guard):
        raise BranchAmbiguityError(
            "cycle eigenphase within guard of ±pi; matrix log branch is ambiguous"
        )
    lambdas = -thetas / cycle_time
    h_eff = (q * lambdas) @ q.conj().T
    return 0.5 * (h_eff + h_eff.conj().T)


def residual_terms(h_eff: np.ndarray, n_qubits: int,
                   threshold: float | None = None,
                   kappa: float | None = None) -> PauliDecomposition:
    """Pauli decomposition of the effective Hamiltonian above a floor.

    The default floor is 1e-12 * kappa when kappa is given, else
    1e-12 times the matrix scale.
    """
    if threshold is None:
        scale = kappa if kappa is not None else max(np.max(np.abs(h_eff)), 1.0)
        threshold = 1e-12 * scale
    dec = decompose(h_eff, n_qubits, drop_tol=0.0)
    dec.terms = {p: c for p, c in dec.terms.items() if abs(c) > threshold}
    return dec


def decay_bound(protocol: str, total_time: float, delta_t: float,
                group_size: int, kappa: float) -> float:
    """Order-of-magnitude 1 - F estimate with unit prefactor.

    Deterministic rows scale as T^2, stochastic rows as T; all but NRD
    use the cycle time |G| delta_t as the small parameter.
    """
    if min(total_time, delta_t, kappa) < 0 or group_size < 1:
        raise ValidationError("arguments must be positive")
    key = protocol.upper()
    if key in ("EMD-G", "EMD-PAULI"):
        key = "EMD"
    if key == "PRPD":
        key = "RPD"
    if key not in _BOUND_TABLE:
        raise ValidationError(f"no decay bound for protocol {protocol!r}")
    a, b, c = _BOUND_TABLE[key]
    small = delta_t if key == "NRD" else group_size * delta_t
    return total_time**a * small**b * kappa**c
