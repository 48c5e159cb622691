"""Heisenberg-chain Hamiltonian construction and spectral utilities.

The chain couples nearest neighbours only:

    H = sum_i (omega + delta_i) Z_i / 2
        + J sum_{i<N} (X_i X_{i+1} + Y_i Y_{i+1} + anisotropy * Z_i Z_{i+1})

In the frame rotating at the common qubit frequency omega the Zeeman
part reduces to the detunings delta_i alone; with all detunings zero
(the default) only the coupling survives.  J sets the inverse-time
scale, so all times are quoted in units of 1/J.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceError, ValidationError
from .pauli import MAX_DENSE_QUBITS, PauliString


@dataclass(frozen=True)
class ChainSpec:
    """Physical parameters of the spin chain."""

    n_qubits: int
    coupling: float = 1.0  # J
    anisotropy: float = 1.0  # Delta
    detunings: tuple = ()  # delta_i = omega_i - omega; empty means all zero

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("n_qubits must be >= 1")
        if self.detunings and len(self.detunings) != self.n_qubits:
            raise ValidationError("detunings length must equal n_qubits")

    @property
    def detuning_list(self) -> tuple:
        return self.detunings if self.detunings else (0.0,) * self.n_qubits


class HamiltonianMatrix:
    """Dense Hermitian matrix with cached spectral data."""

    def __init__(self, matrix: np.ndarray, n_qubits: int):
        d = 1 << n_qubits
        if matrix.shape != (d, d):
            raise ValidationError(f"expected {d}x{d} matrix")
        scale = np.linalg.norm(matrix)
        if scale > 0 and np.linalg.norm(matrix - matrix.conj().T) > 1e-12 * scale:
            raise ValidationError("matrix is not Hermitian within tolerance")
        self.n_qubits = n_qubits
        self.dimension = d
        self.matrix = matrix
        self.eigenvalues, self.eigenvectors = np.linalg.eigh(matrix)

    @property
    def kappa(self) -> float:
        """Spectral norm max|eig(H)|, the convergence scale."""
        return float(np.max(np.abs(self.eigenvalues))) if self.dimension else 0.0


def _add_term(h: np.ndarray, coeff: float, p: PauliString):
    if coeff != 0.0:
        h += coeff * p.to_matrix()


def build_lab_frame(spec: ChainSpec, omega: float) -> HamiltonianMatrix:
    """Full Hamiltonian including the Zeeman terms at frequency omega."""
    return _build(spec, zeeman=[omega + d for d in spec.detuning_list])


def build_rotating_frame(spec: ChainSpec) -> HamiltonianMatrix:
    """Hamiltonian in the frame rotating at the common frequency.

    Only the detunings survive in the Zeeman part.  The coupling commutes
    with total Z, which makes the rotating-frame Hamiltonian
    time-independent; this is asserted at build time.
    """
    h = _build(spec, zeeman=list(spec.detuning_list))
    n = spec.n_qubits
    total_z = sum(
        PauliString.single(n, j, "Z").to_matrix() for j in range(n)
    )
    coupling_part = h.matrix - sum(
        0.5 * dj * PauliString.single(n, j, "Z").to_matrix()
        for j, dj in enumerate(spec.detuning_list)
    )
    comm = total_z @ coupling_part - coupling_part @ total_z
    scale = max(np.linalg.norm(coupling_part), 1.0)
    assert np.linalg.norm(comm) < 1e-10 * scale, "coupling must conserve total Z"
    return h


def _build(spec: ChainSpec, zeeman) -> HamiltonianMatrix:
    n = spec.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise ResourceError(
            f"N={n} exceeds the dense-propagation cap of {MAX_DENSE_QUBITS} qubits"
        )
    d = 1 << n
    h = np.zeros((d, d), dtype=complex)
    for j in range(n):
        _add_term(h, 0.5 * zeeman[j], PauliString.single(n, j, "Z"))
    j_c = spec.coupling
    for i in range(n - 1):
        for letter, c in (("X", j_c), ("Y", j_c), ("Z", j_c * spec.anisotropy)):
            p = PauliString.single(n, i, letter) * PauliString.single(n, i + 1, letter)
            _add_term(h, c, p)
    return HamiltonianMatrix(h, n)


def kappa(h: HamiltonianMatrix) -> float:
    return h.kappa


def convergence_check(kappa_value: float, cycle_time: float):
    """Magnus-series convergence criterion kappa * T_c < 1.

    Returns (ok, message); callers surface the message as a warning,
    never an error.
    """
    if kappa_value < 0 or cycle_time <= 0:
        raise ValidationError("kappa must be >= 0 and cycle time > 0")
    ok = kappa_value * cycle_time < 1.0
    msg = (
        None
        if ok
        else (
            f"kappa*T_c = {kappa_value * cycle_time:.3g} >= 1: average-Hamiltonian "
            "series convergence is not guaranteed"
        )
    )
    return ok, msg
