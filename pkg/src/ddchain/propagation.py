"""Exact stepwise propagation of the logical-frame propagator.

One free-evolution step U0 = exp(-i H delta_t) is built once from the
cached eigendecomposition; each schedule slot then contributes the
factor g† U0 g, where the conjugation by the slot's frame g is a signed
row/column permutation of U0 (O(d^2)) followed by a single dense
multiply.  The accumulated propagator is the logical-frame U~; for
cyclic protocols it coincides with the physical propagator at cycle
boundaries.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ValidationError
from .hamiltonian import HamiltonianMatrix
from .pauli import PauliString, conjugate_matrix
from .schedules import Schedule

UNITARITY_DRIFT_TOL = 1e-11
DRIFT_CHECK_STRIDE = 1024


class FreeStep:
    """Cached exp(-i H delta_t) built from spectral data."""

    def __init__(self, h: HamiltonianMatrix, delta_t: float):
        if delta_t <= 0:
            raise ValidationError("delta_t must be positive")
        self.h = h
        self.delta_t = delta_t
        v = h.eigenvectors
        phases = np.exp(-1j * h.eigenvalues * delta_t)
        self.u0 = (v * phases) @ v.conj().T


class PropagationState:
    """Accumulated logical propagator plus frame/step bookkeeping."""

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        d = 1 << n_qubits
        self.u = np.eye(d, dtype=complex)
        self.frame = PauliString.identity(n_qubits)
        self.steps = 0
        self.renormalizations = 0

    @property
    def elapsed(self):
        return self.steps  # in units of delta_t; callers scale

    def unitarity_drift(self) -> float:
        d = self.u.shape[0]
        return float(np.linalg.norm(self.u.conj().T @ self.u - np.eye(d)))


def step(state: PropagationState, frame: PauliString, free: FreeStep) -> PropagationState:
    """Apply one slot: U~ <- (g† U0 g) · U~ (newest factor on the left)."""
    if not frame.is_phase_free:
        raise ValidationError("slot frames must be phase-free")
    state.u = conjugate_matrix(frame, free.u0) @ state.u
    state.frame = frame
    state.steps += 1
    return state


def renormalize(state: PropagationState, tol: float = UNITARITY_DRIFT_TOL) -> PropagationState:
    """Polar-project U~ back onto the unitary group when drift exceeds tol."""
    if state.unitarity_drift() > tol:
        w, _, vh = np.linalg.svd(state.u)
        state.u = w @ vh
        state.renormalizations += 1
    return state


def propagate(schedule: Schedule, h: HamiltonianMatrix, n_steps: int,
              sample_steps, drift_stride: int = DRIFT_CHECK_STRIDE):
    """Run n_steps slots, yielding (t, U~ copy) at the requested slot counts.

    sample_steps are slot indices (multiples of delta_t); they must lie
    on the grid and within the horizon.
    """
    sample_steps = sorted(set(int(s) for s in sample_steps))
    if sample_steps and (sample_steps[0] < 0 or sample_steps[-1] > n_steps):
        raise ValidationError("sample steps must lie in [0, n_steps]")
    if any(s != int(s) for s in sample_steps):
        raise ValidationError("sample times must sit on the delta_t grid")
    if h.n_qubits != schedule.n_qubits:
        raise ValidationError("schedule and Hamiltonian qubit counts differ")
    free = FreeStep(h, schedule.delta_t)
    state = PropagationState(schedule.n_qubits)
    out = []
    want = set(sample_steps)
    if 0 in want:
        out.append((0.0, state.u.copy()))
    frames = itertools.islice(schedule.frames(), n_steps)
    for k, frame in enumerate(frames, start=1):
        step(state, frame, free)
        if k % drift_stride == 0:
            renormalize(state)
        if k in want:
            out.append((k * schedule.delta_t, state.u.copy()))
    if state.steps < n_steps:
        raise ValidationError("schedule ended before the requested horizon")
    return out
