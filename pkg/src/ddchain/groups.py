"""Decoupling groups and their canonical control paths.

Two constructions are provided:

* the nested group: every assignment of {I, Z, X, Y} to the even qubits
  (2, 4, ..., 2m in 1-based counting), |G| = 4^m with m = floor(N/2),
  traversed along a base-4 reflected Gray code so each pulse is a
  single-qubit Pauli;
* the collective 4-element group {1, Z_odd, Z_odd·Y_even, Y_even},
  whose pulses alternate a Z on all odd qubits with a Y on all even
  qubits (1-based), four pulses per cycle, for even N.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ValidationError
from .hamiltonian import HamiltonianMatrix
from .pauli import PauliString, conjugate_matrix

# Gray-code digit alphabets: first even qubit sweeps (I, Z, X, Y), deeper
# nesting levels sweep (I, Z, Y, X); this choice reproduces the published
# 16-column ordering for m = 2.
_ALPHABET_ROW1 = ("I", "Z", "X", "Y")
_ALPHABET_DEEP = ("I", "Z", "Y", "X")


@dataclass(frozen=True)
class DecouplingGroup:
    """Ordered phase-free Pauli strings with g_0 = identity."""

    elements: tuple
    n_qubits: int
    label: str

    def __post_init__(self):
        if not self.elements or not self.elements[0].is_identity:
            raise ValidationError("first group element must be the identity")
        if len({(g.x, g.z) for g in self.elements}) != len(self.elements):
            raise ValidationError("group elements must be distinct")
        for g in self.elements:
            if not g.is_phase_free:
                raise ValidationError("group elements must be phase-free")

    def __len__(self):
        return len(self.elements)

    def is_closed(self) -> bool:
        """Closure under phase-free multiplication."""
        keys = {(g.x, g.z) for g in self.elements}
        return all(
            (a.x ^ b.x, a.z ^ b.z) in keys for a in self.elements for b in self.elements
        )


@dataclass(frozen=True)
class PulsePath:
    """A traversal order of the group; order[0] = 0 for canonical paths."""

    group: DecouplingGroup
    order: tuple

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.group))):
            raise ValidationError("order must be a permutation of the group indices")

    @property
    def frames(self) -> tuple:
        return tuple(self.group.elements[i] for i in self.order)

    @property
    def pulses(self) -> tuple:
        """P_k = g_k g_{k-1}†, k = 1..|G|, including the cycle-closing pulse."""
        f = self.frames
        m = len(f)
        return tuple(f[(k + 1) % m] * f[k].adjoint() for k in range(m))


def build_nested_group(n_qubits: int):
    """Nested 4^m group over the even qubits, with its Gray-code path.

    Returns (group, canonical_path).  Elements are stored directly in
    path order, so the canonical path is the identity permutation.
    """
    if n_qubits < 2:
        raise ValidationError("nested group needs N >= 2")
    m = n_qubits // 2
    even_qubits = [2 * r + 1 for r in range(m)]  # 0-based indices of qubits 2,4,...
    size = 4**m
    elements = []
    for c in range(size):
        g = PauliString.identity(n_qubits)
        for r in range(m):
            digit = (c >> (2 * r)) & 3
            if (c >> (2 * (r + 1))) & 1:  # reflect when the higher digits are odd
                digit = 3 - digit
            alphabet = _ALPHABET_ROW1 if r == 0 else _ALPHABET_DEEP
            letter = alphabet[digit]
            if letter != "I":
                g = g * PauliString.single(n_qubits, even_qubits[r], letter)
        elements.append(g.phase_free())
    group = DecouplingGroup(tuple(elements), n_qubits, label=f"nested-4^{m}")
    return group, PulsePath(group, tuple(range(size)))


def build_collective_group(n_qubits: int):
    """4-element collective group for even N, with its listed path."""
    if n_qubits < 2 or n_qubits % 2:
        raise ValidationError("collective group is defined for even N >= 2")
    n = n_qubits
    z_odd = PauliString.identity(n)
    y_even = PauliString.identity(n)
    for j in range(0, n, 2):  # 0-based even j = 1-based odd qubits
        z_odd = z_odd * PauliString.single(n, j, "Z")
    for j in range(1, n, 2):
        y_even = y_even * PauliString.single(n, j, "Y")
    elements = (
        PauliString.identity(n),
        z_odd.phase_free(),
        (z_odd * y_even).phase_free(),
        y_even.phase_free(),
    )
    group = DecouplingGroup(elements, n, label="collective-4")
    return group, PulsePath(group, (0, 1, 2, 3))


def group_average(group: DecouplingGroup, h) -> np.ndarray:
    """(1/|G|) sum_j g_j† H g_j via signed-permutation conjugations."""
    m = h.matrix if isinstance(h, HamiltonianMatrix) else np.asarray(h)
    acc = np.zeros_like(m, dtype=complex)
    for g in group.elements:
        acc += conjugate_matrix(g, m)
    return acc / len(group)


@dataclass(frozen=True)
class QRCounts:
    """Sizes of the nested-group subsets with exactly R nontrivial letters."""

    counts: tuple  # Q_0 .. Q_m
    maxima: tuple  # R value(s) with the largest Q_R

    @property
    def total(self) -> int:
        return sum(self.counts)


def q_r_counts(m: int) -> QRCounts:
    """Q_R = 3^R * C(m, R); the counts sum to 4^m.

    For m = 3 + 4n two consecutive R share the maximum; otherwise the
    maximum sits at the unique integer in [(3m-1)/4, (3m+3)/4].
    """
    if m < 1:
        raise ValidationError("m must be >= 1")
    counts = tuple(3**r * comb(m, r) for r in range(m + 1))
    best = max(counts)
    maxima = tuple(r for r, q in enumerate(counts) if q == best)
    return QRCounts(counts, maxima)


def path_table(path: PulsePath) -> str:
    """Render a nested path as rows = even qubits, columns = path position.

    Matches the published matrix layout; the collective path renders as a
    single row of full strings.
    """
    frames = path.frames
    n = frames[0].n_qubits
    m = n // 2
    if path.group.label.startswith("nested"):
        rows = []
        for r in range(m):
            qubit = 2 * r + 1
            rows.append(" ".join(f.letters[qubit] for f in frames))
        return "\n".join(rows)
    return " ".join(f.letters for f in frames)
