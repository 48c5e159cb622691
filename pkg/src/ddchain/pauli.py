"""Exact N-qubit Pauli-string algebra with phase tracking.

A PauliString is a tensor product of single-qubit letters {I, X, Y, Z}
times a scalar phase restricted to {+1, -1, +i, -i}.  Letters are encoded
as two bitmasks (x-part, z-part) so products and commutation signs reduce
to bit operations, and the phase is an exact element of Z_4 (the power of
i), never a float.

Bit convention: qubit 0 is the leftmost tensor factor and the most
significant basis bit, i.e. mask bit (n - 1 - j) belongs to qubit j.
The letter with bits (x, z) is  i^(x*z) X^x Z^z, which gives
(0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .errors import DimensionError, ResourceError, ValidationError

MAX_DENSE_QUBITS = 10

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}
_PHASE_STR = {0: "+1", 1: "+i", 2: "-1", 3: "-i"}
_STR_PHASE = {v: k for k, v in _PHASE_STR.items()}
_PHASE_VALUE = {0: 1 + 0j, 1: 1j, 2: -1 + 0j, 3: -1j}

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """Phase-tracked N-qubit Pauli operator."""

    n_qubits: int
    x: int  # bitmask of X-parts
    z: int  # bitmask of Z-parts
    phase_pow: int = 0  # operator = i**phase_pow * (letters)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValidationError("n_qubits must be positive")
        mask = (1 << self.n_qubits) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValidationError("bitmask exceeds qubit count")
        if self.phase_pow not in (0, 1, 2, 3):
            object.__setattr__(self, "phase_pow", self.phase_pow % 4)

    # -- constructors ------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def from_letters(cls, letters: str, phase_pow: int = 0) -> "PauliString":
        n = len(letters)
        x = z = 0
        for j, letter in enumerate(letters):
            try:
                xb, zb = _LETTER_TO_BITS[letter]
            except KeyError:
                raise ValidationError(f"unknown Pauli letter {letter!r}")
            bit = 1 << (n - 1 - j)
            x |= xb * bit
            z |= zb * bit
        return cls(n, x, z, phase_pow % 4)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliString":
        """Letter on one qubit (0-based), identity elsewhere."""
        if not 0 <= qubit < n_qubits:
            raise ValidationError(f"qubit {qubit} out of range for n={n_qubits}")
        letters = ["I"] * n_qubits
        letters[qubit] = letter
        return cls.from_letters("".join(letters))

    # -- rendering ---------------------------------------------------

    @property
    def letters(self) -> str:
        out = []
        for j in range(self.n_qubits):
            bit = 1 << (self.n_qubits - 1 - j)
            out.append(_BITS_TO_LETTER[(int(bool(self.x & bit)), int(bool(self.z & bit)))])
        return "".join(out)

    @property
    def phase(self) -> complex:
        return _PHASE_VALUE[self.phase_pow]

    @property
    def is_phase_free(self) -> bool:
        return self.phase_pow == 0

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.phase_pow == 0

    def __str__(self) -> str:
        return f"{_PHASE_STR[self.phase_pow]}·{self.letters}"

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Inverse of str(); a bare letter string is taken with phase +1."""
        text = text.strip()
        if "·" in text:
            phase_str, _, letters = text.partition("·")
            if phase_str not in _STR_PHASE:
                raise ValidationError(f"bad phase token {phase_str!r}")
            return cls.from_letters(letters, _STR_PHASE[phase_str])
        return cls.from_letters(text)

    # -- algebra -----------------------------------------------------

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not isinstance(other, PauliString):
            return NotImplemented
        if self.n_qubits != other.n_qubits:
            raise DimensionError(
                f"qubit count mismatch: {self.n_qubits} vs {other.n_qubits}"
            )
        x3 = self.x ^ other.x
        z3 = self.z ^ other.z
        # i^(x1z1) X^x1 Z^z1 · i^(x2z2) X^x2 Z^z2, with Z^z1 X^x2 = (-1)^(z1&x2) X^x2 Z^z1
        e = (
            self.phase_pow
            + other.phase_pow
            + _popcount(self.x & self.z)
            + _popcount(other.x & other.z)
            + 2 * _popcount(self.z & other.x)
            - _popcount(x3 & z3)
        ) % 4
        return PauliString(self.n_qubits, x3, z3, e)

    def adjoint(self) -> "PauliString":
        # letters are Hermitian; only the scalar phase conjugates
        return PauliString(self.n_qubits, self.x, self.z, (-self.phase_pow) % 4)

    def phase_free(self) -> "PauliString":
        return PauliString(self.n_qubits, self.x, self.z, 0)

    def commutes_with(self, other: "PauliString") -> bool:
        return conjugate_sign(self, other) == 1

    # -- dense realization --------------------------------------------

    def to_matrix(self, max_qubits: int = MAX_DENSE_QUBITS) -> np.ndarray:
        if self.n_qubits > max_qubits:
            raise ResourceError(
                f"dense matrix for {self.n_qubits} qubits exceeds cap {max_qubits}"
            )
        d = 1 << self.n_qubits
        perm, phases = self._action(d)
        m = np.zeros((d, d), dtype=complex)
        m[perm, np.arange(d)] = phases
        return m

    def _action(self, d: int):
        """Columns of the matrix: P|b> = phases[b] |perm[b]>."""
        idx = np.arange(d, dtype=np.uint64)
        perm = (idx ^ np.uint64(self.x)).astype(np.intp)
        zpar = np.bitwise_count(idx & np.uint64(self.z)) & 1
        head = _PHASE_VALUE[(self.phase_pow + _popcount(self.x & self.z)) % 4]
        phases = head * np.where(zpar, -1.0, 1.0)
        return perm, phases


def multiply(a: PauliString, b: PauliString) -> PauliString:
    return a * b


def adjoint(a: PauliString) -> PauliString:
    return a.adjoint()


def conjugate_sign(g: PauliString, h: PauliString) -> int:
    """Sign s with g† h g = s·h; always ±1 for Pauli strings."""
    if g.n_qubits != h.n_qubits:
        raise DimensionError("qubit count mismatch")
    anti = (_popcount(g.x & h.z) + _popcount(g.z & h.x)) & 1
    return -1 if anti else 1


def product(factors, n_qubits: int) -> PauliString:
    """Ordered product of PauliStrings (left to right)."""
    return reduce(lambda a, b: a * b, factors, PauliString.identity(n_qubits))


def conjugate_matrix(g: PauliString, m: np.ndarray) -> np.ndarray:
    """g† m g as a signed row/column permutation of m, O(d^2).

    g must be phase-free; the scalar phase would cancel anyway.
    """
    d = m.shape[0]
    if m.shape != (d, d) or d != 1 << g.n_qubits:
        raise DimensionError("matrix dimension does not match qubit count")
    if g.x == 0 and g.z == 0:
        return m.copy()
    idx = np.arange(d, dtype=np.uint64)
    perm = (idx ^ np.uint64(g.x)).astype(np.intp)
    zpar = np.bitwise_count(idx & np.uint64(g.z)) & 1
    signs = np.where(zpar, -1.0, 1.0)
    return (signs[:, None] * signs[None, :]) * m[np.ix_(perm, perm)]


def pauli_trace(p: PauliString, m: np.ndarray) -> complex:
    """Trace(p · m) without forming the dense product."""
    d = m.shape[0]
    if d != 1 << p.n_qubits:
        raise DimensionError("matrix dimension does not match qubit count")
    idx = np.arange(d, dtype=np.uint64)
    perm = (idx ^ np.uint64(p.x)).astype(np.intp)
    zpar = np.bitwise_count(idx & np.uint64(p.z)) & 1
    signs = np.where(zpar, -1.0, 1.0)
    head = _PHASE_VALUE[(p.phase_pow + _popcount(p.x & p.z)) % 4]
    return head * np.sum(signs * m[idx.astype(np.intp), perm])


@dataclass
class PauliDecomposition:
    """Real-coefficient expansion of a Hermitian operator in Pauli strings."""

    n_qubits: int
    terms: dict = field(default_factory=dict)  # phase-free PauliString -> float

    def reconstruct(self) -> np.ndarray:
        d = 1 << self.n_qubits
        m = np.zeros((d, d), dtype=complex)
        for p, c in self.terms.items():
            m += c * p.to_matrix()
        return m

    def coefficient(self, p: PauliString) -> float:
        return self.terms.get(p.phase_free(), 0.0)

    def to_table(self) -> str:
        """Sorted text table 'coefficient pauli_string', largest first."""
        rows = sorted(self.terms.items(), key=lambda kv: -abs(kv[1]))
        return "\n".join(f"{c:+.12e} {p.letters}" for p, c in rows)


def decompose(h: np.ndarray, n_qubits: int, drop_tol: float = 1e-13) -> PauliDecomposition:
    """Expand a Hermitian matrix in the Pauli basis.

    Coefficient of string s is Trace(s·h)/2^n.  Terms with magnitude
    below drop_tol times the matrix scale are omitted.
    """
    d = 1 << n_qubits
    if h.shape != (d, d):
        raise ValidationError(f"expected {d}x{d} matrix for n={n_qubits}")
    scale = np.linalg.norm(h)
    if scale > 0 and np.linalg.norm(h - h.conj().T) > 1e-10 * scale:
        raise ValidationError("matrix is not Hermitian within tolerance")
    cutoff = drop_tol * scale
    terms = {}
    for x in range(1 << n_qubits):
        for z in range(1 << n_qubits):
            p = PauliString(n_qubits, x, z, 0)
            c = pauli_trace(p, h) / d
            if abs(c) > cutoff:
                terms[p] = float(c.real)
    return PauliDecomposition(n_qubits, terms)


def random_pauli(n_qubits: int, rng: np.random.Generator) -> PauliString:
    """Uniform product of independent letters {I, X, Y, Z} per qubit."""
    x = z = 0
    draws = rng.integers(0, 4, size=n_qubits)
    for j, k in enumerate(draws):
        xb, zb = ((0, 0), (1, 0), (1, 1), (0, 1))[k]
        bit = 1 << (n_qubits - 1 - j)
        x |= xb * bit
        z |= zb * bit
    return PauliString(n_qubits, x, z, 0)
