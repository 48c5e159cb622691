import itertools

import numpy as np
import pytest
import scipy.linalg

from ddchain.aht import (
    CycleDescription,
    decay_bound,
    effective_hamiltonian,
    magnus0,
    magnus1,
    residual_terms,
)
from ddchain.errors import BranchAmbiguityError, ValidationError
from ddchain.groups import build_collective_group, build_nested_group
from ddchain.hamiltonian import ChainSpec, HamiltonianMatrix, build_rotating_frame
from ddchain.pauli import PauliString, random_pauli
from ddchain.schedules import schedule_cdd

P = PauliString.from_letters

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]])
_SZ = np.diag([1.0 + 0j, -1.0])


def _cycle(frames, delta_t, h):
    return CycleDescription(tuple(frames), delta_t, h)


def test_magnus0_free_is_h():
    h = build_rotating_frame(ChainSpec(2))
    c = _cycle([PauliString.identity(2)] * 4, 0.1, h)
    assert np.allclose(magnus0(c), h.matrix)


def test_magnus0_vanishes_over_decoupling_cycles():
    for n, build in ((4, build_collective_group), (4, build_nested_group),
                     (6, build_collective_group)):
        h = build_rotating_frame(ChainSpec(n, anisotropy=1.5))
        _, path = build(n)
        c = _cycle(path.frames, 0.01, h)
        assert np.linalg.norm(magnus0(c)) < 1e-12 * h.kappa


def test_magnus0_single_qubit_example():
    # frames {1, X} toggle H = Z to {Z, -Z}: the average vanishes
    h = HamiltonianMatrix(_SZ.copy(), 1)
    c = _cycle([P("I"), P("X")], 0.1, h)
    assert np.linalg.norm(magnus0(c)) < 1e-15


def test_magnus1_two_slot_example():
    # H = Z + X with frames {1, Z}: toggled pair (Z+X, Z-X), so
    # H1_bar = (-i dt^2 / 2*2dt) [H_2, H_1] = dt * Y exactly
    h = HamiltonianMatrix(_SZ + _SX, 1)
    dt = 0.05
    c = _cycle([P("I"), P("Z")], dt, h)
    assert np.allclose(magnus1(c), dt * _SY, atol=1e-15)


def test_magnus1_matches_matrix_log_to_second_order():
    # H_eff - H0_bar -> H1_bar as dt -> 0, with O(dt^2) remainder
    h = HamiltonianMatrix(_SZ + _SX, 1)
    rem = []
    for dt in (2e-3, 1e-3, 5e-4):
        c = _cycle([P("I"), P("Z")], dt, h)
        u = scipy.linalg.expm(-1j * dt * (_SZ - _SX)) @ \
            scipy.linalg.expm(-1j * dt * (_SZ + _SX))
        h_eff = effective_hamiltonian(u, 2 * dt)
        rem.append(np.linalg.norm(h_eff - magnus0(c) - magnus1(c)))
    assert rem[0] / rem[1] == pytest.approx(4.0, rel=0.05)
    assert rem[1] / rem[2] == pytest.approx(4.0, rel=0.05)


def test_magnus1_vanishes_for_palindromic_cycles():
    rng = np.random.default_rng(123)
    h = build_rotating_frame(ChainSpec(3, anisotropy=0.8))
    scale = h.kappa**2 * 1.0  # kappa^2 T_c with T_c ~ 1
    for _ in range(100):
        half = [random_pauli(3, rng).phase_free() for _ in range(rng.integers(1, 7))]
        frames = half + half[::-1]
        c = _cycle(frames, 1.0 / len(frames), h)
        assert np.linalg.norm(magnus1(c), 2) < 1e-12 * scale


def test_magnus1_norm_bound():
    # || H1_bar ||_2 <= kappa^2 T_c for any equal-slot cycle
    rng = np.random.default_rng(7)
    h = build_rotating_frame(ChainSpec(3))
    for _ in range(25):
        m = int(rng.integers(2, 9))
        frames = [random_pauli(3, rng).phase_free() for _ in range(m)]
        dt = float(rng.uniform(0.01, 0.2))
        c = _cycle(frames, dt, h)
        assert np.linalg.norm(magnus1(c), 2) <= h.kappa**2 * c.cycle_time


def test_effective_hamiltonian_inverts_exponential():
    h = build_rotating_frame(ChainSpec(2))
    u = scipy.linalg.expm(-1j * 0.2 * h.matrix)
    h_eff = effective_hamiltonian(u, 0.2)
    assert np.linalg.norm(h_eff - h.matrix) < 1e-10
    assert np.linalg.norm(effective_hamiltonian(np.eye(4, dtype=complex), 1.0)) < 1e-12


def test_effective_hamiltonian_branch_guard():
    u = np.diag([np.exp(1j * (np.pi - 1e-9)), 1.0])
    with pytest.raises(BranchAmbiguityError):
        effective_hamiltonian(u, 1.0)
    with pytest.raises(ValidationError):
        effective_hamiltonian(np.array([[2.0, 0], [0, 1.0]], dtype=complex), 1.0)
    with pytest.raises(ValidationError):
        effective_hamiltonian(np.eye(2, dtype=complex), 0.0)


def test_residual_terms_free_evolution():
    h = build_rotating_frame(ChainSpec(2, anisotropy=0.5))
    dec = residual_terms(h.matrix, 2, kappa=h.kappa)
    assert dec.terms[P("XX")] == pytest.approx(1.0)
    assert dec.terms[P("YY")] == pytest.approx(1.0)
    assert dec.terms[P("ZZ")] == pytest.approx(0.5)
    assert len(dec.terms) == 3


def test_residual_terms_threshold():
    m = 0.5 * P("XI").to_matrix() + 1e-14 * P("IZ").to_matrix()
    dec = residual_terms(m, 2, threshold=1e-9)
    assert set(dec.terms) == {P("XI")}


def test_sdd_halves_slot_size_in_residual():
    # the SDD effective Hamiltonian residual shrinks ~4x when dt halves
    h = build_rotating_frame(ChainSpec(4))
    _, path = build_collective_group(4)
    norms = []
    for dt in (0.02, 0.01):
        frames = path.frames + tuple(reversed(path.frames))
        c = _cycle(frames, dt, h)
        u = np.eye(16, dtype=complex)
        for hk in c.toggled():
            u = scipy.linalg.expm(-1j * dt * hk) @ u
        norms.append(np.linalg.norm(effective_hamiltonian(u, c.cycle_time), 2))
    assert norms[0] / norms[1] == pytest.approx(4.0, rel=0.1)


def test_cdd_level2_cancels_first_order():
    # level-1 leaves a first-order term; level-2 removes it as well
    h = build_rotating_frame(ChainSpec(4))
    _, path = build_collective_group(4)
    dt = 0.01
    norms = {}
    for level in (1, 2):
        frames = tuple(itertools.islice(schedule_cdd(path, dt, level).frames(),
                                        4**level))
        c = _cycle(frames, dt, h)
        assert np.linalg.norm(magnus0(c)) < 1e-12 * h.kappa
        norms[level] = np.linalg.norm(magnus1(c), 2)
    assert norms[1] > 1e-4
    assert norms[2] < 1e-12 * h.kappa**2


def test_decay_bound_arithmetic():
    assert decay_bound("PDD", 3.0, 0.1, 4, 1.0) == pytest.approx(9 * 0.4**2)
    assert decay_bound("SDD", 3.0, 0.1, 4, 1.0) == pytest.approx(9 * 0.4**4)
    assert decay_bound("NRD", 3.0, 0.1, 4, 1.0) == pytest.approx(3 * 0.1)
    assert decay_bound("SRPD", 3.0, 0.1, 4, 2.0) == \
        pytest.approx(3 * 0.4**5 * 2.0**6)
    assert decay_bound("EMD-G", 3.0, 0.1, 4, 1.0) == \
        decay_bound("RPD", 3.0, 0.1, 4, 1.0)
    assert decay_bound("pRPD", 3.0, 0.1, 4, 1.0) == \
        decay_bound("RPD", 3.0, 0.1, 4, 1.0)
    with pytest.raises(ValidationError):
        decay_bound("FREE", 1.0, 0.1, 4, 1.0)


def test_decay_bound_hierarchy():
    # for kappa*T_c < 1 the higher-order protocols promise smaller decay
    args = (2.0, 0.05, 4, 1.0)
    assert decay_bound("SDD", *args) < decay_bound("PDD", *args)
    assert decay_bound("SRPD", *args) < decay_bound("RPD", *args)


def test_cycle_description_validation():
    h = build_rotating_frame(ChainSpec(2))
    with pytest.raises(ValidationError):
        CycleDescription((), 0.1, h)
    with pytest.raises(ValidationError):
        CycleDescription((PauliString(2, 1, 0, 1),), 0.1, h)
