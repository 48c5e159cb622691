import itertools

import numpy as np
import pytest

from ddchain.errors import ValidationError
from ddchain.groups import (
    DecouplingGroup,
    PulsePath,
    build_collective_group,
    build_nested_group,
    group_average,
    path_table,
    q_r_counts,
)
from ddchain.hamiltonian import ChainSpec, build_rotating_frame
from ddchain.pauli import PauliString

P = PauliString.from_letters

# Reference traversal for two controlled qubits, 16 columns.
M_MATRIX_M2 = ("I Z X Y Y X Z I I Z X Y Y X Z I\n"
               "I I I I Z Z Z Z Y Y Y Y X X X X")


def test_nested_m2_path_matrix():
    _, path = build_nested_group(4)
    assert path_table(path) == M_MATRIX_M2


def test_nested_m2_path_matrix_odd_chain():
    # N = 5 has the same two controlled qubits
    _, path = build_nested_group(5)
    assert path_table(path) == M_MATRIX_M2


def test_nested_m1_path():
    _, path = build_nested_group(2)
    assert path_table(path) == "I Z X Y"
    assert [f.letters for f in path.frames] == ["II", "IZ", "IX", "IY"]


def test_nested_sizes_and_identity_head():
    for n in (2, 3, 4, 5, 6, 8):
        group, path = build_nested_group(n)
        assert len(group) == 4 ** (n // 2)
        assert group.elements[0].is_identity
        assert path.frames[0].is_identity
        assert group.is_closed()


def test_nested_acts_on_even_qubits_only():
    group, _ = build_nested_group(6)
    for g in group.elements:
        assert all(g.letters[j] == "I" for j in (0, 2, 4))
    # all 4^3 assignments over qubits (1, 3, 5) appear
    assert {tuple(g.letters[j] for j in (1, 3, 5)) for g in group.elements} == set(
        itertools.product("IZXY", repeat=3))


def test_gray_property_single_qubit_pulses():
    # every pulse along the nested path touches exactly one qubit
    for n in (2, 4, 6, 8):
        _, path = build_nested_group(n)
        for p in path.pulses[:-1]:  # the closing pulse may be multi-qubit
            letters = p.phase_free().letters
            assert sum(c != "I" for c in letters) == 1


def test_pulses_telescope_to_frames():
    for build, n in ((build_nested_group, 4), (build_collective_group, 4)):
        _, path = build(n)
        f = PauliString.identity(n)
        for k, p in enumerate(path.pulses):
            f = (p * f).phase_free()
            expected = path.frames[(k + 1) % len(path.frames)]
            assert f == expected


def test_collective_elements():
    group, path = build_collective_group(4)
    assert [g.letters for g in group.elements] == ["IIII", "ZIZI", "ZYZY", "IYIY"]
    assert group.is_closed()
    # pulses alternate Z on odd (1-based) and Y on even (1-based) qubits
    assert [p.phase_free().letters for p in path.pulses] == [
        "ZIZI", "IYIY", "ZIZI", "IYIY"]


def test_collective_requires_even_n():
    with pytest.raises(ValidationError):
        build_collective_group(3)


def test_group_validation():
    with pytest.raises(ValidationError):
        DecouplingGroup((P("X"),), 1, "bad")  # no identity head
    with pytest.raises(ValidationError):
        DecouplingGroup((P("I"), P("X"), P("X")), 1, "dup")
    with pytest.raises(ValidationError):
        PulsePath(build_collective_group(2)[0], (0, 1, 1, 2))


def test_group_average_annihilates_chain():
    for n, build in ((4, build_nested_group), (4, build_collective_group),
                     (6, build_nested_group), (6, build_collective_group)):
        h = build_rotating_frame(ChainSpec(n, anisotropy=1.0))
        avg = group_average(build(n)[0], h)
        assert np.linalg.norm(avg) < 1e-12 * h.kappa


def test_group_average_idempotent():
    group, _ = build_nested_group(4)
    rng = np.random.default_rng(1)
    a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    once = group_average(group, a)
    twice = group_average(group, once)
    assert np.allclose(once, twice, atol=1e-12)


def test_group_average_matches_brute_force():
    group, _ = build_collective_group(4)
    rng = np.random.default_rng(2)
    a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    brute = sum(g.to_matrix().conj().T @ a @ g.to_matrix()
                for g in group.elements) / len(group)
    assert np.allclose(group_average(group, a), brute, atol=1e-12)


def test_q_r_counts_against_enumeration():
    for m in (1, 2, 3, 4):
        group, _ = build_nested_group(2 * m)
        weights = [sum(c != "I" for c in g.letters) for g in group.elements]
        enumerated = tuple(weights.count(r) for r in range(m + 1))
        qr = q_r_counts(m)
        assert qr.counts == enumerated
        assert qr.total == 4**m


def test_q_r_maxima():
    assert q_r_counts(3).counts == (1, 9, 27, 27)
    assert q_r_counts(3).maxima == (2, 3)
    assert q_r_counts(4).counts == (1, 12, 54, 108, 81)
    assert q_r_counts(4).maxima == (3,)
    with pytest.raises(ValidationError):
        q_r_counts(0)
