import numpy as np
import pytest
import scipy.linalg

from ddchain.errors import ValidationError
from ddchain.fidelity import (
    EnsembleResult,
    EnsembleTask,
    derived_seed,
    entanglement_fidelity,
    fit_decay_exponent,
    loglog_slope,
    merge_results,
    pure_state_fidelity,
    read_csv,
    run_ensemble,
    run_realization,
    write_csv,
)
from ddchain.hamiltonian import ChainSpec, build_rotating_frame
from ddchain.schedules import ProtocolConfig


def _task(protocol, n=2, delta_t=0.1, n_steps=40, stride=4, realizations=8,
          seed=2024, group="collective", **kw):
    cfg = ProtocolConfig(protocol, seed=seed, **kw) \
        if protocol not in ("FREE", "PDD", "SDD", "CDD") else ProtocolConfig(protocol, **kw)
    samples = tuple(range(0, n_steps + 1, stride))
    return EnsembleTask(chain=ChainSpec(n), protocol=cfg, delta_t=delta_t,
                        n_steps=n_steps, sample_steps=samples,
                        realizations=realizations, root_seed=seed, group=group)


def test_entanglement_fidelity_basics():
    assert entanglement_fidelity(np.eye(4, dtype=complex)) == pytest.approx(1.0)
    assert entanglement_fidelity(1j * np.eye(4)) == pytest.approx(1.0)  # phase-blind
    assert entanglement_fidelity(np.diag([1, 1, 1, -1]).astype(complex)) == \
        pytest.approx(0.25)
    with pytest.raises(ValidationError):
        entanglement_fidelity(2 * np.eye(2, dtype=complex))


def test_free_evolution_fidelity_analytic():
    # two-site isotropic chain: F_e(t) = (10 + 6 cos 4t) / 16
    h = build_rotating_frame(ChainSpec(2))
    for t in (0.3, np.pi / 8, np.pi / 4, 1.7):
        u = scipy.linalg.expm(-1j * t * h.matrix)
        expected = (10 + 6 * np.cos(4 * t)) / 16
        assert entanglement_fidelity(u) == pytest.approx(expected, abs=1e-12)
    u = scipy.linalg.expm(-1j * (np.pi / 4) * h.matrix)
    assert entanglement_fidelity(u) == pytest.approx(0.25, abs=1e-12)


def test_pure_state_fidelity():
    u = np.diag([1.0, -1.0]).astype(complex)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert pure_state_fidelity(u, plus) == pytest.approx(0.0, abs=1e-12)
    assert pure_state_fidelity(u, [1, 0]) == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        pure_state_fidelity(u, [1, 1])


def test_derived_seeds_are_distinct_and_stable():
    seeds = [derived_seed(77, r) for r in range(100)]
    assert len(set(seeds)) == 100
    assert seeds == [derived_seed(77, r) for r in range(100)]
    assert derived_seed(78, 0) != seeds[0]


def test_deterministic_protocol_zero_variance():
    res = run_ensemble(_task("PDD", realizations=5))
    assert res.realizations == 5
    assert all(s < 1e-15 for s in res.stderr)  # identical tiled realizations
    assert np.allclose(res.mean, res.minimum, atol=1e-15)
    assert np.allclose(res.mean, res.maximum, atol=1e-15)
    assert res.times[0] == 0.0 and res.mean[0] == pytest.approx(1.0)


def test_stochastic_realizations_differ_but_replay_exactly():
    task = _task("NRD", realizations=6)
    a = run_ensemble(task)
    b = run_ensemble(task)
    assert np.array_equal(a.samples, b.samples)
    assert np.ptp(a.samples[:, -1]) > 0  # realizations genuinely differ
    assert all(a.minimum[i] <= a.mean[i] <= a.maximum[i]
               for i in range(len(a.times)))


def test_batched_blocks_match_serial_realizations():
    task = _task("SRPD", n=3, group="nested", realizations=4, n_steps=32)
    batched = run_ensemble(task)
    for r in range(4):
        serial = run_realization(task, r)
        assert np.allclose(batched.samples[r], serial, atol=1e-12)


def test_root_seed_controls_the_ensemble():
    a = run_ensemble(_task("NRD", seed=1, realizations=4))
    b = run_ensemble(_task("NRD", seed=2, realizations=4))
    assert not np.array_equal(a.samples, b.samples)


def test_merge_results():
    t1 = _task("NRD", realizations=3)
    full = run_ensemble(_task("NRD", realizations=6))
    # realizations r are seeded by index, so 0..2 + continuation disagrees;
    # merging is for independently seeded halves
    half = run_ensemble(t1)
    merged = merge_results(half, half)
    assert merged.realizations == 6
    assert merged.times == half.times
    assert np.allclose(merged.mean, half.mean)
    assert np.all(np.asarray(merged.stderr) <= np.asarray(half.stderr) + 1e-15)
    with pytest.raises(ValidationError):
        merge_results(half, full_with_other_grid := run_ensemble(
            _task("NRD", realizations=3, stride=5)))


def test_stderr_definition():
    samples = np.array([[0.2], [0.4], [0.9]])
    res = EnsembleResult.from_samples((1.0,), samples, 0, "NRD")
    assert res.mean[0] == pytest.approx(0.5)
    assert res.stderr[0] == pytest.approx(np.std(samples, ddof=1) / np.sqrt(3))
    assert res.minimum[0] == 0.2 and res.maximum[0] == 0.9


def test_fit_decay_exponent_on_synthetic_power_law():
    times = tuple(np.linspace(0.5, 4.0, 12))
    mean = tuple(1.0 - 1e-3 * t**2 for t in times)
    res = EnsembleResult(times=times, mean=mean,
                         stderr=(1e-9,) * 12, minimum=mean, maximum=mean,
                         realizations=10, root_seed=0, protocol="PDD",
                         samples=np.array([mean]))
    slope, err = fit_decay_exponent(res, (0.4, 4.1))
    assert slope == pytest.approx(2.0, abs=1e-6)
    with pytest.raises(ValidationError):
        fit_decay_exponent(res, (3.9, 4.1))  # too few usable points


def test_fit_rejects_noise_dominated_samples():
    times = tuple(np.linspace(0.5, 4.0, 12))
    mean = tuple(1.0 - 1e-12 * t for t in times)
    res = EnsembleResult(times=times, mean=mean, stderr=(1e-9,) * 12,
                         minimum=mean, maximum=mean, realizations=10,
                         root_seed=0, protocol="NRD", samples=np.array([mean]))
    with pytest.raises(ValidationError):
        fit_decay_exponent(res, (0.0, 5.0))


def test_loglog_slope():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    slope, err = loglog_slope(x, 3.0 * x**1.5)
    assert slope == pytest.approx(1.5, abs=1e-12)
    assert err == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ValidationError):
        loglog_slope([1.0], [1.0])


def test_csv_round_trip(tmp_path):
    res = run_ensemble(_task("NRD", realizations=3))
    p = tmp_path / "out.csv"
    meta = {"protocol": "NRD", "seed": "2024", "realizations": "3"}
    write_csv(p, res, meta)
    meta2, cols = read_csv(p)
    assert meta2 == meta
    assert np.array_equal(cols["t"], np.array(res.times))
    assert np.array_equal(cols["mean"], np.array(res.mean))
    assert np.array_equal(cols["stderr"], np.array(res.stderr))
    assert np.array_equal(cols["min"], np.array(res.minimum))
    assert np.array_equal(cols["max"], np.array(res.maximum))
    # repr floats survive a second round trip byte-for-byte
    p2 = tmp_path / "again.csv"
    res2 = EnsembleResult(times=tuple(cols["t"]), mean=tuple(cols["mean"]),
                          stderr=tuple(cols["stderr"]), minimum=tuple(cols["min"]),
                          maximum=tuple(cols["max"]), realizations=3,
                          root_seed=2024, protocol="NRD", samples=res.samples)
    write_csv(p2, res2, meta)
    assert p.read_text() == p2.read_text()


def test_task_validation():
    with pytest.raises(ValidationError):
        _task("NRD", realizations=0)
    with pytest.raises(ValidationError):
        _task("NRD", n_steps=0, stride=1)
