import pytest

from ddchain.config import parse_config, serialize_config
from ddchain.errors import ValidationError

GOOD = """\
[chain]
n_qubits = 4
coupling = 1.0
anisotropy = 5.0
frame = "rotating"

[run]
group = "collective"
delta_t = 0.05
horizon = 12.0
sampling = "per-cycle"
realizations = 20
seed = 99

[[protocol]]
name = "CDD"
cdd_level = 3

[[protocol]]
name = "SRPD"

[[protocol]]
name = "EMD-Pauli"
emd_border = "pauli"
"""


def test_parse_good_config():
    cfg = parse_config(GOOD)
    assert cfg.chain.n_qubits == 4
    assert cfg.chain.anisotropy == 5.0
    assert cfg.delta_t == 0.05
    assert cfg.n_steps == 240
    assert cfg.realizations == 20
    assert [p.protocol for p in cfg.protocols] == ["CDD", "SRPD", "EMD-Pauli"]
    assert cfg.protocols[0].cdd_level == 3
    assert cfg.protocols[1].seed == 99  # root seed propagates
    assert cfg.protocols[2].emd_border == "pauli"


def test_round_trip():
    cfg = parse_config(GOOD)
    assert parse_config(serialize_config(cfg)) == cfg


def test_round_trip_with_detunings_and_custom_group():
    text = """\
[chain]
n_qubits = 2
detunings = [0.125, -0.25]

[run]
group = "custom"
custom_elements = ["+1·II", "+1·XX"]
delta_t = 0.1
horizon = 1.0
seed = 7

[[protocol]]
name = "NRD"
"""
    cfg = parse_config(text)
    assert cfg.chain.detunings == (0.125, -0.25)
    assert cfg.custom_elements == ("+1·II", "+1·XX")
    assert parse_config(serialize_config(cfg)) == cfg


def test_unknown_keys_are_errors():
    with pytest.raises(ValidationError, match="unknown key"):
        parse_config(GOOD + "\n[chain2]\nx = 1\n")
    with pytest.raises(ValidationError, match="unknown key"):
        parse_config(GOOD.replace("coupling = 1.0", "coupling = 1.0\ntypo_key = 2"))
    with pytest.raises(ValidationError, match="unknown key"):
        parse_config(GOOD.replace("cdd_level = 3", "cdd_level = 3\nlevel = 3"))


def test_invalid_values_are_aggregated():
    bad = GOOD.replace('sampling = "per-cycle"', 'sampling = "sometimes"') \
              .replace("horizon = 12.0", "horizon = 12.03")
    with pytest.raises(ValidationError) as exc:
        parse_config(bad)
    msg = str(exc.value)
    assert "sampling" in msg and "horizon" in msg


def test_horizon_must_sit_on_grid():
    with pytest.raises(ValidationError, match="horizon"):
        parse_config(GOOD.replace("horizon = 12.0", "horizon = 12.07"))
    parse_config(GOOD.replace("horizon = 12.0", "horizon = 11.95"))  # 239 slots


def test_collective_group_needs_even_n():
    with pytest.raises(ValidationError, match="even"):
        parse_config(GOOD.replace("n_qubits = 4", "n_qubits = 3"))


def test_protocol_required():
    head = GOOD.split("[[protocol]]")[0]
    with pytest.raises(ValidationError, match="protocol"):
        parse_config(head)
    with pytest.raises(ValidationError, match="name"):
        parse_config(head + '[[protocol]]\nname = "XYZ"\n')


def test_not_toml():
    with pytest.raises(ValidationError, match="TOML"):
        parse_config("this is { not toml")
