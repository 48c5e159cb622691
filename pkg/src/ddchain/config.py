"""Experiment configuration: a strict TOML file with nested sections.

Layout:

    [chain]
    n_qubits = 4
    coupling = 1.0
    anisotropy = 1.0
    detunings = [0.0, 0.0, 0.0, 0.0]   # optional, defaults to zeros
    frame = "rotating"                  # or "lab"
    omega = 0.0                         # lab frame only

    [run]
    group = "collective"                # nested | collective | custom | trivial
    custom_elements = []                # Pauli strings, for group = "custom"
    delta_t = 0.1
    horizon = 40.0                      # must be a multiple of delta_t
    sampling = "per-cycle"              # per-cycle | intra-cycle
    realizations = 100
    seed = 12345

    [[protocol]]
    name = "PDD"
    # cdd_level, switch_level, emd_border where relevant

Unknown keys anywhere are errors, never silently ignored.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field

from .errors import ValidationError
from .hamiltonian import ChainSpec
from .schedules import PROTOCOLS, ProtocolConfig

_CHAIN_KEYS = {"n_qubits", "coupling", "anisotropy", "detunings", "frame", "omega"}
_RUN_KEYS = {"group", "custom_elements", "delta_t", "horizon", "sampling",
             "realizations", "seed"}
_PROTOCOL_KEYS = {"name", "cdd_level", "switch_level", "emd_border"}


@dataclass(frozen=True)
class ExperimentConfig:
    chain: ChainSpec
    frame: str
    omega: float
    group: str
    custom_elements: tuple
    delta_t: float
    horizon: float
    sampling: str
    realizations: int
    seed: int
    protocols: tuple  # of ProtocolConfig

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.delta_t))


def _check_keys(section: str, mapping: dict, allowed: set):
    unknown = set(mapping) - allowed
    if unknown:
        raise ValidationError(
            f"unknown key(s) {sorted(unknown)} in [{section}]"
        )


def parse_config(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"config is not valid TOML: {exc}") from exc
    _check_keys("<root>", data, {"chain", "run", "protocol"})
    problems = []

    chain_raw = data.get("chain", {})
    _check_keys("chain", chain_raw, _CHAIN_KEYS)
    run_raw = data.get("run", {})
    _check_keys("run", run_raw, _RUN_KEYS)

    chain = ChainSpec(
        n_qubits=int(chain_raw.get("n_qubits", 2)),
        coupling=float(chain_raw.get("coupling", 1.0)),
        anisotropy=float(chain_raw.get("anisotropy", 1.0)),
        detunings=tuple(float(v) for v in chain_raw.get("detunings", ())),
    )
    frame = chain_raw.get("frame", "rotating")
    if frame not in ("rotating", "lab"):
        problems.append(f"chain.frame must be 'rotating' or 'lab', got {frame!r}")

    delta_t = float(run_raw.get("delta_t", 0.1))
    horizon = float(run_raw.get("horizon", 1.0))
    sampling = run_raw.get("sampling", "per-cycle")
    group = run_raw.get("group", "collective")
    if delta_t <= 0:
        problems.append("run.delta_t must be positive")
    elif abs(horizon / delta_t - round(horizon / delta_t)) > 1e-9 or horizon <= 0:
        problems.append("run.horizon must be a positive multiple of run.delta_t")
    if sampling not in ("per-cycle", "intra-cycle"):
        problems.append(f"run.sampling must be 'per-cycle' or 'intra-cycle', got {sampling!r}")
    if group not in ("nested", "collective", "custom", "trivial"):
        problems.append(f"run.group must be nested/collective/custom/trivial, got {group!r}")
    if group == "collective" and chain.n_qubits % 2:
        problems.append("run.group 'collective' requires even n_qubits")
    if group == "custom" and not run_raw.get("custom_elements"):
        problems.append("run.group 'custom' requires run.custom_elements")

    seed = int(run_raw.get("seed", 0))
    protocols = []
    for i, praw in enumerate(data.get("protocol", [])):
        _check_keys(f"protocol[{i}]", praw, _PROTOCOL_KEYS)
        name = praw.get("name")
        if name not in PROTOCOLS:
            problems.append(f"protocol[{i}].name must be one of {PROTOCOLS}, got {name!r}")
            continue
        protocols.append(ProtocolConfig(
            protocol=name,
            cdd_level=int(praw.get("cdd_level", 1)),
            hybrid_switch_level=int(praw.get("switch_level", 3)),
            emd_border=praw.get("emd_border", "group"),
            seed=seed,  # root seed; per-realization seeds are derived from it
        ))
    if not protocols and not problems:
        problems.append("at least one [[protocol]] section is required")

    if problems:
        raise ValidationError("invalid config:\n  - " + "\n  - ".join(problems))

    return ExperimentConfig(
        chain=chain, frame=frame, omega=float(chain_raw.get("omega", 0.0)),
        group=group,
        custom_elements=tuple(run_raw.get("custom_elements", ())),
        delta_t=delta_t, horizon=horizon, sampling=sampling,
        realizations=int(run_raw.get("realizations", 1)), seed=seed,
        protocols=tuple(protocols),
    )


def serialize_config(cfg: ExperimentConfig) -> str:
    """Emit TOML that parse_config maps back onto an equal config."""
    lines = ["[chain]",
             f"n_qubits = {cfg.chain.n_qubits}",
             f"coupling = {cfg.chain.coupling!r}",
             f"anisotropy = {cfg.chain.anisotropy!r}"]
    if cfg.chain.detunings:
        lines.append("detunings = [" + ", ".join(repr(v) for v in cfg.chain.detunings) + "]")
    lines += [f'frame = "{cfg.frame}"', f"omega = {cfg.omega!r}", "",
              "[run]",
              f'group = "{cfg.group}"']
    if cfg.custom_elements:
        lines.append("custom_elements = ["
                     + ", ".join(f'"{s}"' for s in cfg.custom_elements) + "]")
    lines += [f"delta_t = {cfg.delta_t!r}",
              f"horizon = {cfg.horizon!r}",
              f'sampling = "{cfg.sampling}"',
              f"realizations = {cfg.realizations}",
              f"seed = {cfg.seed}"]
    for p in cfg.protocols:
        lines += ["", "[[protocol]]", f'name = "{p.protocol}"']
        if p.protocol == "CDD":
            lines.append(f"cdd_level = {p.cdd_level}")
        if p.protocol == "HYBRID":
            lines.append(f"switch_level = {p.hybrid_switch_level}")
        if p.protocol.startswith("EMD"):
            lines.append(f'emd_border = "{p.emd_border}"')
    return "\n".join(lines) + "\n"


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())
