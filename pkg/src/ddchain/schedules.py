"""Control schedules for the decoupling protocols.

Every protocol is reduced to a single primitive: a stream of logical
frames, one per free-evolution slot of length delta_t.  The frame of
slot k is the cumulative product of all pulses applied at times <= t_k,
so the pulse emitted at t_k is simply f_k · f_{k-1}† with exact phase
tracking, and telescoping makes the frame bookkeeping self-consistent
for deterministic, random and hybrid schemes alike.

Deterministic protocols start pulsing at t_1 (frame of slot 0 is the
identity); NRD draws a frame already at t_0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ResourceError, ValidationError
from .groups import DecouplingGroup, PulsePath
from .pauli import PauliString, random_pauli

CDD_EVENT_CAP = 4**10

PROTOCOLS = (
    "FREE",
    "PDD",
    "SDD",
    "CDD",
    "NRD",
    "RPD",
    "pRPD",
    "SRPD",
    "EMD-G",
    "EMD-Pauli",
    "HYBRID",
)

DETERMINISTIC = {"FREE", "PDD", "SDD", "CDD"}


@dataclass(frozen=True)
class ScheduleEvent:
    k: int
    time: float
    pulse: PauliString
    frame_after: PauliString


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything needed to rebuild one protocol's schedule."""

    protocol: str
    cdd_level: int = 1
    hybrid_switch_level: int = 3
    seed: int | None = None
    emd_border: str = "group"  # "group" | "pauli"

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValidationError(f"unknown protocol {self.protocol!r}")
        if self.cdd_level < 1:
            raise ValidationError("cdd_level must be >= 1")
        if self.hybrid_switch_level < 1:
            raise ValidationError("hybrid_switch_level must be >= 1")
        if self.emd_border not in ("group", "pauli"):
            raise ValidationError("emd_border must be 'group' or 'pauli'")
        if self.protocol not in DETERMINISTIC and self.seed is None:
            raise ValidationError(f"{self.protocol} requires a seed")


class Schedule:
    """Replayable stream of (interval, pulse) events.

    frames() and events() return fresh iterators; for seeded protocols
    each call replays the identical realization.
    """

    def __init__(self, protocol, delta_t, n_qubits, group_label, frame_factory,
                 seed=None, cycle_slots=None, n_events=None):
        if delta_t <= 0:
            raise ValidationError("delta_t must be positive")
        self.protocol = protocol
        self.delta_t = delta_t
        self.n_qubits = n_qubits
        self.group_label = group_label
        self.seed = seed
        self.cycle_slots = cycle_slots  # slots per cycle for cyclic protocols
        self.n_events = n_events  # finite horizon, None when unbounded
        self._frame_factory = frame_factory

    def frames(self):
        return self._frame_factory()

    def events(self):
        prev = PauliString.identity(self.n_qubits)
        for k, f in enumerate(self.frames()):
            pulse = f * prev.adjoint()
            yield ScheduleEvent(k, k * self.delta_t, pulse, f)
            prev = f


def _cycle_factory(frames_tuple):
    def factory():
        return itertools.cycle(frames_tuple)

    return factory


def schedule_free(n_qubits: int, delta_t: float) -> Schedule:
    """No pulses at all; every slot keeps the identity frame."""
    ident = (PauliString.identity(n_qubits),)
    return Schedule("FREE", delta_t, n_qubits, "trivial",
                    _cycle_factory(ident), cycle_slots=1)


def schedule_pdd(path: PulsePath, delta_t: float) -> Schedule:
    frames = path.frames
    return Schedule("PDD", delta_t, path.group.n_qubits, path.group.label,
                    _cycle_factory(frames), cycle_slots=len(frames))


def schedule_sdd(path: PulsePath, delta_t: float) -> Schedule:
    """Time-symmetrized path: forward then backward, cycle 2|G| delta_t.

    The repeated middle and boundary elements yield identity pulses, so
    those slot pairs merge into 2*delta_t of free evolution.
    """
    forward = path.frames
    frames = forward + tuple(reversed(forward))
    return Schedule("SDD", delta_t, path.group.n_qubits, path.group.label,
                    _cycle_factory(frames), cycle_slots=len(frames))


def _cdd_frames(path: PulsePath, level: int, cap: int = CDD_EVENT_CAP):
    m = len(path.group)
    if m**level > cap:
        raise ResourceError(
            f"CDD level {level} needs {m**level} slots, above the cap {cap}"
        )
    base = list(path.pulses)
    pulses = base
    for _ in range(level - 1):
        nxt = []
        for p_k in base:
            block = pulses[:-1] + [(p_k * pulses[-1]).phase_free()]
            nxt.extend(block)
        pulses = nxt
    frames = []
    f = PauliString.identity(path.group.n_qubits)
    for p in pulses:
        frames.append(f)
        f = (p * f).phase_free()
    assert f.is_identity, "CDD cycle must telescope back to the identity frame"
    return tuple(frames)


def schedule_cdd(path: PulsePath, delta_t: float, level: int,
                 cap: int = CDD_EVENT_CAP) -> Schedule:
    """Concatenated sequence C_{l+1} = C_l P_1 C_l P_2 ... C_l P_M.

    Level 1 is the generating PDD cycle; adjacent pulses from the
    recursion are composed into a single Pauli.
    """
    if level < 1:
        raise ValidationError("CDD level must be >= 1")
    frames = _cdd_frames(path, level, cap)
    return Schedule("CDD", delta_t, path.group.n_qubits, path.group.label,
                    _cycle_factory(frames), cycle_slots=len(frames))


def schedule_nrd(group: DecouplingGroup, delta_t: float, seed: int) -> Schedule:
    """Uniform independent frame at every t_n, t_0 included; acyclic."""
    elements = group.elements

    def factory():
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        while True:
            yield elements[rng.integers(len(elements))]

    return Schedule("NRD", delta_t, group.n_qubits, group.label, factory, seed=seed)


def _rpd_frames(path, seed, pseudo, symmetric):
    elements = path.group.elements
    m = len(elements)

    def factory():
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        while True:
            if pseudo:
                perm = np.concatenate(([0], rng.permutation(np.arange(1, m))))
            else:
                perm = rng.permutation(m)
            forward = [elements[i] for i in perm]
            yield from forward
            if symmetric:
                yield from reversed(forward)

    return factory


def schedule_rpd(path: PulsePath, delta_t: float, seed: int,
                 pseudo: bool = False, symmetric: bool = False) -> Schedule:
    """Random-path family: RPD, pRPD (first element fixed to the identity)
    and SRPD (forward-then-backward traversal, super-cycle 2|G| delta_t)."""
    name = "SRPD" if symmetric else ("pRPD" if pseudo else "RPD")
    m = len(path.group)
    return Schedule(name, delta_t, path.group.n_qubits, path.group.label,
                    _rpd_frames(path, seed, pseudo, symmetric), seed=seed,
                    cycle_slots=2 * m if symmetric else m)


def schedule_emd(path: PulsePath, delta_t: float, seed: int,
                 border_set: str = "group") -> Schedule:
    """Fixed inner PDD path with a random bordering pulse at every T_n.

    border_set "group" draws from the decoupling group itself; "pauli"
    draws an independent uniform letter per qubit.
    """
    if border_set not in ("group", "pauli"):
        raise ValidationError("border_set must be 'group' or 'pauli'")
    inner = path.frames
    elements = path.group.elements
    n = path.group.n_qubits

    def factory():
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        border = PauliString.identity(n)
        while True:
            for g in inner:
                yield (g * border).phase_free()
            if border_set == "group":
                draw = elements[rng.integers(len(elements))]
            else:
                draw = random_pauli(n, rng)
            border = (draw * border).phase_free()

    name = "EMD-G" if border_set == "group" else "EMD-Pauli"
    return Schedule(name, delta_t, n, path.group.label, factory, seed=seed,
                    cycle_slots=len(inner))


def schedule_hybrid(path: PulsePath, delta_t: float, seed: int,
                    switch_level: int = 3) -> Schedule:
    """CDD until |G|^switch_level slots, then SRPD super-cycles.

    The CDD prefix telescopes back to the identity frame, so SRPD starts
    from a fresh frame; the generic pulse rule supplies the composed
    switching pulse at the boundary.
    """
    cdd_prefix = _cdd_frames(path, switch_level)
    srpd = _rpd_frames(path, seed, pseudo=False, symmetric=True)

    def factory():
        return itertools.chain(cdd_prefix, srpd())

    return Schedule("HYBRID", delta_t, path.group.n_qubits, path.group.label,
                    factory, seed=seed)


def make_schedule(config: ProtocolConfig, group: DecouplingGroup,
                  path: PulsePath, delta_t: float) -> Schedule:
    p = config.protocol
    if p == "FREE":
        return schedule_free(group.n_qubits, delta_t)
    if p == "PDD":
        return schedule_pdd(path, delta_t)
    if p == "SDD":
        return schedule_sdd(path, delta_t)
    if p == "CDD":
        return schedule_cdd(path, delta_t, config.cdd_level)
    if p == "NRD":
        return schedule_nrd(group, delta_t, config.seed)
    if p == "RPD":
        return schedule_rpd(path, delta_t, config.seed)
    if p == "pRPD":
        return schedule_rpd(path, delta_t, config.seed, pseudo=True)
    if p == "SRPD":
        return schedule_rpd(path, delta_t, config.seed, symmetric=True)
    if p == "EMD-G":
        return schedule_emd(path, delta_t, config.seed, "group")
    if p == "EMD-Pauli":
        return schedule_emd(path, delta_t, config.seed, "pauli")
    if p == "HYBRID":
        return schedule_hybrid(path, delta_t, config.seed,
                               config.hybrid_switch_level)
    raise ValidationError(f"unknown protocol {p!r}")


def derandomize(schedule: Schedule, n_events: int) -> Schedule:
    """Freeze the first n_events of a realized schedule for exact replay.

    The frozen schedule carries no rng; replaying it yields bit-identical
    events (and hence bit-identical propagators).
    """
    if n_events < 1:
        raise ValidationError("a finite positive horizon is required")
    frames = tuple(itertools.islice(schedule.frames(), n_events))
    if len(frames) < n_events:
        raise ValidationError("schedule ended before the requested horizon")
    return Schedule(schedule.protocol, schedule.delta_t, schedule.n_qubits,
                    schedule.group_label, lambda: iter(frames), seed=None,
                    cycle_slots=schedule.cycle_slots, n_events=n_events)


# -- plain-text export ---------------------------------------------------


def export_schedule(schedule: Schedule, n_events: int) -> str:
    """Render events as 'k t_k pulse_string frame_string' lines.

    The header records protocol, delta_t, seed and group; floats are
    written with repr so the round-trip is bit-exact.
    """
    lines = [
        f"# protocol: {schedule.protocol}",
        f"# delta_t: {schedule.delta_t!r}",
        f"# seed: {'none' if schedule.seed is None else schedule.seed}",
        f"# group: {schedule.group_label}",
        f"# n_qubits: {schedule.n_qubits}",
    ]
    for ev in itertools.islice(schedule.events(), n_events):
        lines.append(f"{ev.k} {ev.k * schedule.delta_t!r} {ev.pulse} {ev.frame_after}")
    return "\n".join(lines) + "\n"


def import_schedule(text: str) -> Schedule:
    """Parse the export format back into a frozen, replayable schedule."""
    header = {}
    frames = []
    n_qubits = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValidationError(f"line {lineno}: expected 'k t pulse frame'")
        frames.append(PauliString.parse(parts[3]))
    for key in ("protocol", "delta_t", "n_qubits", "group"):
        if key not in header:
            raise ValidationError(f"missing header field '{key}'")
    n_qubits = int(header["n_qubits"])
    if any(f.n_qubits != n_qubits for f in frames):
        raise ValidationError("frame width does not match the n_qubits header")
    seed = None if header.get("seed", "none") == "none" else int(header["seed"])
    frames = tuple(f.phase_free() for f in frames)
    return Schedule(header["protocol"], float(header["delta_t"]), n_qubits,
                    header["group"], lambda: iter(frames), seed=seed,
                    n_events=len(frames))
