"""Fidelity metrics and Monte-Carlo ensembles over control realizations.

The state-independent figure of merit is the entanglement fidelity
F_e = |Tr U / d|^2, evaluated on the logical-frame propagator (for
acyclic protocols this equals the physical-frame value after the
frame-correcting pulse).  Ensembles derive one independent seed per
realization from the root seed by a counter-based spawn, so results
are deterministic regardless of worker count.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError
from .groups import DecouplingGroup, PulsePath, build_collective_group, build_nested_group
from .hamiltonian import ChainSpec, HamiltonianMatrix, build_lab_frame, build_rotating_frame
from .pauli import PauliString
from .propagation import propagate
from .schedules import DETERMINISTIC, ProtocolConfig, make_schedule


def entanglement_fidelity(u: np.ndarray, d: int | None = None) -> float:
    """|Tr U / d|^2, invariant under global phase."""
    if d is None:
        d = u.shape[0]
    if np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) > 1e-8:
        raise ValidationError("propagator is not unitary within 1e-8")
    f = abs(np.trace(u) / d) ** 2
    return float(min(f, 1.0 + 1e-12))


def pure_state_fidelity(u: np.ndarray, psi: np.ndarray) -> float:
    """|<psi| U |psi>|^2 for a normalized state vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
        raise ValidationError("state vector must be normalized")
    return float(abs(np.vdot(psi, u @ psi)) ** 2)


@dataclass(frozen=True)
class FidelityTrace:
    times: tuple
    values: tuple
    realization: int
    protocol: str


@dataclass(frozen=True)
class EnsembleTask:
    """Self-contained, picklable description of one ensemble run."""

    chain: ChainSpec
    protocol: ProtocolConfig
    delta_t: float
    n_steps: int
    sample_steps: tuple
    realizations: int
    root_seed: int
    group: str = "collective"  # "nested" | "collective" | "custom" | "trivial"
    custom_elements: tuple = ()
    frame: str = "rotating"  # "rotating" | "lab"
    omega: float = 0.0

    def __post_init__(self):
        if self.realizations < 1:
            raise ValidationError("realizations must be >= 1")
        if self.n_steps < 1:
            raise ValidationError("n_steps must be >= 1")


@dataclass(frozen=True)
class EnsembleResult:
    times: tuple
    mean: tuple
    stderr: tuple
    minimum: tuple
    maximum: tuple
    realizations: int
    root_seed: int
    protocol: str
    samples: np.ndarray  # (R, T) raw fidelities, for merging and fits

    @staticmethod
    def from_samples(times, samples, root_seed, protocol) -> "EnsembleResult":
        samples = np.asarray(samples, dtype=float)
        r = samples.shape[0]
        mean = samples.mean(axis=0)
        if r > 1:
            stderr = samples.std(axis=0, ddof=1) / np.sqrt(r)
        else:
            stderr = np.zeros_like(mean)
        return EnsembleResult(
            times=tuple(float(t) for t in times),
            mean=tuple(float(v) for v in mean),
            stderr=tuple(float(v) for v in stderr),
            minimum=tuple(float(v) for v in samples.min(axis=0)),
            maximum=tuple(float(v) for v in samples.max(axis=0)),
            realizations=r, root_seed=root_seed, protocol=protocol,
            samples=samples,
        )


def merge_results(a: EnsembleResult, b: EnsembleResult) -> EnsembleResult:
    if a.times != b.times or a.protocol != b.protocol:
        raise ValidationError("cannot merge results with different grids/protocols")
    return EnsembleResult.from_samples(
        a.times, np.vstack([a.samples, b.samples]), a.root_seed, a.protocol
    )


def derived_seed(root_seed: int, realization: int) -> int:
    ss = np.random.SeedSequence(entropy=root_seed, spawn_key=(realization,))
    return int(ss.generate_state(1, np.uint64)[0])


def build_group_and_path(task: EnsembleTask):
    if task.group == "nested":
        return build_nested_group(task.chain.n_qubits)
    if task.group == "collective":
        return build_collective_group(task.chain.n_qubits)
    if task.group == "trivial":
        group = DecouplingGroup(
            (PauliString.identity(task.chain.n_qubits),), task.chain.n_qubits, "trivial"
        )
        return group, PulsePath(group, (0,))
    if task.group == "custom":
        elements = tuple(PauliString.parse(s).phase_free() for s in task.custom_elements)
        group = DecouplingGroup(elements, task.chain.n_qubits, "custom")
        return group, PulsePath(group, tuple(range(len(elements))))
    raise ValidationError(f"unknown group kind {task.group!r}")


def build_hamiltonian(task: EnsembleTask) -> HamiltonianMatrix:
    if task.frame == "rotating":
        return build_rotating_frame(task.chain)
    if task.frame == "lab":
        return build_lab_frame(task.chain, task.omega)
    raise ValidationError(f"unknown frame {task.frame!r}")


# Per-process caches: tasks in one ensemble share H and group.
_H_CACHE: dict = {}
_G_CACHE: dict = {}


def _cached_inputs(task: EnsembleTask):
    hkey = (task.chain, task.frame, task.omega)
    if hkey not in _H_CACHE:
        _H_CACHE[hkey] = build_hamiltonian(task)
    gkey = (task.chain.n_qubits, task.group, task.custom_elements)
    if gkey not in _G_CACHE:
        _G_CACHE[gkey] = build_group_and_path(task)
    return _H_CACHE[hkey], _G_CACHE[gkey]


def _schedule_for(task: EnsembleTask, realization: int):
    h, (group, path) = _cached_inputs(task)
    cfg = task.protocol
    if cfg.protocol not in DETERMINISTIC:
        cfg = replace(cfg, seed=derived_seed(task.root_seed, realization))
    return make_schedule(cfg, group, path, task.delta_t), h


def run_realization(task: EnsembleTask, realization: int) -> np.ndarray:
    """Fidelity samples of one control realization (module-level: picklable)."""
    schedule, h = _schedule_for(task, realization)
    snaps = propagate(schedule, h, task.n_steps, task.sample_steps)
    return np.array([entanglement_fidelity(u, h.dimension) for _, u in snaps])


# Realizations are propagated in lock-step blocks: one batched matmul per
# slot instead of a Python-level loop per realization.  The block size is
# fixed by the matrix dimension alone, so the samples are bit-identical
# for any worker count.
_BLOCK_COMPLEX_BUDGET = 4_000_000


def _block_size(d: int) -> int:
    return max(1, _BLOCK_COMPLEX_BUDGET // (d * d))


def _run_block(task: EnsembleTask, realizations) -> np.ndarray:
    """Propagate a block of realizations in lock-step; rows of F_e samples."""
    import itertools as _it

    from .propagation import DRIFT_CHECK_STRIDE, FreeStep, UNITARITY_DRIFT_TOL

    h, _ = _cached_inputs(task)
    d = h.dimension
    free = FreeStep(h, task.delta_t)
    frame_iters = []
    for r in realizations:
        schedule, _ = _schedule_for(task, r)
        frame_iters.append(_it.islice(schedule.frames(), task.n_steps))
    b = len(frame_iters)
    states = np.broadcast_to(np.eye(d, dtype=complex), (b, d, d)).copy()
    idx = np.arange(d, dtype=np.uint64)
    eye = np.eye(d)
    want = set(int(s) for s in task.sample_steps)
    n_samples = len(want)
    out = np.empty((b, n_samples), dtype=float)
    col = 0
    if 0 in want:
        out[:, col] = 1.0
        col += 1
    for k in range(1, task.n_steps + 1):
        frames = [next(it) for it in frame_iters]
        xs = np.array([f.x for f in frames], dtype=np.uint64)
        zs = np.array([f.z for f in frames], dtype=np.uint64)
        perm = (idx[None, :] ^ xs[:, None]).astype(np.intp)
        signs = np.where(np.bitwise_count(idx[None, :] & zs[:, None]) & 1, -1.0, 1.0)
        steps = (signs[:, :, None] * signs[:, None, :]) * free.u0[perm[:, :, None],
                                                                  perm[:, None, :]]
        states = steps @ states
        if k % DRIFT_CHECK_STRIDE == 0:
            drift = np.linalg.norm(
                states.conj().transpose(0, 2, 1) @ states - eye, axis=(1, 2))
            if np.any(drift > UNITARITY_DRIFT_TOL):
                w, _, vh = np.linalg.svd(states)
                states = w @ vh
        if k in want:
            tr = np.einsum("rii->r", states)
            out[:, col] = np.minimum(np.abs(tr / d) ** 2, 1.0 + 1e-12)
            col += 1
    return out


def run_ensemble(task: EnsembleTask, workers: int = 1) -> EnsembleResult:
    """Monte-Carlo average of F_e over control realizations.

    Deterministic protocols are computed once and tiled (zero variance);
    stochastic ones run in fixed-size blocks, serial or across worker
    processes, with identical results either way.
    """
    times = tuple(s * task.delta_t for s in sorted(set(task.sample_steps)))
    if task.protocol.protocol in DETERMINISTIC:
        trace = run_realization(task, 0)
        samples = np.tile(trace, (task.realizations, 1))
        return EnsembleResult.from_samples(times, samples, task.root_seed,
                                           task.protocol.protocol)
    size = _block_size(1 << task.chain.n_qubits)
    blocks = [list(range(i, min(i + size, task.realizations)))
              for i in range(0, task.realizations, size)]
    if workers > 1 and len(blocks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_worker, [(task, blk) for blk in blocks]))
    else:
        rows = [_run_block(task, blk) for blk in blocks]
    return EnsembleResult.from_samples(times, np.vstack(rows), task.root_seed,
                                       task.protocol.protocol)


def _worker(args):
    return _run_block(*args)


def fit_decay_exponent(result: EnsembleResult, window: tuple,
                       noise_factor: float = 10.0):
    """Log-log slope of 1 - <<F_e>> versus T inside a time window.

    Usable samples need 1 - F above noise_factor times the standard
    error; at least 5 are required.  Returns (slope, slope_stderr).
    """
    t = np.asarray(result.times)
    y = 1.0 - np.asarray(result.mean)
    se = np.asarray(result.stderr)
    keep = (t >= window[0]) & (t <= window[1]) & (t > 0) & (y > noise_factor * se) & (y > 0)
    if keep.sum() < 5:
        raise ValidationError(
            f"only {int(keep.sum())} usable samples in window {window}; need >= 5 "
            f"with 1-F above {noise_factor}x the standard error"
        )
    return loglog_slope(t[keep], y[keep])


def loglog_slope(x, y):
    """Least-squares slope of log(y) vs log(x), with its standard error."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    n = len(lx)
    if n < 2:
        raise ValidationError("need at least two points for a slope")
    coeffs, cov = np.polyfit(lx, ly, 1, cov=True) if n > 2 else (np.polyfit(lx, ly, 1), None)
    slope = float(coeffs[0])
    stderr = float(np.sqrt(cov[0, 0])) if cov is not None else 0.0
    return slope, stderr


# -- CSV emission ---------------------------------------------------------

CSV_COLUMNS = "t,mean,stderr,min,max"


def write_csv(path, result: EnsembleResult, metadata: dict):
    """Write '#key: value' metadata lines then the fixed-order columns."""
    lines = [f"# {k}: {v}" for k, v in metadata.items()]
    lines.append(CSV_COLUMNS)
    for i, t in enumerate(result.times):
        lines.append(
            f"{float(t)!r},{float(result.mean[i])!r},{float(result.stderr[i])!r},"
            f"{float(result.minimum[i])!r},{float(result.maximum[i])!r}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path):
    """Parse a results CSV back into (metadata, column arrays)."""
    metadata = {}
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                metadata[key.strip()] = value.strip()
            elif line == CSV_COLUMNS:
                continue
            else:
                rows.append([float(v) for v in line.split(",")])
    data = np.array(rows) if rows else np.empty((0, 5))
    return metadata, {
        "t": data[:, 0], "mean": data[:, 1], "stderr": data[:, 2],
        "min": data[:, 3], "max": data[:, 4],
    }
