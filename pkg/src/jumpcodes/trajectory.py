"""Quantum-jump Monte Carlo with detected jump times and positions.

Random streams: trajectory ``i`` of an ensemble with seed ``s`` draws from
``numpy.random.Generator(PCG64(SeedSequence(s, spawn_key=(i,))))``. The
SeedSequence hash is the stream-mixing function, so any trajectory can be
replayed on its own and ensemble results do not depend on how trajectories are
split across workers.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .dynamics import DecayModel, DensityMatrix, apply_jump, conditional_evolve, jump_rates
from .errors import InvalidDuration, InvalidParameters, TooLargeForOracle
from .qstate import StateVector, fidelity

BISECT_RTOL = 1e-10
MAX_ORACLE_QUBITS = 4

RecoveryProvider = Callable[[int], "object"]


@dataclass(frozen=True)
class TrajectoryConfig:
    model: DecayModel
    t_max: float
    sample_times: tuple[float, ...]
    seed: int
    n_trajectories: int = 1
    recovery_enabled: bool = False
    recovery_delay: float = 0.0

    def __post_init__(self):
        times = tuple(float(s) for s in self.sample_times)
        object.__setattr__(self, "sample_times", times)
        if self.t_max < 0:
            raise InvalidDuration("t_max must be non-negative")
        if any(b < a for a, b in zip(times, times[1:])):
            raise InvalidParameters("sample_times must be sorted")
        if times and (times[0] < 0 or times[-1] > self.t_max):
            raise InvalidParameters("sample_times must lie in [0, t_max]")
        if self.n_trajectories < 1:
            raise InvalidParameters("n_trajectories must be >= 1")
        if self.recovery_delay < 0:
            raise InvalidDuration("recovery delay must be non-negative")

    @staticmethod
    def grid(t_max: float, n_samples: int) -> tuple[float, ...]:
        if n_samples == 1:
            return (float(t_max),)
        return tuple(t_max * i / (n_samples - 1) for i in range(n_samples))


@dataclass(frozen=True)
class JumpRecord:
    time: float
    position: int


def trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _survival_groups(psi: StateVector, model: DecayModel) -> dict[float, float]:
    groups: dict[float, float] = {}
    for b, a in psi.terms.items():
        r = model.total_rate(b)
        groups[r] = groups.get(r, 0.0) + a.real * a.real + a.imag * a.imag
    return groups


def _survival(groups: dict[float, float], t: float) -> float:
    return sum(p * math.exp(-r * t) for r, p in groups.items())


def sample_next_jump(
    psi: StateVector, model: DecayModel, u: float, v: float, horizon: float = math.inf
) -> Optional[tuple[float, int]]:
    """Waiting time and position of the next jump, or None if none occurs before ``horizon``.

    The waiting time solves ||conditional_evolve(psi, tau)||^2 = u by
    bisection; the position is chosen with probabilities proportional to
    ||L_alpha psi(tau)||^2 using ``v``.
    """
    groups = _survival_groups(psi, model)
    rmax = max(groups, default=0.0)
    if rmax == 0.0:
        return None
    if horizon <= 0.0:
        return None
    survives = _survival(groups, horizon) if math.isfinite(horizon) else groups.get(0.0, 0.0)
    if survives >= u:
        return None
    lo = 0.0
    if math.isfinite(horizon):
        hi = horizon
    else:
        hi = 1.0 / rmax
        while _survival(groups, hi) > u:
            hi *= 2.0
    while hi - lo > BISECT_RTOL * hi:
        mid = 0.5 * (lo + hi)
        if _survival(groups, mid) > u:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)

    rates = jump_rates(conditional_evolve(psi, tau, model), model)
    target = v * sum(rates)
    acc = 0.0
    alpha = max(i for i, r in enumerate(rates) if r > 0) + 1
    for i, r in enumerate(rates):
        acc += r
        if r > 0 and target < acc:
            alpha = i + 1
            break
    return tau, alpha


@dataclass
class TrajectoryResult:
    states: list[StateVector]
    jumps: list[JumpRecord]
    final_state: StateVector
    uncorrectable: int = 0


def run_trajectory(
    psi0: StateVector,
    cfg: TrajectoryConfig,
    recovery: Optional[RecoveryProvider] = None,
    index: int = 0,
    monitor: Optional[Callable[[float, StateVector, float], None]] = None,
) -> TrajectoryResult:
    """Simulate one trajectory and record the normalized state at each sample time.

    With recovery enabled, the recovery for the detected position is applied
    ``cfg.recovery_delay`` after the jump (instantly by default). Further jumps
    inside a pending delay window are recovered in order at the window's end
    and counted as uncorrectable events. ``monitor(t, psi, dt)`` is called
    before every no-jump segment.
    """
    if cfg.recovery_enabled and recovery is None:
        raise InvalidParameters("recovery enabled but no recovery provider given")
    model = cfg.model
    rng = trajectory_rng(cfg.seed, index)
    samples = cfg.sample_times
    states: list[StateVector] = []
    jumps: list[JumpRecord] = []
    uncorrectable = 0
    pending: list[int] = []
    deadline = math.inf

    psi = psi0.normalized()
    t = 0.0

    def record_until(t_stop: float, inclusive: bool) -> None:
        while len(states) < len(samples):
            s = samples[len(states)]
            if s > t_stop or (s == t_stop and not inclusive):
                break
            states.append(conditional_evolve(psi, s - t, model).normalized())

    while True:
        stop = min(deadline, cfg.t_max)
        horizon = stop - t
        u = 1.0 - rng.random()
        v = rng.random()
        if monitor is not None:
            monitor(t, psi, horizon)
        nxt = sample_next_jump(psi, model, u, v, horizon)
        if nxt is None:
            record_until(stop, inclusive=stop >= cfg.t_max)
            psi = conditional_evolve(psi, horizon, model).normalized()
            t = stop
            if pending and deadline <= cfg.t_max:
                for a in pending:
                    psi = recovery(a).apply(psi).normalized()
                pending = []
                deadline = math.inf
                continue
            break
        tau, alpha = nxt
        record_until(t + tau, inclusive=False)
        psi = apply_jump(conditional_evolve(psi, tau, model), alpha, model).normalized()
        t += tau
        jumps.append(JumpRecord(t, alpha))
        if cfg.recovery_enabled:
            if cfg.recovery_delay == 0.0:
                psi = recovery(alpha).apply(psi).normalized()
            else:
                if pending:
                    uncorrectable += 1
                else:
                    deadline = t + cfg.recovery_delay
                pending.append(alpha)
    return TrajectoryResult(states, jumps, psi, uncorrectable)


@dataclass
class EnsembleResult:
    sample_times: tuple[float, ...]
    mean: np.ndarray
    stderr: np.ndarray
    n_traj: int
    min_fidelity: np.ndarray
    jump_counts: list[int] = field(default_factory=list)
    uncorrectable: int = 0

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,fidelity_mean,fidelity_stderr,n_traj\n")
        for t, m, s in zip(self.sample_times, self.mean, self.stderr):
            buf.write(f"{t:.12g},{m:.12g},{s:.12g},{self.n_traj}\n")
        return buf.getvalue()


def _fidelity_chunk(args) -> tuple[np.ndarray, list[int], int]:
    psi0, target, cfg, recovery, indices = args
    fids = np.zeros((len(indices), len(cfg.sample_times)))
    counts = []
    bad = 0
    for row, i in enumerate(indices):
        res = run_trajectory(psi0, cfg, recovery if cfg.recovery_enabled else None, index=i)
        fids[row] = [fidelity(target, s) for s in res.states]
        counts.append(len(res.jumps))
        bad += res.uncorrectable
    return fids, counts, bad


def _chunks(n: int, workers: int) -> list[list[int]]:
    size = max(1, math.ceil(n / max(1, workers * 4)))
    return [list(range(i, min(n, i + size))) for i in range(0, n, size)]


def ensemble_fidelity(
    psi0: StateVector,
    cfg: TrajectoryConfig,
    recovery: Optional[RecoveryProvider] = None,
    target: Optional[StateVector] = None,
    workers: int = 1,
) -> EnsembleResult:
    """Mean fidelity with ``target`` (default: the initial state) at each sample time."""
    target = (target or psi0).normalized()
    chunks = _chunks(cfg.n_trajectories, workers)
    jobs = [(psi0, target, cfg, recovery, idx) for idx in chunks]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_fidelity_chunk, jobs))
    else:
        parts = [_fidelity_chunk(j) for j in jobs]

    fids = np.concatenate([p[0] for p in parts], axis=0)
    counts = [c for p in parts for c in p[1]]
    bad = sum(p[2] for p in parts)
    n = fids.shape[0]
    mean = fids.mean(axis=0)
    stderr = fids.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(mean)
    return EnsembleResult(cfg.sample_times, mean, stderr, n, fids.min(axis=0), counts, bad)


@dataclass
class DensityEstimate:
    """Trajectory average of |psi><psi| with elementwise standard errors."""

    density: DensityMatrix
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    n_traj: int


def trajectory_average_density(psi0: StateVector, cfg: TrajectoryConfig) -> DensityEstimate:
    if psi0.n > MAX_ORACLE_QUBITS:
        raise TooLargeForOracle(f"density averages are limited to {MAX_ORACLE_QUBITS} qubits")
    if cfg.recovery_enabled:
        raise InvalidParameters("density averages compare raw dissipative dynamics; disable recovery")
    dim = 2**psi0.n
    total = np.zeros((dim, dim), dtype=complex)
    sq_re = np.zeros((dim, dim))
    sq_im = np.zeros((dim, dim))
    final_cfg = TrajectoryConfig(cfg.model, cfg.t_max, (), cfg.seed, cfg.n_trajectories)
    for i in range(cfg.n_trajectories):
        vec = run_trajectory(psi0, final_cfg, index=i).final_state.to_dense()
        outer = np.outer(vec, vec.conj())
        total += outer
        sq_re += outer.real**2
        sq_im += outer.imag**2
    n = cfg.n_trajectories
    mean = total / n
    if n > 1:
        var_re = np.maximum(sq_re / n - mean.real**2, 0.0) * n / (n - 1)
        var_im = np.maximum(sq_im / n - mean.imag**2, 0.0) * n / (n - 1)
        se_re, se_im = np.sqrt(var_re / n), np.sqrt(var_im / n)
    else:
        se_re = se_im = np.zeros((dim, dim))
    return DensityEstimate(DensityMatrix(psi0.n, mean), se_re, se_im, n)
