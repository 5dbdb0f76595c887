"""Fixed-step propagation of the full, reduced and adiabatic-frame models.

All three integrators share one driver: every smooth segment of the schedule
gets its own uniform grid, so no step straddles a jump. Jumps are applied as
exact discrete maps between segments (identity on the full and reduced
states, a rotation on the adiabatic state).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import AngleSchedule, SystemParams, Trajectory, from_adiabatic_arrays, to_adiabatic
from .errors import DomainError, ModelError, NumericalBlowupError

MODELS = ("full", "reduced", "adiabatic")

# Steps per kernel call; bounds the coefficient arrays for long full-model runs.
_CHUNK = 1 << 18


@dataclass(frozen=True)
class IntegratorConfig:
    """Step control for the fixed-step integrators.

    Parameters
    ----------
    steps_per_unit_time : int
        Grid density for the reduced and adiabatic models, per normalized
        time unit.
    full_step : float, optional
        Physical step for the full model. Defaults to
        ``min(0.05 / Gamma, 0.05 / Omega0)``, which resolves both the decay of
        the intermediate level and the Rabi oscillation.
    min_steps_per_segment : int
        Floor on the step count of every smooth segment, so short schedules
        are still resolved.
    samples : int
        Number of output samples retained in the trajectory, independent of
        the integration step.
    """

    steps_per_unit_time: int = 20
    full_step: float | None = None
    min_steps_per_segment: int = 200
    samples: int = 1000
    method: str = "rk4"

    def __post_init__(self):
        if self.method != "rk4":
            raise DomainError(f"unsupported integration method {self.method!r}")
        if int(self.steps_per_unit_time) != self.steps_per_unit_time or self.steps_per_unit_time < 1:
            raise DomainError("steps_per_unit_time must be an integer >= 1")
        if self.full_step is not None and not (self.full_step > 0 and math.isfinite(self.full_step)):
            raise DomainError("full_step must be positive")
        if self.min_steps_per_segment < 1:
            raise DomainError("min_steps_per_segment must be >= 1")
        if self.samples < 2:
            raise DomainError("samples must be >= 2")

    def full_physical_step(self, params: SystemParams) -> float:
        if self.full_step is not None:
            return self.full_step
        return min(0.05 / params.gamma, 0.05 / params.omega0)


DEFAULT_CONFIG = IntegratorConfig()


def rotate_adiabatic(y: float, x: float, delta: float) -> tuple[float, float]:
    """Adiabatic-frame image of a jump of size ``delta`` in the mixing angle.

    Keeps ``(c1, c3)`` fixed: the frame rotates with the angle, so the
    ``(y, x)`` components rotate by ``delta``.
    """
    c, s = math.cos(delta), math.sin(delta)
    return c * y - s * x, s * y + c * x


def _segment_steps(schedule, model, config, params):
    counts = []
    for seg in schedule.segments:
        if model == "full":
            span = seg.length * params.time_scale
            n = math.ceil(span / config.full_physical_step(params) - 1e-9)
        else:
            n = math.ceil(seg.length * config.steps_per_unit_time - 1e-9)
        counts.append(max(config.min_steps_per_segment, n))
    return counts


def _propagate(schedule: AngleSchedule, model: str, params: SystemParams, config: IntegratorConfig):
    if model not in MODELS:
        raise ModelError(f"unknown model {model!r}; expected one of {MODELS}")
    if model == "full" and params.is_reduced_limit:
        raise ModelError("the full model needs a finite gamma_ratio; use the reduced model for inf")

    counts = _segment_steps(schedule, model, config, params)
    total = sum(counts)
    sample_idx = np.unique(np.rint(np.linspace(0, total, min(config.samples, total + 1))).astype(np.int64))

    if model == "full":
        state = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
    elif model == "reduced":
        state = np.array([1.0, 0.0])
    else:
        a = to_adiabatic(1.0, 0.0, schedule.initial_angle)
        state = np.array([a.y, a.x])
    dim = state.shape[0]

    rec_states = np.empty((sample_idx.shape[0], dim), dtype=state.dtype)
    rec_times = np.empty(sample_idx.shape[0])
    rec_thetas = np.empty(sample_idx.shape[0])
    n_rec = 0
    max_inc = 0.0
    offset = 0

    for seg, n in zip(schedule.segments, counts):
        jump = schedule.jump_at(seg.start)
        if jump is not None and model == "adiabatic":
            state[0], state[1] = rotate_adiabatic(state[0], state[1], jump.size)

        h_norm = seg.length / n
        h = h_norm * params.time_scale if model == "full" else h_norm
        for j in range(0, n, _CHUNK):
            m = min(_CHUNK, n - j)
            grid = seg.start + seg.length * (np.arange(2 * j, 2 * (j + m) + 1) / (2 * n))
            lo = np.searchsorted(sample_idx, offset + j)
            hi = np.searchsorted(sample_idx, offset + j + m)
            rec = sample_idx[lo:hi] - (offset + j)
            out = np.empty((hi - lo, dim), dtype=state.dtype)

            if model == "adiabatic":
                bad, inc = _kernels.rk4_adiabatic(np.asarray(seg.rate(grid), dtype=float), h, state, rec, out)
            else:
                theta = np.asarray(seg.theta(grid), dtype=float)
                if model == "reduced":
                    bad, inc = _kernels.rk4_reduced(np.sin(theta), np.cos(theta), h, state, rec, out)
                else:
                    w = params.omega0
                    bad, inc = _kernels.rk4_full(w * np.sin(theta), w * np.cos(theta), params.gamma, h, state, rec, out)
            if bad >= 0:
                step = offset + j + bad
                raise NumericalBlowupError(
                    f"{model} model state became non-finite at step {step} (t={seg.start + (j + bad) * h_norm:.6g})",
                    step=step, time=seg.start + (j + bad) * h_norm)
            max_inc = max(max_inc, inc)

            k = hi - lo
            rec_states[n_rec:n_rec + k] = out
            rec_times[n_rec:n_rec + k] = seg.start + seg.length * ((j + rec) / n)
            rec_thetas[n_rec:n_rec + k] = seg.theta(grid[2 * rec])
            n_rec += k
        offset += n

    final = schedule.jump_at(schedule.total_duration)
    if final is not None and model == "adiabatic":
        state[0], state[1] = rotate_adiabatic(state[0], state[1], final.size)
    rec_states[n_rec] = state
    rec_times[n_rec] = schedule.total_duration
    rec_thetas[n_rec] = schedule.final_angle
    n_rec += 1
    assert n_rec == sample_idx.shape[0]

    return rec_times, rec_states, rec_thetas, max_inc, total


def simulate_full(schedule: AngleSchedule, params: SystemParams, config: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate the three-level amplitudes with intermediate-level loss.

    The schedule is given in normalized time and mapped to physical time with
    ``tau = t * Gamma / Omega0**2``; the returned trajectory is sampled on the
    normalized axis. Starts from ``(c1, c2, c3) = (1, 0, 0)``.
    """
    times, states, thetas, inc, steps = _propagate(schedule, "full", params, config)
    pops = np.abs(states) ** 2
    return Trajectory("full", times, states, thetas, pops, inc, steps)


def simulate_reduced(schedule: AngleSchedule, config: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate the adiabatically eliminated two-level system from ``(1, 0)``."""
    times, states, thetas, inc, steps = _propagate(schedule, "reduced", SystemParams(), config)
    pops = np.column_stack([states[:, 0] ** 2, np.full(len(times), np.nan), states[:, 1] ** 2])
    return Trajectory("reduced", times, states, thetas, pops, inc, steps)


def simulate_adiabatic(schedule: AngleSchedule, config: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate the dark/bright amplitudes ``(y, x)`` driven by ``u = dtheta/dt``.

    Angle jumps rotate ``(y, x)`` exactly so that ``(c1, c3)`` is continuous.
    Populations are reported in the bare basis.
    """
    times, states, thetas, inc, steps = _propagate(schedule, "adiabatic", SystemParams(), config)
    c1, c3 = from_adiabatic_arrays(states[:, 0], states[:, 1], thetas)
    pops = np.column_stack([c1 ** 2, np.full(len(times), np.nan), c3 ** 2])
    return Trajectory("adiabatic", times, states, thetas, pops, inc, steps)


def simulate(schedule: AngleSchedule, model: str, params: SystemParams | None = None,
             config: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    """Dispatch on ``model``."""
    if model == "full":
        if params is None:
            raise ModelError("the full model needs SystemParams with a finite gamma_ratio")
        return simulate_full(schedule, params, config)
    if model == "reduced":
        return simulate_reduced(schedule, config)
    if model == "adiabatic":
        return simulate_adiabatic(schedule, config)
    raise ModelError(f"unknown model {model!r}; expected one of {MODELS}")


def with_estimated_c2(traj: Trajectory, params: SystemParams) -> Trajectory:
    """Fill the ``|c2|^2`` column of a reduced/adiabatic trajectory from the elimination formula."""
    if traj.model == "full":
        return traj
    c1, c3 = traj.amplitudes()
    if params.is_reduced_limit:
        pop2 = np.zeros_like(c1)
    else:
        bright = np.sin(traj.thetas) * c1 + np.cos(traj.thetas) * c3
        pop2 = (params.omega0 * bright / params.gamma) ** 2
    pops = traj.populations.copy()
    pops[:, 1] = pop2
    return Trajectory(traj.model, traj.times, traj.states, traj.thetas, pops, traj.max_norm_increase, traj.steps)
