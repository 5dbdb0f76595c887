"""Domain types, unit conventions and frame transformations.

Durations exposed to users are normalized: one unit of time is Gamma/Omega0**2,
the natural timescale of the reduced (adiabatically eliminated) dynamics.
The full three-level model runs in physical time, tau = T * Gamma / Omega0**2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ScheduleError

HALF_PI = 0.5 * math.pi

# Slack allowed when validating angles produced by floating-point arithmetic.
ANGLE_TOL = 1e-12

AngleFunc = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SystemParams:
    """Dissipation ratio Gamma/Omega0 and the field amplitude Omega0.

    ``gamma_ratio = math.inf`` selects the reduced two-level limit.
    """

    gamma_ratio: float = math.inf
    omega0: float = 1.0

    def __post_init__(self):
        if not (self.gamma_ratio > 0):
            raise DomainError(f"gamma_ratio must be positive or inf, got {self.gamma_ratio!r}")
        if not (self.omega0 > 0 and math.isfinite(self.omega0)):
            raise DomainError(f"omega0 must be positive and finite, got {self.omega0!r}")

    @property
    def is_reduced_limit(self) -> bool:
        return math.isinf(self.gamma_ratio)

    @property
    def gamma(self) -> float:
        """Dissipation rate of the intermediate level in inverse physical time."""
        return self.gamma_ratio * self.omega0

    @property
    def time_scale(self) -> float:
        """Physical time per normalized time unit, Gamma / Omega0**2."""
        return self.gamma / self.omega0**2

    def physical_time(self, t_normalized):
        if self.is_reduced_limit:
            raise DomainError("physical time is undefined in the infinite-dissipation limit")
        return t_normalized * self.time_scale

    def normalized_time(self, tau):
        if self.is_reduced_limit:
            raise DomainError("physical time is undefined in the infinite-dissipation limit")
        return tau / self.time_scale


def _check_angle(theta: float) -> None:
    if not (-ANGLE_TOL <= theta <= HALF_PI + ANGLE_TOL):
        raise DomainError(f"mixing angle {theta!r} outside [0, pi/2]")


def fields_from_angle(theta: float, params: SystemParams | None = None) -> tuple[float, float]:
    """Pump and Stokes Rabi frequencies ``(omega_p, omega_s)`` for a mixing angle."""
    _check_angle(theta)
    omega0 = 1.0 if params is None else params.omega0
    return omega0 * math.sin(theta), omega0 * math.cos(theta)


@dataclass(frozen=True)
class AdiabaticState:
    """Amplitudes along the lossy eigenvector (x) and the dark state (y)."""

    y: float
    x: float


def to_adiabatic(c1: float, c3: float, theta: float) -> AdiabaticState:
    c, s = math.cos(theta), math.sin(theta)
    return AdiabaticState(y=c1 * c - c3 * s, x=c1 * s + c3 * c)


def from_adiabatic(state: AdiabaticState, theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    return state.y * c + state.x * s, -state.y * s + state.x * c


def from_adiabatic_arrays(y, x, theta):
    """Vectorized inverse of :func:`to_adiabatic`; returns ``(c1, c3)`` arrays."""
    c, s = np.cos(theta), np.sin(theta)
    return y * c + x * s, -y * s + x * c


def estimate_c2(c1: float, c3: float, theta: float, params: SystemParams) -> complex:
    """Adiabatic-elimination estimate of the intermediate amplitude.

    Returns ``-(i/Gamma) (omega_p c1 + omega_s c3)``; exactly zero in the
    infinite-dissipation limit.
    """
    if params.is_reduced_limit:
        return 0j
    omega_p, omega_s = fields_from_angle(theta, params)
    return -1j * (omega_p * c1 + omega_s * c3) / params.gamma


@dataclass(frozen=True)
class FullState:
    c1: complex
    c2: complex
    c3: complex


@dataclass(frozen=True)
class ReducedState:
    c1: float
    c3: float


@dataclass(frozen=True)
class Jump:
    """Instantaneous change of the mixing angle at ``time``."""

    time: float
    before: float
    after: float

    @property
    def size(self) -> float:
        return self.after - self.before


@dataclass(frozen=True)
class Segment:
    """Smooth piece of a schedule on ``[start, end]``.

    ``theta`` and ``rate`` must accept numpy arrays of times.
    """

    start: float
    end: float
    theta: AngleFunc
    rate: AngleFunc

    @property
    def length(self) -> float:
        return self.end - self.start

    def value(self, t: float) -> float:
        return float(self.theta(np.asarray(float(t))))


def linear_segment(start: float, end: float, theta_start: float, slope: float) -> Segment:
    """Segment with ``theta(t) = theta_start + slope * (t - start)``."""

    def theta(t):
        return theta_start + slope * (np.asarray(t, dtype=float) - start)

    def rate(t):
        return np.full(np.shape(t), float(slope))

    return Segment(start, end, theta, rate)


@dataclass(frozen=True)
class AngleSchedule:
    """Piecewise mixing-angle trajectory on ``[0, total_duration]``.

    Jumps are discrete events; evaluation at a jump time is two-sided via
    ``side="left"`` / ``side="right"``. Every discontinuity between adjacent
    segments, and any change at ``t = 0`` or ``t = T`` relative to the
    pre/post values, must be represented by a jump.
    """

    total_duration: float
    segments: tuple[Segment, ...]
    jumps: tuple[Jump, ...] = field(default=())
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(self, "jumps", tuple(sorted(self.jumps, key=lambda j: j.time)))
        self._validate()

    def _validate(self) -> None:
        T = self.total_duration
        if not (T > 0 and math.isfinite(T)):
            raise ScheduleError(f"total duration must be positive and finite, got {T!r}")
        if not self.segments:
            raise ScheduleError("schedule needs at least one segment")
        scale = max(1.0, T)
        if abs(self.segments[0].start) > ANGLE_TOL * scale or abs(self.segments[-1].end - T) > ANGLE_TOL * scale:
            raise ScheduleError("segments must cover [0, T]")
        for seg in self.segments:
            if not seg.end > seg.start:
                raise ScheduleError(f"empty segment [{seg.start}, {seg.end}]")
        for a, b in zip(self.segments, self.segments[1:]):
            if abs(a.end - b.start) > ANGLE_TOL * scale:
                raise ScheduleError(f"gap between segments at t={a.end}")

        times = [j.time for j in self.jumps]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ScheduleError("jump times must be strictly ordered")
        boundaries = [s.start for s in self.segments] + [T]
        for j in self.jumps:
            if not any(abs(j.time - b) <= ANGLE_TOL * scale for b in boundaries):
                raise ScheduleError(f"jump at t={j.time} does not sit on a segment boundary")
            _check_angle(j.before)
            _check_angle(j.after)

        # Each interior boundary: continuity or a jump bridging the two limits.
        for k, (a, b) in enumerate(zip(self.segments, self.segments[1:])):
            left, right = a.value(a.end), b.value(b.start)
            jump = self._jump_near(b.start)
            if jump is None:
                if abs(left - right) > 1e-9:
                    raise ScheduleError(f"discontinuity at t={b.start} without a jump")
            elif abs(jump.before - left) > 1e-9 or abs(jump.after - right) > 1e-9:
                raise ScheduleError(f"jump at t={b.start} does not match segment limits")
        first, last = self.segments[0], self.segments[-1]
        j0 = self._jump_near(0.0)
        if j0 is not None and abs(j0.after - first.value(first.start)) > 1e-9:
            raise ScheduleError("initial jump does not land on the first segment")
        jT = self._jump_near(T)
        if jT is not None and abs(jT.before - last.value(last.end)) > 1e-9:
            raise ScheduleError("final jump does not leave from the last segment")

        for seg in self.segments:
            probe = seg.theta(np.linspace(seg.start, seg.end, 65))
            if np.any(probe < -ANGLE_TOL) or np.any(probe > HALF_PI + ANGLE_TOL):
                raise DomainError(f"schedule leaves [0, pi/2] on [{seg.start}, {seg.end}]")

    def _jump_near(self, t: float) -> Jump | None:
        tol = ANGLE_TOL * max(1.0, self.total_duration)
        for j in self.jumps:
            if abs(j.time - t) <= tol:
                return j
        return None

    def jump_at(self, t: float) -> Jump | None:
        return self._jump_near(t)

    def _segment_for(self, t: float, side: str) -> Segment:
        segs = self.segments
        if side == "left":
            for seg in segs:
                if seg.start < t <= seg.end:
                    return seg
            return segs[0]
        for seg in segs:
            if seg.start <= t < seg.end:
                return seg
        return segs[-1]

    def theta(self, t: float, side: str = "right") -> float:
        """Mixing angle at ``t``; ``side`` selects the one-sided limit at jumps."""
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        T = self.total_duration
        if t < 0 or t > T:
            raise DomainError(f"t={t} outside [0, {T}]")
        jump = self._jump_near(t)
        if jump is not None:
            return jump.before if side == "left" else jump.after
        if t == 0 and side == "left":
            return self.segments[0].value(0.0)
        return self._segment_for(t, side).value(t)

    def rate(self, t: float, side: str = "right") -> float:
        """Smooth part of the angular velocity (jumps excluded)."""
        seg = self._segment_for(t, side)
        return float(seg.rate(np.asarray(float(t))))

    def sample(self, times: Sequence[float], side: str = "right") -> np.ndarray:
        return np.array([self.theta(float(t), side) for t in times])

    @property
    def initial_angle(self) -> float:
        """theta(0^-)."""
        return self.theta(0.0, "left")

    @property
    def final_angle(self) -> float:
        """theta(T^+)."""
        return self.theta(self.total_duration, "right")

    def satisfies_boundary_conditions(self) -> bool:
        return self.initial_angle == 0.0 and self.final_angle == HALF_PI


@dataclass
class Trajectory:
    """Sampled solution of one of the dynamical models.

    ``states`` holds the model's own variables: ``(c1, c2, c3)`` complex for
    ``full``, ``(c1, c3)`` for ``reduced`` and ``(y, x)`` for ``adiabatic``.
    At jump times the recorded state and angle are right limits, so the last
    row is the state after any final jump. ``populations`` has columns
    ``|c1|^2, |c2|^2, |c3|^2``; the middle column is NaN when the model does
    not carry the intermediate level.
    """

    model: str
    times: np.ndarray
    states: np.ndarray
    thetas: np.ndarray
    populations: np.ndarray
    max_norm_increase: float = 0.0
    steps: int = 0

    def __post_init__(self):
        if len(self.times) != len(self.states) or len(self.times) != len(self.populations):
            raise ValueError("times, states and populations must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    @property
    def efficiency(self) -> float:
        """Final target-state population |c3(T)|^2."""
        return float(self.populations[-1, 2])

    def amplitudes(self) -> tuple[np.ndarray, np.ndarray]:
        """``(c1, c3)`` along the trajectory (complex for the full model)."""
        if self.model == "full":
            return self.states[:, 0], self.states[:, 2]
        if self.model == "reduced":
            return self.states[:, 0], self.states[:, 1]
        return from_adiabatic_arrays(self.states[:, 0], self.states[:, 1], self.thetas)

    def norm_squared(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=1)
