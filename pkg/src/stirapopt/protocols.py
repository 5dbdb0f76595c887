"""Reference protocols: the constant-slope ramp and sigmoid adiabatic pulses."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import HALF_PI, AngleSchedule, Segment, SystemParams
from .errors import DomainError
from .optimal import solve

ETA = 0.5


def _require_duration(T: float) -> None:
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"duration must be positive, got {T!r}")


def constant_schedule(duration_T: float) -> AngleSchedule:
    """Linear ramp ``theta(t) = (pi/2) t / T`` with no jumps."""
    _require_duration(duration_T)
    T = float(duration_T)
    slope = math.pi / (2.0 * T)

    def theta(t):
        return HALF_PI * (np.asarray(t, dtype=float) / T)

    def rate(t):
        return np.full(np.shape(t), slope)

    return AngleSchedule(T, (Segment(0.0, T, theta, rate),), (), label="constant")


def constant_closed_form(duration_T: float) -> float:
    """Final target population under the constant-slope ramp.

    With ``u = pi/(2T)`` the adiabatic-frame system is constant, and the dark
    amplitude is ``exp(-eta T/2) [cosh(kT) + (eta/2) sinh(kT)/k]`` with
    ``k = sqrt(eta**2/4 - u**2)``. For ``T < 2 pi`` the radicand is negative
    and the hyperbolic functions continue to ``cos``/``sin`` of ``|k| T``.
    """
    _require_duration(duration_T)
    T = float(duration_T)
    u = math.pi / (2.0 * T)
    disc = (ETA / 2.0) ** 2 - u * u
    k = math.sqrt(abs(disc))
    kt = k * T
    if disc >= 0 and kt >= 1e-4:
        # cosh and sinh scaled by exp(-kT) so long durations do not overflow.
        decay = math.exp(-2.0 * kt)
        even = 0.5 * (1.0 + decay)
        odd = 0.5 * (1.0 - decay) / k
        amplitude = math.exp((k - ETA / 2.0) * T) * (even + 0.5 * ETA * odd)
        return amplitude * amplitude
    if disc >= 0:
        # Series for sinh(kT)/k near k = 0.
        even, odd = math.cosh(kt), T * (1.0 + kt * kt / 6.0)
    elif kt < 1e-4:
        even, odd = math.cos(kt), T * (1.0 - kt * kt / 6.0)
    else:
        even, odd = math.cos(kt), math.sin(kt) / k
    amplitude = math.exp(-ETA * T / 2.0) * (even + 0.5 * ETA * odd)
    return amplitude * amplitude


def constant_asymptotic_efficiency(duration_T: float, regime: str) -> float:
    """``T**2/(4 pi**2)`` for small T, ``1 - pi**2/T`` for large T."""
    _require_duration(duration_T)
    if regime == "small":
        return duration_T**2 / (4.0 * math.pi**2)
    if regime == "large":
        if duration_T <= math.pi**2:
            raise DomainError("large-T asymptote needs T > pi**2")
        return 1.0 - math.pi**2 / duration_T
    raise DomainError(f"regime must be 'small' or 'large', got {regime!r}")


@dataclass(frozen=True)
class SigmoidParams:
    """Center ``t0`` and width ``Tbar`` of the sigmoid pulse pair, in normalized time."""

    t0: float
    Tbar: float
    total_duration: float

    def __post_init__(self):
        _require_duration(self.total_duration)
        if not (self.Tbar > 0 and math.isfinite(self.Tbar)):
            raise DomainError(f"Tbar must be positive, got {self.Tbar!r}")
        if not (0 < self.t0 < self.total_duration):
            raise DomainError(f"t0 must lie in (0, T), got {self.t0!r}")

    @classmethod
    def centered(cls, total_duration: float, Tbar: float = 10.0) -> "SigmoidParams":
        return cls(0.5 * total_duration, Tbar, total_duration)


def _sigmoid_pair(s):
    # [1 + e^{+s}]^{-1/2} and [1 + e^{-s}]^{-1/2} without overflow.
    stokes = np.exp(-0.5 * np.logaddexp(0.0, s))
    pump = np.exp(-0.5 * np.logaddexp(0.0, -s))
    return pump, stokes


def sigmoid_fields(p: SigmoidParams, params: SystemParams | None = None, samples: int = 1000):
    """Sampled ``(t, omega_p, omega_s)`` on ``[0, T]``."""
    if samples < 2:
        raise DomainError("samples must be >= 2")
    omega0 = 1.0 if params is None else params.omega0
    t = np.linspace(0.0, p.total_duration, samples)
    pump, stokes = _sigmoid_pair((t - p.t0) / p.Tbar)
    return t, omega0 * pump, omega0 * stokes


def sigmoid_angle(t, p: SigmoidParams):
    """Mixing angle of the sigmoid pair; ``tan(theta) = exp((t - t0)/(2 Tbar))``."""
    pump, stokes = _sigmoid_pair((np.asarray(t, dtype=float) - p.t0) / p.Tbar)
    return np.arctan2(pump, stokes)


def sigmoid_rate(t, p: SigmoidParams):
    return 1.0 / (4.0 * p.Tbar * np.cosh((np.asarray(t, dtype=float) - p.t0) / (2.0 * p.Tbar)))


def sigmoid_schedule(p: SigmoidParams) -> AngleSchedule:
    """Smooth schedule following the sigmoid pulses, without boundary jumps.

    The boundary angles stay at their natural values, slightly above 0 at
    ``t=0`` and below pi/2 at ``t=T``.
    """
    seg = Segment(0.0, p.total_duration, lambda t: sigmoid_angle(t, p), lambda t: sigmoid_rate(t, p))
    return AngleSchedule(p.total_duration, (seg,), (), label="sigmoid")


@dataclass(frozen=True)
class AdiabaticityCheck:
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        """``rhs / lhs``; the condition ``lhs << rhs`` holds when this is large."""
        return self.rhs / self.lhs


def check_adiabaticity(protocol: str, params: SystemParams, *, duration_T: float | None = None,
                       Tbar: float | None = None) -> AdiabaticityCheck:
    """Compare the peak angular velocity with the field amplitude in physical units.

    ``optimal`` uses ``pi/T << Gamma/Omega0``; ``sigmoid`` uses
    ``1/(2 Tbar) << Gamma/Omega0``. No threshold is applied.
    """
    if params.is_reduced_limit:
        raise DomainError("adiabaticity check needs a finite gamma_ratio")
    if protocol in ("optimal", "constant"):
        if duration_T is None:
            raise DomainError(f"{protocol} check needs duration_T")
        _require_duration(duration_T)
        return AdiabaticityCheck(math.pi / duration_T, params.gamma_ratio)
    if protocol == "sigmoid":
        if Tbar is None or not Tbar > 0:
            raise DomainError("sigmoid check needs a positive Tbar")
        return AdiabaticityCheck(1.0 / (2.0 * Tbar), params.gamma_ratio)
    raise DomainError(f"unknown protocol {protocol!r}")


def closed_form_for(protocol: str, duration_T: float) -> float | None:
    """Closed-form efficiency of a protocol, or ``None`` when none exists."""
    if protocol == "optimal":
        return solve(duration_T).efficiency
    if protocol == "constant":
        return constant_closed_form(duration_T)
    return None
