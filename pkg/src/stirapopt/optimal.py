"""Bang-singular-bang optimal mixing-angle protocol.

The optimal schedule jumps from 0 to ``theta0`` at t=0, rises linearly with
slope ``u_s = sin(2 theta0)/4`` and jumps to pi/2 at t=T. ``theta0`` is the
unique root in (0, pi/4) of ``(T/4) sin(2 theta0) = pi/2 - 2 theta0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import HALF_PI, AngleSchedule, Jump, SystemParams, linear_segment
from .dynamics import DEFAULT_CONFIG, IntegratorConfig
from .errors import DomainError

QUARTER_PI = 0.25 * math.pi
_EDGE = 1e-15


def _require_duration(T: float) -> None:
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"duration must be positive, got {T!r}")


def _require_theta0(theta0: float) -> None:
    if not (0.0 <= theta0 <= QUARTER_PI):
        raise DomainError(f"theta0={theta0!r} outside [0, pi/4]")


def optimality_residual(theta0: float, T: float) -> float:
    """``(T/4) sin(2 theta0) - (pi/2 - 2 theta0)``; zero at the optimum."""
    return 0.25 * T * math.sin(2.0 * theta0) - HALF_PI + 2.0 * theta0


def solve_theta0(duration_T: float) -> float:
    """Optimal boundary jump angle for normalized duration ``T``.

    The residual has derivative ``(T/2) cos(2 theta) + 2 > 0`` on the bracket
    and changes sign across it, so bisection cannot fail; Newton polishes the
    root once the bracket is below 1e-8.
    """
    _require_duration(duration_T)
    T = duration_T
    lo, hi = _EDGE, QUARTER_PI - _EDGE
    f_lo = optimality_residual(lo, T)
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        f_mid = optimality_residual(mid, T)
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    theta = 0.5 * (lo + hi)
    for _ in range(50):
        f = optimality_residual(theta, T)
        step = f / (0.5 * T * math.cos(2.0 * theta) + 2.0)
        theta_new = min(max(theta - step, lo), hi)
        if abs(theta_new - theta) <= 1e-16 * max(1.0, theta) or f == 0.0:
            theta = theta_new
            break
        theta = theta_new
    return theta


def singular_slope(theta0: float) -> float:
    """Constant angular velocity on the singular arc, ``sin(2 theta0)/4``."""
    _require_theta0(theta0)
    return 0.25 * math.sin(2.0 * theta0)


def decay_rate(theta0: float) -> float:
    """Common decay rate of ``(x, y)`` while on the singular arc."""
    _require_theta0(theta0)
    return 0.25 * (1.0 - math.cos(2.0 * theta0))


def bsb_efficiency(theta0, T):
    """Final target population of the bang-singular-bang family.

    Works elementwise on arrays of ``theta0``; the slope is tied to
    ``theta0`` by the singular feedback law.
    """
    theta0 = np.asarray(theta0, dtype=float)
    u_s = 0.25 * np.sin(2.0 * theta0)
    gamma = 0.25 * (1.0 - np.cos(2.0 * theta0))
    return np.exp(-2.0 * gamma * T) * np.sin(u_s * T) ** 2


@dataclass(frozen=True)
class OptimalSolution:
    duration_T: float
    theta0: float
    u_s: float
    gamma_decay: float
    efficiency: float

    @property
    def initial_jump(self) -> float:
        return self.theta0

    @property
    def final_jump(self) -> float:
        return HALF_PI - self.theta0 - self.u_s * self.duration_T

    @property
    def interior_end_angle(self) -> float:
        return self.theta0 + self.u_s * self.duration_T

    def as_dict(self) -> dict:
        return {
            "T": self.duration_T,
            "theta0": self.theta0,
            "u_s": self.u_s,
            "gamma": self.gamma_decay,
            "efficiency": self.efficiency,
            "initial_jump": self.initial_jump,
            "final_jump": self.final_jump,
        }


def closed_form_efficiency(solution: OptimalSolution) -> float:
    """``exp(-2 gamma T) sin^2(u_s T)`` for the solution's parameters."""
    T = solution.duration_T
    return math.exp(-2.0 * solution.gamma_decay * T) * math.sin(solution.u_s * T) ** 2


def optimal_efficiency_from_root(theta0: float) -> float:
    """Efficiency written in ``theta0`` alone; valid only at the optimal root."""
    return math.exp(-math.tan(theta0) * (math.pi - 4.0 * theta0)) * math.cos(2.0 * theta0) ** 2


def solve(duration_T: float) -> OptimalSolution:
    """Optimal protocol parameters and the predicted transfer efficiency."""
    theta0 = solve_theta0(duration_T)
    u_s = singular_slope(theta0)
    gamma = decay_rate(theta0)
    partial = OptimalSolution(duration_T, theta0, u_s, gamma, float("nan"))
    return OptimalSolution(duration_T, theta0, u_s, gamma, closed_form_efficiency(partial))


def asymptotic_efficiency(duration_T: float, regime: str) -> float:
    """Small-T (``T**2/16``) or large-T (``1 - pi**2/T``) limit of the optimum."""
    _require_duration(duration_T)
    if regime == "small":
        return duration_T**2 / 16.0
    if regime == "large":
        if duration_T <= math.pi**2:
            raise DomainError("large-T asymptote needs T > pi**2")
        return 1.0 - math.pi**2 / duration_T
    raise DomainError(f"regime must be 'small' or 'large', got {regime!r}")


def bsb_schedule(duration_T: float, theta0: float, slope: float, label: str = "bsb") -> AngleSchedule:
    """Jump to ``theta0``, ramp with ``slope``, jump to pi/2."""
    _require_duration(duration_T)
    end = theta0 + slope * duration_T
    if end > HALF_PI:
        raise DomainError("interior ramp overshoots pi/2")
    seg = linear_segment(0.0, duration_T, theta0, slope)
    jumps = (Jump(0.0, 0.0, theta0), Jump(duration_T, end, HALF_PI))
    return AngleSchedule(duration_T, (seg,), jumps, label=label)


def synthesize_schedule(duration_T: float) -> AngleSchedule:
    """Optimal bang-singular-bang schedule for normalized duration ``T``."""
    sol = solve(duration_T)
    return bsb_schedule(duration_T, sol.theta0, sol.u_s, label="optimal")


def synthesize_fields(schedule: AngleSchedule, params: SystemParams | None = None, samples: int = 1000):
    """Sampled pump and Stokes fields ``(t, omega_p, omega_s)`` for a schedule.

    Samples at ``t=0`` and ``t=T`` use the interior one-sided limits
    (``0^+`` and ``T^-``), which is where the optimal fields are nonzero.
    """
    if samples < 2:
        raise DomainError("samples must be >= 2")
    T = schedule.total_duration
    t = np.linspace(0.0, T, samples)
    theta = schedule.sample(t[:-1], side="right").tolist() + [schedule.theta(T, side="left")]
    omega0 = 1.0 if params is None else params.omega0
    theta = np.clip(np.asarray(theta), 0.0, HALF_PI)
    return t, omega0 * np.sin(theta), omega0 * np.cos(theta)


@dataclass
class CostateTrace:
    """Costates and switching function along the singular arc (``mu = 1``)."""

    times: np.ndarray
    y: np.ndarray
    x: np.ndarray
    lambda_x: np.ndarray
    lambda_y: np.ndarray
    mu: float
    phi: np.ndarray
    dphi: np.ndarray
    hc: np.ndarray
    feedback: np.ndarray
    u_s: float
    theta0: float
    adjoint_residual: float

    @property
    def max_phi(self) -> float:
        return float(np.max(np.abs(self.phi)))

    @property
    def max_dphi(self) -> float:
        return float(np.max(np.abs(self.dphi)))

    @property
    def max_hc_drift(self) -> float:
        return float(np.max(np.abs(self.hc - self.hc[0])))

    @property
    def max_feedback_error(self) -> float:
        return float(np.max(np.abs(self.feedback - self.u_s)))

    @property
    def max_ratio_error(self) -> float:
        return float(np.max(np.abs(self.x / self.y - math.tan(self.theta0))))


def verify_singular_conditions(duration_T: float, config: IntegratorConfig = DEFAULT_CONFIG) -> CostateTrace:
    """Propagate the adiabatic state along the singular arc and evaluate the
    necessary conditions for singular optimality.

    The state starts at ``(y, x) = (cos theta0, sin theta0)`` just after the
    initial jump and is integrated with RK4 under the constant slope. Costates
    follow from the singular relations ``lambda_x = -mu/(2y)``,
    ``lambda_y = mu/(2x)``. The adjoint residual compares central finite
    differences of the costates with the right-hand side of the adjoint
    equations.
    """
    sol = solve(duration_T)
    u, theta0, T = sol.u_s, sol.theta0, duration_T
    n = max(config.min_steps_per_segment, math.ceil(T * config.steps_per_unit_time))
    h = T / n
    times = T * (np.arange(n + 1) / n)

    a = np.array([[0.0, -u], [u, -0.5]])
    # Exact RK4 one-step matrix for a constant linear system.
    ha = h * a
    ha2 = ha @ ha
    step = np.eye(2) + ha + ha2 / 2.0 + ha2 @ ha / 6.0 + ha2 @ ha2 / 24.0
    states = np.empty((n + 1, 2))
    states[0] = (math.cos(theta0), math.sin(theta0))
    for k in range(n):
        states[k + 1] = step @ states[k]
    y, x = states[:, 0], states[:, 1]

    mu = 1.0
    lam_x = -mu / (2.0 * y)
    lam_y = mu / (2.0 * x)
    phi = lam_x * y - lam_y * x + mu

    ydot, xdot = -u * x, u * y - 0.5 * x
    lam_y_dot = -u * lam_x
    lam_x_dot = u * lam_y + 0.5 * lam_x
    dphi = lam_x_dot * y + lam_x * ydot - lam_y_dot * x - lam_y * xdot
    hc = phi * u - 0.5 * lam_x * x

    fd_x = np.gradient(lam_x, times, edge_order=2)
    fd_y = np.gradient(lam_y, times, edge_order=2)
    residual = max(np.max(np.abs(fd_x - lam_x_dot)), np.max(np.abs(fd_y - lam_y_dot)))

    feedback = x * y / (2.0 * (x * x + y * y))
    return CostateTrace(times, y, x, lam_x, lam_y, mu, phi, dphi, hc, feedback, u, theta0, float(residual))


def optimality_brute_check(duration_T: float, grid: int = 100_000) -> tuple[float, float]:
    """Grid search of the bang-singular-bang family over ``theta0``.

    Each grid point uses the singular slope ``sin(2 theta0)/4``; points whose
    ramp would overshoot pi/2 are infeasible and excluded. Ties resolve to the
    smallest ``theta0``.
    """
    _require_duration(duration_T)
    if grid < 100:
        raise DomainError("grid must have at least 100 points")
    thetas = np.linspace(0.0, QUARTER_PI, grid + 2)[1:-1]
    eff = bsb_efficiency(thetas, duration_T)
    feasible = thetas + 0.25 * np.sin(2.0 * thetas) * duration_T <= HALF_PI
    eff = np.where(feasible, eff, -np.inf)
    k = int(np.argmax(eff))
    return float(thetas[k]), float(eff[k])


def optimal_fields(duration_T: float, params: SystemParams | None = None, samples: int = 1000):
    return synthesize_fields(synthesize_schedule(duration_T), params, samples)


__all__ = [
    "CostateTrace",
    "OptimalSolution",
    "asymptotic_efficiency",
    "bsb_efficiency",
    "bsb_schedule",
    "closed_form_efficiency",
    "decay_rate",
    "optimal_efficiency_from_root",
    "optimal_fields",
    "optimality_brute_check",
    "optimality_residual",
    "singular_slope",
    "solve",
    "solve_theta0",
    "synthesize_fields",
    "synthesize_schedule",
    "verify_singular_conditions",
]
