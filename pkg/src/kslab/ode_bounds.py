"""The superlinear comparison ODE y' = -A y^alpha + B and its decay bound.

For A > 0, B >= 0, alpha > 1 every nonnegative solution satisfies
y(t) <= C t^(1/(1-alpha)) + C with the explicit constant
C = max((A(alpha-1))^(1/(1-alpha)), (B/A)^(1/alpha)), independent of the
initial value. This module provides the constant, the bound curve, the
closed-form pure-decay solution, and an RK4 integrator for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OdeBoundParams:
    A: float
    B: float
    alpha: float
    y0: float

    def __post_init__(self):
        if self.A <= 0:
            raise ValueError(f"A must be > 0, got {self.A}")
        if self.B < 0:
            raise ValueError(f"B must be >= 0, got {self.B}")
        if self.alpha <= 1:
            raise ValueError(f"alpha must be > 1, got {self.alpha}")
        if self.y0 < 0:
            raise ValueError(f"y0 must be >= 0, got {self.y0}")


def bound_constant(A: float, B: float, alpha: float) -> float:
    """max((A(alpha-1))^(1/(1-alpha)), (B/A)^(1/alpha))."""
    OdeBoundParams(A, B, alpha, 0.0)
    return max((A * (alpha - 1.0)) ** (1.0 / (1.0 - alpha)), (B / A) ** (1.0 / alpha))


def bound_value(A: float, B: float, alpha: float, t: float) -> float:
    """Initial-data independent bound C t^(1/(1-alpha)) + C, defined for t > 0."""
    if t <= 0:
        raise ValueError(f"t must be > 0, got {t}")
    C = bound_constant(A, B, alpha)
    return C * t ** (1.0 / (1.0 - alpha)) + C


def power_decay_solution(z0: float, A: float, alpha: float, t: float) -> float:
    """Closed-form solution of z' = -A z^alpha, z(0) = z0 > 0."""
    if z0 <= 0:
        raise ValueError(f"z0 must be > 0, got {z0}")
    OdeBoundParams(A, 0.0, alpha, z0)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return (A * (alpha - 1.0) * t + z0 ** (1.0 - alpha)) ** (1.0 / (1.0 - alpha))


def _rhs(y: float, A: float, B: float, alpha: float) -> float:
    # Stage values may dip below zero; clamp inside the power to stay real.
    return -A * max(y, 0.0) ** alpha + B


def integrate_ode(params: OdeBoundParams, T: float, dt: float):
    """RK4 trajectory of y' = -A y^alpha + B, clamped at 0, sampled every dt.

    Internally the step size is limited by the local stiffness
    A*alpha*y^(alpha-1) so that huge initial values relax accurately; if a step
    still leaves [0, y0 + B*T + 1] it is halved up to 10 times before erroring.
    Returns (t, y) arrays including t = 0 and t = T.
    """
    if T <= 0:
        raise ValueError(f"T must be > 0, got {T}")
    if dt > T / 100.0:
        raise ValueError(f"dt must be <= T/100, got dt={dt}, T={T}")
    A, B, alpha = params.A, params.B, params.alpha
    y_cap = params.y0 + B * T + 1.0
    n_samples = int(round(T / dt))
    ts = np.linspace(0.0, n_samples * dt, n_samples + 1)
    ys = np.empty(n_samples + 1)
    ys[0] = params.y0
    y = params.y0
    t = 0.0
    for i in range(1, n_samples + 1):
        t_target = ts[i]
        while t < t_target - 1e-15 * T:
            stiffness = A * alpha * max(y, 0.0) ** (alpha - 1.0)
            h = min(dt, t_target - t, 0.12 / (stiffness + 1e-300))
            y_new = _rk4_step(y, h, A, B, alpha)
            halvings = 0
            while not (np.isfinite(y_new) and -1e-9 * y_cap <= y_new <= y_cap):
                halvings += 1
                if halvings > 10:
                    raise RuntimeError(
                        f"ODE step rejected at t={t:.6g} after 10 halvings "
                        f"(y={y:.6g}, step={h:.3g})"
                    )
                h *= 0.5
                y_new = _rk4_step(y, h, A, B, alpha)
            y = max(y_new, 0.0)
            t += h
        ys[i] = y
    return ts, ys


def _rk4_step(y: float, h: float, A: float, B: float, alpha: float) -> float:
    k1 = _rhs(y, A, B, alpha)
    k2 = _rhs(y + 0.5 * h * k1, A, B, alpha)
    k3 = _rhs(y + 0.5 * h * k2, A, B, alpha)
    k4 = _rhs(y + h * k3, A, B, alpha)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
