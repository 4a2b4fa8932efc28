"""Adaptive embedded Runge-Kutta integrator (Dormand-Prince 5(4)) for complex arrays.

The right-hand side may be any function ``f(t, y) -> dy/dt`` on numpy arrays
of fixed shape. Output is produced at requested sample times by stepping onto
them exactly, so no interpolation error enters the samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StepFailure

# Dormand & Prince (1980) tableau.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_LOW


@dataclass
class IntegrationStats:
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0
    last_step: float = 0.0


def _error_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))


def dopri5(rhs, y0, times, rtol: float = 1e-10, atol: float = 1e-12, h0: float | None = None,
           max_steps: int = 10_000_000, min_step: float = 0.0, stats: IntegrationStats | None = None):
    """Integrate ``dy/dt = rhs(t, y)`` and return the solution at ``times``.

    Parameters
    ----------
    rhs : callable
    y0 : ndarray
        State at ``times[0]``.
    times : sequence of float
        Non-decreasing sample times; ``times[0]`` is the initial time.
    rtol, atol : float
        Relative and absolute local error tolerances.
    h0 : float, optional
        Initial step; estimated from the derivative if omitted.
    max_steps : int
        Total step budget (accepted and rejected).
    min_step : float
        Smallest step allowed before giving up (defaults to machine-epsilon
        scale of the current time).
    stats : IntegrationStats, optional
        Filled in place with step counts.

    Returns
    -------
    list of ndarray
        ``[y(times[0]), y(times[1]), ...]``.

    Raises
    ------
    StepFailure
        When the step size underflows or the budget is exhausted.
    """
    if rtol <= 0 and atol <= 0:
        raise ValueError("tolerance must be positive")
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("sample times must be non-decreasing")
    if stats is None:
        stats = IntegrationStats()
    y = np.array(y0, dtype=complex)
    t = float(times[0])
    out = [y.copy()]
    k1 = rhs(t, y)
    stats.evaluations += 1
    if h0 is None:
        d0 = np.sqrt(np.mean(np.abs(y) ** 2)) + atol
        d1 = np.sqrt(np.mean(np.abs(k1) ** 2)) + 1e-300
        h0 = 0.01 * d0 / d1
    h = float(h0)
    budget = max_steps
    ks = [None] * 7
    for t_target in times[1:]:
        while t < t_target:
            if budget <= 0:
                raise StepFailure(f"step budget exhausted at t={t:.6g}")
            budget -= 1
            last = False
            h_try = h
            if t + h_try >= t_target or np.isclose(t + h_try, t_target, rtol=1e-12, atol=0):
                h_try = t_target - t
                last = True
            floor = max(min_step, 16 * np.finfo(float).eps * max(abs(t), abs(t_target)))
            if h_try < floor and not last:
                raise StepFailure(f"step size {h_try:.3g} underflows at t={t:.6g}")
            ks[0] = k1
            for i in range(1, 7):
                yi = y.copy()
                for j, a in enumerate(_A[i]):
                    if a != 0.0:
                        yi += (h_try * a) * ks[j]
                ks[i] = rhs(t + _C[i] * h_try, yi)
            stats.evaluations += 6
            y_new = yi  # stage 7 argument is the fifth-order solution
            err = h_try * sum(e * k for e, k in zip(_E, ks) if e != 0.0)
            en = _error_norm(err, y, y_new, rtol, atol)
            if en > 1.0 and h_try <= floor:
                raise StepFailure(f"cannot meet tolerance at t={t:.6g} with step {h_try:.3g}")
            if en <= 1.0:
                t = t_target if last else t + h_try
                y = y_new
                k1 = ks[6]
                stats.steps += 1
                stats.last_step = h_try
                fac = 5.0 if en == 0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
                if not last or fac < 1.0:
                    h = h_try * fac
            else:
                stats.rejected += 1
                h = h_try * max(0.2, 0.9 * en ** -0.2)
                if not np.isfinite(en):
                    h = h_try * 0.2
        out.append(y.copy())
    return out
