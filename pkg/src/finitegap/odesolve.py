"""Adaptive complex ODE integration.

Dormand-Prince 5(4) with the classical quartic dense-output interpolant,
operating on complex state vectors.  Local error per step is controlled to
``ode_tol``; a collapsing step raises :class:`StepUnderflow`, which is the
designated signal for approaching singularities (e.g. colliding Dubrovin
points).
"""

from __future__ import annotations

import bisect
import math

import numpy as np

from .errors import StepUnderflow
from .geometry import Tolerances

__all__ = ["solve_ivp", "Trajectory"]

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])
# Dense-output coefficients (Shampine's quartic interpolant).
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


class Trajectory:
    """Dense solution of one integration.

    Evaluation at stored step points returns the step values verbatim; in
    between, the embedded quartic interpolant is used.
    """

    def __init__(self, ts, ys, qs, direction):
        self.ts = ts                  # step points, monotone in direction
        self.ys = ys                  # state at step points
        self._qs = qs                 # per-step interpolant matrices (n x 4)
        self.direction = direction

    @property
    def t(self):
        return np.array(self.ts)

    @property
    def y(self):
        return np.array(self.ys)

    def __call__(self, t: float) -> np.ndarray:
        ts = self.ts
        s = self.direction
        if not (min(s * ts[0], s * ts[-1]) - 1e-12 <= s * t
                <= max(s * ts[0], s * ts[-1]) + 1e-12):
            raise ValueError(f"t={t} outside integration span")
        keys = [s * x for x in ts]
        i = bisect.bisect_left(keys, s * t)
        if i < len(ts) and ts[i] == t:
            return self.ys[i].copy()
        i = max(1, min(i, len(ts) - 1))
        t0, t1 = ts[i - 1], ts[i]
        if t == t0:
            return self.ys[i - 1].copy()
        h = t1 - t0
        theta = (t - t0) / h
        powers = np.array([theta, theta**2, theta**3, theta**4])
        return self.ys[i - 1] + h * (self._qs[i - 1] @ powers)


def _error_norm(err, y0, y1, tol):
    scale = tol + tol * np.maximum(np.abs(y0), np.abs(y1))
    return math.sqrt(float(np.mean(np.abs(err / scale) ** 2)))


def solve_ivp(rhs, y0, span, tol: Tolerances | float = None,
              max_step: float = np.inf, first_step: float = None,
              step_hook=None) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` over ``span = (t0, t1)``.

    ``step_hook(t, y)``, if given, runs after each accepted step and may
    return a corrected state (used e.g. to re-project sheet constraints).
    """
    ode_tol = tol.ode_tol if isinstance(tol, Tolerances) else (
        Tolerances().ode_tol if tol is None else float(tol))
    t0, t1 = float(span[0]), float(span[1])
    direction = 1.0 if t1 >= t0 else -1.0
    y = np.asarray(y0, dtype=complex).copy()
    n = y.size

    f = np.asarray(rhs(t0, y), dtype=complex)
    total = abs(t1 - t0)
    if total == 0:
        return Trajectory([t0], [y.copy()], [], direction)
    if first_step is None:
        scale = float(np.max(np.abs(y))) + 1.0
        fscale = float(np.max(np.abs(f))) + 1e-30
        h = min(total / 10.0, 0.1 * scale / fscale, max_step)
    else:
        h = min(first_step, total, max_step)
    h_min = 1e-14 * max(1.0, total)

    ts = [t0]
    ys = [y.copy()]
    qs = []
    K = np.empty((7, n), dtype=complex)
    t = t0
    while direction * (t1 - t) > 0:
        h = min(h, abs(t1 - t), max_step)
        if h < h_min:
            raise StepUnderflow(f"step size {h:.3e} underflow at t={t:.6g}")
        hd = direction * h
        K[0] = f
        for i in range(1, 7):
            yi = y + hd * (_A[i] @ K[:i])
            K[i] = np.asarray(rhs(t + _C[i] * hd, yi), dtype=complex)
        y_new = y + hd * (_B @ K)
        err = _error_norm(hd * (_E @ K), y, y_new, ode_tol)
        if err <= 1.0:
            t_new = t1 if abs(t1 - (t + hd)) < 1e-14 * max(1.0, abs(t1)) else t + hd
            if step_hook is not None:
                adj = step_hook(t_new, y_new)
                if adj is not None:
                    y_new = np.asarray(adj, dtype=complex)
            qs.append(K.T @ _P)
            ts.append(t_new)
            ys.append(y_new.copy())
            # FSAL: K[6] was evaluated at (t+h, y_new) before any hook
            f = (np.asarray(rhs(t_new, y_new), dtype=complex)
                 if step_hook is not None else K[6].copy())
            t, y = t_new, y_new
            factor = 10.0 if err == 0 else min(10.0, 0.9 * err ** -0.2)
            h *= max(0.2, factor)
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
    return Trajectory(ts, ys, qs, direction)
