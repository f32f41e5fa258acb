"""Complex scalar root refinement.

Damped Newton iteration with a central-difference derivative when none is
supplied.  Double roots converge at the linear Newton rate and are accepted
once the residual target is met; a vanishing derivative away from a root is
reported as :class:`DerivativeVanishes`.
"""

from __future__ import annotations

from .errors import DerivativeVanishes, NoConvergence
from .geometry import Tolerances

__all__ = ["find_root"]


def find_root(f, guess: complex, tol: Tolerances | float = None,
              fprime=None, max_iter: int = 200) -> complex:
    root_tol = tol.root_tol if isinstance(tol, Tolerances) else (
        Tolerances().root_tol if tol is None else float(tol))
    z = complex(guess)
    fz = f(z)
    for _ in range(max_iter):
        if abs(fz) <= root_tol:
            return z
        if fprime is not None:
            d = fprime(z)
        else:
            h = 1e-7 * (1.0 + abs(z))
            d = (f(z + h) - f(z - h)) / (2.0 * h)
        if abs(d) < 1e-14 * (1.0 + abs(fz)):
            raise DerivativeVanishes(
                f"|f'|={abs(d):.3e} with residual {abs(fz):.3e} at z={z:.6g}")
        dz = -fz / d
        # damp if the full step does not decrease the residual
        for _ in range(25):
            z_try = z + dz
            f_try = f(z_try)
            if abs(f_try) < abs(fz) or abs(dz) < 1e-16 * (1.0 + abs(z)):
                break
            dz *= 0.5
        else:
            raise NoConvergence(f"no descent direction at z={z:.6g}")
        z, fz = z_try, f_try
    if abs(fz) <= root_tol:
        return z
    raise NoConvergence(
        f"residual {abs(fz):.3e} above tol {root_tol:.3e} after {max_iter} iterations")
