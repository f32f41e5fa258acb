"""Riemann theta function with directional derivatives.

theta(z) = sum over n in Z^g of exp(pi*i*<B n, n> + 2*pi*i*<n, z>), which
converges for Im B positive definite.  Arguments are reduced modulo the
lattice Z^g + B Z^g before summation and the exact quasi-periodicity factor
is restored, so the enumeration radius stays small.  The series is summed
over the integer box |n_k| <= radius with the radius chosen from the tail
bound exp(-pi*lambda_min*r^2 + 2*pi*||Im z||*r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import theta_sums, theta_sums_batch
from .errors import OnThetaDivisor, RadiusOverflow

__all__ = [
    "ThetaContext", "JacobianPoint", "theta", "theta_with_derivs",
    "theta_log_dd", "reduce_mod_lattice", "divisor_distance",
    "lattice_residual", "is_lattice_point",
]


@dataclass(frozen=True)
class JacobianPoint:
    """A point of C^g reduced modulo Z^g + B Z^g.

    ``m`` and ``n`` are the integer vectors subtracted: original = z + m + B n.
    """
    z: np.ndarray
    m: np.ndarray
    n: np.ndarray

    @property
    def genus(self) -> int:
        return self.z.size


def _as_matrix(B) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if B.shape[0] != B.shape[1]:
        raise ValueError("B must be square")
    return B


def reduce_mod_lattice(B, z) -> JacobianPoint:
    """Reduce z modulo the period lattice, shrinking Im then Re."""
    B = _as_matrix(B)
    g = B.shape[0]
    z = np.asarray(z, dtype=complex).reshape(g)
    if g == 0:
        return JacobianPoint(z.copy(), np.zeros(0, int), np.zeros(0, int))
    im_inv = np.linalg.inv(B.imag)
    n = np.rint(im_inv @ z.imag).astype(int)
    z1 = z - B @ n
    m = np.rint(z1.real).astype(int)
    return JacobianPoint(z1 - m, m, n)


def lattice_residual(B, v) -> float:
    """Distance-like residual of v from the nearest lattice point."""
    B = _as_matrix(B)
    if B.shape[0] == 0:
        return 0.0
    red = reduce_mod_lattice(B, v)
    return float(np.max(np.abs(red.z))) if red.z.size else 0.0


def is_lattice_point(B, v, tol: float = 1e-8) -> bool:
    return lattice_residual(B, v) <= tol


class ThetaContext:
    """Immutable evaluation context for one Riemann matrix."""

    def __init__(self, B, target_tol: float = 1e-13, radius: int = None,
                 radius_budget: int = 24):
        B = _as_matrix(B)
        self.B = B
        self.g = B.shape[0]
        self.target_tol = float(target_tol)
        self.radius_budget = int(radius_budget)
        self._grids = {}
        if self.g:
            if np.max(np.abs(B - B.T)) > 1e-8 * (1 + np.max(np.abs(B))):
                raise ValueError("B must be symmetric")
            eigs = np.linalg.eigvalsh(B.imag)
            self.lambda_min = float(eigs[0])
            if self.lambda_min <= 0:
                raise ValueError("Im B must be positive definite")
        else:
            self.lambda_min = math.inf
        self.fixed_radius = radius
        # typical magnitude used by divisor-proximity thresholds
        self.theta0 = abs(self._eval(np.zeros(self.g, complex),
                                     np.zeros(self.g, complex))[0]) if self.g else 1.0

    def _radius_for(self, y_norm: float) -> int:
        if self.fixed_radius is not None:
            return self.fixed_radius
        lam = self.lambda_min
        c = math.log(max(3.0 ** self.g * 8.0, 8.0) / self.target_tol) / math.pi
        r = (y_norm + math.sqrt(y_norm * y_norm + lam * c)) / lam
        radius = int(math.ceil(r)) + 2
        if radius > self.radius_budget:
            raise RadiusOverflow(
                f"theta radius {radius} exceeds budget {self.radius_budget}; "
                "reduce the argument modulo the lattice first")
        return radius

    def _grid(self, radius: int):
        got = self._grids.get(radius)
        if got is not None:
            return got
        rng = np.arange(-radius, radius + 1)
        mesh = np.meshgrid(*([rng] * self.g), indexing="ij")
        lattice = np.stack([m.ravel() for m in mesh], axis=1).astype(float)
        quad = 1j * math.pi * np.einsum("ij,jk,ik->i", lattice, self.B, lattice)
        grid = (np.ascontiguousarray(quad.astype(complex)),
                np.ascontiguousarray(lattice))
        self._grids[radius] = grid
        return grid

    def _eval(self, z: np.ndarray, d: np.ndarray):
        radius = self._radius_for(float(np.linalg.norm(z.imag)))
        quad, lattice = self._grid(radius)
        return theta_sums(quad, lattice, np.ascontiguousarray(z),
                          np.ascontiguousarray(d))

    def _eval_batch(self, Z: np.ndarray, d: np.ndarray):
        ynorm = float(np.max(np.linalg.norm(Z.imag, axis=1))) if Z.size else 0.0
        radius = self._radius_for(ynorm)
        quad, lattice = self._grid(radius)
        return theta_sums_batch(quad, lattice, np.ascontiguousarray(Z),
                                np.ascontiguousarray(d))


def _split(ctx: ThetaContext, z) -> tuple:
    red = reduce_mod_lattice(ctx.B, z)
    if ctx.g == 0:
        return red, 0.0 + 0.0j, 0.0 + 0.0j
    n = red.n.astype(float)
    # theta(zeta + m + B n) = exp(-pi*i<Bn,n> - 2pi*i<n,zeta>) theta(zeta)
    logfac = -1j * math.pi * (n @ ctx.B @ n) - 2j * math.pi * (n @ red.z)
    dlog = None  # filled by callers needing the derivative of the factor
    return red, logfac, dlog


def theta(ctx: ThetaContext, z) -> complex:
    """Full theta value at an arbitrary argument (reduction + exact factor)."""
    if ctx.g == 0:
        return 1.0 + 0.0j
    red, logfac, _ = _split(ctx, z)
    s0, _, _ = ctx._eval(red.z, np.zeros(ctx.g, complex))
    return complex(np.exp(logfac) * s0)


def theta_with_derivs(ctx: ThetaContext, z, direction):
    """(theta, d/dt theta, d^2/dt^2 theta) along z + t*direction at t=0."""
    if ctx.g == 0:
        return 1.0 + 0.0j, 0.0 + 0.0j, 0.0 + 0.0j
    d = np.asarray(direction, dtype=complex).reshape(ctx.g)
    red, logfac, _ = _split(ctx, z)
    s0, s1, s2 = ctx._eval(red.z, d)
    fac = np.exp(logfac)
    n = red.n.astype(float)
    c = -2j * math.pi * (n @ d)   # d/dt of the factor's log
    t0 = fac * s0
    t1 = fac * (s1 + c * s0)
    t2 = fac * (s2 + 2 * c * s1 + c * c * s0)
    return complex(t0), complex(t1), complex(t2)


def theta_log_dd(ctx: ThetaContext, z, direction) -> complex:
    """Second logarithmic derivative along ``direction``.

    Invariant under lattice reduction (the quasi-periodicity factor has a
    linear log), so it is computed directly from the reduced sums.
    """
    if ctx.g == 0:
        return 0.0 + 0.0j
    d = np.asarray(direction, dtype=complex).reshape(ctx.g)
    red = reduce_mod_lattice(ctx.B, z)
    s0, s1, s2 = ctx._eval(red.z, d)
    if abs(s0) < 1e-8 * ctx.theta0:
        raise OnThetaDivisor(
            f"|theta|={abs(s0):.3e} below divisor threshold at reduced z={red.z}")
    return complex((s2 * s0 - s1 * s1) / (s0 * s0))


def theta_log_dd_many(ctx: ThetaContext, Z, direction) -> np.ndarray:
    """Batch :func:`theta_log_dd` over rows of Z (reduces each row first)."""
    if ctx.g == 0:
        return np.zeros(len(Z), complex)
    d = np.asarray(direction, dtype=complex).reshape(ctx.g)
    Zr = np.array([reduce_mod_lattice(ctx.B, z).z for z in Z], dtype=complex)
    s0, s1, s2 = ctx._eval_batch(Zr, d)
    bad = np.abs(s0) < 1e-8 * ctx.theta0
    if np.any(bad):
        raise OnThetaDivisor(
            f"{int(bad.sum())} of {len(Z)} arguments on the theta divisor")
    return (s2 * s0 - s1 * s1) / (s0 * s0)


def divisor_distance(ctx: ThetaContext, z) -> float:
    """|theta| after lattice reduction: proximity to the theta divisor."""
    if ctx.g == 0:
        return 1.0
    red = reduce_mod_lattice(ctx.B, z)
    s0, _, _ = ctx._eval(red.z, np.zeros(ctx.g, complex))
    return abs(s0)
