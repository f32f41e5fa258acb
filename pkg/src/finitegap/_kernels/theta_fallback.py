"""Pure-NumPy theta-series kernel.

Same contract as the compiled module: given the per-lattice-point quadratic
phases and the lattice matrix, accumulate the series together with its first
and second directional derivative factors.  Vectorized over lattice points
(scalar argument) or over both points and arguments (batch).
"""

import numpy as np

COMPILED = False


def theta_sums(quad, lattice, z, d):
    """Return (sum, sum', sum'') of exp(quad + 2*pi*i <n,z>) over lattice rows.

    quad:    (N,) complex, pi*i*<B n, n> per lattice row
    lattice: (N, g) float
    z:       (g,) complex argument
    d:       (g,) complex direction (derivative factor 2*pi*i*<n, d>)
    """
    phase = np.exp(quad + 2j * np.pi * (lattice @ z))
    fac = 2j * np.pi * (lattice @ d)
    s0 = phase.sum()
    s1 = (fac * phase).sum()
    s2 = (fac * fac * phase).sum()
    return s0, s1, s2


def theta_sums_batch(quad, lattice, Z, d):
    """Batched variant: Z is (M, g); returns three (M,) arrays."""
    phase = np.exp(quad[None, :] + 2j * np.pi * (Z @ lattice.T))
    fac = (2j * np.pi) * (lattice @ d)
    s0 = phase.sum(axis=1)
    s1 = phase @ fac
    s2 = phase @ (fac * fac)
    return s0, s1, s2
