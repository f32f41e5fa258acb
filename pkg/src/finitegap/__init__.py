"""finitegap: finite-gap Schrodinger potentials from hyperelliptic spectral
data, with PT/reality classification and independent cross-verification
(Dubrovin flow, direct Schrodinger residual, Floquet monodromy)."""

from ._kernels import USING_COMPILED
from .curve import (SheetPoint, SpectralCurve, RealStructure,
                    build_cut_system, classify_real_structure, continue_sqrt)
from .errors import *  # noqa: F401,F403
from .geometry import Arc, Path, Segment, Tolerances, polyline
from .odesolve import solve_ivp
from .quadrature import integrate_path
from .roots import find_root
from .theta import (JacobianPoint, ThetaContext, divisor_distance,
                    is_lattice_point, reduce_mod_lattice, theta, theta_log_dd)

__version__ = "0.1.0"
