"""Canonical homology bases on the spectral curve.

Cycles are realized as closed axis-aligned polylines in the E-plane with a
declared starting sheet, built so that the conjugation action comes out in
the adapted form:

* a_j loops enclose the two branch points of the j-th finite cut and cross
  the real axis where the polynomial is negative (so conjugation fixes them);
* for real band cuts, b_j is a tall rectangle through the cut and the
  infinite cut (conjugation negates it);
* for a conjugate pair, the b loop separates the upper from the lower pair
  point, passing through the pair cut and the infinite cut.

Intersection numbers are computed exactly: transversal crossings of the
polyline projections, counted only when the tracked square roots agree at
the crossing, with the planar orientation sign.  For curves with one
conjugate pair the basis is then normalized by an integral symplectic
transformation so that the Riemann matrix acquires the standard reality form
(B + conj(B) = all-ones block); M-curves need no correction (B comes out
purely imaginary).  Multiple conjugate pairs are rejected for adapted bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import (CutSystem, RealStructure, SpectralCurve, TrackedSqrt,
                    principal_w)
from .errors import AdaptedBasisUnavailable, BasisConstructionError
from .geometry import Path, polyline
from .quadrature import integrate_path_param

__all__ = ["Loop", "Chain", "HomologyBasis", "build_homology_basis",
           "intersection_number", "loop_period"]


@dataclass(frozen=True)
class Loop:
    """Closed polyline with a starting sheet (w value at vertices[0])."""
    vertices: tuple
    w_start: complex
    label: str = ""

    @property
    def path(self) -> Path:
        return polyline(list(self.vertices) + [self.vertices[0]])

    def reversed(self) -> "Loop":
        verts = (self.vertices[0],) + tuple(reversed(self.vertices[1:]))
        return Loop(verts, self.w_start, self.label)


@dataclass(frozen=True)
class Chain:
    """Formal integer combination of loops (indices into a loop table)."""
    terms: tuple  # ((coefficient, loop_index), ...)

    @staticmethod
    def single(i: int) -> "Chain":
        return Chain(((1, i),))

    def as_vector(self, n_loops: int) -> np.ndarray:
        v = np.zeros(n_loops, dtype=int)
        for c, i in self.terms:
            v[i] += c
        return v


@dataclass(frozen=True)
class HomologyBasis:
    curve: SpectralCurve
    structure: RealStructure
    loops: tuple                 # geometric loops, a-loops then b-loops
    a_chains: tuple              # g chains
    b_chains: tuple              # g chains
    intersection_matrix: np.ndarray   # 2g x 2g over (a_chains, b_chains)
    loop_periods: np.ndarray     # n_loops x (g+1): loop integrals of E^m dE/w
    adapted: bool                # conjugation-adapted normal form reached
    reality_matrix: np.ndarray   # integer M with conj(B) = M - B (adapted only)

    @property
    def genus(self) -> int:
        return len(self.a_chains)

    def chain_vectors(self):
        n = len(self.loops)
        A = np.array([c.as_vector(n) for c in self.a_chains], dtype=int)
        B = np.array([c.as_vector(n) for c in self.b_chains], dtype=int)
        return A, B


# ---------------------------------------------------------------------------
# exact intersection numbers


def _crossings(l1: Loop, l2: Loop):
    """Transversal crossings of the two polyline projections.

    Returns (t_global_1, t_global_2, sign) per crossing; shared vertices or
    near-tangencies are construction bugs and raise.
    """
    v1 = list(l1.vertices) + [l1.vertices[0]]
    v2 = list(l2.vertices) + [l2.vertices[0]]
    out = []
    for i in range(len(v1) - 1):
        p, dp = v1[i], v1[i + 1] - v1[i]
        for j in range(len(v2) - 1):
            q, dq = v2[j], v2[j + 1] - v2[j]
            den = dp.real * dq.imag - dp.imag * dq.real
            scale = max(abs(dp) * abs(dq), 1e-300)
            if abs(den) < 1e-9 * scale:
                continue
            r = q - p
            t = (r.real * dq.imag - r.imag * dq.real) / den
            u = (r.real * dp.imag - r.imag * dp.real) / den
            if -1e-12 < t < 1 + 1e-12 and -1e-12 < u < 1 + 1e-12:
                if not (1e-9 < t < 1 - 1e-9 and 1e-9 < u < 1 - 1e-9):
                    raise BasisConstructionError(
                        f"degenerate crossing between {l1.label} and {l2.label}"
                        f" at t={t:.3e}, u={u:.3e}")
                out.append((i + t, j + u, 1 if den > 0 else -1))
    return out


def _w_at(curve: SpectralCurve, loop: Loop, tracker: TrackedSqrt, tg: float):
    k = int(tg)
    k = min(k, len(tracker.path.pieces) - 1)
    return tracker(k, tg - k)


def intersection_number(curve: SpectralCurve, l1: Loop, l2: Loop,
                        tr1: TrackedSqrt = None, tr2: TrackedSqrt = None) -> int:
    """Exact surface intersection number of the two lifted loops."""
    tr1 = tr1 or TrackedSqrt(curve, l1.path, l1.w_start)
    tr2 = tr2 or TrackedSqrt(curve, l2.path, l2.w_start)
    total = 0
    for tg1, tg2, sign in _crossings(l1, l2):
        w1 = _w_at(curve, l1, tr1, tg1)
        w2 = _w_at(curve, l2, tr2, tg2)
        if abs(w1 - w2) < abs(w1 + w2):     # same sheet
            total += sign
    return total


def loop_period(curve: SpectralCurve, loop: Loop, power: int,
                tracker: TrackedSqrt = None, quad_tol: float = 1e-12) -> complex:
    """Loop integral of E^power dE / w with the tracked square root."""
    tracker = tracker or TrackedSqrt(curve, loop.path, loop.w_start)

    def f(k, t, E):
        return E ** power / tracker(k, t)

    return integrate_path_param(f, loop.path, quad_tol)


# ---------------------------------------------------------------------------
# geometric construction


def _free_intervals(reals):
    """Open axis intervals between consecutive real branch points."""
    pts = [-np.inf] + list(reals) + [np.inf]
    return [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]


def _p_negative(reals, idx):
    """Is P < 0 on the idx-th free interval (counting from the left)?"""
    return (len(reals) - idx) % 2 == 1


class _Slots:
    """Deterministic non-colliding x positions inside axis intervals."""

    def __init__(self, scale):
        self.scale = scale
        self.used = {}

    def take(self, lo, hi, prefer=0.5):
        key = (lo, hi)
        k = self.used.get(key, 0)
        self.used[key] = k + 1
        offsets = [0.0, 0.17, -0.17, 0.29, -0.29, 0.38, -0.38, 0.08, -0.08]
        frac = prefer + offsets[k % len(offsets)] * (0.9 - abs(prefer - 0.5))
        frac = min(0.92, max(0.08, frac))
        if np.isinf(lo) and np.isinf(hi):
            raise BasisConstructionError("unbounded slot interval")
        if np.isinf(lo):
            return hi - (0.30 + 0.16 * k) * self.scale
        if np.isinf(hi):
            return lo + (0.30 + 0.16 * k) * self.scale
        return lo + (hi - lo) * frac


def _rect(xl, xr, yb, yt):
    return (complex(xl, yb), complex(xr, yb), complex(xr, yt), complex(xl, yt))


def _point_in_polygon(verts, z) -> bool:
    x, y = z.real, z.imag
    inside = False
    n = len(verts)
    for i in range(n):
        x1, y1 = verts[i].real, verts[i].imag
        x2, y2 = verts[(i + 1) % n].real, verts[(i + 1) % n].imag
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def _check_enclosure(curve, verts, wanted, label):
    got = {e for e in curve.branch_points if _point_in_polygon(verts, e)}
    if got != set(wanted):
        raise BasisConstructionError(
            f"{label} encloses {sorted(got, key=lambda z: (z.real, z.imag))}, "
            f"wanted {sorted(wanted, key=lambda z: (z.real, z.imag))}")


def _mk_loop(curve, verts, label):
    return Loop(tuple(verts), principal_w(curve, verts[0]), label)


def _build_axis_loops(curve: SpectralCurve, structure: RealStructure,
                      cuts: CutSystem):
    """Geometric a/b loops for M-curves and single-pair curves.

    Returns (a_loops, b_loops) ordered with real-cut handles first and the
    pair handle (if any) last.
    """
    reals = sorted(structure.real_roots)
    pairs = list(structure.conj_pairs)
    if structure.kind == "nonreal":
        # generic layout: treat the Re-sorted points as an M-like chain
        pts = sorted(curve.branch_points, key=lambda z: (z.real, z.imag))
        return _build_mlike(curve, pts, pair=None)
    if len(pairs) > 1:
        raise AdaptedBasisUnavailable(
            f"{len(pairs)} conjugate pairs: adapted basis construction "
            "supports at most one")
    pair = pairs[0] if pairs else None
    inf_dir = cuts.infinite.direction.real if cuts else 1.0
    return _build_mlike(curve, [complex(r) for r in reals], pair=pair,
                        inf_dir=1.0 if inf_dir >= 0 else -1.0)


def _build_mlike(curve, reals, pair=None, inf_dir=1.0):
    S = curve.scale
    m = len(reals)
    n_real_cuts = (m - 1) // 2
    g = curve.genus
    rr = [z.real for z in reals]
    intervals = _free_intervals(rr)
    slots = _Slots(S)
    h_pair = abs(pair[0].imag) if pair else 0.0
    c_pair = pair[0].real if pair else 0.0

    # height levels (all distinct; see module docstring for the ordering)
    rho = 0.30 * h_pair if pair else 0.0
    def h_a(j):
        if pair:
            return rho * (0.30 + 0.12 * j / max(1, n_real_cuts))
        width = min(rr[-1] - rr[0], S) if m > 1 else S
        return (0.10 + 0.05 * j / max(1, n_real_cuts)) * 0.25 * width
    H_pair = h_pair + 0.30 * S
    h_mid = rho + 0.35 * (h_pair - rho) if pair else 0.0
    h_low = rho + 0.60 * (h_pair - rho) if pair else 0.0
    def H_b(j):
        return H_pair + (0.14 + 0.07 * (g - j)) * S
    H_top = H_pair + (0.14 + 0.07 * g + 0.12) * S

    a_loops, b_loops = [], []

    # ---- real band cuts ----------------------------------------------------
    for j in range(n_real_cuts):
        lo_i, hi_i = 2 * j, 2 * j + 2      # flanking free-interval indices
        if not (_p_negative(rr, lo_i) and _p_negative(rr, hi_i)):
            raise BasisConstructionError("flanking gap sign pattern broken")
        xl = slots.take(*intervals[lo_i], prefer=0.6)
        xr = slots.take(*intervals[hi_i], prefer=0.4)
        h = h_a(j)
        verts = _rect(xl, xr, -h, h)
        _check_enclosure(curve, verts, reals[2 * j:2 * j + 2], f"a{j + 1}")
        a_loops.append(_mk_loop(curve, verts, f"a{j + 1}"))

    for j in range(n_real_cuts):
        xi = 0.5 * (rr[2 * j] + rr[2 * j + 1])
        Xj = rr[-1] + inf_dir * (0.55 + 0.22 * j) * S
        h = H_b(j)
        lo, hi = min(xi, Xj), max(xi, Xj)
        verts = _rect(lo, hi, -h, h)
        wanted = [e for e in curve.branch_points
                  if lo < e.real < hi and abs(e.imag) < h]
        verts_ok = _rect(lo, hi, -h, h)
        _check_enclosure(curve, verts_ok, wanted, f"b{j + 1}")
        if len(wanted) % 2:
            raise BasisConstructionError(f"b{j + 1} encloses an odd set")
        b_loops.append(_mk_loop(curve, verts_ok, f"b{j + 1}"))

    # ---- conjugate pair ----------------------------------------------------
    if pair is not None:
        u = pair[0]
        iv_idx = int(np.searchsorted(rr, c_pair))
        iv = intervals[iv_idx]
        clear = min(c_pair - iv[0], iv[1] - c_pair)
        if _p_negative(rr, iv_idx) and clear > 0.12 * S:
            # straddling rectangle
            eps = min(0.45 * clear, 0.2 * S)
            verts = _rect(c_pair - eps, c_pair + eps, -H_pair, H_pair)
            _check_enclosure(curve, verts, [u, u.conjugate()], f"a{g}")
            a_loops.append(_mk_loop(curve, verts, f"a{g}"))
            a_pair_box = (c_pair - eps, c_pair + eps, H_pair)
            notch = None
        else:
            # horseshoe toward the nearest wide negative interval
            side, idx = None, None
            for dist in range(0, m + 2):
                for cand, sd in ((iv_idx - dist, -1), (iv_idx + dist, +1)):
                    if 0 <= cand < len(intervals) and _p_negative(rr, cand):
                        lo, hi = intervals[cand]
                        width = hi - lo
                        if width > 0.15 * S or np.isinf(width):
                            side, idx = sd, cand
                            break
                if side is not None:
                    break
            if side is None:
                raise AdaptedBasisUnavailable(
                    "no usable negative interval for the pair loop")
            lo, hi = intervals[idx]
            x_outer = slots.take(lo, hi, prefer=0.35 if side < 0 else 0.65)
            x_inner = slots.take(lo, hi, prefer=0.65 if side < 0 else 0.35)
            if side < 0:
                # crossings left of the pair; box opens with a right notch
                x1, x2 = min(x_outer, x_inner), max(x_outer, x_inner)
                far = c_pair + 0.15 * S
                verts = (complex(far, -H_pair), complex(far, -rho),
                         complex(x2, -rho), complex(x2, rho),
                         complex(far, rho), complex(far, H_pair),
                         complex(x1, H_pair), complex(x1, -H_pair))
                a_pair_box = (x1, far, H_pair)
            else:
                x1, x2 = max(x_outer, x_inner), min(x_outer, x_inner)
                far = c_pair - 0.15 * S
                verts = (complex(far, H_pair), complex(far, rho),
                         complex(x2, rho), complex(x2, -rho),
                         complex(far, -rho), complex(far, -H_pair),
                         complex(x1, -H_pair), complex(x1, H_pair))
                a_pair_box = (far, x1, H_pair)
            _check_enclosure(curve, verts, [u, u.conjugate()], f"a{g}")
            a_loops.append(_mk_loop(curve, verts, f"a{g}"))
            notch = (x2, rho)

        # pair b-loop: separates the upper pair point, passes through the
        # pair cut and the infinite cut
        rho_inf = rr[-1]
        X_out = rho_inf + inf_dir * (0.55 + 0.22 * g) * S
        lo_c, hi_c = min(c_pair, rho_inf), max(c_pair, rho_inf)
        blockers = [r for r in rr if lo_c < r < hi_c]
        simple_ok = not blockers
        if simple_ok:
            # x_inner beyond the pair, away from the infinite root
            away = -inf_dir
            iv2 = intervals[int(np.searchsorted(rr, c_pair + away * 1e-9))]
            box_lo, box_hi, _ = a_pair_box
            base = box_lo if away < 0 else box_hi
            if np.isinf(iv2[0] if away < 0 else iv2[1]):
                x_in = base + away * 0.18 * S
            else:
                lim = iv2[0] if away < 0 else iv2[1]
                x_in = base + away * min(0.18 * S, 0.5 * abs(lim - base))
            xl, xr = min(x_in, X_out), max(x_in, X_out)
            verts = _rect(xl, xr, -h_low, H_top)
            wanted = [u] + [e for e in curve.branch_points
                            if abs(e.imag) <= 1e-12 and xl < e.real < xr]
            _check_enclosure(curve, verts, wanted, f"b{g}")
            b_loops.append(_mk_loop(curve, verts, f"b{g}"))
        else:
            # step template: inner crossing in the free interval adjacent to
            # the infinite root, a step reaching over the upper pair point
            adj = int(np.searchsorted(rr, rho_inf)) + (0 if inf_dir > 0 else 1)
            adj_iv = intervals[adj - 1] if inf_dir > 0 else intervals[adj]
            x_in = slots.take(*adj_iv, prefer=0.5)
            box_lo, box_hi, _ = a_pair_box
            b_real_inner = [0.5 * (rr[2 * j] + rr[2 * j + 1])
                            for j in range(n_real_cuts)]
            if inf_dir > 0:
                lim = min(b_real_inner, default=np.inf)
                x_step = min(c_pair - 0.12 * S, lim - 0.15 * S)
                if x_step <= box_lo + 0.04 * S:
                    raise BasisConstructionError("no room for the step leg")
                verts = (complex(x_in, -h_low), complex(x_in, h_mid),
                         complex(x_step, h_mid), complex(x_step, H_top),
                         complex(X_out, H_top), complex(X_out, -h_low))
            else:
                lim = max(b_real_inner, default=-np.inf)
                x_step = max(c_pair + 0.12 * S, lim + 0.15 * S)
                if x_step >= box_hi - 0.04 * S:
                    raise BasisConstructionError("no room for the step leg")
                verts = (complex(x_in, -h_low), complex(x_in, h_mid),
                         complex(x_step, h_mid), complex(x_step, H_top),
                         complex(X_out, H_top), complex(X_out, -h_low))
            _check_enclosure(curve, verts, [u, complex(rho_inf)], f"b{g}")
            b_loops.append(_mk_loop(curve, verts, f"b{g}"))

    return a_loops, b_loops


# ---------------------------------------------------------------------------
# assembly: orientation fixing, reality normalization


def _intersection_matrix(curve, loops):
    n = len(loops)
    trackers = [TrackedSqrt(curve, lp.path, lp.w_start) for lp in loops]
    M = np.zeros((n, n), dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            v = intersection_number(curve, loops[i], loops[j],
                                    trackers[i], trackers[j])
            M[i, j] = v
            M[j, i] = -v
    return M


def _canonical_form(g):
    J = np.zeros((2 * g, 2 * g), dtype=int)
    J[:g, g:] = np.eye(g, dtype=int)
    J[g:, :g] = -np.eye(g, dtype=int)
    return J


def build_homology_basis(curve: SpectralCurve, cuts: CutSystem,
                         structure: RealStructure = None) -> HomologyBasis:
    """Construct, orient, and reality-normalize a canonical basis."""
    from .curve import classify_real_structure

    structure = structure or classify_real_structure(curve)
    g = curve.genus
    if g == 0:
        return HomologyBasis(curve, structure, (), (), (),
                             np.zeros((0, 0), int), np.zeros((0, 1), complex),
                             adapted=structure.is_real,
                             reality_matrix=np.zeros((0, 0), int))

    a_loops, b_loops = _build_axis_loops(curve, structure, cuts)
    if len(a_loops) != g or len(b_loops) != g:
        raise BasisConstructionError(
            f"built {len(a_loops)}+{len(b_loops)} loops for genus {g}")

    loops = list(a_loops) + list(b_loops)
    M = _intersection_matrix(curve, loops)
    # flip b-loop orientations to make a_j . b_j = +1
    for j in range(g):
        if M[j, g + j] == -1:
            loops[g + j] = loops[g + j].reversed()
    M = _intersection_matrix(curve, loops)
    if not np.array_equal(M, _canonical_form(g)):
        raise BasisConstructionError(
            f"geometric intersection matrix is not canonical:\n{M}")

    periods = np.empty((2 * g, g + 1), dtype=complex)
    for i, lp in enumerate(loops):
        tracker = TrackedSqrt(curve, lp.path, lp.w_start)
        for p in range(g + 1):
            periods[i, p] = loop_period(curve, lp, p, tracker)

    raw_a = periods[:g, :g]
    raw_b = periods[g:, :g]
    # normalized differentials in the geometric basis: C raw_a^T = I
    C = np.linalg.solve(raw_a.T.astype(complex),
                        np.eye(g, dtype=complex)).T
    B_geo = raw_b @ C.T
    if np.linalg.eigvalsh(B_geo.imag)[0] < 0:
        raise BasisConstructionError("Im B not positive definite after "
                                     "orientation fixing")

    a_chains = [Chain.single(i) for i in range(g)]
    b_chains = [Chain.single(g + i) for i in range(g)]
    adapted = False
    reality = np.zeros((g, g), dtype=int)

    if structure.kind == "m_curve":
        Mre = 2.0 * B_geo.real
        if np.max(np.abs(Mre)) > 1e-6 * max(1.0, np.max(np.abs(B_geo))):
            raise BasisConstructionError(
                f"M-curve Riemann matrix has real part {Mre}")
        adapted = True
    elif structure.kind == "nonseparating":
        a_chains, b_chains, reality = _normalize_single_pair(
            B_geo, g, a_chains, b_chains)
        adapted = True

    # intersection matrix over the final chains
    A_vec = np.array([c.as_vector(2 * g) for c in a_chains], dtype=int)
    B_vec = np.array([c.as_vector(2 * g) for c in b_chains], dtype=int)
    V = np.vstack([A_vec, B_vec])
    M_final = V @ M @ V.T
    if not np.array_equal(M_final, _canonical_form(g)):
        raise BasisConstructionError("normalized basis lost canonicity")

    return HomologyBasis(curve, structure, tuple(loops), tuple(a_chains),
                         tuple(b_chains), M_final, periods, adapted, reality)


def _normalize_single_pair(B_geo, g, a_chains, b_chains):
    """Integral symplectic transform to the standard reality form.

    In the geometric basis conj(B) = M0 - B with M0 zero except an odd entry
    mu at the pair handle (read off numerically).  The transform
        A_j = a_j (j < g),  A_g = a_1 + ... + a_g,
        B_j = sum_l a_l * P_jl + (b_j - b_g        for j < g
                                  b_g + correction for j = g)
    produces conj(B') = ones - B'.
    """
    M0 = B_geo + np.conj(B_geo)
    M0_int = np.rint(M0.real)
    if (np.max(np.abs(M0 - M0_int)) > 1e-6
            or np.max(np.abs(M0_int[:g - 1, :])) > 0
            or np.max(np.abs(M0_int[:, :g - 1])) > 0):
        raise BasisConstructionError(
            f"unexpected reality defect matrix:\n{M0}")
    mu = int(M0_int[g - 1, g - 1])
    if mu % 2 == 0:
        raise BasisConstructionError(f"pair handle defect {mu} is even")

    S = np.eye(g, dtype=int)
    S[g - 1, :] = 1
    Sinv = np.rint(np.linalg.inv(S)).astype(int)
    Q = Sinv.T.copy()
    # P_jl = colsum_l(S)/2 = 1 for l < g; the pair column balances mu
    P = np.ones((g, g), dtype=int)
    for j in range(g):
        qjg = Q[j, g - 1]
        if (1 - mu * qjg) % 2:
            raise BasisConstructionError("parity broken in normalization")
        P[j, g - 1] = (1 - mu * qjg) // 2

    def chain_from(vec_a, vec_b):
        terms = []
        for l, c in enumerate(vec_a):
            if c:
                terms.append((int(c), l))
        for l, c in enumerate(vec_b):
            if c:
                terms.append((int(c), g + l))
        return Chain(tuple(terms))

    new_a = [chain_from(S[j], np.zeros(g, int)) for j in range(g)]
    new_b = [chain_from(P[j], Q[j]) for j in range(g)]
    return new_a, new_b, np.ones((g, g), dtype=int)
