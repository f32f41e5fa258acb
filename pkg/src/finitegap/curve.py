"""The hyperelliptic spectral curve w^2 = P(E) and its real structure.

Branch points are the input; the polynomial is always evaluated in product
form.  The antiholomorphic involution (w, E) -> (conj w, conj E) classifies
the curve as an M-curve (all branch points real), non-separating with n real
ovals (2n-1 real branch points), or non-real.  Square roots along paths are
never taken on a principal branch: :func:`continue_sqrt` tracks w by
continuity from a declared start value.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AmbiguousPairing, CutCollision, DegenerateCurve, StepTooCoarse
from .geometry import Path, Segment, polyline

__all__ = [
    "SpectralCurve", "RealStructure", "SheetPoint", "Cut", "CutSystem",
    "classify_real_structure", "build_cut_system", "continue_sqrt",
    "principal_w", "track_w",
]


@dataclass(frozen=True)
class SpectralCurve:
    branch_points: tuple
    match_tol: float

    def __init__(self, branch_points: Sequence[complex], match_tol: float = None):
        pts = tuple(complex(e) for e in branch_points)
        if len(pts) % 2 == 0 or len(pts) < 1:
            raise DegenerateCurve(
                f"need an odd number of branch points, got {len(pts)}")
        if match_tol is None:
            match_tol = 1e-8 * max(1.0, max(abs(e) for e in pts))
        object.__setattr__(self, "branch_points", pts)
        object.__setattr__(self, "match_tol", float(match_tol))
        if len(pts) > 1:
            seps = [abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]]
            spread = max(abs(a - b) for a in pts for b in pts)
            # simple zeros only; near-collisions are rejected, not handled
            if min(seps) <= 1e-2 * spread:
                raise DegenerateCurve(
                    f"branch points nearly collide (min separation {min(seps):.3e})")

    @property
    def genus(self) -> int:
        return (len(self.branch_points) - 1) // 2

    @property
    def min_separation(self) -> float:
        pts = self.branch_points
        if len(pts) == 1:
            return 1.0
        return min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:])

    @property
    def delta_branch(self) -> float:
        return 1e-3 * self.min_separation

    @property
    def scale(self) -> float:
        pts = self.branch_points
        spread = max(abs(a - b) for a in pts for b in pts) if len(pts) > 1 else 1.0
        return max(spread, 1e-12)

    def poly(self, E: complex) -> complex:
        out = 1.0 + 0.0j
        for e in self.branch_points:
            out *= (E - e)
        return out

    def poly_deriv(self, E: complex) -> complex:
        pts = self.branch_points
        out = 0.0 + 0.0j
        for i in range(len(pts)):
            term = 1.0 + 0.0j
            for j, e in enumerate(pts):
                if j != i:
                    term *= (E - e)
            out += term
        return out


@dataclass(frozen=True)
class SheetPoint:
    """A point (E, w) on the curve with its tracked square root."""
    E: complex
    w: complex

    def check(self, curve: SpectralCurve, tol: float = None) -> bool:
        p = curve.poly(self.E)
        tol = curve.match_tol if tol is None else tol
        return abs(self.w * self.w - p) <= tol * (1.0 + abs(p))

    def conjugate(self) -> "SheetPoint":
        return SheetPoint(self.E.conjugate(), self.w.conjugate())

    def involution(self) -> "SheetPoint":
        return SheetPoint(self.E, -self.w)


@dataclass(frozen=True)
class RealStructure:
    kind: str                # "m_curve" | "nonseparating" | "nonreal"
    n_ovals: int             # fixed ovals of the antiinvolution (0 if nonreal)
    mu: tuple                # half-period vector, entries 0.0 or 0.5
    real_roots: tuple        # sorted real branch points
    conj_pairs: tuple        # ((upper, lower), ...) sorted by real part

    @property
    def is_real(self) -> bool:
        return self.kind != "nonreal"


def classify_real_structure(curve: SpectralCurve) -> RealStructure:
    """Pair branch points under conjugation and identify the real type."""
    tol = curve.match_tol
    g = curve.genus
    reals, uppers, lowers = [], [], []
    for e in curve.branch_points:
        if abs(e.imag) <= tol:
            reals.append(e.real)
        elif e.imag > 0:
            uppers.append(e)
        else:
            lowers.append(e)
    pairs = []
    pool = list(lowers)
    matched = True
    for u in sorted(uppers, key=lambda z: (z.real, z.imag)):
        best, best_d = None, np.inf
        for v in pool:
            d = abs(v - u.conjugate())
            if d < best_d:
                best, best_d = v, d
        if best is None or best_d > tol:
            matched = False
            continue
        near = [v for v in pool if abs(v - u.conjugate()) <= tol]
        if len(near) > 1:
            raise AmbiguousPairing(
                f"{len(near)} candidates pair with {u:.6g} within match_tol")
        pool.remove(best)
        pairs.append((u, best))
    for e in curve.branch_points:
        if tol < abs(e.imag) <= 10 * tol:
            raise AmbiguousPairing(
                f"branch point {e:.6g} sits in the match_tol boundary band")
    if not matched or pool:
        return RealStructure("nonreal", 0, (0.0,) * g, tuple(sorted(reals)),
                             tuple(pairs))
    reals = tuple(sorted(reals))
    if len(reals) == len(curve.branch_points):
        return RealStructure("m_curve", g + 1, (0.0,) * g, reals, ())
    n = (len(reals) + 1) // 2
    mu = tuple([0.5] * n + [0.0] * (g - n))
    return RealStructure("nonseparating", n, mu, reals, tuple(pairs))


# ---------------------------------------------------------------------------
# sheet-tracked square roots


def principal_w(curve: SpectralCurve, E: complex) -> complex:
    """Reference value of sqrt(P(E)) from principal logs of each factor.

    Used only to seed continuations and to label sheets in reports; all
    analytic continuation goes through :func:`track_w`.
    """
    s = 0.0 + 0.0j
    for e in curve.branch_points:
        s += cmath.log(E - e)
    return cmath.exp(0.5 * s)


def _step_w(curve: SpectralCurve, E_new: complex, w_prev: complex,
            predicted: complex = None) -> complex:
    cand = cmath.sqrt(curve.poly(E_new))
    ref = w_prev if predicted is None else predicted
    return cand if abs(cand - ref) <= abs(cand + ref) else -cand


class TrackedSqrt:
    """Continuous branch of sqrt(P) along one path.

    Checkpoints are laid out adaptively so consecutive values never become
    ambiguous; queries continue from the nearest checkpoint in one step.
    """

    def __init__(self, curve: SpectralCurve, path: Path, w_start: complex,
                 max_refine: int = 28):
        self.curve = curve
        self.path = path
        p0 = curve.poly(path.pieces[0].point(0.0))
        if abs(w_start * w_start - p0) > curve.match_tol * (1.0 + abs(p0)) * 1e6:
            raise ValueError("w_start is not on the curve at the path start")
        self.checkpoints = []  # per piece: (ts array, ws list)
        w = complex(w_start)
        for piece in path.pieces:
            ts = [0.0]
            ws = [w]
            t = 0.0
            dt = 0.125
            while t < 1.0:
                t_new = min(1.0, t + dt)
                ok = False
                for _ in range(max_refine):
                    E_new = piece.point(t_new)
                    cand = cmath.sqrt(self.curve.poly(E_new))
                    w_prev = ws[-1]
                    d_keep, d_flip = abs(cand - w_prev), abs(cand + w_prev)
                    lo, hi = min(d_keep, d_flip), max(d_keep, d_flip)
                    wmag = max(abs(w_prev), abs(cand))
                    if lo <= 0.5 * wmag or lo <= 0.25 * hi or wmag == 0.0:
                        ok = True
                        break
                    t_new = t + 0.5 * (t_new - t)
                if not ok:
                    raise StepTooCoarse(
                        f"cannot disambiguate sheet near E={piece.point(t_new):.6g}")
                w_new = cand if d_keep <= d_flip else -cand
                ts.append(t_new)
                ws.append(w_new)
                dt = min(0.125, 2.0 * (t_new - t))
                t = t_new
            self.checkpoints.append((np.array(ts), ws))
            w = ws[-1]
        self.w_end = w

    def __call__(self, piece_index: int, t: float) -> complex:
        ts, ws = self.checkpoints[piece_index]
        i = int(np.searchsorted(ts, t))
        i = max(0, min(i, len(ts) - 1))
        if abs(ts[i] - t) > (abs(ts[i - 1] - t) if i > 0 else np.inf):
            i -= 1
        piece = self.path.pieces[piece_index]
        E = piece.point(t)
        w_cp = ws[i]
        predicted = None
        sing_end = None
        if piece.sing in ("left", "both") and t < 0.5:
            sing_end = piece.point(0.0)
        elif piece.sing in ("right", "both") and t >= 0.5:
            sing_end = piece.point(1.0)
        if sing_end is not None:
            # near a declared branch endpoint w ~ sqrt(E - E_b): rescale
            E_cp = piece.point(ts[i])
            den = E_cp - sing_end
            if abs(den) > 0:
                predicted = w_cp * cmath.sqrt((E - sing_end) / den)
        return _step_w(self.curve, E, w_cp, predicted)


def track_w(curve: SpectralCurve, path: Path, w_start: complex) -> TrackedSqrt:
    return TrackedSqrt(curve, path, w_start)


def continue_sqrt(curve: SpectralCurve, path: Path, w_start: complex) -> SheetPoint:
    """Continue w from the path start; return the endpoint (E, w)."""
    tracker = TrackedSqrt(curve, path, w_start)
    return SheetPoint(path.end, tracker.w_end)


# ---------------------------------------------------------------------------
# cut system


@dataclass(frozen=True)
class Cut:
    kind: str            # "band" | "pair" | "infinite"
    endpoints: tuple     # branch points joined (one entry for "infinite")
    waypoints: tuple     # polyline in the finite plane (detours included)
    unbounded: bool = False
    direction: complex = 1.0 + 0j   # ray direction for the infinite cut

    def as_path(self) -> Path:
        return polyline(self.waypoints)


@dataclass(frozen=True)
class CutSystem:
    cuts: tuple          # finite cuts, one per handle (g of them)
    infinite: Cut

    def all_cuts(self):
        return tuple(self.cuts) + (self.infinite,)


def _seg_intersect(p1, p2, q1, q2, eps=1e-12) -> bool:
    """Do closed segments [p1,p2] and [q1,q2] intersect?"""
    d1 = p2 - p1
    d2 = q2 - q1
    den = (d1.real * d2.imag - d1.imag * d2.real)
    r = q1 - p1
    scale = max(abs(d1), abs(d2), 1e-30)
    if abs(den) < eps * scale * scale:
        # parallel: check collinear overlap
        cross = d1.real * r.imag - d1.imag * r.real
        if abs(cross) > eps * scale * max(abs(r), scale):
            return False
        t0 = (r.real * d1.real + r.imag * d1.imag) / (abs(d1) ** 2 + 1e-300)
        t1 = t0 + (d2.real * d1.real + d2.imag * d1.imag) / (abs(d1) ** 2 + 1e-300)
        lo, hi = min(t0, t1), max(t0, t1)
        return hi >= -eps and lo <= 1 + eps
    t = (r.real * d2.imag - r.imag * d2.real) / den
    u = (r.real * d1.imag - r.imag * d1.real) / den
    return -eps <= t <= 1 + eps and -eps <= u <= 1 + eps


def _cut_paths_intersect(w1, w2) -> bool:
    for a1, a2 in zip(w1, w1[1:]):
        for b1, b2 in zip(w2, w2[1:]):
            if _seg_intersect(a1, a2, b1, b2):
                return True
    return False


def build_cut_system(curve: SpectralCurve, structure: RealStructure) -> CutSystem:
    """Cut layout: real roots paired from the left, conjugate pairs joined
    vertically (with a deterministic horizontal detour when the straight
    vertical would hit another cut or branch point), last real root to
    infinity.  Non-real curves get the generic layout by real-part order.
    """
    g = curve.genus
    if structure.kind == "nonreal":
        return _generic_cut_system(curve)
    reals = list(structure.real_roots)
    pairs = list(structure.conj_pairs)
    cuts = []
    for i in range(0, len(reals) - 1, 2):
        a, b = reals[i], reals[i + 1]
        cuts.append(Cut("band", (complex(a), complex(b)),
                        (complex(a), complex(b))))
    inf_root = reals[-1]
    scale = curve.scale

    def vertical_waypoints(u, l, detour):
        if detour == 0.0:
            return (l, u)
        c = u.real
        rho = 0.35 * abs(u.imag - l.imag) / 2
        return (l, complex(c + detour, -rho), complex(c + detour, rho), u)

    # choose detours for conjugate pairs
    pair_cuts = []
    axis_obstacles = sorted(set(reals))
    for (u, l) in pairs:
        c = u.real
        clearance = min((abs(c - r) for r in axis_obstacles), default=np.inf)
        for r0, r1 in zip(reals[0::2], reals[1::2]):
            if r0 - curve.delta_branch <= c <= r1 + curve.delta_branch:
                clearance = 0.0
        detour = 0.0
        if clearance <= 0.05 * scale:
            # deterministic rightward detour into the nearest free stretch
            right_obst = min((r for r in axis_obstacles if r >= c - 1e-12),
                             default=None)
            base = c if right_obst is None else right_obst
            next_obst = min((r for r in axis_obstacles if r > base + 1e-12),
                            default=base + scale)
            detour = (base - c) + 0.25 * (next_obst - base)
            if detour == 0.0:
                detour = 0.25 * scale
        pair_cuts.append(Cut("pair", (u, l), vertical_waypoints(u, l, detour)))
    cuts.extend(pair_cuts)

    # infinite cut: rightward unless that ray would cross a pair cut
    far = max(max(abs(e) for e in curve.branch_points), abs(inf_root)) + 3 * scale
    direction = 1.0
    ray = (complex(inf_root), complex(far))
    for pc in pair_cuts:
        if _cut_paths_intersect(ray, pc.waypoints):
            direction = -1.0
            ray = (complex(inf_root), complex(-far))
            break
    infinite = Cut("infinite", (complex(inf_root),), ray, unbounded=True,
                   direction=complex(direction))

    all_wp = [c.waypoints for c in cuts] + [infinite.waypoints]
    for i in range(len(all_wp)):
        for j in range(i + 1, len(all_wp)):
            if _cut_paths_intersect(all_wp[i], all_wp[j]):
                raise CutCollision(
                    f"cuts {i} and {j} intersect; no valid layout found")
    if len(cuts) != g:
        raise CutCollision(f"expected {g} finite cuts, built {len(cuts)}")
    return CutSystem(tuple(cuts), infinite)


def _generic_cut_system(curve: SpectralCurve) -> CutSystem:
    pts = sorted(curve.branch_points, key=lambda z: (z.real, z.imag))
    cuts = []
    for i in range(0, len(pts) - 1, 2):
        cuts.append(Cut("band", (pts[i], pts[i + 1]), (pts[i], pts[i + 1])))
    scale = curve.scale
    far = max(abs(e) for e in pts) + 3 * scale
    infinite = Cut("infinite", (pts[-1],), (pts[-1], complex(far, pts[-1].imag)),
                   unbounded=True)
    all_wp = [c.waypoints for c in cuts] + [infinite.waypoints]
    for i in range(len(all_wp)):
        for j in range(i + 1, len(all_wp)):
            if _cut_paths_intersect(all_wp[i], all_wp[j]):
                raise CutCollision("generic layout failed: cuts intersect")
    return CutSystem(tuple(cuts), infinite)
