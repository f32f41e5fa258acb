"""Paths in the complex energy plane.

A :class:`Path` is an ordered chain of straight segments and circular arcs,
each parametrized over [0, 1].  Pieces declare inverse-square-root endpoint
singularities of the integrands that will be evaluated along them ("none",
"left", "right", "both"); the quadrature uses this to choose a substitution.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field, replace

__all__ = ["Segment", "Arc", "Path", "Tolerances", "polyline", "circle"]

_SING = ("none", "left", "right", "both")


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex
    sing: str = "none"

    def __post_init__(self):
        if self.sing not in _SING:
            raise ValueError(f"bad singularity tag {self.sing!r}")

    def point(self, t: float) -> complex:
        return self.start + (self.end - self.start) * t

    def velocity(self, t: float) -> complex:
        return self.end - self.start

    def reversed(self) -> "Segment":
        sing = {"left": "right", "right": "left"}.get(self.sing, self.sing)
        return Segment(self.end, self.start, sing)

    @property
    def length(self) -> float:
        return abs(self.end - self.start)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    angle0: float
    angle1: float
    sing: str = "none"

    def __post_init__(self):
        if self.sing not in _SING:
            raise ValueError(f"bad singularity tag {self.sing!r}")

    def point(self, t: float) -> complex:
        a = self.angle0 + (self.angle1 - self.angle0) * t
        return self.center + self.radius * cmath.exp(1j * a)

    def velocity(self, t: float) -> complex:
        a = self.angle0 + (self.angle1 - self.angle0) * t
        return 1j * (self.angle1 - self.angle0) * self.radius * cmath.exp(1j * a)

    def reversed(self) -> "Arc":
        sing = {"left": "right", "right": "left"}.get(self.sing, self.sing)
        return Arc(self.center, self.radius, self.angle1, self.angle0, sing)

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    @property
    def length(self) -> float:
        return abs(self.angle1 - self.angle0) * self.radius


@dataclass(frozen=True)
class Path:
    pieces: tuple = ()

    def __post_init__(self):
        pieces = tuple(self.pieces)
        object.__setattr__(self, "pieces", pieces)
        scale = max((abs(p.start) + abs(p.end) for p in pieces), default=1.0)
        for a, b in zip(pieces, pieces[1:]):
            if abs(a.end - b.start) > 1e-12 * max(1.0, scale):
                raise ValueError("path pieces do not share endpoints")

    @property
    def start(self) -> complex:
        return self.pieces[0].start

    @property
    def end(self) -> complex:
        return self.pieces[-1].end

    @property
    def is_closed(self) -> bool:
        return abs(self.end - self.start) < 1e-12 * max(1.0, abs(self.start))

    def reversed(self) -> "Path":
        return Path(tuple(p.reversed() for p in reversed(self.pieces)))

    def __add__(self, other: "Path") -> "Path":
        return Path(self.pieces + other.pieces)

    def vertices(self):
        pts = [p.start for p in self.pieces]
        pts.append(self.pieces[-1].end)
        return pts


def polyline(points, sing_first="none", sing_last="none") -> Path:
    """Straight-segment path through ``points``.

    ``sing_first``/``sing_last`` declare inverse-sqrt singularities at the
    global start / end (e.g. a path terminating at a branch point).
    """
    pts = [complex(p) for p in points]
    if len(pts) < 2:
        raise ValueError("polyline needs at least two points")
    pieces = []
    n = len(pts) - 1
    for i in range(n):
        sing = "none"
        if i == 0 and sing_first == "left":
            sing = "left"
        if i == n - 1 and sing_last == "right":
            sing = "both" if sing == "left" else "right"
        pieces.append(Segment(pts[i], pts[i + 1], sing))
    return Path(tuple(pieces))


def circle(center: complex, radius: float, n_arcs: int = 4) -> Path:
    """Closed counterclockwise circle assembled from ``n_arcs`` arcs."""
    import math

    step = 2 * math.pi / n_arcs
    pieces = tuple(
        Arc(center, radius, k * step, (k + 1) * step) for k in range(n_arcs)
    )
    return Path(pieces)


@dataclass(frozen=True)
class Tolerances:
    """Numerical targets shared across the library.

    ``delta_branch`` is the exclusion radius around branch points; when built
    from a curve it defaults to 1e-3 times the minimal branch separation.
    """

    quad_tol: float = 1e-10
    ode_tol: float = 1e-10
    root_tol: float = 1e-10
    delta_branch: float = 1e-6

    def __post_init__(self):
        for name in ("quad_tol", "ode_tol", "root_tol", "delta_branch"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def with_(self, **kw) -> "Tolerances":
        return replace(self, **kw)
