"""Domains in R^d and T^d, orbits of points, and the index sets H(Omega, z).

Shapes are CSG trees over open primitives.  Membership is decided from a
signed margin (positive inside).  With rational data and p in {1, 2, inf}
the margin is an exact ``Fraction`` and the decision never depends on
rounding; otherwise it is a float and points whose margin is within
``TAU_GEOM`` of zero are reported as boundary-ambiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Union as _U

from . import lp as _lp

TAU_GEOM = 1e-12

EUCLIDEAN, TORUS = "euclidean", "torus"

Scalar = _U[Fraction, float]


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryAmbiguous:
    point: tuple
    margin: float

    def __str__(self):
        pt = ", ".join(f"{float(c):.6g}" for c in self.point)
        return f"BoundaryAmbiguous: ({pt}) lies within {TAU_GEOM:g} of the boundary (margin {self.margin:.3g})"


def to_scalar(v) -> Scalar:
    """Parse ``"p/q"`` strings and ints exactly; floats stay floats."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise GeometryError("booleans are not scalars")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GeometryError(f"bad rational {v!r}") from exc
    if isinstance(v, float):
        if not math.isfinite(v):
            raise GeometryError("non-finite coordinate")
        return v
    raise GeometryError(f"cannot interpret {v!r} as a scalar")


def _vec(vs) -> tuple:
    return tuple(to_scalar(v) for v in vs)


def _exact(*vals) -> bool:
    return all(isinstance(v, Fraction) for v in vals)


def scalar_json(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    return float(v)


# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class LpBall:
    p: object  # 1, 2, "inf", or a real > 1
    radius: Scalar
    center: tuple

    def __post_init__(self):
        p = self.p
        if p in ("inf", math.inf):
            p = "inf"
        elif isinstance(p, str):
            p = to_scalar(p)
        if p != "inf" and not (float(p) >= 1):
            raise GeometryError("l_p ball needs p >= 1")
        if p != "inf" and float(p) in (1.0, 2.0):
            p = int(float(p))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "radius", to_scalar(self.radius))
        object.__setattr__(self, "center", _vec(self.center))
        if self.radius <= 0:
            raise GeometryError("radius must be positive")


@dataclass(frozen=True)
class Box:
    halfwidths: tuple
    center: tuple

    def __post_init__(self):
        object.__setattr__(self, "halfwidths", _vec(self.halfwidths))
        object.__setattr__(self, "center", _vec(self.center))
        if len(self.halfwidths) != len(self.center):
            raise GeometryError("box halfwidths and center differ in dimension")
        if any(h <= 0 for h in self.halfwidths):
            raise GeometryError("box halfwidths must be positive")


@dataclass(frozen=True)
class Polytope:
    """Intersection of symmetric slabs |<a_i, x>| < b_i."""

    normals: tuple
    bounds: tuple

    def __post_init__(self):
        object.__setattr__(self, "normals", tuple(_vec(a) for a in self.normals))
        object.__setattr__(self, "bounds", _vec(self.bounds))
        if len(self.normals) != len(self.bounds) or not self.normals:
            raise GeometryError("polytope needs matching, nonempty normals and bounds")
        if any(b <= 0 for b in self.bounds):
            raise GeometryError("polytope bounds must be positive")


@dataclass(frozen=True)
class Union:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise GeometryError("empty union")


@dataclass(frozen=True)
class Intersection:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise GeometryError("empty intersection")


@dataclass(frozen=True)
class Translate:
    child: object
    vector: tuple

    def __post_init__(self):
        object.__setattr__(self, "vector", _vec(self.vector))


Shape = _U[LpBall, Box, Polytope, Union, Intersection, Translate]


def shape_dim(shape) -> int:
    if isinstance(shape, LpBall):
        return len(shape.center)
    if isinstance(shape, Box):
        return len(shape.center)
    if isinstance(shape, Polytope):
        return len(shape.normals[0])
    if isinstance(shape, Translate):
        return len(shape.vector)
    dims = {shape_dim(c) for c in shape.children}
    if len(dims) != 1:
        raise GeometryError("CSG children differ in dimension")
    return dims.pop()


def _lp_norm(y, p):
    if p == "inf":
        return max(abs(v) for v in y)
    if p == 1:
        return sum(abs(v) for v in y)
    return sum(abs(float(v)) ** float(p) for v in y) ** (1 / float(p))


def margin(shape, x) -> Scalar:
    """Signed membership margin: > 0 inside, <= 0 outside."""
    if isinstance(shape, LpBall):
        y = [xi - ci for xi, ci in zip(x, shape.center)]
        r = shape.radius
        if shape.p == 2:
            if _exact(r, *y):
                return r * r - sum(v * v for v in y)
            return float(r) - math.sqrt(sum(float(v) ** 2 for v in y))
        if shape.p in (1, "inf") and _exact(r, *y):
            return r - _lp_norm(y, shape.p)
        return float(r) - float(_lp_norm([float(v) for v in y], shape.p))
    if isinstance(shape, Box):
        vals = [h - abs(xi - ci) for xi, ci, h in zip(x, shape.center, shape.halfwidths)]
        return min(vals)
    if isinstance(shape, Polytope):
        return min(b - abs(sum(ai * xi for ai, xi in zip(a, x))) for a, b in zip(shape.normals, shape.bounds))
    if isinstance(shape, Union):
        return max(margin(c, x) for c in shape.children)
    if isinstance(shape, Intersection):
        return min(margin(c, x) for c in shape.children)
    if isinstance(shape, Translate):
        return margin(shape.child, tuple(xi - vi for xi, vi in zip(x, shape.vector)))
    raise TypeError(f"unknown shape {shape!r}")


def negate(shape):
    """The reflected shape -Omega."""
    if isinstance(shape, LpBall):
        return LpBall(shape.p, shape.radius, tuple(-c for c in shape.center))
    if isinstance(shape, Box):
        return Box(shape.halfwidths, tuple(-c for c in shape.center))
    if isinstance(shape, Polytope):
        return shape
    if isinstance(shape, Union):
        return Union(tuple(negate(c) for c in shape.children))
    if isinstance(shape, Intersection):
        return Intersection(tuple(negate(c) for c in shape.children))
    if isinstance(shape, Translate):
        return Translate(negate(shape.child), tuple(-v for v in shape.vector))
    raise TypeError(f"unknown shape {shape!r}")


def scale_shape(shape, alpha: Scalar):
    """The dilate alpha * Omega (alpha > 0)."""
    a = to_scalar(alpha)
    if isinstance(shape, LpBall):
        return LpBall(shape.p, shape.radius * a, tuple(c * a for c in shape.center))
    if isinstance(shape, Box):
        return Box(tuple(h * a for h in shape.halfwidths), tuple(c * a for c in shape.center))
    if isinstance(shape, Polytope):
        return Polytope(shape.normals, tuple(b * a for b in shape.bounds))
    if isinstance(shape, Union):
        return Union(tuple(scale_shape(c, a) for c in shape.children))
    if isinstance(shape, Intersection):
        return Intersection(tuple(scale_shape(c, a) for c in shape.children))
    if isinstance(shape, Translate):
        return Translate(scale_shape(shape.child, a), tuple(v * a for v in shape.vector))
    raise TypeError(f"unknown shape {shape!r}")


def bounding_box(shape):
    """(lo, hi) coordinate bounds, or None when the shape is unbounded."""
    if isinstance(shape, LpBall):
        r = shape.radius
        return tuple(c - r for c in shape.center), tuple(c + r for c in shape.center)
    if isinstance(shape, Box):
        return (
            tuple(c - h for c, h in zip(shape.center, shape.halfwidths)),
            tuple(c + h for c, h in zip(shape.center, shape.halfwidths)),
        )
    if isinstance(shape, Polytope):
        return _polytope_box(shape)
    if isinstance(shape, Translate):
        bb = bounding_box(shape.child)
        if bb is None:
            return None
        return tuple(l + v for l, v in zip(bb[0], shape.vector)), tuple(h + v for h, v in zip(bb[1], shape.vector))
    boxes = [bounding_box(c) for c in shape.children]
    if isinstance(shape, Union):
        if any(b is None for b in boxes):
            return None
        return (
            tuple(min(col) for col in zip(*(b[0] for b in boxes))),
            tuple(max(col) for col in zip(*(b[1] for b in boxes))),
        )
    boxes = [b for b in boxes if b is not None]
    if not boxes:
        return None
    return (
        tuple(max(col) for col in zip(*(b[0] for b in boxes))),
        tuple(min(col) for col in zip(*(b[1] for b in boxes))),
    )


def _polytope_box(poly: Polytope):
    d = len(poly.normals[0])
    exact = _exact(*poly.bounds, *(v for a in poly.normals for v in a))
    mode = _lp.EXACT if exact else _lp.FLOAT
    hi = []
    for i in range(d):
        prog = _lp.LinearProgram([1 if j == i else 0 for j in range(d)])
        for a, b in zip(poly.normals, poly.bounds):
            prog.add(list(a), _lp.LE, b)
            prog.add(list(a), _lp.GE, -b)
        res = _lp.solve(prog, mode)
        if res.status != "optimal":
            return None
        hi.append(res.value)
    # symmetric slabs: the box is symmetric too
    return tuple(-h for h in hi), tuple(hi)


def interior_radius(shape, x) -> float:
    """Lower bound on the Euclidean distance from x to the complement (0 outside)."""
    if isinstance(shape, LpBall):
        y = [float(xi - ci) for xi, ci in zip(x, shape.center)]
        d = len(y)
        gap = float(shape.radius) - float(_lp_norm(y, shape.p))
        if shape.p == "inf":
            c = 1.0
        else:
            c = d ** max(0.0, 1.0 / float(shape.p) - 0.5)
        return max(0.0, gap / c)
    if isinstance(shape, Box):
        return max(0.0, min(float(h - abs(xi - ci)) for xi, ci, h in zip(x, shape.center, shape.halfwidths)))
    if isinstance(shape, Polytope):
        vals = []
        for a, b in zip(shape.normals, shape.bounds):
            na = math.sqrt(sum(float(v) ** 2 for v in a))
            vals.append(float(b - abs(sum(ai * xi for ai, xi in zip(a, x)))) / na)
        return max(0.0, min(vals))
    if isinstance(shape, Union):
        return max(interior_radius(c, x) for c in shape.children)
    if isinstance(shape, Intersection):
        return min(interior_radius(c, x) for c in shape.children)
    if isinstance(shape, Translate):
        return interior_radius(shape.child, tuple(xi - vi for xi, vi in zip(x, shape.vector)))
    raise TypeError(f"unknown shape {shape!r}")


# ---------------------------------------------------------------------------
# points and domains


@dataclass(frozen=True)
class Point:
    coords: tuple
    irrational: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coords", _vec(self.coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def is_exact(self) -> bool:
        return _exact(*self.coords)

    def scaled(self, k) -> tuple:
        return tuple(k * c for c in self.coords)

    def norm(self) -> float:
        return math.sqrt(sum(float(c) ** 2 for c in self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def to_json(self):
        out = {"coords": [scalar_json(c) for c in self.coords]}
        if self.irrational:
            out["irrational"] = True
        return out

    @classmethod
    def from_json(cls, obj) -> Point:
        if isinstance(obj, dict):
            unknown = set(obj) - {"coords", "irrational"}
            if unknown:
                raise GeometryError(f"unknown point fields: {sorted(unknown)}")
            return cls(tuple(obj["coords"]), bool(obj.get("irrational", False)))
        if isinstance(obj, (list, tuple)):
            return cls(tuple(obj))
        return cls((obj,))


def torus_reduce(x) -> tuple:
    """Representative of x mod Z^d in [-1/2, 1/2)^d."""
    out = []
    for v in x:
        if isinstance(v, Fraction):
            out.append(v - math.floor(v + Fraction(1, 2)))
        else:
            out.append(v - math.floor(v + 0.5))
    return tuple(out)


@dataclass(frozen=True)
class Domain:
    space: str
    dim: int
    shape: object

    def __post_init__(self):
        if self.space not in (EUCLIDEAN, TORUS):
            raise GeometryError(f"unknown space {self.space!r}")
        if self.dim < 1:
            raise GeometryError("dimension must be >= 1")
        if shape_dim(self.shape) != self.dim:
            raise GeometryError("shape dimension does not match domain dimension")
        if self.space == TORUS:
            bb = bounding_box(self.shape)
            half = Fraction(1, 2)
            if bb is None or any(l < -half for l in bb[0]) or any(h > half for h in bb[1]):
                raise GeometryError("torus shapes must fit inside [-1/2, 1/2)^d")

    def contains(self, x, warnings: list | None = None) -> bool:
        x = _vec(x)
        if len(x) != self.dim:
            raise GeometryError(f"point has dimension {len(x)}, domain has {self.dim}")
        if self.space == TORUS:
            x = torus_reduce(x)
        mg = margin(self.shape, x)
        if isinstance(mg, float) and abs(mg) <= TAU_GEOM and warnings is not None:
            warnings.append(BoundaryAmbiguous(tuple(x), mg))
        return mg > 0

    def bounding_box(self):
        return bounding_box(self.shape)

    def bounding_radius(self) -> float:
        bb = bounding_box(self.shape)
        if bb is None:
            raise GeometryError("domain is unbounded")
        r2 = sum(max(abs(float(l)), abs(float(h))) ** 2 for l, h in zip(*bb))
        return math.sqrt(r2) * (1 + 1e-12)

    def interior_radius(self, x) -> float:
        x = _vec(x)
        if self.space == TORUS:
            x = torus_reduce(x)
        return interior_radius(self.shape, x)

    def scaled(self, alpha) -> Domain:
        return Domain(self.space, self.dim, scale_shape(self.shape, alpha))

    def as_space(self) -> Domain:
        return Domain(EUCLIDEAN, self.dim, self.shape)

    def as_torus(self) -> Domain:
        return Domain(TORUS, self.dim, self.shape)

    def to_json(self) -> dict:
        return {"space": self.space, "dim": self.dim, "shape": shape_to_json(self.shape)}

    @classmethod
    def from_json(cls, obj) -> Domain:
        unknown = set(obj) - {"space", "dim", "shape"}
        if unknown:
            raise GeometryError(f"unknown domain fields: {sorted(unknown)}")
        shape = shape_from_json(obj["shape"])
        return cls(obj.get("space", EUCLIDEAN), int(obj.get("dim", shape_dim(shape))), shape)


def membership(domain: Domain, x, warnings: list | None = None) -> bool:
    return domain.contains(x, warnings)


def symmetrize(domain: Domain) -> Domain:
    """Omega intersected with -Omega."""
    return Domain(domain.space, domain.dim, Intersection((domain.shape, negate(domain.shape))))


def interval(a, b=None, space: str = EUCLIDEAN) -> Domain:
    """Open interval (a, b); a single argument h gives (-h, h)."""
    if b is None:
        a, b = -to_scalar(a), to_scalar(a)
    a, b = to_scalar(a), to_scalar(b)
    return Domain(space, 1, Box(((b - a) / 2,), ((a + b) / 2,)))


def cube(h, dim: int, space: str = EUCLIDEAN) -> Domain:
    h = to_scalar(h)
    return Domain(space, dim, Box((h,) * dim, (Fraction(0),) * dim))


def ball(p, radius, dim: int, space: str = EUCLIDEAN) -> Domain:
    return Domain(space, dim, LpBall(p, radius, (Fraction(0),) * dim))


# ---------------------------------------------------------------------------
# norms, orbits, index sets


def minkowski_norm(domain: Domain, z, squared: bool = False):
    """Gauge of a symmetric convex primitive centred at 0.

    Exact (``Fraction``) for boxes, polytopes and l1 / l-inf balls with
    rational data.  For l2 balls ``squared=True`` returns the exact square;
    otherwise a float.
    """
    shape = domain.shape
    z = _vec(z.coords if isinstance(z, Point) else z)
    if isinstance(shape, Box):
        if any(c != 0 for c in shape.center):
            raise GeometryError("minkowski_norm needs a shape centred at 0")
        val = max(abs(zi) / h for zi, h in zip(z, shape.halfwidths))
    elif isinstance(shape, Polytope):
        val = max(abs(sum(a * zi for a, zi in zip(n, z))) / b for n, b in zip(shape.normals, shape.bounds))
    elif isinstance(shape, LpBall):
        if any(c != 0 for c in shape.center):
            raise GeometryError("minkowski_norm needs a shape centred at 0")
        if shape.p == 2:
            if _exact(shape.radius, *z):
                sq = sum(v * v for v in z) / (shape.radius * shape.radius)
                if squared:
                    return sq
                num, den = math.isqrt(sq.numerator), math.isqrt(sq.denominator)
                if num * num == sq.numerator and den * den == sq.denominator:
                    return Fraction(num, den)
                return math.sqrt(sq)
            val = math.sqrt(sum(float(v) ** 2 for v in z)) / float(shape.radius)
        elif shape.p in (1, "inf") and _exact(shape.radius, *z):
            val = _lp_norm(z, shape.p) / shape.radius
        else:
            val = float(_lp_norm([float(v) for v in z], shape.p)) / float(shape.radius)
    else:
        raise GeometryError("minkowski_norm needs a single symmetric convex primitive")
    return val * val if squared else val


@dataclass(frozen=True)
class OrbitInfo:
    size: int | None  # None for an infinite orbit

    @property
    def finite(self) -> bool:
        return self.size is not None

    def label(self) -> str:
        return f"finite:{self.size}" if self.finite else "infinite"


def orbit(z: Point) -> OrbitInfo:
    """Size of {n z mod Z^d}: lcm of the coordinate denominators, or infinite."""
    if z.irrational:
        return OrbitInfo(None)
    if not z.is_exact:
        raise GeometryError("inexact coordinates need an explicit irrationality flag")
    return OrbitInfo(reduce(math.lcm, (c.denominator for c in z.coords), 1))


@dataclass
class HResult:
    elements: list[int]
    bound: int
    complete: bool = True
    orbit: OrbitInfo | None = None
    trivial_zero: bool = False
    warnings: list = field(default_factory=list)


def compute_H_space(domain: Domain, z: Point) -> HResult:
    """{k >= 2 : kz and -kz in Omega}, enumerated up to ceil(R/|z|) + 1."""
    if domain.space != EUCLIDEAN:
        raise GeometryError("compute_H_space needs a Euclidean domain")
    if z.dim != domain.dim:
        raise GeometryError("dimension mismatch")
    if z.is_zero():
        raise GeometryError("z must be nonzero")
    R = domain.bounding_radius()
    K = math.ceil(R / z.norm()) + 1
    warns: list = []
    ks = [k for k in range(2, K + 1) if domain.contains(z.scaled(k), warns) and domain.contains(z.scaled(-k), warns)]
    return HResult(ks, K, warnings=warns)


def compute_H_torus(domain: Domain, z: Point, n_max: int = 256) -> HResult:
    """H_m(Omega, z) for a finite orbit of size m, else H truncated at n_max."""
    if domain.space != TORUS:
        raise GeometryError("compute_H_torus needs a torus domain")
    if z.dim != domain.dim:
        raise GeometryError("dimension mismatch")
    warns: list = []
    orb = orbit(z)
    if not (domain.contains(z.coords, warns) and domain.contains(z.scaled(-1), warns)):
        return HResult([], 0, orbit=orb, trivial_zero=True, warnings=warns)
    if orb.finite:
        top, complete = orb.size // 2, True
    else:
        top, complete = n_max, False
    ks = [k for k in range(2, top + 1) if domain.contains(z.scaled(k), warns) and domain.contains(z.scaled(-k), warns)]
    return HResult(ks, top, complete, orb, warnings=warns)


# ---------------------------------------------------------------------------
# JSON


def shape_to_json(shape) -> dict:
    if isinstance(shape, LpBall):
        p = shape.p if shape.p == "inf" else scalar_json(shape.p) if isinstance(shape.p, Fraction) else shape.p
        return {"type": "ball", "p": p, "radius": scalar_json(shape.radius), "center": [scalar_json(c) for c in shape.center]}
    if isinstance(shape, Box):
        return {
            "type": "box",
            "halfwidths": [scalar_json(h) for h in shape.halfwidths],
            "center": [scalar_json(c) for c in shape.center],
        }
    if isinstance(shape, Polytope):
        return {
            "type": "polytope",
            "normals": [[scalar_json(v) for v in a] for a in shape.normals],
            "bounds": [scalar_json(b) for b in shape.bounds],
        }
    if isinstance(shape, (Union, Intersection)):
        kind = "union" if isinstance(shape, Union) else "intersection"
        return {"type": kind, "children": [shape_to_json(c) for c in shape.children]}
    if isinstance(shape, Translate):
        return {"type": "translate", "vector": [scalar_json(v) for v in shape.vector], "child": shape_to_json(shape.child)}
    raise TypeError(f"unknown shape {shape!r}")


_SHAPE_FIELDS = {
    "ball": {"p", "radius", "center"},
    "box": {"halfwidths", "center"},
    "polytope": {"normals", "bounds"},
    "union": {"children"},
    "intersection": {"children"},
    "translate": {"vector", "child"},
}


def shape_from_json(obj: dict):
    kind = obj.get("type")
    if kind not in _SHAPE_FIELDS:
        raise GeometryError(f"unknown shape type {kind!r}")
    unknown = set(obj) - _SHAPE_FIELDS[kind] - {"type"}
    if unknown:
        raise GeometryError(f"unknown fields for {kind}: {sorted(unknown)}")
    if kind == "ball":
        center = obj.get("center")
        if center is None:
            raise GeometryError("ball needs a center")
        return LpBall(obj.get("p", 2), obj["radius"], tuple(center))
    if kind == "box":
        hw = obj["halfwidths"]
        return Box(tuple(hw), tuple(obj.get("center", [0] * len(hw))))
    if kind == "polytope":
        return Polytope(tuple(tuple(a) for a in obj["normals"]), tuple(obj["bounds"]))
    if kind == "union":
        return Union(tuple(shape_from_json(c) for c in obj["children"]))
    if kind == "intersection":
        return Intersection(tuple(shape_from_json(c) for c in obj["children"]))
    return Translate(shape_from_json(obj["child"]), tuple(obj["vector"]))
