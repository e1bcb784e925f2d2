"""Near-extremal positive definite functions built from polynomial witnesses.

Given a feasible cosine polynomial phi = 1 + lambda cos 2pi t + sum c_k cos 2pi kt
and a point z, the measure

    alpha_z = delta_0 + (lambda/2)(delta_z + delta_-z) + sum (c_k/2)(delta_kz + delta_-kz)

has Fourier transform phi(<z, xi>) >= 0.  Convolving it with a small
triangle bump (a normalized self-convolution of a ball indicator) gives a
continuous positive definite function supported in Omega with f(0) = 1 and
f(z) = lambda/2.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import special

from . import geometry as geo
from .trigpoly import CosinePolynomial, certified_min

EPS_FACTOR = 0.9
FEASIBILITY_TOL = 1e-12
# certified minima carry a discretization slack; a polynomial whose samples
# are nonnegative and whose certified bound is within this of 0 is accepted
CERTIFIED_SLACK = 1e-6
TRANSFORM_TOL = 1e-9
VALUE_TOL = 1e-12


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class BumpFunction:
    """Delta_eps: |B_{eps/2}|^-1 (chi * chi) for the ball B_{eps/2}; support radius eps."""

    radius: float
    dim: int

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("bump radius must be positive")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    def __call__(self, x) -> np.ndarray:
        return triangle_eval(self, x)

    def transform(self, xi) -> np.ndarray:
        """Fourier transform at frequencies xi (shape (n, d) or (d,)); always >= 0."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        s = np.linalg.norm(xi, axis=1)
        r = self.radius / 2
        d = self.dim
        if d == 1:
            return self.radius * np.sinc(self.radius * s) ** 2
        vol = math.pi ** (d / 2) * r**d / math.gamma(d / 2 + 1)
        out = np.full(s.shape, vol)
        nz = s > 0
        chi = r ** (d / 2) * special.jv(d / 2, 2 * math.pi * r * s[nz]) / s[nz] ** (d / 2)
        out[nz] = chi * chi / vol
        return out


def triangle_eval(bump: BumpFunction, x) -> np.ndarray | float:
    """Normalized overlap volume of B_{eps/2} and its translate by x.

    In one dimension this is the hat max(0, 1 - |x|/eps).  In higher
    dimensions the lens volume is a regularized incomplete beta function of
    1 - (|x|/eps)^2.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0 or (arr.ndim == 1 and bump.dim > 1)
    pts = arr.reshape(-1, bump.dim)
    u = np.linalg.norm(pts, axis=1) / bump.radius
    if bump.dim == 1:
        out = np.maximum(0.0, 1.0 - u)
    else:
        out = np.zeros_like(u)
        inside = u < 1
        out[inside] = special.betainc((bump.dim + 1) / 2, 0.5, 1.0 - u[inside] ** 2)
    return float(out[0]) if scalar else out


@dataclass
class AtomicMeasure:
    """Finitely many weighted point masses, symmetric under x -> -x."""

    atoms: list[tuple[tuple, float]]
    space: str = geo.EUCLIDEAN

    def __post_init__(self):
        locs = [self._key(x) for x, _ in self.atoms]
        if len(set(locs)) != len(locs):
            raise ConstructionError("atom locations must be distinct")
        table = dict(zip(locs, (w for _, w in self.atoms)))
        for x, w in self.atoms:
            mirror = self._key(tuple(-c for c in x))
            if mirror not in table or table[mirror] != w:
                raise ConstructionError(f"atom at {x} has no mirror image with equal weight")

    def _key(self, x) -> tuple:
        x = tuple(x)
        return geo.torus_reduce(x) if self.space == geo.TORUS else x

    def locations(self) -> np.ndarray:
        return np.array([[float(c) for c in x] for x, _ in self.atoms])

    def weights(self) -> np.ndarray:
        return np.array([float(w) for _, w in self.atoms])

    def transform(self, xi) -> np.ndarray:
        """sum w cos(2 pi <x, xi>); the sine parts cancel by symmetry."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        phase = xi @ self.locations().T
        return np.cos(2 * np.pi * (phase - np.floor(phase))) @ self.weights()


def alpha_measure(z: geo.Point, phi: CosinePolynomial, space: str = geo.EUCLIDEAN) -> AtomicMeasure:
    """delta_0 + sum_k (a_k/2)(delta_kz + delta_-kz) with a_k the coefficients of phi.

    On the torus kz and -kz can coincide (2kz in Z^d); the two halves then
    merge into one atom of weight a_k.
    """
    if z.is_zero():
        raise ConstructionError("z = 0 gives coincident atoms")
    merged: dict[tuple, list] = {}
    order = []

    def put(x, w):
        key = geo.torus_reduce(x) if space == geo.TORUS else tuple(x)
        if key not in merged:
            merged[key] = [x, 0]
            order.append(key)
        merged[key][1] += w

    put(tuple(Fraction(0) if z.is_exact else 0.0 for _ in z.coords), phi.constant)
    for k, a in phi.coeffs.items():
        if a == 0:
            continue
        if space == geo.TORUS and _coincides_with_other(z, k, phi):
            raise ConstructionError(f"multiple {k}z coincides with another multiple on the torus")
        half = a / 2
        put(z.scaled(k), half)
        put(z.scaled(-k), half)
    atoms = []
    for key in order:
        x, w = merged[key]
        loc = geo.torus_reduce(x) if space == geo.TORUS else x
        atoms.append((tuple(loc), w))
    return AtomicMeasure(atoms, space)


def _coincides_with_other(z: geo.Point, k: int, phi: CosinePolynomial) -> bool:
    mine = {geo.torus_reduce(z.scaled(k)), geo.torus_reduce(z.scaled(-k))}
    others = [0] + [j for j in phi.coeffs if j != k and phi.coeffs[j] != 0]
    return any(geo.torus_reduce(z.scaled(j)) in mine for j in others)


@dataclass
class ExtremalFunction:
    measure: AtomicMeasure
    bump: BumpFunction
    domain: geo.Domain
    z: geo.Point
    phi: CosinePolynomial
    eps: float
    meta: dict = field(default_factory=dict)

    def __call__(self, x) -> np.ndarray | float:
        arr = np.asarray(x, dtype=float)
        d = self.domain.dim
        scalar = arr.ndim == 0 or (arr.ndim == 1 and arr.shape[0] == d and (d > 1 or arr.shape[0] == 1))
        pts = arr.reshape(-1, d)
        total = np.zeros(len(pts))
        for loc, w in zip(self.measure.locations(), self.measure.weights()):
            diff = pts - loc
            if self.domain.space == geo.TORUS:
                diff -= np.floor(diff + 0.5)
            total += w * triangle_eval(self.bump, diff).reshape(-1)
        return float(total[0]) if scalar else total

    def transform(self, xi) -> np.ndarray:
        return self.measure.transform(xi) * self.bump.transform(xi)

    @property
    def lam(self) -> float:
        return float(self.phi.lam)

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "atoms": [{"location": [geo.scalar_json(c) for c in x], "weight": float(w)} for x, w in self.measure.atoms],
            **self.meta,
        }


def _pairwise_min(locs: np.ndarray, torus: bool) -> float:
    best = math.inf
    for i in range(len(locs)):
        diff = locs[i + 1 :] - locs[i]
        if torus:
            diff -= np.floor(diff + 0.5)
        if len(diff):
            best = min(best, float(np.min(np.linalg.norm(diff, axis=1))))
    return best


def _check_feasible(domain: geo.Domain, z: geo.Point, phi: CosinePolynomial, n_samples: int) -> float:
    """Return the certified minimum of phi over the frequencies alpha_z can see."""
    orb = geo.orbit(z) if (z.is_exact or z.irrational) else geo.OrbitInfo(None)
    if domain.space == geo.TORUS and orb.finite:
        # the transform of alpha_z only samples phi on the orbit grid
        low = sampled = float(np.min(phi.grid_values(orb.size)))
    else:
        low, sampled = certified_min(phi, max(n_samples, 4 * phi.degree()))
    if sampled < -FEASIBILITY_TOL or low < -CERTIFIED_SLACK:
        raise ConstructionError(f"phi is not nonnegative (certified minimum {low:.3g})")
    return low


def build_extremal_function(
    domain: geo.Domain,
    z: geo.Point,
    phi: CosinePolynomial,
    eps: float | None = None,
    n_samples: int = 1 << 16,
) -> ExtremalFunction:
    """f = alpha_z * Delta_eps with f(0) = 1 and f(z) = lambda/2.

    eps defaults to 0.9 times the binding constraint: half the smallest
    distance between atoms, or the smallest distance from an atom to the
    boundary of Omega.  A smaller eps may be passed explicitly.
    """
    if float(phi.constant) != 1.0:
        raise ConstructionError("phi must have constant term 1")
    low = _check_feasible(domain, z, phi, n_samples)
    measure = alpha_measure(z, phi, domain.space)
    warns: list = []
    radii = []
    for x, _ in measure.atoms:
        if not domain.contains(x, warns):
            raise ConstructionError(f"atom {tuple(map(str, x))} lies outside Omega")
        radii.append(domain.interior_radius(x))
    locs = measure.locations()
    sep = _pairwise_min(locs, domain.space == geo.TORUS)
    bound = min(sep / 2, min(radii))
    if not bound > 0:
        raise ConstructionError("degenerate configuration: no room for a bump")
    limit = EPS_FACTOR * bound
    if eps is None:
        eps = limit
    elif not 0 < eps <= limit:
        raise ConstructionError(f"eps must lie in (0, {limit:.6g}]")
    meta = {"certified_min": low, "separation": sep, "interior_radius": min(radii), "warnings": [str(w) for w in warns]}
    return ExtremalFunction(measure, BumpFunction(eps, domain.dim), domain, z, phi, eps, meta)


def frequency_samples(fn: ExtremalFunction, n_random: int = 2000, seed: int = 0) -> np.ndarray:
    """Frequencies for the transform check.

    A lattice with spacing tied to 1/eps, a fine line along z (so that
    <z, xi> sweeps a full period), and random draws.  On the torus the
    frequencies are integer vectors.
    """
    rng = np.random.default_rng(seed)
    d = fn.domain.dim
    zf = np.array([float(c) for c in fn.z.coords])
    if fn.domain.space == geo.TORUS:
        K = int(min(60, max(4, math.ceil(2 / fn.eps))))
        if d == 1:
            lattice = np.arange(-K, K + 1, dtype=float)[:, None]
        else:
            g = np.arange(-min(K, 30), min(K, 30) + 1, dtype=float)
            lattice = np.stack(np.meshgrid(*([g] * d)), axis=-1).reshape(-1, d)
        rand = rng.integers(-4 * K, 4 * K + 1, size=(n_random, d)).astype(float)
        return np.vstack([lattice, rand])
    scale = 1.0 / fn.eps
    step = scale / 8
    if d == 1:
        lattice = (np.arange(-64, 65) * step)[:, None]
    else:
        g = np.arange(-12, 13) * step
        lattice = np.stack(np.meshgrid(*([g] * d)), axis=-1).reshape(-1, d)
    t = np.linspace(-1.0, 1.0, 4001)
    line = np.outer(t, zf / float(zf @ zf))
    rand = rng.uniform(-4 * scale, 4 * scale, size=(n_random, d))
    return np.vstack([lattice, line, rand])


def _outside_samples(domain: geo.Domain, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    d = domain.dim
    if domain.space == geo.TORUS:
        lo, hi = np.full(d, -0.5), np.full(d, 0.5)
    else:
        bb = domain.bounding_box()
        lo = np.array([float(v) for v in bb[0]])
        hi = np.array([float(v) for v in bb[1]])
        pad = 0.25 * (hi - lo)
        lo, hi = lo - pad, hi + pad
    out = []
    if domain.space == geo.TORUS:
        # the faces of the fundamental cube are never inside an open Omega
        face = rng.uniform(lo, hi, size=(min(n, 1000), d))
        face[np.arange(len(face)), rng.integers(0, d, len(face))] = -0.5
        out.extend(face)
    for _ in range(50):
        if len(out) >= n:
            break
        for x in rng.uniform(lo, hi, size=(max(n, 256), d)):
            if not domain.contains(tuple(float(c) for c in x)):
                out.append(x)
                if len(out) == n:
                    break
    return np.array(out[:n]).reshape(-1, d)


def verify_function(
    fn: ExtremalFunction,
    domain: geo.Domain | None = None,
    z: geo.Point | None = None,
    expected: float | None = None,
    xi: np.ndarray | None = None,
    n_outside: int = 10_000,
    seed: int = 0,
) -> dict:
    """Check f(0) = 1, f(z) = lambda/2, support in Omega and a nonnegative transform."""
    domain = domain or fn.domain
    z = z or fn.z
    expected = fn.lam / 2 if expected is None else expected
    d = domain.dim
    checks = {}
    f0 = fn(np.zeros(d))
    checks["a"] = {"name": "f(0) = 1", "value": f0, "passed": abs(f0 - 1.0) <= VALUE_TOL}
    fz = fn(np.array([float(c) for c in z.coords]))
    checks["b"] = {"name": "f(z) = lambda/2", "value": fz, "expected": expected, "passed": abs(fz - expected) <= VALUE_TOL}
    outside = _outside_samples(domain, n_outside, seed)
    vals = fn(outside)
    nonzero = int(np.count_nonzero(vals))
    checks["c"] = {"name": "support in Omega", "samples": len(outside), "nonzero": nonzero, "passed": nonzero == 0}
    xi = frequency_samples(fn, seed=seed) if xi is None else np.atleast_2d(xi)
    tr = fn.transform(xi)
    bad = np.nonzero(tr < -TRANSFORM_TOL)[0]
    checks["d"] = {
        "name": "nonnegative transform",
        "samples": len(xi),
        "min": float(tr.min()),
        "violations": [{"xi": xi[i].tolist(), "value": float(tr[i])} for i in bad[:10]],
        "passed": len(bad) == 0,
    }
    return {"checks": checks, "passed": all(c["passed"] for c in checks.values())}


def perturbed(fn: ExtremalFunction, shift: float = 0.1) -> ExtremalFunction:
    """Copy of fn with the weights at +-z raised by ``shift`` (a negative control)."""
    zt = tuple(fn.z.coords)
    mz = tuple(fn.z.scaled(-1))
    key = (lambda x: geo.torus_reduce(x)) if fn.domain.space == geo.TORUS else (lambda x: tuple(x))
    targets = {key(zt), key(mz)}
    atoms = [(x, w + shift if key(x) in targets else w) for x, w in fn.measure.atoms]
    return ExtremalFunction(AtomicMeasure(atoms, fn.measure.space), fn.bump, fn.domain, fn.z, fn.phi, fn.eps, dict(fn.meta))


def write_section_csv(fn: ExtremalFunction, path, direction=None, n: int = 1001) -> None:
    """(s, f(s u)) along the unit direction u (default: towards z)."""
    d = fn.domain.dim
    u = np.array([float(c) for c in (direction if direction is not None else fn.z.coords)], dtype=float)
    u /= np.linalg.norm(u)
    if fn.domain.space == geo.TORUS:
        reach = 0.5
    else:
        reach = fn.domain.bounding_radius()
    s = np.linspace(-reach, reach, n)
    vals = fn(np.outer(s, u).reshape(-1, d))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s"] + [f"x{i}" for i in range(d)] + ["f"])
        for si, vi in zip(s, vals):
            w.writerow([f"{si:.10g}"] + [f"{si * c:.10g}" for c in u] + [f"{vi:.17g}"])
