"""Real cosine polynomials  phi(t) = a_0 + sum_k a_k cos(2 pi k t).

Coefficients use the cosine convention: ``a_k`` multiplies ``cos 2 pi k t``,
so the exponential Fourier coefficient at +-k is ``a_k / 2`` and the
distinguished coefficient lambda is ``a_1``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

# relative slack added to certified minima for float evaluation error
_EVAL_ULP = 4e-16


def cos2pi(num: int, den: int) -> float:
    """cos(2 pi num/den), exact at the rational points where the cosine is rational.

    The argument is folded into [0, 1/2] first so that equal angles always
    give bit-identical values.
    """
    r = Fraction(num % den, den)
    if r > Fraction(1, 2):
        r = 1 - r
    special = {
        Fraction(0): 1.0,
        Fraction(1, 6): 0.5,
        Fraction(1, 4): 0.0,
        Fraction(1, 3): -0.5,
        Fraction(1, 2): -1.0,
    }
    if r in special:
        return special[r]
    return math.cos(2 * math.pi * r.numerator / r.denominator)


@dataclass(frozen=True)
class CosinePolynomial:
    constant: float = 1.0
    coeffs: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, a in dict(self.coeffs).items():
            k = int(k)
            if k < 1:
                raise ValueError("cosine frequencies must be >= 1")
            clean[k] = a
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @property
    def lam(self):
        """The coefficient of cos 2 pi t."""
        return self.coeffs.get(1, 0.0)

    def spectrum(self) -> list[int]:
        return [k for k, a in self.coeffs.items() if k >= 2 and a != 0]

    def full_spectrum(self) -> list[int]:
        s = self.spectrum()
        return sorted({-1, 0, 1} | set(s) | {-k for k in s})

    def degree(self) -> int:
        return max((k for k, a in self.coeffs.items() if a != 0), default=0)

    def _arrays(self):
        ks = np.array(list(self.coeffs), dtype=float)
        a = np.array([float(v) for v in self.coeffs.values()], dtype=float)
        return ks, a

    def evaluate(self, t):
        """phi(t); accepts a scalar or an array."""
        ks, a = self._arrays()
        tt = np.asarray(t, dtype=float)
        if ks.size == 0:
            out = np.full(tt.shape, float(self.constant))
        else:
            # reduce k t mod 1 before the cosine to keep large arguments accurate
            kt = np.multiply.outer(tt, ks)
            kt -= np.floor(kt)
            out = float(self.constant) + np.cos(2 * np.pi * kt) @ a
        return float(out) if np.ndim(out) == 0 else out

    __call__ = evaluate

    def grid_values(self, m: int) -> np.ndarray:
        """[phi(j/m) for j in 0..m-1] with consistently rounded cosines."""
        if m < 2:
            raise ValueError("grid size must be >= 2")
        out = np.empty(m)
        for j in range(m):
            out[j] = float(self.constant) + sum(float(a) * cos2pi(k * j, m) for k, a in self.coeffs.items())
        return out

    def scaled(self, shift: float) -> CosinePolynomial:
        """(phi + shift) / (1 + shift): nonnegativity shift keeping the constant at 1."""
        s = 1.0 + shift
        return CosinePolynomial((float(self.constant) + shift) / s, {k: float(a) / s for k, a in self.coeffs.items()})

    def derivative_bounds(self) -> tuple[float, float]:
        """Bounds on max|phi'| and max|phi''|."""
        l1 = 2 * math.pi * sum(k * abs(float(a)) for k, a in self.coeffs.items())
        l2 = (2 * math.pi) ** 2 * sum(k * k * abs(float(a)) for k, a in self.coeffs.items())
        return l1, l2

    def to_json(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, Fraction) else float(v)

        return {"constant": enc(self.constant), "coeffs": {str(k): enc(a) for k, a in self.coeffs.items()}}

    @classmethod
    def from_json(cls, obj: dict) -> CosinePolynomial:
        def dec(v):
            return Fraction(v) if isinstance(v, str) else float(v)

        return cls(dec(obj.get("constant", 1.0)), {int(k): dec(v) for k, v in obj.get("coeffs", {}).items()})


def certified_min(phi: CosinePolynomial, n_samples: int) -> tuple[float, float]:
    """Return ``(certified_lower, sampled_min)`` for min over t of phi(t).

    phi is sampled at t = j/n_samples.  Between neighbouring samples the
    minimum can undershoot the smaller endpoint by at most L1 h/2 (first
    derivative bound) and by at most L2 h^2/8 (second derivative bound,
    applied to the linear interpolant); the smaller of the two is used.
    """
    deg = phi.degree()
    if n_samples < max(4 * deg, 1):
        raise ValueError(f"need at least {4 * deg} samples for degree {deg}")
    t = np.arange(n_samples) / n_samples
    vals = phi.evaluate(t)
    sampled = float(np.min(vals))
    l1, l2 = phi.derivative_bounds()
    h = 1.0 / n_samples
    slack = min(l1 * h / 2, l2 * h * h / 8)
    if slack == 0.0:
        return sampled, sampled
    scale = abs(float(phi.constant)) + sum(abs(float(a)) for a in phi.coeffs.values())
    return sampled - slack - _EVAL_ULP * scale * 8, sampled


def coefficients_from_grid(values: Iterable[float], kmax: int | None = None) -> dict[int, float]:
    """Recover cosine coefficients a_0..a_kmax from grid values phi(j/m).

    a_k = (2/m) sum_j v_j cos(2 pi j k/m) for 1 <= k < m/2, while a_0 and (m
    even) a_{m/2} get weight 1/m, since cos(pi j) = (-1)^j carries half the
    quadrature weight on the grid.
    """
    v = [float(x) for x in values]
    m = len(v)
    kmax = m // 2 if kmax is None else kmax
    out = {}
    for k in range(0, kmax + 1):
        w = 1.0 / m if (k == 0 or 2 * k == m) else 2.0 / m
        out[k] = w * math.fsum(v[j] * cos2pi(j * k, m) for j in range(m))
    return out


def witness_zinomega(m: int) -> CosinePolynomial:
    """1 + sum_{k<=(m-1)/2} cos 2pi kt + sum_{k<=m/2} cos 2pi kt.

    On the grid j/m this equals m at j = 0 and vanishes elsewhere.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    coeffs: dict[int, float] = {}
    for k in range(1, (m - 1) // 2 + 1):
        coeffs[k] = coeffs.get(k, 0.0) + 1.0
    for k in range(1, m // 2 + 1):
        coeffs[k] = coeffs.get(k, 0.0) + 1.0
    return CosinePolynomial(1.0, coeffs)


def witness_evencase(m: int) -> CosinePolynomial:
    """1 + sum_{k=1}^{n-1} (1 + cos(pi k/n)) cos 2pi kt with n = m/2.

    Its grid values are m/2 at j = 0, m/4 at j = +-1 and 0 elsewhere, and
    its lambda is 1 + cos(2 pi/m).
    """
    if m < 4 or m % 2:
        raise ValueError("witness_evencase needs an even m >= 4")
    n = m // 2
    return CosinePolynomial(1.0, {k: 1.0 + cos2pi(k, 2 * n) for k in range(1, n)})


def write_samples_csv(phi: CosinePolynomial, path, n_samples: int = 512) -> None:
    t = np.arange(n_samples + 1) / n_samples
    vals = phi.evaluate(t)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "phi"])
        for ti, vi in zip(t, vals):
            w.writerow([f"{ti:.10g}", f"{vi:.17g}"])
