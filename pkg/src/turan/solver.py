"""Extremal values of positive definite functions and their polynomial forms.

The pointwise extremal value of a positive definite function supported in
Omega equals half of a Caratheodory-Fejer type quantity M(H) attached to the
index set H(Omega, z); on the torus with a finite orbit of size m it is half
of the grid-discretized M_m(H_m).  M_m is a finite linear program.  M(H) is
bracketed: a nonnegative witness polynomial gives the lower end, a grid
relaxation (with a dual certificate) or the duality M(H) M(N_2 \\ H) = 2
gives the upper end.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import sympy

from . import geometry as geo
from . import lp as _lp
from .indexset import Degenerate, IndexSet, as_index_set
from .trigpoly import CosinePolynomial, certified_min, cos2pi

EXACT, BRACKET, UNBOUNDED, TRIVIAL_ZERO, TRIVIAL_ONE = "exact", "bracket", "unbounded", "trivial_zero", "trivial_one"

RATIONAL_MAX_M = 64
EXACT_WIDTH = 1e-9

# libm cosines are within one ulp; 2^-52 covers it with room
_COS_ERR = 2.3e-16


@dataclass
class SolverConfig:
    n_trunc: int = 64
    m_grid: int | None = None
    n_samples: int = 1 << 16
    arithmetic: str | None = None  # None: rational for m <= 64, float above

    def grid(self) -> int:
        return self.m_grid if self.m_grid is not None else 16 * self.n_trunc + 1

    def to_json(self) -> dict:
        return {
            "N_trunc": self.n_trunc,
            "m_grid": self.grid(),
            "N_samples": self.n_samples,
            "arithmetic": self.arithmetic or "auto",
        }


def _mode_for(m: int, mode: str | None) -> str:
    if mode in (None, "auto"):
        return _lp.EXACT if m <= RATIONAL_MAX_M else _lp.FLOAT
    if mode not in (_lp.EXACT, _lp.FLOAT):
        raise ValueError(f"unknown arithmetic {mode!r}")
    return mode


# ---------------------------------------------------------------------------
# discrete problem M_m(H)


@dataclass
class DiscreteSolution:
    status: str  # "optimal" | "unbounded"
    m: int
    value: float | None = None
    exact: Fraction | None = None
    witness: CosinePolynomial | None = None
    reduced: tuple[int, ...] | None = None
    degenerate: Degenerate | None = None
    lp: _lp.LPResult | None = None
    program: _lp.LinearProgram | None = None
    rows: list[int] = field(default_factory=list)

    @property
    def unbounded(self) -> bool:
        return self.status == "unbounded"


@lru_cache(maxsize=32)
def _cos_lookup(m: int) -> np.ndarray:
    return np.array([cos2pi(r, m) for r in range(m)])


def _cos_table(ks: Sequence[int], js: Sequence[int], m: int) -> np.ndarray:
    """table[r, i] = cos(2 pi ks[i] js[r] / m), bit-identical to cos2pi."""
    idx = np.outer(np.asarray(list(js), dtype=np.int64), np.asarray(list(ks), dtype=np.int64)) % m
    return _cos_lookup(m)[idx]


def _coef_program(ks: Sequence[int], table: np.ndarray) -> _lp.LinearProgram:
    """Dual form of  max a_1  s.t.  1 + sum_k a_k cos 2pi k t_r >= 0  for all rows r.

    Variables are multipliers u_r >= 0 on the points; the program is
    max -sum u subject to sum_r u_r cos 2pi k t_r = -[k = 1] for each k.
    Its multipliers on those equalities are the coefficients a_k, and its
    optimal value is -M.  With one row per frequency the tableau stays
    small even on fine grids.
    """
    n = table.shape[0]
    prog = _lp.LinearProgram([-1] * n, bounds=[(0, None)] * n)
    for i in range(len(ks)):
        prog.add(list(table[:, i]), _lp.EQ, -1 if i == 0 else 0)
    return prog


def _solve_coef(ks, table, mode):
    prog = _coef_program(ks, table)
    res = _lp.solve(prog, mode)
    return prog, res


def solve_discrete(H, m: int, mode: str | None = None) -> DiscreteSolution:
    """M_m(H): max lambda with 1 + lambda cos 2pi t + sum c_k cos 2pi kt >= 0 on j/m.

    H is reduced mod m first; a member congruent to 0 or +-1 makes the value
    infinite.  By symmetry only j = 0..m//2 need constraints.
    """
    if m < 2:
        raise ValueError("grid size must be >= 2")
    red = as_index_set(H).reduce_mod(m)
    if isinstance(red, Degenerate):
        return DiscreteSolution("unbounded", m, degenerate=red)
    ks = [1] + list(red.elements)
    mode = _mode_for(m, mode)
    rows = list(range(m // 2 + 1))
    prog, res = _solve_coef(ks, _cos_table(ks, rows, m), mode)
    if res.status == "infeasible":
        # the dual is infeasible exactly when the grid problem is unbounded
        return DiscreteSolution("unbounded", m, reduced=red.elements, lp=res, program=prog, rows=rows)
    if res.status != "optimal":
        raise _lp.LPError(f"unexpected LP status {res.status}")
    value = -res.value
    exact = value if isinstance(value, Fraction) else None
    witness = CosinePolynomial(1.0, {k: float(a) for k, a in zip(ks, res.dual)})
    return DiscreteSolution("optimal", m, float(value), exact, witness, red.elements, None, res, prog, rows)


def _exact_inverse(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next(r for r in range(c, n) if A[r][c] != 0)
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [v * inv for v in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


def extraction_matrix(m: int, mode: str = _lp.FLOAT):
    """Rows E[k] with a_k = sum_j E[k][j] v_j, for half-grid values v_j = phi(j/m).

    Float mode applies the discrete cosine weights (2/m, or 1/m at k = 0 and
    k = m/2, times the multiplicity of j in the full grid).  Rational mode
    uses the exact inverse of the rounded cosine table, so the value-space
    program describes exactly the same rational feasible set as the
    coefficient-space one.
    """
    h = m // 2
    if mode == _lp.EXACT:
        tab = [[Fraction(cos2pi(k * j, m)) for k in range(h + 1)] for j in range(h + 1)]
        return _exact_inverse(tab)
    mult = [1 if (j == 0 or 2 * j == m) else 2 for j in range(h + 1)]
    E = []
    for k in range(h + 1):
        w = 1.0 / m if (k == 0 or 2 * k == m) else 2.0 / m
        E.append([w * mult[j] * cos2pi(k * j, m) for j in range(h + 1)])
    return E


def solve_discrete_value_space(H, m: int, mode: str | None = None) -> DiscreteSolution:
    """M_m(H) from the grid values themselves.

    Variables are v_j = phi(j/m) >= 0 on the half grid; the mean is pinned to
    1, every frequency in [2, m/2] outside H(m) is forced to vanish, and the
    extracted coefficient at frequency 1 is maximized.
    """
    if m < 2:
        raise ValueError("grid size must be >= 2")
    red = as_index_set(H).reduce_mod(m)
    if isinstance(red, Degenerate):
        return DiscreteSolution("unbounded", m, degenerate=red)
    mode = _mode_for(m, mode)
    h = m // 2
    E = extraction_matrix(m, mode)
    keep = set(red.elements)
    prog = _lp.LinearProgram(list(E[1]), bounds=[(0, None)] * (h + 1))
    prog.add(list(E[0]), _lp.EQ, 1)
    for k in range(2, h + 1):
        if k not in keep:
            prog.add(list(E[k]), _lp.EQ, 0)
    res = _lp.solve(prog, mode)
    if res.status != "optimal":
        return DiscreteSolution(res.status, m, reduced=red.elements, lp=res, program=prog)
    v = res.x
    coeffs = {}
    for k in [1] + list(red.elements):
        coeffs[k] = float(sum(E[k][j] * v[j] for j in range(h + 1)))
    exact = res.value if isinstance(res.value, Fraction) else None
    return DiscreteSolution(
        "optimal", m, float(res.value), exact, CosinePolynomial(1.0, coeffs), red.elements, None, res, prog, list(range(h + 1))
    )


def grid_upper_certificate(sol: DiscreteSolution) -> float:
    """Rigorous upper bound on M(H) from the dual of a solved grid program.

    With u_j >= 0 the point multipliers, any phi >= 0 in Phi(H) obeys
    0 <= sum_j u_j phi(t_j) = sum u + sum_k a_k g_k, g_k = sum_j u_j cos 2pi k t_j.
    Coefficients of such phi satisfy |a_k| <= 2, which turns the residuals of
    the (approximate) stationarity conditions into a safe correction.
    """
    ks = [1] + list(sol.reduced)
    u = [max(0.0, float(v)) for v in sol.lp.x]
    tab = [[Fraction(v) for v in row] for row in _cos_table(ks, sol.rows, sol.m)]
    uf = [Fraction(x) for x in u]
    total = sum(uf, Fraction(0))
    g = [sum((uf[r] * tab[r][i] for r in range(len(uf))), Fraction(0)) for i in range(len(ks))]
    err = float(total) * _COS_ERR * 2
    denom = -float(g[0]) - err
    if denom <= 0:
        return math.inf
    num = float(total) + sum(2 * (abs(float(gk)) + err) for gk in g[1:])
    return math.nextafter(num / denom * (1 + 1e-15), math.inf)


# ---------------------------------------------------------------------------
# enclosures of M(H)


@dataclass
class Enclosure:
    lower: float
    upper: float
    status: str
    lower_witness: CosinePolynomial | None = None
    certificates: list[dict] = field(default_factory=list)
    exact: Fraction | None = None
    H: object = None
    warnings: list[str] = field(default_factory=list)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    def contains(self, v: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= v <= self.upper + slack

    def halved(self) -> Enclosure:
        return Enclosure(
            self.lower / 2,
            self.upper / 2,
            self.status,
            self.lower_witness,
            list(self.certificates),
            self.exact / 2 if self.exact is not None else None,
            self.H,
            list(self.warnings),
        )

    def value_json(self) -> dict:
        out = {"lower": self.lower, "upper": self.upper, "status": self.status}
        if self.exact is not None:
            out["exact"] = f"{self.exact.numerator}/{self.exact.denominator}"
        return out


def _status(lower: float, upper: float) -> str:
    return EXACT if upper - lower <= EXACT_WIDTH else BRACKET


def _exchange(ks: list[int], sol: DiscreteSolution, n_samples: int, rounds: int = 6) -> CosinePolynomial:
    """Push the grid optimum towards a polynomial that is nonnegative everywhere.

    Local minima of the sampled polynomial that are negative get added as
    extra constraint points and the program is solved again.  This only
    improves the witness; certification happens afterwards.
    """
    base = _cos_table(ks, sol.rows, sol.m)
    kv = np.asarray(ks, dtype=float)
    t = np.arange(n_samples) / n_samples
    x = list(sol.lp.dual)
    extra: list[float] = []
    for _ in range(rounds):
        v = CosinePolynomial(1.0, dict(zip(ks, x))).evaluate(t)
        dips = np.nonzero((v < -1e-9) & (v <= np.roll(v, 1)) & (v <= np.roll(v, -1)))[0]
        if len(dips) == 0:
            break
        dips = dips[np.argsort(v[dips])[: 2 * len(ks)]]
        extra.extend(float(t[i]) for i in dips)
        kt = np.multiply.outer(np.asarray(extra), kv)
        tab = np.vstack([base, np.cos(2 * np.pi * (kt - np.floor(kt)))])
        try:
            _, res = _solve_coef(ks, tab, _lp.FLOAT)
        except _lp.LPError:
            break
        if not res.optimal:
            break
        x = list(res.dual)
    return CosinePolynomial(1.0, dict(zip(ks, (float(a) for a in x))))


def certified_lower(elements: Iterable[int], cfg: SolverConfig) -> tuple[float, CosinePolynomial, DiscreteSolution | None]:
    """Certified lower bound on M(T) for a finite T, with its nonnegative witness.

    The grid optimum is refined by an exchange step and then shifted:
    (phi + delta)/(1 + delta), with delta from a certified minimum, lies in
    Phi(T), so lambda/(1 + delta) is a valid lower bound.  1 + cos 2pi t
    gives the floor 1.
    """
    T = sorted(elements)
    base = CosinePolynomial(1.0, {1: 1.0})
    sol = solve_discrete(T, cfg.grid(), _lp.FLOAT)
    if sol.unbounded:
        raise ValueError("grid too coarse for the truncated index set (aliasing)")
    n = max(cfg.n_samples, 4 * max(T, default=1))
    phi = _exchange([1] + list(sol.reduced), sol, n)
    cl, _ = certified_min(phi, n)
    delta = max(0.0, -cl)
    lam = float(phi.lam) / (1.0 + delta)
    lam = math.nextafter(lam * (1 - 1e-15), -math.inf)
    if lam <= 1.0:
        return 1.0, base, sol
    return lam, phi.scaled(delta), sol


def _check_aliasing(T: Sequence[int], cfg: SolverConfig) -> None:
    top = max(T, default=0)
    if cfg.grid() <= 2 * top + 2:
        raise ValueError(f"m_grid={cfg.grid()} must exceed 2*max(H)+2={2 * top + 2}")


def bracket_M(H, cfg: SolverConfig | None = None, use_duality: bool | None = None) -> Enclosure:
    """Certified enclosure [lower, upper] of M(H).

    ``use_duality=None`` computes the duality bound only when the grid
    relaxation does not apply (H infinite or reaching past N_trunc); the
    grid bound is far tighter whenever it is available.
    """
    cfg = cfg or SolverConfig()
    H = as_index_set(H)
    T = H.truncate(cfg.n_trunc)
    _check_aliasing(T, cfg)
    m = cfg.grid()
    lower, witness, sol = certified_lower(T, cfg)
    certs = [{"kind": "LowerWitness", "N_trunc": cfg.n_trunc, "m_grid": m, "N_samples": cfg.n_samples}]
    upper, best = 2.0, {"kind": "Universal"}
    finite_inside = H.is_finite and (H.max_finite() or 0) <= cfg.n_trunc
    if finite_inside and sol is not None:
        ub = grid_upper_certificate(sol)
        certs.append({"kind": "GridRelaxation", "m": m, "bound": ub})
        if ub < upper:
            upper, best = ub, certs[-1]
    if use_duality is None:
        use_duality = not finite_inside
    if use_duality:
        comp = H.complement()
        cT = comp.truncate(cfg.n_trunc)
        _check_aliasing(cT, cfg)
        clow, _, _ = certified_lower(cT, cfg)
        ub = math.nextafter(2.0 / clow, math.inf)
        certs.append({"kind": "Duality", "N_trunc": cfg.n_trunc, "complement_lower": clow, "bound": ub})
        if ub < upper:
            upper, best = ub, certs[-1]
    if upper < lower:
        # only possible through rounding at the 1e-15 level
        upper = lower
    best["binding"] = True
    return Enclosure(lower, upper, _status(lower, upper), witness, certs, None, H)


# ---------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class ClosedForm:
    value: sympy.Expr
    name: str

    def __float__(self) -> float:
        return float(self.value)


def _closed_form_table():
    pi, cos = sympy.pi, sympy.cos
    return {
        "fejer": lambda n: 2 * cos(pi / (n + 2)),
        "single": lambda n: 1 / cos(pi / (2 * n)),
        "all_but": lambda n: 2 * cos(pi / (2 * n)),
        "tail": lambda n: 1 / cos(pi / (n + 2)),
        "odd": lambda: 4 / pi,
        "even": lambda: pi / 2,
        "empty": lambda: sympy.Integer(1),
        "full": lambda: sympy.Integer(2),
    }


CLOSED_FORMS = _closed_form_table()


def closed_form(H, table: dict | None = None) -> ClosedForm | None:
    """Known values of M(H) for the classical index sets, as exact expressions."""
    t = table or CLOSED_FORMS
    H = as_index_set(H)
    if H.is_finite:
        el = H.elements()
        if not el:
            return ClosedForm(t["empty"](), "empty")
        if el == list(range(2, el[-1] + 1)):
            n = el[-1]
            return ClosedForm(t["fejer"](n), f"[2,{n}]")
        if len(el) == 1:
            n = el[0]
            return ClosedForm(t["single"](n), f"{{{n}}}")
        return None
    if H.include:
        return None
    from .indexset import Base, Residues

    if H.base == Base.FULL:
        ex = sorted(H.exclude)
        if not ex:
            return ClosedForm(t["full"](), "N2")
        if ex == list(range(2, ex[-1] + 1)):
            n = ex[-1]
            return ClosedForm(t["tail"](n), f"({n},inf)")
        if len(ex) == 1:
            n = ex[0]
            return ClosedForm(t["all_but"](n), f"N2\\{{{n}}}")
        return None
    if isinstance(H.base, Residues) and H.base.modulus == 2 and not H.exclude:
        if H.base.residues == frozenset([1]):
            return ClosedForm(t["odd"](), "odd")
        return ClosedForm(t["even"](), "even")
    return None


def _with_closed_form(enc: Enclosure, H: IndexSet) -> Enclosure:
    cf = closed_form(H)
    if cf is None:
        return enc
    v = float(cf)
    if not enc.contains(v, 1e-12):
        enc.warnings.append(f"closed form {cf.name}={v:.12g} lies outside the computed bracket; keeping the bracket")
        return enc
    enc.certificates.append({"kind": "ClosedForm", "name": cf.name, "expression": str(cf.value), "bracket": [enc.lower, enc.upper]})
    return Enclosure(v, v, EXACT, enc.lower_witness, enc.certificates, None, H, enc.warnings)


# ---------------------------------------------------------------------------
# pointwise problems


def _trivial(status: str, value: float, note: str) -> Enclosure:
    return Enclosure(value, value, status, certificates=[{"kind": "Trivial", "reason": note}])


def pointwise_space(domain: geo.Domain, z: geo.Point, cfg: SolverConfig | None = None, use_closed_form: bool = True) -> Enclosure:
    """Enclosure of sup f(z) over positive definite f supported in Omega with f(0) = 1."""
    if domain.space != geo.EUCLIDEAN:
        raise ValueError("pointwise_space needs a Euclidean domain")
    domain.bounding_radius()  # raises for unbounded shapes
    warns: list = []
    origin = tuple(Fraction(0) for _ in range(domain.dim))
    if not domain.contains(origin, warns):
        return _trivial(TRIVIAL_ZERO, 0.0, "0 is not in Omega")
    if z.is_zero():
        return _trivial(TRIVIAL_ONE, 1.0, "z = 0")
    if not (domain.contains(z.coords, warns) and domain.contains(z.scaled(-1), warns)):
        return _trivial(TRIVIAL_ZERO, 0.0, "z is not in Omega and -Omega")
    hres = geo.compute_H_space(geo.symmetrize(domain), z)
    H = IndexSet.finite(hres.elements)
    cfg = cfg or SolverConfig(n_trunc=max(64, max(hres.elements, default=0)))
    enc = bracket_M(H, cfg)
    if use_closed_form:
        enc = _with_closed_form(enc, H)
    out = enc.halved()
    out.warnings += list(dict.fromkeys(str(w) for w in warns + hres.warnings))
    out.H = H
    return out


def pointwise_torus(
    domain: geo.Domain,
    z: geo.Point,
    cfg: SolverConfig | None = None,
    n_max: int = 256,
    index_set: IndexSet | None = None,
) -> Enclosure:
    """Enclosure of the torus extremal value M*(Omega, z).

    Finite orbits are exact (grid LP).  Infinite orbits use the truncated
    index set for the lower end; an upper end below 1 needs the full index
    set's structure, supplied as ``index_set`` and checked against the
    truncation.
    """
    if domain.space != geo.TORUS:
        raise ValueError("pointwise_torus needs a torus domain")
    cfg = cfg or SolverConfig()
    warns: list = []
    origin = tuple(Fraction(0) for _ in range(domain.dim))
    if not domain.contains(origin, warns):
        return _trivial(TRIVIAL_ZERO, 0.0, "0 is not in Omega")
    if all(c == 0 for c in geo.torus_reduce(z.coords)) and not z.irrational:
        return _trivial(TRIVIAL_ONE, 1.0, "z = 0 on the torus")
    hres = geo.compute_H_torus(domain, z, n_max)
    if hres.trivial_zero:
        return _trivial(TRIVIAL_ZERO, 0.0, "z is not in Omega and -Omega")
    warn_txt = list(dict.fromkeys(str(w) for w in warns + hres.warnings))
    if hres.orbit.finite:
        m = hres.orbit.size
        sol = solve_discrete(hres.elements, m, cfg.arithmetic)
        H = IndexSet.finite(hres.elements)
        if sol.unbounded:
            return Enclosure(math.inf, math.inf, UNBOUNDED, H=H, warnings=warn_txt)
        # rounded cosine tables can overshoot the universal bound by an ulp
        v = min(sol.value / 2, 1.0)
        cert = {"kind": "GridExact", "m": m, "arithmetic": "rational" if sol.exact is not None else "float", "grid_value": sol.value}
        exact = sol.exact / 2 if sol.exact is not None else None
        return Enclosure(v, v, EXACT, sol.witness, [cert], exact, H, warn_txt)
    T = hres.elements
    if index_set is not None:
        bad = [k for k in range(2, n_max + 1) if index_set.contains(k) != (k in set(T))]
        if bad:
            raise ValueError(f"supplied index set disagrees with the geometry at k={bad[:5]}")
        enc = _with_closed_form(bracket_M(index_set, cfg), index_set)
        out = enc.halved()
        out.warnings += warn_txt
        out.certificates.append({"kind": "SuppliedStructure", "checked_up_to": n_max})
        return out
    sub = SolverConfig(n_trunc=max(T, default=2), m_grid=None, n_samples=cfg.n_samples)
    sub.m_grid = max(cfg.grid(), 16 * sub.n_trunc + 1)
    lower, wit, _ = certified_lower(T, sub)
    certs = [{"kind": "LowerWitness", "truncated_at": n_max}, {"kind": "Universal"}]
    out = Enclosure(lower / 2, 1.0, BRACKET, wit, certs, None, IndexSet.finite(T), warn_txt)
    out.warnings.append(f"infinite orbit: H truncated at {n_max}; upper bound is the universal 1")
    return out


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class DeltaResult:
    n: int
    K: int
    best_H: tuple[int, ...]
    enclosure: Enclosure
    envelope_ok: bool
    candidates: list[tuple[tuple[int, ...], Enclosure]]


def _bracket_half(args):
    H, cfg = args
    return bracket_M(IndexSet.finite(H), cfg).halved()


def delta_search(n: int, K: int, cfg: SolverConfig | None = None, workers: int = 1) -> DeltaResult:
    """Best M(H)/2 over H subset of [2, K] with |H| = n (desk-scale search)."""
    if not (1 <= n <= 4) or not (2 <= K <= 16) or n > K - 1:
        raise ValueError("delta_search is limited to 1 <= n <= 4, K <= 16")
    cfg = cfg or SolverConfig(n_trunc=K)
    cands = list(itertools.combinations(range(2, K + 1), n))
    jobs = [(c, cfg) for c in cands]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            encs = list(ex.map(_bracket_half, jobs))
    else:
        encs = [_bracket_half(j) for j in jobs]
    best = max(range(len(cands)), key=lambda i: (encs[i].lower, -i))
    envelope = encs[best].lower <= 1 - 0.5 / (n + 1) ** 2
    return DeltaResult(n, K, cands[best], encs[best], envelope, list(zip(cands, encs)))


@dataclass
class LimitRow:
    N: int
    alpha: Fraction
    enclosure: Enclosure


@dataclass
class LimitScan:
    rows: list[LimitRow]
    space: Enclosure


def _torus_row(args):
    domain, z, N, cfg = args
    alpha = Fraction(1, N)
    try:
        scaled = domain.scaled(alpha).as_torus()
    except geo.GeometryError as exc:
        raise ValueError(f"alpha = 1/{N} is too large: the dilated domain leaves the torus cube") from exc
    zs = geo.Point(z.scaled(alpha))
    return LimitRow(N, alpha, pointwise_torus(scaled, zs, cfg))


def limit_scan(domain: geo.Domain, z: geo.Point, Ns: Sequence[int], cfg: SolverConfig | None = None, workers: int = 1) -> LimitScan:
    """M*(Omega/N, z/N) for each N next to the space value M(Omega, z)."""
    if domain.space != geo.EUCLIDEAN:
        raise ValueError("limit_scan needs a Euclidean domain")
    if not z.is_exact:
        raise ValueError("limit_scan needs a rational point")
    cfg = cfg or SolverConfig()
    jobs = [(domain, z, int(N), cfg) for N in Ns]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_torus_row, jobs))
    else:
        rows = [_torus_row(j) for j in jobs]
    return LimitScan(rows, pointwise_space(domain, z))
