"""Small dense simplex solver with float and exact rational arithmetic.

The programs produced by the extremal solver are tiny (a few hundred rows
at most), so this is a plain two-phase tableau method.  Pivoting rules are
deterministic (ties go to the lowest index), and the exact mode (rational
entries, no rounding anywhere) makes witnesses reproducible bit for bit.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

try:
    import gmpy2

    _mpq = gmpy2.mpq
except ImportError:  # pragma: no cover
    gmpy2 = None
    _mpq = Fraction

LE, EQ, GE = "<=", "==", ">="
FLOAT, EXACT = "float", "rational"

EPS_PIVOT = 1e-11
EPS_COST = 1e-10
EPS_FEAS = 1e-9

DEFAULT_MAX_BITS = 1 << 15
DEGENERATE_RUN = 30
PERTURBATIONS = (1e-7, 1e-9, 1e-11)


class LPError(Exception):
    pass


class ResourceLimit(LPError):
    """Exact arithmetic grew past the configured bit limit."""


@dataclass
class Constraint:
    coeffs: Sequence
    relation: str
    rhs: object


@dataclass
class LinearProgram:
    """maximize objective . x subject to constraints and per-variable bounds.

    ``bounds[i]`` is ``(lo, hi)`` with ``None`` for an infinite side; a
    missing ``bounds`` list means every variable is free.
    """

    objective: Sequence
    constraints: list[Constraint] = field(default_factory=list)
    bounds: list[tuple] | None = None

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add(self, coeffs, relation, rhs) -> None:
        self.constraints.append(Constraint(list(coeffs), relation, rhs))

    def validate(self) -> None:
        n = self.num_vars
        for i, c in enumerate(self.constraints):
            if len(c.coeffs) != n:
                raise LPError(f"constraint {i} has {len(c.coeffs)} coefficients, expected {n}")
            if c.relation not in (LE, EQ, GE):
                raise LPError(f"constraint {i}: bad relation {c.relation!r}")
        if self.bounds is not None and len(self.bounds) != n:
            raise LPError("bounds list length does not match number of variables")
        for row in [self.objective] + [c.coeffs for c in self.constraints]:
            for v in row:
                if isinstance(v, float) and not np.isfinite(v):
                    raise LPError("non-finite coefficient")


@dataclass
class LPResult:
    status: str  # "optimal" | "unbounded" | "infeasible"
    x: list | None = None
    value: object = None
    dual: list | None = None
    dual_value: object = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _max_bits() -> int:
    raw = os.environ.get("TURAN_MAX_BITS")
    return int(raw) if raw else DEFAULT_MAX_BITS


def _num(v, exact: bool):
    if exact:
        if isinstance(v, Fraction):
            return _mpq(v.numerator, v.denominator)
        return _mpq(v)
    return float(v)


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if gmpy2 is not None and isinstance(v, type(_mpq(0))):
        return Fraction(int(v.numerator), int(v.denominator))
    return Fraction(v)


class _Tableau:
    def __init__(self, T, basis, exact: bool, max_bits: int):
        self.T = T
        self.basis = basis
        self.exact = exact
        self.max_bits = max_bits
        self.pivots = 0

    def is_pos(self, v) -> bool:
        return v > 0 if self.exact else v > EPS_PIVOT

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        T[r] = T[r] / T[r, c]
        col = T[:, c].copy()
        col[r] = 0
        nz = np.nonzero(col)[0] if self.exact else np.nonzero(np.abs(col) > 0)[0]
        if len(nz):
            T[nz] -= np.outer(col[nz], T[r])
        if not self.exact:
            T[r, c] = 1.0
            T[nz, c] = 0.0
        self.basis[r] = c
        self.pivots += 1
        if self.exact and self.pivots % 4 == 0:
            self._check_bits()

    def _check_bits(self) -> None:
        worst = 0
        for v in self.T.flat:
            if v != 0:
                worst = max(worst, int(v.numerator).bit_length(), int(v.denominator).bit_length())
        if worst > self.max_bits:
            raise ResourceLimit(f"rational entries reached {worst} bits (limit {self.max_bits})")

    def run(self, allowed: int) -> str:
        """Simplex on the objective row (last row); columns >= allowed never enter.

        Dantzig pricing (most negative reduced cost) is used while the
        objective improves; after a stretch of degenerate pivots the method
        switches to Bland's rule, which cannot cycle, until progress resumes.
        """
        T = self.T
        degenerate = 0
        limit = 50 * (T.shape[0] + T.shape[1]) + 1000
        while True:
            obj = T[-1, :allowed]
            if degenerate > DEGENERATE_RUN:
                enter = next((j for j in range(allowed) if self._neg(obj[j])), None)
            else:
                j = int(np.argmin(obj)) if not self.exact else min(range(allowed), key=lambda i: (obj[i], i), default=0)
                enter = j if allowed and self._neg(obj[j]) else None
            if enter is None:
                return "optimal"
            leave, best = self._ratio_test(enter)
            if leave is None:
                return "unbounded"
            degenerate = degenerate + 1 if (best == 0 if self.exact else best <= EPS_FEAS) else 0
            self.pivot(leave, enter)
            if self.pivots > limit:
                raise LPError(f"simplex exceeded {limit} pivots")

    def _ratio_test(self, enter: int):
        """Leaving row by the minimum ratio; ties go to the lowest basic index."""
        T = self.T
        if not self.exact:
            col = T[:-1, enter]
            rows = np.nonzero(col > EPS_PIVOT)[0]
            if len(rows) == 0:
                return None, None
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            tied = rows[ratios == best]
            leave = min(tied, key=lambda i: self.basis[i])
            return int(leave), best
        best = leave = None
        for i in range(T.shape[0] - 1):
            a = T[i, enter]
            if a > 0:
                ratio = T[i, -1] / a
                if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[leave]):
                    best, leave = ratio, i
        return leave, best

    def _neg(self, v) -> bool:
        return v < 0 if self.exact else v < -EPS_COST


def solve(lp: LinearProgram, mode: str = FLOAT, max_bits: int | None = None) -> LPResult:
    """Solve ``lp`` (maximization).

    ``mode`` is ``"float"`` or ``"rational"``.  In rational mode every input is
    converted exactly (floats included) and the result carries ``Fraction``
    values.  Optimal results include the dual multipliers of the original
    constraints and the dual objective, which equals the primal value.

    Float mode first solves with a tiny fixed perturbation of the right-hand
    side, which keeps heavily degenerate programs from stalling, and then
    recomputes the basic solution for the true right-hand side.  If that
    basis is not feasible for the true data the unperturbed program is
    solved instead.
    """
    if mode not in (FLOAT, EXACT):
        raise ValueError(f"unknown arithmetic mode {mode!r}")
    lp.validate()
    if mode == FLOAT:
        for size in PERTURBATIONS:
            res = _solve(lp, False, max_bits, size)
            if res is not None:
                return res
    return _solve(lp, mode == EXACT, max_bits, 0.0)


def _solve(lp: LinearProgram, exact: bool, max_bits, perturb: float) -> LPResult | None:
    n = lp.num_vars
    bounds = lp.bounds if lp.bounds is not None else [(None, None)] * n
    zero = _num(0, exact)

    # substitute x_i = lo + u, x_i = hi - u, or x_i = u+ - u-
    cols: list[list[tuple[int, object]]] = []
    shift = [zero] * n
    extra_rows: list[tuple[int, object]] = []
    for i, (lo, hi) in enumerate(bounds):
        if lo is not None:
            shift[i] = _num(lo, exact)
            cols.append([(i, _num(1, exact))])
            if hi is not None:
                extra_rows.append((len(cols) - 1, _num(hi, exact) - _num(lo, exact)))
        elif hi is not None:
            shift[i] = _num(hi, exact)
            cols.append([(i, _num(-1, exact))])
        else:
            cols.append([(i, _num(1, exact))])
            cols.append([(i, _num(-1, exact))])
    ns = len(cols)

    c_obj = [_num(v, exact) for v in lp.objective]
    offset = sum((c_obj[i] * shift[i] for i in range(n)), zero)
    cost = [sum((c_obj[i] * s for i, s in col), zero) for col in cols]

    rows, rels, rhs = [], [], []
    for con in lp.constraints:
        a = [_num(v, exact) for v in con.coeffs]
        b = _num(con.rhs, exact) - sum((a[i] * shift[i] for i in range(n)), zero)
        rows.append([sum((a[i] * s for i, s in col), zero) for col in cols])
        rels.append(con.relation)
        rhs.append(b)
    for j, ub in extra_rows:
        row = [zero] * ns
        row[j] = _num(1, exact)
        rows.append(row)
        rels.append(LE)
        rhs.append(ub)
    m = len(rows)

    sign = []
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            rels[i] = {LE: GE, GE: LE, EQ: EQ}[rels[i]]
            sign.append(-1)
        else:
            sign.append(1)

    n_slack = sum(1 for r in rels if r != EQ)
    n_art = sum(1 for r in rels if r != LE)
    width = ns + n_slack + n_art
    dtype = object if exact else float
    T = np.empty((m + 1, width + 1), dtype=dtype)
    T[:] = zero
    basis = [0] * m
    dual_col = [0] * m  # column whose reduced cost reads off y_i
    s_at, a_at = ns, ns + n_slack
    for i in range(m):
        T[i, :ns] = rows[i]
        T[i, -1] = rhs[i]
        if rels[i] == LE:
            T[i, s_at] = 1
            basis[i] = dual_col[i] = s_at
            s_at += 1
        else:
            if rels[i] == GE:
                T[i, s_at] = -1
                s_at += 1
            T[i, a_at] = 1
            basis[i] = dual_col[i] = a_at
            a_at += 1
    if exact:
        for idx in np.ndindex(T.shape):
            if not isinstance(T[idx], type(zero)):
                T[idx] = _num(T[idx], True)
    if perturb:
        T0 = T.copy()
        scale = max([1.0] + [abs(float(v)) for v in rhs])
        T[:m, -1] += perturb * scale * (1 + np.random.default_rng(0).random(m))
    tab = _Tableau(T, basis, exact, max_bits or _max_bits())
    art_start = ns + n_slack

    if n_art:
        T[-1] = zero
        for i in range(m):
            if basis[i] >= art_start:
                T[-1] -= T[i]
        for j in range(art_start, width):
            T[-1, j] = zero
        tab.run(art_start)
        infeas = -T[-1, -1]
        if (infeas > 0) if exact else (infeas > EPS_FEAS * max(1.0, float(np.max(np.abs(rhs))) if m else 1.0)):
            return None if perturb else LPResult("infeasible", pivots=tab.pivots)
        # drive leftover artificials out of the basis
        keep = []
        for i in range(m):
            if basis[i] >= art_start:
                for j in range(art_start):
                    if (T[i, j] != 0) if exact else (abs(T[i, j]) > EPS_PIVOT):
                        tab.pivot(i, j)
                        break
            keep.append(basis[i] < art_start)
        if not all(keep):
            idx = [i for i in range(m) if keep[i]] + [m]
            dropped = [i for i in range(m) if not keep[i]]
            T = tab.T = T[idx]
            basis = tab.basis = [basis[i] for i in range(m) if keep[i]]
        else:
            dropped = []
    else:
        dropped = []
    live_rows = [i for i in range(m) if i not in set(dropped)]

    T[-1] = zero
    for j in range(ns):
        T[-1, j] = -cost[j]
    T[-1, -1] = zero
    for r, bvar in enumerate(basis):
        if bvar < ns and cost[bvar] != 0:
            T[-1] += cost[bvar] * T[r]
    status = tab.run(art_start)
    if status == "unbounded":
        return None if perturb else LPResult("unbounded", pivots=tab.pivots)

    u = [zero] * width
    if perturb:
        B = T0[live_rows][:, basis]
        try:
            xb = np.linalg.solve(B, T0[live_rows, -1])
        except np.linalg.LinAlgError:
            return None
        if len(xb) and xb.min() < -EPS_FEAS * scale:
            return None
        for bvar, v in zip(basis, xb):
            u[bvar] = max(0.0, float(v))
    else:
        for r, bvar in enumerate(basis):
            u[bvar] = T[r, -1]
    x = list(shift)
    for j, col in enumerate(cols):
        for i, s in col:
            x[i] = x[i] + s * u[j]
    value = sum((cost[j] * u[j] for j in range(ns)), zero) + offset if perturb else T[-1, -1] + offset

    y_std = [zero] * m
    for r_i in live_rows:
        y_std[r_i] = T[-1, dual_col[r_i]]
    dual_value = sum((rhs[i] * y_std[i] for i in range(m)), zero) + offset
    dual = [y_std[i] * sign[i] for i in range(len(lp.constraints))]

    if exact:
        x = [_to_fraction(v) for v in x]
        value = _to_fraction(value)
        dual = [_to_fraction(v) for v in dual]
        dual_value = _to_fraction(dual_value)
    else:
        x = [float(v) for v in x]
        value = float(value)
        dual = [float(v) for v in dual]
        dual_value = float(dual_value)
    return LPResult("optimal", x, value, dual, dual_value, tab.pivots)


def check_duality(lp: LinearProgram, res: LPResult, tol: float = 1e-8) -> bool:
    """Verify a returned dual against the original program.

    Checks sign conditions of the multipliers, stationarity for the
    variables, and that the dual objective matches the primal value.  In
    rational mode the comparison is exact.
    """
    if not res.optimal:
        return False
    exact = isinstance(res.value, Fraction)
    tol = 0 if exact else tol
    y = res.dual
    for con, yi in zip(lp.constraints, y):
        if con.relation == LE and yi < -tol:
            return False
        if con.relation == GE and yi > tol:
            return False
    n = lp.num_vars
    bounds = lp.bounds if lp.bounds is not None else [(None, None)] * n
    conv = _to_fraction if exact else float
    # reduced cost d_j = c_j - sum_i y_i a_ij must vanish unless x_j sits on a bound
    for j in range(n):
        d = conv(lp.objective[j]) - sum(conv(con.coeffs[j]) * yi for con, yi in zip(lp.constraints, y))
        lo, hi = bounds[j]
        xj = res.x[j]
        at_lo = lo is not None and abs(xj - conv(lo)) <= tol
        at_hi = hi is not None and abs(xj - conv(hi)) <= tol
        if abs(d) <= tol:
            continue
        if d < 0 and at_lo:
            continue
        if d > 0 and at_hi:
            continue
        return False
    diff = abs(res.value - res.dual_value)
    return diff == 0 if exact else diff <= tol * max(1.0, abs(res.value))
