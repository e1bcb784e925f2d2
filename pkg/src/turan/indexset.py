"""Index sets H of integers >= 2.

An :class:`IndexSet` is an infinite skeleton (empty, full, or a union of
residue classes mod q) patched by finitely many explicit additions and
removals.  That is enough to describe every index set that shows up in the
extremal problems handled by this package while keeping complementation
closed-form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable

MAX_ELEMENT = 10**6


class Base:
    EMPTY = "empty"
    FULL = "full"


@dataclass(frozen=True)
class Residues:
    modulus: int
    residues: frozenset[int]

    def matches(self, k: int) -> bool:
        return k % self.modulus in self.residues


def _normalize_base(base):
    if base in (Base.EMPTY, Base.FULL):
        return base
    if not isinstance(base, Residues):
        raise TypeError(f"unsupported base {base!r}")
    q = base.modulus
    if q < 1:
        raise ValueError("residue modulus must be positive")
    res = frozenset(r % q for r in base.residues)
    # shrink to the smallest modulus describing the same set of classes
    for d in sorted(d for d in range(1, q + 1) if q % d == 0):
        if all(((r % d) in {s % d for s in res}) == (r in res) for r in range(q)):
            q, res = d, frozenset(r % d for r in res)
            break
    if not res:
        return Base.EMPTY
    if len(res) == q:
        return Base.FULL
    return Residues(q, res)


@dataclass(frozen=True)
class IndexSet:
    """A subset of N_2 = {2, 3, ...}.

    ``k`` is a member iff ``k in include`` or (``k`` matches ``base`` and
    ``k not in exclude``).  Instances are normalized on construction so that
    ``include`` only holds elements the base misses and ``exclude`` only
    holds elements the base hits.
    """

    base: object = Base.EMPTY
    include: frozenset[int] = field(default_factory=frozenset)
    exclude: frozenset[int] = field(default_factory=frozenset)
    max_element: int = field(default=MAX_ELEMENT, compare=False, repr=False)

    def __post_init__(self):
        base = _normalize_base(self.base)
        inc = frozenset(int(k) for k in self.include)
        exc = frozenset(int(k) for k in self.exclude)
        for k in inc | exc:
            if k < 2:
                raise ValueError(f"index set elements must be >= 2, got {k}")
            if k > self.max_element:
                raise ValueError(f"element {k} exceeds cap {self.max_element}")
        if inc & exc:
            raise ValueError("include and exclude must be disjoint")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "include", frozenset(k for k in inc if not _base_has(base, k)))
        object.__setattr__(self, "exclude", frozenset(k for k in exc if _base_has(base, k)))

    # -- constructors -----------------------------------------------------

    @classmethod
    def empty(cls) -> IndexSet:
        return cls()

    @classmethod
    def full(cls) -> IndexSet:
        return cls(Base.FULL)

    @classmethod
    def finite(cls, elements: Iterable[int]) -> IndexSet:
        return cls(Base.EMPTY, frozenset(elements))

    @classmethod
    def interval(cls, lo: int, hi: int) -> IndexSet:
        """The integers in [lo, hi] (intersected with N_2)."""
        return cls.finite(range(max(lo, 2), hi + 1))

    @classmethod
    def tail(cls, n: int) -> IndexSet:
        """(n, oo) intersected with N_2."""
        return cls(Base.FULL, exclude=frozenset(range(2, n + 1)))

    @classmethod
    def all_but(cls, n: int) -> IndexSet:
        return cls(Base.FULL, exclude=frozenset([n]))

    @classmethod
    def residue_class(cls, modulus: int, residues: Iterable[int]) -> IndexSet:
        return cls(Residues(modulus, frozenset(residues)))

    @classmethod
    def even(cls) -> IndexSet:
        return cls.residue_class(2, [0])

    @classmethod
    def odd(cls) -> IndexSet:
        return cls.residue_class(2, [1])

    # -- queries ----------------------------------------------------------

    def contains(self, k: int) -> bool:
        if k < 2:
            raise ValueError(f"membership is only defined for k >= 2, got {k}")
        return k in self.include or (_base_has(self.base, k) and k not in self.exclude)

    __contains__ = contains

    @property
    def is_finite(self) -> bool:
        return self.base == Base.EMPTY

    def elements(self) -> list[int]:
        """Sorted elements of a finite set."""
        if not self.is_finite:
            raise ValueError("index set is infinite")
        return sorted(self.include)

    def max_finite(self) -> int | None:
        if not self.is_finite:
            return None
        return max(self.include, default=None)

    def complement(self) -> IndexSet:
        return IndexSet(_complement_base(self.base), self.exclude, self.include, self.max_element)

    def truncate(self, n: int) -> list[int]:
        """H intersected with [2, n], sorted."""
        if n < 2:
            raise ValueError("truncation bound must be >= 2")
        return [k for k in range(2, n + 1) if self.contains(k)]

    def residues_mod(self, m: int) -> dict[int, int]:
        """Map residue r (mod m) to a witness element h of H with h = r (mod m)."""
        out: dict[int, int] = {}
        for k in sorted(self.include):
            out.setdefault(k % m, k)
        base = self.base
        if base == Base.EMPTY:
            return out
        if base == Base.FULL:
            q, res = 1, frozenset([0])
        else:
            q, res = base.modulus, base.residues
        # the base meets class r (mod m) in an infinite progression, so the
        # finite exclude list can never empty it; find its first member >= 2
        g = gcd(m, q)
        period = m * q // g
        for r in range(m):
            if r in out or not any((rho - r) % g == 0 for rho in res):
                continue
            k = r if r >= 2 else r + m
            while True:
                if k >= 2 and k % q in res and k not in self.exclude:
                    out[r] = k
                    break
                k += m
                if k > 2 * period + 2 * m + max(self.exclude, default=0):
                    break
        return out

    def reduce_mod(self, m: int) -> Degenerate | Reduced:
        """Fold H into [2, m/2] modulo m.

        Degenerate when some element is congruent to 0 or +-1 modulo m: those
        make the grid-discretized problem unbounded.
        """
        if m < 2:
            raise ValueError("modulus must be >= 2")
        res = self.residues_mod(m)
        for r in sorted({0, 1 % m, (m - 1) % m}):
            if r in res:
                return Degenerate(residue=r, witness=res[r], modulus=m)
        ks = [k for k in range(2, m // 2 + 1) if k % m in res or (-k) % m in res]
        return Reduced(tuple(ks), m)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        if self.base in (Base.EMPTY, Base.FULL):
            base = self.base
        else:
            base = {"mod": self.base.modulus, "residues": sorted(self.base.residues)}
        return {"base": base, "include": sorted(self.include), "exclude": sorted(self.exclude)}

    @classmethod
    def from_json(cls, obj: dict, max_element: int = MAX_ELEMENT) -> IndexSet:
        unknown = set(obj) - {"base", "include", "exclude"}
        if unknown:
            raise ValueError(f"unknown index set fields: {sorted(unknown)}")
        base = obj.get("base", Base.EMPTY)
        if isinstance(base, dict):
            base = Residues(int(base["mod"]), frozenset(int(r) for r in base["residues"]))
        elif base not in (Base.EMPTY, Base.FULL):
            raise ValueError(f"bad index set base {base!r}")
        return cls(base, frozenset(obj.get("include", [])), frozenset(obj.get("exclude", [])), max_element)

    def describe(self) -> str:
        if self.is_finite:
            return "{" + ",".join(map(str, sorted(self.include))) + "}"
        if self.base == Base.FULL:
            head = "N2"
        else:
            head = f"{{k = {sorted(self.base.residues)} mod {self.base.modulus}}}"
        if self.exclude:
            head += " \\ {" + ",".join(map(str, sorted(self.exclude))) + "}"
        if self.include:
            head += " + {" + ",".join(map(str, sorted(self.include))) + "}"
        return head


@dataclass(frozen=True)
class Degenerate:
    residue: int
    witness: int
    modulus: int


@dataclass(frozen=True)
class Reduced:
    elements: tuple[int, ...]
    modulus: int


def _base_has(base, k: int) -> bool:
    if base == Base.EMPTY:
        return False
    if base == Base.FULL:
        return True
    return base.matches(k)


def _complement_base(base):
    if base == Base.EMPTY:
        return Base.FULL
    if base == Base.FULL:
        return Base.EMPTY
    return Residues(base.modulus, frozenset(range(base.modulus)) - base.residues)


def as_index_set(h) -> IndexSet:
    if isinstance(h, IndexSet):
        return h
    return IndexSet.finite(h)
