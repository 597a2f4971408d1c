"""Finitely supported states on dominant weights and the q-boson operators.

A weight is a plain tuple of ints sorted non-increasingly; the empty tuple is
the vacuum label.  A :class:`StateFn` is an immutable sparse map from weights
of one fixed length (the grade) to scalars, tagged with the
:class:`~qboson.qnum.QContext` that fixes q and the arithmetic mode.

Operators act on functions, i.e. ``(beta(l, f))(lam) = f(insert(lam, l))``,
which on indicator states gives the familiar ket rules.
"""

from __future__ import annotations

import bisect
import json
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .qnum import QContext, Scalar, poincare_stabilizer, q_int

Weight = tuple


def is_dominant(parts: Sequence[int]) -> bool:
    return all(parts[j] >= parts[j + 1] for j in range(len(parts) - 1))


def as_weight(parts: Iterable[int]) -> Weight:
    w = tuple(int(p) for p in parts)
    if not is_dominant(w):
        raise ValueError(f"weight {w} is not non-increasing")
    return w


def multiplicity(lam: Weight, l: int) -> int:
    return sum(1 for p in lam if p == l)


def insert(lam: Weight, l: int) -> Weight:
    # lam is non-increasing; bisect on the negated sequence
    neg = [-p for p in lam]
    j = bisect.bisect_left(neg, -l)
    return lam[:j] + (l,) + lam[j:]


def delete(lam: Weight, l: int) -> Weight:
    try:
        j = lam.index(l)
    except ValueError:
        raise ValueError(f"cannot delete {l} from {lam}: multiplicity is zero") from None
    return lam[:j] + lam[j + 1:]


class StateFn:
    """Sparse function on the dominant weights of a fixed grade."""

    __slots__ = ("ctx", "grade", "_data")

    def __init__(self, ctx: QContext, grade: int, data: Mapping[Weight, Scalar] | None = None):
        self.ctx = ctx
        self.grade = grade
        clean = {}
        for lam, v in (data or {}).items():
            lam = tuple(lam)
            if len(lam) != grade:
                raise ValueError(f"weight {lam} does not have {grade} parts")
            if not is_dominant(lam):
                raise ValueError(f"weight {lam} is not dominant")
            if not ctx.is_zero(v):
                clean[lam] = v
        self._data = clean

    @classmethod
    def indicator(cls, ctx: QContext, lam: Sequence[int], value=1) -> "StateFn":
        lam = as_weight(lam)
        return cls(ctx, len(lam), {lam: ctx.scalar(value)})

    @classmethod
    def zero(cls, ctx: QContext, grade: int) -> "StateFn":
        return cls(ctx, grade)

    @classmethod
    def _from_accumulator(cls, ctx, grade, acc) -> "StateFn":
        # skips validation; callers only produce dominant keys of the right length
        out = cls.__new__(cls)
        out.ctx = ctx
        out.grade = grade
        out._data = {k: v for k, v in acc.items() if not ctx.is_zero(v)}
        return out

    def __getitem__(self, lam) -> Scalar:
        return self._data.get(tuple(lam), self.ctx.zero())

    def __call__(self, lam) -> Scalar:
        return self[lam]

    def items(self):
        return sorted(self._data.items(), reverse=True)

    def support(self) -> list[Weight]:
        return sorted(self._data, reverse=True)

    def __len__(self) -> int:
        return len(self._data)

    def __bool__(self) -> bool:
        return bool(self._data)

    def _check(self, other: "StateFn"):
        if self.grade != other.grade:
            raise ValueError(f"grade mismatch: {self.grade} vs {other.grade}")

    def __add__(self, other: "StateFn") -> "StateFn":
        self._check(other)
        acc = dict(self._data)
        for k, v in other._data.items():
            acc[k] = acc.get(k, self.ctx.zero()) + v
        return StateFn._from_accumulator(self.ctx, self.grade, acc)

    def __neg__(self) -> "StateFn":
        return self.scale(-1)

    def __sub__(self, other: "StateFn") -> "StateFn":
        return self + (-other)

    def scale(self, c) -> "StateFn":
        return StateFn._from_accumulator(self.ctx, self.grade, {k: c * v for k, v in self._data.items()})

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateFn):
            return NotImplemented
        return self.grade == other.grade and self._data == other._data

    def max_abs(self) -> float:
        return max((abs(v) for v in self._data.values()), default=0.0)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self.items()[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"StateFn(grade={self.grade}, {{{body}{more}}})"

    # serialization ------------------------------------------------------

    def to_records(self) -> list[dict]:
        out = []
        for lam, v in self.items():
            if isinstance(v, Fraction):
                out.append({"weight": list(lam), "num": v.numerator, "den": v.denominator})
            else:
                v = complex(v)
                out.append({"weight": list(lam), "re": v.real, "im": v.imag})
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_records())

    @classmethod
    def from_records(cls, ctx: QContext, records: list[dict], grade: int | None = None) -> "StateFn":
        data = {}
        for rec in records:
            lam = as_weight(rec["weight"])
            if "num" in rec:
                v = Fraction(rec["num"], rec["den"])
            else:
                v = complex(rec["re"], rec.get("im", 0.0))
            data[lam] = ctx.scalar(v) if ctx.exact else v
        if grade is None:
            if not records:
                raise ValueError("grade is required for an empty record list")
            grade = len(records[0]["weight"])
        return cls(ctx, grade, data)


def _map_state(f: StateFn, grade: int, rule: Callable[[Weight, Scalar], Iterable[tuple[Weight, Scalar]]]) -> StateFn:
    acc: dict = {}
    zero = f.ctx.zero()
    for mu, v in f._data.items():
        for lam, c in rule(mu, v):
            acc[lam] = acc.get(lam, zero) + c
    return StateFn._from_accumulator(f.ctx, grade, acc)


def beta(l: int, f: StateFn) -> StateFn:
    """Annihilation: ``(beta_l f)(lam) = f(insert(lam, l))`` on grade n-1."""
    if f.grade == 0:
        return StateFn.zero(f.ctx, 0)

    def rule(mu, v):
        if l in mu:
            yield delete(mu, l), v

    return _map_state(f, f.grade - 1, rule)


def beta_star(l: int, f: StateFn) -> StateFn:
    """Creation: ``(beta*_l f)(lam) = [m_l(lam)] f(delete(lam, l))``."""
    ctx = f.ctx

    def rule(mu, v):
        lam = insert(mu, l)
        yield lam, q_int(ctx, multiplicity(lam, l)) * v

    return _map_state(f, f.grade + 1, rule)


def num_op(l: int, f: StateFn) -> StateFn:
    q = f.ctx.q
    return _map_state(f, f.grade, lambda mu, v: [(mu, q ** multiplicity(mu, l) * v)])


def hop(l: int, f: StateFn) -> StateFn:
    """``a_l = beta*_{l+1} beta_l``: moves a particle from site l to l+1."""
    if f.grade == 0:
        return StateFn.zero(f.ctx, 0)
    return beta_star(l + 1, beta(l, f))


def hop_star(l: int, f: StateFn) -> StateFn:
    """``a*_l = beta_{l+1} beta*_l``: moves a particle from site l+1 to l."""
    if f.grade == 0:
        return StateFn.zero(f.ctx, 0)
    return beta(l + 1, beta_star(l, f))


def delta_n(ctx: QContext, lam: Sequence[int]) -> Scalar:
    """Weight of the inner product: ``1 / prod_l [m_l(lam)]!``."""
    return 1 / poincare_stabilizer(ctx, lam)


def inner_product(f: StateFn, g: StateFn) -> Scalar:
    f._check(g)
    ctx = f.ctx
    total = ctx.zero()
    for lam, v in f._data.items():
        w = g._data.get(lam)
        if w is None:
            continue
        total += v * (w if ctx.exact else w.conjugate()) * delta_n(ctx, lam)
    return total


def flat_norm(f: StateFn) -> float:
    """Unweighted l2 norm."""
    return sum(abs(v) ** 2 for v in f._data.values()) ** 0.5
