"""q-arithmetic at a fixed deformation parameter.

Two evaluation modes share one code path: ``exact`` keeps every quantity a
:class:`fractions.Fraction` (q must be rational), ``float`` works in IEEE
doubles.  All routines evaluate at the numerical value of q; there is no
symbolic polynomial algebra here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[Fraction, float, complex]

EXACT = "exact"
FLOAT = "float"

# absolute tolerance for float-mode identity checks
FLOAT_TOL = 1e-10


@dataclass(frozen=True)
class QContext:
    """Deformation parameter together with its arithmetic mode.

    Float mode additionally admits ``q = 0`` so that the phase model (the
    q -> 0 degeneration) can be evaluated with the same machinery.
    """

    q: Union[Fraction, float]
    mode: str = EXACT

    def __post_init__(self):
        if self.mode == EXACT:
            q = Fraction(self.q)
            if not 0 < q < 1:
                raise ValueError(f"exact mode needs 0 < q < 1, got {q}")
            object.__setattr__(self, "q", q)
        elif self.mode == FLOAT:
            q = float(self.q)
            if not 0 <= q < 1:
                raise ValueError(f"float mode needs 0 <= q < 1, got {q}")
            object.__setattr__(self, "q", q)
        else:
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def exact(self) -> bool:
        return self.mode == EXACT

    def one(self) -> Scalar:
        return Fraction(1) if self.exact else 1.0

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0.0

    def scalar(self, value) -> Scalar:
        """Coerce ``value`` into this context's field."""
        if self.exact:
            return Fraction(value)
        return complex(value) if isinstance(value, complex) else float(value)

    def as_float(self) -> "QContext":
        return self if not self.exact else QContext(float(self.q), FLOAT)

    def is_zero(self, value) -> bool:
        if self.exact:
            return value == 0
        return abs(value) < 1e-15

    @classmethod
    def parse(cls, text: str) -> "QContext":
        """``"p/d"`` selects exact mode, a decimal literal selects float mode."""
        text = str(text).strip()
        if "/" in text:
            return cls(Fraction(text), EXACT)
        return cls(float(text), FLOAT)


def q_int(ctx: QContext, m: int) -> Scalar:
    """The q-integer ``1 + q + ... + q**(m-1)``; zero for ``m == 0``."""
    if m < 0:
        raise ValueError("q_int needs m >= 0")
    q = ctx.q
    total = ctx.zero()
    power = ctx.one()
    for _ in range(m):
        total += power
        power *= q
    return total


def q_factorial(ctx: QContext, m: int) -> Scalar:
    if m < 0:
        raise ValueError("q_factorial needs m >= 0")
    out = ctx.one()
    for j in range(2, m + 1):
        out *= q_int(ctx, j)
    return out


def q_binomial(ctx: QContext, m: int, k: int) -> Scalar:
    """Gaussian binomial ``[m]! / ([k]! [m-k]!)``."""
    if k < 0 or m < k:
        raise ValueError(f"q_binomial needs m >= k >= 0, got m={m}, k={k}")
    return q_factorial(ctx, m) / (q_factorial(ctx, k) * q_factorial(ctx, m - k))


def inversions(perm: Sequence[int]) -> int:
    """Coxeter length of a permutation in one-line notation."""
    return sum(1 for a, b in itertools.combinations(perm, 2) if a > b)


def perm_sign(perm: Sequence[int]) -> int:
    return -1 if inversions(perm) % 2 else 1


def poincare_sym(ctx: QContext, n: int) -> Scalar:
    if n < 0:
        raise ValueError("poincare_sym needs n >= 0")
    return q_factorial(ctx, n)


def multiplicities(parts: Iterable[int]) -> dict[int, int]:
    counts: dict[int, int] = {}
    for p in parts:
        counts[p] = counts.get(p, 0) + 1
    return counts


def poincare_stabilizer(ctx: QContext, weight: Sequence[int]) -> Scalar:
    """Poincare polynomial of the stabilizer of ``weight``: product of [m_l]!."""
    out = ctx.one()
    for m in multiplicities(weight).values():
        out *= q_factorial(ctx, m)
    return out


def poincare_brute(ctx: QContext, n: int, weight: Sequence[int] | None = None) -> Scalar:
    """Length generating function by enumeration of S_n (or a stabilizer).

    Only meant as an oracle for small n.
    """
    q = ctx.q
    total = ctx.zero()
    for perm in itertools.permutations(range(n)):
        if weight is not None and any(weight[perm[j]] != weight[j] for j in range(n)):
            continue
        total += q ** inversions(perm)
    return total


def binomial_count(n: int, r: int) -> int:
    return math.comb(n, r) if 0 <= r <= n else 0
