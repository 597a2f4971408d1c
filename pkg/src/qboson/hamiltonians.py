"""The commuting hopping hierarchy H_r, H*_r on fixed-grade states.

Two independent routes are provided:

* :func:`h_def` builds the operators literally, as sums over partitions eta
  of r of monomials in the hopping operators divided by [eta]!.  It is slow
  and used as an oracle.
* :func:`h_explicit` applies the closed-form difference operator with the
  coefficients :func:`v_coeff`.

Index sets J are tuples of 0-based positions into the weight.
"""

from __future__ import annotations

import itertools
import math
from typing import Callable, Iterator, Sequence

from .fock import StateFn, Weight, delta_n, hop, hop_star, is_dominant, multiplicity
from .qnum import QContext, Scalar, q_binomial, q_factorial, q_int

LOWER = "lower"
RAISE = "raise"
ANNIHILATE = "annihilate"
CREATE = "create"

# r/direction/side aliases accepted by the public functions
_SIDE = {LOWER: ANNIHILATE, ANNIHILATE: ANNIHILATE, RAISE: CREATE, CREATE: CREATE}


def partitions_of(r: int) -> list[tuple[int, ...]]:
    """All partitions of r, largest parts first, in reverse-lexicographic order."""
    if r < 1:
        raise ValueError("r must be >= 1")

    def gen(rest, cap):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in gen(rest - first, first):
                yield (first,) + tail

    return list(gen(r, r))


def distinct_orderings(eta: Sequence[int]) -> list[tuple[int, ...]]:
    return sorted(set(itertools.permutations(eta)), reverse=True)


def eta_factorial(ctx: QContext, eta: Sequence[int]) -> Scalar:
    out = ctx.one()
    for part in eta:
        out *= q_factorial(ctx, part)
    return out


def _power(op, l, k, f):
    for _ in range(k):
        if not f:
            break
        f = op(l, f)
    return f


def monomial_op(eta: Sequence[int], f: StateFn, side: str = ANNIHILATE) -> StateFn:
    """Apply ``m_eta(a)`` (annihilate side) or ``m_eta(a*)`` (create side).

    The infinite site sums are cut to a window around the support of ``f``;
    outside it every hopping factor meets an empty site and the term vanishes.
    """
    side = _SIDE[side]
    out = StateFn.zero(f.ctx, f.grade)
    if not f or f.grade == 0:
        return out
    size = sum(eta)
    values = [p for lam in f.support() for p in lam]
    lo, hi = min(values) - size - 1, max(values) + size + 1
    sites = range(lo, hi + 1)
    op = hop if side == ANNIHILATE else hop_star

    for comp in distinct_orderings(eta):
        p = len(comp)

        # rightmost factor acts first; annihilate side needs l_1 < ... < l_p,
        # so each earlier factor sits strictly left of the later one
        def rec(k, bound, state):
            if k < 0:
                return state
            acc = StateFn.zero(f.ctx, f.grade)
            for l in sites:
                if side == ANNIHILATE and l >= bound:
                    break
                if side == CREATE and l <= bound:
                    continue
                g = _power(op, l, comp[k], state)
                if g:
                    acc = acc + rec(k - 1, l, g)
            return acc

        start = math.inf if side == ANNIHILATE else -math.inf
        out = out + rec(p - 1, start, f)
    return out


def h_def(r: int, f: StateFn, side: str = ANNIHILATE) -> StateFn:
    """H_r (annihilate side) or H*_r (create side) from their definition."""
    ctx = f.ctx
    out = StateFn.zero(ctx, f.grade)
    for eta in partitions_of(r):
        out = out + monomial_op(eta, f, side).scale(1 / eta_factorial(ctx, eta))
    return out


def v_coeff(ctx: QContext, lam: Sequence[int], J: Sequence[int]) -> Scalar:
    """Product over j in J, k not in J, j < k, lam_j == lam_k of
    (1 - q^(k-j+1)) / (1 - q^(k-j))."""
    q = ctx.q
    n = len(lam)
    inside = set(J)
    out = ctx.one()
    for j in inside:
        for k in range(j + 1, n):
            if k not in inside and lam[j] == lam[k]:
                out *= (1 - q ** (k - j + 1)) / (1 - q ** (k - j))
    return out


def v_binomial(ctx: QContext, lam: Sequence[int], J: Sequence[int]) -> Scalar:
    """q-binomial form of V, valid when lam + e_J is dominant."""
    inside = set(J)
    out = ctx.one()
    for value in set(lam):
        m = multiplicity(lam, value)
        m_J = sum(1 for j in inside if lam[j] == value)
        out *= q_binomial(ctx, m, m_J)
    return out


def complement(n: int, J: Sequence[int]) -> tuple[int, ...]:
    inside = set(J)
    return tuple(k for k in range(n) if k not in inside)


def shift(lam: Sequence[int], J: Sequence[int], step: int) -> Weight:
    out = list(lam)
    for j in J:
        out[j] += step
    return tuple(out)


def subsets(n: int, r: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations(range(n), r)


VFunc = Callable[[QContext, Sequence[int], Sequence[int]], Scalar]


def lower_terms(ctx: QContext, r: int, lam: Sequence[int], v: VFunc = v_coeff):
    """Terms ``(J, V_{lam,J^c}, lam - e_J)`` of ``(H_r f)(lam)``."""
    n = len(lam)
    for J in subsets(n, r):
        mu = shift(lam, J, -1)
        if is_dominant(mu):
            yield J, v(ctx, lam, complement(n, J)), mu


def raise_terms(ctx: QContext, r: int, lam: Sequence[int], v: VFunc = v_coeff):
    """Terms ``(J, V_{lam,J}, lam + e_J)`` of ``(H*_r f)(lam)``."""
    n = len(lam)
    for J in subsets(n, r):
        mu = shift(lam, J, 1)
        if is_dominant(mu):
            yield J, v(ctx, lam, J), mu


def apply_at(ctx: QContext, r: int, func: Callable[[Weight], Scalar], lam: Sequence[int],
             direction: str = LOWER, v: VFunc = v_coeff) -> Scalar:
    """Evaluate ``(H_r func)(lam)`` or ``(H*_r func)(lam)`` for any function ``func``."""
    terms = lower_terms if _SIDE[direction] == ANNIHILATE else raise_terms
    total = 0
    for _, c, mu in terms(ctx, r, lam, v):
        total = total + c * func(mu)
    return total


def h_explicit(r: int, f: StateFn, direction: str = LOWER, v: VFunc = v_coeff) -> StateFn:
    """Closed-form action of H_r (``lower``) or H*_r (``raise``).

    ``v`` is the coefficient function; it exists so that tests can inject a
    faulty coefficient and watch the oracle comparison catch it.
    """
    ctx = f.ctx
    n = f.grade
    acc: dict = {}
    zero = ctx.zero()
    if r > n:
        return StateFn.zero(ctx, n)
    lower = _SIDE[direction] == ANNIHILATE
    for mu, val in f._data.items():
        for J in subsets(n, r):
            # push: mu = lam - e_J (lower) or mu = lam + e_J (raise)
            lam = shift(mu, J, 1 if lower else -1)
            if not is_dominant(lam):
                continue
            c = v(ctx, lam, complement(n, J)) if lower else v(ctx, lam, J)
            acc[lam] = acc.get(lam, zero) + c * val
    return StateFn._from_accumulator(ctx, n, acc)


def h_qr(r: int, f: StateFn) -> StateFn:
    """``H_{q,r} = H_r + H*_r``."""
    return h_explicit(r, f, LOWER) + h_explicit(r, f, RAISE)


def hq(f: StateFn) -> StateFn:
    """The q-boson Hamiltonian via its nearest-neighbour formula."""
    ctx = f.ctx
    n = f.grade
    acc: dict = {}
    zero = ctx.zero()
    for mu, val in f._data.items():
        for j in range(n):
            for eps in (1, -1):
                # mu = lam + eps e_j
                lam = list(mu)
                lam[j] -= eps
                lam = tuple(lam)
                if not is_dominant(lam):
                    continue
                c = q_int(ctx, multiplicity(lam, lam[j]))
                acc[lam] = acc.get(lam, zero) + c * val
    return StateFn._from_accumulator(ctx, n, acc)


def creation_power(l: int, m: int, f: StateFn) -> StateFn:
    """``(a*_l)^m f`` in closed form.

    ``((a*_l)^m f)(lam) = [m]! [m_l(lam) choose m] f(lam + e_d + ... + e_{d+m-1})``
    with d the first position of l in lam, and zero when m exceeds m_l(lam).
    """
    ctx = f.ctx
    if m < 1:
        raise ValueError("m must be >= 1")
    acc: dict = {}
    zero = ctx.zero()
    fm = q_factorial(ctx, m)
    for mu, val in f._data.items():
        idx = [j for j, p in enumerate(mu) if p == l + 1]
        if len(idx) < m:
            continue
        lam = list(mu)
        for j in idx[-m:]:
            lam[j] = l
        lam = tuple(lam)
        c = fm * q_binomial(ctx, multiplicity(lam, l), m)
        acc[lam] = acc.get(lam, zero) + c * val
    return StateFn._from_accumulator(ctx, f.grade, acc)


def h_tilde(r: int, f: StateFn) -> StateFn:
    """Gauge-transformed ``delta^(1/2) H_{q,r} delta^(-1/2)``, explicit form.

    Needs float mode (square roots of the coefficients).
    """
    ctx = f.ctx
    if ctx.exact:
        raise ValueError("h_tilde requires a float-mode context")
    n = f.grade
    acc: dict = {}
    if r > n:
        return StateFn.zero(ctx, n)
    for mu, val in f._data.items():
        for J in subsets(n, r):
            Jc = complement(n, J)
            # raise term at lam = mu - e_J
            lam = shift(mu, J, -1)
            if is_dominant(lam):
                c = math.sqrt(v_coeff(ctx, lam, J) * v_coeff(ctx, mu, Jc))
                acc[lam] = acc.get(lam, 0.0) + c * val
            # lower term at lam = mu + e_J
            lam = shift(mu, J, 1)
            if is_dominant(lam):
                c = math.sqrt(v_coeff(ctx, lam, Jc) * v_coeff(ctx, mu, J))
                acc[lam] = acc.get(lam, 0.0) + c * val
    return StateFn._from_accumulator(ctx, n, acc)


def gauge(f: StateFn, power: float) -> StateFn:
    """Pointwise multiplication by ``delta_n^power``."""
    ctx = f.ctx
    acc = {lam: float(delta_n(ctx, lam)) ** power * v for lam, v in f._data.items()}
    return StateFn._from_accumulator(ctx, f.grade, acc)


def h_tilde_by_gauge(r: int, f: StateFn) -> StateFn:
    return gauge(h_qr(r, gauge(f, -0.5)), 0.5)
