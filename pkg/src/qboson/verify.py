"""Randomized verification suites for the algebra, the hierarchy and the
eigenfunctions.

Each suite returns a :class:`CheckResult` with the number of cases, the
largest residual and, on failure, a serializable witness.  In exact mode the
operator suites demand residual zero.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import fock
from . import hall_littlewood as hl
from . import hamiltonians as ham
from .fock import StateFn, beta, beta_star, hop, hop_star, num_op
from .qnum import FLOAT_TOL, QContext, q_int

SCHEMA_VERSION = 1
PIERI_TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    failures: int = 0
    max_residual: float = 0.0
    witness: dict | None = None
    seconds: float | None = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, residual: float, ok: bool, witness: Callable[[], dict] | None = None):
        self.cases += 1
        self.max_residual = max(self.max_residual, float(residual))
        if not ok:
            self.failures += 1
            if self.witness is None and witness is not None:
                self.witness = witness()

    def to_dict(self) -> dict:
        out = {"name": self.name, "cases": self.cases, "failures": self.failures,
               "max_residual": self.max_residual, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def random_weight(rng: random.Random, n: int, lo: int, hi: int, repeat: float = 0.3) -> tuple:
    parts = [rng.randint(lo, hi) for _ in range(n)]
    # force some coincidences so multiplicities > 1 show up often
    for j in range(1, n):
        if rng.random() < repeat:
            parts[j] = parts[j - 1]
    return tuple(sorted(parts, reverse=True))


def random_state(ctx: QContext, n: int, rng: random.Random, window=(-3, 3), size: int = 4) -> StateFn:
    data = {}
    for _ in range(rng.randint(1, size)):
        lam = random_weight(rng, n, *window)
        if ctx.exact:
            data[lam] = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))
        else:
            data[lam] = complex(rng.gauss(0, 1), rng.gauss(0, 1))
    return StateFn(ctx, n, data)


def _residual(a: StateFn, b: StateFn) -> StateFn:
    # zero states of differing grades arise from beta on the vacuum
    if not a:
        return -b if b else a
    if not b:
        return a
    return a - b


def _size(ctx: QContext, s: StateFn) -> float:
    return float(s.max_abs())


def _ok(ctx: QContext, res: float) -> bool:
    return res == 0 if ctx.exact else res <= FLOAT_TOL


def _compose(*ops):
    def run(f):
        for op in reversed(ops):
            f = op(f)
        return f
    return run


# fock algebra -----------------------------------------------------------


def algebra_relations(ctx: QContext, l: int, k: int) -> list[tuple[str, Callable, Callable]]:
    """Pairs (lhs, rhs) of operators that must agree; l != k."""
    q = ctx.q
    B = lambda s: (lambda f: beta(s, f))
    Bs = lambda s: (lambda f: beta_star(s, f))
    N = lambda s: (lambda f: num_op(s, f))
    return [
        ("[b_l,b_k]", _compose(B(l), B(k)), _compose(B(k), B(l))),
        ("[b*_l,b*_k]", _compose(Bs(l), Bs(k)), _compose(Bs(k), Bs(l))),
        ("[N_l,N_k]", _compose(N(l), N(k)), _compose(N(k), N(l))),
        ("[N_l,b_k]", _compose(N(l), B(k)), _compose(B(k), N(l))),
        ("[N_l,b*_k]", _compose(N(l), Bs(k)), _compose(Bs(k), N(l))),
        ("[b_l,b*_k]", _compose(B(l), Bs(k)), _compose(Bs(k), B(l))),
        ("N_l b*_l = q b*_l N_l", _compose(N(l), Bs(l)), lambda f: _compose(Bs(l), N(l))(f).scale(q)),
        ("b_l N_l = q N_l b_l", _compose(B(l), N(l)), lambda f: _compose(N(l), B(l))(f).scale(q)),
        ("[b_l,b*_l] = N_l", lambda f: _residual(_compose(B(l), Bs(l))(f), _compose(Bs(l), B(l))(f)), N(l)),
        ("b_l b*_l - q b*_l b_l = 1",
         lambda f: _residual(_compose(B(l), Bs(l))(f), _compose(Bs(l), B(l))(f).scale(q)), lambda f: f),
    ]


def plactic_relations(ctx: QContext, l: int, k: int) -> list[tuple[str, Callable, Callable]]:
    """Nonlocal commutativity for |l-k| > 1 and the quantum Knuth relations at
    l, for a and for a* (with reversed products)."""
    q = ctx.q
    one_q = 1 + q
    a = lambda s: (lambda f: hop(s, f))
    b = lambda s: (lambda f: hop_star(s, f))
    m = l + 1
    out = []
    for tag, A in (("a", a), ("a*", b)):
        if abs(l - k) > 1:
            out.append((f"{tag}_l {tag}_k = {tag}_k {tag}_l", _compose(A(l), A(k)), _compose(A(k), A(l))))
    out += [
        ("knuth a 1",
         lambda f: _compose(a(m), a(l), a(l))(f) + _compose(a(l), a(l), a(m))(f).scale(q),
         lambda f: _compose(a(l), a(m), a(l))(f).scale(one_q)),
        ("knuth a 2",
         lambda f: _compose(a(m), a(m), a(l))(f) + _compose(a(l), a(m), a(m))(f).scale(q),
         lambda f: _compose(a(m), a(l), a(m))(f).scale(one_q)),
        ("knuth a* 1",
         lambda f: _compose(b(l), b(l), b(m))(f) + _compose(b(m), b(l), b(l))(f).scale(q),
         lambda f: _compose(b(l), b(m), b(l))(f).scale(one_q)),
        ("knuth a* 2",
         lambda f: _compose(b(l), b(m), b(m))(f) + _compose(b(m), b(m), b(l))(f).scale(q),
         lambda f: _compose(b(m), b(l), b(m))(f).scale(one_q)),
    ]
    return out


def _relation_suite(name, ctx, relations, n_max, window, trials, rng) -> CheckResult:
    out = CheckResult(name)
    for _ in range(trials):
        n = rng.randint(0, n_max)
        f = random_state(ctx, n, rng, window)
        l = rng.randint(*window)
        k = rng.choice([s for s in range(window[0], window[1] + 1) if s != l])
        for label, lhs, rhs in relations(ctx, l, k):
            res = _size(ctx, _residual(lhs(f), rhs(f)))
            out.record(res, _ok(ctx, res),
                       lambda: {"relation": label, "l": l, "k": k, "state": f.to_records()})
    return out


def algebra_suite(ctx, n_max=4, window=(-3, 3), trials=50, rng=None) -> CheckResult:
    return _relation_suite("algebra", ctx, algebra_relations, n_max, window, trials, rng or random.Random(0))


def plactic_suite(ctx, n_max=4, window=(-3, 3), trials=50, rng=None) -> CheckResult:
    return _relation_suite("plactic", ctx, plactic_relations, n_max, window, trials, rng or random.Random(0))


def fock_adjointness_suite(ctx, n_max=4, window=(-3, 3), trials=50, rng=None) -> CheckResult:
    """``<b*_l f, g> = <f, b_l g>`` and ``<N_l f, g> = <f, N_l g>``."""
    rng = rng or random.Random(0)
    out = CheckResult("fock adjointness")
    for _ in range(trials):
        n = rng.randint(0, n_max - 1)
        f = random_state(ctx, n, rng, window)
        g = random_state(ctx, n + 1, rng, window)
        g0 = random_state(ctx, n, rng, window)
        l = rng.randint(*window)
        for res in (abs(fock.inner_product(beta_star(l, f), g) - fock.inner_product(f, beta(l, g))),
                    abs(fock.inner_product(num_op(l, f), g0) - fock.inner_product(f, num_op(l, g0)))):
            out.record(res, _ok(ctx, res), lambda: {"l": l, "f": f.to_records(), "g": g.to_records()})
    return out


# hierarchy --------------------------------------------------------------


def _witness_lj(ctx, r, f, direction, v, lam):
    """Locate the index set whose coefficient disagrees with the oracle at lam."""
    lower = ham._SIDE[direction] == ham.ANNIHILATE
    terms = ham.lower_terms if lower else ham.raise_terms
    for J, c, mu in terms(ctx, r, lam, v):
        ref = ham.h_def(r, StateFn.indicator(ctx, mu), direction)[lam]
        if ref != c:
            return {"lambda": list(lam), "J": [j + 1 for j in J], "coefficient": str(c), "oracle": str(ref)}
    return {"lambda": list(lam), "J": None}


def oracle_suite(ctx, n_max=4, window=(-3, 3), trials=50, rng=None, v=ham.v_coeff) -> CheckResult:
    """Closed form against the definition, every (n, r) with r <= n <= n_max."""
    rng = rng or random.Random(0)
    out = CheckResult("oracle equivalence")
    for n in range(1, n_max + 1):
        for r in range(1, n + 1):
            for _ in range(trials):
                f = random_state(ctx, n, rng, window)
                for direction in (ham.LOWER, ham.RAISE):
                    diff = ham.h_explicit(r, f, direction, v) - ham.h_def(r, f, direction)
                    res = _size(ctx, diff)

                    def witness():
                        lam = diff.support()[0]
                        w = _witness_lj(ctx, r, f, direction, v, lam)
                        w.update({"n": n, "r": r, "direction": direction})
                        return w

                    out.record(res, _ok(ctx, res), witness)
    return out


def _hierarchy_ops(n):
    ops = []
    for r in range(1, n + 1):
        ops.append((f"H_{r}", lambda f, r=r: ham.h_explicit(r, f, ham.LOWER)))
        ops.append((f"H*_{r}", lambda f, r=r: ham.h_explicit(r, f, ham.RAISE)))
    return ops


def commutativity_suite(ctx, n_max=4, window=(-3, 3), trials=20, rng=None) -> CheckResult:
    rng = rng or random.Random(0)
    out = CheckResult("commutativity")
    for n in range(1, n_max + 1):
        ops = _hierarchy_ops(n)
        for _ in range(trials):
            f = random_state(ctx, n, rng, window)
            for (na, A), (nb, B) in itertools.combinations(ops, 2):
                res = _size(ctx, A(B(f)) - B(A(f)))
                out.record(res, _ok(ctx, res), lambda: {"pair": [na, nb], "state": f.to_records()})
    return out


def adjointness_suite(ctx, n_max=4, window=(-3, 3), trials=50, rng=None) -> CheckResult:
    rng = rng or random.Random(0)
    out = CheckResult("adjointness")
    for _ in range(trials):
        n = rng.randint(1, n_max)
        r = rng.randint(1, n)
        f = random_state(ctx, n, rng, window)
        g = random_state(ctx, n, rng, window)
        lhs = fock.inner_product(ham.h_explicit(r, f, ham.LOWER), g)
        rhs = fock.inner_product(f, ham.h_explicit(r, g, ham.RAISE))
        res = abs(lhs - rhs)
        out.record(res, _ok(ctx, res), lambda: {"n": n, "r": r, "f": f.to_records(), "g": g.to_records()})
    return out


def _translate(f: StateFn, step: int) -> StateFn:
    return StateFn(f.ctx, f.grade, {tuple(p + step for p in lam): v for lam, v in f.items()})


def kernel_translation_suite(ctx, n_max=4, window=(-3, 3), trials=20, rng=None) -> CheckResult:
    """``H_r = 0`` for r > n, ``H_n`` is the unit translation, and
    ``(H*_r f)(lam) = (H_{n-r} f)(lam + 1)``."""
    rng = rng or random.Random(0)
    out = CheckResult("kernel and translation")
    for _ in range(trials):
        n = rng.randint(1, n_max)
        f = random_state(ctx, n, rng, window)
        checks = []
        for direction in (ham.LOWER, ham.RAISE):
            checks.append(("kernel", ham.h_explicit(n + 1, f, direction)))
        checks.append(("translation", ham.h_explicit(n, f, ham.LOWER) - _translate(f, 1)))
        for r in range(1, n + 1):
            rest = ham.h_explicit(n - r, f, ham.LOWER) if r < n else f
            checks.append((f"H*_{r} via H_{n - r}", ham.h_explicit(r, f, ham.RAISE) - _translate(rest, -1)))
        for label, diff in checks:
            res = _size(ctx, diff)
            out.record(res, _ok(ctx, res), lambda: {"check": label, "n": n, "state": f.to_records()})
    return out


def gauge_identity_suite(ctx, n_max=4, window=(-3, 3), trials=50, rng=None) -> CheckResult:
    """``delta(lam - e_J) V_{lam - e_J, J} = delta(lam) V_{lam, J^c}``."""
    rng = rng or random.Random(0)
    out = CheckResult("gauge identity")
    for _ in range(trials):
        n = rng.randint(1, n_max)
        lam = random_weight(rng, n, *window)
        for r in range(1, n + 1):
            for J in ham.subsets(n, r):
                mu = ham.shift(lam, J, -1)
                if not fock.is_dominant(mu):
                    continue
                lhs = fock.delta_n(ctx, mu) * ham.v_coeff(ctx, mu, J)
                rhs = fock.delta_n(ctx, lam) * ham.v_coeff(ctx, lam, ham.complement(n, J))
                res = abs(lhs - rhs)
                out.record(res, _ok(ctx, res), lambda: {"lambda": list(lam), "J": [j + 1 for j in J]})
    return out


# eigenfunctions ---------------------------------------------------------


def random_alcove_point(rng: np.random.Generator, n: int, gap: float = 0.05) -> np.ndarray:
    while True:
        xi = np.sort(rng.uniform(-np.pi, np.pi, n))[::-1]
        if n == 1 or (np.min(-np.diff(xi)) > gap and xi[0] - xi[-1] < 2 * np.pi - gap):
            return xi


def pieri_suite(ctx: QContext, n_max=4, n_xi=20, n_lam=10, window=(-3, 3), seed=0) -> CheckResult:
    """Joint eigenvalue equations of the hierarchy on phi, plus the H_q eigenvalue."""
    fctx = ctx.as_float()
    rng = np.random.default_rng(seed)
    prng = random.Random(seed)
    out = CheckResult("eigenvalue/pieri")
    for n in range(1, n_max + 1):
        for _ in range(n_xi):
            xi = random_alcove_point(rng, n)
            cache: dict = {}

            def phi(lam):
                if lam not in cache:
                    cache[lam] = hl.phi(fctx, xi, lam)
                return cache[lam]

            z = np.exp(1j * xi)
            eps = 2 * np.sum(np.cos(xi))
            for _ in range(n_lam):
                lam = random_weight(prng, n, *window, repeat=0.5)
                p = phi(lam)
                for r in range(1, n + 1):
                    for direction, ev in ((ham.LOWER, hl.elementary_symmetric(r, 1 / z)),
                                          (ham.RAISE, hl.elementary_symmetric(r, z))):
                        lhs = ham.apply_at(fctx, r, phi, lam, direction)
                        res = abs(lhs - ev * p) / (1 + abs(p))
                        out.record(res, res < PIERI_TOL,
                                   lambda: {"xi": xi.tolist(), "lambda": list(lam), "r": r, "direction": direction})
                hq_val = 0
                for j in range(n):
                    for e in (1, -1):
                        mu = list(lam)
                        mu[j] += e
                        if fock.is_dominant(mu):
                            hq_val += float(q_int(fctx, fock.multiplicity(lam, lam[j]))) * phi(tuple(mu))
                res = abs(hq_val - eps * p) / (1 + abs(p))
                out.record(res, res < PIERI_TOL, lambda: {"xi": xi.tolist(), "lambda": list(lam), "check": "H_q"})
    return out


# driver -----------------------------------------------------------------


@dataclass
class Report:
    checks: list[CheckResult]
    config: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "config": self.config, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}


def run_all(ctx: QContext, n_max: int = 3, window=(-3, 3), seed: int = 42, trials: int = 50,
            v=ham.v_coeff, suites: Sequence[str] | None = None) -> Report:
    """Run the suites with one seeded stream per suite (order-independent)."""
    table = {
        "algebra": lambda r: algebra_suite(ctx, n_max, window, trials, r),
        "plactic": lambda r: plactic_suite(ctx, n_max, window, trials, r),
        "fock_adjointness": lambda r: fock_adjointness_suite(ctx, n_max, window, trials, r),
        "oracle": lambda r: oracle_suite(ctx, n_max, window, trials, r, v=v),
        "commutativity": lambda r: commutativity_suite(ctx, n_max, window, min(trials, 20), r),
        "adjointness": lambda r: adjointness_suite(ctx, n_max, window, trials, r),
        "kernel_translation": lambda r: kernel_translation_suite(ctx, n_max, window, min(trials, 20), r),
        "gauge_identity": lambda r: gauge_identity_suite(ctx, n_max, window, trials, r),
        "pieri": lambda r: pieri_suite(ctx, n_max, 20, 10, window, seed),
    }
    names = list(table) if suites is None else list(suites)
    checks = []
    order = list(table)
    for name in names:
        checks.append(table[name](random.Random(seed * 1000 + order.index(name))))
    config = {"n": n_max, "q": str(ctx.q), "mode": ctx.mode, "window": list(window),
              "seed": seed, "trials": trials}
    return Report(checks, config)
