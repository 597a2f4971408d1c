"""Quadrature on the alcove and the Fourier transforms that diagonalize the
hierarchy.

Alcove integrals of symmetric integrands are computed as full-cube integrals
divided by n!.  Grids that carry non-symmetric data supported inside the
alcove (wave packets) set ``symmetric=False`` and are summed as they are.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import hall_littlewood as hl
from .fock import StateFn, Weight
from .qnum import QContext

GAUSS_LEGENDRE = "gauss-legendre"
PERIODIC = "periodic"


@dataclass(frozen=True)
class QuadratureGrid:
    n: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: int
    scheme: str = GAUSS_LEGENDRE
    symmetric: bool = True

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def alcove_integral(self, values) -> complex:
        total = np.sum(self.weights * values)
        return total / math.factorial(self.n) if self.symmetric else total

    def describe(self) -> dict:
        return {"n": self.n, "order": self.order, "scheme": self.scheme,
                "symmetric": self.symmetric, "nodes": self.size}


def _axis_rule(order: int, scheme: str):
    if scheme == GAUSS_LEGENDRE:
        x, w = np.polynomial.legendre.leggauss(order)
        return np.pi * x, np.pi * w
    if scheme == PERIODIC:
        h = 2 * np.pi / order
        return -np.pi + (np.arange(order) + 0.5) * h, np.full(order, h)
    raise ValueError(f"unknown quadrature scheme {scheme!r}")


def build_grid(n: int, order: int, scheme: str = GAUSS_LEGENDRE, symmetric: bool = True) -> QuadratureGrid:
    """Tensor-product rule on the open cube (-pi, pi)^n."""
    if order < 4:
        raise ValueError("quadrature order must be >= 4")
    if n < 1:
        raise ValueError("n must be >= 1")
    x, w = _axis_rule(order, scheme)
    mesh = np.meshgrid(*([x] * n), indexing="ij")
    wmesh = np.meshgrid(*([w] * n), indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    weights = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    return QuadratureGrid(n, nodes, weights, order, scheme, symmetric)


@dataclass(frozen=True)
class SpectralFn:
    grid: QuadratureGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.shape != (self.grid.size,):
            raise ValueError("values must have one entry per grid node")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("spectral values must be finite")

    def __add__(self, other: "SpectralFn") -> "SpectralFn":
        return SpectralFn(self.grid, self.values + other.values)

    def scale(self, c) -> "SpectralFn":
        return SpectralFn(self.grid, c * self.values)

    def flat_norm(self) -> float:
        """``sqrt((2pi)^-n int_A |f|^2 dxi)``, the l2 norm of the lattice image."""
        n = self.grid.n
        return math.sqrt(self.grid.alcove_integral(np.abs(self.values) ** 2).real / (2 * np.pi) ** n)

    def to_records(self) -> list[dict]:
        return [{"xi": list(map(float, x)), "re": float(v.real), "im": float(v.imag)}
                for x, v in zip(self.grid.nodes, self.values)]


def dominant_box(n: int, lo: int, hi: int) -> list[Weight]:
    """Every dominant weight with parts in ``[lo, hi]``."""
    return [tuple(c) for c in itertools.combinations_with_replacement(range(hi, lo - 1, -1), n)]


def default_support(f: StateFn, t: float = 0.0, cap: tuple[int, int] | None = None,
                    margin: int = 0) -> list[Weight]:
    """Support of ``f`` dilated by ceil(2 n |t|) + margin (at least 1) in every
    part, optionally capped.

    The dilation is the ballistic reach; the evolved state keeps an Airy-type
    edge beyond it, so norm-sensitive callers should add a margin.
    """
    values = [p for lam in f.support() for p in lam]
    pad = max(1, math.ceil(2 * f.grade * abs(t)) + margin)
    lo, hi = min(values) - pad, max(values) + pad
    if cap is not None:
        lo, hi = max(lo, cap[0]), min(hi, cap[1])
    return dominant_box(f.grade, lo, hi)


def _float_items(f: StateFn):
    lams = np.array([lam for lam, _ in f.items()], dtype=float).reshape(len(f), f.grade)
    vals = np.array([complex(v) for _, v in f.items()])
    return lams, vals


def fourier_forward(ctx: QContext, f: StateFn, grid: QuadratureGrid) -> SpectralFn:
    """``(F f)(xi) = sum_lam f(lam) conj(phi_xi(lam)) delta(lam)``."""
    ctx = ctx.as_float()
    if not f:
        return SpectralFn(grid, np.zeros(grid.size, dtype=complex))
    lams, vals = _float_items(f)
    weights = vals * hl._deltas(ctx, lams)
    return SpectralFn(grid, weights @ np.conj(hl.phi_grid(ctx, grid.nodes, lams)))


def _inverse(fhat: SpectralFn, support: Sequence[Weight], kernel, ctx: QContext, chunk: int = 512) -> StateFn:
    grid = fhat.grid
    scale = (2 * np.pi) ** grid.n * (math.factorial(grid.n) if grid.symmetric else 1)
    wv = grid.weights * fhat.values
    support = list(support)
    out = {}
    for a in range(0, len(support), chunk):
        block = support[a:a + chunk]
        vals = kernel(np.array(block, dtype=float).reshape(len(block), grid.n)) @ wv / scale
        out.update(zip(block, vals))
    return StateFn(ctx.as_float(), grid.n, out)


def fourier_inverse(ctx: QContext, fhat: SpectralFn, support: Iterable[Weight]) -> StateFn:
    """``f(lam) = (2pi)^-n int_A fhat(xi) phi_xi(lam) Delta(xi) dxi`` on ``support``."""
    ctx = ctx.as_float()
    dens = hl.density(ctx, fhat.grid.nodes) if fhat.grid.n > 1 else np.ones(fhat.grid.size)
    return _inverse(fhat, support, lambda L: hl.phi_grid(ctx, fhat.grid.nodes, L) * dens[None, :], ctx)


def verify_orthogonality(ctx: QContext, lam, mu, grid: QuadratureGrid) -> complex:
    """Quadrature value of ``<phi(lam), phi(mu)>_Delta``."""
    ctx = ctx.as_float()
    vals = hl.phi_grid(ctx, grid.nodes, [lam, mu])
    dens = hl.density(ctx, grid.nodes) if grid.n > 1 else np.ones(grid.size)
    integrand = vals[0] * np.conj(vals[1]) * dens
    return complex(grid.alcove_integral(integrand) / (2 * np.pi) ** grid.n)


def fourier_tilde(ctx: QContext, f: StateFn, grid: QuadratureGrid) -> SpectralFn:
    """``(F~ f)(xi) = sum_lam f(lam) conj(Psi_xi(lam))``."""
    ctx = ctx.as_float()
    if not f:
        return SpectralFn(grid, np.zeros(grid.size, dtype=complex))
    lams, vals = _float_items(f)
    return SpectralFn(grid, vals @ np.conj(hl.psi_grid(ctx, grid.nodes, lams)))


def fourier_tilde_inverse(ctx: QContext, fhat: SpectralFn, support: Iterable[Weight]) -> StateFn:
    ctx = ctx.as_float()
    return _inverse(fhat, support, lambda L: hl.psi_grid(ctx, fhat.grid.nodes, L), ctx)


def apply_multiplier(r: int, fhat: SpectralFn) -> SpectralFn:
    """``(E_r fhat)(xi) = eps_r(xi) fhat(xi)``."""
    if not 1 <= r <= fhat.grid.n:
        raise ValueError("multiplier index must satisfy 1 <= r <= n")
    return SpectralFn(fhat.grid, hl.epsilon_r(r, fhat.grid.nodes) * fhat.values)


def evolve(ctx: QContext, r: int, fhat: SpectralFn, t: float, support: Iterable[Weight]) -> StateFn:
    """``exp(i t H~_{q,r}) f`` for ``f`` with transform ``fhat``, on ``support``."""
    if not 1 <= r <= fhat.grid.n:
        raise ValueError("flow index must satisfy 1 <= r <= n")
    phase = np.exp(1j * t * hl.epsilon_r(r, fhat.grid.nodes))
    return fourier_tilde_inverse(ctx, SpectralFn(fhat.grid, phase * fhat.values), support)
