"""Hall-Littlewood eigenfunctions and the scattering phases built from them.

Spectral points are real arrays whose last axis has length n; most routines
broadcast over leading axes so whole quadrature grids can be evaluated at
once.  Permutations are tuples in one-line notation, acting on vectors by
``x_sigma = (x[sigma[0]], ..., x[sigma[n-1]])``.
"""

from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np

from .fock import delta_n
from .qnum import QContext, perm_sign

# below this, |1 - e^{i(xi_k - xi_j)}| counts as a wall crossing
WALL_TOL = 1e-8
# offset used to evaluate phi in the limit at a wall
_WALL_STEP = 1e-4


def rho(n: int) -> np.ndarray:
    return np.array([(n - 1 - 2 * j) / 2 for j in range(n)])


def permutations(n: int) -> list[tuple[int, ...]]:
    return list(itertools.permutations(range(n)))


def inverse(perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(perm)
    for pos, val in enumerate(perm):
        out[val] = pos
    return tuple(out)


def in_alcove(xi) -> bool:
    xi = np.asarray(xi, dtype=float)
    return bool(xi[0] < np.pi and xi[-1] > -np.pi and np.all(np.diff(xi) < 0)) if xi.size else True


def _q(ctx: QContext) -> float:
    return float(ctx.q)


def _pairs(n):
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def _wall_gap(xi: np.ndarray) -> np.ndarray:
    n = xi.shape[-1]
    gap = np.full(xi.shape[:-1], np.inf)
    for j, k in _pairs(n):
        gap = np.minimum(gap, np.abs(1 - np.exp(1j * (xi[..., k] - xi[..., j]))))
    return gap


def _c_raw(q: float, xi: np.ndarray) -> np.ndarray:
    out = np.ones(xi.shape[:-1], dtype=complex)
    for j, k in _pairs(xi.shape[-1]):
        e = np.exp(1j * (xi[..., k] - xi[..., j]))
        out = out * (1 - q * e) / (1 - e)
    return out


def c_function(ctx: QContext, xi) -> complex | np.ndarray:
    """``prod_{j<k} (1 - q e^{i(xi_k - xi_j)}) / (1 - e^{i(xi_k - xi_j)})``."""
    xi = np.asarray(xi, dtype=float)
    if np.any(_wall_gap(xi) < WALL_TOL):
        raise ValueError("c_function is singular at coinciding components")
    out = _c_raw(_q(ctx), xi)
    return complex(out) if out.ndim == 0 else out


def density(ctx: QContext, xi) -> float | np.ndarray:
    """Orthogonality density ``1/|C|^2`` in its pole-free product form."""
    q = _q(ctx)
    xi = np.asarray(xi, dtype=float)
    out = np.ones(xi.shape[:-1])
    for j, k in _pairs(xi.shape[-1]):
        e = np.exp(1j * (xi[..., k] - xi[..., j]))
        out = out * np.abs(1 - e) ** 2 / np.abs(1 - q * e) ** 2
    return float(out) if out.ndim == 0 else out


def _phi_block(q, xi, lams):
    """phi for weights ``lams`` (K, n) at regular nodes ``xi`` (N, n)."""
    out = np.zeros((lams.shape[0], xi.shape[0]), dtype=complex)
    for perm in permutations(xi.shape[1]):
        xs = xi[:, perm]
        out += _c_raw(q, xs)[None, :] * np.exp(1j * (lams @ xs.T))
    return out


def phi_grid(ctx: QContext, nodes, lams, chunk: int = 4_000_000) -> np.ndarray:
    """Hall-Littlewood function for every weight (rows) at every node (columns).

    At nodes on a wall (two coinciding components mod 2pi) the value is the
    limit, approximated by the mean of two evaluations offset by +-1e-4 along
    rho; there the density vanishes, so integrals never see the error.
    """
    q = _q(ctx)
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    lams = np.atleast_2d(np.asarray(lams, dtype=float))
    n = nodes.shape[1]
    if lams.shape[1] != n:
        raise ValueError("weight length does not match spectral dimension")
    if n == 0:
        return np.ones((lams.shape[0], nodes.shape[0]), dtype=complex)
    out = np.empty((lams.shape[0], nodes.shape[0]), dtype=complex)
    on_wall = _wall_gap(nodes) < WALL_TOL if n > 1 else np.zeros(nodes.shape[0], bool)
    step = max(1, chunk // max(1, nodes.shape[0]))
    regular = ~on_wall
    shift = _WALL_STEP * rho(n)
    for a in range(0, lams.shape[0], step):
        block = lams[a:a + step]
        if regular.any():
            out[a:a + step, regular] = _phi_block(q, nodes[regular], block)
        if on_wall.any():
            w = nodes[on_wall]
            out[a:a + step, on_wall] = 0.5 * (_phi_block(q, w + shift, block) + _phi_block(q, w - shift, block))
    return out


def phi(ctx: QContext, xi, lam) -> complex:
    """``sum_sigma C(xi_sigma) exp(i lam . xi_sigma)`` at one point."""
    xi = np.asarray(xi, dtype=float)
    if xi.size > 1 and _wall_gap(xi) < WALL_TOL:
        raise ValueError("phi is evaluated at coinciding components")
    return complex(phi_grid(ctx, xi[None, :], [lam])[0, 0])


def elementary_symmetric(r: int, x) -> complex:
    x = list(x)
    if r < 0 or r > len(x):
        return 0
    total = 0
    for combo in itertools.combinations(x, r):
        total += math.prod(combo)
    return total


def _subset_sums(r: int, xi: np.ndarray):
    n = xi.shape[-1]
    for J in itertools.combinations(range(n), r):
        yield J, xi[..., list(J)].sum(axis=-1)


def epsilon_r(r: int, xi) -> float | np.ndarray:
    """``2 sum_{|J|=r} cos(sum_{j in J} xi_j)``."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros(xi.shape[:-1])
    for _, s in _subset_sums(r, xi):
        out = out + 2 * np.cos(s)
    return float(out) if out.ndim == 0 else out


def s_phase(ctx: QContext, x):
    """Two-body phase ``(1 - q e^{ix}) / (1 - q e^{-ix})``."""
    q = _q(ctx)
    x = np.asarray(x, dtype=float)
    out = (1 - q * np.exp(1j * x)) / (1 - q * np.exp(-1j * x))
    return complex(out) if out.ndim == 0 else out


def s_half(ctx: QContext, x):
    q = _q(ctx)
    x = np.asarray(x, dtype=float)
    z = 1 - q * np.exp(1j * x)
    out = z / np.abs(z)
    return complex(out) if out.ndim == 0 else out


def s_hat_sigma(ctx: QContext, perm: Sequence[int], xi, half: bool = False):
    """Product of s(xi_k - xi_j) over pairs kept in order by ``perm`` and of
    conj(s(xi_k - xi_j)) over pairs it inverts; ``half=True`` uses s^(1/2)."""
    xi = np.asarray(xi, dtype=float)
    inv = inverse(perm)
    fn = s_half if half else s_phase
    out = np.ones(xi.shape[:-1], dtype=complex)
    for j, k in _pairs(xi.shape[-1]):
        v = fn(ctx, xi[..., k] - xi[..., j])
        out = out * (v if inv[j] < inv[k] else np.conj(v))
    return complex(out) if out.ndim == 0 else out


def _deltas(ctx: QContext, lams) -> np.ndarray:
    fctx = ctx.as_float()
    return np.array([float(delta_n(fctx, tuple(int(p) for p in lam))) for lam in lams])


def psi_grid(ctx: QContext, nodes, lams) -> np.ndarray:
    """Gauge-transformed wave functions ``i^{n(n-1)/2} Delta^(1/2) delta^(1/2) phi``.

    Symmetric in the spectral variable, so valid on the whole torus; exactly
    zero on the walls.
    """
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    lams = np.atleast_2d(np.asarray(lams))
    n = nodes.shape[1]
    pref = 1j ** (n * (n - 1) // 2)
    vals = phi_grid(ctx, nodes, lams)
    dens = np.sqrt(density(ctx, nodes)) if n > 1 else np.ones(nodes.shape[0])
    return pref * np.sqrt(_deltas(ctx, lams))[:, None] * vals * np.atleast_1d(dens)[None, :]


def psi(ctx: QContext, xi, lam) -> complex:
    xi = np.asarray(xi, dtype=float)
    return complex(psi_grid(ctx, xi[None, :], [lam])[0, 0])


def psi_phase_form(ctx: QContext, xi, lam) -> complex | np.ndarray:
    """``delta^(1/2) sum_sigma sign(sigma) S_sigma^(1/2) exp(i (rho+lam) . xi_sigma)``.

    Agrees with :func:`psi` inside the alcove only.
    """
    xi = np.asarray(xi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    n = xi.shape[-1]
    shifted = rho(n) + lam
    out = 0
    for perm in permutations(n):
        term = s_hat_sigma(ctx, perm, xi, half=True) * np.exp(1j * (xi[..., list(perm)] @ shifted))
        out = out + perm_sign(perm) * term
    return np.sqrt(_deltas(ctx, [lam])[0]) * out
