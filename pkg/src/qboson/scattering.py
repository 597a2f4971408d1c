"""Wave packets, the scattering matrix, and the large-time comparison of the
q-boson dynamics with the phase model (q = 0).

Packet profiles are products of bumps ``exp(-1/(1-u^2))`` supported in a box
inside one connected component of the regular domain A_r.  Because the
profile has compact support inside the open cube, every packet integral is a
Fourier coefficient of a smooth periodic function; they are evaluated with
the periodic trapezoid rule, all lattice points at once via FFT.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import hall_littlewood as hl
from .fock import StateFn, Weight, delta_n
from .qnum import QContext, perm_sign
from .spectral import PERIODIC, QuadratureGrid, SpectralFn, build_grid

log = logging.getLogger(__name__)

REGULAR_TOL = 1e-9
VCLAS_MARGIN = 0.1
TAIL_LIMIT = 1e-4


class PacketError(ValueError):
    """Raised when a packet profile leaves the alcove or the regular domain."""


def grad_epsilon(r: int, xi) -> np.ndarray:
    """``d eps_r / d xi_j = -2 sum_{|J|=r, j in J} sin(sum_{k in J} xi_k)``."""
    xi = np.asarray(xi, dtype=float)
    n = xi.shape[-1]
    if not 1 <= r <= n:
        raise ValueError("flow index must satisfy 1 <= r <= n")
    out = np.zeros_like(xi)
    for J in itertools.combinations(range(n), r):
        s = np.sin(xi[..., list(J)].sum(axis=-1))
        for j in J:
            out[..., j] -= 2 * s
    return out


def in_regular_domain(r: int, xi, tol: float = REGULAR_TOL) -> bool:
    g = grad_epsilon(r, xi)
    n = g.shape[-1]
    return all(abs(g[j] - g[k]) > tol for j in range(n) for k in range(j + 1, n))


def sigma_xi(r: int, xi, tol: float = REGULAR_TOL) -> tuple[int, ...]:
    """Permutation sorting the gradient strictly decreasingly: ``grad[sigma]`` is decreasing."""
    if not in_regular_domain(r, xi, tol):
        raise ValueError(f"point {list(np.asarray(xi, float))} is not in the regular domain A_{r}")
    g = grad_epsilon(r, xi)
    return tuple(int(j) for j in np.argsort(-g, kind="stable"))


def reversal(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1, -1, -1))


def compose(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """``(a o b)`` in the convention ``x_{a o b} = (x_a)_b``."""
    return tuple(a[j] for j in b)


def bump(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u, dtype=float)
    inside = np.abs(u) < 1
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@dataclass(frozen=True)
class WavePacket:
    """Compactly supported spectral profile for flow ``r``, sampled on a periodic grid."""

    center: tuple[float, ...]
    widths: tuple[float, ...]
    r: int
    grid: QuadratureGrid = field(repr=False)
    values: np.ndarray = field(repr=False)
    sigma_hat: tuple[int, ...]
    vbox: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def order(self) -> int:
        return self.grid.order

    def spectral(self) -> SpectralFn:
        return SpectralFn(self.grid, self.values.astype(complex))

    def manifest(self) -> dict:
        return {"center": list(self.center), "widths": list(self.widths), "r": self.r,
                "order": self.order, "sigma_hat": list(self.sigma_hat),
                "vclas_lo": self.vbox[0].tolist(), "vclas_hi": self.vbox[1].tolist()}


def _check_box_in_alcove(center, widths):
    lo = np.asarray(center) - widths
    hi = np.asarray(center) + widths
    if hi[0] >= np.pi or lo[-1] <= -np.pi or np.any(lo[:-1] <= hi[1:]):
        raise PacketError(f"support box around {list(center)} with widths {list(widths)} leaves the alcove")


def make_packet(center: Sequence[float], widths: Sequence[float] | float, r: int = 1,
                order: int = 512, samples: int = 400, seed: int = 0) -> WavePacket:
    """Build and validate a bump packet normalized to unit lattice norm."""
    center = tuple(float(c) for c in center)
    n = len(center)
    if np.isscalar(widths):
        widths = (float(widths),) * n
    widths = tuple(float(w) for w in widths)
    if not 1 <= r <= n:
        raise ValueError("flow index must satisfy 1 <= r <= n")
    if n > 1 and r == n:
        raise PacketError("A_n is empty: all gradient components coincide for r = n")
    _check_box_in_alcove(center, widths)

    grid = build_grid(n, order, PERIODIC, symmetric=False)
    u = (grid.nodes - np.asarray(center)) / np.asarray(widths)
    values = np.prod(bump(u), axis=1)
    if not np.any(values > 0):
        raise PacketError("packet support contains no grid node; increase the order")

    # sample the support: populated nodes plus uniform interior points
    rng = np.random.default_rng(seed)
    pts = grid.nodes[values > 0]
    if len(pts) > samples:
        pts = pts[rng.choice(len(pts), samples, replace=False)]
    extra = np.asarray(center) + np.asarray(widths) * rng.uniform(-1, 1, size=(samples, n))
    pts = np.vstack([pts, extra, [center]])
    reference = None
    for p in pts:
        if not in_regular_domain(r, p):
            raise PacketError(f"packet support point {p.tolist()} is not in the regular domain A_{r}")
        s = sigma_xi(r, p)
        if reference is None:
            reference = s
        elif s != reference:
            raise PacketError(f"ordering permutation changes inside the support at {p.tolist()}")

    grads = grad_epsilon(r, pts)
    vbox = np.array([grads.min(axis=0) - VCLAS_MARGIN, grads.max(axis=0) + VCLAS_MARGIN])
    sorted_lo, sorted_hi = vbox[0][list(reference)], vbox[1][list(reference)]
    if n > 1 and np.any(sorted_lo[:-1] <= sorted_hi[1:]):
        raise PacketError("velocity box touches a chamber wall; narrow the packet")

    norm = math.sqrt(np.sum(grid.weights * values ** 2) / (2 * np.pi) ** n)
    return WavePacket(center, widths, r, grid, values / norm, reference, vbox)


def reference_packet(n: int = 2, r: int = 1, order: int = 512) -> WavePacket:
    """Packets used by the acceptance runs: well separated velocities, width 0.6."""
    if n == 1:
        return make_packet((1.0,), 0.6, r, order)
    if n == 2:
        return make_packet((np.pi / 2, -np.pi / 2), 0.6, r, order)
    if n == 3:
        return make_packet((2.2, 0.0, -2.2), 0.35, r, order)
    raise ValueError("reference packets exist for n <= 3")


def scattering_multiplier(ctx: QContext, packet: WavePacket, power: float = 1.0) -> np.ndarray:
    """Nodewise ``S_{sigma_hat}(xi)^power`` for power in {+-1, +-1/2}."""
    if power not in (1, -1, 0.5, -0.5):
        raise ValueError("power must be one of +1, -1, +1/2, -1/2")
    s = hl.s_hat_sigma(ctx, packet.sigma_hat, packet.grid.nodes, half=abs(power) == 0.5)
    s = np.atleast_1d(s)
    return s if power > 0 else np.conj(s)


def scattering_matrix_apply(ctx: QContext, r: int, packet: WavePacket, power: float = 1.0) -> SpectralFn:
    """Multiply the packet profile by ``S_r^power``; unimodular, so norms are kept."""
    if r != packet.r:
        raise PacketError(f"packet was validated for flow {packet.r}, not {r}")
    return SpectralFn(packet.grid, scattering_multiplier(ctx, packet, power) * packet.values)


# lattice evaluation -----------------------------------------------------


@dataclass
class LatticeField:
    """Dense values on every dominant weight of the FFT box ``[-N/2, N/2)^n``."""

    weights: np.ndarray  # (K, n) int
    values: np.ndarray   # (K,) complex

    def norm(self, mask=None) -> float:
        v = self.values if mask is None else self.values[mask]
        return float(np.sqrt(np.sum(np.abs(v) ** 2)))

    def in_box(self, lo: int, hi: int) -> np.ndarray:
        return np.all((self.weights >= lo) & (self.weights <= hi), axis=1)

    def to_state(self, ctx: QContext, mask=None, tol: float = 1e-15) -> StateFn:
        w = self.weights if mask is None else self.weights[mask]
        v = self.values if mask is None else self.values[mask]
        keep = np.abs(v) >= tol
        data = {tuple(int(p) for p in lam): complex(x) for lam, x in zip(w[keep], v[keep])}
        return StateFn(ctx.as_float(), self.weights.shape[1], data)

    def __sub__(self, other: "LatticeField") -> "LatticeField":
        return LatticeField(self.weights, self.values - other.values)


def _box_weights(n: int, N: int) -> np.ndarray:
    half = N // 2
    vals = range(half - 1, -half - 1, -1)
    return np.array(list(itertools.combinations_with_replacement(vals, n)), dtype=int).reshape(-1, n)


_BOX_CACHE: dict = {}


def _lattice_box(n, N):
    key = (n, N)
    if key not in _BOX_CACHE:
        _BOX_CACHE[key] = _box_weights(n, N)
    return _BOX_CACHE[key]


def _fourier_coeffs(grid: QuadratureGrid, amp: np.ndarray, nu: np.ndarray) -> np.ndarray:
    """``sum_k w_k amp(xi_k) exp(i nu . xi_k)`` for integer frequency rows ``nu``."""
    n, N = grid.n, grid.order
    h = 2 * np.pi / N
    x0 = -np.pi + h / 2
    T = np.fft.ifftn(amp.reshape((N,) * n)) * (N ** n) * h ** n
    idx = tuple(np.mod(nu[:, a], N) for a in range(n))
    return T[idx] * np.exp(1j * x0 * nu.sum(axis=1))


def _phase_terms(ctx: QContext | None, packet: WavePacket, amp: np.ndarray,
                 perms: Iterable[tuple[int, ...]]) -> LatticeField:
    """``(2pi)^-n sum_sigma sign(sigma) int amp S_sigma^(1/2) e^{i(rho+lam).xi_sigma}``
    times ``delta(lam)^(1/2)``; ``ctx=None`` means the phase model (S = 1, delta = 1)."""
    grid = packet.grid
    n = grid.n
    lams = _lattice_box(n, grid.order)
    rho = hl.rho(n)
    xi = grid.nodes
    out = np.zeros(lams.shape[0], dtype=complex)
    for perm in perms:
        inv = hl.inverse(perm)
        a = amp * np.exp(1j * (xi[:, list(perm)] @ rho))
        if ctx is not None and n > 1:
            a = a * np.atleast_1d(hl.s_hat_sigma(ctx, perm, xi, half=True))
        # lam . xi_sigma = nu . xi with nu_a = lam_{sigma^-1(a)}
        nu = lams[:, list(inv)]
        out += perm_sign(perm) * _fourier_coeffs(grid, a, nu)
    out /= (2 * np.pi) ** n
    if ctx is not None and n > 1:
        fctx = ctx.as_float()
        out *= np.sqrt(np.array([float(delta_n(fctx, tuple(lam))) for lam in lams]))
    return LatticeField(lams, out)


def _time_phase(packet: WavePacket, t: float) -> np.ndarray:
    return np.exp(-1j * t * hl.epsilon_r(packet.r, packet.grid.nodes))


def lattice_packet(ctx: QContext | None, packet: WavePacket, t: float, power: float = 0.0) -> LatticeField:
    """``F~_q^{-1}(exp(-i t E_r) S_r^power fhat)`` on the whole FFT box.

    ``ctx=None`` (or q = 0) gives the phase-model packet; ``power=0`` skips
    the scattering multiplier.
    """
    if ctx is not None and float(ctx.q) == 0.0:
        ctx = None
    amp = _time_phase(packet, t) * packet.values
    if power:
        if ctx is None:
            raise ValueError("the scattering multiplier needs q > 0")
        amp = amp * scattering_multiplier(ctx, packet, power)
    return _phase_terms(ctx, packet, amp, hl.permutations(packet.n))


@dataclass(frozen=True)
class ClassicalRegion:
    t: float
    lo: np.ndarray
    hi: np.ndarray
    sigma_hat: tuple[int, ...]
    sigma0: tuple[int, ...]

    @property
    def stationary_perm(self) -> tuple[int, ...]:
        """Permutation whose plane-wave term is stationary on the region."""
        return self.sigma_hat if self.t > 0 else compose(self.sigma_hat, self.sigma0)

    def mask(self, weights: np.ndarray) -> np.ndarray:
        x = weights + hl.rho(weights.shape[1])
        return np.all((x > self.lo) & (x < self.hi), axis=1)


def classical_region(packet: WavePacket, t: float) -> ClassicalRegion:
    if t == 0:
        raise ValueError("the classical region is undefined at t = 0")
    n = packet.n
    s0 = reversal(n)
    perm = packet.sigma_hat if t > 0 else compose(packet.sigma_hat, s0)
    a, b = t * packet.vbox[0][list(perm)], t * packet.vbox[1][list(perm)]
    return ClassicalRegion(t, np.minimum(a, b), np.maximum(a, b), packet.sigma_hat, s0)


def classical_packet(packet: WavePacket, t: float) -> LatticeField:
    """Stationary plane-wave term of the phase-model packet, cut to the classical region."""
    region = classical_region(packet, t)
    perm = region.stationary_perm
    amp = _time_phase(packet, t) * packet.values
    field_ = _phase_terms(None, packet, amp, [perm])
    field_.values[~region.mask(field_.weights)] = 0
    return field_


def evolve_packet(ctx: QContext | None, packet: WavePacket, t: float) -> LatticeField:
    """``exp(i t H~_{q,r})`` applied to the lattice image of the packet."""
    return lattice_packet(ctx, packet, -t)


# public state-valued wrappers ------------------------------------------------


def _cone(packet: WavePacket, t: float) -> tuple[int, int]:
    v = t * packet.vbox
    shift = (packet.n - 1) / 2
    return math.floor(min(0.0, v.min()) - shift), math.ceil(max(0.0, v.max()) + shift)


def ballistic_window(packet: WavePacket, t: float, fields: Sequence[LatticeField] = (),
                     tail: float = TAIL_LIMIT) -> tuple[int, int]:
    """Box of part values holding the packet at time t.

    Starts from the ballistic cone ``t * V`` and pads it until the relative
    norm outside is at most ``tail`` for every field given.  Without fields,
    a pad of ``ceil(60 / min width)`` is used.
    """
    lo_c, hi_c = _cone(packet, t)
    half = packet.order // 2
    if not fields:
        pad = math.ceil(60.0 / min(packet.widths))
        return max(lo_c - pad, -half), min(hi_c + pad, half - 1)
    pad = 0
    for f in fields:
        w = f.weights
        dist = np.maximum(0, np.maximum(w[:, 0] - hi_c, lo_c - w[:, -1]))
        mass = np.abs(f.values) ** 2
        total = mass.sum()
        # outside[d] = mass strictly beyond pad d
        per = np.bincount(dist, weights=mass)
        outside = total - np.cumsum(per)
        ok = np.nonzero(outside <= tail ** 2 * total)[0]
        pad = max(pad, int(ok[0]) if ok.size else len(per))
    lo, hi = lo_c - pad, hi_c + pad
    if lo < -half or hi > half - 1:
        log.warning("t=%g: window [%d, %d] exceeds the FFT box; raise the grid order", t, lo, hi)
    return max(lo, -half), min(hi, half - 1)


def _restrict(field_: LatticeField, ctx: QContext, support: Iterable[Weight] | None, t: float, packet) -> StateFn:
    if support is None:
        lo, hi = ballistic_window(packet, t, [field_])
        return field_.to_state(ctx, field_.in_box(lo, hi))
    index = {tuple(int(p) for p in lam): i for i, lam in enumerate(field_.weights)}
    data = {}
    for lam in support:
        i = index.get(tuple(lam))
        if i is None:
            raise ValueError(f"weight {lam} lies outside the FFT box of the packet grid")
        data[tuple(lam)] = complex(field_.values[i])
    return StateFn(ctx.as_float(), packet.n, data)


def packet_q0(packet: WavePacket, t: float, support=None) -> StateFn:
    """Phase-model packet ``F~_0^{-1}(exp(-itE_r) fhat)``."""
    return _restrict(lattice_packet(None, packet, t), QContext(0.0, "float"), support, t, packet)


def packet_pm(ctx: QContext, packet: WavePacket, t: float, sign: int, support=None) -> StateFn:
    """``f_+-(t) = F~_q^{-1}(exp(-itE_r) S_r^(+-1/2) fhat)``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    return _restrict(lattice_packet(ctx, packet, t, 0.5 * sign), ctx, support, t, packet)


def packet_classical(packet: WavePacket, t: float, sigma_hat=None, support=None) -> StateFn:
    if sigma_hat is not None and tuple(sigma_hat) != packet.sigma_hat:
        raise PacketError(f"ordering permutation {tuple(sigma_hat)} does not match the packet's {packet.sigma_hat}")
    return _restrict(classical_packet(packet, t), QContext(0.0, "float"), support, t, packet)


# asymptotic scan -------------------------------------------------------------

SCAN_COLUMNS = ["t", "norm_fplus_minus_f0", "norm_fminus_minus_f0", "norm_f0_minus_fclas", "norm_fpm"]


def asymptotics_scan(ctx: QContext, packet: WavePacket, times: Sequence[float]) -> tuple[list[dict], list[dict]]:
    """Difference norms between the q-boson packets, the phase-model packet
    and the classical packet at each time.

    Returns ``(rows, diagnostics)``: rows carry :data:`SCAN_COLUMNS`;
    diagnostics record the lattice window and the relative tail mass outside
    it for each time.  ``norm_fpm`` is the norm of f_+ for t >= 0 and of f_-
    for t < 0.
    """
    rows, diags = [], []
    for t in sorted(times):
        f0 = lattice_packet(None, packet, t)
        fp = lattice_packet(ctx, packet, t, 0.5)
        fm = lattice_packet(ctx, packet, t, -0.5)
        lo, hi = ballistic_window(packet, t, [f0, fp, fm])
        mask = f0.in_box(lo, hi)
        if t != 0:
            fc = classical_packet(packet, t)
            d_cl = (f0 - fc).norm(mask)
        else:
            d_cl = float("nan")
        main = fp if t >= 0 else fm
        tail = max(f.norm(~mask) / max(f.norm(), 1e-300) for f in (f0, fp, fm))
        if tail > TAIL_LIMIT:
            log.warning("t=%g: relative tail mass %.2e outside window [%d, %d]", t, tail, lo, hi)
        rows.append({
            "t": float(t),
            "norm_fplus_minus_f0": (fp - f0).norm(mask),
            "norm_fminus_minus_f0": (fm - f0).norm(mask),
            "norm_f0_minus_fclas": d_cl,
            "norm_fpm": main.norm(mask),
        })
        diags.append({"t": float(t), "window": [lo, hi], "tail": tail})
    return rows, diags


def matched_branch(rows: list[dict]) -> dict[str, str]:
    """Which difference column decays on each time half-line.

    Compares first and last |t| on each side and names the column with the
    larger decay ratio.
    """
    out = {}
    for side, keep in (("positive", lambda t: t > 0), ("negative", lambda t: t < 0)):
        sel = sorted((r for r in rows if keep(r["t"])), key=lambda r: abs(r["t"]))
        if len(sel) < 2:
            continue
        ratio = {}
        for col in ("norm_fplus_minus_f0", "norm_fminus_minus_f0"):
            ratio[col] = sel[0][col] / max(sel[-1][col], 1e-300)
        out[side] = max(ratio, key=ratio.get)
    return out
