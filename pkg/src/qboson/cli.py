"""Command-line front end: ``qboson {verify,orthogonality,evolve,scatter}``.

Every command writes deterministic output (sorted JSON keys, fixed float
formatting, no timestamps) and exits 0 iff all of its checks pass.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import hamiltonians as ham
from . import scattering as sc
from . import verify as vf
from .fock import delta_n
from .qnum import EXACT, FLOAT, QContext
from .spectral import build_grid, verify_orthogonality

log = logging.getLogger("qboson")

LADDER = (16, 24, 32, 48)
LADDER_SLACK = 0.10
LADDER_FLOOR = 1e-12
ORTHO_TOL = 1e-2
NORM_TOL = 5e-3

DEFAULTS = {
    "verify": {"n": 3, "q": "1/2", "window": "-3:3", "seed": 42, "trials": 50},
    "orthogonality": {"n": 2, "q": "1/2", "quad_order": 48, "lam": None, "mu": None},
    "evolve": {"n": 2, "q": "1/2", "r": 1, "quad_order": 512, "time_list": "0,5,10,20"},
    "scatter": {"n": 2, "q": "1/2", "r": 1, "quad_order": 512, "time_list": "-40,-20,-10,10,20,40"},
}


class ConfigError(ValueError):
    pass


def parse_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in str(text).split(":"))
    except ValueError:
        raise ConfigError(f"window must look like LO:HI, got {text!r}") from None
    if lo > hi:
        raise ConfigError(f"window {text!r} is empty")
    return lo, hi


def parse_floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def parse_ints(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def make_context(q, mode: str | None) -> QContext:
    text = str(q)
    if mode not in (None, EXACT, FLOAT):
        raise ConfigError(f"unknown mode {mode!r}")
    try:
        if mode is None:
            ctx = QContext.parse(text)
        elif mode == EXACT:
            ctx = QContext(Fraction(text), EXACT)
        else:
            ctx = QContext(float(Fraction(text)), FLOAT)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid q {text!r}: {exc}") from None
    if not 0 < float(ctx.q) < 1:
        raise ConfigError("q must satisfy 0 < q < 1")
    return ctx


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def emit(text: str, out: str | None, suffix: str):
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.suffix != suffix:
        path = path.with_name(path.name + suffix)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# commands ---------------------------------------------------------------


def cmd_verify(cfg: argparse.Namespace, v=ham.v_coeff) -> int:
    """Run the exact suites; ``v`` lets tests inject a faulty coefficient."""
    ctx = make_context(cfg.q, cfg.mode)
    window = parse_window(cfg.window)
    if cfg.n < 1:
        raise ConfigError("n must be >= 1")
    report = vf.run_all(ctx, cfg.n, window, cfg.seed, cfg.trials, v=v)
    emit(dump_json(report.to_dict()), cfg.out, ".json")
    for check in report.checks:
        if not check.passed:
            log.error("check %s failed: %s", check.name, json.dumps(check.witness, sort_keys=True))
    return 0 if report.passed else 1


def ladder_monotone(errors: list[float]) -> bool:
    return all(b <= (1 + LADDER_SLACK) * a + LADDER_FLOOR for a, b in zip(errors, errors[1:]))


def orthogonality_report(ctx: QContext, lam, mu, order: int) -> dict:
    n = len(lam)
    fctx = ctx.as_float()
    target = 1 / delta_n(ctx, lam) if tuple(lam) == tuple(mu) else 0
    tval = float(target)
    orders = sorted(set(LADDER) | {order})
    rows = []
    for M in orders:
        est = verify_orthogonality(fctx, lam, mu, build_grid(n, M))
        rows.append({"order": M, "re": est.real, "im": est.imag, "abs_error": abs(est - tval)})
    main = next(r for r in rows if r["order"] == order)
    errors = [r["abs_error"] for r in rows if r["order"] in LADDER]
    scale = abs(tval) if tval else 1.0
    checks = {"within_tolerance": main["abs_error"] <= ORTHO_TOL * scale,
              "ladder_monotone": ladder_monotone(errors)}
    return {"schema_version": vf.SCHEMA_VERSION, "n": n, "q": str(ctx.q), "lambda": list(lam), "mu": list(mu),
            "order": order, "target": str(target), "target_float": tval, "estimate": [main["re"], main["im"]],
            "abs_error": main["abs_error"], "ladder": rows, "checks": checks, "passed": all(checks.values())}


def cmd_orthogonality(cfg: argparse.Namespace) -> int:
    ctx = make_context(cfg.q, cfg.mode)
    lam = parse_ints(cfg.lam) if cfg.lam is not None else (0,) * cfg.n
    mu = parse_ints(cfg.mu) if cfg.mu is not None else lam
    if len(lam) != cfg.n or len(mu) != cfg.n:
        raise ConfigError("lambda and mu need n parts")
    if cfg.quad_order < 4:
        raise ConfigError("quadrature order must be >= 4")
    report = orthogonality_report(ctx, lam, mu, cfg.quad_order)
    emit(dump_json(report), cfg.out, ".json")
    return 0 if report["passed"] else 1


def build_packet(cfg: argparse.Namespace) -> sc.WavePacket:
    if cfg.quad_order < 4:
        raise ConfigError("quadrature order must be >= 4")
    if cfg.packet_center is None:
        if cfg.packet_width is not None:
            raise ConfigError("--packet-width needs --packet-center")
        return sc.reference_packet(cfg.n, cfg.r, cfg.quad_order)
    center = parse_floats(cfg.packet_center)
    if len(center) != cfg.n:
        raise ConfigError("packet center needs n components")
    widths = parse_floats(cfg.packet_width) if cfg.packet_width is not None else [0.5]
    if len(widths) == 1:
        widths = widths * cfg.n
    return sc.make_packet(center, widths, cfg.r, cfg.quad_order)


def _manifest(cfg, ctx, packet) -> dict:
    return {"schema_version": vf.SCHEMA_VERSION, "n": cfg.n, "q": str(ctx.q), "mode": ctx.mode,
            "packet": packet.manifest(), "grid": packet.grid.describe()}


def cmd_evolve(cfg: argparse.Namespace) -> int:
    """Snapshots of ``exp(itH~_{q,r})`` applied to the packet, plus a norm table."""
    ctx = make_context(cfg.q, cfg.mode).as_float()
    packet = build_packet(cfg)
    times = sorted(parse_floats(cfg.time_list))
    window = parse_window(cfg.window) if cfg.window is not None else None
    rows, snaps = [], []
    for t in times:
        field_ = sc.evolve_packet(ctx, packet, t)
        total = field_.norm()
        lo, hi = window if window else sc.ballistic_window(packet, t, [field_])
        mask = field_.in_box(lo, hi)
        tail = field_.norm(~mask) / total
        if tail > sc.TAIL_LIMIT:
            log.warning("t=%g: packet leaves the window [%d, %d]; relative tail mass %.3e", t, lo, hi, tail)
        rows.append({"t": t, "norm": total, "norm_in_window": field_.norm(mask), "tail": tail})
        snaps.append({"t": t, "window": [lo, hi], "state": field_.to_state(ctx, mask, tol=1e-12).to_records()})
    checks = {"norm_conserved": all(abs(r["norm"] - 1) <= NORM_TOL for r in rows)}
    manifest = _manifest(cfg, ctx, packet)
    manifest.update({"times": times, "snapshots": snaps, "checks": checks, "passed": all(checks.values())})
    table = write_csv(rows, ["t", "norm", "norm_in_window", "tail"])
    if cfg.out is None:
        sys.stdout.write(table)
    else:
        emit(table, cfg.out, ".csv")
        emit(dump_json(manifest), cfg.out, ".json")
    return 0 if manifest["passed"] else 1


def cmd_scatter(cfg: argparse.Namespace) -> int:
    ctx = make_context(cfg.q, cfg.mode).as_float()
    packet = build_packet(cfg)
    times = sorted(parse_floats(cfg.time_list))
    rows, diags = sc.asymptotics_scan(ctx, packet, times)
    checks = {"norm_conserved": all(abs(r["norm_fpm"] - 1) <= NORM_TOL for r in rows),
              "tail_bounded": all(d["tail"] <= sc.TAIL_LIMIT for d in diags)}
    manifest = _manifest(cfg, ctx, packet)
    manifest.update({"times": times, "windows": diags, "matched_branch": sc.matched_branch(rows),
                     "checks": checks, "passed": all(checks.values())})
    table = write_csv(rows, sc.SCAN_COLUMNS)
    if cfg.out is None:
        sys.stdout.write(table)
    else:
        emit(table, cfg.out, ".csv")
        emit(dump_json(manifest), cfg.out, ".json")
    return 0 if manifest["passed"] else 1


COMMANDS = {"verify": cmd_verify, "orthogonality": cmd_orthogonality, "evolve": cmd_evolve, "scatter": cmd_scatter}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qboson", description="q-boson hierarchy: checks, spectra and scattering runs")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON file whose keys mirror the long flags")
        sp.add_argument("--n", type=int, help="particle number")
        sp.add_argument("--q", help="deformation parameter: p/d (exact) or decimal (float)")
        sp.add_argument("--mode", choices=[EXACT, FLOAT], help="override the mode implied by --q")
        sp.add_argument("--window", help="part range LO:HI")
        sp.add_argument("--quad-order", type=int, help="per-axis quadrature order")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output path (suffix added per file type); stdout if omitted")
        sp.add_argument("-v", "--verbose", action="store_true")

    def packet(sp):
        sp.add_argument("--r", type=int, help="flow index")
        sp.add_argument("--time-list", help="comma separated times")
        sp.add_argument("--packet-center", help="comma separated spectral center")
        sp.add_argument("--packet-width", help="bump half-width(s), one or n values")

    s = sub.add_parser("verify", help="exact operator-identity suites")
    common(s)
    s.add_argument("--trials", type=int, help="random states per check")
    s = sub.add_parser("orthogonality", help="quadrature check of the orthogonality relations")
    common(s)
    s.add_argument("--lam", help="weight, comma separated")
    s.add_argument("--mu", help="weight, comma separated")
    s = sub.add_parser("evolve", help="time evolution of a wave packet")
    common(s)
    packet(s)
    s = sub.add_parser("scatter", help="q-boson vs phase-model asymptotics")
    common(s)
    packet(s)
    return p


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Merge explicit flags over the config file over command defaults."""
    merged = {}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        merged.update({k.replace("-", "_"): v for k, v in data.items()})
    for key, value in vars(args).items():
        if value is not None and value is not False:
            merged[key] = value
        else:
            merged.setdefault(key, value)
    for key, value in DEFAULTS[args.command].items():
        if merged.get(key) is None:
            merged[key] = value
    unknown = set(merged) - set(vars(args))
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return argparse.Namespace(**merged)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = resolve(args)
        return COMMANDS[cfg.command](cfg)
    except (ConfigError, sc.PacketError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
