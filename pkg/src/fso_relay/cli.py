"""Command-line front end: link budgets, SNR reports, capacity estimates, sweeps.

Every CSV artifact is written atomically (temp file + rename) together with a
manifest JSON recording the resolved parameters, seed, and flags needed to
reproduce it byte for byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import replace
from pathlib import Path

from .capacity import GeometryError, compare_modes, ergodic_capacity, instantaneous_capacity, sweep
from .channel import FadingRealization, build_hop
from .params import ParameterError, SystemParams, load_params, params_to_config
from .relay import (BREAKDOWN_LABELS, VarianceMode, chain_gains, destination_stats,
                    thermal_noise_variance)

_EXIT_CONFIG = 2
_EXIT_GEOMETRY = 3
_EXIT_NUMERIC = 4

_MODE_NAMES = tuple(mode.value for mode in VarianceMode)


@dataclasses.dataclass
class RunManifest:
    """Everything needed to regenerate an output file byte for byte."""

    subcommand: str
    params: dict
    seed: int
    mode: str
    options: dict
    outputs: list[str]
    duration_s: float

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


def _fmt(value: float) -> str:
    return f"{value:.8e}"


def _write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    fd, tmp_name = tempfile.mkstemp(dir=str(parent), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _manifest_path(out: Path) -> Path:
    return Path(out).with_suffix(".manifest.json")


def _load_config(path: Path | None) -> SystemParams:
    if path is None:
        return SystemParams()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from None
    return load_params(text)


def _resolve_threads(args) -> int | None:
    env = os.environ.get("FSO_RELAY_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ParameterError(f"FSO_RELAY_THREADS must be an integer, got {env!r}") from None
        if value < 1:
            raise ParameterError(f"FSO_RELAY_THREADS must be >= 1, got {value}")
        return value
    return args.threads


def _parse_mode(name: str) -> VarianceMode:
    try:
        return VarianceMode(name)
    except ValueError:
        raise ParameterError(
            f"unknown mode {name!r}; choose from {', '.join(_MODE_NAMES)}") from None


def _distances(args, params: SystemParams, count: int = 3) -> list[float]:
    if args.distances is not None:
        return [float(d) for d in args.distances]
    return [params.d_sd / count] * count


def _with_background(params: SystemParams, p_bg: float) -> SystemParams:
    return replace(params, p_bg_relay1=p_bg, p_bg_relay2=p_bg, p_bg_dest=p_bg)


def _require_out(args) -> Path:
    if args.out is None:
        raise ParameterError("this subcommand writes a CSV artifact; pass --out PATH")
    return Path(args.out)


def _emit(out: Path, csv_text: str, manifest: RunManifest) -> None:
    _write_atomic(out, csv_text)
    _write_atomic(_manifest_path(out), manifest.to_json())


def cmd_link_budget(args) -> int:
    start = time.perf_counter()
    params = _load_config(args.config)
    distances = args.distances if args.distances is not None else [params.d_sd / 3.0] * 3
    labels = ("sr", "rr", "rd") if len(distances) == 3 else [
        f"hop{k + 1}" for k in range(len(distances))]
    rows: list[tuple[str, str, float]] = []
    for label, distance in zip(labels, distances):
        hop = build_hop(float(distance), params)
        rows += [
            (label, "distance_m", hop.distance),
            (label, "xi_per_m", hop.xi),
            (label, "path_loss", hop.path_loss),
            (label, "rytov_var", hop.rytov_var),
            (label, "mu_l", hop.mu_l),
            (label, "sigma2_l", hop.sigma2_l),
        ]
    budget = params.photon_budget()
    rows += [
        ("source", "photons_per_symbol", budget.m_source),
        ("relay1", "photons_per_symbol", budget.m_relay1),
        ("relay2", "photons_per_symbol", budget.m_relay2),
        ("relay1", "background_photons", budget.m_bg_relay1),
        ("relay2", "background_photons", budget.m_bg_relay2),
        ("dest", "background_photons", budget.m_bg_dest),
        ("dest", "thermal_var_counts2", thermal_noise_variance(params)),
    ]
    for scope, quantity, value in rows:
        print(f"{scope:8s}{quantity:24s}{_fmt(value)}")
    if args.out is not None:
        out = Path(args.out)
        csv_text = "scope,quantity,value\n" + "".join(
            f"{scope},{quantity},{_fmt(value)}\n" for scope, quantity, value in rows)
        manifest = RunManifest(
            subcommand="link-budget", params=params_to_config(params), seed=args.seed,
            mode=args.mode, options={"distances": [float(d) for d in distances]},
            outputs=[str(out)], duration_s=time.perf_counter() - start)
        _emit(out, csv_text, manifest)
    return 0


def cmd_snr(args) -> int:
    start = time.perf_counter()
    params = _load_config(args.config)
    mode = _parse_mode(args.mode)
    d_sr, d_rr, d_rd = _distances(args, params)
    hops = [build_hop(d, params) for d in (d_sr, d_rr, d_rd)]
    fading = FadingRealization(hops[0].path_loss, hops[1].path_loss, hops[2].path_loss)
    stats = destination_stats(fading, params, mode)
    gain1, gain2 = chain_gains(fading, params)
    values: list[tuple[str, float]] = [
        ("d_sr_m", d_sr), ("d_rr_m", d_rr), ("d_rd_m", d_rd),
        ("h_sr", fading.h_sr), ("h_rr", fading.h_rr), ("h_rd", fading.h_rd),
        ("gain1", gain1), ("gain2", gain2),
        ("mean_counts", stats.mean),
        ("var_signal", stats.var_signal),
        ("var_thermal", stats.var_thermal),
        ("var_total", stats.var_total),
        ("snr", stats.snr),
    ]
    values += list(zip(BREAKDOWN_LABELS, stats.breakdown))
    for name, value in values:
        print(f"{name:24s}{_fmt(value)}")
    if stats.snr > 0:
        print(f"{'snr_db':24s}{10.0 * math.log10(stats.snr):.4f}")
    print(f"{'capacity_bits':24s}{_fmt(instantaneous_capacity(stats.snr))}")
    if args.out is not None:
        out = Path(args.out)
        header = ",".join(name for name, _ in values)
        row = ",".join(_fmt(value) for _, value in values)
        manifest = RunManifest(
            subcommand="snr", params=params_to_config(params), seed=args.seed,
            mode=mode.value, options={"distances": [d_sr, d_rr, d_rd]},
            outputs=[str(out)], duration_s=time.perf_counter() - start)
        _emit(out, header + "\n" + row + "\n", manifest)
    return 0


def cmd_capacity(args) -> int:
    start = time.perf_counter()
    params = _load_config(args.config)
    mode = _parse_mode(args.mode)
    d_sr, d_rr, d_rd = _distances(args, params)
    estimate = ergodic_capacity(d_sr, d_rr, d_rd, params, mode,
                                n_samples=args.samples, seed=args.seed)
    print(f"capacity_bits_per_use  {_fmt(estimate.mean_bits)}")
    print(f"std_error              {_fmt(estimate.std_error)}")
    print(f"n_samples              {estimate.n_samples}")
    print(f"capacity_bits_per_s    {_fmt(estimate.mean_bits * params.symbol_rate)}")
    if args.nats:
        nats_estimate = ergodic_capacity(d_sr, d_rr, d_rd, params, mode,
                                         n_samples=args.samples, seed=args.seed, nats=True)
        print(f"capacity_nats_per_use  {_fmt(nats_estimate.mean_bits)}")
    if args.out is not None:
        out = Path(args.out)
        csv_text = (
            "d_sr_m,d_rr_m,d_rd_m,capacity_bits,std_error,capacity_bits_per_s\n"
            + ",".join(_fmt(v) for v in (
                d_sr, d_rr, d_rd, estimate.mean_bits, estimate.std_error,
                estimate.mean_bits * params.symbol_rate)) + "\n")
        manifest = RunManifest(
            subcommand="capacity", params=params_to_config(params), seed=args.seed,
            mode=mode.value,
            options={"distances": [d_sr, d_rr, d_rd], "samples": args.samples},
            outputs=[str(out)], duration_s=time.perf_counter() - start)
        _emit(out, csv_text, manifest)
    return 0


def cmd_sweep(args) -> int:
    start = time.perf_counter()
    params = _load_config(args.config)
    mode = _parse_mode(args.mode)
    out = _require_out(args)
    if args.pb is not None:
        params = _with_background(params, args.pb)
    result = sweep(params, args.step, mode, n_samples=args.samples,
                   seed=args.seed, threads=_resolve_threads(args))
    lines = ["d_sr_m,d_rr_m,d_rd_m,capacity_bits,std_error"]
    for point in result.points + (result.optimum,):
        lines.append(",".join(_fmt(v) for v in (
            point.d_sr, point.d_rr, point.d_rd,
            point.estimate.mean_bits, point.estimate.std_error)))
    manifest = RunManifest(
        subcommand="sweep", params=params_to_config(params), seed=args.seed,
        mode=mode.value, options={"step": args.step, "pb": args.pb, "samples": args.samples},
        outputs=[str(out)], duration_s=time.perf_counter() - start)
    _emit(out, "\n".join(lines) + "\n", manifest)
    best = result.optimum
    print(f"optimum d_sr={best.d_sr:.0f} m d_rr={best.d_rr:.0f} m d_rd={best.d_rd:.0f} m "
          f"capacity={best.estimate.mean_bits:.4f} bits")
    print(f"wrote {out}")
    return 0


def cmd_validate(args) -> int:
    start = time.perf_counter()
    params = _load_config(args.config)
    out = _require_out(args)
    try:
        pb_values = [float(v) for v in args.pb_list.split(",") if v != ""]
    except ValueError:
        raise ParameterError(f"--pb-list must be comma-separated numbers, got {args.pb_list!r}") from None
    if not pb_values:
        raise ParameterError("--pb-list must name at least one background power")
    modes = [_parse_mode(name) for name in args.mode_list.split(",") if name != ""]
    if not modes:
        raise ParameterError("--mode-list must name at least one mode")
    step = float(args.step)
    if not (math.isfinite(step) and step > 0):
        raise GeometryError(f"--step must be positive, got {args.step!r}")
    max_k = int(math.floor(params.d_sd / step + 1e-9)) - 1
    if max_k < 1:
        raise GeometryError(
            f"--step {step} m leaves no valid d_rd grid inside d_sd = {params.d_sd} m")
    grid = [k * step for k in range(1, max_k + 1)]
    threads = _resolve_threads(args)
    rows = []
    for p_bg in pb_values:
        table = compare_modes(_with_background(params, p_bg), grid, modes,
                              n_samples=args.samples, seed=args.seed, threads=threads)
        rows += [(d_rd, p_bg, mode, estimate) for d_rd, mode, estimate in table]
    rows.sort(key=lambda row: (row[1], row[0], row[2].value))
    lines = ["d_rd_m,p_b_w,mode,capacity_bits,std_error"]
    for d_rd, p_bg, mode, estimate in rows:
        lines.append(f"{_fmt(d_rd)},{_fmt(p_bg)},{mode.value},"
                     f"{_fmt(estimate.mean_bits)},{_fmt(estimate.std_error)}")
    manifest = RunManifest(
        subcommand="validate", params=params_to_config(params), seed=args.seed,
        mode=",".join(mode.value for mode in modes),
        options={"pb_list": pb_values, "step": step, "samples": args.samples},
        outputs=[str(out)], duration_s=time.perf_counter() - start)
    _emit(out, "\n".join(lines) + "\n", manifest)
    print(f"wrote {out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="JSON parameter file (defaults used when omitted)")
    common.add_argument("--seed", type=int, default=42, help="Monte-Carlo seed")
    common.add_argument("--mode", choices=_MODE_NAMES, default="composed",
                        help="variance model at the destination")
    common.add_argument("--out", type=Path, default=None, help="CSV output path")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: all cores); "
                             "FSO_RELAY_THREADS overrides")

    parser = argparse.ArgumentParser(
        prog="fso-relay",
        description="Triple-hop all-optical amplify-and-forward FSO link simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("link-budget", parents=[common],
                       help="per-hop loss, turbulence, and photon budgets")
    p.add_argument("--distances", type=float, nargs="+", default=None,
                   help="hop lengths in metres (default: three equal hops)")
    p.set_defaults(handler=cmd_link_budget)

    p = sub.add_parser("snr", parents=[common],
                       help="destination statistics at mean fading")
    p.add_argument("--distances", type=float, nargs=3, default=None,
                   metavar=("D_SR", "D_RR", "D_RD"))
    p.set_defaults(handler=cmd_snr)

    p = sub.add_parser("capacity", parents=[common],
                       help="single-point ergodic capacity estimate")
    p.add_argument("--distances", type=float, nargs=3, default=None,
                   metavar=("D_SR", "D_RR", "D_RD"))
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--nats", action="store_true",
                   help="also report capacity in natural-log units")
    p.set_defaults(handler=cmd_capacity)

    p = sub.add_parser("sweep", parents=[common],
                       help="capacity over the relay-placement grid")
    p.add_argument("--step", type=float, default=50.0, help="grid step in metres")
    p.add_argument("--pb", type=float, default=None,
                   help="set all three background powers to this value in watts")
    p.add_argument("--samples", type=int, default=20_000)
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("validate", parents=[common],
                       help="compare variance modes over d_rd with d_sr = d_rr")
    p.add_argument("--pb-list", type=str, default="5e-9,1e-9,1e-10",
                   help="comma-separated background powers in watts")
    p.add_argument("--mode-list", type=str, default="composed,low-bg,thermal",
                   help="comma-separated variance modes")
    p.add_argument("--step", type=float, default=250.0, help="d_rd grid step in metres")
    p.add_argument("--samples", type=int, default=20_000)
    p.set_defaults(handler=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_GEOMETRY
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
