"""Command-line interface: verify suites, one-off integrals, moduli, sublevels.

Exit codes: 0 success / suite pass, 1 suite fail, 2 configuration error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .density import (
    GridMeasure1D,
    PiecewiseDensity1D,
    besov_seminorm,
    bv_seminorm,
    density_from_literal,
    omega,
    sigma_of_density,
)
from .harness import ConfigError, ExperimentConfig, run_suite
from .measures import measure_from_config
from .oscint import osc_sweep
from .poly import Polynomial, Polynomial1D, parse_polynomial
from .pushforward import pushforward_exact_1d, pushforward_mc
from .sublevel import sublevel_measure_1d, sublevel_measure_mc


@contextlib.contextmanager
def _open_out(path: str | None):
    """stdout by default, else a managed file handle."""
    if path is None:
        yield sys.stdout
    else:
        fh = open(path, "w", newline="")
        try:
            yield fh
        finally:
            fh.close()


def _load_json_arg(text: str) -> dict:
    if text.startswith("@"):
        return json.loads(Path(text[1:]).read_text())
    return json.loads(text)


def _parse_measure(text: str):
    """Either a 1-D density literal or a measure-config JSON object."""
    stripped = text.strip()
    if stripped.startswith("piecewise"):
        return density_from_literal(stripped)
    cfg = _load_json_arg(stripped)
    if "measure" in cfg:
        cfg = cfg["measure"]
    return measure_from_config(cfg)


def _cmd_verify(args: argparse.Namespace) -> int:
    try:
        raw = _load_json_arg(args.config)
        config = ExperimentConfig.from_dict(raw)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run_suite(config, out_dir=args.out)
    print(f"suite {report.suite}: {report.verdict}")
    for key, val in sorted(report.constants.items()):
        print(f"  {key} = {val}")
    return 0 if report.passed else 1


def _cmd_oscint(args: argparse.Namespace) -> int:
    mu = _parse_measure(args.measure)
    if isinstance(mu, PiecewiseDensity1D):
        f = Polynomial1D.from_text(args.f)
    else:
        f = parse_polynomial(args.f, n=mu.dim)
    ts = np.geomspace(args.t_min, args.t_max, args.points)
    values = osc_sweep(mu, f, ts, method=args.method, count=args.mc_count, seed=args.seed)
    with _open_out(args.out) as out:
        writer = csv.writer(out)
        writer.writerow(["t", "re", "im", "abs", "err"])
        for v in values:
            writer.writerow([v.t, v.value.real, v.value.imag, abs(v.value), v.abs_error_estimate])
    return 0


def _cmd_pushforward(args: argparse.Namespace) -> int:
    mu = _parse_measure(args.measure)
    if isinstance(mu, PiecewiseDensity1D):
        g = Polynomial1D.from_text(args.f)
        result = pushforward_exact_1d(mu, g, bins=args.bins)
    else:
        f = parse_polynomial(args.f, n=mu.dim)
        result = pushforward_mc(mu, f, count=args.mc_count, bins=args.bins, seed=args.seed)
    grid = result.grid_density
    with _open_out(args.out) as out:
        writer = csv.writer(out)
        writer.writerow(["s", "density", "stderr"])
        centers = grid.centers()
        dens = result.density_values()
        errs = (
            result.stderr / grid.h if result.stderr is not None else np.zeros_like(dens)
        )
        for s, rho_v, se in zip(centers, dens, errs):
            writer.writerow([s, rho_v, se])
    if args.json_out:
        payload = {
            "method": result.method,
            "mc_count": result.mc_count,
            "seed": result.seed,
            "cdf": [[float(a), float(b)] for a, b in result.cdf_table],
        }
        Path(args.json_out).write_text(json.dumps(payload, sort_keys=True))
    return 0


def _cmd_modulus(args: argparse.Namespace) -> int:
    rho = density_from_literal(args.density)
    eps = args.eps
    w = omega(rho, eps)
    s = sigma_of_density(rho, eps)
    print(f"omega({eps}) = {w}")
    print(f"sigma({eps}) = {s}")
    print(f"bv_seminorm = {bv_seminorm(rho)}")
    if args.alpha is not None:
        grid = np.geomspace(eps / 100.0, eps, 24)
        res = besov_seminorm(rho, args.alpha, grid)
        print(f"besov[{args.alpha}] = {res.value} diverging={res.diverging}")
    return 0


def _cmd_sublevel(args: argparse.Namespace) -> int:
    mu = _parse_measure(args.measure)
    eps_list = [float(x) for x in args.eps.split(",")]
    with _open_out(args.out) as out:
        writer = csv.writer(out)
        writer.writerow(["eps", "measure", "bound", "pass"])
        if isinstance(mu, PiecewiseDensity1D):
            f = Polynomial1D.from_text(args.f)
            k = f.degree()
            # explicit constant bound applies when |f^(k)| >= 1 on the support
            fk = f
            for _ in range(k):
                fk = fk.derivative()
            lead_k = abs(fk.coeffs[0])
            sup = mu.sup_norm
            for eps in eps_list:
                val = sublevel_measure_1d(mu, f, eps)
                if lead_k >= 1.0:
                    bound = 8.0 * math.e * k * sup * eps ** (1.0 / k)
                    writer.writerow([eps, val, bound, val <= bound])
                else:
                    writer.writerow([eps, val, "", ""])
        else:
            f = parse_polynomial(args.f, n=mu.dim)
            for eps in eps_list:
                val, se = sublevel_measure_mc(mu, f, eps, count=args.mc_count, seed=args.seed)
                writer.writerow([eps, val, "", ""])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corput-lab",
        description="oscillatory integrals, pushforward densities, moduli of continuity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a named inequality suite from a JSON config")
    p.add_argument("--config", required=True, help="JSON text or @path/to/config.json")
    p.add_argument("--out", default=None, help="directory for report.json and cases.csv")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("oscint", help="sweep an oscillatory integral over t")
    p.add_argument("--f", required=True, help="polynomial text, e.g. 'x1^2 + x2'")
    p.add_argument("--measure", required=True, help="density literal or measure JSON")
    p.add_argument("--t-min", type=float, default=10.0)
    p.add_argument("--t-max", type=float, default=1000.0)
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--method", default="auto", choices=["auto", "exact1d", "tensor", "mc"])
    p.add_argument("--mc-count", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_oscint)

    p = sub.add_parser("pushforward", help="density/CDF of the image measure")
    p.add_argument("--f", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--bins", type=int, default=512)
    p.add_argument("--mc-count", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--json-out", default=None, help="write CDF table and metadata JSON")
    p.set_defaults(fn=_cmd_pushforward)

    p = sub.add_parser("modulus", help="omega/sigma/BV/Besov of a 1-D density")
    p.add_argument("--density", required=True, help="piecewise density literal")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.set_defaults(fn=_cmd_modulus)

    p = sub.add_parser("sublevel", help="measure of {|f| <= eps}")
    p.add_argument("--f", required=True)
    p.add_argument("--measure", required=True)
    p.add_argument("--eps", required=True, help="comma-separated epsilon list")
    p.add_argument("--mc-count", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_sublevel)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError,) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
