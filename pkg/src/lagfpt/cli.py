"""Batch command-line front end.

Subcommands: approx (density grid from known moments), simulate (FPT sample
generation), fit (parameter estimation), sample-approx (density grid from a
raw sample).  Every run is deterministic given config + seed; every output
file embeds the effective configuration in '#' header lines, and report
grids get a rendered figure next to them unless --no-fig is passed.

Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import expansion as ex
from . import sampling
from .estimation import AnnealingConfig, mle_fit, mm_fit, fit_report, DEFAULT_MLE_DEGREE
from .gbm import GbmModel, InvalidModelError, ig_from_gbm, ig_moments_recursive, ig_pdf
from .presets import CASES
from .sampling import CensoringError, DegenerateSampleError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class ConfigError(ValueError):
    pass


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _header(pairs: dict) -> list[str]:
    return [f"# {key} = {value}" for key, value in pairs.items() if value is not None]


def _model_from_args(args: argparse.Namespace, required: bool = True) -> GbmModel | None:
    if args.preset:
        if args.preset.upper() not in CASES:
            raise ConfigError(f"unknown preset {args.preset!r}")
        return CASES[args.preset.upper()]
    if args.mu is None and args.sigma is None:
        if required:
            raise ConfigError("specify --preset or all of --mu --sigma --S --y0")
        return None
    missing = [k for k in ("mu", "sigma", "S", "y0") if getattr(args, k) is None]
    if missing:
        raise ConfigError(f"missing model flags: {', '.join('--' + m for m in missing)}")
    return GbmModel(mu=args.mu, sigma=args.sigma, y0=args.y0, threshold=args.S)


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, points = spec.split(":")
        lo, hi, points = float(lo), float(hi), int(points)
    except ValueError:
        raise ConfigError(f"bad grid spec {spec!r}; expected t_min:t_max:points") from None
    if not (0 < lo < hi and points > 1):
        raise ConfigError(f"bad grid spec {spec!r}; need 0 < t_min < t_max and points > 1")
    return np.linspace(lo, hi, points)


def _grid_for(args: argparse.Namespace, p) -> np.ndarray:
    if args.grid:
        return _parse_grid(args.grid)
    return ex.diagnostic_grid(p.b, p.variance)


def _grid_csv(header: dict, columns: dict[str, np.ndarray]) -> str:
    lines = _header(header)
    lines.append(",".join(columns))
    cols = list(columns.values())
    for row in zip(*cols):
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _maybe_render(args: argparse.Namespace, t, g_hat, g_true, title: str) -> Path | None:
    if args.no_fig:
        return None
    from .plotting import render_density_figure

    fig_path = Path(args.out).with_suffix(".png")
    render_density_figure(fig_path, t, g_hat, g_true, title=title)
    return fig_path


def cmd_approx(args: argparse.Namespace) -> int:
    model = _model_from_args(args)
    p = ig_from_gbm(model)
    ref = ex.default_reference(p.b, p.variance)
    regime = ex.check_beta_admissible(ref, p.b, p.variance)
    moments = ig_moments_recursive(p, args.n_cap)
    if args.n is not None:
        exp = ex.build_expansion(ref, moments, args.n)
    else:
        exp = ex.build_adaptive(ref, moments, epsilon=args.epsilon, n_cap=args.n_cap)

    t = _grid_for(args, p)
    g_true = np.asarray(ig_pdf(p, t))
    g_hat = np.asarray(ex.ghat_eval(exp, t))
    header = {
        "command": "approx",
        "preset": args.preset,
        "mu": model.mu,
        "sigma": model.sigma,
        "S": model.threshold,
        "y0": model.y0,
        "alpha": ref.alpha,
        "beta": ref.beta,
        "beta_regime": regime.value,
        "n": exp.n,
        "stop_reason": exp.stop_reason or "fixed",
        "epsilon": args.epsilon if args.n is None else None,
        "n_cap": args.n_cap,
        "h_hat": exp.h_hat,
        "negativity_count": ex.negativity_count(exp, t),
        "sup_abs_err": float(np.max(np.abs(g_true - g_hat))),
    }
    out = Path(args.out)
    _atomic_write(out, _grid_csv(header, {"t": t, "g_true": g_true, "g_hat": g_hat,
                                          "abs_err": np.abs(g_true - g_hat)}))
    _maybe_render(args, t, g_hat, g_true, title=f"approx n={exp.n}")
    if exp.stop_reason == "cap":
        print(f"warning: degree cap {args.n_cap} reached before the stopping criterion",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    model = _model_from_args(args)
    p = ig_from_gbm(model)
    if args.source == "milstein":
        sample = sampling.simulate_gbm_fpt(
            model, n_paths=args.paths, dt=args.dt, t_max=args.t_max, seed=args.seed
        )
    else:
        sample = sampling.sample_ig_exact(p, n=args.paths, seed=args.seed)
    extra = {
        "preset": args.preset,
        "mu": model.mu,
        "sigma": model.sigma,
        "S": model.threshold,
        "y0": model.y0,
    }
    # save_sample is not atomic; route through the same temp-file writer
    out = Path(args.out)
    lines: list[str] = []
    lines += _header({"source": sample.source, "seed": sample.seed, "dt": sample.dt,
                      "censored": sample.censored or None, **extra})
    lines += [repr(float(t)) for t in sample.times]
    _atomic_write(out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    model = _model_from_args(args)
    sample = sampling.load_sample(args.sample)
    if args.method == "mm":
        result = mm_fit(sample, threshold=model.threshold, y0=model.y0)
    else:
        config = AnnealingConfig(
            n_stages=args.anneal_stages, proposals_per_stage=args.anneal_proposals
        )
        result = mle_fit(
            sample,
            threshold=model.threshold,
            y0=model.y0,
            n=args.n if args.n is not None else DEFAULT_MLE_DEGREE,
            config=config,
            seed=args.seed,
        )
    report = fit_report(result, true_mu=model.mu if args.preset else None,
                        true_sigma2=model.sigma**2 if args.preset else None)
    if args.out:
        _atomic_write(Path(args.out), report + "\n")
    else:
        print(report)
    return EXIT_OK


def cmd_sample_approx(args: argparse.Namespace) -> int:
    model = _model_from_args(args, required=False)
    sample = sampling.load_sample(args.sample)
    exp, kappa = sampling.approximate_from_sample(
        sample, r_max=args.r_max, epsilon=args.epsilon, n_cap=args.n_cap
    )
    mean, var = kappa[1], kappa[2]
    if args.grid:
        t = _parse_grid(args.grid)
    else:
        t = ex.diagnostic_grid(mean, var)
    g_hat = np.asarray(ex.ghat_eval(exp, t))
    columns: dict[str, np.ndarray] = {"t": t, "g_hat": g_hat}
    g_true = None
    sup_err = None
    if model is not None:
        p = ig_from_gbm(model)
        g_true = np.asarray(ig_pdf(p, t))
        columns = {"t": t, "g_true": g_true, "g_hat": g_hat, "abs_err": np.abs(g_true - g_hat)}
        sup_err = float(np.max(np.abs(g_true - g_hat)))
    header = {
        "command": "sample-approx",
        "sample": str(args.sample),
        "sample_size": sample.size,
        "preset": args.preset,
        "r_max": args.r_max,
        "kappa": ",".join(f"{k:.6g}" for k in kappa[1:]),
        "alpha": exp.ref.alpha,
        "beta": exp.ref.beta,
        "n": exp.n,
        "stop_reason": exp.stop_reason,
        "epsilon": args.epsilon,
        "n_cap": args.n_cap,
        "h_hat": exp.h_hat,
        "negativity_count": ex.negativity_count(exp, t),
        "sup_abs_err": sup_err,
    }
    _atomic_write(Path(args.out), _grid_csv(header, columns))
    _maybe_render(args, t, g_hat, g_true, title=f"sample-approx n={exp.n}")
    if exp.stop_reason == "cap":
        print(f"warning: degree cap {args.n_cap} reached before the stopping criterion",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=["A", "B", "C", "a", "b", "c"], default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--S", type=float, default=None)
    p.add_argument("--y0", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lagfpt", description=__doc__)
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON config file; keys match flag names, flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="density grid from analytically known moments")
    _add_model_flags(p)
    p.add_argument("--n", type=int, default=None, help="fixed degree (default: adaptive)")
    p.add_argument("--adaptive", action="store_true", help="adaptive degree (the default)")
    p.add_argument("--epsilon", type=float, default=ex.DEFAULT_EPSILON)
    p.add_argument("--n-cap", type=int, default=ex.DEFAULT_N_CAP)
    p.add_argument("--grid", default=None, help="t_min:t_max:points")
    p.add_argument("--out", required=True)
    p.add_argument("--no-fig", action="store_true", help="skip the rendered figure")
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("simulate", help="generate an FPT sample file")
    _add_model_flags(p)
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--dt", type=float, default=sampling.DEFAULT_DT)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--source", choices=["milstein", "exact"], default="milstein")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="estimate (mu, sigma^2) from a sample file")
    p.add_argument("sample", type=Path)
    _add_model_flags(p)
    p.add_argument("--method", choices=["mle", "mm"], default="mle")
    p.add_argument("--n", type=int, default=None, help="expansion degree for mle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--anneal-stages", type=int, default=AnnealingConfig.n_stages)
    p.add_argument("--anneal-proposals", type=int, default=AnnealingConfig.proposals_per_stage)
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sample-approx", help="density grid from a raw FPT sample")
    p.add_argument("sample", type=Path)
    _add_model_flags(p)
    p.add_argument("--r-max", type=int, default=sampling.MAX_KSTAT_ORDER)
    p.add_argument("--epsilon", type=float, default=ex.DEFAULT_EPSILON)
    p.add_argument("--n-cap", type=int, default=ex.DEFAULT_N_CAP)
    p.add_argument("--grid", default=None, help="t_min:t_max:points")
    p.add_argument("--out", required=True)
    p.add_argument("--no-fig", action="store_true", help="skip the rendered figure")
    p.set_defaults(func=cmd_sample_approx)
    return parser


def _apply_config_file(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    """Turn config-file entries into leading flags so command-line flags win."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        cfg_path = Path(argv[idx + 1])
    except IndexError:
        raise ConfigError("--config requires a path") from None
    try:
        cfg = json.loads(cfg_path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {cfg_path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad config file {cfg_path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    rest = argv[:idx] + argv[idx + 2 :]
    if not rest:
        raise ConfigError("a subcommand is required")
    injected: list[str] = []
    for key, value in cfg.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                injected.append(flag)
        else:
            injected += [flag, str(value)]
    # flags after the subcommand, before explicit ones (argparse keeps the last)
    return [rest[0], *injected, *rest[1:]]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except (ConfigError, InvalidModelError, ex.AdmissibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CensoringError, DegenerateSampleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
