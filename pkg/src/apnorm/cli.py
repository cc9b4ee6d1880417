"""Command-line interface: phases, sweep, certify, verify, export.

Outputs are byte-deterministic for a fixed config: floats are written with
the shortest round-trip decimal form, field and row order are fixed, and
metadata headers echo the configuration (never timestamps).

Exit codes: 0 success, 2 config error, 3 unresolvable grid, 4 unsound
certificate, 5 certificate refusal (degenerate gradient).
"""

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__, acceptance, certify, growth
from .engine import GridPolicy, GridResolutionError
from .phases import builtin, list_builtins

SWEEP_COLUMNS = ["phase", "m", "p", "lambda", "grid_n", "norm", "tail_bound",
                 "cert_lower", "upper_bound", "theory_lower_exp", "theory_upper_exp"]
CERT_COLUMNS = ["phase", "m", "p", "lambda", "delta", "c_fit", "measure",
                "bound", "norm", "pass_rate", "sound"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GRID = 3
EXIT_UNSOUND = 4
EXIT_REFUSED = 5


class ConfigError(Exception):
    pass


def fmt_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(float(v))  # shortest round-trip decimal
    return str(v)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def read_config_file(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"config file {path} not found")
    out = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _parse_floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}: {exc}")


def _parse_ints(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}")


def add_common_flags(sub):
    sub.add_argument("--config", help="flat key=value config file; flags override it")
    sub.add_argument("--phase", help="phase family name")
    sub.add_argument("--m", type=int, help="torus dimension")
    sub.add_argument("--p", help="comma list of p values, e.g. 1,1.5")
    sub.add_argument("--lambdas", help="comma list of frequencies")
    sub.add_argument("--dyadic", help="dyadic frequency range lo:hi, e.g. 8:256")
    sub.add_argument("--alpha", type=float, help="weierstrass smoothness exponent")
    sub.add_argument("--depth", type=int, help="weierstrass dyadic depth")
    sub.add_argument("--k", help="linear phase frequency vector, e.g. 2,1")
    sub.add_argument("--c", type=float, help="constant phase offset")
    sub.add_argument("--base", help="base family for tensor_sum")
    sub.add_argument("--output", help="output file path")
    sub.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    sub.add_argument("--cache-dir", help="norm row cache directory (APNORM_CACHE_DIR)")
    sub.add_argument("--no-cache", action="store_true", help="disable the row cache")
    sub.add_argument("--workers", type=int, help="parallel row workers (default 1)")
    sub.add_argument("--n-override", type=int, help="force the grid size")
    sub.add_argument("--max-doublings", type=int, help="annulus-driven grid doublings (default 3)")


def build_settings(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        cfg = read_config_file(Path(args.config))

    def pick(flag, key, default=None):
        v = getattr(args, flag, None)
        if v is not None:
            return v
        return cfg.get(key, default)

    settings = {
        "phase": pick("phase", "phase", "cosine"),
        "m": int(pick("m", "m", 1)),
        "format": pick("format", "format", "csv"),
        "output": pick("output", "output"),
        "workers": int(pick("workers", "workers", 1)),
        "cache_dir": pick("cache_dir", "cache_dir"),
        "no_cache": bool(getattr(args, "no_cache", False) or cfg.get("no_cache") == "true"),
    }

    p_text = pick("p", "p", "1")
    settings["p_values"] = _parse_floats(p_text) if isinstance(p_text, str) else tuple(p_text)

    dyadic = pick("dyadic", "dyadic")
    lam_text = pick("lambdas", "lambdas")
    if dyadic:
        try:
            lo, _, hi = str(dyadic).partition(":")
            settings["lambdas"] = growth.dyadic_lambdas(float(lo), float(hi))
        except ValueError as exc:
            raise ConfigError(f"bad dyadic range {dyadic!r}: {exc}")
    elif lam_text:
        settings["lambdas"] = _parse_floats(lam_text) if isinstance(lam_text, str) else tuple(lam_text)
    else:
        settings["lambdas"] = growth.dyadic_lambdas(8, 64)

    params = {}
    alpha = pick("alpha", "alpha")
    if alpha is not None:
        params["alpha"] = float(alpha)
    depth = pick("depth", "depth")
    if depth is not None:
        params["depth"] = int(depth)
    c = pick("c", "c")
    if c is not None:
        params["c"] = float(c)
    base = pick("base", "base")
    if base is not None:
        params["base"] = str(base)
    k = pick("k", "k")
    if k is not None:
        params["k"] = _parse_ints(k) if isinstance(k, str) else tuple(k)
    settings["params"] = params

    policy_kwargs = {}
    n_override = pick("n_override", "n_override")
    if n_override is not None:
        policy_kwargs["n_override"] = int(n_override)
    max_doublings = pick("max_doublings", "max_doublings")
    if max_doublings is not None:
        policy_kwargs["max_doublings"] = int(max_doublings)
    settings["policy"] = GridPolicy(**policy_kwargs)
    return settings


def metadata_lines(settings: dict, extra: dict | None = None) -> list:
    echo = {
        "phase": settings["phase"],
        "m": settings["m"],
        "p": ",".join(repr(v) for v in settings["p_values"]),
        "lambdas": ",".join(repr(v) for v in settings["lambdas"]),
        **{k: fmt_value(v) for k, v in sorted(settings["params"].items())},
    }
    if extra:
        echo.update(extra)
    policy = settings["policy"]
    lines = [f"# apnorm {__version__}",
             "# config: " + " ".join(f"{k}={v}" for k, v in sorted(echo.items())),
             (f"# grid_policy: min_n={policy.min_n} bandwidth_factor={policy.bandwidth_factor} "
              f"phase_freq_factor={policy.phase_freq_factor} max_doublings={policy.max_doublings} "
              f"annulus_rel_tol={fmt_value(policy.annulus_rel_tol)} "
              f"n_override={fmt_value(policy.n_override)}")]
    return lines


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_phases(args) -> int:
    listing = list_builtins()
    if args.json:
        print(json.dumps(listing, indent=2, sort_keys=True))
    else:
        for name in sorted(listing):
            print(name)
            for key, doc in listing[name].items():
                print(f"    {key}: {doc}")
    return EXIT_OK


def _sweep_rows_for_output(result: growth.SweepResult) -> list:
    rows = []
    for row in result.rows:
        e = row.estimate
        rows.append({
            "phase": result.phase_key,
            "m": result.plan.m,
            "p": row.p,
            "lambda": row.lam,
            "grid_n": e.grid_n if e else None,
            "norm": e.value if e else None,
            "tail_bound": (e.tail_bound if e and not e.tail_unbounded else
                           ("unbounded" if e else None)),
            "cert_lower": row.cert_lower,
            "upper_bound": row.upper_bound,
            "theory_lower_exp": row.theory_lower_exp,
            "theory_upper_exp": row.theory_upper_exp,
        })
    return rows


def _summary_records(result: growth.SweepResult) -> list:
    records = []
    for p in result.plan.p_values:
        try:
            report = growth.growth_report(result, p)
        except ValueError as exc:
            records.append({"p": p, "fit": f"unavailable ({exc})"})
            continue
        records.append({
            "p": p,
            "beta_hat": report.fit.beta,
            "intercept": report.fit.intercept,
            "residual_rms": report.fit.residual_rms,
            "theory_lower_exp": report.theory.lower if report.theory.lower_valid else None,
            "theory_upper_exp": report.theory.upper if report.theory.upper_valid else None,
            "two_sided": report.theory.two_sided,
        })
    return records


def write_sweep_csv(path: Path, settings, result: growth.SweepResult):
    lines = metadata_lines(settings)
    lines.append(",".join(SWEEP_COLUMNS))
    for row in _sweep_rows_for_output(result):
        lines.append(",".join(fmt_value(row[c]) for c in SWEEP_COLUMNS))
    for rec in _summary_records(result):
        body = " ".join(f"{k}={fmt_value(v)}" for k, v in rec.items())
        lines.append(f"# summary {body}")
    path.write_text("\n".join(lines) + "\n")


def write_sweep_json(path: Path, settings, result: growth.SweepResult):
    payload = {
        "metadata": {"version": __version__,
                     "header": metadata_lines(settings)},
        "columns": SWEEP_COLUMNS,
        "rows": _sweep_rows_for_output(result),
        "summary": _summary_records(result),
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_plot_data(stem: Path, rows: list):
    """Two-column (log lambda, log norm) file per p value."""
    import math

    by_p: dict = {}
    for row in rows:
        if row["norm"] is None:
            continue
        by_p.setdefault(row["p"], []).append((row["lambda"], row["norm"]))
    written = []
    for p, pairs in sorted(by_p.items()):
        path = stem.with_name(stem.name + f".p{fmt_value(p)}.plot")
        lines = [f"{repr(math.log(lam))} {repr(math.log(v))}" for lam, v in pairs if v > 0]
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    return written


def cmd_sweep(args) -> int:
    settings = build_settings(args)
    cache_dir = None
    if not settings["no_cache"]:
        cache_dir = Path(settings["cache_dir"]) if settings["cache_dir"] else growth.default_cache_dir()
    try:
        plan = growth.SweepPlan(
            family=settings["phase"], m=settings["m"],
            p_values=settings["p_values"], lambdas=settings["lambdas"],
            params=settings["params"], policy=settings["policy"],
            cache_dir=cache_dir, workers=settings["workers"],
        )
        plan.phase()  # validate family/params eagerly
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    result = growth.sweep(plan)
    out = Path(settings["output"] or "sweep.csv")
    if settings["format"] == "json":
        write_sweep_json(out, settings, result)
    else:
        write_sweep_csv(out, settings, result)
    plots = write_plot_data(out, _sweep_rows_for_output(result))
    print(f"wrote {out} and {len(plots)} plot-data file(s)")

    failed = [r for r in result.rows if r.error is not None]
    if failed:
        for r in failed:
            print(f"row p={r.p} lambda={r.lam} failed: {r.error}", file=sys.stderr)
        return EXIT_GRID
    return EXIT_OK


def cmd_certify(args) -> int:
    settings = build_settings(args)
    try:
        phase = builtin(settings["phase"], m=settings["m"], **settings["params"])
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        inputs = certify.certificate_inputs(phase)
        certs = []
        for lam in settings["lambdas"]:
            for p in settings["p_values"]:
                certs.append(certify.build_certificate(
                    phase, lam, p, policy=settings["policy"], inputs=inputs))
    except certify.DegenerateGradientError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except GridResolutionError as exc:
        print(f"grid failure: {exc}", file=sys.stderr)
        return EXIT_GRID

    rows = [{
        "phase": c.phase, "m": c.m, "p": c.p, "lambda": c.lam, "delta": c.delta,
        "c_fit": c.c_fit, "measure": c.measure, "bound": c.bound,
        "norm": c.norm_value, "pass_rate": c.pass_rate, "sound": c.sound,
    } for c in certs]

    out = Path(settings["output"] or "certificates.csv")
    if settings["format"] == "json":
        payload = {"metadata": {"version": __version__,
                                "header": metadata_lines(settings)},
                   "columns": CERT_COLUMNS, "rows": rows}
        out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        lines = metadata_lines(settings)
        lines.append(",".join(CERT_COLUMNS))
        for row in rows:
            lines.append(",".join(fmt_value(row[c]) for c in CERT_COLUMNS))
        out.write_text("\n".join(lines) + "\n")

    unsound = [c for c in certs if not c.sound]
    for c in certs:
        state = "sound" if c.sound else "UNSOUND"
        print(f"lambda={fmt_value(c.lam)} p={fmt_value(c.p)}: bound {c.bound:.6g} "
              f"<= norm {c.norm_value:.6g} [{state}], pass rate {c.pass_rate:.2f}")
    print(f"wrote {out}")
    return EXIT_UNSOUND if unsound else EXIT_OK


def cmd_verify(args) -> int:
    results = acceptance.run_all()
    for res in results:
        print(res.line())
    if args.tighten is not None:
        factor = args.tighten
        marginal = [r for r in results if r.passed and r.worst_ratio > factor]
        for r in marginal:
            print(f"[MARGINAL at x{factor}] criterion {r.index} {r.name}: "
                  f"worst error at {r.worst_ratio:.2f} of tolerance")
        if not marginal:
            print(f"no marginal criteria at tolerance factor {factor}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else 1


def cmd_export(args) -> int:
    src = Path(args.input)
    if not src.exists():
        print(f"config error: input {src} not found", file=sys.stderr)
        return EXIT_CONFIG
    try:
        payload = json.loads(src.read_text())
        rows = payload["rows"]
        columns = payload.get("columns", SWEEP_COLUMNS)
    except (ValueError, KeyError) as exc:
        print(f"config error: cannot parse {src}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.output or src.with_suffix(".csv"))
    if args.to == "csv":
        lines = payload.get("metadata", {}).get("header", [f"# apnorm {__version__}"])
        lines = list(lines) + [",".join(columns)]
        for row in rows:
            lines.append(",".join(fmt_value(row.get(c)) for c in columns))
        out.write_text("\n".join(lines) + "\n")
        print(f"wrote {out}")
    else:
        plots = write_plot_data(out, rows)
        print(f"wrote {len(plots)} plot-data file(s)")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="apnorm",
        description="Coefficient-norm growth lab for oscillating phases on the torus",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_phases = subs.add_parser("phases", help="list built-in phase families")
    p_phases.add_argument("--json", action="store_true")
    p_phases.set_defaults(func=cmd_phases)

    p_sweep = subs.add_parser("sweep", help="norm sweep over (p, lambda) with exponent fits")
    add_common_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_cert = subs.add_parser("certify", help="emit lower-bound certificates")
    add_common_flags(p_cert)
    p_cert.set_defaults(func=cmd_certify)

    p_verify = subs.add_parser("verify", help="run the acceptance suite")
    p_verify.add_argument("--tighten", type=float, default=None,
                          help="report criteria whose error exceeds this fraction of tolerance")
    p_verify.set_defaults(func=cmd_verify)

    p_export = subs.add_parser("export", help="convert saved sweep JSON to csv/plot data")
    p_export.add_argument("--input", required=True)
    p_export.add_argument("--to", choices=("csv", "plot"), default="csv")
    p_export.add_argument("--output")
    p_export.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
