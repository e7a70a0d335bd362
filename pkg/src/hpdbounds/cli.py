"""Command-line interface: ``hpdbounds {bound,simulate,reproduce,validate-moments}``.

Configuration is resolved as defaults, then a JSON file (``--config``), then
``--set key=value`` pairs, then explicit flags. Unknown keys and invalid
values exit with status 2 and name the offending key. Check failures exit 1.
"""
import argparse
import csv
import io
import json
import os
import sys
from dataclasses import astuple, fields

from . import bounds
from .exceptions import ConfigError
from .experiments import ESTIMATORS, MODES, ExperimentConfig, SummaryRow, run_sweep, toeplitz_center
from .manifold import METRICS
from .moments import validate_moments

CSV_HEADER = [f.name for f in fields(SummaryRow)]
BOUND_SERIES = {
    ("euclidean", "deterministic"): "CRB",
    ("euclidean", "bayes-asymptotic"): "BCRB-Asymptotic",
    ("euclidean", "bayes"): "BCRB",
    ("ai", "deterministic"): "ICRB",
    ("ai", "bayes-asymptotic"): "BICRB-Asymptotic",
    ("ai", "bayes"): "BICRB",
}
BOUND_DEFAULTS = {"metric": "ai", "kind": "bayes", "p": 5, "rho": 0.5, "nu": 40, "n": [10], "seed": 0,
                  "exact_ai": False}
MOMENT_DEFAULTS = {"samples": 10_000, "seed": 0, "exact_ai": False, "corrupt": {}}
REPRODUCE_FIGURES = (
    ("fig_det_euclid.csv", "deterministic", None, "euclidean"),
    ("fig_det_ai.csv", "deterministic", None, "ai"),
    ("fig_bayes_nu40_euclid.csv", "bayesian", 40, "euclidean"),
    ("fig_bayes_nu40_ai.csv", "bayesian", 40, "ai"),
    ("fig_bayes_nu100_euclid.csv", "bayesian", 100, "euclidean"),
    ("fig_bayes_nu100_ai.csv", "bayesian", 100, "ai"),
)


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(v) for v in astuple(r)])
    return buf.getvalue()


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_sidecar(path, resolved):
    if path in (None, "-"):
        return
    with open(path + ".config.json", "w", encoding="utf-8") as fh:
        json.dump(resolved, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parse_value(raw):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _resolve(defaults, args, flag_map):
    """Merge defaults, ``--config`` file, ``--set`` pairs and explicit flags."""
    cfg = dict(defaults)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "file must hold a JSON object")
        for k, v in data.items():
            if k not in cfg:
                raise ConfigError(k, "unknown configuration key")
            cfg[k] = v
    for pair in args.set or []:
        if "=" not in pair:
            raise ConfigError(pair, "expected key=value")
        k, raw = pair.split("=", 1)
        k = k.strip()
        if k not in cfg:
            raise ConfigError(k, "unknown configuration key")
        cfg[k] = _parse_value(raw)
    for attr, key in flag_map.items():
        v = getattr(args, attr, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _int_list(text):
    return [int(x) for x in text.replace(",", " ").split()]


def _add_common(sp):
    sp.add_argument("--config", help="JSON file with configuration keys")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one key (repeatable)")
    sp.add_argument("--seed", type=int, help="root seed (default 0)")


def build_parser():
    parser = argparse.ArgumentParser(prog="hpdbounds", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="evaluate closed-form bounds")
    _add_common(b)
    b.add_argument("--metric", choices=METRICS)
    b.add_argument("--kind", choices=bounds.KINDS)
    b.add_argument("--p", type=int)
    b.add_argument("--rho", type=float)
    b.add_argument("--nu", type=float)
    b.add_argument("--n", type=int, nargs="+")
    b.add_argument("--exact-ai", action="store_true", default=None)
    b.add_argument("-o", "--output", default="-")

    s = sub.add_parser("simulate", help="run one Monte Carlo sweep")
    _add_common(s)
    s.add_argument("--p", type=int)
    s.add_argument("--rho", type=float)
    s.add_argument("--nu", type=float)
    s.add_argument("--n-grid", type=_int_list, help="comma separated sample sizes")
    s.add_argument("--trials", type=int)
    s.add_argument("--mode", choices=MODES)
    s.add_argument("--metrics", nargs="+", choices=METRICS)
    s.add_argument("--estimators", nargs="+", choices=ESTIMATORS)
    s.add_argument("--exact-ai", action="store_true", default=None)
    s.add_argument("--workers", type=int)
    s.add_argument("-o", "--output", required=True)

    r = sub.add_parser("reproduce", help="write all figure datasets")
    _add_common(r)
    r.add_argument("--trials", type=int)
    r.add_argument("--n-grid", type=_int_list)
    r.add_argument("--workers", type=int)
    r.add_argument("-o", "--out-dir", required=True)

    v = sub.add_parser("validate-moments", help="closed forms versus Monte Carlo")
    _add_common(v)
    v.add_argument("--samples", type=int)
    v.add_argument("--exact-ai", action="store_true", default=None)
    v.add_argument("--corrupt", action="append", metavar="FAMILY[=FACTOR]",
                   help="test hook: scale one closed-form family (default factor 1.1)")
    v.add_argument("-o", "--output", default=None, help="also write the report here")
    return parser


def _check_bound_config(cfg):
    if cfg["metric"] not in METRICS:
        raise ConfigError("metric", f"must be one of {METRICS}")
    if cfg["kind"] not in bounds.KINDS:
        raise ConfigError("kind", f"must be one of {bounds.KINDS}")
    p = cfg["p"]
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise ConfigError("p", f"must be a positive integer, got {p!r}")
    ns = cfg["n"] if isinstance(cfg["n"], list) else [cfg["n"]]
    if not ns or any(isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in ns):
        raise ConfigError("n", f"must be positive integers, got {cfg['n']!r}")
    cfg["n"] = ns
    if not isinstance(cfg["rho"], (int, float)) or not -1 < cfg["rho"] < 1:
        raise ConfigError("rho", f"must lie in (-1, 1), got {cfg['rho']!r}")
    if cfg["kind"] != "deterministic" and (not isinstance(cfg["nu"], (int, float)) or not cfg["nu"] > p):
        raise ConfigError("nu", f"must exceed p={p}, got {cfg['nu']!r}")
    return cfg


def cmd_bound(args):
    cfg = _check_bound_config(_resolve(BOUND_DEFAULTS, args, {
        "metric": "metric", "kind": "kind", "p": "p", "rho": "rho", "nu": "nu", "n": "n",
        "seed": "seed", "exact_ai": "exact_ai"}))
    sigma0 = toeplitz_center(cfg["p"], cfg["rho"])
    mode = "deterministic" if cfg["kind"] == "deterministic" else "bayesian"
    rows = []
    for n in cfg["n"]:
        rep = bounds.compute_bound(cfg["metric"], cfg["kind"], cfg["p"], n,
                                   nu=None if mode == "deterministic" else cfg["nu"],
                                   sigma0=sigma0, exact=bool(cfg["exact_ai"]))
        rows.append(SummaryRow(mode, cfg["metric"], BOUND_SERIES[(cfg["metric"], cfg["kind"])],
                               float(cfg["nu"]), cfg["p"], int(n), float(rep.value), 0.0, 0,
                               int(cfg["seed"]), "none"))
    _write(args.output, rows_to_csv(sorted(rows, key=SummaryRow.sort_key)))
    _write_sidecar(args.output, cfg)
    return 0


def _experiment_config(cfg):
    return ExperimentConfig.from_dict(cfg)


def cmd_simulate(args):
    defaults = ExperimentConfig().to_dict()
    cfg = _resolve(defaults, args, {
        "p": "p", "rho": "rho", "nu": "nu", "n_grid": "n_grid", "trials": "n_trials", "seed": "seed",
        "mode": "mode", "metrics": "metrics", "estimators": "estimators", "exact_ai": "exact_ai"})
    config = _experiment_config(cfg)
    rows = run_sweep(config, workers=args.workers)
    _write(args.output, rows_to_csv(rows))
    _write_sidecar(args.output, config.to_dict())
    return 0


def cmd_reproduce(args):
    defaults = ExperimentConfig().to_dict()
    cfg = _resolve(defaults, args, {"trials": "n_trials", "n_grid": "n_grid", "seed": "seed"})
    base = _experiment_config(cfg).to_dict()
    os.makedirs(args.out_dir, exist_ok=True)
    cache = {}
    for name, mode, nu, metric in REPRODUCE_FIGURES:
        key = (mode, nu)
        if key not in cache:
            overrides = {"mode": mode, "metrics": list(METRICS)}
            if mode == "deterministic":
                overrides["estimators"] = ["SCM"]
            else:
                overrides.update(nu=nu, estimators=["MAP", "MMSE"])
            config = ExperimentConfig.from_dict({**base, **overrides})
            cache[key] = (config, run_sweep(config, workers=args.workers))
        config, rows = cache[key]
        path = os.path.join(args.out_dir, name)
        _write(path, rows_to_csv([r for r in rows if r.metric == metric]))
        _write_sidecar(path, {**config.to_dict(), "metrics": [metric]})
    return 0


def _parse_corrupt(items):
    out = {}
    for item in items or []:
        fam, _, factor = item.partition("=")
        try:
            out[fam] = float(factor) if factor else 1.1
        except ValueError as exc:
            raise ConfigError("corrupt", f"bad factor in {item!r}") from exc
    return out


def cmd_validate_moments(args):
    cfg = _resolve(MOMENT_DEFAULTS, args, {"samples": "samples", "seed": "seed", "exact_ai": "exact_ai"})
    if args.corrupt:
        cfg["corrupt"] = _parse_corrupt(args.corrupt)
    n = cfg["samples"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 100:
        raise ConfigError("samples", f"must be an integer >= 100, got {n!r}")
    if not isinstance(cfg["corrupt"], dict):
        raise ConfigError("corrupt", "must map check families to factors")
    results = validate_moments(n_samples=n, seed=int(cfg["seed"]), exact_ai=bool(cfg["exact_ai"]),
                               perturb=cfg["corrupt"])
    failed = sum(not r.passed for r in results)
    lines = [r.line() for r in results]
    lines.append(f"{len(results) - failed}/{len(results)} checks passed (seed={cfg['seed']}, samples={n})")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if args.output:
        _write(args.output, report)
        _write_sidecar(args.output, cfg)
    return 1 if failed else 0


COMMANDS = {"bound": cmd_bound, "simulate": cmd_simulate, "reproduce": cmd_reproduce,
            "validate-moments": cmd_validate_moments}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"hpdbounds: configuration error in key '{exc.key}': {exc.message}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"hpdbounds: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
