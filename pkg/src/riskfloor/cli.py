"""Command-line interface.

Subcommands: ``bound`` (compute a lower bound on CSV data), ``coverage``
and ``hardness`` (Monte-Carlo experiments, one CSV row per cell),
``lambda`` (linear-class hardness quantities), ``occupancy`` (urn
simulation), ``capacity`` (interpolation capacity), ``selftest``.

Exit codes: 0 success / all cells pass; 1 internal error; 2 malformed
input or configuration; 3 theorem-condition refusal (the admissible
range is printed); 4 an experiment cell failed its ceiling; 5 self-test
failures.

The default seed comes from the ``RISKFLOOR_SEED`` environment variable
when set. Experiment commands accept ``--config FILE`` with ``key =
value`` lines providing flag defaults. Output is deterministic: reruns
with the same seed are byte-identical, regardless of ``--workers``.
"""

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from .bounds import AlphaBudget, LossSpec, bound_erm_markov, bound_erm_trunc
from .exceptions import (
    ConditionRefusedError,
    DataInconsistencyError,
    DomainError,
    RiskFloorError,
    UnknownTrueRiskError,
)
from .experiments import (
    capacity_profile,
    coverage_experiment,
    occupancy_experiment,
    sample_resample_experiment,
)
from .generators import make_generator
from .hardness import (
    transfer_base_size,
    tv_concentration_mc,
    tv_gaussian_bound,
    tv_kl_chain_bound,
    tv_transfer_bound,
)
from .linear import LinearClass, linear_empirical_risk, truncated_linear_risk_irls
from .pwc import PwcClass, bound_pwc_basic, bound_pwc_refined, bound_pwc_trunc
from .selftest import run_selftest
from .validation import spawn_rng

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_REFUSED = 3
EXIT_CEILING = 4
EXIT_SELFTEST = 5

CSV_COLUMNS = (
    "experiment", "generator", "class", "n", "m_or_d", "alpha",
    "trials", "rate", "stderr", "ceiling", "pass",
)


class CsvFormatError(RiskFloorError):
    pass


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    try:
        argv = _apply_config(list(argv))
    except CsvFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConditionRefusedError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        if exc.max_admissible is not None:
            print(f"admissible range: m <= {exc.max_admissible}", file=sys.stderr)
        return EXIT_REFUSED
    except (CsvFormatError, DomainError, DataInconsistencyError,
            UnknownTrueRiskError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def _default_seed():
    return int(os.environ.get("RISKFLOOR_SEED", "0"))


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="riskfloor",
        description="Distribution-free lower bounds on model class risk.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="compute a lower bound on CSV data")
    p.add_argument("--data", required=True, help="CSV with header x1,...,xd,y")
    p.add_argument("--class", dest="class_name", required=True,
                   choices=["pwc", "linear"])
    p.add_argument("--m", type=int, help="class size for --class pwc")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--alpha0", type=float, default=None)
    p.add_argument("--refined", action="store_true",
                   help="use the any-m refined pwc bound instead of the basic one")
    p.add_argument("--trunc-B", dest="trunc_B", type=float, default=None,
                   help="truncation level; switches to the truncated bound")
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--seed", type=int, default=_default_seed())
    _add_output_args(p, default_format="json")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("coverage", help="Monte-Carlo miscoverage experiment")
    _add_config_arg(p)
    p.add_argument("--gen", required=True)
    p.add_argument("--class", dest="class_name", required=True,
                   choices=["pwc", "linear"])
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--alpha0", type=float, default=None)
    p.add_argument("--trunc-B", dest="trunc_B", type=float, default=None)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--workers", type=int, default=1)
    _add_gen_args(p)
    _add_output_args(p, default_format="csv")
    p.add_argument("--summary", default=None, help="write a JSON summary here")
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("hardness", help="sample-resample exceedance experiment")
    _add_config_arg(p)
    p.add_argument("--gen", required=True)
    p.add_argument("--class", dest="class_name", default="pwc",
                   choices=["pwc", "linear"])
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", dest="pool_size", type=int, required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--alpha0", type=float, default=None)
    p.add_argument("--trunc-B", dest="trunc_B", type=float, default=None)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--workers", type=int, default=1)
    _add_gen_args(p)
    _add_output_args(p, default_format="csv")
    p.add_argument("--summary", default=None)
    p.set_defaults(func=cmd_hardness)

    p = sub.add_parser("lambda", help="linear-class hardness quantities")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--method", default="gaussian",
                   choices=["gaussian", "chain", "mc", "transfer"])
    p.add_argument("--gen", default="linear_gaussian")
    p.add_argument("--omega", default="identity",
                   choices=["identity", "inverse-cov"])
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--epsilon", type=float, default=None,
                   help="density-ratio parameter for --method transfer")
    p.add_argument("--alpha", type=float, default=None,
                   help="if given, also report the positivity ceiling alpha + value")
    p.add_argument("--seed", type=int, default=_default_seed())
    _add_gen_args(p)
    _add_output_args(p, default_format="json")
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("occupancy", help="occupied-cell simulation")
    _add_config_arg(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha0", type=float, default=0.05)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=_default_seed())
    _add_output_args(p, default_format="csv")
    p.add_argument("--summary", default=None)
    p.set_defaults(func=cmd_occupancy)

    p = sub.add_parser("capacity", help="interpolation capacity of a class")
    p.add_argument("--class", dest="class_name", required=True,
                   choices=["pwc", "linear"])
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--gen", required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=_default_seed())
    _add_gen_args(p)
    _add_output_args(p, default_format="json")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("selftest", help="run the built-in oracle suite")
    p.set_defaults(func=cmd_selftest)

    return parser


def _add_output_args(p, default_format):
    p.add_argument("--output", choices=["json", "csv"], default=default_format)
    p.add_argument("--out", default=None, help="output path (default stdout)")


def _add_config_arg(p):
    p.add_argument("--config", default=None,
                   help="key = value file supplying flag defaults")


def _add_gen_args(p):
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--levels", default=None, help="comma-separated signal levels")
    p.add_argument("--support", type=int, default=None)
    p.add_argument("--dof", type=float, default=None)
    p.add_argument("--scale", type=float, default=None)


# ---------------------------------------------------------------------------
# commands


def cmd_bound(args):
    X, y = load_csv_dataset(args.data)
    n, d = X.shape
    alpha = args.alpha
    warning = None
    if args.class_name == "pwc":
        if args.m is None:
            raise DomainError("--class pwc requires --m")
        budget = AlphaBudget(alpha, args.alpha0)
        if args.trunc_B is not None:
            result = bound_pwc_trunc(X, y, args.m, budget, args.trunc_B)
        elif args.refined:
            result = bound_pwc_refined(X, y, args.m, budget)
        else:
            result = bound_pwc_basic(X, y, args.m, budget)
        class_label = f"pwc({args.m})"
    else:
        if args.trunc_B is not None:
            est = truncated_linear_risk_irls(
                X, y, args.trunc_B, restarts=args.restarts, rng=spawn_rng(args.seed)
            )
            raw = bound_erm_trunc(alpha, n, args.trunc_B, est.value)
            result = type(raw)(
                value=raw.value, delta=raw.delta, empirical_risk=raw.empirical_risk,
                method=raw.method, certified=False,
            )
            warning = ("truncated linear empirical risk is a restart heuristic; "
                       "this value is not a certificate")
        else:
            result = bound_erm_markov(alpha, linear_empirical_risk(X, y))
        class_label = f"linear({d})"
    record = {
        "method": result.method,
        "value": result.value,
        "delta": result.delta,
        "empirical_risk": result.empirical_risk,
        "certified": result.certified,
        "n": n,
        "d": d,
        "class": class_label,
        "alpha": alpha,
    }
    if warning:
        record["warning"] = warning
    _emit(args, _to_json(record))
    return EXIT_OK


def _class_spec(args):
    if args.class_name == "pwc":
        if args.m is None:
            raise DomainError("--class pwc requires --m")
        return PwcClass(args.m), args.m
    d = args.d if args.d is not None else 1
    return LinearClass(d), d


def _generator(args):
    kw = {}
    if args.sigma is not None:
        kw["sigma"] = args.sigma
    if args.levels is not None:
        kw["levels"] = tuple(float(tok) for tok in args.levels.split(","))
    if args.support is not None:
        kw["support"] = args.support
    if args.dof is not None:
        kw["dof"] = args.dof
    if args.scale is not None:
        kw["scale"] = args.scale
    try:
        return make_generator(args.gen, **kw)
    except TypeError as exc:
        raise DomainError(f"bad generator parameters for {args.gen!r}: {exc}") from None


def _loss(args):
    if args.trunc_B is None:
        return None
    return LossSpec("truncated_squared", args.trunc_B)


def cmd_coverage(args):
    gen = _generator(args)
    class_spec, m_or_d = _class_spec(args)
    budget = AlphaBudget(args.alpha, args.alpha0)
    report = coverage_experiment(
        gen, class_spec, args.method, budget, n=args.n, trials=args.trials,
        seed=args.seed, d=args.d, loss=_loss(args), workers=args.workers,
    )
    row = _cell_row(
        "coverage", args.gen, args.class_name, args.n, m_or_d, args.alpha,
        report.trials, report.miscoverage_rate, report.stderr,
        ceiling=args.alpha, passed=_le(report.miscoverage_rate, args.alpha, report.stderr),
    )
    _emit_cells(args, [row], summary={"report": _as_dict(report), "method": args.method})
    return EXIT_OK if row["pass"] else EXIT_CEILING


def cmd_hardness(args):
    gen = _generator(args)
    class_spec, m_or_d = _class_spec(args)
    budget = AlphaBudget(args.alpha, args.alpha0)
    report = sample_resample_experiment(
        gen, class_spec, args.method, budget, n=args.n, N=args.pool_size,
        trials=args.trials, seed=args.seed, d=args.d, loss=_loss(args),
        workers=args.workers,
    )
    row = _cell_row(
        "hardness", args.gen, args.class_name, args.n, m_or_d, args.alpha,
        report.trials, report.exceed_rate, report.stderr,
        ceiling=report.ceiling, passed=_le(report.exceed_rate, report.ceiling, report.stderr),
    )
    _emit_cells(args, [row], summary={"report": _as_dict(report), "method": args.method,
                                      "N": args.pool_size})
    return EXIT_OK if row["pass"] else EXIT_CEILING


def cmd_occupancy(args):
    report = occupancy_experiment(
        args.m, args.n, args.trials, seed=args.seed, alpha0=args.alpha0
    )
    birthday_ceiling = math.exp(-args.n * (args.n - 1) / (2.0 * args.m))
    se_distinct = _binom_se(report.rate_all_distinct, report.trials)
    se_short = _binom_se(report.rate_within_shortfall, report.trials)
    floor = 1.0 - args.alpha0
    rows = [
        _cell_row(
            "occupancy_all_distinct", "multinomial_uniform", "-", args.n, args.m,
            args.alpha0, report.trials, report.rate_all_distinct, se_distinct,
            ceiling=birthday_ceiling,
            passed=_le(report.rate_all_distinct, birthday_ceiling, se_distinct),
        ),
        _cell_row(
            "occupancy_shortfall", "multinomial_uniform", "-", args.n, args.m,
            args.alpha0, report.trials, report.rate_within_shortfall, se_short,
            ceiling=floor,
            passed=report.rate_within_shortfall >= floor - 3.0 * se_short,
        ),
    ]
    _emit_cells(args, rows, summary={"report": _as_dict(report)})
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_CEILING


def cmd_lambda(args):
    if args.method == "gaussian":
        est = tv_gaussian_bound(args.n, args.d)
    elif args.method == "chain":
        est = tv_kl_chain_bound(args.n, args.d)
    elif args.method == "mc":
        gen = _generator(args)
        omega = None
        if args.omega == "inverse-cov":
            if not hasattr(gen, "inverse_covariance"):
                raise DomainError(
                    f"generator {args.gen!r} does not expose its covariance"
                )
            omega = gen.inverse_covariance(args.d)
        est = tv_concentration_mc(
            gen, args.n, args.d, omega=omega, trials=args.trials, seed=args.seed
        )
    else:
        if args.epsilon is None:
            raise DomainError("--method transfer requires --epsilon")
        base_n = transfer_base_size(args.n, args.epsilon)
        base = tv_gaussian_bound(base_n, args.d)
        est = tv_transfer_bound(base, args.n, args.epsilon)
    record = {
        "n": args.n,
        "d": args.d,
        "method": est.method,
        "value": est.value,
        "mc_stderr": est.mc_stderr,
        "omega_id": est.omega_id,
        "base_n": est.base_n,
        "rejected_trials": est.rejected,
    }
    if args.alpha is not None:
        record["positivity_ceiling"] = min(1.0, args.alpha + est.value)
        record["alpha"] = args.alpha
    _emit(args, _to_json(record))
    return EXIT_OK


def cmd_capacity(args):
    gen = _generator(args)
    class_spec, m_or_d = _class_spec(args)
    cap = capacity_profile(class_spec, gen, trials=args.trials, seed=args.seed)
    record = {
        "class": args.class_name,
        "m_or_d": m_or_d,
        "generator": args.gen,
        "n_lower": _json_num(cap.n_lower),
        "n_plus_lower": _json_num(cap.n_plus_lower),
        "source": cap.source,
    }
    _emit(args, _to_json(record))
    return EXIT_OK


def cmd_selftest(args):
    results = run_selftest()
    failures = [r for r in results if not r.ok]
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status}  {r.name}: {r.detail}")
    if failures:
        print(f"{len(failures)} check(s) failed:", file=sys.stderr)
        for r in failures:
            print(f"  - {r.name}", file=sys.stderr)
        return EXIT_SELFTEST
    return EXIT_OK


# ---------------------------------------------------------------------------
# CSV data loading (bound command)


def load_csv_dataset(path):
    """Read a dataset CSV with header ``x1,...,xd,y``.

    Raises :class:`CsvFormatError` naming the first offending row.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [line.strip() for line in fh]
    except OSError as exc:
        raise CsvFormatError(f"cannot read {path}: {exc}") from None
    lines = [ln for ln in lines if ln]
    if not lines:
        raise CsvFormatError(f"{path}: empty file")
    header = [tok.strip() for tok in lines[0].split(",")]
    d = len(header) - 1
    expected = [f"x{j}" for j in range(1, d + 1)] + ["y"]
    if d < 1 or header != expected:
        raise CsvFormatError(
            f"{path}: header must be x1,...,xd,y; got {','.join(header)}"
        )
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != d + 1:
            raise CsvFormatError(
                f"{path}: row {lineno}: expected {d + 1} fields, got {len(parts)}"
            )
        try:
            values = [float(tok) for tok in parts]
        except ValueError:
            raise CsvFormatError(
                f"{path}: row {lineno}: non-numeric field"
            ) from None
        if not all(math.isfinite(v) for v in values):
            raise CsvFormatError(f"{path}: row {lineno}: non-finite value")
        rows.append(values)
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64)
    return data[:, :d], data[:, d]


# ---------------------------------------------------------------------------
# config files and output formatting


def parse_config_file(path):
    """Parse a plain ``key = value`` file ('#' starts a comment)."""
    entries = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise CsvFormatError(
                        f"{path}: line {lineno}: expected 'key = value'"
                    )
                key, value = line.split("=", 1)
                entries[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise CsvFormatError(f"cannot read {path}: {exc}") from None
    return entries


def _apply_config(argv):
    """Expand ``--config FILE`` into flags right after the subcommand.

    Explicit command-line flags come later in argv, so argparse lets them
    win over the file's values.
    """
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        return argv
    entries = parse_config_file(argv[idx + 1])
    injected = []
    for key, value in sorted(entries.items()):
        injected.extend([f"--{key.replace('_', '-')}", value])
    # argv[0] is the subcommand
    return argv[:1] + injected + argv[1:]


def _cell_row(experiment, generator, class_name, n, m_or_d, alpha, trials,
              rate, stderr, ceiling, passed):
    return {
        "experiment": experiment,
        "generator": generator,
        "class": class_name,
        "n": n,
        "m_or_d": m_or_d,
        "alpha": alpha,
        "trials": trials,
        "rate": rate,
        "stderr": stderr,
        "ceiling": ceiling,
        "pass": bool(passed),
    }


def _le(rate, ceiling, stderr):
    return rate <= ceiling + 3.0 * stderr


def _binom_se(rate, trials):
    return math.sqrt(rate * (1.0 - rate) / trials)


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _emit_cells(args, rows, summary=None):
    rows = sorted(rows, key=lambda r: tuple(_fmt(r[c]) for c in CSV_COLUMNS))
    if args.output == "csv":
        lines = [",".join(CSV_COLUMNS)]
        lines += [",".join(_fmt(row[c]) for c in CSV_COLUMNS) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = _to_json(rows)
    _emit(args, text)
    if getattr(args, "summary", None):
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(_to_json({"cells": rows, **(summary or {})}))


def _as_dict(report):
    return {k: _json_num(v) for k, v in dataclasses.asdict(report).items()}


def _json_num(v):
    if isinstance(v, float) and math.isinf(v):
        return "infinity"
    return v


def _to_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, text):
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    sys.exit(main())
