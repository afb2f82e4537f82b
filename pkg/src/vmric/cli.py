"""Command-line entry point: ``vmric <subcommand> [options]``.

Failures print one line ``error: <category>: <message>`` to stderr and exit
with the category's status code.
"""
from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .criteria import PenaltySpec
from .errors import ConfigError, VmricError
from .estimation import fit_ols, read_records_csv, write_records_csv
from .example import TABLE1, ExampleConfig, load_example_config, simulate_example, theoretical_indices
from .montecarlo import (
    DESIGNS,
    TABLE3_SIZES,
    TABLE4_SIZES,
    ExperimentPlan,
    load_plan,
    run_table2,
    run_table3,
    run_table4,
    table2_csv,
    table3_csv,
    table4_csv,
)
from .selection import CandidateModel, evaluate_candidates

EXIT_CODES = {"config-invalid": 2, "io-error": 3, "numerical-failure": 4}
SEED_ENV = "VMRIC_SEED"

logger = logging.getLogger("vmric")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _sizes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(float(s)) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _count(text: str) -> int:
    try:
        return int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vmric", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"vmric {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, out_required=True):
        sp.add_argument("--out", type=Path, required=out_required, help="output file")

    def dgp(sp):
        sp.add_argument("--config", type=Path, help="ExampleConfig JSON")
        sp.add_argument("--case", type=int, choices=sorted(TABLE1), help="Table 1 preset")
        sp.add_argument("--n", type=_count)
        sp.add_argument("--alpha", type=float)

    def seeded(sp):
        sp.add_argument("--seed", type=_count, help=f"master seed (fallback: ${SEED_ENV}, then 0)")

    sp = sub.add_parser("simulate", help="simulate the example DGP to CSV")
    dgp(sp)
    seeded(sp)
    common(sp)

    sp = sub.add_parser("fit", help="OLS fit of a CSV sample to JSON")
    sp.add_argument("--data", type=Path, required=True)
    sp.add_argument("--predictor", help="predictor column (default: the only non-response column)")
    sp.add_argument("--horizon", type=int, default=2)
    sp.add_argument("--center", action="store_true", help="subtract sample means first")
    common(sp)

    sp = sub.add_parser("select", help="score candidate models on a CSV sample")
    sp.add_argument("--data", type=Path, required=True)
    sp.add_argument("--config", type=Path, required=True, help="candidate set JSON")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--alpha", type=float)
    common(sp)

    sp = sub.add_parser("theory", help="closed-form indices of the example")
    dgp(sp)
    common(sp)

    sp = sub.add_parser("table2", help="theoretical vs estimated VMRIC")
    dgp(sp)
    seeded(sp)
    common(sp)

    for name, sizes, help_ in (
        ("table3", TABLE3_SIZES, "bias and MSE of the VMRIC estimator"),
        ("table4", TABLE4_SIZES, "correct-selection percentages"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", type=Path, help="ExperimentPlan JSON")
        sp.add_argument("--case", type=int, choices=sorted(TABLE1))
        sp.add_argument("--sizes", type=_sizes, help=f"sample sizes (default {','.join(map(str, sizes))})")
        sp.add_argument("--n", type=_count, help="single sample size")
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--replications", type=_count)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--records", type=Path, help="write per-replication JSON here")
        if name == "table3":
            sp.add_argument("--model", type=int, choices=(1, 2), help="model whose VMRIC is scored (default 1)")
        else:
            sp.add_argument("--design", choices=DESIGNS, help="sampling design (default independent)")
        seeded(sp)
        common(sp)
    return p


def _seed(args, fallback: int | None = None) -> int:
    if args.seed is not None:
        return args.seed
    if fallback is not None:
        return fallback
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"${SEED_ENV} is not an integer: {env!r}") from None
    return 0


def _example_config(args) -> tuple[list[tuple[int, ExampleConfig]], int | None]:
    if args.config is not None and args.case is not None:
        raise ConfigError("give --config or --case, not both")
    seed = None
    if args.config is not None:
        cfg, seed = load_example_config(_existing(args.config))
        configs = [(0, cfg)]
    elif args.case is not None:
        configs = [(args.case, TABLE1[args.case])]
    else:
        configs = sorted(TABLE1.items())
    changes = {}
    if args.n is not None:
        changes["n"] = args.n
    if args.alpha is not None:
        changes["alpha_exponent"] = args.alpha
    return [(c, cfg.replace(**changes)) for c, cfg in configs], seed


def _existing(path: Path) -> Path:
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    return path


def _write(path: Path, text: str) -> None:
    """Write atomically so a failed run leaves no partial file."""
    path = Path(path)
    if not path.parent.exists():
        raise FileNotFoundError(f"output directory does not exist: {path.parent}")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


# ----------------------------------------------------------- subcommands


def cmd_simulate(args) -> None:
    configs, seed = _example_config(args)
    if len(configs) != 1:
        raise ConfigError("simulate needs --case or --config")
    (case, cfg), = configs
    records = simulate_example(cfg, _seed(args, seed), path=(0, case))
    buf = io.StringIO()
    write_records_csv(records, buf)
    _write(args.out, buf.getvalue())


def cmd_fit(args) -> None:
    records = read_records_csv(_existing(args.data))
    predictor = args.predictor
    if predictor is None:
        if len(records.series) != 1:
            raise ConfigError(f"--predictor is required; columns are {sorted(records.series)}")
        (predictor,) = records.series
    sample = records.sample(predictor, args.horizon)
    if args.center:
        sample = sample.centered()
    fit = fit_ols(sample)
    _write(args.out, _json({"predictor": predictor, "horizon": sample.h, "centered": args.center, **fit.to_dict()}))


_SELECT_KEYS = {"horizon", "alpha", "candidates"}


def cmd_select(args) -> None:
    try:
        cfg = json.loads(_existing(args.config).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("candidate config must be a JSON object")
    unknown = set(cfg) - _SELECT_KEYS
    if unknown:
        raise ConfigError(f"unknown candidate-config keys: {sorted(unknown)}")
    if not isinstance(cfg.get("candidates"), list):
        raise ConfigError("candidate config needs a 'candidates' list")
    candidates = [CandidateModel.from_dict(c) for c in cfg["candidates"]]
    h = args.horizon if args.horizon is not None else int(cfg.get("horizon", 2))
    spec = PenaltySpec(args.alpha if args.alpha is not None else float(cfg.get("alpha", 0.85)))
    records = read_records_csv(_existing(args.data))
    for c in candidates:
        if c.series not in records.series:
            raise ConfigError(f"candidate {c.id}: no column {c.series!r} in {args.data}")
    report = evaluate_candidates(records, candidates, h, spec)
    _write(args.out, _json({"horizon": h, "alpha": spec.alpha_exponent, **report.to_dict()}))


def cmd_theory(args) -> None:
    configs, _ = _example_config(args)
    out = {}
    for case, cfg in configs:
        out[f"case{case}" if case else "config"] = {"config": cfg.to_dict(), **theoretical_indices(cfg).to_dict()}
    _write(args.out, _json(out))


def cmd_table2(args) -> None:
    configs, seed = _example_config(args)
    seed = _seed(args, seed)
    rows = [run_table2(cfg, seed, case) for case, cfg in configs]
    _write(args.out, table2_csv(rows))


def _plans(args) -> tuple[list[ExperimentPlan], int]:
    table = args.command
    if args.config is not None:
        plans, seed = load_plan(_existing(args.config))
        if plans[0].table != table:
            raise ConfigError(f"plan targets {plans[0].table}, not {table}")
    else:
        cases = [args.case] if args.case is not None else sorted(TABLE1)
        plans = [
            ExperimentPlan(
                config=TABLE1[c], case=c, table=table, replications=1000,
                sample_sizes=TABLE3_SIZES if table == "table3" else TABLE4_SIZES,
            )
            for c in cases
        ]
        seed = None
    if args.case is not None and args.config is not None:
        plans = [p for p in plans if p.case == args.case]
        if not plans:
            raise ConfigError(f"plan does not include case {args.case}")
    if args.sizes is not None and args.n is not None:
        raise ConfigError("give --sizes or --n, not both")
    changes = {}
    if args.sizes is not None:
        changes["sample_sizes"] = args.sizes
    if args.n is not None:
        changes["sample_sizes"] = (args.n,)
    if args.replications is not None:
        changes["replications"] = args.replications
    if table == "table3" and args.model is not None:
        changes["target_model"] = args.model
    if table == "table4" and args.design is not None:
        changes["design"] = args.design
    rebuilt = []
    for p in plans:
        fields = {f: getattr(p, f) for f in p.__dataclass_fields__}
        fields.update(changes)
        if args.alpha is not None:
            fields["config"] = p.config.replace(alpha_exponent=args.alpha)
        rebuilt.append(ExperimentPlan(**fields))
    if args.workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {args.workers}")
    return rebuilt, _seed(args, seed)


def cmd_table(args) -> None:
    plans, seed = _plans(args)
    runner = run_table3 if args.command == "table3" else run_table4
    records = [] if args.records is not None else None
    results = {p.case: runner(p, seed, workers=args.workers, records=records) for p in plans}
    text = table3_csv(results) if args.command == "table3" else table4_csv(results, plans[0].criteria)
    if records is not None:
        _write(args.records, _json(records))
    _write(args.out, text)


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "select": cmd_select,
    "theory": cmd_theory,
    "table2": cmd_table2,
    "table3": cmd_table,
    "table4": cmd_table,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
        COMMANDS[args.command](args)
    except VmricError as exc:
        return _fail(exc.category, exc)
    except (OSError, UnicodeDecodeError) as exc:
        return _fail("io-error", exc)
    except (FloatingPointError, ArithmeticError, ValueError) as exc:
        return _fail("numerical-failure", exc)
    return 0


def _fail(category: str, exc: BaseException) -> int:
    message = " ".join(str(exc).split())
    print(f"error: {category}: {message}", file=sys.stderr)
    return EXIT_CODES[category]


if __name__ == "__main__":
    sys.exit(main())
