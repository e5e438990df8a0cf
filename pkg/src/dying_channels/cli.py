"""Command-line entry point: ``dying-channels <subcommand> [flags]``.

Exit status 0 on success, 1 on bad input (a JSON error object goes to
stderr), 2 when an internal consistency check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .codesize import (AlwaysAdmissible, BoundedDistanceTail, CodeTableModel,
                       SpherePackingModel, StrassenModel, load_code_table)
from .death import parse_death
from .dmc import ChannelModel
from .optimizer import (MAX_EXHAUSTIVE, Partition, certificate_details, check_local_optimality,
                        evaluate_volume, solve)
from .ordering import combined_order
from .serialize import dumps
from .simulator import SWEEP_COLUMNS, simulate, sweep

SEED_ENV = "DYING_CHANNELS_SEED"
SCOPES = {"local": "unit shifts of one boundary",
          "global": "shifts of one boundary by any size",
          "neighborhood": "shifts of one boundary, single splits, contiguous merges"}


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage().strip()}")


# -- input parsing ----------------------------------------------------------

def parse_channel(text: str) -> ChannelModel:
    """``bsc:EPS``, an inline JSON matrix, or a path to a JSON matrix file."""
    text = text.strip()
    if text.startswith("bsc:"):
        return ChannelModel.bsc(float(text[4:]))
    if text.startswith("["):
        raw = json.loads(text)
    else:
        path = Path(text)
        if not path.is_file():
            raise ValueError(f"channel file not found: {text}")
        raw = json.loads(path.read_text())
    return ChannelModel(np.asarray(raw, dtype=float))


def _channel(args) -> ChannelModel | None:
    if args.channel is not None:
        return parse_channel(args.channel)
    if args.eps is not None:
        return ChannelModel.bsc(args.eps)
    return None


def build_model(args):
    spec = args.codesize
    if spec == "strassen":
        ch = _channel(args)
        if ch is None:
            raise ValueError("strassen code size needs --eps or --channel")
        return StrassenModel(ch.scalars(), args.eta)
    if spec == "sphere":
        if args.eps is None:
            raise ValueError("sphere-packing code size needs --eps")
        return SpherePackingModel(args.eps, args.eta)
    if spec.startswith("table:"):
        path = spec[len("table:"):]
        if not Path(path).is_file():
            raise ValueError(f"code table not found: {path}")
        if args.admissibility == "tail":
            if args.eps is None:
                raise ValueError("tail admissibility needs --eps")
            rule = BoundedDistanceTail(args.eps)
        else:
            rule = AlwaysAdmissible()
        return CodeTableModel(load_code_table(path), args.eta, rule)
    raise ValueError(f"unknown code size spec {spec!r}; use strassen, sphere or table:PATH")


def parse_partition(text: str) -> Partition:
    try:
        return Partition(tuple(int(x) for x in text.split(",") if x.strip()))
    except ValueError as exc:
        raise ValueError(f"bad partition {text!r}: {exc}") from None


# -- report payloads --------------------------------------------------------

def _describe_death(d):
    return d.describe()


def _report_payload(rep, d, m):
    p = rep.partition
    return {
        "schema": "optimization_report",
        "solver": rep.solver,
        "horizon": rep.horizon,
        "death": _describe_death(d),
        "codesize": m.describe(),
        "partition": list(p.lengths) if p else [],
        "boundaries": list(p.boundaries) if p else [],
        "total_time": p.total_time if p else 0,
        "volume": float(rep.volume),
        "certificates": {"local": rep.local_cert, "global": rep.global_cert,
                         "neighborhood": rep.neighborhood_cert,
                         "ordered": rep.ordered_cert, "scopes": SCOPES},
        "diagnostic": rep.diagnostic,
    }


def _check_report(rep, d, m):
    if rep.partition is None:
        return
    again = evaluate_volume(rep.partition, d, m)
    if again != rep.volume:
        raise InvariantError(f"volume {rep.volume!r} does not reproduce ({again!r})")
    dp_value = rep.extra.get("dp_value")
    if dp_value is not None and abs(dp_value - rep.volume) > 1e-9 * max(1.0, abs(dp_value)):
        raise InvariantError(f"policy volume {rep.volume!r} != value function {dp_value!r}")


def cmd_optimize(args):
    if args.solver is None:
        raise UsageError("optimize needs --solver")
    d, m = parse_death(args.death), build_model(args)
    if args.solver == "exhaustive" and args.horizon is not None and args.horizon > MAX_EXHAUSTIVE:
        raise ValueError(f"exhaustive search needs --horizon <= {MAX_EXHAUSTIVE}")
    N = args.horizon
    if N is None and args.solver != "greedy":
        N = d.effective_horizon
        if args.solver == "exhaustive" and N > MAX_EXHAUSTIVE:
            raise ValueError(f"exhaustive search needs --horizon <= {MAX_EXHAUSTIVE}")
    rep = solve(args.solver, d, m, N)
    _check_report(rep, d, m)
    return _report_payload(rep, d, m)


def cmd_certify(args):
    d, m = parse_death(args.death), build_model(args)
    p = parse_partition(args.partition)
    local = check_local_optimality(p, d, m)
    det = certificate_details(p, d, m)
    return {
        "schema": "certificate",
        "death": _describe_death(d),
        "codesize": m.describe(),
        "partition": list(p.lengths),
        "boundaries": list(p.boundaries),
        "volume": evaluate_volume(p, d, m),
        "local": {"ok": all(local), "per_boundary": local},
        "global": {"ok": det["shift"], "per_boundary": det["shift_per_boundary"]},
        "neighborhood": {"ok": det["shift"] and det["split"] and det["merge"],
                         "shift": det["shift"], "split": det["split"], "merge": det["merge"]},
        "scopes": SCOPES,
    }


def cmd_evaluate(args):
    d, m = parse_death(args.death), build_model(args)
    p = parse_partition(args.partition)
    surv = d.survival_array(p.total_time)
    logm = m.table(max(p.lengths))
    epochs = []
    for n, e in zip(p.lengths, p.boundaries):
        epochs.append({"length": n, "end": e, "survival": float(surv[e]),
                       "log_m": float(logm[n]), "contribution": float(surv[e] * logm[n])})
    return {
        "schema": "evaluation",
        "death": _describe_death(d),
        "codesize": m.describe(),
        "partition": list(p.lengths),
        "volume": evaluate_volume(p, d, m),
        "epochs": epochs,
    }


def _default_seed():
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def cmd_simulate(args):
    d, m = parse_death(args.death), build_model(args)
    p = parse_partition(args.partition)
    if args.trials < 1:
        raise ValueError("--trials must be positive")
    seed = _default_seed() if args.seed is None else args.seed
    res = simulate(p, d, m, args.trials, seed)
    if sum(res.completed_histogram) != res.trials:
        raise InvariantError("trial histogram does not sum to the trial count")
    analytic = evaluate_volume(p, d, m)
    z = (res.mean_volume - analytic) / res.std_error if res.std_error > 0 else 0.0
    return {
        "schema": "simulation_result",
        "death": _describe_death(d),
        "codesize": m.describe(),
        "partition": list(p.lengths),
        "trials": res.trials,
        "seed": res.seed,
        "mean_volume": res.mean_volume,
        "std_error": res.std_error,
        "analytic_volume": analytic,
        "z_score": float(z),
        "per_epoch_completion_rate": res.per_epoch_completion_rate,
        "completed_histogram": res.completed_histogram,
    }


def _csv_cell(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def cmd_sweep(args):
    path = Path(args.grid)
    if not path.is_file():
        raise ValueError(f"grid file not found: {args.grid}")
    try:
        grid = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"grid file is not JSON: {exc}") from None
    if not isinstance(grid, dict):
        raise ValueError("grid file must hold a JSON object")
    try:
        rows = sweep(grid)
    except KeyError as exc:
        raise ValueError(f"grid is missing key {exc}") from None
    mode = grid.get("mode", "optimize")
    cols = SWEEP_COLUMNS[mode]
    if args.out and args.out.endswith(".json"):
        return {"schema": "sweep", "mode": mode, "columns": cols,
                "rows": [{c: r[c] for c in cols} for r in rows]}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_csv_cell(r[c]) for c in cols])
    return buf.getvalue()


def _pair(text):
    if "@" not in text:
        raise ValueError(f"expected CHANNEL@DEATH, got {text!r}")
    ch, death = text.split("@", 1)
    return parse_channel(ch), parse_death(death)


def _degradation(v):
    out = {"degraded": v.degraded, "residual": v.residual}
    if v.witness_matrix is not None:
        out["witness_matrix"] = v.witness_matrix.tolist()
    return out


def cmd_compare(args):
    if args.ch1 is None or args.ch2 is None:
        raise UsageError("compare needs --ch1 and --ch2")
    c1, c2 = _pair(args.ch1), _pair(args.ch2)
    v = combined_order(c1, c2, args.horizon)
    return {
        "schema": "comparison",
        "verdict": v.verdict,
        "alive": {"ch2_includes_ch1": _degradation(v.channel_2_includes_1),
                  "ch1_includes_ch2": _degradation(v.channel_1_includes_2)},
        "death": {"ch2_dominates_ch1": {"dominates": v.death_2_dominates_1.dominates,
                                        "witness_t": v.death_2_dominates_1.witness_t},
                  "ch1_dominates_ch2": {"dominates": v.death_1_dominates_2.dominates,
                                        "witness_t": v.death_1_dominates_2.witness_t}},
    }


COMMANDS = {"optimize": cmd_optimize, "certify": cmd_certify, "evaluate": cmd_evaluate,
            "simulate": cmd_simulate, "sweep": cmd_sweep, "compare": cmd_compare}


def _model_flags(p, need_death=True):
    p.add_argument("--death", required=need_death,
                   help="geometric:alpha=A | weibull:alpha=A,beta=B | uniform:min=a,max=b | file:PATH")
    p.add_argument("--codesize", default="strassen", help="strassen | sphere | table:PATH")
    p.add_argument("--eta", type=float, required=True, help="target error probability in (0, 1/2]")
    p.add_argument("--eps", type=float, help="BSC crossover probability")
    p.add_argument("--channel", help="bsc:EPS, inline JSON matrix, or JSON matrix file")
    p.add_argument("--admissibility", choices=("always", "tail"), default="always",
                   help="which table entries count at the target reliability")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dying-channels")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("optimize", help="find a blocklength schedule")
    p.add_argument("--solver", choices=("greedy", "dp", "exhaustive"))
    p.add_argument("--horizon", type=int, help="total transmission time N")
    _model_flags(p)

    for name, helptext in (("certify", "run the optimality certificates on a partition"),
                           ("evaluate", "expected volume of a partition, epoch by epoch")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--partition", required=True, help="comma-separated epoch lengths")
        _model_flags(p)

    p = sub.add_parser("simulate", help="Monte Carlo estimate of a partition's volume")
    p.add_argument("--partition", required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, help=f"default from ${SEED_ENV}, else 0")
    _model_flags(p)

    p = sub.add_parser("sweep", help="evaluate a JSON parameter grid")
    p.add_argument("--grid", required=True)

    p = sub.add_parser("compare", help="order two channels that die")
    p.add_argument("--ch1", help="CHANNEL@DEATH, e.g. bsc:0.01@geometric:alpha=0.05")
    p.add_argument("--ch2")
    p.add_argument("--horizon", type=int, help="time range for the survival comparison")

    for sp in sub.choices.values():
        sp.add_argument("--out", help="write the artifact here instead of stdout")
    return parser


def _validate_common(args):
    eta = getattr(args, "eta", None)
    if eta is not None and not 0.0 < eta <= 0.5:
        raise ValueError(f"--eta must lie in (0, 1/2], got {eta}")
    h = getattr(args, "horizon", None)
    if h is not None and h < 1:
        raise ValueError("--horizon must be at least 1")


def _emit_error(kind, message, code):
    sys.stderr.write(json.dumps({"schema": "error", "error": kind, "message": message,
                                 "exit_code": code}, indent=2) + "\n")
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        _validate_common(args)
        result = COMMANDS[args.command](args)
        text = result if isinstance(result, str) else dumps(result)
    except UsageError as exc:
        return _emit_error("usage", str(exc), 1)
    except (ValueError, TypeError, OSError) as exc:
        return _emit_error("validation", str(exc), 1)
    except InvariantError as exc:
        return _emit_error("invariant", str(exc), 2)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
