"""Command-line front end.

    pasbounds capacity  --channel bsc:0.11
    pasbounds exponent  --which es --channel ask:2:8:64 --pa mb:0.05 --ps uniform
    pasbounds ratesweep --channel ask:2:10:64 --pa mb:{nu} --sweep nu=0:0.5:11 --n 16
    pasbounds design    --channel bsc2:0.05 --n 8
    pasbounds simulate  --config configs/pas_n4.json

Exit codes: 0 success, 2 usage or precondition failure, 1 internal error.
Every JSON document carries the resolved configuration under ``"config"``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (Dmc, FactoredDmc, _tupleize, factor, make_ask_awgn, make_bsc, make_identity,
                      make_parallel, maxwell_boltzmann, product_input)
from .exponents import (PreconditionError, dms_renyi, exponent_eg, exponent_em, exponent_es,
                        exponent_esm, rate_thresholds_em, rate_thresholds_es)
from .optimize import blahut_arimoto, maximize_product_mi, project_to_ntype_design
from .prob import AlphabetMismatch, Pmf, kl_divergence, mutual_information
from .simulate import InfeasibleConfig, SimConfig, run_ensemble_experiment
from .typeclass import as_pmf

THREADS_ENV = "PASBOUNDS_THREADS"


class UsageError(Exception):
    pass


def _round12(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return _round12(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(doc) -> str:
    return json.dumps(_round12(doc), indent=2, sort_keys=True) + "\n"


# Parsing -----------------------------------------------------------------------

def parse_channel(spec) -> Dmc | FactoredDmc:
    """Builtin shorthand, inline JSON, JSON file path, or an already-parsed dict.

    Shorthands: ``bsc:p``, ``bsc2:p`` (two BSC uses carrying a and s),
    ``ask:m:snr_db[:bins[:span]]``, ``id:k``, ``noiseless:|A|:|S|``.
    """
    if isinstance(spec, dict):
        return _channel_from_dict(spec)
    if not isinstance(spec, str) or not spec:
        raise UsageError(f"bad channel spec {spec!r}")
    text = spec.strip()
    if text.startswith("{"):
        try:
            return _channel_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise UsageError(f"channel JSON does not parse: {exc}") from exc
    kind, _, rest = text.partition(":")
    args = rest.split(":") if rest else []
    try:
        if kind == "bsc" and len(args) == 1:
            return make_bsc(float(args[0]))
        if kind == "bsc2" and len(args) == 1:
            return make_parallel(make_bsc(float(args[0])), make_bsc(float(args[0])))
        if kind == "ask" and 2 <= len(args) <= 4:
            m, snr = int(args[0]), float(args[1])
            bins = int(args[2]) if len(args) > 2 else 64
            span = float(args[3]) if len(args) > 3 else 4.0
            return make_ask_awgn(m, snr, bins, span)
        if kind == "id" and len(args) == 1:
            return make_identity(int(args[0]))
        if kind == "noiseless" and len(args) == 2:
            ka, ks = int(args[0]), int(args[1])
            return factor(make_identity(ka * ks), range(ka), range(ks))
    except ValueError as exc:
        raise UsageError(f"invalid channel {spec!r}: {exc}") from exc
    path = Path(text)
    if path.is_file():
        try:
            return _channel_from_dict(json.loads(path.read_text()))
        except json.JSONDecodeError as exc:
            raise UsageError(f"channel file {path} does not parse: {exc}") from exc
    raise UsageError(f"unknown channel spec {spec!r}")


def _channel_from_dict(d) -> Dmc | FactoredDmc:
    if not isinstance(d, dict):
        raise UsageError("channel JSON must be an object")
    try:
        base = Dmc.from_dict(d)
        if "a_labels" in d and "s_labels" in d:
            return factor(base, _tupleize(list(d["a_labels"])), _tupleize(list(d["s_labels"])),
                          d.get("index_map"))
        return base
    except (ValueError, TypeError) as exc:
        raise UsageError(f"malformed channel matrix: {exc}") from exc


def _number(tok: str) -> float:
    return float(Fraction(tok.strip()))


def parse_pmf(spec, labels, amplitudes=None) -> Pmf:
    """``uniform``, ``mb:nu`` (Maxwell-Boltzmann on ``amplitudes``), or a list
    of probabilities such as ``0.75,0.25`` or ``1/2,1/2``."""
    labels = tuple(labels)
    if isinstance(spec, dict):
        spec = spec.get("probs")
    if isinstance(spec, (list, tuple)):
        probs = [float(Fraction(str(v))) for v in spec]
    else:
        text = str(spec).strip()
        if text == "uniform":
            return Pmf.uniform(labels)
        if text.startswith("mb:"):
            amps = amplitudes if amplitudes is not None else labels
            try:
                return maxwell_boltzmann([float(a) for a in amps], _number(text[3:]), labels=labels)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"cannot build Maxwell-Boltzmann distribution on {labels}: {exc}") from exc
        try:
            probs = [_number(t) for t in text.split(",")]
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad distribution {spec!r}") from exc
    if len(probs) != len(labels):
        raise UsageError(f"distribution {spec!r} has {len(probs)} entries, alphabet has {len(labels)}")
    try:
        return Pmf(labels, probs)
    except ValueError as exc:
        raise UsageError(f"bad distribution {spec!r}: {exc}") from exc


def _a_side(ch):
    """Amplitude alphabet (and numeric amplitudes) of a channel, if factored."""
    if isinstance(ch, FactoredDmc):
        return ch.a_labels, ch.amplitudes
    return None, None


def _need_factored(ch, what):
    if not isinstance(ch, FactoredDmc):
        raise UsageError(f"{what} needs a factored channel (bsc2:p, ask:..., noiseless:.., "
                         "or JSON with a_labels/s_labels)")
    return ch


def _base(ch) -> Dmc:
    return ch.base if isinstance(ch, FactoredDmc) else ch


def parse_sweep(spec: str):
    name, eq, rng = spec.partition("=")
    if not eq or not name:
        raise UsageError("sweep must look like name=start:stop:count or name=v1,v2,...")
    try:
        if ":" in rng:
            start, stop, count = rng.split(":")
            count = int(count)
            if count < 1:
                raise ValueError
            return name, [float(v) for v in np.linspace(float(start), float(stop), count)]
        return name, [_number(v) for v in rng.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad sweep grid {spec!r}") from exc


# Commands ----------------------------------------------------------------------

def cmd_capacity(args) -> str:
    ch = _base(parse_channel(args.channel))
    res = blahut_arimoto(ch, tol=args.tol, max_iter=args.max_iter)
    config = {"command": "capacity", "channel": args.channel, "tol": args.tol, "max_iter": args.max_iter}
    return dump_json({"config": config, **res.to_dict()})


def _distributions(args, ch):
    """Resolve pa/ps/px/pbar for the exponent command."""
    a_labels, amps = _a_side(ch)
    base = _base(ch)
    out = {}
    if args.which in ("es", "esm"):
        fd = _need_factored(ch, f"exponent {args.which}")
        out["pbar"] = parse_pmf(args.pbar, fd.a_labels, amps) if args.pbar else None
        default_pa = args.pbar if (args.which == "esm" and args.pbar) else "uniform"
        out["pa"] = parse_pmf(args.pa or default_pa, fd.a_labels, amps)
        out["ps"] = parse_pmf(args.ps or "uniform", fd.s_labels)
        return out
    out["px"] = parse_pmf(args.px or "uniform", base.input_labels)
    if args.which == "eg":
        if not args.pa:
            raise UsageError("exponent eg needs --pa (the memoryless source law)")
        labels, amps = _source_labels(args.pa, a_labels, amps)
        out["pa"] = parse_pmf(args.pa, labels, amps)
        return out
    if not args.pbar:
        raise UsageError("exponent em needs --pbar")
    labels, amps = _source_labels(args.pbar, a_labels, amps)
    out["pbar"] = parse_pmf(args.pbar, labels, amps)
    out["pa"] = parse_pmf(args.pa or args.pbar, labels, amps)
    return out


def _source_labels(spec, a_labels, amps):
    """Source alphabet: the channel's amplitudes when the distribution string fits them,
    otherwise ``0..k-1`` for a k-entry probability list."""
    text = str(spec)
    k = len(text.split(","))
    if a_labels is not None and (k == len(a_labels) or "," not in text):
        return a_labels, amps
    if "," not in text:
        raise UsageError(f"cannot infer the source alphabet for {spec!r} on an unfactored channel")
    return tuple(range(k)), None


def cmd_exponent(args) -> str:
    ch = parse_channel(args.channel)
    d = _distributions(args, ch)
    summary = {}
    if args.which == "eg":
        res = exponent_eg(d["px"], _base(ch), dms_renyi(d["pa"]))
        mi = mutual_information(d["px"], _base(ch))
        summary["thresholds"] = {"mutual_info_bits": mi, "source_entropy_bits": dms_renyi(d["pa"])(1.0),
                                 "positive_exponent": dms_renyi(d["pa"])(1.0) < mi}
    elif args.which == "es":
        res = exponent_es(d["pa"], d["ps"], ch)
        summary["thresholds"] = rate_thresholds_es(d["pa"], d["ps"], ch).summary()
    elif args.which == "em":
        res = exponent_em(d["pbar"], d["pa"], d["px"], _base(ch))
        summary["thresholds"] = rate_thresholds_em(d["pbar"], d["pa"], d["px"], _base(ch)).summary()
    else:
        if args.n is None:
            raise UsageError("exponent esm needs --n")
        pbar = d["pbar"] or d["pa"]
        res = exponent_esm(args.n, pbar, d["pa"], d["ps"], ch)
        summary["thresholds"] = rate_thresholds_es(pbar, d["ps"], ch).summary()
        summary["bound_at_n"] = res.bound(args.n)
    summary.update(res.summary())
    if args.csv:
        Path(args.csv).write_text(res.curve.to_csv())
    config = {"command": "exponent", "which": args.which, "channel": args.channel,
              **{k: v.to_dict() for k, v in d.items() if v is not None}, "n": args.n, "csv": args.csv}
    return dump_json({"config": config, **summary})


def cmd_ratesweep(args) -> str:
    name, values = parse_sweep(args.sweep)
    token = "{" + name + "}"
    buf = io.StringIO()
    config = {"command": "ratesweep", "channel": args.channel, "pa": args.pa, "ps": args.ps,
              "sweep": args.sweep, "n": args.n}
    buf.write("# " + json.dumps(config, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([name, "mutual_info_bits", "penalty_bits", "rate_limit_bits"])
    for v in values:
        sub = f"{v:.12g}"
        ch = _need_factored(parse_channel(args.channel.replace(token, sub)), "ratesweep")
        pa = parse_pmf(args.pa.replace(token, sub), ch.a_labels, ch.amplitudes)
        ps = parse_pmf(args.ps.replace(token, sub), ch.s_labels)
        pbar = as_pmf(project_to_ntype_design(pa, args.n)) if args.n else pa
        px = product_input(pa, ps, ch)
        th = rate_thresholds_em(pbar, pa, px, ch.base)
        writer.writerow([sub, f"{th.mutual_info:.12g}", f"{th.penalty:.12g}", f"{th.rate_limit:.12g}"])
    return buf.getvalue()


def cmd_design(args) -> str:
    ch = _need_factored(parse_channel(args.channel), "design")
    opt = maximize_product_mi(ch, tol=args.tol, max_iter=args.max_iter, restarts=args.restarts, seed=args.seed)
    t = project_to_ntype_design(opt.pa_star, args.n)
    pbar = as_pmf(t)
    d = kl_divergence(pbar, opt.pa_star)
    pas_rate = rate_thresholds_es(pbar, opt.ps_star, ch)
    mism = rate_thresholds_em(pbar, opt.pa_star, product_input(opt.pa_star, opt.ps_star, ch), ch.base)
    config = {"command": "design", "channel": args.channel, "n": args.n, "restarts": args.restarts,
              "seed": args.seed, "tol": args.tol, "max_iter": args.max_iter}
    doc = {
        "config": config,
        "optimum": opt.to_dict(),
        "pbar_counts": list(t.counts),
        "pbar": [float(p) for p in pbar.probs],
        "divergence_bits": d,
        "support_reduced": len(pbar.support) < len(opt.pa_star.support),
        "pas_thresholds": pas_rate.summary(),
        "mismatched_thresholds": mism.summary(),
    }
    return dump_json(doc)


SIM_KEYS = ("setup", "n", "channel", "pa", "ps", "px", "pbar", "q_support_fraction", "ensemble",
            "permuter_enabled", "num_codes", "trials_per_code", "mode", "seed")
SIM_DEFAULTS = {"ps": None, "px": None, "pbar": None, "q_support_fraction": 1.0, "ensemble": "iid",
                "permuter_enabled": True, "num_codes": 200, "trials_per_code": 1000, "mode": "auto",
                "seed": 0}


def resolve_sim_config(raw: dict) -> tuple[SimConfig, dict]:
    unknown = set(raw) - set(SIM_KEYS)
    if unknown:
        raise UsageError(f"unknown simulation keys: {sorted(unknown)}")
    cfg = {**SIM_DEFAULTS, **raw}
    for key in ("setup", "n", "channel", "pa"):
        if cfg.get(key) is None:
            raise UsageError(f"simulation config needs '{key}'")
    ch = parse_channel(cfg["channel"])
    setup = cfg["setup"]
    if setup in ("systematic", "pas"):
        ch = _need_factored(ch, f"{setup} setup")
        a_labels, amps = ch.a_labels, ch.amplitudes
    else:
        a_labels, amps = _a_side(ch)
    if setup in ("classical", "mismatched"):
        spec = ",".join(map(str, cfg["pa"])) if isinstance(cfg["pa"], list) else cfg["pa"]
        a_labels, amps = _source_labels(spec, a_labels, amps)
    pa = parse_pmf(cfg["pa"], a_labels, amps)
    ps = parse_pmf(cfg["ps"], ch.s_labels) if cfg["ps"] is not None and isinstance(ch, FactoredDmc) else None
    px = parse_pmf(cfg["px"], _base(ch).input_labels) if cfg["px"] is not None else None
    pbar = parse_pmf(cfg["pbar"], a_labels, amps) if cfg["pbar"] is not None else None
    try:
        sim = SimConfig(setup=setup, n=int(cfg["n"]), channel=ch, pa=pa, ps=ps, px=px, pbar=pbar,
                        q_support_fraction=float(cfg["q_support_fraction"]), ensemble=cfg["ensemble"],
                        permuter_enabled=bool(cfg["permuter_enabled"]), num_codes=int(cfg["num_codes"]),
                        trials_per_code=int(cfg["trials_per_code"]), mode=cfg["mode"], seed=int(cfg["seed"]))
    except InfeasibleConfig:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    resolved = {k: (v.to_dict() if hasattr(v, "to_dict") else v) for k, v in cfg.items()}
    resolved["channel"] = cfg["channel"]
    return sim, resolved


def cmd_simulate(args) -> str:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    for key in SIM_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            raw[key] = val
    sim, resolved = resolve_sim_config(raw)
    report = run_ensemble_experiment(sim, jobs=args.jobs)
    if args.csv:
        path = Path(args.csv)
        new = not path.exists() or path.stat().st_size == 0
        with path.open("a") as fh:
            fh.write(report.to_csv(header=new))
    return dump_json({"config": {"command": "simulate", **resolved}, "report": report.to_dict()})


# Entry point -------------------------------------------------------------------

def _bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pasbounds", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="Blahut-Arimoto capacity of a channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("exponent", help="error exponent, rho-curve and rate thresholds")
    p.add_argument("--which", choices=("eg", "es", "em", "esm"), required=True)
    p.add_argument("--channel", required=True)
    p.add_argument("--pa")
    p.add_argument("--ps")
    p.add_argument("--px")
    p.add_argument("--pbar")
    p.add_argument("--n", type=int)
    p.add_argument("--csv", help="write the rho-curve CSV here")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("ratesweep", help="achievable-rate table over a parameter grid")
    p.add_argument("--channel", required=True, help="may contain {name} placeholders")
    p.add_argument("--pa", default="uniform")
    p.add_argument("--ps", default="uniform")
    p.add_argument("--sweep", required=True, help="name=start:stop:count or name=v1,v2")
    p.add_argument("--n", type=int, help="quantize P_A to an n-type to get P_Abar")
    p.set_defaults(func=cmd_ratesweep)

    p = sub.add_parser("design", help="optimize P_A x P_S, then project P_A to an n-type")
    p.add_argument("--channel", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("simulate", help="ensemble error probability versus the analytic bound")
    p.add_argument("--config", help="JSON file; flags override its values")
    p.add_argument("--setup", choices=("classical", "systematic", "mismatched", "pas"))
    p.add_argument("--n", type=int)
    p.add_argument("--channel")
    p.add_argument("--pa")
    p.add_argument("--ps")
    p.add_argument("--px")
    p.add_argument("--pbar")
    p.add_argument("--q-support-fraction", dest="q_support_fraction", type=float)
    p.add_argument("--ensemble", choices=("iid", "affine-binary"))
    p.add_argument("--permuter-enabled", dest="permuter_enabled", type=_bool)
    p.add_argument("--num-codes", dest="num_codes", type=int)
    p.add_argument("--trials-per-code", dest="trials_per_code", type=int)
    p.add_argument("--mode", choices=("auto", "exact", "montecarlo"))
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, default=int(os.environ.get(THREADS_ENV, "1")))
    p.add_argument("--csv", help="append one result row to this CSV")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except (UsageError, PreconditionError, InfeasibleConfig, AlphabetMismatch) as exc:
        print(f"pasbounds {args.command}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"pasbounds {args.command}: internal error: {exc!r}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
