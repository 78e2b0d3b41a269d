"""Batch command-line front end.

Subcommands cover the whole pipeline: ``clean-blocks``, ``extract-jumps``,
``build-events``, ``fit``, ``gof`` and ``simulate``.  Every JSON output
embeds a run manifest (tool version, effective-config digest, input file
digests, UTC timestamp); outputs are byte-identical across repeated runs
except for that timestamp.

Exit codes: 0 success, 2 input parse/config error, 3 numeric or fitting
failure, 4 model-validity error.

Configuration precedence is flags > config file > defaults.  The config
file (``--config``) is a flat ``key = value`` document, one option per
line, ``#`` comments allowed; keys are the long flag names with
underscores (e.g. ``window_hours = 3``).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .core import spectral_radius
from .errors import (
    ConfigError,
    FittingError,
    HawkesError,
    InvalidInputError,
    LikelihoodUndefinedError,
    NumericalError,
    ParseError,
    SimulationTruncatedError,
    StabilityError,
)
from .events import read_events_csv, write_events_csv
from .fit import FitConfig, fit_full, fit_poisson, fit_result_to_dict, model_from_dict
from .gof import gof_report, report_to_dict, write_qq_csv
from .ingest import (
    JumpConfig,
    build_trivariate,
    clean_blocks,
    extract_jumps,
    log_returns,
    parse_timestamp,
    read_blocks_csv,
    read_price_csv,
    write_blocks_csv,
)
from .sim import SimConfig, simulate

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NUMERIC = 3
EXIT_MODEL = 4


def _sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _manifest(command: str, effective: dict, inputs) -> dict:
    canonical = json.dumps(effective, sort_keys=True, default=str)
    return {
        "command": command,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config_digest": hashlib.sha256(canonical.encode()).hexdigest(),
        "input_digests": {str(p): _sha256_file(p) for p in inputs},
    }


def _write_json(path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_config_file(path) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip().strip("\"'")
    return values


def _effective_options(args, spec: dict) -> dict:
    """Merge flag values, config-file values and defaults, in that order."""
    file_cfg = _read_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(file_cfg) - set(spec)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    out = {}
    for key, (converter, default) in spec.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            out[key] = flag_value
        elif key in file_cfg:
            try:
                out[key] = converter(file_cfg[key])
            except ValueError as exc:
                raise ConfigError(f"config key {key}: {exc}")
        else:
            out[key] = default
    return out


def _parse_decays(text: str):
    return tuple(float(v) for v in str(text).split(","))


def _true(text: str) -> bool:
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _fail(code: int, message: str, bad_lines=None) -> int:
    print(f"error: {message}", file=sys.stderr)
    for lineno, text in (bad_lines or [])[:10]:
        print(f"  line {lineno}: {text}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_clean_blocks(args) -> int:
    try:
        records = read_blocks_csv(args.in_csv)
    except ParseError as exc:
        return _fail(EXIT_PARSE, str(exc), exc.bad_lines)
    except OSError as exc:
        return _fail(EXIT_PARSE, str(exc))
    cleaned, report = clean_blocks(records)
    write_blocks_csv(cleaned, args.out_csv)
    payload = report.to_dict()
    payload["counts"] = report.counts()
    payload["manifest"] = _manifest("clean-blocks", {}, [args.in_csv])
    _write_json(args.report_json, payload)
    print(
        f"cleaned {len(records)} -> {len(cleaned)} blocks "
        f"({report.counts()['duplicates_dropped']} duplicates dropped, "
        f"{report.counts()['reordered']} reordered)"
    )
    return EXIT_OK


_JUMP_OPTIONS = {
    "window_hours": (float, 3.0),
    "q_low": (float, 0.10),
    "q_high": (float, 0.90),
    "min_history": (int, 12),
    "start": (str, None),
    "end": (str, None),
}


def cmd_extract_jumps(args) -> int:
    try:
        opts = _effective_options(args, _JUMP_OPTIONS)
        bars = read_price_csv(args.price_csv)
    except (ParseError, ConfigError, OSError) as exc:
        return _fail(EXIT_PARSE, str(exc), getattr(exc, "bad_lines", None))
    try:
        config = JumpConfig(
            window_hours=opts["window_hours"],
            q_low=opts["q_low"],
            q_high=opts["q_high"],
            min_history=opts["min_history"],
        )
        returns, gaps = log_returns(bars)
        up, down = extract_jumps(returns, config)
        start = parse_timestamp(opts["start"]) if opts["start"] else bars[0].timestamp
        end = parse_timestamp(opts["end"]) if opts["end"] else bars[-1].timestamp
        seq, dropped = build_trivariate([], up, down, (start, end))
    except (ConfigError, InvalidInputError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    write_events_csv(seq, args.out_events_csv)
    print(
        f"{len(up)} up / {len(down)} down jumps from {len(returns)} returns "
        f"({len(gaps)} grid gaps, {dropped} outside window)"
    )
    return EXIT_OK


def cmd_build_events(args) -> int:
    try:
        opts = _effective_options(args, _JUMP_OPTIONS)
        blocks = read_blocks_csv(args.blocks_csv)
        bars = read_price_csv(args.price_csv)
    except (ParseError, ConfigError, OSError) as exc:
        return _fail(EXIT_PARSE, str(exc), getattr(exc, "bad_lines", None))
    try:
        cleaned, report = clean_blocks(blocks)
        config = JumpConfig(
            window_hours=opts["window_hours"],
            q_low=opts["q_low"],
            q_high=opts["q_high"],
            min_history=opts["min_history"],
        )
        returns, _ = log_returns(bars)
        up, down = extract_jumps(returns, config)
        start = parse_timestamp(opts["start"]) if opts["start"] else cleaned[0].timestamp
        end = parse_timestamp(opts["end"]) if opts["end"] else cleaned[-1].timestamp
        seq, dropped = build_trivariate(cleaned, up, down, (start, end))
    except (ConfigError, InvalidInputError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    write_events_csv(seq, args.out_events_csv)
    counts = seq.counts()
    print(
        f"events: {counts[0]} blocks, {counts[1]} up jumps, {counts[2]} down jumps "
        f"over {seq.horizon:.3f} h ({dropped} outside window; "
        f"{report.counts()['duplicates_dropped']} duplicate blocks dropped)"
    )
    return EXIT_OK


_FIT_OPTIONS = {
    "horizon": (float, None),
    "dim": (int, None),
    "num_decays": (int, 3),
    "decay_init": (_parse_decays, (0.5, 5.0, 50.0)),
    "inner_max_iter": (int, 500),
    "outer_max_iter": (int, 150),
    "inner_tol": (float, 1e-6),
    "outer_tol": (float, 1e-2),
    "poisson_baseline": (_true, False),
}


def cmd_fit(args) -> int:
    try:
        opts = _effective_options(args, _FIT_OPTIONS)
        seq = read_events_csv(args.events_csv, horizon=opts["horizon"], dim=opts["dim"])
    except (ParseError, ConfigError, OSError, InvalidInputError) as exc:
        return _fail(EXIT_PARSE, str(exc), getattr(exc, "bad_lines", None))
    decay_init = tuple(opts["decay_init"])
    if len(decay_init) != opts["num_decays"]:
        return _fail(
            EXIT_PARSE,
            f"--decay-init holds {len(decay_init)} values but --num-decays is "
            f"{opts['num_decays']}; pass matching values",
        )
    try:
        config = FitConfig(
            num_decays=opts["num_decays"],
            decay_init=decay_init,
            inner_max_iter=opts["inner_max_iter"],
            outer_max_iter=opts["outer_max_iter"],
            inner_tol=opts["inner_tol"],
            outer_tol=opts["outer_tol"],
        )
    except InvalidInputError as exc:
        return _fail(EXIT_PARSE, str(exc))
    try:
        result = fit_full(seq, config)
    except (FittingError, NumericalError, LikelihoodUndefinedError) as exc:
        return _fail(EXIT_NUMERIC, f"fit failed: {exc}")
    payload = fit_result_to_dict(result)
    if opts["poisson_baseline"]:
        baseline = fit_poisson(seq)
        payload["poisson"] = {
            "mu": baseline.rates.tolist(),
            "log_lik": baseline.log_lik,
            "empty_components": list(baseline.empty_components),
        }
    payload["manifest"] = _manifest("fit", opts, [args.events_csv])
    _write_json(args.out_json, payload)
    rho = spectral_radius(result.kernel_norm_matrix)
    print(
        f"log_lik {result.log_lik:.4f}, converged {result.converged}, "
        f"spectral radius {rho:.4f}"
    )
    return EXIT_OK


_GOF_OPTIONS = {
    "horizon": (float, None),
    "dim": (int, None),
    "model_label": (str, None),
}


def cmd_gof(args) -> int:
    try:
        opts = _effective_options(args, _GOF_OPTIONS)
        seq = read_events_csv(args.events_csv, horizon=opts["horizon"], dim=opts["dim"])
        with open(args.model_json) as fh:
            doc = json.load(fh)
    except (ParseError, ConfigError, OSError, InvalidInputError, json.JSONDecodeError) as exc:
        return _fail(EXIT_PARSE, str(exc), getattr(exc, "bad_lines", None))
    try:
        model = model_from_dict(doc)
    except (InvalidInputError, HawkesError) as exc:
        return _fail(EXIT_MODEL, f"invalid model document: {exc}")
    label = opts["model_label"]
    if label is None:
        label = "poisson" if np.all(model.kernel.alpha == 0) else "hawkes"
    try:
        report = gof_report(model, seq, label)
    except (NumericalError, LikelihoodUndefinedError) as exc:
        return _fail(EXIT_NUMERIC, str(exc))
    except InvalidInputError as exc:
        return _fail(EXIT_MODEL, str(exc))
    payload = report_to_dict(report)
    payload["manifest"] = _manifest("gof", opts, [args.events_csv, args.model_json])
    _write_json(args.out_json, payload)
    qq_paths = write_qq_csv(report, args.out_qq_csv)
    for comp in report.components:
        if comp.degenerate:
            print(f"component {comp.component}: too few events, skipped")
        else:
            print(
                f"component {comp.component}: slope_dev {comp.slope_deviation:.4f}, "
                f"KS p {comp.ks_p_value:.4g}"
            )
    print(f"wrote {len(qq_paths)} Q-Q CSV file(s)")
    return EXIT_OK


_SIM_OPTIONS = {
    "horizon": (float, None),
    "seed": (int, None),
    "max_events": (int, 1_000_000),
    "allow_unstable": (_true, False),
}


def cmd_simulate(args) -> int:
    try:
        opts = _effective_options(args, _SIM_OPTIONS)
        with open(args.model_json) as fh:
            doc = json.load(fh)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    if opts["horizon"] is None or opts["seed"] is None:
        return _fail(EXIT_PARSE, "--horizon and --seed are required")
    try:
        model = model_from_dict(doc)
        config = SimConfig(
            model=model,
            horizon=opts["horizon"],
            seed=opts["seed"],
            max_events=opts["max_events"],
            allow_unstable=opts["allow_unstable"],
        )
    except (InvalidInputError, HawkesError) as exc:
        return _fail(EXIT_MODEL, f"invalid model or simulation config: {exc}")
    try:
        seq = simulate(config)
    except StabilityError as exc:
        return _fail(EXIT_MODEL, str(exc))
    except SimulationTruncatedError as exc:
        return _fail(EXIT_NUMERIC, str(exc))
    write_events_csv(seq, args.out_events_csv)
    print(f"simulated {len(seq)} events on [0, {seq.horizon}] h (seed {opts['seed']})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_option_flags(parser, spec):
    for key, (converter, _) in spec.items():
        flag = "--" + key.replace("_", "-")
        if converter is _true:
            parser.add_argument(flag, action="store_const", const=True, default=None)
        elif converter is _parse_decays:
            parser.add_argument(flag, type=_parse_decays, default=None, metavar="V1,V2,...")
        else:
            parser.add_argument(flag, type=converter, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockhawkes",
        description="Hawkes-process modeling of block arrivals and price jumps",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean-blocks", help="deduplicate and re-order block timestamps")
    p.add_argument("in_csv")
    p.add_argument("out_csv")
    p.add_argument("report_json")
    p.set_defaults(func=cmd_clean_blocks)

    p = sub.add_parser("extract-jumps", help="rolling-quantile price-jump events")
    p.add_argument("price_csv")
    p.add_argument("out_events_csv")
    p.add_argument("--config")
    _add_option_flags(p, _JUMP_OPTIONS)
    p.set_defaults(func=cmd_extract_jumps)

    p = sub.add_parser("build-events", help="blocks + prices -> trivariate events CSV")
    p.add_argument("blocks_csv")
    p.add_argument("price_csv")
    p.add_argument("out_events_csv")
    p.add_argument("--config")
    _add_option_flags(p, _JUMP_OPTIONS)
    p.set_defaults(func=cmd_build_events)

    p = sub.add_parser("fit", help="maximum-likelihood Hawkes fit")
    p.add_argument("events_csv")
    p.add_argument("out_json")
    p.add_argument("--config")
    _add_option_flags(p, _FIT_OPTIONS)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("gof", help="time-rescaling goodness-of-fit report")
    p.add_argument("events_csv")
    p.add_argument("model_json")
    p.add_argument("out_json")
    p.add_argument("out_qq_csv")
    p.add_argument("--config")
    _add_option_flags(p, _GOF_OPTIONS)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("simulate", help="Ogata-thinning simulation")
    p.add_argument("model_json")
    p.add_argument("out_events_csv")
    p.add_argument("--config")
    _add_option_flags(p, _SIM_OPTIONS)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
