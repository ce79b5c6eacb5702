"""Command line interface.

Subcommands mirror the experiments:

    curvcert curvature-audit   --model hyperbolic --dim 3 --samples 500
    curvcert verify-comparison --model chn --dim 4 --samples 50
    curvcert verify-primitive  --model chn --dim 4 --k 2 --out cert.csv
    curvcert verify-contact    --model chn --dim 4
    curvcert horizon-limit     --model chn --dim 4 --r-min 2 --r-max 8 --r-steps 7
    curvcert kaehler-primitive --model chn --dim 4 --samples 500

A JSON config file (--config) mirrors the flags; explicit flags override
the file and unknown keys in either are fatal.  Exit codes: 0 all
certificates pass, 1 a certificate FAILED, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .emit import emit
from .errors import CurvcertError, ValidationError
from .experiments import EXPERIMENTS, MODELS, ExperimentConfig, replay_point, run

_FLAG_DEFAULTS = {
    "model": None, "dim": None, "k": None, "r_min": None, "r_max": None,
    "r_steps": None, "samples": None, "seed": None, "quad_order": None,
    "fd_step": None, "tol": None, "out": None, "format": None, "jobs": None,
    "figures": None, "replay": None,
}


def _add_common(sub):
    sub.add_argument("--config", default=None, help="JSON config file mirroring the flags")
    sub.add_argument("--model", choices=MODELS)
    sub.add_argument("--dim", type=int, help="real chart dimension (even for chn)")
    sub.add_argument("--k", type=int, help="source form degree (primitive experiments)")
    sub.add_argument("--r-min", dest="r_min", type=float)
    sub.add_argument("--r-max", dest="r_max", type=float)
    sub.add_argument("--r-steps", dest="r_steps", type=int)
    sub.add_argument("--samples", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--quad-order", dest="quad_order", type=int)
    sub.add_argument("--fd-step", dest="fd_step", type=float)
    sub.add_argument("--tol", type=float)
    sub.add_argument("--out", help="output file path")
    sub.add_argument("--format", choices=("csv", "json"))
    sub.add_argument("--jobs", type=int)
    sub.add_argument("--figures", help="directory for rendered figures")
    sub.add_argument("--replay", help="comma-separated chart coordinates of one sample")
    sub.add_argument("--force", action="store_true",
                     help="allow overwriting files with a different schema version")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvcert",
        description="certified bounded primitives and contact structures on "
                    "negatively curved model spaces")
    subs = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        _add_common(subs.add_parser(name))
    return parser


def _merge_config(args: argparse.Namespace) -> ExperimentConfig:
    data = {"experiment": args.experiment}
    if args.config:
        with open(args.config) as fh:
            file_data = json.load(fh)
        if not isinstance(file_data, dict):
            raise ValidationError("config file must hold a JSON object")
        file_data.pop("experiment", None)
        data.update(file_data)
    for key in _FLAG_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            data[key] = val
    if getattr(args, "force", False):
        data["force"] = True
    defaults = {"curvature-audit": {"samples": 500},
                "verify-comparison": {"samples": 50},
                "verify-contact": {"model": "chn", "dim": 4},
                "horizon-limit": {"model": "chn", "dim": 4, "samples": 60},
                "kaehler-primitive": {"model": "chn", "dim": 4},
                "verify-primitive": {}}
    for key, val in defaults.get(args.experiment, {}).items():
        data.setdefault(key, val)
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        if cfg.replay:
            detail = replay_point(cfg, cfg.replay)
            for key, val in detail.items():
                print(f"{key}: {val}")
            return 0 if detail.get("passed", False) else 1
        record = run(cfg)
        if cfg.out:
            emit(record, cfg.out, fmt=cfg.format, force=cfg.force)
            print(f"wrote {cfg.out}")
        if cfg.figures:
            from .report import render_figures
            for path in render_figures(record, cfg.figures):
                print(f"wrote {path}")
        status = "PASS" if record.passed() else "FAIL"
        print(f"[{status}] {cfg.experiment}: "
              + json.dumps(record.summary, sort_keys=True, default=str))
        return 0 if record.passed() else 1
    except (ValidationError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CurvcertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
