"""Command-line experiment driver.

One subcommand per experiment kind plus `suite`, which runs everything.
Configuration comes from built-in defaults, optionally overridden by a JSON
config file, with command-line flags winning over both.  Exit status: 0 when
every verdict passes, 1 on a numerical verdict failure (the failing check is
named on stderr), 2 on a usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, ScalevarError
from .experiments import EXPERIMENT_KINDS, run_experiment
from .reporting import write_experiment_outputs

#: Flag-to-config-key mapping for --tolerance, per experiment kind.
TOLERANGE_KEYS = {
    "leibniz": "tolerance",
    "integral": "tolerance",
    "schrodinger": "tolerance",
    "variational": "tolerance",
    "holder": "tolerance_band",
    "dominant": "coefficient_tolerance",
}

#: Flag-to-config-key mapping for --ladder.
LADDER_KEYS = {
    "ops": "ladder",
    "chain": "ladder",
    "scaling": "ladder",
    "dominant": "ladder",
    "variational": "ladder",
    "holder": "delta_ladder",
}


def _parse_ladder(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(
            f"--ladder expects eps_max,ratio,rungs, got {text!r}"
        )
    return {"eps_max": float(parts[0]), "ratio": float(parts[1]),
            "rungs": int(parts[2])}


def _load_config(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config file {path!r} is not valid JSON "
            f"(line {exc.lineno}, column {exc.colno}): {exc.msg}"
        )
    if not isinstance(cfg, dict):
        raise ConfigError(f"config file {path!r} must hold a JSON object")
    return cfg


def _overrides_from_args(kind: str, args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.tolerance is not None:
        key = TOLERANGE_KEYS.get(kind)
        if key is None:
            raise ConfigError(
                f"--tolerance is not applicable to the {kind!r} experiment"
            )
        overrides[key] = args.tolerance
    if args.ladder is not None:
        key = LADDER_KEYS.get(kind)
        if key is None:
            raise ConfigError(
                f"--ladder is not applicable to the {kind!r} experiment"
            )
        overrides[key] = _parse_ladder(args.ladder)
    return overrides


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags win over it")
    p.add_argument("--seed", type=int, help="seed override")
    p.add_argument("--out", default=None,
                   help="output directory (default scalevar-out/<kind>)")
    p.add_argument("--tolerance", type=float,
                   help="primary tolerance override, where applicable")
    p.add_argument("--ladder",
                   help="epsilon ladder as eps_max,ratio,rungs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scalevar",
        description="Scale-derivative calculus and variational check suites",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        _add_common_flags(p)
    p = sub.add_parser(
        "suite",
        help="run every experiment; config file maps kind -> experiment config")
    p.add_argument("--config",
                   help="JSON object keyed by experiment kind")
    p.add_argument("--seed", type=int, help="seed override for every kind")
    p.add_argument("--out", default=None,
                   help="output directory (default scalevar-out)")
    return parser


def _run_one(kind: str, user_cfg: dict | None, overrides: dict,
             outdir: Path) -> bool:
    result = run_experiment(kind, user_cfg, overrides)
    write_experiment_outputs(outdir, result)
    for verdict in result.report["verdicts"]:
        if not verdict["passed"]:
            print(f"scalevar {kind}: FAIL {verdict['check']}: "
                  f"{verdict['detail']}", file=sys.stderr)
    return result.passed


def _suite_configs(path: str | None) -> dict:
    cfg = _load_config(path)
    if cfg is None:
        return {}
    for key in cfg:
        if key not in EXPERIMENT_KINDS:
            raise ConfigError(
                f"unknown experiment kind {key!r} in suite config; "
                f"known: {', '.join(EXPERIMENT_KINDS)}"
            )
        if not isinstance(cfg[key], dict):
            raise ConfigError(f"suite config section {key!r} must be an object")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors already; normalize others.
        return int(exc.code) if exc.code else 0
    try:
        if args.command == "suite":
            base = Path(args.out) if args.out else Path("scalevar-out")
            sections = _suite_configs(args.config)
            overrides = {"seed": args.seed} if args.seed is not None else {}
            summary = {"schema_version": "1", "experiments": {}}
            all_pass = True
            for kind in EXPERIMENT_KINDS:
                ok = _run_one(kind, sections.get(kind), overrides, base / kind)
                summary["experiments"][kind] = "pass" if ok else "fail"
                all_pass = all_pass and ok
            summary["passed"] = all_pass
            base.mkdir(parents=True, exist_ok=True)
            (base / "suite_report.json").write_text(
                json.dumps(summary, sort_keys=True, indent=2) + "\n",
                encoding="utf-8")
            if not all_pass:
                print("scalevar suite: numerical verdict failure",
                      file=sys.stderr)
                return 1
            return 0
        kind = args.command
        outdir = Path(args.out) if args.out else Path("scalevar-out") / kind
        ok = _run_one(kind, _load_config(args.config),
                      _overrides_from_args(kind, args), outdir)
        if not ok:
            return 1
        return 0
    except ConfigError as exc:
        print(f"scalevar: config error: {exc}", file=sys.stderr)
        return 2
    except ScalevarError as exc:
        print(f"scalevar: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
