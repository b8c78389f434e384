"""``lightcone`` command-line entry point.

Exit status: 0 when every scenario check passes, 1 on a numerical failure
(the report is still written), 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from . import __version__
from .scenarios import SCENARIOS, ConfigError, Outcome, plan, resolve
from .verify import TOLERANCE_VERSION

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2


def load_schema() -> dict:
    return json.loads(resources.files("lightcone").joinpath("scenario.schema.json").read_text())


def _path(err: jsonschema.ValidationError) -> str:
    return ".".join(str(p) for p in err.absolute_path) or "<root>"


def validate(config: dict) -> None:
    """Raise :class:`ConfigError` with a path-precise message."""
    v = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(v.iter_errors(config), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise ConfigError("; ".join(f"{_path(e)}: {e.message}" for e in errors))


def config_hash(cfg: dict) -> str:
    raw = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(raw.encode()).hexdigest()


def read_config(args) -> dict:
    config = {}
    if args.config:
        try:
            config = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file {args.config} not found")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {args.config}: invalid JSON ({exc})")
        if not isinstance(config, dict):
            raise ConfigError("<root>: config must be a JSON object")
    if args.scenario:
        config["scenario"] = args.scenario
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    validate(config)
    if "scenario" not in config:
        raise ConfigError("scenario: required (in the config or via --scenario)")
    return resolve(config)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def write_outcome(out_dir: Path, cfg: dict, outcome: Outcome, error: str | None = None) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    decisive = [c for c in outcome.checks if not c.informational]
    passed = error is None and all(c.passed for c in decisive)
    report = {
        "scenario": cfg["scenario"],
        "config": cfg,
        "config_hash": config_hash(cfg),
        "tolerance_version": TOLERANCE_VERSION,
        "package_version": __version__,
        "passed": passed,
        "error": error,
        "checks": [c.to_dict() for c in outcome.checks],
        "summary": outcome.summary,
        "files": sorted(list(outcome.csv) + list(outcome.containers)),
    }
    (out_dir / "report.json").write_text(_dump(report))
    for name, text in outcome.csv.items():
        (out_dir / name).write_text(text)
    for name, writer in outcome.containers.items():
        writer(out_dir / name)
    return report


def cmd_run(args) -> int:
    cfg = read_config(args)
    out_dir = Path(args.out or cfg.get("output") or f"lightcone-{cfg['scenario']}")
    runner = SCENARIOS[cfg["scenario"]]
    error = None
    try:
        outcome = runner(cfg)
    except ConfigError:
        raise
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        error = f"{type(exc).__name__}: {exc}"
        outcome = Outcome({}, [])
    report = write_outcome(out_dir, cfg, outcome, error)
    failed = [c for c in outcome.checks if not c.passed and not c.informational]
    for c in outcome.checks:
        flag = "ok" if c.passed else ("info" if c.informational else "FAIL")
        tol = "" if c.tolerance is None else f" (tol {c.tolerance:.1e})"
        note = f"  [{c.note}]" if c.note and not c.passed else ""
        print(f"[{flag:>4}] {c.group}: {c.name} = {c.value:.3e}{tol}{note}")
    if error:
        print(f"error: {error}", file=sys.stderr)
    print(f"report: {out_dir / 'report.json'}")
    if report["passed"]:
        return EXIT_OK
    if failed:
        print(f"{len(failed)} check(s) failed", file=sys.stderr)
    return EXIT_NUMERIC


def cmd_describe(args) -> int:
    cfg = read_config(args)
    sys.stdout.write(plan(cfg))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lightcone", description="Radiation fields and exterior energies for the wave equation.")
    p.add_argument("--version", action="version", version=f"lightcone {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_out=True):
        sp.add_argument("--config", help="JSON scenario configuration")
        sp.add_argument("--seed", type=int, help="seed for randomized suites (overrides the config)")
        if with_out:
            sp.add_argument("--out", help="output directory for report.json and CSV files")

    sp = sub.add_parser("run", help="run the scenario named in the config")
    common(sp)
    sp.add_argument("--scenario", choices=sorted(SCENARIOS), help="override the scenario kind")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("describe", help="print the plan for a config without computing")
    common(sp, with_out=False)
    sp.add_argument("--scenario", choices=sorted(SCENARIOS))
    sp.set_defaults(func=cmd_describe)

    for name in SCENARIOS:
        sp = sub.add_parser(name, help=f"run the {name} scenario")
        common(sp)
        sp.set_defaults(func=cmd_run, scenario=name)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
