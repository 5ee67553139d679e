"""``origamikz`` command line."""
from __future__ import annotations

import argparse
import json
import sys
import typing

from .errors import OrigamiError, PreconditionViolated
from .report import COMMANDS, EXIT_USAGE, RunConfig, render, run


class UsageError(Exception):
    pass


def _convert(name: str, raw: str):
    types = typing.get_type_hints(RunConfig)
    t = types[name]
    if raw.lower() in ("none", "") and type(None) in typing.get_args(t):
        return None
    base = next((a for a in typing.get_args(t) if a is not type(None)), t)
    try:
        return base(raw)
    except ValueError as e:
        raise UsageError(f"config key {name!r}: cannot parse {raw!r}") from e


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    names = set(RunConfig.field_types())
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            k, v = (x.strip() for x in line.split("=", 1))
            k = k.replace("-", "_")
            if k not in names or k == "command":
                raise UsageError(f"{path}:{lineno}: unknown key {k!r}")
            out[k] = _convert(k, v)
    return out


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2, which is taken by "inconclusive"
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="origamikz", description=(
        "Exact and Monte Carlo checks for the Kontsevich-Zorich cocycle over "
        "square-tiled surfaces."))
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", "-i", help="origami JSON file, bundled example name, "
                   "or (for holonomy) an instance JSON file")
    p.add_argument("--config", help="key = value file overriding the defaults")
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--word-len", type=int)
    p.add_argument("--norm-cap", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--count", type=int, help="orbit cloud size for envelope")
    p.add_argument("--element-cap", type=int)
    p.add_argument("--max-nodes", type=int)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--space", choices=("absolute", "relative"))
    p.add_argument("--format", choices=("json", "csv", "text"))
    p.add_argument("--out", "-o", help="write the report here instead of stdout")
    return p


def make_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = read_config(args.config) if args.config else {}
    for k in RunConfig.field_types():
        v = getattr(args, k, None)
        if v is not None:
            values[k] = v
    values["command"] = args.command
    if not values.get("input"):
        raise UsageError("--input is required")
    return RunConfig(**values)


def main(argv=None) -> int:
    try:
        cfg = make_config(argv)
        report, code = run(cfg)
    except (UsageError, OrigamiError, FileNotFoundError, ValueError, KeyError) as e:
        if isinstance(e, json.JSONDecodeError):
            msg = f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}"
        elif isinstance(e, PreconditionViolated):
            msg = f"precondition violated: {e}"
        else:
            msg = f"{type(e).__name__}: {e}"
        print(f"origamikz: {msg}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
