"""Command-line entry point.

Usage::

    ncc <stage> --config <path> [--section.key=value ...]

where ``<stage>`` is one of ``solve``, ``simulate``, ``shock``, ``irf`` or
``report``. Overrides patch individual config keys before validation. Exit
codes: 0 success, 2 validation failure, 3 runtime failure; every error prints
a single machine-parsable line ``ncc: error: <kind>: <message>`` to stderr.
"""

from __future__ import annotations

import argparse
import sys

from .config import RunConfig, apply_overrides, load_config
from .errors import ConfigError, DomainError, InsufficientDataError, NccError
from .pipeline import STAGE_ORDER, run_pipeline

__all__ = ["main"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncc",
        description="Narrative-credibility model pipeline: solve, simulate, "
        "build shocks, estimate impulse responses, render reports.",
    )
    parser.add_argument("stage", choices=STAGE_ORDER, help="pipeline stage to run")
    parser.add_argument("--config", required=True, help="path to the YAML run config")
    return parser


def _split_overrides(extras) -> list:
    overrides = []
    for item in extras:
        if item.startswith("--") and "=" in item and "." in item.split("=", 1)[0]:
            overrides.append(item[2:])
        else:
            raise ConfigError(f"unrecognized argument {item!r} (overrides look like --section.key=value)")
    return overrides


def main(argv=None) -> int:
    args, extras = _parser().parse_known_args(argv)
    try:
        overrides = _split_overrides(extras)
        config = load_config(args.config)
        data = apply_overrides(config.data, overrides)
        config = RunConfig(data=data, base_dir=config.base_dir)
        manifest = run_pipeline(config, [args.stage])
    except (ConfigError, DomainError, InsufficientDataError) as exc:
        print(f"ncc: error: validation: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NccError as exc:
        print(f"ncc: error: runtime: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # unexpected failure still gets one parsable line
        print(f"ncc: error: runtime: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    out_dir = config.output_dir()
    print(f"ncc: stage {args.stage} complete; {len(manifest.artifacts)} artifact(s) in {out_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
