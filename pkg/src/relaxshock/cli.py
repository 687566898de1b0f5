"""``relaxshock profile|stability|relax-limit|validate --config <path> [--out <dir>] [--tau <list>]``"""
from __future__ import annotations

import argparse
import logging
import sys

from . import experiments as ex
from .config import RunConfig, load_config, validate_config
from .errors import BlowUpError, ConfigError


def _parse_taus(text):
    try:
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"--tau: cannot parse {text!r}") from exc


def build_parser():
    p = argparse.ArgumentParser(prog="relaxshock", description=__doc__)
    p.add_argument("command", choices=("profile", "stability", "relax-limit", "validate"))
    p.add_argument("--config", help="key=value config file (defaults used when omitted)")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--tau", help="comma-separated tau values for relax-limit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else validate_config(RunConfig())
        if args.command == "profile":
            return ex.cmd_profile(cfg, args.out)
        if args.command == "stability":
            return ex.cmd_stability(cfg, args.out)
        if args.command == "relax-limit":
            taus = _parse_taus(args.tau) if args.tau else None
            if taus is not None:
                from dataclasses import replace
                cfg = validate_config(replace(cfg, tau_list=tuple(taus)))
            return ex.cmd_relax_limit(cfg, args.out, taus)
        return ex.cmd_validate(cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return ex.EXIT_CONFIG
    except BlowUpError as exc:
        print(f"blow-up: {exc} (t={exc.time}, cell={exc.cell})", file=sys.stderr)
        return ex.EXIT_BLOWUP


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
