"""Command-line interface.

Subcommands:
  field-info        deterministic modulus, generator, and table checksums
  spectrum          exact Fourier spectrum of one exponent
  diff              differential multiplicity profile of one exponent
  check             run selected verification checks on one exponent
  campaign          run verification campaigns across a field range
  reproduce-table1  recompute the published nice-exponent table

Exit codes: 0 clean, 1 when any COUNTEREXAMPLE or FORMULA-MISMATCH
finding was produced, 2 on usage or domain errors.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys

from . import __version__
from .cache import ENV_VAR, canonical_json, default_cache_dir
from .campaign import (CHECK_NAMES, SCHEMA_VERSION, CampaignConfig,
                       CampaignReport, findings_to_csv, run_campaign,
                       run_single)
from .differential import diff_counts, diff_profile
from .errors import WeilscopeError
from .exponents import approx_class
from .findings import Finding
from .gf import build_field
from .spectrum import full_spectrum, spectrum_stats
from .table1 import TABLE1_MAX_M, reproduce_table1


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cache_dir(args) -> str | None:
    env = os.environ.get(ENV_VAR)
    if env:
        return env
    if args.cache is not None:
        return args.cache
    return default_cache_dir()


def _parse_checks(text: str) -> tuple:
    names = tuple(c.strip() for c in text.split(",") if c.strip())
    return names if names else tuple(CHECK_NAMES)


def _findings_text(findings, fmt: str) -> str:
    if fmt == "csv":
        return findings_to_csv(findings)
    record = {"schema": SCHEMA_VERSION,
              "findings": [f.to_record() for f in findings],
              "alarms": sum(1 for f in findings if f.is_alarm)}
    return canonical_json(record) + "\n"


def _exit_for(findings) -> int:
    return 1 if any(f.is_alarm for f in findings) else 0


def cmd_field_info(args) -> int:
    fld = build_field(args.p, args.m)
    record = {
        "schema": SCHEMA_VERSION,
        "p": fld.p, "m": fld.m, "q": fld.q,
        "modulus": list(fld.modulus),
        "generator": "x",
        "descriptor": fld.descriptor(),
        "checksums": {
            "log": hashlib.sha256(fld.poly_of_log.tobytes()).hexdigest()[:16],
            "zech":
                hashlib.sha256(fld.zech_of_log.tobytes()).hexdigest()[:16],
            "trace":
                hashlib.sha256(fld.trace_of_log.tobytes()).hexdigest()[:16],
        },
    }
    _emit(canonical_json(record) + "\n", args.out)
    return 0


def cmd_spectrum(args) -> int:
    fld = build_field(args.p, args.m)
    spec = full_spectrum(fld, args.s)
    record = dict(spec.to_record())
    record["schema"] = SCHEMA_VERSION
    record["stats"] = spectrum_stats(spec)
    record["class"] = approx_class(fld.q, fld.p, args.s).to_record()
    _emit(canonical_json(record) + "\n", args.out)
    return 0


def cmd_diff(args) -> int:
    fld = build_field(args.p, args.m)
    profile = diff_profile(fld, args.s)
    record = dict(profile.to_record())
    record["schema"] = SCHEMA_VERSION
    record["class"] = approx_class(fld.q, fld.p, args.s).to_record()
    if args.witness:
        counts = diff_counts(fld, args.s)
        record["n_of_v"] = [[int(v), int(n)]
                            for v, n in enumerate(counts) if n]
    _emit(canonical_json(record) + "\n", args.out)
    return 0


def cmd_check(args) -> int:
    findings = run_single(args.p, args.m, args.s, _parse_checks(args.checks),
                          witness=args.witness, cache_dir=_cache_dir(args))
    _emit(_findings_text(findings, args.format), args.out)
    return _exit_for(findings)


def cmd_campaign(args) -> int:
    config = CampaignConfig(
        characteristics=tuple(int(c) for c in args.p.split(",") if c),
        max_q=args.max_q,
        checks=_parse_checks(args.checks),
        parallelism=args.jobs,
        cache_dir=_cache_dir(args),
        witness=args.witness)
    report = run_campaign(config)
    _emit(report.render(args.format), args.out)
    return report.exit_code


def cmd_reproduce_table1(args) -> int:
    findings = reproduce_table1(parallelism=args.jobs,
                                cache_dir=_cache_dir(args),
                                max_m=args.max_m)
    _emit(_findings_text(findings, args.format), args.out)
    return _exit_for(findings)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weilscope",
        description="Exact Fourier spectra, differential profiles, and "
                    "verification campaigns for power maps on finite fields")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_field_args(sp, with_s):
        sp.add_argument("--p", type=int, required=True,
                        help="field characteristic (prime)")
        sp.add_argument("--m", type=int, default=1,
                        help="extension degree (default 1)")
        if with_s:
            sp.add_argument("--s", type=int, required=True,
                            help="exponent of the power map")
        sp.add_argument("--out", help="write the report to this path")

    sp = sub.add_parser("field-info", help="field construction report")
    add_field_args(sp, with_s=False)
    sp.set_defaults(fn=cmd_field_info)

    sp = sub.add_parser("spectrum", help="exact Fourier spectrum of x^s")
    add_field_args(sp, with_s=True)
    sp.set_defaults(fn=cmd_spectrum)

    sp = sub.add_parser("diff", help="differential multiplicity profile")
    add_field_args(sp, with_s=True)
    sp.add_argument("--witness", action="store_true",
                    help="include the full v -> N(1,v) map")
    sp.set_defaults(fn=cmd_diff)

    sp = sub.add_parser("check", help="run selected checks on one exponent")
    add_field_args(sp, with_s=True)
    sp.add_argument("--checks", default=",".join(CHECK_NAMES),
                    help="comma-separated check names (default: all)")
    sp.add_argument("--witness", action="store_true")
    sp.add_argument("--cache", help="cache directory")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("campaign", help="verification campaign over a range")
    sp.add_argument("--p", required=True,
                    help="comma-separated characteristics, e.g. 2,3,5")
    sp.add_argument("--max-q", type=int, required=True, dest="max_q",
                    help="largest field order to include")
    sp.add_argument("--checks", default=",".join(CHECK_NAMES),
                    help="comma-separated check names (default: all)")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sp.add_argument("--cache", help="cache directory "
                    f"(default ~/.cache/weilscope; ${ENV_VAR} overrides)")
    sp.add_argument("--out", help="write the report to this path")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--witness", action="store_true",
                    help="include full value maps in witness payloads")
    sp.set_defaults(fn=cmd_campaign)

    sp = sub.add_parser("reproduce-table1",
                        help="recompute the published nice-exponent table")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--cache", help="cache directory")
    sp.add_argument("--max-m", type=int, default=TABLE1_MAX_M, dest="max_m",
                    help="largest extension degree to reproduce")
    sp.add_argument("--out", help="write the report to this path")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(fn=cmd_reproduce_table1)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except WeilscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
