"""Command-line front end.

    c3rec fg --genus 2..5 --framing symbolic --format csv
    c3rec wgn --genus 1 --n-points 1 --framing symbolic
    c3rec verify --suite all --framing 1 --genus-max 7

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 precision failure after the automatic retry.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .cache import ResultCache, cache_key, default_cache_dir
from .curve import DEFAULT_MARGIN, default_order
from .errors import C3Error, DecompositionError, DomainError, PrecisionError
from .exactmath import Framing, faber_pandharipande, format_scalar
from .recursion import (
    CorrelatorTensor,
    FreeEnergy,
    curve_at,
    decompose_in_zeta_basis,
    solve_correlator,
    solve_free_energy,
)
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECISION = 0, 1, 2, 3
FORMATS = ("json", "csv", "table")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    genus: tuple[int, int]
    n: int
    framing: Framing
    margin: int = DEFAULT_MARGIN
    fmt: str = "table"
    out: Path | None = None
    cache_dir: Path | None = None
    suite: str = "all"


def parse_genus(text: str) -> tuple[int, int]:
    """"3" -> (3, 3); "2..5" -> (2, 5)."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise InputError(f"bad genus {text!r}; expected an integer or a range a..b") from None
    if lo > hi:
        raise InputError(f"empty genus range {text!r}")
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="c3rec", description="Exact topological recursion on the C^3 mirror curve.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", help="integer or range a..b")
    common.add_argument("--genus-max", type=int, help="upper genus; the range starts at 2")
    common.add_argument("--framing", default="1", help='"symbolic" or a rational p/q (default 1)')
    common.add_argument("--order-margin", type=int, default=DEFAULT_MARGIN)
    common.add_argument("--format", choices=FORMATS, default="table")
    common.add_argument("--out", type=Path)
    common.add_argument("--cache-dir", type=Path)
    common.add_argument("--no-cache", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fg", parents=[common], help="free energies F_g")
    wgn = sub.add_parser("wgn", parents=[common], help="Hodge coefficients of W^g_n")
    wgn.add_argument("--n-points", type=int, default=1)
    ver = sub.add_parser("verify", parents=[common], help="run identity checks")
    ver.add_argument("--suite", default="all", help=", ".join(SUITES))
    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    try:
        framing = Framing.parse(args.framing)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad framing {args.framing!r}: {exc}") from None
    if args.genus is not None:
        genus = parse_genus(args.genus)
    elif args.genus_max is not None:
        genus = (2 if args.command != "wgn" else args.genus_max, args.genus_max)
    else:
        genus = (2, 3) if args.command != "wgn" else (1, 1)
    n = getattr(args, "n_points", 1)
    if args.command == "fg" and genus[0] < 2:
        raise InputError(f"F_g needs g >= 2, got {genus[0]}")
    if args.command == "wgn":
        if genus[0] != genus[1]:
            raise InputError("wgn takes a single genus")
        if genus[0] < 0 or n < 1 or 2 * genus[0] - 2 + n <= 0:
            raise InputError(f"(g, n) = ({genus[0]}, {n}) is not stable")
    suite = getattr(args, "suite", "all")
    if args.command == "verify" and suite not in SUITES:
        raise InputError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if args.command == "verify" and genus[1] < 2:
        raise InputError("verify needs --genus-max >= 2")
    if args.order_margin < 0:
        raise InputError("--order-margin must be non-negative")
    cache_dir = None if args.no_cache else (args.cache_dir or default_cache_dir())
    return RunConfig(args.command, genus, n, framing, args.order_margin, args.format, args.out, cache_dir, suite)


# ---------------------------------------------------------------------------


def _cache(config: RunConfig) -> ResultCache | None:
    return ResultCache(config.cache_dir) if config.cache_dir else None


def _free_energy(config: RunConfig, g: int) -> FreeEnergy:
    cache = _cache(config)
    order = default_order(g, 1, config.margin)
    key = cache_key(__version__, "free_energy", g, 1, config.framing.label, order)
    if cache:
        hit = cache.get(key)
        if hit is not None:
            return FreeEnergy.from_json(hit.payload["value"])
    value, used = solve_free_energy(config.framing, g, order=order, stability=True)
    if cache:
        cache.put(key, {"value": value.to_json(), "order": used})
    return value


def _correlator(config: RunConfig, g: int, n: int) -> tuple[CorrelatorTensor, int]:
    cache = _cache(config)
    order = default_order(g, n, config.margin)
    key = cache_key(__version__, "correlator", g, n, config.framing.label, order)
    if cache:
        hit = cache.get(key)
        if hit is not None:
            return CorrelatorTensor.from_json(hit.payload["tensor"]), hit.payload["order"]
    tensor, used = solve_correlator(config.framing, g, n, order=order, stability=True)
    if cache:
        cache.put(key, {"tensor": tensor.to_json(), "order": used})
    return tensor, used


def _render_rows(header: list[str], rows: list[list[str]], fmt: str, json_obj) -> str:
    if fmt == "json":
        return json.dumps(json_obj, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    table = [header] + rows
    width = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, width)).rstrip() for r in table]
    lines.insert(1, "  ".join("-" * w for w in width))
    return "\n".join(lines) + "\n"


def run_fg(config: RunConfig) -> tuple[int, str]:
    rows, objs = [], []
    all_match = True
    for g in range(config.genus[0], config.genus[1] + 1):
        value = _free_energy(config, g)
        match = value.is_framing_independent and value.rational_value() == faber_pandharipande(g)
        all_match &= match
        text = format_scalar(value.value)
        rows.append([str(g), config.framing.label, text, "true" if match else "false"])
        objs.append({"genus": g, "framing": config.framing.label, "value": text,
                     "matches_faber_pandharipande": match})
    out = _render_rows(["genus", "framing", "value", "matches"], rows, config.fmt, objs)
    return (EXIT_OK if all_match else EXIT_FAIL), out


def run_wgn(config: RunConfig) -> tuple[int, str]:
    g, n = config.genus[0], config.n
    tensor, used = _correlator(config, g, n)
    table = decompose_in_zeta_basis(curve_at(config.framing, used), tensor)
    data = table.to_json()
    rows = [[" ".join(map(str, e["b"])), e["coeff"]] for e in data["entries"]]
    return EXIT_OK, _render_rows(["b", "coeff"], rows, config.fmt, data)


def run_verify(config: RunConfig) -> tuple[int, str]:
    report = run_suite(config.suite, config.framing, config.genus[1], config.margin)
    if config.fmt == "json":
        out = report.dumps() + "\n"
    elif config.fmt == "csv":
        rows = [[c.id, c.to_json()["status"], c.witness or c.value or ""] for c in report.checks]
        out = _render_rows(["check", "status", "detail"], rows, "csv", None)
    else:
        out = report.render_table() + "\n"
    return (EXIT_OK if report.passed else EXIT_FAIL), out


COMMANDS = {"fg": run_fg, "wgn": run_wgn, "verify": run_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        config = make_config(args)
        code, text = COMMANDS[config.command](config)
    except (InputError, DomainError) as exc:
        print(f"c3rec: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionError as exc:
        print(f"c3rec: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except DecompositionError as exc:
        print(f"c3rec: decomposition failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except C3Error as exc:
        print(f"c3rec: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    if config.out:
        config.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
