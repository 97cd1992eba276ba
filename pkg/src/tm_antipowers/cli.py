"""Command-line front end: one subcommand per operation, JSON or CSV on stdout.

Every emitted record carries ``schema_version``, ``command``, ``inputs``,
``result`` and ``elapsed_ms``.  Sweeps emit one record per row.  In CSV the
nested maps are flattened to ``inputs.<key>`` and ``result.<key>`` columns;
lists are written as JSON text, booleans as ``true``/``false`` and missing
values as empty cells.

Exit codes: 0 ok, 1 domain, hypothesis or usage error, 2 resource error,
3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from typing import Optional

from . import bounds, harness
from .antipower import AntiPowerEngine
from .errors import DomainError, InternalInconsistencyError, ResourceError, TmError
from .word import Segment, TmBuffer, tm_letter

SCHEMA_VERSION = "1"

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_RESOURCE = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems with exit 2; ours is 1."""

    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# -- output -----------------------------------------------------------------

def make_record(command: str, inputs: dict, result, elapsed_ms: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "result": result,
        "elapsed_ms": elapsed_ms,
    }


def flatten(record: dict) -> dict:
    out = {}
    for key, value in record.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                out[f"{key}.{sub}"] = v
        elif key == "result":
            out["result.value"] = value
        else:
            out[key] = value
    return out


def csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return str(value)


def write_records(records: list[dict], fmt: str, stream) -> None:
    if fmt == "json":
        for rec in records:
            stream.write(json.dumps(rec, separators=(",", ":")) + "\n")
        return
    rows = [flatten(r) for r in records]
    columns: list[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    writer = csv.writer(stream, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([csv_cell(row.get(c)) for c in columns])


# -- subcommand bodies ----------------------------------------------------
# Each returns a list of (inputs, result) pairs, one per output record.

def _cmd_letter(a, engine):
    return [({"i": a.i}, tm_letter(a.i))]


def _cmd_segment(a, engine):
    seg = Segment(a.alpha, a.beta)
    return [({"alpha": a.alpha, "beta": a.beta}, str(engine.buffer.segment_bits(seg)))]


def _cmd_antipower(a, engine):
    return [({"j": a.j, "k": a.k, "m": a.m}, engine.is_anti_power(a.j, a.k, a.m))]


def _cmd_gamma(a, engine):
    return [({"j": a.j, "k": a.k}, engine.gamma(a.j, a.k))]


def _cmd_big_gamma(a, engine):
    return [({"j": a.j, "k": a.k}, engine.big_gamma(a.j, a.k))]


def _cmd_frak_k(a, engine):
    return [({"j": a.j, "m": a.m, "cap": a.cap}, engine.frak_k(a.j, a.m, a.cap))]


def _m_range(a):
    if a.m is not None:
        return range(a.m, a.m + 1)
    if a.m_min is None or a.m_max is None:
        raise DomainError("give --m, or both --m-min and --m-max")
    if a.m_min > a.m_max:
        raise DomainError(f"empty range m in [{a.m_min}, {a.m_max}]")
    return range(a.m_min, a.m_max + 1)


def _check_record(check: bounds.BoundCheck) -> dict:
    rec = check.to_record()
    for key in ("lemma_id", "j", "m"):
        rec.pop(key)
    return rec


def _cmd_bounds_verify(a, engine):
    lemmas = a.lemma or list(bounds.LEMMA_IDS)
    for lid in lemmas:
        if lid not in bounds.LEMMA_IDS:
            raise DomainError(f"unknown lemma id {lid!r}; expected one of {bounds.LEMMA_IDS}")
    out = []
    for m in _m_range(a):
        for lid in lemmas:
            check = bounds.check_upper_bound(lid, a.j, m, engine, s_cap=a.s_cap)
            out.append(({"lemma_id": lid, "j": a.j, "m": m}, _check_record(check)))
    return out


def _cmd_gen47(a, engine):
    out = []
    for check in bounds.check_lower_bound_gen47(a.j, a.ell, engine):
        inputs = {"j": a.j, "ell": a.ell, "lemma_id": check.lemma_id, "m": check.m}
        out.append((inputs, _check_record(check)))
    return out


def _cmd_gencor(a, engine):
    checks = bounds.check_gencor(a.j, a.k, engine)
    return [({"j": a.j, "k": a.k, "m": c.m}, _check_record(c)) for c in checks]


def _cmd_yvy(a, engine):
    found = bounds.check_prop_yvy(a.m, a.prefix_len, engine)
    result = {"count": len(found), "violations": [list(v) for v in found]}
    return [({"m": a.m, "prefix_len": a.prefix_len}, result)]


def _cmd_construct(a, engine):
    if a.family is not None:
        if a.param is None:
            raise DomainError("--family needs --param")
        t = bounds.family_construction(a.family, a.param, a.j)
        inputs = {"family": bounds.normalize_family(a.family), "param": a.param, "j": a.j}
    else:
        fields = {"r": a.r, "m": a.m, "ell": a.ell, "h": a.h, "p": a.p, "q": a.q}
        missing = [k for k, v in fields.items() if v is None]
        if missing:
            raise DomainError("give --family and --param, or all of --r --m --ell --h --p --q"
                              f" (missing {', '.join('--' + k for k in missing)})")
        t = bounds.ConstructionTuple(j=a.j, **fields)
        inputs = {"j": a.j, **fields}
    rec = bounds.verify_construction(t).to_record()
    return [(inputs, rec)]


def _cmd_family(a, engine):
    if a.param_min > a.param_max:
        raise DomainError(f"empty parameter range [{a.param_min}, {a.param_max}]")
    probes = harness.family_probe(a.family, range(a.param_min, a.param_max + 1), a.j, engine)
    out = []
    for probe in probes:
        rec = probe.to_record()
        inputs = {"family": rec.pop("family"), "param": rec.pop("parameter"), "j": rec.pop("j")}
        out.append((inputs, rec))
    return out


def _cmd_ratio_sweep(a, engine):
    rows = harness.ratio_sweep(a.j, a.k_min, a.k_max, workers=a.threads, engine=engine)
    out = []
    for row in rows:
        rec = row.to_record()
        out.append(({"j": rec.pop("j"), "k": rec.pop("k")}, rec))
    return out


def _cmd_conjecture_scan(a, engine):
    reports = harness.conjecture_sweep(a.j, a.k_min, a.k_max, a.m_max, workers=a.threads, engine=engine)
    out = []
    for rep in reports:
        rec = rep.to_record()
        inputs = {"j": rec.pop("j"), "k": rec.pop("k"), "m_max": rec.pop("m_max")}
        out.append((inputs, rec))
    return out


# -- parser -----------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("output and resources")
    g.add_argument("--format", choices=("json", "csv"), default="json",
                   help="json: one object per line; csv: header row then one row per record")
    g.add_argument("--threads", type=int, default=harness.default_workers(),
                   help="worker cap for sweeps (default: available cores)")
    g.add_argument("--mem-cap", type=int, default=None, metavar="BYTES",
                   help="packed-buffer ceiling in bytes (8 letters per byte)")
    g.add_argument("--no-timing", action="store_true",
                   help="write elapsed_ms as 0 so repeated runs are byte-identical")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(
        prog="tm-antipowers",
        description="Anti-powers in j-fixes of the Thue-Morse word.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_, csv_cols):
        p = sub.add_parser(
            name, help=help_, parents=[common], description=help_,
            epilog=f"CSV columns: schema_version, command, {csv_cols}, elapsed_ms",
        )
        p.set_defaults(func=func)
        return p

    p = add("letter", _cmd_letter, "the letter t_i", "inputs.i, result.value")
    p.add_argument("--i", type=int, required=True)

    p = add("segment", _cmd_segment, "the segment t_alpha .. t_beta as a 0/1 string",
            "inputs.alpha, inputs.beta, result.value")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--beta", type=int, required=True)

    p = add("antipower", _cmd_antipower, "is the j-fix of length km a k-anti-power",
            "inputs.j, inputs.k, inputs.m, result.value")
    for flag in ("--j", "--k", "--m"):
        p.add_argument(flag, type=int, required=True)

    p = add("gamma", _cmd_gamma, "gamma_j(k), the least m in the anti-power set",
            "inputs.j, inputs.k, result.value")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--k", type=int, required=True)

    p = add("big-gamma", _cmd_big_gamma,
            "Gamma_j(k), the largest odd m <= 3k-4 outside the anti-power set (empty if none)",
            "inputs.j, inputs.k, result.value")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--k", type=int, required=True)

    p = add("frak-k", _cmd_frak_k, "K_j(m), the least k whose j-fix is not a k-anti-power",
            "inputs.j, inputs.m, inputs.cap, result.value")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cap", type=int, default=None, help="block scan cap (default: case bound plus slack)")

    p = add("bounds-verify", _cmd_bounds_verify, "check registry upper bounds on K_j(m)",
            "inputs.lemma_id, inputs.j, inputs.m, result.ell, result.hypothesis_met, result.bound, "
            "result.comparison, result.observed, result.holds, result.witness, result.note, result.status")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--m-min", type=int, default=None)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--lemma", action="append", choices=bounds.LEMMA_IDS,
                   help="lemma id, repeatable (default: all)")
    p.add_argument("--s-cap", type=int, default=bounds.DEFAULT_S_CAP)

    p = add("gen47", _cmd_gen47, "the two lower bounds on K_j at m = 3*2^(l-2)+1 and m' = 2^(l-1)+3",
            "inputs.j, inputs.ell, inputs.lemma_id, inputs.m, result.* as in bounds-verify")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--ell", type=int, required=True)

    p = add("gencor", _cmd_gencor, "k-1 >= 2^delta(m) for every odd m <= 3k-4 outside the anti-power set",
            "inputs.j, inputs.k, inputs.m, result.* as in bounds-verify")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--k", type=int, required=True)

    p = add("yvy", _cmd_yvy, "divisibility of |yv| by 2^delta(m) over equal factor pairs",
            "inputs.m, inputs.prefix_len, result.count, result.violations")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--prefix-len", type=int, default=4096)

    p = add("construct", _cmd_construct, "verify a six-condition construction tuple",
            "inputs.*, result.j, result.r, result.m, result.ell, result.h, result.p, result.q, "
            "result.conditions, result.first_failing, result.blocks_equal, result.frak_upper, result.ok")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--family", default=None, help="k_alpha, K_beta or kappa_rho")
    p.add_argument("--param", type=int, default=None)
    for flag in ("--r", "--m", "--ell", "--h", "--p", "--q"):
        p.add_argument(flag, type=int, default=None)

    p = add("family", _cmd_family, "probe a family's guaranteed Gamma lower bounds",
            "inputs.family, inputs.param, inputs.j, result.k_value, result.m_bound, "
            "result.observed_ok, result.ratio, result.ratio_decimal")
    p.add_argument("--family", required=True)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--param-min", type=int, required=True)
    p.add_argument("--param-max", type=int, required=True)

    p = add("ratio-sweep", _cmd_ratio_sweep, "gamma and Gamma ratios over a range of k",
            "inputs.j, inputs.k, result.gamma, result.gamma_ratio, result.gamma_ratio_decimal, "
            "result.big_gamma, result.big_gamma_ratio, result.big_gamma_ratio_decimal")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)

    p = add("conjecture-scan", _cmd_conjecture_scan,
            "m <= m_max where exactly one of m, 2m is in the anti-power set",
            "inputs.j, inputs.k, inputs.m_max, result.count, result.violations")
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--m-max", type=int, default=harness.DEFAULT_M_MAX)

    return parser


def run(argv: Optional[list[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:
        # --help
        return exc.code if isinstance(exc.code, int) else EXIT_DOMAIN

    try:
        if args.threads < 1:
            raise DomainError(f"--threads must be >= 1, got {args.threads}")
        if args.mem_cap is not None:
            if args.mem_cap < 1:
                raise DomainError(f"--mem-cap must be positive, got {args.mem_cap}")
            buffer = TmBuffer(8 * args.mem_cap)
        else:
            buffer = TmBuffer()
        engine = AntiPowerEngine(buffer)
        t0 = time.perf_counter()
        pairs = args.func(args, engine)
        elapsed = 0 if args.no_timing else int(round(1000 * (time.perf_counter() - t0)))
    except DomainError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DOMAIN
    except (ResourceError, MemoryError) as exc:
        print(f"resource error: {exc or 'out of memory'}", file=stderr)
        return EXIT_RESOURCE
    except (InternalInconsistencyError, TmError) as exc:
        print(f"internal error: {exc}", file=stderr)
        return EXIT_INTERNAL

    records = [make_record(args.command, inputs, result, elapsed) for inputs, result in pairs]
    write_records(records, args.format, stdout)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
