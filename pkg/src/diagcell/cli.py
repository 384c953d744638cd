"""Command-line entry point: ``diagcell {dim,verify,gram,cover,tor,sweep,dump}``.

Exit codes: 0 success, 1 verification failure, 2 resource cap, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field as dc_field
from typing import Callable

from .algebra import (
    FAMILIES,
    ResourceCapError,
    StructureAlgebra,
    build_algebra,
    dump_algebra,
    load_algebra,
    mutate_entry,
)
from .cellular import CellDatum, gram_table, verify_diagram_like, verify_naive_cellular
from .diagrams import family_datum
from .idempotents import tl_cover
from .linalg import field_from_name
from .tor import STRATEGIES, compare_reports, cyclic_group_oracle, tor_dims

EXIT_OK, EXIT_FAIL, EXIT_CAP, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Report:
    """One structured run report; ``fields`` holds command-specific keys."""

    family: str
    n: int
    ring: str
    delta: str | None
    command: str
    result: str
    certificates: list = dc_field(default_factory=list)
    fields: dict = dc_field(default_factory=dict)
    csv: str | None = None
    status: int = EXIT_OK

    def as_dict(self) -> dict:
        out = {
            "family": self.family,
            "n": self.n,
            "ring": self.ring,
            "delta": self.delta,
            "command": self.command,
            "result": self.result,
            "certificates": self.certificates,
        }
        out.update(self.fields)
        return out

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.as_dict(), sort_keys=True)
        if fmt == "csv":
            if self.csv is None:
                raise UsageError(f"command {self.command!r} has no CSV output")
            return self.csv.rstrip("\n")
        lines = []
        for key, value in self.as_dict().items():
            if isinstance(value, (list, dict)):
                value = json.dumps(value, sort_keys=True)
            lines.append(f"{key}: {value}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# configuration


def _load_or_build(args) -> StructureAlgebra:
    if getattr(args, "load", None):
        with open(args.load, encoding="utf-8") as fh:
            return load_algebra(fh.read())
    if args.family is None or args.n is None:
        raise UsageError("--family and --n are required unless --load is given")
    if args.n < 0:
        raise UsageError("--n must be non-negative")
    try:
        field = field_from_name(args.ring)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        delta = field.parse(str(args.delta))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad delta {args.delta!r}: {exc}") from exc
    return build_algebra(args.family, args.n, delta, field, max_dim=args.max_dim)


def _base(A: StructureAlgebra, command: str, result: str = "ok", **fields) -> Report:
    f = A.field
    delta = None if A.delta is None or A.family == "group_cyclic" else f.render(A.delta)
    return Report(A.family, A.n, f.descriptor, delta, command, result, fields=fields)


# ---------------------------------------------------------------------------
# commands


def cmd_dim(A: StructureAlgebra, args) -> Report:
    if A.family == "group_cyclic":
        return _base(A, "dim", dim=A.dim, cross_check=A.n, levels={})
    levels, groups, states = family_datum(A.family, A.n)
    per = {str(t): {"states": len(states[t]), "group": len(groups[t])} for t in levels}
    total = sum(len(states[t]) ** 2 * len(groups[t]) for t in levels if t not in A.dropped)
    rep = _base(A, "dim", dim=A.dim, cross_check=total, levels=per)
    if total != A.dim:
        rep.result, rep.status = "mismatch", EXIT_FAIL
    return rep


def cmd_verify(A: StructureAlgebra, args) -> Report:
    if not A.is_diagram:
        return _base(A, "verify", result="skipped", notice="no cellular datum for this family")
    datum = CellDatum.from_algebra(A)
    reports = [verify_naive_cellular(A, datum), verify_diagram_like(A, datum)]
    rep = _base(A, "verify", checks={r.name: r.passed for r in reports})
    for r in reports:
        rep.certificates.extend([r.name] + [str(x) for x in c] for c in r.certificates)
    if not all(r.passed for r in reports):
        rep.result, rep.status = "fail", EXIT_FAIL
    return rep


def cmd_gram(A: StructureAlgebra, args) -> Report:
    if not A.is_diagram:
        raise UsageError("Gram tables need a diagram family")
    if args.lam is None:
        raise UsageError("gram needs --lambda")
    datum = CellDatum.from_algebra(A)
    table = gram_table(A, datum, args.lam)
    values = [
        {"q": str(q), "p": str(p), "tau": list(t), "value": A.field.render(table.values[(q, p, t)])}
        for q in table.rows
        for p, t in table.cols
    ]
    rep = _base(A, "gram", **{"lambda": args.lam, "entries": values})
    rep.csv = table.to_csv()
    return rep


def cmd_cover(A: StructureAlgebra, args) -> Report:
    if A.family != "tl":
        raise UsageError("cover is defined for --family tl only")
    c = tl_cover(A)
    rep = _base(A, "cover", height=c.height, width=c.width, status=c.as_dict()["status"])
    rep.certificates = [[" ".join(map(str, S)), note] for S, note in sorted(c.notes.items())]
    return rep


def cmd_tor(A: StructureAlgebra, args) -> Report:
    r = tor_dims(A, qmax=args.qmax, strategy=args.strategy, seed=args.seed, prune=args.prune, cap=args.cap)
    rep = _base(
        A,
        "tor",
        dims=r.dims,
        qmax=r.qmax,
        partial=r.partial,
        generators=r.generators,
        strategy=r.strategy,
        algebra=r.algebra,
    )
    if r.partial:
        rep.result, rep.status = "partial", EXIT_CAP
        rep.certificates.append(["cap", r.note])
    if args.compare_oracle is not None:
        oracle = cyclic_group_oracle(args.compare_oracle, A.field, args.qmax)
        same = compare_reports(r, oracle, len(r.dims) - 1)
        rep.fields["oracle_dims"] = oracle.dims
        rep.fields["agrees"] = same
        if not same:
            rep.result, rep.status = "fail", EXIT_FAIL
    return rep


COMMANDS: dict[str, Callable] = {
    "dim": cmd_dim,
    "verify": cmd_verify,
    "gram": cmd_gram,
    "cover": cmd_cover,
    "tor": cmd_tor,
}


# ---------------------------------------------------------------------------
# parser


def _add_config(p: argparse.ArgumentParser, load: bool = True):
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--ring", default="2", help='prime modulus or "Q"')
    p.add_argument("--delta", default="0", help="ring element literal, e.g. 2 or 3/7")
    p.add_argument("--max-dim", type=int, default=2000, dest="max_dim")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    if load:
        p.add_argument("--load", help="read an algebra dumped with the dump command")


def _add_command_flags(p: argparse.ArgumentParser):
    p.add_argument("--lambda", type=int, dest="lam")
    p.add_argument("--qmax", type=int, default=3)
    p.add_argument("--strategy", choices=STRATEGIES, default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prune", action="store_true")
    p.add_argument("--cap", type=int)
    p.add_argument("--compare-oracle", type=int, dest="compare_oracle", metavar="N")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="diagcell", description="Cellular structure and Tor of diagram algebras.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _add_config(p)
        _add_command_flags(p)
    p = sub.add_parser("sweep", help="run one command over lists of rings and deltas")
    _add_config(p, load=False)
    _add_command_flags(p)
    p.add_argument("--run", choices=sorted(COMMANDS), required=True)
    p.add_argument("--rings", default=None, help="comma separated, defaults to --ring")
    p.add_argument("--deltas", default=None, help="comma separated, defaults to --delta")
    p = sub.add_parser("dump", help="write the multiplication table as JSON")
    _add_config(p, load=False)
    p.add_argument("--mutate", nargs=3, type=int, metavar=("I", "J", "COEF"))
    return parser


def _emit(text: str, out: str | None, append: bool = False):
    if out:
        with open(out, "a" if append else "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _run_one(command: str, args) -> Report:
    A = _load_or_build(args)
    return COMMANDS[command](A, args)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "dump":
            A = _load_or_build(args)
            if args.mutate:
                i, j, c = args.mutate
                if not (0 <= i < A.dim and 0 <= j < A.dim):
                    raise UsageError(f"mutation indices out of range for dimension {A.dim}")
                A = mutate_entry(A, i, j, coef=c)
            _emit(dump_algebra(A), args.out)
            return EXIT_OK
        if args.command == "sweep":
            rings = (args.rings or args.ring).split(",")
            deltas = (args.deltas or args.delta).split(",")
            status = EXIT_OK
            chunks = []
            for ring in rings:
                for delta in deltas:
                    point = argparse.Namespace(**{**vars(args), "ring": ring.strip(), "delta": delta.strip()})
                    try:
                        rep = _run_one(args.run, point)
                    except ResourceCapError as exc:
                        rep = Report(args.family, args.n, ring, delta, args.run, "cap", [[str(exc)]], status=EXIT_CAP)
                    chunks.append(rep.render(args.format))
                    status = max(status, rep.status)
            sep = "\n" if args.format == "json" else "\n\n"
            _emit(sep.join(chunks), args.out)
            return status
        rep = _run_one(args.command, args)
        _emit(rep.render(args.format), args.out)
        return rep.status
    except UsageError as exc:
        sys.stderr.write(f"diagcell: {exc}\n")
        return EXIT_USAGE
    except ResourceCapError as exc:
        sys.stderr.write(f"diagcell: {exc}\n")
        return EXIT_CAP
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"diagcell: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
