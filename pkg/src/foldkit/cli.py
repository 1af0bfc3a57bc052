"""Command-line entry point.

Every subcommand builds a flat list of ``key=value`` pairs. ``--records``
prints them sorted by key and ends with ``summary.verdict``; the default
human mode prints them in the order they were produced.

Exit codes: 0 holds, 1 refuted, 2 unknown or budget exceeded, 64 usage
error, 65 malformed or unsuitable input.
"""
from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import complexes, immersions, presentations, subgroups, suites
from .complexes import parse_complex
from .errors import (
    AlphabetError,
    BudgetExceeded,
    ConfigError,
    DegenerateInputError,
    NotApplicable,
    ParseError,
    PreconditionError,
)
from .homology import betti_inequality_report, homology
from .presentations import (
    AbelianCertificate,
    FreeCertificate,
    PermutationCertificate,
    ProductCertificate,
    parse_coxeter,
    parse_presentation,
)
from .results import Answer, Check, Outcome
from .words import format_word, parse_word

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_DATA = 65

ENV_DEFAULTS = {
    "cap": ("FOLDKIT_CAP", complexes.DEFAULT_CAP),
    "max_vertices": ("FOLDKIT_MAX_VERTICES", immersions.DEFAULT_MAX_VERTICES),
    "subset_cap": ("FOLDKIT_SUBSET_CAP", immersions.DEFAULT_SUBSET_CAP),
    "record_cap": ("FOLDKIT_RECORD_CAP", immersions.DEFAULT_RECORD_CAP),
    "budget": ("FOLDKIT_BUDGET", 10_000),
    "depth": ("FOLDKIT_DEPTH", 20),
    "workers": ("FOLDKIT_WORKERS", 1),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


class Report:
    def __init__(self) -> None:
        self.pairs: list[tuple[str, str]] = []
        self.verdict = "ok"
        self.code = EXIT_OK

    def add(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif value is None:
            value = "-"
        self.pairs.append((key, str(value)))

    def finish(self, verdict: str, code: int) -> Report:
        self.verdict, self.code = verdict, code
        return self

    def render(self, records: bool) -> str:
        if records:
            lines = [f"{k}={v}" for k, v in sorted(self.pairs)]
            lines.append(f"summary.verdict={self.verdict}")
        else:
            lines = [f"{k}: {v}" for k, v in self.pairs]
            lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines) + "\n"


def _default(name: str) -> int:
    var, fallback = ENV_DEFAULTS[name]
    raw = os.environ.get(var)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{var} must be an integer, got {raw!r}") from None


def _positive(args, *names: str) -> None:
    for name in names:
        value = getattr(args, name)
        if value is None:
            value = _default(name)
            setattr(args, name, value)
        if value <= 0:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")


def _read(path: str) -> str:
    p = Path(path)
    if not p.exists() and p.parts and p.parts[0] == "fixtures":
        packaged = resources.files("foldkit").joinpath("fixtures", *p.parts[1:])
        if packaged.is_file():
            return packaged.read_text()
    try:
        return p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _check_code(check: Check) -> tuple[str, int]:
    if check.outcome is Outcome.TRUE:
        return "holds", EXIT_OK
    if check.outcome is Outcome.FALSE:
        return "refuted", EXIT_REFUTED
    return "budget-exceeded", EXIT_UNKNOWN


def _answer_code(answer: Answer) -> tuple[str, int]:
    return {Answer.YES: ("yes", EXIT_OK), Answer.NO: ("no", EXIT_REFUTED), Answer.UNKNOWN: ("unknown", EXIT_UNKNOWN)}[answer]


# --- subgroups -----------------------------------------------------------------------------


def cmd_rank(args) -> Report:
    r = Report()
    u, _ = subgroups.load_subgroup(_read(args.subgroup))
    r.add("summary.rank", u.rank())
    r.add("summary.dbar", u.dbar())
    r.add("summary.index", u.index() if u.is_finite_index() else "infinite")
    for i, w in enumerate(u.basis()):
        r.add(f"basis.{i}", format_word(w, u.alphabet))
    return r


def cmd_member(args) -> Report:
    r = Report()
    u, _ = subgroups.load_subgroup(_read(args.subgroup))
    w = parse_word(args.word, u.alphabet)
    member = u.membership(w)
    r.add("summary.word", format_word(w, u.alphabet))
    r.add("summary.member", member)
    return r.finish("member" if member else "not-member", EXIT_OK if member else EXIT_REFUTED)


def cmd_intersect(args) -> Report:
    r = Report()
    u, _ = subgroups.load_subgroup(_read(args.u))
    w, _ = subgroups.load_subgroup(_read(args.w))
    i = subgroups.intersect(u, w)
    r.add("summary.rank", i.rank())
    for k, g in enumerate(i.basis()):
        r.add(f"basis.{k}", format_word(g, i.alphabet))
    return r


def cmd_hanna_neumann(args) -> Report:
    _positive(args, "budget")
    r = Report()
    u, _ = subgroups.load_subgroup(_read(args.u))
    w, w_gens = subgroups.load_subgroup(_read(args.w))
    rep = subgroups.hn_verdict(u, w, w_gens, args.budget)
    r.add("summary.sum", rep.sum)
    r.add("summary.bound", rep.bound)
    r.add("summary.containment", rep.containment.value)
    r.add("summary.rank", rep.rank)
    r.add("summary.flagged", rep.flagged)
    r.add("summary.holds", rep.holds)
    for k, b in enumerate(rep.ranks):
        r.add(f"component.{k:04d}.b1", b)
    return r.finish("holds" if rep.holds else "refuted", EXIT_OK if rep.holds else EXIT_REFUTED)


def cmd_shnc(args) -> Report:
    r = Report()
    u, _ = subgroups.load_subgroup(_read(args.u))
    w, _ = subgroups.load_subgroup(_read(args.w))
    rep = subgroups.shnc_check(u, w)
    r.add("summary.lhs", rep.lhs)
    r.add("summary.rhs", rep.rhs)
    r.add("summary.holds", rep.holds)
    return r.finish("holds" if rep.holds else "refuted", EXIT_OK if rep.holds else EXIT_REFUTED)


# --- complexes -----------------------------------------------------------------------------


def _describe_complex(r: Report, X) -> None:
    r.add("complex.V", X.graph.num_vertices)
    r.add("complex.E", X.graph.num_edges)
    r.add("complex.F", X.num_cells)


def cmd_check(args) -> Report:
    _positive(args, "cap")
    r = Report()
    X = parse_complex(_read(args.file))
    _describe_complex(r, X)
    r.add("summary.property", args.property)
    if args.property == "staggered":
        try:
            st = complexes.find_staggering(X, args.cap)
        except BudgetExceeded as exc:
            r.add("summary.explored", exc.count)
            return r.finish("budget-exceeded", EXIT_UNKNOWN)
        if st is None:
            return r.finish("refuted", EXIT_REFUTED)
        r.add("staggering.cells", " ".join(X.cell_name(c) for c in st.cell_order))
        r.add("staggering.edges", " ".join(X.graph.edge_name(e) for e in st.edge_order))
        return r.finish("holds", EXIT_OK)
    if args.property == "proper-powers":
        answer, cell = complexes.has_proper_powers(X, args.cap)
        if cell is not None:
            r.add("summary.cell", X.cell_name(cell))
        return r.finish(*_answer_code(answer))
    predicate = {
        "reducible": complexes.is_reducible,
        "collapsible": complexes.is_collapsible,
        "bireducible": complexes.is_bireducible,
    }[args.property]
    check = predicate(X, args.cap)
    r.add("summary.explored", check.explored)
    if check.witness is not None:
        r.add("summary.witness", " ".join(X.cell_name(c) for c in check.witness))
    return r.finish(*_check_code(check))


def cmd_magnus(args) -> Report:
    _positive(args, "cap")
    r = Report()
    X = parse_complex(_read(args.file))
    names = [X.graph.edge_name(k) for k in range(X.graph.num_edges)]
    edges = []
    for tok in args.subgraph.replace(",", " ").split():
        if tok not in names:
            raise UsageError(f"unknown edge {tok!r}")
        edges.append(names.index(tok))
    small = complexes.is_small(X, edges, cap=args.cap)
    r.add("summary.small", small.outcome.value)
    if small.outcome is not Outcome.TRUE:
        if small.witness is not None:
            r.add("summary.witness", " ".join(X.cell_name(c) for c in small.witness))
        return r.finish(*_check_code(small))
    basis = complexes.magnus_subgroup(X, edges, cap=args.cap)
    r.add("summary.rank", basis.rank)
    r.add("summary.base_vertex", X.graph.vertex_name(basis.base_vertex))
    for i, loop in enumerate(basis.loops):
        if basis.words is not None and X.alphabet is not None:
            r.add(f"basis.{i}", format_word(basis.words[i], X.alphabet))
        else:
            r.add(f"basis.{i}", " ".join(names[h >> 1] + ("^-1" if h & 1 else "") for h in loop))
    return r.finish("holds", EXIT_OK)


def cmd_homology(args) -> Report:
    r = Report()
    X = parse_complex(_read(args.file))
    h = homology(X)
    r.add("summary.b0", h.b0)
    r.add("summary.b1", h.b1)
    r.add("summary.b2", h.b2)
    r.add("summary.torsion", ",".join(map(str, h.torsion)) or "-")
    r.add("summary.chi", h.euler_char)
    r.add("summary.euler_poincare", h.euler_poincare_ok)
    r.add("summary.betti_inequality", betti_inequality_report(X).satisfies)
    return r.finish("ok" if h.euler_poincare_ok else "refuted", EXIT_OK if h.euler_poincare_ok else EXIT_REFUTED)


# --- immersions ----------------------------------------------------------------------------


def cmd_scan(args) -> Report:
    _positive(args, "max_vertices", "subset_cap", "record_cap")
    r = Report()
    X = parse_complex(_read(args.file))
    scan = {"npi-scan": immersions.npi_scan, "wnpi-scan": immersions.wnpi_scan, "ntpi-scan": immersions.ntpi_scan}
    report = scan[args.command](X, args.max_vertices, args.subset_cap, args.record_cap)
    r.add("summary.kind", report.kind)
    r.add("summary.immersions", report.immersions)
    r.add("summary.records", len(report.records))
    r.add("summary.violations", len(report.violations))
    r.add("summary.potential_violations", len(report.potential_violations))
    r.add("summary.bound_reached", report.bound_reached)
    shown = report.records if args.all else report.violations + report.potential_violations
    for i, rec in enumerate(shown):
        for key, value in rec.fields().items():
            r.add(f"record.{i:06d}.{key}", value)
    code = {"clean": EXIT_OK, "violation": EXIT_REFUTED, "inconclusive": EXIT_UNKNOWN}[report.status]
    return r.finish(report.status, code)


def cmd_pullback_check(args) -> Report:
    _positive(args, "max_vertices", "cap")
    r = Report()
    X = parse_complex(_read(args.file))
    check = immersions.bireducible_pullback_check(X, args.max_vertices, args.cap)
    r.add("summary.checked", check.explored)
    if check.witness is not None:
        r.add("summary.witness_immersion", check.witness[0])
    return r.finish(*_check_code(check))


# --- presentations -------------------------------------------------------------------------


def cmd_hierarchy(args) -> Report:
    if args.depth is None:
        args.depth = _default("depth")
    if args.depth < 0:
        raise UsageError("--depth must be non-negative")
    r = Report()
    p = parse_presentation(_read(args.file))
    h = presentations.hierarchy(p, args.depth)
    for i, step in enumerate(h.steps):
        key = f"step.{i:03d}"
        r.add(f"{key}.stable_letter", step.stable_letter)
        if step.substitution is not None:
            s = step.substitution
            r.add(f"{key}.substitution", f"{s.old} -> {s.new}^{s.beta}; {s.partner} -> {s.partner} {s.new}^{-s.alpha}")
        r.add(f"{key}.child", format_word(step.child.relators[0], step.child.alphabet))
        r.add(f"{key}.generators", " ".join(step.child.alphabet.names))
        r.add(f"{key}.valid", step.is_valid())
    r.add("summary.steps", len(h.steps))
    r.add("summary.complete", h.complete)
    r.add("summary.terminal", format_word(h.terminal.relators[0], h.terminal.alphabet))
    return r.finish("complete" if h.complete else "depth-reached", EXIT_OK if h.complete else EXIT_UNKNOWN)


def _certificate(r: Report, cert, alphabet) -> None:
    if isinstance(cert, ProductCertificate):
        r.add("certificate.kind", "product")
        for i, (conj, idx, sign) in enumerate(cert.factors):
            r.add(f"certificate.factor.{i:04d}", f"{format_word(conj, alphabet) or '1'} r{idx}^{sign}")
    elif isinstance(cert, AbelianCertificate):
        r.add("certificate.kind", "abelian")
        r.add("certificate.vector", ",".join(map(str, cert.vector)))
        r.add("certificate.modulus", cert.modulus)
    elif isinstance(cert, PermutationCertificate):
        r.add("certificate.kind", "permutation")
        for i, img in enumerate(cert.images):
            r.add(f"certificate.image.{alphabet.names[i]}", ",".join(map(str, img)))
    elif isinstance(cert, FreeCertificate):
        r.add("certificate.kind", "free")


def cmd_nc_member(args) -> Report:
    _positive(args, "budget")
    r = Report()
    p = parse_presentation(_read(args.file))
    w = parse_word(args.word, p.alphabet)
    res = presentations.normal_closure_membership(p.alphabet, p.relators, w, args.budget)
    r.add("summary.explored", res.explored)
    if res.certificate is not None:
        _certificate(r, res.certificate, p.alphabet)
    return r.finish(*_answer_code(res.answer))


def cmd_coxeter(args) -> Report:
    _positive(args, "cap")
    r = Report()
    d = parse_coxeter(_read(args.file))
    check, value = presentations.coxeter_coherence_predicate(d, args.cap)
    r.add("summary.chibar", presentations.coxeter_chibar(d))
    r.add("summary.explored", check.explored)
    if check.witness is not None:
        r.add("summary.witness", " ".join(d.names[i] for i in check.witness))
        r.add("summary.witness_value", value)
    return r.finish(*_check_code(check))


# --- suites --------------------------------------------------------------------------------


def cmd_suite(args) -> Report:
    _positive(args, "workers")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    r = Report()
    names = args.suite or None
    known = {s.name for s in suites.SUITES}
    for n in names or ():
        if n not in known:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(sorted(known))}")
    reports = suites.run_suites(args.seed, args.workers, names)
    failed = 0
    for rep in reports:
        head, *replays = list(rep.lines(args.seed))
        for part in head.split()[1:]:
            k, v = part.split("=", 1)
            r.add(f"suite.{rep.name}.{k}", v)
        for i, (idx, _) in enumerate(rep.failures):
            r.add(f"suite.{rep.name}.replay.{idx:06d}", replays[i].split(" ", 1)[1])
        failed += len(rep.failures)
    r.add("summary.seed", args.seed)
    r.add("summary.failed", failed)
    return r.finish("pass" if not failed else "fail", EXIT_OK if not failed else EXIT_REFUTED)


# --- argument parsing ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="foldkit", description=__doc__.splitlines()[0])
    parser.add_argument("--records", action="store_true", help="machine-readable key=value output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.set_defaults(func=func)
        p.add_argument("--records", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        return p

    p = add("rank", cmd_rank, "rank, reduced rank and index of a subgroup")
    p.add_argument("subgroup")
    p = add("member", cmd_member, "membership of a word in a subgroup")
    p.add_argument("subgroup")
    p.add_argument("--word", required=True)
    p = add("intersect", cmd_intersect, "basis of the intersection of two subgroups")
    p.add_argument("u")
    p.add_argument("w")
    p = add("hanna-neumann", cmd_hanna_neumann, "double coset sum against d(U) or its reduced rank")
    p.add_argument("u")
    p.add_argument("w")
    p.add_argument("--budget", type=int)
    p = add("shnc", cmd_shnc, "strengthened inequality on reduced ranks")
    p.add_argument("u")
    p.add_argument("w")

    p = add("check", cmd_check, "decide a property of a two-complex")
    p.add_argument("property", choices=["staggered", "reducible", "collapsible", "bireducible", "proper-powers"])
    p.add_argument("file")
    p.add_argument("--cap", type=int)
    p = add("magnus", cmd_magnus, "free basis carried by a small subgraph")
    p.add_argument("file")
    p.add_argument("--subgraph", required=True, help="edge names separated by commas or spaces")
    p.add_argument("--cap", type=int)
    p = add("homology", cmd_homology, "integer homology and Euler characteristic")
    p.add_argument("file")

    for name in ("npi-scan", "wnpi-scan", "ntpi-scan"):
        p = add(name, cmd_scan, "scan immersed complexes up to a vertex bound")
        p.add_argument("file")
        p.add_argument("--max-vertices", type=int)
        p.add_argument("--subset-cap", type=int)
        p.add_argument("--record-cap", type=int)
        p.add_argument("--all", action="store_true", help="print every record, not only the flagged ones")
    p = add("pullback-check", cmd_pullback_check, "pullback cycle inequality over enumerated immersions")
    p.add_argument("file")
    p.add_argument("--max-vertices", type=int)
    p.add_argument("--cap", type=int)

    p = add("hierarchy", cmd_hierarchy, "iterate HNN splitting steps of a one-relator presentation")
    p.add_argument("file")
    p.add_argument("--depth", type=int)
    p = add("nc-member", cmd_nc_member, "normal closure membership with a certificate")
    p.add_argument("file")
    p.add_argument("--word", required=True)
    p.add_argument("--budget", type=int)
    p = add("coxeter", cmd_coxeter, "sign of the reduced Euler characteristic over full subgraphs")
    p.add_argument("file")
    p.add_argument("--cap", type=int)

    p = add("suite", cmd_suite, "seeded randomized invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--suite", action="append", help="run only this suite (repeatable)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"foldkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, AlphabetError, DegenerateInputError, PreconditionError, NotApplicable) as exc:
        print(f"foldkit: input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except BudgetExceeded as exc:
        print(f"foldkit: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN
    sys.stdout.write(report.render(args.records))
    return report.code


if __name__ == "__main__":
    sys.exit(main())
