"""Command-line interface: ``hquery <command> ...``.

Exit status is 0 on success, 1 when an input violates an operation's
precondition (a DomainError) and 2 for malformed input.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import List, Optional

from . import analysis, boolfun, circuit, fragment as fragment_mod, lattice, pdb, transform
from .boolfun import BoolFun, euler, format_function, parse_function, show_valuation
from .errors import DomainError, HQueryError, InputError


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from None


def _load_function(path: str) -> BoolFun:
    text = _read(path)
    try:
        return parse_function(text)
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def _load_db(path: str, k: Optional[int] = None) -> pdb.TidDatabase:
    text = _read(path)
    try:
        return pdb.parse_db(text, k)
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def _q(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _emit(out, text: str, path: Optional[str]):
    if path:
        _write(path, text)
    else:
        out.write(text)


# -- commands -------------------------------------------------------------------------

def cmd_analyze(args, out):
    phi = _load_function(args.function)
    deps = boolfun.dependencies(phi)
    mono = boolfun.is_monotone(phi)
    lines = [
        f"k {phi.k}",
        f"models {phi.sat_count()}",
        f"euler {euler(phi)}",
        f"monotone {'yes' if mono else 'no'}",
        f"degenerate {'yes' if len(deps) < phi.nvars else 'no'}",
        "dependencies " + (" ".join(map(str, sorted(deps))) or "."),
    ]
    L = None
    if mono:
        dnf = boolfun.minimized_dnf(phi)
        cnf = boolfun.minimized_cnf(phi)
        lines.append("dnf " + (" | ".join(show_valuation(boolfun.valuation(c)) for c in dnf) or "none"))
        lines.append("cnf " + (" & ".join(show_valuation(boolfun.valuation(c)) for c in cnf) or "none"))
        if dnf and cnf and len(deps) < phi.nvars:
            # reported for degenerate inputs without claiming they agree
            lines.append(f"mu-cnf {lattice.mobius_hat(lattice.clause_lattice(cnf))}")
            lines.append(f"mu-dnf {lattice.mobius_hat(lattice.clause_lattice(dnf))}")
    if mono and len(deps) == phi.nvars:
        L = lattice.cnf_lattice(phi)
        Ld = lattice.dnf_lattice(phi)
        big = lattice.verify_big_coeff(phi)
        lines.append(f"mu-cnf {big.mu_cnf}")
        lines.append(f"mu-dnf {big.mu_dnf}")
        lines.append(f"big-coefficient {'ok' if big.ok else 'MISMATCH'}")
        lines.append(f"safety {lattice.safety_by_mobius(phi)}")
        for x in L.elements:
            lines.append(f"mu-cnf-node {show_valuation(x)} {L.mu[x]}")
        for x in Ld.elements:
            lines.append(f"mu-dnf-node {show_valuation(x)} {Ld.mu[x]}")
        names = ("P", "P-cnf", "P-dnf")
        for name, poly in zip(names, lattice.characteristic_polynomials(phi)):
            lines.append(f"{name} " + " ".join(str(Fraction(c)) for c in poly.coefficients))
    v = analysis.classify(phi)
    lines.append(f"verdict {v.kind}")
    lines.append(f"reason {v.reason}")
    text = "\n".join(lines) + "\n"
    if args.dot:
        text += transform.ColoredGraph(phi).to_dot()
        if L is not None:
            text += L.to_dot("cnf_lattice")
    out.write(text)
    return 0


def cmd_fragment(args, out):
    phi = _load_function(args.function)
    frag = fragment_mod.fragment(phi)
    _emit(out, fragment_mod.format_fragmentation(frag), args.output)
    return 0


def cmd_reduce(args, out):
    phi = _load_function(args.function)
    _emit(out, transform.format_trace(transform.reduce_to_bot(phi)), args.output)
    return 0


def cmd_witness(args, out):
    a = _load_function(args.source)
    b = _load_function(args.target)
    _emit(out, transform.format_trace(transform.equivalence_witness(a, b)), args.output)
    return 0


def cmd_verify_trace(args, out):
    start = _load_function(args.start)
    text = _read(args.trace)
    try:
        trace = transform.parse_trace(text, start)
    except InputError as e:
        raise InputError(f"{args.trace}: {e}") from None
    end = _load_function(args.to) if args.to else BoolFun.bottom(start.k)
    res = transform.verify_trace(trace, end)
    if res:
        out.write(f"ok {len(trace)} steps\n")
        return 0
    out.write(f"invalid at step {res.failed_at}: {res.reason}\n")
    return 1


def cmd_compile(args, out):
    phi = _load_function(args.function)
    D = _load_db(args.database, phi.k)
    C = circuit.compile_query(phi, D)
    ok, how = circuit.verify(C)
    text = circuit.export_circuit(C)
    if args.output:
        _write(args.output, text)
        out.write(f"gates {len(C)}\nchecks {'ok ' + how if ok else 'FAILED: ' + how}\n")
    else:
        out.write(text)
    return 0 if ok else 1


def cmd_prob(args, out):
    text = _read(args.circuit)
    try:
        C = circuit.import_circuit(text)
    except InputError as e:
        raise InputError(f"{args.circuit}: {e}") from None
    D = _load_db(args.database)
    out.write(_q(circuit.probability(C, D, unchecked=args.unchecked)) + "\n")
    return 0


def cmd_oracle(args, out):
    phi = _load_function(args.function)
    D = _load_db(args.database, phi.k)
    out.write(_q(pdb.oracle_pqe(phi, D, max_facts=args.max_facts)) + "\n")
    return 0


def cmd_classify(args, out):
    phi = _load_function(args.function)
    v = analysis.classify(phi)
    out.write(f"{v.kind}\neuler {v.euler}\nreason {v.reason}\n")
    return 0


def _conjecture_chunk(payload):
    k, tables = payload
    fs = [BoolFun(k, t) for t in tables]
    rep = analysis.conjecture_check(k, fs)
    return rep.checked, rep.both, rep.colored_only, rep.uncolored_only, [f.table for f in rep.counterexamples]


def cmd_conjecture(args, out):
    k = args.k
    fs = analysis.monotone_functions(k)
    tables = [f.table for f in fs]
    jobs = max(1, args.jobs)
    chunks = [(k, tables[i::jobs]) for i in range(jobs)]
    if jobs == 1:
        parts = [_conjecture_chunk(c) for c in chunks]
    else:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_conjecture_chunk, chunks))
    rep = analysis.ConjectureReport(k)
    for checked, both, c, u, bad in parts:
        rep.checked += checked
        rep.both += both
        rep.colored_only += c
        rep.uncolored_only += u
        rep.counterexamples.extend(BoolFun(k, t) for t in sorted(bad))
    out.write("\n".join(rep.lines()) + "\n")
    for f in rep.counterexamples:
        out.write("counterexample " + " ".join(show_valuation(v) for v in f.sat()) + "\n")
    out.write(f"result {'holds' if rep.holds else 'FAILS'}\n")
    return 0 if rep.holds else 1


def cmd_extrema(args, out):
    e = analysis.monotone_euler_extrema(args.k)
    out.write(f"k {args.k}\nmin {e.min}\nmax {e.max}\n")
    for t, v in sorted(e.candidates.items()):
        out.write(f"threshold {t} euler {v}\n")
    out.write(f"thresholds-agree {'yes' if e.candidates_agree() else 'no'}\n")
    return 0


def cmd_count(args, out):
    n = analysis.count_euler_zero(args.k)
    out.write(f"{n}\n")
    if args.check:
        if args.k <= 2:
            m = analysis.count_euler_zero_enumerated(args.k)
            out.write(f"enumerated {m}\n")
            return 0 if m == n else 1
        hits, samples = analysis.count_euler_zero_sampled(args.k)
        out.write(f"sampled {hits}/{samples} expected-fraction {_q(Fraction(n, 1 << (1 << (args.k + 1))))}\n")
    return 0


def cmd_selftest(args, out):
    from .selftest import run

    return 0 if run(out) else 1


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hquery", description="Euler characteristic tools for H-queries.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", help="euler, lattices, Moebius values and verdict")
    s.add_argument("function")
    s.add_argument("--dot", action="store_true", help="append DOT for the hypercube and lattice")
    s.set_defaults(run=cmd_analyze)

    s = sub.add_parser("fragment", help="deterministic template over degenerate leaves")
    s.add_argument("function")
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_fragment)

    s = sub.add_parser("reduce", help="trace from the function to false")
    s.add_argument("function")
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_reduce)

    s = sub.add_parser("witness", help="trace between two functions of equal euler")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_witness)

    s = sub.add_parser("verify-trace", help="replay a trace")
    s.add_argument("start")
    s.add_argument("trace")
    s.add_argument("--to", help="expected end function (default: false)")
    s.set_defaults(run=cmd_verify_trace)

    s = sub.add_parser("compile", help="compile Q_phi on a database to a d-D circuit")
    s.add_argument("function")
    s.add_argument("database")
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_compile)

    s = sub.add_parser("prob", help="probability of a circuit on a database")
    s.add_argument("circuit")
    s.add_argument("database")
    s.add_argument("--unchecked", action="store_true", help="skip the validity checks")
    s.set_defaults(run=cmd_prob)

    s = sub.add_parser("oracle", help="brute-force probability over all worlds")
    s.add_argument("function")
    s.add_argument("database")
    s.add_argument("--max-facts", type=int, default=pdb.ORACLE_MAX_FACTS)
    s.set_defaults(run=cmd_oracle)

    s = sub.add_parser("classify", help="hardness verdict")
    s.add_argument("function")
    s.set_defaults(run=cmd_classify)

    s = sub.add_parser("conjecture", help="perfect-matching sweep over monotone euler-zero functions")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(run=cmd_conjecture)

    s = sub.add_parser("extrema", help="min/max euler over monotone functions")
    s.add_argument("--k", type=int, required=True)
    s.set_defaults(run=cmd_extrema)

    s = sub.add_parser("count-euler-zero", help="number of functions with euler 0")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--check", action="store_true", help="compare with enumeration or sampling")
    s.set_defaults(run=cmd_count)

    s = sub.add_parser("selftest", help="run the built-in exhaustive checks")
    s.set_defaults(run=cmd_selftest)
    return p


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, out)
    except DomainError as e:
        err.write(f"error: {e}\n")
        return 1
    except (InputError, ValueError) as e:
        err.write(f"input error: {e}\n")
        return 2
    except HQueryError as e:  # pragma: no cover - every error is one of the above
        err.write(f"error: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
