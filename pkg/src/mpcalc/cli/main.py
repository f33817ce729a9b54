"""``mpcalc`` command line: batch evaluation over a fixed (n, N) coordinate system."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ..errors import MPCError
from ..exterior import Form, Multivector
from ..hamiltonian import canonical_lift, classify, standard_decomposition
from ..multiphase import canonical_structures, scaling_decompose
from ..poisson import canonical_decomposition, field_from_form, hamiltonian_witness, normal_form, poisson_bracket
from ..render import from_record, to_latex, to_record, to_text
from ..suites import SUITES, run_suite
from .parser import parse


def _load(source, ctx, scalar="form"):
    """Expression text, an inline JSON record, or ``@path`` holding either."""
    text = source
    if source.startswith("@"):
        text = Path(source[1:]).read_text()
    if text.lstrip().startswith("{"):
        obj = from_record(json.loads(text), ctx.cs)
    else:
        obj = parse(text, ctx, scalar=scalar)
    if scalar == "multivector" and isinstance(obj, Form) and obj.degree == 0:
        obj = Multivector.scalar(obj.scalar_part())
    return obj


def _expect(obj, cls, what):
    if not isinstance(obj, cls):
        raise MPCError(f"{what} expects a {cls.__name__.lower()}")
    return obj


def _dump(record):
    return json.dumps(record, indent=2, sort_keys=True)


def _render(obj, fmt):
    if fmt == "json":
        return _dump(to_record(obj))
    if fmt == "latex":
        return to_latex(obj)
    return to_text(obj)


def _families(lines, label, fam, with_i):
    for key, c in sorted(fam.items()):
        if with_i:
            i, mus = key
            lines.append(f"{label}[{i}; {','.join(map(str, mus))}] = {c}")
        else:
            lines.append(f"{label}[{','.join(map(str, key))}] = {c}")


# commands ------------------------------------------------------------------------------

def cmd_classify(args, ctx):
    X = _expect(_load(args.expr, ctx, "multivector"), Multivector, "classify")
    result = classify(ctx, X)
    if args.format == "json":
        return _dump(
            {"kind": result.kind, "potential": to_record(result.potential) if result.potential is not None else None}
        )
    if result.kind == "not-hamiltonian":
        return "not Hamiltonian"
    head = "exact Hamiltonian" if result.kind == "exact" else "locally Hamiltonian"
    if result.potential is None:
        return head
    return f"{head}; potential = {_render(result.potential, args.format)}"


def cmd_decompose(args, ctx):
    if args.kind == "std":
        X = _expect(_load(args.expr, ctx, "multivector"), Multivector, "standard decomposition")
        std = standard_decomposition(ctx, X)
        if args.format == "json":
            return _dump(std.to_record())
        lines = [f"r = {std.r}"]
        _families(lines, "x", std.coeff_x, False)
        _families(lines, "q", std.coeff_q, True)
        _families(lines, "p", std.coeff_p, True)
        _families(lines, "w", std.coeff_w, False)
        lines.append(f"xi = {to_text(std.xi) if std.xi is not None else '0'}")
        return "\n".join(lines)
    if args.kind == "scaling":
        obj = _load(args.expr, ctx)
        parts = scaling_decompose(obj)
        if args.format == "json":
            return _dump({str(s): to_record(p) for s, p in sorted(parts.items())})
        return "\n".join(f"{s}: {_render(p, args.format)}" for s, p in sorted(parts.items())) or "0"
    f = _expect(_load(args.expr, ctx), Form, "canonical decomposition")
    X = _load(args.witness, ctx, "multivector") if args.witness else field_from_form(ctx, f)
    cd = canonical_decomposition(ctx, f, X)
    if args.format == "json":
        return _dump(cd.to_record())
    lines = [f"f0 = {_render(cd.f0, args.format)}", f"F = {_render(cd.F, args.format)}"]
    lines += [f"f_{s} = {_render(p, args.format)}" for s, p in sorted(cd.parts.items())]
    lines.append(f"fc = {_render(cd.fc, args.format)}")
    return "\n".join(lines)


def cmd_bracket(args, ctx):
    f = _expect(_load(args.f, ctx), Form, "bracket")
    g = _expect(_load(args.g, ctx), Form, "bracket")
    Xf = _load(args.witness_f, ctx, "multivector") if args.witness_f else hamiltonian_witness(ctx, f)
    Xg = _load(args.witness_g, ctx, "multivector") if args.witness_g else hamiltonian_witness(ctx, g)
    return _render(poisson_bracket(ctx, f, Xf, g, Xg), args.format)


def cmd_normal_form(args, ctx):
    f = _expect(_load(args.expr, ctx), Form, "normal-form")
    nf = normal_form(ctx, f)
    if args.format == "json":
        return _dump(nf.to_record())
    lines = [f"r = {nf.r}"]
    _families(lines, "plain", nf.c_plain, False)
    _families(lines, "q", nf.c_q, True)
    _families(lines, "p", nf.c_p, True)
    _families(lines, "mixed", nf.c_mixed, False)
    return "\n".join(lines)


def cmd_lift(args, ctx):
    XE = _expect(_load(args.expr, ctx, "multivector"), Multivector, "lift")
    return _render(canonical_lift(ctx, XE), args.format)


def cmd_render(args, ctx):
    return _render(_load(args.expr, ctx), args.format)


def cmd_verify(args, ctx):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = [run_suite(name, ctx.n, ctx.N, args.trials, args.seed) for name in names]
    text = "\n".join(r.summary() for r in results)
    if not all(r.ok for r in results):
        raise SuiteFailure(text)
    return text


class SuiteFailure(Exception):
    pass


# argument parsing --------------------------------------------------------------------------

def _default_seed():
    raw = os.environ.get("MPC_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return raw


def build_parser():
    parser = argparse.ArgumentParser(prog="mpcalc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, formats=("text", "latex", "json")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n", type=int, required=True, help="space-time dimension")
        p.add_argument("--fiber", type=int, required=True, help="number of fields N")
        if formats:
            p.add_argument("--format", choices=formats, default="text")
        p.set_defaults(func=func)
        return p

    p = command("classify", cmd_classify, "classify a multivector field")
    p.add_argument("expr")

    p = command("decompose", cmd_decompose, "standard, scaling or canonical decomposition")
    p.add_argument("expr")
    p.add_argument("--kind", choices=("std", "scaling", "canonical"), default="std")
    p.add_argument("--witness", help="Hamiltonian field for --kind canonical (default: recovered from the form)")

    p = command("bracket", cmd_bracket, "Poisson bracket of two Poisson forms")
    p.add_argument("f")
    p.add_argument("g")
    p.add_argument("--witness-f")
    p.add_argument("--witness-g")

    p = command("normal-form", cmd_normal_form, "coefficient families of a kernel-vanishing form", ("text", "json"))
    p.add_argument("expr")

    p = command("lift", cmd_lift, "canonical lift of a vector field on E")
    p.add_argument("expr")

    p = command("render", cmd_render, "print an expression as text, LaTeX or JSON")
    p.add_argument("expr")

    p = command("verify", cmd_verify, "run randomized invariant suites", formats=())
    p.add_argument("--suite", choices=("all", *SUITES), default="all")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", default=_default_seed(), help="defaults to $MPC_SEED or 0")
    return parser


def run_command(argv):
    """Run one invocation; returns (exit status, stdout text, stderr text)."""
    args = build_parser().parse_args(argv)
    try:
        ctx = canonical_structures(args.n, args.fiber)
        return 0, args.func(args, ctx), ""
    except SuiteFailure as exc:
        return 1, str(exc), ""
    except (MPCError, OSError, json.JSONDecodeError, KeyError) as exc:
        return 1, "", f"error: {type(exc).__name__}: {exc}"


def main(argv=None):
    status, out, err = run_command(sys.argv[1:] if argv is None else argv)
    if out:
        print(out)
    if err:
        print(err, file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
