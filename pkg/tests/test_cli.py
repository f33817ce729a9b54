import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import conftest
from mpcalc.cli import evaluate, parse, parse_poly, run_command
from mpcalc.coeff import Poly
from mpcalc.errors import ExprSyntaxError, GradeError, UnknownCoordinate
from mpcalc.exterior import Form, Multivector
from mpcalc.multiphase import volume_family
from mpcalc.render import from_record, to_record, to_text

CTX = ("--n", "2", "--fiber", "1")


def run(*argv):
    return run_command(list(argv))


# parser ---------------------------------------------------------------------------------

def test_parse_examples(ctx21):
    cs = ctx21.cs
    assert parse("p * dx1 ^ dx2", ctx21) == Form.basis(cs, [cs.x(1), cs.x(2)]) * Poly.var(cs, cs.w)
    assert parse("i(Dx1; vol())", ctx21) == volume_family(cs, (1,))
    with pytest.raises(GradeError):
        parse("dx1 ^ Dq1", ctx21)


def test_parse_structures_and_calls(ctx21):
    cs = ctx21.cs
    assert parse("-d(theta)", ctx21) == ctx21.omega
    assert parse("i(Sigma; omega)", ctx21) == -ctx21.theta
    assert parse("L(Sigma; theta)", ctx21) == ctx21.theta
    assert parse("sch(Dx1; x1*Dq1)", ctx21) == Multivector.basis(cs, [cs.q(1)])
    assert parse("L(Dx1; x1*Dq1)", ctx21) == Multivector.basis(cs, [cs.q(1)])
    assert parse("vol(1, 2)", ctx21) == Form.scalar(Poly.const(cs, 1))
    assert parse("3", ctx21, scalar="multivector") == Multivector.scalar(Poly.const(cs, 3))
    assert parse_poly("(x1 + q1)**2 / 2", cs) == (Poly.var(cs, cs.x(1)) + Poly.var(cs, cs.q(1))) ** 2 * (1 / Poly.const(cs, 2).constant_term())
    assert isinstance(evaluate("x1", ctx21), Poly)


@pytest.mark.parametrize(
    "src, pos",
    [("dx1 +", 5), ("x1 $ q1", 3), ("(x1", 3), ("foo", 0), ("x1 / x2", 3), ("i(Dx1, dx1)", 5)],
)
def test_syntax_errors_carry_positions(ctx21, src, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse(src, ctx21)
    assert info.value.pos == pos


@pytest.mark.parametrize("src", ["x3", "dq2", "Dp1_3", "vol(3)"])
def test_unknown_coordinates(ctx21, src):
    with pytest.raises(UnknownCoordinate):
        parse(src, ctx21)


@pytest.mark.parametrize("src", ["dx1 + Dx1", "dx1 * dx2", "dx1 + dx1^dx2", "dx1 + 1", "d(Dx1)", "i(dx1; dx1)", "dx1**2"])
def test_grade_errors(ctx21, src):
    with pytest.raises(GradeError):
        parse(src, ctx21)


@settings(max_examples=60, deadline=None)
@given(st.one_of(conftest.forms(), conftest.multivectors()))
def test_print_parse_identity(obj):
    ctx = conftest.CS21
    text = to_text(obj)
    scalar = "multivector" if isinstance(obj, Multivector) else "form"
    back = parse(text, ctx, scalar=scalar)
    if obj:
        assert back == obj
        assert to_text(back) == text
    else:
        assert not back


@settings(max_examples=60, deadline=None)
@given(st.one_of(conftest.forms(), conftest.multivectors()))
def test_json_roundtrip(obj):
    rec = json.loads(json.dumps(to_record(obj)))
    assert from_record(rec, conftest.CS21) == obj


# commands ------------------------------------------------------------------------------

def test_classify_command():
    status, out, _ = run("classify", *CTX, "Dx1")
    assert status == 0
    assert out == "exact Hamiltonian; potential = w*dx2 + p1_2*dq1"
    assert run("classify", *CTX, "Sigma")[1] == "not Hamiltonian"
    status, out, _ = run("classify", *CTX, "--format", "json", "Dp1_1")
    assert status == 0 and json.loads(out)["kind"] == "locally"


def test_verify_command():
    status, out, _ = run("verify", *CTX, "--suite", "lie-identities", "--trials", "50", "--seed", "7")
    assert status == 0
    assert out == "lie-identities (n=2, N=1): 50/50 pass"


def test_bracket_of_base_forms_is_zero():
    assert run("bracket", *CTX, "x1*dq1", "q1*dx2") == (0, "0", "")


def test_bracket_command():
    status, out, _ = run("bracket", *CTX, "i(x2*Dx1 + p1_2*Dp1_1; theta)", "i(Dx2; theta)")
    assert status == 0
    assert out == "w*dx2 + p1_2*dq1"
    status, out, err = run("bracket", *CTX, "i(Dx2; theta)", "i(Dx2; theta)", "--witness-f", "Dx1")
    assert status == 1 and "WitnessMismatch" in err


def test_decompose_commands():
    status, out, _ = run("decompose", *CTX, "--kind", "canonical", "w*dx2 + p1_2*dq1 + x1*dq1")
    assert status == 0
    assert out.splitlines() == ["f0 = x1*dq1", "F = Dx1", "f_1 = w*dx2 + p1_2*dq1", "fc = 0"]
    status, out, _ = run("decompose", *CTX, "--kind", "std", "Dx1^Dx2 + Dq1^Dw")
    assert status == 0
    assert out.splitlines() == ["r = 2", "x[1,2] = 1", "xi = Dq1^Dw"]
    status, out, _ = run("decompose", *CTX, "--kind", "scaling", "x1*dq1 + w*p1_1*dx2")
    assert out.splitlines() == ["0: x1*dq1", "2: p1_1*w*dx2"]


def test_normal_form_and_lift():
    status, out, _ = run("normal-form", *CTX, "theta")
    assert out.splitlines() == ["r = 0", "plain[] = w", "q[1; 1] = p1_1", "q[1; 2] = p1_2"]
    status, out, err = run("normal-form", *CTX, "dp1_1^dp1_2")
    assert status == 1 and "NotKernelVanishing" in err
    assert run("lift", *CTX, "x2*Dx1") == (0, "x2*Dx1 + p1_2*Dp1_1", "")


def test_render_formats(tmp_path):
    assert run("render", *CTX, "p * dx1 ^ dx2") == (0, "w*dx1^dx2", "")
    assert run("render", *CTX, "--format", "latex", "i(Dx1; vol())")[1] == "d^{2}x_{1}"
    status, out, _ = run("render", *CTX, "--format", "json", "x1*dq1 + 1/2*w*dx2")
    path = tmp_path / "f.json"
    path.write_text(out)
    assert run("render", *CTX, f"@{path}") == (0, "1/2*w*dx2 + x1*dq1", "")
    assert run("render", *CTX, out)[1] == "1/2*w*dx2 + x1*dq1"


def test_errors_exit_nonzero():
    status, out, err = run("render", *CTX, "dx1 ^ Dq1")
    assert status == 1 and out == "" and err.startswith("error: GradeError")
    status, _, err = run("render", *CTX, "dx1 +")
    assert status == 1 and "position 5" in err
    status, _, err = run("render", *CTX, "@/nonexistent/file.json")
    assert status == 1 and "FileNotFoundError" in err


def test_seed_determinism(monkeypatch):
    a = run("verify", *CTX, "--suite", "canonical", "--trials", "5", "--seed", "11")
    b = run("verify", *CTX, "--suite", "canonical", "--trials", "5", "--seed", "11")
    assert a == b and a[0] == 0
    monkeypatch.setenv("MPC_SEED", "11")
    assert run("verify", *CTX, "--suite", "canonical", "--trials", "5") == a


def test_console_entry_point_is_byte_identical():
    argv = [sys.executable, "-m", "mpcalc", "decompose", *CTX, "--kind", "canonical", "--format", "json", "x1*dq1 + i(Dx1; theta)"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and json.loads(first)["fc"]["terms"] == []
