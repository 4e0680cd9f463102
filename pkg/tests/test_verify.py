import json

import pytest
from flint import fmpq

from c3recursion import verify
from c3recursion.curve import MirrorCurveC3
from c3recursion.errors import DomainError, GenericityError
from c3recursion.exactmath import Framing
from c3recursion.recursion import FreeEnergy
from c3recursion.verify import (
    VerificationReport,
    check_xi_basis,
    check_half_framing,
    check_faber_pandharipande,
    check_framing_independence,
    check_tau1_route,
    run_suite,
)


def values(report):
    return [c.value for c in report.checks if c.value is not None]


def test_fp_report_values():
    r = check_faber_pandharipande(3, Framing.fixed(1))
    assert r.passed
    assert values(r) == ["1/5760", "-1/1451520"]
    assert any(c.id == "fp.g3.stable" for c in r.checks)


def test_fp_precondition():
    with pytest.raises(DomainError):
        check_faber_pandharipande(1, Framing.fixed(1))


def test_framing_independence_fixed_and_symbolic():
    r = check_framing_independence(2, [1, 2, 3, fmpq(-1, 2), Framing.symbolic()])
    assert r.passed
    assert values(r) == ["1/5760", "1/5760"]
    assert [c.id for c in r.checks] == ["framing.g2.fixed", "framing.g2.symbolic"]


def test_framing_independence_rejects_zero():
    with pytest.raises(GenericityError):
        check_framing_independence(2, [1, 0])


def test_failing_check_carries_witness(monkeypatch):
    def fake(framing, g, **kw):
        value = fmpq(1, 5760) if framing.value == 1 else fmpq(1, 5761)
        return FreeEnergy(g, framing, value), 20

    monkeypatch.setattr(verify, "solve_free_energy", fake)
    r = check_framing_independence(2, [1, 2])
    assert not r.passed
    (failure,) = r.failures()
    assert "f=1: 1/5760" in failure.witness and "f=2: 1/5761" in failure.witness
    data = r.to_json()
    assert data["status"] == "fail" and data["checks"][0]["witness"] == failure.witness


@pytest.mark.parametrize("g", [2, 3])
def test_tau1_route(g):
    r = check_tau1_route(g, Framing.symbolic())
    assert r.passed, r.render_table()
    ids = {c.id.split(".")[-1] for c in r.checks}
    assert ids == {"pairing", "route", "pairing-sum", "dilaton"}


def test_tau1_route_value():
    r = check_tau1_route(2, Framing.symbolic())
    dilaton = next(c for c in r.checks if c.id.endswith("dilaton"))
    assert dilaton.value == "(-f^2 - f)/2880"


def test_tau1_route_precondition():
    with pytest.raises(DomainError):
        check_tau1_route(1)


def test_xi_basis_symbolic():
    r = check_xi_basis(MirrorCurveC3(Framing.symbolic(), 10), 6)
    assert r.passed
    assert len(r.checks) == 7
    with pytest.raises(DomainError):
        check_xi_basis(MirrorCurveC3(Framing.symbolic(), 10), 0)


def test_half_framing_checks():
    r = check_half_framing()
    assert r.passed, r.render_table()
    assert values(r) == ["1/5760", "-1/1451520"]


def test_run_suite_and_rendering():
    r = run_suite("appendix-a", Framing.fixed(2), 2)
    assert r.passed
    table = r.render_table()
    assert "xi-basis.b6" in table and table.rstrip().endswith("pass")
    data = json.loads(r.dumps())
    assert set(data) == {"suite", "framing", "order", "checks", "status"}
    assert {"id", "anchor", "status"} <= set(data["checks"][0])
    with pytest.raises(DomainError):
        run_suite("bogus", Framing.fixed(1), 3)


def test_report_is_deterministic():
    a = run_suite("lemma", Framing.fixed(2), 3).to_json()
    b = run_suite("lemma", Framing.fixed(2), 3).to_json()
    assert a == b


def test_empty_report_passes():
    assert VerificationReport("x", "1").passed
