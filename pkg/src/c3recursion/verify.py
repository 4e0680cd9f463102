"""Identity checks over the engine's exact outputs.

Each ``check_*`` function returns a :class:`VerificationReport`.  A failing
check never raises; it is recorded with a witness string that is enough to
reproduce the disagreement.  Precondition violations (``g_max < 2``, a
non-generic framing) do raise.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from flint import fmpq, fmpq_poly

from .curve import DEFAULT_MARGIN, MirrorCurveC3, default_order, tpoly_derivative, tpoly_mul, tpoly_scale
from .errors import DomainError
from .exactmath import Framing, RatFunc, faber_pandharipande, format_scalar
from .recursion import curve_at, decompose_in_zeta_basis, solve_correlator, solve_free_energy

SUITES = ("fp", "framing", "lemma", "appendix-a", "appendix-b", "all")
DEFAULT_FRAMINGS = (fmpq(1), fmpq(2), fmpq(3), fmpq(5), fmpq(-1, 2))


@dataclass
class CheckResult:
    id: str
    anchor: str
    passed: bool
    witness: str | None = None
    value: str | None = None

    def to_json(self) -> dict:
        out = {"id": self.id, "anchor": self.anchor, "status": "pass" if self.passed else "fail"}
        if self.value is not None:
            out["value"] = self.value
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class VerificationReport:
    suite: str
    framing: str
    order: int | None = None
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def add(self, id: str, anchor: str, ok: bool, witness: str | None = None, value: str | None = None):
        self.checks.append(CheckResult(id, anchor, bool(ok), None if ok else witness, value))

    def extend(self, other: "VerificationReport"):
        self.checks.extend(other.checks)
        if other.order is not None:
            self.order = max(self.order or 0, other.order)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "framing": self.framing,
            "order": self.order,
            "checks": [c.to_json() for c in self.checks],
            "status": self.status,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def render_table(self) -> str:
        rows = [("check", "status", "detail")]
        for c in self.checks:
            detail = c.witness if not c.passed else (c.value or "")
            rows.append((c.id, c.to_json()["status"], detail))
        width = [max(len(r[i]) for r in rows) for i in range(2)]
        lines = [f"{r[0]:<{width[0]}}  {r[1]:<{width[1]}}  {r[2]}".rstrip() for r in rows]
        lines.insert(1, "-" * max(len(line) for line in lines))
        lines.append(f"suite {self.suite} ({self.framing}): {self.status}")
        return "\n".join(lines)


def _as_framing(x) -> Framing:
    return x if isinstance(x, Framing) else Framing.fixed(x)


def _scalar_str(x) -> str:
    return format_scalar(x) if isinstance(x, (fmpq, RatFunc)) else str(x)


# ---------------------------------------------------------------------------


def check_faber_pandharipande(g_max: int, framing: Framing, margin: int = DEFAULT_MARGIN,
                              stability: bool = True, g_min: int = 2) -> VerificationReport:
    """F_g from the recursion against the closed Bernoulli formula, 2 <= g <= g_max."""
    if g_max < 2:
        raise DomainError(f"g_max must be at least 2, got {g_max}")
    report = VerificationReport("fp", framing.label)
    for g in range(max(2, g_min), g_max + 1):
        expected = faber_pandharipande(g)
        value, used = solve_free_energy(framing, g, margin=margin)
        report.order = max(report.order or 0, used)
        ok = value.is_framing_independent and value.rational_value() == expected
        report.add(f"fp.g{g}", "constant-map free energy equals Bernoulli closed form", ok,
                   f"F_{g} = {_scalar_str(value.value)}, expected {format_scalar(expected)}",
                   _scalar_str(value.value))
        if stability:
            again = solve_free_energy(framing, g, order=used + 2)[0]
            report.add(f"fp.g{g}.stable", "value unchanged at series order + 2", again.value == value.value,
                       f"F_{g} at order {used + 2} = {_scalar_str(again.value)}")
    return report


def check_framing_independence(g: int, framings: Iterable = DEFAULT_FRAMINGS,
                               margin: int = DEFAULT_MARGIN) -> VerificationReport:
    """F_g agrees across every fixed framing; a symbolic entry must be a constant."""
    framings = [_as_framing(f) for f in framings]
    fixed = [f for f in framings if not f.is_symbolic]
    report = VerificationReport("framing", ",".join(f.label for f in framings))
    if fixed:
        values = {f.label: solve_free_energy(f, g, margin=margin)[0].value for f in fixed}
        distinct = set(values.values())
        report.add(f"framing.g{g}.fixed", "free energy identical across fixed framings", len(distinct) == 1,
                   "; ".join(f"f={k}: {format_scalar(v)}" for k, v in values.items()),
                   format_scalar(next(iter(distinct))) if len(distinct) == 1 else None)
    if any(f.is_symbolic for f in framings):
        value = solve_free_energy(Framing.symbolic(), g, margin=margin)[0]
        report.add(f"framing.g{g}.symbolic", "free energy is a constant function of f",
                   value.is_framing_independent, f"F_{g}(f) = {_scalar_str(value.value)}",
                   _scalar_str(value.value))
    return report


def check_tau1_route(g: int, framing: Framing = None, margin: int = DEFAULT_MARGIN) -> VerificationReport:
    """F_g through the one-point Hodge coefficient, plus the dilaton relation.

    (a) Res phi_{-1} zeta_{b-1} is 1/(f(f+1)) for b = 1 and 0 otherwise, b <= 3g - 1;
    (b) F_g = <tau_1 Gamma_g>/((2 - 2g) f (f + 1)), and also as the full pairing sum;
    (c) <tau_1 Gamma_g> = -(2g - 2) f (f + 1) F_g.
    """
    if g < 2:
        raise DomainError(f"the free-energy route needs g >= 2, got {g}")
    framing = Framing.symbolic() if framing is None else framing
    report = VerificationReport("lemma", framing.label)
    tensor, used = solve_correlator(framing, g, 1, margin=margin)
    report.order = used
    c = curve_at(framing, used)
    f = c.f
    ff = f * (f + 1)
    pairings = [c.residue_pairing(b) for b in range(3 * g)]
    expected = [0 * ff if b != 1 else 1 / ff for b in range(3 * g)]
    bad = [b for b in range(3 * g) if pairings[b] != expected[b]]
    report.add(f"tau1-route.g{g}.pairing", "residue pairings vanish except at b = 1", not bad,
               "; ".join(f"b={b}: {_scalar_str(pairings[b])}" for b in bad))

    table = decompose_in_zeta_basis(c, tensor)
    fg = solve_free_energy(framing, g, order=used)[0].value
    tau1 = table[(1,)]
    via_tau1 = tau1 / (ff * (2 - 2 * g))
    report.add(f"tau1-route.g{g}.route", "free energy from the tau_1 coefficient", via_tau1 == fg,
               f"residue route {_scalar_str(fg)}, tau_1 route {_scalar_str(via_tau1)}", _scalar_str(via_tau1))
    full = 0 * ff
    for (b,), coeff in table.entries.items():
        full = full + coeff * c.residue_pairing(b)
    full = full / (2 - 2 * g)
    report.add(f"tau1-route.g{g}.pairing-sum", "free energy from the full pairing sum", full == fg,
               f"pairing sum {_scalar_str(full)}, residue {_scalar_str(fg)}")
    dilaton = -(2 * g - 2) * ff * fg
    report.add(f"tau1-route.g{g}.dilaton", "tau_1 coefficient equals -(2g-2) f (f+1) F_g", dilaton == tau1,
               f"<tau_1 Gamma_{g}> = {_scalar_str(tau1)}, -(2g-2)f(f+1)F_g = {_scalar_str(dilaton)}",
               _scalar_str(tau1))
    return report


def check_xi_basis(c: MirrorCurveC3, b_max: int) -> VerificationReport:
    """D^b t = (-1)^b (f + 1) phi_b(t) with D = -(t (f t + 1)(t - 1)/(f + 1)) d/dt.

    This is the square-root-free form of the statement that derivatives of the
    first xi-basis function reproduce the phi_b polynomials.
    """
    if b_max < 1:
        raise DomainError(f"b_max must be at least 1, got {b_max}")
    fr = c.framing
    f, one = c.f, fr.one()
    zero = fr.zero()
    # -(t (f t + 1)(t - 1))/(f + 1), built from its three linear factors
    prefactor = tpoly_scale(tpoly_mul(tpoly_mul((zero, one), (one, f)), (-one, one)), -one / (f + 1))
    report = VerificationReport("appendix-a", fr.label, c.order)
    xi = (zero, one)
    base = tuple(a * (f + 1) for a in c.phi_polynomial(0))
    base = (base[0] + 1,) + base[1:]
    report.add("xi-basis.b0", "t equals (f+1) phi_0 + 1", _trim(base) == _trim(xi),
               f"(f+1)phi_0 + 1 = {_tpoly_str(base)}")
    for b in range(1, b_max + 1):
        xi = tpoly_mul(prefactor, tpoly_derivative(xi))
        sign = 1 if b % 2 == 0 else -1
        target = tuple(a * (f + 1) * sign for a in c.phi_polynomial(b))
        ok = _trim(xi) == _trim(target)
        report.add(f"xi-basis.b{b}", "D^b t equals (-1)^b (f+1) phi_b", ok,
                   f"D^{b} t = {_tpoly_str(xi)}, (-1)^b(f+1)phi_b = {_tpoly_str(target)}")
    return report


def _trim(p) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _tpoly_str(p) -> str:
    return "[" + ", ".join(_scalar_str(a) for a in p) + "]"


def _half_framing_curve_identity() -> tuple[bool, str]:
    """At f = -1/2: x^2 = y^(2f) (1 - y)^2 equals (1 - y)^2 / y in Q(t)."""
    f = fmpq(-1, 2)
    t = fmpq_poly([0, 1])
    # y = (1/t + f)/(f + 1) = (1 + f t) / ((f + 1) t)
    y_num, y_den = 1 + f * t, (f + 1) * t
    one_minus_y_num = y_den - y_num
    two_f = 2 * f
    if two_f.q != 1:
        return False, "2f is not an integer"
    e = int(two_f.p)
    # y^(2f) (1 - y)^2 with a negative integer exponent
    if e >= 0:
        lhs_num, lhs_den = y_num ** e * one_minus_y_num ** 2, y_den ** e * y_den ** 2
    else:
        lhs_num, lhs_den = y_den ** (-e) * one_minus_y_num ** 2, y_num ** (-e) * y_den ** 2
    # (1 - y)^2 / y
    rhs_num, rhs_den = one_minus_y_num ** 2 * y_den, y_den ** 2 * y_num
    ok = lhs_num * rhs_den == rhs_num * lhs_den
    return ok, f"x^2 = ({lhs_num})/({lhs_den}), (1-y)^2/y = ({rhs_num})/({rhs_den})"


def _half_framing_series_identity(order: int) -> tuple[bool, str]:
    """2 G(u) = log((x^2)(u) / (x^2)(0)) with x^2 = (1 - y)^2 / y, as series in u."""
    fr = Framing.fixed(fmpq(-1, 2))
    c = MirrorCurveC3(fr, order)
    y = c.y
    one_minus_y = 1 - y
    x2 = one_minus_y * one_minus_y * y.inverse()
    x2_0 = x2.coefficient(0)
    log_ratio = (x2 / x2_0 - 1).log1p()
    two_g = c.branch_potential * 2
    ok = log_ratio.agrees_with(two_g)
    return ok, f"log ratio {log_ratio!r} vs 2G {two_g!r}"


def check_half_framing(order: int | None = None, margin: int = DEFAULT_MARGIN) -> VerificationReport:
    """The matrix-model curve x^2 = (1-y)^2/y is the mirror curve at f = -1/2,
    and the recursion there returns the Faber-Pandharipande F_2, F_3."""
    fr = Framing.fixed(fmpq(-1, 2))
    report = VerificationReport("appendix-b", fr.label, order)
    ok, witness = _half_framing_curve_identity()
    report.add("half-framing.curve", "x^2 = (1-y)^2/y at f = -1/2 in Q(t)", ok, witness)
    ok, witness = _half_framing_series_identity(order or default_order(2, 1, margin))
    report.add("half-framing.potential", "twice the branch potential is log of x^2", ok, witness)
    for g in (2, 3):
        value, used = solve_free_energy(fr, g, order=order if g == 2 else None, margin=margin)
        report.order = max(report.order or 0, used)
        expected = faber_pandharipande(g)
        report.add(f"half-framing.g{g}", "free energy at f = -1/2 equals Bernoulli closed form",
                   value.value == expected, f"F_{g} = {_scalar_str(value.value)}, expected {format_scalar(expected)}",
                   _scalar_str(value.value))
    return report


def run_suite(suite: str, framing: Framing, g_max: int, margin: int = DEFAULT_MARGIN) -> VerificationReport:
    """Run a named suite; "all" concatenates every suite."""
    if suite not in SUITES:
        raise DomainError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    report = VerificationReport(suite, framing.label)
    wanted = SUITES[:-1] if suite == "all" else (suite,)
    if "fp" in wanted:
        report.extend(check_faber_pandharipande(g_max, framing, margin))
    if "framing" in wanted:
        for g in (2, 3):
            frs = list(DEFAULT_FRAMINGS) + ([Framing.symbolic()] if framing.is_symbolic else [])
            report.extend(check_framing_independence(g, frs, margin))
    if "lemma" in wanted:
        for g in range(2, max(2, g_max) + 1):
            report.extend(check_tau1_route(g, framing, margin))
    if "appendix-a" in wanted:
        report.extend(check_xi_basis(curve_at(framing, default_order(1, 1, margin)), 6))
    if "appendix-b" in wanted:
        report.extend(check_half_framing(margin=margin))
    return report
