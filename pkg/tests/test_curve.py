from fractions import Fraction

import pytest
from flint import fmpq
from hypothesis import given, strategies as st

from c3recursion.curve import MirrorCurveC3, default_order, euler_operator
from c3recursion.errors import DomainError, GenericityError
from c3recursion.exactmath import Framing, RatFunc

F = RatFunc.variable()


def frac(x):
    return Fraction(int(x.p), int(x.q))


def poly_mul(a, b, n):
    out = [Fraction(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def branch_oracle(f, n):
    """Coefficients of f log(1 + u/f) + log(1 - u) up to u^(n-1)."""
    return [Fraction(0)] + [(-1) ** (m + 1) * f ** (1 - m) / m - Fraction(1, m) for m in range(1, n)]


def compose_oracle(outer, inner, n):
    out = [Fraction(0)] * n
    power = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for c in outer:
        out = [o + c * p for o, p in zip(out, power)]
        power = poly_mul(power, inner, n)
    return out


def deck_oracle(f, n):
    """Solve G(s) = G(u), s = -u + ..., one coefficient at a time."""
    G = branch_oracle(f, n + 1)
    s = [Fraction(0), Fraction(-1)] + [Fraction(0)] * (n - 1)
    for k in range(2, n):
        # with s_k unknown, [u^(k+1)] G(s) is linear in s_k with slope -2 c2
        trial = compose_oracle(G, s, k + 2)
        residual = trial[k + 1] - G[k + 1]
        s[k] = residual / (2 * G[2])
    return s[:n]


@pytest.mark.parametrize("f", [1, 2, 3, 5, Fraction(-1, 2), Fraction(2, 7)])
def test_deck_matches_order_by_order_solution(f):
    c = MirrorCurveC3(Framing.fixed(fmpq(f.numerator, f.denominator) if isinstance(f, Fraction) else f), 12)
    oracle = deck_oracle(Fraction(f), 10)
    assert [frac(c.deck.coefficient(k)) for k in range(10)] == oracle


@pytest.mark.parametrize("framing", [Framing.fixed(1), Framing.fixed(2), Framing.fixed(fmpq(-1, 2)), Framing.symbolic()])
def test_deck_involution_and_invariance(framing):
    c = MirrorCurveC3(framing, 14)
    s = c.deck
    assert s.coefficient(1) == -1
    ss = s.compose(s)
    assert ss.trunc_order >= 10
    assert ss.agrees_with(c.u)
    diff = c.branch_potential.compose(s) - c.branch_potential
    assert diff.is_zero() and diff.trunc_order >= 12


def test_branch_potential_quadratic_coefficient():
    c = MirrorCurveC3(Framing.symbolic(), 10)
    assert c.branch_potential.valuation == 2
    assert c.branch_potential.coefficient(2) == -(F + 1) / (2 * F)


def test_deck_second_coefficient_symbolic():
    c = MirrorCurveC3(Framing.symbolic(), 10)
    assert c.deck.coefficient(2) == 2 * (1 - F) / (3 * F)


def test_omega_and_primitive_valuations():
    c = MirrorCurveC3(Framing.fixed(2), 12)
    assert c.omega.valuation == 2
    assert c.primitive.valuation == 3
    assert c.primitive.differentiate().agrees_with(c.omega)


def test_phi_polynomials():
    c = MirrorCurveC3(Framing.symbolic(), 10)
    assert c.phi_polynomial(0) == (-1 / (F + 1), 1 / (F + 1))
    # x d/dx = t (t - 1)(f t + 1)/(f + 1) d/dt applied to (t - 1)/(f + 1)
    expected = (0 * F, -1 / (F + 1) ** 2, (1 - F) / (F + 1) ** 2, F / (F + 1) ** 2)
    assert c.phi_polynomial(1) == expected
    with pytest.raises(DomainError):
        c.phi_polynomial(-1)


@pytest.mark.parametrize("b", range(0, 6))
def test_zeta_pole_order(b):
    c = MirrorCurveC3(Framing.symbolic(), 10)
    z = c.zeta(b)
    assert z.valuation == -2 * b - 2
    assert len(c.phi_polynomial(b)) == 2 * b + 2
    assert z.residue() == 0


def test_zeta_zero_density():
    c = MirrorCurveC3(Framing.symbolic(), 10)
    assert c.zeta(0).terms() == {-2: -1 / (F + 1)}


@pytest.mark.parametrize("framing", [Framing.fixed(1), Framing.fixed(fmpq(-1, 2)), Framing.symbolic()])
def test_residue_pairings(framing):
    c = MirrorCurveC3(framing, 20)
    f = c.f
    values = [c.residue_pairing(b) for b in range(9)]
    assert values[0] == 0
    assert values[1] == 1 / (f * (f + 1))
    assert all(v == 0 for v in values[2:])


def test_euler_operator_matches_phi_recursion():
    fr = Framing.fixed(3)
    c = MirrorCurveC3(fr, 10)
    D = euler_operator(fr)
    assert D(c.phi_polynomial(2)) == c.phi_polynomial(3)


def test_order_floor_and_default():
    with pytest.raises(DomainError):
        MirrorCurveC3(Framing.fixed(1), 4)
    assert default_order(2, 1) == 20
    assert default_order(0, 3, margin=0) >= 8


def test_nongeneric_framing_rejected():
    with pytest.raises(GenericityError):
        Framing.fixed(-1)


@given(st.fractions(min_value=-6, max_value=6, max_denominator=6).filter(lambda x: x not in (0, -1)))
def test_deck_invariance_random_framings(f):
    c = MirrorCurveC3(Framing.fixed(fmpq(f.numerator, f.denominator)), 9)
    assert (c.branch_potential.compose(c.deck) - c.branch_potential).is_zero()
    assert c.deck.compose(c.deck).agrees_with(c.u)
