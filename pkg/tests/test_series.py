from fractions import Fraction

import pytest
from flint import fmpq
from hypothesis import given, strategies as st

from c3recursion.errors import (
    CompositionError,
    DomainError,
    LogarithmicTermError,
    PrecisionError,
    ReversionError,
    SingularSeriesError,
)
from c3recursion.series import TruncatedSeries, series_compose, series_reversion

S = TruncatedSeries
small_q = st.fractions(min_value=-4, max_value=4, max_denominator=5).map(lambda x: fmpq(x.numerator, x.denominator))
nonzero_q = small_q.filter(lambda x: x != 0)


@st.composite
def series(draw, min_exp=st.integers(-3, 3), extra=st.integers(0, 4)):
    v = draw(min_exp)
    coeffs = [draw(nonzero_q)] + draw(st.lists(small_q, max_size=5))
    trunc = v + len(coeffs) + draw(extra)
    return S(v, coeffs, trunc)


@st.composite
def unit_leading(draw, valuation):
    """Series of exact valuation ``valuation`` with 1..6 known relative terms."""
    lead = draw(nonzero_q)
    rest = draw(st.lists(small_q, min_size=0, max_size=6))
    return S(valuation, [lead] + rest, valuation + 1 + len(rest) + draw(st.integers(0, 2)))


def naive_mul(a, b):
    """Coefficient oracle with Fraction arithmetic; trunc per the valuation rule."""
    trunc = min(a.trunc_order + (b.valuation if b.valuation is not None else b.trunc_order),
                b.trunc_order + (a.valuation if a.valuation is not None else a.trunc_order))
    out = {}
    for i, x in a.terms().items():
        for j, y in b.terms().items():
            if i + j < trunc:
                out[i + j] = out.get(i + j, Fraction(0)) + Fraction(int(x.p), int(x.q)) * Fraction(int(y.p), int(y.q))
    return {k: v for k, v in out.items() if v}, trunc


# -- worked examples ---------------------------------------------------------

def test_reversion_of_u_plus_u2():
    r = S(1, [1, 1], 5).reversion()
    assert r.terms() == {1: 1, 2: -1, 3: 2, 4: -5}
    assert r.trunc_order == 5


def test_inverse_of_two_plus_u():
    r = S(0, [2, 1], 3).inverse()
    assert r.terms() == {0: fmpq(1, 2), 1: fmpq(-1, 4), 2: fmpq(1, 8)}


def test_laurent_compose():
    r = S(-1, [1], 5).compose(S(1, [1, 1], 5))
    assert r.terms() == {-1: 1, 0: -1, 1: 1, 2: -1}


def test_geometric_compose():
    geo = S(0, [1] * 6, 6)
    r = geo.compose(S(2, [1], 10))
    assert r.agrees_with(S(0, [1, 0, 1, 0, 1], 5))


def test_log1p_against_exp():
    a = S(1, [1, 1], 8)
    assert a.log1p().exp().agrees_with(S(0, [1, 1, 1], 8))
    assert a.log1p().coefficient(2) == fmpq(1, 2)


def test_pow1p_half_squares_back():
    a = S(1, [1, 3, -2], 9)
    r = a.pow1p(fmpq(1, 2))
    assert (r * r).agrees_with(a + 1)


def test_precision_error_beyond_window():
    s = S(0, [1, 2], 4)
    assert s.coefficient(3) == 0
    with pytest.raises(PrecisionError):
        s.coefficient(4)


def test_zero_series_convention():
    z = S(0, [0, 0], 5)
    assert z.is_zero() and z.valuation is None and z.min_exp == 5


def test_error_types():
    with pytest.raises(SingularSeriesError):
        S.zero(4).inverse()
    with pytest.raises(CompositionError):
        S(1, [1], 4).compose(S(0, [1, 1], 4))
    with pytest.raises(ReversionError):
        S(2, [1], 5).reversion()
    with pytest.raises(LogarithmicTermError):
        S(-1, [1], 4).antiderivative()
    with pytest.raises(DomainError):
        S(0, [1, 1], 4).log1p()


def test_truncation_bookkeeping():
    a = S(-2, [1, 1], 3)
    b = S(1, [1, 5], 4)
    assert (a * b).trunc_order == min(3 + 1, 4 - 2)
    assert a.differentiate().trunc_order == 2
    assert b.antiderivative().trunc_order == 5


def test_module_functions():
    a = S(1, [1, 1], 6)
    assert series_compose(a, series_reversion(a)).agrees_with(S(1, [1], 6))


# -- properties --------------------------------------------------------------

@given(series(), series())
def test_mul_matches_naive_convolution(a, b):
    got = a * b
    terms, trunc = naive_mul(a, b)
    assert got.trunc_order == trunc
    assert {k: Fraction(int(v.p), int(v.q)) for k, v in got.terms().items()} == terms


@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert (a * b).agrees_with(b * a)
    assert ((a + b) * c).agrees_with(a * c + b * c)
    assert ((a * b) * c).agrees_with(a * (b * c))


@given(series())
def test_inverse_round_trip(a):
    prod = a * a.inverse()
    assert prod.agrees_with(S(0, [1], prod.trunc_order))
    assert prod.trunc_order >= 1


@given(unit_leading(1))
def test_reversion_round_trips(a):
    r = a.reversion()
    u = S(1, [1], a.trunc_order)
    left = a.compose(r)
    right = r.compose(a)
    assert left.trunc_order >= 2 and right.trunc_order >= 2
    assert left.agrees_with(u)
    assert right.agrees_with(u)


@given(series(min_exp=st.integers(-2, 4)), unit_leading(1))
def test_composition_is_a_ring_map(a, inner):
    sq = (a * a).compose(inner)
    assert sq.agrees_with(a.compose(inner) * a.compose(inner))


@given(series(min_exp=st.integers(-3, 3)))
def test_exact_differentials_have_no_residue(a):
    d = a.differentiate()
    if d.trunc_order > -1:
        assert d.residue() == 0


@given(series(min_exp=st.integers(-4, 4)))
def test_antiderivative_inverts_derivative(a):
    d = a.differentiate()
    if d.trunc_order <= -1:
        return
    back = d.antiderivative()
    diff = back - a
    # only the constant term may differ
    assert all(k == 0 for k in diff.terms())


@given(unit_leading(1))
def test_exp_log_round_trip(a):
    assert a.log1p().exp().agrees_with(a + 1)
    assert (a.exp() - 1).log1p().agrees_with(a)
