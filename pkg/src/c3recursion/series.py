"""Truncated Laurent series in one variable ``u`` with exact coefficients.

A series is stored as ``(min_exp, coeffs, trunc_order)`` and stands for

    sum_{k = min_exp}^{trunc_order - 1} coeffs[k - min_exp] u^k  +  O(u^trunc_order).

Every operation returns the tightest truncation order its inputs justify and
never more, so a coefficient that cannot be known raises
:class:`~c3recursion.errors.PrecisionError` instead of coming out wrong.
The zero series ``O(u^N)`` is stored with ``min_exp == trunc_order == N``.

Coefficients may be ``flint.fmpq`` or :class:`~c3recursion.exactmath.RatFunc`.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from flint import fmpq, fmpq_poly

from .errors import (
    CompositionError,
    DomainError,
    LogarithmicTermError,
    PrecisionError,
    ReversionError,
    SingularSeriesError,
)
from .exactmath import RatFunc, format_scalar

_Q0 = fmpq(0)


def _all_rational(coeffs) -> bool:
    return all(type(c) is fmpq or type(c) is int for c in coeffs)


def _convolve(a: Sequence, b: Sequence, length: int) -> list:
    """First ``length`` coefficients of the product of two coefficient lists."""
    a = a[:length]
    b = b[:length]
    if not a or not b:
        return [_Q0] * length
    if _all_rational(a) and _all_rational(b):
        p = fmpq_poly(list(a)) * fmpq_poly(list(b))
        out = p.coeffs()[:length]
        out = [fmpq(c) for c in out]
        return out + [_Q0] * (length - len(out))
    return _convolve_ratfunc(a, b, length)


def _common_denominator(coeffs) -> tuple[list, fmpq_poly]:
    """Numerator polynomials over one shared denominator."""
    den = fmpq_poly([1])
    for c in coeffs:
        if isinstance(c, RatFunc) and c.den.degree() > 0 and den % c.den != 0:
            den = den * c.den // den.gcd(c.den)
    nums = []
    for c in coeffs:
        if isinstance(c, RatFunc):
            nums.append(c.num * (den // c.den) if c.den.degree() > 0 else c.num * den / c.den[0])
        else:
            nums.append(den * c)
    return nums, den


def _convolve_ratfunc(a: Sequence, b: Sequence, length: int) -> list:
    # Numerators over shared denominators: the inner loop is plain polynomial
    # arithmetic and each output coefficient is reduced by a gcd only once.
    na, da = _common_denominator(a)
    nb, db = _common_denominator(b)
    zero = fmpq_poly([])
    acc = [zero] * length
    for i, x in enumerate(na):
        if x == 0:
            continue
        for j, y in enumerate(nb[: length - i]):
            if y != 0:
                acc[i + j] = acc[i + j] + x * y
    den = da * db
    return [RatFunc(p, den) if p != 0 else RatFunc.constant(0) for p in acc]


class TruncatedSeries:
    """Immutable truncated Laurent series."""

    __slots__ = ("min_exp", "coeffs", "trunc_order")

    def __init__(self, min_exp: int, coeffs: Iterable, trunc_order: int):
        coeffs = [fmpq(c) if type(c) is int else c for c in coeffs]
        if len(coeffs) > trunc_order - min_exp:
            coeffs = coeffs[: max(trunc_order - min_exp, 0)]
        start = 0
        while start < len(coeffs) and coeffs[start] == 0:
            start += 1
        end = len(coeffs)
        while end > start and coeffs[end - 1] == 0:
            end -= 1
        if start == end:
            self.min_exp = trunc_order
            self.coeffs = ()
        else:
            self.min_exp = min_exp + start
            self.coeffs = tuple(coeffs[start:end])
        self.trunc_order = trunc_order
        if self.min_exp > trunc_order:
            raise ValueError("min_exp beyond truncation order")

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, trunc_order: int) -> "TruncatedSeries":
        return cls(trunc_order, (), trunc_order)

    @classmethod
    def monomial(cls, exponent: int, coeff, trunc_order: int) -> "TruncatedSeries":
        return cls(exponent, [coeff], trunc_order)

    @classmethod
    def from_dict(cls, terms: dict, trunc_order: int) -> "TruncatedSeries":
        terms = {k: c for k, c in terms.items() if k < trunc_order}
        if not terms:
            return cls.zero(trunc_order)
        lo = min(terms)
        return cls(lo, [terms.get(k, _Q0) for k in range(lo, max(terms) + 1)], trunc_order)

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> int | None:
        """Exponent of the first non-zero coefficient (``None`` for ``O(u^N)``)."""
        return None if not self.coeffs else self.min_exp

    def coefficient(self, k: int):
        if k >= self.trunc_order:
            raise PrecisionError(f"coefficient of u^{k} requested from a series known to O(u^{self.trunc_order})")
        i = k - self.min_exp
        if i < 0 or i >= len(self.coeffs):
            return _Q0
        return self.coeffs[i]

    def residue(self):
        """Coefficient of u^-1."""
        return self.coefficient(-1)

    def terms(self) -> dict:
        return {self.min_exp + i: c for i, c in enumerate(self.coeffs) if c != 0}

    def leading_coefficient(self):
        if not self.coeffs:
            raise SingularSeriesError("zero series has no leading coefficient")
        return self.coeffs[0]

    # -- ring operations --------------------------------------------------
    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.trunc_order:
            return self
        return TruncatedSeries(self.min_exp, self.coeffs, order) if order > self.min_exp else TruncatedSeries.zero(order)

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by u^k."""
        return TruncatedSeries(self.min_exp + k, self.coeffs, self.trunc_order + k)

    def map_coeffs(self, fn) -> "TruncatedSeries":
        return TruncatedSeries(self.min_exp, [fn(c) for c in self.coeffs], self.trunc_order)

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            if other == 0:
                return self
            other = TruncatedSeries.monomial(0, other, self.trunc_order)
        trunc = min(self.trunc_order, other.trunc_order)
        lo = min(self.min_exp, other.min_exp)
        if lo >= trunc:
            return TruncatedSeries.zero(trunc)
        out = [_Q0] * (trunc - lo)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.min_exp + i - lo
                if k < len(out):
                    out[k] = out[k] + c
        return TruncatedSeries(lo, out, trunc)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.min_exp, [-c for c in self.coeffs], self.trunc_order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            if other == 0:
                return TruncatedSeries.zero(self.trunc_order)
            return TruncatedSeries(self.min_exp, [c * other for c in self.coeffs], self.trunc_order)
        va, vb = self.min_exp, other.min_exp
        trunc = min(self.trunc_order + vb, other.trunc_order + va)
        length = trunc - va - vb
        if length <= 0 or not self.coeffs or not other.coeffs:
            return TruncatedSeries.zero(trunc)
        return TruncatedSeries(va + vb, _convolve(self.coeffs, other.coeffs, length), trunc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        return TruncatedSeries(self.min_exp, [c / other for c in self.coeffs], self.trunc_order)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        if e == 0:
            return TruncatedSeries.monomial(0, fmpq(1), self.trunc_order - self.min_exp)
        result = None
        base = self
        while e:
            if e & 1:
                result = base if result is None else result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.min_exp, self.coeffs, self.trunc_order) == (other.min_exp, other.coeffs, other.trunc_order)

    def __hash__(self):
        return hash((self.min_exp, self.coeffs, self.trunc_order))

    def agrees_with(self, other: "TruncatedSeries") -> bool:
        """Equality of all coefficients both series know."""
        trunc = min(self.trunc_order, other.trunc_order)
        lo = min(self.min_exp, other.min_exp, trunc)
        return all(self.coefficient(k) == other.coefficient(k) for k in range(lo, trunc))

    # -- analytic operations ----------------------------------------------
    def inverse(self) -> "TruncatedSeries":
        if not self.coeffs:
            raise SingularSeriesError("cannot invert a series with zero leading coefficient")
        v = self.min_exp
        rel = self.trunc_order - v
        c = list(self.coeffs[:rel]) + [_Q0] * (rel - len(self.coeffs))
        inv0 = 1 / c[0]
        out = [inv0]
        for n in range(1, rel):
            s = _Q0
            for k in range(1, n + 1):
                ck = c[k]
                if ck != 0:
                    s = s + ck * out[n - k]
            out.append(-s * inv0)
        return TruncatedSeries(-v, out, -v + rel)

    def differentiate(self) -> "TruncatedSeries":
        out = [(self.min_exp + i) * c for i, c in enumerate(self.coeffs)]
        return TruncatedSeries(self.min_exp - 1, out, self.trunc_order - 1)

    def antiderivative(self) -> "TruncatedSeries":
        """Termwise primitive with zero constant term."""
        if self.coefficient(-1) != 0:
            raise LogarithmicTermError("series has a non-zero u^-1 coefficient")
        out = {}
        for i, c in enumerate(self.coeffs):
            k = self.min_exp + i
            if k != -1:
                out[k + 1] = c / (k + 1)
        return TruncatedSeries.from_dict(out, self.trunc_order + 1)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """``self(inner(u))`` for ``inner`` vanishing at u = 0."""
        w = inner.valuation
        if w is None or w < 1:
            raise CompositionError("inner series must have valuation >= 1")
        terms = self.terms()
        trunc = w * self.trunc_order
        nonconst = [m for m in terms if m != 0]
        if nonconst:
            trunc = min(trunc, inner.trunc_order + (min(nonconst) - 1) * w)
        acc = TruncatedSeries.from_dict({0: terms[0]} if 0 in terms else {}, trunc)
        pos = [m for m in nonconst if m > 0]
        neg = [m for m in nonconst if m < 0]
        if pos:
            power = inner.truncate(trunc)
            for m in range(1, max(pos) + 1):
                if m > 1:
                    power = (power * inner).truncate(trunc)
                if m in terms:
                    acc = acc + power * terms[m]
        if neg:
            inv = inner.inverse()
            power = inv.truncate(trunc)
            for m in range(1, -min(neg) + 1):
                if m > 1:
                    power = (power * inv).truncate(trunc)
                if -m in terms:
                    acc = acc + power * terms[-m]
        return acc.truncate(trunc)

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse by Lagrange inversion: [u^n] b = (1/n) [u^(n-1)] (u/a)^n."""
        if self.valuation != 1:
            raise ReversionError("reversion needs a series of valuation exactly 1")
        trunc = self.trunc_order
        base = self.shift(-1).inverse()  # u/a, valuation 0
        out = {}
        power = None
        for n in range(1, trunc):
            power = base if power is None else (power * base).truncate(trunc - 1)
            c = power.coefficient(n - 1)
            if c != 0:
                out[n] = c / n
        return TruncatedSeries.from_dict(out, trunc)

    def _require_positive_valuation(self, what: str):
        if self.coeffs and self.min_exp < 1:
            raise DomainError(f"{what} needs a series of valuation >= 1")

    def log1p(self) -> "TruncatedSeries":
        """log(1 + a) for a of positive valuation, via the integral of a'/(1 + a)."""
        self._require_positive_valuation("log1p")
        if not self.coeffs:
            return self
        return (self.differentiate() * (self + 1).inverse()).antiderivative()

    def exp(self) -> "TruncatedSeries":
        """exp(a) for a of positive valuation, from E' = a' E."""
        self._require_positive_valuation("exp")
        trunc = self.trunc_order
        a = [self.coefficient(k) for k in range(trunc)]
        e = [fmpq(1)]
        for n in range(1, trunc):
            s = _Q0
            for k in range(1, n + 1):
                if a[k] != 0:
                    s = s + k * a[k] * e[n - k]
            e.append(s / n)
        return TruncatedSeries(0, e, trunc)

    def pow1p(self, alpha) -> "TruncatedSeries":
        """(1 + a)^alpha for a of positive valuation and rational alpha."""
        self._require_positive_valuation("pow1p")
        alpha = fmpq(alpha) if isinstance(alpha, int) else alpha
        trunc = self.trunc_order
        c = [self.coefficient(k) for k in range(1, trunc)]
        p = [fmpq(1)]
        for n in range(1, trunc):
            s = _Q0
            for k in range(1, n + 1):
                ck = c[k - 1]
                if ck != 0:
                    s = s + ((alpha + 1) * k - n) * ck * p[n - k]
            p.append(s / n)
        return TruncatedSeries(0, p, trunc)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "min_exp": self.min_exp,
            "trunc_order": self.trunc_order,
            "coeffs": {str(k): format_scalar(c) for k, c in self.terms().items()},
        }

    def __repr__(self):
        parts = [f"({format_scalar(c)})*u^{k}" for k, c in self.terms().items()]
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(u^{self.trunc_order})"


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_inverse(a: TruncatedSeries) -> TruncatedSeries:
    return a.inverse()


def series_compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    return outer.compose(inner)


def series_reversion(a: TruncatedSeries) -> TruncatedSeries:
    return a.reversion()


def series_log1p(a: TruncatedSeries) -> TruncatedSeries:
    return a.log1p()


def differentiate(a: TruncatedSeries) -> TruncatedSeries:
    return a.differentiate()


def antiderivative(a: TruncatedSeries) -> TruncatedSeries:
    return a.antiderivative()


def residue(a: TruncatedSeries):
    return a.residue()


def coefficient(a: TruncatedSeries, k: int):
    return a.coefficient(k)


__all__ = [
    "TruncatedSeries",
    "series_mul",
    "series_inverse",
    "series_compose",
    "series_reversion",
    "series_log1p",
    "differentiate",
    "antiderivative",
    "residue",
    "coefficient",
]
