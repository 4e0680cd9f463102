"""Exact scalars: rationals, rational functions of the framing, Bernoulli numbers.

Rationals are ``flint.fmpq`` values.  Rational functions of the framing
variable ``f`` are :class:`RatFunc` instances whose numerator and
denominator are ``flint.fmpq_poly`` objects kept coprime with a monic
denominator, so equality is a structural comparison.

A *field scalar* is either of the two; one computation only ever uses one
kind, as selected by its :class:`Framing`.
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Union

from flint import fmpq, fmpq_poly

from .errors import DomainError, EvaluationError, FramingModeError, GenericityError

Rational = fmpq

_ZERO = fmpq_poly([])
_ONE = fmpq_poly([1])
_F = fmpq_poly([0, 1])


def rational(x) -> fmpq:
    """Coerce ``int``, ``Fraction``, ``fmpq`` or a ``"p/q"`` string to ``fmpq``."""
    if isinstance(x, fmpq):
        return x
    if isinstance(x, int):
        return fmpq(x)
    if isinstance(x, Fraction):
        return fmpq(x.numerator, x.denominator)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


def parse_rational(text: str) -> fmpq:
    text = text.strip()
    m = re.fullmatch(r"([+-]?\d+)(?:/(\d+))?", text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    q = int(m.group(2)) if m.group(2) else 1
    if q == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return fmpq(int(m.group(1)), q)


def format_rational(x: fmpq) -> str:
    x = rational(x)
    return str(x.p) if x.q == 1 else f"{x.p}/{x.q}"


def _poly(x) -> fmpq_poly:
    if isinstance(x, fmpq_poly):
        return x
    return fmpq_poly([x])


class RatFunc:
    """Element of Q(f) in canonical form ``num/den``, gcd 1, ``den`` monic.

    >>> f = RatFunc.variable()
    >>> str((f**2 - 1) / (f - 1))
    'f + 1'
    """

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1):
        num = _poly(num)
        den = _poly(den)
        if den == 0:
            raise ZeroDivisionError("rational function with zero denominator")
        if num == 0:
            self.num, self.den = _ZERO, _ONE
            return
        if den.degree() > 0:
            g = num.gcd(den)
            if g.degree() > 0:
                num = num // g
                den = den // g
        lc = den[den.degree()]
        if lc != 1:
            num = num / lc
            den = den / lc
        self.num, self.den = num, den

    @classmethod
    def _make(cls, num: fmpq_poly, den: fmpq_poly) -> "RatFunc":
        # caller guarantees canonical form
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def variable(cls) -> "RatFunc":
        return cls._make(_F, _ONE)

    @classmethod
    def constant(cls, c) -> "RatFunc":
        c = rational(c)
        return cls._make(fmpq_poly([c]) if c != 0 else _ZERO, _ONE)

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num == 0

    def is_polynomial(self) -> bool:
        return self.den.degree() == 0

    def is_constant(self) -> bool:
        return self.den.degree() == 0 and self.num.degree() <= 0

    def constant_value(self) -> fmpq:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num[0]

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, fmpq)):
            return other
        if isinstance(other, Fraction):
            return rational(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not isinstance(other, RatFunc):
            if other == 0:
                return self
            return RatFunc._make(self.num + other * self.den, self.den)
        if self.num == 0:
            return other
        if other.num == 0:
            return self
        d1, d2 = self.den, other.den
        if d1 == d2:
            if d1.degree() == 0:
                return _from_poly(self.num + other.num)
            return RatFunc(self.num + other.num, d1)
        if d1.degree() == 0:
            return RatFunc._make(self.num * d2 + other.num, d2)
        if d2.degree() == 0:
            return RatFunc._make(self.num + other.num * d1, d1)
        g = d1.gcd(d2)
        if g.degree() == 0:
            return RatFunc._make(self.num * d2 + other.num * d1, d1 * d2)
        d1g, d2g = d1 // g, d2 // g
        return RatFunc(self.num * d2g + other.num * d1g, d1g * d2)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc._make(-self.num, self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not isinstance(other, RatFunc):
            if other == 0:
                return _RZERO
            if other == 1:
                return self
            return RatFunc._make(self.num * other, self.den)
        if self.num == 0 or other.num == 0:
            return _RZERO
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        if d1.degree() > 0 and n2.degree() > 0:
            g = n2.gcd(d1)
            if g.degree() > 0:
                n2 = n2 // g
                d1 = d1 // g
        if d2.degree() > 0 and n1.degree() > 0:
            g = n1.gcd(d2)
            if g.degree() > 0:
                n1 = n1 // g
                d2 = d2 // g
        return RatFunc._make(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num == 0:
            raise ZeroDivisionError("inverse of the zero rational function")
        lc = self.num[self.num.degree()]
        if lc == 1:
            return RatFunc._make(self.den, self.num)
        return RatFunc._make(self.den / lc, self.num / lc)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if isinstance(other, RatFunc):
            return self * other.inverse()
        if other == 0:
            raise ZeroDivisionError("division of a rational function by zero")
        return RatFunc._make(self.num / rational(other), self.den)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc._make(self.num**e, self.den**e)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.den.degree() == 0 and self.num == other

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self.is_constant():
            return hash(self.num[0])
        return hash((tuple(self.num.coeffs()), tuple(self.den.coeffs())))

    def __bool__(self):
        return self.num != 0

    # -- substitution -----------------------------------------------------
    def __call__(self, f0) -> fmpq:
        f0 = rational(f0)
        d = self.den(f0)
        if d == 0:
            raise EvaluationError(f"{self} has a pole at f = {format_rational(f0)}")
        return self.num(f0) / d

    def substitute(self, p: fmpq_poly) -> "RatFunc":
        """Compose with a polynomial substitution ``f -> p(f)``."""
        return RatFunc(self.num(p), self.den(p))

    def reflect(self) -> "RatFunc":
        """Image under ``f -> -1 - f``."""
        return self.substitute(fmpq_poly([-1, -1]))

    # -- printing ---------------------------------------------------------
    def integer_form(self) -> tuple[list[int], list[int]]:
        """Integer coefficient lists (low degree first) of an equal fraction N/D,
        with content removed and D's leading coefficient positive."""
        lcm = 1
        for c in self.num.coeffs() + self.den.coeffs():
            q = int(c.q)
            lcm = lcm * q // _gcd(lcm, q)
        n = [int(c * lcm) for c in self.num.coeffs()]
        d = [int(c * lcm) for c in self.den.coeffs()]
        g = 0
        for c in n + d:
            g = _gcd(g, c)
        if g > 1:
            n = [c // g for c in n]
            d = [c // g for c in d]
        return n, d

    def __str__(self):
        n, d = self.integer_form()
        ns = _format_int_poly(n)
        if d == [1]:
            return ns
        ds = _format_int_poly(d)
        if _term_count(n) > 1:
            ns = f"({ns})"
        if _term_count(d) > 1 or any(d[1:]) and d != [0] * (len(d) - 1) + [1]:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"RatFunc({self})"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _term_count(coeffs: list[int]) -> int:
    return sum(1 for c in coeffs if c)


def _format_int_poly(coeffs: list[int], var: str = "f") -> str:
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            power = var if k == 1 else f"{var}^{k}"
            body = power if mag == 1 else f"{mag}*{power}"
        if not terms:
            terms.append(body if c > 0 else f"-{body}")
        else:
            terms.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(terms) if terms else "0"


def _from_poly(p: fmpq_poly) -> RatFunc:
    return RatFunc._make(p, _ONE) if p != 0 else _RZERO


_RZERO = RatFunc._make(_ZERO, _ONE)

FieldScalar = Union[fmpq, RatFunc]


# ---------------------------------------------------------------------------
# framing


@dataclass(frozen=True)
class Framing:
    """Either the symbolic framing variable or a fixed generic rational."""

    mode: str
    value: fmpq | None = None

    def __post_init__(self):
        if self.mode == "symbolic":
            if self.value is not None:
                raise ValueError("symbolic framing carries no value")
        elif self.mode == "fixed":
            v = rational(self.value)
            if v == 0 or v == -1:
                raise GenericityError(f"framing {format_rational(v)} is not generic (f must avoid 0 and -1)")
            object.__setattr__(self, "value", v)
        else:
            raise ValueError(f"unknown framing mode {self.mode!r}")

    @classmethod
    def symbolic(cls) -> "Framing":
        return cls("symbolic")

    @classmethod
    def fixed(cls, value) -> "Framing":
        return cls("fixed", rational(value))

    @classmethod
    def parse(cls, text: str) -> "Framing":
        if text.strip() == "symbolic":
            return cls.symbolic()
        return cls.fixed(parse_rational(text))

    @property
    def is_symbolic(self) -> bool:
        return self.mode == "symbolic"

    @property
    def label(self) -> str:
        return "symbolic" if self.is_symbolic else format_rational(self.value)

    @property
    def f(self) -> FieldScalar:
        return RatFunc.variable() if self.is_symbolic else self.value

    def scalar(self, x) -> FieldScalar:
        """Bring ``x`` into this framing's scalar kind."""
        if self.is_symbolic:
            if isinstance(x, RatFunc):
                return x
            return RatFunc.constant(x)
        if isinstance(x, RatFunc):
            raise FramingModeError("rational function given to a fixed framing")
        return rational(x)

    def zero(self) -> FieldScalar:
        return self.scalar(0)

    def one(self) -> FieldScalar:
        return self.scalar(1)

    def __str__(self):
        return self.label


# ---------------------------------------------------------------------------
# strict scalar operations


def _mode_of(x) -> str:
    if isinstance(x, RatFunc):
        return "symbolic"
    if isinstance(x, (fmpq, int, Fraction)):
        return "fixed"
    raise TypeError(f"not a field scalar: {x!r}")


def field_arith(a: FieldScalar, b: FieldScalar, op: str) -> FieldScalar:
    """Exact ``a op b`` for two scalars of the same framing mode."""
    ma, mb = _mode_of(a), _mode_of(b)
    if ma != mb:
        raise FramingModeError(f"cannot combine {ma} and {mb} scalars")
    if ma == "fixed":
        a, b = rational(a), rational(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise ZeroDivisionError("division by the zero scalar")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def evaluate_at_framing(s: FieldScalar, f0) -> fmpq:
    """Substitute the framing value ``f0`` into ``s``."""
    f0 = rational(f0)
    if isinstance(s, RatFunc):
        value = s(f0)
    else:
        value = rational(s)
    if f0 == 0 or f0 == -1:
        raise GenericityError(f"framing {format_rational(f0)} is not generic")
    return value


def format_scalar(x: FieldScalar) -> str:
    if isinstance(x, RatFunc):
        return str(x)
    return format_rational(x)


_TERM = re.compile(r"([+-]?)\s*(\d+)?\s*(\*?\s*f(?:\^(\d+))?)?")


def _parse_int_poly(text: str) -> fmpq_poly:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    coeffs: dict[int, int] = {}
    pos = 0
    text = text.replace(" ", "")
    if not text:
        raise ValueError("empty polynomial")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse polynomial {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        c = int(m.group(2)) if m.group(2) else 1
        if m.group(3):
            k = int(m.group(4)) if m.group(4) else 1
        else:
            k = 0
        coeffs[k] = coeffs.get(k, 0) + sign * c
        pos = m.end()
    top = max(coeffs)
    return fmpq_poly([coeffs.get(k, 0) for k in range(top + 1)])


def _split_fraction(text: str) -> tuple[str, str | None]:
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            return text[:i], text[i + 1:]
    return text, None


def parse_scalar(text: str, framing: Framing) -> FieldScalar:
    """Inverse of :func:`format_scalar` for the given framing mode."""
    if not framing.is_symbolic:
        return parse_rational(text)
    num, den = _split_fraction(text.strip())
    return RatFunc(_parse_int_poly(num), _parse_int_poly(den) if den is not None else 1)


# ---------------------------------------------------------------------------
# Bernoulli numbers and the constant-map free energies

_bernoulli_memo: dict[int, fmpq] = {0: fmpq(1)}
_bernoulli_lock = threading.Lock()


def bernoulli(m: int) -> fmpq:
    """B_m with t/(e^t - 1) = sum B_m t^m/m!, so that B_1 = -1/2.

    Computed with the Akiyama-Tanigawa transform (which yields B_1 = +1/2;
    the sign is corrected afterwards).
    """
    if m < 0:
        raise DomainError("Bernoulli index must be non-negative")
    cached = _bernoulli_memo.get(m)
    if cached is not None:
        return cached
    if m == 1:
        value = fmpq(-1, 2)
    elif m % 2 == 1:
        value = fmpq(0)
    else:
        a = [fmpq(0)] * (m + 1)
        for i in range(m + 1):
            a[i] = fmpq(1, i + 1)
            for j in range(i, 0, -1):
                a[j - 1] = j * (a[j - 1] - a[j])
        value = a[0]
    with _bernoulli_lock:
        _bernoulli_memo[m] = value
    return value


def faber_pandharipande(g: int) -> fmpq:
    """(-1)^g |B_2g| |B_2g-2| / (2 (2g) (2g-2) (2g-2)!) for g >= 2."""
    if g < 2:
        raise DomainError(f"F_g is defined for g >= 2, got g = {g}")
    b1 = abs(bernoulli(2 * g))
    b2 = abs(bernoulli(2 * g - 2))
    value = b1 * b2 / (2 * (2 * g) * (2 * g - 2) * factorial(2 * g - 2))
    return value if g % 2 == 0 else -value

