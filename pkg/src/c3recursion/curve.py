"""The framed mirror curve of C^3 near its ramification point.

The curve is ``x = y^f (1 - y)`` with ``y(t) = (1/t + f)/(f + 1)``.  Its only
ramification point of ``x`` sits at ``t = oo``; all local work is done in
``u = 1/t``, where ``y(u) = (u + f)/(f + 1)`` is linear and every expansion
has integer exponents.

``x`` itself is never formed.  Everything is expressed through the branch
potential ``G(u) = log(x(u)/x(0)) = f log(1 + u/f) + log(1 - u)``, so integer
and rational framings go through the same code.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from flint import fmpq

from .errors import DegenerateRamificationError, DomainError
from .exactmath import FieldScalar, Framing
from .series import TruncatedSeries

MIN_ORDER = 8


DEFAULT_MARGIN = 6


def default_order(genus: int, points: int = 1, margin: int = DEFAULT_MARGIN) -> int:
    """Series order used for W^genus_points: the pole bound plus a safety margin."""
    return max(MIN_ORDER, 6 * genus + 2 * points + margin)


# ---------------------------------------------------------------------------
# polynomials in t as coefficient tuples (lowest degree first)


def _tpoly_trim(p: list) -> tuple:
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def tpoly_add(p, q) -> tuple:
    n = max(len(p), len(q))
    out = [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]
    return _tpoly_trim(out)


def tpoly_mul(p, q) -> tuple:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _tpoly_trim(out)


def tpoly_scale(p, c) -> tuple:
    return _tpoly_trim([a * c for a in p])


def tpoly_derivative(p) -> tuple:
    return _tpoly_trim([i * p[i] for i in range(1, len(p))])


def tpoly_degree(p) -> int:
    return len(p) - 1


def euler_operator(framing: Framing):
    """The vector field x d/dx written in t: (t (t - 1)(f t + 1)/(f + 1)) d/dt."""
    f = framing.f
    one = framing.one()
    # t (t - 1)(f t + 1) = -t + (1 - f) t^2 + f t^3
    prefactor = tpoly_scale((0 * one, -one, one - f, f), one / (f + 1))

    def apply(p):
        return tpoly_mul(prefactor, tpoly_derivative(p))

    return apply


@dataclass(frozen=True)
class PhiBasis:
    """phi_b polynomials in t and the Laurent densities of zeta_b = d phi_b in u."""

    b_max: int
    phi: tuple
    zeta: tuple


class MirrorCurveC3:
    """Framed mirror curve of C^3 with series data cached to a fixed order."""

    def __init__(self, framing: Framing, order: int):
        if order < MIN_ORDER:
            raise DomainError(f"series order must be at least {MIN_ORDER}, got {order}")
        if not isinstance(framing, Framing):
            raise TypeError("framing must be a Framing")
        self.framing = framing
        self.order = order
        self.f = framing.f
        self._phi_cache: dict[int, tuple] = {}
        self._zeta_cache: dict[int, TruncatedSeries] = {}

    def __repr__(self):
        return f"MirrorCurveC3(framing={self.framing.label}, order={self.order})"

    def _s(self, x) -> FieldScalar:
        return self.framing.scalar(x)

    @cached_property
    def u(self) -> TruncatedSeries:
        return TruncatedSeries.monomial(1, self._s(1), self.order)

    @cached_property
    def y(self) -> TruncatedSeries:
        f = self.f
        return TruncatedSeries(0, [f / (f + 1), self._s(1) / (f + 1)], self.order)

    @cached_property
    def branch_potential(self) -> TruncatedSeries:
        """G(u) = log(x(u)/x(0)), valuation exactly 2."""
        f = self.f
        return (self.u * (self._s(1) / f)).log1p() * f + (-self.u).log1p()

    @cached_property
    def dG(self) -> TruncatedSeries:
        return self.branch_potential.differentiate()

    @cached_property
    def phi_minus1(self) -> TruncatedSeries:
        """phi_{-1} = -log(1 + 1/(f t)) = -log(1 + u/f)."""
        return -(self.u * (self._s(1) / self.f)).log1p()

    @cached_property
    def omega(self) -> TruncatedSeries:
        """Density of omega = log y dx/x against du, with the constant log(f/(f+1)) dropped."""
        return -self.phi_minus1 * self.dG

    @cached_property
    def primitive(self) -> TruncatedSeries:
        """Phi(u) with Phi(0) = 0."""
        return self.omega.antiderivative()

    @cached_property
    def sqrt_branch(self) -> TruncatedSeries:
        """r(u) = u sqrt(1 + h(u)) where G(u) = c2 u^2 (1 + h(u)), so r^2 = G/c2."""
        G = self.branch_potential
        c2 = G.coefficient(2)
        if c2 == 0:
            raise DegenerateRamificationError("u^2 coefficient of the branch potential vanishes")
        h = G.shift(-2) / c2 - 1
        return h.pow1p(fmpq(1, 2)).shift(1)

    @cached_property
    def deck(self) -> TruncatedSeries:
        """s(u) = r^{-1}(-r(u)), the non-trivial solution of G(s(u)) = G(u)."""
        r = self.sqrt_branch
        return r.reversion().compose(-r)

    # -- phi_b / zeta_b ---------------------------------------------------
    def phi_polynomial(self, b: int) -> tuple:
        if b < 0:
            raise DomainError("phi_b is a polynomial only for b >= 0")
        if b not in self._phi_cache:
            if b == 0:
                one = self._s(1)
                self._phi_cache[0] = (-one / (self.f + 1), one / (self.f + 1))
            else:
                self._phi_cache[b] = euler_operator(self.framing)(self.phi_polynomial(b - 1))
        return self._phi_cache[b]

    def zeta(self, b: int) -> TruncatedSeries:
        """Density of zeta_b = d phi_b against du; a Laurent polynomial in u."""
        if b not in self._zeta_cache:
            p = self.phi_polynomial(b)
            deg = len(p) - 1
            # phi_b(1/u) = sum_i p_i u^-i
            phi_u = TruncatedSeries(-deg, list(reversed(p)), self.order + 1)
            self._zeta_cache[b] = phi_u.differentiate()
        return self._zeta_cache[b]

    def phi_basis(self, b_max: int) -> PhiBasis:
        return PhiBasis(
            b_max,
            tuple(self.phi_polynomial(b) for b in range(b_max + 1)),
            tuple(self.zeta(b) for b in range(b_max + 1)),
        )

    def residue_pairing(self, b: int) -> FieldScalar:
        """Res_{u=0} phi_{-1} zeta_{b-1}, with zeta_{-1} = d phi_{-1}."""
        if b < 0:
            raise DomainError("residue pairing index must be >= 0")
        dens = self.phi_minus1.differentiate() if b == 0 else self.zeta(b - 1)
        return self._s((self.phi_minus1 * dens).residue())


def build_curve(framing: Framing, order: int) -> MirrorCurveC3:
    return MirrorCurveC3(framing, order)


def deck_transformation(c: MirrorCurveC3) -> TruncatedSeries:
    return c.deck


def phi_b_polynomial(c: MirrorCurveC3, b: int) -> tuple:
    return c.phi_polynomial(b)


def zeta_b_expansion(c: MirrorCurveC3, b: int) -> TruncatedSeries:
    return c.zeta(b)


def phi_minus1(c: MirrorCurveC3) -> TruncatedSeries:
    return c.phi_minus1


def residue_pairing(c: MirrorCurveC3, b: int) -> FieldScalar:
    return c.residue_pairing(b)
