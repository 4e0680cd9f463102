"""Eynard-Orantin recursion on the C^3 mirror curve with one ramification point.

Correlators are stored in the monomial basis of the local coordinate,

    W^g_n = sum_k C[k_1..k_n] prod_i u_i^(-k_i - 1) du_i ,   k_i >= 1,

so a :class:`CorrelatorTensor` is a sparse symmetric map from index tuples to
exact scalars.  The recursion never forms multivariate functions: spectator
slots only carry their basis index, and the curve enters through a single
three-index table

    M[j; k, l] = Res_{u=0} K_j(u) u^(-k-1) s(u)^(-l-1) s'(u) ,

where K_j is the coefficient of u0^(-j-1) du0 in the Eynard kernel.  Indices
k, l may be negative: a Bergman factor B(q, p_i) contributes
(m + 1) q^m dq (index k = -m - 1) paired with u_i^(-m-2) du_i.
"""
from __future__ import annotations

import logging
import threading
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import permutations, product
from math import comb
from typing import Iterator, Mapping

from flint import fmpq

from .curve import DEFAULT_MARGIN, MirrorCurveC3, default_order
from .errors import DecompositionError, DomainError, PrecisionError
from .exactmath import FieldScalar, Framing, RatFunc, format_scalar, parse_scalar
from .series import TruncatedSeries

log = logging.getLogger(__name__)

_HALF = fmpq(1, 2)


def degree_budget(g: int, n: int) -> int:
    """Upper bound on sum(k_i - 1) for a non-zero entry of W^g_n."""
    return 2 * (3 * g - 3 + n)


def pole_bound(g: int, n: int) -> int:
    return 6 * g - 4 + 2 * n


def _check_stable(g: int, n: int):
    if g < 0 or n < 1 or 2 * g - 2 + n <= 0:
        raise DomainError(f"(g, n) = ({g}, {n}) is not stable")


def sorted_index_tuples(n: int, budget: int, lo: int = 1) -> Iterator[tuple]:
    """Non-decreasing n-tuples of integers >= lo with sum(k - 1) <= budget."""
    if n == 0:
        yield ()
        return
    k = lo
    while (k - 1) * n <= budget:
        for rest in sorted_index_tuples(n - 1, budget - (k - 1), k):
            yield (k,) + rest
        k += 1


# ---------------------------------------------------------------------------
# tensors


@dataclass(frozen=True)
class CorrelatorTensor:
    """Symmetric W^g_n in the monomial basis, keyed by sorted index tuples."""

    g: int
    n: int
    framing: Framing
    coeffs: Mapping[tuple, FieldScalar]

    def __getitem__(self, index) -> FieldScalar:
        value = self.coeffs.get(tuple(sorted(index)))
        return self.framing.zero() if value is None else value

    def full_items(self) -> Iterator[tuple[tuple, FieldScalar]]:
        """Every ordered index tuple with a non-zero coefficient."""
        for key, value in self.coeffs.items():
            for perm in set(permutations(key)):
                yield perm, value

    def max_pole_order(self) -> int:
        return max((max(k) + 1 for k in self.coeffs), default=0)

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "framing": self.framing.label,
            "basis": "monomial",
            "entries": [{"k": list(k), "coeff": format_scalar(v)} for k, v in sorted(self.coeffs.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CorrelatorTensor":
        framing = Framing.parse(data["framing"])
        if data.get("basis", "monomial") != "monomial":
            raise ValueError("expected a monomial-basis tensor")
        coeffs = {tuple(e["k"]): parse_scalar(e["coeff"], framing) for e in data["entries"]}
        return cls(data["g"], data["n"], framing, coeffs)


@dataclass(frozen=True)
class FreeEnergy:
    g: int
    framing: Framing
    value: FieldScalar

    @property
    def is_framing_independent(self) -> bool:
        if isinstance(self.value, RatFunc):
            return self.value.is_constant()
        return True

    def rational_value(self) -> fmpq:
        if isinstance(self.value, RatFunc):
            return self.value.constant_value()
        return self.value

    def to_json(self) -> dict:
        return {"g": self.g, "framing": self.framing.label, "value": format_scalar(self.value)}

    @classmethod
    def from_json(cls, data: dict) -> "FreeEnergy":
        framing = Framing.parse(data["framing"])
        return cls(data["g"], framing, parse_scalar(data["value"], framing))


@dataclass(frozen=True)
class HodgeCoefficientTable:
    """<tau_b1 ... tau_bn Gamma_g(f)> for one (g, n), keyed by sorted b tuples."""

    g: int
    n: int
    framing: Framing
    entries: Mapping[tuple, FieldScalar] = field(default_factory=dict)

    def __getitem__(self, b) -> FieldScalar:
        value = self.entries.get(tuple(sorted(b)))
        return self.framing.zero() if value is None else value

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "n": self.n,
            "framing": self.framing.label,
            "basis": "zeta",
            "entries": [{"b": list(b), "coeff": format_scalar(v)} for b, v in sorted(self.entries.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HodgeCoefficientTable":
        framing = Framing.parse(data["framing"])
        entries = {tuple(e["b"]): parse_scalar(e["coeff"], framing) for e in data["entries"]}
        return cls(data["g"], data["n"], framing, entries)


# ---------------------------------------------------------------------------
# Bergman kernel and Eynard kernel


@dataclass(frozen=True)
class BergmanExpansion:
    """du0 du_q/(u0 - u_q)^2 expanded in u_q: sum_m (m+1) u_q^m u0^(-m-2) du0 du_q."""

    degree: int

    def coefficient(self, m: int) -> dict[int, int]:
        """Monomial-basis differential in u0 multiplying u_q^m du_q."""
        if m < 0 or m > self.degree:
            raise DomainError(f"Bergman expansion holds u_q^m for 0 <= m <= {self.degree}")
        return {m + 1: m + 1}

    def spectator_vector(self, m: int) -> dict[int, int]:
        """Active-slot index vector paired with spectator index m >= 1."""
        return {-m: m}


def bergman_expansion(c: MirrorCurveC3, spectator_degree: int) -> BergmanExpansion:
    return BergmanExpansion(spectator_degree)


class EynardKernel:
    """K(u0, q) = sum_j K_j(q) u0^(-j-1) du0 with

        K_j = (s^j - u^j) / (2 (phi_{-1}(s) - phi_{-1}(u)) G'(u))

    as a density against 1/du.  The numerator is the integral of the Bergman
    kernel from q to s(q); the denominator is omega(q) - omega(s(q)), where the
    constant part of log y cancels and x(s) = x shares the factor G'.
    """

    def __init__(self, curve: MirrorCurveC3):
        self.curve = curve
        s = curve.deck
        self.deck = s
        self.deck_derivative = s.differentiate()
        self.denominator = (curve.phi_minus1.compose(s) - curve.phi_minus1) * curve.dG
        self.inverse_denominator = self.denominator.inverse() * _HALF
        self._powers = {0: TruncatedSeries.monomial(0, curve.framing.one(), s.trunc_order)}
        self._components: dict[int, TruncatedSeries] = {}
        self._pullbacks: dict[int, TruncatedSeries] = {}
        self._rows: dict[tuple[int, int], tuple[dict, int]] = {}
        self._diagonal: dict[int, FieldScalar] = {}

    def deck_power(self, m: int) -> TruncatedSeries:
        if m not in self._powers:
            if m > 0:
                self._powers[m] = self.deck_power(m - 1) * self.deck
            else:
                if -1 not in self._powers:
                    self._powers[-1] = self.deck.inverse()
                if m < -1:
                    self._powers[m] = self.deck_power(m + 1) * self._powers[-1]
        return self._powers[m]

    def component(self, j: int) -> TruncatedSeries:
        """K_j(u); vanishes identically for j = 0."""
        if j not in self._components:
            sj = self.deck_power(j)
            uj = TruncatedSeries.monomial(j, self.curve.framing.one(), sj.trunc_order)
            self._components[j] = (sj - uj) * self.inverse_denominator
        return self._components[j]

    def pullback(self, l: int) -> TruncatedSeries:
        """Density of s^*(u^(-l-1) du) = s^(-l-1) s' du."""
        if l not in self._pullbacks:
            self._pullbacks[l] = self.deck_power(-l - 1) * self.deck_derivative
        return self._pullbacks[l]

    def row(self, j: int, l: int, cap: int | None = None) -> tuple[dict, int]:
        """({k: M[j; k, l]}, bound): M is known for every k < bound.

        With ``cap`` only k <= cap is needed, so both factors are cut before
        multiplying; a later request with a larger cap recomputes the row.
        """
        key = (j, l)
        hit = self._rows.get(key)
        if hit is None or (hit[2] is not None and (cap is None or cap >= hit[2])):
            a, b = self.component(j), self.pullback(l)
            limit = None
            if cap is not None and a.coeffs and b.coeffs:
                limit = cap + 1
                a = a.truncate(limit - b.min_exp)
                b = b.truncate(limit - a.min_exp)
            x = a * b
            hit = (x.terms(), x.trunc_order, limit if limit is not None and x.trunc_order >= limit else None)
            self._rows[key] = hit
        return hit[0], hit[1]

    def coefficient(self, j: int, k: int, l: int) -> FieldScalar:
        terms, bound = self.row(j, l)
        if k >= bound:
            raise PrecisionError(f"M[{j}; {k}, {l}] needs a higher series order")
        return terms.get(k, 0)

    def diagonal(self, j: int) -> FieldScalar:
        """Res K_j(q) B(q, s(q)), the W^0_2(q, s(q)) term feeding W^1_1."""
        if j not in self._diagonal:
            u = self.curve.u
            gap = u - self.deck
            b = self.deck_derivative * (gap * gap).inverse()
            self._diagonal[j] = (self.component(j) * b).residue()
        return self._diagonal[j]


def eynard_kernel(c: MirrorCurveC3) -> EynardKernel:
    return _engine(c).kernel


# ---------------------------------------------------------------------------
# the recursion


class RecursionEngine:
    """Memoised W^g_n for one curve (one framing and one series order)."""

    def __init__(self, curve: MirrorCurveC3):
        self.curve = curve
        self.framing = curve.framing
        self._tensors: dict[tuple[int, int], CorrelatorTensor] = {}
        self._by_slot: dict[tuple[int, int], dict] = {}
        self._by_pair: dict[tuple[int, int], dict] = {}
        self._lock = threading.RLock()

    @cached_property
    def kernel(self) -> EynardKernel:
        return EynardKernel(self.curve)

    # -- index views of stored tensors ------------------------------------
    def _slot_view(self, g: int, n: int) -> dict:
        """rest (sorted, n-1 entries) -> {k: W^g_n[k, rest]}."""
        view = self._by_slot.get((g, n))
        if view is None:
            view = {}
            for key, value in self.correlator(g, n).coeffs.items():
                for i in range(n):
                    if i and key[i] == key[i - 1]:
                        continue
                    view.setdefault(key[:i] + key[i + 1:], {})[key[i]] = value
            self._by_slot[(g, n)] = view
        return view

    def _pair_view(self, g: int, n: int) -> dict:
        """rest (sorted, n-2 entries) -> {l: {k: W^g_n[k, l, rest]}}."""
        view = self._by_pair.get((g, n))
        if view is None:
            view = {}
            for key, value in self.correlator(g, n).coeffs.items():
                for i in range(n):
                    for i2 in range(n):
                        if i == i2:
                            continue
                        rest = tuple(key[p] for p in range(n) if p != i and p != i2)
                        view.setdefault(rest, {}).setdefault(key[i2], {})[key[i]] = value
            self._by_pair[(g, n)] = view
        return view

    def _vector(self, g: int, n: int, rest: tuple) -> dict:
        """{k: W^g_n[k, rest]} including the Bergman pseudo-tensor and W^0_1 = 0."""
        if g == 0 and n == 1:
            return {}
        if g == 0 and n == 2:
            return {-rest[0]: rest[0]}
        if sum(k - 1 for k in rest) > degree_budget(g, n):
            return {}
        return self._slot_view(g, n).get(rest, {})

    # -- single entries ---------------------------------------------------
    def entry(self, g: int, n: int, j: int, rest: tuple) -> FieldScalar:
        """Coefficient of u0^(-j-1) prod u_i^(-rest_i-1) in W^g_n(u0, S) straight from
        the recursion formula, with the first slot playing the role of p_0."""
        _check_stable(g, n)
        if len(rest) != n - 1:
            raise DomainError("rest must list n - 1 spectator indices")
        if j < 0 or any(k < 1 for k in rest):
            # K has no u0^(-j-1) terms for j < 0; lower tensors carry no k < 1
            return self.framing.zero()
        K = self.kernel
        # every contracted tensor has indices up to this; rounding up keeps
        # kernel rows from being rebuilt for each new (g, n)
        cap = 1 + degree_budget(g, n)
        cap += -cap % 12
        total = 0
        if g >= 1:
            if (g - 1, n + 1) == (0, 2):
                total = total + K.diagonal(j)
            else:
                pairs = self._pair_view(g - 1, n + 1).get(tuple(sorted(rest)))
                if pairs:
                    for l, column in pairs.items():
                        terms, bound = K.row(j, l, cap)
                        for k, v in column.items():
                            if k >= bound:
                                raise PrecisionError(f"M[{j}; {k}, {l}] beyond series order")
                            m = terms.get(k)
                            if m is not None:
                                total = total + m * v
        groups = sorted(Counter(rest).items())
        for take in product(*(range(mult + 1) for _, mult in groups)):
            left: list[int] = []
            right: list[int] = []
            weight = 1
            for (value, mult), t in zip(groups, take):
                left.extend([value] * t)
                right.extend([value] * (mult - t))
                weight *= comb(mult, t)
            left_t, right_t = tuple(left), tuple(right)
            for g1 in range(g + 1):
                # W^0_1 vanishes, which also keeps W^g_n off the right-hand side
                if (g1, len(left_t)) == (0, 0) or (g - g1, len(right_t)) == (0, 0):
                    continue
                a = self._vector(g1, len(left_t) + 1, left_t)
                if not a:
                    continue
                b = self._vector(g - g1, len(right_t) + 1, right_t)
                if not b:
                    continue
                part = 0
                for l, bl in b.items():
                    terms, bound = K.row(j, l, cap)
                    acc = 0
                    for k, ak in a.items():
                        if k >= bound:
                            raise PrecisionError(f"M[{j}; {k}, {l}] beyond series order")
                        m = terms.get(k)
                        if m is not None:
                            acc = acc + m * ak
                    if acc != 0:
                        part = part + acc * bl
                if part != 0:
                    total = total + weight * part
        return self.framing.scalar(total)

    # -- whole tensors ----------------------------------------------------
    def correlator(self, g: int, n: int) -> CorrelatorTensor:
        _check_stable(g, n)
        tensor = self._tensors.get((g, n))
        if tensor is not None:
            return tensor
        with self._lock:
            tensor = self._tensors.get((g, n))
            if tensor is None:
                tensor = self._build(g, n)
                self._tensors[(g, n)] = tensor
        return tensor

    def _build(self, g: int, n: int) -> CorrelatorTensor:
        # dependencies first, smallest 2g - 2 + n upwards
        if g >= 1 and (g - 1, n + 1) != (0, 2):
            self.correlator(g - 1, n + 1)
        for g1 in range(g + 1):
            for n1 in range(1, n + 1):
                if 2 * g1 - 2 + n1 > 0 and (g1, n1) != (g, n) and 2 * g1 - 2 + n1 < 2 * g - 2 + n:
                    self.correlator(g1, n1)
        coeffs = {}
        for key in sorted_index_tuples(n, degree_budget(g, n)):
            value = self.entry(g, n, key[-1], key[:-1])
            if value != 0:
                coeffs[key] = value
        tensor = CorrelatorTensor(g, n, self.framing, coeffs)
        log.debug("W^%d_%d: %d canonical entries", g, n, len(coeffs))
        return tensor

    def symmetry_defects(self, g: int, n: int) -> list[tuple]:
        """Index tuples whose value depends on which slot is taken as p_0."""
        tensor = self.correlator(g, n)
        bad = []
        for key in sorted_index_tuples(n, degree_budget(g, n)):
            expected = tensor[key]
            for i in range(n - 1):
                if i and key[i] == key[i - 1]:
                    continue
                if key[i] == key[-1]:
                    continue
                rest = key[:i] + key[i + 1:]
                if self.entry(g, n, key[i], rest) != expected:
                    bad.append(key)
                    break
        return bad

    def residue_defects(self, g: int, n: int) -> list[tuple]:
        """Spectator tuples for which the u0^-1 du0 coefficient is non-zero."""
        self.correlator(g, n)
        return [rest for rest in sorted_index_tuples(n - 1, degree_budget(g, n))
                if self.entry(g, n, 0, rest) != 0]

    def pole_defects(self, g: int, n: int, slack: int = 2) -> list[tuple]:
        """Index tuples past the degree budget (by at most slack) with a non-zero value."""
        self.correlator(g, n)
        budget = degree_budget(g, n)
        return [key for key in sorted_index_tuples(n, budget + slack)
                if sum(k - 1 for k in key) > budget
                and self.entry(g, n, key[-1], key[:-1]) != 0]

    def free_energy(self, g: int) -> FreeEnergy:
        if g < 2:
            raise DomainError(f"F_g is defined for g >= 2, got g = {g}")
        w = self.correlator(g, 1)
        phi = self.curve.primitive
        return FreeEnergy(g, self.framing, self.framing.scalar(_free_energy_residue(g, w, phi)))


def _free_energy_residue(g: int, w: CorrelatorTensor, phi: TruncatedSeries) -> FieldScalar:
    # Res Phi(u) u^(-k-1) du = [u^k] Phi
    res = 0
    for (k,), c in w.coeffs.items():
        res = res + c * phi.coefficient(k)
    sign = 1 if g % 2 == 0 else -1
    return res * fmpq(sign, 2 - 2 * g)


def _engine(c: MirrorCurveC3) -> RecursionEngine:
    eng = c.__dict__.get("_recursion_engine")
    if eng is None:
        eng = RecursionEngine(c)
        c.__dict__["_recursion_engine"] = eng
    return eng


def compute_correlator(c: MirrorCurveC3, g: int, n: int) -> CorrelatorTensor:
    return _engine(c).correlator(g, n)


def free_energy(c: MirrorCurveC3, g: int) -> FreeEnergy:
    return _engine(c).free_energy(g)


def free_energy_with_primitive(c: MirrorCurveC3, g: int, phi: TruncatedSeries) -> FreeEnergy:
    """Same residue with a caller-supplied primitive of omega (base-point checks)."""
    if g < 2:
        raise DomainError(f"F_g is defined for g >= 2, got g = {g}")
    w = compute_correlator(c, g, 1)
    return FreeEnergy(g, c.framing, c.framing.scalar(_free_energy_residue(g, w, phi)))


# ---------------------------------------------------------------------------
# zeta-basis decomposition


def _zeta_columns(c: MirrorCurveC3, b_max: int) -> list[dict]:
    cols = []
    for b in range(b_max + 1):
        # density u^e  <->  monomial index k = -e - 1
        cols.append({-e - 1: v for e, v in c.zeta(b).terms().items()})
    return cols


def _solve_slot(vector: dict, cols: list[dict], where) -> dict:
    v = {k: x for k, x in vector.items() if x != 0}
    out = {}
    while v:
        top = max(v)
        if top % 2 == 0 or (top - 1) // 2 >= len(cols):
            raise DecompositionError(f"non-zero remainder at pole order {top + 1} in slot {where}")
        b = (top - 1) // 2
        col = cols[b]
        coef = v[top] / col[top]
        out[b] = coef
        for k, z in col.items():
            nv = v.get(k, 0) - coef * z
            if nv == 0:
                v.pop(k, None)
            else:
                v[k] = nv
    return out


def decompose_in_zeta_basis(c: MirrorCurveC3, t: CorrelatorTensor) -> HodgeCoefficientTable:
    """Write W^g_n = sum c_b prod zeta_{b_i} and return
    <tau_b Gamma_g(f)> = (-1)^g (f(f+1))^(1-n) c_b."""
    g, n = t.g, t.n
    cols = _zeta_columns(c, 3 * g - 3 + n + 1)
    current = dict(t.full_items())
    for slot in range(n):
        grouped: dict[tuple, dict] = {}
        for idx, value in current.items():
            grouped.setdefault(idx[:slot] + idx[slot + 1:], {})[idx[slot]] = value
        nxt = {}
        for rest, vec in grouped.items():
            for b, coef in _solve_slot(vec, cols, slot).items():
                nxt[rest[:slot] + (b,) + rest[slot:]] = coef
        current = nxt
    f = c.f
    factor = (f * (f + 1)) ** (1 - n) if n != 1 else 1
    if g % 2:
        factor = -factor
    entries = {}
    for b, coef in current.items():
        key = tuple(sorted(b))
        value = c.framing.scalar(coef * factor)
        previous = entries.setdefault(key, value)
        if previous != value:
            raise DecompositionError(f"asymmetric zeta coefficients at b = {key}")
    return HodgeCoefficientTable(g, n, c.framing, {k: v for k, v in entries.items() if v != 0})


# ---------------------------------------------------------------------------
# drivers with order selection, one retry and a stability gate


_CURVES: dict[tuple[Framing, int], MirrorCurveC3] = {}
_CURVES_LOCK = threading.Lock()


def curve_at(framing: Framing, order: int) -> MirrorCurveC3:
    """Shared curve (and hence shared memo of tensors) for one (framing, order)."""
    key = (framing, order)
    with _CURVES_LOCK:
        c = _CURVES.get(key)
        if c is None:
            c = MirrorCurveC3(framing, order)
            _CURVES[key] = c
    return c


def clear_memo():
    with _CURVES_LOCK:
        _CURVES.clear()


def _with_retry(fn, framing: Framing, order: int):
    try:
        return fn(curve_at(framing, order)), order
    except PrecisionError:
        log.info("precision shortfall at order %d, retrying at %d", order, order + 4)
        order += 4
        return fn(curve_at(framing, order)), order


def solve_free_energy(framing: Framing, g: int, order: int | None = None, stability: bool = False,
                      margin: int = DEFAULT_MARGIN) -> tuple[FreeEnergy, int]:
    """F_g at the default (or given) order; returns (value, order used)."""
    if g < 2:
        raise DomainError(f"F_g is defined for g >= 2, got g = {g}")
    order = default_order(g, 1, margin) if order is None else order
    value, used = _with_retry(lambda c: free_energy(c, g), framing, order)
    if stability:
        again = free_energy(curve_at(framing, used + 2), g)
        if again.value != value.value:
            raise PrecisionError(f"F_{g} changed between orders {used} and {used + 2}")
    return value, used


def solve_correlator(framing: Framing, g: int, n: int, order: int | None = None, stability: bool = False,
                     margin: int = DEFAULT_MARGIN) -> tuple[CorrelatorTensor, int]:
    _check_stable(g, n)
    order = default_order(g, n, margin) if order is None else order
    value, used = _with_retry(lambda c: compute_correlator(c, g, n), framing, order)
    if stability:
        again = compute_correlator(curve_at(framing, used + 2), g, n)
        if dict(again.coeffs) != dict(value.coeffs):
            raise PrecisionError(f"W^{g}_{n} changed between orders {used} and {used + 2}")
    return value, used


def solve_hodge_table(framing: Framing, g: int, n: int, order: int | None = None, stability: bool = False,
                      margin: int = DEFAULT_MARGIN) -> HodgeCoefficientTable:
    tensor, used = solve_correlator(framing, g, n, order, stability, margin)
    return decompose_in_zeta_basis(curve_at(framing, used), tensor)
