"""Small quantum products of the target as truncated two-variable series.

The quantum product of two cohomology classes is a series in the Novikov
variables q1, q2: the coefficient of ``q1^a q2^b`` (for (a, b) != (0, 0))
is the cohomology vector ``sum_i I_{(a,b)}(g1, g2, T_i) . T_{8-i}`` and the
constant term is the classical cup product.  This module provides the
series arithmetic, the product of arbitrary classes, and verifiers that
recompute the closed-form product table and the two cubic relations of the
divisor subring from engine invariants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .chow import CohVector, TargetDatum
from .rationals import RAT_ONE, RAT_ZERO, Rat, rat

__all__ = [
    "ScalarSeries",
    "QSeries",
    "f_series",
    "small_product",
    "star",
    "verify_product_table",
    "verify_relations",
    "ProductCheck",
    "ProductReport",
    "RelationReport",
]


# ----------------------------------------------------------------------
# scalar series
# ----------------------------------------------------------------------


class ScalarSeries:
    """Polynomial in q1, q2 truncated to degrees (n1, n2), exact coefficients."""

    __slots__ = ("n1", "n2", "terms")

    def __init__(self, n1: int, n2: int, terms: dict | None = None):
        if n1 < 0 or n2 < 0:
            raise ValueError("truncation bounds must be non-negative")
        self.n1 = n1
        self.n2 = n2
        self.terms: dict = {}
        if terms:
            for (a, b), c in terms.items():
                if 0 <= a <= n1 and 0 <= b <= n2 and c != 0:
                    self.terms[(a, b)] = c

    @classmethod
    def constant(cls, n1: int, n2: int, value) -> "ScalarSeries":
        return cls(n1, n2, {(0, 0): rat(value)})

    @classmethod
    def monomial(cls, n1: int, n2: int, a: int, b: int, value=1) -> "ScalarSeries":
        return cls(n1, n2, {(a, b): rat(value)})

    def coefficient(self, a: int, b: int) -> Rat:
        return self.terms.get((a, b), RAT_ZERO)

    def _check_bounds(self, other: "ScalarSeries") -> None:
        if (self.n1, self.n2) != (other.n1, other.n2):
            raise ValueError("mismatched truncation bounds")

    def __add__(self, other: "ScalarSeries") -> "ScalarSeries":
        self._check_bounds(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, RAT_ZERO) + c
        return ScalarSeries(self.n1, self.n2, terms)

    def __sub__(self, other: "ScalarSeries") -> "ScalarSeries":
        return self + (-other)

    def __neg__(self) -> "ScalarSeries":
        return ScalarSeries(self.n1, self.n2, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other) -> "ScalarSeries":
        if isinstance(other, ScalarSeries):
            self._check_bounds(other)
            terms: dict = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    a, b = a1 + a2, b1 + b2
                    if a <= self.n1 and b <= self.n2:
                        k = (a, b)
                        terms[k] = terms.get(k, RAT_ZERO) + c1 * c2
            return ScalarSeries(self.n1, self.n2, terms)
        c = rat(other)
        return ScalarSeries(
            self.n1, self.n2, {k: v * c for k, v in self.terms.items()}
        )

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ScalarSeries)
            and (self.n1, self.n2) == (other.n1, other.n2)
            and self.terms == other.terms
        )

    def __hash__(self):  # pragma: no cover - not used as dict key
        return hash((self.n1, self.n2, tuple(sorted(self.terms.items()))))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (a, b) in sorted(self.terms):
            c = self.terms[(a, b)]
            mono = "".join(
                f"q{i}^{e}" if e > 1 else (f"q{i}" if e == 1 else "")
                for i, e in ((1, a), (2, b))
            )
            bits.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(bits)


def f_series(n1: int, n2: int = 0) -> ScalarSeries:
    """The series q1/(1 - q1) = q1 + q1^2 + ... truncated at degree n1."""
    return ScalarSeries(n1, n2, {(a, 0): RAT_ONE for a in range(1, n1 + 1)})


# ----------------------------------------------------------------------
# cohomology-valued series
# ----------------------------------------------------------------------


def _as_vector(datum: TargetDatum, g) -> CohVector:
    if isinstance(g, int):
        return datum.basis_vector(g)
    v = tuple(rat(x) for x in g)
    if len(v) != datum.basis_size:
        raise ValueError("cohomology vector has wrong length")
    return v


def _vec_zero(datum: TargetDatum) -> CohVector:
    return (RAT_ZERO,) * datum.basis_size


def _vec_add(u: CohVector, v: CohVector) -> CohVector:
    return tuple(a + b for a, b in zip(u, v))


def _vec_scale(u: CohVector, c: Rat) -> CohVector:
    return tuple(a * c for a in u)


class QSeries:
    """Series in q1, q2 with cohomology-vector coefficients, truncated."""

    __slots__ = ("datum", "n1", "n2", "coeffs")

    def __init__(self, datum: TargetDatum, n1: int, n2: int, coeffs: dict | None = None):
        if n1 < 0 or n2 < 0:
            raise ValueError("truncation bounds must be non-negative")
        self.datum = datum
        self.n1 = n1
        self.n2 = n2
        self.coeffs: dict = {}
        if coeffs:
            for (a, b), v in coeffs.items():
                if 0 <= a <= n1 and 0 <= b <= n2 and any(x != 0 for x in v):
                    self.coeffs[(a, b)] = tuple(v)

    @classmethod
    def from_vector(cls, datum: TargetDatum, n1: int, n2: int, g) -> "QSeries":
        return cls(datum, n1, n2, {(0, 0): _as_vector(datum, g)})

    @classmethod
    def from_scalar(cls, datum: TargetDatum, s: ScalarSeries) -> "QSeries":
        """Embed a scalar series as a multiple of the fundamental class."""
        unit = datum.basis_vector(0)
        return cls(
            datum,
            s.n1,
            s.n2,
            {k: _vec_scale(unit, c) for k, c in s.terms.items()},
        )

    def coefficient(self, a: int, b: int) -> CohVector:
        return self.coeffs.get((a, b), _vec_zero(self.datum))

    def _check_bounds(self, other: "QSeries") -> None:
        if (self.n1, self.n2) != (other.n1, other.n2):
            raise ValueError("mismatched truncation bounds")

    def __add__(self, other: "QSeries") -> "QSeries":
        self._check_bounds(other)
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = _vec_add(coeffs[k], v) if k in coeffs else v
        return QSeries(self.datum, self.n1, self.n2, coeffs)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + other.scaled(-1)

    def scaled(self, s) -> "QSeries":
        """Multiply by a rational or by a ScalarSeries (with truncation)."""
        if isinstance(s, ScalarSeries):
            if (s.n1, s.n2) != (self.n1, self.n2):
                raise ValueError("mismatched truncation bounds")
            coeffs: dict = {}
            for (a1, b1), v in self.coeffs.items():
                for (a2, b2), c in s.terms.items():
                    a, b = a1 + a2, b1 + b2
                    if a <= self.n1 and b <= self.n2:
                        k = (a, b)
                        sv = _vec_scale(v, c)
                        coeffs[k] = _vec_add(coeffs[k], sv) if k in coeffs else sv
            return QSeries(self.datum, self.n1, self.n2, coeffs)
        c = rat(s)
        return QSeries(
            self.datum,
            self.n1,
            self.n2,
            {k: _vec_scale(v, c) for k, v in self.coeffs.items()},
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QSeries)
            and (self.n1, self.n2) == (other.n1, other.n2)
            and self.coeffs == other.coeffs
        )

    def __hash__(self):  # pragma: no cover - not used as dict key
        return hash((self.n1, self.n2, tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def first_mismatch(self, other: "QSeries"):
        """Lowest (a, b) where the two series differ, or None."""
        self._check_bounds(other)
        keys = sorted(set(self.coeffs) | set(other.coeffs))
        for k in keys:
            if self.coefficient(*k) != other.coefficient(*k):
                return k
        return None

    def __repr__(self) -> str:
        if not self.coeffs:
            return "QSeries(0)"
        bits = []
        for (a, b) in sorted(self.coeffs):
            v = self.coeffs[(a, b)]
            vec = " + ".join(
                f"{c}*T{i}" if c != 1 else f"T{i}"
                for i, c in enumerate(v)
                if c != 0
            )
            bits.append(f"q1^{a}q2^{b}*({vec})")
        return "QSeries(" + " + ".join(bits) + ")"


# ----------------------------------------------------------------------
# the small quantum product
# ----------------------------------------------------------------------


def small_product(engine, g1, g2, n1: int = 4, n2: int = 2) -> QSeries:
    """Quantum product of two cohomology classes, truncated at (n1, n2).

    The constant term is the cup product; the coefficient of q1^a q2^b is
    ``sum_i I_{(a,b)}(g1, g2, T_i) . T_{8-i}`` with i running over the whole
    basis (fundamental-class insertions vanish on their own).
    """
    datum = engine.datum
    v1 = _as_vector(datum, g1)
    v2 = _as_vector(datum, g2)
    coeffs = {(0, 0): datum.cup(v1, v2)}
    size = datum.basis_size
    top = datum.top
    for a in range(n1 + 1):
        for b in range(n2 + 1):
            if (a, b) == (0, 0):
                continue
            vec = [RAT_ZERO] * size
            for i in range(size):
                val = engine.invariant((a, b), [v1, v2, i])
                if val != 0:
                    j = top - i
                    vec[j] = vec[j] + val
            coeffs[(a, b)] = tuple(vec)
    return QSeries(datum, n1, n2, coeffs)


def star(engine, left, right, n1: int = 4, n2: int = 2) -> QSeries:
    """Quantum product extended to series operands (left-to-right nesting).

    Accepts basis indices, cohomology vectors, or QSeries on either side and
    convolves coefficientwise, truncating every cross term.
    """
    datum = engine.datum
    if not isinstance(left, QSeries):
        left = QSeries.from_vector(datum, n1, n2, left)
    if not isinstance(right, QSeries):
        right = QSeries.from_vector(datum, n1, n2, right)
    if (left.n1, left.n2) != (n1, n2) or (right.n1, right.n2) != (n1, n2):
        raise ValueError("mismatched truncation bounds")
    out = QSeries(datum, n1, n2)
    for (a1, b1), u in left.coeffs.items():
        for (a2, b2), v in right.coeffs.items():
            rem1 = n1 - a1 - a2
            rem2 = n2 - b1 - b2
            if rem1 < 0 or rem2 < 0:
                continue
            piece = small_product(engine, u, v, rem1, rem2)
            shifted = {
                (a1 + a2 + a, b1 + b2 + b): vec
                for (a, b), vec in piece.coeffs.items()
            }
            out = out + QSeries(datum, n1, n2, shifted)
    return out


# ----------------------------------------------------------------------
# verification of the closed-form table and relations
# ----------------------------------------------------------------------


def _closed_product_forms(datum: TargetDatum, n1: int, n2: int) -> dict:
    """The nine divisor-times-basis products in closed form, truncated."""
    f = f_series(n1, n2)
    one = ScalarSeries.constant(n1, n2, 1)

    def basis(k) -> QSeries:
        return QSeries.from_vector(datum, n1, n2, k)

    def mono(a, b, c=1) -> QSeries:
        return QSeries.from_scalar(
            datum, ScalarSeries.monomial(n1, n2, a, b, c)
        )

    return {
        (1, 1): basis(3).scaled(one - 3 * f) + basis(5).scaled(3 * f),
        (1, 2): basis(3).scaled(2) + basis(4),
        (2, 2): basis(3) + basis(4) + basis(5),
        (1, 3): basis(7).scaled(3 * f) + mono(1, 1) + mono(2, 1, 2),
        (1, 4): basis(6) + mono(1, 1, 2),
        (1, 5): basis(6).scaled(2) + basis(7).scaled(one - 3 * f) + mono(1, 1),
        (2, 3): basis(6) + mono(1, 1) + mono(2, 1),
        (2, 4): basis(6) + basis(7) + mono(1, 1, 2),
        (2, 5): basis(6) + basis(7).scaled(2) + mono(0, 1) + mono(1, 1),
    }


@dataclass
class ProductCheck:
    """Outcome of one table entry: computed vs closed form."""

    left: int
    right: int
    passed: bool
    first_mismatch: tuple | None
    computed: QSeries
    expected: QSeries

    @property
    def name(self) -> str:
        return f"T{self.left}*T{self.right}"


@dataclass
class ProductReport:
    n1: int
    n2: int
    entries: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


@dataclass
class RelationReport:
    n1: int
    n2: int
    residuals: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.is_zero() for r in self.residuals)


def verify_product_table(engine, n1: int = 4, n2: int = 2) -> ProductReport:
    """Recompute the nine products of divisors with low-degree classes."""
    datum = engine.datum
    expected = _closed_product_forms(datum, n1, n2)
    report = ProductReport(n1, n2)
    for (i, j), want in sorted(expected.items()):
        got = small_product(engine, i, j, n1, n2)
        miss = got.first_mismatch(want)
        report.entries.append(
            ProductCheck(i, j, miss is None, miss, got, want)
        )
    return report


def verify_relations(engine, n1: int = 4, n2: int = 2) -> RelationReport:
    """Evaluate the two cubic relations of the divisor subring.

    Products are expanded strictly left-to-right; both residuals must be the
    zero series.  The first relation:

        T1*T1*T1 - 9f^2 T1*T2*T2 + (9f^2 - 2f) T2*T2*T2 - q1q2(q1 - 1) = 0

    and the second:

        (1-18f) T2*T2*T2 - 3(1-6f) T1*T2*T2 + 6 T1*T1*T2 - q2(q1-1)^2 = 0.
    """
    datum = engine.datum
    f = f_series(n1, n2)
    one = ScalarSeries.constant(n1, n2, 1)
    q1 = ScalarSeries.monomial(n1, n2, 1, 0)
    q2 = ScalarSeries.monomial(n1, n2, 0, 1)

    def triple(a, b, c) -> QSeries:
        return star(engine, star(engine, a, b, n1, n2), c, n1, n2)

    t111 = triple(1, 1, 1)
    t112 = triple(1, 1, 2)
    t122 = triple(1, 2, 2)
    t222 = triple(2, 2, 2)

    r1 = (
        t111
        - t122.scaled(9 * f * f)
        + t222.scaled(9 * f * f - 2 * f)
        - QSeries.from_scalar(datum, q1 * q2 * (q1 - one))
    )
    r2 = (
        t222.scaled(one - 18 * f)
        - t122.scaled(3 * (one - 6 * f))
        + t112.scaled(6)
        - QSeries.from_scalar(datum, q2 * (q1 * q1 - 2 * q1 + one))
    )
    return RelationReport(n1, n2, [r1, r2])
