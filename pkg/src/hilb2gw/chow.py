"""Intersection rings of the two target varieties, behind one generic datum.

The main target is the Hilbert scheme of two points in the plane, a smooth
projective 4-fold whose rational cohomology is generated by two divisor
classes T1, T2. Its ring is presented as

    Q[T1, T2] / (T1^3,  T2^3 - 3*T1*T2^2 + 6*T1^2*T2)

with a fixed additive basis T0..T8 of codimensions (0,1,1,2,2,2,3,3,4). The
higher basis classes are polynomials in the divisors:

    T3 = T1^2            T4 = T1*T2 - 2*T1^2     T5 = T1^2 - T1*T2 + T2^2
    T6 = T1^2*T2         T7 = T1*T2^2 - 3*T1^2*T2
    T8 = T1^2*T2^2  (point class)

and the basis is self-dual under the intersection pairing: the integral of
Ti cup T(8-j) is 1 exactly when i = j. The full multiplication table is
*derived* at construction time by reducing polynomial products in the
quotient ring (never hand-typed), and construction fails hard if the derived
table violates the duality property or if the divisor-decomposition data does
not reproduce the basis exactly.

Curve classes are lattice points (a, b) = a*B1 + b*B2 in the effective cone,
with B_i dual to T_j (T1.(a,b) = a, T2.(a,b) = b) and -K.(a,b) = 3b.

Everything the reconstruction engine needs is packaged in a TargetDatum so
the same engine also runs on the plane itself (see ``p2_datum``), which
serves as an independent cross-check target.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Optional, Sequence

from .rationals import RAT_ONE, RAT_ZERO, Rat, rat

# --------------------------------------------------------------------------
# Exact polynomial arithmetic in Q[T1,T2] / (T1^3, T2^3 - 3 T1 T2^2 + 6 T1^2 T2)
#
# Polynomials are dicts (i, j) -> coefficient for the monomial T1^i T2^j.
# Reduction rewrites T2^3 -> 3 T1 T2^2 - 6 T1^2 T2 and kills T1^3, so reduced
# monomials satisfy i <= 2 and j <= 2; the quotient has rank 9, matching the
# basis.
# --------------------------------------------------------------------------


def _poly_reduce(poly: dict) -> dict:
    work = dict(poly)
    out: dict = {}
    while work:
        (i, j), c = work.popitem()
        if c == 0:
            continue
        if i >= 3:
            continue
        if j >= 3:
            # T2^j = T2^(j-3) * (3 T1 T2^2 - 6 T1^2 T2)
            for di, dj, m in ((1, j - 1, 3), (2, j - 2, -6)):
                key = (i + di, dj)
                work[key] = work.get(key, RAT_ZERO) + m * c
            continue
        out[(i, j)] = out.get((i, j), RAT_ZERO) + c
    return {k: v for k, v in out.items() if v != 0}


def _poly_mul(p: dict, q: dict) -> dict:
    prod: dict = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            key = (i1 + i2, j1 + j2)
            prod[key] = prod.get(key, RAT_ZERO) + c1 * c2
    return _poly_reduce(prod)


# Basis classes as reduced polynomials in the divisors.
_BASIS_POLYS = (
    {(0, 0): RAT_ONE},                                   # T0
    {(1, 0): RAT_ONE},                                   # T1
    {(0, 1): RAT_ONE},                                   # T2
    {(2, 0): RAT_ONE},                                   # T3
    {(1, 1): RAT_ONE, (2, 0): rat(-2)},                  # T4
    {(2, 0): RAT_ONE, (1, 1): rat(-1), (0, 2): RAT_ONE}, # T5
    {(2, 1): RAT_ONE},                                   # T6
    {(1, 2): RAT_ONE, (2, 1): rat(-3)},                  # T7
    {(2, 2): RAT_ONE},                                   # T8
)

_MONOMIALS = tuple((i, j) for i in range(3) for j in range(3))


def _invert_basis_matrix() -> list:
    """Inverse of the (monomial x basis) coefficient matrix, exactly."""
    n = 9
    rows = []
    for mi, mono in enumerate(_MONOMIALS):
        row = [poly.get(mono, RAT_ZERO) for poly in _BASIS_POLYS]
        row += [RAT_ONE if k == mi else RAT_ZERO for k in range(n)]
        rows.append(row)
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return [row[n:] for row in rows]


_MONO_TO_BASIS = _invert_basis_matrix()


def _poly_to_vector(poly: dict) -> tuple:
    """Coordinates of a reduced polynomial in the T0..T8 basis."""
    coords = [RAT_ZERO] * 9
    for mono, c in poly.items():
        mi = _MONOMIALS.index(mono)
        for e in range(9):
            coords[e] += c * _MONO_TO_BASIS[e][mi]
    return tuple(coords)


def build_cup_table() -> tuple:
    """Derive the 9x9 basis multiplication table from the ring presentation.

    Every entry is computed by multiplying the polynomial representatives and
    reducing in the quotient; products of total codimension above 4 reduce to
    zero automatically. Raises ``ValueError`` if the result violates the
    duality property (the integral of Ti cup Tf must be 1 exactly for
    f = 8 - i and 0 otherwise).
    """
    table = [[None] * 9 for _ in range(9)]
    for e in range(9):
        for f in range(e, 9):
            vec = _poly_to_vector(_poly_mul(_BASIS_POLYS[e], _BASIS_POLYS[f]))
            table[e][f] = vec
            table[f][e] = vec
    for e in range(9):
        for f in range(9):
            expected = RAT_ONE if e + f == 8 else RAT_ZERO
            if table[e][f][8] != expected:
                raise ValueError(
                    f"derived cup table breaks duality at (T{e}, T{f}): "
                    f"integral {table[e][f][8]}, expected {expected}"
                )
    return tuple(tuple(row) for row in table)


# --------------------------------------------------------------------------
# Generic target datum
# --------------------------------------------------------------------------

CohVector = tuple  # coordinates on the basis, exact rationals
CurveClass = tuple  # lattice point in the effective cone


class TargetDatum:
    """Everything the reconstruction engine needs about one target variety.

    Immutable after construction; freely shareable across threads. The
    constructor validates the multiplication table against the duality
    property and checks that the divisor-decomposition data reproduces each
    basis class exactly and spans every graded piece it claims to cover.
    """

    def __init__(
        self,
        name: str,
        dim: int,
        codims: Sequence[int],
        divisors: Sequence[int],
        cup_table: Sequence[Sequence[CohVector]],
        dual: Sequence[int],
        anticanonical: Sequence[int],
        decompositions: dict,
        base_case: Callable[[CurveClass, tuple], Optional[object]],
        rank: int,
    ):
        self.name = name
        self.dim = dim
        self.codims = tuple(codims)
        self.divisors = tuple(divisors)
        self.cup_table = tuple(tuple(row) for row in cup_table)
        self.dual = tuple(dual)
        self.anticanonical = tuple(anticanonical)
        self.decompositions = {m: tuple(terms) for m, terms in decompositions.items()}
        self.base_case = base_case
        self.rank = rank

        self.basis_size = len(self.codims)
        self.top = self.basis_size - 1
        self.weights = tuple(c - 1 for c in self.codims)
        self.nondivisors = tuple(
            e for e in range(self.basis_size) if self.codims[e] >= 2
        )
        self._divisor_pos = {e: i for i, e in enumerate(self.divisors)}
        # sparse form of each table entry, for the engine's hot loop
        self.cup_terms = tuple(
            tuple(
                tuple((m, c) for m, c in enumerate(row) if c != 0)
                for row in rows
            )
            for rows in self.cup_table
        )
        self._splits_cache: dict = {}
        self._validate()

    # -- ring operations ---------------------------------------------------

    def basis_vector(self, e: int) -> CohVector:
        return tuple(
            RAT_ONE if k == e else RAT_ZERO for k in range(self.basis_size)
        )

    def cup_basis(self, e: int, f: int) -> CohVector:
        return self.cup_table[e][f]

    def cup(self, u: CohVector, v: CohVector) -> CohVector:
        """Bilinear extension of the basis table to arbitrary classes."""
        out = [RAT_ZERO] * self.basis_size
        for e, cu in enumerate(u):
            if cu == 0:
                continue
            for f, cv in enumerate(v):
                if cv == 0:
                    continue
                c = cu * cv
                for m, cm in self.cup_terms[e][f]:
                    out[m] += c * cm
        return tuple(out)

    def dual_index(self, e: int) -> int:
        return self.dual[e]

    def integrate(self, v: CohVector):
        """Integral over the target: the point-class coordinate."""
        return v[self.top]

    def decompose(self, m: int) -> tuple:
        """Divisor-times-lower-class presentation of a basis class.

        Returns terms (D, rho, c) with codim(T_rho) = codim(T_m) - 1 and
        sum_r c_r * (T_D cup T_rho) = T_m exactly.
        """
        return self.decompositions[m]

    # -- curve classes -----------------------------------------------------

    def effective(self, cls: CurveClass) -> bool:
        return len(cls) == self.rank and all(
            isinstance(x, int) and x >= 0 for x in cls
        )

    def is_zero_class(self, cls: CurveClass) -> bool:
        return all(x == 0 for x in cls)

    def inter(self, e: int, cls: CurveClass) -> int:
        """Intersection number of the divisor T_e with a curve class."""
        return cls[self._divisor_pos[e]]

    def minus_k_dot(self, cls: CurveClass) -> int:
        return sum(k * x for k, x in zip(self.anticanonical, cls))

    def weight_budget(self, cls: CurveClass) -> int:
        """Value of sum(codim - 1) over insertions forced by the dimension count.

        An invariant of class beta with insertions of total codimension C and
        count n can be nonzero only if C = -K.beta + (dim - 3) + n, i.e. iff
        sum(codim_i - 1) equals this budget; the budget does not depend on n.
        """
        return self.minus_k_dot(cls) + self.dim - 3

    def splits(self, cls: CurveClass) -> tuple:
        """All ordered pairs (c1, c2) of nonzero effective classes summing to cls."""
        cached = self._splits_cache.get(cls)
        if cached is not None:
            return cached
        parts = [()]
        for x in cls:
            parts = [p + (y,) for p in parts for y in range(x + 1)]
        out = tuple(
            (c1, tuple(x - y for x, y in zip(cls, c1)))
            for c1 in parts
            if not self.is_zero_class(c1) and c1 != cls
        )
        self._splits_cache[cls] = out
        return out

    # -- construction-time validation ---------------------------------------

    def _validate(self) -> None:
        for e in range(self.basis_size):
            f = self.dual[e]
            if self.dual[f] != e:
                raise ValueError("duality map is not an involution")
            if self.codims[e] + self.codims[f] != self.dim:
                raise ValueError("duality map does not complement codimension")
        for e in range(self.basis_size):
            for f in range(self.basis_size):
                expected = RAT_ONE if f == self.dual[e] else RAT_ZERO
                if self.integrate(self.cup_table[e][f]) != expected:
                    raise ValueError(
                        f"pairing is not the expected permutation at ({e},{f})"
                    )
        by_codim: dict = {}
        for m, terms in self.decompositions.items():
            total = [RAT_ZERO] * self.basis_size
            for d, rho, c in terms:
                if self.codims[d] != 1:
                    raise ValueError(f"decomposition of T{m} uses non-divisor T{d}")
                if self.codims[rho] != self.codims[m] - 1:
                    raise ValueError(f"decomposition of T{m} drops codim wrongly")
                vec = self.cup_table[d][rho]
                for i, x in enumerate(vec):
                    total[i] += rat(c) * x
                by_codim.setdefault(self.codims[m], []).append(vec)
            if tuple(total) != self.basis_vector(m):
                raise ValueError(f"decomposition of T{m} does not reproduce it")
        for c, vecs in by_codim.items():
            level = [e for e in range(self.basis_size) if self.codims[e] == c]
            mat = [[v[e] for e in level] for v in vecs]
            if _rank(mat) != len(level):
                raise ValueError(f"decomposition products do not span codim {c}")


def _rank(mat: list) -> int:
    """Rank of a small exact matrix (row elimination)."""
    rows = [list(r) for r in mat]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [x * inv for x in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# --------------------------------------------------------------------------
# The two concrete targets
# --------------------------------------------------------------------------

# Two-point invariants of the Hilbert scheme for classes (a, 1), a = 0, 1, 2,
# indexed by the (sorted) insertion pair. These six columns are exactly the
# admissible pairs at b = 1. Classes (a, 1) with a > 2 vanish for any
# insertions, and classes (a, 0) admit a single codim-2 insertion with
# I(T3) = 3/a^2, I(T4) = 0, I(T5) = -3/a^2.
_A1_TABLE = {
    0: {(3, 8): 0, (4, 8): 0, (5, 8): 1, (6, 6): 0, (6, 7): 0, (7, 7): 1},
    1: {(3, 8): 1, (4, 8): 2, (5, 8): 1, (6, 6): 1, (6, 7): 2, (7, 7): -2},
    2: {(3, 8): 1, (4, 8): 0, (5, 8): 0, (6, 6): 4, (6, 7): -2, (7, 7): 1},
}


def _hilb_base_case(cls: CurveClass, ins: tuple):
    a, b = cls
    if b == 0:
        if ins == (3,):
            return rat(3, a * a)
        if ins == (4,):
            return RAT_ZERO
        if ins == (5,):
            return rat(-3, a * a)
        return None
    if b == 1:
        if a > 2:
            return RAT_ZERO
        if len(ins) == 2:
            val = _A1_TABLE[a].get(ins)
            if val is not None:
                return rat(val)
        return None
    return None


def _p2_base_case(cls: CurveClass, ins: tuple):
    (d,) = cls
    if d == 1 and ins == (2, 2):
        return RAT_ONE
    return None


@lru_cache(maxsize=None)
def hilb_datum() -> TargetDatum:
    """Datum for the Hilbert scheme of two points in the plane."""
    return TargetDatum(
        name="hilb2p2",
        dim=4,
        codims=(0, 1, 1, 2, 2, 2, 3, 3, 4),
        divisors=(1, 2),
        cup_table=build_cup_table(),
        dual=(8, 7, 6, 5, 4, 3, 2, 1, 0),
        anticanonical=(0, 3),
        decompositions={
            3: ((1, 1, 1),),
            4: ((1, 2, 1), (1, 1, -2)),
            5: ((1, 1, 1), (1, 2, -1), (2, 2, 1)),
            6: ((1, 4, 1),),
            7: ((1, 4, -2), (1, 5, 1)),
            8: ((1, 7, 1),),
        },
        base_case=_hilb_base_case,
        rank=2,
    )


@lru_cache(maxsize=None)
def p2_datum() -> TargetDatum:
    """Datum for the projective plane: basis (1, H, point), classes (d,).

    Running the engine on this datum reproduces the counts of rational plane
    curves through 3d - 1 general points, which an independent closed
    recursion also computes; agreement of the two is a standing cross-check.
    """
    zero = (RAT_ZERO, RAT_ZERO, RAT_ZERO)
    one, h, pt = (
        (RAT_ONE, RAT_ZERO, RAT_ZERO),
        (RAT_ZERO, RAT_ONE, RAT_ZERO),
        (RAT_ZERO, RAT_ZERO, RAT_ONE),
    )
    table = (
        (one, h, pt),
        (h, pt, zero),
        (pt, zero, zero),
    )
    return TargetDatum(
        name="p2",
        dim=2,
        codims=(0, 1, 2),
        divisors=(1,),
        cup_table=table,
        dual=(2, 1, 0),
        anticanonical=(3,),
        decompositions={2: ((1, 1, 1),)},
        base_case=_p2_base_case,
        rank=1,
    )


# --------------------------------------------------------------------------
# Convenience functions bound to the Hilbert-scheme datum
# --------------------------------------------------------------------------


def cup(u: CohVector, v: CohVector) -> CohVector:
    return hilb_datum().cup(u, v)


def dual_index(e: int) -> int:
    return hilb_datum().dual_index(e)


def integrate(v: CohVector):
    return hilb_datum().integrate(v)


def decompose(m: int) -> tuple:
    return hilb_datum().decompose(m)


def basis_vector(e: int) -> CohVector:
    return hilb_datum().basis_vector(e)
