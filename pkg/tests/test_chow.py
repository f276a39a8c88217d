"""Intersection-ring tests: the derived cup table against an independent
polynomial-quotient oracle, plus the structural validations the datum
promises."""

import pytest
import sympy

from hilb2gw.chow import build_cup_table, hilb_datum, p2_datum
from hilb2gw.rationals import rat


# ----------------------------------------------------------------------
# independent oracle: sympy Groebner reduction in the quotient ring
# ----------------------------------------------------------------------

_T1, _T2 = sympy.symbols("t1 t2")
_IDEAL = [_T1**3, _T2**3 - 3 * _T1 * _T2**2 + 6 * _T1**2 * _T2]
_BASIS_POLYS = [
    sympy.Integer(1),
    _T1,
    _T2,
    _T1**2,
    _T1 * _T2 - 2 * _T1**2,
    _T1**2 - _T1 * _T2 + _T2**2,
    _T1**2 * _T2,
    _T1 * _T2**2 - 3 * _T1**2 * _T2,
    _T1**2 * _T2**2,
]


def _oracle_cup_table():
    """Compute all 81 products with sympy and express them in the basis."""
    groebner = sympy.groebner(_IDEAL, _T1, _T2, order="grevlex")

    def normal_form(poly):
        return groebner.reduce(sympy.expand(poly))[1]

    # coordinates of each basis class in the normal-form monomials
    basis_nf = [sympy.Poly(normal_form(p), _T1, _T2) for p in _BASIS_POLYS]
    monomials = sorted({m for p in basis_nf for m in p.monoms()})
    mat = sympy.Matrix(
        [[p.coeff_monomial(m) for p in basis_nf] for m in monomials]
    )
    assert mat.shape == (9, 9) and mat.rank() == 9

    table = {}
    for e in range(9):
        for f in range(9):
            prod = sympy.Poly(
                normal_form(_BASIS_POLYS[e] * _BASIS_POLYS[f]), _T1, _T2
            )
            rhs = sympy.Matrix([prod.coeff_monomial(m) for m in monomials])
            coords = mat.solve(rhs)
            table[(e, f)] = tuple(
                rat(c.p, c.q) for c in (sympy.Rational(x) for x in coords)
            )
    return table


def cup_table_vs_oracle():
    """Exhaustive comparison; returns (failures, cells). Shared with acceptance."""
    datum = hilb_datum()
    oracle = _oracle_cup_table()
    failures = []
    for e in range(9):
        for f in range(9):
            if tuple(datum.cup_table[e][f]) != oracle[(e, f)]:
                failures.append(f"T{e} cup T{f}")
    return failures, 81


def test_cup_table_matches_polynomial_oracle():
    failures, cells = cup_table_vs_oracle()
    assert not failures, failures
    assert cells == 81


def test_cup_associativity_and_commutativity_exhaustive():
    datum = hilb_datum()
    basis = [datum.basis_vector(e) for e in range(9)]
    for e in range(9):
        for f in range(e, 9):
            assert datum.cup(basis[e], basis[f]) == datum.cup(basis[f], basis[e])
            for g in range(9):
                left = datum.cup(datum.cup(basis[e], basis[f]), basis[g])
                right = datum.cup(basis[e], datum.cup(basis[f], basis[g]))
                assert left == right, (e, f, g)


def test_pairing_is_the_duality_permutation():
    datum = hilb_datum()
    for e in range(9):
        for f in range(9):
            expected = 1 if f == datum.dual[e] else 0
            assert datum.integrate(datum.cup_basis(e, f)) == expected


def test_specific_classical_products():
    datum = hilb_datum()

    def vec(coeffs: dict):
        out = [rat(0)] * 9
        for k, v in coeffs.items():
            out[k] = rat(v)
        return tuple(out)

    assert datum.cup_basis(1, 1) == vec({3: 1})
    assert datum.cup_basis(1, 2) == vec({3: 2, 4: 1})
    assert datum.cup_basis(2, 2) == vec({3: 1, 4: 1, 5: 1})
    assert datum.cup_basis(1, 3) == vec({})
    assert datum.cup_basis(1, 4) == vec({6: 1})
    assert datum.cup_basis(1, 5) == vec({6: 2, 7: 1})
    assert datum.cup_basis(1, 7) == vec({8: 1})
    assert datum.cup_basis(2, 6) == vec({8: 1})
    assert datum.cup_basis(1, 8) == vec({})


def test_presentation_relations_vanish():
    datum = hilb_datum()
    t1 = datum.basis_vector(1)
    t2 = datum.basis_vector(2)
    zero = (rat(0),) * 9
    cup = datum.cup
    t1_sq = cup(t1, t1)
    t2_sq = cup(t2, t2)
    assert cup(t1_sq, t1) == zero
    lhs = cup(t2_sq, t2)
    mid = cup(cup(t1, t2), t2)
    top = cup(t1_sq, t2)
    combo = tuple(a - 3 * b + 6 * c for a, b, c in zip(lhs, mid, top))
    assert combo == zero


def test_decompositions_reproduce_basis_classes():
    datum = hilb_datum()
    for m, terms in datum.decompositions.items():
        total = [rat(0)] * 9
        for d, rho, c in terms:
            for i, x in enumerate(datum.cup_basis(d, rho)):
                total[i] += rat(c) * x
        assert tuple(total) == datum.basis_vector(m), m


def test_duality_violation_is_fatal():
    table = [list(map(list, row)) for row in build_cup_table()]
    table[1][7][8] = rat(2)  # corrupt the integral of T1 cup T7
    with pytest.raises(ValueError, match="pairing"):
        from hilb2gw.chow import TargetDatum, _hilb_base_case

        TargetDatum(
            name="broken",
            dim=4,
            codims=(0, 1, 1, 2, 2, 2, 3, 3, 4),
            divisors=(1, 2),
            cup_table=[[tuple(v) for v in row] for row in table],
            dual=(8, 7, 6, 5, 4, 3, 2, 1, 0),
            anticanonical=(0, 3),
            decompositions=hilb_datum().decompositions,
            base_case=_hilb_base_case,
            rank=2,
        )


def test_weight_budgets():
    hilb = hilb_datum()
    assert hilb.weight_budget((1, 4)) == 13
    assert hilb.weight_budget((3, 0)) == 1
    assert hilb.weight_budget((0, 1)) == 4
    p2 = p2_datum()
    assert p2.weight_budget((3,)) == 8
    assert p2.weight_budget((1,)) == 2


def test_splits_enumerates_proper_effective_pairs():
    datum = hilb_datum()
    got = set(datum.splits((2, 1)))
    want = {
        ((0, 1), (2, 0)),
        ((1, 0), (1, 1)),
        ((1, 1), (1, 0)),
        ((2, 0), (0, 1)),
    }
    assert got == want
    assert datum.splits((1, 0)) == ()


def test_p2_datum_ring():
    p2 = p2_datum()
    h = p2.basis_vector(1)
    pt = p2.basis_vector(2)
    assert p2.cup(h, h) == pt
    assert p2.cup(h, pt) == (rat(0),) * 3
    assert p2.integrate(pt) == 1
