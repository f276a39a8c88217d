"""The closed recursion for rational plane curves, and its agreement with
the generic engine run on the plane."""

import pytest

from hilb2gw import Engine, engine_nd, kontsevich_nd, p2_datum
from hilb2gw.fixtures import RATIONAL_PLANE_COUNTS


def test_closed_recursion_values():
    for d, want in RATIONAL_PLANE_COUNTS.items():
        assert kontsevich_nd(d) == want, d


def test_closed_recursion_rejects_nonpositive():
    with pytest.raises(ValueError):
        kontsevich_nd(0)
    with pytest.raises(ValueError):
        kontsevich_nd(-3)


def test_engine_agrees_with_recursion_small_degrees():
    eng = Engine(p2_datum())
    for d in range(1, 6):
        assert engine_nd(d, eng) == kontsevich_nd(d), d


def test_engine_nd_requires_plane_engine():
    with pytest.raises(ValueError):
        engine_nd(2, Engine())  # two-parameter target, wrong shape


def test_counts_are_positive_integers():
    for d in range(1, 8):
        value = kontsevich_nd(d)
        assert value > 0 and value.denominator == 1
