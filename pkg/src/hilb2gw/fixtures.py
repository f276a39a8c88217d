"""Frozen expected values for the headline computations.

These tables pin down every number the library is expected to reproduce:
the hyperelliptic invariants I(d, g, l) for l = 0, 1, 2, the corresponding
curve counts E(d, g), E^1(d, g), E^2(d, g), and the rational plane curve
counts N_d. Tests and the table-diff command compare live computations
against these constants; they are data, never consulted by the solvers.

Keys are (d, g) with 2 <= d <= 7 and 0 <= g <= d - 2.
"""

from __future__ import annotations

# I(d, g, 0) = I_{(d-g-1, d)}(T4^(3d+1))
INVARIANT_L0 = {
    (2, 0): 0,
    (3, 0): 0, (3, 1): 0,
    (4, 0): 405, (4, 1): 162, (4, 2): 27,
    (5, 0): 560385, (5, 1): 224910, (5, 2): 37935, (5, 3): 135,
    (6, 0): 1096808499, (6, 1): 460743174, (6, 2): 89898984,
    (6, 3): 3933549, (6, 4): 405,
    (7, 0): 3292618732704, (7, 1): 1470159619803, (7, 2): 338090337018,
    (7, 3): 29267016849, (7, 4): 539160678, (7, 5): 945,
}

# E(d, g): hyperelliptic plane curves of degree d and genus g through
# 3d + 1 general points
COUNT_L0 = {
    (2, 0): 0,
    (3, 0): 0, (3, 1): 0,
    (4, 0): 0, (4, 1): 0, (4, 2): 27,
    (5, 0): 0, (5, 1): 0, (5, 2): 36855, (5, 3): 135,
    (6, 0): 0, (6, 1): 0, (6, 2): 58444767, (6, 3): 3929499, (6, 4): 405,
    (7, 0): 0, (7, 1): 0, (7, 2): 122824720116, (7, 3): 23875461099,
    (7, 4): 539149338, (7, 5): 945,
}

# I(d, g, 1) = I_{(d-g-1, d)}(T4^(3d-2) * T8)
INVARIANT_L1 = {
    (2, 0): 0,
    (3, 0): 4, (3, 1): 1,
    (4, 0): 975, (4, 1): 255, (4, 2): 5,
    (5, 0): 500070, (5, 1): 147780, (5, 2): 10138, (5, 3): 12,
    (6, 0): 510209009, (6, 1): 172751014, (6, 2): 21081609,
    (6, 3): 558749, (6, 4): 22,
    (7, 0): 936943088028, (7, 1): 358483479813, (7, 2): 61683241918,
    (7, 3): 3685184208, (7, 4): 32184102, (7, 5): 35,
}

# E^1(d, g): one assigned point, 3d - 2 free points
COUNT_L1 = {
    (2, 0): 0,
    (3, 0): 0, (3, 1): 1,
    (4, 0): 0, (4, 1): 225, (4, 2): 5,
    (5, 0): 0, (5, 1): 87192, (5, 2): 10042, (5, 3): 12,
    (6, 0): 0, (6, 1): 57435240, (6, 2): 16612387, (6, 3): 558529,
    (6, 4): 22,
    (7, 0): 0, (7, 1): 60478511040, (7, 2): 33328207904,
    (7, 3): 3363345078, (7, 4): 32183682, (7, 5): 35,
}

# I(d, g, 2) = I_{(d-g-1, d)}(T4^(3d-5) * T8^2)
INVARIANT_L2 = {
    (2, 0): 1,
    (3, 0): 16, (3, 1): 1,
    (4, 0): 1279, (4, 1): 167, (4, 2): 1,
    (5, 0): 317408, (5, 1): 63228, (5, 2): 2536, (5, 3): 1,
    (6, 0): 187613888, (6, 1): 49635964, (6, 2): 4254399,
    (6, 3): 65417, (6, 4): 1,
    (7, 0): 222541278466, (7, 1): 72095337199, (7, 2): 9650092804,
    (7, 3): 402592233, (7, 4): 1900762, (7, 5): 1,
}

# E^2(d, g): two assigned points, 3d - 5 free points
COUNT_L2 = {
    (2, 0): 1,
    (3, 0): 12, (3, 1): 1,
    (4, 0): 620, (4, 1): 161, (4, 2): 1,
    (5, 0): 87304, (5, 1): 48032, (5, 2): 2528, (5, 3): 1,
    (6, 0): 26312976, (6, 1): 25417860, (6, 2): 3731098, (6, 3): 65407,
    (6, 4): 1,
    (7, 0): 14616808192, (7, 1): 22151587040, (7, 2): 6495881498,
    (7, 3): 383584667, (7, 4): 1900750, (7, 5): 1,
}

# N_d: rational plane curves of degree d through 3d - 1 general points;
# equals E^2(d, 0) for d >= 2
RATIONAL_PLANE_COUNTS = {
    1: 1,
    2: 1,
    3: 12,
    4: 620,
    5: 87304,
    6: 26312976,
    7: 14616808192,
}

INVARIANT_TABLES = {0: INVARIANT_L0, 1: INVARIANT_L1, 2: INVARIANT_L2}
COUNT_TABLES = {0: COUNT_L0, 1: COUNT_L1, 2: COUNT_L2}
