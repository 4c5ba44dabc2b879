"""Shared fan fixtures: the worked-example fans and a small catalog."""

import pytest

from tropint.fans import common_refinement, fan_from_maximal


def paper_c1_fan():
    """Complete fan with rays (1,0), (0,1), (-1,-1)."""
    return fan_from_maximal([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (2, 0)], 2)


def paper_c2_fan():
    """Complete fan with rays (1,0), (-2,1), (0,-1)."""
    return fan_from_maximal([(1, 0), (-2, 1), (0, -1)], [(0, 1), (1, 2), (2, 0)], 2)


def paper_common_fan():
    return common_refinement(paper_c1_fan(), paper_c2_fan())


def line_fan():
    return fan_from_maximal([(1,), (-1,)], [(0,), (1,)], 1)


def quadrant_fan():
    return fan_from_maximal(
        [(1, 0), (0, 1), (-1, 0), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)], 2
    )


def p2_fan():
    return paper_c1_fan()


def p3_fan():
    """The complete fan of projective 3-space."""
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)]
    maximal = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    return fan_from_maximal(rays, maximal, 3)


def octant_fan():
    """The fan of coordinate octants in R^3."""
    import itertools

    rays = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    maximal = []
    for sx, sy, sz in itertools.product((0, 1), repeat=3):
        maximal.append((sx, 2 + sy, 4 + sz))
    return fan_from_maximal(rays, maximal, 3)


@pytest.fixture(scope="session")
def paper_fans():
    f1 = paper_c1_fan()
    f2 = paper_c2_fan()
    return f1, f2, common_refinement(f1, f2)
