import pytest

from tropint.cones import Cone, cone_from_rays
from tropint.errors import FanInvalid, SupportMismatch
from tropint.fans import (
    Fan,
    common_refinement,
    fan_from_maximal,
    fan_is_complete,
    fan_validate,
    product_fan,
    refine_by_hyperplanes,
)

E1, E2 = (1, 0), (0, 1)


def p2_fan():
    """The complete fan with rays e1, e2, -e1-e2 (projective plane fan)."""
    return fan_from_maximal([E1, E2, (-1, -1)], [(0, 1), (1, 2), (2, 0)], 2)


def line_fan():
    return fan_from_maximal([(1,), (-1,)], [(0,), (1,)], 1)


def quadrant_fan():
    return fan_from_maximal(
        [E1, E2, (-1, 0), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)], 2
    )


def paper_c1_fan():
    return fan_from_maximal([(1, 0), (0, 1), (-1, -1)], [(0, 1), (1, 2), (2, 0)], 2)


def paper_c2_fan():
    return fan_from_maximal([(1, 0), (-2, 1), (0, -1)], [(0, 1), (1, 2), (2, 0)], 2)


def test_p2_fan_valid_and_counts():
    fan = p2_fan()
    # 1 zero cone + 3 rays + 3 maximal cones
    assert len(fan) == 7
    assert len(fan.cones(2)) == 3
    assert len(fan.cones(1)) == 3
    assert len(fan.cones(0)) == 1


def test_overlapping_cones_invalid():
    c1 = cone_from_rays([E1, E2])
    c2 = cone_from_rays([(1, 2), E1])
    with pytest.raises(FanInvalid):
        fan_validate([c1, c2])


def test_single_ray_fan():
    fan = fan_validate([cone_from_rays([E1])])
    assert len(fan) == 2
    assert not fan.is_complete()


def test_completeness():
    assert fan_is_complete(p2_fan())
    assert fan_is_complete(line_fan())
    assert fan_is_complete(quadrant_fan())
    incomplete = fan_validate([cone_from_rays([E1, E2])])
    assert not fan_is_complete(incomplete)


def test_completeness_agrees_with_membership_sampling():
    import random
    from fractions import Fraction

    rng = random.Random(41)
    for fan, expect in [
        (p2_fan(), True),
        (quadrant_fan(), True),
        (fan_validate([cone_from_rays([E1, E2])]), False),
    ]:
        assert fan.is_complete() is expect
        covered = all(
            fan.support_contains(
                (Fraction(rng.randint(-50, 50), 7), Fraction(rng.randint(-50, 50), 7))
            )
            for _ in range(1000)
        )
        # completeness implies full coverage; sampling can only refute
        if expect:
            assert covered


def test_product_fan_quadrants():
    f = product_fan(line_fan(), line_fan())
    assert f.ambient_dim == 2
    assert len(f.cones(2)) == 4
    assert f.is_complete()


def test_product_with_point_fan():
    point = Fan.from_cones([Cone.zero(0)], validate=False)
    f = p2_fan()
    prod = product_fan(f, point)
    assert prod.ambient_dim == 2
    assert len(prod.cones(2)) == 3


def test_product_fan_paper_example():
    prod = product_fan(paper_c1_fan(), paper_c2_fan())
    assert prod.ambient_dim == 4
    assert len(prod.cones(4)) == 9
    # nine two-dimensional cones come from products of rays
    ray_products = [
        c
        for c in prod.cones(2)
        if len(c.rays) == 2
        and any(r[:2] != (0, 0) and r[2:] == (0, 0) for r in c.rays)
        and any(r[:2] == (0, 0) and r[2:] != (0, 0) for r in c.rays)
    ]
    assert len(ray_products) == 9


def test_refine_by_diagonal():
    refined = refine_by_hyperplanes(quadrant_fan(), [(1, -1)])
    rays = {c.rays[0] for c in refined.cones(1)}
    assert (1, 1) in rays and (-1, -1) in rays
    assert len(refined.cones(2)) == 6
    assert refined.is_complete()
    assert refined.refines(quadrant_fan())


def test_refine_by_containing_hyperplane_is_noop():
    fan = fan_validate([cone_from_rays([E1, E2])])
    refined = refine_by_hyperplanes(fan, [(0, 1)])
    # hyperplane y = 0 contains the boundary ray only; the cone splits? no:
    # the quadrant lies in y >= 0 entirely, so nothing changes
    assert len(refined.cones(2)) == 1
    assert refined.maximal_cones()[0] == fan.maximal_cones()[0]


def test_common_refinement_idempotent():
    f = p2_fan()
    r = common_refinement(f, f)
    assert sorted(c.key() for c in r.maximal_cones()) == sorted(
        c.key() for c in f.maximal_cones()
    )


def test_common_refinement_paper_fans():
    # the two worked-example fans share the ray (1,0); their overlay has
    # five rays and five maximal cones
    r = common_refinement(paper_c1_fan(), paper_c2_fan())
    assert len(r.cones(1)) == 5
    assert len(r.cones(2)) == 5
    assert r.is_complete()
    assert r.refines(paper_c1_fan())
    assert r.refines(paper_c2_fan())


def test_common_refinement_line():
    f = line_fan()
    assert len(common_refinement(f, f).cones(1)) == 2


def test_common_refinement_support_mismatch():
    half = fan_validate([cone_from_rays([E1, E2])])
    with pytest.raises(SupportMismatch):
        common_refinement(half, p2_fan())


def test_minimal_cone_containing():
    fan = p2_fan()
    assert fan.minimal_cone_containing((0, 0)).dim == 0
    assert fan.minimal_cone_containing((1, 0)).dim == 1
    assert fan.minimal_cone_containing((2, 1)).dim == 2
    from fractions import Fraction

    assert fan.minimal_cone_containing((Fraction(1, 3), Fraction(1, 7))).dim == 2
