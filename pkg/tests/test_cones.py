import random

import pytest

from tropint.cones import (
    Cone,
    cone_from_rays,
    cone_intersection,
    cones_meet_translated,
    quotient_primitive_generator,
)
from tropint.errors import TropintError
from tropint.lattice import dot, vsub


def check_double_description(cone):
    """V- and H-representations must describe the same set."""
    from tropint.lattice import matrix_rank

    for r in cone.rays:
        assert all(dot(e, r) == 0 for e in cone.span_eqs)
        assert all(dot(a, r) >= 0 for a in cone.facets)
    for l in cone.lineality:
        assert all(dot(e, l) == 0 for e in cone.span_eqs)
        assert all(dot(a, l) == 0 for a in cone.facets)
    # every facet supports a face of dimension exactly dim - 1
    for a in cone.facets:
        tight = [r for r in cone.rays if dot(a, r) == 0] + list(cone.lineality)
        assert matrix_rank(tight) == cone.dim - 1
        assert any(dot(a, r) > 0 for r in cone.rays)


def test_quadrant_from_scaled_rays():
    c = cone_from_rays([(2, 0), (0, 3)])
    assert c.rays == ((0, 1), (1, 0))
    assert sorted(c.facets) == [(0, 1), (1, 0)]
    assert c.dim == 2
    check_double_description(c)


def test_line_has_lineality():
    c = cone_from_rays([(1, 0), (-1, 0)])
    assert c.rays == ()
    assert c.lineality == ((1, 0),)
    assert c.dim == 1
    check_double_description(c)


def test_redundant_ray_removed():
    c = cone_from_rays([(1, 0), (1, 1), (0, 1)])
    assert c.rays == ((0, 1), (1, 0))
    assert c.contains((1, 1))
    check_double_description(c)


def test_zero_cone():
    c = cone_from_rays([], ambient_dim=2)
    assert c.dim == 0
    assert c.contains((0, 0))
    assert not c.contains((1, 0))


def test_halfspace_cone():
    c = Cone.from_inequalities([(1, 0)], ambient_dim=2)
    assert c.lineality == ((0, 1),)
    assert c.rays == ((1, 0),)
    check_double_description(c)


def test_intersection_idempotent():
    q = cone_from_rays([(1, 0), (0, 1)])
    assert cone_intersection(q, q) == q


def test_intersection_shared_ray():
    c1 = cone_from_rays([(1, 0), (1, 1)])
    c2 = cone_from_rays([(1, 1), (0, 1)])
    i = cone_intersection(c1, c2)
    assert i.rays == ((1, 1),)
    assert i.dim == 1


def test_intersection_opposite_rays():
    c1 = cone_from_rays([(1, 0)])
    c2 = cone_from_rays([(-1, 0)])
    i = cone_intersection(c1, c2)
    assert i.dim == 0


def test_faces_of_quadrant():
    q = cone_from_rays([(1, 0), (0, 1)])
    faces = q.faces()
    assert sorted(f.dim for f in faces) == [0, 1, 1, 2]


def test_faces_of_nonsimplicial():
    c = cone_from_rays([(1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 1, 1)])
    faces = c.faces()
    assert sorted(f.dim for f in faces) == [0, 1, 1, 1, 1, 2, 2, 2, 2, 3]
    check_double_description(c)


def test_unimodularity():
    assert cone_from_rays([(1, 0), (0, 1)]).is_unimodular()
    assert not cone_from_rays([(1, 0), (1, 2)]).is_unimodular()
    # cone over a square: four extreme rays, not simplicial
    square = cone_from_rays([(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)])
    assert len(square.rays) == 4
    assert not square.is_unimodular()


def test_product_cone():
    a = cone_from_rays([(1,), (-1,)])
    b = cone_from_rays([(1, 0), (0, 1)])
    p = a.product(b)
    assert p.ambient_dim == 3
    assert p.dim == 3
    assert p.lineality == ((1, 0, 0),)
    assert p.rays == ((0, 0, 1), (0, 1, 0))


def test_random_double_description_roundtrip():
    rng = random.Random(17)
    for _ in range(40):
        n = rng.randint(2, 4)
        k = rng.randint(1, 5)
        rays = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(k)]
        rays = [r for r in rays if any(r)]
        if not rays:
            continue
        c = cone_from_rays(rays, ambient_dim=n)
        check_double_description(c)
        for r in rays:
            assert c.contains(r)
        # round trip through the H-representation
        c2 = Cone.from_inequalities(c.facets, c.span_eqs, n)
        assert c2 == c


def test_meet_translated():
    r1 = cone_from_rays([(1, 0)])
    r2 = cone_from_rays([(0, -1)])
    assert cones_meet_translated(r1, r2, (2, 1))
    r3 = cone_from_rays([(0, 1)])
    assert not cones_meet_translated(r3, r3, (2, 1))


def test_quotient_generator_coordinate_cone():
    sigma = cone_from_rays([(1, 0), (0, 1)])
    tau = cone_from_rays([(0, 1)])
    image, lift = quotient_primitive_generator(sigma, tau)
    assert lift == (1, 0)
    assert sigma.contains(lift)


def test_quotient_generator_sheared():
    sigma = cone_from_rays([(0, 1), (-2, 1)])
    tau = cone_from_rays([(0, 1)])
    image, lift = quotient_primitive_generator(sigma, tau)
    # the image must be primitive in the quotient: the lift maps onto it,
    # not onto a proper multiple
    assert sigma.contains(lift)
    from tropint.lattice import QuotientLattice

    quo = QuotientLattice(tau.generators(), 2)
    assert quo.project(lift) == image
    from tropint.lattice import vgcd

    assert vgcd(image) == 1
    # (-2, 1) maps to twice a primitive vector, so the lift is a finer point
    assert quo.project((-2, 1)) == tuple(2 * x for x in image)


def test_quotient_generator_degenerate():
    sigma = cone_from_rays([(1, 0), (0, 1)])
    with pytest.raises(TropintError):
        quotient_primitive_generator(sigma, sigma)


def test_quotient_generator_lift_difference_in_tau():
    rng = random.Random(23)
    sigma = cone_from_rays([(1, 0, 0), (1, 2, 0), (1, 0, 3), (1, 1, 1)])
    for tau in sigma.faces():
        if tau.dim != sigma.dim - 1:
            continue
        image, lift = quotient_primitive_generator(sigma, tau)
        assert sigma.contains(lift)
        from tropint.lattice import QuotientLattice

        quo = QuotientLattice(tau.generators(), 3)
        assert quo.project(lift) == image
        # perturbing by tau lattice points must not change the image
        for _ in range(3):
            shift = lift
            for g in tau.rays:
                mult = rng.randint(0, 2)
                shift = tuple(a + mult * b for a, b in zip(shift, g))
            assert quo.project(shift) == image
