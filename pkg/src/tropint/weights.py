"""Minkowski weights: balancing, the fan displacement cup product, degree,
cross products, refinement transfer, and pushforward along lattice maps.

Weights are stored sparsely (absent cone = 0) and keyed by canonical cone
keys, so equality of weights is dictionary equality.
"""

import random
from dataclasses import dataclass

from .cones import Cone, cones_meet_translated, quotient_primitive_generator
from .errors import DimensionMismatch, NotBalanced, TropintError
from .fans import Fan
from .lattice import (
    QuotientLattice,
    dot,
    is_zero_vector,
    lattice_index,
    mat_vec,
    matrix_rank,
    primitive,
    saturation_basis,
    solve_rational,
    vadd,
    INFINITE,
)


class MinkowskiWeight:
    """An integer weight on the codimension-k cones of a fan."""

    def __init__(self, fan, codim, weights, check=True):
        self.fan = fan
        self.codim = codim
        dim = fan.ambient_dim - codim
        cleaned = {}
        for key, w in weights.items():
            if isinstance(key, Cone):
                key = key.key()
            if w == 0:
                continue
            cone = fan.get(key)
            if cone is None:
                raise TropintError("weight on a cone outside the fan")
            if cone.dim != dim:
                raise TropintError(
                    f"weight on a cone of dimension {cone.dim}, expected {dim}"
                )
            cleaned[key] = w
        self.weights = cleaned
        if check:
            violations = check_balancing(fan, codim, cleaned)
            if violations:
                raise NotBalanced("weight is not balanced", violations)

    def __getitem__(self, cone):
        key = cone.key() if isinstance(cone, Cone) else cone
        return self.weights.get(key, 0)

    def __eq__(self, other):
        return (
            isinstance(other, MinkowskiWeight)
            and self.codim == other.codim
            and self.weights == other.weights
        )

    def __repr__(self):
        return f"MinkowskiWeight(codim={self.codim}, {len(self.weights)} cones)"

    def is_zero(self):
        return not self.weights

    def support_cones(self):
        return sorted((self.fan.get(k) for k in self.weights), key=lambda c: c.key())

    def support_fan(self):
        """The face-closed subfan of cones carrying nonzero weight."""
        cones = self.support_cones()
        if not cones:
            return None
        return Fan.from_cones(cones, validate=False)


def quotient_ray_image(fan, sigma, tau, cache=None):
    """Primitive generator of sigma/tau in the fixed N/N_tau coordinates."""
    key = ("qri", sigma.key(), tau.key())
    if cache is not None and key in cache:
        return cache[key]
    quo = quotient_for(fan, tau, cache)
    img = None
    for r in sigma.rays:
        p = quo.project(r)
        if not is_zero_vector(p):
            img = primitive(p)
            break
    if img is None:
        raise TropintError("quotient_ray_image: sigma projects to zero")
    if cache is not None:
        cache[key] = img
    return img


def quotient_for(fan, tau, cache=None):
    key = ("quo", tau.key())
    if cache is not None and key in cache:
        return cache[key]
    quo = QuotientLattice(tau.generators(), fan.ambient_dim)
    if cache is not None:
        cache[key] = quo
    return quo


def check_balancing(fan, codim, weights):
    """OK (empty list) or the list of (tau, defect) balancing violations.

    At each cone tau of codimension codim+1 the weighted sum of primitive
    quotient generators v_{sigma/tau} must vanish in N/N_tau.
    """
    dim = fan.ambient_dim - codim
    wmap = {}
    for key, w in weights.items():
        if isinstance(key, Cone):
            key = key.key()
        if w == 0:
            continue
        cone = fan.get(key)
        if cone is None or cone.dim != dim:
            raise TropintError("check_balancing: weight on a cone of wrong codimension")
        wmap[key] = w
    cache = fan._cache
    covers = fan.covers()
    violations = []
    for tau in fan.cones(dim - 1):
        total = None
        for sigma in covers.get(tau.key(), []):
            w = wmap.get(sigma.key(), 0)
            if w == 0:
                continue
            img = quotient_ray_image(fan, sigma, tau, cache)
            contrib = tuple(w * x for x in img)
            total = contrib if total is None else vadd(total, contrib)
        if total is not None and not is_zero_vector(total):
            violations.append((tau, total))
    return violations


def unit_weight(fan):
    """The fundamental codimension-0 weight of a complete fan."""
    if not fan.is_complete():
        raise TropintError("unit_weight: fan is not complete")
    return MinkowskiWeight(
        fan, 0, {c.key(): 1 for c in fan.cones(fan.ambient_dim)}, check=False
    )


def span_lattice_index(c1, c2):
    """The displacement multiplicity [N : N_c1 + N_c2].

    N_c is the saturated lattice of the span of c, so the index is computed
    from a union of saturated bases, never from raw ray generators.
    """
    n = c1.ambient_dim
    basis1 = saturation_basis(c1.generators(), n)
    basis2 = saturation_basis(c2.generators(), n)
    idx = lattice_index(list(basis1) + list(basis2), n)
    if idx is INFINITE:
        raise TropintError("span_lattice_index: spans are not jointly full-dimensional")
    return idx


@dataclass
class GenericVector:
    """A certified displacement vector.

    For every recorded pair, translating the second cone by v either misses
    the first cone or meets it with the two spans jointly full-dimensional.
    ``transverse`` holds the (key1, key2) pairs of the requested codimensions
    that do meet, with their lattice indices.
    """

    v: tuple
    transverse: dict
    checked_pairs: int = 0


def pick_generic_vector(fan, codim1, codim2, gamma=None, seed=0):
    """Deterministically sample a displacement vector and certify it.

    Candidates are drawn from a seeded stream with growing coordinate
    bounds.  The certificate covers all cone pairs of codimension at least
    (codim1, codim2) — a superset of the pairs the displacement rule sums
    over for any target cone, so one certified vector serves every gamma.
    """
    key = ("generic", codim1, codim2, seed)
    if key in fan._cache:
        return fan._cache[key]
    n = fan.ambient_dim
    side1 = [c for c in fan.cones() if c.codim() >= codim1]
    side2 = [c for c in fan.cones() if c.codim() >= codim2]
    exact1 = [c for c in side1 if c.codim() == codim1]
    exact2 = [c for c in side2 if c.codim() == codim2]
    spans = {}
    for c1 in side1:
        for c2 in side2:
            pkey = (c1.key(), c2.key())
            gens = list(c1.rays) + list(c1.lineality) + list(c2.rays) + list(c2.lineality)
            spans[pkey] = matrix_rank(gens) == n if gens else n == 0
    rng = random.Random(seed)
    bound = 4
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(n))
        ok = True
        transverse = {}
        for c1 in side1:
            if not ok:
                break
            for c2 in side2:
                meets = cones_meet_translated(c1, c2, v)
                if not meets:
                    continue
                if not spans[(c1.key(), c2.key())]:
                    ok = False
                    break
        if ok:
            for c1 in exact1:
                for c2 in exact2:
                    if spans[(c1.key(), c2.key())] and cones_meet_translated(c1, c2, v):
                        transverse[(c1.key(), c2.key())] = span_lattice_index(c1, c2)
            gv = GenericVector(v=v, transverse=transverse, checked_pairs=len(spans))
            fan._cache[key] = gv
            return gv
        bound += 2


def cup(c1, c2, seed=0):
    """Cup product of Minkowski weights by the fan displacement rule."""
    if c1.fan is not c2.fan:
        if sorted(c.key() for c in c1.fan.cones()) != sorted(
            c.key() for c in c2.fan.cones()
        ):
            raise TropintError("cup: weights live on different fans")
    fan = c1.fan
    if not fan.is_complete():
        raise TropintError("cup: fan must be complete")
    k1, k2 = c1.codim, c2.codim
    k = k1 + k2
    if k > fan.ambient_dim:
        raise TropintError("cup: total codimension exceeds the ambient dimension")
    gv = pick_generic_vector(fan, k1, k2, seed=seed)
    contributions = {}
    for (key1, key2), idx in gv.transverse.items():
        w = c1.weights.get(key1, 0) * c2.weights.get(key2, 0)
        if w == 0:
            continue
        contributions[(key1, key2)] = idx * w
    out = {}
    face_keys = fan._face_keys
    for gamma in fan.cones_of_codim(k):
        gkey = gamma.key()
        total = 0
        for (key1, key2), val in contributions.items():
            if gkey in face_keys[key1] and gkey in face_keys[key2]:
                total += val
        if total:
            out[gkey] = total
    return MinkowskiWeight(fan, k, out)


def degree(c):
    """The value of a top-codimension weight on the zero cone."""
    fan = c.fan
    if c.codim != fan.ambient_dim:
        raise TropintError("degree: weight is not of top codimension")
    zero = Cone.zero(fan.ambient_dim)
    return c[zero]


def cross(c1, c2, pfan=None):
    """The product weight on the product fan: (c1 x c2)(s1 x s2) = c1(s1) c2(s2)."""
    from .fans import product_fan

    if pfan is None:
        pfan = product_fan(c1.fan, c2.fan)
    out = {}
    for key1, w1 in c1.weights.items():
        cone1 = c1.fan.get(key1)
        for key2, w2 in c2.weights.items():
            cone2 = c2.fan.get(key2)
            prod = cone1.product(cone2)
            out[prod.key()] = w1 * w2
    return MinkowskiWeight(pfan, c1.codim + c2.codim, out, check=False)


def refine_weight(c, fine_fan):
    """Transfer a weight to a refinement of its fan."""
    coarse = c.fan
    k = c.codim
    dim = fine_fan.ambient_dim - k
    if fine_fan.ambient_dim != coarse.ambient_dim:
        raise DimensionMismatch("refine_weight: ambient dimensions differ")
    out = {}
    for cone in fine_fan.cones(dim):
        p = cone.relint_point()
        parent = coarse.minimal_cone_containing(p)
        if parent is None or not parent.contains_cone(cone):
            raise TropintError("refine_weight: fan is not a refinement")
        if parent.dim == dim:
            w = c.weights.get(parent.key(), 0)
            if w:
                out[cone.key()] = w
    return MinkowskiWeight(fine_fan, k, out, check=False)


def coarsen_weight(c, coarse_fan):
    """Inverse of refine_weight for weights that are constant on coarse cones."""
    from .errors import CoarseningError

    fine = c.fan
    k = c.codim
    dim = coarse_fan.ambient_dim - k
    values = {}
    for cone in fine.cones(dim):
        p = cone.relint_point()
        parent = coarse_fan.minimal_cone_containing(p)
        if parent is None:
            raise CoarseningError("coarsen_weight: fine cone outside the coarse fan")
        w = c.weights.get(cone.key(), 0)
        if parent.dim != dim:
            if w != 0:
                raise CoarseningError(
                    "coarsen_weight: nonzero weight interior to a higher-dimensional cone"
                )
            continue
        pkey = parent.key()
        if pkey in values and values[pkey] != w:
            raise CoarseningError("coarsen_weight: weight not constant on a coarse cone")
        values[pkey] = w
    return MinkowskiWeight(coarse_fan, k, {k2: v for k2, v in values.items() if v})


def map_cone(h, cone):
    """Image of a cone under an integer matrix, as a cone in the target."""
    rays = [mat_vec(h, r) for r in cone.rays]
    lin = [mat_vec(h, l) for l in cone.lineality]
    rays = [r for r in rays if not is_zero_vector(r)]
    lin = [l for l in lin if not is_zero_vector(l)]
    n_target = len(h)
    return Cone.from_rays(rays, lin, n_target)


def image_lattice_index(h, source_cone, target_cone):
    """[N' ∩ span(target) : h(N ∩ span(source))] for a dimension-preserving map."""
    n_t = target_cone.ambient_dim
    src_basis = saturation_basis(source_cone.generators(), source_cone.ambient_dim)
    tgt_basis = saturation_basis(target_cone.generators(), n_t)
    if len(src_basis) != len(tgt_basis):
        raise TropintError("image_lattice_index: dimension mismatch")
    if not src_basis:
        return 1
    coords = []
    for b in src_basis:
        img = mat_vec(h, b)
        coeffs = solve_rational(tgt_basis, img)
        if coeffs is None or any(x.denominator != 1 for x in coeffs):
            raise TropintError("image_lattice_index: image outside the target lattice")
        coords.append(tuple(int(x) for x in coeffs))
    idx = lattice_index(coords, len(tgt_basis))
    if idx is INFINITE:
        raise TropintError("image_lattice_index: image not of full rank")
    return idx


def pushforward_weight(h, c, target_fan, check=True):
    """Pushforward along h: weights transported with lattice-index multiplicity.

    A source cone contributes to every target cone of the same dimension
    contained in its image; cones whose image drops dimension contribute
    nothing.
    """
    h = tuple(tuple(row) for row in h)
    n_src = c.fan.ambient_dim
    n_tgt = len(h)
    if any(len(row) != n_src for row in h):
        raise DimensionMismatch("pushforward_weight: matrix shape mismatch")
    dim = n_src - c.codim
    out = {}
    for key, w in c.weights.items():
        sigma = c.fan.get(key)
        image = map_cone(h, sigma)
        if image.dim < dim:
            continue
        if not target_fan.support_contains(image.relint_point()):
            raise TropintError("pushforward_weight: image not supported on the target fan")
        idx_cache = None
        for tgt in target_fan.cones(dim):
            if image.contains_cone(tgt):
                if idx_cache is None:
                    idx_cache = image_lattice_index(h, sigma, image)
                out[tgt.key()] = out.get(tgt.key(), 0) + w * idx_cache
    out = {k2: v for k2, v in out.items() if v != 0}
    return MinkowskiWeight(target_fan, c.codim + n_tgt - n_src, out, check=check)


def balanced_weight_basis(fan, codim):
    """An integer basis of the lattice of balanced weights of given codimension.

    Solves the balancing system exactly: unknowns are the weights on the
    codimension-``codim`` cones, equations come from every quotient at the
    cones one dimension lower.
    """
    from .lattice import integer_kernel

    dim = fan.ambient_dim - codim
    cones = fan.cones(dim)
    index = {c.key(): i for i, c in enumerate(cones)}
    cache = fan._cache
    covers = fan.covers()
    rows = []
    for tau in fan.cones(dim - 1):
        quo = quotient_for(fan, tau, cache)
        qdim = quo.quotient_rank
        block = [[0] * len(cones) for _ in range(qdim)]
        touched = False
        for sigma in covers.get(tau.key(), []):
            img = quotient_ray_image(fan, sigma, tau, cache)
            j = index[sigma.key()]
            for i in range(qdim):
                block[i][j] += img[i]
            touched = True
        if touched:
            rows.extend(tuple(r) for r in block)
    if not rows:
        return [tuple(1 if i == j else 0 for j in range(len(cones))) for i in range(len(cones))], cones
    kernel = integer_kernel(tuple(rows))
    return kernel, cones


def random_balanced_weight(fan, codim, seed=0, span=3):
    """A seeded integer balanced weight drawn from the balancing kernel."""
    kernel, cones = balanced_weight_basis(fan, codim)
    rng = random.Random(seed)
    coeffs = [rng.randint(-span, span) for _ in kernel]
    vec = [0] * len(cones)
    for coef, basis in zip(coeffs, kernel):
        for i, x in enumerate(basis):
            vec[i] += coef * x
    weights = {c.key(): v for c, v in zip(cones, vec) if v != 0}
    return MinkowskiWeight(fan, codim, weights)
