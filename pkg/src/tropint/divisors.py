"""Piecewise-linear functions on fans, the associated Weil divisor map, and
the Allermann-Rau intersection product on fans.

Two sign conventions coexist and both are exposed: ``divisor`` adds weights
with the Allermann-Rau sign, ``kappa`` is its negative (the toric
eta-pullback convention).  The AR product uses kappa with the diagonal
functions min(0, y_i - x_i); psi-class computations use divisor.
"""

from .cones import quotient_primitive_generator
from .errors import ContinuityViolation, NonIntegral, TropintError
from .fans import Fan, product_fan, refine_by_hyperplanes
from .lattice import dot, solve_rational, vadd, vscale
from .weights import (
    MinkowskiWeight,
    coarsen_weight,
    cross,
    pushforward_weight,
    refine_weight,
    unit_weight,
)


class PiecewiseLinearFunction:
    """Integer covectors per maximal domain cone, agreeing on shared faces.

    Functions on fans are homogeneous (zero at the origin).  The domain is a
    fan; on a subfan-supported function the uncovered cones simply have no
    covector.
    """

    def __init__(self, fan, covectors, check=True):
        self.fan = fan
        self.covectors = {}
        self._lookup = {}
        for key, m in covectors.items():
            if hasattr(key, "key"):
                key = key.key()
            m = tuple(m)
            if any(not isinstance(x, int) for x in m):
                raise NonIntegral("covector with non-integer entries", m)
            if fan.get(key) is None:
                raise TropintError("covector on a cone outside the fan")
            self.covectors[key] = m
        if check:
            self._check_continuity()

    def _check_continuity(self):
        keys = sorted(self.covectors)
        for i, k1 in enumerate(keys):
            c1 = self.fan.get(k1)
            m1 = self.covectors[k1]
            for k2 in keys[i + 1:]:
                c2 = self.fan.get(k2)
                m2 = self.covectors[k2]
                if m1 == m2:
                    continue
                shared = set(self.fan._face_keys[k1]) & set(self.fan._face_keys[k2])
                for fkey in shared:
                    face = self.fan.get(fkey)
                    for g in face.generators():
                        if dot(m1, g) != dot(m2, g):
                            raise ContinuityViolation(
                                "covectors disagree on a shared face", face
                            )

    @classmethod
    def from_ray_values(cls, fan, ray_values, domain_cones=None, check=True):
        """Linear extension of integer values at primitive ray generators.

        Only valid on simplicial cones; raises NonIntegral when no integer
        covector matches the requested values on some cone.
        """
        values = {tuple(r): v for r, v in ray_values.items()}
        if domain_cones is None:
            domain_cones = [
                c for c in fan.maximal_cones()
            ]
        covectors = {}
        for cone in domain_cones:
            if cone.lineality or len(cone.rays) != cone.dim:
                raise TropintError("from_ray_values: cone is not simplicial")
            vals = []
            for r in cone.rays:
                if r not in values:
                    raise TropintError(f"from_ray_values: missing value at ray {r}")
                vals.append(values[r])
            m = cls._integral_covector(cone.rays, vals, fan.ambient_dim)
            if m is None:
                raise NonIntegral("no integral covector extends the ray values", cone)
            covectors[cone.key()] = m
        return cls(fan, covectors, check=check)

    @staticmethod
    def _integral_covector(rays, values, n):
        from .lattice import solve_integer

        # solve <m, r_i> = v_i over the integers: unknown m has n entries
        A = tuple(tuple(r) for r in rays)
        return solve_integer(A, tuple(values))

    def covector_on(self, cone):
        """The covector of any maximal domain cone containing the given cone."""
        key = cone.key() if hasattr(cone, "key") else cone
        m = self.covectors.get(key)
        if m is not None:
            return m
        m = self._lookup.get(key)
        if m is not None:
            return m
        for ckey, cov in sorted(self.covectors.items()):
            if key in self.fan._face_keys[ckey]:
                self._lookup[key] = cov
                return cov
        raise TropintError("covector_on: cone not covered by the function domain")

    def value(self, point):
        """Evaluate at a point of the domain support."""
        for ckey, m in sorted(self.covectors.items()):
            if self.fan.get(ckey).contains(point):
                return dot(m, point)
        raise TropintError("value: point outside the function domain")

    def __neg__(self):
        return PiecewiseLinearFunction(
            self.fan, {k: vscale(-1, m) for k, m in self.covectors.items()}, check=False
        )


class MixedMinkowskiWeight:
    """A balanced weight together with a PL function on its support."""

    def __init__(self, weight, function):
        self.weight = weight
        self.function = function
        for key in weight.weights:
            cone = weight.fan.get(key)
            function.covector_on(cone)  # raises when uncovered

    def __repr__(self):
        return f"MixedMinkowskiWeight({self.weight!r})"


def support(c):
    """The face-closed subfan where the weight is nonzero (None when zero)."""
    return c.support_fan()


def make_mixed(c, values_or_function):
    """Validated (weight, function) pair; accepts ray values on simplicial support."""
    if isinstance(values_or_function, PiecewiseLinearFunction):
        return MixedMinkowskiWeight(c, values_or_function)
    sup = c.support_fan()
    domain = sup.maximal_cones() if sup is not None else []
    domain = [c.fan.get(x.key()) for x in domain]
    f = PiecewiseLinearFunction.from_ray_values(c.fan, values_or_function, domain)
    return MixedMinkowskiWeight(c, f)


def divisor(c, f, check=True):
    """Associated Weil divisor with the Allermann-Rau sign convention.

    divisor(c, f)(tau) = sum_sigma c(sigma) f(w_sigma) - f_tau(sum_sigma
    c(sigma) w_sigma) over the cones sigma covering tau, where w_sigma lifts
    the primitive quotient generator and f_tau extends f linearly off tau.
    Each f(w_sigma) is evaluated with sigma's own covector, which makes the
    value independent of the particular lifts.
    """
    fan = c.fan
    if f.fan is not fan and sorted(k for k in f.fan._cones) != sorted(
        k for k in fan._cones
    ):
        raise TropintError("divisor: function domain fan differs from the weight fan")
    k = c.codim
    dim = fan.ambient_dim - k
    cache = fan._cache
    covers = fan.covers()
    out = {}
    for tau in fan.cones(dim - 1):
        tkey = tau.key()
        total = 0
        lift_sum = None
        touched = False
        for sigma in covers.get(tkey, []):
            w = c.weights.get(sigma.key(), 0)
            if w == 0:
                continue
            touched = True
            qkey = ("qpg", sigma.key(), tkey)
            if qkey in cache:
                _, lift = cache[qkey]
            else:
                img, lift = quotient_primitive_generator(sigma, tau)
                cache[qkey] = (img, lift)
            m_sigma = f.covector_on(sigma)
            total += w * dot(m_sigma, lift)
            contrib = vscale(w, lift)
            lift_sum = contrib if lift_sum is None else vadd(lift_sum, contrib)
        if not touched:
            continue
        m_tau = f.covector_on(tau)
        val = total - dot(m_tau, lift_sum)
        if val:
            out[tkey] = val
    return MinkowskiWeight(fan, k + 1, out, check=check)


def kappa(c, f, check=True):
    """The toric-convention map: kappa(c, f) = -divisor(c, f)."""
    d = divisor(c, f, check=False)
    return MinkowskiWeight(
        d.fan, d.codim, {k: -v for k, v in d.weights.items()}, check=check
    )


def iterated_kappa(c, functions, convention="kappa", check=True):
    """Left-to-right fold of kappa (or divisor) over a list of functions."""
    op = kappa if convention == "kappa" else divisor
    acc = c
    for i, f in enumerate(functions):
        last = i == len(functions) - 1
        acc = op(acc, f, check=check and last)
    return acc


def weil_divisor_of_function(f):
    """kappa(unit weight, f) on a complete fan."""
    u = unit_weight(f.fan)
    return kappa(u, f)


def chi_functions(refined_product_fan, n):
    """The diagonal comparison functions chi_i = min(0, y_i - x_i) in R^{2n}.

    Assumes every maximal cone of the fan lies on one side of each
    hyperplane y_i = x_i (arrange with refine_by_hyperplanes first).
    """
    out = []
    for i in range(n):
        covector_neg = tuple(
            (-1 if j == i else 0) for j in range(n)
        ) + tuple((1 if j == i else 0) for j in range(n))
        covs = {}
        for cone in refined_product_fan.maximal_cones():
            vals = [dot(covector_neg, g) for g in cone.generators()]
            if all(v >= 0 for v in vals):
                covs[cone.key()] = (0,) * (2 * n)
            elif all(v <= 0 for v in vals):
                covs[cone.key()] = covector_neg
            else:
                raise TropintError(
                    "chi_functions: fan not refined along the diagonal hyperplanes"
                )
        out.append(PiecewiseLinearFunction(refined_product_fan, covs, check=False))
    return out


def diagonal_hyperplane_normals(n):
    return [
        tuple((-1 if j == i else 0) for j in range(n))
        + tuple((1 if j == i else 0) for j in range(n))
        for i in range(n)
    ]


def ar_machinery(f1, f2):
    """The refined product fan and chi functions for a pair of complete fans.

    Cached on f1 so a catalog of weight pairs reuses the construction.
    """
    key = ("ar", id(f2))
    if key in f1._cache:
        return f1._cache[key]
    n = f1.ambient_dim
    pfan = product_fan(f1, f2)
    refined = refine_by_hyperplanes(pfan, diagonal_hyperplane_normals(n))
    chis = chi_functions(refined, n)
    f1._cache[key] = (pfan, refined, chis)
    return pfan, refined, chis


def ar_product_fans(c1, c2, check=True):
    """The Allermann-Rau product of fan-supported weights, on the fan of c1.

    Crosses the weights, cuts with the diagonal functions chi_1..chi_n under
    the kappa convention, and pushes forward along the first projection; by
    the equivalence theorem the result is the cup product.
    """
    f1, f2 = c1.fan, c2.fan
    n = f1.ambient_dim
    if f2.ambient_dim != n:
        raise TropintError("ar_product_fans: ambient dimensions differ")
    if not (f1.is_complete() and f2.is_complete()):
        raise TropintError("ar_product_fans: both fans must be complete")
    pfan, refined, chis = ar_machinery(f1, f2)
    crossed = cross(c1, c2, pfan=pfan)
    moved = refine_weight(crossed, refined)
    cut = iterated_kappa(moved, chis, convention="kappa", check=False)
    projection = tuple(
        tuple((1 if j == i else 0) for j in range(2 * n)) for i in range(n)
    )
    # target fan: refine f1 by every facet hyperplane of the projected cones
    hyperplanes = set()
    for key in cut.weights:
        image = _project_cone(projection, refined.get(key))
        for a in image.facets:
            hyperplanes.add(a)
        for e in image.span_eqs:
            hyperplanes.add(e)
    ckey = ("ar-target", tuple(sorted(hyperplanes)))
    if ckey in f1._cache:
        target = f1._cache[ckey]
    else:
        target = refine_by_hyperplanes(f1, sorted(hyperplanes))
        f1._cache[ckey] = target
    pushed = pushforward_weight(projection, cut, target, check=False)
    result = coarsen_weight(pushed, f1)
    if check:
        from .weights import check_balancing

        violations = check_balancing(f1, result.codim, result.weights)
        if violations:
            raise TropintError("ar_product_fans: unbalanced result", violations)
    return result


def _project_cone(h, cone):
    from .weights import map_cone

    return map_cone(h, cone)
