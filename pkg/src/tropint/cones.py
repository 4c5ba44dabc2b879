"""Rational polyhedral cones with exact V- and H-representations.

The double description method is run with integer arithmetic only: rays are
kept primitive, adjacency is decided combinatorially from tight sets, and
lineality is tracked as an explicit basis so non-pointed cones work
throughout.  All outputs are canonically ordered, making cones hashable and
comparisons exact.
"""

from fractions import Fraction

from .errors import DimensionMismatch, TropintError
from .lattice import (
    clear_denominators,
    dot,
    hnf_rows,
    identity_matrix,
    is_zero_vector,
    matrix_rank,
    primitive,
    saturation_basis,
    smith_normal_form,
    solve_rational,
    vadd,
    vscale,
    vsub,
)


def double_description(ineqs, eqs, n):
    """Extreme rays and lineality basis of {x : ineqs.x >= 0, eqs.x = 0}.

    Constraints are inserted one at a time.  While the current lineality
    space is not orthogonal to the new constraint, a pivot lineality vector
    absorbs it; afterwards the usual Motzkin step combines adjacent rays
    across the new hyperplane.  Tight sets index processed inequalities
    only; equalities are tight for every survivor and carry no information.
    """
    lineality = [tuple(row) for row in identity_matrix(n)]
    rays = []  # (vector, frozenset of tight inequality indices)

    def cut_lineality(a, val_l, keep_pivot_as_ray, idx):
        pos = [i for i, v in enumerate(val_l) if v != 0]
        i0 = min(pos, key=lambda i: abs(val_l[i]))
        l0, v0 = lineality[i0], val_l[i0]
        if v0 < 0:
            l0, v0 = vscale(-1, l0), -v0
        new_lin = []
        for i, l in enumerate(lineality):
            if i == i0:
                continue
            if val_l[i] == 0:
                new_lin.append(l)
            else:
                new_lin.append(primitive(vsub(vscale(v0, l), vscale(val_l[i], l0))))
        new_rays = []
        for r, tight in rays:
            v = dot(a, r)
            if v == 0:
                new_rays.append((r, tight | ({idx} if idx is not None else frozenset())))
            else:
                # slide the ray into the hyperplane along the pivot direction
                adj = primitive(vsub(vscale(v0, r), vscale(v, l0)))
                new_rays.append((adj, tight | ({idx} if idx is not None else frozenset())))
        if keep_pivot_as_ray:
            new_rays.append((l0, frozenset(range(idx))))
        return new_lin, new_rays

    def motzkin(a, idx):
        vals = [dot(a, r) for r, _ in rays]
        plus = [i for i, v in enumerate(vals) if v > 0]
        zero = [i for i, v in enumerate(vals) if v == 0]
        minus = [i for i, v in enumerate(vals) if v < 0]
        keep = []
        for i in plus:
            keep.append(rays[i])
        for i in zero:
            r, tight = rays[i]
            keep.append((r, tight | ({idx} if idx is not None else frozenset())))
        new = []
        for ip in plus:
            rp, zp = rays[ip]
            for im in minus:
                rm, zm = rays[im]
                common = zp & zm
                adjacent = True
                for k, (r, z) in enumerate(rays):
                    if k in (ip, im):
                        continue
                    if z >= common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vec = primitive(vsub(vscale(vals[ip], rm), vscale(vals[im], rp)))
                tight = common | ({idx} if idx is not None else frozenset())
                new.append((vec, tight))
        if idx is None:
            return keep + new
        return keep + new

    # equalities first: they only shrink the lineality or slice the rays
    for a in eqs:
        a = tuple(a)
        if is_zero_vector(a):
            continue
        val_l = [dot(a, l) for l in lineality]
        if any(v != 0 for v in val_l):
            lineality, rays = cut_lineality(a, val_l, keep_pivot_as_ray=False, idx=None)
        else:
            rays = motzkin(a, None)
            rays = [(r, z) for (r, z) in rays if dot(a, r) == 0]

    processed = 0
    for a in ineqs:
        a = tuple(a)
        if is_zero_vector(a):
            continue
        idx = processed
        val_l = [dot(a, l) for l in lineality]
        if any(v != 0 for v in val_l):
            lineality, rays = cut_lineality(a, val_l, keep_pivot_as_ray=True, idx=idx)
        else:
            rays = motzkin(a, idx)
        processed += 1

    return [r for r, _ in rays], lineality


def _canonical_lineality(vectors, n):
    if not vectors:
        return ()
    return tuple(saturation_basis(vectors, n))


def _project_to_span(vec, span_rows):
    """Orthogonal projection of vec onto the row span, as Fractions."""
    coeffs = _lsq_coeffs(vec, span_rows)
    proj = [Fraction(0)] * len(vec)
    for c, row in zip(coeffs, span_rows):
        for i, x in enumerate(row):
            proj[i] += c * x
    return tuple(proj)


def _lsq_coeffs(vec, rows):
    # solve (rows . rows^T) c = rows . vec exactly
    m = len(rows)
    gram = [[Fraction(dot(rows[i], rows[j])) for j in range(m)] for i in range(m)]
    rhs = [Fraction(dot(rows[i], vec)) for i in range(m)]
    for col in range(m):
        piv = next(r for r in range(col, m) if gram[r][col] != 0)
        gram[col], gram[piv] = gram[piv], gram[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        pv = gram[col][col]
        gram[col] = [x / pv for x in gram[col]]
        rhs[col] /= pv
        for r in range(m):
            if r != col and gram[r][col] != 0:
                f = gram[r][col]
                gram[r] = [a - f * b for a, b in zip(gram[r], gram[col])]
                rhs[r] -= f * rhs[col]
    return rhs


class Cone:
    """A rational polyhedral cone with canonical exact representations.

    ``rays`` are the primitive extreme ray generators (sorted), ``lineality``
    a canonical basis of the largest linear subspace contained in the cone.
    Facet inequalities and span equations are computed on first use.
    """

    __slots__ = (
        "ambient_dim",
        "rays",
        "lineality",
        "_dim",
        "_facets",
        "_span_eqs",
        "_faces",
        "_span_basis",
    )

    def __init__(self, ambient_dim, rays, lineality, facets=None, span_eqs=None):
        self.ambient_dim = ambient_dim
        self.rays = tuple(sorted(rays))
        self.lineality = tuple(lineality)
        self._dim = None
        self._facets = tuple(sorted(facets)) if facets is not None else None
        self._span_eqs = tuple(span_eqs) if span_eqs is not None else None
        self._faces = None
        self._span_basis = None

    @classmethod
    def from_rays(cls, rays, lineality=(), ambient_dim=None):
        """Build a cone from (possibly redundant) generators."""
        rays = [tuple(r) for r in rays]
        lineality = [tuple(l) for l in lineality]
        if ambient_dim is None:
            if rays:
                ambient_dim = len(rays[0])
            elif lineality:
                ambient_dim = len(lineality[0])
            else:
                raise TropintError("Cone.from_rays: ambient dimension unknown")
        for v in rays + lineality:
            if len(v) != ambient_dim:
                raise DimensionMismatch("Cone.from_rays: mixed dimensions")
        gens = sorted({primitive(r) for r in rays if not is_zero_vector(r)})
        lin = [l for l in lineality if not is_zero_vector(l)]
        # dual cone of the generators gives the facets
        dual_ineqs = gens
        dual_eqs = lin
        dual_rays, dual_lin = double_description(dual_ineqs, dual_eqs, ambient_dim)
        facets, span_eqs = cls._canonicalize_h(dual_rays, dual_lin, gens, lin, ambient_dim)
        prim_rays, prim_lin = double_description(facets, span_eqs, ambient_dim)
        return cls(
            ambient_dim,
            rays=prim_rays,
            lineality=_canonical_lineality(prim_lin, ambient_dim),
            facets=facets,
            span_eqs=span_eqs,
        )

    @classmethod
    def from_inequalities(cls, ineqs, eqs=(), ambient_dim=None):
        """Build a cone from halfspaces and hyperplanes through the origin."""
        ineqs = [tuple(a) for a in ineqs]
        eqs = [tuple(a) for a in eqs]
        if ambient_dim is None:
            src = ineqs or eqs
            if not src:
                raise TropintError("Cone.from_inequalities: ambient dimension unknown")
            ambient_dim = len(src[0])
        rays, lin = double_description(ineqs, eqs, ambient_dim)
        return cls(ambient_dim, rays=rays, lineality=_canonical_lineality(lin, ambient_dim))

    @classmethod
    def zero(cls, ambient_dim):
        return cls(ambient_dim, rays=(), lineality=())

    @staticmethod
    def _canonicalize_h(dual_rays, dual_lin, gens, lin, n):
        """Facet normals projected into the span of the cone, plus span equations."""
        span_rows = [tuple(g) for g in gens] + [tuple(l) for l in lin]
        span_eqs = tuple(hnf_rows(saturation_basis(dual_lin, n))) if dual_lin else ()
        if not dual_rays:
            return (), span_eqs
        # independent subset of the span rows for projecting
        basis = []
        for row in span_rows:
            if matrix_rank(basis + [row]) > len(basis):
                basis.append(row)
        facets = set()
        full = len(basis) == n
        for s in dual_rays:
            if full:
                facets.add(primitive(s))
            else:
                proj = _project_to_span(s, basis)
                if all(x == 0 for x in proj):
                    continue
                facets.add(clear_denominators(proj))
        return tuple(sorted(facets)), span_eqs

    # -- basic structure ---------------------------------------------------

    def key(self):
        return (self.ambient_dim, self.rays, self.lineality)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        lin = f", lineality={list(self.lineality)}" if self.lineality else ""
        return f"Cone(dim={self.dim}, rays={list(self.rays)}{lin})"

    @property
    def dim(self):
        if self._dim is None:
            gens = list(self.rays) + list(self.lineality)
            self._dim = matrix_rank(gens) if gens else 0
        return self._dim

    def codim(self):
        return self.ambient_dim - self.dim

    @property
    def is_pointed(self):
        return not self.lineality

    def generators(self):
        return list(self.rays) + list(self.lineality) + [vscale(-1, l) for l in self.lineality]

    def _ensure_h(self):
        if self._facets is None or self._span_eqs is None:
            dual_rays, dual_lin = double_description(
                list(self.rays), list(self.lineality), self.ambient_dim
            )
            self._facets, self._span_eqs = self._canonicalize_h(
                dual_rays, dual_lin, list(self.rays), list(self.lineality), self.ambient_dim
            )

    @property
    def facets(self):
        self._ensure_h()
        return self._facets

    @property
    def span_eqs(self):
        self._ensure_h()
        return self._span_eqs

    def span_basis(self):
        if self._span_basis is None:
            rows = []
            for row in list(self.rays) + list(self.lineality):
                if matrix_rank(rows + [row]) > len(rows):
                    rows.append(row)
            self._span_basis = tuple(rows)
        return self._span_basis

    # -- predicates ---------------------------------------------------------

    def contains(self, point):
        if len(point) != self.ambient_dim:
            raise DimensionMismatch("Cone.contains: wrong point length")
        return all(dot(e, point) == 0 for e in self.span_eqs) and all(
            dot(a, point) >= 0 for a in self.facets
        )

    def contains_in_relint(self, point):
        return all(dot(e, point) == 0 for e in self.span_eqs) and all(
            dot(a, point) > 0 for a in self.facets
        )

    def contains_cone(self, other):
        return all(self.contains(g) for g in other.generators())

    def relint_point(self):
        """An integer point in the relative interior (0 for the zero cone)."""
        if not self.rays:
            return (0,) * self.ambient_dim
        acc = self.rays[0]
        for r in self.rays[1:]:
            acc = vadd(acc, r)
        return acc

    def is_unimodular(self):
        """Whether the primitive rays extend to a basis of the lattice."""
        if self.lineality:
            raise TropintError("is_unimodular: cone must be pointed")
        if len(self.rays) != self.dim:
            return False
        if not self.rays:
            return True
        snf = smith_normal_form(self.rays)
        return all(d == 1 for d in snf.diagonal)

    # -- constructions -------------------------------------------------------

    def intersect(self, other):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("cone_intersection: ambient dimensions differ")
        rays, lin = double_description(
            list(self.facets) + list(other.facets),
            list(self.span_eqs) + list(other.span_eqs),
            self.ambient_dim,
        )
        return Cone(
            self.ambient_dim, rays=rays, lineality=_canonical_lineality(lin, self.ambient_dim)
        )

    def faces(self):
        """All faces (self included), from the ray/facet incidence lattice."""
        if self._faces is not None:
            return self._faces
        facets = self.facets
        nrays = len(self.rays)
        incidences = [
            frozenset(j for j in range(nrays) if dot(a, self.rays[j]) == 0) for a in facets
        ]
        full = frozenset(range(nrays))
        seen = {full}
        stack = [full]
        while stack:
            cur = stack.pop()
            for inc in incidences:
                nxt = cur & inc
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        out = []
        for subset in seen:
            rays = tuple(self.rays[j] for j in sorted(subset))
            out.append(Cone(self.ambient_dim, rays=rays, lineality=self.lineality))
        out.sort(key=lambda c: (c.dim, c.rays))
        self._faces = tuple(out)
        return self._faces

    def product(self, other):
        """The product cone inside the direct sum of the ambient spaces."""
        n1, n2 = self.ambient_dim, other.ambient_dim
        z1, z2 = (0,) * n1, (0,) * n2
        rays = [r + z2 for r in self.rays] + [z1 + r for r in other.rays]
        lin = [l + z2 for l in self.lineality] + [z1 + l for l in other.lineality]
        self._ensure_h()
        other._ensure_h()
        facets = [a + z2 for a in self._facets] + [z1 + b for b in other._facets]
        span_eqs = [e + z2 for e in self._span_eqs] + [z1 + f for f in other._span_eqs]
        return Cone(n1 + n2, rays=rays, lineality=lin, facets=facets, span_eqs=span_eqs)


def cone_from_rays(rays, lineality=(), ambient_dim=None):
    return Cone.from_rays(rays, lineality, ambient_dim)


def cone_intersection(c1, c2):
    return c1.intersect(c2)


def cone_is_unimodular(c):
    return c.is_unimodular()


def cones_meet_translated(c1, c2, v):
    """Whether c1 and (c2 + v) have a common point, decided exactly.

    Feasibility of the inhomogeneous system is checked on the homogenization
    cone in one extra dimension: nonempty iff some generator has t > 0.
    """
    n = c1.ambient_dim
    ineqs = []
    eqs = []
    for a in c1.facets:
        ineqs.append(a + (0,))
    for e in c1.span_eqs:
        eqs.append(e + (0,))
    for b in c2.facets:
        ineqs.append(b + (-dot(b, v),))
    for f in c2.span_eqs:
        eqs.append(f + (-dot(f, v),))
    ineqs.append((0,) * n + (1,))
    rays, _lin = double_description(ineqs, eqs, n + 1)
    return any(r[n] > 0 for r in rays)


def quotient_primitive_generator(sigma, tau):
    """Primitive generator of the ray sigma/tau in N/N_tau, with a lift in sigma.

    Returns (image, lift): the image in the fixed quotient coordinates of
    N/N_tau, and an integer point of sigma projecting onto it.  Any two
    valid lifts differ by an element of N_tau.
    """
    from .lattice import QuotientLattice

    if sigma.ambient_dim != tau.ambient_dim:
        raise DimensionMismatch("quotient_primitive_generator: ambient dimensions differ")
    if sigma.dim != tau.dim + 1:
        raise TropintError("quotient_primitive_generator: tau is not a facet of sigma")
    quo = QuotientLattice(tau.generators(), tau.ambient_dim)
    images = []
    for r in sigma.rays:
        img = quo.project(r)
        if not is_zero_vector(img):
            images.append((r, img))
    for l in sigma.lineality:
        if not is_zero_vector(quo.project(l)):
            raise TropintError("quotient_primitive_generator: lineality not contained in tau")
    if not images:
        raise TropintError("quotient_primitive_generator: sigma equals tau in the quotient")
    g = primitive(images[0][1])
    mults = []
    for r, img in images:
        c = solve_rational([g], img)
        if c is None or c[0] <= 0:
            raise TropintError("quotient_primitive_generator: image of sigma is not a ray")
        mults.append((r, c[0]))
    # a generator already mapping onto the primitive image is the cheap lift
    for r, m in mults:
        if m == 1:
            return g, r
    w0 = quo.lift(g)
    if len(sigma.rays) + len(sigma.lineality) == sigma.dim:
        # simplicial: express the lift in the generator basis and push the
        # tau-coefficients up into the cone by adding tau's own rays
        basis = list(sigma.rays) + list(sigma.lineality)
        coeffs = solve_rational(basis, w0)
        if coeffs is None:
            raise TropintError("quotient_primitive_generator: lift solve failed")
        from math import ceil

        lift = w0
        tau_rays = set(tau.rays)
        for coeff, vec in zip(coeffs, basis):
            if vec in tau_rays and coeff < 0:
                lift = vadd(lift, vscale(ceil(-coeff), vec))
        return g, lift
    # general case: walk into the cone along an interior direction of tau
    s = tau.relint_point()
    lam = 0
    for a in sigma.facets:
        av = dot(a, s)
        aw = dot(a, w0)
        if av > 0 and aw < 0:
            lam = max(lam, (-aw + av - 1) // av)
    lift = vadd(w0, vscale(lam, s))
    if not sigma.contains(lift):
        raise TropintError("quotient_primitive_generator: lift construction failed")
    return g, lift
