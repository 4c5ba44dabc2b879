"""Fans: face-closed, pairwise-compatible collections of rational cones.

Fans built by the refinement and product constructors are valid by
construction and skip the quadratic pairwise check; ``fan_validate`` runs
the full axioms on arbitrary cone lists.
"""

from .cones import Cone, double_description
from .errors import DimensionMismatch, FanInvalid, SupportMismatch, TropintError
from .lattice import dot, is_zero_vector, primitive, vneg


class Fan:
    """A finite collection of cones closed under faces with common-face intersections."""

    def __init__(self, ambient_dim, cones, incidence, maximal_keys):
        self.ambient_dim = ambient_dim
        self._cones = cones  # key -> Cone
        self._by_dim = {}
        for c in cones.values():
            self._by_dim.setdefault(c.dim, []).append(c)
        for lst in self._by_dim.values():
            lst.sort(key=lambda c: c.key())
        self._face_keys = incidence  # key -> frozenset of face keys (including itself)
        self.maximal_keys = maximal_keys
        self._covers = None
        self._cache = {}

    # -- construction --------------------------------------------------------

    @classmethod
    def from_cones(cls, cones, validate=True):
        """Close the cones under faces and (optionally) verify the fan axioms."""
        cones = list(cones)
        if not cones:
            raise TropintError("Fan.from_cones: need at least one cone")
        n = cones[0].ambient_dim
        for c in cones:
            if c.ambient_dim != n:
                raise DimensionMismatch("Fan.from_cones: mixed ambient dimensions")
        store = {}
        incidence = {}
        for c in cones:
            cls._close_faces(c, store, incidence)
        maximal = cls._maximal_of(store, incidence)
        if validate:
            maxlist = [store[k] for k in maximal]
            for i, c1 in enumerate(maxlist):
                for c2 in maxlist[i + 1:]:
                    inter = c1.intersect(c2)
                    k = inter.key()
                    if k not in incidence[c1.key()] or k not in incidence[c2.key()]:
                        raise FanInvalid(
                            "cones intersect in a non-face", (c1, c2, inter)
                        )
        return cls(n, store, incidence, maximal)

    @staticmethod
    def _close_faces(cone, store, incidence):
        """Add a cone and all its faces; face-of-face incidence comes from the
        parent lattice (faces of a face are the parent faces it contains), so
        only the top cone ever computes an H-representation."""
        key = cone.key()
        if key in incidence:
            return
        faces = cone.faces()
        by_key = {}
        for f in faces:
            fkey = f.key()
            store.setdefault(fkey, f)
            by_key[fkey] = frozenset(f.rays)
        for fkey, rayset in by_key.items():
            if fkey in incidence:
                continue
            incidence[fkey] = frozenset(
                gkey for gkey, grays in by_key.items() if grays <= rayset
            )

    @staticmethod
    def _maximal_of(store, incidence):
        all_keys = set(store)
        non_maximal = set()
        for key in all_keys:
            non_maximal.update(incidence[key] - {key})
        return frozenset(all_keys - non_maximal)

    # -- access ----------------------------------------------------------------

    def cones(self, dim=None):
        if dim is None:
            out = []
            for d in sorted(self._by_dim):
                out.extend(self._by_dim[d])
            return out
        return list(self._by_dim.get(dim, []))

    def cones_of_codim(self, codim):
        return self.cones(self.ambient_dim - codim)

    def maximal_cones(self):
        return sorted((self._cones[k] for k in self.maximal_keys), key=lambda c: c.key())

    def __contains__(self, cone):
        return cone.key() in self._cones

    def get(self, key):
        return self._cones.get(key)

    def __len__(self):
        return len(self._cones)

    def dims(self):
        return sorted(self._by_dim)

    def faces_of(self, cone):
        return [self._cones[k] for k in sorted(self._face_keys[cone.key()])]

    def covers(self):
        """Pairs (tau, sigma) with tau a facet of sigma, as a key-indexed map."""
        if self._covers is None:
            cov = {}
            for c in self._cones.values():
                for fk in self._face_keys[c.key()]:
                    f = self._cones[fk]
                    if f.dim == c.dim - 1:
                        cov.setdefault(fk, []).append(c)
            for lst in cov.values():
                lst.sort(key=lambda c: c.key())
            self._covers = cov
        return self._covers

    def cones_containing(self, cone):
        """All fan cones having the given cone as a face."""
        key = cone.key()
        return sorted(
            (c for c in self._cones.values() if key in self._face_keys[c.key()]),
            key=lambda c: c.key(),
        )

    def minimal_cone_containing(self, point):
        """The unique cone whose relative interior contains the point, or None.

        Fans partition their support into relative interiors, so the
        containing cone of least dimension is the one sought.
        """
        best = None
        for c in self._cones.values():
            if (best is None or c.dim < best.dim) and c.contains(point):
                best = c
        return best

    def support_contains(self, point):
        return any(c.contains(point) for c in self.maximal_cones())

    def is_complete(self):
        """Exact completeness test via the pseudo-manifold criterion.

        Support equals R^n iff all maximal cones are full-dimensional, every
        ridge is a facet of exactly two maximal cones, and the dual graph of
        maximal cones is connected.
        """
        n = self.ambient_dim
        maxc = self.maximal_cones()
        if not maxc:
            return False
        if any(c.dim != n for c in maxc):
            return False
        if len(maxc) == 1:
            # a single full-dimensional cone covers R^n only if it is all of it
            return maxc[0].dim == len(maxc[0].lineality)
        ridge_count = {}
        adjacency = {c.key(): set() for c in maxc}
        for c in maxc:
            for fk in self._face_keys[c.key()]:
                if self._cones[fk].dim == n - 1:
                    ridge_count.setdefault(fk, []).append(c.key())
        for fk, owners in ridge_count.items():
            if len(owners) != 2:
                return False
            adjacency[owners[0]].add(owners[1])
            adjacency[owners[1]].add(owners[0])
        # connectivity of the dual graph
        seen = set()
        stack = [maxc[0].key()]
        while stack:
            k = stack.pop()
            if k in seen:
                continue
            seen.add(k)
            stack.extend(adjacency[k] - seen)
        return len(seen) == len(maxc)

    def is_unimodular(self):
        return all(c.is_unimodular() for c in self.maximal_cones())

    def refines(self, coarse):
        """Every cone of self is contained in a cone of coarse."""
        return all(
            any(c.contains_cone(m) for c in coarse.maximal_cones())
            for m in self.maximal_cones()
        )

    def support_equals(self, other):
        """Exact support comparison via arrangement refinement."""
        return _support_covered(self, other) and _support_covered(other, self)


def fan_validate(cones):
    """Face-close the cones and verify the fan axioms (FanInvalid on failure)."""
    return Fan.from_cones(cones, validate=True)


def fan_is_complete(fan):
    return fan.is_complete()


def fan_is_unimodular(fan):
    return fan.is_unimodular()


def product_fan(f1, f2):
    """The fan of all products of cones, on the direct sum of the ambients."""
    prods = []
    for c1 in f1.maximal_cones():
        for c2 in f2.maximal_cones():
            prods.append(c1.product(c2))
    return Fan.from_cones(prods, validate=False)


def refine_by_hyperplanes(fan, normals):
    """Refine every cone by the hyperplanes through the origin with the given normals."""
    pieces = [c for c in fan.maximal_cones()]
    for a in normals:
        a = tuple(a)
        if is_zero_vector(a):
            continue
        neg = vneg(a)
        next_pieces = []
        for c in pieces:
            vals = [dot(a, g) for g in c.generators()]
            if all(v >= 0 for v in vals) or all(v <= 0 for v in vals):
                next_pieces.append(c)
                continue
            for halfspace in (a, neg):
                piece = Cone.from_inequalities(
                    list(c.facets) + [halfspace], c.span_eqs, c.ambient_dim
                )
                if piece.dim == c.dim:
                    next_pieces.append(piece)
        pieces = next_pieces
    return Fan.from_cones(pieces, validate=False)


def common_refinement(f1, f2):
    """The fan of pairwise intersections; requires equal supports."""
    if f1.ambient_dim != f2.ambient_dim:
        raise DimensionMismatch("common_refinement: ambient dimensions differ")
    pieces = {}
    for c1 in f1.maximal_cones():
        for c2 in f2.maximal_cones():
            inter = c1.intersect(c2)
            pieces[inter.key()] = inter
    # keep the inclusion-maximal pieces
    plist = sorted(pieces.values(), key=lambda c: (-c.dim, c.key()))
    kept = []
    for p in plist:
        if not any(q.dim > p.dim and q.contains_cone(p) for q in kept):
            kept.append(p)
    result = Fan.from_cones(kept, validate=False)
    if not result.support_equals(f1) or not result.support_equals(f2):
        raise SupportMismatch("common_refinement: fans have different supports")
    return result


def _support_covered(fan_a, fan_b):
    """Whether the support of fan_a is contained in the support of fan_b."""
    hyperplanes = set()
    for c in fan_b.maximal_cones():
        for a in c.facets:
            hyperplanes.add(a)
        for e in c.span_eqs:
            hyperplanes.add(e)
    for c in fan_a.maximal_cones():
        sub = Fan.from_cones([c], validate=False)
        refined = refine_by_hyperplanes(sub, sorted(hyperplanes))
        for piece in refined.maximal_cones():
            if not any(m.contains_cone(piece) for m in fan_b.maximal_cones()):
                return False
    return True


def fan_from_maximal(rays, maximal_cone_indices, ambient_dim, validate=True):
    """Fan from a shared ray list and index lists for the maximal cones."""
    rays = [tuple(r) for r in rays]
    cones = []
    for idx in maximal_cone_indices:
        cones.append(Cone.from_rays([rays[i] for i in idx], ambient_dim=ambient_dim))
    if not cones:
        cones = [Cone.zero(ambient_dim)]
    return Fan.from_cones(cones, validate=validate)


def star_quotient_fan(fan, tau):
    """Cones of fan containing tau, viewed in a fan around span(tau).

    Not the polyhedral-complex star (see polyhedra.star_fan): this keeps the
    ambient coordinates and returns the subfan of cones having tau as a face,
    which is what balancing and divisor computations consume.
    """
    cones = fan.cones_containing(tau)
    return Fan.from_cones(cones, validate=False)
