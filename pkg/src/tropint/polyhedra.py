"""Exact rational polyhedra and polyhedral complexes.

A polyhedron is handled through its homogenization cone in one extra
coordinate: generators with positive last coordinate are vertices (scaled to
rational points), the rest are recession rays and lineality.  Empty
intersections are reported with the EMPTY sentinel, never as degenerate
objects.
"""

from fractions import Fraction
from math import lcm

from .cones import Cone
from .errors import DimensionMismatch, TropintError
from .lattice import (
    clear_denominators,
    dot,
    is_zero_vector,
    primitive,
    saturation_basis,
)


class _Empty:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EMPTY"

    def __bool__(self):
        return False


EMPTY = _Empty()


def _to_fraction_tuple(v):
    return tuple(Fraction(x) for x in v)


class Polyhedron:
    """A nonempty rational polyhedron, canonically represented.

    V-representation: minimal generating vertices (rational), recession rays
    (primitive integer) and lineality (canonical integer basis).
    H-representation: irredundant inequalities <a,x> <= b and equations
    <a,x> = b with primitive integer normals.
    """

    __slots__ = ("ambient_dim", "vertices", "rays", "lineality", "_cone", "_dim")

    def __init__(self, ambient_dim, vertices, rays, lineality, cone):
        self.ambient_dim = ambient_dim
        self.vertices = tuple(sorted(vertices))
        self.rays = tuple(sorted(rays))
        self.lineality = tuple(lineality)
        self._cone = cone  # homogenization cone in R^(n+1)
        self._dim = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_h(cls, ineqs, eqs=(), ambient_dim=None):
        """Polyhedron {x : <a,x> <= b for (a,b) in ineqs, = for eqs} or EMPTY."""
        ineqs = [(_to_fraction_tuple(a), Fraction(b)) for a, b in ineqs]
        eqs = [(_to_fraction_tuple(a), Fraction(b)) for a, b in eqs]
        if ambient_dim is None:
            src = ineqs or eqs
            if not src:
                raise TropintError("Polyhedron.from_h: ambient dimension unknown")
            ambient_dim = len(src[0][0])
        n = ambient_dim
        cone_ineqs = []
        cone_eqs = []
        for a, b in ineqs:
            row = tuple(-x for x in a) + (b,)
            cone_ineqs.append(clear_denominators(row) if any(row) else None)
        for a, b in eqs:
            row = tuple(-x for x in a) + (b,)
            if any(row):
                cone_eqs.append(clear_denominators(row))
        cone_ineqs = [r for r in cone_ineqs if r is not None]
        cone_ineqs.append((0,) * n + (1,))
        cone = Cone.from_inequalities(cone_ineqs, cone_eqs, n + 1)
        return cls._from_homogenization(cone, n)

    @classmethod
    def from_v(cls, vertices, rays=(), lineality=(), ambient_dim=None):
        """Polyhedron conv(vertices) + cone(rays) + span(lineality)."""
        vertices = [_to_fraction_tuple(v) for v in vertices]
        rays = [tuple(r) for r in rays]
        lineality = [tuple(l) for l in lineality]
        if ambient_dim is None:
            src = vertices or rays or lineality
            if not src:
                raise TropintError("Polyhedron.from_v: ambient dimension unknown")
            ambient_dim = len(src[0])
        if not vertices:
            raise TropintError("Polyhedron.from_v: at least one vertex required")
        n = ambient_dim
        gens = []
        for v in vertices:
            denom = 1
            for x in v:
                denom = lcm(denom, x.denominator)
            gens.append(tuple(int(x * denom) for x in v) + (denom,))
        for r in rays:
            gens.append(tuple(r) + (0,))
        lin = [tuple(l) + (0,) for l in lineality]
        cone = Cone.from_rays(gens, lin, n + 1)
        return cls._from_homogenization(cone, n)

    @classmethod
    def _from_homogenization(cls, cone, n):
        vertices = []
        rays = []
        for r in cone.rays:
            t = r[n]
            if t > 0:
                vertices.append(tuple(Fraction(x, t) for x in r[:n]))
            elif t == 0:
                rays.append(r[:n])
            else:
                raise TropintError("homogenization cone has a generator with t < 0")
        if not vertices:
            return EMPTY
        lineality = tuple(l[:n] for l in cone.lineality)
        return cls(n, vertices, rays, lineality, cone)

    @classmethod
    def from_cone(cls, cone):
        """A cone regarded as a polyhedron with vertex 0."""
        zero = (Fraction(0),) * cone.ambient_dim
        return cls.from_v([zero], cone.rays, cone.lineality, cone.ambient_dim)

    # -- representations ---------------------------------------------------

    def key(self):
        return (self.ambient_dim, self.vertices, self.rays, self.lineality)

    def __eq__(self, other):
        return isinstance(other, Polyhedron) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return (
            f"Polyhedron(dim={self.dim}, vertices={len(self.vertices)}, "
            f"rays={len(self.rays)}, lin={len(self.lineality)})"
        )

    @property
    def dim(self):
        if self._dim is None:
            self._dim = self._cone.dim - 1
        return self._dim

    def h_representation(self):
        """(ineqs, eqs) lists of (normal, rhs) pairs with primitive normals."""
        n = self.ambient_dim
        ineqs = []
        eqs = []
        for a in self._cone.facets:
            normal = tuple(-x for x in a[:n])
            if is_zero_vector(normal):
                continue  # the t >= 0 facet carries no x-constraint
            ineqs.append((normal, a[n]))
        for e in self._cone.span_eqs:
            normal = tuple(-x for x in e[:n])
            if is_zero_vector(normal):
                continue
            eqs.append((normal, e[n]))
        return ineqs, eqs

    def contains(self, point):
        point = _to_fraction_tuple(point)
        ineqs, eqs = self.h_representation()
        return all(dot(a, point) <= b for a, b in ineqs) and all(
            dot(a, point) == b for a, b in eqs
        )

    def contains_in_relint(self, point):
        point = _to_fraction_tuple(point)
        ineqs, eqs = self.h_representation()
        return all(dot(a, point) < b for a, b in ineqs) and all(
            dot(a, point) == b for a, b in eqs
        )

    def relative_interior_point(self):
        """Vertex barycenter plus the sum of the ray generators."""
        n = self.ambient_dim
        acc = [Fraction(0)] * n
        for v in self.vertices:
            for i, x in enumerate(v):
                acc[i] += x
        k = len(self.vertices)
        acc = [x / k for x in acc]
        for r in self.rays:
            for i, x in enumerate(r):
                acc[i] += x
        return tuple(acc)

    def intersect(self, other):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch("Polyhedron.intersect: dimensions differ")
        i1, e1 = self.h_representation()
        i2, e2 = other.h_representation()
        return Polyhedron.from_h(i1 + i2, e1 + e2, self.ambient_dim)

    def faces(self):
        """All faces, self included (each nonempty face of a polyhedron)."""
        n = self.ambient_dim
        out = []
        for cf in self._cone.faces():
            if any(r[n] > 0 for r in cf.rays):
                out.append(Polyhedron._from_homogenization(cf, n))
        out.sort(key=lambda p: (p.dim, p.key()))
        return out

    def translate(self, t):
        t = _to_fraction_tuple(t)
        return Polyhedron.from_v(
            [tuple(x + y for x, y in zip(v, t)) for v in self.vertices],
            self.rays,
            self.lineality,
            self.ambient_dim,
        )

    def recession_cone_at(self, w):
        """The recession cone: directions v with w + t*v in P for all t >= 0."""
        w = _to_fraction_tuple(w)
        if not self.contains(w):
            raise TropintError("recession_cone_at: point not in the polyhedron")
        return Cone.from_rays(self.rays, self.lineality, self.ambient_dim)

    def direction_cone_at(self, w):
        """C = {v : w + eps v in P for small eps > 0}: cone(P - w)."""
        w = _to_fraction_tuple(w)
        ineqs, eqs = self.h_representation()
        cone_ineqs = []
        cone_eqs = []
        for a, b in ineqs:
            if dot(a, w) == b:
                cone_ineqs.append(tuple(-x for x in a))
        for a, b in eqs:
            cone_eqs.append(tuple(a))
        return Cone.from_inequalities(cone_ineqs, cone_eqs, self.ambient_dim)

    def direction_lattice_basis(self):
        """Saturated basis of the lattice of directions along the polyhedron."""
        dirs = []
        v0 = self.vertices[0]
        for v in self.vertices[1:]:
            diff = tuple(x - y for x, y in zip(v, v0))
            if any(diff):
                dirs.append(clear_denominators(diff))
        dirs.extend(self.rays)
        dirs.extend(self.lineality)
        return saturation_basis(dirs, self.ambient_dim)


def polyhedron_intersect(p, q):
    """Intersection of polyhedra, EMPTY when disjoint."""
    return p.intersect(q)


class PolyhedralComplex:
    """Cells closed under faces with pairwise intersections common faces."""

    def __init__(self, ambient_dim, cells, incidence, maximal_keys):
        self.ambient_dim = ambient_dim
        self._cells = cells
        self._by_dim = {}
        for c in cells.values():
            self._by_dim.setdefault(c.dim, []).append(c)
        for lst in self._by_dim.values():
            lst.sort(key=lambda c: c.key())
        self._face_keys = incidence
        self.maximal_keys = maximal_keys
        self._cache = {}

    @classmethod
    def from_cells(cls, cells, validate=True):
        cells = [c for c in cells if c is not EMPTY]
        if not cells:
            raise TropintError("PolyhedralComplex.from_cells: no cells")
        n = cells[0].ambient_dim
        store = {}
        incidence = {}
        for c in cells:
            if c.ambient_dim != n:
                raise DimensionMismatch("mixed ambient dimensions")
            cls._close(c, store, incidence)
        all_keys = set(store)
        non_max = set()
        for key in all_keys:
            non_max.update(incidence[key] - {key})
        maximal = frozenset(all_keys - non_max)
        if validate:
            maxlist = sorted(maximal)
            for i, k1 in enumerate(maxlist):
                for k2 in maxlist[i + 1:]:
                    inter = store[k1].intersect(store[k2])
                    if inter is EMPTY:
                        continue
                    ikey = inter.key()
                    if ikey not in incidence[k1] or ikey not in incidence[k2]:
                        raise TropintError(
                            "cells intersect in a non-face", (store[k1], store[k2])
                        )
        return cls(n, store, incidence, maximal)

    @staticmethod
    def _close(cell, store, incidence):
        key = cell.key()
        if key in incidence:
            return
        faces = cell.faces()
        by_key = {}
        for f in faces:
            fkey = f.key()
            store.setdefault(fkey, f)
            by_key[fkey] = (frozenset(f.vertices), frozenset(f.rays))
        for fkey, (fv, fr) in by_key.items():
            if fkey in incidence:
                continue
            incidence[fkey] = frozenset(
                g
                for g, (gv, gr) in by_key.items()
                if gv <= fv and gr <= fr
            )

    def cells(self, dim=None):
        if dim is None:
            out = []
            for d in sorted(self._by_dim):
                out.extend(self._by_dim[d])
            return out
        return list(self._by_dim.get(dim, []))

    def maximal_cells(self):
        return sorted((self._cells[k] for k in self.maximal_keys), key=lambda c: c.key())

    def get(self, key):
        return self._cells.get(key)

    def __contains__(self, cell):
        return cell.key() in self._cells

    def __len__(self):
        return len(self._cells)

    def dim(self):
        return max(self._by_dim) if self._by_dim else -1

    def is_pure(self, k=None):
        dims = {self._cells[key].dim for key in self.maximal_keys}
        if k is None:
            return len(dims) == 1
        return dims == {k}

    def cells_containing(self, cell):
        key = cell.key()
        return sorted(
            (c for c in self._cells.values() if key in self._face_keys[c.key()]),
            key=lambda c: c.key(),
        )

    def minimal_cell_containing(self, point):
        best = None
        for c in self._cells.values():
            if (best is None or c.dim < best.dim) and c.contains(point):
                best = c
        return best

    def support_contains(self, point):
        return any(self._cells[k].contains(point) for k in self.maximal_keys)


def star_fan(complex_, tau):
    """The star of the complex at a cell: the fan of direction cones.

    Returns (fan, tau_bar) where tau_bar = span(tau - w) is the minimal cone.
    The construction is independent of the interior point w chosen.
    """
    if tau.key() not in complex_._cells:
        raise TropintError("star_fan: cell not in the complex")
    w = tau.relative_interior_point()
    return star_fan_at_point(complex_, w)


def star_fan_at_point(complex_, w):
    """Star of the complex at a point of its support (not necessarily a cell).

    Cones are C_sigma = {v : w + eps v in sigma} over all cells containing w;
    the minimal cone is the direction span of the smallest such cell.
    """
    from .fans import Fan

    mu = complex_.minimal_cell_containing(w)
    if mu is None:
        raise TropintError("star_fan_at_point: point outside the complex")
    cones = {}
    for sigma in complex_.cells_containing(mu):
        cones[sigma.key()] = sigma.direction_cone_at(w)
    tau_bar = cones[mu.key()]
    fan = Fan.from_cones(list(cones.values()), validate=False)
    return fan, tau_bar, {skey: c.key() for skey, c in cones.items()}


def complex_intersection(c1, c2):
    """The complex of all pairwise cell intersections, or None when disjoint."""
    if c1.ambient_dim != c2.ambient_dim:
        raise DimensionMismatch("complex_intersection: dimensions differ")
    pieces = {}
    for a in c1.maximal_cells():
        for b in c2.maximal_cells():
            inter = a.intersect(b)
            if inter is not EMPTY:
                pieces[inter.key()] = inter
    if not pieces:
        return None
    return PolyhedralComplex.from_cells(list(pieces.values()), validate=False)


def refine_complex_by_hyperplanes(complex_, hyperplanes):
    """Refine every cell by affine hyperplanes given as (normal, rhs) pairs."""
    pieces = list(complex_.maximal_cells())
    for a, b in hyperplanes:
        a = tuple(a)
        nxt = []
        for cell in pieces:
            ineqs, eqs = cell.h_representation()
            low = Polyhedron.from_h(ineqs + [(a, b)], eqs, cell.ambient_dim)
            neg = tuple(-x for x in a)
            high = Polyhedron.from_h(ineqs + [(neg, -b)], eqs, cell.ambient_dim)
            added = False
            for piece in (low, high):
                if piece is not EMPTY and piece.dim == cell.dim:
                    nxt.append(piece)
                    added = True
            if not added:
                nxt.append(cell)
        pieces = nxt
    seen = {}
    for p in pieces:
        seen[p.key()] = p
    return PolyhedralComplex.from_cells(list(seen.values()), validate=False)
