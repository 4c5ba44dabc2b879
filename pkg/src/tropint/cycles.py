"""Tropical cycles on polyhedral complexes: balancing, Cartier divisors and
their Weil divisors, pushforward, the Mikhalkin stable intersection, and the
cycle-level Allermann-Rau product.

Stable intersection weights come from the fan displacement rule evaluated
directly on the stars of the two cycles at each cell of their intersection;
no ambient complete fan is ever constructed.
"""

import random
import warnings
from fractions import Fraction

from .cones import cones_meet_translated
from .divisors import PiecewiseLinearFunction, divisor, kappa
from .errors import NotBalanced, TropintError
from .lattice import (
    dot,
    is_zero_vector,
    lattice_index,
    mat_vec,
    matrix_rank,
    solve_rational,
    INFINITE,
)
from .polyhedra import (
    EMPTY,
    PolyhedralComplex,
    Polyhedron,
    complex_intersection,
    refine_complex_by_hyperplanes,
    star_fan_at_point,
)
from .weights import MinkowskiWeight, span_lattice_index


class TropicalCycle:
    """A pure k-dimensional weighted rational complex, balanced in codim one."""

    def __init__(self, complex_, dim, weights, check=True):
        self.complex = complex_
        self.dim = dim
        cleaned = {}
        if complex_ is not None:
            for key, w in weights.items():
                if hasattr(key, "key"):
                    key = key.key()
                if w == 0:
                    continue
                cell = complex_.get(key)
                if cell is None:
                    raise TropintError("weight on a cell outside the complex")
                if cell.dim != dim:
                    raise TropintError("weight on a cell of wrong dimension")
                cleaned[key] = w
        self.weights = cleaned
        if check and complex_ is not None:
            violations = cycle_balancing_violations(complex_, dim, cleaned)
            if violations:
                raise NotBalanced("cycle is not balanced", violations)

    @property
    def ambient_dim(self):
        return self.complex.ambient_dim if self.complex is not None else None

    def __getitem__(self, cell):
        key = cell.key() if hasattr(cell, "key") else cell
        return self.weights.get(key, 0)

    def is_zero(self):
        return not self.weights

    def __repr__(self):
        return f"TropicalCycle(dim={self.dim}, {len(self.weights)} cells)"

    def pruned(self):
        """The cycle restricted to its nonzero cells (zero cells dropped)."""
        if not self.weights:
            return TropicalCycle(None, self.dim, {}, check=False)
        cells = [self.complex.get(k) for k in self.weights]
        cx = PolyhedralComplex.from_cells(cells, validate=False)
        return TropicalCycle(cx, self.dim, dict(self.weights), check=False)


def cycle_balancing_violations(complex_, dim, weights):
    """Unbalanced (k-1)-cells with their defect vectors in star coordinates."""
    violations = []
    for tau in complex_.cells(dim - 1):
        fan, tau_bar, cellmap = _star_with_cells(complex_, tau)
        star_weights = {}
        for skey, ckey in cellmap.items():
            cell = complex_.get(skey)
            if cell.dim == dim:
                w = weights.get(skey, 0)
                if w:
                    star_weights[ckey] = w
        if not star_weights:
            continue
        from .weights import check_balancing

        bad = check_balancing(fan, fan.ambient_dim - dim, star_weights)
        for cone, defect in bad:
            violations.append((tau, defect))
    return violations


def _star_with_cells(complex_, tau):
    key = ("star", tau.key())
    if key in complex_._cache:
        return complex_._cache[key]
    w = tau.relative_interior_point()
    fan, tau_bar, cellmap = star_fan_at_point(complex_, w)
    complex_._cache[key] = (fan, tau_bar, cellmap)
    return fan, tau_bar, cellmap


def validate_cycle(complex_, weights, dim=None):
    """TropicalCycle on success; NotBalanced carries the violation list."""
    if dim is None:
        dim = complex_.dim()
    if not complex_.is_pure(dim):
        raise TropintError("validate_cycle: complex is not pure of the weight dimension")
    return TropicalCycle(complex_, dim, weights, check=True)


def cycle_degree(c):
    """Sum of the point weights of a zero-dimensional cycle."""
    if c.dim != 0:
        raise TropintError("cycle_degree: cycle is not zero-dimensional")
    return sum(c.weights.values())


def cycle_from_weight(mw):
    """A fan-supported Minkowski weight regarded as a tropical cycle."""
    fan = mw.fan
    n = fan.ambient_dim
    dim = n - mw.codim
    cells = {}
    weights = {}
    for key, w in mw.weights.items():
        cone = fan.get(key)
        cell = Polyhedron.from_cone(cone)
        cells[cell.key()] = cell
        weights[cell.key()] = w
    if not cells:
        return TropicalCycle(None, dim, {}, check=False)
    cx = PolyhedralComplex.from_cells(list(cells.values()), validate=False)
    return TropicalCycle(cx, dim, weights, check=False)


class CartierDivisor:
    """Charts (open subcomplexes, affine data) describing a PL function.

    Each chart is a pair (cells, data): a star-closed set of cell keys and a
    map cell key -> (integer covector, rational constant).  On overlaps the
    chart functions must differ by a single integer affine function per
    connected component.
    """

    def __init__(self, complex_, charts, check=True):
        self.complex = complex_
        self.charts = []
        for cell_keys, data in charts:
            keys = frozenset(
                k.key() if hasattr(k, "key") else k for k in cell_keys
            )
            clean = {}
            for k, (m, a) in data.items():
                k = k.key() if hasattr(k, "key") else k
                clean[k] = (tuple(m), Fraction(a))
            self.charts.append((keys, clean))
        if check:
            self._validate()

    @classmethod
    def global_function(cls, complex_, data):
        """A single chart covering the whole complex."""
        keys = [c.key() for c in complex_.cells()]
        return cls(complex_, [(keys, data)], check=False)

    def _validate(self):
        covered = set()
        for keys, data in self.charts:
            covered |= keys
            for k in keys:
                cell = self.complex.get(k)
                if cell is None:
                    raise TropintError("chart references a cell outside the complex")
                if k not in data:
                    raise TropintError("chart misses affine data for a cell")
                # star-closure: everything containing the cell is in the chart
                for above in self.complex.cells_containing(cell):
                    if above.key() not in keys:
                        raise TropintError("chart is not an open subcomplex")
            self._check_chart_continuity(keys, data)
        if covered != {c.key() for c in self.complex.cells()}:
            raise TropintError("charts do not cover the complex")
        self._check_overlaps()

    def _check_chart_continuity(self, keys, data):
        for k in keys:
            cell = self.complex.get(k)
            m, a = data[k]
            for face_key in self.complex._face_keys[k]:
                if face_key == k or face_key not in keys:
                    continue
                face = self.complex.get(face_key)
                m2, a2 = data[face_key]
                v0 = face.vertices[0]
                if dot(m, v0) + a != dot(m2, v0) + a2:
                    raise TropintError("chart data disagrees at a shared vertex")
                for d in _direction_generators(face):
                    if dot(m, d) != dot(m2, d):
                        raise TropintError("chart data disagrees along a shared face")

    def _check_overlaps(self):
        for i in range(len(self.charts)):
            keys_i, data_i = self.charts[i]
            for j in range(i + 1, len(self.charts)):
                keys_j, data_j = self.charts[j]
                overlap = keys_i & keys_j
                for comp in _components(self.complex, overlap):
                    diffs = set()
                    for k in comp:
                        mi, ai = data_i[k]
                        mj, aj = data_j[k]
                        diffs.add((tuple(x - y for x, y in zip(mi, mj)), ai - aj))
                    if len(diffs) > 1:
                        raise TropintError(
                            "chart difference is not a single affine function"
                        )

    def chart_for(self, cell):
        key = cell.key() if hasattr(cell, "key") else cell
        for keys, data in self.charts:
            if key in keys:
                return keys, data
        raise TropintError("no chart contains the cell")


def _direction_generators(cell):
    out = []
    v0 = cell.vertices[0]
    for v in cell.vertices[1:]:
        out.append(tuple(x - y for x, y in zip(v, v0)))
    out.extend(cell.rays)
    out.extend(cell.lineality)
    return out


def _components(complex_, keys):
    """Connected components of a cell-key set via shared faces."""
    keys = set(keys)
    comps = []
    while keys:
        seed = keys.pop()
        comp = {seed}
        frontier = [seed]
        while frontier:
            k = frontier.pop()
            faces_k = complex_._face_keys[k]
            for other in list(keys):
                if faces_k & complex_._face_keys[other]:
                    keys.discard(other)
                    comp.add(other)
                    frontier.append(other)
        comps.append(comp)
    return comps


def star_restrict_divisor(phi, tau):
    """The induced homogeneous PL function on the star fan at a cell.

    Picks a chart containing tau; the covector of each cell containing tau
    becomes the covector of its direction cone.  Well-defined up to a global
    linear function, which divisor computations annihilate.
    """
    complex_ = phi.complex
    fan, tau_bar, cellmap = _star_with_cells(complex_, tau)
    keys, data = phi.chart_for(tau)
    covectors = {}
    for skey, ckey in cellmap.items():
        if skey not in data:
            raise TropintError("chart does not cover the star of the cell")
        m, _a = data[skey]
        covectors[ckey] = m
    return fan, tau_bar, cellmap, PiecewiseLinearFunction(fan, covectors, check=False)


def cartier_weil(c, phi, convention="kappa", check=True):
    """The associated Weil divisor of a Cartier divisor on a tropical cycle.

    The weight at each (k-1)-cell tau is the divisor (or kappa, per the
    convention flag) of the induced star data, evaluated at the minimal cone
    of the star.  Zero-weight cells are pruned.
    """
    complex_ = c.complex
    k = c.dim
    if complex_ is None:
        return TropicalCycle(None, k - 1, {}, check=False)
    n = complex_.ambient_dim
    op = kappa if convention == "kappa" else divisor
    out_cells = {}
    out_weights = {}
    for tau in complex_.cells(k - 1):
        fan, tau_bar, cellmap, f = star_restrict_divisor(phi, tau)
        star_weights = {}
        for skey, ckey in cellmap.items():
            cell = complex_.get(skey)
            if cell.dim == k:
                w = c.weights.get(skey, 0)
                if w:
                    star_weights[ckey] = w
        if not star_weights:
            continue
        mw = MinkowskiWeight(fan, n - k, star_weights, check=False)
        d = op(mw, f, check=False)
        val = d[tau_bar]
        if val:
            out_cells[tau.key()] = tau
            out_weights[tau.key()] = val
    if not out_cells:
        return TropicalCycle(None, k - 1, {}, check=False)
    cx = PolyhedralComplex.from_cells(list(out_cells.values()), validate=False)
    return TropicalCycle(cx, k - 1, out_weights, check=check)


def cross_cycles(c1, c2, check=True):
    """The product cycle in the direct sum of the two ambient spaces."""
    if c1.complex is None or c2.complex is None:
        return TropicalCycle(None, c1.dim + c2.dim, {}, check=False)
    cells = []
    weights = {}
    for k1, w1 in c1.weights.items():
        p1 = c1.complex.get(k1)
        for k2, w2 in c2.weights.items():
            p2 = c2.complex.get(k2)
            prod = _product_polyhedron(p1, p2)
            cells.append(prod)
            weights[prod.key()] = w1 * w2
    cx = PolyhedralComplex.from_cells(cells, validate=False)
    return TropicalCycle(cx, c1.dim + c2.dim, weights, check=check)


def _product_polyhedron(p, q):
    verts = [tuple(v) + tuple(w) for v in p.vertices for w in q.vertices]
    n1, n2 = p.ambient_dim, q.ambient_dim
    z1, z2 = (0,) * n1, (0,) * n2
    rays = [r + z2 for r in p.rays] + [z1 + r for r in q.rays]
    lin = [l + z2 for l in p.lineality] + [z1 + l for l in q.lineality]
    return Polyhedron.from_v(verts, rays, lin, n1 + n2)


def pushforward_cycle(h, c, check=True):
    """Pushforward along an integer linear map, with lattice multiplicities.

    The image complex is built from the arrangement generated by the facets
    of all image cells; cells whose image drops dimension contribute zero.
    When every cell collapses the result is the zero cycle (with a warning).
    """
    h = tuple(tuple(row) for row in h)
    d = c.dim
    if c.complex is None:
        return TropicalCycle(None, d, {}, check=False)
    images = []
    for key, w in c.weights.items():
        cell = c.complex.get(key)
        img = _map_polyhedron(h, cell)
        if img.dim == d:
            images.append((img, cell, w))
    if not images:
        warnings.warn("pushforward_cycle: every cell collapses; zero cycle returned")
        return TropicalCycle(None, d, {}, check=False)
    hyperplanes = []
    seen = set()
    for img, _cell, _w in images:
        ineqs, eqs = img.h_representation()
        for a, b in ineqs + eqs:
            key = (a, b)
            if key not in seen:
                seen.add(key)
                hyperplanes.append(key)
    piece_weights = {}
    piece_store = {}
    for img, cell, w in images:
        sub = PolyhedralComplex.from_cells([img], validate=False)
        refined = refine_complex_by_hyperplanes(sub, hyperplanes)
        idx = _direction_index(h, cell, img)
        for piece in refined.cells(d):
            pk = piece.key()
            piece_store[pk] = piece
            piece_weights[pk] = piece_weights.get(pk, 0) + w * idx
    cells = [piece_store[k] for k, v in piece_weights.items() if v != 0]
    weights = {k: v for k, v in piece_weights.items() if v != 0}
    if not cells:
        return TropicalCycle(None, d, {}, check=False)
    cx = PolyhedralComplex.from_cells(cells, validate=False)
    return TropicalCycle(cx, d, weights, check=check)


def _map_polyhedron(h, cell):
    verts = [tuple(sum(Fraction(x) * hij for x, hij in zip(v, row)) for row in h)
             for v in cell.vertices]
    rays = [mat_vec(h, r) for r in cell.rays]
    lin = [mat_vec(h, l) for l in cell.lineality]
    rays = [r for r in rays if not is_zero_vector(r)]
    lin = [l for l in lin if not is_zero_vector(l)]
    return Polyhedron.from_v(verts, rays, lin, len(h))


def _direction_index(h, source, image):
    src = source.direction_lattice_basis()
    tgt = image.direction_lattice_basis()
    if not src:
        return 1
    coords = []
    for b in src:
        imgv = mat_vec(h, b)
        coeffs = solve_rational(tgt, imgv)
        if coeffs is None or any(x.denominator != 1 for x in coeffs):
            raise TropintError("pushforward_cycle: image lattice bookkeeping failed")
        coords.append(tuple(int(x) for x in coeffs))
    idx = lattice_index(coords, len(tgt))
    if idx is INFINITE:
        raise TropintError("pushforward_cycle: dimension drop after rank filter")
    return idx


def _pick_displacement_vector(cones1, cones2, n, seed):
    """A vector v with every (c1, c2 + v) meeting pair jointly full-dimensional."""
    spans = {}
    for i, a in enumerate(cones1):
        for j, b in enumerate(cones2):
            gens = list(a.rays) + list(a.lineality) + list(b.rays) + list(b.lineality)
            spans[(i, j)] = matrix_rank(gens) == n if gens else n == 0
    rng = random.Random(seed)
    bound = 4
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(n))
        ok = True
        for (i, j), full in spans.items():
            if full:
                continue
            if cones_meet_translated(cones1[i], cones2[j], v):
                ok = False
                break
        if ok:
            return v
        bound += 2


def stable_intersect(c1, c2, seed=0, check=True):
    """The Mikhalkin product: displacement-rule weights on the intersection.

    For each cell of dimension k + l - n of the set-theoretic intersection,
    the stars of the two cycles at a common interior point are displaced by
    a certified generic vector and the weighted lattice indices of the
    meeting pairs are summed.
    """
    if c1.complex is None or c2.complex is None:
        return TropicalCycle(None, max(c1.dim + (c2.dim or 0), 0), {}, check=False)
    n = c1.complex.ambient_dim
    if c2.complex.ambient_dim != n:
        raise TropintError("stable_intersect: ambient dimensions differ")
    d = c1.dim + c2.dim - n
    if d < 0:
        return TropicalCycle(None, 0, {}, check=False)
    inter = complex_intersection(c1.complex, c2.complex)
    if inter is None:
        return TropicalCycle(None, d, {}, check=False)
    out_cells = {}
    out_weights = {}
    for tau in inter.cells(d):
        w = tau.relative_interior_point()
        fan1, _t1, map1 = star_fan_at_point(c1.complex, w)
        fan2, _t2, map2 = star_fan_at_point(c2.complex, w)
        tops1 = [
            (fan1.get(ck), c1.weights.get(sk, 0))
            for sk, ck in map1.items()
            if c1.complex.get(sk).dim == c1.dim
        ]
        tops2 = [
            (fan2.get(ck), c2.weights.get(sk, 0))
            for sk, ck in map2.items()
            if c2.complex.get(sk).dim == c2.dim
        ]
        v = _pick_displacement_vector(
            fan1.cones(), fan2.cones(), n, seed
        )
        total = 0
        for cone1, w1 in tops1:
            if w1 == 0:
                continue
            for cone2, w2 in tops2:
                if w2 == 0:
                    continue
                if cones_meet_translated(cone1, cone2, v):
                    total += w1 * w2 * span_lattice_index(cone1, cone2)
        if total:
            out_cells[tau.key()] = tau
            out_weights[tau.key()] = total
    if not out_cells:
        return TropicalCycle(None, d, {}, check=False)
    cx = PolyhedralComplex.from_cells(list(out_cells.values()), validate=False)
    return TropicalCycle(cx, d, out_weights, check=check)


def diagonal_chi_divisor(complex_, i, n):
    """The one-chart Cartier divisor min(0, y_i - x_i) on a refined complex."""
    normal = tuple((-1 if j == i else 0) for j in range(n)) + tuple(
        (1 if j == i else 0) for j in range(n)
    )
    data = {}
    for cell in complex_.cells():
        p = cell.relative_interior_point()
        val = sum(Fraction(x) * a for x, a in zip(p, normal))
        if val >= 0:
            data[cell.key()] = ((0,) * (2 * n), 0)
        else:
            data[cell.key()] = (normal, 0)
    return CartierDivisor(complex_, [([c.key() for c in complex_.cells()], data)],
                          check=False)


def ar_product_cycles(c1, c2, seed=0, check=True):
    """The Allermann-Rau product: diagonal Cartier cuts on the cross cycle,
    pushed forward along the first projection.  The seed is accepted for
    interface symmetry with stable_intersect; the construction itself is
    deterministic."""
    if c1.complex is None or c2.complex is None:
        d = c1.dim + c2.dim - (c1.ambient_dim or c2.ambient_dim or 0)
        return TropicalCycle(None, max(d, 0), {}, check=False)
    n = c1.complex.ambient_dim
    crossed = cross_cycles(c1, c2, check=False)
    hyperplanes = []
    for i in range(n):
        normal = tuple((-1 if j == i else 0) for j in range(n)) + tuple(
            (1 if j == i else 0) for j in range(n)
        )
        hyperplanes.append((normal, 0))
    refined = refine_complex_by_hyperplanes(crossed.complex, hyperplanes)
    weights = {}
    for cell in refined.cells(crossed.dim):
        p = cell.relative_interior_point()
        parent = crossed.complex.minimal_cell_containing(p)
        if parent is not None and parent.dim == crossed.dim:
            w = crossed.weights.get(parent.key(), 0)
            if w:
                weights[cell.key()] = w
    acc = TropicalCycle(refined, crossed.dim, weights, check=False)
    for i in range(n):
        if acc.complex is None:
            break
        chi = diagonal_chi_divisor(acc.complex, i, n)
        acc = cartier_weil(acc, chi, convention="kappa", check=False)
    projection = tuple(
        tuple((1 if j == i else 0) for j in range(2 * n)) for i in range(n)
    )
    return pushforward_cycle(projection, acc, check=check)


def cycles_equal(a, b):
    """Equality as weighted sets: compare weights on a common refinement."""
    if a.dim != b.dim:
        return False
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    d = a.dim
    hyperplanes = []
    seen = set()
    for cyc in (a, b):
        for key in cyc.weights:
            cell = cyc.complex.get(key)
            ineqs, eqs = cell.h_representation()
            for pair in ineqs + eqs:
                if pair not in seen:
                    seen.add(pair)
                    hyperplanes.append(pair)

    def piece_map(cyc):
        out = {}
        for key, w in cyc.weights.items():
            cell = cyc.complex.get(key)
            sub = PolyhedralComplex.from_cells([cell], validate=False)
            refined = refine_complex_by_hyperplanes(sub, hyperplanes)
            for piece in refined.cells(d):
                out[piece.key()] = out.get(piece.key(), 0) + w
        return {k: v for k, v in out.items() if v != 0}

    return piece_map(a) == piece_map(b)
