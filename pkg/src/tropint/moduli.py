"""The tropical moduli fan of n-marked rational curves and its psi-classes.

The space of phylogenetic-type trees embeds into the quotient of the
pair-coordinate space by the image of the doubling map a -> (a_i + a_j); the
cones are spanned by the split rays nu_J over pairwise-compatible split
sets.  The psi-class functions f_k are supported on the two-element splits
avoiding k, and their iterated divisors reproduce the multinomial
intersection degrees after normalization by C(n-1, 2) per factor.
"""

from fractions import Fraction
from itertools import combinations
from math import comb

from .cones import Cone
from .divisors import PiecewiseLinearFunction, divisor
from .errors import TropintError
from .fans import Fan
from .lattice import QuotientLattice, vadd, vgcd, vscale
from .weights import MinkowskiWeight, degree


def canonical_split(side, n):
    """The representative of a split class: the side not containing n."""
    side = frozenset(side)
    if n in side:
        side = frozenset(range(1, n + 1)) - side
    if not 2 <= len(side) <= n - 2:
        raise TropintError(f"not a valid split side for n={n}: {sorted(side)}")
    return side


def all_splits(n):
    """All split classes, canonically represented (the side avoiding n)."""
    out = []
    for size in range(2, n - 1):
        for side in combinations(range(1, n), size):
            out.append(frozenset(side))
    return sorted(out, key=lambda s: (len(s), sorted(s)))


def splits_compatible(a, b):
    """Compatibility of canonical representatives: nested or disjoint."""
    return a <= b or b <= a or not (a & b)


def trivalent_trees(n):
    """Split sets of all trivalent trees on n labelled leaves.

    Built by leaf insertion: every edge (including leaf edges) of a tree on
    m leaves receives the next leaf.  Counts are the double factorials
    (2m - 5)!!.
    """
    if n < 3:
        raise TropintError("trivalent_trees: need n >= 3")
    universe = frozenset(range(1, n + 1))
    # edges are stored as the set of leaves on one fixed side
    trees = [frozenset({frozenset({i}) for i in range(1, 4)})]
    for new_leaf in range(4, n + 1):
        grown = []
        for edges in trees:
            for edge in edges:
                updated = set()
                for other in edges:
                    if other == edge:
                        continue
                    # the new leaf joins the side of `other` containing `edge`
                    if edge <= other:
                        updated.add(other | {new_leaf})
                    else:
                        updated.add(other)
                updated.add(edge)
                updated.add(edge | {new_leaf})
                updated.add(frozenset({new_leaf}))
                grown.append(frozenset(updated))
        trees = grown
    out = set()
    for edges in trees:
        internal = set()
        for side in edges:
            if 1 < len(side) < n - 1:
                internal.add(canonical_split(side, n))
        out.add(frozenset(internal))
    return sorted(out, key=lambda s: sorted((len(x), sorted(x)) for x in s))


class TropM0n:
    """The moduli fan with its split/ray dictionaries and quotient coordinates."""

    def __init__(self, n):
        if n < 4:
            raise TropintError("TropM0n: need n >= 4")
        if n > 8:
            raise TropintError("TropM0n: capped at n = 8")
        self.n = n
        self.pairs = list(combinations(range(1, n + 1), 2))
        self.pair_index = {p: i for i, p in enumerate(self.pairs)}
        theta_columns = []
        for m in range(1, n + 1):
            col = tuple(1 if m in p else 0 for p in self.pairs)
            theta_columns.append(col)
        self.quotient = QuotientLattice(theta_columns, len(self.pairs))
        self.ambient_dim = self.quotient.quotient_rank
        self.splits = all_splits(n)
        # the moduli lattice is generated by the split classes themselves;
        # the fan lives in coordinates of a Hermite basis of that lattice
        from .lattice import hnf_rows, solve_rational

        projected = {J: self.quotient.project(self.ambient_nu(J)) for J in self.splits}
        self.lattice_basis = hnf_rows(list(projected.values()))
        if len(self.lattice_basis) != self.ambient_dim:
            raise TropintError("TropM0n: split classes do not span the quotient")
        self.ray_of_split = {}
        self.split_of_ray = {}
        for J in self.splits:
            coords = solve_rational(self.lattice_basis, projected[J])
            if coords is None or any(x.denominator != 1 for x in coords):
                raise TropintError("TropM0n: split class outside its own lattice")
            ray = tuple(int(x) for x in coords)
            if vgcd(ray) != 1:
                raise TropintError("TropM0n: split ray not primitive in the moduli lattice")
            self.ray_of_split[J] = ray
            self.split_of_ray[ray] = J
        self.trees = trivalent_trees(n)
        self.fan = self._build_fan()

    # -- geometry ----------------------------------------------------------

    def ambient_nu(self, side):
        """The 0/1 pair-indicator vector of a split side in R^(n choose 2)."""
        side = frozenset(side)
        return tuple(1 if len(side & set(p)) == 1 else 0 for p in self.pairs)

    def nu(self, side):
        """The ray of a split in moduli-lattice coordinates (same for both sides)."""
        side = canonical_split(side, self.n)
        return self.ray_of_split[side]

    def project_to_lattice(self, ambient_vector):
        """Quotient projection followed by the change to moduli-lattice coordinates."""
        from .lattice import solve_rational

        img = self.quotient.project(ambient_vector)
        coords = solve_rational(self.lattice_basis, img)
        if coords is None:
            raise TropintError("project_to_lattice: vector outside the moduli span")
        return tuple(coords)

    def _build_fan(self):
        cones = {}
        incidence = {}
        splitsets = set()
        for tree in self.trees:
            for size in range(len(tree) + 1):
                for subset in combinations(sorted(tree, key=sorted), size):
                    splitsets.add(frozenset(subset))
        key_of = {}
        self.splitset_of_key = {}
        for ss in splitsets:
            rays = tuple(sorted(self.ray_of_split[J] for J in ss))
            cone = Cone(self.ambient_dim, rays=rays, lineality=())
            cone._dim = len(rays)  # simplicial by construction; validated below
            cones[cone.key()] = cone
            key_of[ss] = cone.key()
            self.splitset_of_key[cone.key()] = ss
        from .lattice import matrix_rank

        for ss, key in key_of.items():
            if len(ss) != matrix_rank(cones[key].rays):
                raise TropintError("moduli cone rays are not independent")
        for ss, key in key_of.items():
            incidence[key] = frozenset(
                key_of[sub]
                for sub in splitsets
                if sub <= ss
            )
        maximal = frozenset(key_of[frozenset(t)] for t in self.trees)
        return Fan(self.ambient_dim, cones, incidence, maximal)

    def fundamental_weight(self):
        """Weight one on every top cone (balanced; verified in the test suite)."""
        codim = self.ambient_dim - (self.n - 3)
        return MinkowskiWeight(
            self.fan,
            codim,
            {k: 1 for k in self.fan.maximal_keys},
            check=False,
        )

    def dist_embedding(self, lengths):
        """Quotient point of the tree metric with the given internal edge lengths."""
        acc = (0,) * len(self.pairs)
        sides = []
        for side, value in lengths.items():
            if value <= 0:
                raise TropintError("dist_embedding: edge lengths must be positive")
            side = canonical_split(side, self.n)
            sides.append(side)
            acc = vadd(acc, vscale(value, self.ambient_nu(side)))
        for a, b in combinations(sides, 2):
            if not splits_compatible(a, b):
                raise TropintError("dist_embedding: splits are not pairwise compatible")
        return self.project_to_lattice(acc)

    # -- psi classes ---------------------------------------------------------

    def in_v_k(self, side, k):
        """Whether the split class has a two-element side avoiding k."""
        comp = frozenset(range(1, self.n + 1)) - side
        return (len(side) == 2 and k not in side) or (len(comp) == 2 and k not in comp)

    def f_k_ray_value(self, side, k):
        """Value of the psi-class function at the split ray: C(m, 2) for m the
        size of the side away from k.  Equals 1 exactly on the rays of V_k."""
        if k in side:
            m = self.n - len(side)
        else:
            m = len(side)
        return comb(m, 2)

    def f_k(self, k):
        """The k-th psi-class function, linearly extended from its ray values."""
        if not 1 <= k <= self.n:
            raise TropintError("f_k: marked point out of range")
        key = ("f_k", k)
        if key not in self.fan._cache:
            values = {
                ray: self.f_k_ray_value(J, k)
                for J, ray in self.ray_of_split.items()
            }
            self.fan._cache[key] = PiecewiseLinearFunction.from_ray_values(
                self.fan, values, check=False
            )
        return self.fan._cache[key]

    def quadrivalent_at_leaf(self, splitset, k):
        """Whether the tree type with these splits has leaf k at a 4-valent vertex.

        The edges at the vertex of leaf k are the leaf edge, the maximal
        k-avoiding sides, and the leaves attached directly; for a split set
        of size n-4 the unique 4-valent vertex is at leaf k iff the count is
        four.
        """
        n = self.n
        sides = []
        for J in splitset:
            side = J if k not in J else frozenset(range(1, n + 1)) - J
            sides.append(side)
        maximal = [
            s for s in sides if not any(s < t for t in sides)
        ]
        attached = set(range(1, n + 1)) - {k}
        for s in maximal:
            attached -= s
        valence = 1 + len(maximal) + len(attached)
        return valence == 4

    def e_k_cone_keys(self, k):
        """Cone keys of the codimension-one strata whose 4-valent vertex sees leaf k."""
        out = set()
        for key, ss in self.splitset_of_key.items():
            if len(ss) == self.n - 4 and self.quadrivalent_at_leaf(ss, k):
                out.add(key)
        return out

    def psi_weil(self, k):
        """divisor(fundamental weight, f_k): the tropical Weil divisor of f_k."""
        return divisor(self.fundamental_weight(), self.f_k(k), check=False)

    def psi_degree(self, indices):
        """Normalized degree of the iterated psi divisors (a Fraction)."""
        n = self.n
        if len(indices) != n - 3:
            raise TropintError("psi_degree: need exactly n - 3 indices")
        for k in indices:
            if not 1 <= k <= n:
                raise TropintError("psi_degree: marked point out of range")
        acc = self.fundamental_weight()
        for k in indices:
            acc = divisor(acc, self.f_k(k), check=False)
        zero = Cone.zero(self.ambient_dim)
        raw = acc[zero]
        return Fraction(raw, comb(n - 1, 2) ** (n - 3)), raw


_CACHE = {}


def trop_m0n(n):
    """Cached moduli-fan construction."""
    if n not in _CACHE:
        _CACHE[n] = TropM0n(n)
    return _CACHE[n]


def build_quotient(n):
    if n < 4:
        raise TropintError("build_quotient: need n >= 4")
    return trop_m0n(n).quotient


def psi_degree(n, indices):
    return trop_m0n(n).psi_degree(indices)[0]


def psi_weil(n, k):
    return trop_m0n(n).psi_weil(k)
