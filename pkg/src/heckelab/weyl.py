"""Root data, finite Weyl groups and their extension by a diagram automorphism.

Elements are stored once in an indexed table; index 0 is the identity and
the table is sorted by ShortLex order of the canonical reduced word.

>>> G = WeylGroup(build_root_datum("A2"))
>>> G.size
6
>>> G.length_and_word(G.longest_element())
(3, (0, 1, 0))
>>> G.bruhat_leq(G.from_word([0]), G.from_word([1]))
False
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

Matrix = Tuple[Tuple[int, ...], ...]
Vector = Tuple[int, ...]

__all__ = [
    "RootDatum",
    "DiagramAut",
    "WeylElt",
    "ExtWeylElt",
    "WeylGroup",
    "build_root_datum",
    "build_aut",
    "cartan_matrix_of_type",
]

MAX_ROOTS = 2000


class DatumError(ValueError):
    """Raised for data violating the root datum axioms."""


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    m = len(b[0])
    inner = len(b)
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(m)) for i in range(n))


def _mat_vec(a: Matrix, v: Sequence[int]) -> Vector:
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in a)


def _identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a)) if a else a


def _dot(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(x, y))


def _int_inverse(a: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix."""
    from sympy import Matrix as SMatrix

    inv = SMatrix(a).inv()
    if any(x.q != 1 for x in inv):
        raise DatumError("lattice map is not invertible over the integers")
    return tuple(tuple(int(x) for x in inv.row(i)) for i in range(inv.rows))


# --------------------------------------------------------------------------
# Cartan types


def cartan_matrix_of_type(kind: str, rank: int) -> List[List[int]]:
    """Cartan matrix C with C[i][j] = <coroot_i, root_j> (Bourbaki numbering)."""
    c = [[2 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for i in range(rank - 1):
        c[i][i + 1] = c[i + 1][i] = -1
    if kind == "A":
        pass
    elif kind == "B" and rank >= 2:
        c[rank - 1][rank - 2] = -2
    elif kind == "C" and rank >= 2:
        c[rank - 2][rank - 1] = -2
    elif kind == "D" and rank >= 4:
        c[rank - 2][rank - 1] = c[rank - 1][rank - 2] = 0
        c[rank - 3][rank - 1] = c[rank - 1][rank - 3] = -1
    elif kind == "G" and rank == 2:
        c[1][0] = -3
    elif kind == "F" and rank == 4:
        c[2][1] = -2
    else:
        raise DatumError(f"unknown Cartan type {kind}{rank}")
    return c


@dataclass(frozen=True)
class RootDatum:
    """Lattices X = Y = Z^rank with simple roots in X and simple coroots in Y."""

    rank: int
    simple_roots: Tuple[Vector, ...]
    simple_coroots: Tuple[Vector, ...]
    label: str = "custom"

    @property
    def nsimple(self) -> int:
        return len(self.simple_roots)

    def pairing(self, x: Sequence[int], y: Sequence[int]) -> int:
        return _dot(x, y)

    def cartan(self) -> List[List[int]]:
        """C[i][j] = <coroot_i, root_j>."""
        return [[_dot(a, b) for a in self.simple_roots] for b in self.simple_coroots]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "rank": self.rank,
            "simple_roots": [list(r) for r in self.simple_roots],
            "simple_coroots": [list(r) for r in self.simple_coroots],
        }


def _block_diag(blocks: List[List[List[int]]]) -> List[List[int]]:
    size = sum(len(b) for b in blocks)
    out = [[0] * size for _ in range(size)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return out


def _validate(d: RootDatum) -> None:
    if any(len(r) != d.rank for r in d.simple_roots + d.simple_coroots):
        raise DatumError("root and coroot vectors must have length rank")
    if len(d.simple_roots) != len(d.simple_coroots):
        raise DatumError("need as many simple coroots as simple roots")
    c = d.cartan()
    k = len(c)
    for i in range(k):
        if c[i][i] != 2:
            raise DatumError(f"<alpha_{i}, coroot_{i}> = {c[i][i]}, expected 2")
        for j in range(k):
            if i != j:
                if c[i][j] > 0:
                    raise DatumError(f"positive off-diagonal Cartan entry at ({i},{j})")
                if (c[i][j] == 0) != (c[j][i] == 0):
                    raise DatumError(f"Cartan entries ({i},{j}) and ({j},{i}) not both zero")
                if c[i][j] * c[j][i] > 3:
                    raise DatumError("Cartan matrix is not of finite type")
    if k:
        from sympy import Matrix as SMatrix

        if SMatrix(d.simple_roots).rank() != k or SMatrix(d.simple_coroots).rank() != k:
            raise DatumError("simple roots (coroots) must be linearly independent")
    # finiteness: the root orbit must stay bounded
    _generate_roots(c)


def build_root_datum(spec) -> RootDatum:
    """Build a validated root datum from a type label or explicit matrices.

    Accepted labels: ``A1``..``A4``, ``B2``, ``B3``, ``C2``, ``C3``, ``D4``,
    ``G2``, ``F4``, products such as ``A1xA1`` (``×`` also accepted) and
    ``GL2``.  Explicit data is a mapping with keys ``simple_roots`` and
    ``simple_coroots`` (and optional ``rank``).

    >>> build_root_datum("A1").simple_roots
    ((2,),)
    >>> build_root_datum({"simple_roots": [[3]], "simple_coroots": [[1]]})  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ...
    heckelab.weyl.DatumError: <alpha_0, coroot_0> = 3, expected 2
    """
    if isinstance(spec, RootDatum):
        _validate(spec)
        return spec
    if isinstance(spec, dict):
        roots = tuple(tuple(int(x) for x in r) for r in spec["simple_roots"])
        coroots = tuple(tuple(int(x) for x in r) for r in spec["simple_coroots"])
        rank = int(spec.get("rank", len(roots[0]) if roots else 0))
        d = RootDatum(rank, roots, coroots, spec.get("label", "custom"))
        _validate(d)
        return d
    label = str(spec).strip().replace("×", "x").replace("X", "x")
    if label.upper() == "GL2":
        d = RootDatum(2, ((1, -1),), ((1, -1),), "GL2")
        _validate(d)
        return d
    blocks = []
    for part in label.split("x"):
        m = re.fullmatch(r"([ABCDFG])(\d+)", part.strip().upper())
        if not m:
            raise DatumError(f"cannot parse Cartan type {spec!r}")
        blocks.append(cartan_matrix_of_type(m.group(1), int(m.group(2))))
    c = _block_diag(blocks)
    rank = len(c)
    coroots = tuple(tuple(int(i == j) for j in range(rank)) for i in range(rank))
    # root_j has i-th coordinate <coroot_i, root_j> = C[i][j]
    roots = tuple(tuple(c[i][j] for i in range(rank)) for j in range(rank))
    d = RootDatum(rank, roots, coroots, label)
    _validate(d)
    return d


def _generate_roots(c: List[List[int]]):
    """All roots as coefficient vectors in the simple roots, paired with coroots."""
    k = len(c)
    start = []
    for i in range(k):
        e = tuple(int(j == i) for j in range(k))
        start.append((e, e))
    seen = {r: cr for r, cr in start}
    queue = list(start)
    while queue:
        r, cr = queue.pop()
        for i in range(k):
            # <root, coroot_i> and <root_i, coroot>
            a = sum(r[j] * c[i][j] for j in range(k))
            b = sum(cr[j] * c[j][i] for j in range(k))
            nr = tuple(r[j] - a * (j == i) for j in range(k))
            ncr = tuple(cr[j] - b * (j == i) for j in range(k))
            if nr not in seen:
                seen[nr] = ncr
                queue.append((nr, ncr))
                if len(seen) > MAX_ROOTS:
                    raise DatumError("root system is infinite (not of finite type)")
    roots = sorted(seen, key=lambda r: (sum(r) < 0, abs(sum(r)), tuple(-x for x in r)))
    for r in roots:
        if not (all(x >= 0 for x in r) or all(x <= 0 for x in r)):
            raise DatumError("root with mixed signs: not a finite root system")
    return [(r, seen[r]) for r in roots]


# --------------------------------------------------------------------------
# diagram automorphisms


@dataclass(frozen=True)
class DiagramAut:
    """Finite-order automorphism of X permuting the simple roots."""

    root_permutation: Tuple[int, ...]
    lattice_map: Matrix  # acts on X (column vectors)
    name: str = "custom"

    @cached_property
    def order(self) -> int:
        k = 1
        cur = self.lattice_map
        ident = _identity(len(cur))
        while cur != ident:
            cur = _mat_mul(cur, self.lattice_map)
            k += 1
            if k > 64:
                raise DatumError("lattice map does not have finite order")
        return k

    @cached_property
    def y_map(self) -> Matrix:
        """Contragredient action on Y (preserves the pairing)."""
        return _transpose(_int_inverse(self.lattice_map))

    def to_json(self) -> dict:
        return {"name": self.name, "root_permutation": list(self.root_permutation),
                "lattice_map": [list(r) for r in self.lattice_map]}


def _graph_automorphisms(c: List[List[int]]) -> List[Tuple[int, ...]]:
    from itertools import permutations

    k = len(c)
    return [p for p in permutations(range(k))
            if all(c[p[i]][p[j]] == c[i][j] for i in range(k) for j in range(k))]


def build_aut(datum: RootDatum, spec=None) -> DiagramAut:
    """Build a diagram automorphism.

    ``spec`` is ``None``/``"trivial"``, ``"flip"`` (the nontrivial diagram
    symmetry for simply-connected labelled types, or the transpose-inverse
    twist for ``GL2``), a permutation string ``"perm:1,0"``, or a mapping
    with ``y_map`` (integer matrix on Y).
    """
    r = datum.rank
    k = datum.nsimple
    if spec is None or spec in ("trivial", "id", "identity", "none"):
        return DiagramAut(tuple(range(k)), _identity(r), "trivial")
    if isinstance(spec, dict) and "y_map" in spec:
        y_map = tuple(tuple(int(x) for x in row) for row in spec["y_map"])
        return _aut_from_y_map(datum, y_map, spec.get("name", "custom"))
    if spec in ("flip", "outer", "swap"):
        if datum.label == "GL2":
            return _aut_from_y_map(datum, ((0, -1), (-1, 0)), "flip")
        autos = [p for p in _graph_automorphisms(datum.cartan()) if p != tuple(range(k))]
        if not autos:
            raise DatumError(f"{datum.label} has no nontrivial diagram automorphism")
        perm = autos[0] if len(autos) == 1 else autos[-1]
        return _aut_from_perm(datum, perm, "flip")
    if isinstance(spec, str) and spec.startswith("perm:"):
        perm = tuple(int(x) for x in spec[5:].split(","))
        return _aut_from_perm(datum, perm, spec)
    raise DatumError(f"cannot parse automorphism {spec!r}")


def _aut_from_perm(datum: RootDatum, perm: Tuple[int, ...], name: str) -> DiagramAut:
    if sorted(perm) != list(range(datum.nsimple)):
        raise DatumError("not a permutation of the simple roots")
    if datum.rank != datum.nsimple or any(
        datum.simple_coroots[i] != tuple(int(i == j) for j in range(datum.rank)) for i in range(datum.rank)
    ):
        raise DatumError("permutation automorphisms need the simply-connected lattice; give y_map")
    # coroot_i = e_i, so the Y map is the permutation matrix e_i -> e_perm(i)
    y_map = tuple(tuple(int(perm[j] == i) for j in range(datum.rank)) for i in range(datum.rank))
    return _aut_from_y_map(datum, y_map, name)


def _aut_from_y_map(datum: RootDatum, y_map: Matrix, name: str) -> DiagramAut:
    x_map = _transpose(_int_inverse(y_map))
    perm = []
    for i in range(datum.nsimple):
        img = _mat_vec(x_map, datum.simple_roots[i])
        if img not in datum.simple_roots:
            raise DatumError("lattice map does not permute the simple roots")
        j = datum.simple_roots.index(img)
        if _mat_vec(y_map, datum.simple_coroots[i]) != datum.simple_coroots[j]:
            raise DatumError("lattice map does not permute the simple coroots compatibly")
        perm.append(j)
    aut = DiagramAut(tuple(perm), x_map, name)
    _ = aut.order
    return aut


# --------------------------------------------------------------------------
# public element types


@dataclass(frozen=True)
class WeylElt:
    """A Weyl group element: its matrix on Y and its ShortLex reduced word."""

    matrix: Matrix
    word: Tuple[int, ...] = field(compare=False)

    def __len__(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class ExtWeylElt:
    """The element uD^aut_power * weyl_part of the extended group."""

    aut_power: int
    weyl_part: WeylElt


# --------------------------------------------------------------------------
# the group table


class WeylGroup:
    """Enumerated finite Weyl group together with a diagram automorphism.

    Internally elements are integers; ``ext`` indices encode
    ``uD^a * w`` as ``a * size + w``.
    """

    def __init__(self, datum: RootDatum, aut: Optional[DiagramAut] = None):
        self.datum = datum
        self.aut = aut if aut is not None else build_aut(datum)
        self.k = self.aut.order
        cartan = datum.cartan()
        self.cartan_matrix = cartan
        nsim = datum.nsimple
        self.nsimple = nsim
        r = datum.rank

        pairs = _generate_roots(cartan)
        self.root_coeffs: List[Vector] = [p[0] for p in pairs]
        self.roots: List[Vector] = [
            tuple(sum(c[j] * datum.simple_roots[j][t] for j in range(nsim)) for t in range(r)) for c, _ in pairs
        ]
        self.coroots: List[Vector] = [
            tuple(sum(c[j] * datum.simple_coroots[j][t] for j in range(nsim)) for t in range(r)) for _, c in pairs
        ]
        self.positive: List[bool] = [all(x >= 0 for x in c) for c in self.root_coeffs]
        self.nroots = len(self.roots)
        self.coroot_index: Dict[Vector, int] = {c: i for i, c in enumerate(self.coroots)}
        self.root_index: Dict[Vector, int] = {c: i for i, c in enumerate(self.roots)}
        self.simple_root_index = [self.root_index[a] for a in datum.simple_roots]

        # simple reflections on Y: y -> y - <alpha_i, y> coroot_i
        refl = []
        for i in range(nsim):
            a, ac = datum.simple_roots[i], datum.simple_coroots[i]
            refl.append(tuple(tuple(int(s == t) - ac[s] * a[t] for t in range(r)) for s in range(r)))
        self._simple_mats = refl

        # breadth-first enumeration by right multiplication
        ident = _identity(r)
        mats = [ident]
        index = {ident: 0}
        frontier = [ident]
        while frontier:
            nxt = []
            for m in frontier:
                for s in refl:
                    p = _mat_mul(m, s)
                    if p not in index:
                        index[p] = len(mats)
                        mats.append(p)
                        nxt.append(p)
            frontier = nxt
        n = len(mats)

        def root_perm(m: Matrix) -> Tuple[int, ...]:
            return tuple(self.coroot_index[_mat_vec(m, c)] for c in self.coroots)

        perms = [root_perm(m) for m in mats]
        lengths = [sum(1 for a in range(self.nroots) if self.positive[a] and not self.positive[p[a]]) for p in perms]
        simple_idx = [index[s] for s in refl]
        left = [[index[_mat_mul(refl[i], m)] for i in range(nsim)] for m in mats]

        # ShortLex words: least left descent, then recurse
        words: List[Optional[Tuple[int, ...]]] = [None] * n
        order = sorted(range(n), key=lambda i: lengths[i])
        for w in order:
            if lengths[w] == 0:
                words[w] = ()
                continue
            for i in range(nsim):
                sw = left[w][i]
                if lengths[sw] < lengths[w]:
                    words[w] = (i,) + words[sw]
                    break
        perm_order = sorted(range(n), key=lambda i: (lengths[i], words[i]))
        relabel = {old: new for new, old in enumerate(perm_order)}
        self.size = n
        self.mats: List[Matrix] = [mats[o] for o in perm_order]
        self.index: Dict[Matrix, int] = {m: i for i, m in enumerate(self.mats)}
        self.words: List[Tuple[int, ...]] = [words[o] for o in perm_order]
        self.lengths: List[int] = [lengths[o] for o in perm_order]
        self.root_perm: List[Tuple[int, ...]] = [perms[o] for o in perm_order]
        self.simple: List[int] = [relabel[s] for s in simple_idx]
        self.left_simple: List[List[int]] = [[relabel[left[o][i]] for i in range(nsim)] for o in perm_order]

        self.mul: List[List[int]] = [[self.index[_mat_mul(a, b)] for b in self.mats] for a in self.mats]
        self.inv: List[int] = [row.index(0) for row in self.mul]
        self.x_mats: List[Matrix] = [_transpose(self.mats[self.inv[i]]) for i in range(n)]

        # automorphism: conjugation by uD on W and its action on Y
        ymap = self.aut.y_map
        ymap_inv = _int_inverse(ymap)
        self.aut_y_powers: List[Matrix] = [_identity(r)]
        for _ in range(1, self.k):
            self.aut_y_powers.append(_mat_mul(ymap, self.aut_y_powers[-1]))
        eps = [self.index[_mat_mul(_mat_mul(ymap, m), ymap_inv)] for m in self.mats]
        self.eps_powers: List[List[int]] = [list(range(n))]
        for _ in range(1, self.k):
            prev = self.eps_powers[-1]
            self.eps_powers.append([eps[prev[w]] for w in range(n)])

    # ------------------------------------------------------------------
    # elements

    def elt(self, i: int) -> WeylElt:
        return WeylElt(self.mats[i], self.words[i])

    def index_of(self, w) -> int:
        if isinstance(w, WeylElt):
            return self.index[w.matrix]
        return int(w)

    def from_word(self, word: Iterable[int]) -> int:
        w = 0
        for s in word:
            w = self.mul[w][self.simple[s]]
        return w

    def length(self, w: int) -> int:
        return self.lengths[w]

    def length_and_word(self, w) -> Tuple[int, Tuple[int, ...]]:
        """Length by inversion count and the ShortLex reduced word.

        Accepts a Weyl index, a :class:`WeylElt`, or an :class:`ExtWeylElt`
        (whose length is that of its Weyl part).
        """
        if isinstance(w, ExtWeylElt):
            w = w.weyl_part
        i = self.index_of(w)
        return self.lengths[i], self.words[i]

    def act_y(self, w: int, y: Sequence[int]) -> Vector:
        return _mat_vec(self.mats[w], y)

    # ------------------------------------------------------------------
    # order and subgroups

    @cached_property
    def _bruhat_below(self) -> List[FrozenSet[int]]:
        # products of all subwords of the ShortLex reduced word
        out = []
        for w in range(self.size):
            reach = {0}
            for s in self.words[w]:
                g = self.simple[s]
                reach |= {self.mul[x][g] for x in reach}
            out.append(frozenset(reach))
        return out

    def bruhat_leq(self, y: int, w: int) -> bool:
        return y in self._bruhat_below[w]

    def bruhat_interval(self, w: int) -> FrozenSet[int]:
        return self._bruhat_below[w]

    def in_parabolic(self, w: int, J: Iterable[int]) -> bool:
        js = set(J)
        return all(s in js for s in self.words[w])

    def enumerate(self, J: Optional[Iterable[int]] = None) -> List[int]:
        """Elements of the parabolic subgroup W_J in ShortLex order."""
        if J is None:
            return list(range(self.size))
        js = set(J)
        return [w for w in range(self.size) if set(self.words[w]) <= js]

    def longest_element(self, J: Optional[Iterable[int]] = None) -> int:
        elems = self.enumerate(J)
        top = max(self.lengths[w] for w in elems)
        tops = [w for w in elems if self.lengths[w] == top]
        assert len(tops) == 1, "longest element must be unique"
        return tops[0]

    def reflection(self, root: int) -> int:
        """Index of the reflection s_alpha for a root index."""
        a, ac = self.roots[root], self.coroots[root]
        r = self.datum.rank
        m = tuple(tuple(int(s == t) - ac[s] * a[t] for t in range(r)) for s in range(r))
        return self.index[m]

    # ------------------------------------------------------------------
    # extended group uD^a w

    @property
    def ext_size(self) -> int:
        return self.k * self.size

    def ext(self, a: int, w: int) -> int:
        return (a % self.k) * self.size + w

    def ext_parts(self, e: int) -> Tuple[int, int]:
        return divmod(e, self.size)

    def eps(self, w: int, power: int = 1) -> int:
        """uD^power * w * uD^-power."""
        return self.eps_powers[power % self.k][w]

    eps_d = eps

    def ext_mul(self, e1: int, e2: int) -> int:
        a1, w1 = divmod(e1, self.size)
        a2, w2 = divmod(e2, self.size)
        return self.ext(a1 + a2, self.mul[self.eps(w1, -a2)][w2])

    def ext_inv(self, e: int) -> int:
        a, w = divmod(e, self.size)
        # (a, w)^-1 = w^-1 uD^-a = uD^-a eps^a(w^-1)
        return self.ext(-a, self.eps(self.inv[w], a))

    def ext_length(self, e: int) -> int:
        return self.lengths[e % self.size]

    def ext_y_matrix(self, e: int) -> Matrix:
        a, w = divmod(e, self.size)
        return _mat_mul(self.aut_y_powers[a], self.mats[w])

    def ext_elt(self, e: int) -> ExtWeylElt:
        a, w = divmod(e, self.size)
        return ExtWeylElt(a, self.elt(w))

    def ext_index_of(self, e: ExtWeylElt) -> int:
        return self.ext(e.aut_power, self.index_of(e.weyl_part))

    def ext_root_image(self, e: int, root: int) -> int:
        """Index of the root (via its coroot) e(alpha)."""
        return self.coroot_index[_mat_vec(self.ext_y_matrix(e), self.coroots[root])]
