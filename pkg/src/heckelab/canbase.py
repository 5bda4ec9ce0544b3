"""Canonical basis, structure constants, cells, a-function and the J-ring.

The canonical basis is produced by a generic solver for bar-invariant
unitriangular bases (:func:`kl_solve`), so the same routine serves H_n^D,
the per-character algebras and the matrix algebra E_n^D.

>>> ctx = HeckeCtx.build("A1", 2)
>>> cb = canonical_basis(ctx)
>>> s, lam0 = ctx.G.simple[0], ctx.L.index[(0,)]
>>> print(ctx.elt(cb.elements[(s, lam0)]))
1*v^-1 TT[] 1_(0) + 1*v^0 TT[s0] 1_(0)
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from .hecke import HeckeCtx, HeckeElt, Key, Terms, _add_into
from .scalars import Laurent, Laurent2

__all__ = [
    "kl_solve",
    "CanBasis",
    "CellData",
    "JRingTable",
    "canonical_basis",
    "r_constants",
    "cells_and_a",
    "jring",
    "check_p1_p2_p3",
    "strongly_connected_components",
    "ad_compatibility",
]

ONE = Laurent.const(1)


class CheckFailure(AssertionError):
    """An identity that should hold exactly did not; carries a counterexample."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


# --------------------------------------------------------------------------
# generic bar-invariant basis solver


def kl_solve(
    indices: Sequence[Hashable],
    length: Callable[[Hashable], int],
    bar_of: Callable[[Hashable], Dict[Hashable, Laurent]],
) -> Dict[Hashable, Dict[Hashable, Laurent]]:
    """Bar-invariant elements c_w = t_w + sum_{y != w} p_{y,w} t_y, p in v^-1 Z[v^-1].

    ``bar_of(z)`` gives bar(t_z) = sum_y r_{y,z} t_y with r_{z,z} = 1 and
    r_{y,z} != 0 only for l(y) < l(z) when y != z.  For each w the
    coefficients p_{y,w} are found in order of decreasing l(y) from
    p - bar(p) = sum_{z != y} bar(p_z) r_{y,z}.
    """
    pos = {x: i for i, x in enumerate(indices)}
    bars = {z: bar_of(z) for z in indices}
    for z, expansion in bars.items():
        if expansion.get(z) != ONE:
            raise CheckFailure(f"bar({z}) does not have leading coefficient 1", z)
        for y in expansion:
            if y != z and length(y) >= length(z):
                raise CheckFailure("bar is not triangular with respect to length", (y, z))
    # r_{y,z} indexed by y for fast lookup
    inverse: Dict[Hashable, List[Tuple[Hashable, Laurent]]] = {y: [] for y in indices}
    for z, expansion in bars.items():
        for y, r in expansion.items():
            if y != z:
                inverse[y].append((z, r))
    order = sorted(indices, key=lambda x: (-length(x), pos[x]))
    out: Dict[Hashable, Dict[Hashable, Laurent]] = {}
    for w in indices:
        lw = length(w)
        p: Dict[Hashable, Laurent] = {w: ONE}
        pbar: Dict[Hashable, Laurent] = {w: ONE}
        for y in order:
            if y == w or length(y) > lw:
                continue
            rhs = Laurent()
            for z, r in inverse[y]:
                pz = pbar.get(z)
                if pz is not None:
                    rhs = rhs + pz * r
            if not rhs:
                continue
            if length(y) == lw or rhs.coeff(0):
                raise CheckFailure(f"no bar-invariant solution at ({y}, {w})", (y, w, str(rhs)))
            neg = rhs.negative_part()
            if neg - neg.bar() != rhs:
                raise CheckFailure(f"right side not antisymmetric at ({y}, {w})", (y, w, str(rhs)))
            p[y] = neg
            pbar[y] = neg.bar()
        out[w] = p
    return out


# --------------------------------------------------------------------------
# canonical basis of H_n^D


@dataclass
class CanBasis:
    """c_{w,lam} expanded in the TT-basis, and the inverse transition."""

    ctx: HeckeCtx
    keys: List[Key]
    elements: Dict[Key, Terms]
    inverse: Dict[Key, Dict[Key, Laurent]] = field(default_factory=dict)

    @cached_property
    def index(self) -> Dict[Key, int]:
        return {k: i for i, k in enumerate(self.keys)}

    def elt(self, key: Key) -> HeckeElt:
        return self.ctx.elt(self.elements[key])

    def source(self, key: Key) -> int:
        return key[1]

    def target(self, key: Key) -> int:
        return self.ctx.target(key)

    def to_c(self, terms: Terms) -> Dict[Key, Laurent]:
        """Expand an element in the canonical basis by peeling off longest terms."""
        G = self.ctx.G
        rest = dict(terms)
        out: Dict[Key, Laurent] = {}
        while rest:
            top = max(G.ext_length(e) for (e, _) in rest)
            layer = [k for k in rest if G.ext_length(k[0]) == top]
            for key in layer:
                c = rest.pop(key)
                out[key] = c
                for k2, p in self.elements[key].items():
                    if k2 != key:
                        _add_into(rest, k2, -(c * p))
        return out

    def from_c(self, coeffs: Dict[Key, Laurent]) -> Terms:
        out: Terms = {}
        for key, c in coeffs.items():
            for k2, p in self.elements[key].items():
                _add_into(out, k2, c * p)
        return out


def canonical_basis(ctx: HeckeCtx) -> CanBasis:
    """c_{w,lam} for every w in W^D and every character lam."""
    G = ctx.G
    elements: Dict[Key, Terms] = {}
    size = G.size
    for lam in range(ctx.L.size):
        for a in range(G.k):
            cols = [a * size + w for w in range(size)]
            sol = kl_solve(
                cols,
                G.ext_length,
                lambda e, lam=lam: {k[0]: c for k, c in ctx.bar_basis((e, lam)).items()},
            )
            for e in cols:
                elements[(e, lam)] = {(y, lam): c for y, c in sol[e].items()}
    keys = sorted(elements, key=ctx.sort_key)
    cb = CanBasis(ctx, keys, elements)
    _check_basis(cb)
    cb.inverse = _invert_unitriangular(cb)
    return cb


def _check_basis(cb: CanBasis) -> None:
    ctx, G = cb.ctx, cb.ctx.G
    for key, terms in cb.elements.items():
        e, lam = key
        if terms.get(key) != ONE:
            raise CheckFailure("leading coefficient is not 1", key)
        a, w = G.ext_parts(e)
        below = G.bruhat_interval(w)
        for (e2, l2), c in terms.items():
            if (e2, l2) == key:
                continue
            a2, w2 = G.ext_parts(e2)
            if l2 != lam or a2 != a or w2 not in below:
                raise CheckFailure("support not below in Bruhat order", (key, (e2, l2)))
            if c.max_deg() >= 0:
                raise CheckFailure("off-diagonal coefficient not in v^-1 Z[v^-1]", (key, (e2, l2)))
        if ctx.bar_terms(terms) != terms:
            raise CheckFailure("canonical basis element not bar-invariant", key)


def ad_compatibility(cb: CanBasis, power: int = 1) -> List[str]:
    """Failures of ad_D(c_{e,lam}) = c_{uD e uD^-1, uD lam} over the whole basis."""
    ctx, G = cb.ctx, cb.ctx.G
    u = G.ext(power, 0)
    failures = []
    for key in cb.keys:
        e, lam = key
        image = ctx.ad_d(cb.elt(key), power)
        partner = (G.ext_mul(G.ext_mul(u, e), G.ext_inv(u)), ctx.L.act_table[u][lam])
        if image.terms != cb.elements[partner]:
            failures.append(ctx.describe(key))
    return failures


def _invert_unitriangular(cb: CanBasis) -> Dict[Key, Dict[Key, Laurent]]:
    """TT_w 1_lam in the canonical basis, for every basis key."""
    G = cb.ctx.G
    out: Dict[Key, Dict[Key, Laurent]] = {}
    for key in sorted(cb.keys, key=lambda k: G.ext_length(k[0])):
        expansion: Dict[Key, Laurent] = {key: ONE}
        for y, p in cb.elements[key].items():
            if y == key:
                continue
            for z, q in out[y].items():
                _add_into(expansion, z, -(p * q))
        out[key] = expansion
    return out


# --------------------------------------------------------------------------
# structure constants


RConst = Dict[Tuple[int, int], Dict[int, Laurent]]


def r_constants(cb: CanBasis) -> RConst:
    """r[(b, b')] = {b'': r_{b,b'}^{b''}} over basis ids (zero products omitted)."""
    ctx = cb.ctx
    idx = cb.index
    by_source: Dict[int, List[Key]] = {}
    for key in cb.keys:
        by_source.setdefault(key[1], []).append(key)
    out: RConst = {}
    for key2 in cb.keys:
        tgt = ctx.target(key2)
        for key1 in by_source.get(tgt, []):
            prod = ctx.mul_terms(cb.elements[key1], cb.elements[key2])
            coeffs = cb.to_c(prod)
            out[(idx[key1], idx[key2])] = {idx[k]: c for k, c in coeffs.items()}
    return out


def strongly_connected_components(nodes: Sequence[int], edges: Dict[int, Iterable[int]]) -> List[List[int]]:
    """Tarjan's algorithm (iterative); components are returned sorted."""
    index_of: Dict[int, int] = {}
    low: Dict[int, int] = {}
    on_stack = set()
    stack: List[int] = []
    comps: List[List[int]] = []
    counter = 0
    for root in nodes:
        if root in index_of:
            continue
        work = [(root, iter(edges.get(root, ())))]
        index_of[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index_of:
                    index_of[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(edges.get(nxt, ()))))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index_of[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index_of[node]:
                comp = []
                while True:
                    x = stack.pop()
                    on_stack.discard(x)
                    comp.append(x)
                    if x == node:
                        break
                comps.append(sorted(comp))
    comps.sort()
    return comps


def _reach(nodes: Sequence[int], edges: Dict[int, set]) -> Dict[int, frozenset]:
    out = {}
    for b in nodes:
        seen = {b}
        frontier = [b]
        while frontier:
            x = frontier.pop()
            for y in edges.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        out[b] = frozenset(seen)
    return out


@dataclass
class CellData:
    """Two-sided and left cells, the preorder, and the a-function."""

    two_sided: List[List[int]]
    left: List[List[int]]
    cell_of: List[int]
    left_cell_of: List[int]
    below: Dict[int, frozenset]  # below[b] = {b' : b' precedes-or-equals b}
    a_values: List[int]

    def same_cell(self, b: int, b2: int) -> bool:
        return self.cell_of[b] == self.cell_of[b2]

    def strictly_below(self, b2: int, b: int) -> bool:
        return b2 in self.below[b] and not self.same_cell(b, b2)


def _edges_from(pairs: Iterable[Tuple[int, Dict[int, Laurent]]], nb: int) -> Dict[int, set]:
    edges: Dict[int, set] = {b: set() for b in range(nb)}
    for src, coeffs in pairs:
        edges[src].update(coeffs)
    return edges


def cells_and_a(cb: CanBasis, rc: RConst) -> CellData:
    """Cells as strongly connected components of the ideal-closure preorder."""
    nb = len(cb.keys)
    nodes = list(range(nb))
    left_edges = _edges_from(((b2, coeffs) for (b1, b2), coeffs in rc.items()), nb)
    right_edges = _edges_from(((b1, coeffs) for (b1, b2), coeffs in rc.items()), nb)
    two_edges = {b: left_edges[b] | right_edges[b] for b in nodes}

    gen_edges = _generator_edges(cb)
    full_reach = _reach(nodes, two_edges)
    if _reach(nodes, gen_edges) != full_reach:
        raise CheckFailure("generator closure differs from full-basis closure")

    two = strongly_connected_components(nodes, two_edges)
    left = strongly_connected_components(nodes, left_edges)
    cell_of = [0] * nb
    for i, c in enumerate(two):
        for b in c:
            cell_of[b] = i
    left_of = [0] * nb
    for i, c in enumerate(left):
        for b in c:
            left_of[b] = i
    a_values = []
    for b in nodes:
        cell = set(two[cell_of[b]])
        m = 0
        for b2 in cell:
            for b3, r in rc.get((b, b2), {}).items():
                if b3 in cell:
                    m = max(m, r.max_deg())
        a_values.append(m)
    return CellData(two, left, cell_of, left_of, full_reach, a_values)


def _generator_edges(cb: CanBasis) -> Dict[int, set]:
    """Edges b -> supp(g c_b) and supp(c_b g) for algebra generators g."""
    ctx, G = cb.ctx, cb.ctx.G
    idx = cb.index
    gens: List[Terms] = []
    for lam in range(ctx.L.size):
        gens.append({(0, lam): ONE})
        for i in range(G.nsimple):
            gens.append({(G.simple[i], lam): ONE})
        if G.k > 1:
            gens.append({(G.ext(1, 0), lam): ONE})
            gens.append({(G.ext(-1, 0), lam): ONE})
    edges: Dict[int, set] = {b: set() for b in range(len(cb.keys))}
    for key in cb.keys:
        b = idx[key]
        for g in gens:
            for prod in (ctx.mul_terms(g, cb.elements[key]), ctx.mul_terms(cb.elements[key], g)):
                if prod:
                    edges[b].update(idx[k] for k in cb.to_c(prod))
    return edges


# --------------------------------------------------------------------------
# J-ring


@dataclass
class JRingTable:
    """gamma constants, distinguished set and the homomorphism Phi."""

    gamma: Dict[Tuple[int, int, int], int]
    distinguished: List[int]
    phi: Dict[int, Dict[int, Laurent]]  # phi[b] = {b2: coeff of t_b2}

    def gamma_product(self, x: Dict[int, object], y: Dict[int, object]) -> Dict[int, object]:
        """Product in the J-ring (coefficients in any ring)."""
        by_first: Dict[int, List[Tuple[int, int, int]]] = {}
        for (b, b2, b3), g in self.gamma.items():
            by_first.setdefault(b, []).append((b2, b3, g))
        out: Dict[int, object] = {}
        for b, cx in x.items():
            for b2, b3, g in by_first.get(b, ()):
                cy = y.get(b2)
                if cy:
                    val = cx * cy * g
                    s = out.get(b3, 0) + val
                    if s:
                        out[b3] = s
                    else:
                        out.pop(b3, None)
        return out


def _solve_unit(cell: List[int], gamma: Dict[Tuple[int, int, int], int]) -> Optional[Dict[int, Fraction]]:
    """Exact solve for the two-sided unit of the gamma ring restricted to a cell."""
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    pos = {b: i for i, b in enumerate(cell)}
    rows = []
    rhs = []
    for b2 in cell:
        for b3 in cell:
            rows.append([QQ(gamma.get((b, b2, b3), 0)) for b in cell])
            rhs.append([QQ(int(b2 == b3))])
            rows.append([QQ(gamma.get((b2, b, b3), 0)) for b in cell])
            rhs.append([QQ(int(b2 == b3))])
    A = DomainMatrix(rows, (len(rows), len(cell)), QQ)
    bvec = DomainMatrix(rhs, (len(rhs), 1), QQ)
    aug = A.hstack(bvec)
    rref, pivots = aug.rref()
    ncol = len(cell)
    if ncol in pivots:
        return None
    if len(pivots) != ncol:
        raise CheckFailure("gamma-ring unit is not unique", cell)
    sol = {}
    dense = rref.to_Matrix()
    for r, c in enumerate(pivots):
        val = dense[r, ncol]
        sol[cell[c]] = Fraction(int(val.p), int(val.q))
    del pos
    return sol


def jring(cb: CanBasis, rc: RConst, cd: CellData) -> JRingTable:
    """gamma constants, the distinguished set and Phi (requires P1)."""
    nb = len(cb.keys)
    for cell in cd.two_sided:
        if len({cd.a_values[b] for b in cell}) != 1:
            raise CheckFailure("P1 fails: a-function not constant on a two-sided cell", cell)
    gamma: Dict[Tuple[int, int, int], int] = {}
    for (b1, b2), coeffs in rc.items():
        if not cd.same_cell(b1, b2):
            continue
        a = cd.a_values[b1]
        for b3, r in coeffs.items():
            if cd.same_cell(b1, b3):
                g = r.coeff(a)
                if g:
                    gamma[(b1, b2, b3)] = g
    distinguished = []
    for cell in cd.two_sided:
        sol = _solve_unit(cell, gamma)
        if sol is None:
            raise CheckFailure("P2 fails: no unit in the gamma ring of this cell", cell)
        for b, x in sol.items():
            if x not in (0, 1):
                raise CheckFailure("P2 fails: unit not compatible with the basis", (cell, b, str(x)))
            if x == 1:
                distinguished.append(b)
    distinguished.sort()
    dset = set(distinguished)
    phi: Dict[int, Dict[int, Laurent]] = {}
    for b in range(nb):
        row: Dict[int, Laurent] = {}
        for b1 in distinguished:
            for b2, r in rc.get((b, b1), {}).items():
                if cd.same_cell(b1, b2):
                    row[b2] = row.get(b2, Laurent()) + r
        phi[b] = {k: c for k, c in row.items() if c}
    del dset
    return JRingTable(gamma, distinguished, phi)


# --------------------------------------------------------------------------
# full check of P1, P2, P3 and the properties of Phi


@dataclass
class P123Report:
    """Outcome of :func:`check_p1_p2_p3`."""

    config: str
    basis_size: int
    ncells: int
    p1: bool
    p2: bool
    p3: bool
    p3_quadruples: int
    distinguished_ok: bool
    phi_unital: bool
    phi_hom: bool
    congruence_b: bool
    phi_rank_at_one: bool
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all([self.p1, self.p2, self.p3, self.distinguished_ok, self.phi_unital, self.phi_hom,
                    self.congruence_b, self.phi_rank_at_one])


def _p3(cb: CanBasis, rc: RConst, cd: CellData, sample: Optional[int], seed: int) -> Tuple[bool, int, list]:
    """Two-variable identity for all (b1, b2, b3, b4) with b2 ~ b4.

    Both sides vanish identically unless src(b1) = tgt(b2) and
    src(b2) = tgt(b3) (every summand contains a product of basis elements
    with mismatched idempotents), so only such chains are enumerated.
    """
    ctx = cb.ctx
    keys = cb.keys
    nb = len(keys)
    src = [k[1] for k in keys]
    tgt = [ctx.target(k) for k in keys]
    by_tgt: Dict[int, List[int]] = {}
    for b in range(nb):
        by_tgt.setdefault(tgt[b], []).append(b)
    triples = [(b1, b2, b3) for b2 in range(nb) for b1 in range(nb) if src[b1] == tgt[b2]
               for b3 in by_tgt.get(src[b2], [])]
    if sample is not None and len(triples) > sample:
        triples = random.Random(seed).sample(triples, sample)
    failures = []
    count = 0
    for b1, b2, b3 in triples:
        cell = cd.cell_of[b2]
        lhs: Dict[int, Laurent2] = {}
        rhs: Dict[int, Laurent2] = {}
        for beta, r1 in rc.get((b1, b2), {}).items():
            if cd.cell_of[beta] != cell:
                continue
            left = Laurent2.in_v(r1)
            for b4, r2 in rc.get((beta, b3), {}).items():
                if cd.cell_of[b4] == cell:
                    lhs[b4] = lhs.get(b4, Laurent2()) + left * Laurent2.in_vprime(r2)
        for beta, r2 in rc.get((b2, b3), {}).items():
            if cd.cell_of[beta] != cell:
                continue
            right = Laurent2.in_vprime(r2)
            for b4, r1 in rc.get((b1, beta), {}).items():
                if cd.cell_of[b4] == cell:
                    rhs[b4] = rhs.get(b4, Laurent2()) + Laurent2.in_v(r1) * right
        for b4 in set(lhs) | set(rhs):
            count += 1
            if lhs.get(b4, Laurent2()) != rhs.get(b4, Laurent2()):
                failures.append(("P3", b1, b2, b3, b4))
    return not failures, count, failures


def check_p1_p2_p3(ctx: HeckeCtx, p3_sample: Optional[int] = None, seed: int = 0,
                   cb: Optional[CanBasis] = None) -> P123Report:
    """Verify P1-P3, the distinguished-element facts and the properties of Phi."""
    cb = cb or canonical_basis(ctx)
    rc = r_constants(cb)
    cd = cells_and_a(cb, rc)
    failures: List[str] = []
    p1 = all(len({cd.a_values[b] for b in c}) == 1 for c in cd.two_sided)
    if not p1:
        failures.append("P1")
        return P123Report(repr(ctx), len(cb.keys), len(cd.two_sided), False, False, False, 0,
                          False, False, False, False, False, failures)
    try:
        jt = jring(cb, rc, cd)
        p2 = True
    except CheckFailure as exc:
        failures.append(str(exc))
        return P123Report(repr(ctx), len(cb.keys), len(cd.two_sided), True, False, False, 0,
                          False, False, False, False, False, failures)
    p3, nquad, p3fail = _p3(cb, rc, cd, p3_sample, seed)
    failures.extend(map(str, p3fail[:5]))

    G, L = ctx.G, ctx.L
    dist_ok = True
    for b in jt.distinguished:
        e, lam = cb.keys[b]
        a, w = G.ext_parts(e)
        if a != 0 or w not in L.lambda_system(lam).W_lambda or G.mul[w][w] != 0:
            dist_ok = False
            failures.append(f"distinguished {ctx.describe(cb.keys[b])} violates w in W_lambda, w^2=1")

    checks = phi_checks(cb, rc, cd, jt)
    failures.extend(checks["failures"])
    return P123Report(repr(ctx), len(cb.keys), len(cd.two_sided), p1, p2, p3, nquad, dist_ok,
                      checks["unital"], checks["hom"], checks["congruence"], checks["rank"], failures)


def phi_of_terms(cb: CanBasis, jt: JRingTable, terms: Terms) -> Dict[int, Laurent]:
    idx = cb.index
    out: Dict[int, Laurent] = {}
    for key, c in cb.to_c(terms).items():
        for b2, r in jt.phi[idx[key]].items():
            s = out.get(b2, Laurent()) + c * r
            if s:
                out[b2] = s
            else:
                out.pop(b2, None)
    return out


def phi_checks(cb: CanBasis, rc: RConst, cd: CellData, jt: JRingTable) -> dict:
    """Phi unital, multiplicative on generator-by-basis pairs, congruence (b), rank at v=1."""
    ctx, G = cb.ctx, cb.ctx.G
    idx = cb.index
    nb = len(cb.keys)
    failures: List[str] = []
    unit_img = phi_of_terms(cb, jt, ctx.unit().terms)
    unital = unit_img == {b: Laurent.const(1) for b in jt.distinguished}
    if not unital:
        failures.append("Phi(1) is not the J-ring unit")

    gens: List[Terms] = []
    for lam in range(ctx.L.size):
        gens.append({(0, lam): ONE})
        for i in range(G.nsimple):
            gens.append({(G.simple[i], lam): ONE})
        if G.k > 1:
            gens.append({(G.ext(1, 0), lam): ONE})
    hom = True
    congruence = True
    gamma_pairs: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for (g1, g2, g3), gm in jt.gamma.items():
        gamma_pairs.setdefault((g1, g2), []).append((g3, gm))
    for g in gens:
        phi_g = phi_of_terms(cb, jt, g)
        for key in cb.keys:
            b = idx[key]
            prod = ctx.mul_terms(g, cb.elements[key])
            lhs = phi_of_terms(cb, jt, prod)
            rhs = jt.gamma_product(phi_g, jt.phi[b])
            if lhs != rhs:
                hom = False
                failures.append(f"Phi not multiplicative at ({g}, {ctx.describe(key)})")
            # x b = Phi(x) * b modulo strictly lower basis elements
            xb = {idx[k]: c for k, c in cb.to_c(prod).items()}
            star: Dict[int, Laurent] = {}
            for b2, c in phi_g.items():
                for g3, gm in gamma_pairs.get((b2, b), ()):
                    star[g3] = star.get(g3, Laurent()) + c * gm
            for b3 in set(xb) | set(star):
                diff = xb.get(b3, Laurent()) - star.get(b3, Laurent())
                if diff and not cd.strictly_below(b3, b):
                    congruence = False
                    failures.append(f"leading-term congruence for Phi fails at {ctx.describe(key)}")
    rank_ok = phi_rank_at_one(jt, nb) == nb
    if not rank_ok:
        failures.append("Phi at v=1 is not invertible")
    return {"unital": unital, "hom": hom, "congruence": congruence, "rank": rank_ok, "failures": failures}


def phi_matrix_at_one(jt: JRingTable, nb: int):
    """The integer matrix of Phi at v = 1 (rows b, columns t_b2)."""
    return [[int(jt.phi[b].get(b2, Laurent()).at_one()) for b2 in range(nb)] for b in range(nb)]


def phi_rank_at_one(jt: JRingTable, nb: int) -> int:
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    M = DomainMatrix([[QQ(x) for x in row] for row in phi_matrix_at_one(jt, nb)], (nb, nb), QQ)
    return M.rank()
