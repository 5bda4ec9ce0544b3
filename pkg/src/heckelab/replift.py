"""Simple modules at v = 1, their lifts to generic v, Schur elements.

At v = 1 the algebra H_n^D is the groupoid algebra of W^D acting on the
characters, so its simple modules are induced from irreducible characters of
stabilizers.  Nothing is ever written as a matrix: a module is known by its
trace on the standard basis.  The lift to generic v goes through the
homomorphism Phi into the asymptotic ring, whose specialization at v = 1 is
inverted exactly.

>>> from heckelab.hecke import HeckeCtx
>>> ctx = HeckeCtx.build("A1", 2)
>>> mods = simple_modules_v1(ctx)
>>> len(mods.tags), all(t.fixed for t in mods.tags)
(4, True)
>>> table = lift_traces(ctx, mods)
>>> zero, s = ctx.L.index[(0,)], ctx.G.simple[0]
>>> print(table.trace(0, (s, zero)))
1*v^1
>>> f = schur_elements(table)
>>> print(f[0])
1*v^2 + 1*v^0
>>> print(f[1])
1*v^0 + 1*v^-2
"""

from __future__ import annotations

import csv
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

from .canbase import CheckFailure, canonical_basis, cells_and_a, jring, phi_matrix_at_one, phi_of_terms, r_constants
from .hecke import HeckeCtx, Key, Terms
from .scalars import Cyclo, Laurent, lcm

__all__ = [
    "FiniteGroupData",
    "CharTable",
    "char_table",
    "SimpleModuleTag",
    "SimpleModules",
    "simple_modules_v1",
    "LiftedTraceTable",
    "lift_traces",
    "schur_elements",
    "ReplReport",
    "orthogonality_checks",
    "quasi_rational_check",
    "semisimple_at",
    "write_schur_csv",
    "write_trace_csv",
]

DEFAULT_GROUP_BOUND = 10 ** 4

Scalar = Union[int, Fraction, Cyclo]


# --------------------------------------------------------------------------
# finite groups and their character tables


@dataclass
class FiniteGroupData:
    """A subgroup of the extended Weyl group with its local Cayley table."""

    elements: List[int]
    mul: List[List[int]]
    inv: List[int]
    classes: List[List[int]]
    class_of: List[int]
    orders: List[int]
    label: str = ""

    @classmethod
    def from_ext(cls, G, elements: Iterable[int], label: str = "") -> "FiniteGroupData":
        """Build from ext indices of a subgroup of W^D (closure is asserted)."""
        elts = sorted(set(elements))
        pos = {e: i for i, e in enumerate(elts)}
        if 0 not in pos:
            raise ValueError("subgroup must contain the identity")
        try:
            mul = [[pos[G.ext_mul(a, b)] for b in elts] for a in elts]
        except KeyError:
            raise ValueError("elements are not closed under multiplication") from None
        inv = [row.index(0) for row in mul]
        class_of = [-1] * len(elts)
        classes: List[List[int]] = []
        for x in range(len(elts)):
            if class_of[x] >= 0:
                continue
            cl = sorted({mul[mul[g][x]][inv[g]] for g in range(len(elts))})
            for y in cl:
                class_of[y] = len(classes)
            classes.append(cl)
        orders = []
        for x in range(len(elts)):
            o, y = 1, x
            while y != 0:
                y = mul[y][x]
                o += 1
            orders.append(o)
        return cls(elts, mul, inv, classes, class_of, orders, label)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def exponent(self) -> int:
        m = 1
        for o in self.orders:
            m = lcm(m, o)
        return m

    def local(self, e: int) -> int:
        return self.elements.index(e)

    def power(self, x: int, k: int) -> int:
        y = 0
        for _ in range(k % self.orders[x]):
            y = self.mul[y][x]
        return y


@dataclass
class CharTable:
    """Irreducible characters, rows = characters, columns = classes."""

    group: FiniteGroupData
    values: List[List[Cyclo]]
    conductor: int

    def degree(self, i: int) -> int:
        return int(self.values[i][0].to_rational())

    def value(self, i: int, x: int) -> Cyclo:
        """Value of character i at the local element x."""
        return self.values[i][self.group.class_of[x]]

    def __len__(self) -> int:
        return len(self.values)


def _cyclo_key(c: Cyclo, m: int) -> Tuple[Fraction, ...]:
    return c.embed(m).a


def char_table(group: FiniteGroupData, bound: int = DEFAULT_GROUP_BOUND, seed: int = 0) -> CharTable:
    """Irreducible characters by class-sum eigenvectors, made exact afterwards.

    Simultaneous eigenvectors of the class-multiplication matrices give the
    central characters numerically; the exact value at g is rebuilt from the
    eigenvalue multiplicities of g, which are integers read off the values at
    the powers of g.  Orthogonality is then checked in exact arithmetic.

    >>> from heckelab.weyl import WeylGroup, build_root_datum
    >>> G = WeylGroup(build_root_datum("A2"))
    >>> t = char_table(FiniteGroupData.from_ext(G, range(G.size)))
    >>> sorted(t.degree(i) for i in range(len(t)))
    [1, 1, 2]
    """
    import numpy as np

    h = group.order
    if h > bound:
        raise ValueError(f"group of order {h} exceeds the bound {bound}")
    classes, class_of, mul, inv = group.classes, group.class_of, group.mul, group.inv
    r = len(classes)
    reps = [cl[0] for cl in classes]
    sizes = [len(cl) for cl in classes]
    # c[j][k][l] = #{x in C_j : x^-1 g_l in C_k}
    const = np.zeros((r, r, r))
    for j, cl in enumerate(classes):
        for x in cl:
            xi = inv[x]
            for l, g in enumerate(reps):
                const[j, class_of[mul[xi][g]], l] += 1
    rng = random.Random(seed)
    omegas = None
    for _attempt in range(20):
        weights = [rng.uniform(1.0, 2.0) for _ in range(r)]
        M = sum(wt * const[j] for j, wt in enumerate(weights))
        evals, evecs = np.linalg.eig(M)
        gaps = [abs(evals[a] - evals[b]) for a in range(r) for b in range(a + 1, r)]
        if not gaps or min(gaps) > 1e-6:
            omegas = [evecs[:, i] / evecs[class_of[0], i] for i in range(r)]
            break
    if omegas is None:
        raise CheckFailure("could not separate the central characters", group.label)
    m = group.exponent
    rows: List[List[Cyclo]] = []
    for om in omegas:
        norm = sum(abs(om[j]) ** 2 / sizes[j] for j in range(r)).real
        deg = (h / norm) ** 0.5
        approx = [deg * om[j] / sizes[j] for j in range(r)]
        row = []
        for j, g in enumerate(reps):
            o = group.orders[g]
            vals = [approx[class_of[group.power(g, i)]] for i in range(o)]
            exact = Cyclo.rational(0, m)
            for t in range(o):
                mult = sum(vals[i] * np.exp(-2j * np.pi * i * t / o) for i in range(o)) / o
                k = round(mult.real)
                if abs(mult - k) > 1e-6 or k < 0:
                    raise CheckFailure("eigenvalue multiplicity is not a nonnegative integer", (group.label, j))
                if k:
                    exact = exact + Cyclo.root(m, t * (m // o)) * k
            row.append(exact)
        rows.append(row)
    trivial = [Cyclo.rational(1, m)] * r

    def sort_key(row):
        return (row[0].to_rational(), row != trivial, tuple(_cyclo_key(c, m) for c in row))

    rows.sort(key=sort_key)
    table = CharTable(group, rows, m)
    _check_orthogonality(table)
    return table


def _check_orthogonality(t: CharTable) -> None:
    h, sizes = t.group.order, [len(cl) for cl in t.group.classes]
    r = len(sizes)
    if len(t.values) != r:
        raise CheckFailure("number of characters differs from number of classes", t.group.label)
    for a in range(r):
        for b in range(r):
            s = sum((t.values[a][j] * t.values[b][j].sp_conj() * sizes[j] for j in range(r)), Cyclo.rational(0))
            if s != (h if a == b else 0):
                raise CheckFailure("row orthogonality fails", (t.group.label, a, b))
            s = sum((t.values[i][a] * t.values[i][b].sp_conj() for i in range(r)), Cyclo.rational(0))
            if s != (Fraction(h, sizes[a]) if a == b else 0):
                raise CheckFailure("column orthogonality fails", (t.group.label, a, b))
    if sum(t.degree(i) ** 2 for i in range(r)) != h:
        raise CheckFailure("sum of squared degrees differs from the group order", t.group.label)


# --------------------------------------------------------------------------
# simple modules at v = 1


@dataclass
class SimpleModuleTag:
    """One simple module: a W-orbit of characters and a stabilizer irrep."""

    index: int
    rep: int
    orbit: Tuple[int, ...]
    irrep: int
    dim: int
    bar: int = -1
    fixed: bool = False
    extension: Optional[int] = None

    def label(self, ctx: HeckeCtx) -> str:
        lam = ",".join(str(x) for x in ctx.L.char(self.rep).values)
        return f"u{self.index}[({lam}),chi{self.irrep}]"

    def to_json(self, ctx: HeckeCtx) -> dict:
        return {
            "index": self.index,
            "label": self.label(ctx),
            "orbit_rep": list(ctx.L.char(self.rep).values),
            "orbit_size": len(self.orbit),
            "irrep": self.irrep,
            "dim": self.dim,
            "bar": self.bar,
            "fixed": self.fixed,
            "extension": self.extension,
        }


class SimpleModules:
    """The set U with the a-twist, the fixed set and chosen extensions."""

    def __init__(self, ctx: HeckeCtx, tags: List[SimpleModuleTag], tables: Dict[int, CharTable],
                 ext_tables: Dict[int, CharTable], transporter: Dict[int, int]):
        self.ctx = ctx
        self.tags = tags
        self.tables = tables
        self.ext_tables = ext_tables
        self.transporter = transporter

    @cached_property
    def conductor(self) -> int:
        m = 1
        for t in list(self.tables.values()) + list(self.ext_tables.values()):
            m = lcm(m, t.conductor)
        return m

    @property
    def fixed(self) -> List[int]:
        return [t.index for t in self.tags if t.fixed]

    def keys_for(self, u: int) -> List[Key]:
        """Standard basis keys on which the trace of u is defined."""
        return self.ctx.basis_keys(ext=self.tags[u].fixed)

    def direct_trace(self, u: int, key: Key) -> Cyclo:
        """tr(TT_e 1_lam, E_u) at v = 1 by the induced-character formula."""
        ctx, G = self.ctx, self.ctx.G
        tag = self.tags[u]
        e, lam = key
        zero = Cyclo.rational(0)
        if lam not in tag.orbit or ctx.L.act_table[e][lam] != lam:
            return zero
        g = self.transporter[lam]
        x = G.ext_mul(G.ext_mul(G.ext_inv(g), e), g)
        if G.ext_parts(x)[0] == 0:
            table = self.tables[tag.rep]
            return table.value(tag.irrep, table.group.local(x))
        if not tag.fixed:
            raise ValueError("E_u has no extension: u is not a-fixed")
        table = self.ext_tables[tag.rep]
        return table.value(tag.extension, table.group.local(x))


def _transporters(ctx: HeckeCtx, orbits: List[List[int]]) -> Dict[int, int]:
    """For every character mu the least w in W with w(rep) = mu."""
    G, act = ctx.G, ctx.L.act_table
    out: Dict[int, int] = {}
    for orb in orbits:
        rep = orb[0]
        for w in range(G.size):
            out.setdefault(act[w][rep], w)
    return out


def simple_modules_v1(ctx: HeckeCtx, bound: int = DEFAULT_GROUP_BOUND) -> SimpleModules:
    """Enumerate U, compute u -> u-bar and choose extensions to H_n^{D,1}.

    The twist is found by matching characters: E_u twisted by conjugation by
    TT_uD has trace h -> tr(a(h), E_u), and exactly one u' must share it.
    """
    G, L = ctx.G, ctx.L
    orbits = L.orbits(ext=False)
    transporter = _transporters(ctx, orbits)
    tags: List[SimpleModuleTag] = []
    tables: Dict[int, CharTable] = {}
    for orb in orbits:
        rep = orb[0]
        grp = FiniteGroupData.from_ext(G, L.stabilizer(rep, ext=False), f"Stab_W{L.char(rep).values}")
        tables[rep] = char_table(grp, bound)
        for i in range(len(tables[rep])):
            tags.append(SimpleModuleTag(len(tags), rep, tuple(orb), i, len(orb) * tables[rep].degree(i)))
    mods = SimpleModules(ctx, tags, tables, {}, transporter)

    w_keys = ctx.basis_keys(ext=False)
    signature = {}
    for tag in tags:
        signature[tag.index] = tuple(mods.direct_trace(tag.index, k) for k in w_keys)
    by_sig: Dict[tuple, int] = {}
    for u, sig in signature.items():
        if sig in by_sig:
            raise CheckFailure("two simple modules share a character", (by_sig[sig], u))
        by_sig[sig] = u
    for tag in tags:
        twisted = []
        for k in w_keys:
            (k2, _c), = ctx.ad_d(ctx.basis(*k)).terms.items()
            twisted.append(mods.direct_trace(tag.index, k2))
        twisted_sig = tuple(twisted)
        if twisted_sig not in by_sig:
            raise CheckFailure("twisted module matches no simple module", tag.index)
        tag.bar = by_sig[twisted_sig]
        tag.fixed = tag.bar == tag.index
    if sorted(t.bar for t in tags) != list(range(len(tags))):
        raise CheckFailure("u -> u-bar is not a permutation", [t.bar for t in tags])

    for tag in tags:
        if not tag.fixed:
            continue
        if tag.rep not in mods.ext_tables:
            grp = FiniteGroupData.from_ext(G, L.stabilizer(tag.rep, ext=True), f"Stab_WD{L.char(tag.rep).values}")
            mods.ext_tables[tag.rep] = char_table(grp, bound)
        ext = mods.ext_tables[tag.rep]
        small = tables[tag.rep]
        candidates = []
        for j in range(len(ext)):
            ok = True
            for x, e in enumerate(ext.group.elements):
                if G.ext_parts(e)[0] == 0 and ext.value(j, x) != small.value(tag.irrep, small.group.local(e)):
                    ok = False
                    break
            if ok:
                candidates.append(j)
        if not candidates:
            raise CheckFailure("no extension of an a-fixed module to H_n^{D,1}", tag.index)
        m = ext.conductor
        # TT_uD^k = 1 in H^D, so every candidate already satisfies X^k = 1
        tag.extension = min(candidates, key=lambda j: tuple(_cyclo_key(c, m) for c in ext.values[j]))
    total = sum(t.dim ** 2 for t in tags)
    if total != ctx.dim_w_part:
        raise CheckFailure("Wedderburn dimension count fails", (total, ctx.dim_w_part))
    return mods


# --------------------------------------------------------------------------
# lifting through Phi


@dataclass
class LiftedTraceTable:
    """tr(TT_e 1_lam, E_u^v) for every u and every key in its domain."""

    ctx: HeckeCtx
    modules: SimpleModules
    entries: Dict[Tuple[int, Key], Laurent] = field(default_factory=dict)

    def trace(self, u: int, key: Key) -> Laurent:
        if key[0] >= self.ctx.G.size and not self.modules.tags[u].fixed:
            raise KeyError("ext keys are only defined for a-fixed modules")
        return self.entries.get((u, key), Laurent())

    def to_json(self) -> List[dict]:
        ctx = self.ctx
        out = []
        for (u, key), p in sorted(self.entries.items(), key=lambda kv: (kv[0][0], ctx.sort_key(kv[0][1]))):
            out.append({"u": u, "basis": ctx.describe(key),
                        "trace": {str(k): _scalar_json(c) for k, c in sorted(p.items())}})
        return out


def _norm(c):
    """Rational cyclotomic values are stored as plain ints/Fractions."""
    if isinstance(c, Cyclo) and c.is_rational():
        q = c.to_rational()
        return int(q) if q.denominator == 1 else q
    return c


def _scalar_json(c):
    if isinstance(c, Cyclo):
        return str(c.to_rational()) if c.is_rational() else c.to_json()
    return str(c)


def _phi_one_inverse(jt, nb: int) -> List[List[Fraction]]:
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    M = DomainMatrix([[QQ(x) for x in row] for row in phi_matrix_at_one(jt, nb)], (nb, nb), QQ)
    if M.rank() != nb:
        raise CheckFailure("Phi at v=1 is singular")
    inv = M.inv().to_Matrix()
    return [[Fraction(int(inv[i, j].p), int(inv[i, j].q)) for j in range(nb)] for i in range(nb)]


def lift_traces(ctx: HeckeCtx, mods: SimpleModules, cb=None, jt=None) -> LiftedTraceTable:
    """Traces of E_u^v: Phi(h) expanded in t_b, each t_b acting by (Phi^1)^-1(t_b).

    With Phi^1(c_b) = sum_b2 M[b][b2] t_b2 we have t_b2 = sum_b N[b2][b] c_b for
    N = M^-1, and tr(c_b, E_u) at v = 1 is read off the direct character.
    """
    if cb is None or jt is None:
        cb = canonical_basis(ctx)
        rc = r_constants(cb)
        jt = jring(cb, rc, cells_and_a(cb, rc))
    nb = len(cb.keys)
    N = _phi_one_inverse(jt, nb)
    size = ctx.G.size
    table = LiftedTraceTable(ctx, mods)
    phi_cache = {key: phi_of_terms(cb, jt, {key: Laurent.const(1)}) for key in cb.keys}
    for tag in mods.tags:
        u = tag.index
        keys = mods.keys_for(u)
        direct = {k: mods.direct_trace(u, k) for k in keys}
        tr_c: Dict[int, Cyclo] = {}
        for b, key in enumerate(cb.keys):
            if key[0] >= size and not tag.fixed:
                continue
            total = Cyclo.rational(0)
            for k2, c in cb.elements[key].items():
                d = direct[k2]
                if d:
                    total = total + d * c.at_one()
            tr_c[b] = total
        tr_t: Dict[int, Cyclo] = {}
        for b2, key2 in enumerate(cb.keys):
            if key2[0] >= size and not tag.fixed:
                continue
            total = Cyclo.rational(0)
            for b, coeff in enumerate(N[b2]):
                if not coeff:
                    continue
                if b not in tr_c:
                    raise CheckFailure("(Phi^1)^-1 leaves the W-part", (u, ctx.describe(key2)))
                if tr_c[b]:
                    total = total + tr_c[b] * coeff
            tr_t[b2] = total
        for key in keys:
            acc: Dict[int, Cyclo] = {}
            for b2, p in phi_cache[key].items():
                t = tr_t.get(b2)
                if t is None:
                    raise CheckFailure("Phi leaves the W-part", (u, ctx.describe(key)))
                if not t:
                    continue
                for deg, c in p.items():
                    acc[deg] = acc.get(deg, 0) + t * c
            val = Laurent({d: _norm(c) for d, c in acc.items() if c})
            if val:
                table.entries[(u, key)] = val
    return table


def schur_elements(table: LiftedTraceTable) -> Dict[int, Laurent]:
    """f_u^v from sum_{w in W, lam} tr(TT_w 1_lam) tr(1_lam TT_w^-1) = f_u dim E_u."""
    ctx = table.ctx
    dual = ctx.gram_permutation(ext=False)
    out = {}
    for tag in table.modules.tags:
        s = _pair_sum(table, tag.index, tag.index, dual.items())
        out[tag.index] = _div(s, tag.dim)
    return out


def _div(p: Laurent, d: int) -> Laurent:
    return Laurent({k: _norm(c * Fraction(1, d)) for k, c in p.items()})


def _pair_sum(table: LiftedTraceTable, u: int, u2: int, pairs, conj: bool = False) -> Laurent:
    acc: Dict[int, Cyclo] = {}
    for k1, k2 in pairs:
        a = table.entries.get((u, k1))
        if a is None:
            continue
        b = table.entries.get((u2, k2))
        if b is None:
            continue
        if conj:
            b = b.sp_conj()
        for d, c in (a * b).items():
            acc[d] = acc.get(d, 0) + c
    return Laurent({d: _norm(c) for d, c in acc.items() if c})


# --------------------------------------------------------------------------
# orthogonality and the v = 1 identities


@dataclass
class ReplReport:
    """Outcome of :func:`orthogonality_checks`; ``checks`` maps names to pass/fail."""

    config: str
    n_modules: int
    n_fixed: int
    conductor: int
    checks: Dict[str, bool] = field(default_factory=dict)
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"config": self.config, "modules": self.n_modules, "fixed": self.n_fixed,
                "conductor": self.conductor, "checks": dict(sorted(self.checks.items())),
                "failures": self.failures[:50], "ok": self.ok}


def _single(ctx: HeckeCtx, terms: Terms) -> Optional[Key]:
    """The key of a product that is a single basis element with coefficient 1."""
    if not terms:
        return None
    (key, c), = terms.items()
    if c != 1:
        raise CheckFailure("expected a bare basis element", ctx.describe(key))
    return key


def _prod_one(ctx: HeckeCtx, k1: Key, k2: Key) -> Optional[Key]:
    """Product of two basis elements at v = 1, where H^D is a groupoid algebra."""
    (e1, l1), (e2, l2) = k1, k2
    if ctx.L.act_table[e2][l2] != l1:
        return None
    return ctx.G.ext_mul(e1, e2), l2


def semisimple_at(ctx: HeckeCtx, kappa: Scalar = 1) -> bool:
    """Whether sum_{w in W} kappa^(2 l(w)) is nonzero."""
    total = Cyclo.rational(0)
    k = kappa if isinstance(kappa, Cyclo) else Cyclo.rational(kappa)
    for w in range(ctx.G.size):
        total = total + k ** (2 * ctx.G.length(w))
    return bool(total)


def orthogonality_checks(ctx: HeckeCtx, mods: SimpleModules, table: LiftedTraceTable,
                         f: Optional[Dict[int, Laurent]] = None, trace_form_limit: int = 24,
                         seed: int = 0) -> ReplReport:
    """Trace identities for the lifted modules, over U[v, v^-1] and at v = 1."""
    G = ctx.G
    if f is None:
        f = schur_elements(table)
    tags = mods.tags
    rep = ReplReport(repr(ctx), len(tags), len(mods.fixed), mods.conductor)

    def record(name: str, ok: bool, detail: str = "") -> None:
        rep.checks[name] = rep.checks.get(name, True) and ok
        if not ok and detail:
            rep.failures.append(f"{name}: {detail}")

    w_keys = ctx.basis_keys(ext=False)
    dual = ctx.gram_permutation(ext=False)

    # semisimplicity gate: Gram matrix of the trace form at v = 1
    from sympy import QQ
    from sympy.polys.matrices import DomainMatrix

    pos = {k: i for i, k in enumerate(w_keys)}
    rows = [[QQ(0)] * len(w_keys) for _ in w_keys]
    for k1 in w_keys:
        for k2 in w_keys:
            p = _prod_one(ctx, k1, k2)
            if p is not None and p[0] == 0:
                rows[pos[k1]][pos[k2]] = QQ(1)
    gram = DomainMatrix(rows, (len(w_keys), len(w_keys)), QQ)
    record("semisimple_gate", semisimple_at(ctx, 1) and gram.rank() == len(w_keys))
    record("gram_dual_basis", all(_prod_one(ctx, k, dual[k]) is not None
                                  and _prod_one(ctx, k, dual[k])[0] == 0 for k in w_keys))

    # specialization v -> 1 against the direct character
    for tag in tags:
        for key in mods.keys_for(tag.index):
            lifted = table.trace(tag.index, key).at_one()
            if lifted != mods.direct_trace(tag.index, key):
                record("specialization", False, f"{tag.label(ctx)} at {ctx.describe(key)}")
    record("specialization", True)

    # idempotent traces
    for tag in tags:
        for lam in range(ctx.L.size):
            want = tag.dim // len(tag.orbit) if lam in tag.orbit else 0
            if table.trace(tag.index, (0, lam)) != want:
                record("idempotent_traces", False, f"{tag.label(ctx)} at 1_{lam}")
    record("idempotent_traces", True)

    # (b) at generic v and at v = 1 with direct characters
    for u in range(len(tags)):
        for u2 in range(len(tags)):
            s = _pair_sum(table, u, u2, dual.items())
            want = f[u] * tags[u].dim if u == u2 else Laurent()
            if s != want:
                record("schur_orthogonality", False, f"({u}, {u2})")
            direct = sum((mods.direct_trace(u, k) * mods.direct_trace(u2, k2) for k, k2 in dual.items()),
                         Cyclo.rational(0))
            want1 = f[u].at_one() * tags[u].dim if u == u2 else 0
            if direct != want1:
                record("schur_orthogonality_v1", False, f"({u}, {u2})")
    record("schur_orthogonality", True)
    record("schur_orthogonality_v1", True)
    for tag in tags:
        if not f[tag.index].at_one():
            record("schur_nonzero_at_1", False, tag.label(ctx))
    record("schur_nonzero_at_1", True)

    # the trace form as a combination of characters, at v = 1
    for key in w_keys:
        total = sum((mods.direct_trace(t.index, key) / f[t.index].at_one() for t in tags), Cyclo.rational(0))
        if total != (1 if key[0] == 0 else 0):
            record("trace_form_expansion", False, ctx.describe(key))
    record("trace_form_expansion", True)

    # the flat/spade relation on every key in the domain
    for tag in tags:
        for key in mods.keys_for(tag.index):
            e, lam = key
            other = (G.ext_inv(e), ctx.L.act_table[e][lam])
            if table.trace(tag.index, other) != table.trace(tag.index, key).sp_conj():
                record("flat_spade", False, f"{tag.label(ctx)} at {ctx.describe(key)}")
    record("flat_spade", True)

    # twisted orthogonality for a-fixed modules
    fixed = mods.fixed
    uD = G.ext(1, 0)
    uD_all = {(uD, m): Laurent.const(1) for m in range(ctx.L.size)}
    uDinv_all = {(G.ext_inv(uD), m): Laurent.const(1) for m in range(ctx.L.size)}
    twisted_pairs = []
    spade_keys = []
    for (w, lam), k2 in dual.items():
        left = _single(ctx, ctx.mul_terms({(w, lam): Laurent.const(1)}, uD_all))
        right = _single(ctx, ctx.mul_terms(uDinv_all, {k2: Laurent.const(1)}))
        twisted_pairs.append((left, right))
        key = _single(ctx, ctx.mul_terms({(w, ctx.L.act_table[uD][lam]): Laurent.const(1)}, uD_all))
        spade_keys.append(key)
    for u in fixed:
        for u2 in fixed:
            s = _pair_sum(table, u, u2, twisted_pairs)
            want = f[u] * tags[u].dim if u == u2 else Laurent()
            if s != want:
                record("twisted_orthogonality", False, f"({u}, {u2})")
            s = _pair_sum(table, u, u2, [(k, k) for k in spade_keys], conj=True)
            if s != want:
                record("spade_orthogonality", False, f"({u}, {u2})")
            direct = Cyclo.rational(0)
            for k in spade_keys:
                direct = direct + mods.direct_trace(u, k) * mods.direct_trace(u2, k).sp_conj()
            if direct != (f[u].at_one() * tags[u].dim if u == u2 else 0):
                record("spade_orthogonality_v1", False, f"({u}, {u2})")
            direct = Cyclo.rational(0)
            for k, k2 in twisted_pairs:
                direct = direct + mods.direct_trace(u, k) * mods.direct_trace(u2, k2)
            if direct != (f[u].at_one() * tags[u].dim if u == u2 else 0):
                record("dual_basis_twisted_v1", False, f"({u}, {u2})")
    for name in ("twisted_orthogonality", "spade_orthogonality", "spade_orthogonality_v1", "dual_basis_twisted_v1"):
        record(name, True)

    # trace of c1 -> c a(c1) c' on H_n^1 against the a-fixed characters
    pairs = [(k1, k2) for k1 in w_keys for k2 in w_keys]
    if len(w_keys) > trace_form_limit:
        pairs = random.Random(seed).sample(pairs, min(len(pairs), trace_form_limit ** 2))
    twist = {k: next(iter(ctx.ad_d(ctx.basis(*k)).terms)) for k in w_keys}
    for c, c2 in pairs:
        lhs = 0
        for b in w_keys:
            p = _prod_one(ctx, c, twist[b])
            p = _prod_one(ctx, p, c2) if p is not None else None
            if p == b:
                lhs += 1
        left = _single(ctx, ctx.mul_terms({c: Laurent.const(1)}, uD_all))
        right = _single(ctx, ctx.mul_terms(uDinv_all, {c2: Laurent.const(1)}))
        rhs = Cyclo.rational(0)
        for u in fixed:
            rhs = rhs + mods.direct_trace(u, left) * mods.direct_trace(u, right)
        if rhs != lhs:
            record("twisted_trace_factorization", False, f"c={ctx.describe(c)}, c'={ctx.describe(c2)}")
    record("twisted_trace_factorization", True)
    return rep


# --------------------------------------------------------------------------
# quasi-rationality


def quasi_rational_check(table: LiftedTraceTable, u: int,
                         eta: Optional[Union[Dict[Key, Cyclo], Callable[[Key], Cyclo]]] = None) -> dict:
    """Test tr(TT_w 1_lam, E_u) in eta Z at v = 1; if so, assert it lifts into eta A.

    >>> from heckelab.hecke import HeckeCtx
    >>> ctx = HeckeCtx.build("A1", 2)
    >>> mods = simple_modules_v1(ctx)
    >>> quasi_rational_check(lift_traces(ctx, mods), 0)["conclusion"]
    True
    """
    ctx, mods = table.ctx, table.modules
    if not mods.tags[u].fixed:
        raise ValueError("quasi-rationality is stated for a-fixed modules")
    keys = mods.keys_for(u)
    if eta is None:
        eta_of = {k: Cyclo.rational(1) for k in keys}
    elif callable(eta):
        eta_of = {k: eta(k) for k in keys}
    else:
        eta_of = {k: eta.get(k, Cyclo.rational(1)) for k in keys}
    report = {"u": u, "eta_constant_on_classes": True, "hypothesis": True, "conclusion": None, "witness": None}
    if len({c for c in eta_of.values()}) > 1:
        from .convtrace import asim_equiv

        J = tuple(range(ctx.G.nsimple))
        for k1 in keys:
            for k2 in keys:
                if ctx.G.ext_parts(k1[0])[0] != ctx.G.ext_parts(k2[0])[0]:
                    continue
                if eta_of[k1] != eta_of[k2] and asim_equiv(ctx, J, k1, k2):
                    report["eta_constant_on_classes"] = False
                    report["witness"] = [ctx.describe(k1), ctx.describe(k2)]
                    return report
    for k in keys:
        if not (mods.direct_trace(u, k) / eta_of[k]).is_integer():
            report["hypothesis"] = False
            report["witness"] = ctx.describe(k)
            return report
    ok = True
    for k in keys:
        for _d, c in table.trace(u, k).items():
            if not (c / eta_of[k] if isinstance(c, Cyclo) else Cyclo.rational(c) / eta_of[k]).is_integer():
                ok = False
                report["witness"] = ctx.describe(k)
    report["conclusion"] = ok
    return report


# --------------------------------------------------------------------------
# CSV export


def write_schur_csv(path, mods: SimpleModules, f: Dict[int, Laurent]) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["u", "label", "dim", "fixed", "bar", "schur_element", "at_v_1"])
        for tag in mods.tags:
            wr.writerow([tag.index, tag.label(mods.ctx), tag.dim, int(tag.fixed), tag.bar,
                         str(f[tag.index]), str(f[tag.index].at_one())])


def write_trace_csv(path, table: LiftedTraceTable) -> None:
    ctx = table.ctx
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["u", "basis", "trace"])
        for (u, key), p in sorted(table.entries.items(), key=lambda kv: (kv[0][0], ctx.sort_key(kv[0][1]))):
            wr.writerow([u, ctx.describe(key), str(p)])
