"""The algebra H_n^D: standard basis, products, involutions and trace form.

Elements are sparse maps ``(e, lam) -> Laurent`` standing for
``sum c * TT_e 1_lam`` where ``e`` indexes ``uD^a w`` and ``TT`` is the
v-balanced normalization (``T_w = v^l(w) TT_w``).

>>> ctx = HeckeCtx.build("A1", 2)
>>> s = ctx.G.simple[0]
>>> lam0 = ctx.L.index[(0,)]
>>> print(ctx.basis(s) * ctx.basis(s, lam0))
1*v^0 TT[] 1_(0) + (1*v^1 - 1*v^-1) TT[s0] 1_(0)
>>> (ctx.basis(s) * ctx.T_inv(0)) == ctx.unit()
True
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Tuple

from .charlat import CharLattice, CharModN
from .scalars import Laurent
from .weyl import ExtWeylElt, WeylGroup, build_aut, build_root_datum

__all__ = ["HeckeCtx", "HeckeElt", "V", "V_MINUS_VINV", "soundness_checks", "gram_check"]

Key = Tuple[int, int]
Terms = Dict[Key, Laurent]

V = Laurent.v()
V_MINUS_VINV = Laurent({1: 1, -1: -1})
ONE = Laurent.const(1)


def _add_into(out: Terms, key: Key, c: Laurent) -> None:
    prev = out.get(key)
    if prev is None:
        if c:
            out[key] = c
    else:
        s = prev + c
        if s:
            out[key] = s
        else:
            del out[key]


class HeckeCtx:
    """Ambient data for H_n^D: datum, n, automorphism and product caches."""

    def __init__(self, G: WeylGroup, n: int):
        self.G = G
        self.n = n
        self.L = CharLattice(G, n)
        self.datum = G.datum
        self.aut = G.aut
        self.k = G.k
        self.simple_in_W = self.L.simple_in_W
        self._left_cache: Dict[Tuple[int, int, int], Dict[int, Laurent]] = {}
        self._bar_cache: Dict[Tuple[int, int], Dict[int, Laurent]] = {}

    @classmethod
    def build(cls, datum_spec, n: int, aut_spec=None) -> "HeckeCtx":
        datum = build_root_datum(datum_spec)
        aut = build_aut(datum, aut_spec)
        return cls(WeylGroup(datum, aut), n)

    def __repr__(self) -> str:
        return f"HeckeCtx({self.datum.label}, n={self.n}, aut={self.aut.name})"

    # ------------------------------------------------------------------
    # basis bookkeeping

    @property
    def dim(self) -> int:
        return self.G.ext_size * self.L.size

    @property
    def dim_w_part(self) -> int:
        return self.G.size * self.L.size

    def basis_keys(self, ext: bool = True) -> List[Key]:
        limit = self.G.ext_size if ext else self.G.size
        return [(e, lam) for e in range(limit) for lam in range(self.L.size)]

    def target(self, key: Key) -> int:
        """The character mu with TT_e 1_lam = 1_mu TT_e 1_lam."""
        return self.L.act_table[key[0]][key[1]]

    def elt(self, terms: Terms) -> "HeckeElt":
        return HeckeElt(self, terms)

    def zero(self) -> "HeckeElt":
        return HeckeElt(self, {})

    def unit(self) -> "HeckeElt":
        return HeckeElt(self, {(0, lam): ONE for lam in range(self.L.size)})

    def idem(self, lam: int) -> "HeckeElt":
        return HeckeElt(self, {(0, lam): ONE})

    def basis(self, e: int, lam: Optional[int] = None, coeff: Laurent = ONE) -> "HeckeElt":
        """TT_e 1_lam, or TT_e = sum over all lam when lam is None."""
        if lam is None:
            return HeckeElt(self, {(e, m): coeff for m in range(self.L.size)})
        return HeckeElt(self, {(e, lam): coeff})

    def T(self, w: int, lam: Optional[int] = None) -> "HeckeElt":
        """The non-balanced element T_w = v^l(w) TT_w (optionally times 1_lam)."""
        return self.basis(w, lam, Laurent.v(self.G.ext_length(w)))

    def T_inv(self, i: int) -> "HeckeElt":
        """TT_s^-1 = TT_s - (v - v^-1) sum_{lam: s in W_lam} 1_lam for the simple s_i."""
        s = self.G.simple[i]
        terms: Terms = {(s, lam): ONE for lam in range(self.L.size)}
        for lam in range(self.L.size):
            if self.simple_in_W[lam][i]:
                terms[(0, lam)] = -V_MINUS_VINV
        return HeckeElt(self, terms)

    def uD(self, power: int = 1) -> "HeckeElt":
        return self.basis(self.G.ext(power, 0))

    # ------------------------------------------------------------------
    # products

    def _left_simple(self, i: int, w: int, lam: int) -> Dict[int, Laurent]:
        """TT_{s_i} * TT_w 1_lam as a map w' -> coeff (character stays lam)."""
        G = self.G
        sw = G.left_simple[w][i]
        if G.lengths[sw] > G.lengths[w]:
            return {sw: ONE}
        mu = self.L.act_table[sw][lam]
        if self.simple_in_W[mu][i]:
            return {sw: ONE, w: V_MINUS_VINV}
        return {sw: ONE}

    def weyl_product(self, x: int, y: int, lam: int) -> Dict[int, Laurent]:
        """TT_x * TT_y 1_lam for x, y in W; memoized."""
        key = (x, y, lam)
        hit = self._left_cache.get(key)
        if hit is not None:
            return hit
        G = self.G
        if x == 0:
            res = {y: ONE}
        else:
            # x = s_i * x' with i the first letter of the ShortLex word
            i = G.words[x][0]
            rest = G.left_simple[x][i]
            inner = self.weyl_product(rest, y, lam)
            out: Dict[int, Laurent] = {}
            for w, c in inner.items():
                for w2, c2 in self._left_simple(i, w, lam).items():
                    val = c if c2 is ONE else c * c2
                    prev = out.get(w2)
                    if prev is None:
                        out[w2] = val
                    else:
                        s = prev + val
                        if s:
                            out[w2] = s
                        else:
                            del out[w2]
            res = out
        self._left_cache[key] = res
        return res

    def mul_terms(self, a: Terms, b: Terms) -> Terms:
        G, act = self.G, self.L.act_table
        size = G.size
        by_char: Dict[int, List[Tuple[int, Laurent]]] = {}
        for (e1, l1), c1 in a.items():
            by_char.setdefault(l1, []).append((e1, c1))
        out: Terms = {}
        for (e2, l2), c2 in b.items():
            mu = act[e2][l2]
            left = by_char.get(mu)
            if not left:
                continue
            a2, w2 = divmod(e2, size)
            for e1, c1 in left:
                a1, w1 = divmod(e1, size)
                x = G.eps_powers[(-a2) % G.k][w1]
                base = ((a1 + a2) % G.k) * size
                c12 = c1 * c2
                for w, c in self.weyl_product(x, w2, l2).items():
                    _add_into(out, (base + w, l2), c12 if c is ONE else c12 * c)
        return out

    def multiply(self, a: "HeckeElt", b: "HeckeElt") -> "HeckeElt":
        if a.ctx is not self or b.ctx is not self:
            raise ValueError("elements belong to different contexts")
        return HeckeElt(self, self.mul_terms(a.terms, b.terms))

    # ------------------------------------------------------------------
    # involutions

    def _bar_weyl(self, w: int, lam: int) -> Dict[int, Laurent]:
        """bar(TT_w 1_lam) as a map w' -> coeff, via products of TT_s^-1."""
        key = (w, lam)
        hit = self._bar_cache.get(key)
        if hit is not None:
            return hit
        G = self.G
        if w == 0:
            res = {0: ONE}
        else:
            i = G.words[w][0]
            inner = self._bar_weyl(G.left_simple[w][i], lam)
            out: Dict[int, Laurent] = {}
            for y, c in inner.items():
                for y2, c2 in self._left_simple(i, y, lam).items():
                    val = c * c2
                    s = out.get(y2, 0) + val
                    if s:
                        out[y2] = s
                    else:
                        out.pop(y2, None)
                if self.simple_in_W[self.L.act_table[y][lam]][i]:
                    s = out.get(y, 0) - c * V_MINUS_VINV
                    if s:
                        out[y] = s
                    else:
                        out.pop(y, None)
            res = out
        self._bar_cache[key] = res
        return res

    def bar_basis(self, key: Key) -> Terms:
        e, lam = key
        a, w = divmod(e, self.G.size)
        base = a * self.G.size
        return {(base + y, lam): c for y, c in self._bar_weyl(w, lam).items()}

    def bar_terms(self, t: Terms) -> Terms:
        out: Terms = {}
        for key, c in t.items():
            cb = c.bar()
            for k2, c2 in self.bar_basis(key).items():
                _add_into(out, k2, cb * c2)
        return out

    def bar(self, h: "HeckeElt") -> "HeckeElt":
        return HeckeElt(self, self.bar_terms(h.terms))

    def flat(self, h: "HeckeElt") -> "HeckeElt":
        """Antiautomorphism TT_e 1_lam -> TT_{e^-1} 1_{e lam}."""
        G, act = self.G, self.L.act_table
        return HeckeElt(self, {(G.ext_inv(e), act[e][lam]): c for (e, lam), c in h.terms.items()})

    def ad_d(self, h: "HeckeElt", power: int = 1) -> "HeckeElt":
        """Conjugation by TT_uD: TT_{(a,w)} 1_lam -> TT_{(a, eps(w))} 1_{uD lam}."""
        G, act = self.G, self.L.act_table
        u = G.ext(power, 0)
        out = {}
        for (e, lam), c in h.terms.items():
            a, w = divmod(e, G.size)
            out[(G.ext(a, G.eps(w, power)), act[u][lam])] = c
        return HeckeElt(self, out)

    def omega_invol(self, h: "HeckeElt") -> "HeckeElt":
        """TT_e 1_lam -> 1_{-lam} TT_{e^-1} = TT_{e^-1} 1_{-(e lam)}."""
        G, act, neg = self.G, self.L.act_table, self.L.neg
        return HeckeElt(self, {(G.ext_inv(e), neg[act[e][lam]]): c for (e, lam), c in h.terms.items()})

    # ------------------------------------------------------------------
    # forms

    def tau_form(self, h: "HeckeElt") -> Laurent:
        total = Laurent()
        for (e, lam), c in h.terms.items():
            if e == 0:
                total = total + c
        return total

    def bilinear(self, a: "HeckeElt", b: "HeckeElt") -> Laurent:
        return self.tau_form(self.multiply(a, b))

    def gram_permutation(self, ext: bool = True) -> Dict[Key, Key]:
        """The predicted partner of each basis element: (e, lam) -> (e^-1, e lam)."""
        G, act = self.G, self.L.act_table
        return {(e, lam): (G.ext_inv(e), act[e][lam]) for (e, lam) in self.basis_keys(ext)}

    # ------------------------------------------------------------------
    # conversions

    def key_to_public(self, key: Key) -> Tuple[ExtWeylElt, CharModN]:
        return self.G.ext_elt(key[0]), self.L.char(key[1])

    def key_from_public(self, e: ExtWeylElt, lam: CharModN) -> Key:
        return self.G.ext_index_of(e), self.L.index_of(lam)

    def sort_key(self, key: Key) -> Tuple[int, int, int]:
        a, w = divmod(key[0], self.G.size)
        return a, w, key[1]

    def describe(self, key: Key) -> str:
        a, w = divmod(key[0], self.G.size)
        word = "".join(f"s{i}" for i in self.G.words[w])
        prefix = f"uD^{a}" if a else ""
        lam = ",".join(str(x) for x in self.L.chars[key[1]])
        return f"TT[{prefix}{word}] 1_({lam})"


class HeckeElt:
    """An element of H_n^D attached to a context."""

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: HeckeCtx, terms: Optional[Terms] = None):
        self.ctx = ctx
        self.terms: Terms = {k: c for k, c in (terms or {}).items() if c}

    def __add__(self, other: "HeckeElt") -> "HeckeElt":
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add_into(out, k, c)
        return HeckeElt(self.ctx, out)

    def __neg__(self) -> "HeckeElt":
        return HeckeElt(self.ctx, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "HeckeElt") -> "HeckeElt":
        return self + (-other)

    def __mul__(self, other) -> "HeckeElt":
        if isinstance(other, HeckeElt):
            return self.ctx.multiply(self, other)
        c = Laurent.coerce(other)
        return HeckeElt(self.ctx, {k: x * c for k, x in self.terms.items()})

    def __rmul__(self, other) -> "HeckeElt":
        c = Laurent.coerce(other)
        return HeckeElt(self.ctx, {k: c * x for k, x in self.terms.items()})

    def __eq__(self, other) -> bool:
        if isinstance(other, HeckeElt):
            return self.ctx is other.ctx and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coeff(self, key: Key) -> Laurent:
        return self.terms.get(key, Laurent())

    def bar(self) -> "HeckeElt":
        return self.ctx.bar(self)

    def sorted_terms(self) -> List[Tuple[Key, Laurent]]:
        return sorted(self.terms.items(), key=lambda kv: self.ctx.sort_key(kv[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.sorted_terms():
            cs = str(c)
            if len(c._c) > 1:
                cs = f"({cs})"
            parts.append(f"{cs} {self.ctx.describe(key)}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"HeckeElt({self})"

    def to_json(self) -> List[dict]:
        G, L = self.ctx.G, self.ctx.L
        out = []
        for (e, lam), c in self.sorted_terms():
            a, w = divmod(e, G.size)
            out.append({"aut_power": a, "word": list(G.words[w]), "lambda": list(L.chars[lam]),
                        "coeff": c.to_json()})
        return out

    @classmethod
    def from_json(cls, ctx: HeckeCtx, data: List[dict]) -> "HeckeElt":
        terms: Terms = {}
        for item in data:
            w = ctx.G.from_word(item["word"])
            key = (ctx.G.ext(item["aut_power"], w), ctx.L.index_of(tuple(item["lambda"])))
            _add_into(terms, key, Laurent.from_json(item["coeff"]))
        return cls(ctx, terms)


def soundness_checks(ctx: HeckeCtx, samples: Optional[int] = 500, seed: int = 0) -> Dict[str, object]:
    """Associativity on basis triples, bar^2 = id and TT_s TT_s^-1 = 1.

    Triples are exhaustive when ``samples`` is None or at least the number
    of triples, otherwise a seeded random sample of that size.

    >>> soundness_checks(HeckeCtx.build("A1", 2), samples=None)["ok"]
    True
    """
    keys = ctx.basis_keys()
    nk = len(keys)
    total = nk ** 3
    if samples is None or samples >= total:
        triples = ((a, b, c) for a in keys for b in keys for c in keys)
        count = total
    else:
        rng = random.Random(seed)
        triples = [(rng.choice(keys), rng.choice(keys), rng.choice(keys)) for _ in range(samples)]
        count = samples
    failures: List[str] = []
    assoc = True
    for a, b, c in triples:
        ta, tb, tc = {a: ONE}, {b: ONE}, {c: ONE}
        left = ctx.mul_terms(ctx.mul_terms(ta, tb), tc)
        right = ctx.mul_terms(ta, ctx.mul_terms(tb, tc))
        if left != right:
            assoc = False
            failures.append(f"associativity: {ctx.describe(a)}, {ctx.describe(b)}, {ctx.describe(c)}")
    bar2 = True
    for k in keys:
        if ctx.bar_terms(ctx.bar_terms({k: ONE})) != {k: ONE}:
            bar2 = False
            failures.append(f"bar^2: {ctx.describe(k)}")
    inverse = True
    for i in range(ctx.G.nsimple):
        s = ctx.basis(ctx.G.simple[i])
        if s * ctx.T_inv(i) != ctx.unit() or ctx.T_inv(i) * s != ctx.unit():
            inverse = False
            failures.append(f"inverse of simple generator {i}")
    ok = assoc and bar2 and inverse
    return {"associativity": assoc, "triples": count, "bar_squared": bar2,
            "simple_inverse": inverse, "failures": failures[:20], "ok": ok}


def gram_check(ctx: HeckeCtx, ext: bool = True) -> Dict[str, object]:
    """Compare tau(TT_b TT_b') over all pairs with the predicted permutation matrix."""
    keys = ctx.basis_keys(ext)
    partner = ctx.gram_permutation(ext)
    failures: List[str] = []
    for k1 in keys:
        for k2 in keys:
            val = ctx.tau_form(HeckeElt(ctx, ctx.mul_terms({k1: ONE}, {k2: ONE})))
            want = ONE if partner[k1] == k2 else Laurent()
            if val != want:
                failures.append(f"({ctx.describe(k1)}, {ctx.describe(k2)}) = {val}")
    return {"pairs": len(keys) ** 2, "failures": failures[:20], "ok": not failures}
