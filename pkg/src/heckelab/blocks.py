"""Per-character algebras H_lam, the block matrix algebra E and the map Psi.

``HLambdaAlg`` multiplies with its own normal form: every element of the
stabilizer of lam factors as (length-zero part) * (element of W_lam), and the
W_lam part is handled by Coxeter-Hecke rules for the simple reflections of
R_lam.  The embedding into 1_lam H 1_lam is then a genuine check, not a
definition.

>>> from heckelab.hecke import HeckeCtx
>>> ctx = HeckeCtx.build("A1", 2)
>>> alg = HLambdaAlg(ctx, ctx.L.index[(1,)])
>>> s = ctx.G.simple[0]
>>> alg.rank, alg.mul_basis(s, s) == {0: Laurent.const(1)}
(2, True)
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .canbase import CanBasis, CheckFailure, kl_solve
from .hecke import HeckeCtx, HeckeElt, Key, Terms, _add_into
from .scalars import Laurent

__all__ = [
    "HLambdaAlg",
    "h_lambda",
    "theta_lambda",
    "check_theta",
    "SsChoice",
    "choose_ss",
    "EAlg",
    "psi",
    "psi0",
    "check_psi",
]

ONE = Laurent.const(1)
V_MINUS_VINV = Laurent({1: 1, -1: -1})

LTerms = Dict[int, Laurent]


def _add(out: LTerms, key: int, c: Laurent) -> None:
    prev = out.get(key)
    s = c if prev is None else prev + c
    if s:
        out[key] = s
    else:
        out.pop(key, None)


class HLambdaAlg:
    """The algebra on symbols TT^lam_e, e in the stabilizer W^D_lam."""

    def __init__(self, ctx: HeckeCtx, lam: int):
        self.ctx = ctx
        self.lam = lam
        G, L = ctx.G, ctx.L
        self.system = L.lambda_system(lam)
        self.omega, stab = L.omega_group(lam)
        self.stab: List[int] = sorted(stab)
        self.sigmas: Tuple[int, ...] = tuple(sorted(self.system.I_lambda))
        self._factor = {e: L.factor(lam, e) for e in self.stab}
        self._length = {e: L.l_lambda(lam, e) for e in self.stab}
        self._cox: Dict[Tuple[int, int], LTerms] = {}
        self._prod: Dict[Tuple[int, int], LTerms] = {}
        self._bar: Dict[int, LTerms] = {}
        del G

    @property
    def rank(self) -> int:
        return len(self.stab)

    def length(self, e: int) -> int:
        return self._length[e]

    def factor(self, e: int) -> Tuple[int, int]:
        return self._factor[e]

    def unit(self) -> LTerms:
        return {0: ONE}

    # products ------------------------------------------------------------
    def _descent(self, y: int) -> int:
        mul = self.ctx.G.mul
        for s in self.sigmas:
            if self._length[mul[s][y]] < self._length[y]:
                return s
        raise CheckFailure("element of W_lambda without a left descent", y)

    def _sigma_times(self, s: int, z: int) -> LTerms:
        sz = self.ctx.G.mul[s][z]
        if self._length[sz] > self._length[z]:
            return {sz: ONE}
        return {sz: ONE, z: V_MINUS_VINV}

    def _coxeter(self, y: int, x: int) -> LTerms:
        """TT_y TT_x for y, x in W_lam, by peeling left descents off y."""
        key = (y, x)
        hit = self._cox.get(key)
        if hit is not None:
            return hit
        if y == 0:
            res = {x: ONE}
        else:
            s = self._descent(y)
            res = {}
            for z, c in self._coxeter(self.ctx.G.mul[s][y], x).items():
                for z2, c2 in self._sigma_times(s, z).items():
                    _add(res, z2, c * c2)
        self._cox[key] = res
        return res

    def mul_basis(self, e: int, f: int) -> LTerms:
        """TT_{om x} TT_{om' x'} = TT_{om om'} * (TT_{om'^-1 x om'} TT_{x'})."""
        key = (e, f)
        hit = self._prod.get(key)
        if hit is not None:
            return hit
        G = self.ctx.G
        om, x = self._factor[e]
        om2, x2 = self._factor[f]
        y = G.ext_mul(G.ext_mul(G.ext_inv(om2), x), om2)
        if y >= G.size:
            raise CheckFailure("length-zero part does not normalize W_lambda", (om2, x))
        om12 = G.ext_mul(om, om2)
        res = {G.ext_mul(om12, z): c for z, c in self._coxeter(y, x2).items()}
        self._prod[key] = res
        return res

    def mul(self, a: LTerms, b: LTerms) -> LTerms:
        out: LTerms = {}
        for e, c1 in a.items():
            for f, c2 in b.items():
                c12 = c1 * c2
                for g, c in self.mul_basis(e, f).items():
                    _add(out, g, c12 * c)
        return out

    # involution and canonical basis -------------------------------------
    def bar_basis(self, e: int) -> LTerms:
        hit = self._bar.get(e)
        if hit is not None:
            return hit
        om, x = self._factor[e]
        if x == 0:
            res = {om: ONE}
        else:
            s = self._descent(x)
            rest = self.ctx.G.mul[s][x]
            bar_s = {s: ONE, 0: -V_MINUS_VINV}
            res = self.mul({om: ONE}, self.mul(bar_s, self.bar_basis(rest)))
        self._bar[e] = res
        return res

    def bar(self, a: LTerms) -> LTerms:
        out: LTerms = {}
        for e, c in a.items():
            cb = c.bar()
            for f, c2 in self.bar_basis(e).items():
                _add(out, f, cb * c2)
        return out

    def canonical_basis(self) -> Dict[int, LTerms]:
        """c^lam_e, unitriangular with respect to l_lam."""
        return kl_solve(self.stab, self.length, self.bar_basis)

    def check_relations(self) -> List[str]:
        """Assert the defining relations directly and associativity exhaustively."""
        G = self.ctx.G
        bad: List[str] = []
        for s in self.sigmas:
            if self.mul_basis(s, s) != {0: ONE, s: V_MINUS_VINV}:
                bad.append(f"quadratic relation fails for {s}")
        for o in self.omega:
            for o2 in self.omega:
                if self.mul_basis(o, o2) != {G.ext_mul(o, o2): ONE}:
                    bad.append(f"length-zero elements do not multiply as a group at {o},{o2}")
            for s in self.sigmas:
                conj = G.ext_mul(G.ext_mul(o, s), G.ext_inv(o))
                lhs = self.mul(self.mul({o: ONE}, {s: ONE}), {G.ext_inv(o): ONE})
                if lhs != {conj: ONE}:
                    bad.append(f"conjugation relation fails at {o},{s}")
        for e in self.stab:
            for f in self.stab:
                ef = G.ext_mul(e, f)
                if self._length[ef] == self._length[e] + self._length[f]:
                    if self.mul_basis(e, f) != {ef: ONE}:
                        bad.append(f"length-additive product fails at {e},{f}")
                for g in self.stab:
                    if self.mul(self.mul_basis(e, f), {g: ONE}) != self.mul({e: ONE}, self.mul_basis(f, g)):
                        bad.append(f"associativity fails at {e},{f},{g}")
        for e in self.stab:
            if self.bar(self.bar_basis(e)) != {e: ONE}:
                bad.append(f"bar is not an involution at {e}")
        return bad


def h_lambda(ctx: HeckeCtx, lam: int) -> HLambdaAlg:
    return HLambdaAlg(ctx, lam)


def theta_lambda(alg: HLambdaAlg, a: LTerms) -> HeckeElt:
    """TT^lam_e -> TT_e 1_lam."""
    return alg.ctx.elt({(e, alg.lam): c for e, c in a.items()})


def check_theta(alg: HLambdaAlg, cb: Optional[CanBasis] = None) -> List[str]:
    """theta_lam is multiplicative on all basis pairs and carries c^lam to c_{w,lam}."""
    ctx, lam = alg.ctx, alg.lam
    bad = alg.check_relations()
    if theta_lambda(alg, alg.unit()) != ctx.idem(lam):
        bad.append("theta does not send the unit to 1_lam")
    for e in alg.stab:
        for f in alg.stab:
            lhs = theta_lambda(alg, alg.mul_basis(e, f))
            rhs = ctx.basis(e, lam) * ctx.basis(f, lam)
            if lhs != rhs:
                bad.append(f"theta not multiplicative at {ctx.describe((e, lam))} * {ctx.describe((f, lam))}")
        if theta_lambda(alg, alg.bar_basis(e)) != ctx.bar(ctx.basis(e, lam)):
            bad.append(f"theta does not commute with bar at {ctx.describe((e, lam))}")
    # every basis element of 1_lam H 1_lam is hit exactly once
    block = sorted(e for e in range(ctx.G.ext_size) if ctx.L.act_table[e][lam] == lam)
    if block != alg.stab:
        bad.append("theta is not onto 1_lam H 1_lam")
    cbl = alg.canonical_basis()
    for e, c in cbl.items():
        if alg.bar(c) != c:
            bad.append(f"c^lam_{e} is not bar-invariant")
        if cb is not None and theta_lambda(alg, c).terms != cb.elements[(e, lam)]:
            bad.append(f"theta(c^lam) differs from c_(w,lam) at {ctx.describe((e, lam))}")
    G = ctx.G
    for om in alg.omega:
        for x in alg.stab:
            if alg.factor(x)[0] != 0:
                continue
            lhs = cbl[G.ext_mul(om, x)]
            if lhs != alg.mul({om: ONE}, cbl[x]):
                bad.append(f"c^lam_(om x) != TT_om c^lam_x at {om},{x}")
    return bad


# --------------------------------------------------------------------------
# paths to orbit representatives


@dataclass
class SsChoice:
    """For each character lam: a generator path to its orbit representative.

    ``seq[lam]`` lists ext indices (s_1, ..., s_r) with
    rep[lam] = s_1 ... s_r lam; ``tau[lam]`` is TT_{s_1}...TT_{s_r} 1_lam and
    ``tau_prime[lam]`` is 1_lam TT_{s_r^-1}...TT_{s_1^-1}.
    """

    ctx: HeckeCtx
    generators: List[int]
    rep: Dict[int, int]
    seq: Dict[int, Tuple[int, ...]]
    bracket: Dict[int, int]
    tau: Dict[int, Terms] = field(repr=False)
    tau_prime: Dict[int, Terms] = field(repr=False)

    def labels(self, lam: int) -> List[str]:
        G = self.ctx.G
        out = []
        for g in self.seq[lam]:
            a, w = G.ext_parts(g)
            out.append(f"uD^{a}" if a else f"s{G.words[w][0]}")
        return out


def _generators(ctx: HeckeCtx) -> List[int]:
    G = ctx.G
    return [G.simple[i] for i in range(G.nsimple)] + [G.ext(p, 0) for p in range(1, G.k)]


def _product_of(ctx: HeckeCtx, factors: List[int]) -> Terms:
    out = ctx.unit().terms
    for g in factors:
        out = ctx.mul_terms(out, ctx.basis(g).terms)
    return out


def choose_ss(ctx: HeckeCtx) -> SsChoice:
    """Shortest generator paths (BFS, fixed generator order) to lex-least representatives.

    >>> from heckelab.hecke import HeckeCtx
    >>> ctx = HeckeCtx.build("A2", 2)
    >>> ss = choose_ss(ctx)
    >>> lam = ctx.L.index[(1, 0)]
    >>> ctx.L.chars[ss.rep[lam]], ss.labels(lam)
    ((0, 1), ['s1', 's0'])
    """
    G, L = ctx.G, ctx.L
    gens = _generators(ctx)
    rep = {lam: L.orbit_rep(lam) for lam in range(L.size)}
    seq: Dict[int, Tuple[int, ...]] = {}
    for lam in range(L.size):
        target = rep[lam]
        parent: Dict[int, Tuple[int, int]] = {lam: (-1, -1)}
        queue = deque([lam])
        while target not in parent:
            mu = queue.popleft()
            for g in gens:
                nu = L.act_table[g][mu]
                if nu not in parent:
                    parent[nu] = (mu, g)
                    queue.append(nu)
        applied = []
        mu = target
        while mu != lam:
            mu, g = parent[mu]
            applied.append(g)
        # applied lists the generators from the last one used to the first
        seq[lam] = tuple(applied)
    bracket = {}
    tau: Dict[int, Terms] = {}
    tau_prime: Dict[int, Terms] = {}
    for lam, s in seq.items():
        b = 0
        for g in s:
            b = G.ext_mul(b, g)
        bracket[lam] = b
        tau[lam] = ctx.mul_terms(_product_of(ctx, list(s)), {(0, lam): ONE})
        inv = [G.ext_inv(g) for g in reversed(s)]
        tau_prime[lam] = ctx.mul_terms({(0, lam): ONE}, _product_of(ctx, inv))
    ss = SsChoice(ctx, gens, rep, seq, bracket, tau, tau_prime)
    bad = check_ss(ss)
    if bad:
        raise CheckFailure(bad[0], bad)
    return ss


def check_ss(ss: SsChoice) -> List[str]:
    """Paths valid, tau and tau' mutually inverse on the corners, and bar-invariant."""
    ctx = ss.ctx
    G, L = ctx.G, ctx.L
    bad = []
    for lam, s in ss.seq.items():
        mu = lam
        seen = [mu]
        for g in reversed(s):
            mu = L.act_table[g][mu]
            seen.append(mu)
        if mu != ss.rep[lam] or len(set(seen)) != len(seen):
            bad.append(f"bad path for {L.chars[lam]}")
        if L.act_table[ss.bracket[lam]][lam] != ss.rep[lam]:
            bad.append(f"[ss] does not move {L.chars[lam]} to its representative")
        full_tau = _product_of(ctx, list(s))
        full_tau_prime = _product_of(ctx, [G.ext_inv(g) for g in reversed(s)])
        lam0 = ss.rep[lam]
        left = ctx.mul_terms({(0, lam0): ONE}, ctx.mul_terms(full_tau, full_tau_prime))
        if left != {(0, lam0): ONE}:
            bad.append(f"1_lam0 tau tau' != 1_lam0 at {L.chars[lam]}")
        right = ctx.mul_terms({(0, lam): ONE}, ctx.mul_terms(full_tau_prime, full_tau))
        if right != {(0, lam): ONE}:
            bad.append(f"1_lam tau' tau != 1_lam at {L.chars[lam]}")
        if ctx.bar_terms(ss.tau[lam]) != ss.tau[lam]:
            bad.append(f"tau 1_lam not bar-invariant at {L.chars[lam]}")
        if ctx.bar_terms(ss.tau_prime[lam]) != ss.tau_prime[lam]:
            bad.append(f"1_lam tau' not bar-invariant at {L.chars[lam]}")
    return bad


# --------------------------------------------------------------------------
# the matrix algebra E

EKey = Tuple[int, int, int]  # (lam1, lam2, w) with w lam1^0 = lam1^0 = lam2^0
EElt = Dict[Tuple[int, int], Terms]


class EAlg:
    """Matrices indexed by pairs in one orbit, entries in 1_{lam1^0} H 1_{lam2^0}."""

    def __init__(self, ctx: HeckeCtx, ss: SsChoice):
        self.ctx = ctx
        self.ss = ss
        L = ctx.L
        self.orbits = L.orbits()
        self.orbit_of = {lam: i for i, orb in enumerate(self.orbits) for lam in orb}
        keys: List[EKey] = []
        for orb in self.orbits:
            lam0 = ss.rep[orb[0]]
            stab = L.stabilizer(lam0)
            for l1 in orb:
                for l2 in orb:
                    keys.extend((l1, l2, w) for w in stab)
        self.keys = keys
        self._cb: Optional[Dict[EKey, EElt]] = None

    def rep(self, lam: int) -> int:
        return self.ss.rep[lam]

    def clean(self, x: EElt) -> EElt:
        return {k: t for k, t in x.items() if t}

    def unit(self) -> EElt:
        return {(lam, lam): {(0, self.rep(lam)): ONE} for lam in range(self.ctx.L.size)}

    def x(self, key: EKey) -> EElt:
        l1, l2, w = key
        return {(l1, l2): {(w, self.rep(l1)): ONE}}

    def add(self, a: EElt, b: EElt) -> EElt:
        out = {k: dict(t) for k, t in a.items()}
        for k, t in b.items():
            cur = out.setdefault(k, {})
            for key, c in t.items():
                _add_into(cur, key, c)
        return self.clean(out)

    def scale(self, a: EElt, c: Laurent) -> EElt:
        return self.clean({k: {key: c * x for key, x in t.items()} for k, t in a.items()})

    def mul(self, a: EElt, b: EElt) -> EElt:
        ctx = self.ctx
        by_row: Dict[int, List[Tuple[int, Terms]]] = {}
        for (l1, l2), t in b.items():
            by_row.setdefault(l1, []).append((l2, t))
        out: EElt = {}
        for (l1, mid), t1 in a.items():
            for l2, t2 in by_row.get(mid, ()):
                cur = out.setdefault((l1, l2), {})
                for key, c in ctx.mul_terms(t1, t2).items():
                    _add_into(cur, key, c)
        return self.clean(out)

    def bar(self, a: EElt) -> EElt:
        return self.clean({k: self.ctx.bar_terms(t) for k, t in a.items()})

    def check_entries(self, a: EElt) -> bool:
        """Every entry lies in 1_{lam1^0} H 1_{lam2^0} and indices share an orbit."""
        ctx = self.ctx
        for (l1, l2), t in a.items():
            if self.orbit_of[l1] != self.orbit_of[l2]:
                return False
            r1, r2 = self.rep(l1), self.rep(l2)
            for key in t:
                if key[1] != r2 or ctx.target(key) != r1:
                    return False
        return True

    def canonical_basis(self) -> Dict[EKey, EElt]:
        """c^{lam1,lam2,w} from the entrywise bar, solved block by block."""
        if self._cb is not None:
            return self._cb
        ctx, G = self.ctx, self.ctx.G
        out: Dict[EKey, EElt] = {}
        blocks: Dict[Tuple[int, int], List[int]] = {}
        for l1, l2, w in self.keys:
            blocks.setdefault((l1, l2), []).append(w)
        solved: Dict[int, Dict[int, LTerms]] = {}
        for (l1, l2), ws in blocks.items():
            lam0 = self.rep(l1)
            if lam0 not in solved:
                solved[lam0] = kl_solve(
                    ws, G.ext_length,
                    lambda e, lam0=lam0: {k[0]: c for k, c in ctx.bar_basis((e, lam0)).items()},
                )
            for w in ws:
                out[(l1, l2, w)] = {(l1, l2): {(y, lam0): c for y, c in solved[lam0][w].items()}}
        self._cb = out
        return out

    def dimension(self) -> int:
        return len(self.keys)


def psi0(ss: SsChoice, e: int, lam: int) -> EKey:
    """(w, lam) -> (w lam, lam, [ss_{w lam}] w [ss_lam]^-1)."""
    G, L = ss.ctx.G, ss.ctx.L
    wl = L.act_table[e][lam]
    return wl, lam, G.ext_mul(G.ext_mul(ss.bracket[wl], e), G.ext_inv(ss.bracket[lam]))


def psi0_inverse(ss: SsChoice, key: EKey) -> Tuple[int, int]:
    G = ss.ctx.G
    l1, l2, w = key
    return G.ext_mul(G.ext_mul(G.ext_inv(ss.bracket[l1]), w), ss.bracket[l2]), l2


def psi(ctx: HeckeCtx, ss: SsChoice, h) -> EElt:
    """Psi(h)_{lam1,lam2} = tau_{lam1} 1_{lam1} h 1_{lam2} tau'_{lam2}."""
    terms = h.terms if isinstance(h, HeckeElt) else h
    pieces: Dict[Tuple[int, int], Terms] = {}
    for key, c in terms.items():
        pieces.setdefault((ctx.target(key), key[1]), {})[key] = c
    out: EElt = {}
    for (l1, l2), part in pieces.items():
        val = ctx.mul_terms(ss.tau[l1], ctx.mul_terms(part, ss.tau_prime[l2]))
        if val:
            out[(l1, l2)] = val
    return out


def psi0_table(ss: SsChoice) -> List[dict]:
    """The bijection Psi_0 as JSON-ready records."""
    ctx = ss.ctx
    G, L = ctx.G, ctx.L

    def ext_json(e):
        a, w = G.ext_parts(e)
        return {"aut_power": a, "word": list(G.words[w])}

    rows = []
    for e, lam in ctx.basis_keys():
        l1, l2, w = psi0(ss, e, lam)
        rows.append({
            "w": ext_json(e), "lambda": list(L.chars[lam]),
            "image": {"lambda1": list(L.chars[l1]), "lambda2": list(L.chars[l2]), "w": ext_json(w)},
        })
    return rows


def check_psi(ctx: HeckeCtx, ss: SsChoice, cb: CanBasis, distinguished: Optional[List[Key]] = None) -> List[str]:
    """Psi is a bar-compatible algebra isomorphism matching the canonical bases."""
    E = EAlg(ctx, ss)
    G, L = ctx.G, ctx.L
    bad: List[str] = []
    if E.dimension() != ctx.dim:
        bad.append(f"E has dimension {E.dimension()} but H has {ctx.dim}")
    # block structure: sum over orbits of N^2 |stabilizer of the representative|
    blocks = sum(len(orb) ** 2 * len(L.stabilizer(ss.rep[orb[0]])) for orb in E.orbits)
    if blocks != E.dimension():
        bad.append("E is not the direct sum of the orbit matrix blocks")
    unit = E.unit()
    for key in E.keys[: min(len(E.keys), 200)]:
        x = E.x(key)
        if E.mul(unit, x) != x or E.mul(x, unit) != x:
            bad.append(f"diagonal idempotent element is not a unit at {key}")
            break
    if psi(ctx, ss, ctx.unit()) != unit:
        bad.append("Psi(1) is not the unit of E")

    image = {}
    for key in ctx.basis_keys():
        ekey = psi0(ss, *key)
        image[key] = ekey
        if psi0_inverse(ss, ekey) != key:
            bad.append(f"Psi_0 inverse formula fails at {ctx.describe(key)}")
        p = psi(ctx, ss, ctx.elt({key: ONE}))
        if p != E.x(ekey):
            bad.append(f"Psi(TT_w 1_lam) is not the predicted matrix unit at {ctx.describe(key)}")
        if not E.check_entries(p):
            bad.append(f"Psi entry outside its corner at {ctx.describe(key)}")
        if E.bar(p) != psi(ctx, ss, ctx.bar_basis(key)):
            bad.append(f"Psi does not commute with bar at {ctx.describe(key)}")
    if sorted(image.values()) != sorted(E.keys):
        bad.append("Psi_0 is not a bijection onto the E index set")

    gens: List[Terms] = []
    for lam in range(L.size):
        gens.append({(0, lam): ONE})
        gens.extend({(g, lam): ONE} for g in ss.generators)
    for g in gens:
        pg = psi(ctx, ss, g)
        for key in ctx.basis_keys():
            lhs = psi(ctx, ss, ctx.mul_terms(g, {key: ONE}))
            rhs = E.mul(pg, psi(ctx, ss, {key: ONE}))
            if lhs != rhs:
                bad.append(f"Psi not multiplicative at {g} * {ctx.describe(key)}")

    ecb = E.canonical_basis()
    for key in cb.keys:
        if psi(ctx, ss, cb.elements[key]) != ecb[image[key]]:
            bad.append(f"Psi(c) is not the E canonical basis element at {ctx.describe(key)}")

    if distinguished is not None:
        for key in distinguished:
            l1, l2, w = image[key]
            a, x = G.ext_parts(w)
            lam0 = ss.rep[l1]
            if l1 != l2 or a != 0 or not L.in_W_lambda(lam0, x) or G.mul[x][x] != 0:
                bad.append(f"distinguished element {ctx.describe(key)} is not diagonal with an involution of W_lam0")
    return bad
