"""Characters Y -> Z/n and the root combinatorics attached to each of them.

A character is stored as its value vector on the standard basis of Y; the
set of all of them is indexed in lexicographic order.

>>> from heckelab.weyl import WeylGroup, build_root_datum
>>> L = CharLattice(WeylGroup(build_root_datum("A2")), 2)
>>> lam = L.index[(1, 1)]
>>> sys = L.lambda_system(lam)
>>> len(sys.W_lambda), [L.G.roots[a] for a in sys.R_lambda_plus]
(2, [(1, 1)])
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .weyl import ExtWeylElt, WeylGroup

__all__ = ["CharModN", "LambdaSystem", "CharLattice"]


@dataclass(frozen=True)
class CharModN:
    """A homomorphism Y -> Z/n given by its values on the standard basis."""

    n: int
    values: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(x) % self.n for x in self.values))

    def __call__(self, y: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(self.values, y)) % self.n

    def negate(self) -> "CharModN":
        """Coordinatewise negation.

        >>> CharModN(3, (1, 2)).negate().values
        (2, 1)
        """
        return CharModN(self.n, tuple(-x for x in self.values))


@dataclass(frozen=True)
class LambdaSystem:
    """Root subsystem R_lambda, its simple system and the group W_lambda."""

    R_lambda: FrozenSet[int]
    R_lambda_plus: Tuple[int, ...]
    Pi_lambda: Tuple[int, ...]
    I_lambda: Tuple[int, ...]  # Weyl indices of the reflections s_alpha, alpha in Pi_lambda
    W_lambda: FrozenSet[int]


class CharLattice:
    """All characters Y -> Z/n with the action of the extended Weyl group."""

    def __init__(self, G: WeylGroup, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.G = G
        self.n = n
        r = G.datum.rank
        self.chars: List[Tuple[int, ...]] = list(product(range(n), repeat=r))
        self.index: Dict[Tuple[int, ...], int] = {c: i for i, c in enumerate(self.chars)}
        self.size = len(self.chars)

        # act[e][lam] = index of e.lam, where (e.lam)(y) = lam(e^-1 y)
        act = []
        for e in range(G.ext_size):
            minv = G.ext_y_matrix(G.ext_inv(e))
            row = []
            for c in self.chars:
                new = tuple(sum(c[s] * minv[s][t] for s in range(r)) % n for t in range(r))
                row.append(self.index[new])
            act.append(row)
        self.act_table: List[List[int]] = act
        self.neg: List[int] = [self.index[tuple(-x % n for x in c)] for c in self.chars]
        self._systems: Dict[int, LambdaSystem] = {}

    # basic operations ----------------------------------------------------
    def char(self, lam: int) -> CharModN:
        return CharModN(self.n, self.chars[lam])

    def index_of(self, lam) -> int:
        if isinstance(lam, CharModN):
            return self.index[lam.values]
        if isinstance(lam, (tuple, list)):
            return self.index[tuple(int(x) % self.n for x in lam)]
        return int(lam)

    def evaluate(self, lam: int, root: int) -> int:
        """lambda(coroot of the given root) in Z/n."""
        if not 0 <= root < self.G.nroots:
            raise ValueError("not a root index")
        c = self.chars[lam]
        return sum(a * b for a, b in zip(c, self.G.coroots[root])) % self.n

    def evaluate_root(self, lam: int, alpha: Sequence[int]) -> int:
        """Same as :meth:`evaluate` but with the root given as an X-vector."""
        key = tuple(alpha)
        if key not in self.G.root_index:
            raise ValueError(f"{key} is not a root")
        return self.evaluate(lam, self.G.root_index[key])

    def act(self, e, lam: int) -> int:
        if isinstance(e, ExtWeylElt):
            e = self.G.ext_index_of(e)
        return self.act_table[e][lam]

    def negate(self, lam: int) -> int:
        return self.neg[lam]

    @cached_property
    def simple_in_W(self) -> List[Tuple[bool, ...]]:
        """simple_in_W[lam][i]: whether s_i lies in W_lambda."""
        G = self.G
        return [tuple(self.evaluate(lam, G.simple_root_index[i]) == 0 for i in range(G.nsimple))
                for lam in range(self.size)]

    # root subsystems -----------------------------------------------------
    def lambda_system(self, lam: int) -> LambdaSystem:
        if lam in self._systems:
            return self._systems[lam]
        G = self.G
        R = frozenset(a for a in range(G.nroots) if self.evaluate(lam, a) == 0)
        Rplus = tuple(a for a in sorted(R) if G.positive[a])
        refl = {a: G.reflection(a) for a in Rplus}
        # simple roots of R_lambda: positive roots whose reflection has l_lambda = 1
        Pi = tuple(a for a in Rplus if self._l_lambda_from(Rplus, refl[a]) == 1)
        I = tuple(refl[a] for a in Pi)
        W_lambda = self._closure(I)
        assert W_lambda == self._closure(tuple(refl.values())), "W_lambda generated by simple reflections"
        sys = LambdaSystem(R, Rplus, Pi, I, W_lambda)
        self._systems[lam] = sys
        return sys

    def _closure(self, gens: Tuple[int, ...]) -> FrozenSet[int]:
        G = self.G
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = G.mul[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def _l_lambda_from(self, Rplus: Tuple[int, ...], e: int) -> int:
        G = self.G
        return sum(1 for a in Rplus if not G.positive[G.ext_root_image(e, a)])

    def l_lambda(self, lam: int, e) -> int:
        """|{alpha in R_lambda^+ : e(alpha) negative}| for an extended element e."""
        if isinstance(e, ExtWeylElt):
            e = self.G.ext_index_of(e)
        return self._l_lambda_from(self.lambda_system(lam).R_lambda_plus, e)

    def in_W_lambda(self, lam: int, w: int) -> bool:
        return w in self.lambda_system(lam).W_lambda

    def stabilizer(self, lam: int, ext: bool = True) -> List[int]:
        """W^D_lambda (ext indices) or, with ext=False, the stabilizer inside W."""
        G = self.G
        limit = G.ext_size if ext else G.size
        return [e for e in range(limit) if self.act_table[e][lam] == lam]

    def omega_group(self, lam: int) -> Tuple[List[int], List[int]]:
        """(Omega^D_lambda, W^D_lambda) as lists of ext indices.

        Asserts the semidirect decomposition W^D_lambda = W_lambda * Omega.
        """
        G = self.G
        stab = self.stabilizer(lam)
        omega = [e for e in stab if self.l_lambda(lam, e) == 0]
        W_lam = self.lambda_system(lam).W_lambda
        assert len(stab) == len(W_lam) * len(omega), "W^D_lambda = W_lambda x Omega (orders)"
        products = {G.ext_mul(x, o) for x in W_lam for o in omega}
        assert products == set(stab), "every element factors as (W_lambda part)(Omega part)"
        return omega, stab

    def factor(self, lam: int, e: int) -> Tuple[int, int]:
        """Write e in W^D_lambda as omega * x with omega in Omega, x in W_lambda."""
        G = self.G
        omega, _ = self.omega_group(lam)
        for o in omega:
            x = G.ext_mul(G.ext_inv(o), e)
            a, w = G.ext_parts(x)
            if a == 0 and w in self.lambda_system(lam).W_lambda:
                return o, w
        raise ValueError("element does not stabilize lambda")

    # orbits ----------------------------------------------------------------
    def orbits(self, ext: bool = True) -> List[List[int]]:
        """Orbits under W^D (or W), each sorted, ordered by their least element."""
        G = self.G
        limit = G.ext_size if ext else G.size
        seen = set()
        out = []
        for lam in range(self.size):
            if lam in seen:
                continue
            orb = sorted({self.act_table[e][lam] for e in range(limit)})
            seen.update(orb)
            out.append(orb)
        return out

    def orbit_rep(self, lam: int, ext: bool = True) -> int:
        """Lexicographically least element of the orbit of lam."""
        G = self.G
        limit = G.ext_size if ext else G.size
        return min(self.act_table[e][lam] for e in range(limit))
