"""Exact scalars: Laurent polynomials in ``v`` and cyclotomic numbers.

``Laurent`` stores a sparse map exponent -> coefficient.  Coefficients are
Python ints by default but any exact field element with ``+``, ``*`` and
truthiness works (``Fraction`` or :class:`Cyclo`).

>>> v = Laurent.v()
>>> (v + 3 * v**-2).bar()
Laurent('3*v^2 + 1*v^-1')
>>> Laurent.parse(str(v - v**-1)) == v - v**-1
True
>>> zeta3 = Cyclo.root(3, 1)
>>> zeta3.sp_conj() == zeta3 * zeta3
True
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Any, Dict, Iterable, Iterator, Optional, Tuple

__all__ = ["Laurent", "LaurentInt", "Laurent2", "Cyclo", "lcm"]


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _is_zero(c) -> bool:
    return not c


class Laurent:
    """Element of R[v, v^-1] for an exact coefficient ring R."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Optional[Dict[int, Any]] = None, *, _trusted: bool = False):
        if coeffs is None:
            self._c: Dict[int, Any] = {}
        elif _trusted:
            self._c = coeffs
        else:
            self._c = {int(k): c for k, c in coeffs.items() if c}
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Laurent":
        return cls({0: c}) if c else cls()

    @classmethod
    def v(cls, k: int = 1) -> "Laurent":
        return cls({k: 1}, _trusted=True)

    @classmethod
    def monomial(cls, c, k: int) -> "Laurent":
        return cls({k: c}) if c else cls()

    @classmethod
    def coerce(cls, x) -> "Laurent":
        return x if isinstance(x, Laurent) else cls.const(x)

    # accessors ----------------------------------------------------------
    def items(self) -> Iterator[Tuple[int, Any]]:
        return iter(self._c.items())

    def coeff(self, k: int):
        return self._c.get(k, 0)

    def __bool__(self) -> bool:
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def max_deg(self) -> Optional[int]:
        return max(self._c) if self._c else None

    def min_deg(self) -> Optional[int]:
        return min(self._c) if self._c else None

    def exponents(self) -> list:
        return sorted(self._c)

    def is_constant(self) -> bool:
        return not self._c or (len(self._c) == 1 and 0 in self._c)

    # ring structure -----------------------------------------------------
    def __add__(self, other) -> "Laurent":
        if not isinstance(other, Laurent):
            if not other:
                return self
            other = Laurent.const(other)
        if not other._c:
            return self
        if not self._c:
            return other
        out = dict(self._c)
        for k, c in other._c.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Laurent(out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "Laurent":
        return Laurent({k: -c for k, c in self._c.items()}, _trusted=True)

    def __sub__(self, other) -> "Laurent":
        return self + (-Laurent.coerce(other))

    def __rsub__(self, other) -> "Laurent":
        return Laurent.coerce(other) + (-self)

    def __mul__(self, other) -> "Laurent":
        if not isinstance(other, Laurent):
            if not other:
                return Laurent()
            return Laurent({k: c * other for k, c in self._c.items() if c * other}, _trusted=True)
        a, b = self._c, other._c
        if not a or not b:
            return Laurent()
        if len(a) == 1:
            (k0, c0), = a.items()
            return Laurent({k0 + k: c0 * c for k, c in b.items() if c0 * c}, _trusted=True)
        if len(b) == 1:
            (k0, c0), = b.items()
            return Laurent({k0 + k: c * c0 for k, c in a.items() if c * c0}, _trusted=True)
        out: Dict[int, Any] = {}
        for i, x in a.items():
            for j, y in b.items():
                k = i + j
                out[k] = out.get(k, 0) + x * y
        return Laurent({k: c for k, c in out.items() if c}, _trusted=True)

    def __rmul__(self, other) -> "Laurent":
        if not other:
            return Laurent()
        return Laurent({k: other * c for k, c in self._c.items() if other * c}, _trusted=True)

    def __pow__(self, e: int) -> "Laurent":
        if len(self._c) == 1:
            (k, c), = self._c.items()
            if e < 0 and c not in (1, -1):
                raise ValueError("only monomials with unit coefficient have inverses")
            return Laurent({k * e: c ** abs(e) if e >= 0 else c ** (-e)}, _trusted=True)
        if e < 0:
            raise ValueError("negative power of a non-monomial")
        out = Laurent.const(1)
        for _ in range(e):
            out = out * self
        return out

    def shift(self, k: int) -> "Laurent":
        """Multiply by v^k."""
        if k == 0:
            return self
        return Laurent({e + k: c for e, c in self._c.items()}, _trusted=True)

    def exact_div(self, d) -> "Laurent":
        """Divide every coefficient by the scalar d (must be exact for ints)."""
        out = {}
        for k, c in self._c.items():
            if isinstance(c, int) and isinstance(d, int):
                q, r = divmod(c, d)
                if r:
                    raise ArithmeticError(f"{c} not divisible by {d}")
                out[k] = q
            else:
                out[k] = c / d
        return Laurent(out)

    def __eq__(self, other) -> bool:
        if isinstance(other, Laurent):
            return self._c == other._c
        if not other:
            return not self._c
        return self._c == {0: other}

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    # involutions and specializations ------------------------------------
    def bar(self) -> "Laurent":
        """The ring involution v -> v^-1."""
        return Laurent({-k: c for k, c in self._c.items()}, _trusted=True)

    bar_conj = bar

    def map_coeffs(self, f) -> "Laurent":
        return Laurent({k: f(c) for k, c in self._c.items()})

    def sp_conj(self) -> "Laurent":
        """Apply the root-of-unity inversion to coefficients; v is fixed."""
        return self.map_coeffs(lambda c: c.sp_conj() if isinstance(c, Cyclo) else c)

    def substitute(self, value):
        """Evaluate at v = value (an invertible exact scalar)."""
        if not value:
            raise ZeroDivisionError("v must be specialized to an invertible scalar")
        inv = value.inverse() if isinstance(value, Cyclo) else 1 / Fraction(value)
        total = 0
        for k, c in self._c.items():
            total = total + c * (value ** k if k >= 0 else inv ** (-k))
        return total

    def at_one(self):
        """Sum of coefficients: the specialization v = 1."""
        total = 0
        for c in self._c.values():
            total = total + c
        return total

    def substitute_v2(self, q):
        """Evaluate a polynomial in v^2 at v^2 = q; odd exponents are an error."""
        total = 0
        for k, c in self._c.items():
            if k % 2:
                raise ValueError("odd power of v in substitute_v2")
            e = k // 2
            total = total + (c * q ** e if e >= 0 else c * Fraction(1, q ** (-e)))
        return total

    def negative_part(self) -> "Laurent":
        return Laurent({k: c for k, c in self._c.items() if k < 0}, _trusted=True)

    def degree_bounded_by(self, m: int) -> bool:
        return all(k <= m for k in self._c)

    # text / json ----------------------------------------------------------
    def __str__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for k in sorted(self._c, reverse=True):
            c = self._c[k]
            if isinstance(c, Cyclo):
                parts.append(("+", f"({c})*v^{k}"))
            elif c < 0:
                parts.append(("-", f"{-c}*v^{k}"))
            else:
                parts.append(("+", f"{c}*v^{k}"))
        head_sign, head = parts[0]
        out = ("-" + head) if head_sign == "-" else head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"Laurent('{self}')"

    _TERM = re.compile(r"^\s*(\d+(?:/\d+)?)?\s*\*?\s*(v(?:\s*\^\s*(-?\d+))?)?\s*$")

    @classmethod
    def parse(cls, text: str) -> "Laurent":
        """Parse the canonical text form (integer or rational coefficients)."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls()
        s = re.sub(r"(?<=[^\^*])-", "+-", s)
        out: Dict[int, Any] = {}
        for raw in s.split("+"):
            if not raw:
                continue
            sign = 1
            while raw.startswith("-"):
                sign, raw = -sign, raw[1:]
            m = cls._TERM.match(raw)
            if not m or (m.group(1) is None and m.group(2) is None):
                raise ValueError(f"cannot parse term {raw!r} in {text!r}")
            num = m.group(1)
            c = Fraction(num) if num else Fraction(1)
            c = int(c) if c.denominator == 1 else c
            k = 0
            if m.group(2):
                k = int(m.group(3)) if m.group(3) is not None else 1
            out[k] = out.get(k, 0) + sign * c
        return cls(out)

    def to_json(self) -> Dict[str, Any]:
        return {str(k): _coeff_json(self._c[k]) for k in sorted(self._c, reverse=True)}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Laurent":
        return cls({int(k): _coeff_from_json(c) for k, c in data.items()})


LaurentInt = Laurent


def _as_field(x):
    return Fraction(x) if isinstance(x, int) else x


def _coeff_json(c):
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return str(c)
    if isinstance(c, Cyclo):
        return c.to_json()
    raise TypeError(type(c))


def _coeff_from_json(c):
    if isinstance(c, int):
        return c
    if isinstance(c, str):
        f = Fraction(c)
        return int(f) if f.denominator == 1 else f
    return Cyclo.from_json(c)


class Laurent2:
    """Laurent polynomial in two independent variables v, v'."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Optional[Dict[Tuple[int, int], Any]] = None):
        self._c = {k: c for k, c in (coeffs or {}).items() if c}

    @classmethod
    def in_v(cls, p: Laurent) -> "Laurent2":
        return cls({(k, 0): c for k, c in p.items()})

    @classmethod
    def in_vprime(cls, p: Laurent) -> "Laurent2":
        return cls({(0, k): c for k, c in p.items()})

    def __add__(self, other: "Laurent2") -> "Laurent2":
        out = dict(self._c)
        for k, c in other._c.items():
            out[k] = out.get(k, 0) + c
        return Laurent2(out)

    def __sub__(self, other: "Laurent2") -> "Laurent2":
        return self + Laurent2({k: -c for k, c in other._c.items()})

    def __mul__(self, other: "Laurent2") -> "Laurent2":
        out: Dict[Tuple[int, int], Any] = {}
        for (a, b), x in self._c.items():
            for (c, d), y in other._c.items():
                key = (a + c, b + d)
                out[key] = out.get(key, 0) + x * y
        return Laurent2(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, Laurent2) and self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __bool__(self) -> bool:
        return bool(self._c)

    def specialize_diagonal(self) -> Laurent:
        """Set v' = v."""
        out: Dict[int, Any] = {}
        for (a, b), c in self._c.items():
            out[a + b] = out.get(a + b, 0) + c
        return Laurent(out)

    def __repr__(self) -> str:
        terms = " + ".join(f"{c}*v^{a}*v'^{b}" for (a, b), c in sorted(self._c.items(), reverse=True))
        return f"Laurent2({terms or '0'})"


# --------------------------------------------------------------------------
# cyclotomic numbers


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(m: int) -> Tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial, low degree first."""
    from sympy import Poly, cyclotomic_poly, symbols

    x = symbols("x")
    coeffs = Poly(cyclotomic_poly(m, x), x).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


@lru_cache(maxsize=None)
def _power_vectors(m: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Coordinates of zeta_m^k, k = 0..m-1, in the power basis mod Phi_m."""
    phi = _cyclotomic_coeffs(m)
    d = len(phi) - 1
    vecs = []
    cur = [Fraction(0)] * d
    cur[0] = Fraction(1)
    for _ in range(m):
        vecs.append(tuple(cur))
        # multiply by x and reduce with x^d = -sum phi_i x^i
        top = cur[-1]
        nxt = [Fraction(0)] + cur[:-1]
        if top:
            for i in range(d):
                nxt[i] -= top * phi[i]
        cur = nxt
    return tuple(vecs)


class Cyclo:
    """Element of Q(zeta_m)[sqrt(p)] in dense coordinates.

    Coordinates: ``a`` in the power basis of Q(zeta_m) and ``b`` the
    coefficient of ``y = sqrt(p)``; ``b`` is ``None`` when no square root is
    adjoined.

    >>> i = Cyclo.root(4, 1)
    >>> i * i == -1
    True
    >>> (Cyclo.root(6, 1) + 1).inverse() * (Cyclo.root(6, 1) + 1) == 1
    True
    """

    __slots__ = ("m", "p", "a", "b")

    def __init__(self, m: int, a: Iterable, p: Optional[int] = None, b: Optional[Iterable] = None):
        self.m = m
        self.p = p
        self.a = tuple(Fraction(x) for x in a)
        self.b = tuple(Fraction(x) for x in b) if b is not None else None
        if p is not None and self.b is None:
            self.b = tuple(Fraction(0) for _ in self.a)

    @staticmethod
    def degree(m: int) -> int:
        return len(_cyclotomic_coeffs(m)) - 1

    @classmethod
    def rational(cls, x, m: int = 1, p: Optional[int] = None) -> "Cyclo":
        d = cls.degree(m)
        return cls(m, [Fraction(x)] + [0] * (d - 1), p)

    @classmethod
    def root(cls, m: int, k: int = 1) -> "Cyclo":
        """zeta_m^k with zeta_m = exp(2 pi i / m)."""
        return cls(m, _power_vectors(m)[k % m])

    @classmethod
    def sqrt_p(cls, p: int, m: int = 1) -> "Cyclo":
        d = cls.degree(m)
        return cls(m, [0] * d, p, [1] + [0] * (d - 1))

    # coercion -------------------------------------------------------------
    def embed(self, big_m: int, p: Optional[int] = None) -> "Cyclo":
        if big_m % self.m:
            raise ValueError(f"conductor {self.m} does not divide {big_m}")
        if p is not None and self.p is not None and p != self.p:
            raise ValueError("incompatible square roots")
        p = p if p is not None else self.p
        if big_m == self.m and p == self.p:
            return self
        step = big_m // self.m
        pv = _power_vectors(big_m)
        d = self.degree(big_m)

        def lift(coords):
            out = [Fraction(0)] * d
            for i, c in enumerate(coords):
                if c:
                    for j, x in enumerate(pv[i * step]):
                        out[j] += c * x
            return out

        b = lift(self.b) if self.b is not None else None
        return Cyclo(big_m, lift(self.a), p, b)

    def _common(self, other) -> Tuple["Cyclo", "Cyclo"]:
        if not isinstance(other, Cyclo):
            other = Cyclo.rational(other, self.m, self.p)
        m = lcm(self.m, other.m)
        p = self.p if self.p is not None else other.p
        return self.embed(m, p), other.embed(m, p)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> "Cyclo":
        x, y = self._common(other)
        a = tuple(s + t for s, t in zip(x.a, y.a))
        b = tuple(s + t for s, t in zip(x.b, y.b)) if x.b is not None else None
        return Cyclo(x.m, a, x.p, b)

    __radd__ = __add__

    def __neg__(self) -> "Cyclo":
        return Cyclo(self.m, [-c for c in self.a], self.p, [-c for c in self.b] if self.b is not None else None)

    def __sub__(self, other) -> "Cyclo":
        return self + (-other if isinstance(other, Cyclo) else -Fraction(other))

    def __rsub__(self, other) -> "Cyclo":
        return (-self) + other

    @staticmethod
    def _mul_field(m: int, a, b):
        d = len(a)
        pv = _power_vectors(m)
        out = [Fraction(0)] * d
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                xy = x * y
                for k, z in enumerate(pv[(i + j) % m]):
                    if z:
                        out[k] += xy * z
        return out

    def __mul__(self, other) -> "Cyclo":
        if isinstance(other, (int, Fraction)):
            return Cyclo(self.m, [c * other for c in self.a], self.p,
                         [c * other for c in self.b] if self.b is not None else None)
        x, y = self._common(other)
        m = x.m
        a = self._mul_field(m, x.a, y.a)
        if x.b is None:
            return Cyclo(m, a)
        bb = self._mul_field(m, x.b, y.b)
        a = [s + x.p * t for s, t in zip(a, bb)]
        b1 = self._mul_field(m, x.a, y.b)
        b2 = self._mul_field(m, x.b, y.a)
        return Cyclo(m, a, x.p, [s + t for s, t in zip(b1, b2)])

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Cyclo":
        if e < 0:
            return self.inverse() ** (-e)
        out = Cyclo.rational(1, self.m, self.p)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def galois(self, j: int) -> "Cyclo":
        """The automorphism zeta_m -> zeta_m^j (j coprime to m); y is fixed."""
        if gcd(j, self.m) != 1:
            raise ValueError("exponent must be coprime to the conductor")
        pv = _power_vectors(self.m)
        d = len(self.a)

        def apply(coords):
            out = [Fraction(0)] * d
            for i, c in enumerate(coords):
                if c:
                    for k, z in enumerate(pv[(i * j) % self.m]):
                        out[k] += c * z
            return out

        return Cyclo(self.m, apply(self.a), self.p, apply(self.b) if self.b is not None else None)

    def sp_conj(self) -> "Cyclo":
        """Invert every root of unity, fix sqrt(p)."""
        return self.galois(-1 % self.m if self.m > 1 else 1)

    def _field_inverse(self) -> "Cyclo":
        # product of all nontrivial conjugates over the norm
        plain = Cyclo(self.m, self.a)
        if not any(plain.a):
            raise ZeroDivisionError("inverse of zero")
        others = Cyclo.rational(1, self.m)
        for j in range(2, self.m):
            if gcd(j, self.m) == 1:
                others = others * plain.galois(j)
        norm = plain * others
        n = norm.to_rational()
        return others * (1 / n)

    def inverse(self) -> "Cyclo":
        if self.b is None or not any(self.b):
            inv = Cyclo(self.m, self.a)._field_inverse()
            return inv.embed(self.m, self.p) if self.p is not None else inv
        a = Cyclo(self.m, self.a)
        b = Cyclo(self.m, self.b)
        denom = (a * a - b * b * self.p)._field_inverse()
        na, nb = a * denom, -(b * denom)
        return Cyclo(self.m, na.a, self.p, nb.a)

    def __truediv__(self, other) -> "Cyclo":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other) -> "Cyclo":
        return self.inverse() * other

    # predicates -------------------------------------------------------------
    def __bool__(self) -> bool:
        return any(self.a) or (self.b is not None and any(self.b))

    def is_rational(self) -> bool:
        return not any(self.a[1:]) and (self.b is None or not any(self.b))

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.a[0]

    def is_integer(self) -> bool:
        return self.is_rational() and self.a[0].denominator == 1

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.a[0] == other
        if not isinstance(other, Cyclo):
            return NotImplemented
        x, y = self._common(other)
        return x.a == y.a and x.b == y.b

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.a[0])
        # the normalized trace does not depend on the ambient conductor
        return hash(("cyclo", self._normalized_trace(self.a),
                     self._normalized_trace(self.b) if self.b is not None else 0))

    def _normalized_trace(self, coords) -> Fraction:
        plain = Cyclo(self.m, coords)
        total = Fraction(0)
        count = 0
        for j in range(1, self.m + 1):
            if gcd(j, self.m) == 1:
                total += plain.galois(j).a[0]
                count += 1
        return total / count

    def __repr__(self) -> str:
        return f"Cyclo({self})"

    def __str__(self) -> str:
        def fmt(coords, tag):
            out = []
            for i, c in enumerate(coords):
                if not c:
                    continue
                base = f"z{self.m}^{i}" if i else ""
                out.append(f"{c}{'*' + base if base else ''}{tag}")
            return out

        terms = fmt(self.a, "") + (fmt(self.b, f"*sqrt{self.p}") if self.b is not None else [])
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"m": self.m, "a": [str(c) for c in self.a]}
        if self.b is not None:
            out["p"] = self.p
            out["b"] = [str(c) for c in self.b]
        return out

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Cyclo":
        return cls(data["m"], [Fraction(c) for c in data["a"]], data.get("p"),
                   [Fraction(c) for c in data["b"]] if "b" in data else None)

