"""Sparse multivariate polynomials with rational coefficients.

A ``Poly`` maps exponent tuples to nonzero ``Fraction`` coefficients.  Values
are treated as immutable: every operation returns a new polynomial.
"""

from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]


class Poly:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, Scalar] = ()):
        self.nvars = nvars
        clean: Dict[Exponent, Fraction] = {}
        for e, c in dict(terms).items():
            if c:
                if len(e) != nvars:
                    raise ValueError(f"exponent {e} does not match {nvars} variables")
                clean[tuple(e)] = Fraction(c)
        self.terms = clean
        self._hash = None

    # construction -----------------------------------------------------------
    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exponent, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "Poly":
        c = Fraction(c)
        return cls._raw(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exponent: Sequence[int], c: Scalar = 1) -> "Poly":
        return cls(len(exponent), {tuple(exponent): c})

    # basic queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def weighted_degrees(self, weights: Sequence[int]) -> set:
        return {sum(a * w for a, w in zip(e, weights)) for e in self.terms}

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        other = self._coerce(other)
        if not self.terms or not other.terms:
            return Poly.zero(self.nvars)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, i: int) -> "Poly":
        out: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return Poly._raw(self.nvars, out)

    # evaluation and substitution -------------------------------------------
    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, a in zip(point, e):
                if a:
                    term = term * x ** a
            total = total + term
        if isinstance(total, int):
            return Fraction(total)
        return total

    def compose(self, subs: Sequence["Poly"], nvars: int = None) -> "Poly":
        """Substitute polynomial ``subs[i]`` for variable i (all in one ring)."""
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        target = subs[0].nvars if subs else nvars
        if target is None:
            raise ValueError("target ring size is needed for a constant polynomial")
        powers: Dict[Tuple[int, int], Poly] = {}

        def power(i: int, a: int) -> Poly:
            key = (i, a)
            if key not in powers:
                powers[key] = Poly.const(target, 1) if a == 0 else power(i, a - 1) * subs[i]
            return powers[key]

        acc: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            term = reduce(lambda p, ia: p * power(*ia), [(i, a) for i, a in enumerate(e) if a],
                          Poly.const(target, c))
            for te, tc in term.terms.items():
                v = acc.get(te, 0) + tc
                if v:
                    acc[te] = v
                else:
                    acc.pop(te, None)
        return Poly._raw(target, acc)

    def substitute(self, i: int, value: Scalar) -> "Poly":
        """Fix variable i to a number and drop it from the ring."""
        value = Fraction(value)
        out: Dict[Exponent, Fraction] = {}
        for e, c in self.terms.items():
            ne = e[:i] + e[i + 1:]
            v = out.get(ne, 0) + c * value ** e[i]
            if v:
                out[ne] = v
            else:
                out.pop(ne, None)
        return Poly._raw(self.nvars - 1, out)

    def restrict_zero(self, indices: Iterable[int]) -> "Poly":
        """Drop every monomial involving any of ``indices`` (i.e. set them to 0)."""
        idx = list(indices)
        return Poly._raw(self.nvars, {e: c for e, c in self.terms.items() if not any(e[i] for i in idx)})

    def embed(self, nvars: int, positions: Sequence[int]) -> "Poly":
        """Reinterpret variable j as variable positions[j] of a larger ring."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for j, a in enumerate(e):
                ne[positions[j]] += a
            out[tuple(ne)] = c
        return Poly._raw(nvars, out)

    def antiderivative(self, i: int) -> "Poly":
        """Primitive in variable i vanishing at x_i = 0."""
        out = {}
        for e, c in self.terms.items():
            ne = list(e)
            ne[i] += 1
            out[tuple(ne)] = c / ne[i]
        return Poly._raw(self.nvars, out)

    def integrate_unit_cube(self) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            denom = 1
            for a in e:
                denom *= a + 1
            total += c / denom
        return total

    # display ----------------------------------------------------------------
    def to_str(self, var: str = "x") -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e in sorted(self.terms, key=lambda e: (sum(e), tuple(-a for a in e))):
            c = self.terms[e]
            mono = "*".join(
                f"{var}{i + 1}" + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a
            )
            if mono:
                if c == 1:
                    body = mono
                elif c == -1:
                    body = "-" + mono
                else:
                    body = f"{c} {mono}"
            else:
                body = str(c)
            pieces.append(body)
        s = " + ".join(pieces)
        return s.replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Poly({self.to_str()})"
