"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are tuples of (variable index, exponent) pairs, sorted by
variable; the empty tuple is the constant monomial.
"""

from __future__ import annotations

from fractions import Fraction


def _mul_monomials(m1, m2):
    powers = dict(m1)
    for v, e in m2:
        powers[v] = powers.get(v, 0) + e
    return tuple(sorted(powers.items()))


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for mono, coeff in (terms.items() if isinstance(terms, dict) else terms):
                coeff = Fraction(coeff)
                if coeff:
                    cur = self.terms.get(mono, Fraction(0)) + coeff
                    if cur:
                        self.terms[mono] = cur
                    else:
                        self.terms.pop(mono, None)

    @classmethod
    def constant(cls, c):
        c = Fraction(c)
        return cls({(): c} if c else {})

    @classmethod
    def variable(cls, v):
        return cls({((v, 1),): Fraction(1)})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            cur = out.get(mono, Fraction(0)) + c
            if cur:
                out[mono] = cur
            else:
                out.pop(mono, None)
        p = Polynomial()
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self):
        p = Polynomial()
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Polynomial()
            p = Polynomial()
            p.terms = {m: k * c for m, k in self.terms.items()}
            return p
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mul_monomials(m1, m2)
                cur = out.get(mono, Fraction(0)) + c1 * c2
                if cur:
                    out[mono] = cur
                else:
                    out.pop(mono, None)
        p = Polynomial()
        p.terms = out
        return p

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e for _, e in m) for m in self.terms)

    def variables(self) -> set:
        return {v for m in self.terms for v, _ in m}

    def coefficient(self, mono) -> Fraction:
        return self.terms.get(tuple(sorted(mono)), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def is_linear(self) -> bool:
        return self.degree() <= 1

    def linear_parts(self):
        """(coeff map var->Fraction, constant); requires degree <= 1."""
        coeffs = {}
        const = Fraction(0)
        for m, c in self.terms.items():
            if m == ():
                const = c
            elif len(m) == 1 and m[0][1] == 1:
                coeffs[m[0][0]] = c
            else:
                raise ValueError("polynomial is not linear")
        return coeffs, const

    def evaluate(self, point) -> Fraction:
        """point maps variable index -> value (Fraction or float)."""
        out = 0
        for m, c in self.terms.items():
            v = c
            for var, e in m:
                v *= point[var] ** e
            out += v
        return out

    def substitute_zero(self, zero_vars) -> "Polynomial":
        zero_vars = set(zero_vars)
        return Polynomial({m: c for m, c in self.terms.items()
                           if not any(v in zero_vars for v, _ in m)})

    def by_powers_of(self, var):
        """Coefficient polynomials by descending power of `var` (Horner view)."""
        buckets = {}
        for m, c in self.terms.items():
            e = 0
            rest = []
            for v, k in m:
                if v == var:
                    e = k
                else:
                    rest.append((v, k))
            buckets.setdefault(e, {})[tuple(rest)] = c
        out = []
        for e in sorted(buckets, reverse=True):
            out.append((e, Polynomial(buckets[e])))
        return out

    def render(self, var_name=None) -> str:
        if not self.terms:
            return "0"
        var_name = var_name or (lambda v: f"x{v}")
        parts = []
        for m, c in sorted(self.terms.items()):
            factors = []
            if c != 1 or not m:
                factors.append(str(c))
            for v, e in m:
                factors.append(var_name(v) if e == 1 else f"{var_name(v)}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({self.render()})"
