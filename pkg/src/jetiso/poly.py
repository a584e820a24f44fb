"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are exponent tuples of a fixed length ``n`` and coefficients
are ``int`` or ``fractions.Fraction``.  Zero coefficients are never
stored, so ``p.is_zero()`` is just an emptiness check.  Products accept
an optional truncation degree; that is what makes these usable as
truncated power series everywhere else in the package.
"""

from __future__ import annotations

from fractions import Fraction


class Poly:
    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=None):
        self.n = n
        self.coeffs = {}
        if coeffs:
            for mono, c in coeffs.items():
                if c:
                    self.coeffs[mono] = c

    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def const(cls, n, value):
        return cls(n, {(0,) * n: value})

    @classmethod
    def variable(cls, n, i):
        mono = [0] * n
        mono[i] = 1
        return cls(n, {tuple(mono): 1})

    def is_zero(self):
        return not self.coeffs

    def coeff(self, mono):
        return self.coeffs.get(tuple(mono), Fraction(0))

    def constant_term(self):
        return self.coeffs.get((0,) * self.n, Fraction(0))

    def degree(self):
        """Total degree, or -1 for the zero polynomial."""
        if not self.coeffs:
            return -1
        return max(sum(m) for m in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, frozenset(self.coeffs.items())))

    def __add__(self, other):
        out = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            s = out.get(mono, 0) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        res = Poly(self.n)
        res.coeffs = out
        return res

    def __neg__(self):
        res = Poly(self.n)
        res.coeffs = {m: -c for m, c in self.coeffs.items()}
        return res

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, factor):
        if not factor:
            return Poly(self.n)
        res = Poly(self.n)
        res.coeffs = {m: factor * c for m, c in self.coeffs.items()}
        return res

    def mul(self, other, trunc=None):
        """Product, dropping monomials of total degree above ``trunc``."""
        out = {}
        for ma, ca in self.coeffs.items():
            da = sum(ma)
            for mb, cb in other.coeffs.items():
                if trunc is not None and da + sum(mb) > trunc:
                    continue
                mono = tuple(a + b for a, b in zip(ma, mb))
                s = out.get(mono, 0) + ca * cb
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        res = Poly(self.n)
        res.coeffs = out
        return res

    def __mul__(self, other):
        if isinstance(other, Poly):
            return self.mul(other)
        return self.scaled(other)

    def __rmul__(self, other):
        return self.scaled(other)

    def diff(self, i):
        out = {}
        for mono, c in self.coeffs.items():
            e = mono[i]
            if e:
                m = list(mono)
                m[i] = e - 1
                out[tuple(m)] = e * c
        res = Poly(self.n)
        res.coeffs = out
        return res

    def truncated(self, max_deg):
        res = Poly(self.n)
        res.coeffs = {m: c for m, c in self.coeffs.items() if sum(m) <= max_deg}
        return res

    def homogeneous_part(self, deg):
        res = Poly(self.n)
        res.coeffs = {m: c for m, c in self.coeffs.items() if sum(m) == deg}
        return res

    def eval(self, point):
        total = Fraction(0)
        for mono, c in self.coeffs.items():
            term = Fraction(c)
            for x, e in zip(point, mono):
                for _ in range(e):
                    term *= x
            total += term
        return total

    def sorted_terms(self):
        return sorted(self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        parts = []
        for mono, c in self.sorted_terms():
            vars_ = "*".join(
                f"x{i}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(mono) if e
            )
            parts.append(f"{c}" + (f"*{vars_}" if vars_ else ""))
        return "Poly(" + " + ".join(parts) + ")"
