"""Exact multilinear algebra over a pseudo-Euclidean space.

The space is R^n with a diagonal inner product of signs +-1.  Two tensor
containers cover everything the package needs:

* ``SymPairTensor``: an element of Sym^k V* tensor Sym^2 V*, stored
  sparsely on multiset keys.  These hold Taylor coefficients of metrics
  and symmetrized curvature data.
* ``MultiTensor``: a dense m-linear form, used for curvature tensors
  and their derivative jets.

The gauge space of degree k is the subspace of Sym^k tensor Sym^2
consisting of tensors h with h(v,...,v; v, .) = 0; these are exactly
the admissible degree-k Taylor coefficients of a metric in normal
coordinates.  ``gauge_basis`` computes an exact basis by splitting the
defining linear system into blocks with fixed index content, and
``gauge_dim`` gives the closed-form dimension count.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .exactla import RatMatrix, format_rational, nullspace_basis, parse_rational
from .poly import Poly


@dataclass(frozen=True)
class Space:
    """R^n with the diagonal inner product given by ``signature``."""

    n: int
    signature: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need n >= 1")
        if len(self.signature) != self.n or any(s not in (1, -1) for s in self.signature):
            raise ValueError("signature must be a tuple of +-1 of length n")

    @classmethod
    def euclidean(cls, n):
        return cls(n, (1,) * n)

    def eps(self, i):
        return self.signature[i]

    def inner(self, u, v):
        return sum((s * a * b for s, a, b in zip(self.signature, u, v)), Fraction(0))


def sym_indices(n, k):
    """All nondecreasing index tuples of length k over range(n)."""
    return itertools.combinations_with_replacement(range(n), k)


def multiset_count(ms) -> int:
    """Number of ordered tuples with the content of the sorted tuple ms."""
    k = len(ms)
    out = factorial(k)
    i = 0
    while i < k:
        j = i
        while j < k and ms[j] == ms[i]:
            j += 1
        out //= factorial(j - i)
        i = j
    return out


def content_of(idx, n):
    """Exponent vector counting occurrences of each index."""
    counts = [0] * n
    for i in idx:
        counts[i] += 1
    return tuple(counts)


def multiset_from_content(content):
    out = []
    for i, c in enumerate(content):
        out.extend([i] * c)
    return tuple(out)


class SymPairTensor:
    """Element of Sym^k V* tensor Sym^2 V*, sparse on multiset keys.

    Keys are pairs (sym, pair) of sorted index tuples; the value is the
    coefficient of the tensor evaluated on the corresponding basis
    vectors, so evaluation sums over all arrangements.
    """

    __slots__ = ("space", "k", "comps")

    def __init__(self, space, k, comps=None):
        self.space = space
        self.k = k
        self.comps = {}
        if comps:
            for (sym, pair), value in comps.items():
                if len(sym) != k or len(pair) != 2:
                    raise ValueError("component key does not match arity")
                if value:
                    key = (tuple(sorted(sym)), tuple(sorted(pair)))
                    self.comps[key] = self.comps.get(key, 0) + value
            self.comps = {key: v for key, v in self.comps.items() if v}

    @classmethod
    def zero(cls, space, k):
        return cls(space, k)

    def get(self, sym, pair):
        key = (tuple(sorted(sym)), tuple(sorted(pair)))
        return self.comps.get(key, Fraction(0))

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        return (isinstance(other, SymPairTensor) and self.space == other.space
                and self.k == other.k and self.comps == other.comps)

    def __add__(self, other):
        out = dict(self.comps)
        for key, v in other.comps.items():
            s = out.get(key, 0) + v
            if s:
                out[key] = s
            else:
                del out[key]
        res = SymPairTensor(self.space, self.k)
        res.comps = out
        return res

    def __neg__(self):
        res = SymPairTensor(self.space, self.k)
        res.comps = {key: -v for key, v in self.comps.items()}
        return res

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, factor):
        if not factor:
            return SymPairTensor(self.space, self.k)
        res = SymPairTensor(self.space, self.k)
        res.comps = {key: factor * v for key, v in self.comps.items()}
        return res

    def sorted_components(self):
        return sorted(self.comps.items())

    def to_json_obj(self):
        return {
            "n": self.space.n,
            "signature": list(self.space.signature),
            "k": self.k,
            "components": [
                {"sym": list(sym), "pair": list(pair), "value": format_rational(v)}
                for (sym, pair), v in self.sorted_components()
            ],
        }

    @classmethod
    def from_json_obj(cls, obj):
        space = Space(obj["n"], tuple(obj["signature"]))
        comps = {}
        for entry in obj["components"]:
            key = (tuple(entry["sym"]), tuple(entry["pair"]))
            comps[key] = comps.get(key, 0) + parse_rational(entry["value"])
        return cls(space, obj["k"], comps)

    def __repr__(self):
        return f"SymPairTensor(n={self.space.n}, k={self.k}, nnz={len(self.comps)})"


def eval_pair(h: SymPairTensor, xs, y, z) -> Fraction:
    """Evaluate h on k symmetric-slot vectors and the final pair."""
    if len(xs) != h.k:
        raise ValueError("wrong number of symmetric arguments")
    n = h.space.n
    total = Fraction(0)
    for idx in itertools.product(range(n), repeat=h.k):
        w = Fraction(1)
        for pos, i in enumerate(idx):
            w *= xs[pos][i]
            if not w:
                break
        if not w:
            continue
        for p in range(n):
            if not y[p]:
                continue
            for q in range(n):
                if not z[q]:
                    continue
                v = h.get(idx, (p, q))
                if v:
                    total += w * y[p] * z[q] * v
    return total


def polarize(coeffs, n, degree):
    """Symmetric multilinear form of a homogeneous polynomial.

    ``coeffs`` maps exponent tuples (summing to ``degree``) to values.
    Returns a dict on sorted index multisets such that evaluating the
    form on the diagonal recovers the polynomial: the multiset S gets
    the coefficient of its content, scaled by prod(alpha!)/degree!.
    """
    out = {}
    for mono, c in coeffs.items():
        if sum(mono) != degree:
            raise ValueError("polynomial is not homogeneous of the stated degree")
        scale = Fraction(1)
        for e in mono:
            scale *= factorial(e)
        value = c * Fraction(scale, factorial(degree))
        if value:
            out[multiset_from_content(mono)] = value
    return out


def is_gauge_tensor(h: SymPairTensor) -> bool:
    """True when h(v,...,v; v, .) vanishes identically.

    Checked exactly: for every multiset alpha of size k+1 and every
    index i, the polarized radial contraction must be zero.
    """
    n = h.space.n
    k = h.k
    for alpha in sym_indices(n, k + 1):
        for i in range(n):
            total = Fraction(0)
            for j in sorted(set(alpha)):
                rest = list(alpha)
                rest.remove(j)
                rest = tuple(rest)
                total += multiset_count(rest) * h.get(rest, (j, i))
            if total:
                return False
    return True


def gauge_dim(n: int, k: int) -> int:
    """Dimension of the gauge space in Sym^k tensor Sym^2, for k >= 1."""
    if k < 1:
        raise ValueError("gauge dimension formula needs k >= 1")
    return (n * (n + 1) // 2) * comb(k + n - 1, n - 1) - n * comb(k + n, n - 1)


def curvature_jet_dim_bound(n: int, k: int) -> int:
    """Dimension of the space of k-th curvature jet components.

    Matches gauge_dim(n, k+2); the closed form is n(k+1)/2 * C(k+n+1, n-2).
    """
    num = n * (k + 1) * comb(k + n + 1, n - 2)
    if num % 2:
        raise ArithmeticError("dimension formula did not produce an integer")
    return num // 2


@lru_cache(maxsize=None)
def _gauge_basis_cached(space: Space, k: int):
    n = space.n
    cols_by_content = defaultdict(list)
    for sym in sym_indices(n, k):
        sc = content_of(sym, n)
        for pair in sym_indices(n, 2):
            total = list(sc)
            for i in pair:
                total[i] += 1
            cols_by_content[tuple(total)].append((sym, pair))

    basis = []
    for cont in sorted(cols_by_content):
        cols = cols_by_content[cont]
        col_index = {key: i for i, key in enumerate(cols)}
        rows = []
        for i in range(n):
            if cont[i] == 0:
                continue
            alpha_content = list(cont)
            alpha_content[i] -= 1
            alpha = multiset_from_content(tuple(alpha_content))
            if len(alpha) != k + 1:
                raise AssertionError("content bookkeeping is off")
            row = [Fraction(0)] * len(cols)
            for j in sorted(set(alpha)):
                rest = list(alpha)
                rest.remove(j)
                rest = tuple(rest)
                key = (rest, tuple(sorted((j, i))))
                row[col_index[key]] += multiset_count(rest)
            rows.append(row)
        if not rows:
            continue
        for vec in nullspace_basis(RatMatrix.from_rows(rows)):
            comps = {cols[ci]: v for ci, v in enumerate(vec) if v}
            basis.append(SymPairTensor(space, k, comps))
    return tuple(basis)


def gauge_basis(space: Space, k: int):
    """Deterministic basis of the gauge space, blocked by index content."""
    if k < 1:
        raise ValueError("gauge space is defined for k >= 1")
    return list(_gauge_basis_cached(space, k))


# short names: N is the gauge space of admissible Taylor parts, C the
# linear span of jet components at one level
is_in_N = is_gauge_tensor
n_basis = gauge_basis
dim_N = gauge_dim
dim_C_lower = curvature_jet_dim_bound


def kulkarni(h: SymPairTensor):
    """Kulkarni-Nomizu style extension of h to a curvature-type tensor.

    For h in Sym^(k+2) tensor Sym^2 the result is a (k+4)-linear tensor
    with k derivative slots followed by four curvature slots: two of the
    symmetric slots absorb one index from each antisymmetric pair,

        (x; a, b, c, d) -> h(x, a, c; b, d) - h(x, b, c; a, d)
                           - h(x, a, d; b, c) + h(x, b, d; a, c).
    """
    from .jets import MultiTensor  # local import keeps module layering simple

    space = h.space
    n = space.n
    k = h.k - 2
    if k < 0:
        raise ValueError("need a tensor with at least two symmetric slots")
    out = MultiTensor.zero(space, k + 4)
    for idx in itertools.product(range(n), repeat=k + 4):
        lead = idx[:k]
        a, b, c, d = idx[k:]
        v = (h.get(lead + (a, c), (b, d)) - h.get(lead + (b, c), (a, d))
             - h.get(lead + (a, d), (b, c)) + h.get(lead + (b, d), (a, c)))
        if v:
            out.set(idx, v)
    return out


class PolyEnd:
    """Endomorphism of V with homogeneous polynomial entries.

    Entry (i, j) is the coefficient polynomial of e_i in the image of
    e_j.  Degrees add under composition, so these form the graded
    algebra into which the free generators are substituted.
    """

    __slots__ = ("space", "degree", "entries")

    def __init__(self, space, degree, entries=None):
        self.space = space
        self.degree = degree
        self.entries = {}
        if entries:
            for (i, j), p in entries.items():
                if p.is_zero():
                    continue
                if any(sum(m) != degree for m in p.coeffs):
                    raise ValueError("entry polynomial is not homogeneous of the stated degree")
                self.entries[(i, j)] = p

    @classmethod
    def zero(cls, space, degree):
        return cls(space, degree)

    @classmethod
    def identity(cls, space):
        n = space.n
        return cls(space, 0, {(i, i): Poly.const(n, 1) for i in range(n)})

    def entry(self, i, j) -> Poly:
        return self.entries.get((i, j), Poly.zero(self.space.n))

    def is_zero(self):
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, PolyEnd) and self.space == other.space
                and self.degree == other.degree and self.entries == other.entries)

    def __add__(self, other):
        if other.degree != self.degree and not (self.is_zero() or other.is_zero()):
            raise ValueError("cannot add homogeneous parts of different degrees")
        out = dict(self.entries)
        for key, p in other.entries.items():
            s = out.get(key)
            s = p if s is None else s + p
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        degree = other.degree if self.is_zero() else self.degree
        res = PolyEnd(self.space, degree)
        res.entries = out
        return res

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, factor):
        if not factor:
            return PolyEnd(self.space, self.degree)
        res = PolyEnd(self.space, self.degree)
        res.entries = {key: p.scaled(factor) for key, p in self.entries.items()}
        return res

    def __rmul__(self, factor):
        if isinstance(factor, (int, Fraction)):
            return self.scaled(factor)
        return NotImplemented

    def __mul__(self, other):
        """Composition: (self * other)(v) = self(other(v))."""
        if not isinstance(other, PolyEnd):
            return self.scaled(other)
        n = self.space.n
        out = {}
        for (i, m), p in self.entries.items():
            for (m2, j), q in other.entries.items():
                if m != m2:
                    continue
                prod = p * q
                key = (i, j)
                s = out.get(key)
                s = prod if s is None else s + prod
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        res = PolyEnd(self.space, self.degree + other.degree)
        res.entries = out
        return res

    def eval_matrix(self, xi):
        """Evaluate entries at the point xi; rows indexed by i."""
        n = self.space.n
        return [[self.entry(i, j).eval(xi) for j in range(n)] for i in range(n)]

    def __repr__(self):
        return f"PolyEnd(n={self.space.n}, degree={self.degree}, nnz={len(self.entries)})"


def poly_end_compose(a: PolyEnd, b: PolyEnd) -> PolyEnd:
    return a * b


def pair_to_end(h: SymPairTensor) -> PolyEnd:
    """Raise the pair slot: the endomorphism E with <E(v)x, y> = h(v..v; x, y).

    Entry (a, b) is eps_a times the polynomial v -> h(v,..,v; e_a, e_b).
    """
    space = h.space
    n = space.n
    entries = defaultdict(lambda: Poly.zero(n))
    for (sym, pair), value in h.comps.items():
        mono = content_of(sym, n)
        weight = multiset_count(sym) * value
        p, q = pair
        slots = [(p, q), (q, p)] if p != q else [(p, q)]
        for a, b in slots:
            entries[(a, b)] = entries[(a, b)] + Poly(n, {mono: space.eps(a) * weight})
    return PolyEnd(space, h.k, dict(entries))


def end_to_pair(e: PolyEnd) -> SymPairTensor:
    """Inverse of pair_to_end for self-adjoint endomorphisms."""
    space = e.space
    n = space.n
    k = e.degree
    comps = defaultdict(lambda: Fraction(0))
    for (a, b), p in e.entries.items():
        for mono, c in p.coeffs.items():
            sym = multiset_from_content(mono)
            # undo the arrangement count and the eps factor, then
            # average over the two pair orders for safety
            value = Fraction(space.eps(a) * c, multiset_count(sym))
            comps[(sym, tuple(sorted((a, b))))] += Fraction(value, 2) if a != b else value
    return SymPairTensor(space, k, dict(comps))


@dataclass(frozen=True)
class SignedPerm:
    """The linear map e_j -> signs[j] * e_{perm[j]}."""

    perm: tuple
    signs: tuple

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("not a permutation")
        if len(self.signs) != len(self.perm) or any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be +-1 of matching length")

    def preserves(self, space: Space) -> bool:
        return all(space.eps(self.perm[j]) == space.eps(j) for j in range(space.n))

    def inverse(self):
        n = len(self.perm)
        inv = [0] * n
        for j, image in enumerate(self.perm):
            inv[image] = j
        signs = tuple(self.signs[inv[i]] for i in range(n))
        return SignedPerm(tuple(inv), signs)

    def compose(self, other):
        """self after other."""
        perm = tuple(self.perm[other.perm[j]] for j in range(len(self.perm)))
        signs = tuple(other.signs[j] * self.signs[other.perm[j]] for j in range(len(self.perm)))
        return SignedPerm(perm, signs)


def transform_pair_tensor(h: SymPairTensor, g: SignedPerm) -> SymPairTensor:
    """Pullback action on covariant tensors: (g.h)(x...) = h(g^{-1} x...).

    Equivalently, the component of h at a key moves to the image key
    under g, weighted by the signs of the original indices.
    """
    comps = {}
    for (sym, pair), value in h.comps.items():
        sign = 1
        new_sym = []
        for i in sym:
            sign *= g.signs[i]
            new_sym.append(g.perm[i])
        new_pair = []
        for i in pair:
            sign *= g.signs[i]
            new_pair.append(g.perm[i])
        key = (tuple(sorted(new_sym)), tuple(sorted(new_pair)))
        comps[key] = comps.get(key, 0) + sign * value
    return SymPairTensor(h.space, h.k, comps)


def random_signed_perm(space: Space, rng) -> SignedPerm:
    """A random signed permutation preserving the signature."""
    groups = defaultdict(list)
    for i, s in enumerate(space.signature):
        groups[s].append(i)
    perm = [0] * space.n
    for members in groups.values():
        images = members[:]
        rng.shuffle(images)
        for src, dst in zip(members, images):
            perm[src] = dst
    signs = tuple(rng.choice((1, -1)) for _ in range(space.n))
    return SignedPerm(tuple(perm), signs)
