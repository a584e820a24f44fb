"""Curvature jets: validation, symmetrization, reconstruction, the
Young-symmetrizer action, and jet extension.

A curvature jet of order k over a pseudo-Euclidean space is a list of
dense tensors T_0, ..., T_k, where T_l has l derivative slots followed
by four curvature slots.  T_l plays the role of the l-th covariant
derivative of the curvature tensor at a point, so validity means:

* for frozen derivative slots, the last four slots carry the algebraic
  curvature symmetries (antisymmetry in each pair, pair exchange, first
  Bianchi);
* the differential Bianchi identity holds cyclically over the last
  derivative slot and the first two curvature slots;
* swapping adjacent derivative slots changes T_l by the commutator
  terms built from lower levels (the Ricci identity); the exchange
  defect is computed exactly by ``ricci_defect``.

Linear jet components are the jets of the special form (0, ..., 0, T);
for those the derivative slots are fully symmetric and the only other
constraints are the Bianchi identities.  They are reconstructed from
their total symmetrization by a Kulkarni-Nomizu product, and the
Young symmetrizer of hook shape acts on them by an explicit integer
eigenvalue.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .exactla import RatMatrix, format_rational, nullspace_basis, parse_rational, solve_affine
from .tensor import (
    SignedPerm,
    Space,
    SymPairTensor,
    content_of,
    is_gauge_tensor,
    kulkarni,
    multiset_count,
    sym_indices,
)


class MultiTensor:
    """Dense m-linear form over the space, components in a flat list."""

    __slots__ = ("space", "arity", "data")

    def __init__(self, space, arity, data=None):
        self.space = space
        self.arity = arity
        size = space.n ** arity
        if data is None:
            self.data = [0] * size
        else:
            if len(data) != size:
                raise ValueError("component list has the wrong length")
            self.data = list(data)

    @classmethod
    def zero(cls, space, arity):
        return cls(space, arity)

    def _offset(self, idx):
        off = 0
        n = self.space.n
        for i in idx:
            off = off * n + i
        return off

    def get(self, idx):
        return self.data[self._offset(idx)]

    def set(self, idx, value):
        self.data[self._offset(idx)] = value

    def is_zero(self):
        return not any(self.data)

    def __eq__(self, other):
        return (isinstance(other, MultiTensor) and self.space == other.space
                and self.arity == other.arity
                and all(a == b for a, b in zip(self.data, other.data)))

    def __add__(self, other):
        res = MultiTensor(self.space, self.arity)
        res.data = [a + b for a, b in zip(self.data, other.data)]
        return res

    def __neg__(self):
        res = MultiTensor(self.space, self.arity)
        res.data = [-a for a in self.data]
        return res

    def __sub__(self, other):
        res = MultiTensor(self.space, self.arity)
        res.data = [a - b for a, b in zip(self.data, other.data)]
        return res

    def scaled(self, factor):
        res = MultiTensor(self.space, self.arity)
        res.data = [factor * a if a else 0 for a in self.data]
        return res

    def iter_indices(self):
        return itertools.product(range(self.space.n), repeat=self.arity)

    def permuted(self, sigma):
        """Slot permutation: out[idx] = self[idx composed with sigma]."""
        res = MultiTensor(self.space, self.arity)
        for idx in self.iter_indices():
            v = self.data[self._offset(tuple(idx[s] for s in sigma))]
            if v:
                res.data[self._offset(idx)] = v
        return res

    def swapped(self, s1, s2):
        sigma = list(range(self.arity))
        sigma[s1], sigma[s2] = sigma[s2], sigma[s1]
        return self.permuted(sigma)

    def nonzero_components(self):
        for idx in self.iter_indices():
            v = self.data[self._offset(idx)]
            if v:
                yield idx, v

    def to_json_obj(self):
        return {
            "n": self.space.n,
            "signature": list(self.space.signature),
            "arity": self.arity,
            "components": [
                {"idx": list(idx), "value": format_rational(v)}
                for idx, v in self.nonzero_components()
            ],
        }

    @classmethod
    def from_json_obj(cls, obj):
        space = Space(obj["n"], tuple(obj["signature"]))
        res = cls(space, obj["arity"])
        for entry in obj["components"]:
            idx = tuple(entry["idx"])
            if len(idx) != obj["arity"] or any(not 0 <= i < space.n for i in idx):
                raise ValueError(f"bad component index {idx}")
            res.data[res._offset(idx)] += parse_rational(entry["value"])
        return res

    def __repr__(self):
        return f"MultiTensor(n={self.space.n}, arity={self.arity})"


@dataclass
class Violation:
    """One failed identity, located at the worst offending component."""

    level: int
    identity: str
    slots: tuple
    at: tuple

    def __str__(self):
        slots = "(" + ",".join(str(s) for s in self.slots) + ")"
        return (f"level={self.level} identity={self.identity} "
                f"slots={slots} max_violation_at={list(self.at)}")


def _worst_index(defect: MultiTensor):
    best = None
    best_abs = 0
    for idx, v in defect.nonzero_components():
        a = abs(v)
        if a > best_abs:
            best_abs = a
            best = idx
    return best


class CurvatureJet:
    """Levels T_0..T_k; level l is an (l+4)-linear tensor."""

    __slots__ = ("space", "levels")

    def __init__(self, space, levels):
        self.space = space
        for l, t in enumerate(levels):
            if t.arity != l + 4 or t.space != space:
                raise ValueError(f"level {l} has arity {t.arity}, expected {l + 4}")
        self.levels = list(levels)

    @property
    def order(self):
        return len(self.levels) - 1

    @classmethod
    def zero(cls, space, order):
        return cls(space, [MultiTensor.zero(space, l + 4) for l in range(order + 1)])

    def truncated(self, order):
        if order > self.order:
            raise ValueError("cannot truncate upward")
        return CurvatureJet(self.space, self.levels[:order + 1])

    def __eq__(self, other):
        return (isinstance(other, CurvatureJet) and self.space == other.space
                and len(self.levels) == len(other.levels)
                and all(a == b for a, b in zip(self.levels, other.levels)))

    def to_json_obj(self):
        return {
            "n": self.space.n,
            "signature": list(self.space.signature),
            "order": self.order,
            "levels": [
                {"arity": t.arity, "components": t.to_json_obj()["components"]}
                for t in self.levels
            ],
        }

    @classmethod
    def from_json_obj(cls, obj):
        space = Space(obj["n"], tuple(obj["signature"]))
        levels = []
        for l, lv in enumerate(obj["levels"]):
            if lv["arity"] != l + 4:
                raise ValueError(f"level {l} has arity {lv['arity']}, expected {l + 4}")
            levels.append(MultiTensor.from_json_obj({
                "n": obj["n"], "signature": obj["signature"],
                "arity": lv["arity"], "components": lv["components"],
            }))
        if len(levels) != obj["order"] + 1:
            raise ValueError("order does not match the number of levels")
        return cls(space, levels)

    def __repr__(self):
        return f"CurvatureJet(n={self.space.n}, order={self.order})"


class SymJet:
    """Symmetrized jet: level l is an element of Sym^(l+2) tensor Sym^2."""

    __slots__ = ("space", "levels")

    def __init__(self, space, levels):
        self.space = space
        for l, s in enumerate(levels):
            if s.k != l + 2 or s.space != space:
                raise ValueError(f"level {l} has degree {s.k}, expected {l + 2}")
        self.levels = list(levels)

    @property
    def order(self):
        return len(self.levels) - 1

    @classmethod
    def zero(cls, space, order):
        return cls(space, [SymPairTensor.zero(space, l + 2) for l in range(order + 1)])

    def __eq__(self, other):
        return (isinstance(other, SymJet) and self.space == other.space
                and len(self.levels) == len(other.levels)
                and all(a == b for a, b in zip(self.levels, other.levels)))

    def to_json_obj(self):
        return {
            "n": self.space.n,
            "signature": list(self.space.signature),
            "order": self.order,
            "levels": [
                {"degree": s.k, "components": s.to_json_obj()["components"]}
                for s in self.levels
            ],
        }

    @classmethod
    def from_json_obj(cls, obj):
        space = Space(obj["n"], tuple(obj["signature"]))
        levels = []
        for l, lv in enumerate(obj["levels"]):
            if lv["degree"] != l + 2:
                raise ValueError(f"level {l} has degree {lv['degree']}, expected {l + 2}")
            levels.append(SymPairTensor.from_json_obj({
                "n": obj["n"], "signature": obj["signature"],
                "k": lv["degree"], "components": lv["components"],
            }))
        if len(levels) != obj["order"] + 1:
            raise ValueError("order does not match the number of levels")
        return cls(space, levels)

    def __repr__(self):
        return f"SymJet(n={self.space.n}, order={self.order})"


@dataclass
class LinearJetComponent:
    """Top tensor of a jet of the form (0, ..., 0, T)."""

    space: Space
    k: int
    tensor: MultiTensor

    def __post_init__(self):
        if self.tensor.arity != self.k + 4:
            raise ValueError("tensor arity does not match k")


# ---------------------------------------------------------------------------
# validation


def _curvature_block_violations(t: MultiTensor, level: int):
    """Symmetry checks on the last four slots, derivative slots frozen."""
    k = t.arity - 4
    out = []

    def check(defect, identity, slots):
        if not defect.is_zero():
            out.append(Violation(level, identity, slots, _worst_index(defect)))

    check(t + t.swapped(k, k + 1), "antisymmetry", (k + 1, k + 2))
    check(t + t.swapped(k + 2, k + 3), "antisymmetry", (k + 3, k + 4))
    sigma = list(range(t.arity))
    sigma[k], sigma[k + 1], sigma[k + 2], sigma[k + 3] = sigma[k + 2], sigma[k + 3], sigma[k], sigma[k + 1]
    check(t - t.permuted(sigma), "pair_symmetry", (k + 1, k + 3))
    cyc = list(range(t.arity))
    cyc[k], cyc[k + 1], cyc[k + 2] = cyc[k + 1], cyc[k + 2], cyc[k]
    cyc2 = list(range(t.arity))
    cyc2[k], cyc2[k + 1], cyc2[k + 2] = cyc2[k + 2], cyc2[k], cyc2[k + 1]
    check(t + t.permuted(cyc) + t.permuted(cyc2), "bianchi1", (k + 1, k + 2, k + 3))
    return out


def validate_curvature(t: MultiTensor):
    """Violations of the algebraic curvature symmetries of a 4-tensor."""
    if t.arity != 4:
        raise ValueError("curvature tensors have four slots")
    return _curvature_block_violations(t, 0)


def derivation_apply(form: MultiTensor, target: MultiTensor) -> MultiTensor:
    """Action of the operator of a bilinear form on all slots of a tensor.

    ``form`` is a bilinear form A(z, w); the associated endomorphism is
    (A z)_m = eps_m A(z, e_m).  Acting as a derivation on an m-linear
    tensor U gives (A.U)(u_1, ..., u_m) = -sum_s U(..., A u_s, ...).
    """
    space = target.space
    n = space.n
    out = MultiTensor.zero(space, target.arity)
    for idx, v in target.nonzero_components():
        for s in range(target.arity):
            js = idx[s]
            for m in range(n):
                a = form.get((m, js))
                if a:
                    # scatter: U's component idx contributes to the output
                    # at idx with slot s moved to m, weighted by (A e_js)_m
                    new = idx[:s] + (m,) + idx[s + 1:]
                    out.data[out._offset(new)] -= space.eps(js) * a * v
    return out


def ricci_defect(jet: "CurvatureJet", level: int, i: int) -> MultiTensor:
    """Exchange defect of derivative slots (i, i+1) at the given level.

    Slots are 1-based among the ``level`` derivative slots, so
    1 <= i <= level-1.  The defect is

        T(.., x_i, x_{i+1}, ..) - T(.., x_{i+1}, x_i, ..)
        - sum over splittings of the first i-1 slots into I and J of
          the curvature operator of (level |I|, slots v_I, x_i, x_{i+1})
          acting as a derivation on the level (|J| + q) tensor holding
          the remaining slots, q = level - i - 1.

    Vanishes identically on jets of metrics.
    """
    if not 1 <= i <= level - 1:
        raise ValueError("need 1 <= i <= level-1")
    space = jet.space
    n = space.n
    t = jet.levels[level]
    lhs = t - t.swapped(i - 1, i)

    p = i - 1
    q = level - i - 1
    rhs = MultiTensor.zero(space, level + 4)
    prefix_positions = list(range(p))
    for idx in itertools.product(range(n), repeat=level + 4):
        prefix = idx[:p]
        xi, xj = idx[p], idx[p + 1]
        tail = idx[p + 2:]
        total = 0
        for r in range(p + 1):
            for subset in itertools.combinations(prefix_positions, r):
                in_subset = set(subset)
                v_i = tuple(prefix[s] for s in subset)
                v_j = tuple(prefix[s] for s in prefix_positions if s not in in_subset)
                a_level = jet.levels[r]
                u_level = jet.levels[len(v_j) + q]
                # derivation action on the q + 4 free slots of u_level,
                # with the v_j block frozen
                base = v_j + tail
                for s in range(q + 4):
                    pos = len(v_j) + s
                    js = base[pos]
                    for m in range(n):
                        a = a_level.get(v_i + (xi, xj, js, m))
                        if a:
                            new = base[:pos] + (m,) + base[pos + 1:]
                            total -= space.eps(m) * a * u_level.get(new)
        if total:
            rhs.set(idx, total)
    return lhs - rhs


def validate_jet(jet: "CurvatureJet"):
    """All violations of the jet identities, empty when the jet is valid."""
    out = []
    for level, t in enumerate(jet.levels):
        out.extend(_curvature_block_violations(t, level))
        if level >= 1:
            cyc = list(range(t.arity))
            a, b, c = level - 1, level, level + 1
            cyc[a], cyc[b], cyc[c] = cyc[b], cyc[c], cyc[a]
            cyc2 = list(range(t.arity))
            cyc2[a], cyc2[b], cyc2[c] = cyc2[c], cyc2[a], cyc2[b]
            defect = t + t.permuted(cyc) + t.permuted(cyc2)
            if not defect.is_zero():
                out.append(Violation(level, "bianchi2", (level, level + 1, level + 2),
                                     _worst_index(defect)))
        for i in range(1, level):
            defect = ricci_defect(jet, level, i)
            if not defect.is_zero():
                out.append(Violation(level, "ricci", (i, i + 1), _worst_index(defect)))
    return out


def validate_linear_component(c: LinearJetComponent):
    """Violations for a linear jet component (0,...,0,T)."""
    t = c.tensor
    k = c.k
    out = _curvature_block_violations(t, k)
    for i in range(k - 1):
        defect = t - t.swapped(i, i + 1)
        if not defect.is_zero():
            out.append(Violation(k, "ricci", (i + 1, i + 2), _worst_index(defect)))
    if k >= 1:
        cyc = list(range(t.arity))
        a, b, c3 = k - 1, k, k + 1
        cyc[a], cyc[b], cyc[c3] = cyc[b], cyc[c3], cyc[a]
        cyc2 = list(range(t.arity))
        cyc2[a], cyc2[b], cyc2[c3] = cyc2[c3], cyc2[a], cyc2[b]
        defect = t + t.permuted(cyc) + t.permuted(cyc2)
        if not defect.is_zero():
            out.append(Violation(k, "bianchi2", (k, k + 1, k + 2), _worst_index(defect)))
    return out


# ---------------------------------------------------------------------------
# symmetrization and reconstruction


def _symmetrize_level(t: MultiTensor, level: int) -> SymPairTensor:
    """Total symmetrization of a jet level into Sym^(l+2) tensor Sym^2.

    The symmetric slots collect the derivative slots plus curvature
    slots 2 and 3; the pair keeps curvature slots 1 and 4.
    """
    space = t.space
    n = space.n
    m = level + 2
    comps = {}
    for sym in sym_indices(n, m):
        arrangements = sorted(set(itertools.permutations(sym)))
        for pair in sym_indices(n, 2):
            p, q = pair
            total = 0
            for arr in arrangements:
                idx = arr[:level] + (p,) + arr[level:] + (q,)
                idx_t = arr[:level] + (q,) + arr[level:] + (p,)
                total += t.get(idx) + t.get(idx_t)
            if total:
                # average over distinct arrangements and the pair order
                comps[(sym, pair)] = Fraction(total, 2 * len(arrangements))
    return SymPairTensor(space, m, comps)


def symmetrize_jet(jet: CurvatureJet, validate: bool = True) -> SymJet:
    """Symmetrized jet; raises on an invalid input jet."""
    if validate:
        violations = validate_jet(jet)
        if violations:
            raise ValueError("invalid jet: " + "; ".join(str(v) for v in violations))
    return SymJet(jet.space,
                  [_symmetrize_level(t, l) for l, t in enumerate(jet.levels)])


def symmetrize_component(c: LinearJetComponent) -> SymPairTensor:
    return _symmetrize_level(c.tensor, c.k)


def reconstruct_linear(s: SymPairTensor) -> LinearJetComponent:
    """Linear jet component whose symmetrization is s.

    Requires s in the gauge space; the component is
    -(k+1)/(k+3) times the Kulkarni-Nomizu extension of s.
    """
    k = s.k - 2
    if k < 0:
        raise ValueError("need a tensor of degree at least 2")
    if not is_gauge_tensor(s):
        raise ValueError("input is not a gauge tensor")
    tensor = kulkarni(s).scaled(Fraction(-(k + 1), k + 3))
    return LinearJetComponent(s.space, k, tensor)


# ---------------------------------------------------------------------------
# Young symmetrizer


def _sym_sum(t: MultiTensor, slots):
    """Sum of t over all permutations of the given slots (no averaging)."""
    res = t
    for m in range(1, len(slots)):
        acc = res
        for j in range(m):
            acc = acc + res.swapped(slots[j], slots[m])
        res = acc
    return res


def hook_constant(k: int) -> int:
    """Eigenvalue of the Young symmetrizer on linear jet components."""
    return 2 * (k + 3) * (k + 2) * factorial(k)


def young_symmetrize(t: MultiTensor) -> MultiTensor:
    """Young symmetrizer of shape (k+2, 2) acting on a (k+4)-tensor.

    The first row holds curvature slots 1 and 3 and all derivative
    slots; the second row holds curvature slots 2 and 4.  Rows are
    symmetrized (summed, not averaged), then the two columns are
    antisymmetrized.  On a linear jet component of order k this acts by
    hook_constant(k).
    """
    k = t.arity - 4
    if k < 0:
        raise ValueError("need at least four slots")
    c1, c2, c3, c4 = k, k + 1, k + 2, k + 3
    row1 = [c1, c3] + list(range(k))
    row2 = [c2, c4]
    sym = _sym_sum(_sym_sum(t, row2), row1)
    out = sym - sym.swapped(c1, c2) - sym.swapped(c3, c4)
    out = out + sym.swapped(c1, c2).swapped(c3, c4)
    return out


# ---------------------------------------------------------------------------
# linear jet space basis


def _canonical_curvature_index(idx, k):
    """Canonical form of an index tuple under the curvature symmetries.

    Derivative slots are sorted (linear components are symmetric
    there); the four curvature slots run over their eight-element sign
    group.  Returns (canonical_tuple, sign) or None when the orbit
    forces the component to zero.
    """
    lead = tuple(sorted(idx[:k]))
    a, b, c, d = idx[k:]
    seen = {}
    for (p, q, s1) in ((a, b, 1), (b, a, -1)):
        for (r, t, s2) in ((c, d, 1), (d, c, -1)):
            sign = s1 * s2
            for blocks in ((p, q, r, t), (r, t, p, q)):
                cand = lead + blocks
                prev = seen.get(cand)
                if prev is None:
                    seen[cand] = sign
                elif prev != sign:
                    return None
    best = min(seen)
    return best, seen[best]


def _normalize_row(terms):
    """Scale an integer row to a canonical form for deduplication."""
    items = sorted(terms.items())
    g = 0
    for _, c in items:
        g = gcd_int(g, c)
    if g == 0:
        return None
    first = next(c for _, c in items if c)
    if first < 0:
        g = -g
    return tuple((key, c // g) for key, c in items)


def gcd_int(a, b):
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


def linear_jet_basis(space: Space, k: int):
    """Deterministic basis of the order-k linear jet components.

    Components are canonicalized under the curvature sign group and
    derivative-slot symmetry; the Bianchi identities become integer
    constraint rows, split into blocks of fixed index content.
    """
    n = space.n
    arity = k + 4

    classes_by_content = defaultdict(list)
    seen_classes = set()
    canon_cache = {}
    for idx in itertools.product(range(n), repeat=arity):
        res = _canonical_curvature_index(idx, k)
        canon_cache[idx] = res
        if res is None:
            continue
        canon, _ = res
        if canon not in seen_classes:
            seen_classes.add(canon)
            classes_by_content[content_of(canon, n)].append(canon)
    for lst in classes_by_content.values():
        lst.sort()

    rows_by_content = defaultdict(set)

    def add_row(index_sign_terms):
        terms = defaultdict(int)
        for idx, coeff in index_sign_terms:
            res = canon_cache[idx]
            if res is None:
                continue
            canon, sign = res
            terms[canon] += sign * coeff
        terms = {key: c for key, c in terms.items() if c}
        if not terms:
            return
        row = _normalize_row(terms)
        if row is not None:
            cont = content_of(next(iter(terms)), n)
            rows_by_content[cont].add(row)

    for idx in itertools.product(range(n), repeat=arity):
        lead = idx[:k]
        a, b, c, d = idx[k:]
        add_row([(lead + (a, b, c, d), 1),
                 (lead + (b, c, a, d), 1),
                 (lead + (c, a, b, d), 1)])
        if k >= 1:
            x1 = idx[k - 1]
            rest = idx[:k - 1]
            add_row([(rest + (x1, a, b, c, d), 1),
                     (rest + (a, b, x1, c, d), 1),
                     (rest + (b, x1, a, c, d), 1)])

    basis = []
    for cont in sorted(classes_by_content):
        cols = classes_by_content[cont]
        col_index = {key: i for i, key in enumerate(cols)}
        rows = sorted(rows_by_content.get(cont, ()))
        if rows:
            mat_rows = []
            for row in rows:
                vec = [Fraction(0)] * len(cols)
                for key, coeff in row:
                    vec[col_index[key]] = Fraction(coeff)
                mat_rows.append(vec)
            vectors = nullspace_basis(RatMatrix.from_rows(mat_rows))
        else:
            vectors = [[Fraction(1) if i == j else Fraction(0) for i in range(len(cols))]
                       for j in range(len(cols))]
        for vec in vectors:
            tensor = MultiTensor.zero(space, arity)
            for idx in tensor.iter_indices():
                res = canon_cache[idx]
                if res is None:
                    continue
                canon, sign = res
                ci = col_index.get(canon)
                if ci is not None and vec[ci]:
                    tensor.set(idx, sign * vec[ci])
            basis.append(LinearJetComponent(space, k, tensor))
    return basis


# short name: C is the linear span of components at one jet level
c_basis = linear_jet_basis


def component_span_solve(t: MultiTensor, basis):
    """Coordinates of t in the span of basis components, or None.

    Exploits that every basis element produced here is supported on a
    single index content, so the solve splits into small blocks.
    """
    if not basis:
        return [] if t.is_zero() else None
    n = t.space.n

    basis_by_content = defaultdict(list)
    for bi, b in enumerate(basis):
        contents = {content_of(idx, n) for idx, _ in b.tensor.nonzero_components()}
        if len(contents) != 1:
            raise ValueError("basis element is not content-homogeneous")
        basis_by_content[contents.pop()].append(bi)

    target_by_content = defaultdict(list)
    for idx, v in t.nonzero_components():
        target_by_content[content_of(idx, n)].append(idx)

    coords = [Fraction(0)] * len(basis)
    for cont in sorted(set(basis_by_content) | set(target_by_content)):
        members = basis_by_content.get(cont, [])
        if not members:
            # nothing spans this content, so t must vanish there
            return None
        support = set(target_by_content.get(cont, ()))
        for bi in members:
            support.update(idx for idx, _ in basis[bi].tensor.nonzero_components())
        support = sorted(support)
        rows = [[Fraction(basis[bi].tensor.get(idx)) for bi in members] for idx in support]
        rhs = [Fraction(t.get(idx)) for idx in support]
        x = solve_affine(RatMatrix.from_rows(rows), rhs)
        if x is None:
            return None
        for bi, value in zip(members, x):
            coords[bi] = value
    return coords


# ---------------------------------------------------------------------------
# conversion and extension


def jet_from_symjet(s: SymJet) -> CurvatureJet:
    """Curvature jet with the given symmetrization.

    Goes through the metric: build the normal-coordinate metric whose
    Taylor coefficients are generated by s, then differentiate its
    curvature at the origin.
    """
    from . import metriclab

    g = metriclab.metric_from_symjet(s)
    return metriclab.curvature_jet_at_origin(g, s.order)


def extend_jet(jet: CurvatureJet, validate: bool = True) -> CurvatureJet:
    """Extend a valid jet by one order.

    The canonical extension symmetrizes, pads with a zero top level, and
    rebuilds through the metric; the lower levels are reproduced
    exactly.
    """
    if validate:
        violations = validate_jet(jet)
        if violations:
            raise ValueError("invalid jet: " + "; ".join(str(v) for v in violations))
    s = symmetrize_jet(jet, validate=False)
    padded = SymJet(jet.space,
                    s.levels + [SymPairTensor.zero(jet.space, jet.order + 3)])
    return jet_from_symjet(padded)


def _canonical_jet_index(idx, k):
    """Like _canonical_curvature_index but without sorting derivative slots."""
    lead = idx[:k]
    a, b, c, d = idx[k:]
    seen = {}
    for (p, q, s1) in ((a, b, 1), (b, a, -1)):
        for (r, t, s2) in ((c, d, 1), (d, c, -1)):
            sign = s1 * s2
            for blocks in ((p, q, r, t), (r, t, p, q)):
                cand = lead + blocks
                prev = seen.get(cand)
                if prev is None:
                    seen[cand] = sign
                elif prev != sign:
                    return None
    best = min(seen)
    return best, seen[best]


def extend_jet_by_solve(jet: CurvatureJet, validate: bool = True) -> CurvatureJet:
    """Extend a valid jet by solving the top-level identity system.

    The unknown top tensor satisfies inhomogeneous Ricci identities
    (right sides from the lower levels) plus the Bianchi and curvature
    symmetries; any exact solution is a valid extension.  Solutions
    form an affine space modulo linear jet components; the free
    coordinates are set to zero, so the result is deterministic but
    will generally differ from ``extend_jet`` by a linear component.
    """
    if validate:
        violations = validate_jet(jet)
        if violations:
            raise ValueError("invalid jet: " + "; ".join(str(v) for v in violations))
    space = jet.space
    n = space.n
    k1 = jet.order + 1
    arity = k1 + 4

    canon_cache = {}
    classes_by_content = defaultdict(list)
    seen_classes = set()
    for idx in itertools.product(range(n), repeat=arity):
        res = _canonical_jet_index(idx, k1)
        canon_cache[idx] = res
        if res is None:
            continue
        canon, _ = res
        if canon not in seen_classes:
            seen_classes.add(canon)
            classes_by_content[content_of(canon, n)].append(canon)
    for lst in classes_by_content.values():
        lst.sort()

    rows_by_content = defaultdict(set)

    def add_row(index_sign_terms, rhs):
        terms = defaultdict(int)
        for idx, coeff in index_sign_terms:
            res = canon_cache[idx]
            if res is None:
                continue
            canon, sign = res
            terms[canon] += sign * coeff
        terms = {key: c for key, c in terms.items() if c}
        if not terms:
            if rhs:
                raise ArithmeticError("inconsistent forced-zero constraint")
            return
        items = tuple(sorted(terms.items()))
        cont = content_of(items[0][0], n)
        rows_by_content[cont].add((items, Fraction(rhs)))

    # Ricci identities with right-hand sides from the lower levels.
    # The defect formula only reads levels <= k1 - 2, all known.
    padded = CurvatureJet(space, jet.levels + [MultiTensor.zero(space, arity)])
    for i in range(1, k1):
        rhs_tensor = ricci_defect(padded, k1, i).scaled(-1)
        # defect = (T - T.swap) - rhs_of_lower_levels = -rhs here, so the
        # constraint on the unknown T is T - T.swap = -defect
        for idx in itertools.product(range(n), repeat=arity):
            swapped = idx[:i - 1] + (idx[i], idx[i - 1]) + idx[i + 1:]
            if swapped <= idx:
                continue
            add_row([(idx, 1), (swapped, -1)], rhs_tensor.get(idx))

    for idx in itertools.product(range(n), repeat=arity):
        lead = idx[:k1]
        a, b, c, d = idx[k1:]
        add_row([(lead + (a, b, c, d), 1),
                 (lead + (b, c, a, d), 1),
                 (lead + (c, a, b, d), 1)], 0)
        x1 = lead[-1]
        rest = lead[:-1]
        add_row([(rest + (x1, a, b, c, d), 1),
                 (rest + (a, b, x1, c, d), 1),
                 (rest + (b, x1, a, c, d), 1)], 0)

    solution = {}
    for cont in sorted(classes_by_content):
        cols = classes_by_content[cont]
        col_index = {key: i for i, key in enumerate(cols)}
        constraints = sorted(rows_by_content.get(cont, ()))
        if not constraints:
            for key in cols:
                solution[key] = Fraction(0)
            continue
        mat_rows = []
        rhs = []
        for items, r in constraints:
            vec = [Fraction(0)] * len(cols)
            for key, coeff in items:
                vec[col_index[key]] = Fraction(coeff)
            mat_rows.append(vec)
            rhs.append(r)
        x = solve_affine(RatMatrix.from_rows(mat_rows), rhs)
        if x is None:
            raise ArithmeticError("extension system is inconsistent")
        for key, value in zip(cols, x):
            solution[key] = value

    top = MultiTensor.zero(space, arity)
    for idx in top.iter_indices():
        res = canon_cache[idx]
        if res is None:
            continue
        canon, sign = res
        v = solution.get(canon, Fraction(0))
        if v:
            top.set(idx, sign * v)
    return CurvatureJet(space, jet.levels + [top])


# ---------------------------------------------------------------------------
# equivariance helpers


def transform_multi_tensor(t: MultiTensor, g: SignedPerm) -> MultiTensor:
    """Pullback action (g.t)(x...) = t(g^{-1} x...).

    Equivalently, the component of t at idx lands at g(idx) carrying
    the product of the signs of idx.
    """
    out = MultiTensor.zero(t.space, t.arity)
    for idx, v in t.nonzero_components():
        sign = 1
        new = []
        for i in idx:
            new.append(g.perm[i])
            sign *= g.signs[i]
        out.set(tuple(new), sign * v)
    return out


def transform_jet(jet: CurvatureJet, g: SignedPerm) -> CurvatureJet:
    return CurvatureJet(jet.space, [transform_multi_tensor(t, g) for t in jet.levels])


def transform_symjet(s: SymJet, g: SignedPerm) -> SymJet:
    from .tensor import transform_pair_tensor

    return SymJet(s.space, [transform_pair_tensor(h, g) for h in s.levels])
