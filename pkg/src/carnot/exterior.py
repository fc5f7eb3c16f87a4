"""Exterior algebra over the adapted dual basis, with the weight bigrading.

Covectors are sparse combinations of monomials theta_{j1}^...^theta_{jh}
indexed by strictly increasing tuples (0-based).  The adapted basis is
declared orthonormal, so the inner product is the coefficient dot product
and duality needs no separate metric object.  The differential on
left-invariant forms sends theta_k to minus the sum of c_{ij}^k
theta_i^theta_j and extends by the Leibniz rule; it never changes the
weight of a form.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .linalg import Q, ZERO


class Covector:
    """Element of the exterior algebra on the dual basis.

    terms maps strictly increasing index tuples to nonzero rationals;
    degree is carried explicitly so the zero covector stays graded.
    """

    __slots__ = ("degree", "terms")

    def __init__(self, degree, terms=None):
        self.degree = degree
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = Q(c)
                if c:
                    clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def basis(cls, mono):
        mono = tuple(mono)
        if any(a >= b for a, b in zip(mono, mono[1:])):
            raise ValueError("basis monomial indices must be strictly increasing")
        return cls(len(mono), {mono: Q(1)})

    @classmethod
    def theta(cls, j):
        """The 1-covector theta_j, 1-based to match the usual notation."""
        return cls.basis((j - 1,))

    @classmethod
    def zero(cls, degree=0):
        return cls(degree, {})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add covectors of different degree")
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            acc = terms.get(mono, ZERO) + c
            if acc:
                terms[mono] = acc
            else:
                terms.pop(mono, None)
        return Covector(self.degree, terms)

    def __neg__(self):
        return Covector(self.degree, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Q(c)
        if not c:
            return Covector(self.degree, {})
        return Covector(self.degree, {m: c * v for m, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, Covector) and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.terms.items()))))

    def __repr__(self):
        return "Covector(%s)" % covector_str(self)


def merge_monomials(a, b):
    """Wedge of two sorted index tuples: (sign, merged) or None if they meet."""
    if set(a) & set(b):
        return None
    merged = a + b
    arr = list(merged)
    sign = 1
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1] > arr[j]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(arr)


def wedge(x, y):
    """Exterior product; degree adds, signs by permutation parity."""
    terms = {}
    for ma, ca in x.terms.items():
        for mb, cb in y.terms.items():
            merged = merge_monomials(ma, mb)
            if merged is None:
                continue
            sign, mono = merged
            acc = terms.get(mono, ZERO) + sign * ca * cb
            if acc:
                terms[mono] = acc
            else:
                terms.pop(mono, None)
    return Covector(x.degree + y.degree, terms)


def monomial_weight(alg, mono):
    return sum(alg.weight_of[j] for j in mono)


@dataclass
class MixedWeight:
    """Weight decomposition of a covector that is not of pure weight."""
    components: dict  # weight -> Covector

    def weights(self):
        return sorted(self.components)


def weight_split(alg, x):
    """Decompose a covector into its pure-weight parts: {weight: Covector}."""
    parts = {}
    for mono, c in x.terms.items():
        w = monomial_weight(alg, mono)
        parts.setdefault(w, {})[mono] = c
    return {w: Covector(x.degree, t) for w, t in sorted(parts.items())}


def weight(alg, x):
    """Pure weight of x, or a MixedWeight carrying the decomposition.

    Zero covectors and 0-covectors (scalars) have weight 0.
    """
    split = weight_split(alg, x)
    if not split:
        return 0
    if len(split) == 1:
        return next(iter(split))
    return MixedWeight(split)


def inner_product(x, y):
    """The inner product making the monomial basis orthonormal."""
    if x.degree != y.degree:
        return ZERO
    small, big = (x.terms, y.terms) if len(x.terms) <= len(y.terms) else (y.terms, x.terms)
    acc = ZERO
    for mono, c in small.items():
        other = big.get(mono)
        if other:
            acc += c * other
    return acc


@lru_cache(maxsize=None)
def _ce_on_theta(alg, k):
    """d(theta_k) = -sum_{i<j} c_{ij}^k theta_i ^ theta_j."""
    terms = {}
    for (i, j), comps in alg.brackets.items():
        c = comps.get(k)
        if c:
            terms[(i, j)] = -c
    return Covector(2, terms)


def ce_differential(alg, x):
    """The differential on left-invariant forms, extended by Leibniz.

    Preserves the weight of pure-weight covectors and squares to zero;
    both facts are equivalent to the grading and the Jacobi identity.
    """
    out = Covector(x.degree + 1, {})
    for mono, c in x.terms.items():
        for pos, j in enumerate(mono):
            dj = _ce_on_theta(alg, j)
            if dj.is_zero():
                continue
            rest = mono[:pos] + mono[pos + 1:]
            sign = -1 if pos % 2 else 1
            # a 2-covector commutes past 1-covectors, so pull d(theta_j) front
            contrib = wedge(dj, Covector.basis(rest))
            out = out + contrib.scale(sign * c)
    return out


@dataclass
class WeightBlock:
    """Enumerated basis of the weight-a part of the h-covectors, h = a + b."""
    a: int
    b: int
    basis: list  # of index tuples, lexicographic

    @property
    def degree(self):
        return self.a + self.b


@lru_cache(maxsize=None)
def covector_basis(alg, h):
    """All degree-h basis monomials in lexicographic order."""
    if h < 0 or h > alg.n:
        return ()
    return tuple(combinations(range(alg.n), h))


@lru_cache(maxsize=None)
def weight_blocks(alg, h):
    """The weight decomposition of the h-covectors: {a: WeightBlock}."""
    blocks = {}
    for mono in covector_basis(alg, h):
        blocks.setdefault(monomial_weight(alg, mono), []).append(mono)
    return {a: WeightBlock(a, h - a, monos) for a, monos in sorted(blocks.items())}


@lru_cache(maxsize=None)
def block_basis(alg, a, h):
    """Basis monomials of degree h and weight a (possibly empty)."""
    block = weight_blocks(alg, h).get(a)
    return tuple(block.basis) if block else ()


def covector_str(x):
    """Deterministic pretty form, e.g. '-1 * t1^t2 + 1/2 * t3'."""
    if x.is_zero():
        return "0"
    parts = []
    for mono in sorted(x.terms):
        c = x.terms[mono]
        label = "^".join("t%d" % (j + 1) for j in mono) if mono else "1"
        parts.append("%s * %s" % (c, label))
    return " + ".join(parts)
