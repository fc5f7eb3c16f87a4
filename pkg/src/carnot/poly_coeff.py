"""Polynomial coefficients and the left-invariant frame.

Coordinates are exponential coordinates of the first kind.  The group
product is the Baker-Campbell-Hausdorff series truncated at the step of
the algebra (all higher terms vanish by nilpotency); it is computed from
the structure constants alone, by taking log(exp(A)exp(B)) in the free
truncated tensor algebra on two letters and projecting each word onto
nested brackets (the Dynkin idempotent), so no bracket table is ever
transcribed by hand.  Left-invariant vector fields are the y-partials of
the product at y = 0; their polynomial components are homogeneous for the
group dilations and the frame matrix is unitriangular along the weights.
"""

from functools import lru_cache
from math import factorial

from .linalg import Q, ZERO

BCH_MAX_ORDER = 9


class StepOverflowError(ValueError):
    """Algebra step exceeds the supported truncation order of the product."""


class PolyScalar:
    """Sparse polynomial with rational coefficients.

    terms maps exponent tuples (length nvars) to nonzero rationals.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for expv, c in terms.items():
                c = Q(c)
                if c:
                    clean[tuple(expv)] = c
        self.terms = clean

    @classmethod
    def constant(cls, nvars, c):
        return cls(nvars, {(0,) * nvars: Q(c)})

    @classmethod
    def variable(cls, nvars, index):
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): Q(1)})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, PolyScalar) and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.terms.items()))))

    def __add__(self, other):
        if isinstance(other, PolyScalar):
            terms = dict(self.terms)
            for expv, c in other.terms.items():
                acc = terms.get(expv, ZERO) + c
                if acc:
                    terms[expv] = acc
                else:
                    terms.pop(expv, None)
            return PolyScalar(self.nvars, terms)
        return self + PolyScalar.constant(self.nvars, other)

    __radd__ = __add__

    def __neg__(self):
        return PolyScalar(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, PolyScalar) else PolyScalar.constant(self.nvars, -Q(other)))

    def __mul__(self, other):
        if not isinstance(other, PolyScalar):
            c = Q(other)
            if not c:
                return PolyScalar(self.nvars)
            return PolyScalar(self.nvars, {e: c * v for e, v in self.terms.items()})
        terms = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                acc = terms.get(key, ZERO) + ca * cb
                if acc:
                    terms[key] = acc
                else:
                    terms.pop(key, None)
        return PolyScalar(self.nvars, terms)

    __rmul__ = __mul__

    def partial(self, index):
        terms = {}
        for expv, c in self.terms.items():
            e = expv[index]
            if e:
                key = expv[:index] + (e - 1,) + expv[index + 1:]
                terms[key] = terms.get(key, ZERO) + e * c
        return PolyScalar(self.nvars, terms)

    def subs(self, values):
        """Substitute values[i] (PolyScalars over a common ring) for x_i."""
        nvars = values[0].nvars if values else self.nvars
        out = PolyScalar(nvars)
        for expv, c in self.terms.items():
            term = PolyScalar.constant(nvars, c)
            for i, e in enumerate(expv):
                for _ in range(e):
                    term = term * values[i]
            out = out + term
        return out

    def weighted_degree(self, weights):
        """Common weighted degree of all terms, or None if mixed/zero."""
        degs = {sum(e * w for e, w in zip(expv, weights)) for expv in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return None

    def weighted_components(self, weights):
        comps = {}
        for expv, c in self.terms.items():
            d = sum(e * w for e, w in zip(expv, weights))
            comps.setdefault(d, {})[expv] = c
        return {d: PolyScalar(self.nvars, t) for d, t in sorted(comps.items())}

    def __repr__(self):
        return "PolyScalar(%s)" % poly_str(self)


def poly_str(p, names=None):
    """Deterministic pretty form, e.g. '3/2*x1^2*x3 + 1'."""
    if p.is_zero():
        return "0"
    parts = []
    for expv in sorted(p.terms):
        c = p.terms[expv]
        factors = []
        for i, e in enumerate(expv):
            if e:
                name = names[i] if names else "x%d" % (i + 1)
                factors.append(name if e == 1 else "%s^%d" % (name, e))
        if factors:
            parts.append("%s*%s" % (c, "*".join(factors)))
        else:
            parts.append(str(c))
    return " + ".join(parts)


def _word_series_product(a, b, order):
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            if len(w) > order:
                continue
            acc = out.get(w, ZERO) + ca * cb
            if acc:
                out[w] = acc
            else:
                out.pop(w, None)
    return out


def _log_of_product_series(order):
    """log(exp(A)exp(B)) in the free tensor algebra, words up to the order.

    Words are tuples over {0, 1}; exp(A)exp(B) has coefficient
    1/(a! b!) on the word A^a B^b, and log(1 + u) is the alternating
    geometric series, truncated (u has no constant term).
    """
    u = {}
    for a in range(order + 1):
        for b in range(order + 1 - a):
            if a + b == 0:
                continue
            u[(0,) * a + (1,) * b] = Q(1, factorial(a) * factorial(b))
    result = {}
    power = dict(u)
    sign = 1
    for k in range(1, order + 1):
        coeff = Q(sign, k)
        for w, c in power.items():
            acc = result.get(w, ZERO) + coeff * c
            if acc:
                result[w] = acc
            else:
                result.pop(w, None)
        power = _word_series_product(power, u, order)
        sign = -sign
    return result


class GroupLaw:
    """The polynomial product map of the group in exponential coordinates.

    components[m] is (x*y)_{m+1} as a polynomial in the 2n variables
    (x_1..x_n, y_1..y_n).
    """

    def __init__(self, alg, components):
        self.alg = alg
        self.components = tuple(components)

    def product(self, x_polys, y_polys):
        """Substitute coordinate vectors (PolyScalars) into the law."""
        values = list(x_polys) + list(y_polys)
        return [z.subs(values) for z in self.components]

    def __repr__(self):
        return "GroupLaw(%s)" % self.alg.name


@lru_cache(maxsize=None)
def group_law(alg):
    """BCH product truncated at the step; exact and associative."""
    if alg.s > BCH_MAX_ORDER:
        raise StepOverflowError(
            "step %d exceeds the supported truncation order %d" % (alg.s, BCH_MAX_ORDER))
    n = alg.n
    nvars = 2 * n
    xs = [PolyScalar.variable(nvars, i) for i in range(n)]
    ys = [PolyScalar.variable(nvars, n + i) for i in range(n)]
    letters = (xs, ys)
    zero = PolyScalar(nvars)
    comps = [PolyScalar(nvars) for _ in range(n)]
    for word, coeff in _log_of_product_series(alg.s).items():
        # Dynkin projection: a word maps to 1/len * its right-nested bracket
        vec = list(letters[word[-1]])
        for letter in reversed(word[:-1]):
            vec = alg.bracket_vectors(letters[letter], vec)
            vec = [v if isinstance(v, PolyScalar) else zero for v in vec]
        c = coeff / len(word)
        for m in range(n):
            if isinstance(vec[m], PolyScalar) and not vec[m].is_zero():
                comps[m] = comps[m] + vec[m] * c
    return GroupLaw(alg, comps)


class LIVectorField:
    """Left-invariant field X_l = sum_m P_{lm}(x) d/dx_m."""

    __slots__ = ("index", "components")

    def __init__(self, index, components):
        self.index = index
        self.components = tuple(components)

    def apply(self, g):
        out = PolyScalar(g.nvars)
        for m, p in enumerate(self.components):
            if p.is_zero():
                continue
            dg = g.partial(m)
            if not dg.is_zero():
                out = out + p * dg
        return out

    def __repr__(self):
        return "LIVectorField(X%d)" % (self.index + 1)


@lru_cache(maxsize=None)
def left_invariant_fields(alg):
    """The adapted frame: column l of the y-Jacobian of the product at y=0."""
    law = group_law(alg)
    n = alg.n
    fields = []
    for l in range(n):
        comps = []
        for m in range(n):
            q = law.components[m].partial(n + l)
            # restrict to y = 0: keep terms with no y exponents
            kept = {e[:n]: c for e, c in q.terms.items() if not any(e[n:])}
            comps.append(PolyScalar(n, kept))
        fields.append(LIVectorField(l, comps))
    return tuple(fields)


def apply_field(field, g):
    """Derivation applied to a polynomial; drops weighted degree by the layer."""
    return field.apply(g)


@lru_cache(maxsize=None)
def monomials_of_weighted_degree(weights, degree):
    """All exponent tuples with sum e_l * weights[l] == degree, lex order."""
    if degree < 0:
        return ()

    def rec(idx, remaining):
        if idx == len(weights):
            if remaining == 0:
                yield ()
            return
        w = weights[idx]
        for e in range(remaining // w + 1):
            for rest in rec(idx + 1, remaining - e * w):
                yield (e,) + rest

    return tuple(rec(0, degree))
