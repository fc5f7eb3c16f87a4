"""Polynomial-coefficient forms, the split differential, and finite slices.

A form is a sparse sum f_J theta_J with polynomial coefficients.  Its
bigrading is (covector weight a, degree h); the total homogeneity
tau = a + weighted degree of the coefficient is preserved by every piece
d_i of the differential: d_i raises the covector weight by i and
differentiates the coefficient along a layer-i field, lowering its
weighted degree by i.  Fixing tau therefore truncates the complex to exact
finite-dimensional blocks with no truncation error; that is what makes
every identity here decidable by rational linear algebra.
"""

from dataclasses import dataclass, field

from . import exterior
from .exterior import Covector, merge_monomials, monomial_weight
from .lie_core import hausdorff_dimension
from .linalg import ZERO, zeros
from .poly_coeff import (PolyScalar, left_invariant_fields,
                         monomials_of_weighted_degree, poly_str)


class PolyForm:
    """Differential form with polynomial coefficients in the adapted coframe.

    terms maps covector basis monomials (sorted index tuples) to nonzero
    PolyScalar coefficients; degree is carried explicitly.
    """

    __slots__ = ("nvars", "degree", "terms")

    def __init__(self, nvars, degree, terms=None):
        self.nvars = nvars
        self.degree = degree
        clean = {}
        if terms:
            for mono, p in terms.items():
                if not isinstance(p, PolyScalar):
                    p = PolyScalar.constant(nvars, p)
                if not p.is_zero():
                    clean[tuple(mono)] = p
        self.terms = clean

    @classmethod
    def from_scalar(cls, nvars, p):
        return cls(nvars, 0, {(): p})

    @classmethod
    def from_covector(cls, nvars, x: Covector):
        return cls(nvars, x.degree, {m: PolyScalar.constant(nvars, c) for m, c in x.terms.items()})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        terms = dict(self.terms)
        for mono, p in other.terms.items():
            acc = terms.get(mono)
            acc = p if acc is None else acc + p
            if acc.is_zero():
                terms.pop(mono, None)
            else:
                terms[mono] = acc
        return PolyForm(self.nvars, self.degree, terms)

    def __neg__(self):
        return PolyForm(self.nvars, self.degree, {m: -p for m, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return PolyForm(self.nvars, self.degree, {m: p * c for m, p in self.terms.items()})

    def scalar_mul(self, poly: PolyScalar):
        return PolyForm(self.nvars, self.degree, {m: p * poly for m, p in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, PolyForm) and self.terms == other.terms

    def weight_component(self, alg, a):
        """Projection onto covector weight a (the (.)_a projection)."""
        return PolyForm(self.nvars, self.degree,
                        {m: p for m, p in self.terms.items() if monomial_weight(alg, m) == a})

    def weight_support(self, alg):
        return sorted({monomial_weight(alg, m) for m in self.terms})

    def tau_component(self, alg, tau):
        """Projection onto total homogeneity tau."""
        terms = {}
        for mono, p in self.terms.items():
            a = monomial_weight(alg, mono)
            comp = p.weighted_components(alg.weight_of).get(tau - a)
            if comp is not None:
                terms[mono] = comp
        return PolyForm(self.nvars, self.degree, terms)

    def tau_values(self, alg):
        vals = set()
        for mono, p in self.terms.items():
            a = monomial_weight(alg, mono)
            vals.update(a + d for d in p.weighted_components(alg.weight_of))
        return sorted(vals)

    def __repr__(self):
        return "PolyForm(%s)" % form_str(self)


def form_str(form):
    if form.is_zero():
        return "0"
    parts = []
    for mono in sorted(form.terms):
        p = form.terms[mono]
        label = "^".join("t%d" % (j + 1) for j in mono) if mono else "1"
        parts.append("(%s) %s" % (poly_str(p), label))
    return " + ".join(parts)


def d_full(alg, form):
    """The exterior differential in the adapted coframe.

    d(f theta_J) = sum_l (X_l f) theta_l ^ theta_J + f d(theta_J), the
    second summand being the coefficient-linear differential on the
    coframe.  Squares to zero exactly.
    """
    fields = left_invariant_fields(alg)
    terms = {}
    for mono, f in form.terms.items():
        for l in range(alg.n):
            df = fields[l].apply(f)
            if df.is_zero():
                continue
            merged = merge_monomials((l,), mono)
            if merged is None:
                continue
            sign, new_mono = merged
            acc = terms.get(new_mono)
            contrib = df * sign if sign < 0 else df
            terms[new_mono] = contrib if acc is None else acc + contrib
        ce = exterior.ce_differential(alg, Covector.basis(mono))
        for cmono, c in ce.terms.items():
            acc = terms.get(cmono)
            contrib = f * c
            terms[cmono] = contrib if acc is None else acc + contrib
    return PolyForm(form.nvars, form.degree + 1, terms)


def d_component(alg, i, form):
    """The part of d that raises covector weight by exactly i.

    i = 0 is the coefficient-linear coframe differential; i >= 1 wedges
    with layer-i coframe covectors and differentiates coefficients along
    the matching fields.
    """
    if i < 0 or i > alg.s:
        raise ValueError("weight shift %d outside 0..%d" % (i, alg.s))
    terms = {}
    if i == 0:
        for mono, f in form.terms.items():
            ce = exterior.ce_differential(alg, Covector.basis(mono))
            for cmono, c in ce.terms.items():
                acc = terms.get(cmono)
                contrib = f * c
                terms[cmono] = contrib if acc is None else acc + contrib
    else:
        fields = left_invariant_fields(alg)
        layer = alg.layers[i - 1]
        for mono, f in form.terms.items():
            for l in layer:
                df = fields[l].apply(f)
                if df.is_zero():
                    continue
                merged = merge_monomials((l,), mono)
                if merged is None:
                    continue
                sign, new_mono = merged
                contrib = df * sign if sign < 0 else df
                acc = terms.get(new_mono)
                terms[new_mono] = contrib if acc is None else acc + contrib
    return PolyForm(form.nvars, form.degree + 1, terms)


class SliceTooLargeError(RuntimeError):
    """A homogeneity slice exceeded the configured dimension guard."""


@dataclass(frozen=True)
class BlockOperator:
    """Exact matrix of a linear map between enumerated, labelled bases."""
    row_labels: tuple
    col_labels: tuple
    mat: list

    def is_zero(self):
        return all(not x for row in self.mat for x in row)


class Slice:
    """The finite-dimensional subcomplex of total homogeneity tau.

    For each degree h the basis is the list of pairs (J, e): covector
    monomial J of weight a and coefficient monomial e of weighted degree
    tau - a, enumerated lexicographically, weights ascending.  The d_i
    matrices between consecutive degrees are assembled lazily and cached.
    """

    def __init__(self, alg, tau, max_block_dim=None):
        if tau < 0:
            raise ValueError("tau must be nonnegative")
        self.alg = alg
        self.tau = tau
        self.Q = hausdorff_dimension(alg)
        self.max_block_dim = max_block_dim
        self._bases = {}
        self._index = {}
        self._offsets = {}
        self._dmat = {}
        self._dtot = {}

    # ---- bases ------------------------------------------------------

    def weights_in_degree(self, h):
        return sorted(a for a in exterior.weight_blocks(self.alg, h) if a <= self.tau)

    def basis(self, h):
        """Basis of the degree-h part: [(J, e), ...], weight-major order."""
        if h in self._bases:
            return self._bases[h]
        items = []
        offsets = {}
        if 0 <= h <= self.alg.n:
            for a in self.weights_in_degree(h):
                monos = monomials_of_weighted_degree(self.alg.weight_of, self.tau - a)
                start = len(items)
                for cov in exterior.block_basis(self.alg, a, h):
                    for e in monos:
                        items.append((cov, e))
                if len(items) > start:
                    offsets[a] = (start, len(items) - start)
        if self.max_block_dim is not None and len(items) > self.max_block_dim:
            raise SliceTooLargeError(
                "degree-%d block of the tau=%d slice has dimension %d > guard %d"
                % (h, self.tau, len(items), self.max_block_dim))
        self._bases[h] = items
        self._offsets[h] = offsets
        self._index[h] = {key: i for i, key in enumerate(items)}
        return items

    def dim(self, h):
        return len(self.basis(h))

    def index_map(self, h):
        self.basis(h)
        return self._index[h]

    def offsets(self, h):
        self.basis(h)
        return self._offsets[h]

    def weight_range(self, h, p_lo, p_hi=None):
        """Column index range [start, stop) of weights p_lo <= a < p_hi."""
        offs = self.offsets(h)
        idx = [off for a, (off, ln) in offs.items() if p_lo <= a and (p_hi is None or a < p_hi)]
        lens = [ln for a, (off, ln) in offs.items() if p_lo <= a and (p_hi is None or a < p_hi)]
        if not idx:
            return (0, 0)
        start = min(idx)
        stop = max(o + l for o, l in zip(idx, lens))
        return (start, stop)

    def block_index_range(self, h, a):
        off = self.offsets(h).get(a)
        return (0, 0) if off is None else (off[0], off[0] + off[1])

    def basis_label(self, key):
        cov, e = key
        covl = "^".join("t%d" % (j + 1) for j in cov) if cov else "1"
        poly = [
            ("x%d" % (i + 1)) if n == 1 else ("x%d^%d" % (i + 1, n))
            for i, n in enumerate(e) if n
        ]
        return "%s %s" % ("*".join(poly) if poly else "1", covl)

    def labels(self, h):
        return tuple(self.basis_label(key) for key in self.basis(h))

    # ---- vectors and forms ------------------------------------------

    def form_from_vector(self, h, vec):
        terms = {}
        for (cov, e), c in zip(self.basis(h), vec):
            if c:
                acc = terms.setdefault(cov, {})
                acc[e] = acc.get(e, ZERO) + c
        return PolyForm(self.alg.n, h,
                        {m: PolyScalar(self.alg.n, t) for m, t in terms.items()})

    def vector_from_form(self, h, form):
        self.basis(h)
        index = self._index[h]
        vec = [ZERO] * self.dim(h)
        for mono, p in form.terms.items():
            for e, c in p.terms.items():
                key = (mono, e)
                if key not in index:
                    raise ValueError("form leaves the tau=%d slice at %s" % (self.tau, key))
                vec[index[key]] += c
        return vec

    # ---- differentials ----------------------------------------------

    def d_matrix(self, i, h):
        """Matrix of d_i from degree h to degree h+1 in the slice bases."""
        key = (i, h)
        if key in self._dmat:
            return self._dmat[key]
        rows = self.dim(h + 1)
        cols = self.dim(h)
        mat = zeros(rows, cols)
        if rows and cols:
            self.basis(h + 1)
            index = self._index[h + 1]
            for col, (cov, e) in enumerate(self.basis(h)):
                img = d_component(self.alg, i,
                                  PolyForm(self.alg.n, h, {cov: PolyScalar(self.alg.n, {e: 1})}))
                for mono, p in img.terms.items():
                    for ee, c in p.terms.items():
                        mat[index[(mono, ee)]][col] += c
        self._dmat[key] = mat
        return mat

    def d_total(self, h):
        if h in self._dtot:
            return self._dtot[h]
        rows = self.dim(h + 1)
        cols = self.dim(h)
        mat = zeros(rows, cols)
        for i in range(self.alg.s + 1):
            di = self.d_matrix(i, h)
            for r in range(rows):
                src = di[r]
                dst = mat[r]
                for c in range(cols):
                    if src[c]:
                        dst[c] += src[c]
        self._dtot[h] = mat
        return mat

    def block_operator(self, mat, h_from, h_to):
        return BlockOperator(self.labels(h_to), self.labels(h_from), mat)


@dataclass
class IdentityCheck:
    tau: int
    degree: int
    order: int
    ok: bool
    witness: str = ""


@dataclass
class MulticomplexReport:
    alg_name: str
    tau_max: int
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]


def multicomplex_check(alg, tau_max, max_block_dim=None):
    """Verify sum_{i+j=n} d_i d_j = 0 on every slice up to tau_max.

    The identities are checked as exact zero matrices, one per
    (tau, degree, n); any violation is reported with a witnessing basis
    element.
    """
    report = MulticomplexReport(alg.name, tau_max)
    s = alg.s
    for tau in range(tau_max + 1):
        sl = Slice(alg, tau, max_block_dim=max_block_dim)
        for h in range(alg.n + 1):
            if sl.dim(h) == 0:
                continue
            for n_ in range(2 * s + 1):
                acc = None
                for i in range(n_ + 1):
                    j = n_ - i
                    if i > s or j > s:
                        continue
                    first = sl.d_matrix(j, h)
                    second = sl.d_matrix(i, h + 1)
                    prod = _sparse_mul(second, first)
                    acc = prod if acc is None else _mat_iadd(acc, prod)
                if acc is None:
                    continue
                witness = ""
                ok = True
                for col in range(sl.dim(h)):
                    if any(row[col] for row in acc):
                        ok = False
                        witness = sl.basis_label(sl.basis(h)[col])
                        break
                report.checks.append(IdentityCheck(tau, h, n_, ok, witness))
    return report


def _sparse_mul(a, b):
    from .linalg import mat_mul
    if not a or not b or not b[0]:
        rows = len(a)
        cols = len(b[0]) if b else 0
        return zeros(rows, cols)
    return mat_mul(a, b)


def _mat_iadd(a, b):
    for ra, rb in zip(a, b):
        for i, v in enumerate(rb):
            if v:
                ra[i] += v
    return a


def filtration_basis(alg, tau, p):
    """Enumerated basis of the weight->=p part of the tau slice.

    Returns [(h, a, J, e), ...] over all degrees, weights ascending; p may
    run from 0 (the whole slice) to Q+1 (empty).
    """
    Q_hom = hausdorff_dimension(alg)
    if p < 0 or p > Q_hom + 1:
        raise ValueError("filtration weight %d outside 0..%d" % (p, Q_hom + 1))
    sl = Slice(alg, tau)
    out = []
    for h in range(alg.n + 1):
        offs = sl.offsets(h)
        base = sl.basis(h)
        for a in sorted(offs):
            if a < p:
                continue
            start, ln = offs[a]
            for cov, e in base[start:start + ln]:
                out.append((h, a, cov, e))
    return out
