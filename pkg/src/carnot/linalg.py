"""Exact rational linear algebra on small dense matrices.

Everything in the engine reduces to kernels, images, ranks and
pseudo-inverses of matrices over Q.  Matrices are plain lists of rows,
rows are lists of rationals, vectors are lists of rationals.  No floats
ever enter: coefficients are gmpy2.mpq when available (much faster) and
fractions.Fraction otherwise; both are exact and print as "p/q".
"""

try:
    from gmpy2 import mpq as _rat
except ImportError:  # pragma: no cover - gmpy2 is an optional speedup
    from fractions import Fraction as _rat


def Q(a, b=None):
    """Build a rational from an int, a "p/q" string or another rational."""
    if b is None:
        return _rat(a)
    return _rat(a, b)


ZERO = Q(0)
ONE = Q(1)


def zeros(m, n):
    return [[ZERO] * n for _ in range(m)]


def identity(n):
    mat = zeros(n, n)
    for i in range(n):
        mat[i][i] = ONE
    return mat


def copy_matrix(mat):
    return [row[:] for row in mat]


def transpose(mat):
    if not mat:
        return []
    return [list(col) for col in zip(*mat)]


def from_columns(cols, nrows=None):
    """Matrix whose columns are the given vectors."""
    if not cols:
        return [[] for _ in range(nrows)] if nrows else []
    return [list(row) for row in zip(*cols)]


def columns(mat):
    return [list(col) for col in zip(*mat)] if mat else []


def hstack(a, b):
    if not a:
        return copy_matrix(b)
    if not b:
        return copy_matrix(a)
    return [ra + rb for ra, rb in zip(a, b)]


def vstack(a, b):
    return copy_matrix(a) + copy_matrix(b)


def mat_mul(a, b):
    """Product a*b, skipping zero entries (our matrices are very sparse)."""
    m = len(a)
    n = len(b[0]) if b else 0
    out = zeros(m, n)
    for i in range(m):
        row_a = a[i]
        out_i = out[i]
        for k, f in enumerate(row_a):
            if f:
                for j, g in enumerate(b[k]):
                    if g:
                        out_i[j] += f * g
    return out


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a):
    return [[-x for x in row] for row in a]


def scalar_mul(c, a):
    return [[c * x for x in row] for row in a]


def mat_vec(a, v):
    out = []
    for row in a:
        s = ZERO
        for x, y in zip(row, v):
            if x and y:
                s += x * y
        out.append(s)
    return out


def is_zero_matrix(a):
    return all(not x for row in a for x in row)


def is_zero_vector(v):
    return all(not x for x in v)


def vec_add(u, v):
    return [x + y for x, y in zip(u, v)]


def vec_sub(u, v):
    return [x - y for x, y in zip(u, v)]


def vec_scale(c, v):
    return [c * x for x in v]


def dot(u, v):
    s = ZERO
    for x, y in zip(u, v):
        if x and y:
            s += x * y
    return s


def _echelon(rows, ncols, reduce):
    """In-place Gaussian elimination; returns the pivot column list.

    With reduce=True the result is the reduced row echelon form.  Row
    updates iterate only over the nonzero entries of the pivot row, which
    keeps elimination near-linear on the sparse matrices we feed it.
    """
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        prow = rows[r]
        inv = ONE / prow[c]
        if inv != 1:
            for j in range(c, ncols):
                if prow[j]:
                    prow[j] *= inv
        nz = [(j, prow[j]) for j in range(c, ncols) if prow[j]]
        lo = 0 if reduce else r + 1
        for i in range(lo, nrows):
            if i == r:
                continue
            f = rows[i][c]
            if f:
                ri = rows[i]
                for j, pv in nz:
                    ri[j] -= f * pv
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def rref(mat):
    """Reduced row echelon form; returns (new matrix, pivot columns)."""
    rows = copy_matrix(mat)
    ncols = len(mat[0]) if mat else 0
    pivots = _echelon(rows, ncols, reduce=True)
    return rows, pivots


def rank(mat):
    if not mat or not mat[0]:
        return 0
    rows = copy_matrix(mat)
    return len(_echelon(rows, len(mat[0]), reduce=False))


def primitive(v):
    """Scale a rational vector to coprime integers, first nonzero positive."""
    from math import gcd, lcm

    nz = [x for x in v if x]
    if not nz:
        return list(v)
    scale = Q(lcm(*(int(x.denominator) for x in nz)))
    g = 0
    for x in nz:
        g = gcd(g, abs(int(x.numerator * scale / x.denominator)))
    if g:
        scale = scale / g
    w = [x * scale for x in v]
    for x in w:
        if x:
            if x < 0:
                w = [-y for y in w]
            break
    return w


def nullspace(mat, ncols=None):
    """Basis of the right kernel {v : mat*v = 0}, primitive-scaled.

    ncols disambiguates matrices with no rows (the kernel is everything).
    """
    if not mat or not mat[0]:
        n = len(mat[0]) if mat else (ncols or 0)
        return [ev for ev in columns(identity(n))] if n else []
    n = len(mat[0])
    red, pivots = rref(mat)
    pivot_set = set(pivots)
    basis = []
    for fc in range(n):
        if fc in pivot_set:
            continue
        v = [ZERO] * n
        v[fc] = ONE
        for r_i, pc in enumerate(pivots):
            v[pc] = -red[r_i][fc]
        basis.append(primitive(v))
    return basis


def image_basis(mat):
    """Basis of the column space: the original columns at pivot positions."""
    if not mat or not mat[0]:
        return []
    _, pivots = rref(mat)
    cols = columns(mat)
    return [cols[c] for c in pivots]


def solve(mat, b):
    """One solution of mat*x = b (free variables 0), or None if inconsistent."""
    if not mat:
        return None if any(b) else []
    n = len(mat[0])
    aug = [row[:] + [bv] for row, bv in zip(mat, b)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [ZERO] * n
    for r_i, pc in enumerate(pivots):
        x[pc] = red[r_i][n]
    return x


def solve_many(mat, rhs):
    """Solve mat*X = rhs columnwise; None if any column is inconsistent."""
    if not mat:
        return [] if is_zero_matrix(rhs) else None
    n = len(mat[0])
    k = len(rhs[0]) if rhs else 0
    aug = [row[:] + rrow[:] for row, rrow in zip(mat, rhs)]
    red, pivots = rref(aug)
    if any(p >= n for p in pivots):
        return None
    x = zeros(n, k)
    for r_i, pc in enumerate(pivots):
        x[pc] = red[r_i][n:]
    return x


def inverse(mat):
    n = len(mat)
    aug = hstack(mat, identity(n))
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is not invertible")
    return [row[n:] for row in red]


def pinv(mat):
    """Moore-Penrose pseudo-inverse over Q.

    Via a full-rank factorization mat = B*C (B = pivot columns, C = the
    nonzero rref rows): pinv = C^T (C C^T)^-1 (B^T B)^-1 B^T.  The result
    is zero on the orthogonal complement of the column space and inverts
    mat between row space and column space.
    """
    m = len(mat)
    n = len(mat[0]) if mat else 0
    red, pivots = rref(mat)
    r = len(pivots)
    if r == 0:
        return zeros(n, m)
    bmat = [[mat[i][c] for c in pivots] for i in range(m)]
    cmat = [red[i][:] for i in range(r)]
    ct = transpose(cmat)
    bt = transpose(bmat)
    left = mat_mul(ct, inverse(mat_mul(cmat, ct)))
    right = mat_mul(inverse(mat_mul(bt, bmat)), bt)
    return mat_mul(left, right)


def gram_schmidt(vectors):
    """Orthogonal (not normalized) basis of the span, over Q."""
    basis = []
    for v in vectors:
        w = list(v)
        for b in basis:
            c = dot(w, b)
            if c:
                c = c / dot(b, b)
                w = [x - c * y for x, y in zip(w, b)]
        if any(w):
            basis.append(primitive(w))
    return basis


def orthogonal_complement(vectors, dim):
    """Basis of the orthogonal complement of span(vectors) in Q^dim."""
    if not vectors:
        return columns(identity(dim))
    return nullspace([list(v) for v in vectors])


def complement_within(inner, outer):
    """Orthogonal complement of span(inner) inside span(outer).

    Both arguments are lists of vectors in the same ambient space; outer
    must be linearly independent and inner contained in its span.  Returns
    vectors w = outer*c with inner^T w = 0 spanning the complement.
    """
    if not outer:
        return []
    if not inner:
        return [list(v) for v in outer]
    outer_mat = from_columns(outer)
    prod = mat_mul([list(v) for v in inner], outer_mat)
    coeffs = nullspace(prod)
    return [mat_vec(outer_mat, c) for c in coeffs]


def in_span(vectors, v):
    if not vectors:
        return is_zero_vector(v)
    return solve(from_columns(vectors), v) is not None


def coords_in_basis(vectors, v):
    """Coefficients of v in the given basis, or None if v is outside."""
    if not vectors:
        return [] if is_zero_vector(v) else None
    return solve(from_columns(vectors), v)


def subspace_dim_sum(u_vectors, w_vectors):
    """dim(span(u) + span(w))."""
    cols = [list(v) for v in u_vectors] + [list(v) for v in w_vectors]
    if not cols:
        return 0
    return rank(from_columns(cols))
