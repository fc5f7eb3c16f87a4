"""The weight-filtration spectral sequence on a homogeneity slice.

Two independent realizations of every page are kept side by side:

* blockwise: r-cycles and r-boundaries inside a single weight block, with
  membership decided by the joint linear system over the element and all
  its witnesses (the literal solvability condition, solutions carrying
  witness tuples along);
* filtered: cycles and boundaries of the filtered total complex, computed
  from coordinate windows of the full differential, never touching d_0^-1.

Their dimensions must agree; the comparison is one of the strongest
internal checks of the whole engine.  Separately, the gauge-fixed witness
operators built from the pseudo-inverse of d_0 (witnesses orthogonal to
Ker d_0), which are weaker for membership, assemble the closed-form page
operators: the sum of those sandwiched between E_0 projections must
reproduce the Rumin differential slice by slice.
"""

from dataclasses import dataclass, field

from .derham import Slice
from .lie_core import hausdorff_dimension
from .linalg import (Q, ZERO, dot, from_columns, identity, image_basis,
                     is_zero_vector, mat_mul, mat_sub, mat_vec, nullspace,
                     rank, rref, solve, zeros)
from .rumin import SliceOps


def _submatrix(mat, row_range, col_range):
    r0, r1 = row_range
    c0, c1 = col_range
    return [row[c0:c1] for row in mat[r0:r1]]


def _thin_from(vectors):
    """Column block from a list of vectors (may be empty)."""
    return from_columns(vectors) if vectors else []


class PageComputer:
    """Blockwise spectral data for one algebra and one slice, fully cached."""

    def __init__(self, alg, tau, slice_ops=None):
        self.alg = alg
        self.tau = tau
        self.ops = slice_ops or SliceOps(Slice(alg, tau))
        self.slice = self.ops.slice
        self.Q = hausdorff_dimension(alg)
        self._w = {}
        self._z = {}
        self._zc = {}
        self._joint = {}
        self._b = {}
        self._reps = {}

    # ---- canonical witness operators ---------------------------------

    def d_i(self, i, h):
        if i > self.alg.s:
            return zeros(self.slice.dim(h + 1), self.slice.dim(h))
        return self.ops.d_i(i, h)

    def witness_op(self, j, h):
        """W_j: the degree-h matrix sending x to the canonical z at weight +j.

        Solves the level-j condition in the Ker d_0-orthogonal gauge:
        W_j = d_0^-1 (d_j - sum_{i=1}^{j-1} d_i W_{j-i}); unrolling the
        recursion reproduces the alternating sum over multi-indices of
        weight j of products d_0^-1 d_{i_1} ... d_0^-1 d_{i_m}.
        """
        key = (j, h)
        if key in self._w:
            return self._w[key]
        dim = self.slice.dim(h)
        if dim == 0 or self.slice.dim(h + 1) == 0:
            mat = zeros(dim, dim)
        else:
            resid = self.residual_op(j, h)
            mat = mat_mul(self.ops.d0_pinv_mat(h + 1), resid)
        self._w[key] = mat
        return mat

    def residual_op(self, n, h):
        """x -> d_n x - sum_{i=1}^{n-1} d_i W_{n-i} x (degree h to h+1)."""
        key = ("resid", n, h)
        if key in self._w:
            return self._w[key]
        mat = [row[:] for row in self.d_i(n, h)]
        for i in range(1, min(n, self.alg.s + 1)):
            corr = mat_mul(self.d_i(i, h), self.witness_op(n - i, h))
            mat = mat_sub(mat, corr)
        self._w[key] = mat
        return mat

    def proj_im_d0_perp(self, h):
        """Projector onto the orthogonal complement of Im d_0 in degree h."""
        key = ("imperp", h)
        if key in self._w:
            return self._w[key]
        dim = self.slice.dim(h)
        mat = identity(dim)
        if h > 0 and self.slice.dim(h - 1) and dim:
            mat = mat_sub(mat, mat_mul(self.d_i(0, h - 1), self.ops.d0_pinv_mat(h)))
        self._w[key] = mat
        return mat

    # ---- Z_r and B_r ---------------------------------------------------

    def block_range(self, h, p):
        return self.slice.block_index_range(h, p)

    def block_dim(self, h, p):
        c0, c1 = self.block_range(h, p)
        return c1 - c0

    def z_block_canonical(self, r, p, h):
        """Z_r membership decided with the canonical gauge-fixed witnesses.

        Z_1 is Ker d_0; each next page intersects with the kernel of the
        projected residual map at the next level.  This is NOT always the
        full cycle space: the gauge-fixed recursion can fail on elements
        that admit other witness tuples (it genuinely does on the free
        rank-3 step-2 group), so membership proper uses joint_cycles; this
        route stays as a diagnostic lower bound.
        """
        key = (r, p, h)
        if key in self._zc:
            return self._zc[key]
        dim = self.block_dim(h, p)
        if dim == 0:
            self._zc[key] = []
            return []
        if r < 1:
            raise ValueError("page index must be >= 1")
        if r == 1:
            cols = self.block_range(h, p)
            if self.slice.dim(h + 1) == 0:
                basis = [ev for ev in identity(dim)]
            else:
                rows = self.block_range(h + 1, p)
                d0 = _submatrix(self.d_i(0, h), rows, cols)
                basis = nullspace(d0, ncols=dim) if d0 else [ev for ev in identity(dim)]
            self._zc[key] = basis
            return basis
        prev = self.z_block_canonical(r - 1, p, h)
        if not prev:
            self._zc[key] = []
            return []
        n = r - 1
        cond = self.level_condition(n, p, h)
        if not cond:
            self._zc[key] = prev
            return prev
        thin = _thin_from(prev)
        image = mat_mul(cond, thin)
        coeffs = nullspace(image, ncols=len(prev))
        basis = [mat_vec(thin, c) for c in coeffs]
        self._zc[key] = basis
        return basis

    def level_condition(self, n, p, h):
        """Rows of the gauge-fixed level-n condition on the (p, h) block.

        Empty when the target block (p+n, h+1) is empty, in which case the
        condition is vacuous.
        """
        rows = self.block_range(h + 1, p + n)
        if rows[0] == rows[1]:
            return []
        cols = self.block_range(h, p)
        key = ("projresid", n, h)
        if key not in self._w:
            self._w[key] = mat_mul(self.proj_im_d0_perp(h + 1), self.residual_op(n, h))
        return _submatrix(self._w[key], rows, cols)

    # ---- the existence route: joint solutions with witnesses ----------

    def joint_cycles(self, r, p, h):
        """Solution space of the full cycle system at page r on block (p, h).

        Coordinates are the concatenation of the x block (p, h) and the
        witness blocks (p+j, h) for 1 <= j < r; the equations say that the
        total differential of x - z_1 - ... - z_{r-1} has no component
        below weight p+r.  Extending from page r-1 adds one witness block
        and one equation level, so the whole tower costs one small
        elimination per page.  Returns (z_widths, basis) with z_widths[j]
        the width of the j-th witness block.
        """
        if r < 1:
            raise ValueError("page index must be >= 1")
        key = (r, p, h)
        if key in self._joint:
            return self._joint[key]
        dim = self.block_dim(h, p)
        if dim == 0:
            self._joint[key] = ({}, [])
            return self._joint[key]
        if r == 1:
            cols = self.block_range(h, p)
            if self.slice.dim(h + 1) == 0:
                basis = [ev for ev in identity(dim)]
            else:
                rows = self.block_range(h + 1, p)
                d0 = _submatrix(self.d_i(0, h), rows, cols)
                basis = nullspace(d0, ncols=dim) if d0 else [ev for ev in identity(dim)]
            self._joint[key] = ({}, basis)
            return self._joint[key]
        z_widths, prev = self.joint_cycles(r - 1, p, h)
        n = r - 1
        new_width = self.block_dim(h, p + n)
        z_widths = dict(z_widths)
        z_widths[n] = new_width
        if not prev:
            self._joint[key] = (z_widths, [])
            return self._joint[key]
        rows = self.block_range(h + 1, p + n) if self.slice.dim(h + 1) else (0, 0)
        if rows[0] == rows[1]:
            # vacuous level: solutions extend by a free new witness block
            basis = [v + [ZERO] * new_width for v in prev]
            for i in range(new_width):
                ev = [ZERO] * (len(prev[0]) + new_width)
                ev[len(prev[0]) + i] = Q(1)
                basis.append(ev)
            self._joint[key] = (z_widths, basis)
            return self._joint[key]
        # residual of the level-n equation on the previous solution basis
        eq_cols = []
        for v in prev:
            eq_cols.append(self._level_equation(n, p, h, v, z_widths))
        height = rows[1] - rows[0]
        strip = [[ZERO] * (len(prev) + new_width) for _ in range(height)]
        for j, col in enumerate(eq_cols):
            for i, val in enumerate(col):
                if val:
                    strip[i][j] = val
        if new_width:
            d0sub = _submatrix(self.d_i(0, h), rows, self.block_range(h, p + n))
            for i in range(height):
                row = strip[i]
                for ci, v in enumerate(d0sub[i]):
                    if v:
                        row[len(prev) + ci] = -v
        kernel = nullspace(strip, ncols=len(prev) + new_width)
        basis = []
        for k in kernel:
            vec = [ZERO] * len(prev[0])
            for c, v in zip(k[:len(prev)], prev):
                if c:
                    for i, x in enumerate(v):
                        if x:
                            vec[i] += c * x
            vec.extend(k[len(prev):])
            basis.append(vec)
        self._joint[key] = (z_widths, basis)
        return self._joint[key]

    def _level_equation(self, n, p, h, sol, z_widths):
        """d_n x - sum_{i=1}^{n-1} d_i z_{n-i} on the (p+n, h+1) stripe."""
        rows = self.block_range(h + 1, p + n)
        cols = self.block_range(h, p)
        dim = self.block_dim(h, p)
        x = sol[0:dim]
        out = mat_vec(_submatrix(self.d_i(n, h), rows, cols), x)
        off = dim
        for j in sorted(z_widths):
            w = z_widths[j]
            if j >= n or w == 0:
                off += w
                continue
            i = n - j
            z = sol[off:off + w]
            off += w
            if is_zero_vector(z) or i > self.alg.s:
                continue
            sub = _submatrix(self.d_i(i, h), rows, self.block_range(h, p + j))
            for ri in range(len(out)):
                v = dot(sub[ri], z)
                if v:
                    out[ri] -= v
        return out

    def z_block_with_witnesses(self, r, p, h):
        """Z_r basis with one valid witness tuple per basis vector.

        The x projections of the joint solutions span Z_r; the pivot
        columns of that projection pick an independent subset, and each
        chosen solution carries its witnesses along.
        """
        key = (r, p, h)
        if key in self._z:
            return self._z[key]
        z_widths, joint = self.joint_cycles(r, p, h)
        dim = self.block_dim(h, p)
        if not joint:
            self._z[key] = ([], [])
            return self._z[key]
        xs = from_columns([v[0:dim] for v in joint], nrows=dim)
        _, pivots = rref(xs)
        basis = []
        witnesses = []
        for c in pivots:
            sol = joint[c]
            basis.append(sol[0:dim])
            wit = {}
            off = dim
            for j in sorted(z_widths):
                w = z_widths[j]
                wit[j] = sol[off:off + w]
                off += w
            witnesses.append(wit)
        self._z[key] = (basis, witnesses)
        return self._z[key]

    def z_block(self, r, p, h):
        """Basis of Z_r in the (weight p, degree h) block coordinates."""
        return self.z_block_with_witnesses(r, p, h)[0]

    def b_block(self, r, p, h):
        """Basis of B_r in the (p, h) block: images of constrained tuples.

        A tuple (c_{p-k})_{k<r} of degree h-1 blocks contributes
        x = sum_k d_k c_{p-k} provided every lower-weight component of the
        total differential of the tuple vanishes.
        """
        key = (r, p, h)
        if key in self._b:
            return self._b[key]
        dim = self.block_dim(h, p)
        if dim == 0 or h == 0:
            self._b[key] = []
            return []
        ks = [k for k in range(r) if p - k >= 0 and self.block_dim(h - 1, p - k)]
        if not ks:
            self._b[key] = []
            return []
        widths = [self.block_dim(h - 1, p - k) for k in ks]
        offsets = []
        acc = 0
        for w in widths:
            offsets.append(acc)
            acc += w
        total = acc
        rows_out = []
        for l in range(1, r):
            tgt = self.block_range(h, p - l)
            if tgt[0] == tgt[1]:
                continue
            height = tgt[1] - tgt[0]
            strip = [[ZERO] * total for _ in range(height)]
            touched = False
            for pos, k in enumerate(ks):
                if k < l:
                    continue
                sub = _submatrix(self.d_i(k - l, h - 1), tgt, self.block_range(h - 1, p - k))
                off = offsets[pos]
                for ri in range(height):
                    row = strip[ri]
                    for ci, v in enumerate(sub[ri]):
                        if v:
                            row[off + ci] += v
                            touched = True
            if touched:
                rows_out.extend(strip)
        if rows_out:
            tuples = nullspace(rows_out, ncols=total)
        else:
            tuples = [ev for ev in identity(total)]
        if not tuples:
            self._b[key] = []
            return []
        xs = []
        tgt = self.block_range(h, p)
        for tup in tuples:
            x = [ZERO] * dim
            for pos, k in enumerate(ks):
                piece = tup[offsets[pos]:offsets[pos] + widths[pos]]
                if is_zero_vector(piece):
                    continue
                sub = _submatrix(self.d_i(k, h - 1), tgt, self.block_range(h - 1, p - k))
                for ri in range(dim):
                    v = dot(sub[ri], piece)
                    if v:
                        x[ri] += v
            if not is_zero_vector(x):
                xs.append(x)
        if not xs:
            self._b[key] = []
            return []
        basis = image_basis(from_columns(xs))
        self._b[key] = basis
        return basis

    def representatives_with_witnesses(self, r, p, h):
        """Orthogonal complement of B_r inside Z_r, with witness tuples.

        Representatives are Z-combinations orthogonal to B_r; the same
        combinations applied to the witness tuples of the Z basis stay
        valid witnesses, since the conditions are linear.
        """
        key = (r, p, h)
        if key in self._reps:
            return self._reps[key]
        zb, zw = self.z_block_with_witnesses(r, p, h)
        bb = self.b_block(r, p, h)
        if not zb:
            self._reps[key] = ([], [])
            return self._reps[key]
        if not bb:
            self._reps[key] = (zb, zw)
            return self._reps[key]
        zmat = from_columns(zb)
        coeffs = nullspace(mat_mul([list(b) for b in bb], zmat), ncols=len(zb))
        reps = [mat_vec(zmat, c) for c in coeffs]
        wits = []
        for c in coeffs:
            wit = {}
            for j in zw[0]:
                acc = None
                for ci, w in zip(c, zw):
                    if ci and w[j]:
                        piece = [ci * x for x in w[j]]
                        acc = piece if acc is None else [a + b for a, b in zip(acc, piece)]
                wit[j] = acc if acc is not None else [ZERO] * len(zw[0][j])
            wits.append(wit)
        self._reps[key] = (reps, wits)
        return self._reps[key]

    def representatives(self, r, p, h):
        return self.representatives_with_witnesses(r, p, h)[0]

    def page_dim(self, r, p, h):
        return len(self.z_block(r, p, h)) - len(self.b_block(r, p, h))

    def class_coords(self, r, p, h, vec):
        """Coordinates of [vec] on the page: solve in the B + reps basis.

        Raises if vec is not an r-cycle of the block; that would mean the
        page differential left the cycle space, which is a hard error.
        """
        bb = self.b_block(r, p, h)
        reps = self.representatives(r, p, h)
        cols = [list(v) for v in bb] + [list(v) for v in reps]
        if not cols:
            if is_zero_vector(vec):
                return []
            raise ArithmeticError("nonzero class in a zero page block")
        sol = solve(from_columns(cols), list(vec))
        if sol is None:
            raise ArithmeticError("vector is not in Z_r of the target block")
        return sol[len(bb):]

    def partial_matrix(self, r, p, h):
        """The page differential on representatives, (p, h) -> (p+r, h+1).

        For a representative x with witnesses (z_j) the differential is
        the class of d_r x - sum_{i=1}^{r-1} d_i z_{r-i} in the target
        page; the class does not depend on the witness choice.
        """
        reps, wits = self.representatives_with_witnesses(r, p, h)
        tgt_reps = self.representatives(r, p + r, h + 1)
        mat = zeros(len(tgt_reps), len(reps))
        if not reps or not tgt_reps or self.slice.dim(h + 1) == 0:
            return mat
        cols = self.block_range(h, p)
        rows = self.block_range(h + 1, p + r)
        dr = _submatrix(self.d_i(r, h), rows, cols)
        for jcol, (v, wit) in enumerate(zip(reps, wits)):
            img = mat_vec(dr, v)
            for j, z in wit.items():
                i = r - j
                if i < 1 or i > self.alg.s or not z or is_zero_vector(z):
                    continue
                sub = _submatrix(self.d_i(i, h), rows, self.block_range(h, p + j))
                for ri in range(len(img)):
                    val = dot(sub[ri], z)
                    if val:
                        img[ri] -= val
            coords = self.class_coords(r, p + r, h + 1, img)
            for irow, c in enumerate(coords):
                if c:
                    mat[irow][jcol] = c
        return mat


_PAGE_CACHE = {}


def page_computer(alg, tau):
    key = (id(alg), tau)
    pc = _PAGE_CACHE.get(key)
    if pc is None or pc.alg is not alg:
        pc = PageComputer(alg, tau)
        _PAGE_CACHE[key] = pc
    return pc


@dataclass
class ZSpace:
    r: int
    p: int
    tau: int
    basis: dict          # h -> list of block-coordinate vectors
    witnesses: dict      # h -> per basis vector, {j: z vector at weight p+j}
    gauge_ops: dict      # (h, j) -> matrix of the gauge-fixed witness map

    def dims(self):
        return {h: len(v) for h, v in self.basis.items() if v}


def z_space(alg, r, p, tau):
    """Blockwise r-cycles with witness data.

    The basis at degree h spans the x in the (p, h) block with d_0 x = 0
    for which the recursive solvability conditions hold up to level r-1;
    membership is decided by the joint linear system over x and all
    witnesses, which is the literal existence condition.  Each basis
    vector carries one valid witness tuple.  The gauge_ops are the
    operators of the d_0^-1 recursion (witnesses orthogonal to Ker d_0);
    they produce the unique gauge-fixed witnesses whenever the gauge-fixed
    recursion closes, but on some groups that recursion fails for cycles
    that admit other witnesses, so it is not used for membership.
    """
    if p < 0 or p > hausdorff_dimension(alg):
        raise ValueError("filtration weight %d out of range" % p)
    pc = page_computer(alg, tau)
    basis = {}
    witnesses = {}
    gauge = {}
    for h in range(alg.n + 1):
        if pc.block_dim(h, p) == 0:
            continue
        zb, zw = pc.z_block_with_witnesses(r, p, h)
        basis[h] = zb
        witnesses[h] = zw
        for j in range(1, r):
            rows = pc.block_range(h, p + j)
            cols = pc.block_range(h, p)
            gauge[(h, j)] = _submatrix(pc.witness_op(j, h), rows, cols)
    return ZSpace(r, p, tau, basis, witnesses, gauge)


def b_space(alg, r, p, tau):
    """Blockwise r-boundaries: {h: basis vectors in block coordinates}."""
    if p < 0 or p > hausdorff_dimension(alg):
        raise ValueError("filtration weight %d out of range" % p)
    pc = page_computer(alg, tau)
    return {h: pc.b_block(r, p, h) for h in range(alg.n + 1)
            if pc.block_dim(h, p)}


@dataclass
class SpectralPage:
    r: int
    p: int
    tau: int
    z_basis: dict
    b_basis: dict
    reps: dict
    partial: dict  # h -> matrix on representatives towards (p+r, h+1)

    def dims(self, h):
        return (len(self.z_basis.get(h, [])), len(self.b_basis.get(h, [])),
                len(self.reps.get(h, [])))


def page(alg, r, p, tau):
    pc = page_computer(alg, tau)
    z_basis, b_basis, reps, partial = {}, {}, {}, {}
    for h in range(alg.n + 1):
        if pc.block_dim(h, p) == 0:
            continue
        z_basis[h] = pc.z_block(r, p, h)
        b_basis[h] = pc.b_block(r, p, h)
        reps[h] = pc.representatives(r, p, h)
        partial[h] = pc.partial_matrix(r, p, h)
    return SpectralPage(r, p, tau, z_basis, b_basis, reps, partial)


def partial_r(alg, r, p, tau):
    """Page differentials per degree: {h: matrix reps(p,h) -> reps(p+r,h+1)}."""
    pc = page_computer(alg, tau)
    return {h: pc.partial_matrix(r, p, h) for h in range(alg.n + 1)
            if pc.block_dim(h, p)}


# ---- the filtered-complex route ---------------------------------------


class FilteredComplex:
    """Cycle/boundary spaces of the filtered total complex of one slice.

    Works only with coordinate windows of the full differential: columns
    of weight >= p are a tail of the weight-major degree basis, rows of
    weight < c a head.  Kernel bases are swept incrementally in c and
    cached, so all pages of one slice cost a handful of eliminations.
    """

    def __init__(self, alg, tau):
        self.alg = alg
        self.tau = tau
        self.slice = Slice(alg, tau)
        self.Q = hausdorff_dimension(alg)
        self._kernels = {}

    def cycle_basis(self, p, c, h):
        """Basis of F_p o d^{-1}(F_c) in degree h, as full-degree vectors."""
        key = (p, c, h)
        if key in self._kernels:
            return self._kernels[key]
        dim = self.slice.dim(h)
        start, stop = self.slice.weight_range(h, p)
        if start == stop:
            self._kernels[key] = []
            return []
        if c <= p:
            # d preserves the filtration, so there is no condition yet
            basis = []
            for i in range(start, stop):
                v = [ZERO] * dim
                v[i] = Q(1)
                basis.append(v)
            self._kernels[key] = basis
            return basis
        prev = self.cycle_basis(p, c - 1, h)
        if not prev:
            self._kernels[key] = []
            return []
        rows = self.slice.block_index_range(h + 1, c - 1) if self.slice.dim(h + 1) else (0, 0)
        if rows[0] == rows[1]:
            self._kernels[key] = prev
            return prev
        dmat = self.slice.d_total(h)
        strip = dmat[rows[0]:rows[1]]
        thin = _thin_from(prev)
        image = mat_mul(strip, thin)
        coeffs = nullspace(image, ncols=len(prev))
        basis = [mat_vec(thin, co) for co in coeffs]
        self._kernels[key] = basis
        return basis

    def page_dim(self, r, p, h):
        """dim E_r at (p, h) as cycles modulo boundaries of the filtration."""
        zc = self.cycle_basis(p, min(p + r, self.Q + 1), h)
        if not zc:
            return 0
        upper = self.cycle_basis(p + 1, min(p + r, self.Q + 1), h)
        lower = []
        q = p - r + 1
        if h > 0:
            prev = self.cycle_basis(max(q, 0), p, h - 1)
            if prev:
                dmat = self.slice.d_total(h - 1)
                lower = [mat_vec(dmat, v) for v in prev]
                lower = [v for v in lower if not is_zero_vector(v)]
        boundary = [list(v) for v in upper] + lower
        dim_b = rank(from_columns(boundary)) if boundary else 0
        return len(zc) - dim_b


_FILTERED_CACHE = {}


def filtered_complex(alg, tau):
    key = (id(alg), tau)
    fc = _FILTERED_CACHE.get(key)
    if fc is None or fc.alg is not alg:
        fc = FilteredComplex(alg, tau)
        _FILTERED_CACHE[key] = fc
    return fc


def filtered_page_dims(alg, r, p, tau):
    """Page dimensions from the filtered total complex: {h: dim}.

    Must coincide with dim Z_r - dim B_r of the blockwise route for every
    page; the two computations share no code beyond the slice matrices.
    """
    fc = filtered_complex(alg, tau)
    return {h: fc.page_dim(r, p, h) for h in range(alg.n + 1)
            if fc.slice.dim(h)}


def blockwise_page_dims(alg, r, p, tau):
    pc = page_computer(alg, tau)
    return {h: pc.page_dim(r, p, h) for h in range(alg.n + 1)
            if pc.slice.dim(h)}


def infinity_page_dims(alg, tau):
    """Stable page dims per degree, summed over the filtration weight."""
    pc = page_computer(alg, tau)
    r = hausdorff_dimension(alg) + 1
    out = {}
    for h in range(alg.n + 1):
        total = 0
        for p in range(min(tau, hausdorff_dimension(alg)) + 1):
            if pc.block_dim(h, p):
                total += pc.page_dim(r, p, h)
        out[h] = total
    return out


def brute_cohomology(alg, tau):
    """Cohomology dims of one slice by plain rank-nullity: {h: dim}."""
    sl = Slice(alg, tau)
    dims = {}
    ranks = {}
    for h in range(alg.n + 1):
        mat = sl.d_total(h)
        ranks[h] = rank(mat) if sl.dim(h) and sl.dim(h + 1) else 0
    for h in range(alg.n + 1):
        dim = sl.dim(h)
        if dim == 0:
            dims[h] = 0
            continue
        dims[h] = dim - ranks[h] - (ranks[h - 1] if h else 0)
    return dims


# ---- identity checks ----------------------------------------------------


@dataclass
class BlockCheck:
    p: int
    h: int
    ok: bool
    detail: str = ""


@dataclass
class IdentityReport:
    alg_name: str
    tau: int
    ok: bool
    blocks: list = field(default_factory=list)
    weight_parts: dict = field(default_factory=dict)


def rumin_vs_pages(alg, tau):
    """Compare the Rumin differential with the summed page operators.

    Both sides are sandwiched between E_0 projections on the slice: the
    left side is Pi_E0 d Pi_E, the right side the sum over r of
    d_r - sum_i d_i W_{r-i} with the canonical witness operators.  The
    matrices must agree entry for entry; the report also records, per
    source weight p, which weight jumps r actually occur in d_c.
    """
    pc = page_computer(alg, tau)
    ops = pc.ops
    sl = pc.slice
    report = IdentityReport(alg.name, tau, True)
    qmax = min(tau, hausdorff_dimension(alg))
    for h in range(alg.n + 1):
        if sl.dim(h) == 0:
            continue
        vecs, meta = ops.e0_slice_basis(h)
        if not vecs or sl.dim(h + 1) == 0:
            continue
        thin = _thin_from(vecs)
        lhs = mat_mul(ops.proj_e0_mat(h + 1),
                      mat_mul(sl.d_total(h), ops.apply_pi_e(h, thin)))
        rhs = None
        for r in range(1, qmax + 1):
            term = mat_mul(pc.residual_op(r, h), thin)
            rhs = term if rhs is None else mat_add_inplace(rhs, term)
        rhs = mat_mul(ops.proj_e0_mat(h + 1), rhs) if rhs is not None else lhs
        diff = mat_sub(lhs, rhs)
        # columns of the thin block are E0 basis vectors tagged with weights
        col_weights = {}
        for jcol, (a, bi, e) in enumerate(meta):
            colblock = col_weights.setdefault(a, [])
            colblock.append(jcol)
        for p_w, cols in sorted(col_weights.items()):
            bad = [(i, j) for j in cols for i, row in enumerate(diff) if row[j]]
            ok = not bad
            if not ok:
                report.ok = False
            report.blocks.append(BlockCheck(p_w, h, ok,
                                            "" if ok else "first mismatch row %d" % bad[0][0]))
            jumps = []
            for r in range(1, qmax + 1):
                rows = sl.block_index_range(h + 1, p_w + r)
                if rows[0] == rows[1]:
                    continue
                if any(lhs[i][j] for i in range(rows[0], rows[1]) for j in cols):
                    jumps.append(r)
            report.weight_parts[(p_w, h)] = jumps
    return report


def mat_add_inplace(a, b):
    for ra, rb in zip(a, b):
        for i, v in enumerate(rb):
            if v:
                ra[i] += v
    return a


def random_constrained_boundary(alg, r, p, tau, h, rng):
    """A random tuple (c_{p-k}) satisfying the boundary constraints, with
    its x and its explicit witnesses z_{p+j} = -sum_i d_{j+i} c_{p-i}.

    Returns None when the constraint space of the block is trivial.
    """
    pc = page_computer(alg, tau)
    dim = pc.block_dim(h, p)
    if dim == 0 or h == 0:
        return None
    ks = [k for k in range(r) if p - k >= 0 and pc.block_dim(h - 1, p - k)]
    if not ks:
        return None
    widths = {k: pc.block_dim(h - 1, p - k) for k in ks}
    offsets = {}
    acc = 0
    for k in ks:
        offsets[k] = acc
        acc += widths[k]
    rows_out = []
    for l in range(1, r):
        tgt = pc.block_range(h, p - l)
        if tgt[0] == tgt[1]:
            continue
        strip = [[ZERO] * acc for _ in range(tgt[1] - tgt[0])]
        for k in ks:
            if k < l:
                continue
            sub = _submatrix(pc.d_i(k - l, h - 1), tgt, pc.block_range(h - 1, p - k))
            for ri in range(len(strip)):
                row = strip[ri]
                for ci, v in enumerate(sub[ri]):
                    if v:
                        row[offsets[k] + ci] += v
        rows_out.extend(strip)
    if rows_out:
        kernel = nullspace(rows_out, ncols=acc)
    else:
        kernel = [ev for ev in identity(acc)]
    if not kernel:
        return None
    tup = [ZERO] * acc
    for v in kernel:
        coeff = Q(rng.randint(-4, 4))
        if coeff:
            for i, x in enumerate(v):
                if x:
                    tup[i] += coeff * x
    c_blocks = {k: tup[offsets[k]:offsets[k] + widths[k]] for k in ks}
    x = [ZERO] * dim
    tgt = pc.block_range(h, p)
    for k in ks:
        sub = _submatrix(pc.d_i(k, h - 1), tgt, pc.block_range(h - 1, p - k))
        piece = c_blocks[k]
        for ri in range(dim):
            v = dot(sub[ri], piece)
            if v:
                x[ri] += v
    witnesses = {}
    for j in range(1, r):
        rows = pc.block_range(h, p + j)
        if rows[0] == rows[1]:
            witnesses[j] = []
            continue
        z = [ZERO] * (rows[1] - rows[0])
        for k in ks:
            sub = _submatrix(pc.d_i(j + k, h - 1), rows, pc.block_range(h - 1, p - k))
            piece = c_blocks[k]
            for ri in range(len(z)):
                v = dot(sub[ri], piece)
                if v:
                    z[ri] -= v
        witnesses[j] = z
    return {"c": c_blocks, "x": x, "witness": witnesses, "ks": ks}


def check_boundary_in_cycles(alg, r, p, tau, h, sample):
    """Verify (star) conditions for a sampled boundary with its witnesses.

    Checks d_0 x = 0 and, for every level n < r, that d_n x equals the
    d-image of the witness tuple in the (p+n, h+1) block; also that x lies
    in the span of the computed Z_r basis.
    """
    pc = page_computer(alg, tau)
    x = sample["x"]
    cols = pc.block_range(h, p)
    for n in range(r):
        tgt = pc.block_range(h + 1, p + n)
        if tgt[0] == tgt[1]:
            continue
        lhs = mat_vec(_submatrix(pc.d_i(n, h), tgt, cols), x)
        rhs = [ZERO] * len(lhs)
        for i in range(n):
            j = n - i
            z = sample["witness"].get(j, [])
            if not z:
                continue
            sub = _submatrix(pc.d_i(i, h), tgt, pc.block_range(h, p + j))
            for ri in range(len(rhs)):
                v = dot(sub[ri], z)
                if v:
                    rhs[ri] += v
        if lhs != rhs:
            return False
    zb = pc.z_block(r, p, h)
    cols_mat = _thin_from(zb)
    if is_zero_vector(x):
        return True
    if not zb:
        return False
    return solve(cols_mat, x) is not None
