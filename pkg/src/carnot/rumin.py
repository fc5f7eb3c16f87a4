"""The Rumin complex machinery as exact block operators.

The coefficient-linear part d_0 of the differential acts covector-level on
each (weight, degree) block.  Its pseudo-inverse d_0^-1 is the exact
least-squares inverse for the block inner product: zero off the image of
d_0, the unique preimage orthogonal to the kernel on it.  From these two
come the orthogonal projection onto E_0 = Ker d_0 o (Im d_0)-perp, the
nilpotent Neumann sum P inverting Id + d_0^-1(d - d_0) on a slice, the
homotopy projection Pi_E = Id - dPd_0^-1 - Pd_0^-1 d, and the Rumin
differential d_c = Pi_E0 d Pi_E.  All are finite rational matrices once a
homogeneity slice is fixed.
"""

from . import exterior
from .derham import BlockOperator, PolyForm, Slice
from .linalg import (ZERO, dot, gram_schmidt, identity, is_zero_matrix,
                     mat_mul, mat_sub, nullspace, pinv,
                     orthogonal_complement, zeros)


class RuminOperators:
    """Covector-level blocks of d_0, d_0^-1 and the E_0 projection.

    Blocks are indexed by (weight a, degree h) with the lexicographic
    monomial bases of the exterior module; everything is cached and
    immutable once built, so instances can be shared freely.
    """

    def __init__(self, alg):
        self.alg = alg
        self._d0 = {}
        self._pinv = {}
        self._proj = {}
        self._e0 = {}

    def block(self, a, h):
        return exterior.block_basis(self.alg, a, h)

    def d0_block(self, a, h):
        """Matrix of the coframe differential on the (a, h) block."""
        key = (a, h)
        if key in self._d0:
            return self._d0[key]
        src = self.block(a, h)
        dst = self.block(a, h + 1)
        index = {mono: i for i, mono in enumerate(dst)}
        mat = zeros(len(dst), len(src))
        for col, mono in enumerate(src):
            img = exterior.ce_differential(self.alg, exterior.Covector.basis(mono))
            for m, c in img.terms.items():
                # the coframe differential preserves weight, so m stays in (a, h+1)
                mat[index[m]][col] += c
        self._d0[key] = mat
        return mat

    def d0_pinv_block(self, a, h):
        """Pseudo-inverse of d0_block(a, h); maps the (a, h+1) block back."""
        key = (a, h)
        if key not in self._pinv:
            self._pinv[key] = pinv(self.d0_block(a, h))
        return self._pinv[key]

    def proj_e0_block(self, a, h):
        """Orthogonal projection onto Ker d_0 o (Im d_0)-perp on the block."""
        key = (a, h)
        if key in self._proj:
            return self._proj[key]
        dim = len(self.block(a, h))
        mat = identity(dim)
        if dim:
            if self.block(a, h + 1):
                mat = mat_sub(mat, mat_mul(self.d0_pinv_block(a, h), self.d0_block(a, h)))
            if h > 0 and self.block(a, h - 1):
                into = self.d0_block(a, h - 1)
                mat = mat_sub(mat, mat_mul(into, self.d0_pinv_block(a, h - 1)))
        self._proj[key] = mat
        return mat

    def e0_block_vectors(self, a, h):
        """Orthogonal basis (coordinate vectors) of E_0 on the (a, h) block."""
        key = (a, h)
        if key in self._e0:
            return self._e0[key]
        dim = len(self.block(a, h))
        vecs = []
        if dim:
            kernel = nullspace(self.d0_block(a, h), ncols=dim)
            image = []
            if h > 0 and self.block(a, h - 1):
                into = self.d0_block(a, h - 1)
                image = [col for col in zip(*into)] if any(any(r) for r in into) else []
                image = [list(c) for c in image if any(c)]
            if image:
                perp = orthogonal_complement(image, dim)
                # intersect Ker d0 with (Im d0)-perp
                span = _intersect(kernel, perp)
            else:
                span = kernel
            vecs = gram_schmidt(span)
        self._e0[key] = vecs
        return vecs

    def e0_basis(self, h):
        """Orthogonal covector basis of E_0 in degree h, split by weight."""
        out = {}
        for a in sorted(exterior.weight_blocks(self.alg, h)):
            vecs = self.e0_block_vectors(a, h)
            if vecs:
                basis = self.block(a, h)
                out[a] = [
                    exterior.Covector(h, {m: c for m, c in zip(basis, v) if c})
                    for v in vecs
                ]
        return out

    def e0_dims(self, h):
        return {a: len(self.e0_block_vectors(a, h))
                for a in sorted(exterior.weight_blocks(self.alg, h))
                if self.e0_block_vectors(a, h)}


def _intersect(u_vectors, w_vectors):
    """Basis of span(u) o span(w) via the kernel of [U | -W]."""
    if not u_vectors or not w_vectors:
        return []
    stacked = [list(u) + [-x for x in w] for u, w in
               zip(zip(*u_vectors), zip(*w_vectors))]
    out = []
    for coeffs in nullspace(stacked):
        lam = coeffs[:len(u_vectors)]
        vec = [ZERO] * len(u_vectors[0])
        for c, u in zip(lam, u_vectors):
            if c:
                for i, x in enumerate(u):
                    vec[i] += c * x
        if any(vec):
            out.append(vec)
    return out


def _apply_blockwise(alg, form, block_matrix, degree_shift):
    """Extend a covector-level block operator coefficient-linearly to a form."""
    out_terms = {}
    h = form.degree
    for a in form.weight_support(alg):
        part = form.weight_component(alg, a)
        src = exterior.block_basis(alg, a, h)
        dst = exterior.block_basis(alg, a, h + degree_shift)
        if not src or not dst:
            continue
        mat = block_matrix(a)
        coeffs = {m: p for m, p in part.terms.items()}
        for r, mono_out in enumerate(dst):
            acc = None
            for c, mono_in in enumerate(src):
                v = mat[r][c]
                p = coeffs.get(mono_in)
                if v and p is not None:
                    contrib = p * v
                    acc = contrib if acc is None else acc + contrib
            if acc is not None and not acc.is_zero():
                prev = out_terms.get(mono_out)
                out_terms[mono_out] = acc if prev is None else prev + acc
    return PolyForm(form.nvars, h + degree_shift, out_terms)


def d0_pinv(alg, form):
    """Coefficient-linear pseudo-inverse of d_0 applied to a form.

    Lowers degree by one, preserves weight, vanishes on the orthogonal
    complement of Im d_0.
    """
    ops = _shared_operators(alg)
    if form.degree == 0:
        return PolyForm(form.nvars, 0)
    return _apply_blockwise(alg, form, lambda a: ops.d0_pinv_block(a, form.degree - 1), -1)


def proj_e0(alg, form):
    """Orthogonal projection of a form onto E_0, coefficient-linear."""
    ops = _shared_operators(alg)
    return _apply_blockwise(alg, form, lambda a: ops.proj_e0_block(a, form.degree), 0)


_OPERATOR_CACHE = {}


def _shared_operators(alg):
    ops = _OPERATOR_CACHE.get(id(alg))
    if ops is None or ops.alg is not alg:
        ops = RuminOperators(alg)
        _OPERATOR_CACHE[id(alg)] = ops
    return ops


class SliceOps:
    """All slice-level operator matrices for one homogeneity slice.

    Matrices act between the enumerated degree bases of the slice; degree
    bookkeeping is the caller's: d and d_c raise it by one, d_0^-1 lowers
    it, P and Pi_E preserve it.
    """

    def __init__(self, sl: Slice, operators=None):
        self.slice = sl
        self.alg = sl.alg
        self.ops = operators or _shared_operators(sl.alg)
        self._cache = {}

    def dim(self, h):
        return self.slice.dim(h)

    def d(self, h):
        return self.slice.d_total(h)

    def d_i(self, i, h):
        return self.slice.d_matrix(i, h)

    def d_minus_d0(self, h):
        key = ("dm0", h)
        if key not in self._cache:
            self._cache[key] = mat_sub(self.d(h), self.d_i(0, h))
        return self._cache[key]

    def _lift(self, h_src, degree_shift, block_fn):
        """Tensor a covector-level block operator with the monomial basis."""
        sl = self.slice
        h_dst = h_src + degree_shift
        rows, cols = sl.dim(h_dst), sl.dim(h_src)
        mat = zeros(rows, cols)
        if not rows or not cols:
            return mat
        index = sl.index_map(h_dst)
        for a, (start, ln) in sl.offsets(h_src).items():
            src = exterior.block_basis(self.alg, a, h_src)
            dst = exterior.block_basis(self.alg, a, h_dst)
            if not dst:
                continue
            block = block_fn(a)
            src_pos = {mono: i for i, mono in enumerate(src)}
            for col in range(start, start + ln):
                cov, e = sl.basis(h_src)[col]
                ci = src_pos[cov]
                for r, mono_out in enumerate(dst):
                    v = block[r][ci]
                    if v:
                        mat[index[(mono_out, e)]][col] += v
        return mat

    def d0_pinv_mat(self, h):
        """Slice matrix of d_0^-1 from degree h to degree h-1."""
        key = ("pinv", h)
        if key not in self._cache:
            if h == 0:
                self._cache[key] = zeros(0, self.dim(0))
            else:
                self._cache[key] = self._lift(h, -1, lambda a: self.ops.d0_pinv_block(a, h - 1))
        return self._cache[key]

    def proj_e0_mat(self, h):
        key = ("proj", h)
        if key not in self._cache:
            self._cache[key] = self._lift(h, 0, lambda a: self.ops.proj_e0_block(a, h))
        return self._cache[key]

    def k_op(self, h):
        """K = d_0^-1 (d - d_0): degree-preserving, raises weight, nilpotent."""
        key = ("K", h)
        if key not in self._cache:
            if self.dim(h + 1) == 0 or self.dim(h) == 0:
                self._cache[key] = zeros(self.dim(h), self.dim(h))
            else:
                self._cache[key] = mat_mul(self.d0_pinv_mat(h + 1), self.d_minus_d0(h))
        return self._cache[key]

    def neumann_inverse(self, h):
        """P = sum_k (-1)^k K^k with K as above; returns (matrix, order).

        The order is the first power of K that vanishes on this degree;
        it is at most min(tau, Q) + 1 because K raises weight.
        """
        key = ("P", h)
        if key not in self._cache:
            dim = self.dim(h)
            total = identity(dim)
            power = self.k_op(h)
            sign = -1
            n = 1
            while not is_zero_matrix(power):
                if sign < 0:
                    total = mat_sub(total, power)
                else:
                    for r in range(dim):
                        tr, pr = total[r], power[r]
                        for c in range(dim):
                            if pr[c]:
                                tr[c] += pr[c]
                power = mat_mul(self.k_op(h), power)
                sign = -sign
                n += 1
            self._cache[key] = (total, n)
        return self._cache[key]

    def apply_neumann(self, h, thin):
        """P applied to a thin column block, without forming full powers."""
        total = [row[:] for row in thin]
        term = thin
        sign = -1
        while True:
            term = mat_mul(self.k_op(h), term)
            if is_zero_matrix(term):
                return total
            for r in range(len(total)):
                tr, xr = total[r], term[r]
                for c in range(len(xr)):
                    if xr[c]:
                        tr[c] = tr[c] + sign * xr[c]
            sign = -sign

    def pi_e_mat(self, h):
        """Pi_E = Id - d P d_0^-1 - P d_0^-1 d on degree h."""
        key = ("piE", h)
        if key not in self._cache:
            dim = self.dim(h)
            mat = identity(dim)
            if h > 0 and self.dim(h - 1):
                t1 = mat_mul(self.d(h - 1), self.apply_neumann(h - 1, self.d0_pinv_mat(h)))
                mat = mat_sub(mat, t1)
            if self.dim(h + 1):
                t2 = self.apply_neumann(h, mat_mul(self.d0_pinv_mat(h + 1), self.d(h)))
                mat = mat_sub(mat, t2)
            self._cache[key] = mat
        return self._cache[key]

    def apply_pi_e(self, h, thin):
        out = [row[:] for row in thin]
        if h > 0 and self.dim(h - 1):
            t1 = mat_mul(self.d(h - 1),
                         self.apply_neumann(h - 1, mat_mul(self.d0_pinv_mat(h), thin)))
            out = mat_sub(out, t1)
        if self.dim(h + 1):
            t2 = self.apply_neumann(h, mat_mul(self.d0_pinv_mat(h + 1),
                                               mat_mul(self.d(h), thin)))
            out = mat_sub(out, t2)
        return out

    # ---- E0 bases in slice coordinates --------------------------------

    def e0_slice_basis(self, h):
        """Orthogonal basis of E_0 within the slice: covector basis tensored
        with the coefficient monomials, weight-major like the slice basis."""
        key = ("e0basis", h)
        if key not in self._cache:
            sl = self.slice
            vecs = []
            meta = []
            dim = sl.dim(h)
            base = sl.basis(h)
            for a, (start, ln) in sorted(sl.offsets(h).items()):
                block = exterior.block_basis(self.alg, a, h)
                block_pos = {mono: i for i, mono in enumerate(block)}
                monos = sorted({e for cov, e in base[start:start + ln]})
                for bi, bvec in enumerate(self.ops.e0_block_vectors(a, h)):
                    for e in monos:
                        vec = [ZERO] * dim
                        for mono, c in zip(block, bvec):
                            if c:
                                vec[sl.index_map(h)[(mono, e)]] = c
                        vecs.append(vec)
                        meta.append((a, bi, e))
            self._cache[key] = (vecs, meta)
        return self._cache[key]

    def e0_dim(self, h):
        return len(self.e0_slice_basis(h)[0])

    def e0_coords(self, h, thin):
        """Coordinates of columns of a thin block in the orthogonal E0 basis.

        Columns must lie in the span; exactness makes this an orthogonal
        expansion (dot against each basis vector over its norm).
        """
        vecs, _ = self.e0_slice_basis(h)
        norms = [dot(v, v) for v in vecs]
        cols = list(zip(*thin)) if thin and thin[0] else []
        out = zeros(len(vecs), len(cols))
        for j, col in enumerate(cols):
            col = list(col)
            for i, v in enumerate(vecs):
                c = dot(v, col)
                if c:
                    out[i][j] = c / norms[i]
        return out

    def rumin_differential(self, h):
        """Matrix of d_c on E_0 coordinates, degree h to h+1."""
        key = ("dc", h)
        if key not in self._cache:
            vecs, _ = self.e0_slice_basis(h)
            if not vecs or not self.dim(h + 1):
                self._cache[key] = zeros(self.e0_dim(h + 1), len(vecs))
                return self._cache[key]
            thin = [list(row) for row in zip(*vecs)]
            image = mat_mul(self.proj_e0_mat(h + 1),
                            mat_mul(self.d(h), self.apply_pi_e(h, thin)))
            self._cache[key] = self.e0_coords(h + 1, image)
        return self._cache[key]

    def rumin_block_operator(self, h):
        vecs, meta = self.e0_slice_basis(h)
        _, meta_out = self.e0_slice_basis(h + 1)
        return BlockOperator(
            tuple(_e0_label(m) for m in meta_out),
            tuple(_e0_label(m) for m in meta),
            self.rumin_differential(h))


def _e0_label(meta):
    a, bi, e = meta
    poly = [("x%d" % (i + 1)) if n == 1 else ("x%d^%d" % (i + 1, n))
            for i, n in enumerate(e) if n]
    return "%s e0[w%d,%d]" % ("*".join(poly) if poly else "1", a, bi + 1)


def neumann_inverse(alg, sl: Slice):
    """The operator P per degree on a slice; returns ({h: matrix}, order)."""
    ops = SliceOps(sl)
    mats = {}
    order = 1
    for h in range(alg.n + 1):
        if sl.dim(h) == 0:
            continue
        mats[h], n_h = ops.neumann_inverse(h)
        order = max(order, n_h)
    return mats, order


def rumin_differential(alg, sl: Slice):
    """All d_c matrices of a slice in E_0 coordinates: {h: matrix}."""
    ops = SliceOps(sl)
    return {h: ops.rumin_differential(h) for h in range(alg.n + 1) if sl.dim(h)}


def e0_basis(alg, h):
    """Orthogonal covector-level basis of E_0 in degree h, split by weight."""
    return _shared_operators(alg).e0_basis(h)
