import random
from itertools import combinations

from carnot import exterior
from carnot.derham import PolyForm, Slice
from carnot.exterior import Covector, weight_blocks
from carnot.linalg import (Q, dot, identity, is_zero_matrix, mat_mul,
                           rank, transpose, zeros)
from carnot.poly_coeff import PolyScalar
from carnot.rumin import (RuminOperators, SliceOps, d0_pinv, e0_basis,
                          neumann_inverse, proj_e0, rumin_differential)


# ---- an independent route to the coframe differential ------------------
# evaluates d(theta_J) against (h+1)-tuples of basis vectors through the
# duality pairing, instead of the wedge/Leibniz construction the package
# uses; agreeing matrices make the E0-dimension comparison an honest
# two-path check.

def _det(mat):
    n = len(mat)
    if n == 0:
        return Q(1)
    if n == 1:
        return mat[0][0]
    total = Q(0)
    for j in range(n):
        if mat[0][j]:
            minor = [row[:j] + row[j + 1:] for row in mat[1:]]
            term = mat[0][j] * _det(minor)
            total = total + (term if j % 2 == 0 else -term)
    return total


def _eval_monomial(mono, vectors):
    # <theta_{j1}^...^theta_{jh} | Y_1^...^Y_h> = det <theta_{j_a} | Y_b>
    mat = [[vec.get(j, Q(0)) for vec in vectors] for j in mono]
    return _det(mat)


def ce_matrix_pairing_oracle(alg, h):
    """Matrix of the coframe differential on degree h via the pairing
    (d w)(Y_0..Y_h) = sum_{u<v} (-1)^{u+v} w([Y_u,Y_v], ..no u,v..)."""
    src = list(combinations(range(alg.n), h))
    dst = list(combinations(range(alg.n), h + 1))
    mat = zeros(len(dst), len(src))
    for col, mono in enumerate(src):
        for row, out in enumerate(dst):
            acc = Q(0)
            for u in range(h + 1):
                for v in range(u + 1, h + 1):
                    bracket = alg.bracket(out[u], out[v])
                    if not bracket:
                        continue
                    rest = [{out[w]: Q(1)} for w in range(h + 1) if w != u and w != v]
                    vectors = [{k: Q(c) for k, c in bracket.items()}] + rest
                    val = _eval_monomial(mono, vectors)
                    if val:
                        sign = Q(-1) if (u + v) % 2 else Q(1)
                        acc += sign * val
            if acc:
                mat[row][col] = acc
    return mat


def test_ce_matrix_matches_pairing_oracle(corpus):
    for alg in corpus.values():
        for h in range(alg.n):
            src = list(combinations(range(alg.n), h))
            dst = {m: i for i, m in enumerate(combinations(range(alg.n), h + 1))}
            ours = zeros(len(dst), len(src))
            for col, mono in enumerate(src):
                img = exterior.ce_differential(alg, Covector.basis(mono))
                for m, c in img.terms.items():
                    ours[dst[m]][col] = c
            assert ours == ce_matrix_pairing_oracle(alg, h), (alg.name, h)


def ce_betti_oracle(alg):
    """Lie algebra cohomology dimensions by rank-nullity on oracle matrices."""
    mats = {h: ce_matrix_pairing_oracle(alg, h) for h in range(alg.n + 1)}
    betti = []
    for h in range(alg.n + 1):
        dim = len(list(combinations(range(alg.n), h)))
        r_out = rank(mats[h]) if h < alg.n else 0
        r_in = rank(mats[h - 1]) if h > 0 else 0
        betti.append(dim - r_out - r_in)
    return betti


def test_e0_dims_equal_lie_algebra_cohomology(corpus):
    for alg in corpus.values():
        betti = ce_betti_oracle(alg)
        for h in range(alg.n + 1):
            dims = sum(len(vs) for vs in e0_basis(alg, h).values())
            assert dims == betti[h], (alg.name, h)


def test_e0_heisenberg_shape(heisenberg):
    assert ce_betti_oracle(heisenberg) == [1, 2, 2, 1]
    basis = e0_basis(heisenberg, 2)
    assert list(basis) == [3]  # pure weight 3 in degree 2
    from carnot.exterior import covector_str
    assert [covector_str(v) for v in basis[3]] == ["1 * t1^t3", "1 * t2^t3"]


def test_pseudo_inverse_identities(corpus):
    for alg in corpus.values():
        ops = RuminOperators(alg)
        for h in range(alg.n):
            for a in weight_blocks(alg, h):
                mat = ops.d0_block(a, h)
                if not mat or not mat[0]:
                    continue
                pv = ops.d0_pinv_block(a, h)
                assert mat_mul(mat_mul(mat, pv), mat) == mat
                assert mat_mul(mat_mul(pv, mat), pv) == pv
                sym1 = mat_mul(mat, pv)
                sym2 = mat_mul(pv, mat)
                assert sym1 == transpose(sym1)
                assert sym2 == transpose(sym2)


def test_projector_properties(corpus):
    for alg in corpus.values():
        ops = RuminOperators(alg)
        for h in range(alg.n + 1):
            for a in weight_blocks(alg, h):
                proj = ops.proj_e0_block(a, h)
                if not proj:
                    continue
                assert mat_mul(proj, proj) == proj
                assert proj == transpose(proj)
                if h < alg.n:
                    out = ops.d0_block(a, h)
                    if out and out[0]:
                        assert is_zero_matrix(mat_mul(out, proj))
                if h > 0:
                    into = ops.d0_block(a, h - 1)
                    if into and into[0]:
                        assert is_zero_matrix(mat_mul(proj, into))


def test_e0_equals_kernel_mod_image_blockwise(corpus):
    # range(proj) = Ker d0 o (Im d0)-perp, blockwise
    for alg in corpus.values():
        ops = RuminOperators(alg)
        for h in range(alg.n + 1):
            for a in weight_blocks(alg, h):
                vecs = ops.e0_block_vectors(a, h)
                proj = ops.proj_e0_block(a, h)
                if not proj:
                    continue
                assert rank([list(r) for r in proj]) == len(vecs)
                for v in vecs:
                    out = ops.d0_block(a, h)
                    if out and out[0]:
                        assert all(x == 0 for x in
                                   [dot(row, v) for row in out])


def test_d0_pinv_form_examples(heisenberg):
    t1t2 = PolyForm.from_covector(3, Covector.basis((0, 1)))
    assert d0_pinv(heisenberg, t1t2) == PolyForm(3, 1, {(2,): Q(-1)})
    t1 = PolyForm.from_covector(3, Covector.theta(1))
    assert d0_pinv(heisenberg, t1).is_zero()
    x1 = PolyScalar.variable(3, 0)
    form = PolyForm(3, 2, {(0, 1): x1})
    assert d0_pinv(heisenberg, form) == PolyForm(3, 1, {(2,): -x1})


def test_proj_e0_form_examples(heisenberg):
    t3 = PolyForm.from_covector(3, Covector.theta(3))
    assert proj_e0(heisenberg, t3).is_zero()
    t1 = PolyForm.from_covector(3, Covector.theta(1))
    assert proj_e0(heisenberg, t1) == t1
    # the image of d0 is annihilated
    from carnot.derham import d_component
    rng = random.Random(41)
    for _ in range(8):
        mono = tuple(sorted(rng.sample(range(3), 2)))
        form = PolyForm(3, 2, {mono: PolyScalar.variable(3, rng.randint(0, 2))})
        img = d_component(heisenberg, 0, form)
        if not img.is_zero():
            assert proj_e0(heisenberg, img).is_zero()


def test_coefficient_linearity(corpus):
    rng = random.Random(42)
    for alg in corpus.values():
        for h in range(alg.n + 1):
            monos = list(combinations(range(alg.n), h))
            mono = monos[rng.randrange(len(monos))]
            omega = PolyForm.from_covector(alg.n, Covector.basis(mono))
            e = tuple(rng.randint(0, 1) for _ in range(alg.n))
            f = PolyScalar(alg.n, {e: Q(3, 2)})
            lhs = proj_e0(alg, omega.scalar_mul(f))
            rhs = proj_e0(alg, omega).scalar_mul(f)
            assert lhs == rhs


def test_neumann_nilpotency_bounds(corpus):
    from carnot.lie_core import hausdorff_dimension
    for name, alg in corpus.items():
        for tau in range(0, 4):
            sl = Slice(alg, tau)
            mats, order = neumann_inverse(alg, sl)
            assert order <= min(tau, hausdorff_dimension(alg)) + 1
            so = SliceOps(sl)
            for h in mats:
                k = so.k_op(h)
                power = identity(so.dim(h))
                for _ in range(order):
                    power = mat_mul(k, power)
                assert is_zero_matrix(power)


def test_neumann_heisenberg_small(heisenberg):
    sl = Slice(heisenberg, 2)
    _, order = neumann_inverse(heisenberg, sl)
    assert order <= 5


def test_neumann_abelian_is_identity(abelian):
    sl = Slice(abelian, 3)
    mats, order = neumann_inverse(abelian, sl)
    assert order == 1
    for h, m in mats.items():
        assert m == identity(len(m))


def test_engel_second_order_correction_survives(engel):
    # on a step-3 group P != Id - K for some slice: K^2 has a nonzero entry
    found = False
    for tau in range(2, 5):
        so = SliceOps(Slice(engel, tau))
        for h in range(engel.n + 1):
            if so.dim(h) == 0:
                continue
            k2 = mat_mul(so.k_op(h), so.k_op(h))
            if not is_zero_matrix(k2):
                found = True
    assert found


def test_pi_e_projector_and_chain_map(corpus):
    for name, alg in corpus.items():
        taus = range(0, 3) if alg.n > 4 else range(0, 4)
        for tau in taus:
            so = SliceOps(Slice(alg, tau))
            for h in range(alg.n + 1):
                if so.dim(h) == 0:
                    continue
                pie = so.pi_e_mat(h)
                assert mat_mul(pie, pie) == pie
                if so.dim(h + 1):
                    lhs = mat_mul(so.d(h), pie)
                    rhs = mat_mul(so.pi_e_mat(h + 1), so.d(h))
                    assert lhs == rhs


def test_rumin_differential_squares_to_zero(corpus):
    for name, alg in corpus.items():
        taus = range(0, 3) if alg.n > 4 else range(0, 5)
        for tau in taus:
            dc = rumin_differential(alg, Slice(alg, tau))
            for h in dc:
                m1 = dc[h]
                m2 = dc.get(h + 1)
                if not (m1 and m1[0] and m2 and m2[0]):
                    continue
                assert len(m2[0]) == len(m1)
                assert is_zero_matrix(mat_mul(m2, m1)), (name, tau, h)


def test_rumin_weight_jump_heisenberg(heisenberg):
    # on E0 of the first Heisenberg group d_c jumps weight by exactly 2 in
    # the middle degree: E0^1 has weight 1, E0^2 pure weight 3
    so = SliceOps(Slice(heisenberg, 3))
    _, meta1 = so.e0_slice_basis(1)
    _, meta2 = so.e0_slice_basis(2)
    assert {m[0] for m in meta1} == {1}
    assert {m[0] for m in meta2} == {3}
    mat = so.rumin_differential(1)
    assert any(x for row in mat for x in row)


def test_rumin_dc_annihilates_closed_invariant_form(heisenberg):
    # theta1 is E0, closed, and of pure weight: d_c(theta1) = 0
    so = SliceOps(Slice(heisenberg, 1))
    vecs, meta = so.e0_slice_basis(1)
    col = None
    for i, (a, bi, e) in enumerate(meta):
        if a == 1 and not any(e):
            form = so.slice.form_from_vector(1, vecs[i])
            if form == PolyForm.from_covector(3, Covector.theta(1)):
                col = i
    assert col is not None
    mat = so.rumin_differential(1)
    assert all(row[col] == 0 for row in mat)


def test_abelian_dc_equals_d(abelian):
    # with d0 = 0 the projections are trivial and d_c is d itself
    for tau in range(0, 4):
        so = SliceOps(Slice(abelian, tau))
        for h in range(3):
            if so.dim(h) == 0:
                continue
            vecs, _ = so.e0_slice_basis(h)
            assert len(vecs) == so.dim(h)
            dc = so.rumin_differential(h)
            dmat = so.d(h)
            # both are matrices in the same coordinates up to the E0 basis
            # ordering, which here is a signed permutation of the slice basis
            thin = [list(r) for r in zip(*vecs)] if vecs else []
            assert mat_mul(dmat, thin) == mat_mul(
                [list(r) for r in zip(*so.e0_slice_basis(h + 1)[0])] or
                [[] for _ in range(so.dim(h + 1))], dc)
