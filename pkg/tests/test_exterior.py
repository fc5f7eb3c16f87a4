import random

from carnot.exterior import (Covector, MixedWeight, ce_differential,
                             covector_basis, covector_str, inner_product,
                             wedge, weight, weight_blocks, weight_split)
from carnot.lie_core import hausdorff_dimension
from carnot.linalg import Q


def rand_covector(rng, n, degree):
    terms = {}
    for mono in covector_basis_tuples(n, degree):
        if rng.random() < 0.4:
            terms[mono] = Q(rng.randint(-3, 3))
    return Covector(degree, terms)


def covector_basis_tuples(n, degree):
    from itertools import combinations
    return list(combinations(range(n), degree))


def test_wedge_basics():
    t1, t2 = Covector.theta(1), Covector.theta(2)
    assert wedge(t1, t2) == Covector.basis((0, 1))
    assert wedge(t2, t1) == -Covector.basis((0, 1))
    assert wedge(t1, t1).is_zero()


def test_wedge_associative_anticommutative():
    rng = random.Random(11)
    for _ in range(25):
        x = rand_covector(rng, 5, rng.randint(0, 2))
        y = rand_covector(rng, 5, rng.randint(0, 2))
        z = rand_covector(rng, 5, rng.randint(0, 2))
        assert wedge(wedge(x, y), z) == wedge(x, wedge(y, z))
        sign = (-1) ** (x.degree * y.degree)
        assert wedge(x, y) == wedge(y, x).scale(sign)


def test_weight_examples(heisenberg):
    assert weight(heisenberg, Covector.theta(3)) == 2
    assert weight(heisenberg, wedge(Covector.theta(1), Covector.theta(3))) == 3
    mixed = weight(heisenberg, Covector.theta(1) + Covector.theta(3))
    assert isinstance(mixed, MixedWeight)
    assert mixed.weights() == [1, 2]
    split = weight_split(heisenberg, Covector.theta(1) + Covector.theta(3))
    assert split[1] == Covector.theta(1) and split[2] == Covector.theta(3)


def test_weight_of_scalars_and_zero(heisenberg):
    assert weight(heisenberg, Covector.basis(())) == 0
    assert weight(heisenberg, Covector.zero(2)) == 0


def test_inner_product_orthonormal():
    t12 = Covector.basis((0, 1))
    assert inner_product(t12, t12) == 1
    assert inner_product(Covector.theta(1), Covector.theta(3)) == 0
    x = Covector.theta(1).scale(2) + Covector.theta(2)
    assert inner_product(x, Covector.theta(2)) == 1


def test_inner_product_weight_orthogonality(corpus):
    # covectors of different pure weight are orthogonal, for every degree
    for alg in corpus.values():
        for h in range(alg.n + 1):
            blocks = weight_blocks(alg, h)
            monos = [(a, m) for a, blk in blocks.items() for m in blk.basis]
            for i, (a, ma) in enumerate(monos):
                for b, mb in monos[i + 1:]:
                    if a != b:
                        assert inner_product(Covector.basis(ma), Covector.basis(mb)) == 0


def test_ce_differential_heisenberg(heisenberg):
    assert ce_differential(heisenberg, Covector.theta(3)) == \
        -Covector.basis((0, 1))
    assert ce_differential(heisenberg, Covector.theta(1)).is_zero()


def test_ce_differential_abelian(abelian):
    rng = random.Random(12)
    for _ in range(10):
        x = rand_covector(rng, 3, rng.randint(0, 3))
        assert ce_differential(abelian, x).is_zero()


def test_ce_squares_to_zero(corpus):
    for alg in corpus.values():
        for h in range(alg.n + 1):
            for mono in covector_basis(alg, h):
                dd = ce_differential(alg, ce_differential(alg, Covector.basis(mono)))
                assert dd.is_zero()


def test_ce_preserves_weight(corpus):
    for alg in corpus.values():
        for h in range(alg.n):
            for mono in covector_basis(alg, h):
                x = Covector.basis(mono)
                dx = ce_differential(alg, x)
                if not dx.is_zero():
                    assert weight(alg, dx) == weight(alg, x)


def test_ce_leibniz(corpus):
    rng = random.Random(13)
    for alg in corpus.values():
        for _ in range(15):
            x = rand_covector(rng, alg.n, rng.randint(0, 2))
            y = rand_covector(rng, alg.n, rng.randint(0, 2))
            lhs = ce_differential(alg, wedge(x, y))
            rhs = wedge(ce_differential(alg, x), y) + \
                wedge(x, ce_differential(alg, y)).scale((-1) ** x.degree)
            assert lhs == rhs


def test_top_covector_weight_is_hausdorff_dimension(corpus):
    for alg in corpus.values():
        top = Covector.basis(tuple(range(alg.n)))
        assert weight(alg, top) == hausdorff_dimension(alg)


def test_weight_blocks_partition(corpus):
    for alg in corpus.values():
        for h in range(alg.n + 1):
            blocks = weight_blocks(alg, h)
            total = sum(len(b.basis) for b in blocks.values())
            assert total == len(covector_basis(alg, h))
            for a, blk in blocks.items():
                assert blk.degree == h and blk.b == h - a


def test_covector_str_deterministic():
    x = Covector.basis((0, 1)).scale(-1) + Covector.basis((0, 2)).scale(Q(1, 2))
    assert covector_str(x) == "-1 * t1^t2 + 1/2 * t1^t3"
    assert covector_str(Covector.zero(1)) == "0"
    assert covector_str(Covector.basis(())) == "1 * 1"
