import itertools
from fractions import Fraction

import numpy as np
import pytest

from ellcohom import arrangement as arr
from ellcohom.exact_lattice import EPoint, QPair, det, int_inverse
from ellcohom.exceptions import (DuplicateZ, NotConvenient, NotPrimitive, NotTransversal,
                                 NotUnimodular, RankDeficient, SizeLimit)

from helpers import fully_convenient, rand_arrangement

W2 = arr.default_weights(2)
HALF = Fraction(1, 2)


def central(cols, k=2, weights=None):
    return arr.EllipticArrangement(k, 0.1 + 1.1j, weights or arr.default_weights(k),
                                   tuple(arr.EllipticHyperplane(c, 0) for c in cols))


class TestTypes:
    def test_canonical_sign(self):
        h = arr.EllipticHyperplane((-1, 2), EPoint(Fraction(1, 3)))
        assert h.column == (1, -2) and h.offset == EPoint(Fraction(2, 3))
        assert h == arr.EllipticHyperplane((1, -2), EPoint(Fraction(-1, 3)))

    def test_primitive_required(self):
        with pytest.raises(NotPrimitive):
            arr.EllipticHyperplane((2, 4), 0)

    def test_distinct_hyperplanes(self):
        with pytest.raises(ValueError):
            central([(1, 0), (-1, 0)])

    def test_json_roundtrip(self):
        C = arr.discriminantal(2, 2)
        assert arr.EllipticArrangement.from_json(C.to_json()) == C


class TestDiscriminantal:
    @pytest.mark.parametrize("n,k,count", [(1, 1, 1), (2, 2, 5), (1, 3, 6), (3, 2, 7)])
    def test_hyperplane_count(self, n, k, count):
        assert len(arr.discriminantal(n, k)) == count == n * k + k * (k - 1) // 2

    def test_duplicate_z(self):
        with pytest.raises(DuplicateZ):
            arr.discriminantal(2, 1, [QPair(Fraction(1, 3)), QPair(Fraction(4, 3))])

    def test_vertices(self):
        vs = arr.enumerate_vertices(arr.discriminantal(2, 1))
        assert [v.point for v in vs] == [(EPoint(Fraction(1, 3)),), (EPoint(Fraction(2, 3)),)]
        vs = arr.enumerate_vertices(arr.discriminantal(1, 2))
        assert len(vs) == 1 and len(vs[0].incident) == 3
        vs = arr.enumerate_vertices(arr.discriminantal(2, 2))
        assert sorted(len(v.incident) for v in vs) == [2, 2, 3, 3]
        for v in vs:
            diagonal = v.point[0] == v.point[1]
            assert len(v.incident) == (3 if diagonal else 2)


class TestLocalOS:
    def test_examples(self):
        C = central([(1, 0), (0, 1)])
        assert arr.local_os_dim(arr.enumerate_vertices(C)[0], C) == 1
        C = central([(1, 0), (0, 1), (1, -1)])
        vx = arr.enumerate_vertices(C)[0]
        assert arr.local_os_dim(vx, C) == 2 == arr.local_os_dim_bruteforce(vx, C)
        C = central([(1, 0), (0, 1), (1, 1), (1, -1)])
        vx = arr.enumerate_vertices(C)[0]
        assert vx.incident == (0, 1, 2, 3)
        assert arr.local_os_dim_bruteforce(vx, C) == 3 == arr.local_os_dim(vx, C)

    def test_n1_k3_vertex(self):
        C = arr.discriminantal(1, 3)
        vx = arr.enumerate_vertices(C)[0]
        assert arr.local_os_dim(vx, C) == 6 == arr.local_os_dim_bruteforce(vx, C)

    @pytest.mark.parametrize("n,k", [(1, 1), (2, 1), (3, 1), (4, 1), (1, 2), (2, 2), (3, 2), (1, 3), (2, 3)])
    def test_nbc_matches_bruteforce(self, n, k):
        C = arr.discriminantal(n, k)
        for vx in arr.enumerate_vertices(C):
            assert arr.local_os_dim(vx, C) == arr.local_os_dim_bruteforce(vx, C)

    def test_nbc_order_independent(self):
        rng = np.random.default_rng(5)
        C = arr.discriminantal(2, 3)
        for _ in range(3):
            perm = rng.permutation(len(C))
            D = arr.EllipticArrangement(C.k, C.tau, C.weights, tuple(C.hyperplanes[i] for i in perm))
            assert arr.betti(D)[0] == arr.betti(C)[0]

    def test_rank_deficient(self):
        C = central([(1, 0), (0, 1)])
        with pytest.raises(RankDeficient):
            arr.local_os_dim(arr.Vertex((EPoint(0), EPoint(0)), (0,)), C)

    def test_random_arrangements_match_bruteforce(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            C = rand_arrangement(rng)
            for vx in arr.enumerate_vertices(C):
                assert arr.local_os_dim(vx, C) == arr.local_os_dim_bruteforce(vx, C)


class TestVertices:
    def test_transversal_subsets_give_det_squared(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            C = rand_arrangement(rng)
            vs = arr.enumerate_vertices(C)
            for S in itertools.combinations(range(len(C)), C.k):
                d = det(C.columns(S))
                if d == 0:
                    continue
                hits = [v for v in vs if set(S) <= set(v.incident)]
                assert len(hits) == d * d

    def test_size_limit(self):
        C = central([(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1),
                     (1, 3), (3, 1), (1, -3), (3, -1), (2, 3)])
        with pytest.raises(SizeLimit):
            arr.enumerate_vertices(C)


class TestConvenience:
    def test_examples(self):
        assert arr.is_convenient(arr.discriminantal(1, 2, weights=[Fraction(1, 3), Fraction(1, 5)]))
        assert arr.convenience_witness(arr.discriminantal(2, 2, weights=[0, 0])) == ()
        C = arr.discriminantal(1, 2, weights=[HALF, HALF])
        assert arr.convenience_witness(C) == (2,)
        assert C.hyperplanes[2].column == (1, -1)

    def test_betti_refuses(self):
        with pytest.raises(NotConvenient) as info:
            arr.betti(arr.discriminantal(1, 2, weights=[HALF, HALF]))
        assert info.value.witness == (2,)

    def test_single_weight_in_lattice(self):
        C = arr.discriminantal(1, 2, weights=[QPair(1, 2), Fraction(1, 3)])
        assert arr.convenience_witness(C) == (1,)

    def test_admissible_at_vertex(self):
        C = central([(1, 0), (0, 1)])
        vx = arr.enumerate_vertices(C)[0]
        assert arr.admissible_at_vertex(C, vx, (0, 1))
        D = central([(1, 0), (0, 1)], weights=[QPair(1), Fraction(1, 3)])
        assert not arr.admissible_at_vertex(D, arr.enumerate_vertices(D)[0], (0, 1))
        E = central([(1, 0), (0, 1), (1, 1)])
        with pytest.raises(NotTransversal):
            arr.admissible_at_vertex(E, arr.Vertex((EPoint(0), EPoint(0)), (0, 1, 2)), (0,))

    def test_convenience_implies_admissibility(self):
        rng = np.random.default_rng(8)
        for _ in range(15):
            C = rand_arrangement(rng)
            for vx in arr.enumerate_vertices(C):
                for S in itertools.combinations(vx.incident, C.k):
                    if det(C.columns(S)) != 0:
                        assert arr.admissible_at_vertex(C, vx, S)


class TestBetti:
    @pytest.mark.parametrize("n,k,w,total", [
        (2, 1, [Fraction(1, 3)], 2),
        (1, 2, [Fraction(1, 3), Fraction(1, 5)], 2),
        (2, 2, [Fraction(1, 3), Fraction(1, 5)], 6),
    ])
    def test_examples(self, n, k, w, total):
        t, per = arr.betti(arr.discriminantal(n, k, weights=w))
        assert t == total == sum(per.values())

    def test_empty_arrangement(self):
        assert arr.betti(arr.EllipticArrangement(2, 1j, W2, ()))[0] == 0
        assert arr.betti(arr.EllipticArrangement(0, 1j, (), ()))[0] == 1

    def test_invariant_under_translation(self):
        C = arr.discriminantal(2, 2)
        D = arr.translate(C, [QPair(Fraction(1, 5), Fraction(1, 2)), QPair(Fraction(2, 7))])
        assert arr.betti(D)[0] == arr.betti(C)[0]


class TestDeletionRestriction:
    def test_delete(self):
        C = arr.discriminantal(2, 2)
        D = arr.delete(C, 4)
        assert len(D) == 4
        readded = arr.EllipticArrangement(C.k, C.tau, C.weights, D.hyperplanes + (C.hyperplanes[4],))
        assert readded == C
        assert arr.betti(D)[0] <= arr.betti(C)[0]

    def test_restrict_examples(self):
        z = EPoint(Fraction(1, 3), Fraction(1, 5))
        C = arr.EllipticArrangement(2, 1j, W2, (arr.EllipticHyperplane((1, 0), 0),
                                                arr.EllipticHyperplane((1, 1), z)))
        R = arr.restrict(C, 0).arrangement
        assert R.k == 1 and len(R) == 1 and R.hyperplanes[0].offset == z
        C = arr.EllipticArrangement(2, 1j, W2, (arr.EllipticHyperplane((1, 0), 0),
                                                arr.EllipticHyperplane((1, 2), z)))
        R = arr.restrict(C, 0).arrangement
        assert len(R) == 4
        assert all(h.column == (1,) and (h.offset * 2 - z).is_zero() for h in R.hyperplanes)

    def test_restrict_discriminantal_to_diagonal(self):
        R = arr.restrict(arr.discriminantal(2, 2), 4)
        assert sorted(h.offset.sort_key() for h in R.arrangement.hyperplanes) == \
            [(Fraction(1, 3), 0), (Fraction(2, 3), 0)]
        assert R.weights == (QPair(Fraction(1, 3) + Fraction(1, 5)),)
        assert [int(x) for x in R.P[:, 0]] in ([1, 1], [-1, -1])

    def test_discriminantal_defects(self):
        C = arr.discriminantal(2, 2)
        assert arr.betti(C)[0] == 6
        assert arr.betti(arr.delete(C, 4))[0] == 4
        assert arr.betti(arr.restrict(C, 4).arrangement)[0] == 2
        assert all(arr.deletion_restriction_defect(C, j) == 0 for j in range(len(C)))

    def test_single_hyperplane(self):
        C = arr.EllipticArrangement(1, 1j, (Fraction(1, 3),), (arr.EllipticHyperplane((1,), 0),))
        assert arr.betti(C)[0] == 1
        assert arr.betti(arr.delete(C, 0))[0] == 0
        assert arr.restrict(C, 0).arrangement.k == 0
        assert arr.deletion_restriction_defect(C, 0) == 0

    def test_random_k3(self):
        rng = np.random.default_rng(21)
        done = 0
        while done < 3:
            C = rand_arrangement(rng, k=3, n_hyperplanes=(3, 4), den=2)
            j0 = int(rng.integers(len(C)))
            if fully_convenient(C, j0):
                assert arr.deletion_restriction_defect(C, j0) == 0
                done += 1


class TestChangeCoordinates:
    def test_identity(self):
        C = arr.discriminantal(2, 2)
        assert arr.change_coordinates(C, [[1, 0], [0, 1]]) == C

    def test_not_unimodular(self):
        with pytest.raises(NotUnimodular):
            arr.change_coordinates(arr.discriminantal(1, 2), [[2, 0], [0, 1]])

    def test_betti_and_vertices_correspond(self):
        C = arr.discriminantal(2, 2)
        for W in ([[1, 1], [0, 1]], [[2, 1], [1, 1]], [[0, 1], [1, 0]], [[1, -2], [1, -1]]):
            D = arr.change_coordinates(C, W)
            assert arr.betti(D)[0] == arr.betti(C)[0]
            assert arr.is_convenient(D)
            # t' = t W^{-T} sends vertices of C to vertices of D
            Minv = int_inverse(W)
            images = set()
            for v in arr.enumerate_vertices(C):
                images.add(tuple(sum((v.point[i] * int(Minv[j, i]) for i in range(2)), EPoint(0))
                                 for j in range(2)))
            assert images == {v.point for v in arr.enumerate_vertices(D)}


class TestMoebiusOracle:
    @pytest.mark.parametrize("n,k,b", [(1, 1, 1), (1, 2, 2), (2, 2, 6), (2, 1, 2), (1, 3, 6), (3, 2, 12)])
    def test_values(self, n, k, b):
        assert arr.affine_moebius_betti_oracle(n, k) == b

    def test_size_limit(self):
        with pytest.raises(SizeLimit):
            arr.affine_moebius_betti_oracle(4, 3)

    def test_affine_betti_general(self):
        # four lines through one point: |mu| = 3
        assert arr.affine_betti([[1, 0, 0], [0, 1, 0], [1, 1, 0], [1, -1, 0]], 2) == 3
        # parallel lines never meet
        assert arr.affine_betti([[1, 0, 0], [1, 0, 1]], 2) == 0
