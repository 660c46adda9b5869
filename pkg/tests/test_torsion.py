"""Torsion decomposition: loop oracles for the defining formulas, round trips."""

import itertools

import numpy as np
import pytest

from torsionlab import (
    CartanComponents,
    InnerSpace,
    KForm,
    TorsionTensor,
    c12_trace,
    decompose,
    flat,
    invariants,
    recompose,
    sample_torsion,
    tensor_inner,
)
from torsionlab.multilinear import alternation


def vectorial_by_loop(sp, v):
    """Direct evaluation of A_xyz = <x,y><V,z> - <V,y><x,z> on basis tuples."""
    n = sp.dim
    g = sp.metric
    a = np.zeros((n, n, n))
    for x, y, z in itertools.product(range(n), repeat=3):
        a[x, y, z] = g[x, y] * (g @ v)[z] - (g @ v)[y] * g[x, z]
    return a


def parts_tensors(c: CartanComponents):
    sp = c.space
    n = sp.dim
    zero3 = KForm(np.zeros((n,) * 3))
    a1 = recompose(CartanComponents(sp, c.vector, zero3, np.zeros((n,) * 3))).comps
    a2 = c.three_form.comps
    a3 = c.cartan
    return a1, a2, a3


class TestC12Trace:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_pure_vector_gives_n_minus_one_flat_v(self, n):
        rng = np.random.default_rng(n)
        sp = InnerSpace(n)
        v = rng.standard_normal(n)
        a = TorsionTensor(sp, vectorial_by_loop(sp, v))
        np.testing.assert_allclose(c12_trace(a), (n - 1) * flat(v, sp), atol=1e-12)

    def test_antisymmetric_traceless(self):
        sp = InnerSpace(4)
        a = sample_torsion(sp, "antisymmetric", seed=3)
        assert np.max(np.abs(c12_trace(a))) < 1e-12

    def test_cartan_traceless(self):
        sp = InnerSpace(4)
        a = sample_torsion(sp, "cartan", seed=4)
        assert np.max(np.abs(c12_trace(a))) < 1e-12


class TestInvariants:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_pure_vector_twisted_and_trace(self, n):
        rng = np.random.default_rng(10 + n)
        sp = InnerSpace(n)
        v = rng.standard_normal(n)
        a = TorsionTensor(sp, vectorial_by_loop(sp, v))
        vv = float(v @ v)
        inv = invariants(a)
        assert inv.twisted == pytest.approx((n - 1) * vv, rel=1e-12)
        assert inv.trace_norm_sq == pytest.approx((n - 1) ** 2 * vv, rel=1e-12)

    def test_three_form_twisted_is_minus_norm(self):
        sp = InnerSpace(4)
        a = sample_torsion(sp, "antisymmetric", seed=5)
        inv = invariants(a)
        assert inv.twisted == pytest.approx(-inv.norm_sq, rel=1e-12)

    def test_cartan_twisted_is_half_norm(self):
        sp = InnerSpace(5)
        a = sample_torsion(sp, "cartan", seed=6)
        inv = invariants(a)
        assert inv.twisted == pytest.approx(0.5 * inv.norm_sq, rel=1e-12)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_twisted_form_splits_over_parts(self, n):
        # <A, swap A> = (n-1)|V|^2 - |T|^2 + |S|^2/2
        sp = InnerSpace(n)
        for seed in range(20):
            a = sample_torsion(sp, "full", seed=seed)
            c = decompose(a)
            vv = float(c.vector @ c.vector)
            tt = tensor_inner(c.three_form, c.three_form, sp)
            ss = float(np.sum(c.cartan**2))
            expect = (n - 1) * vv - tt + 0.5 * ss
            assert invariants(a).twisted == pytest.approx(expect, rel=1e-11, abs=1e-12)


class TestDecompose:
    def test_three_form_is_fixed_point(self):
        sp = InnerSpace(4)
        t = sample_torsion(sp, "antisymmetric", seed=7)
        c = decompose(t)
        assert np.max(np.abs(c.vector)) < 1e-13
        assert np.max(np.abs(c.cartan)) < 1e-13
        np.testing.assert_allclose(c.three_form.comps, t.comps, atol=1e-13)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_pairwise_orthogonality_both_products(self, n):
        sp = InnerSpace(n)
        for seed in range(25):
            c = decompose(sample_torsion(sp, "full", seed=100 + seed))
            parts = parts_tensors(c)
            for i, j in itertools.combinations(range(3), 2):
                plain = tensor_inner(parts[i], parts[j], sp)
                twisted = tensor_inner(parts[i], parts[j].transpose(1, 0, 2), sp)
                assert abs(plain) < 1e-12 * max(1, abs(plain))
                assert abs(twisted) < 1e-12

    def test_recovers_known_parts(self):
        rng = np.random.default_rng(20)
        sp = InnerSpace(4)
        v = rng.standard_normal(4)
        t = decompose(sample_torsion(sp, "antisymmetric", seed=8)).three_form
        s = decompose(sample_torsion(sp, "cartan", seed=9)).cartan
        a = recompose(CartanComponents(sp, v, t, s))
        c = decompose(a)
        np.testing.assert_allclose(c.vector, v, atol=1e-12)
        np.testing.assert_allclose(c.three_form.comps, t.comps, atol=1e-12)
        np.testing.assert_allclose(c.cartan, s, atol=1e-12)

    def test_projection_linear_and_idempotent(self):
        sp = InnerSpace(4)
        a = sample_torsion(sp, "full", seed=30)
        b = sample_torsion(sp, "full", seed=31)
        ca, cb = decompose(a), decompose(b)
        cab = decompose(TorsionTensor(sp, 2.0 * a.comps - 3.0 * b.comps))
        np.testing.assert_allclose(cab.vector, 2 * ca.vector - 3 * cb.vector, atol=1e-12)
        np.testing.assert_allclose(
            cab.cartan, 2 * ca.cartan - 3 * cb.cartan, atol=1e-12
        )
        again = decompose(recompose(ca))
        np.testing.assert_allclose(again.vector, ca.vector, atol=1e-13)

    def test_dim2_everything_vectorial(self):
        sp = InnerSpace(2)
        a = sample_torsion(sp, "full", seed=32)
        c = decompose(a)
        assert np.max(np.abs(c.three_form.comps)) == 0.0
        assert np.max(np.abs(c.cartan)) == 0.0
        np.testing.assert_allclose(recompose(c).comps, a.comps, atol=1e-13)


class TestRecompose:
    def test_matches_loop_oracle_for_basis_vector(self):
        sp = InnerSpace(3)
        v = np.array([1.0, 0.0, 0.0])
        zero3 = KForm(np.zeros((3, 3, 3)))
        a = recompose(CartanComponents(sp, v, zero3, np.zeros((3, 3, 3))))
        np.testing.assert_allclose(a.comps, vectorial_by_loop(sp, v), atol=1e-13)

    def test_all_zero(self):
        sp = InnerSpace(4)
        zero3 = KForm(np.zeros((4,) * 3))
        a = recompose(CartanComponents(sp, np.zeros(4), zero3, np.zeros((4,) * 3)))
        assert np.max(np.abs(a.comps)) == 0.0

    def test_roundtrip_1000_random_triples(self):
        rng = np.random.default_rng(40)
        for trial in range(1000):
            n = int(rng.integers(3, 7))
            sp = InnerSpace(n)
            v = rng.standard_normal(n)
            t = KForm(alternation(rng.standard_normal((n,) * 3)))
            s = decompose(TorsionTensor(sp, (lambda r: r - r.transpose(0, 2, 1))(rng.standard_normal((n,) * 3)))).cartan
            c = CartanComponents(sp, v, t, s)
            back = decompose(recompose(c))
            scale = max(1.0, np.max(np.abs(v)), np.max(np.abs(t.comps)), np.max(np.abs(s)))
            assert np.max(np.abs(back.vector - v)) <= 1e-12 * scale
            assert np.max(np.abs(back.three_form.comps - t.comps)) <= 1e-12 * scale
            assert np.max(np.abs(back.cartan - s)) <= 1e-12 * scale

    def test_invalid_cartan_part_rejected(self):
        sp = InnerSpace(4)
        bad = np.zeros((4, 4, 4))
        bad[0, 1, 2] = 1.0  # not anti-symmetric in the last two slots
        with pytest.raises(ValueError):
            CartanComponents(sp, np.zeros(4), KForm(np.zeros((4,) * 3)), bad)


class TestSampler:
    def test_cartan_sample_invariants(self):
        sp = InnerSpace(4)
        a = sample_torsion(sp, "cartan", seed=1)
        assert np.max(np.abs(c12_trace(a))) < 1e-12
        cyc = a.comps + a.comps.transpose(1, 2, 0) + a.comps.transpose(2, 0, 1)
        assert np.max(np.abs(cyc)) < 1e-12

    def test_antisymmetric_sample(self):
        sp = InnerSpace(4)
        a = sample_torsion(sp, "antisymmetric", seed=2)
        np.testing.assert_allclose(a.comps, alternation(a.comps), atol=1e-13)

    def test_determinism(self):
        sp = InnerSpace(5)
        a = sample_torsion(sp, "full", seed=77)
        b = sample_torsion(sp, "full", seed=77)
        np.testing.assert_array_equal(a.comps, b.comps)

    def test_dim2_restrictions(self):
        sp = InnerSpace(2)
        with pytest.raises(ValueError):
            sample_torsion(sp, "cartan", seed=1)
        with pytest.raises(ValueError):
            sample_torsion(sp, "antisymmetric", seed=1)


class TestNullSpaceEquivalence:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_c12_zero_iff_no_vector_part(self, n):
        sp = InnerSpace(n)
        # direction 1: kill the vector part, trace must vanish
        for seed in range(10):
            a = sample_torsion(sp, "full", seed=200 + seed)
            c = decompose(a)
            no_v = recompose(CartanComponents(sp, np.zeros(n), c.three_form, c.cartan))
            assert np.max(np.abs(c12_trace(no_v))) < 1e-12
        # direction 2: vanishing trace forces zero vector part
        for seed in range(10):
            a = sample_torsion(sp, "full", seed=300 + seed)
            c = decompose(a)
            killed = TorsionTensor(sp, a.comps - parts_tensors(c)[0])
            assert np.max(np.abs(c12_trace(killed))) < 1e-12
            assert np.max(np.abs(decompose(killed).vector)) < 1e-12

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_norm_splits(self, n):
        sp = InnerSpace(n)
        for seed in range(10):
            a = sample_torsion(sp, "full", seed=400 + seed)
            parts = parts_tensors(decompose(a))
            total = sum(tensor_inner(p, p, sp) for p in parts)
            assert invariants(a).norm_sq == pytest.approx(total, rel=1e-12)
