"""Clifford representations: relation checks and spinor-trace identities."""

import itertools

import numpy as np
import pytest

from torsionlab import (
    InnerSpace,
    KForm,
    bochner_potential,
    build_rep,
    curvature_endos,
    decompose,
    dirac_torsion_endo,
    form_to_endo,
    basis_form,
    recompose,
    sample_torsion,
    tensor_inner,
)
from torsionlab.multilinear import alternation
from torsionlab.torsion import CartanComponents, TorsionTensor


def random_admissible_riem(rng, n):
    """Anti-symmetric in slots (1,2) and (3,4), otherwise arbitrary."""
    r = rng.standard_normal((n,) * 4)
    r = r - r.transpose(1, 0, 2, 3)
    r = r - r.transpose(0, 1, 3, 2)
    return r / 4.0


class TestBuildRep:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_relations_and_sizes(self, n):
        rep = build_rep(n)
        assert rep.spinor_dim == 2 ** (n // 2)
        rep.validate(tol=1e-13)

    def test_unsupported_dimension(self):
        with pytest.raises(ValueError):
            build_rep(7)
        with pytest.raises(ValueError):
            build_rep(1)

    def test_square_trace_n4(self):
        rep = build_rep(4)
        g = rep.gammas
        assert np.trace(g[0] @ g[1] @ g[1] @ g[0]) == pytest.approx(4.0, abs=1e-13)

    def test_four_gamma_trace_formula(self):
        rep = build_rep(4)
        g = rep.gammas
        d = rep.spinor_dim
        for a, b, c, e in itertools.product(range(4), repeat=4):
            if a == b or c == e:
                continue
            tr = np.trace(g[a] @ g[b] @ g[c] @ g[e])
            expect = d * ((b == c) * (a == e) - (b == e) * (a == c))
            assert tr == pytest.approx(expect, abs=1e-12)

    def test_n3_is_two_by_two(self):
        rep = build_rep(3)
        assert rep.gammas.shape == (3, 2, 2)


class TestFormToEndo:
    def test_one_form_basis(self):
        rep = build_rep(4)
        np.testing.assert_allclose(form_to_endo(basis_form((0,), 4), rep), rep.gammas[0], atol=1e-14)

    def test_four_form_square_trace(self):
        # scalar identity tr(endo(w)^2) = |w|^2/6 for 4-forms in n=4
        rng = np.random.default_rng(1)
        rep = build_rep(4)
        sp = InnerSpace(4)
        for _ in range(20):
            w = KForm(alternation(rng.standard_normal((4,) * 4)))
            endo = form_to_endo(w, rep)
            lhs = complex(np.trace(endo @ endo))
            rhs = tensor_inner(w, w, sp) / 6.0
            assert lhs.imag == pytest.approx(0.0, abs=1e-12)
            assert lhs.real == pytest.approx(rhs, rel=1e-12)

    def test_three_form_endo_hermitian(self):
        rng = np.random.default_rng(2)
        rep = build_rep(4)
        w = KForm(alternation(rng.standard_normal((4,) * 3)))
        endo = form_to_endo(w, rep)
        np.testing.assert_allclose(endo, endo.conj().T, atol=1e-13)


class TestDiracTorsionEndo:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_cartan_part_invisible(self, n):
        sp = InnerSpace(n)
        rep = build_rep(n)
        for seed in range(25):
            s = sample_torsion(sp, "cartan", seed=seed)
            endo = dirac_torsion_endo(s, rep)
            assert np.max(np.abs(endo)) < 1e-13

    def test_zero(self):
        sp = InnerSpace(4)
        rep = build_rep(4)
        endo = dirac_torsion_endo(TorsionTensor(sp, np.zeros((4,) * 3)), rep)
        assert np.max(np.abs(endo)) == 0.0

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_hermitian_iff_no_vector_part(self, n):
        sp = InnerSpace(n)
        rep = build_rep(n)
        for seed in range(10):
            a = sample_torsion(sp, "full", seed=500 + seed)
            c = decompose(a)
            assert np.max(np.abs(c.vector)) > 1e-3  # generic draw
            endo = dirac_torsion_endo(a, rep)
            assert np.max(np.abs(endo - endo.conj().T)) > 1e-10
            no_v = recompose(CartanComponents(sp, np.zeros(n), c.three_form, c.cartan))
            endo2 = dirac_torsion_endo(no_v, rep)
            assert np.max(np.abs(endo2 - endo2.conj().T)) < 1e-10

    def test_equals_three_halves_form_action_for_three_forms(self):
        # 1/4 sum over all tuples = 3/2 * (sum over increasing tuples) on 3-forms
        rng = np.random.default_rng(3)
        sp = InnerSpace(4)
        rep = build_rep(4)
        t = KForm(alternation(rng.standard_normal((4,) * 3)))
        lhs = dirac_torsion_endo(TorsionTensor(sp, t.comps), rep)
        np.testing.assert_allclose(lhs, 1.5 * form_to_endo(t, rep), atol=1e-13)


class TestCurvatureEndos:
    def test_zero(self):
        rep = build_rep(4)
        endos = curvature_endos(np.zeros((4,) * 4), rep)
        assert np.max(np.abs(endos)) == 0.0

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_double_trace_identity(self, n):
        rng = np.random.default_rng(40 + n)
        rep = build_rep(n)
        sp = InnerSpace(n)
        for _ in range(10):
            r = random_admissible_riem(rng, n)
            endos = curvature_endos(r, rep)
            lhs = complex(np.einsum("ijxy,ijyx->", endos, endos))
            rhs = -(2 ** (n // 2)) / 8.0 * tensor_inner(r, r, sp)
            assert lhs.imag == pytest.approx(0.0, abs=1e-10)
            assert lhs.real == pytest.approx(rhs, rel=1e-10)

    def test_single_component_hand_expansion(self):
        # riem_1234 = 1 (plus forced sign partners): O_12 = g3 g4 / 2 and O_21 = -O_12,
        # tr((g3 g4)^2) = -4, so the double trace is 2 * (1/4) * (-4) = -2
        rep = build_rep(4)
        r = np.zeros((4,) * 4)
        r[0, 1, 2, 3] = 1.0
        r[1, 0, 2, 3] = -1.0
        r[0, 1, 3, 2] = -1.0
        r[1, 0, 3, 2] = 1.0
        endos = curvature_endos(r, rep)
        np.testing.assert_allclose(endos[0, 1], 0.5 * rep.gammas[2] @ rep.gammas[3], atol=1e-14)
        total = complex(np.einsum("ijxy,ijyx->", endos, endos))
        assert total.real == pytest.approx(-2.0, abs=1e-13)
        assert total.real == pytest.approx(-(2**2) / 8.0 * 4.0, abs=1e-13)

    def test_symmetry_violation_rejected(self):
        rep = build_rep(4)
        bad = np.zeros((4,) * 4)
        bad[0, 0, 1, 2] = 1.0
        with pytest.raises(ValueError):
            curvature_endos(bad, rep)


class TestBochnerPotential:
    def test_traces(self):
        rng = np.random.default_rng(5)
        rep = build_rep(4)
        sp = InnerSpace(4)
        for _ in range(10):
            dt = KForm(alternation(rng.standard_normal((4,) * 4)))
            rg = float(rng.standard_normal())
            t2 = float(rng.random())
            pot = bochner_potential(dt, rg, t2, rep)
            dt2 = tensor_inner(dt, dt, sp)
            assert pot.trace.real == pytest.approx(-rg + 3 * t2, rel=1e-12, abs=1e-12)
            expect_sq = 0.25 * rg**2 - 1.5 * rg * t2 + 2.25 * t2**2 + 9.0 / 24.0 * dt2
            assert pot.trace_sq.real == pytest.approx(expect_sq, rel=1e-12)
            assert abs(pot.trace.imag) < 1e-12 and abs(pot.trace_sq.imag) < 1e-12

    def test_zero_case(self):
        rep = build_rep(4)
        pot = bochner_potential(KForm(np.zeros((4,) * 4)), 0.0, 0.0, rep)
        assert np.max(np.abs(pot.endo)) == 0.0

    def test_dimension_guard(self):
        rep = build_rep(3)
        with pytest.raises(ValueError):
            bochner_potential(KForm(np.zeros((3,) * 3)), 0.0, 0.0, rep)
