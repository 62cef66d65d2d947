import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from annular_dirichlet import phi_ode as po
from annular_dirichlet.weights import Weight

from conftest import closed_form_phi


def k_for_phi0(phi0, s=1.0):
    """Invert the closed-form family at s for the unit weight."""
    return s * s * (1.0 - phi0) / (1.0 + phi0)


class TestSolveAgainstClosedForm:
    @pytest.mark.parametrize("phi0", [-0.6, -0.2, 0.0, 0.3, 0.9])
    def test_unit_weight_family(self, phi0):
        w = Weight.constant(1.0, 1.0, 2.0)
        p = po.solve_phi_tilde(w, 1.0, 2.0, phi0)
        exact = closed_form_phi(p.s, k_for_phi0(phi0))
        np.testing.assert_allclose(p.phi_tilde, exact, atol=5e-13)

    def test_scaled_weight_gives_scaled_solution(self):
        w1 = Weight.constant(1.0, 1.0, 2.0)
        w3 = Weight.constant(3.0, 1.0, 2.0)
        p1 = po.solve_phi_tilde(w1, 1.0, 2.0, 0.4)
        p3 = po.solve_phi_tilde(w3, 1.0, 2.0, 3 * 0.4)
        np.testing.assert_allclose(p3.phi_tilde, 3 * p1.phi_tilde, atol=1e-12)

    def test_residual_and_step_error_reported(self):
        w = Weight.constant(1.0, 1.0, 2.0)
        p = po.solve_phi_tilde(w, 1.0, 2.0, 0.3)
        assert p.residual < 1e-9
        assert p.step_error < 1e-11

    def test_a_priori_bound(self):
        # |phi_tilde| <= max lambda along the whole solution
        w = Weight.from_callable(lambda s: 2.0 + np.sin(4 * s), 1.0, 2.0,
                                 samples=8193)
        p = po.solve_phi_tilde(w, 1.0, 2.0, 0.5)
        assert np.max(np.abs(p.phi_tilde)) <= w.max_value() + 1e-12


class TestOdeGrid:
    def test_grid_reuse_matches_fresh_solve(self):
        w = Weight.power(1.0, 1.0, 2.0)
        grid = po.OdeGrid(w, 1.0, 2.0)
        a = po.solve_phi_tilde(w, 1.0, 2.0, 0.2, grid=grid)
        b = po.solve_phi_tilde(w, 1.0, 2.0, 0.2)
        np.testing.assert_array_equal(a.phi_tilde, b.phi_tilde)

    def test_modulus_of_identity_profile(self):
        # phi == lambda gives H(s) = const * s, modulus log(R/r)
        w = Weight.constant(1.0, 1.0, 2.0)
        grid = po.OdeGrid(w, 1.0, 2.0)
        p = po.solve_phi_tilde(w, 1.0, 2.0, 1.0, grid=grid)
        p = po.clamp_and_collapse(p, w)
        assert po.modulus_of(p, w) == pytest.approx(np.log(2.0), abs=1e-12)


class TestClampAndCollapse:
    def test_positive_start_never_clamps(self):
        w = Weight.constant(1.0, 1.0, 2.0)
        p = po.clamp_and_collapse(po.solve_phi_tilde(w, 1.0, 2.0, 0.3), w)
        assert p.r0 == 1.0      # collapse radius degenerates to the inner edge
        np.testing.assert_array_equal(p.phi, p.phi_tilde)

    def test_negative_start_collapse_radius(self):
        # phi0 < 0: phi_tilde = (s^2-k)/(s^2+k) crosses zero at s = sqrt(k)
        w = Weight.constant(1.0, 1.0, 2.0)
        phi0 = -0.3
        p = po.clamp_and_collapse(po.solve_phi_tilde(w, 1.0, 2.0, phi0), w)
        assert p.r0 == pytest.approx(np.sqrt(k_for_phi0(phi0)), abs=1e-10)
        assert np.all(p.phi >= 0.0)
        assert np.all(p.phi[p.s < p.r0] == 0.0)

    def test_clamped_region_is_exactly_zero(self):
        w = Weight.constant(1.0, 1.0, 2.0)
        p = po.clamp_and_collapse(po.solve_phi_tilde(w, 1.0, 2.0, -0.5), w)
        inside = p.phi[p.s < p.r0 * (1 - 1e-12)]
        assert inside.size > 0
        assert np.all(inside == 0.0)


class TestRecoverH:
    def test_conformal_profile(self):
        # phi == lambda == 1 gives H(s) = r_star * s / r
        w = Weight.constant(1.0, 1.0, 2.0)
        p = po.clamp_and_collapse(po.solve_phi_tilde(w, 1.0, 2.0, 1.0), w)
        prof = po.recover_H(p, w, 1.0)
        np.testing.assert_allclose(prof.H, prof.s, rtol=1e-12)
        np.testing.assert_allclose(prof.Hdot, 1.0, rtol=1e-10)

    def test_plateau_in_collapse_case(self):
        w = Weight.constant(1.0, 1.0, 2.0)
        p = po.clamp_and_collapse(po.solve_phi_tilde(w, 1.0, 2.0, -0.5), w)
        prof = po.recover_H(p, w, 1.0)
        inside = prof.H[p.s < p.r0 * (1 - 1e-12)]
        np.testing.assert_array_equal(inside, 1.0)
        assert prof.H[-1] > 1.0
        # the derivative kink at r0 limits the FD residual to ~h^2 there
        assert prof.residual < 1e-4

    def test_H_is_nondecreasing(self):
        w = Weight.power(1.0, 1.0, 2.0)
        p = po.clamp_and_collapse(po.solve_phi_tilde(w, 1.0, 2.0, 0.2), w)
        prof = po.recover_H(p, w, 1.5)
        assert np.all(np.diff(prof.H) >= 0.0)
        assert prof.H[0] == 1.5


class TestNumericalKernels:
    def test_fd_derivative_fourth_order(self):
        x = np.linspace(0.0, 1.0, 101)
        errs = []
        for n in (101, 201):
            x = np.linspace(0.0, 1.0, n)
            d = po.fd_derivative(np.sin(3 * x), x[1] - x[0])
            errs.append(np.max(np.abs(d - 3 * np.cos(3 * x))))
        order = np.log2(errs[0] / errs[1])
        assert order > 3.5

    def test_cumulative_integral_fourth_order(self):
        errs = []
        for n in (101, 201):
            x = np.linspace(0.0, 1.0, n)
            c = po.cumulative_integral(np.exp(x), x[1] - x[0])
            errs.append(np.max(np.abs(c - (np.exp(x) - 1.0))))
        order = np.log2(errs[0] / errs[1])
        assert order > 3.5

    def test_cumulative_integral_preserves_zero_runs(self):
        f = np.zeros(33)
        f[20:] = np.linspace(0.0, 1.0, 13)
        c = po.cumulative_integral(f, 0.1)
        assert np.all(c[:20] == 0.0)
        assert c[-1] > 0.0


@given(phi0=st.floats(min_value=-0.9, max_value=0.99))
@settings(max_examples=20, deadline=None)
def test_solution_matches_family_property(phi0):
    w = Weight.constant(1.0, 1.0, 2.0)
    p = po.solve_phi_tilde(w, 1.0, 2.0, phi0, n=1024)
    exact = closed_form_phi(p.s, k_for_phi0(phi0))
    np.testing.assert_allclose(p.phi_tilde, exact, atol=1e-10)


@given(phi0=st.floats(min_value=0.0, max_value=0.99),
       n=st.sampled_from([512, 1024, 2048]))
@settings(max_examples=15, deadline=None)
def test_modulus_monotone_in_phi0(phi0, n):
    # larger phi0 -> strictly larger target modulus for fixed domain
    w = Weight.constant(1.0, 1.0, 2.0)
    grid = po.OdeGrid(w, 1.0, 2.0, n=n)
    lo = po.clamp_and_collapse(po.solve_phi_tilde(w, 1, 2, phi0, n=n,
                                                  grid=grid), w)
    hi = po.clamp_and_collapse(po.solve_phi_tilde(w, 1, 2, phi0 + 0.005, n=n,
                                                  grid=grid), w)
    assert po.modulus_of(hi, w) > po.modulus_of(lo, w)
