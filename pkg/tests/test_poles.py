import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import decaylab as dl
from decaylab.errors import DegenerateRoots, DomainError


def quadratic_oracle(a2, center, width, omega0):
    """Roots of (w - center + i*width)(w - omega0) - pi*a2/width via cmath."""
    b = -(omega0 + center - 1j * width)
    c = (center - 1j * width) * omega0 - np.pi * a2 / width
    disc = cmath.sqrt(b * b - 4 * c)
    r1 = (-b + disc) / 2
    r2 = (-b - disc) / 2
    return r1, r2


class TestWeisskopfWigner:
    def test_box_rate(self, box_se):
        gamma, half = dl.weisskopf_wigner_rate(box_se, 0.0)
        assert gamma == pytest.approx(2.0 * np.pi * 0.05)
        assert half == pytest.approx(np.pi * 0.05)

    def test_zero_density_inside_support(self):
        # tabulated model with a dead zone in the middle of its support
        m = dl.Tabulated(eps=[0.0, 1.0, 1.1, 2.9, 3.0, 4.0],
                         values=[0.5, 0.5, 0.0, 0.0, 0.5, 0.5])
        gamma, _ = dl.weisskopf_wigner_rate(dl.SelfEnergy(m), 2.0)
        assert gamma == 0.0

    def test_lorentzian_peak(self):
        se = dl.SelfEnergy(dl.Lorentzian(amplitude_sq=0.01, center=0.0, width=1.0))
        gamma, _ = dl.weisskopf_wigner_rate(se, 0.0)
        assert gamma == pytest.approx(0.02 * np.pi)

    def test_outside_support_rejected(self, box_se):
        with pytest.raises(DomainError):
            dl.weisskopf_wigner_rate(box_se, 101.0)


class TestFindPole:
    def test_free_level(self):
        se = dl.SelfEnergy(dl.Box(amplitude_sq=0.0, half_width=10.0))
        pr = dl.find_pole(se, 0.3)
        assert pr.omega_prime == 0.3
        assert pr.omega_dprime == 0.0
        assert pr.residue == pytest.approx(1.0)
        assert pr.converged

    def test_wide_box_weak_coupling_values(self):
        se = dl.SelfEnergy(dl.Box(amplitude_sq=0.05, half_width=1e4))
        pr = dl.find_pole(se, 0.0)
        assert abs(pr.omega_prime) < 1e-4          # shift vanishes at band center
        assert pr.omega_dprime == pytest.approx(np.pi * 0.05, abs=1e-4)

    @pytest.mark.parametrize("params", [
        (0.1, 0.0, 1.0, 0.0),
        (0.05, 0.4, 0.7, -0.2),
        (0.3, -1.0, 2.0, 1.5),
    ])
    def test_matches_quadratic_roots(self, params):
        a2, center, width, omega0 = params
        se = dl.SelfEnergy(dl.Lorentzian(amplitude_sq=a2, center=center, width=width))
        pr = dl.find_pole(se, omega0)
        lp = dl.lorentzian_poles(a2, center, width, omega0)
        dist = min(abs(pr.omega - lp.omega_plus), abs(pr.omega - lp.omega_minus))
        assert dist < 1e-10

    def test_threshold_model_converges(self, threshold_se):
        pr = dl.find_pole(threshold_se, 5.0)
        assert pr.converged
        assert pr.final_residual < 1e-10 * 5.0
        assert 0 < pr.omega_dprime < 0.1

    def test_weak_coupling_limit(self):
        # omega''/(pi D(omega0)) -> 1 as the coupling goes to zero
        ratios = []
        for a2 in (1e-2, 1e-3, 1e-4):
            se = dl.SelfEnergy(dl.Lorentzian(amplitude_sq=a2, center=0.0, width=1.0))
            pr = dl.find_pole(se, 0.0)
            ratios.append(pr.omega_dprime / (np.pi * a2))
        assert abs(ratios[-1] - 1.0) < 0.01
        assert abs(ratios[1] - 1.0) < abs(ratios[0] - 1.0)

    def test_below_threshold_rejected(self, threshold_se):
        with pytest.raises(DomainError):
            dl.find_pole(threshold_se, -1.0)


class TestLorentzianPoles:
    def test_residues_sum_to_one_exactly(self):
        lp = dl.lorentzian_poles(0.1, 0.0, 1.0, 0.0)
        assert abs(lp.residue_plus + lp.residue_minus - 1.0) < 1e-14

    def test_decoupled_limit(self):
        lp = dl.lorentzian_poles(0.0, 0.5, 2.0, -0.3)
        assert lp.omega_plus == pytest.approx(-0.3)
        assert lp.residue_plus == pytest.approx(1.0)
        assert lp.omega_minus == pytest.approx(0.5 - 2.0j)
        assert abs(lp.residue_minus) < 1e-14

    def test_against_cmath_oracle(self):
        lp = dl.lorentzian_poles(0.1, 0.0, 1.0, 0.0)
        r1, r2 = quadratic_oracle(0.1, 0.0, 1.0, 0.0)
        found = sorted((lp.omega_plus, lp.omega_minus), key=lambda z: z.real)
        expected = sorted((r1, r2), key=lambda z: z.real)
        for f, e in zip(found, expected):
            assert abs(f - e) < 1e-13
        for root in found:
            assert -1.0 < root.imag < 0.0

    def test_ordering_by_distance_to_level(self):
        lp = dl.lorentzian_poles(0.01, 3.0, 1.0, -2.0)
        assert abs(lp.omega_plus - (-2.0)) <= abs(lp.omega_minus - (-2.0))

    @given(a2=st.floats(1e-4, 2.0), center=st.floats(-3, 3),
           width=st.floats(0.05, 4.0), omega0=st.floats(-3, 3))
    @settings(max_examples=150, deadline=None)
    def test_bracket_property(self, a2, center, width, omega0):
        # both roots damped, with damping strictly inside (0, width)
        lp = dl.lorentzian_poles(a2, center, width, omega0)
        for root in (lp.omega_plus, lp.omega_minus):
            assert 0.0 < -root.imag < width
        assert abs(lp.residue_plus + lp.residue_minus - 1.0) < 1e-12

    def test_degenerate_roots_reported(self):
        # discriminant vanishes for omega0 = center = 0, A^2 = width^3/(4 pi)
        with pytest.raises(DegenerateRoots):
            dl.lorentzian_poles(1.0 / (4.0 * np.pi), 0.0, 1.0, 0.0)

    def test_width_validation(self):
        with pytest.raises(DomainError):
            dl.lorentzian_poles(0.1, 0.0, -1.0, 0.0)
