"""Unit tests for quartic root location criteria"""

import numpy as np
import pytest

from msstab.core.errors import DegenerateDenominator
from msstab.core.polystab import (
    QuarticCoeffs,
    elaydi_condition,
    jury_third_condition,
    quartic_roots,
    radius_verdict,
    schur_coefficients,
    schur_cohn_determinants,
    schur_cohn_general,
    schur_cohn_jury,
    schur_cohn_matrix,
    schur_cohn_minors,
    schur_recursion,
    spectral_radius_of,
)
from msstab.core.verdict import VerdictStatus

STABLE_ROOTS = [0.5, -0.3, 0.2 + 0.4j, 0.2 - 0.4j]
UNSTABLE_ROOTS = [1.2, 0.1, 0.1, 0.1]


def _random_roots(rng, radius):
    """Conjugate-closed roots: four real, two real and a pair, or two pairs"""
    kind = rng.integers(3)
    if kind == 0:
        return rng.uniform(-radius, radius, 4).astype(complex)
    pairs = rng.uniform(0.0, radius, 2) * np.exp(1j * rng.uniform(0.0, np.pi, 2))
    if kind == 1:
        real = rng.uniform(-radius, radius, 2)
        return np.array([pairs[0], pairs[0].conjugate(), real[0], real[1]])
    return np.concatenate([pairs, pairs.conj()])


@pytest.fixture
def stable_quartic():
    return QuarticCoeffs.from_roots(STABLE_ROOTS)


@pytest.fixture
def unstable_quartic():
    return QuarticCoeffs.from_roots(UNSTABLE_ROOTS)


@pytest.mark.unit
class TestQuarticCoeffs:
    """Test the coefficient container"""

    def test_from_roots_expands_monic_polynomial(self):
        """Happy path: roots 1, 2, 3, 4 give the familiar coefficients"""
        p = QuarticCoeffs.from_roots([1, 2, 3, 4])
        assert p.as_tuple() == pytest.approx((-10.0, 35.0, -50.0, 24.0))

    def test_nonfinite_coefficient(self):
        """Error case: coefficients must be finite"""
        with pytest.raises(ValueError):
            QuarticCoeffs(0.0, float("inf"), 0.0, 0.0)


@pytest.mark.unit
class TestSchurCoefficients:
    """Test the closed-form and generic Schur recursions"""

    def test_first_coefficient_is_constant_term(self, stable_quartic):
        """Happy path: nu0 = p4"""
        assert schur_coefficients(stable_quartic).nu0 == stable_quartic.p4

    def test_closed_form_matches_generic_recursion(self, stable_quartic):
        """Invariant: both recursions produce the same coefficients"""
        nus, _ = schur_recursion(stable_quartic.ascending())
        closed = schur_coefficients(stable_quartic).as_array()
        np.testing.assert_allclose(nus, closed, atol=1e-12)

    @pytest.mark.slow
    def test_closed_form_matches_recursion_in_unit_disk(self):
        """Invariant: closed-form nu_k track the generic recursion on 10^4 quartics"""
        rng = np.random.default_rng(23)
        worst = 0.0
        for _ in range(10_000):
            p = QuarticCoeffs.from_roots(_random_roots(rng, 1.0))
            try:
                nus, _ = schur_recursion(p.ascending())
                closed = schur_coefficients(p).as_array()
            except DegenerateDenominator:
                continue
            worst = max(worst, float(np.max(np.abs(nus - closed))))
        assert worst < 1e-11

    def test_stable_polynomial_has_coefficients_inside(self, stable_quartic):
        """Happy path: every |nu_k| < 1 for a stable quartic"""
        assert schur_coefficients(stable_quartic).all_inside()

    def test_degenerate_first_denominator(self):
        """Error case: p4 = 1 makes 1 - p4^2 vanish"""
        with pytest.raises(DegenerateDenominator) as excinfo:
            schur_coefficients(QuarticCoeffs(0.1, 0.2, 0.3, 1.0))
        assert excinfo.value.index == 1


@pytest.mark.unit
class TestCriteria:
    """Test that every criterion locates the roots"""

    @pytest.mark.parametrize(
        "criterion",
        [schur_cohn_jury, schur_cohn_general, schur_cohn_determinants, radius_verdict],
    )
    def test_stable_quartic(self, criterion, stable_quartic):
        """Happy path: roots inside the unit disk are Stable"""
        assert criterion(stable_quartic).status is VerdictStatus.STABLE

    @pytest.mark.parametrize(
        "criterion",
        [schur_cohn_jury, schur_cohn_general, schur_cohn_determinants, radius_verdict],
    )
    def test_unstable_quartic(self, criterion, unstable_quartic):
        """Happy path: a root at 1.2 is Unstable"""
        assert criterion(unstable_quartic).status is VerdictStatus.UNSTABLE

    def test_root_on_unit_circle_is_marginal(self):
        """Edge case: a root at exactly 1 is neither stable nor unstable"""
        p = QuarticCoeffs.from_roots([1.0, 0.5, 0.2, -0.1])
        assert schur_cohn_jury(p).status is VerdictStatus.MARGINAL
        assert radius_verdict(p).status is VerdictStatus.MARGINAL

    def test_jury_names_failed_condition(self, unstable_quartic):
        """Happy path: Unstable verdicts report the first violated inequality"""
        verdict = schur_cohn_jury(unstable_quartic)
        assert verdict.failed_condition in (1, 2, 3)
        assert verdict.witness < 0

    def test_third_conditions_agree_on_random_quartics(self):
        """Invariant: the Jury and Elaydi third conditions have the same sign"""
        rng = np.random.default_rng(11)
        for _ in range(200):
            roots = rng.uniform(0.0, 1.2, 2) * np.exp(1j * rng.uniform(0, np.pi, 2))
            p = QuarticCoeffs.from_roots(np.concatenate([roots, roots.conj()]))
            if abs(p.p4) >= 1.0:
                continue
            jury_lhs, jury_rhs = jury_third_condition(p)
            elaydi_lhs, elaydi_rhs = elaydi_condition(p)
            if abs(jury_rhs - jury_lhs) < 1e-9 or abs(elaydi_rhs - elaydi_lhs) < 1e-9:
                continue
            assert (jury_lhs < jury_rhs) == (elaydi_lhs < elaydi_rhs)

    @pytest.mark.slow
    def test_third_conditions_agree_at_scale(self):
        """Invariant: Jury and Elaydi third conditions share a sign on 10^4 quartics"""
        rng = np.random.default_rng(13)
        compared = 0
        for _ in range(10_000):
            p = QuarticCoeffs.from_roots(_random_roots(rng, 1.5))
            if abs(p.p4) >= 1.0:
                continue
            jury_lhs, jury_rhs = jury_third_condition(p)
            elaydi_lhs, elaydi_rhs = elaydi_condition(p)
            if abs(jury_rhs - jury_lhs) < 1e-9 or abs(elaydi_rhs - elaydi_lhs) < 1e-9:
                continue
            assert (jury_lhs < jury_rhs) == (elaydi_lhs < elaydi_rhs), p
            compared += 1
        assert compared > 1_000

    def test_minors_positive_iff_stable(self, stable_quartic, unstable_quartic):
        """Happy path: Schur-Cohn minors are positive for a stable quartic only"""
        assert all(m > 0 for m in schur_cohn_minors(stable_quartic))
        assert not all(m > 0 for m in schur_cohn_minors(unstable_quartic))

    def test_vanishing_minors_still_unstable(self):
        """Edge case: minors shrinking below the tolerance do not hide a root at 1.08"""
        p = QuarticCoeffs(-0.0488, -1.9248, -0.0477, 0.99728)
        assert spectral_radius_of(p) > 1.05
        assert abs(schur_cohn_minors(p)[-1]) < 1e-9
        for criterion in (schur_cohn_determinants, schur_cohn_jury, schur_cohn_general):
            assert criterion(p).status is VerdictStatus.UNSTABLE

    @pytest.mark.slow
    def test_criteria_match_planted_roots(self):
        """Invariant: every criterion is Stable iff the planted radius is below 1"""
        rng = np.random.default_rng(31)
        checked = 0
        for _ in range(10_000):
            roots = _random_roots(rng, 1.5)
            rho = float(np.max(np.abs(roots)))
            if abs(rho - 1.0) <= 1e-6:
                continue
            p = QuarticCoeffs.from_roots(roots)
            expected = VerdictStatus.STABLE if rho < 1.0 else VerdictStatus.UNSTABLE
            for criterion in (
                schur_cohn_jury,
                schur_cohn_general,
                schur_cohn_determinants,
            ):
                assert criterion(p).status is expected, (criterion.__name__, roots)
            checked += 1
        assert checked > 9_900

    def test_matrix_positive_definite_iff_stable(self):
        """Invariant: the Schur-Cohn matrix is positive definite exactly when stable"""
        rng = np.random.default_rng(37)
        for _ in range(2_000):
            roots = _random_roots(rng, 1.5)
            rho = float(np.max(np.abs(roots)))
            if abs(rho - 1.0) <= 1e-3:
                continue
            p = QuarticCoeffs.from_roots(roots)
            stable = rho < 1.0
            assert all(m > 0 for m in schur_cohn_minors(p)) == stable
            if stable:
                assert np.all(np.linalg.eigvalsh(schur_cohn_matrix(p)) > 0)


@pytest.mark.unit
class TestQuarticRoots:
    """Test the Durand-Kerner root oracle"""

    def test_recovers_roots(self, stable_quartic):
        """Happy path: the computed roots match the generating roots"""
        roots = quartic_roots(stable_quartic).roots
        for expected in STABLE_ROOTS:
            assert np.min(np.abs(roots - expected)) < 1e-8

    def test_spectral_radius(self, stable_quartic, unstable_quartic):
        """Happy path: largest modulus of the roots"""
        assert spectral_radius_of(stable_quartic) == pytest.approx(0.5, abs=1e-9)
        assert spectral_radius_of(unstable_quartic) == pytest.approx(1.2, abs=1e-6)

    def test_residual_is_small(self, stable_quartic):
        """Happy path: the residual is reported and below tolerance"""
        result = quartic_roots(stable_quartic)
        assert result.residual < 1e-10
        assert result.iterations >= 1
