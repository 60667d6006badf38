"""Unit tests for scalar mean-square stability"""

import logging
import math

import numpy as np
import pytest

from msstab.core.errors import CriterionDisagreement, NotApplicable, OutsideDomain
from msstab.core.polystab import (
    schur_cohn_determinants,
    schur_cohn_general,
    schur_cohn_jury,
    spectral_radius_of,
)
from msstab.core.scalar import (
    RegionKind,
    RegionSpec,
    abam_conditions,
    abam_real_conditions,
    build_stability_matrix,
    check_agreement,
    classify,
    criteria_report,
    h0_ab2,
    h0_am2,
    hereditary_conditions,
    hereditary_real_conditions,
    p3_product_form,
    quartic_coeffs,
    region_ab2,
    region_ab2_xy,
    region_am2,
    region_am2_xy,
    sde_stable,
    sufficient_conditions,
    theorem_conditions,
)
from msstab.core.schemes import ReducedCoeffs, ScalarTestEq, catalog, reduce_scalar
from msstab.core.verdict import StabilityVerdict, VerdictStatus

STABLE = VerdictStatus.STABLE
UNSTABLE = VerdictStatus.UNSTABLE


def _random_coeffs(rng, complex_valued: bool) -> ReducedCoeffs:
    values = rng.uniform(-1.0, 1.0, 4)
    if complex_valued:
        values = values + 1j * rng.uniform(-1.0, 1.0, 4)
    return ReducedCoeffs(*(complex(v) for v in values))


def _coeffs_within(rng, complex_valued: bool, radius: float) -> ReducedCoeffs:
    """Reduced coefficients of modulus at most radius"""
    if complex_valued:
        phases = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, 4))
        values = rng.uniform(0.0, radius, 4) * phases
    else:
        values = rng.uniform(-radius, radius, 4)
    return ReducedCoeffs(*(complex(v) for v in values))


@pytest.mark.unit
class TestStabilityMatrix:
    """Test the 4 x 4 second-moment matrix and its quartic"""

    @pytest.mark.parametrize("complex_valued", [False, True])
    def test_characteristic_polynomial(self, complex_valued):
        """Invariant: det(zI - S) has the closed-form coefficients"""
        rng = np.random.default_rng(21)
        for _ in range(20):
            rc = _random_coeffs(rng, complex_valued)
            expected = np.poly(build_stability_matrix(rc))
            p = quartic_coeffs(rc)
            np.testing.assert_allclose(expected.real[1:], p.as_tuple(), atol=1e-12)
            np.testing.assert_allclose(expected.imag, 0.0, atol=1e-12)

    def test_deterministic_recurrence(self):
        """Happy path: with b = d = 0 the eigenvalues are r1^2, r2^2 and r1 r2 twice"""
        rc = ReducedCoeffs(a=0.5, b=0.0, c=0.24, d=0.0)
        r1, r2 = np.roots([1.0, -0.5, -0.24])
        eigenvalues = np.sort(np.linalg.eigvals(build_stability_matrix(rc)).real)
        expected = np.sort([r1 * r1, r2 * r2, r1 * r2, r1 * r2])
        np.testing.assert_allclose(eigenvalues, expected, atol=1e-10)

    def test_p3_product_form(self):
        """Invariant: both ways of writing p3 agree"""
        rng = np.random.default_rng(22)
        for _ in range(20):
            rc = _random_coeffs(rng, True)
            assert p3_product_form(rc) == pytest.approx(quartic_coeffs(rc).p3)


@pytest.mark.unit
class TestTheoremConditions:
    """Test the necessary and sufficient conditions"""

    @pytest.mark.parametrize("complex_valued", [False, True])
    def test_matches_root_oracle(self, complex_valued):
        """Invariant: Stable iff every root of the quartic is inside the unit disk"""
        rng = np.random.default_rng(23)
        checked = 0
        for _ in range(300):
            rc = _random_coeffs(rng, complex_valued)
            radius = spectral_radius_of(quartic_coeffs(rc))
            if abs(radius - 1.0) < 1e-3:
                continue
            verdict = theorem_conditions(rc)
            assert verdict.stable == (radius < 1.0)
            checked += 1
        assert checked > 200

    @pytest.mark.parametrize("complex_valued", [False, True])
    def test_criteria_never_disagree(self, complex_valued):
        """Invariant: every polynomial criterion reaches the theorem's verdict"""
        rng = np.random.default_rng(24)
        for _ in range(100):
            rc = _random_coeffs(rng, complex_valued)
            radius = spectral_radius_of(quartic_coeffs(rc))
            if abs(radius - 1.0) < 1e-3:
                continue
            expected = STABLE if radius < 1.0 else UNSTABLE
            assert check_agreement(criteria_report(rc)) is expected

    @pytest.mark.slow
    @pytest.mark.parametrize("complex_valued", [False, True])
    def test_every_criterion_matches_roots(self, complex_valued):
        """Invariant: over 10^4 samples each criterion follows the quartic roots"""
        rng = np.random.default_rng(26)
        stable = 0
        for _ in range(10_000):
            rc = _coeffs_within(rng, complex_valued, 1.5)
            p = quartic_coeffs(rc)
            radius = float(np.max(np.abs(np.roots(p.descending()))))
            if abs(radius - 1.0) <= 1e-4:
                continue
            expected = STABLE if radius < 1.0 else UNSTABLE
            assert theorem_conditions(rc).status is expected, rc
            for criterion in (
                schur_cohn_jury,
                schur_cohn_general,
                schur_cohn_determinants,
            ):
                assert criterion(p).status is expected, (criterion.__name__, rc)
            stable += expected is STABLE
        assert stable > 100

    def test_failed_condition_one(self):
        """Edge case: |c|^4 + |c|^2 |d|^2 >= 1 fails the first condition"""
        verdict = theorem_conditions(ReducedCoeffs(a=0.1, b=0.1, c=1.1, d=0.2))
        assert verdict.status is UNSTABLE
        assert verdict.failed_condition == 1

    def test_failed_condition_two(self):
        """Edge case: large b fails the second condition only"""
        verdict = theorem_conditions(ReducedCoeffs(a=0.2, b=1.0, c=0.3, d=0.0))
        assert verdict.status is UNSTABLE
        assert verdict.failed_condition == 2

    def test_sufficient_conditions(self):
        """Happy path: small coefficients meet the sufficient conditions"""
        rc = ReducedCoeffs(a=0.2, b=0.5, c=0.3, d=0.0)
        assert sufficient_conditions(rc)
        assert theorem_conditions(rc).stable


@pytest.mark.unit
class TestSpecialisedConditions:
    """Test the Adams-type and hereditary-type conditions"""

    def test_abam_stable(self):
        """Happy path: AB2 at h = 0.1 meets the Adams conditions"""
        rc = reduce_scalar(catalog("ab2"), ScalarTestEq(-5.0, 2.0), 0.1)
        assert abam_conditions(rc).status is STABLE

    def test_abam_unstable(self):
        """Happy path: AB2 at h = 0.25 violates the first Adams condition"""
        rc = reduce_scalar(catalog("ab2"), ScalarTestEq(-5.0, 2.0), 0.25)
        verdict = abam_conditions(rc)
        assert verdict.status is UNSTABLE
        assert verdict.failed_condition == 1

    def test_abam_not_applicable(self):
        """Error case: BDF2 has d != 0"""
        rc = reduce_scalar(catalog("bdf2"), ScalarTestEq(-5.0, 2.0), 0.1)
        with pytest.raises(NotApplicable):
            abam_conditions(rc)

    def test_hereditary(self):
        """Happy path: b = 0 recurrences use the hereditary conditions"""
        rc = ReducedCoeffs(a=0.2, b=0.0, c=0.3, d=0.4)
        assert hereditary_conditions(rc).status is STABLE
        assert theorem_conditions(rc).status is STABLE

    def test_hereditary_not_applicable(self):
        """Error case: AB2 has b != 0"""
        rc = reduce_scalar(catalog("ab2"), ScalarTestEq(-5.0, 2.0), 0.1)
        with pytest.raises(NotApplicable):
            hereditary_conditions(rc)

    def test_real_forms(self):
        """Happy path: real-coefficient forms on 0 < c < 1"""
        assert abam_real_conditions(0.2, 0.5, 0.3)
        assert not abam_real_conditions(0.2, 1.0, 0.3)
        assert hereditary_real_conditions(0.2, 0.3, 0.4)
        assert not hereditary_real_conditions(0.2, -0.3, 0.4)

    def test_real_forms_match_theorem(self):
        """Invariant: on 0 < c < 1 the real Adams form is the theorem"""
        rng = np.random.default_rng(25)
        for _ in range(200):
            a, b = rng.uniform(-1.0, 1.0, 2)
            c = rng.uniform(0.05, 0.95)
            verdict = theorem_conditions(ReducedCoeffs(a=a, b=b, c=c, d=0.0))
            if verdict.status is VerdictStatus.MARGINAL:
                continue
            assert abam_real_conditions(a, b, c) == verdict.stable


@pytest.mark.unit
class TestClassify:
    """Test classification of the schemes on dX = -5 X dt + 2 X dW"""

    EQ = ScalarTestEq(-5.0, 2.0)

    def test_small_step_all_stable(self):
        """Happy path: every scheme is stable at h = 1/8"""
        for token in ("ab2", "ab2i", "am2", "am2i", "bdf2", "bdf2i"):
            assert classify(token, self.EQ, 0.125).status is STABLE, token

    def test_large_step_only_bdf_stable(self):
        """Happy path: at h = 1 only the BDF schemes stay stable"""
        expected = {
            "ab2": UNSTABLE,
            "ab2i": UNSTABLE,
            "am2": UNSTABLE,
            "am2i": UNSTABLE,
            "bdf2": STABLE,
            "bdf2i": STABLE,
        }
        for token, status in expected.items():
            assert classify(token, self.EQ, 1.0).status is status, token

    def test_bdf2_sign_clause_logs_nothing(self, caplog):
        """Edge case: noiseless BDF2 has c < 0 and fails only the sign clause"""
        with caplog.at_level(logging.WARNING, logger="msstab.core.scalar"):
            assert classify("bdf2", ScalarTestEq(-5.0, 0.0), 1.0).stable
        assert caplog.records == []

    def test_verdict_source(self):
        """Happy path: verdicts record their source"""
        assert classify(catalog("am2"), self.EQ, 0.5).source == "theorem"

    def test_agreement_report(self):
        """Happy path: the criteria report holds every criterion"""
        report = criteria_report(reduce_scalar(catalog("ab2"), self.EQ, 0.1))
        assert set(report) == {
            "theorem",
            "schur_cohn_jury",
            "schur_cohn_general",
            "schur_cohn_determinants",
            "quartic_roots",
        }
        assert check_agreement(report) is STABLE


@pytest.mark.unit
class TestCheckAgreement:
    """Test cross-criterion agreement"""

    def test_disagreement_raises(self):
        """Error case: Stable against Unstable raises CriterionDisagreement"""
        report = {
            "one": StabilityVerdict(STABLE, 0.5),
            "two": StabilityVerdict(UNSTABLE, -0.5, 1),
        }
        with pytest.raises(CriterionDisagreement):
            check_agreement(report)

    def test_marginal_entries_are_ignored(self):
        """Edge case: Marginal does not contradict a firm verdict"""
        report = {
            "one": StabilityVerdict(VerdictStatus.MARGINAL, 0.0, 2),
            "two": StabilityVerdict(UNSTABLE, -0.5, 1),
        }
        assert check_agreement(report) is UNSTABLE

    def test_all_marginal(self):
        """Edge case: only Marginal entries give Marginal"""
        report = {"one": StabilityVerdict(VerdictStatus.MARGINAL, 0.0, 1)}
        assert check_agreement(report) is VerdictStatus.MARGINAL


@pytest.mark.unit
class TestRegions:
    """Test the closed-form AB2 and AM2 regions"""

    def test_ab2_region_examples(self):
        """Happy path: AB2 is stable at h = 0.1 and unstable at h = 0.25"""
        assert region_ab2(0.1, -5.0, 2.0)
        assert not region_ab2(0.25, -5.0, 2.0)

    def test_am2_region_examples(self):
        """Happy path: AM2 is stable at h = 0.5 and unstable at h = 1"""
        assert region_am2(0.5, -5.0, 2.0)
        assert not region_am2(1.0, -5.0, 2.0)

    def test_regions_lie_inside_sde_region(self):
        """Invariant: both regions satisfy Y < -2x"""
        x, big_y = np.meshgrid(np.linspace(-7.9, -0.01, 300), np.linspace(0, 16, 300))
        sde = big_y < -2.0 * x
        assert not np.any(region_ab2_xy(x, big_y) & ~sde)
        assert not np.any(region_am2_xy(x, big_y) & ~sde)

    def test_closed_form_matches_classify(self):
        """Invariant: the AB2 and AM2 regions agree with the theorem off the boundary"""
        for lam, mu, h in [(-5.0, 2.0, 0.1), (-5.0, 2.0, 0.3), (-1.0, 1.0, 0.5),
                           (-3.0, 2.0, 0.2), (-2.0, 1.5, 1.5), (-4.0, 1.0, 1.0)]:
            eq = ScalarTestEq(lam, mu)
            assert classify("ab2", eq, h).stable == region_ab2(h, lam, mu)
            assert classify("am2", eq, h).stable == region_am2(h, lam, mu)

    def test_sde_stable(self):
        """Happy path: Re(lam) + |mu|^2 / 2 < 0"""
        assert sde_stable(ScalarTestEq(-5.0, 2.0))
        assert not sde_stable(ScalarTestEq(-1.0, 2.0))
        assert sde_stable(ScalarTestEq(-5 + 3j, 2.0))


@pytest.mark.unit
class TestStepBounds:
    """Test the step-size bounds h0"""

    EQ = ScalarTestEq(-5.0, 2.0)

    def test_ab2_value(self):
        """Happy path: h0 for AB2 at lam = -5, mu = 2"""
        assert h0_ab2(self.EQ) == pytest.approx(0.167156, abs=1e-5)

    def test_am2_value(self):
        """Happy path: h0 for AM2 at lam = -5, mu = 2"""
        assert h0_am2(self.EQ) == pytest.approx(0.827876, abs=1e-5)

    def test_bounds_sit_on_region_boundary(self):
        """Invariant: just below h0 is stable, just above is not"""
        for bound, region in ((h0_ab2, region_ab2), (h0_am2, region_am2)):
            h0 = bound(self.EQ)
            assert region(h0 * (1.0 - 1e-6), -5.0, 2.0)
            assert not region(h0 * (1.0 + 1e-6), -5.0, 2.0)

    def test_bounds_are_sufficient(self):
        """Invariant: both schemes are stable just below h0 for random real equations"""
        rng = np.random.default_rng(41)
        for _ in range(1_000):
            lam = -rng.uniform(0.1, 10.0)
            mu = math.sqrt(rng.uniform(0.01, 0.98) * -2.0 * lam)
            eq = ScalarTestEq(lam, mu)
            for token, bound in (("ab2", h0_ab2), ("am2", h0_am2)):
                assert classify(token, eq, 0.99 * bound(eq)).status is STABLE, eq

    def test_boundary_equation_gives_zero(self):
        """Edge case: on the SDE stability boundary h0 = 0"""
        eq = ScalarTestEq(-5.0, math.sqrt(10.0))
        assert h0_ab2(eq) == 0.0
        assert h0_am2(eq) == 0.0

    def test_unstable_equation(self):
        """Error case: no bound exists when the SDE itself is unstable"""
        with pytest.raises(OutsideDomain):
            h0_ab2(ScalarTestEq(-5.0, 4.0))
        with pytest.raises(OutsideDomain):
            h0_am2(ScalarTestEq(-5.0, 4.0))

    def test_complex_ab2_bound_is_sufficient(self):
        """Happy path: AB2 is stable below the complex-parameter bound"""
        eq = ScalarTestEq(-5 + 1j, 2.0)
        h0 = h0_ab2(eq)
        assert 0.0 < h0 < 0.2
        assert classify("ab2", eq, 0.5 * h0).stable

    def test_complex_am2_not_applicable(self):
        """Error case: the AM2 bound is for real parameters"""
        with pytest.raises(NotApplicable):
            h0_am2(ScalarTestEq(-5 + 1j, 2.0))


@pytest.mark.unit
class TestRegionSpec:
    """Test region membership"""

    def test_contains(self):
        """Happy path: membership follows classify"""
        spec = RegionSpec(catalog("bdf2"), 1.0)
        assert spec.contains(ScalarTestEq(-5.0, 2.0))
        assert spec.xy(ScalarTestEq(-5.0, 2.0)) == (-5.0, 4.0)

    def test_region_rejects_complex(self):
        """Error case: a real region only takes real parameters"""
        with pytest.raises(ValueError):
            RegionSpec(catalog("ab2"), 0.1).contains(ScalarTestEq(-5 + 1j, 2.0))

    def test_domain_accepts_complex(self):
        """Happy path: a domain takes complex parameters"""
        spec = RegionSpec(catalog("bdf2"), 0.1, RegionKind.DOMAIN)
        assert spec.contains(ScalarTestEq(-5 + 1j, 2.0))

    def test_nonpositive_step(self):
        """Error case: h must be positive"""
        with pytest.raises(ValueError):
            RegionSpec(catalog("ab2"), 0.0)
