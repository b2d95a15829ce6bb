# Unit Tests for Gauss-equation curvatures, conformal conditions and the certifier

import unittest
import sys
import os
from fractions import Fraction
from itertools import combinations

import numpy as np
from numpy.testing import assert_allclose

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from smallcurv.certifier import (BIRICCI_REFERENCE, RIC_EIGEN_REFERENCE, PicParams, angle_bound, certify,
                                 conformal_ricci_matrix, conformal_sec, experimental_conditions,
                                 gauss_rm, offdiag_bound, petrunin_scalar_check, pic2_helper_margins,
                                 pic2_quantity, pic_grid, ricci_matrix, scalar_curvature,
                                 sec_chain_bound)
from smallcurv.immersion import (build_sns1_optimal, build_tensor, build_veronese, frame_point,
                                 random_base_point, sff_sample)
from smallcurv.known_measures import BUNDLED_MEASURES, sns1_measure
from tests.test_utils import TestConfig, rng_for


def _sample(F, rng):
    fp = frame_point(F, random_base_point(F.domain.factors, rng))
    return sff_sample(F, fp)


class TestRoundSphere(unittest.TestCase):
    """Test cases on the round S^4 in R^5, where A(u,v) = -<u,v> x"""

    def setUp(self):
        self.F = build_veronese(4, 1)
        self.s = _sample(self.F, rng_for(self))

    def test_intrinsic(self):
        """Test Ric = 3I, scalar 12 and unit sectional curvatures"""
        assert_allclose(ricci_matrix(self.s), 3.0 * np.eye(4), atol=TestConfig.FD_TOL)
        self.assertAlmostEqual(scalar_curvature(self.s), 12.0, delta=TestConfig.FD_TOL)
        for i, j in combinations(range(4), 2):
            self.assertAlmostEqual(gauss_rm(self.s, i, j, j, i), 1.0, delta=TestConfig.FD_TOL)

    def test_conformal_sec_independent_of_c(self):
        """Test that the rescaled conformal sectional curvature is 1 for every c"""
        for c in (0.0, 1.0, 3.0, 4.0):
            for i, j in combinations(range(4), 2):
                self.assertAlmostEqual(conformal_sec(self.s, i, j, c), 1.0, delta=TestConfig.FD_TOL)

    def test_pic2(self):
        """Test pic2 = (1+lam^2)(1+mu^2) and sharp helper margins"""
        for lam, mu in [(0.0, 0.0), (1.0, -1.0), (0.5, 0.25), (-0.75, 1.0)]:
            p = PicParams(lam, mu)
            expected = (1 + lam * lam) * (1 + mu * mu)
            self.assertAlmostEqual(pic2_quantity(self.s, (0, 1, 2, 3), p, 4.0), expected,
                                   delta=TestConfig.FD_TOL)
            margin_y, margin_z = pic2_helper_margins(self.s, (0, 1, 2, 3), p, 1.0)
            self.assertAlmostEqual(margin_y, 0.0, delta=TestConfig.FD_TOL)
            self.assertAlmostEqual(margin_z, 0.0, delta=TestConfig.FD_TOL)

    def test_offdiag_and_angle(self):
        """Test that the off-diagonal and angle bounds are sharp"""
        for i, j in combinations(range(4), 2):
            self.assertAlmostEqual(offdiag_bound(self.s, i, j, 1.0), 0.0, delta=TestConfig.FD_TOL)
        bound = angle_bound(self.s.point, 1.0)
        self.assertAlmostEqual(bound.margin, 0.0, delta=TestConfig.FD_TOL)

    def test_experimental(self):
        """Test the bi-Ricci and Ricci-eigenvalue reports at c = 0"""
        report = experimental_conditions(self.s, "biricci")
        self.assertEqual(len(report.values), 6)
        self.assertIn("1,2", report.values)
        self.assertAlmostEqual(report.margin, 5.0, delta=TestConfig.FD_TOL)
        self.assertEqual(report.reference, BIRICCI_REFERENCE)
        report = experimental_conditions(self.s, "ric-eigen")
        self.assertEqual(report.which, "ric_eigen")
        assert_allclose(report.values["eigenvalues"], [3.0] * 4, atol=TestConfig.FD_TOL)
        self.assertAlmostEqual(report.margin, 6.0, delta=TestConfig.FD_TOL)
        self.assertEqual(report.reference, RIC_EIGEN_REFERENCE)

    def test_pic2_arguments(self):
        """Test rejection of repeated indices and parameters outside [-1, 1]"""
        with self.assertRaises(ValueError):
            pic2_quantity(self.s, (0, 0, 1, 2), PicParams(0.0, 0.0), 4.0)
        with self.assertRaises(ValueError):
            PicParams(1.5, 0.0)


class TestProductSample(unittest.TestCase):
    """Test cases on the isotropic S^2 x S^1 tensor map"""

    def setUp(self):
        self.F = build_tensor(sns1_measure(2))
        self.s = _sample(self.F, rng_for(self, 1))

    def test_conformal_ricci_trace(self):
        """Test that each diagonal entry of the conformal Ricci matrix sums conformal sectional curvatures"""
        for c in (0.0, 1.3, 3.0):
            ric = conformal_ricci_matrix(self.s, c)
            for i in range(3):
                total = sum(conformal_sec(self.s, i, j, c) for j in range(3) if j != i)
                self.assertAlmostEqual(ric[i, i], total, delta=TestConfig.FD_TOL)

    def test_trace_consistency(self):
        """Test sum of Ric(e_i, e_i) against the sum of sectional curvatures"""
        total = sum(gauss_rm(self.s, i, j, j, i) for i in range(3) for j in range(3) if i != j)
        self.assertAlmostEqual(scalar_curvature(self.s), total, delta=TestConfig.EXACT_FLOAT_TOL)

    def test_conformal_sec_at_zero(self):
        """Test that c = 0 leaves the sectional curvature unchanged"""
        for i, j in combinations(range(3), 2):
            self.assertAlmostEqual(conformal_sec(self.s, i, j, 0.0), gauss_rm(self.s, i, j, j, i), delta=1e-12)

    def test_sec_at_three_is_intrinsic(self):
        """Test that on a unit-sphere image c = 3 gives the intrinsic curvature and a zero chain bound"""
        for i, j in combinations(range(3), 2):
            self.assertAlmostEqual(conformal_sec(self.s, i, j, 3.0), gauss_rm(self.s, i, j, j, i),
                                   delta=TestConfig.FD_TOL)
        self.assertAlmostEqual(sec_chain_bound(self.s.point, np.sqrt(1.5)), 0.0, delta=TestConfig.FD_TOL)

    def test_pic2_needs_four_dimensions(self):
        """Test that PIC-2 quantities are rejected in dimension 3"""
        with self.assertRaises(ValueError):
            pic2_quantity(self.s, (0, 1, 2, 3), PicParams(0.0, 0.0), 4.0)
        with self.assertRaises(ValueError):
            certify(self.F, "pic2", samples=1)

    def test_ric_eigen_frame_margins(self):
        """Test that n != 4 reports per-frame margins"""
        report = experimental_conditions(self.s, "ric_eigen", 1.0)
        self.assertEqual(len(report.values["frame_margins"]), 3)
        with self.assertRaises(ValueError):
            experimental_conditions(self.s, "scalar")

    def test_angle_needs_small_c(self):
        """Test that the angle estimate rejects c > 2"""
        with self.assertRaises(ValueError):
            angle_bound(self.s.point, 2.5)

    def test_circle_rejected(self):
        """Test that experimental conditions need dimension at least 2"""
        s = _sample(build_veronese(1, 1), rng_for(self, 2))
        with self.assertRaises(ValueError):
            experimental_conditions(s, "biricci")


class TestScalarIdentity(unittest.TestCase):
    """Test cases for the traced Gauss identity"""

    def test_closed_form_sns1(self):
        """Test R = 3, |H|^2 = 19/2 and avg |A(u,u)|^2 = 3/2 for S^2 x S^1"""
        check = petrunin_scalar_check(sns1_measure(2))
        self.assertEqual(check.scalar, 3)
        self.assertEqual(check.mean_curvature2, Fraction(19, 2))
        self.assertEqual(check.average, Fraction(3, 2))
        self.assertEqual(check.residual, 0)
        self.assertEqual(check.to_dict()["mean_curvature2"], "19/2")

    def test_closed_form_bundled(self):
        """Test that the identity holds exactly for every bundled measure"""
        for name, (build, _) in BUNDLED_MEASURES.items():
            self.assertEqual(petrunin_scalar_check(build()).residual, 0, name)

    def test_sampled(self):
        """Test the identity on finite-difference samples with both averaging methods"""
        s = _sample(build_tensor(sns1_measure(2)), rng_for(self, 3))
        check = petrunin_scalar_check(s)
        self.assertLess(check.residual, TestConfig.FD_TOL)
        self.assertAlmostEqual(check.scalar, 3.0, delta=TestConfig.FD_TOL)
        self.assertAlmostEqual(check.mean_curvature2, 9.5, delta=TestConfig.FD_TOL)
        check = petrunin_scalar_check(s, method="monte-carlo", count=2000, seed=1)
        self.assertAlmostEqual(check.average, 1.5, delta=TestConfig.FD_TOL)
        with self.assertRaises(ValueError):
            petrunin_scalar_check(s, method="grid")


class TestCertify(unittest.TestCase):
    """Test cases for certify and the PIC-2 grid"""

    def test_pic_grid(self):
        """Test grid sizes with corners and the origin"""
        self.assertEqual(len(pic_grid(9)), 81)
        grid = pic_grid(4)
        self.assertEqual(len(grid), 17)
        self.assertIn((0.0, 0.0), grid)
        self.assertIn((-1.0, 1.0), grid)

    def test_sec_sns1(self):
        """Test the conformal sectional condition on the S^2 x S^1 map"""
        report = certify(build_sns1_optimal(2), "sec", samples=5, frames_per_point=2, seed=0)
        self.assertEqual(report.c, 3.0)
        self.assertTrue(report.passed(TestConfig.FD_TOL))
        self.assertLessEqual(report.min_margin, 1e-3)
        self.assertGreaterEqual(report.chain_margin, -TestConfig.FD_TOL)
        self.assertEqual(report.evaluations, 5 * 3 * 3)
        self.assertIn("pair", report.argmin)

    def test_pic2_round_sphere(self):
        """Test the PIC-2 condition on the round S^4"""
        report = certify(build_veronese(4, 1), "pic2", samples=2, frames_per_point=1, grid_size=3)
        self.assertAlmostEqual(report.min_margin, 1.0, delta=TestConfig.FD_TOL)
        self.assertAlmostEqual(report.chain_margin, 0.0, delta=TestConfig.FD_TOL)
        self.assertGreaterEqual(report.helper_margin, -TestConfig.FD_TOL)
        self.assertEqual(len(report.to_dict()["grid_minima"]), 9)

    def test_offdiag_round_sphere(self):
        """Test the off-diagonal bound with the closed-form curvature"""
        report = certify(build_veronese(4, 1), "offdiag", samples=2, frames_per_point=1)
        self.assertEqual(report.c_f, 1.0)
        self.assertTrue(report.passed(TestConfig.FD_TOL))

    def test_experimental_reference(self):
        """Test that exploratory conditions echo their reference constant"""
        report = certify(build_veronese(4, 1), "biricci", samples=1, frames_per_point=0)
        self.assertEqual(report.to_dict()["reference"], BIRICCI_REFERENCE)

    def test_errors(self):
        """Test unknown conditions and empty sample counts"""
        F = build_veronese(2, 1)
        with self.assertRaises(NameError):
            certify(F, "flatness")
        with self.assertRaises(ValueError):
            certify(F, "sec", samples=0)

    def test_deterministic(self):
        """Test that a fixed seed reproduces the report"""
        F = build_sns1_optimal(2)
        a = certify(F, "offdiag", samples=3, frames_per_point=1, seed=4)
        b = certify(F, "offdiag", samples=3, frames_per_point=1, seed=4)
        self.assertEqual(a.to_dict(), b.to_dict())


if __name__ == '__main__':
    unittest.main()
