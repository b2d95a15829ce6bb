# Unit Tests for copositivity, simplex minimization and the critical s

import unittest
import sys
import os
from fractions import Fraction
from itertools import product

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from smallcurv.copositivity import (EXACT, NUMERIC, ProblemSizeError, b_matrix, bisect_critical_s,
                                    critical_s, is_copositive, is_isotropic, simplex_quadratic_min)
from smallcurv.known_measures import known_cases, sns1_measure
from smallcurv.measure import CurvatureData, curvature_data
from tests.test_utils import TestConfig, TestDataGenerator, rng_for


def _simplex_grid(M, steps):
    for k in product(range(steps + 1), repeat=M - 1):
        if sum(k) <= steps:
            yield np.array(list(k) + [steps - sum(k)], dtype=float) / steps


class TestSimplexQuadraticMin(unittest.TestCase):
    """Test cases for simplex_quadratic_min and is_copositive"""

    def test_two_by_two(self):
        """Test closed-form minima of 2x2 forms"""
        value, U = simplex_quadratic_min([[1, -1], [-1, 1]])
        self.assertEqual(value, 0)
        self.assertEqual(U, (Fraction(1, 2), Fraction(1, 2)))
        value, U = simplex_quadratic_min([[1, -2], [-2, 1]])
        self.assertEqual(value, Fraction(-1, 2))

    def test_copositive(self):
        """Test copositivity decisions and witnesses"""
        ok, witness = is_copositive([[1, -1], [-1, 1]])
        self.assertTrue(ok)
        self.assertIsNone(witness)
        ok, witness = is_copositive([[1, -2], [-2, 1]])
        self.assertFalse(ok)
        self.assertEqual(witness, (Fraction(1, 2), Fraction(1, 2)))
        # Nonnegative matrices are copositive, negative diagonals are not
        self.assertTrue(is_copositive([[0, 1, 2], [1, 0, 3], [2, 3, 0]])[0])
        self.assertFalse(is_copositive([[1, 0], [0, -1]])[0])

    def test_numeric_mode(self):
        """Test that float input selects the numeric path"""
        value, U = simplex_quadratic_min(np.array([[1.0, -2.0], [-2.0, 1.0]]))
        self.assertAlmostEqual(value, -0.5, delta=TestConfig.EXACT_FLOAT_TOL)
        self.assertIsInstance(U[0], float)

    def test_grid_oracle(self):
        """Test the exact minimum against a grid over the simplex"""
        rng = rng_for(self, 1)
        steps = 120
        for M in (2, 3):
            for _ in range(5):
                B = TestDataGenerator.random_symmetric_matrix(M, rng)
                value, U = simplex_quadratic_min(B)
                Bf = np.array(B, dtype=float)
                grid_min = min(float(u @ Bf @ u) for u in _simplex_grid(M, steps))
                lipschitz = 2.0 * np.abs(Bf).max() * M / steps
                self.assertLessEqual(float(value), grid_min + 1e-12)
                self.assertLessEqual(grid_min - float(value), lipschitz)
                self.assertEqual(sum(U), 1)
                self.assertTrue(all(u >= 0 for u in U))

    def test_two_by_two_criterion(self):
        """Test is_copositive against a >= 0, c >= 0, b >= -sqrt(ac) on random 2x2 forms"""
        rng = rng_for(self)
        cases = [[[4, -6], [-6, 9]], [[4, -7], [-7, 9]], [[0, -1], [-1, 1]], [[0, 0], [0, 0]],
                 [[0, 3], [3, 0]]]
        cases += [TestDataGenerator.random_symmetric_matrix(2, rng) for _ in range(60)]
        for B in cases:
            a, b, c = Fraction(B[0][0]), Fraction(B[0][1]), Fraction(B[1][1])
            expected = a >= 0 and c >= 0 and (b >= 0 or b * b <= a * c)
            self.assertEqual(is_copositive(B)[0], expected, B)

    def test_minimizer_on_singular_face(self):
        """Test a minimum on an edge whose principal submatrix is singular"""
        B = [[1, 2, -1], [2, 3, 2], [-1, 2, 1]]
        value, U = simplex_quadratic_min(B)
        self.assertEqual(value, 0)
        self.assertEqual(U, (Fraction(1, 2), Fraction(0), Fraction(1, 2)))
        self.assertTrue(is_copositive(B)[0])

    def test_problem_size_cap(self):
        """Test that face enumeration refuses matrices above the cap"""
        with self.assertRaises(ProblemSizeError):
            simplex_quadratic_min([[Fraction(1)] * 13 for _ in range(13)])
        with self.assertRaises(ValueError):
            simplex_quadratic_min([[1, 0], [0, 1]], mode="fast")


class TestCriticalS(unittest.TestCase):
    """Test cases for critical_s"""

    def setUp(self):
        self.sns1 = curvature_data(sns1_measure(2))

    def test_sns1(self):
        """Test s = 3/2 and B(3/2) = 0 for the S^2 x S^1 measure"""
        cert = critical_s(self.sns1)
        self.assertEqual(cert.s_star, Fraction(3, 2))
        self.assertEqual(cert.mode, EXACT)
        self.assertTrue(cert.certified)
        self.assertTrue(is_isotropic(self.sns1, Fraction(3, 2)))
        self.assertFalse(is_isotropic(self.sns1, Fraction(7, 5)))
        self.assertTrue(all(x == 0 for row in b_matrix(self.sns1, Fraction(3, 2)) for x in row))

    def test_interior_maximizer(self):
        """Test a maximizer in the interior of the segment"""
        cert = critical_s(CurvatureData(((0, 1), (1, 0)), (1, 1)))
        self.assertEqual(cert.s_star, Fraction(1, 2))
        self.assertEqual(cert.u_star, (Fraction(1, 2), Fraction(1, 2)))
        self.assertEqual(cert.support, (0, 1))
        cert = critical_s(CurvatureData(((1, 3), (3, 1)), (1, 1)))
        self.assertEqual(cert.s_star, 2)

    def test_ties_keep_smallest_support(self):
        """Test that a constant objective reports a vertex"""
        cert = critical_s(CurvatureData(((1, 1), (1, 1)), (1, 1)))
        self.assertEqual(cert.s_star, 1)
        self.assertEqual(cert.support, (0,))

    def test_scaling_of_a(self):
        """Test s(cA, G) = c s(A, G)"""
        rng = rng_for(self)
        for data in [self.sns1] + [TestDataGenerator.random_curvature_data(3, rng) for _ in range(5)]:
            s = critical_s(data).s_star
            for c in (Fraction(1, 3), Fraction(2), Fraction(7, 5)):
                self.assertEqual(critical_s(data.scaled(c, 1)).s_star, c * s)

    def test_scaling_of_g(self):
        """Test s(A, cG) = s(A, G) / c^2"""
        rng = rng_for(self)
        for data in [self.sns1] + [TestDataGenerator.random_curvature_data(3, rng) for _ in range(5)]:
            s = critical_s(data).s_star
            for c in (Fraction(1, 2), Fraction(3), Fraction(5, 4)):
                self.assertEqual(critical_s(data.scaled(1, c)).s_star, s / (c * c))

    def test_joint_scaling_invariance(self):
        """Test that s is unchanged under (c^2 A, c G)"""
        s = critical_s(self.sns1).s_star
        for c in (Fraction(1, 2), Fraction(3)):
            self.assertEqual(critical_s(self.sns1.scaled(c * c, c)).s_star, s)
        self.assertEqual(critical_s(self.sns1.scaled(2, 3)).s_star, Fraction(3, 2) * 2 / 9)

    def test_not_immersion(self):
        """Test that a vanishing G is rejected"""
        with self.assertRaises(ValueError):
            critical_s(CurvatureData(((1, 0), (0, 0)), (1, 0)))

    def test_numeric_matches_exact(self):
        """Test the float path against the exact path"""
        cert = critical_s(self.sns1.to_float(), mode=NUMERIC)
        self.assertEqual(cert.mode, NUMERIC)
        self.assertAlmostEqual(cert.s_star, 1.5, delta=TestConfig.ORACLE_TOL)

    def test_above_cap_is_uncertified(self):
        """Test the numeric bisection used above the face cap"""
        cert = critical_s(self.sns1, cap=1)
        self.assertFalse(cert.certified)
        self.assertAlmostEqual(float(cert.s_star), 1.5, delta=1e-6)

    def test_certificate_serialization(self):
        """Test that exact certificates serialize to rational strings"""
        d = critical_s(self.sns1).to_dict()
        self.assertEqual(d["s_star"], "3/2")
        self.assertEqual(d["mode"], "exact")
        self.assertEqual(len(d["u_star"]), 2)

    def test_known_measures(self):
        """Test every closed-form measure against its expected s"""
        for case in known_cases():
            data = curvature_data(case.measure)
            cert = critical_s(data)
            self.assertEqual(cert.s_star, case.expected_s, case.label)
            self.assertTrue(is_isotropic(data, case.expected_s), case.label)


class TestBisectionOracle(unittest.TestCase):
    """Test face enumeration against bisection on copositivity"""

    def test_random_instances(self):
        """Test agreement on random rational instances with M <= 4"""
        rng = rng_for(self, 2)
        for k in range(TestConfig.ORACLE_INSTANCES):
            M = 1 + k % 4
            data = TestDataGenerator.random_curvature_data(M, rng)
            exact = critical_s(data)
            lo, hi = bisect_critical_s(data)
            self.assertAlmostEqual(float(exact.s_star), 0.5 * (lo + hi), delta=TestConfig.ORACLE_TOL,
                                   msg=f"instance {k}")

    def test_bracket(self):
        """Test that the bracket contains the critical s"""
        data = curvature_data(sns1_measure(3))
        lo, hi = bisect_critical_s(data, tol=1e-12)
        self.assertLessEqual(lo, 1.5 + 1e-12)
        self.assertGreaterEqual(hi, 1.5 - 1e-12)


if __name__ == '__main__':
    unittest.main()
