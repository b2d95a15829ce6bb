# Unit Tests for Veronese measures and their curvature data

import unittest
import sys
import os
import shutil
import tempfile
from fractions import Fraction

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from smallcurv.config import fixture_path
from smallcurv.known_measures import sns1_measure
from smallcurv.measure import (Atom, CurvatureData, MeasureFormatError, ProblemInstance, VeroneseMeasure,
                               ambient_dimension, curvature_data, expectations, immersion_check,
                               load_measure, measure_from_dict, mix, parse_rational, permute_factors,
                               save_measure, validate)
from tests.test_utils import TestDataGenerator, rng_for


class TestProblemInstance(unittest.TestCase):
    """Test cases for ProblemInstance"""

    def test_parse(self):
        """Test parsing a comma separated factor list"""
        inst = ProblemInstance.parse("2,1")
        self.assertEqual(inst.factors, (2, 1))
        self.assertEqual(inst.M, 2)
        self.assertEqual(inst.dimension, 3)
        self.assertEqual(inst.key, "2,1")

    def test_invalid(self):
        """Test rejection of empty and non-positive factor lists"""
        with self.assertRaises(ValueError):
            ProblemInstance(())
        with self.assertRaises(ValueError):
            ProblemInstance((2, 0))
        with self.assertRaises(ValueError):
            ProblemInstance.parse("two,1")


class TestParseRational(unittest.TestCase):
    """Test cases for parse_rational"""

    def test_forms(self):
        """Test integer, rational string, decimal string and float inputs"""
        self.assertEqual(parse_rational(3), 3)
        self.assertEqual(parse_rational("2/6"), Fraction(1, 3))
        self.assertEqual(parse_rational("0.25"), Fraction(1, 4))
        self.assertEqual(parse_rational(0.1), Fraction(1, 10))

    def test_invalid(self):
        """Test rejection of booleans and malformed strings"""
        for value in (True, "abc", "1/0", None):
            with self.assertRaises(ValueError):
                parse_rational(value)


class TestValidate(unittest.TestCase):
    """Test cases for validate"""

    def setUp(self):
        self.instance = ProblemInstance((2, 1))

    def test_valid(self):
        """Test that the S^2 x S^1 measure is valid"""
        self.assertEqual(validate(sns1_measure(2)), (True, "ok"))

    def test_empty(self):
        """Test that a measure without atoms is rejected first"""
        ok, message = validate(VeroneseMeasure(self.instance, []))
        self.assertFalse(ok)
        self.assertEqual(message, "measure has no atoms")

    def test_level_count(self):
        """Test that atoms with the wrong number of levels are rejected"""
        ok, message = validate(VeroneseMeasure(self.instance, [Atom((1,), 1)]))
        self.assertFalse(ok)
        self.assertIn("levels", message)

    def test_negative_level(self):
        """Test that negative levels are rejected"""
        ok, message = validate(VeroneseMeasure(self.instance, [Atom((1, -1), 1)]))
        self.assertFalse(ok)
        self.assertIn("nonnegative integer", message)

    def test_nonpositive_weight(self):
        """Test that zero weights are rejected"""
        mu = VeroneseMeasure(self.instance, [Atom((1, 1), 1), Atom((0, 2), 0)])
        ok, message = validate(mu)
        self.assertFalse(ok)
        self.assertIn("non-positive weight", message)

    def test_duplicate(self):
        """Test that repeated level vectors are rejected"""
        mu = VeroneseMeasure(self.instance, [Atom((1, 1), Fraction(1, 2)), Atom((1, 1), Fraction(1, 2))])
        self.assertEqual(validate(mu), (False, "duplicate atom (1, 1)"))

    def test_weight_sum(self):
        """Test that weights must sum exactly to 1"""
        mu = VeroneseMeasure(self.instance, [Atom((1, 1), Fraction(1, 2)), Atom((0, 2), Fraction(1, 3))])
        self.assertEqual(validate(mu), (False, "weights sum to 5/6"))

    def test_order_of_checks(self):
        """Test that weights are checked before duplicates and the sum"""
        mu = VeroneseMeasure(self.instance, [Atom((1, 1), -1), Atom((1, 1), 2)])
        ok, message = validate(mu)
        self.assertIn("non-positive weight", message)

    def test_equality_ignores_order(self):
        """Test that atom order and name do not affect equality"""
        a = VeroneseMeasure(self.instance, [Atom((1, 1), Fraction(2, 3)), Atom((0, 2), Fraction(1, 3))], name="a")
        b = VeroneseMeasure(self.instance, [Atom((0, 2), Fraction(1, 3)), Atom((1, 1), Fraction(2, 3))])
        self.assertEqual(a, b)
        self.assertEqual(hash(a), hash(b))


class TestCurvatureData(unittest.TestCase):
    """Test cases for curvature_data, expectations and ambient_dimension"""

    def test_sns1(self):
        """Test A and G of the S^2 x S^1 measure"""
        data = curvature_data(sns1_measure(2))
        self.assertEqual(data.G, (Fraction(2, 3), Fraction(2)))
        self.assertEqual(data.A, ((Fraction(2, 3), Fraction(2)), (Fraction(2), Fraction(6))))
        self.assertTrue(data.exact)

    def test_expectations(self):
        """Test E[rho], E[lambda], E[rho rho] and the same-factor mean"""
        e = expectations(sns1_measure(2))
        self.assertEqual(e.rho, (Fraction(2, 3), Fraction(2)))
        self.assertEqual(e.lam, (Fraction(2, 3), Fraction(6)))
        self.assertEqual(e.rho_rho[0][1], Fraction(2, 3))
        self.assertEqual(e.rho_rho[1][1], Fraction(2, 3) + Fraction(16, 3))
        # E[(lambda + 2 rho)/3] on the circle: 2/3 * 1 + 1/3 * (16 + 8)/3
        self.assertEqual(e.same_factor[1], Fraction(2, 3) + Fraction(8, 3))

    def test_ambient_dimension(self):
        """Test N = sum of products of eigenspace dimensions"""
        self.assertEqual(ambient_dimension(sns1_measure(2)), 8)
        self.assertEqual(ambient_dimension(sns1_measure(5)), 14)

    def test_invalid_measure(self):
        """Test that curvature data of an invalid measure raises"""
        mu = VeroneseMeasure(ProblemInstance((2, 1)), [Atom((1, 1), Fraction(1, 2))])
        with self.assertRaises(ValueError):
            curvature_data(mu)

    def test_immersion_check(self):
        """Test the first degenerate coordinate is reported 0-based"""
        mu = VeroneseMeasure(ProblemInstance((2, 1)), [Atom((1, 0), 1)])
        self.assertEqual(immersion_check(curvature_data(mu)), (False, 1))
        self.assertEqual(immersion_check(curvature_data(sns1_measure(2))), (True, None))

    def test_rejects_asymmetric(self):
        """Test that CurvatureData requires a symmetric nonnegative A"""
        with self.assertRaises(ValueError):
            CurvatureData(((1, 2), (3, 1)), (1, 1))
        with self.assertRaises(ValueError):
            CurvatureData(((1, 0), (0, 1)), (1, -1))

    def test_scaled(self):
        """Test scaling A and G"""
        data = curvature_data(sns1_measure(2)).scaled(4, 2)
        self.assertEqual(data.G, (Fraction(4, 3), Fraction(4)))
        self.assertEqual(data.A[1][1], 24)


class TestMeasureAlgebra(unittest.TestCase):
    """Test cases for mix and permute_factors"""

    def test_mix(self):
        """Test that mixing merges coincident atoms"""
        other = VeroneseMeasure(ProblemInstance((2, 1)), [Atom((1, 1), 1)])
        mixed = mix(sns1_measure(2), other, Fraction(1, 2))
        self.assertEqual(validate(mixed), (True, "ok"))
        weights = {a.l_vec: a.weight for a in mixed.atoms}
        self.assertEqual(weights, {(1, 1): Fraction(5, 6), (0, 2): Fraction(1, 6)})

    def test_mix_endpoints(self):
        """Test t = 1 returns the first measure"""
        other = VeroneseMeasure(ProblemInstance((2, 1)), [Atom((1, 1), 1)])
        self.assertEqual(mix(sns1_measure(2), other, 1), sns1_measure(2))
        with self.assertRaises(ValueError):
            mix(sns1_measure(2), other, 2)

    def test_mix_is_linear(self):
        """Test that curvature data is affine in the mixing parameter"""
        rng = rng_for(self)
        for factors in ((2, 1), (1, 3, 2)):
            a = TestDataGenerator.random_measure(factors, rng)
            b = TestDataGenerator.random_measure(factors, rng)
            for t in (Fraction(0), Fraction(1, 3), Fraction(5, 7), Fraction(1)):
                mixed = curvature_data(mix(a, b, t))
                da, db = curvature_data(a), curvature_data(b)
                M = len(factors)
                for i in range(M):
                    self.assertEqual(mixed.G[i], t * da.G[i] + (1 - t) * db.G[i])
                    for j in range(M):
                        self.assertEqual(mixed.A[i][j], t * da.A[i][j] + (1 - t) * db.A[i][j])

    def test_permute(self):
        """Test that permuting factors permutes G"""
        swapped = permute_factors(sns1_measure(2), (1, 0))
        self.assertEqual(swapped.instance.factors, (1, 2))
        self.assertEqual(curvature_data(swapped).G, (Fraction(2), Fraction(2, 3)))
        with self.assertRaises(ValueError):
            permute_factors(sns1_measure(2), (0, 0))

    def test_permute_conjugates_curvature_data(self):
        """Test that permuting factors conjugates A and permutes G"""
        rng = rng_for(self)
        mu = TestDataGenerator.random_measure((2, 3, 1), rng, atoms=4)
        data = curvature_data(mu)
        for perm in ((1, 0, 2), (2, 0, 1), (2, 1, 0)):
            swapped = curvature_data(permute_factors(mu, perm))
            for i in range(3):
                self.assertEqual(swapped.G[i], data.G[perm[i]])
                for j in range(3):
                    self.assertEqual(swapped.A[i][j], data.A[perm[i]][perm[j]])


class TestMeasureFiles(unittest.TestCase):
    """Test cases for the measure file format"""

    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp)

    def test_save_and_load(self):
        """Test that a saved measure loads back equal, with rational weight strings"""
        path = os.path.join(self.tmp, "m.json")
        save_measure(sns1_measure(2), path)
        with open(path) as f:
            text = f.read()
        self.assertIn('"2/3"', text)
        self.assertEqual(load_measure(path), sns1_measure(2))

    def test_bundled_fixture(self):
        """Test that the bundled S^2 x S^1 fixture loads"""
        mu = load_measure(fixture_path("sns1_n2.json"))
        self.assertEqual(mu, sns1_measure(2))
        self.assertEqual(mu.name, "sns1_n2")

    def test_format_errors(self):
        """Test that malformed documents name the offending field"""
        with self.assertRaises(MeasureFormatError) as cm:
            measure_from_dict({"factors": [2, 1]})
        self.assertIn("atoms", str(cm.exception))
        with self.assertRaises(MeasureFormatError):
            measure_from_dict({"factors": [2, 1], "atoms": [{"l": [1, 1], "w": "abc"}]})
        with self.assertRaises(MeasureFormatError):
            measure_from_dict({"factors": [2, 1], "atoms": [{"l": [1.5, 1], "w": "1"}]})
        bad = os.path.join(self.tmp, "bad.json")
        with open(bad, "w") as f:
            f.write("{not json")
        with self.assertRaises(MeasureFormatError):
            load_measure(bad)

    def test_unknown_fixture(self):
        """Test that unknown fixture names raise NameError"""
        with self.assertRaises(NameError):
            fixture_path("missing.json")


if __name__ == '__main__':
    unittest.main()
