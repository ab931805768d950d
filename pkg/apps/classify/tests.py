import math
from io import StringIO

import numpy as np
from constance.test import override_config
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, tag

from apps.chains.models import ChainConfig
from apps.classify import services
from apps.classify.choices import FitMode, Ordering, Relation
from apps.classify.models import FitConfig
from apps.classify.serializers import dump_verdict
from apps.core.cli import run
from apps.geometry.models import (
    Circle,
    Ellipse,
    SmoothedPolygon,
    Superellipse,
    affine_shape,
    rotation_matrix,
)
from apps.geometry.models.transforms import MIRROR

CIRCLE = Circle(1.0)
ELLIPSE_21 = Ellipse(2.0, 1.0)
ELLIPSE_31 = Ellipse(3.0, 1.0)
TRIANGLE = SmoothedPolygon(0.2, ((0.0, 0.0), (3.0, 0.0), (1.0, 2.0)))
TRIANGLE_MIRRORED = affine_shape(TRIANGLE, MIRROR)
TURNED_ELLIPSE = affine_shape(ELLIPSE_21, 3.0 * rotation_matrix(math.pi / 5), (0.7, -1.2))
QUICK_CHAINS = ChainConfig(starts=2)


class MomentTests(SimpleTestCase):
    def test_circle(self):
        m = services.moments(Circle(2.0))
        self.assertAlmostEqual(m.area, 4 * math.pi, places=3)
        np.testing.assert_allclose(m.centroid, [0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(m.covariance, np.eye(2), atol=1e-5)

    def test_ellipse(self):
        m = services.moments(ELLIPSE_21)
        np.testing.assert_allclose(m.covariance, [[1.0, 0.0], [0.0, 0.25]], atol=1e-5)

    def test_translated_centroid(self):
        m = services.moments(affine_shape(CIRCLE, np.eye(2), (2.0, -1.0)))
        np.testing.assert_allclose(m.centroid, [2.0, -1.0], atol=1e-9)


class FitAffineTests(SimpleTestCase):
    def test_self_fit(self):
        for shape in (CIRCLE, ELLIPSE_21, Superellipse(3), TRIANGLE):
            with self.subTest(shape=shape.spec()):
                fit = services.fit_affine(shape, shape)
                self.assertLessEqual(fit.residual, 1e-9)

    def test_circle_onto_ellipse(self):
        fit = services.fit_affine(CIRCLE, ELLIPSE_31)
        self.assertLessEqual(fit.residual, 1e-6)
        self.assertAlmostEqual(abs(fit.transform.det), 3.0, places=5)
        singular = np.linalg.svd(fit.transform.linear, compute_uv=False)
        np.testing.assert_allclose(singular, [3.0, 1.0], atol=1e-5)

    def test_circle_is_not_a_superellipse(self):
        fit = services.fit_affine(CIRCLE, Superellipse(4))
        self.assertGreaterEqual(fit.residual, 0.02)

    def test_affine_images_fit_back(self):
        rng = np.random.default_rng(3)
        for _ in range(3):
            linear = rng.normal(size=(2, 2)) + 2.0 * np.eye(2)
            image = affine_shape(ELLIPSE_21, linear, rng.normal(size=2))
            with self.subTest(matrix=linear.tolist()):
                self.assertLessEqual(services.fit_affine(image, ELLIPSE_31).residual, 1e-6)

    def test_fit_grid(self):
        fit = services.fit_affine(CIRCLE, ELLIPSE_31)
        grid = fit.to_grid(4)
        self.assertEqual(grid.m, 4)
        np.testing.assert_allclose(grid.a, fit.transform.linear[:, 0])
        np.testing.assert_allclose(grid.origin, fit.transform.translation)


class FitSimilarityTests(SimpleTestCase):
    def test_recovers_scale_and_rotation(self):
        fit = services.fit_similarity(ELLIPSE_21, TURNED_ELLIPSE, allow_reflection=False)
        self.assertLessEqual(fit.residual, 1e-6)
        self.assertAlmostEqual(fit.scale, 3.0, places=5)
        self.assertAlmostEqual(fit.rotation % math.pi, math.pi / 5, places=5)
        self.assertFalse(fit.reflect)

    def test_reflection_branch(self):
        mirrored = services.fit_similarity(TRIANGLE, TRIANGLE_MIRRORED, allow_reflection=True)
        plain = services.fit_similarity(TRIANGLE, TRIANGLE_MIRRORED, allow_reflection=False)
        self.assertLessEqual(mirrored.residual, 1e-6)
        self.assertTrue(mirrored.reflect)
        self.assertGreater(plain.residual, 1e-3)

    def test_symmetric_shapes_need_no_reflection(self):
        for shape in (CIRCLE, ELLIPSE_21):
            mirrored = affine_shape(shape, MIRROR)
            with self.subTest(shape=shape.spec()):
                plain = services.fit_similarity(shape, mirrored, allow_reflection=False)
                both = services.fit_similarity(shape, mirrored, allow_reflection=True)
                self.assertLessEqual(plain.residual, 1e-9)
                self.assertLessEqual(both.residual, plain.residual)

    def test_ellipses_of_different_aspect(self):
        fit = services.fit_similarity(ELLIPSE_21, ELLIPSE_31)
        self.assertGreaterEqual(fit.residual, 0.05)


class ClassifyPairTests(SimpleTestCase):
    def test_truth_table(self):
        cases = [
            (CIRCLE, ELLIPSE_31, FitMode.HOM, Relation.AFFINE_EQUIVALENT),
            (CIRCLE, Superellipse(4), FitMode.HOM, Relation.NOT_AFFINE_EQUIVALENT),
            (ELLIPSE_21, TURNED_ELLIPSE, FitMode.SIM, Relation.SIMILAR),
            (TRIANGLE, TRIANGLE_MIRRORED, FitMode.SIM, Relation.SIMILAR_TO_REFLECTION),
            (ELLIPSE_21, ELLIPSE_31, FitMode.SIM, Relation.NOT_SIMILAR),
        ]
        for a_shape, b_shape, mode, relation in cases:
            with self.subTest(a=a_shape.spec(), b=b_shape.spec(), mode=mode):
                verdict = services.classify_pair(a_shape, b_shape, mode)
                self.assertEqual(verdict.relation, relation)

    def test_notes(self):
        verdict = services.classify_pair(CIRCLE, Superellipse(4), FitMode.HOM)
        self.assertEqual(verdict.note, services.INCOMPARABLE)
        verdict = services.classify_pair(ELLIPSE_21, ELLIPSE_31, FitMode.SIM)
        self.assertEqual(verdict.note, services.POSSIBLY_NESTED)

    def test_circle_and_ellipse_are_nested(self):
        verdict = services.classify_pair(CIRCLE, ELLIPSE_31, FitMode.SIM)
        self.assertEqual(verdict.relation, Relation.NOT_SIMILAR)
        self.assertEqual(verdict.note, "G^sim(A) within G^sim(B)")

    def test_self_classification(self):
        for mode in FitMode:
            with self.subTest(mode=mode):
                verdict = services.classify_pair(TRIANGLE, TRIANGLE, mode)
                self.assertTrue(verdict.relation.equivalent)
                self.assertLessEqual(verdict.residual, 1e-9)

    def test_larger_tau_never_separates(self):
        relations = [
            services.classify_pair(CIRCLE, Superellipse(4), FitMode.HOM, tau).relation
            for tau in (1e-3, 1e-2, 0.2)
        ]
        self.assertEqual(
            relations,
            [Relation.NOT_AFFINE_EQUIVALENT, Relation.UNDECIDED, Relation.AFFINE_EQUIVALENT],
        )

    def test_tau_must_be_positive(self):
        with self.assertRaises(ValidationError):
            services.classify_pair(CIRCLE, CIRCLE, FitMode.HOM, tau=0.0)

    @override_config(CLASSIFY_SEEDS=2, CLASSIFY_TAU=1e-4)
    def test_settings(self):
        cfg = FitConfig.from_settings()
        self.assertEqual((cfg.seeds, cfg.tau), (2, 1e-4))
        self.assertEqual(FitConfig.from_settings(seeds=5).seeds, 5)

    def test_verdict_text(self):
        verdict = services.classify_pair(CIRCLE, ELLIPSE_31, FitMode.HOM)
        lines = dump_verdict(verdict).splitlines()
        self.assertTrue(lines[0].startswith("verdict mode=HOM relation=affine-equivalent "))
        self.assertTrue(lines[0].endswith(" tau=0.001"))
        self.assertTrue(lines[1].startswith("transform affine m=("))
        self.assertEqual(len(lines), 2)


class StretchCompareTests(SimpleTestCase):
    def test_ellipse_stretches_further_than_circle(self):
        report = services.stretch_compare(ELLIPSE_21, CIRCLE, 3, QUICK_CHAINS)
        self.assertEqual(report.ordering, Ordering.A_LONGER)
        self.assertGreater(report.margin, 0.0)
        reverse = services.stretch_compare(CIRCLE, ELLIPSE_21, 3, QUICK_CHAINS)
        self.assertEqual(reverse.ordering, Ordering.B_LONGER)

    def test_circle_against_itself(self):
        report = services.stretch_compare(CIRCLE, CIRCLE, 3, QUICK_CHAINS)
        self.assertEqual(report.ordering, Ordering.INCONCLUSIVE)
        self.assertLessEqual(report.margin, 0.0)

    def test_grid_constant_of_circle(self):
        self.assertAlmostEqual(services.grid_constant(CIRCLE, 3, QUICK_CHAINS), 3.0, places=6)

    @tag("slow")
    def test_ellipse_against_circle_to_six_disks(self):
        report = services.stretch_compare(ELLIPSE_21, CIRCLE, 6)
        self.assertEqual(report.ordering, Ordering.A_LONGER)
        self.assertGreater(report.margin, 0.0)
        self.assertEqual(len(report.a.rows), 6)
        self.assertGreater(report.a.certified_lower, report.b.single.upper)

    @tag("slow")
    def test_superellipse_table(self):
        report = services.stretch_compare(Superellipse(3), Superellipse(4), 6)
        self.assertEqual(len(report.a.rows), 6)
        self.assertEqual(len(report.b.rows), 6)
        for estimate in (report.a, report.b):
            self.assertLessEqual(estimate.certified_lower, estimate.single.upper)


class CommandTests(SimpleTestCase):
    def call(self, *argv):
        out, err = StringIO(), StringIO()
        code = run(list(argv), stdout=out, stderr=err)
        return code, out.getvalue(), err.getvalue()

    def test_classify(self):
        code, out, err = self.call(
            "classify", "--a", "circle r=1", "--b", "ellipse a=3 b=1", "--mode", "hom"
        )
        self.assertEqual(code, 0, err)
        self.assertTrue(out.startswith("verdict mode=HOM relation=affine-equivalent "))

    def test_classify_without_reflection(self):
        code, out, err = self.call(
            "classify",
            "--a",
            "smoothpoly r=0.2 pts=(0,0;3,0;1,2)",
            "--b",
            "smoothpoly r=0.2 pts=(0,0;-3,0;-1,2)",
            "--mode",
            "sim",
            "--no-reflection",
        )
        self.assertEqual(code, 0, err)
        self.assertIn("relation=not-similar", out)

    def test_bad_input(self):
        code, _out, err = self.call("classify", "--a", "blob", "--b", "circle r=1", "--mode", "hom")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error:usage:"))
        code, _out, _err = self.call(
            "classify", "--a", "circle r=1", "--b", "circle r=1", "--mode", "hom", "--seeds", "0"
        )
        self.assertEqual(code, 2)
