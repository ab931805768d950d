import math

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, tag

from apps.core.exceptions import UnsupportedRegionError
from apps.core.utils import fmt_float
from apps.geometry import services
from apps.geometry.choices import FamilyTag
from apps.geometry.grammar import parse_placement, parse_region, parse_shape
from apps.geometry.models import (
    Circle,
    ConvexPolygon,
    Ellipse,
    HalfPlane,
    PlacedShape,
    Placement,
    Shape,
    SmoothedPolygon,
    Superellipse,
)
from apps.geometry.search import golden_minimize

UNIT_CIRCLE = PlacedShape(Circle(0.5), Placement(dx=0.5, dy=0.5))
TRIANGLE = SmoothedPolygon(0.1, ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)))


def circle_at(x, y, r=0.5):
    return PlacedShape(Circle(r), Placement(dx=x, dy=y))


def random_directions(count, seed=0):
    angles = np.random.default_rng(seed).uniform(0, 2 * math.pi, count)
    return np.stack([np.cos(angles), np.sin(angles)], axis=-1)


class SupportTests(SimpleTestCase):
    def test_circle_support_adds_center_offset(self):
        value, point = services.support(Circle(0.5), Placement(dx=0.5, dy=0.5), (1.0, 0.0))
        self.assertAlmostEqual(value, 1.0, places=15)
        np.testing.assert_allclose(point, [1.0, 0.5], atol=1e-15)

    def test_ellipse_support_is_semi_minor_axis_upwards(self):
        value, _ = services.support(Ellipse(2, 1), Placement(), (0.0, 1.0))
        self.assertAlmostEqual(value, 1.0, places=15)

    def test_superellipse_support_matches_boundary_sampling(self):
        normalized, _ = services.normalize_to_unit_bbox(Superellipse(4))
        u = np.array([1.0, 1.0]) / math.sqrt(2.0)
        value, _ = services.support(normalized, Placement(), u)

        def projection(t):
            c, s = np.cos(t), np.sin(t)
            x = np.sign(c) * np.abs(c) ** 0.5
            y = np.sign(s) * np.abs(s) ** 0.5
            return 0.5 * (x + 1.0) * u[0] + 0.5 * (y + 1.0) * u[1]

        grid = np.linspace(0, 2 * math.pi, 200001)
        best = grid[np.argmax(projection(grid))]
        step = grid[1] - grid[0]
        _, oracle = golden_minimize(lambda t: -projection(t), best - step, best + step)
        self.assertAlmostEqual(value, float(-oracle), delta=1e-9)

    def test_non_unit_direction_is_rejected(self):
        with self.assertRaises(ValidationError):
            services.support(Circle(1), Placement(), (1.0, 1.0))

    def test_support_points_are_consistent_and_inside(self):
        shapes = [
            Circle(0.7),
            Ellipse(2, 0.5),
            Superellipse(3),
            Superellipse(1.5),
            TRIANGLE,
        ]
        dirs = random_directions(1024, seed=1)
        probes = random_directions(4096, seed=2)
        for shape in shapes:
            region = PlacedShape(shape, Placement(1.3, 0.4, 0.2, -0.1))
            values, points = region.support(dirs)
            with self.subTest(shape=shape.spec()):
                np.testing.assert_allclose(
                    np.sum(points * dirs, axis=1), values, atol=1e-9
                )
                bound = region.support_values(probes)
                self.assertTrue(np.all(points @ probes.T <= bound[None, :] + 1e-7))


class BoundingBoxTests(SimpleTestCase):
    def test_unit_circle_box(self):
        box = services.bounding_box(UNIT_CIRCLE)
        self.assertTrue(box.is_close((0, 1, 0, 1), 1e-15))

    def test_rotated_ellipse_swaps_axes(self):
        box = services.bounding_box(
            PlacedShape(Ellipse(2, 1), Placement(rotation=math.pi / 2))
        )
        self.assertTrue(box.is_close((-1, 1, -2, 2), 1e-12))

    def test_smoothed_triangle_box_is_vertex_extent_plus_radius(self):
        box = services.bounding_box(TRIANGLE)
        self.assertTrue(box.is_close((-0.1, 1.1, -0.1, 1.1), 1e-12))

    def test_half_plane_has_no_box(self):
        with self.assertRaises(UnsupportedRegionError):
            services.bounding_box(HalfPlane.below(0.0))


class NormalizeTests(SimpleTestCase):
    def test_ellipse_map(self):
        normalized, f = services.normalize_to_unit_bbox(Ellipse(2, 1))
        np.testing.assert_allclose(f.linear, np.diag([0.25, 0.5]))
        np.testing.assert_allclose(f.translation, [0.5, 0.5])
        self.assertTrue(services.bounding_box(normalized).is_close((0, 1, 0, 1), 1e-9))

    def test_normalized_circle_gives_identity(self):
        normalized, f = services.normalize_to_unit_bbox(UNIT_CIRCLE)
        self.assertTrue(f.is_identity())
        again, g = services.normalize_to_unit_bbox(normalized)
        self.assertIs(again, normalized)
        self.assertTrue(g.is_identity())

    def test_smoothed_polygon_box(self):
        normalized, _ = services.normalize_to_unit_bbox(TRIANGLE)
        self.assertTrue(services.bounding_box(normalized).is_close((0, 1, 0, 1), 1e-9))


class PredicateTests(SimpleTestCase):
    def test_touching_circles_intersect_without_interiors(self):
        a, b = circle_at(0.5, 0.5), circle_at(1.5, 0.5)
        self.assertTrue(services.intersects(a, b))
        self.assertFalse(services.interiors_intersect(a, b))

    def test_gap_of_a_micron_separates(self):
        self.assertFalse(services.intersects(circle_at(0.5, 0.5), circle_at(1.5 + 1e-6, 0.5)))

    def test_overlap_intersects_interiors(self):
        self.assertTrue(services.interiors_intersect(circle_at(0.5, 0.5), circle_at(1.4, 0.5)))

    def test_rotated_ellipse_against_half_plane(self):
        ellipse = PlacedShape(Ellipse(2, 1), Placement(rotation=math.pi / 4, dy=1.5))
        lowest = -ellipse.support_values(np.array([0.0, -1.0]))
        boundary = np.linspace(0, 2 * math.pi, 100000)
        xs = 2 * np.cos(boundary)
        ys = np.sin(boundary)
        c = s = math.sqrt(0.5)
        sampled_lowest = (s * xs + c * ys + 1.5).min()
        self.assertAlmostEqual(float(lowest), sampled_lowest, delta=1e-8)
        self.assertTrue(services.intersects(ellipse, HalfPlane.below(lowest + 1e-3)))
        self.assertFalse(services.intersects(ellipse, HalfPlane.below(lowest - 1e-3)))

    def test_distances(self):
        self.assertAlmostEqual(services.distance(circle_at(0, 0), circle_at(3, 0)), 2.0, places=12)
        self.assertAlmostEqual(
            services.distance(circle_at(0, 2), HalfPlane.below(0.0)), 1.5, places=15
        )

    def test_half_planes(self):
        self.assertTrue(services.interiors_intersect(HalfPlane.below(1.0), HalfPlane.above(0.5)))
        self.assertFalse(services.intersects(HalfPlane.below(0.0), HalfPlane.above(0.5)))
        self.assertTrue(services.intersects(HalfPlane.below(0.5), HalfPlane.above(0.5)))
        self.assertFalse(
            services.interiors_intersect(HalfPlane.below(0.5), HalfPlane.above(0.5))
        )
        self.assertTrue(services.interiors_intersect(HalfPlane.below(0.0), HalfPlane.left_of(0.0)))

    def test_superellipse_distance_matches_sampled_boundaries(self):
        a = PlacedShape(Superellipse(3), Placement(1.0, 0.3, 0.0, 0.0))
        b = PlacedShape(Superellipse(4), Placement(0.5, 1.1, 3.0, 0.5))
        t = np.linspace(0, 2 * math.pi, 4000, endpoint=False)
        dirs = np.stack([np.cos(t), np.sin(t)], axis=-1)
        pa, pb = a.support_points(dirs), b.support_points(dirs)
        sampled = np.min(np.linalg.norm(pa[:, None, :] - pb[None, :, :], axis=-1))
        self.assertAlmostEqual(services.distance(a, b), sampled, delta=1e-3)
        self.assertLessEqual(services.distance(a, b), sampled + 1e-12)

    def test_predicate_coherence_on_random_pairs(self):
        rng = np.random.default_rng(7)
        shapes = [Circle(0.5), Ellipse(1.0, 0.4), Superellipse(3), TRIANGLE]
        tol = 1e-9
        for _ in range(1000):
            a = PlacedShape(
                shapes[rng.integers(4)],
                Placement(rng.uniform(0.3, 2), rng.uniform(0, 6.28), *rng.uniform(-1, 1, 2)),
            )
            b = PlacedShape(
                shapes[rng.integers(4)],
                Placement(rng.uniform(0.3, 2), rng.uniform(0, 6.28), *rng.uniform(-1, 1, 2)),
            )
            meets = services.intersects(a, b)
            self.assertEqual(meets, services.distance(a, b) <= tol)
            if services.interiors_intersect(a, b):
                self.assertTrue(meets)
            self.assertEqual(services.distance(a, b), services.distance(b, a))


class HausdorffTests(SimpleTestCase):
    def test_self_distance_is_zero(self):
        self.assertEqual(services.hausdorff(UNIT_CIRCLE, UNIT_CIRCLE), 0.0)

    def test_translated_circle(self):
        self.assertAlmostEqual(
            services.hausdorff(circle_at(0, 0), circle_at(0.37, 0)), 0.37, places=12
        )

    def test_concentric_circles(self):
        self.assertAlmostEqual(
            services.hausdorff(circle_at(0, 0, 0.5), circle_at(0, 0, 0.6)), 0.1, places=12
        )

    def test_half_plane_is_rejected(self):
        with self.assertRaises(UnsupportedRegionError):
            services.hausdorff(UNIT_CIRCLE, HalfPlane.below(0.0))

    def assert_equivariant(self, count, seed):
        rng = np.random.default_rng(seed)
        a = PlacedShape(Ellipse(1.0, 0.5), Placement(1.0, 0.2, 0.1, 0.0))
        b = PlacedShape(Superellipse(3), Placement(0.8, 1.0, -0.2, 0.3))
        base = services.hausdorff(a, b)
        self.assertEqual(base, services.hausdorff(b, a))
        for _ in range(count):
            g = Placement(
                rng.uniform(0.2, 5), rng.uniform(0, 6.28), *rng.uniform(-3, 3, 2),
                reflect=bool(rng.integers(2)),
            )
            moved = services.hausdorff(
                PlacedShape(a.shape, a.placement.then(g)),
                PlacedShape(b.shape, b.placement.then(g)),
            )
            self.assertAlmostEqual(moved / g.scale, base, delta=1e-7 * base)

    def test_similarity_equivariance_and_symmetry(self):
        self.assert_equivariant(10, seed=3)

    @tag("slow")
    def test_similarity_equivariance_over_many_maps(self):
        self.assert_equivariant(1000, seed=11)


class MeasureTests(SimpleTestCase):
    def test_diameters(self):
        self.assertEqual(services.diameter(Circle(0.5)), 1.0)
        self.assertEqual(services.diameter(Ellipse(2, 1)), 4.0)
        self.assertAlmostEqual(
            services.diameter(Superellipse(4)), 2 * 2 ** 0.25, places=12
        )

    def test_smoothed_polygon_diameter_matches_width_maximum(self):
        self.assertAlmostEqual(TRIANGLE.diameter(), math.sqrt(2) + 0.2, places=12)
        self.assertAlmostEqual(Shape.diameter(TRIANGLE), TRIANGLE.diameter(), delta=1e-9)

    def test_tangent_lines(self):
        line = services.tangent_at(UNIT_CIRCLE, 0.0)
        np.testing.assert_allclose(line.normal, [1.0, 0.0])
        self.assertAlmostEqual(line.offset, 1.0, places=15)
        line = services.tangent_at(Ellipse(2, 1), math.pi / 2)
        self.assertAlmostEqual(line.offset, 1.0, places=15)

    def test_superellipse_tangent_is_level_set_normal(self):
        line = services.tangent_at(Superellipse(4), math.pi / 4)
        x, y = line.point
        gradient = np.array([x**3, y**3])
        gradient /= np.linalg.norm(gradient)
        np.testing.assert_allclose(gradient, line.normal, atol=1e-12)
        self.assertAlmostEqual(abs(x) ** 4 + abs(y) ** 4, 1.0, places=12)
        self.assertTrue(np.all(line.evaluate(services.boundary_samples(Superellipse(4), 720)) <= 1e-12))

    def test_chord_of_unit_circle(self):
        eps = 0.1
        chord = services.chord_length(UNIT_CIRCLE, (0.0, eps / 2), (1.0, 0.0))
        self.assertAlmostEqual(chord, 2 * math.sqrt(eps / 2 - eps**2 / 4), places=10)
        self.assertEqual(services.chord_length(UNIT_CIRCLE, (0.0, 2.0), (1.0, 0.0)), 0.0)

    def test_vertical_and_oblique_chords(self):
        vertical = services.chord_length(UNIT_CIRCLE, (0.05, 0.5), (0.0, 1.0))
        self.assertAlmostEqual(vertical, 2 * math.sqrt(0.25 - 0.45**2), places=10)
        upward = services.chord_length(UNIT_CIRCLE, (0.05, 0.5), (0.0, -1.0))
        self.assertAlmostEqual(upward, vertical, places=10)
        oblique = services.chord_length(UNIT_CIRCLE, (0.26, 0.68), (0.6, 0.8))
        self.assertAlmostEqual(oblique, 0.8, places=9)
        self.assertAlmostEqual(
            services.chord_length(UNIT_CIRCLE, (0.5, 0.5), (-0.6, 0.8)), 1.0, places=9
        )

    def test_deepest_point_of_overlapping_circles(self):
        point, depth = services.deepest_point(circle_at(0, 0), circle_at(0.8, 0))
        np.testing.assert_allclose(point, [0.4, 0.0], atol=1e-6)
        self.assertAlmostEqual(depth, 0.1, delta=1e-6)

    def test_deepest_point_of_offset_circles(self):
        point, depth = services.deepest_point(circle_at(0.1, 0.2), circle_at(0.1, -0.5))
        np.testing.assert_allclose(point, [0.1, -0.15], atol=1e-6)
        self.assertAlmostEqual(depth, 0.15, delta=1e-6)

    def test_deepest_point_in_a_window(self):
        window = (0.0, 1.0, 0.0, 2.0)
        point, depth = services.deepest_point(
            HalfPlane.below(1.0), HalfPlane.above(0.5), window=window
        )
        self.assertAlmostEqual(point[1], 0.75, delta=1e-6)
        self.assertAlmostEqual(depth, 0.25, delta=1e-6)

    def test_deepest_point_against_half_plane(self):
        point, depth = services.deepest_point(circle_at(0, 0.4), HalfPlane.below(0.0))
        self.assertGreater(depth, 0.0)
        self.assertTrue(services.point_in_region(circle_at(0, 0.4), point))
        self.assertLessEqual(point[1], 0.0)

    def test_point_containment(self):
        self.assertTrue(services.point_in_region(UNIT_CIRCLE, (0.5, 0.5)))
        self.assertTrue(services.point_in_region(UNIT_CIRCLE, (1.0, 0.5)))
        self.assertFalse(services.point_in_region(UNIT_CIRCLE, (1.0, 1.0)))

    def test_area_of_circle(self):
        self.assertAlmostEqual(services.area(Circle(1.0)), math.pi, delta=1e-5)


class FamilyTests(SimpleTestCase):
    def test_reflection_mirrors_support(self):
        placement = Placement(1.4, 0.7, 0.3, -0.2)
        original = PlacedShape(TRIANGLE, placement)
        mirrored = PlacedShape(TRIANGLE, placement.then(Placement(reflect=True)))
        self.assertTrue(mirrored.placement.reflect)
        dirs = random_directions(256, seed=5)
        flipped = dirs * np.array([-1.0, 1.0])
        np.testing.assert_allclose(
            mirrored.support_values(dirs), original.support_values(flipped), atol=1e-12
        )

    def test_family_admission(self):
        self.assertTrue(services.family_admits(FamilyTag.HOM, Placement(2, 0, 1, 1)))
        self.assertFalse(services.family_admits(FamilyTag.HOM, Placement(rotation=0.1)))
        self.assertTrue(services.family_admits(FamilyTag.SIM, Placement(rotation=0.1)))
        self.assertFalse(services.family_admits(FamilyTag.SIM, Placement(reflect=True)))
        self.assertTrue(services.family_admits(FamilyTag.SIM_REFL, Placement(reflect=True)))


class GrammarTests(SimpleTestCase):
    def test_canonical_round_trip(self):
        texts = [
            "circle r=0.5",
            "ellipse a=2.0 b=1.0",
            "superellipse p=4.0",
            "smoothpoly r=0.10000000000000001 pts=(0.0,0.0;1.0,0.0;0.0,1.0)",
            "circle r=0.5 affine=(0.25,0.0,0.0,0.5,0.5,0.5)",
        ]
        for text in texts:
            with self.subTest(text=text):
                shape = parse_shape(text)
                self.assertEqual(shape.spec(), text)
                self.assertEqual(parse_shape(shape.spec()), shape)

    def test_floats_keep_every_bit(self):
        value = 0.1 + 0.2
        shape = parse_shape(f"circle r={fmt_float(value)}")
        self.assertEqual(shape.r, value)
        self.assertEqual(fmt_float(8), "8.0")

    def test_placement_and_region(self):
        placement = parse_placement("@ scale=2 rot=7 dx=-1 dy=0.5 reflect")
        self.assertTrue(placement.reflect)
        self.assertAlmostEqual(placement.rotation, 7 - 2 * math.pi, places=15)
        self.assertEqual(parse_placement(placement.spec()), placement)
        region = parse_region("ellipse a=1 b=0.5 @ scale=3")
        self.assertEqual(region.placement.scale, 3.0)
        half = parse_region("halfplane n=(0,-1) d=0")
        self.assertEqual(half, HalfPlane.above(0.0))

    def test_invalid_specs(self):
        for text in ["square s=1", "circle", "circle r=-1", "circle r=1 q=2", "ellipse a=1 b=x"]:
            with self.subTest(text=text), self.assertRaises(ValidationError):
                parse_shape(text)
        with self.assertRaises(ValidationError):
            parse_region("halfplane n=(1,1) d=0")

    def test_polygon_is_not_smooth(self):
        polygon = parse_shape("polygon pts=(0,0;1,0;0,1)")
        self.assertIsInstance(polygon, ConvexPolygon)
        self.assertFalse(polygon.is_smooth)
