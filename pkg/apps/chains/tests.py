import math
from io import StringIO

import numpy as np
from constance.test import override_config
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, tag

from apps.chains import services
from apps.chains.models import Axis, Chain, ChainConfig, Strip
from apps.chains.serializers import dump_chain, load_chain
from apps.core.cli import run
from apps.core.exceptions import ConstructionError
from apps.geometry import services as geometry
from apps.geometry.choices import FamilyTag
from apps.geometry.models import (
    Circle,
    ConvexPolygon,
    Ellipse,
    Placement,
    SmoothedPolygon,
    Superellipse,
)

CIRCLE = Circle(0.5)
ELLIPSE = Ellipse(1.0, 0.5)
FAST = ChainConfig(starts=4, seed=0)


def circle_chain(xs, r=0.5, family=FamilyTag.SIM):
    placements = [Placement(scale=r / 0.5, dx=x, dy=0.5) for x in xs]
    return Chain(CIRCLE, Strip(), placements, family)


def union_box(chain):
    boxes = [geometry.bounding_box(region) for region in chain.regions]
    return (
        min(b.x1 for b in boxes),
        max(b.x2 for b in boxes),
        min(b.y1 for b in boxes),
        max(b.y2 for b in boxes),
    )


class ChainCheckTests(SimpleTestCase):
    def test_touching_circles(self):
        report = services.chain_check(circle_chain([0.5, 1.5, 2.5]))
        self.assertTrue(report.valid)
        self.assertFalse(report.strict)
        self.assertAlmostEqual(report.length, 3.0, places=12)

    def test_overlapping_circles_are_strict(self):
        report = services.chain_check(circle_chain([0.5, 1.4, 2.3]))
        self.assertTrue(report.valid)
        self.assertTrue(report.strict)
        self.assertAlmostEqual(report.length, 2.8, places=12)

    def test_small_disk_misses_a_line(self):
        chain = Chain(
            CIRCLE,
            Strip(),
            [Placement(dx=0.5, dy=0.5), Placement(scale=0.8, dx=1.4, dy=0.5)],
        )
        report = services.chain_check(chain)
        self.assertFalse(report.valid)
        self.assertTrue(any("misses" in v for v in report.violations))

    def test_disjoint_neighbours(self):
        report = services.chain_check(circle_chain([0.5, 1.6]))
        self.assertFalse(report.valid)

    def test_family_is_enforced(self):
        chain = Chain(CIRCLE, Strip(), [Placement(rotation=1.0, dx=0.5, dy=0.5)], FamilyTag.HOM)
        self.assertFalse(services.chain_check(chain).valid)

    def test_empty_chain(self):
        with self.assertRaises(ValidationError):
            services.chain_check(Chain(CIRCLE, Strip(), []))

    def test_length_is_invariant_under_rigid_motions(self):
        chain = services.max_chain(ELLIPSE, FamilyTag.SIM, 3, FAST)
        base = services.chain_check(chain).length
        rng = np.random.default_rng(11)
        for _ in range(20):
            motion = Placement(1.0, rng.uniform(0, 2 * math.pi), *rng.uniform(-5, 5, 2))
            moved = chain.moved(motion)
            report = services.chain_check(moved)
            self.assertTrue(report.valid, report.violations)
            self.assertAlmostEqual(report.length, base, delta=1e-9)


class MaxChainTests(SimpleTestCase):
    def test_circles_line_up(self):
        chain = services.max_chain(CIRCLE, FamilyTag.SIM, 5, FAST)
        self.assertAlmostEqual(services.chain_length(chain), 5.0, delta=1e-6)
        self.assertTrue(services.chain_check(chain).valid)

    def test_homothetic_ellipses_have_closed_form(self):
        for n in range(1, 9):
            with self.subTest(n=n):
                chain = services.max_chain(ELLIPSE, FamilyTag.HOM, n)
                self.assertAlmostEqual(services.chain_length(chain), 2.0 * n, delta=1e-9)
                self.assertTrue(services.chain_check(chain).valid)

    def test_single_ellipse_lies_flat(self):
        chain = services.max_chain(ELLIPSE, FamilyTag.SIM, 1, FAST)
        self.assertAlmostEqual(services.chain_length(chain), 2.0, delta=1e-6)

    def test_runs_are_deterministic(self):
        first = services.max_chain(Superellipse(3), FamilyTag.SIM, 3, FAST)
        second = services.max_chain(Superellipse(3), FamilyTag.SIM, 3, FAST)
        self.assertEqual(first.placements, second.placements)
        self.assertTrue(services.chain_check(first).valid)

    def test_reflected_family_builds_valid_chains(self):
        triangle = SmoothedPolygon(0.1, ((0.0, 0.0), (1.0, 0.0), (0.2, 0.8)))
        chain = services.max_chain(triangle, FamilyTag.SIM_REFL, 3, FAST)
        self.assertTrue(services.chain_check(chain).valid)

    def test_bad_inputs(self):
        with self.assertRaises(ValidationError):
            services.max_chain(CIRCLE, FamilyTag.SIM, 0)
        with self.assertRaises(ValidationError):
            services.max_chain(ConvexPolygon(((0, 0), (1, 0), (0, 1))), FamilyTag.HOM, 2)

    def test_lengths_respect_single_disk_bound(self):
        shape = Superellipse(3)
        bound = services.single_disk_bound(shape, FamilyTag.SIM, FAST)
        for n in (1, 2, 3):
            chain = services.max_chain(shape, FamilyTag.SIM, n, FAST)
            self.assertLessEqual(services.chain_length(chain), bound.upper * n + 1e-9)

    def test_grid_floor_does_not_beat_optimizer(self):
        floor = services.grid_search_floor(ELLIPSE, 3)
        best = services.max_chain(ELLIPSE, FamilyTag.SIM, 3, FAST)
        self.assertTrue(services.chain_check(floor).valid)
        self.assertLessEqual(
            services.chain_length(floor), services.chain_length(best) + 1e-9
        )
        self.assertAlmostEqual(services.chain_length(floor), 6.0, delta=1e-9)


class SingleDiskTests(SimpleTestCase):
    def test_circle_bound_is_tight(self):
        bound = services.single_disk_bound(CIRCLE, FamilyTag.SIM)
        self.assertAlmostEqual(bound.upper, 1.0, delta=1e-12)
        self.assertLessEqual(bound.padding, 1e-12)

    def test_ellipse_bound(self):
        bound = services.single_disk_bound(ELLIPSE, FamilyTag.SIM)
        self.assertAlmostEqual(bound.best, 2.0, delta=1e-12)
        self.assertGreaterEqual(bound.upper, 2.0)
        self.assertLess(bound.upper, 2.0 + 1e-3)
        folded = bound.angle % math.pi
        self.assertLess(min(folded, math.pi - folded), 1e-6)

    def test_homothets_use_the_box_ratio(self):
        bound = services.single_disk_bound(Ellipse(2, 1), FamilyTag.HOM)
        self.assertEqual(bound.upper, 2.0)
        self.assertEqual(bound.padding, 0.0)


class ConcatenateTests(SimpleTestCase):
    def test_two_circle_chains(self):
        chain = services.max_chain(CIRCLE, FamilyTag.HOM, 5)
        joined = services.concatenate(chain, chain)
        self.assertEqual(len(joined), 10)
        report = services.chain_check(joined)
        self.assertTrue(report.valid)
        self.assertAlmostEqual(report.length, 10.0, places=9)

    def test_single_disks(self):
        one = services.max_chain(CIRCLE, FamilyTag.HOM, 1)
        self.assertAlmostEqual(
            services.chain_length(services.concatenate(one, one)), 2.0, places=9
        )

    def test_chains_in_a_tilted_strip(self):
        chain = services.max_chain(ELLIPSE, FamilyTag.SIM, 2, FAST)
        tilted = chain.moved(Placement(rotation=0.7, dx=1.0, dy=-2.0))
        joined = services.concatenate(tilted, chain)
        report = services.chain_check(joined)
        self.assertTrue(report.valid, report.violations)
        self.assertEqual(joined.strip, tilted.strip)
        self.assertGreaterEqual(report.length, services.chain_length(tilted))

    def test_sim_ellipse_chains(self):
        chain = services.max_chain(ELLIPSE, FamilyTag.SIM, 3, FAST)
        joined = services.concatenate(chain, chain)
        self.assertEqual(len(joined), 6)
        self.assertTrue(services.chain_check(joined).valid)

    def test_mismatched_family(self):
        with self.assertRaises(ValidationError):
            services.concatenate(
                services.max_chain(CIRCLE, FamilyTag.HOM, 1),
                services.max_chain(CIRCLE, FamilyTag.SIM, 1, FAST),
            )


class StretchTests(SimpleTestCase):
    def test_circle_bounds(self):
        estimate = services.stretch_bounds(CIRCLE, 4, FAST)
        self.assertGreaterEqual(estimate.certified_lower, 0.75 - 1e-9)
        self.assertAlmostEqual(estimate.heuristic, 1.0, delta=1e-6)
        self.assertLessEqual(estimate.certified_lower, estimate.heuristic + 1e-4)

    def test_homothetic_ellipse_table(self):
        rows = services.chain_table(ELLIPSE, FamilyTag.HOM, 6)
        for row in rows:
            self.assertAlmostEqual(row.length, 2.0 * row.n, delta=1e-9)

    def test_table_is_monotone(self):
        rows = services.chain_table(Superellipse(3), FamilyTag.SIM, 4, FAST)
        lengths = [row.length for row in rows]
        for shorter, longer in zip(lengths, lengths[1:]):
            self.assertGreaterEqual(longer, shorter - 1e-9)

    def test_n_max_must_exceed_one(self):
        with self.assertRaises(ValidationError):
            services.stretch_bounds(CIRCLE, 1)

    @tag("slow")
    def test_subadditivity_with_concatenation_warm_starts(self):
        for shape in (CIRCLE, ELLIPSE):
            lengths = {
                row.n: row.length
                for row in services.chain_table(shape, FamilyTag.SIM, 8, FAST)
            }
            for n1 in range(1, 8):
                for n2 in range(1, 9 - n1):
                    with self.subTest(shape=shape.spec(), n1=n1, n2=n2):
                        self.assertGreaterEqual(
                            lengths[n1] + lengths[n2], lengths[n1 + n2] - 1e-4
                        )

    @tag("slow")
    @override_config(MULTISTART_COUNT=8)
    def test_superellipse_table_beats_grid_floor(self):
        shape = Superellipse(3)
        rows = services.chain_table(shape, FamilyTag.SIM, 6)
        for row in rows[:4]:
            floor = services.grid_search_floor(shape, row.n)
            self.assertGreaterEqual(row.length, services.chain_length(floor) - 1e-3)


class StrictChainTests(SimpleTestCase):
    def test_min_k(self):
        self.assertEqual(services.min_k_exceeding(CIRCLE, FamilyTag.HOM, 5), 6)
        self.assertEqual(services.min_k_exceeding(CIRCLE, FamilyTag.HOM, 3), 4)

    def test_normalized_ellipse(self):
        shape, _f = geometry.normalize_to_unit_bbox(ELLIPSE)
        self.assertEqual(services.min_k_exceeding(shape, FamilyTag.HOM, 2), 3)

    def test_horizontal_row(self):
        chain, delta = services.strict_chain_with_bbox(
            CIRCLE, FamilyTag.HOM, 2, Axis.HORIZONTAL, 1
        )
        self.assertEqual(len(chain), 3)
        self.assertEqual(delta, 1e-4 / 2)
        report = services.chain_check(chain)
        self.assertTrue(report.strict, report.violations)
        box = union_box(chain)
        np.testing.assert_allclose(box, (-delta, 1 + delta, 0.0, 0.5), atol=1e-9)
        for region in chain.regions:
            self.assertAlmostEqual(region.scale, 0.5, places=12)

    def test_vertical_column(self):
        chain, delta = services.strict_chain_with_bbox(
            CIRCLE, FamilyTag.HOM, 2, Axis.VERTICAL, 2
        )
        report = services.chain_check(chain)
        self.assertTrue(report.strict, report.violations)
        self.assertTrue(all(p.rotation == 0.0 for p in chain.placements))
        np.testing.assert_allclose(union_box(chain), (0.5, 1.0, -delta, 1 + delta), atol=1e-9)

    def test_delta_policy(self):
        self.assertEqual(services.chain_delta(3.0, 1.0, 2), 5e-5)
        self.assertAlmostEqual(services.chain_delta(9.0, 3.0, 2), 0.25 + 5e-5, places=15)
        with self.assertRaises(ConstructionError) as caught:
            services.chain_delta(2.0001, 1.0, 2, k=3)
        self.assertEqual(caught.exception.details["k"], 3)

    def test_row_index_is_checked(self):
        with self.assertRaises(ValidationError):
            services.strict_chain_with_bbox(CIRCLE, FamilyTag.HOM, 2, Axis.HORIZONTAL, 3)


class SerializerTests(SimpleTestCase):
    def test_chain_file_round_trip(self):
        chain = services.max_chain(ELLIPSE, FamilyTag.SIM, 3, FAST)
        loaded = load_chain(dump_chain(chain))
        self.assertEqual(loaded.placements, chain.placements)
        self.assertEqual(loaded.strip, chain.strip)
        self.assertEqual(loaded.shape, chain.shape)
        self.assertEqual(loaded.family, chain.family)

    def test_bad_header(self):
        with self.assertRaises(ValidationError):
            load_chain("strip u=(1,0) d1=1 d2=0\nfamily sim\nshape circle r=1\n")


class CommandTests(SimpleTestCase):
    def test_stretch_prints_table_row(self):
        out, err = StringIO(), StringIO()
        code = run(
            ["stretch", "--shape", "ellipse a=1 b=0.5", "--family", "hom", "--n", "4"],
            stdout=out,
            stderr=err,
        )
        self.assertEqual(code, 0)
        self.assertEqual(out.getvalue(), "n=4\tsigma=8.0\n")

    def test_bad_shape_is_a_usage_error(self):
        out, err = StringIO(), StringIO()
        code = run(["stretch", "--shape", "blob", "--n", "2"], stdout=out, stderr=err)
        self.assertEqual(code, 2)
        self.assertTrue(err.getvalue().startswith("error:usage:"))
