import math
import tempfile
from dataclasses import replace
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, tag
from shapely import Polygon

from apps.constructions import services as constructions
from apps.constructions.models import Graph, InteriorRealization, Role, VertexId
from apps.constructions.serializers import dump_construction, dump_graph
from apps.core.cli import run
from apps.core.exceptions import ReconstructionError
from apps.geometry import services as geometry
from apps.geometry.choices import FamilyTag
from apps.geometry.models import AffineMap, Circle, HalfPlane, PlacedShape, Placement
from apps.grids import conversion, services
from apps.grids.models import AlignedConfig, MGrid, PixelMask, Realization, transform_halfplane
from apps.grids.serializers import (
    dump_grid,
    dump_mask,
    dump_realization,
    load_grid,
    load_mask,
    load_realization,
)

V = VertexId.of
CIRCLE = Circle(0.5)
UNIT_CIRCLE, _F = geometry.normalize_to_unit_bbox(CIRCLE)
U1, U2 = V(Role.U, 1), V(Role.U, 2)


def circle_at(x, y=0.0, scale=1.0):
    return PlacedShape(CIRCLE, Placement(scale=scale, dx=x, dy=y))


def k23_realization(**moved):
    """``K_{2,3}`` by three unit circles between two circles of radius 100."""
    regions = {
        U1: circle_at(2.0, -99.8, scale=200.0),
        U2: circle_at(2.0, 100.8, scale=200.0),
    }
    for i in (1, 2, 3):
        regions[V(Role.V, i)] = circle_at(2.0 * (i - 1), moved.get(f"v{i}", 0.5))
    return Realization(CIRCLE, FamilyTag.HOM, regions)


def canonical_config(m):
    grid = MGrid.uniform(m)
    regions = dict(services.expected_halfplanes(grid))
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            regions[V(Role.V, i, j)] = PlacedShape(
                UNIT_CIRCLE, Placement(scale=1.0 / m, dx=(i - 1) / m, dy=(j - 1) / m)
            )
    return AlignedConfig(grid, regions)


def circle_mask(m):
    _inside, meets = services.cell_relations(UNIT_CIRCLE, m)
    return PixelMask.from_array(meets)


class GridModelTests(SimpleTestCase):
    def test_uniform_grid(self):
        grid = MGrid.uniform(4)
        self.assertEqual(grid.m, 4)
        np.testing.assert_allclose(grid.alphas, [0.25] * 4)
        self.assertAlmostEqual(grid.angle, math.pi / 2)
        np.testing.assert_allclose(grid.cell_corners(2, 3)[0], [0.25, 0.5])
        self.assertAlmostEqual(grid.max_cell_diameter(), math.sqrt(2) / 4)

    def test_bad_grids(self):
        with self.assertRaises(ValidationError):
            MGrid(xs=(0.0, 0.6, 0.5, 1.0), ys=(0.0, 0.3, 0.6, 1.0))
        with self.assertRaises(ValidationError):
            MGrid(xs=(0.0, 1.0), ys=(0.0, 0.5, 1.0))
        with self.assertRaises(ValidationError):
            MGrid(xs=(0.1, 1.0), ys=(0.0, 1.0))
        with self.assertRaises(ValidationError):
            MGrid(a=(1.0, 1.0), b=(2.0, 2.0))

    def test_from_affine(self):
        grid = MGrid.from_affine([[2.0, 0.0], [1.0, 1.0]], (1.0, -1.0), 2)
        self.assertEqual(grid.a, (2.0, 1.0))
        self.assertEqual(grid.b, (0.0, 1.0))
        np.testing.assert_allclose(grid.cell_corners(2, 2)[2], [3.0, 1.0])

    def test_grid_cells(self):
        cells = services.grid_cells(MGrid.uniform(2))
        self.assertEqual([cell for cell, _polygon in cells], [(1, 1), (2, 1), (1, 2), (2, 2)])
        polygon = services.cell_polygon(MGrid.uniform(2), 2, 1)
        self.assertAlmostEqual(Polygon(polygon.pts).area, 0.25)
        self.assertEqual(polygon.pts[0], (0.5, 0.0))

    def test_transform_halfplane(self):
        moved = transform_halfplane(HalfPlane.below(0.0), AffineMap((1, 0, 0, 1), (1.0, 2.0)))
        self.assertEqual(moved.normal, (0.0, 1.0))
        self.assertAlmostEqual(moved.offset, 2.0)
        scaled = transform_halfplane(HalfPlane.left_of(1.0), AffineMap((3, 0, 0, 1)))
        self.assertAlmostEqual(scaled.offset, 3.0)

    def test_mask_cells_are_in_range(self):
        with self.assertRaises(ValidationError):
            PixelMask(2, frozenset({(3, 1)}))
        mask = PixelMask.from_array([[True, False], [False, False]])
        self.assertEqual(mask.cells, frozenset({(1, 1)}))
        self.assertIn((1, 1), mask)


class RealizationTests(SimpleTestCase):
    def test_half_planes_are_rejected(self):
        with self.assertRaises(ValidationError):
            Realization(CIRCLE, FamilyTag.HOM, {U1: HalfPlane.below(0.0)})

    def test_K23_is_realized(self):
        graph = Graph(
            k23_realization().vertices,
            {(u, V(Role.V, i)) for u in (U1, U2) for i in (1, 2, 3)},
        )
        self.assertEqual(services.verify_realization(graph, k23_realization()), [])
        mismatches = services.verify_realization(graph, k23_realization(v2=3.0))
        self.assertEqual([str(m) for m in mismatches], ["missing-edge v(2) u(1)"])

    def test_vertex_sets_must_agree(self):
        graph = Graph((U1, U2), set())
        with self.assertRaises(ValidationError):
            services.verify_realization(graph, k23_realization())

    def test_radius_ratios(self):
        realization = k23_realization()
        report = services.radius_ratio_report(realization, "k2n")
        self.assertAlmostEqual(report["min_small_over_large"], 1 / 200)
        self.assertAlmostEqual(report["gap_over_large"], 0.6 / 200, places=6)
        ln = services.radius_ratio_report(realization, "ln")
        self.assertAlmostEqual(ln["max_small_over_large"], 1 / 200)
        with self.assertRaises(ValidationError):
            services.radius_ratio_report(realization, "k33")


class ConversionTests(SimpleTestCase):
    def test_half_plane_becomes_a_large_copy(self):
        v = V(Role.V, 1)
        ir = InteriorRealization(
            CIRCLE, FamilyTag.HOM, {U1: HalfPlane.below(0.0), v: circle_at(0.0, 0.4)}
        )
        realization = conversion.to_realization(ir, Graph((U1, v), {(v, U1)}))
        self.assertTrue(realization[U1].bounded)
        self.assertGreater(realization[U1].scale, realization[v].scale)
        self.assertEqual(services.verify_realization(Graph((U1, v), {(v, U1)}), realization), [])

    def test_touching_pair_is_pulled_apart(self):
        a, b = V(Role.V, 1), V(Role.V, 2)
        ir = InteriorRealization(CIRCLE, FamilyTag.HOM, {a: circle_at(0.0), b: circle_at(1.0)})
        realization = conversion.to_realization(ir, Graph((a, b), set()))
        self.assertGreater(geometry.separation(realization[a], realization[b]), 0.0)

    def test_graph_must_match_the_interiors(self):
        a, b = V(Role.V, 1), V(Role.V, 2)
        ir = InteriorRealization(CIRCLE, FamilyTag.HOM, {a: circle_at(0.0), b: circle_at(1.0)})
        with self.assertRaises(ValidationError):
            conversion.to_realization(ir, Graph((a, b), {(a, b)}))

    def test_witnesses_are_inside_both_regions(self):
        v = V(Role.V, 1)
        ir = InteriorRealization(
            CIRCLE, FamilyTag.HOM, {U1: HalfPlane.below(0.0), v: circle_at(0.0, 0.4)}
        )
        ((edge, (point, depth)),) = conversion.witnesses(ir, Graph((U1, v), {(v, U1)})).items()
        self.assertGreater(depth, 0.0)
        for vertex in edge:
            self.assertGreaterEqual(geometry.point_depth(ir[vertex], point), depth - 1e-7)

    @tag("slow")
    def test_grid_construction_converts(self):
        out = constructions.build_Gmn(CIRCLE, FamilyTag.HOM, 2, 3)
        realization = conversion.to_realization(out.realization, out.graph)
        self.assertEqual(services.verify_realization(out.graph, realization), [])


class AlignmentTests(SimpleTestCase):
    def test_canonical_configuration_is_aligned(self):
        self.assertTrue(services.check_aligned(canonical_config(3)).aligned)

    def test_moved_line_flags_its_half_planes(self):
        cfg = canonical_config(2)
        moved = replace(cfg, grid=MGrid(xs=cfg.grid.xs, ys=(0.0, 0.501, 1.0)))
        report = services.check_aligned(moved)
        self.assertFalse(report.aligned)
        self.assertEqual(report.flagged, frozenset({V(Role.U, 2, 1), V(Role.U, 1, 2)}))

    def test_loose_disk_is_flagged(self):
        cfg = canonical_config(2)
        regions = dict(cfg.regions)
        regions[V(Role.V, 1, 1)] = PlacedShape(UNIT_CIRCLE, Placement(scale=0.4))
        report = services.check_aligned(AlignedConfig(cfg.grid, regions))
        self.assertEqual(report.flagged, frozenset({V(Role.V, 1, 1)}))

    def test_alignment_survives_affine_maps(self):
        rng = np.random.default_rng(11)
        cfg = canonical_config(3)
        for _ in range(5):
            linear = rng.normal(size=(2, 2)) + 2.0 * np.eye(2)
            f = AffineMap.from_arrays(linear, rng.normal(size=2))
            with self.subTest(matrix=f.matrix):
                self.assertTrue(services.check_aligned(cfg.transformed(f)).aligned)

    def test_sheared_grid_is_not_aligned(self):
        cfg = canonical_config(2)
        sheared = replace(cfg, grid=MGrid(b=(0.3, 1.0), xs=cfg.grid.xs, ys=cfg.grid.ys))
        self.assertFalse(services.check_aligned(sheared).aligned)

    def test_missing_roles(self):
        with self.assertRaises(ValidationError):
            AlignedConfig(MGrid.uniform(2), {})


class PixelMaskTests(SimpleTestCase):
    def test_mask_reads_w_adjacency(self):
        w = V(Role.W)
        cells = [V(Role.V, i, j) for i in (1, 2) for j in (1, 2)]
        graph = Graph((w, *cells), {(V(Role.V, 1, 2), w)})
        self.assertEqual(services.pixel_mask(graph, 2).cells, frozenset({(1, 2)}))

    def test_roles_are_required(self):
        with self.assertRaises(ValidationError):
            services.pixel_mask(Graph((V(Role.V, 1, 1),), set()), 1)

    def test_single_cell_grid(self):
        out = constructions.build_Gmn(CIRCLE, FamilyTag.HOM, 1, 1)
        self.assertEqual(services.pixel_mask(out.graph, 1).cells, frozenset({(1, 1)}))

    def test_small_construction_is_sandwiched(self):
        out = constructions.build_Gmn(CIRCLE, FamilyTag.HOM, 2, 2)
        mask = services.pixel_mask(out.graph, 2)
        self.assertEqual(len(mask), 4)
        self.assertTrue(services.pixel_count_report(mask, CIRCLE).sandwiched)

    @tag("slow")
    def test_sandwich_m4(self):
        out = constructions.build_Gmn(CIRCLE, FamilyTag.HOM, 4, 4)
        mask = services.pixel_mask(out.graph, 4)
        inside, meets = services.cell_relations(UNIT_CIRCLE, 4)
        self.assertTrue(np.all(mask.array[inside]))
        self.assertFalse(np.any(mask.array & ~meets))

    def test_cell_relations(self):
        inside, meets = services.cell_relations(UNIT_CIRCLE, 4)
        self.assertTrue(inside[1, 1])
        self.assertFalse(inside[0, 0])
        self.assertTrue(meets[0, 0])
        self.assertTrue(np.all(meets))
        self.assertEqual(int(inside.sum()), 4)

    def test_pixel_counts(self):
        report = services.pixel_count_report(circle_mask(8), CIRCLE)
        self.assertTrue(report.sandwiched)
        self.assertGreaterEqual(report.boundary_margin, 0)
        self.assertGreaterEqual(report.inner_margin, 0)
        self.assertEqual(report.marked, report.inner + report.boundary)

    def test_missing_inner_cell_breaks_the_sandwich(self):
        mask = circle_mask(8)
        thinned = PixelMask(8, mask.cells - {(4, 4)})
        self.assertFalse(services.pixel_count_report(thinned, CIRCLE).sandwiched)


class ReconstructionTests(SimpleTestCase):
    def test_full_mask_gives_the_square(self):
        mask = PixelMask(3, frozenset((i, j) for i in (1, 2, 3) for j in (1, 2, 3)))
        result = services.reconstruct_shape(mask)
        self.assertEqual(len(result.estimate.pts), 4)
        self.assertAlmostEqual(Polygon(result.estimate.pts).area, 1.0)
        self.assertAlmostEqual(result.bound, math.sqrt(2) / 3)

    def test_single_cell(self):
        result = services.reconstruct_shape(PixelMask(4, frozenset({(2, 3)})))
        self.assertEqual(
            sorted(map(tuple, result.estimate.pts)),
            [(0.25, 0.5), (0.25, 0.75), (0.5, 0.5), (0.5, 0.75)],
        )

    def test_sheared_grid(self):
        grid = MGrid(b=(0.5, 1.0), xs=(0.0, 0.5, 1.0), ys=(0.0, 0.5, 1.0))
        mask = PixelMask(2, frozenset((i, j) for i in (1, 2) for j in (1, 2)))
        result = services.reconstruct_shape(mask, grid)
        self.assertAlmostEqual(Polygon(result.estimate.pts).area, 1.0)

    def test_empty_mask(self):
        with self.assertRaises(ReconstructionError):
            services.reconstruct_shape(PixelMask(3))

    def test_grid_size_must_match(self):
        with self.assertRaises(ValidationError):
            services.reconstruct_shape(PixelMask(3, frozenset({(1, 1)})), MGrid.uniform(2))

    def test_hausdorff_bound(self):
        for m in (8, 16):
            with self.subTest(m=m):
                result = services.reconstruct_shape(circle_mask(m))
                distance = geometry.hausdorff(result.estimate, UNIT_CIRCLE)
                self.assertLessEqual(distance, result.bound + 1e-9)
                self.assertLessEqual(distance, 2 * math.sqrt(2) / m)

    @tag("slow")
    def test_hausdorff_bound_m32(self):
        result = services.reconstruct_shape(circle_mask(32))
        distance = geometry.hausdorff(result.estimate, UNIT_CIRCLE)
        self.assertLessEqual(distance, 2 * math.sqrt(2) / 32)


class DiagnosticsTests(SimpleTestCase):
    def test_square_grid_passes(self):
        rows = services.grid_diagnostics(MGrid.uniform(10), 1.0)
        self.assertEqual(
            [row.name for row in rows], ["x/y", "y/x", "sin_phi", "xs_deviation", "ys_deviation"]
        )
        self.assertTrue(all(row.passed for row in rows))
        self.assertAlmostEqual(rows[0].margin, 0.1)

    def test_slanted_grid_fails_the_angle(self):
        phi = math.pi / 3
        coords = tuple(i / 10 for i in range(11))
        grid = MGrid(b=(math.cos(phi), math.sin(phi)), xs=coords, ys=coords)
        failed = {row.name for row in services.grid_diagnostics(grid, 1.0) if not row.passed}
        self.assertEqual(failed, {"sin_phi"})


class SerializerTests(SimpleTestCase):
    def test_mask_layout(self):
        text = dump_mask(PixelMask(2, frozenset({(1, 2)})))
        self.assertEqual(text, "mask m=2\n#.\n..\n")
        self.assertEqual(load_mask(text).cells, frozenset({(1, 2)}))

    def test_bad_masks(self):
        for text in ("", "mask m=2\n#.\n", "mask m=2\n#x\n..\n", "grid m=2\n#.\n..\n"):
            with self.subTest(text=text), self.assertRaises(ValidationError):
                load_mask(text)

    def test_grid_round_trip(self):
        grid = MGrid((0.1, 0.2), (1.0, 0.1), (-0.2, 0.9), (0.0, 0.3, 1.0), (0.0, 0.7, 1.0))
        self.assertEqual(load_grid(dump_grid(grid)), grid)

    def test_realization_round_trip(self):
        realization = k23_realization()
        loaded = load_realization(dump_realization(realization))
        self.assertEqual(loaded.regions, realization.regions)
        self.assertEqual(loaded.family, FamilyTag.HOM)

    def test_realization_header(self):
        with self.assertRaises(ValidationError):
            load_realization("realization shape=circle r=0.5\n")


class CommandTests(SimpleTestCase):
    def call(self, *argv):
        out, err = StringIO(), StringIO()
        code = run(list(argv), stdout=out, stderr=err)
        return code, out.getvalue(), err.getvalue()

    def test_verify_realization(self):
        realization = k23_realization(v2=3.0)
        graph = Graph(
            realization.vertices,
            {(u, V(Role.V, i)) for u in (U1, U2) for i in (1, 2, 3)},
        )
        with tempfile.TemporaryDirectory() as tmp:
            graph_path, realization_path = Path(tmp) / "g.txt", Path(tmp) / "r.txt"
            graph_path.write_text(dump_graph(graph))
            realization_path.write_text(dump_realization(realization))
            code, out, err = self.call(
                "verify", "--graph", str(graph_path), "--realization", str(realization_path)
            )
        self.assertEqual(code, 0, err)
        self.assertEqual(out.splitlines(), ["mismatches=1", "missing-edge\tv(2)\tu(1)"])

    def test_verify_construction(self):
        out = constructions.build_Gmn(CIRCLE, FamilyTag.HOM, 1, 1)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "c.txt"
            path.write_text(dump_construction(out))
            code, stdout, err = self.call("verify", "--construction", str(path))
        self.assertEqual(code, 0, err)
        self.assertIn("interior_missing=0\tinterior_extra=0", stdout)

    def test_mask_from_graph(self):
        w = V(Role.W)
        cells = [V(Role.V, i, j) for i in (1, 2) for j in (1, 2)]
        graph = Graph((w, *cells), {(V(Role.V, 1, 2), w)})
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "g.txt"
            path.write_text(dump_graph(graph))
            code, out, err = self.call("mask", "--graph", str(path), "--m", "2")
        self.assertEqual(code, 0, err)
        self.assertEqual(out, "m=2\tmarked=1\nmask m=2\n#.\n..\n")

    def test_reconstruct(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "mask.txt"
            path.write_text(dump_mask(circle_mask(8)))
            code, out, err = self.call(
                "reconstruct", "--mask", str(path), "--shape", "circle r=0.5"
            )
        self.assertEqual(code, 0, err)
        self.assertIn("within_bound=true", out)

    def test_reconstruct_missing_file(self):
        code, _out, err = self.call("reconstruct", "--mask", "/nonexistent/mask.txt")
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error:io:"))

    def test_diagnose_grid(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "grid.txt"
            path.write_text(dump_grid(MGrid.uniform(10)))
            code, out, err = self.call("diagnose", "--grid", str(path), "--c", "1")
        self.assertEqual(code, 0, err)
        rows = out.splitlines()
        self.assertEqual(len(rows), 5)
        self.assertTrue(rows[0].startswith("check=x/y\tvalue=1.0\t"))
        self.assertTrue(all(row.endswith("passed=true") for row in rows))

    def test_diagnose_needs_a_mode(self):
        code, _out, err = self.call("diagnose")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error:usage:"))
