import tempfile
from dataclasses import replace
from io import StringIO
from itertools import combinations
from pathlib import Path

import numpy as np
from constance.test import override_config
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, tag

from apps.chains.models import Axis
from apps.constructions import properties, services
from apps.constructions.extraction import candidate_pairs, extract_graph, intersection_graph
from apps.constructions.graphs import build_K2n, build_Ln
from apps.constructions.models import Graph, InteriorRealization, Role, VertexId
from apps.constructions.serializers import (
    dump_construction,
    dump_graph,
    load_construction,
    load_graph,
)
from apps.core.cli import run
from apps.core.exceptions import ConstructionError
from apps.geometry import services as geometry
from apps.geometry.choices import FamilyTag
from apps.geometry.models import Circle, HalfPlane, PlacedShape, Placement, Superellipse
from apps.grids.services import verify_realization

V = VertexId.of
CIRCLE = Circle(0.5)
UNIT_CIRCLE, _F = geometry.normalize_to_unit_bbox(CIRCLE)


def circle_at(x, y=0.0, scale=1.0):
    return PlacedShape(CIRCLE, Placement(scale=scale, dx=x, dy=y))


class VertexIdTests(SimpleTestCase):
    def test_text_form(self):
        for text in ("v(1,2)", "u(2)", "w", "w(1,2,3)", "u(2,0)"):
            with self.subTest(text=text):
                self.assertEqual(str(VertexId.parse(text)), text)

    def test_order_follows_roles(self):
        ids = [V(Role.W), V(Role.V, 2, 1), V(Role.U, 1, 1), V(Role.V, 1, 2)]
        self.assertEqual(
            [str(v) for v in sorted(ids)], ["v(1,2)", "v(2,1)", "u(1,1)", "w"]
        )

    def test_bad_ids(self):
        for text in ("q(1)", "v(1,", "v 1", ""):
            with self.subTest(text=text), self.assertRaises(ValidationError):
                VertexId.parse(text)


class GraphTests(SimpleTestCase):
    def test_self_loops_and_unknown_vertices(self):
        a, b = V(Role.V, 1), V(Role.V, 2)
        with self.assertRaises(ValidationError):
            Graph((a,), frozenset({(a, a)}))
        with self.assertRaises(ValidationError):
            Graph((a,), frozenset({(a, b)}))

    def test_edges_are_unordered(self):
        a, b = V(Role.V, 1), V(Role.V, 2)
        self.assertEqual(Graph((a, b), {(a, b)}), Graph((b, a), {(b, a)}))


class GadgetTests(SimpleTestCase):
    def test_K2n_counts(self):
        self.assertEqual(len(build_K2n(3).edges), 6)
        graph = build_K2n(10)
        self.assertEqual(graph.degree(V(Role.U, 1)), 10)
        self.assertEqual(graph.degree(V(Role.U, 2)), 10)
        for i in range(1, 11):
            self.assertEqual(graph.degree(V(Role.V, i)), 2)

    def test_K21_is_a_path(self):
        graph = build_K2n(1)
        self.assertEqual(
            graph.edges,
            frozenset({(V(Role.V, 1), V(Role.U, 1)), (V(Role.V, 1), V(Role.U, 2))}),
        )

    def test_Ln_vertex_counts(self):
        self.assertEqual(len(build_Ln(1)), 7)
        self.assertEqual(len(build_Ln(5)), 59)
        for n in range(1, 7):
            self.assertEqual(len(build_Ln(n)), 2 * n * n + n + 4)

    def test_Ln_matches_an_enumeration_of_its_rules(self):
        n = 2
        graph = build_Ln(n)
        u = {1: V(Role.U, 1), 2: V(Role.U, 2)}
        hat = {1: V(Role.UHAT, 1), 2: V(Role.UHAT, 2)}

        def adjacent(a, b):
            for x, y in ((a, b), (b, a)):
                if x.role == Role.W and len(x.indices) == 3:
                    i, j, _k = x.indices
                    if y in (u[i], V(Role.V, j)):
                        return True
                if x == hat[1] and y != u[2]:
                    return True
                if x == hat[2] and y != u[1]:
                    return True
            return False

        expected = {
            tuple(sorted((a, b))) for a, b in combinations(graph.vertices, 2) if adjacent(a, b)
        }
        self.assertEqual({tuple(sorted(e)) for e in graph.edges}, expected)
        self.assertEqual(len(expected), 39)

    def test_counts_are_validated(self):
        with self.assertRaises(ValidationError):
            build_K2n(0)
        with self.assertRaises(ValidationError):
            build_Ln(-1)


class GlueEpsilonTests(SimpleTestCase):
    def test_circle_closed_form(self):
        for n in range(1, 11):
            with self.subTest(n=n):
                self.assertAlmostEqual(
                    services.glue_epsilon(UNIT_CIRCLE, n), 2.0 / ((n + 1) ** 2 + 1), delta=1e-6
                )

    def test_half_epsilon_satisfies_the_chord_bound(self):
        shape, _f = geometry.normalize_to_unit_bbox(Superellipse(3))
        for n in (1, 3, 6):
            eps = services.glue_epsilon(shape, n) / 2
            for chord in services.glue_chords(shape, eps):
                self.assertGreaterEqual(chord, (n + 1) * eps)

    def test_unit_box_is_required(self):
        with self.assertRaises(ValidationError):
            services.glue_epsilon(CIRCLE, 2)

    def test_vertex_count(self):
        eps = 0.2 * (1 - 1e-6)
        self.assertEqual(services.glue_count(2, eps), 11)
        self.assertEqual(services.count_Gmn_vertices(2, 2, 3, eps), 95)


class ExtractionTests(SimpleTestCase):
    def test_bridged_circles_form_a_path(self):
        regions = {
            V(Role.V, 1): circle_at(0.0),
            V(Role.V, 2): circle_at(0.8),
            V(Role.V, 3): circle_at(1.6),
        }
        graph = extract_graph(InteriorRealization(CIRCLE, FamilyTag.HOM, regions))
        self.assertEqual(
            graph.edges,
            frozenset({(V(Role.V, 1), V(Role.V, 2)), (V(Role.V, 2), V(Role.V, 3))}),
        )

    def test_touching_pair(self):
        regions = {V(Role.V, 1): circle_at(0.0), V(Role.V, 2): circle_at(1.0)}
        ir = InteriorRealization(CIRCLE, FamilyTag.HOM, regions)
        self.assertFalse(extract_graph(ir).edges)
        self.assertEqual(len(intersection_graph(ir).edges), 1)

    def test_half_planes(self):
        regions = {
            V(Role.U, 1): HalfPlane.below(0.0),
            V(Role.U, 2): HalfPlane.above(0.5),
            V(Role.V, 1): circle_at(0.0, 0.4),
            V(Role.V, 2): circle_at(5.0, 1.2),
        }
        graph = extract_graph(InteriorRealization(CIRCLE, FamilyTag.HOM, regions))
        self.assertEqual(
            graph.edges,
            frozenset(
                {
                    (V(Role.V, 1), V(Role.U, 1)),
                    (V(Role.V, 1), V(Role.U, 2)),
                    (V(Role.V, 2), V(Role.U, 2)),
                }
            ),
        )

    def test_candidate_pairs_prune_by_boxes(self):
        boxes = np.array(
            [[0.0, 1.0, 0.0, 1.0], [0.5, 1.5, 0.5, 1.5], [1.0, 2.0, 0.0, 1.0], [5, 6, 5, 6]]
        )
        left, right = candidate_pairs(boxes, 1e-9)
        self.assertEqual(sorted(zip(left.tolist(), right.tolist())), [(0, 1), (1, 2)])
        left, right = candidate_pairs(boxes, -1e-9)
        self.assertEqual(sorted(zip(left.tolist(), right.tolist())), [(0, 1), (0, 2), (1, 2)])

    def test_family_is_enforced(self):
        with self.assertRaises(ValidationError):
            InteriorRealization(
                CIRCLE, FamilyTag.HOM, {V(Role.V, 1): PlacedShape(CIRCLE, Placement(rotation=1.0))}
            )


class BuildGmnTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.out = services.build_Gmn(CIRCLE, FamilyTag.HOM, 2, 2)

    def test_parameters(self):
        self.assertEqual(self.out.k, 3)
        self.assertAlmostEqual(self.out.params.epsilon, 0.2, delta=1e-6)
        self.assertLess(self.out.params.epsilon, 0.2)
        self.assertGreater(self.out.params.delta, 0.0)
        self.assertEqual(len(self.out.graph), 95)

    def test_regions_follow_the_layout(self):
        self.assertEqual(self.out.region(Role.U, 1, 1), HalfPlane.below(0.0))
        self.assertEqual(self.out.region(Role.U, 2, 1), HalfPlane.above(0.5))
        self.assertEqual(self.out.region(Role.W).placement, Placement())
        eps = self.out.params.epsilon
        for vertex, region in self.out.realization.regions.items():
            if vertex.role == Role.V:
                self.assertEqual(region.scale, 0.5)
            if vertex.role in (Role.X, Role.XBAR):
                self.assertAlmostEqual(region.scale, eps / 2, places=15)

    def test_graph_agrees_with_geometry(self):
        self.assertEqual(extract_graph(self.out.realization).edges, self.out.graph.edges)

    def test_epsilon_satisfies_the_chord_bound(self):
        eps = self.out.params.epsilon
        for chord in services.glue_chords(self.out.shape, eps):
            self.assertGreaterEqual(chord, 3 * eps)

    def test_all_properties_hold(self):
        report = properties.check_properties(self.out)
        self.assertTrue(report.passed, report.failures)

    def test_row_gadgets_pick_glue_disks(self):
        for axis, glue in ((Axis.HORIZONTAL, Role.X), (Axis.VERTICAL, Role.XBAR)):
            for index in (1, 2):
                with self.subTest(axis=axis, index=index):
                    mapping, failures = properties.find_row_gadget(self.out.graph, axis, index, 2)
                    self.assertEqual(failures, [])
                    middle = {v.role for key, v in mapping.items() if key.role == Role.W}
                    self.assertEqual(middle, {glue})

    def test_row_gadget_needs_the_glue(self):
        keep = [v for v in self.out.graph.vertices if v.role not in (Role.X, Role.XBAR)]
        stripped = replace(self.out, graph=self.out.graph.induced(keep))
        report = properties.check_properties(stripped)
        self.assertFalse(report.holds(1))

    def test_construction_file_round_trip(self):
        loaded = load_construction(dump_construction(self.out))
        self.assertEqual(loaded.params, self.out.params)
        self.assertEqual(loaded.shape, self.out.shape)
        self.assertEqual(loaded.graph, self.out.graph)
        self.assertEqual(loaded.realization.regions, self.out.realization.regions)

    def test_graph_file_round_trip(self):
        self.assertEqual(load_graph(dump_graph(self.out.graph)), self.out.graph)

    def test_bad_construction_header(self):
        with self.assertRaises(ValidationError):
            load_construction("gmn shape=circle r=1 family=hom m=2\n")


class BuildGuardTests(SimpleTestCase):
    def test_n_at_least_m(self):
        with self.assertRaises(ValidationError):
            services.build_Gmn(CIRCLE, FamilyTag.HOM, 3, 2)

    @override_config(MAX_VERTICES=50)
    def test_vertex_guard(self):
        with self.assertRaises(ConstructionError):
            services.build_Gmn(CIRCLE, FamilyTag.HOM, 2, 2)


class RealizeGadgetTests(SimpleTestCase):
    def test_K2n_by_circles(self):
        realization = services.realize_K2n(CIRCLE, FamilyTag.HOM, 3)
        self.assertEqual(verify_realization(build_K2n(3), realization), [])
        self.assertGreater(realization[V(Role.U, 1)].scale, realization[V(Role.V, 1)].scale)

    def test_Ln_by_circles(self):
        realization = services.realize_Ln(CIRCLE, FamilyTag.HOM, 2)
        self.assertEqual(verify_realization(build_Ln(2), realization), [])

    @tag("slow")
    def test_sim_constructions_pass_all_properties(self):
        for shape in (CIRCLE, Superellipse(3)):
            for family in (FamilyTag.HOM, FamilyTag.SIM):
                for m, n in ((2, 2), (2, 3), (3, 3)):
                    with self.subTest(shape=shape.spec(), family=family, m=m, n=n):
                        out = services.build_Gmn(shape, family, m, n)
                        self.assertTrue(properties.check_properties(out).passed)


class CommandTests(SimpleTestCase):
    def test_construct_writes_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "g.txt"
            graph_path = Path(tmp) / "graph.txt"
            out, err = StringIO(), StringIO()
            code = run(
                [
                    "construct",
                    "--shape",
                    "circle r=0.5",
                    "--family",
                    "hom",
                    "--m",
                    "2",
                    "--n",
                    "2",
                    "--out",
                    str(path),
                    "--graph-out",
                    str(graph_path),
                    "--check",
                ],
                stdout=out,
                stderr=err,
            )
            self.assertEqual(code, 0, err.getvalue())
            first = out.getvalue().splitlines()[0]
            self.assertTrue(first.startswith("vertices=95\t"))
            self.assertIn("k=3", first)
            self.assertNotIn("holds=false", out.getvalue())
            loaded = load_construction(path.read_text())
            self.assertEqual(len(loaded.graph), 95)
            self.assertEqual(load_graph(graph_path.read_text()), loaded.graph)

    def test_m_above_n_is_a_usage_error(self):
        out, err = StringIO(), StringIO()
        code = run(
            ["construct", "--shape", "circle r=0.5", "--m", "3", "--n", "2"],
            stdout=out,
            stderr=err,
        )
        self.assertEqual(code, 2)
        self.assertTrue(err.getvalue().startswith("error:usage:"))
