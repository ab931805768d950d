import json
import logging
import tempfile
from io import StringIO
from pathlib import Path

from constance import config
from django.core.exceptions import ValidationError
from django.test import SimpleTestCase, override_settings

from apps.chains.models import Chain, Strip
from apps.constructions import services as constructions
from apps.constructions.graphs import build_K2n
from apps.constructions.models import VertexId
from apps.constructions.serializers import dump_construction, dump_graph
from apps.core import svg
from apps.core.cli import run
from apps.core.exceptions import ConversionError
from apps.core.manifest import RunManifest
from apps.core.utils import fmt_float, fmt_vector, parallel_map, worker_count
from apps.geometry.choices import FamilyTag
from apps.geometry.models import Circle, HalfPlane, PlacedShape, Placement
from apps.grids.models import MGrid, PixelMask
from apps.grids.serializers import dump_grid, dump_mask

V = VertexId.of
CIRCLE = Circle(0.5)
MASK = PixelMask(4, frozenset({(1, 1), (2, 3), (4, 4)}))


def disk(x, y):
    return PlacedShape(CIRCLE, Placement(dx=x, dy=y))


class UtilsTests(SimpleTestCase):
    def test_fmt_float(self):
        self.assertEqual(fmt_float(0.1), "0.10000000000000001")
        self.assertEqual(fmt_float(-2), "-2.0")
        self.assertEqual(fmt_float(float("inf")), "inf")
        self.assertEqual(fmt_vector((1, 0.5)), "(1.0,0.5)")

    @override_settings(DISKLAB_THREADS=3)
    def test_worker_count(self):
        self.assertEqual(worker_count(), 3)
        self.assertEqual(worker_count(2), 2)
        self.assertEqual(worker_count(0), 1)

    @override_settings(DISKLAB_THREADS=4)
    def test_parallel_map_keeps_order(self):
        self.assertEqual(parallel_map(lambda x: x * x, range(10)), [x * x for x in range(10)])


class ManifestTests(SimpleTestCase):
    def test_echoes_parameters(self):
        manifest = RunManifest.start("shapes", {"shape": "circle r=1", "place": None, "n": (1, 2)})
        data = json.loads(manifest.finish({"seed": 3}).to_json())
        self.assertEqual(data["command"], "shapes")
        self.assertEqual(data["parameters"], {"n": [1, 2], "place": None, "shape": "circle r=1"})
        self.assertEqual(data["seeds"], {"seed": 3})
        self.assertEqual(data["version"], "0.1.0")
        self.assertGreaterEqual(data["wall_time"], 0.0)


class ErrorTests(SimpleTestCase):
    def test_conversion_error_lists_pairs(self):
        pairs = [(f"v({i})", "w") for i in range(10)]
        error = ConversionError("stuck", pairs=pairs)
        self.assertEqual(error.kind, "conversion")
        self.assertTrue(str(error).startswith("stuck [v(0)~w, v(1)~w"))
        self.assertTrue(str(error).endswith(" (+2 more)]"))


class RenderTests(SimpleTestCase):
    def test_disks_are_sampled_paths(self):
        text = svg.render_regions({V("v", 1): disk(0.0, 0.0)})
        self.assertTrue(text.startswith('<?xml version="1.0" encoding="utf-8" ?>\n<svg'))
        self.assertIn('version="1.1"', text)
        self.assertEqual(text.count('class="disk v"'), 1)
        self.assertEqual(text.count(" L"), config.SVG_BOUNDARY_SAMPLES - 1)
        self.assertIn("<title>v(1)</title>", text)
        self.assertNotIn('id="halfplanes"', text)

    def test_half_planes_are_clipped_to_the_view(self):
        regions = {
            V("u", 1): HalfPlane.below(0.0),
            V("u", 2): HalfPlane.below(-100.0),
            V("v", 1): disk(0.0, 0.0),
        }
        text = svg.render_regions(regions)
        self.assertEqual(text.count('class="halfplane u"'), 1)
        self.assertIn("<title>u(1)</title>", text)
        self.assertNotIn("<title>u(2)</title>", text)
        self.assertIn('id="halfplanes"', text)

    def test_construction_is_deterministic(self):
        out = constructions.build_Gmn(CIRCLE, FamilyTag.HOM, 1, 1)
        first = svg.render_construction(out)
        self.assertEqual(first, svg.render_construction(out))
        bounded = sum(r.bounded for r in out.realization.regions.values())
        self.assertEqual(first.count('class="disk '), bounded)

    def test_realization(self):
        realization = constructions.realize_K2n(CIRCLE, FamilyTag.HOM, 3)
        text = svg.render_realization(realization)
        self.assertEqual(text.count('class="disk '), 5)
        self.assertNotIn("halfplane", text)

    def test_mask_cells_match_popcount(self):
        text = svg.render_mask(MASK)
        self.assertEqual(text.count('class="cell"'), len(MASK))
        self.assertEqual(text.count("<line"), 10)

    def test_mask_on_a_skewed_grid(self):
        grid = MGrid.from_affine([[2.0, 1.0], [0.0, 1.0]], (1.0, 1.0), 4)
        text = svg.render_mask(MASK, grid)
        self.assertEqual(text.count('class="cell"'), len(MASK))
        self.assertNotEqual(text, svg.render_mask(MASK))
        with self.assertRaises(ValidationError):
            svg.render_mask(MASK, MGrid.uniform(3))

    def test_chain(self):
        chain = Chain(
            CIRCLE,
            Strip((1.0, 0.0), -0.5, 0.5),
            tuple(Placement(dx=float(i)) for i in range(3)),
        )
        text = svg.render_chain(chain)
        self.assertEqual(text.count("<line"), 2)
        self.assertEqual(text.count('class="disk"'), 3)

    def test_graph(self):
        graph = build_K2n(3)
        text = svg.render_graph(graph)
        self.assertEqual(text.count('class="node"'), 5)
        self.assertEqual(text.count("<line"), 6)
        self.assertIn(">v(3)</text>", text)
        self.assertEqual(text, svg.render_graph(graph))


class CommandLineTests(SimpleTestCase):
    def call(self, *argv):
        out, err = StringIO(), StringIO()
        code = run(list(argv), stdout=out, stderr=err)
        return code, out.getvalue(), err.getvalue()

    def test_unknown_command(self):
        code, out, err = self.call("bake")
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertTrue(err.startswith("error:usage:"))
        self.assertEqual(self.call()[0], 2)

    def test_unknown_flag(self):
        code, _out, err = self.call("shapes", "--shape", "circle r=1", "--colour", "red")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error:usage:"))

    def test_manifest_on_stderr_and_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.json"
            code, out, err = self.call(
                "shapes", "--shape", "circle r=1", "--manifest", str(path)
            )
            self.assertEqual(code, 0, err)
            stored = json.loads(path.read_text())
        self.assertTrue(out.startswith("shape=circle r=1.0\n"))
        echoed = json.loads(err.strip().splitlines()[-1])
        self.assertEqual(echoed["command"], "shapes")
        self.assertEqual(echoed["parameters"]["shape"], "circle r=1")
        self.assertEqual(stored["parameters"], echoed["parameters"])

    def test_same_argv_same_stdout(self):
        argv = ("shapes", "--shape", "superellipse p=3", "--place", "@ scale=2 rot=0.5 dx=1 dy=0")
        self.assertEqual(self.call(*argv)[1], self.call(*argv)[1])

    def test_diagnostic_settings_leave_stdout_alone(self):
        argv = ("shapes", "--shape", "ellipse a=2 b=1")
        quiet = self.call(*argv)[1]
        root = logging.getLogger()
        self.addCleanup(root.setLevel, root.level)
        root.setLevel(logging.DEBUG)
        with self.settings(DEBUG=True):
            loud = self.call(*argv)[1]
        self.assertEqual(quiet, loud)

    def test_export_mask(self):
        with tempfile.TemporaryDirectory() as tmp:
            mask_path, grid_path = Path(tmp) / "mask.txt", Path(tmp) / "grid.txt"
            out_path = Path(tmp) / "mask.svg"
            mask_path.write_text(dump_mask(MASK))
            grid_path.write_text(dump_grid(MGrid.uniform(4)))
            code, out, err = self.call(
                "export-svg",
                "--mask",
                str(mask_path),
                "--grid",
                str(grid_path),
                "--out",
                str(out_path),
            )
            self.assertEqual(code, 0, err)
            text = out_path.read_text()
        self.assertEqual(out, f"scene=mask\tout={out_path}\n")
        self.assertEqual(text, svg.render_mask(MASK))

    def test_export_graph_and_construction(self):
        out = constructions.build_Gmn(CIRCLE, FamilyTag.HOM, 1, 1)
        with tempfile.TemporaryDirectory() as tmp:
            graph_path, construction_path = Path(tmp) / "g.txt", Path(tmp) / "c.txt"
            graph_path.write_text(dump_graph(out.graph))
            construction_path.write_text(dump_construction(out))
            code, _out, err = self.call(
                "export-svg", "--graph", str(graph_path), "--out", str(Path(tmp) / "g.svg")
            )
            self.assertEqual(code, 0, err)
            self.assertEqual(json.loads(err.strip().splitlines()[-1])["seeds"], {"layout_seed": 7})
            code, _out, err = self.call(
                "export-svg",
                "--construction",
                str(construction_path),
                "--out",
                str(Path(tmp) / "c.svg"),
            )
            self.assertEqual(code, 0, err)
            self.assertTrue((Path(tmp) / "c.svg").read_text().startswith("<?xml"))

    def test_export_usage(self):
        code, _out, err = self.call("export-svg", "--out", "x.svg")
        self.assertEqual(code, 2)
        self.assertTrue(err.startswith("error:usage:"))
        code, _out, _err = self.call(
            "export-svg", "--chain", "c.txt", "--graph", "g.txt", "--out", "x.svg"
        )
        self.assertEqual(code, 2)
        code, _out, _err = self.call(
            "export-svg", "--chain", "c.txt", "--grid", "g.txt", "--out", "x.svg"
        )
        self.assertEqual(code, 2)

    def test_unwritable_output(self):
        with tempfile.TemporaryDirectory() as tmp:
            mask_path = Path(tmp) / "mask.txt"
            mask_path.write_text(dump_mask(MASK))
            code, _out, err = self.call(
                "export-svg",
                "--mask",
                str(mask_path),
                "--out",
                str(Path(tmp) / "missing" / "m.svg"),
            )
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error:io:"))
