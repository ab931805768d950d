from collections import OrderedDict

CONSTANCE_CONFIG = OrderedDict(
    [
        (
            "GEOMETRY_TOLERANCE",
            (1e-9, "Signed separation band for touching vs intersecting", float),
        ),
        (
            "SEPARATION_SAMPLES",
            (64, "Directions sampled before golden refinement of separation", int),
        ),
        (
            "HAUSDORFF_DIRECTIONS",
            (2048, "Directions sampled for support-function Hausdorff", int),
        ),
        (
            "GOLDEN_TOLERANCE",
            (1e-12, "Bracket width at which golden-section search stops", float),
        ),
        ("MULTISTART_COUNT", (32, "Optimizer starts per chain problem", int)),
        ("MULTISTART_SEED", (0, "Base seed of the multistart generator", int)),
        (
            "FINITE_DIFFERENCE_STEP",
            (1e-5, "Central difference step for chain angle gradients", float),
        ),
        (
            "SINGLE_DISK_SCAN",
            (10000, "Uniform angles in the single-disk stretch scan", int),
        ),
        (
            "STRICT_PENETRATION",
            (1e-3, "Penetration of construction chains, relative to scale", float),
        ),
        ("GLUE_EPSILON_CAP", (0.25, "Upper cap on the glue epsilon", float)),
        (
            "GLUE_BISECTION_TOLERANCE",
            (1e-10, "Bisection tolerance for the glue epsilon", float),
        ),
        (
            "CONVERSION_MAX_ROUNDS",
            (40, "Shrink/grow rounds before conversion gives up", int),
        ),
        ("MAX_VERTICES", (10_000_000, "Vertex guard for constructions", int)),
        ("CLASSIFY_TAU", (1e-3, "Relative Hausdorff verdict threshold", float)),
        ("CLASSIFY_SEEDS", (8, "Rotational seeds per fit branch", int)),
        (
            "SVG_BOUNDARY_SAMPLES",
            (512, "Boundary points per rendered shape", int),
        ),
    ]
)

CONSTANCE_CONFIG_FIELDSETS = {
    "Geometry": (
        "GEOMETRY_TOLERANCE",
        "SEPARATION_SAMPLES",
        "HAUSDORFF_DIRECTIONS",
        "GOLDEN_TOLERANCE",
    ),
    "Chains": (
        "MULTISTART_COUNT",
        "MULTISTART_SEED",
        "FINITE_DIFFERENCE_STEP",
        "SINGLE_DISK_SCAN",
        "STRICT_PENETRATION",
    ),
    "Constructions": (
        "GLUE_EPSILON_CAP",
        "GLUE_BISECTION_TOLERANCE",
        "CONVERSION_MAX_ROUNDS",
        "MAX_VERTICES",
    ),
    "Classification": ("CLASSIFY_TAU", "CLASSIFY_SEEDS"),
    "Output": ("SVG_BOUNDARY_SAMPLES",),
}
