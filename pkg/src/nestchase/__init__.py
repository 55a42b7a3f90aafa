"""nestchase: chasing nested convex bodies at desk scale.

A request stream of shrinking convex bodies must be served online by moving
into each body as it arrives, paying Euclidean distance.  This package
provides polytope geometry primitives, the convex workhorses (projection,
minimum enclosing ball, minimum-volume enclosing ellipsoid, centroid), a
recursive chasing algorithm whose total movement is bounded on ball-bounded
instances, the guess-and-double wrapper that makes it competitive on
arbitrary nested streams, center-tracking baseline algorithms, the adaptive
instance family that defeats those baselines, and a CLI harness for running
and scoring experiments.
"""

from .adversary import (AlternatingCutAdversary, NestedInstance, first_body,
                        gen_covering_lp, gen_random_bounded, gen_random_nested,
                        left_cut, opening_cut, right_cut)
from .baselines import (ALGORITHM_NAMES, ALGORITHMS, OnlineAlgorithm,
                        centroid_step, ellipsoid_step, greedy_step)
from .chaser import (BoundedChaser, NestedChaser, PhaseEvent, Trajectory,
                     chase_bounded, chase_nested, f_bound, g_bound, recenter,
                     select_hyperplane)
from .convex_ops import (Ball, Ellipsoid, centroid, distance_to,
                         min_enclosing_ball, min_volume_enclosing_ellipsoid,
                         project)
from .errors import (ContractViolation, ConvergenceError, DegenerateBodyError,
                     EmptyBodyError, ParseError, UnboundedBodyError)
from .geometry import (Chart, Halfspace, Polytope, bounding_box, chebyshev_center,
                       clip_box, contains, contains_body, interval_bounds,
                       is_bounded, is_empty, slice_axis, vertices)
from .harness import (RunReport, emit_summary, load_instance, load_report,
                      load_trajectory, opt, run, save_instance, save_report,
                      save_trajectory)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "ALGORITHM_NAMES", "AlternatingCutAdversary", "Ball",
    "BoundedChaser", "Chart", "ContractViolation", "ConvergenceError",
    "DegenerateBodyError", "Ellipsoid", "EmptyBodyError", "Halfspace",
    "NestedChaser", "NestedInstance", "OnlineAlgorithm", "ParseError",
    "PhaseEvent", "Polytope", "RunReport", "Trajectory", "UnboundedBodyError",
    "bounding_box", "centroid", "centroid_step", "chase_bounded",
    "chase_nested", "chebyshev_center", "clip_box", "contains",
    "contains_body", "distance_to", "ellipsoid_step", "emit_summary",
    "f_bound", "first_body", "g_bound", "gen_covering_lp", "gen_random_bounded",
    "gen_random_nested", "greedy_step", "interval_bounds", "is_bounded",
    "is_empty", "left_cut", "load_instance", "load_report", "load_trajectory",
    "min_enclosing_ball", "min_volume_enclosing_ellipsoid", "opening_cut",
    "opt", "project", "recenter", "right_cut", "run", "save_instance",
    "save_report", "save_trajectory", "select_hyperplane", "slice_axis",
    "vertices",
]
