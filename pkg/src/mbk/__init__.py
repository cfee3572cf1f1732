"""B-measures on normed planes: Birkhoff orthogonality, Auerbach sets, staircase measures."""

from .bmeasure import (
    AngularMeasure,
    PartnerMap,
    arc,
    arc_length_measure,
    build_b_measure,
    choose_base_arc,
    existence_gate,
    max_atom,
    verify_b_measure,
)
from .bodies import CantorBumpSpec, body_from_json, disk, lp_ball, make_body, make_cantor_bump, regular_polygon
from .geometry import (
    auerbach_set,
    birkhoff_partners,
    gauge,
    is_auerbach,
    is_birkhoff_orthogonal,
    phi,
    segment_set,
    subtract_segments,
)
from .staircase import PerfectSet, assign_levels, build_measure, eval_staircase, measure_of

__version__ = "0.1.0"
