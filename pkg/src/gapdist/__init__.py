"""Gap distribution of tangencies in reflection-generated circle packings."""

__version__ = "0.1.0"

from .config import (  # noqa: E402
    FordConfig,
    PackingConstants,
    build_config,
    constants,
    gap_reflections,
    load_config,
    validate_config,
)
from .enumeration import Tangencies, Tangency, count_asymptotic_check, enumerate_tangencies  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .geom import (  # noqa: E402
    INFINITY,
    AntiMobiusMap,
    ExtendedPoint,
    GeneralizedCircle,
    MobiusMap,
    arc_distance,
    dual_circle,
    ford_normalize,
    mobius_apply_circle,
    mobius_apply_point,
    reflect_circle,
    tangency_on_base,
)
from .groups import (  # noqa: E402
    gamma_generators,
    good_census,
    good_decompose,
    hecke_generators,
    iwasawa_decompose,
    normality_check,
)
from .regions import BilinearConstraint, LinearForm, Region, exact_area, monte_carlo_area, region_area  # noqa: E402
from .stats import EmpiricalCDF, conformal_pushforward, gap_cdf, ks_distance, min_normalized_gap  # noqa: E402
from .theory import (  # noqa: E402
    PairClass,
    build_regions,
    density,
    limiting_F,
    pair_component_F,
    support_threshold,
)
