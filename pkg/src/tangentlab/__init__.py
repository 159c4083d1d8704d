"""tangentlab: magnified views and zoom scenery of self-affine carpets.

The package builds planar self-affine sets from validated map families,
verifies the structural hypotheses the experiments rely on, and then
exercises them numerically: single-cylinder depths of shrinking windows,
normalized cylinder covers and their stripe patterns, fibre covers against
vertical sections, and Hausdorff comparisons of zoom galleries.
"""

__version__ = "0.1.0"

from .conditions import (
    HypothesisReport,
    SeparationDelta,
    anisotropy_q,
    bernoulli_admissible,
    build_report,
    column_count_M,
    gl_alignment,
    k_tilde,
    separation_delta,
    vertical_segment_order,
)
from .config import (
    ExperimentConfig,
    GalleryParams,
    ZoomParams,
    builtin_config,
    config_digest,
    config_from_dict,
    load_config,
)
from .errors import (
    AlphabetError,
    DepthCapError,
    EmptinessError,
    EnclosureError,
    EnumerationCapError,
    GridShapeError,
    HypothesisFailure,
    InvariantViolation,
    TangentLabError,
    ValidationError,
)
from .fibres import (
    ColumnAddress,
    GLStructure,
    column_address,
    column_weights,
    fibre_cover,
    fibre_vs_section,
    section_intervals,
)
from .gridset import (
    GridSet,
    check_grid_n,
    decode_rle,
    encode_pgm,
    encode_rle,
    hausdorff,
    hausdorff_sq,
    product_deviation,
    product_grid,
    rasterize,
    to_pgm,
)
from .ifs import (
    UNIT_SQUARE,
    AffineMapSpec,
    AffineParams,
    Rect,
    RectUnion,
    SelfAffineSystem,
    Word,
    as_fraction,
    as_word,
    compose,
    cover,
    cylinder_rect,
    format_word,
    parse_word,
    point_of_address,
)
from .measure import (
    ProbVector,
    RandomSource,
    contains_all_words,
    cylinder_measure,
    sample_address,
)
from .scenery import (
    BoundaryDemo,
    Gallery,
    GalleryDistance,
    ZoomReport,
    ZoomRow,
    boundary_demo,
    gallery_collect,
    gallery_distance,
    run_zoom_batch,
    sample_typical_prefixes,
    zoom_scales,
    zoom_sequence,
)
from .views import (
    AreaBound,
    DepthReport,
    PatternReport,
    ViewCover,
    Window,
    approx_view,
    epsilon_level,
    is_pattern,
    make_window,
    pattern_area_bound,
    raster_view,
    single_cylinder_depth,
    vertical_section_diameter,
)

__all__ = [name for name in dir() if not name.startswith("_")]
