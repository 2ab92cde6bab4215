"""Color-bleeding metrics and pseudo-scribble synthesis for colorized images."""

from .cdr import cdr
from .errors import (
    BleedMeterError,
    DegenerateInput,
    DimensionMismatch,
    EmptyRegion,
    InvalidWidth,
    KernelFullUnsupported,
    NoBleedingEdge,
    NoEdges,
    TooManyClusters,
)
from .imaging import CannyParams, LabImage, canny, gaussian_blur, lab_to_rgb, rgb_to_lab, sobel_magnitude
from .metrics import (
    FULL,
    IDENTICAL,
    KernelSpec,
    consistency_score,
    edge_fidelity,
    local_region,
    mse,
    psnr,
    s_diff,
)
from .profiles import PROFILES
from .report import MetricsReport, ScoreParams, score_pair
from .scribble import (
    RegionMask,
    Scribble,
    ScribbleParams,
    chroma_edges,
    edge_diff,
    generate_pseudo_scribble,
    region_mask,
    select_component,
    width_transform,
)
from .slic import ClusterMap, SlicParams, slic

__version__ = "0.1.0"
