"""Box-counting (HFD) and modified box-counting (MHFD) fractal dimensions
of binary images."""

from .boxcount import FilterConfig, ScaleCounts, ScaleEntry, hfd_counts, keep_probability, mhfd_counts, uniform
from .errors import (
    AllScalesFilteredError,
    CalibrationError,
    ContractViolation,
    DegenerateDesignError,
    DegenerateError,
    EmptyObjectError,
    FracDimError,
    InsufficientDataError,
    ManifestError,
    NetpbmError,
)
from .estimator import (
    DimensionResult,
    PipelineOptions,
    calibrate,
    compute,
    compute_hfd,
    compute_mhfd,
    monte_carlo,
)
from .evalharness import load_manifest, run_manifest, separability
from .generators import primitives, salt_pepper, sierpinski_carpet, sierpinski_triangle
from .imagecore import (
    BinaryImage,
    ColorImage,
    GrayImage,
    IntegralImage,
    box_sum,
    build_integral,
    invert,
    load_netpbm,
    pad_to_pow2,
    read_image,
    save_netpbm,
    write_image,
)
from .regression import FitResult, LogLogPoint, fit_deflected, fit_linear, to_loglog

__version__ = "0.1.0"
