"""Deviation bounds for Banach-space-valued martingales.

Core pieces: a catalog of concrete smooth spaces (``spaces``), the
closed-form bounds with their certificates (``bounds``), weak-moment
machinery (``tails``), sampleable martingale-difference models and a
deterministic parallel Monte Carlo engine (``models``, ``simulate``),
optimizers for the free proof parameters (``optimize``), and a
verification campaign runner (``campaign``). The HTTP service lives in
``mdev.service`` and the thin CLI client in ``mdev.cli``.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundResult,
    ExpCertificate,
    PolyCertificate,
    beta_threshold,
    corollary_bound,
    fan_real_bound,
    i1_i2_numeric,
    lesigne_volny_bound,
    maximal_hoeffding,
    pinelis_hoeffding,
    pretrunc_bound,
    theorem1_bound,
    theorem1_constant,
    theorem2_bound,
    theorem2_constants,
    theorem2_general_q_bound,
)
from .errors import (
    CapabilityError,
    InputError,
    InsufficientDataError,
    NumericError,
    UnsupportedSpaceError,
)
from .models import (
    MdsModel,
    ParetoRadial,
    ParetoScaleRademacher,
    ProductY0,
    RademacherCoords,
    RademacherReal,
    WeibullRadial,
    bundled_models,
    model_from_spec,
)
from .optimize import GridSpec, OptResult, optimize_theorem1, optimize_theorem2_q
from .simulate import (
    McEstimate,
    RateFit,
    exact_deviation_prob_rademacher,
    mc_deviation_grid,
    mc_deviation_prob,
    rate_fit,
    sample_path,
    truncate_decompose,
)
from .spaces import (
    Point,
    SpaceSpec,
    catalog,
    ell_q_space,
    ell_r_space,
    empirical_eq7_ratio,
    euclidean,
    norm,
    real_line,
    smoothness_scan,
)
from .tails import (
    BoundedTail,
    EmpiricalTail,
    ParetoTail,
    WeibullTail,
    exp_tail_constant,
    n_p,
    sandwich_check,
    weak_lp_norm,
)
