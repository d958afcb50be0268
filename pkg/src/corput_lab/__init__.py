"""Numerical laboratory for oscillatory integrals and measure regularity.

Exact one-dimensional machinery (piecewise-polynomial densities, moduli of
continuity, mixtures, distances), sampleable multidimensional measures,
pushforward densities, sublevel-set estimates with explicit constants,
oscillatory integrals with polynomial phase, and configuration-driven
inequality suites.
"""

__version__ = "0.1.0"

from .density import (
    BesovResult,
    GridMeasure1D,
    MixtureDecomposition,
    PiecewiseDensity1D,
    besov_seminorm,
    bv_seminorm,
    density_from_literal,
    density_to_literal,
    distances,
    mixture_decompose,
    omega,
    shift_l1,
    sigma,
    sigma_of_density,
)
from .measures import (
    Ball,
    Box,
    Density2D,
    HPolytope,
    KrugCheck,
    ProductMeasure,
    Simplex,
    UniformBody,
    krug_check,
    measure_from_config,
    measure_to_config,
    philox_rng,
    sample,
)
from .oscint import (
    DecayFit,
    NormalizedPhase,
    OscValue,
    decay_fit,
    normalize_phase,
    osc_integral,
    osc_sweep,
)
from .poly import Polynomial, Polynomial1D, parse_polynomial
from .pushforward import (
    DensityTable1D,
    PushforwardResult,
    pushforward_cdf_1d,
    pushforward_density_1d,
    pushforward_exact_1d,
    pushforward_mc,
)
from .roots import real_roots, real_roots_simple
from .sublevel import (
    CwRatioResult,
    DividedDiffCert,
    QuantileReport,
    cw_ratio,
    divided_diff,
    quantile_points,
    sublevel_measure_1d,
    sublevel_measure_mc,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    InequalityReport,
    fit_constant,
    run_suite,
)
