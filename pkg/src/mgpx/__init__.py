"""Multivariate peaks-over-threshold models.

Exceedances over high thresholds, their max-stable counterparts, and the
point process view, built around dependence vectors S with max S = 0:
construction and exact samplers for parametric families, threshold
stability operations, exponent and angular measures, limit experiments,
and a verification CLI.
"""

from ._kernels import USING_NUMBA
from .core import (
    NEG_INF,
    Box,
    MarginParams,
    NotBelow,
    Region,
    RegionUnion,
    RngStream,
    coordinate_at_least,
    exceedance_region,
    exceeds,
    gev_cdf,
    gp_margin,
    gp_margin_inverse,
)
from .generators import (
    SGenerator,
    TiltConfig,
    asymptotic_independence,
    complete_dependence,
    empirical_resample,
    from_T,
    from_U,
    from_tilted_mixture,
)
from .mgp import (
    MgpModel,
    QuadConfig,
    QuadratureError,
    cdf_standard_mc,
    cdf_via_stdf,
    density,
    density_standard,
    esj_mc,
    marginal_tail,
    prob_all_positive,
    sample,
    sample_standard,
    standard_model,
)
from .stability import (
    condition_on_threshold,
    linear_transform,
    subvector,
    threshold_stabilize,
)
from .tailmeasure import (
    AngularSample,
    TailFunctions,
    angular_sample,
    chi,
    chi_from_angular,
    extremal_coefficient,
    lambda_mass,
    nu_mass,
    pickands,
    tail_asymptotic_independence,
    tail_complete_dependence,
    tail_from_dnorm,
    tail_from_function,
)
from .parametric import (
    HuslerReissParams,
    family_generator,
    family_tail,
    hr_generator,
    hr_mgp_density,
    hr_tail,
    logistic_generator,
    logistic_mgp_density,
    logistic_stdf,
    logistic_tail,
    tgauss_generator,
    tgauss_mgp_density,
)
from .mev import (
    GaussianCopulaModel,
    GevMargins,
    MevModel,
    block_maxima_experiment,
    iid_exponential_sampler,
    max_stability_check,
    mev_cdf,
    mev_cdf_frechet,
    scaling_sequences,
    three_views_equivalence,
    xeu_sampler,
)
from .pointproc import (
    disjoint_independence_check,
    poisson_limit_check,
    simulate_counts,
)
from .modelspec import (
    ModelSpec,
    SpecError,
    build_generator,
    build_model,
    build_tail,
    load_spec,
    parse_spec,
    spec_to_dict,
)
from .verify import run_suite

__version__ = "0.1.0"
