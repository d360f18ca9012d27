"""Random graphs from random counting measures: sampling, closed-form analytics and estimation."""

from .analytics import (
    DegreeLaw,
    degree_distribution,
    degree_stats,
    edge_report,
    gc_threshold,
    giant_component,
    mean_active_vertices,
    mean_edge_terms,
    pgf_coefficients,
    triangle_mean,
)
from .decomposition import sobol, spectral
from .degree_sequences import DegreeSequence, is_graphical, realize_degree_sequence
from .distributions import (
    Binomial,
    CategoricalLabels,
    Dirac,
    NegativeBinomial,
    Poisson,
    QuadratureRule,
    UniformLabels,
    UnitCube,
    UnitInterval,
    Zeta,
    ZetaLabels,
    parse_counting,
    parse_label,
)
from .edge_transforms import (
    BernoulliTransform,
    BinomialTransform,
    Block,
    Constant,
    Digraphon,
    DotProduct,
    Exponential,
    LegendreExpansion,
    PoissonTransform,
    PowerLaw,
    parse_kernel,
    parse_transform,
)
from .errors import (
    BudgetError,
    DomainError,
    InfeasibleError,
    InvalidDistributionError,
    MeasureGraphError,
    NumericalError,
    TruncationWarning,
    ValidationError,
)
from .estimation import MhConfig, ObservedGraphSet, mh_estimate, relative_l2_error
from .graph_generation import LabeledGraph, bernoulli_thin, generate, generate_dag, restrict_to_dag, rewire
from .model import ModelSpec, spec_from_dict, spec_from_flags
from .random_measures import product_mean, sample_stc
from .verification import verify

__version__ = "0.1.0"
