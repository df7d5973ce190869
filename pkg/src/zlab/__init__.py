"""zlab: continuant algebra, denominator censuses, limit-set dimension,
norm-windowed matrix ensembles, Dirichlet arcs and the congruence-set
verifier for continued fractions with bounded partial quotients."""

from .cfcore import (
    IDENTITY,
    Alphabet,
    SeparationResult,
    UniMat,
    Word,
    cf_value,
    continuant,
    continuant_pair,
    matrix_norm,
    separation_check,
    word_matrix,
)
from .census import (
    CensusResult,
    dump_bitmap,
    enumerate_denominators,
    load_bitmap,
    missing_denominators,
    proportion_table,
)
from .dimension import DimensionEstimate, hausdorff_dimension, transfer_eigenvalue
from .ensemble import (
    Ensemble,
    Factorization,
    GroupElement,
    Ladder,
    ParameterChoice,
    SamplingPolicy,
    build_ladder,
    build_preensembles,
    choose_parameters,
    factorize,
    product_set,
)
from .errors import CounterexampleError, InputError, ResourceCapError, ZlabError
from .arcs import (
    ArcPoint,
    NormHistogram,
    classify_arc,
    dirichlet_decompose,
    parseval_check,
    sigma_N_of_Q,
    sigma_NZ,
    split_K,
    trig_sum,
)
from .verifier import (
    CheckParams,
    Quadruple,
    M_cardinality_check,
    in_M_set,
    in_N_set,
    inclusion_report,
    wedge_rigidity_report,
)

__version__ = "0.1.0"
