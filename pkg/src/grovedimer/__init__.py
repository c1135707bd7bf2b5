"""Connection probabilities for groves and double-dimer configurations on
circular planar graphs, with brute-force oracles and scaling limits."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    GroveDimerError,
    NoPerfectMatchingError,
    NumericToleranceError,
    OracleSizeError,
    PlanarityError,
    SizeLimitError,
    StructureError,
)
from .combinatorics import (
    OddEvenPairing,
    Partition,
    chord_diagram,
    dual_partition,
    enumerate_odd_even_pairings,
    enumerate_partitions,
    enumerate_planar_pairings,
    enumerate_planar_partitions,
    is_planar,
)
from .meander import gram_2, gram_t
from .projection import projection_dd, projection_groves, rule1_rewrite, rule2_rewrite
from .circuit import (
    CircularPlanarGraph,
    dual_graph,
    l_tau,
    quotient_graph,
    resistances,
    response_matrix,
)
from .groves import (
    enumerate_groves,
    grove_probabilities,
    grove_probabilities_r,
    l_polynomials,
    r_polynomials,
)
from .dimers import dd_probabilities, enumerate_double_dimers, kasteleyn
from .sle import (
    gff_drift_residual,
    scaling_ds_product,
    sle2_probs,
    sle4_probs,
    sle8_probs,
    sle8_response,
)
from .graphio import grid_graph, load_fixture, parse_graph
