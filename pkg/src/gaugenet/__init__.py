"""Lattice spectral triples: Dirac operator, spectral action and continuum limits."""

__version__ = "0.1.0"

from .lattice import DirectedPath, Edge, Plaquette, Step, TorusLattice  # noqa: E402
from .clifford import CliffordBasis, build_gammas  # noqa: E402
from .config import (  # noqa: E402
    ConstrainedSpec,
    GaugeNetworkConfig,
    check_representation,
    from_continuum,
    gauge_transform,
    path_holonomy,
    random_constrained,
    random_gauge,
    random_unconstrained,
)
from .action import (  # noqa: E402
    ConstraintViolation,
    DecompositionReport,
    DiracOperator,
    assemble_dirac,
    coefficients,
    decompose,
    edge_cancellation_suite,
    edge_sum_collapse,
    higgs_terms,
    plaquette_holonomy,
    spectral_action,
    spectral_action_dense,
    vertex_trace_profile,
    wilson_action,
    yang_mills_remainder,
)
from .continuum import (  # noqa: E402
    ConvergenceReport,
    Mode,
    SmoothFieldSpec,
    curvature,
    fit_order,
    higgs_limit_sweep,
    ym_integral,
    wilson_limit_sweep,
)
