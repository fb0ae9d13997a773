"""bselab: a numerical laboratory for the separability of beam-splitter
(and general passive-rotation) outputs from classical bosonic inputs.

The package runs the constructive closed-form argument (classical coherent
ensembles stay classical coherent ensembles under passive unitaries) side
by side with independent numeric checks: PPT negativity on truncated Fock
density matrices and a Gaussian covariance-matrix oracle.
"""

__version__ = "0.1.0"

from .gaussian import (
    GaussianState,
    apply_passive,
    gaussian_from_spec,
    is_classical,
    simon_separable,
)
from .hilbert import (
    DensityOperator,
    FockArena,
    StateVector,
    TruncationError,
    annihilation_matrix,
    partial_trace,
    partial_transpose,
    tensor_product,
)
from .passive import (
    LiftedUnitary,
    ModeUnitary,
    apply_to_density,
    beam_splitter_matrix,
    conjugation_residual,
    lift_unitary,
    log_unitary,
    transform_coherent_exact,
    transform_ensemble,
)
from .states import (
    CoherentEnsemble,
    GaussianSpec,
    coherent,
    ensemble_to_density,
    fock,
    squeezed_vacuum,
    thermal,
    vacuum,
)
from .theoremlab import (
    CampaignConfig,
    CampaignSummary,
    TrialRecord,
    haar_unitary,
    non_sufficiency_demo,
    random_classical_ensemble,
    run_campaign,
    run_theorem_trial,
)
from .witnesses import (
    ClassicalityReport,
    EntanglementReport,
    classicality_report,
    mandel_q,
    negativity_report,
    quadrature_variance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
