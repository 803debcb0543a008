"""Projective measurements in mutually unbiased bases.

Simulates complete projective measurements on finite-dimensional states,
builds and checks mutually unbiased bases, and tests the universal relation
``rho_msmt = (I + rho_ini) / (N + 1)`` together with its failure modes.
"""

from .estimators import AffineRelationFit, MubMeasurement, MubTomography
from .exceptions import *  # noqa: F401,F403
from .measure import (
    EnsembleState,
    OutcomeDistribution,
    SampleRecord,
    born_probabilities,
    dephase,
    empirical_post_state,
    mix,
    post_measurement_state,
    sample_measurements,
)
from .mub import (
    DesignTensor,
    MixtureWeights,
    MubSet,
    criterion_holds,
    design_tensor,
    generate_mub,
    perturb_basis_set,
    verify_mub,
)
from .qmat import (
    OrthonormalBasis,
    Spectrum,
    computational_basis,
    fidelity,
    frobenius_distance,
    hermitian_eig,
    projector,
    random_density,
)
from .relation import (
    AffineFitReport,
    DirectionTriple,
    RelationParams,
    RelationReport,
    affine_fit_counterexample,
    nonorthogonal_post_state,
    predict_post,
    recover_initial_affine,
    recover_pure_by_leading_eigenvector,
    tomographic_reconstruct,
    trial_states,
    verify_relation,
)

__version__ = "0.1.0"
