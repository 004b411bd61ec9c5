"""Simulation of generalized partially-destructive quantum measurements."""

from .bloch import BlochPoint, CompressionMap, QuadratureGrid, build_grid, compress, continuum_measurement, state_from_bloch
from .information import (
    EnsembleChannelOutputs,
    InfoCurvePoint,
    channel_A_average,
    channel_A_output,
    channel_B_average_embedded,
    entanglement,
    holevo,
    holevo_curves,
    maximize_entanglement,
    p1_closed_form,
    post_measurement_object_state,
)
from .measurement import (
    CompletenessError,
    DephasingMatrix,
    Isometry,
    MeasurementSpec,
    Povm,
    apply_coherent,
    apply_dephased,
    build_isometry,
    check_isometry,
    contract_to_meter,
    gram_matrix,
    minimal_basis_states,
    outcome_distribution,
    povm_elements,
    preset,
)
from .qstate import DensityMatrix, PureState, hermitian_eigenvalues, overlap, partial_trace, tensor, von_neumann_entropy

__version__ = "0.1.0"
