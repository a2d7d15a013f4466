"""Random circuit families: QAOA with one round, Haar-random gates and IQP."""
from circuit_hardness.lab.families.draws import (Architecture, FamilyKind, GateSlot,
                                                 HaarRandomness, LayoutMismatchError,
                                                 PhaseAssignment, QaoaPhaseDistribution,
                                                 RandomDraw, SlotBasis,
                                                 build_architecture,
                                                 build_interpolated_circuit, p_theta,
                                                 random_circuit, sample_random_draw)
from circuit_hardness.lab.families.haar import (EigenDecomposition,
                                                UnsupportedDimensionError,
                                                eigendecompose, haar_unitary,
                                                unitary_fractional_power)
from circuit_hardness.lab.families.hiding import UnsupportedFamilyError, hiding_transport
from circuit_hardness.lab.families.paths import (PathTermSet, TooLargeForEnumerationError,
                                                 path_terms, sum_over_paths_probability)
from circuit_hardness.lab.families.serialization import dump_draw, load_draw

__all__ = [
    'Architecture', 'EigenDecomposition', 'FamilyKind', 'GateSlot', 'HaarRandomness',
    'LayoutMismatchError', 'PathTermSet', 'PhaseAssignment', 'QaoaPhaseDistribution',
    'RandomDraw', 'SlotBasis', 'TooLargeForEnumerationError', 'UnsupportedDimensionError',
    'UnsupportedFamilyError', 'build_architecture', 'build_interpolated_circuit',
    'dump_draw', 'eigendecompose', 'haar_unitary', 'hiding_transport', 'load_draw',
    'p_theta', 'path_terms', 'random_circuit', 'sample_random_draw',
    'sum_over_paths_probability', 'unitary_fractional_power',
]
