from .core import (CoherencyMatrix, PauliVector, PolsarRaster, RasterError, RasterMetadata,
                   ScatteringMatrix, boxcar_coherency, pauli_vector, rank1_coherency,
                   span_pixel, span_raster, symmetrize_reciprocal)
from .yamaguchi import (COMPONENT_NAMES, Branch, ComponentStack, YamaguchiPowers, decompose_raster,
                        helix_power, surface_double, volume_branch, yamaguchi_decompose)
from .bases import (ADAPTIVE_SEED, YAMAGUCHI_KINDS, ScatteringBasis, ScatteringKind, TenPowers,
                    all_bases, basis_matrix, bases_to_json, reconstruct_power, synthesize_pixel)
