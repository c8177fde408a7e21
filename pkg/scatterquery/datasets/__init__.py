from __future__ import absolute_import

from .synthetic import (lattice_pauli, layout_region_map, pauli_factor, principal_pauli, scene_from_config,
                        synthesize_scene)
from .make_dataset import (TrainingSample, downsample_labels, downsample_span, make_dataset,
                           prepare_sample, scene_labels)
