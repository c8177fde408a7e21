import os.path as osp

import numpy as np
import pytest

from scatterquery.config import get_cfg_defaults
from scatterquery.polsar import PolsarRaster

DEMO_CONFIG = osp.join(osp.dirname(osp.dirname(osp.abspath(__file__))), 'configs', 'demo.yml')


def random_raster(rng, height, width, scale=1.0):
    stack = rng.standard_normal((4, height, width)) + 1j * rng.standard_normal((4, height, width))
    return PolsarRaster.from_array(scale * stack)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def cfg():
    return get_cfg_defaults()


@pytest.fixture
def tiny_cfg(tmp_path):
    """Small model and short schedule, fast enough for every test run."""
    cfg = get_cfg_defaults()
    cfg.merge_from_list(['OUTPUT_DIR', str(tmp_path),
                         'SYNTH.HEIGHT', 16, 'SYNTH.WIDTH', 16, 'SYNTH.SPECKLE', False,
                         'MODEL.DIM', 8, 'MODEL.ENCODER_LAYERS', 1, 'MODEL.DECODER_LAYERS', 2,
                         'QUERIES.NUM_SAMPLES', 8,
                         'SOLVER.MAX_ITERS', 4, 'SOLVER.LOG_PERIOD', 2, 'SOLVER.EVAL_PERIOD', 2])
    return cfg
