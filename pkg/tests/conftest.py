import random
from dataclasses import replace

import pytest

from synthlang.config import BASE_CONFIG
from synthlang.generator import Mode, build_name_pool, generate_sample
from synthlang.lang import RenderLang
from synthlang import rngstream


@pytest.fixture(scope="session")
def small_cfg():
    # Quota 0 keeps unit-scale builds free of mandate pressure.
    return replace(BASE_CONFIG, global_var_count=40,
                   global_variables_num_appearance=0, master_seed=7)


@pytest.fixture(scope="session")
def small_pool(small_cfg):
    return build_name_pool(small_cfg, small_cfg.master_seed)


@pytest.fixture(scope="session")
def module_factory(small_cfg, small_pool):
    """index -> (Sample, env dict) with a dialect drawn from the index."""

    def make(index, mode=Mode.TRAIN, dialect=None):
        if dialect is None:
            dialect = RenderLang.LOLA if index % 2 == 0 else RenderLang.MEME
        sample, _ = generate_sample(small_cfg, small_pool, mode,
                                    rngstream.STREAM_TRAIN, index,
                                    dialect=dialect)
        return sample, small_pool.surface_values

    return make
