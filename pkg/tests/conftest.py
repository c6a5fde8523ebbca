import numpy as np
import pytest

from vacuumflow.fields import FieldSource, VacuumField


@pytest.fixture
def uniform_field():
    """W = -1 everywhere, no sources."""
    return VacuumField(w_inf=-1.0)


@pytest.fixture
def static_source_field():
    """Single static softened source, the flyby potential."""
    return VacuumField(
        w_inf=-1.0,
        sources=(FieldSource(qs=0.5, r0=(0.0, 0.0, 0.0), uf=(0.0, 0.0, 0.0), eps=0.05),),
        q_test=1.0,
    )


@pytest.fixture
def moving_field():
    from vacuumflow.presets import moving_source_field

    return moving_source_field()


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
