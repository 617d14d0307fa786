import pytest

from ivp2Tube.interval.core import DEFAULT_PRECISION, set_precision
from ivp2Tube.models.application import SolveConfig
from ivp2Tube.models.instance import instance_from_dict


@pytest.fixture(autouse=True)
def default_precision():
    set_precision(DEFAULT_PRECISION)
    yield
    set_precision(DEFAULT_PRECISION)


@pytest.fixture
def make_instance():
    def build(rhs, x0="0", y0=("0",), domain=None, dimension=None):
        return instance_from_dict({
            "schema_version": "1.0",
            "dimension": dimension or len(y0),
            "rhs": {"expr": rhs} if isinstance(rhs, str) else rhs,
            "domain": domain or {"auto_growing": True},
            "x0": str(x0),
            "y0": [str(v) for v in y0],
        })
    return build


@pytest.fixture
def unit_ball():
    return {"balls": [{"center": ["0", "0"], "radius": "1"}]}


@pytest.fixture
def small_config():
    """Coarse grid so the oracle tests stay quick."""
    return SolveConfig(grid_depth=5, refine_rounds=30, max_bisections=16)
