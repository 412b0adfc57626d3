import numpy as np
import pytest

from ncc import GridSpec, PolicyAction
from ncc.fixtures import baseline_params, make_macro_panel, write_market_fixtures


@pytest.fixture(scope="session")
def params():
    return baseline_params()


@pytest.fixture(scope="session")
def action():
    return PolicyAction(p=0.8, m=0.5)


@pytest.fixture(scope="session")
def small_grid():
    return GridSpec(n_theta=5, n_ltilde=5, n_omega=5, n_p=5, n_m=5,
                    quad_nodes=7, tol=1e-8, max_iter=5000)


@pytest.fixture(scope="session")
def market_dir(tmp_path_factory):
    """Directory holding the three-index minute-bar fixture CSVs."""
    directory = tmp_path_factory.mktemp("market")
    components = write_market_fixtures(directory)
    return directory, components


@pytest.fixture(scope="session")
def macro_panel():
    return make_macro_panel()


@pytest.fixture(scope="session")
def rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(20240601)))
