import numpy as np
import pytest

from slpca.models.data_matrix import DataMatrix
from slpca.models.generator import HAT_NOISE, HAT_SIGMA_X, HELIX_NOISE, HELIX_SIGMA_X
from slpca.services.pslaam_service import reconstruct
from slpca.services.synthgen_service import gen_hat, gen_helix

# seed of the regenerated helix and hat data sets
EXPERIMENT_SEED = 2


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def random_data(rng):
    """40 correlated points in dimension 4"""
    mixing = rng.standard_normal((4, 4))
    return DataMatrix.from_array(rng.standard_normal((40, 4)) @ mixing)


@pytest.fixture(scope="session")
def helix_data():
    return gen_helix(1000, HELIX_SIGMA_X, HELIX_NOISE, seed=EXPERIMENT_SEED)


@pytest.fixture(scope="session")
def hat_data():
    return gen_hat(1000, np.array(HAT_SIGMA_X), HAT_NOISE, seed=EXPERIMENT_SEED)


@pytest.fixture
def write_text(tmp_path):
    """Write a text file under tmp_path and return its path as a string"""

    def _write(name: str, content: str) -> str:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return str(path)

    return _write


def check_projection_preserved(model, points: int = 100, seed: int = 0, scale: float = 3.0):
    """P reconstruct(y) = P y at random points, i.e. P (y - reconstruct(y)) = 0"""
    rng = np.random.default_rng(seed)
    centered = scale * rng.standard_normal((points, model.p))
    Y = DataMatrix(values=model.centering.invert(centered), column_names=model.column_names)
    restored = model.centering.apply(reconstruct(model, Y).values)
    drift = (restored - model.centering.apply(Y.values)) @ model.basis.P.T
    assert np.max(np.abs(drift)) < 1e-8


@pytest.fixture
def projection_preserved():
    return check_projection_preserved
