import numpy as np
import pytest

from weyldyn import TriangleGrid, make_catalog_potential, neumann_solve


@pytest.fixture(scope="session")
def box():
    return make_catalog_potential("constant_box", [1.0, 1.0])


@pytest.fixture(scope="session")
def expo():
    return make_catalog_potential("exponential", [1.0, 1.0])


@pytest.fixture(scope="session")
def soliton():
    return make_catalog_potential("sech2", [1.0, 3.0])


@pytest.fixture(scope="session")
def bump():
    return make_catalog_potential("bump_train", [1.0, 0.5])


@pytest.fixture(scope="session")
def zero_pot():
    return make_catalog_potential("zero", [])


@pytest.fixture(scope="session")
def catalog(zero_pot, box, expo, soliton, bump):
    return {"zero": zero_pot, "box": box, "exponential": expo,
            "sech2": soliton, "bump_train": bump}


@pytest.fixture(scope="session")
def box_field_8():
    """Kernel for the unit box on eta_max=8, h=0.01 (shared by many tests)."""
    p = make_catalog_potential("constant_box", [1.0, 1.0])
    return neumann_solve(p, TriangleGrid(8.0, 0.01))


@pytest.fixture(scope="session")
def box_field_12():
    """Larger box kernel for spectral tests: eta_max=12.02, h=0.01."""
    p = make_catalog_potential("constant_box", [1.0, 1.0])
    return neumann_solve(p, TriangleGrid(12.02, 0.01))


def l2_grid_norm(arr, *steps):
    w = 1.0
    for s in steps:
        w *= s
    return float(np.sqrt(np.sum(np.asarray(arr) ** 2) * w))
