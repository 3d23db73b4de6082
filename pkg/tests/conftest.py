import numpy as np
import pytest

from apps.catalog.entries import CaseId, catalog_solution
from apps.geometry.profiles import ProfileKind, make_space_form
from apps.geometry.specs import MapSpec


@pytest.fixture
def euclidean():
    return make_space_form(ProfileKind.EUCLIDEAN)


@pytest.fixture
def unit_sphere():
    return make_space_form(ProfileKind.SPHERE, 1.0)


@pytest.fixture
def unit_hyperbolic():
    return make_space_form(ProfileKind.HYPERBOLIC, 1.0)


@pytest.fixture
def euclidean_to_sphere(euclidean, unit_sphere):
    return MapSpec(m=4, f=euclidean, h=unit_sphere)


@pytest.fixture
def euclidean_to_euclidean(euclidean):
    return MapSpec(m=4, f=euclidean, h=euclidean)


@pytest.fixture
def c1b():
    return catalog_solution(CaseId.C1B, c=1.0, d=1.0)


@pytest.fixture
def c1c():
    return catalog_solution(CaseId.C1C, c=1.0, d=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def output_dir(settings, tmp_path):
    settings.OUTPUT_DIR = tmp_path / "output"
    return settings.OUTPUT_DIR
