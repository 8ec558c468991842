import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from folchar.models import S3Family
from folchar.numeric import QuadratureSpec
from folchar.randgen import seeded_rng

MANIFEST_DIR = os.path.join(os.path.dirname(__file__), "..", "manifests")


@pytest.fixture()
def rng():
    return seeded_rng()


@pytest.fixture(scope="session")
def family():
    """The S^3 family at reference quadrature, shared across tests since
    the compiled grids dominate the cost."""
    return S3Family(QuadratureSpec(48))


@pytest.fixture(scope="session")
def family_fast():
    return S3Family(QuadratureSpec(24))


@pytest.fixture()
def manifest_path():
    return os.path.join(MANIFEST_DIR, "example_s3.json")


@pytest.fixture()
def manifest_path_lambda2():
    return os.path.join(MANIFEST_DIR, "example_s3_lambda2.json")
