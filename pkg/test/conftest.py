"""Shared fixtures."""

import numpy as np
import pytest

from normctl.models.element import ComplexMatrix, TorusPolynomial
from normctl.models.pair import AlgebraPair
from normctl.repositories.element_repository import ElementRepository
from normctl.services.algebra_service import AlgebraService
from normctl.services.bound_service import BoundService
from normctl.services.inversion_service import InversionService


@pytest.fixture
def c1_pair() -> AlgebraPair:
    return AlgebraPair(kind="C1_in_C")


@pytest.fixture
def approx_pair() -> AlgebraPair:
    return AlgebraPair(kind="ApproxSpace_in_Matrices")


@pytest.fixture
def wiener_pair() -> AlgebraPair:
    return AlgebraPair(kind="Wiener_in_C")


@pytest.fixture
def c1(c1_pair) -> AlgebraService:
    return AlgebraService(c1_pair)


@pytest.fixture
def approx(approx_pair) -> AlgebraService:
    return AlgebraService(approx_pair)


@pytest.fixture
def c1_inversion(c1_pair) -> InversionService:
    return InversionService(c1_pair)


@pytest.fixture
def matrix_inversion(approx_pair) -> InversionService:
    return InversionService(approx_pair)


@pytest.fixture
def bounds() -> BoundService:
    return BoundService()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def cosine() -> TorusPolynomial:
    """cos(2 pi t)."""
    return TorusPolynomial.from_mapping({1: 0.5, -1: 0.5})


@pytest.fixture
def skewed() -> TorusPolynomial:
    """1 + 0.7 cos(2 pi t): kappa = 1.7/0.3 > 5."""
    return TorusPolynomial.from_mapping({0: 1.0, 1: 0.35, -1: 0.35})


@pytest.fixture
def element_file(tmp_path):
    """Write an element to a JSON file and return its path."""

    def write(element, name: str = "element.json") -> str:
        path = tmp_path / name
        ElementRepository.save_element(element, path)
        return str(path)

    return write


@pytest.fixture
def identity_matrix() -> ComplexMatrix:
    return ComplexMatrix.identity_of(3)
