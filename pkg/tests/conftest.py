import pytest

from core.rules import make_builtin, make_builtin_family
from core.sphere_core import SpherePoint
from utils.project_organizer import ProjectOrganizer


@pytest.fixture(autouse=True)
def workdir(tmp_path):
    """Every test writes reports under its own temporary work directory"""
    ProjectOrganizer.configure(str(tmp_path / "workdir"))
    yield tmp_path / "workdir"
    ProjectOrganizer.configure("workdir")


@pytest.fixture
def circle_basis():
    return SpherePoint.basis(1, 1), SpherePoint.basis(1, 2)


@pytest.fixture
def sphere_basis():
    return SpherePoint.basis(2, 1), SpherePoint.basis(2, 2), SpherePoint.basis(2, 3)


@pytest.fixture
def dictator3():
    return make_builtin("dictator", 3, 1, {"winner": 1})


@pytest.fixture
def dictator_family():
    return make_builtin_family("dictator", 1, {"winner": 1})


@pytest.fixture
def constant_family():
    return make_builtin_family("constant", 1)
