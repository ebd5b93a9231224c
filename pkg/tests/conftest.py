import pytest

from quarterwalk import registry
from quarterwalk.pipeline import Solver


@pytest.fixture(scope="session")
def fib_ref():
    return registry.get("fibonacci-identical")


@pytest.fixture(scope="session")
def fgs_ref():
    return registry.get("finite-group-simple")


@pytest.fixture(scope="session")
def mixed_ref():
    return registry.get("fibonacci-mixed")


@pytest.fixture(scope="session")
def demo_ref():
    return registry.get("generic-singular-demo")


@pytest.fixture(scope="session")
def fib_solver(fib_ref):
    return Solver(fib_ref.model)


@pytest.fixture(scope="session")
def fgs_solver(fgs_ref):
    return Solver(fgs_ref.model)


@pytest.fixture(scope="session")
def mixed_solver(mixed_ref):
    return Solver(mixed_ref.model)


@pytest.fixture(scope="session")
def demo_solver(demo_ref):
    return Solver(demo_ref.model)
