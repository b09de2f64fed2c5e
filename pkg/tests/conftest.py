import pytest

from hlaskit.example import example_data_dir, load_example


@pytest.fixture(scope="session")
def example_dir():
    return example_data_dir()


@pytest.fixture(scope="session")
def example_inputs():
    """(prereg, measurements, pairs) of the bundled worked example."""
    return load_example()


@pytest.fixture(scope="session")
def example_pairs(example_inputs):
    return example_inputs[2]


@pytest.fixture(scope="session")
def example_scheme(example_inputs):
    return example_inputs[0].scheme


@pytest.fixture
def ankle_walk(example_pairs):
    return next(p for p in example_pairs
                if (p.task, p.joint) == ("Walk", "ankle"))
