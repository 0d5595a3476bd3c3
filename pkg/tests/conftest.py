import pytest

from invmonoid import presentation


@pytest.fixture(scope="session")
def bicyclic():
    return presentation(["a"], [("a a'", "1")])


@pytest.fixture(scope="session")
def integers():
    # a is two-sided invertible, so the monoid is the group of integers.
    return presentation(["a"], [("a a'", "1"), ("a' a", "1")])


@pytest.fixture(scope="session")
def square_bicyclic():
    # The relator side a a a' a' is not freely reduced on purpose.
    return presentation(["a"], [("a a a' a'", "1")])


@pytest.fixture(scope="session")
def free_two():
    return presentation(["a", "b"], [])


@pytest.fixture(scope="session")
def irrational_tree():
    """Truncation (n <= 2) of the b^(n*n)-c-hair family over {a, b, c}."""
    return presentation(
        ["a", "b", "c"],
        [
            ("a a' b c c' b'", "a a'"),
            ("a a' b b b b c c' b' b' b' b'", "a a'"),
        ],
    )
