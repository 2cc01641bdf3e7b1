import pytest

from sadic.fixtures import all_fixtures, complexity_fixtures, example_1_2, example_1_3, example_1_4


@pytest.fixture
def ex12():
    return example_1_2()


@pytest.fixture
def ex13():
    return example_1_3()


@pytest.fixture
def ex14():
    return example_1_4()


@pytest.fixture(params=sorted(all_fixtures()))
def fixture_system(request):
    return all_fixtures()[request.param]


@pytest.fixture(params=sorted(complexity_fixtures()))
def complexity_system(request):
    return complexity_fixtures()[request.param]
