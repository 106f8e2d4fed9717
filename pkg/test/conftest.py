import pytest

from modules.contexts import ContextBuilder


@pytest.fixture
def builder():
    return ContextBuilder()
