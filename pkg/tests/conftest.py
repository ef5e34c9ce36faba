from __future__ import annotations

import pytest

from gomterm import Factory, load_builtin, parse_pattern, parse_term


@pytest.fixture(scope="session")
def boolean_module():
    return load_builtin("boolean")


@pytest.fixture(scope="session")
def struct_module():
    return load_builtin("struct")


@pytest.fixture(scope="session")
def nat_module():
    return load_builtin("nat")


@pytest.fixture
def boolean_factory(boolean_module):
    return Factory(boolean_module)


@pytest.fixture
def struct_factory(struct_module):
    return Factory(struct_module)


@pytest.fixture
def nat_factory(nat_module):
    return Factory(nat_module)


@pytest.fixture
def build():
    def _build(factory: Factory, text: str):
        return factory.build_surface(parse_term(text, factory.module))

    return _build


@pytest.fixture
def pattern():
    def _pattern(factory: Factory, text: str):
        return parse_pattern(text, factory.module)

    return _pattern
