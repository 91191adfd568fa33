from __future__ import annotations

import pytest

from omnigraph import bundled_metamodel


@pytest.fixture(scope="session")
def dialog_mm():
    return bundled_metamodel("dialog")


@pytest.fixture(scope="session")
def basic_mm():
    return bundled_metamodel("basic")


@pytest.fixture(scope="session")
def codegen_mm():
    return bundled_metamodel("codegen")
