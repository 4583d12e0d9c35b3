from __future__ import annotations

import os

import pytest

from prospect.maps import MapSpec, load_map

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "..", "fixtures", "maps")


def fixture_map(map_id: str) -> MapSpec:
    return load_map(os.path.join(FIXTURE_DIR, f"{map_id}.json"))


@pytest.fixture(scope="session")
def trivial_map() -> MapSpec:
    return fixture_map("trivial-1")


@pytest.fixture(scope="session")
def corridor_map() -> MapSpec:
    return fixture_map("corridor-8")


@pytest.fixture(scope="session")
def fork_trap_map() -> MapSpec:
    return fixture_map("fork-trap")


@pytest.fixture(scope="session")
def zigzag_map() -> MapSpec:
    return fixture_map("zigzag-12")


@pytest.fixture(scope="session")
def meadow_map() -> MapSpec:
    return fixture_map("meadow-50")


@pytest.fixture(scope="session")
def island_map() -> MapSpec:
    return fixture_map("island-0")
