from __future__ import annotations

import re
from pathlib import Path

import pytest

from sitaspect.dsl import parse_domain, parse_model, parse_state

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_runtest_logreport(report):
    """Emit the FAIL counterpart of the acceptance PASS lines."""
    if report.when != "call" or not report.failed:
        return
    match = re.search(r"test_criterion_(\d+)", report.nodeid)
    if match:
        print(f"\nACCEPTANCE {int(match.group(1))}: FAIL - see the failure "
              f"details for this test")


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_domain(name: str):
    return parse_domain(fixture_text(name), file=name)


def load_model(name: str):
    return parse_model(fixture_text(name), file=name)


@pytest.fixture(scope="session")
def blocks():
    return load_domain("blocks.dom")


@pytest.fixture(scope="session")
def blocks_nosupport():
    return load_domain("blocks_nosupport.dom")


@pytest.fixture(scope="session")
def rooms():
    return load_domain("rooms.dom")


@pytest.fixture(scope="session")
def display():
    return load_domain("display.dom")


@pytest.fixture(scope="session")
def economy():
    return load_domain("economy.dom")


@pytest.fixture(scope="session")
def heater_model():
    return load_model("heater.model")


@pytest.fixture(scope="session")
def heater_all_model():
    return load_model("heater_all.model")


@pytest.fixture(scope="session")
def university_model():
    return load_model("university.model")


BLOCKS_INIT = ("on(a,floor); on(b,floor); on(c,floor); "
               "clear(a); clear(b); clear(c); clear(floor)")

ROOMS_INIT = ("on(a,f1); on(b,f1); on(c,f2); "
              "clear(a); clear(b); clear(c); clear(f1); clear(f2); "
              "at_room(a,r1); at_room(b,r1); at_room(c,r2); "
              "at_room(f1,r1); at_room(f2,r2)")

DISPLAY_INIT = "pixel_lit(p1); cell_set(m1); window_open(); door_open()"


@pytest.fixture(scope="session")
def blocks_init(blocks):
    return parse_state(BLOCKS_INIT, blocks)


@pytest.fixture(scope="session")
def rooms_init(rooms):
    return parse_state(ROOMS_INIT, rooms)


@pytest.fixture(scope="session")
def display_init(display):
    return parse_state(DISPLAY_INIT, display)
