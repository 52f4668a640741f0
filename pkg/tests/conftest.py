import pytest


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False,
                     help="run long-budget stretch checks (day-5 census, Guiles to heap 30)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip = pytest.mark.skip(reason="stretch check; pass --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)
