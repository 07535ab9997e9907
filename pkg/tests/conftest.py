import json

import numpy as np
import pytest

from tmtmp import example21, io


@pytest.fixture
def ex21_moments():
    return example21.moments()


@pytest.fixture
def ex21_file(tmp_path):
    path = tmp_path / "ex21.json"
    path.write_text(json.dumps(io.moments_to_json(example21.moments())))
    return path


def write_moments(tmp_path, mats, name="m.json"):
    mats = [np.atleast_2d(np.asarray(M, dtype=complex)) for M in mats]
    obj = {"N": mats[0].shape[0], "d": len(mats) - 1, "S": [io.encode_matrix(M) for M in mats]}
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
