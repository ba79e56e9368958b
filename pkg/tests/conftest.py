import json

import pytest

from qplex.model import ModelBuilder, parse_model

KNAPSACK = {
    "name": "knapsack",
    "variables": [{"name": "x0", "kind": "binary"}, {"name": "x1", "kind": "binary"}],
    "objective": {"sense": "max", "constant": 0.0, "linear": {"x0": 3.0, "x1": 4.0},
                  "quadratic": [["x0", "x1", 0.0]]},
    "constraints": [{"name": "cap", "linear": {"x0": 2.0, "x1": 3.0}, "sense": "<=", "rhs": 4.0}],
}

TOKEN_VAR = "QPLEX_MOCK-REMOTE_TOKEN"


@pytest.fixture
def knapsack():
    return parse_model(json.dumps(KNAPSACK))


@pytest.fixture
def knapsack_path(tmp_path):
    path = tmp_path / "knapsack.json"
    path.write_text(json.dumps(KNAPSACK))
    return path


@pytest.fixture
def ring4():
    """Max-cut on the 4-cycle as a binary maximization model."""
    b = ModelBuilder("ring4")
    xs = [b.binary(f"x{i}") for i in range(4)]
    linear = {x: 0.0 for x in xs}
    quadratic = []
    for i in range(4):
        a, c = xs[i], xs[(i + 1) % 4]
        linear[a] += 1
        linear[c] += 1
        quadratic.append((a, c, -2))
    b.maximize(linear, quadratic)
    return b.build()


@pytest.fixture
def token(monkeypatch):
    monkeypatch.setenv(TOKEN_VAR, "mock-token")
    return "mock-token"


@pytest.fixture
def no_token(monkeypatch):
    monkeypatch.delenv(TOKEN_VAR, raising=False)


_ACCEPTANCE = []


def record_acceptance(name, passed, detail=""):
    _ACCEPTANCE.append((name, passed, detail))
    print(f"ACCEPTANCE {name}: {'PASS' if passed else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
