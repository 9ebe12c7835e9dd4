import os
import shutil
import sys

import pytest

HERE = os.path.dirname(os.path.abspath(__file__))
REPO = os.path.dirname(HERE)
SCRIPTS = os.path.join(HERE, "scripts")
SHIM = os.path.join(REPO, "solvers", "z3wasm", "bin", "z3")


def find_solver() -> list[str] | None:
    """A command answering the `z3 -in` protocol: a real z3 if installed,
    otherwise the bundled WASM shim (needs node + its npm install)."""
    if shutil.which("z3"):
        return ["z3", "-in"]
    node_modules = os.path.join(REPO, "solvers", "z3wasm", "node_modules", "z3-solver")
    if os.path.exists(SHIM) and shutil.which("node") and os.path.isdir(node_modules):
        return [SHIM, "-in"]
    return None


@pytest.fixture(scope="session")
def solver_cmd() -> list[str]:
    cmd = find_solver()
    if cmd is None:
        pytest.skip("no SMT solver available (install z3, or run npm install "
                    "in solvers/z3wasm)")
    return cmd


@pytest.fixture
def script_path():
    def get(name: str) -> str:
        return os.path.join(SCRIPTS, name)
    return get


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # capture-proof echo of the acceptance verdict lines
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
