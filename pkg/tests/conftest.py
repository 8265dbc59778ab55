# tests/conftest.py
"""
Pytest configuration and shared fixtures for the fv_system test suite.

Run:
    pytest tests -v
    pytest tests -v --full-campaign
    pytest tests/test_cli.py --update-golden   # re-record tests/golden
"""
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np
import pytest

from config import Config
from fv_system.config.presets import gate_preset, observable_preset, state_preset
from fv_system.models.lattice import Lattice
from fv_system.models.operator import DensityState, Operator, SlotLayout
from fv_system.models.specs import Coupling, ObserverSpec, ProbeSpec, SystemSpec, probe_slot
from fv_system.qop.random_ops import random_density

# =============================================================================
# INITIALIZE CONFIG
# =============================================================================

Config.initialize_from_env()

# =============================================================================
# CONSTANTS
# =============================================================================

WIDTH = 5
DEPTH = 4

GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

# Campaign sizes: (default, --full-campaign)
CAMPAIGN_SIZES = {
    'sorkin': (4, 100),
    'lemma1': (4, 50),
    'theorem2': (3, 50),
    'oracle': (4, 100),
}


# =============================================================================
# PYTEST OPTIONS
# =============================================================================

def pytest_addoption(parser):
    """Add custom CLI options for tests."""
    parser.addoption(
        "--full-campaign",
        action="store_true",
        default=False,
        help="Run randomized campaigns at acceptance size instead of the quick default"
    )
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="Rewrite tests/golden reports from the current run instead of comparing"
    )


@pytest.fixture(autouse=True)
def reset_config():
    """Every test starts from default settings."""
    Config.reset()
    yield
    Config.reset()


@pytest.fixture
def campaign_size(request):
    """
    Returns trial count per campaign check.

    Default: a handful of seeds per check
    With --full-campaign: acceptance-criteria counts
    """
    full = request.config.getoption("--full-campaign")

    def _size(check: str) -> int:
        quick, complete = CAMPAIGN_SIZES[check]
        return complete if full else quick

    return _size


@pytest.fixture
def golden(request):
    """
    Byte comparison against tests/golden/<name>.json.

    With --update-golden the file is rewritten from `text`. A missing file
    fails the test; record it with --update-golden and commit it.
    """
    update = request.config.getoption("--update-golden")

    def _check(name: str, text: str) -> None:
        path = GOLDEN_DIR / f"{name}.json"
        if update:
            GOLDEN_DIR.mkdir(exist_ok=True)
            path.write_text(text, encoding="utf-8")
            return
        if not path.exists():
            pytest.fail(f"No golden report {path.name}; run pytest --update-golden and commit it")
        assert text == path.read_text(encoding="utf-8"), f"Report differs from golden {path.name}"

    return _check


# =============================================================================
# SYSTEM FIXTURES
# =============================================================================

@pytest.fixture
def lattice():
    """5 x 4 lattice used by most geometric examples."""
    return Lattice(WIDTH, DEPTH)


@pytest.fixture
def random_system(lattice):
    """Qubit chain with Haar brickwork gates (seed 1234)."""
    return SystemSpec.random(lattice, 2, 1234)


@pytest.fixture
def swap_system(lattice):
    """Qubit chain whose free dynamics is SWAP on every bond."""
    return SystemSpec.uniform(lattice, 2, gate_preset("swap", 2))


@pytest.fixture
def random_omega(random_system):
    """Full-rank random system state."""
    layout = random_system.layout
    return random_density(layout.total_dim, 99, layout)


# =============================================================================
# FACTORY FIXTURES
# =============================================================================

@pytest.fixture
def product_state():
    """
    Factory for product states of named single-site presets.

    Usage: product_state(system, ["zero", "plus", ...])
    """

    def _build(system: SystemSpec, names: Sequence[str]) -> DensityState:
        matrix = np.ones((1, 1), dtype=np.complex128)
        for name in names:
            matrix = np.kron(matrix, state_preset(name, system.site_dim))
        return DensityState(matrix, system.layout)

    return _build


@pytest.fixture
def make_observer():
    """
    Factory for observers built from presets.

    Usage: make_observer("A", [(0, 0)], gate="swap", state="zero", observable="proj0")
    `gate` may also be a matrix, or a list with one entry per cell.
    """

    def _build(name: str, cells: Sequence[Tuple[int, int]], gate="swap", state: str = "zero",
               observable: str = "proj0", dim: int = 2, site_dim: int = 2,
               nonlocal_: bool = False, observable_matrix: Optional[np.ndarray] = None) -> ObserverSpec:
        layout = SlotLayout.of([(probe_slot(name), dim)])
        gates = gate if isinstance(gate, list) else [gate] * len(cells)
        couplings = []
        for cell, g in zip(cells, gates):
            matrix = gate_preset(g, site_dim) if isinstance(g, str) else np.asarray(g)
            couplings.append(Coupling(cell, matrix))
        sigma = DensityState(state_preset(state, dim), layout)
        probe = ProbeSpec(name, dim, sigma, tuple(couplings), nonlocal_)
        o = observable_matrix if observable_matrix is not None else observable_preset(observable, dim)
        return ObserverSpec(name, probe, Operator(o, layout))

    return _build
