# tests/test_config_loader.py
"""
Tests for experiment config loading: JSON parsing, schema validation with
JSON pointers, physical validation and overrides.

Run: pytest tests/test_config_loader.py -v
"""
import copy
import json
from pathlib import Path

import numpy as np
import pytest

from config import Config
from fv_system.errors import ParseError, PhysicsValidationError, SchemaError
from fv_system.experiments import parse_config
from fv_system.experiments.config_loader import json_pointer

EXAMPLES = Path(__file__).resolve().parent.parent / "experiments"

MINIMAL = {
    "version": 1,
    "experiment": "lemma1",
    "system": {"width": 4, "depth": 3, "gate": {"preset": "swap"}},
    "observers": [
        {
            "name": "A",
            "state": {"preset": "zero"},
            "couplings": [{"cell": [1, 1], "gate": {"preset": "cnot"}}],
            "observable": {"preset": "z"},
        }
    ],
}


@pytest.fixture
def write_config(tmp_path):
    """
    Factory writing a config dict (or raw text) to a temp file.

    Usage: write_config(MINIMAL, observers=[...]) -> path
    """

    def _write(base, **changes) -> Path:
        path = tmp_path / "config.json"
        if isinstance(base, str):
            path.write_text(base, encoding="utf-8")
            return path
        raw = copy.deepcopy(base)
        raw.update(changes)
        path.write_text(json.dumps(raw), encoding="utf-8")
        return path

    return _write


def pointers(exc_info):
    return [pointer for pointer, _ in exc_info.value.violations]


# =============================================================================
# VALID CONFIGS
# =============================================================================

class TestValidConfigs:
    """Configs that load into domain objects."""

    def test_minimal_config(self, write_config):
        """TEST: A lemma1 config builds a system and one observer"""
        experiment = parse_config(write_config(MINIMAL))
        assert experiment.system.lattice.width == 4
        assert list(experiment.observers) == ["A"]
        assert experiment.omega is None
        assert experiment.config.tolerance == 1e-9

    @pytest.mark.parametrize("path", sorted(EXAMPLES.glob("*.json")), ids=lambda p: p.stem)
    def test_shipped_examples_load(self, path):
        """TEST: Every shipped example passes all validation stages"""
        experiment = parse_config(path)
        assert len(experiment.digest) == 64

    def test_bell_initial_state(self):
        """TEST: bell [0,4] puts sites 0 and 4 in a Bell pair, the rest in |0⟩"""
        experiment = parse_config(EXAMPLES / "spacelike.json")
        psi = np.zeros(32)
        psi[0] = psi[0b10001] = 1 / np.sqrt(2)
        assert np.allclose(experiment.omega.matrix, np.outer(psi, psi))

    def test_charlie_observable_pulled_back(self):
        """TEST: Charlie's op is pulled back from its cell and declared on the region"""
        experiment = parse_config(EXAMPLES / "sorkin.json")
        assert experiment.charlie_observable is not None
        assert experiment.charlie_observable.declared_region == experiment.charlie_region
        assert len(experiment.charlie_region) == 2


# =============================================================================
# PARSE AND SCHEMA ERRORS
# =============================================================================

class TestSchemaErrors:
    """Every problem is reported with its JSON pointer."""

    def test_not_json(self, write_config):
        """TEST: Malformed JSON raises ParseError"""
        with pytest.raises(ParseError):
            parse_config(write_config('{"version": 1,'))

    def test_missing_file(self, tmp_path):
        """TEST: An unreadable path raises ParseError"""
        with pytest.raises(ParseError):
            parse_config(tmp_path / "absent.json")

    def test_top_level_array(self, write_config):
        """TEST: A JSON array is not a config"""
        with pytest.raises(SchemaError):
            parse_config(write_config("[]"))

    def test_unknown_experiment(self, write_config):
        """TEST: An unknown experiment name points at /experiment"""
        with pytest.raises(SchemaError) as exc:
            parse_config(write_config(MINIMAL, experiment="teleport"))
        assert "/experiment" in pointers(exc)

    def test_unknown_field(self, write_config):
        """TEST: Extra keys are refused"""
        with pytest.raises(SchemaError) as exc:
            parse_config(write_config(MINIMAL, colour="blue"))
        assert "/colour" in pointers(exc)

    def test_nested_pointer(self, write_config):
        """TEST: A bad probe dimension points into the observer list"""
        observers = copy.deepcopy(MINIMAL["observers"])
        observers[0]["dim"] = 9
        with pytest.raises(SchemaError) as exc:
            parse_config(write_config(MINIMAL, observers=observers))
        assert "/observers/0/dim" in pointers(exc)

    def test_all_errors_reported(self, write_config):
        """TEST: Several schema errors are reported together"""
        with pytest.raises(SchemaError) as exc:
            parse_config(write_config(MINIMAL, version=2, tolerance=-1))
        assert {"/version", "/tolerance"} <= set(pointers(exc))

    def test_missing_cross_reference(self, write_config):
        """TEST: A sorkin config naming an unknown Bob fails at /bob"""
        raw = json.loads((EXAMPLES / "sorkin.json").read_text())
        with pytest.raises(SchemaError) as exc:
            parse_config(write_config(raw, bob="eve"))
        assert "/bob" in pointers(exc)

    def test_required_state(self, write_config):
        """TEST: theorem2 without an initial state fails at /initial_state"""
        raw = json.loads((EXAMPLES / "theorem2.json").read_text())
        del raw["initial_state"]
        with pytest.raises(SchemaError) as exc:
            parse_config(write_config(raw))
        assert "/initial_state" in pointers(exc)

    @pytest.mark.parametrize("loc,expected", [
        ((), "/"),
        (("observers", 0, "name"), "/observers/0/name"),
        (("a/b", "c~d"), "/a~1b/c~0d"),
    ])
    def test_json_pointer(self, loc, expected):
        """TEST: Pointers escape '/' and '~'"""
        assert json_pointer(loc) == expected


# =============================================================================
# PHYSICS ERRORS
# =============================================================================

class TestPhysicsErrors:
    """Matrices, worldlines and regions are checked after the schema."""

    def test_non_unitary_gate(self, write_config):
        """TEST: An inline non-unitary coupling gate is refused"""
        observers = copy.deepcopy(MINIMAL["observers"])
        doubled = [[[2.0 if i == j else 0.0, 0.0] for j in range(4)] for i in range(4)]
        observers[0]["couplings"][0]["gate"] = {"matrix": doubled}
        with pytest.raises(PhysicsValidationError) as exc:
            parse_config(write_config(MINIMAL, observers=observers))
        assert "/observers/0/couplings/0/gate" in pointers(exc)

    def test_wrong_gate_size(self, write_config):
        """TEST: A 2x2 coupling gate does not fit site ⊗ probe"""
        observers = copy.deepcopy(MINIMAL["observers"])
        observers[0]["couplings"][0]["gate"] = {"matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}
        with pytest.raises(PhysicsValidationError) as exc:
            parse_config(write_config(MINIMAL, observers=observers))
        assert "/observers/0/couplings/0/gate/matrix" in pointers(exc)

    def test_cell_outside_lattice(self, write_config):
        """TEST: A coupling cell beyond the lattice is refused"""
        observers = copy.deepcopy(MINIMAL["observers"])
        observers[0]["couplings"][0]["cell"] = [7, 1]
        with pytest.raises(PhysicsValidationError) as exc:
            parse_config(write_config(MINIMAL, observers=observers))
        assert "/observers/0/couplings/0/cell" in pointers(exc)

    def test_broken_worldline(self, write_config):
        """TEST: A local probe at spacelike cells is refused"""
        observers = copy.deepcopy(MINIMAL["observers"])
        observers[0]["couplings"].append({"cell": [3, 1], "gate": {"preset": "swap"}})
        with pytest.raises(PhysicsValidationError):
            parse_config(write_config(MINIMAL, observers=observers))

    def test_bad_probe_state(self, write_config):
        """TEST: A non-positive probe state fails at its pointer"""
        observers = copy.deepcopy(MINIMAL["observers"])
        observers[0]["state"] = {"matrix": [[[2, 0], [0, 0]], [[0, 0], [-1, 0]]]}
        with pytest.raises(PhysicsValidationError) as exc:
            parse_config(write_config(MINIMAL, observers=observers))
        assert "/observers/0/state" in pointers(exc)

    def test_charlie_cell_outside_region(self, write_config):
        """TEST: Charlie's observable cell must lie in the declared region"""
        raw = json.loads((EXAMPLES / "sorkin.json").read_text())
        raw["charlie"]["observable"]["cell"] = [3, 3]
        with pytest.raises(PhysicsValidationError) as exc:
            parse_config(write_config(raw))
        assert "/charlie/observable/cell" in pointers(exc)

    def test_dimension_cap(self, write_config):
        """TEST: Configs beyond MAX_DIMENSION are refused"""
        Config.set(Config.MAX_DIMENSION, 16)
        with pytest.raises(PhysicsValidationError) as exc:
            parse_config(write_config(MINIMAL))
        assert "/observers" in pointers(exc)


# =============================================================================
# OVERRIDES
# =============================================================================

class TestOverrides:
    """CLI overrides are validated and enter the digest."""

    def test_seed_override_changes_digest(self, write_config):
        """TEST: --seed replaces the config seed and the digest"""
        path = write_config(MINIMAL)
        plain = parse_config(path)
        seeded = parse_config(path, seed=17)
        assert seeded.config.seed == 17
        assert seeded.digest != plain.digest

    def test_digest_stable(self, write_config):
        """TEST: Loading twice gives one digest"""
        path = write_config(MINIMAL)
        assert parse_config(path).digest == parse_config(path).digest

    def test_invalid_override(self, write_config):
        """TEST: A negative tolerance override is a schema error"""
        with pytest.raises(SchemaError) as exc:
            parse_config(write_config(MINIMAL), tolerance=-0.5)
        assert "/tolerance" in pointers(exc)
