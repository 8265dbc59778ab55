# tests/test_updates.py
"""
Tests for expectations, state updates, multi-observer probabilities,
causal factorisation and the forward-simulation oracle.

Run: pytest tests/test_updates.py -v
"""
import numpy as np
import pytest

from fv_system.causal import enumerate_causal_orders
from fv_system.errors import NotAnEffect, NotOrderable, ZeroProbability
from fv_system.models.specs import UpdateMap, probe_slot
from fv_system.qop import Operator, SlotLayout, is_density, random_density, random_effect, random_hermitian, random_unitary
from fv_system.services.oracle_service import SchrodingerOracle
from fv_system.services.update_service import UpdateService, complement_effect, site_marginal

ZERO = np.diag([1.0, 0.0]).astype(np.complex128)


@pytest.fixture
def updates(random_system):
    return UpdateService(random_system)


def effect_on(name, matrix):
    return Operator(matrix, SlotLayout.of([(probe_slot(name), 2)]))


@pytest.fixture
def ordered_pair(make_observer):
    """Observer 'first' at (1,0) strictly before 'second' at (2,2),(2,3)."""
    first = make_observer("first", [(1, 0)], gate=random_unitary(4, 31).matrix, state="plus")
    second = make_observer("second", [(2, 2), (2, 3)],
                           gate=[random_unitary(4, 32).matrix, random_unitary(4, 33).matrix])
    return first, second


@pytest.fixture
def timelike_chain(make_observer):
    """C at (0,0) before A at (1,1) before B at (2,2),(2,3); the only causal order is C, A, B."""
    c = make_observer("C", [(0, 0)], gate=random_unitary(4, 71).matrix, state="plus")
    a = make_observer("A", [(1, 1)], gate=random_unitary(4, 72).matrix, state="minus")
    b = make_observer("B", [(2, 2), (2, 3)],
                      gate=[random_unitary(4, 73).matrix, random_unitary(4, 74).matrix], observable="z")
    return c, a, b


# =============================================================================
# SINGLE OBSERVER
# =============================================================================

class TestSingleObserver:
    """Expectation, nonselective and selective updates."""

    def test_trivial_coupling_expectation(self, updates, make_observer, random_omega):
        """TEST: Without couplings 𝔼 = Tr(σO) regardless of ω"""
        obs = make_observer("A", [], state="plus", observable="x")
        assert np.isclose(updates.expectation(random_omega, obs), 1.0)

    def test_trivial_coupling_update(self, updates, make_observer, random_omega):
        """TEST: Without couplings ρ' = ρ"""
        obs = make_observer("A", [])
        assert np.allclose(updates.nonselective_update(random_omega, obs).matrix, random_omega.matrix)

    def test_swap_reads_site(self, updates, make_observer, random_system, product_state):
        """TEST: SWAP at (x,0) with site x in |0⟩ reads proj0 with certainty"""
        omega = product_state(random_system, ["plus", "one", "zero", "minus", "plus"])
        obs = make_observer("A", [(2, 0)], gate="swap", state="one", observable="proj0")
        assert updates.expectation(omega, obs) == pytest.approx(1.0, abs=1e-12)

    def test_swap_resets_site(self, updates, make_observer, random_system, product_state):
        """TEST: SWAP at (x,0) with σ=|0⟩ leaves site x in |0⟩⟨0|"""
        omega = product_state(random_system, ["plus", "one", "plus", "minus", "plus"])
        obs = make_observer("A", [(2, 0)], gate="swap", state="zero")
        rho = updates.nonselective_update(omega, obs)
        assert np.allclose(site_marginal(rho, 2).matrix, ZERO)

    def test_nonselective_is_density(self, updates, make_observer, random_omega):
        """TEST: Nonselective updates are trace-preserving and positive"""
        obs = make_observer("A", [(2, 1), (2, 2)], gate="cnot", state="plus")
        assert is_density(updates.nonselective_update(random_omega, obs))

    def test_selective_identity_is_nonselective(self, updates, make_observer, random_omega):
        """TEST: E = 1 gives the nonselective update with p = 1"""
        obs = make_observer("A", [(2, 1)], gate="cnot", state="plus")
        state, p = updates.selective_update(random_omega, obs, effect_on("A", np.eye(2)))
        assert p == pytest.approx(1.0)
        assert np.allclose(state.matrix, updates.nonselective_update(random_omega, obs).matrix)

    def test_selective_half_probability(self, updates, make_observer, random_system, product_state):
        """TEST: SWAP at (x,0), ρ_x = |+⟩, E = |0⟩⟨0| gives p = 1/2 and site x in |0⟩"""
        omega = product_state(random_system, ["zero", "one", "plus", "zero", "one"])
        obs = make_observer("A", [(2, 0)], gate="swap", state="zero")
        state, p = updates.selective_update(omega, obs, effect_on("A", ZERO))
        assert p == pytest.approx(0.5)
        assert np.allclose(site_marginal(state, 2).matrix, ZERO)
        assert is_density(state)

    def test_zero_effect(self, updates, make_observer, random_omega):
        """TEST: E = 0 raises ZeroProbability"""
        obs = make_observer("A", [(2, 1)])
        with pytest.raises(ZeroProbability):
            updates.selective_update(random_omega, obs, effect_on("A", np.zeros((2, 2))))

    def test_not_an_effect(self, updates, make_observer, random_omega):
        """TEST: diag(1.2, 0) is refused as a selective effect"""
        obs = make_observer("A", [(2, 1)])
        with pytest.raises(NotAnEffect):
            updates.selective_update(random_omega, obs, effect_on("A", np.diag([1.2, 0.0])))

    def test_apply_map_dispatch(self, updates, make_observer, random_omega):
        """TEST: apply_map routes nonselective and selective maps"""
        obs = make_observer("A", [(2, 1)], gate="cnot", state="plus")
        plain = updates.apply_map(UpdateMap.nonselective(obs), random_omega)
        assert np.allclose(plain.matrix, updates.nonselective_update(random_omega, obs).matrix)
        picked = updates.apply_map(UpdateMap.selective(obs, effect_on("A", ZERO)), random_omega)
        expected, _ = updates.selective_update(random_omega, obs, effect_on("A", ZERO))
        assert np.allclose(picked.matrix, expected.matrix)


# =============================================================================
# SEVERAL OBSERVERS
# =============================================================================

class TestSeveralObservers:
    """Probabilities and super-observer updates."""

    def test_single_observer_super_expectation(self, updates, make_observer, random_omega):
        """TEST: With one observer the super-observer expectation is the plain one"""
        obs = make_observer("A", [(2, 1)], gate="cnot", state="plus", observable="z")
        assert updates.super_observer_expectation(random_omega, [obs], "A") == pytest.approx(
            updates.expectation(random_omega, obs))

    def test_marginal_splits_over_outcomes(self, updates, ordered_pair, random_omega):
        """TEST: P(B) = P(A & B) + P(¬A & B)"""
        first, second = ordered_pair
        e_a, e_b = effect_on("first", ZERO), effect_on("second", ZERO)
        total = updates.marginal_probability(random_omega, [first, second], "second")
        split = (updates.joint_probability(random_omega, first, e_a, second, e_b)
                 + updates.joint_probability(random_omega, first, complement_effect(e_a), second, e_b))
        assert total == pytest.approx(split, abs=1e-12)

    def test_conditioning_on_identity(self, updates, ordered_pair, random_omega):
        """TEST: Conditioning on E_A = 1 gives the unconditional expectation"""
        first, second = ordered_pair
        conditional = updates.conditional_expectation(random_omega, first, effect_on("first", np.eye(2)), second)
        plain = updates.super_observer_expectation(random_omega, [first, second], "second")
        assert conditional == pytest.approx(plain, abs=1e-10)

    def test_selective_chain_equals_single_shot(self, updates, ordered_pair, random_omega):
        """TEST: Sequential post-selection equals joint post-selection"""
        first, second = ordered_pair
        e_a, e_b = effect_on("first", ZERO), effect_on("second", ZERO)
        chained, p_chain = updates.compose_selective(random_omega, [first, second], [e_a, e_b])
        single, p_single = updates.super_observer_update(random_omega, [first, second],
                                                         {"first": e_a, "second": e_b})
        assert p_chain == pytest.approx(p_single, abs=1e-10)
        assert np.allclose(chained.matrix, single.matrix, atol=1e-10)

    def test_composition_equals_super_update(self, updates, ordered_pair, random_omega):
        """TEST: Composed nonselective updates equal the super-circuit update"""
        first, second = ordered_pair
        maps = [UpdateMap.nonselective(first), UpdateMap.nonselective(second)]
        composed = updates.compose_updates(maps, random_omega)
        single, p = updates.super_observer_update(random_omega, [first, second])
        assert p == 1.0
        assert np.allclose(composed.matrix, single.matrix, atol=1e-10)

    def test_empty_composition(self, updates, random_omega):
        """TEST: No maps leave ω unchanged"""
        assert np.array_equal(updates.compose_updates([], random_omega).matrix, random_omega.matrix)

    def test_composition_out_of_order(self, updates, ordered_pair, random_omega):
        """TEST: Maps listed later-first raise NotOrderable"""
        first, second = ordered_pair
        with pytest.raises(NotOrderable):
            updates.compose_updates([UpdateMap.nonselective(second), UpdateMap.nonselective(first)], random_omega)

    @pytest.mark.parametrize("seed", [3, 17, 29, 41])
    def test_conditional_is_selective_then_expectation(self, updates, make_observer, random_system, seed):
        """TEST: For A before B, 𝔼(O_B | E_A) = expectation of B in the post-selected state"""
        first = make_observer("first", [(1, 0)], gate=random_unitary(4, seed).matrix, state="plus")
        second = make_observer("second", [(2, 2), (2, 3)],
                               gate=[random_unitary(4, seed + 1).matrix, random_unitary(4, seed + 2).matrix],
                               observable="z")
        omega = random_density(random_system.layout.total_dim, seed, random_system.layout)
        effect = random_effect(2, seed, SlotLayout.of([(probe_slot("first"), 2)]))

        conditional = updates.conditional_expectation(omega, first, effect, second)
        updated, p = updates.selective_update(omega, first, effect)
        assert p > 1e-6
        assert conditional == pytest.approx(updates.expectation(updated, second), abs=1e-10)

    def test_three_observer_chain_expectation(self, updates, timelike_chain, random_omega):
        """TEST: C⩽A⩽B: B's expectation is taken in ω updated by C then A"""
        c, a, b = timelike_chain
        observers = [a, b, c]
        order = updates.causal_order(observers)
        assert [observers[i].name for i in order.indices] == ["C", "A", "B"]

        value = updates.n_observer_expectation(random_omega, observers, "B")
        updated = updates.compose_updates([UpdateMap.nonselective(c), UpdateMap.nonselective(a)], random_omega)
        assert value == pytest.approx(updates.expectation(updated, b), abs=1e-10)
        direct = updates.super_observer_expectation(random_omega, [c, a, b], "B")
        assert value == pytest.approx(direct, abs=1e-10)

    def test_three_observer_composition_equals_super_update(self, updates, timelike_chain, random_omega):
        """TEST: Composed updates of C, A, B equal the three-probe super-circuit update"""
        maps = [UpdateMap.nonselective(o) for o in timelike_chain]
        composed = updates.compose_updates(maps, random_omega)
        single, p = updates.super_observer_update(random_omega, list(timelike_chain))
        assert p == 1.0
        assert np.allclose(composed.matrix, single.matrix, atol=1e-10)
        with pytest.raises(NotOrderable):
            updates.compose_updates(maps[::-1], random_omega)

    def test_spacelike_orders_agree(self, updates, make_observer, random_omega):
        """TEST: Every causal order gives the same target expectation"""
        a = make_observer("A", [(0, 0), (0, 1)], gate="cnot", state="plus")
        b = make_observer("B", [(4, 0), (4, 1)], gate=random_unitary(4, 41).matrix, observable="z")
        c = make_observer("C", [(2, 3)], gate="swap")
        observers = [a, b, c]
        values = [
            updates.n_observer_expectation(random_omega, observers, "B", order=order)
            for order in enumerate_causal_orders([o.zone(updates.lattice) for o in observers])
        ]
        assert len(values) >= 2
        assert max(values) - min(values) < 1e-10

    def test_later_observers_ignored(self, updates, make_observer, random_omega):
        """TEST: Deleting an observer after B leaves B's expectation unchanged"""
        b = make_observer("B", [(2, 0)], gate="cnot", state="plus", observable="z")
        c = make_observer("C", [(2, 2), (2, 3)], gate="swap")
        with_c = updates.n_observer_expectation(random_omega, [b, c], "B")
        assert with_c == pytest.approx(updates.expectation(random_omega, b), abs=1e-10)
        direct = updates.super_observer_expectation(random_omega, [b, c], "B")
        assert with_c == pytest.approx(direct, abs=1e-10)


# =============================================================================
# CAUSAL FACTORISATION
# =============================================================================

class TestCausalFactorisation:
    """Θ_Obs against the ordered composition of single-observer maps."""

    def test_single_observer(self, updates, make_observer):
        """TEST: One observer factorises trivially"""
        obs = make_observer("A", [(2, 1), (2, 2)], gate="cnot")
        report = updates.check_causal_factorisation([obs])
        assert report.max_deviation < 1e-12
        assert report.passed

    def test_ordered_pair(self, updates, ordered_pair):
        """TEST: Zones separated by a constant-time slice factorise"""
        report = updates.check_causal_factorisation(list(ordered_pair), order=["first", "second"])
        assert report.passed
        assert report.order == ("first", "second")

    def test_three_observer_chain(self, updates, timelike_chain):
        """TEST: The joint map is S_C·S_A·S_B, earliest observer first"""
        c, a, b = timelike_chain
        report = updates.check_causal_factorisation([a, b, c])
        assert report.order == ("C", "A", "B")
        assert report.passed

        probes = updates.probes
        joint = probes.scattering_operator([a.probe, b.probe, c.probe])
        layout = joint.layout
        composed = Operator.identity(layout)
        for obs in (c, a, b):
            composed = composed @ probes.extend_map(probes.scattering_operator([obs.probe]), layout).s_matrix
        g = random_hermitian(layout.total_dim, 5, layout)
        stacked = composed.matrix @ g.matrix @ composed.matrix.conj().T
        assert np.allclose(probes.theta_apply(joint, g).matrix, stacked, atol=1e-10)

        with pytest.raises(NotOrderable):
            updates.check_causal_factorisation([a, b, c], order=["B", "A", "C"])

    def test_same_cell_forced(self, updates, make_observer):
        """TEST: Two probes at one cell with non-commuting gates do not factorise"""
        a = make_observer("a", [(2, 1)], gate="cnot", state="plus")
        b = make_observer("b", [(2, 1)], gate="swap")
        with pytest.raises(NotOrderable):
            updates.check_causal_factorisation([a, b], order=["b", "a"])
        report = updates.check_causal_factorisation([a, b], order=["b", "a"], force=True)
        assert report.forced
        assert report.max_deviation > 1e-3
        assert not report.passed


# =============================================================================
# FORWARD-SIMULATION ORACLE
# =============================================================================

class TestOracle:
    """UpdateService formulas against direct Schrödinger simulation."""

    def test_oracle_agrees(self, updates, random_system, ordered_pair, random_omega):
        """TEST: Expectation, nonselective and selective updates match the oracle"""
        first, second = ordered_pair
        oracle = SchrodingerOracle(random_system)
        report = oracle.compare(updates, random_omega, [first, second],
                                [effect_on("first", ZERO), effect_on("second", ZERO)])
        assert report.passed, report.deviations()
