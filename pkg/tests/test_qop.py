# tests/test_qop.py
"""
Tests for the dense operator layer: tensor structure, partial traces,
spectral validators and seeded random operators.

Run: pytest tests/test_qop.py -v
"""
import numpy as np
import pytest

from config import Config
from fv_system.errors import (
    DimensionLimitExceeded,
    DimensionMismatch,
    InvalidOperator,
    LayoutCollision,
    SlotCollision,
    UnknownSlot,
)
from fv_system.qop import (
    PAULI,
    DensityState,
    Effect,
    Operator,
    SlotLayout,
    SpectrumCode,
    check_dimension,
    commutator_norm,
    embed,
    gell_mann_basis,
    is_density,
    is_effect,
    is_unitary,
    partial_trace,
    random_density,
    random_effect,
    random_hermitian,
    random_unitary,
    reorder,
    substream_seed,
    tensor,
    unitary_power,
)

A = SlotLayout.of([("a", 2)])
B = SlotLayout.of([("b", 3)])
AB = A.concat(B)


def op(matrix, layout):
    return Operator(np.asarray(matrix, dtype=np.complex128), layout)


# =============================================================================
# LAYOUTS
# =============================================================================

class TestSlotLayout:
    """Slot bookkeeping."""

    def test_duplicate_ids_rejected(self):
        """TEST: A layout cannot name the same slot twice"""
        with pytest.raises(SlotCollision):
            SlotLayout.of([("a", 2), ("a", 2)])

    def test_concat_collision(self):
        """TEST: Concatenating layouts that share a slot fails"""
        with pytest.raises(SlotCollision):
            A.concat(A)

    def test_unknown_slot(self):
        """TEST: Looking up a missing slot raises UnknownSlot"""
        with pytest.raises(UnknownSlot):
            AB.index("c")

    def test_total_dim(self):
        """TEST: Total dimension is the product of slot dimensions"""
        assert AB.total_dim == 6
        assert AB.without(["a"]) == B

    def test_wrong_shape_rejected(self):
        """TEST: Matrix shape must match the layout"""
        with pytest.raises(DimensionMismatch):
            Operator(np.eye(3), A)

    def test_mixed_layout_arithmetic_rejected(self):
        """TEST: Adding operators on different layouts fails"""
        with pytest.raises(LayoutCollision):
            Operator.identity(A) + Operator.identity(SlotLayout.of([("c", 2)]))

    def test_dimension_cap(self):
        """TEST: Layouts above MAX_DIMENSION are refused"""
        Config.set(Config.MAX_DIMENSION, 4)
        with pytest.raises(DimensionLimitExceeded):
            check_dimension(AB)


# =============================================================================
# TENSOR STRUCTURE
# =============================================================================

class TestTensorStructure:
    """tensor, embed, reorder and partial_trace."""

    def test_tensor_of_identities(self):
        """TEST: 1_2 ⊗ 1_3 = 1_6"""
        result = tensor(Operator.identity(A), Operator.identity(B))
        assert result.layout == AB
        assert np.allclose(result.matrix, np.eye(6))

    def test_trace_multiplicative(self):
        """TEST: Tr(X ⊗ Y) = Tr X · Tr Y"""
        x = random_hermitian(2, 1, A)
        y = random_hermitian(3, 2, B)
        assert np.isclose(tensor(x, y).trace(), x.trace() * y.trace())

    def test_embed_places_identity(self):
        """TEST: embed of a b-slot operator is 1 ⊗ O"""
        o = random_hermitian(3, 5, B)
        assert np.allclose(embed(o, AB).matrix, np.kron(np.eye(2), o.matrix))

    def test_embed_respects_target_order(self):
        """TEST: Embedding into a permuted layout permutes the factors"""
        x = op(PAULI["x"], A)
        ba = B.concat(A)
        assert np.allclose(embed(x, ba).matrix, np.kron(np.eye(3), PAULI["x"]))

    def test_embed_homomorphism(self):
        """TEST: embed(XY) = embed(X) · embed(Y)"""
        x = random_unitary(2, 3, A)
        y = random_hermitian(2, 4, A)
        assert np.allclose(embed(x @ y, AB).matrix, (embed(x, AB) @ embed(y, AB)).matrix)

    def test_embed_unknown_slot(self):
        """TEST: Embedding a slot missing from the target fails"""
        with pytest.raises(SlotCollision):
            embed(Operator.identity(SlotLayout.of([("c", 2)])), AB)

    def test_reorder_round_trip(self):
        """TEST: reorder into B⊗A and back is the identity map"""
        x = random_hermitian(6, 6, AB)
        back = reorder(reorder(x, B.concat(A)), AB)
        assert np.allclose(back.matrix, x.matrix)

    def test_partial_trace_of_product(self):
        """TEST: Tr_b(ρ ⊗ σ) = ρ"""
        rho = random_density(2, 7, A)
        sigma = random_density(3, 8, B)
        reduced = partial_trace(tensor(rho, sigma), ["b"])
        assert reduced.layout == A
        assert np.allclose(reduced.matrix, rho.matrix, atol=1e-12)

    def test_partial_trace_scales_by_trace(self):
        """TEST: Tr_b(X ⊗ Y) = Tr(Y) · X"""
        x = random_hermitian(2, 9, A)
        y = random_hermitian(3, 10, B)
        reduced = partial_trace(tensor(x, y), ["b"])
        assert np.abs(reduced.matrix - y.trace() * x.matrix).max() < 1e-12

    def test_partial_trace_over_everything(self):
        """TEST: Tracing every slot leaves the scalar trace"""
        x = random_hermitian(6, 11, AB)
        reduced = partial_trace(x, ["a", "b"])
        assert reduced.matrix.shape == (1, 1)
        assert np.isclose(reduced.matrix[0, 0], x.trace())

    def test_partial_trace_with_probe_state(self):
        """TEST: Tr_b[(1 ⊗ σ)(X ⊗ Y)] = Tr(σY) · X"""
        x = random_hermitian(2, 12, A)
        y = random_hermitian(3, 13, B)
        sigma = random_density(3, 14, B)
        lhs = partial_trace(embed(sigma, AB) @ tensor(x, y), ["b"])
        assert np.allclose(lhs.matrix, sigma.expectation(y) * x.matrix)

    def test_partial_trace_unknown_slot(self):
        """TEST: Dropping a missing slot raises UnknownSlot"""
        with pytest.raises(UnknownSlot):
            partial_trace(Operator.identity(AB), ["c"])


# =============================================================================
# BASES AND FUNCTIONS
# =============================================================================

class TestBasesAndFunctions:
    """Gell-Mann bases, commutators and unitary powers."""

    @pytest.mark.parametrize("d", [2, 3])
    def test_gell_mann_is_orthogonal(self, d):
        """TEST: Basis has d² Hermitian, trace-orthogonal elements"""
        basis = gell_mann_basis(d)
        assert len(basis) == d * d
        gram = np.array([[np.trace(a.conj().T @ b) for b in basis] for a in basis])
        assert np.allclose(gram - np.diag(np.diag(gram)), 0)

    def test_qubit_basis_is_pauli(self):
        """TEST: d=2 basis is (I, X, Y, Z)"""
        for element, name in zip(gell_mann_basis(2), "ixyz"):
            assert np.allclose(element, PAULI[name])

    def test_pauli_commutator(self):
        """TEST: ‖[X, Z]‖_F = 2√2"""
        assert np.isclose(commutator_norm(op(PAULI["x"], A), op(PAULI["z"], A)), 2 * np.sqrt(2))

    def test_unitary_power_endpoints(self):
        """TEST: u^0 = 1 and u^1 = u; u^½ squared is u"""
        u = random_unitary(4, 21)
        assert np.allclose(unitary_power(u, 0.0).matrix, np.eye(4))
        assert unitary_power(u, 1.0) is u
        half = unitary_power(u, 0.5)
        assert np.allclose((half @ half).matrix, u.matrix)


# =============================================================================
# SPECTRAL VALIDATION
# =============================================================================

class TestSpectralValidation:
    """is_effect, is_density, is_unitary and the validated constructors."""

    def test_effect_in_unit_interval(self):
        """TEST: diag(0.3, 0.7) is an effect"""
        assert is_effect(op(np.diag([0.3, 0.7]), A)).is_valid

    def test_effect_above_one(self):
        """TEST: diag(1.2, 0) is rejected with EIGENVALUE_ABOVE_ONE"""
        check = is_effect(op(np.diag([1.2, 0.0]), A))
        assert not check
        assert check.code is SpectrumCode.EIGENVALUE_ABOVE_ONE

    def test_negative_effect(self):
        """TEST: Negative spectrum is reported"""
        assert is_effect(op(np.diag([-0.5, 0.5]), A)).code is SpectrumCode.NEGATIVE_EIGENVALUE

    def test_non_hermitian(self):
        """TEST: Non-Hermitian input is reported before spectra are examined"""
        assert is_effect(op([[0, 1], [0, 0]], A)).code is SpectrumCode.NOT_HERMITIAN

    def test_maximally_mixed_is_density(self):
        """TEST: 1/d is a density matrix"""
        assert is_density(op(np.eye(2) / 2, A)).is_valid

    def test_wrong_trace(self):
        """TEST: Trace 2 is rejected"""
        assert is_density(op(np.eye(2), A)).code is SpectrumCode.TRACE_NOT_ONE

    def test_validated_constructors(self):
        """TEST: DensityState/Effect.validated raise InvalidOperator with the check"""
        with pytest.raises(InvalidOperator) as exc:
            Effect.validated(op(np.diag([1.2, 0.0]), A), 1e-9)
        assert exc.value.check.code is SpectrumCode.EIGENVALUE_ABOVE_ONE
        with pytest.raises(InvalidOperator):
            DensityState.validated(op(np.eye(2), A), 1e-9)


# =============================================================================
# RANDOM OPERATORS
# =============================================================================

class TestRandomOperators:
    """Seeded random unitaries, states and effects."""

    @pytest.mark.parametrize("dim", [2, 4, 8])
    def test_random_unitary_is_unitary(self, dim):
        """TEST: U U† = 1 within 1e-12"""
        u = random_unitary(dim, 42)
        assert np.abs(u.matrix @ u.matrix.conj().T - np.eye(dim)).max() < 1e-12
        assert is_unitary(u)

    def test_random_density_trace_one(self):
        """TEST: Random densities are valid with trace 1"""
        rho = random_density(6, 42)
        assert abs(rho.trace() - 1) < 1e-12
        assert is_density(rho)

    def test_random_effect_valid(self):
        """TEST: Random effects pass is_effect"""
        assert is_effect(random_effect(4, 42))

    def test_same_seed_bit_identical(self):
        """TEST: Same seed gives bit-identical output"""
        assert np.array_equal(random_unitary(4, 7).matrix, random_unitary(4, 7).matrix)
        assert np.array_equal(random_density(4, 7).matrix, random_density(4, 7).matrix)
        assert not np.array_equal(random_unitary(4, 7).matrix, random_unitary(4, 8).matrix)

    def test_substream_seeds(self):
        """TEST: Substreams are deterministic and distinct per name"""
        assert substream_seed(1, "campaign", 3) == substream_seed(1, "campaign", 3)
        assert substream_seed(1, "campaign", 3) != substream_seed(1, "campaign", 4)
        assert substream_seed(1, "campaign", 3) != substream_seed(2, "campaign", 3)
