import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpv.branching import enumerate_branches
from qpv.qstate import (
    BB84_BASES,
    BELL_BASIS,
    BELL_OUTCOMES,
    GATES,
    MIN_ERROR_BASIS,
    PSI_PLUS,
    BellOutcome,
    Deferred,
    Engine,
    NormalizationError,
    QubitError,
    bb84_state,
    bell_vector,
    fidelity,
    random_qubit_state,
)
from qpv.rng import RngStream

H, X, Y, Z, I2 = (GATES[g] for g in ("H", "X", "Y", "Z", "I"))

amplitudes = st.tuples(*[st.floats(-1, 1, allow_nan=False) for _ in range(4)]).filter(
    lambda t: sum(v * v for v in t) > 1e-3
)


def normalized(t):
    v = np.array([t[0] + 1j * t[1], t[2] + 1j * t[3]])
    return v / np.linalg.norm(v)


class TestGateAlgebra:
    def test_hadamard_squares_to_identity(self):
        np.testing.assert_allclose(H @ H, I2, atol=1e-12)

    def test_x_is_hzh(self):
        np.testing.assert_allclose(H @ Z @ H, X, atol=1e-12)

    @pytest.mark.parametrize("g", ["I", "X", "Y", "Z", "H"])
    def test_gates_unitary(self, g):
        u = GATES[g]
        np.testing.assert_allclose(u.conj().T @ u, I2, atol=1e-12)

    def test_bell_basis_orthonormal(self):
        np.testing.assert_allclose(BELL_BASIS.conj() @ BELL_BASIS.T, np.eye(4), atol=1e-12)

    @pytest.mark.parametrize("k0,k1", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_bell_label_is_pauli_on_phi_plus(self, k0, k1):
        phi = bell_vector(0, 0)
        op = np.kron(np.linalg.matrix_power(X, k0) @ np.linalg.matrix_power(Z, k1), I2)
        np.testing.assert_allclose(op @ phi, bell_vector(k0, k1), atol=1e-12)

    def test_psi_plus_label(self):
        assert PSI_PLUS.name == "Psi+"
        np.testing.assert_allclose(bell_vector(*PSI_PLUS), [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0])

    def test_bell_xor(self):
        assert BellOutcome(1, 0) ^ BellOutcome(1, 1) == BellOutcome(0, 1)

    @pytest.mark.parametrize("x,theta", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_bb84_states(self, x, theta):
        expected = np.linalg.matrix_power(H, theta) @ np.eye(2)[x]
        np.testing.assert_allclose(bb84_state(x, theta), expected, atol=1e-12)
        np.testing.assert_allclose(BB84_BASES[theta][x], expected, atol=1e-12)

    def test_min_error_basis_success(self):
        for x in (0, 1):
            for theta in (0, 1):
                p = abs(np.vdot(MIN_ERROR_BASIS[x], bb84_state(x, theta))) ** 2
                assert p == pytest.approx(math.cos(math.pi / 8) ** 2, abs=1e-12)


class TestAllocation:
    def test_rejects_unnormalized(self):
        with pytest.raises(NormalizationError):
            Engine().alloc_qubit(1.0, 1.0)

    @given(amplitudes)
    def test_accepts_any_normalized(self, t):
        v = normalized(t)
        eng = Engine()
        q = eng.alloc_state(v)
        np.testing.assert_allclose(eng.state_of(q).amps, v)
        eng.check_invariants()

    def test_consumed_qubit_raises(self):
        eng = Engine()
        a, b = eng.alloc_epr()
        eng.bell_measure(a, b, RngStream(0))
        with pytest.raises(QubitError, match="consumed"):
            eng.apply_gate(a, "X")

    def test_repeated_qubit_raises(self):
        eng = Engine()
        q = eng.alloc_qubit()
        with pytest.raises(QubitError):
            eng.bell_measure(q, q, RngStream(0))

    def test_clusters_stay_separate_until_joined(self):
        eng = Engine()
        a, b = eng.alloc_epr()
        c = eng.alloc_qubit()
        assert len(eng.clusters()) == 2
        eng.bell_measure(b, c, RngStream(1))
        assert len(eng.clusters()) == 1
        assert eng.state_of(a).qubits == [a]


class TestMeasurement:
    @pytest.mark.parametrize("theta", [0, 1])
    def test_born_rule_frequency(self, theta):
        # |+i> has probability 1/2 in either basis; 4 sigma band
        rng = RngStream(11, (theta,))
        trials = 4000
        ones = 0
        for _ in range(trials):
            eng = Engine()
            q = eng.alloc_qubit(1 / math.sqrt(2), 1j / math.sqrt(2))
            ones += eng.measure_basis(q, theta, rng)
        assert abs(ones / trials - 0.5) < 4 * math.sqrt(0.25 / trials)

    def test_born_rule_exact_by_enumeration(self):
        a, b = math.cos(0.3), math.sin(0.3)

        def run(ch):
            eng = Engine()
            return eng.measure_basis(eng.alloc_qubit(a, b), 0, ch)

        leaves = enumerate_branches(run)
        probs = {leaf.value: leaf.prob for leaf in leaves}
        assert probs[0] == pytest.approx(a * a, abs=1e-12)
        assert probs[1] == pytest.approx(b * b, abs=1e-12)

    def test_post_measurement_state_collapses(self):
        eng = Engine()
        q = eng.alloc_state(bb84_state(0, 1))
        out = eng.measure_basis(q, 0, RngStream(3))
        np.testing.assert_allclose(np.abs(eng.state_of(q).amps), np.eye(2)[out], atol=1e-12)
        assert eng.measure_basis(q, 0, RngStream(4)) == out

    def test_epr_correlations(self):
        def run(ch):
            eng = Engine()
            a, b = eng.alloc_epr()
            return eng.measure_basis(a, 1, ch), eng.measure_basis(b, 1, ch)

        leaves = enumerate_branches(run)
        assert {leaf.value for leaf in leaves} == {(0, 0), (1, 1)}
        assert math.fsum(leaf.prob for leaf in leaves) == pytest.approx(1.0, abs=1e-12)

    def test_bell_measure_of_bell_state(self):
        for k in BELL_OUTCOMES:
            eng = Engine()
            a, b = eng.alloc_epr()
            eng.apply_pauli(a, k.k0, k.k1)
            assert eng.bell_measure(a, b, RngStream(0)) == k

    @pytest.mark.parametrize("x0,x1,expected", [(0, 0, 0.0), (0, 1, 0.5), (1, 0, 0.5), (1, 1, 0.0)])
    def test_psi_plus_test_probabilities(self, x0, x1, expected):
        def run(ch):
            eng = Engine()
            return eng.project_psi_plus(eng.alloc_state(bb84_state(x0, 0)), eng.alloc_state(bb84_state(x1, 0)), ch)

        p1 = math.fsum(leaf.prob for leaf in enumerate_branches(run) if leaf.value == 1)
        assert p1 == pytest.approx(expected, abs=1e-12)


class TestTeleportation:
    @settings(max_examples=40, deadline=None)
    @given(amplitudes, st.integers(0, 2**31))
    def test_identity_after_correction(self, t, seed):
        psi = normalized(t)
        eng = Engine()
        q = eng.alloc_state(psi)
        a, b = eng.alloc_epr()
        k = eng.bell_measure(q, a, RngStream(seed))
        eng.apply_pauli(b, k.k0, k.k1)
        assert fidelity(eng.state_of(b).amps, psi) > 1 - 1e-9

    def test_every_branch_corrects(self):
        psi = random_qubit_state(np.random.default_rng(5))

        def run(ch):
            eng = Engine()
            q = eng.alloc_state(psi)
            a, b = eng.alloc_epr()
            k = eng.bell_measure(q, a, ch)
            eng.apply_pauli(b, k.k0, k.k1)
            return k, fidelity(eng.state_of(b).amps, psi)

        leaves = enumerate_branches(run)
        assert len(leaves) == 4
        for leaf in leaves:
            assert leaf.prob == pytest.approx(0.25, abs=1e-12)
            assert leaf.value[1] > 1 - 1e-12


class TestFuzz:
    def test_random_operations_keep_norms(self):
        rng = np.random.default_rng(2024)
        stream = RngStream(2024)
        eng = Engine()
        live = [eng.alloc_qubit() for _ in range(4)]
        for step in range(3000):
            op = rng.integers(5)
            if op == 0 or len(live) < 2:
                if rng.random() < 0.5:
                    live.append(eng.alloc_state(random_qubit_state(rng)))
                else:
                    live.extend(eng.alloc_epr())
            elif op == 1:
                eng.apply_gate(live[rng.integers(len(live))], str(rng.choice(["X", "Y", "Z", "H"])))
            elif op == 2:
                eng.measure_basis(live[rng.integers(len(live))], int(rng.integers(2)), stream)
            elif op == 3:
                i, j = rng.choice(len(live), size=2, replace=False)
                a, b = live[i], live[j]
                eng.bell_measure(a, b, stream)
                live = [q for q in live if q not in (a, b)]
            else:
                eng.apply_pauli(live[rng.integers(len(live))], int(rng.integers(2)), int(rng.integers(2)))
            if len(live) > 8:
                i, j = 0, 1
                eng.bell_measure(live[i], live[j], stream)
                live = live[2:]
            if step % 50 == 0:
                eng.check_invariants()
        eng.check_invariants()


class TestDeferred:
    def test_evaluates_once(self):
        calls = []
        d = Deferred(lambda: calls.append(1) or 7)
        assert not d.resolved and d.peek() is None
        assert d.value == 7 and d.value == 7
        assert calls == [1] and d.resolved

    def test_cluster_serializes(self):
        eng = Engine()
        a, _ = eng.alloc_epr()
        data = eng.state_of(a).to_dict()
        assert data["qubits"] == [0, 1]
        assert len(data["amps"]) == 4
