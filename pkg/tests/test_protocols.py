import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpv.branching import enumerate_branches
from qpv.protocols import (
    Challenge,
    OracleError,
    OracleTable,
    ProtocolKind,
    Response,
    accept_predicate,
    bits_to_int,
    draw_challenge,
    honest_prover,
    honest_z_distribution,
    int_to_bits,
    measurement_switch,
    prepare_items,
)
from qpv.qstate import Engine
from qpv.rng import RngStream


def psi_plus_probability(x0, x1, theta, w):
    # component-wise: H^w H^theta |x> in the computational basis, then <Psi+|
    h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    op = np.linalg.matrix_power(h, w) @ np.linalg.matrix_power(h, theta)
    a, b = op[:, x0], op[:, x1]
    return abs(a[0] * b[1] + a[1] * b[0]) ** 2 / 2


class TestBits:
    @given(st.integers(1, 16).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2**n - 1))))
    def test_round_trip(self, nv):
        n, v = nv
        bits = int_to_bits(v, n)
        assert len(bits) == n and bits_to_int(bits) == v

    def test_msb_first(self):
        assert int_to_bits(4, 3) == (1, 0, 0)


class TestOracle:
    def test_consistent_across_holders(self):
        a, b = OracleTable(seed=9, n=3), OracleTable(seed=9, n=3)
        assert a.table() == b.table()

    def test_roughly_balanced(self):
        values = list(OracleTable(seed=1, n=6).table().values())
        assert 0.4 < sum(values) / len(values) < 0.6

    def test_memoized_and_counted(self):
        f = OracleTable(seed=3, n=2)
        v = f.query((0, 1), (1, 1))
        assert f.query((0, 1), (1, 1)) == v
        assert f.calls == 2 and f.distinct_queries == 1

    @pytest.mark.parametrize("a,b", [((0,), (0, 1)), ((0, 2), (0, 1))])
    def test_bad_inputs(self, a, b):
        with pytest.raises(OracleError):
            OracleTable(seed=0, n=2).query(a, b)

    def test_sampler_mode_branches_per_input(self):
        def run(ch):
            f = OracleTable(seed=0, n=1, sampler=ch)
            return f.query((0,), (1,)), f.query((0,), (1,)), f.query((1,), (1,))

        leaves = enumerate_branches(run)
        assert len(leaves) == 4
        assert all(leaf.value[0] == leaf.value[1] for leaf in leaves)


class TestChallenges:
    @pytest.mark.parametrize("kind", list(ProtocolKind))
    def test_fields_present(self, kind):
        ch = draw_challenge(kind, 3, RngStream(0))
        data = ch.to_dict()
        assert data["kind"] == kind.value
        if kind.uses_oracle:
            key = "theta0" if kind.one_qubit else "y0"
            assert len(data[key]) == 3

    def test_oracle_width_range(self):
        with pytest.raises(ValueError):
            draw_challenge(ProtocolKind.P1ORACLE, 17, RngStream(0))

    def test_switches(self):
        f = OracleTable(seed=2, n=1)
        assert measurement_switch(Challenge(ProtocolKind.P1MOD, x=0, theta0=1, theta1=1)) == 1
        assert measurement_switch(Challenge(ProtocolKind.P1MOD, x=0, theta0=1, theta1=0)) == 0
        assert measurement_switch(Challenge(ProtocolKind.P2MOD, x0=0, x1=0, theta=0, y0=1, y1=1)) == 1
        ch = Challenge(ProtocolKind.P1ORACLE, x=0, theta0=(1,), theta1=(0,))
        assert measurement_switch(ch, f) == f.query((1,), (0,))


class TestHonestDistribution:
    @pytest.mark.parametrize("x0,x1,theta,w", list(itertools.product((0, 1), repeat=4)))
    def test_matches_component_formula(self, x0, x1, theta, w):
        ch = Challenge(ProtocolKind.P2MOD, x0=x0, x1=x1, theta=theta, y0=w, y1=1)
        assert honest_z_distribution(ProtocolKind.P2MOD, ch) == pytest.approx(
            psi_plus_probability(x0, x1, theta, w), abs=1e-12
        )

    def test_p2_table(self):
        # Psi+ is orthogonal to |00>, |11>, |+->, |-+> and overlaps |++>, |-->
        table = {
            (x0, x1, t): honest_z_distribution(ProtocolKind.P2, Challenge(ProtocolKind.P2, x0=x0, x1=x1, theta=t))
            for x0, x1, t in itertools.product((0, 1), repeat=3)
        }
        assert table[(0, 0, 0)] == pytest.approx(0.0, abs=1e-12)
        assert table[(0, 1, 0)] == pytest.approx(0.5, abs=1e-12)
        assert table[(1, 1, 1)] == pytest.approx(0.5, abs=1e-12)
        assert table[(0, 1, 1)] == pytest.approx(0.0, abs=1e-12)

    def test_honest_prover_reproduces_distribution(self):
        kind = ProtocolKind.P2MOD

        def run(ch):
            eng = Engine()
            c = draw_challenge(kind, 1, ch)
            items = prepare_items(kind, c, eng)
            return c, honest_prover(kind, items, None, eng, ch)

        mass, ones = {}, {}
        for leaf in enumerate_branches(run):
            c, z = leaf.value
            mass[c] = mass.get(c, 0.0) + leaf.prob
            ones[c] = ones.get(c, 0.0) + leaf.prob * z
        for c in mass:
            assert ones[c] / mass[c] == pytest.approx(honest_z_distribution(kind, c), abs=1e-12)


class TestAcceptPredicate:
    def test_one_qubit_needs_x(self):
        ch = Challenge(ProtocolKind.P1, x=1, theta=0)
        assert accept_predicate(ProtocolKind.P1, ch, 1)
        assert not accept_predicate(ProtocolKind.P1, ch, 0)
        assert not accept_predicate(ProtocolKind.P1, ch, Response({"V0": 1, "V1": 0}))

    def test_possibility_semantics(self):
        never = Challenge(ProtocolKind.P2, x0=0, x1=0, theta=0)
        either = Challenge(ProtocolKind.P2, x0=0, x1=1, theta=0)
        assert not accept_predicate(ProtocolKind.P2, never, 1)
        assert accept_predicate(ProtocolKind.P2, never, 0)
        assert accept_predicate(ProtocolKind.P2, either, 0) and accept_predicate(ProtocolKind.P2, either, 1)

    def test_empty_response_rejected(self):
        assert not accept_predicate(ProtocolKind.P1, Challenge(ProtocolKind.P1, x=0, theta=0), Response({}))

    @pytest.mark.parametrize("kind", list(ProtocolKind))
    def test_honest_report_always_accepted(self, kind):
        def run(ch):
            eng = Engine()
            f = OracleTable(seed=0, n=2, sampler=ch) if kind.uses_oracle else None
            c = draw_challenge(kind, 2, ch)
            items = prepare_items(kind, c, eng, f)
            return accept_predicate(kind, c, honest_prover(kind, items, f, eng, ch), f)

        assert all(leaf.value for leaf in enumerate_branches(run))
