from fractions import Fraction

import numpy as np
import pytest

from coalition_interact import config
from coalition_interact.axioms import (
    AXIOMS,
    INDEX_KINDS,
    MYERSON,
    TARGETS,
    Case,
    GraphIndexFunction,
    alt_index,
    check_admissible,
    check_axiom,
    exhaustive_suite,
    fgn_condition,
    fixed_games,
    random_suite,
    replay,
    residual,
    witness_suite,
)
from coalition_interact.core import TUGame, coalition, full, unanimity
from coalition_interact.errors import SizeCapExceeded, UnknownKind
from coalition_interact.graph import CommGraph
from coalition_interact.myerson import situation, srvpc_quotient

CYCLE4 = CommGraph.from_edges(4, [(1, 3), (2, 3), (2, 4), (1, 4)])


def frac(x):
    return Fraction(x).limit_denominator(1000)


@pytest.fixture(scope="module")
def small():
    return exhaustive_suite(3)


class TestSuites:
    def test_fixed_family(self):
        games = fixed_games(4)
        assert len(games) == 10
        assert any(np.all(g.values[1:] > 0) for g in games)
        assert fixed_games(4) == games  # deterministic

    def test_exhaustive_pairs_share_graphs(self, small):
        assert len(small) == 10 * (1 + 2 + 8)
        assert all(a.graph == b.graph for a, b in zip(small[::2], small[1::2]))

    def test_random_suite(self):
        sits = random_suite(20, seed=3)
        assert len(sits) == 20 and {s.n for s in sits} <= {2, 3, 4, 5}
        assert [s.game for s in sits] == [s.game for s in random_suite(20, seed=3)]


class TestAdmissibility:
    @pytest.mark.parametrize("kind", INDEX_KINDS)
    def test_every_index_is_a_graph_index(self, kind, small):
        sits = small + witness_suite(kind) + random_suite(30, sizes=(4, 5), seed=5)
        report = check_admissible(GraphIndexFunction(kind), sits)
        assert report.holds, report

    def test_unknown_kind(self):
        with pytest.raises(UnknownKind):
            GraphIndexFunction("owen")


class TestMyerson:
    @pytest.mark.parametrize("axiom", AXIOMS)
    def test_holds(self, axiom, small):
        report = check_axiom(MYERSON, axiom, small)
        assert report.holds and report.witness is None
        assert report.checked > 0
        assert "situations" in report.domain

    def test_size_caps(self, monkeypatch):
        monkeypatch.delenv(config.ENV_MAX_N, raising=False)
        big = situation(TUGame(6, np.zeros(64)))
        with pytest.raises(SizeCapExceeded):
            check_axiom(MYERSON, "ISRVPC", [big])
        monkeypatch.setenv(config.ENV_MAX_N, "6")
        assert check_axiom(MYERSON, "ISRVPC", [big]).holds

    def test_unknown_axiom(self, small):
        with pytest.raises(UnknownKind):
            check_axiom(MYERSON, "IX", small)


class TestCounterexampleWitnesses:
    def test_banzhaf_ice(self):
        report = check_axiom(GraphIndexFunction("banzhaf_graph"), "ICE", witness_suite("banzhaf_graph"))
        assert report.verdict == "violated"
        assert report.witness_residual == pytest.approx(3 / 4 - 1)

    def test_fgn_adds_alpha_on_grand_coalition(self):
        sit = witness_suite("fgn_modified")[0]
        assert alt_index("fgn_modified", sit, full(3), alpha=1.0) == pytest.approx(1.0)
        assert alt_index("fgn_modified", sit, full(3), alpha=2.5) == pytest.approx(2.5)
        assert MYERSON(sit, full(3)) == pytest.approx(0.0)
        report = check_axiom(GraphIndexFunction("fgn_modified"), "IGN", [sit])
        assert report.verdict == "violated" and report.witness.player == 3

    def test_fgn_condition_iii(self):
        path = CommGraph.from_edges(3, [(1, 2), (2, 3)])
        # {1,2} is itself a veto graph partnership of u_{1,2}
        assert not fgn_condition(path, coalition(1, 2), coalition(1, 2))
        assert fgn_condition(path, coalition(1, 2), full(3))
        assert not fgn_condition(path, coalition(1, 2), coalition(1))

    def test_scaled_essential_rationals(self):
        sit = witness_suite("scaled_essential")[0]
        cut = sit.with_graph(sit.graph.without_edges([(2, 5)]))
        index = GraphIndexFunction("scaled_essential")
        assert frac(index(sit, coalition(2, 3, 4))) == Fraction(1, 3)
        assert frac(index(sit, coalition(3, 4, 5))) == Fraction(-1, 3)
        assert frac(index(cut, coalition(2, 3, 4))) == 0
        assert frac(index(cut, coalition(3, 4, 5))) == -1
        gain_2 = index(sit, coalition(2, 3, 4)) - index(cut, coalition(2, 3, 4))
        gain_5 = index(sit, coalition(3, 4, 5)) - index(cut, coalition(3, 4, 5))
        assert frac(gain_2) == Fraction(1, 3) and frac(gain_5) == Fraction(2, 3)
        case = Case("IF", sit, coalition(3, 4), edge=(2, 5))
        assert frac(residual(index, case)) == Fraction(-1, 3)

    def test_first_order_only_srvpc(self):
        sit = witness_suite("first_order_only")[0]
        index = GraphIndexFunction("first_order_only")
        report = check_axiom(index, "ISRVPC", [sit])
        assert report.verdict == "violated"
        assert index(sit, full(2)) == 0.0
        assert residual(index, report.witness) == -1.0

    def test_squared_game_il(self):
        sits = witness_suite("squared_game")
        report = check_axiom(GraphIndexFunction("squared_game"), "IL", sits)
        assert report.verdict == "violated"
        assert check_axiom(GraphIndexFunction("squared_game"), "IL", [sits[0].with_game(unanimity(2, 3))] * 2).holds

    @pytest.mark.parametrize("kind", list(TARGETS))
    def test_replay_is_bit_exact(self, kind):
        report = check_axiom(GraphIndexFunction(kind), TARGETS[kind], witness_suite(kind))
        assert report.verdict == "violated"
        assert replay(GraphIndexFunction(kind), report) == report.witness_residual

    def test_replay_needs_witness(self, small):
        with pytest.raises(ValueError):
            replay(MYERSON, check_axiom(MYERSON, "ICE", small))


class TestDecompositionGap:
    """The dividend-expanded counterexamples also break reduced partnership consistency."""

    def test_fgn_on_four_cycle(self):
        sit = situation(unanimity(4, coalition(1, 2)), CYCLE4)
        case = Case("ISRVPC", sit, full(4), partners=coalition(1, 2))
        assert residual(GraphIndexFunction("fgn_modified"), case) == pytest.approx(-1.0)
        assert residual(MYERSON, case) == 0.0

    def test_scaled_essential_on_its_own_witness(self):
        sit = witness_suite("scaled_essential")[0]
        case = Case("ISRVPC", sit, full(5), partners=coalition(1))
        assert residual(GraphIndexFunction("scaled_essential"), case) == pytest.approx(2.0)
        assert residual(MYERSON, case) == 0.0

    def test_quotient_is_not_unanimity(self):
        q = srvpc_quotient(situation(unanimity(4, coalition(1, 2)), CYCLE4), coalition(1, 2))
        assert len(q.game.dividends.support()) == 3


def test_report_serialises(small):
    report = check_axiom(GraphIndexFunction("banzhaf_graph"), "ICE", small)
    body = report.as_dict()
    assert body["verdict"] == "violated" and body["witness"]["axiom"] == "ICE"
    assert body["tolerance"] == config.AXIOM_TOL
