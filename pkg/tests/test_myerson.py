from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from coalition_interact.core import (
    TUGame,
    coalition,
    full,
    is_veto_partnership,
    messages,
    null_game,
    null_players,
    players,
    quotient_game,
    unanimity,
    veto_partnerships,
)
from coalition_interact.errors import (
    EmptyCoalition,
    NotATree,
    NotAVetoGraphPartnership,
    PlayerOutOfRange,
    PreconditionViolated,
    SizeMismatch,
)
from coalition_interact.graph import CommGraph, all_graphs, components, quotient_graph
from coalition_interact.indices import shapley, sii_div
from coalition_interact.myerson import (
    CommunicationSituation,
    dividend_relation_report,
    graph_null_players,
    is_graph_null,
    is_veto_graph_partnership,
    mii,
    myerson_value,
    nii,
    restricted_dividend_direct,
    restricted_dividend_general,
    restricted_dividend_tree,
    restricted_game,
    situation,
    spans_components,
    srvpc_quotient,
    veto_graph_partnerships,
    veto_graph_witness,
)

from conftest import random_game, random_tree


def game_from(n, table):
    vals = np.zeros(1 << n)
    for ids, x in table.items():
        vals[coalition(*ids)] = x
    return TUGame(n, vals)


def example1_first():
    # singletons and the pairs/triple inside {1,2,3} are worth 0, everything else 2
    zero = {coalition(1, 2), coalition(2, 3), coalition(1, 3), coalition(1, 2, 3)}
    vals = [0.0 if m in zero or bin(m).count("1") <= 1 else 2.0 for m in range(16)]
    return TUGame(4, vals)


def example2():
    ones = [(1, 3), (1, 4), (1, 2, 3), (1, 2, 4), (1, 3, 4), (1, 2, 3, 4)]
    return game_from(4, {c: 1.0 for c in ones})


PATH4 = CommGraph.from_edges(4, [(1, 2), (2, 3), (3, 4)])


def restricted_brute(game, graph):
    # v^G(S) as the sum of v over components of G_S, components via the graph module
    return np.array([sum(game(c) for c in components(graph, s)) if s else 0.0 for s in range(1 << game.n)])


class TestRestrictedGame:
    def test_matches_component_sum(self, rng):
        for n in range(1, 6):
            for _ in range(10):
                g = random_game(rng, n)
                graph = CommGraph.from_edges(n, [e for e in combinations(range(1, n + 1), 2) if rng.random() < 0.4])
                assert np.array_equal(restricted_game(situation(g, graph)).values, restricted_brute(g, graph))

    def test_complete_graph_is_identity(self, rng):
        g = random_game(rng, 5)
        assert restricted_game(situation(g)) == g

    def test_example1_restrictions(self):
        star = CommGraph.from_edges(3, [(1, 2), (1, 3)])
        assert restricted_game(situation(unanimity(3, coalition(2, 3)), star)) == unanimity(3, full(3))
        short = CommGraph.from_edges(4, [(1, 2), (2, 3)])
        assert restricted_game(situation(unanimity(4, coalition(2, 3, 4)), short)) == null_game(4)

    def test_size_mismatch(self, msg):
        with pytest.raises(SizeMismatch):
            CommunicationSituation(msg, CommGraph.complete(4))


class TestIndices:
    def test_myerson_value_tables(self, msg, horse, example_graph):
        mv = myerson_value(situation(msg, example_graph))
        assert np.round(mv, 2).tolist() == [3.77, 3.60, 5.93, 3.77, 2.93]
        mv = myerson_value(situation(horse, example_graph))
        assert np.round(mv, 2).tolist() == [48.33, 7.5, 18.33, 15.0, 10.83]

    def test_component_efficiency(self, rng):
        for n in range(2, 7):
            g = random_game(rng, n, integer=False)
            graph = CommGraph.from_edges(n, [e for e in combinations(range(1, n + 1), 2) if rng.random() < 0.4])
            mv = myerson_value(situation(g, graph))
            for comp in components(graph, full(n)):
                assert sum(mv[i - 1] for i in players(comp)) == pytest.approx(g(comp), abs=1e-9)

    def test_mii_examples(self, msg, horse, example_graph):
        assert round(mii(situation(msg, example_graph), coalition(3, 5)), 2) == 4.83
        assert mii(situation(horse, example_graph), coalition(2, 3)) == pytest.approx(-30.0)
        assert nii(situation(msg, example_graph), coalition(3)) == pytest.approx(29 / 15)
        assert nii(situation(horse, example_graph), coalition(1, 5)) == pytest.approx(-35.0)

    def test_table2_exact_fractions(self, msg, example_graph):
        # the three cells where printed tables disagree with the definitions
        sit = situation(msg, example_graph)
        for ids, exact in [((1, 4), Fraction(1, 6)), ((1, 5), Fraction(7, 6)), ((4, 5), Fraction(7, 6)), ((3, 5), Fraction(29, 6))]:
            assert mii(sit, coalition(*ids)) == pytest.approx(float(exact), abs=1e-12)
            assert nii(sit, coalition(*ids)) == pytest.approx(float(exact - 2), abs=1e-12)

    def test_network_on_complete_graph(self, rng):
        g = random_game(rng, 4)
        sit = situation(g)
        assert all(abs(nii(sit, s)) <= 1e-12 for s in range(1, 16))

    def test_spanning_coalitions_vanish(self, rng):
        graph = CommGraph.from_edges(5, [(1, 2), (3, 4), (4, 5)])
        sit = situation(random_game(rng, 5), graph)
        for s in range(1, 32):
            if spans_components(graph, s):
                assert mii(sit, s) == pytest.approx(0.0, abs=1e-12)

    def test_empty_rejected(self, msg):
        with pytest.raises(EmptyCoalition):
            mii(situation(msg), 0)

    def test_mii_is_sii_of_restricted(self, rng, example_graph):
        sit = situation(random_game(rng, 5), example_graph)
        for s in range(1, 32):
            assert mii(sit, s) == pytest.approx(sii_div(sit.restricted, s), abs=1e-12)
        assert myerson_value(sit) == pytest.approx(shapley(sit.restricted))


class TestGraphNull:
    def test_example1_first_bullet(self):
        sit = situation(example1_first(), PATH4)
        assert 2 in null_players(sit.restricted)
        assert not is_graph_null(sit, 2)

    def test_example1_second_bullet(self):
        sit = situation(unanimity(3, coalition(2, 3)), CommGraph.from_edges(3, [(1, 2), (1, 3)]))
        assert 1 in null_players(sit.game)
        assert not is_graph_null(sit, 1)

    def test_example1_third_bullet(self):
        sit = situation(unanimity(4, coalition(2, 3, 4)), CommGraph.from_edges(4, [(1, 2), (2, 3)]))
        assert graph_null_players(sit) == {1, 2, 3, 4}

    def test_out_of_range(self, msg):
        with pytest.raises(PlayerOutOfRange):
            is_graph_null(situation(msg), 6)


class TestVetoGraphPartnership:
    def test_example2(self):
        g = example2()
        sit = situation(g, PATH4)
        # literal reading: only the singleton {1} is a veto partnership
        assert veto_partnerships(g) == [coalition(1)]
        assert not any(is_veto_partnership(g, p) for p in range(1, 16) if bin(p).count("1") >= 2)
        assert not is_veto_graph_partnership(sit, coalition(1, 2, 3))
        assert is_veto_partnership(sit.restricted, coalition(1, 2, 3))

    def test_unanimity_pair(self):
        sit = situation(unanimity(2, full(2)), CommGraph.complete(2))
        assert is_veto_graph_partnership(sit, full(2))

    def test_essential_intermediary_joins(self, example_graph):
        sit = situation(unanimity(5, coalition(1, 5)), example_graph)
        assert is_veto_graph_partnership(sit, coalition(1, 3, 5))
        assert veto_graph_witness(sit, coalition(1, 3, 5)) == coalition(1, 5)
        assert not is_veto_graph_partnership(sit, coalition(1, 2, 5))
        assert coalition(3) in veto_graph_partnerships(sit)

    def test_empty(self, msg):
        with pytest.raises(EmptyCoalition):
            is_veto_graph_partnership(situation(msg), 0)


def small_suite():
    games = [messages(3), unanimity(3, coalition(1, 3)), unanimity(3, coalition(2, 3)), null_game(3)]
    games += [game_from(3, {(1, 2): 1.0, (1, 2, 3): 2.0}), game_from(3, {(1,): 1.0, (2, 3): 3.0})]
    return [situation(g, graph) for graph in all_graphs(3) for g in games]


class TestRestrictedGameInheritance:
    def test_graph_null_is_null_in_restricted(self, rng):
        sits = small_suite()
        sits += [situation(unanimity(4, t), graph) for graph in all_graphs(4) for t in range(1, 16, 3)]
        for sit in sits:
            assert graph_null_players(sit) <= null_players(sit.restricted)

    def test_veto_graph_partnership_is_partnership_in_restricted(self):
        sits = small_suite() + [situation(unanimity(4, t), graph) for graph in all_graphs(4) for t in (3, 5, 9, 15)]
        for sit in sits:
            for gp in veto_graph_partnerships(sit):
                assert is_veto_partnership(sit.restricted, gp)


class TestQuotient:
    def test_unanimity_pair(self):
        q = srvpc_quotient(situation(unanimity(2, full(2)), CommGraph.complete(2)), full(2))
        assert q.n == 1 and q.game.values.tolist() == [0.0, 1.0]
        assert mii(q, 1) == 1.0

    def test_connected_partnership_commutes(self, example_graph):
        sit = situation(unanimity(5, coalition(1, 5)), example_graph)
        p = coalition(1, 3, 5)
        q = srvpc_quotient(sit, p)
        assert q.n == 3
        qgraph, qmap = quotient_graph(example_graph, p)
        restricted_of_quotient = situation(quotient_game(sit.game, p)[0], qgraph).restricted
        assert q.game == restricted_of_quotient
        assert mii(q, qmap.to_quotient(p)) == pytest.approx(mii(sit, p))

    def test_rejects_non_partnership(self, msg, example_graph):
        with pytest.raises(NotAVetoGraphPartnership):
            srvpc_quotient(situation(msg, example_graph), coalition(1, 2))


class TestDividendRelations:
    def test_direct(self):
        sit = situation(unanimity(3, coalition(2, 3)), CommGraph.from_edges(3, [(1, 2), (1, 3)]))
        assert restricted_dividend_direct(sit, full(3)) == 1.0
        assert restricted_dividend_general(sit, full(3)) == 1.0

    def test_disconnected_dividend_vanishes(self, rng, example_graph):
        sit = situation(random_game(rng, 5), example_graph)
        assert restricted_dividend_direct(sit, coalition(1, 4)) == 0.0

    def test_general_matches_direct(self, rng):
        for n in range(2, 6):
            for _ in range(6):
                g = random_game(rng, n)
                graph = CommGraph.from_edges(n, [e for e in combinations(range(1, n + 1), 2) if rng.random() < 0.5])
                rows = dividend_relation_report([situation(g, graph)], relation="general")
                assert all(r.agrees for r in rows)

    def test_general_requires_connected(self, msg, example_graph):
        with pytest.raises(PreconditionViolated):
            restricted_dividend_general(situation(msg, example_graph), coalition(1, 4))

    def test_tree_path_example(self):
        sit = situation(unanimity(3, coalition(1, 3)), CommGraph.from_edges(3, [(1, 2), (2, 3)]))
        assert restricted_dividend_tree(sit, full(3)) == 1.0
        assert restricted_dividend_tree(sit, coalition(1, 2)) == 0.0

    @pytest.mark.parametrize("reading", ["induced", "hull"])
    def test_tree_readings_match_direct(self, rng, reading):
        for _ in range(20):
            n = int(rng.integers(2, 8))
            sit = situation(random_game(rng, n), random_tree(rng, n))
            assert all(r.agrees for r in dividend_relation_report([sit], "tree", reading))

    def test_tree_requires_tree(self, msg, example_graph):
        with pytest.raises(NotATree):
            restricted_dividend_tree(situation(msg, example_graph), coalition(1, 2))
        with pytest.raises(ValueError):
            restricted_dividend_tree(situation(unanimity(2, 3), CommGraph.complete(2)), 3, reading="ambient")
