import numpy as np
import pandas as pd
import pytest
from scipy.stats import spearmanr

from lpgnet.attacks import (PAIR_COLUMNS, AttackError, AttackKind, DegreeBand, EvalPairs, PairMode,
                            PairSamplingError, SimilarityMetric, auc, band_nodes, linkteller_scores, lpa_scores,
                            pair_similarity, sample_eval_pairs)
from lpgnet.graph import generate_bipartite
from lpgnet.nn import normalize_adjacency, softmax
from lpgnet.types import Graph


def _brute_force_auc(pos, neg) -> float:
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


@pytest.fixture(scope="module")
def bipartite_graph():
    return generate_bipartite(n1=500, n2=400, p_edge=0.05, flip1=0.25, flip2=0.625, seed=0).graph


@pytest.mark.unit
class TestAuc:
    @pytest.mark.parametrize("seed", range(6))
    def test_matches_pair_counting(self, seed):
        rng = np.random.default_rng(seed)
        pos = rng.integers(0, 10, size=int(rng.integers(1, 200)))
        neg = rng.integers(0, 10, size=int(rng.integers(1, 200)))
        assert auc(pos, neg) == pytest.approx(_brute_force_auc(pos.tolist(), neg.tolist()), abs=1e-12)

    def test_extremes(self):
        assert auc([2, 3], [0, 1]) == 1.0
        assert auc([0, 1], [2, 3]) == 0.0
        assert auc([1, 1], [1, 1, 1]) == 0.5

    def test_empty_side(self):
        with pytest.raises(AttackError):
            auc([], [1.0])


@pytest.mark.unit
class TestPairSampling:
    def test_triangle_has_no_non_edges(self, triangle):
        with pytest.raises(PairSamplingError):
            sample_eval_pairs(triangle, PairMode.TransductiveSampled, 3)

    def test_inductive_path(self, path4):
        pairs = sample_eval_pairs(path4, PairMode.InductiveSubgraph, 4)
        assert pairs.positives.tolist() == [[0, 1], [1, 2], [2, 3]]
        assert pairs.negatives.tolist() == [[0, 2], [0, 3], [1, 3]]

    def test_too_few_nodes(self, path4):
        with pytest.raises(PairSamplingError):
            sample_eval_pairs(path4, PairMode.InductiveSubgraph, 5)

    def test_transductive_bipartite(self, bipartite_graph):
        pairs = sample_eval_pairs(bipartite_graph, PairMode.TransductiveSampled, 500, seed=3)
        assert (pairs.num_positives, pairs.num_negatives) == (500, 500)
        assert all(bipartite_graph.has_edge(u, v) for u, v in pairs.positives)
        assert not any(bipartite_graph.has_edge(u, v) for u, v in pairs.negatives)
        table = pairs.pairs()
        assert (table[:, 0] < table[:, 1]).all()
        assert np.unique(table, axis=0).shape[0] == 1000

    def test_reproducible_per_seed(self, bipartite_graph):
        a = sample_eval_pairs(bipartite_graph, PairMode.TransductiveSampled, 100, seed=1)
        b = sample_eval_pairs(bipartite_graph, PairMode.TransductiveSampled, 100, seed=1)
        c = sample_eval_pairs(bipartite_graph, PairMode.TransductiveSampled, 100, seed=2)
        assert np.array_equal(a.pairs(), b.pairs())
        assert not np.array_equal(a.pairs(), c.pairs())

    def test_pairs_touch_the_node_pool(self, bipartite_graph):
        pool = np.arange(0, 900, 30)
        pairs = sample_eval_pairs(bipartite_graph, PairMode.TransductiveSampled, 40, seed=0, nodes=pool)
        table = pairs.pairs()
        assert np.isin(table, pool).any(axis=1).all()
        assert not any(bipartite_graph.has_edge(u, v) for u, v in pairs.negatives)

    def test_inductive_sample_stays_in_pool(self, bipartite_graph):
        pool = np.arange(100, 200)
        pairs = sample_eval_pairs(bipartite_graph, PairMode.InductiveSubgraph, 20, seed=0, nodes=pool)
        assert pairs.num_pairs == 20 * 19 // 2
        assert np.isin(pairs.pairs(), pool).all()

    def test_degree_bands(self, path4):
        nodes = np.arange(4)
        assert band_nodes(path4, nodes, DegreeBand.Low, 2).tolist() == [0, 3]
        assert band_nodes(path4, nodes, DegreeBand.High, 2).tolist() == [1, 2]
        assert band_nodes(path4, nodes, DegreeBand.All, 2).tolist() == [0, 1, 2, 3]

    def test_low_band_pairs(self, bipartite_graph):
        pairs = sample_eval_pairs(bipartite_graph, PairMode.TransductiveSampled, 30, DegreeBand.Low, seed=0,
                                  band_size=50)
        low = band_nodes(bipartite_graph, np.arange(900), DegreeBand.Low, 50)
        assert np.isin(pairs.pairs(), low).any(axis=1).all()
        assert pairs.degree_band is DegreeBand.Low

    def test_self_pair_rejected(self):
        with pytest.raises(PairSamplingError):
            EvalPairs(np.array([[1, 1]]), np.empty((0, 2)), PairMode.TransductiveSampled)


@pytest.mark.unit
class TestLpa:
    def _pairs(self):
        return EvalPairs(np.array([[0, 1]]), np.array([[0, 2], [1, 3]]), PairMode.TransductiveSampled)

    def test_cosine(self):
        posteriors = np.array([[0.9, 0.1], [0.9, 0.1], [0.1, 0.9], [0.0, 0.0]])
        scores = pair_similarity(posteriors, self._pairs().pairs(), SimilarityMetric.Cosine)
        assert scores[0] == pytest.approx(1.0)
        assert scores[1] < 1.0
        assert scores[2] == 0.0

    def test_euclidean_is_negated_distance(self):
        posteriors = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        scores = pair_similarity(posteriors, self._pairs().pairs(), SimilarityMetric.Euclidean)
        assert scores.tolist() == pytest.approx([-1.0, -np.sqrt(2.0), -np.sqrt(2.0)])

    def test_correlation_of_flat_rows_is_zero(self):
        posteriors = np.array([[0.5, 0.5], [0.9, 0.1], [0.2, 0.8], [0.1, 0.9]])
        scores = pair_similarity(posteriors, self._pairs().pairs(), SimilarityMetric.Correlation)
        assert scores[0] == 0.0
        assert scores[2] == pytest.approx(-1.0)

    def test_informative_posteriors_score_high(self):
        labels = np.repeat([0, 1], 10)
        graph = Graph.from_edges(20, [(i, i + 1) for i in range(9)] + [(i, i + 1) for i in range(10, 19)])
        posteriors = np.eye(2)[labels] * 0.8 + 0.1
        pairs = sample_eval_pairs(graph, PairMode.InductiveSubgraph, 20)
        result = lpa_scores(posteriors, pairs)
        assert result.attack is AttackKind.Lpa
        assert result.auc > 0.7

    def test_pairs_outside_posteriors(self):
        with pytest.raises(AttackError):
            lpa_scores(np.ones((2, 2)), self._pairs())


@pytest.mark.unit
class TestLinkTeller:
    def _graph(self):
        return Graph.from_edges(8, [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 7), (0, 7)])

    def test_row_wise_model_gives_chance(self):
        weights = np.random.default_rng(0).standard_normal((3, 2))
        features = np.random.default_rng(1).standard_normal((8, 3))
        pairs = sample_eval_pairs(self._graph(), PairMode.InductiveSubgraph, 8)
        result = linkteller_scores(lambda x: softmax(x @ weights), features, pairs)
        assert np.all(result.scores == 0.0)
        assert result.auc == 0.5

    def test_one_layer_gcn_is_exposed(self):
        graph = self._graph()
        adjacency = normalize_adjacency(graph).matrix
        weights = np.random.default_rng(0).standard_normal((3, 2))
        features = np.random.default_rng(1).standard_normal((8, 3))
        pairs = sample_eval_pairs(graph, PairMode.InductiveSubgraph, 8)
        result = linkteller_scores(lambda x: softmax(adjacency @ (x @ weights)), features, pairs)
        assert np.all(result.scores[pairs.num_positives:] == 0.0)
        assert np.all(result.scores[:pairs.num_positives] > 0.0)
        assert result.auc == 1.0

    def test_bad_oracle_output(self):
        pairs = sample_eval_pairs(self._graph(), PairMode.InductiveSubgraph, 8)
        with pytest.raises(AttackError):
            linkteller_scores(lambda x: np.ones((3, 2)), np.ones((8, 3)), pairs)


@pytest.mark.unit
class TestAttackResult:
    def test_write(self, tmp_path, path4):
        pairs = sample_eval_pairs(path4, PairMode.InductiveSubgraph, 4)
        result = lpa_scores(np.eye(4)[[0, 0, 1, 1]] + 0.1, pairs)
        result.write(tmp_path / "pairs.csv", tmp_path / "summary.json", model="mlp")
        frame = pd.read_csv(tmp_path / "pairs.csv")
        assert list(frame.columns) == PAIR_COLUMNS
        assert frame["is_edge"].tolist() == [1, 1, 1, 0, 0, 0]
        summary = result.summary(model="mlp")
        assert summary["attack"] == "lpa"
        assert summary["positives"] == 3


@pytest.mark.unit
class TestScoringInvariants:
    def test_auc_ignores_monotone_transforms(self):
        rng = np.random.default_rng(0)
        pos = rng.integers(0, 20, size=60).astype(float)
        neg = rng.integers(0, 20, size=80).astype(float)
        assert auc(np.exp(pos / 4.0) + 3.0, np.exp(neg / 4.0) + 3.0) == auc(pos, neg)
        assert auc(-np.log1p(-pos / 21.0), -np.log1p(-neg / 21.0)) == auc(pos, neg)

    def test_cosine_ignores_row_scale(self):
        rng = np.random.default_rng(1)
        posteriors = softmax(rng.standard_normal((30, 4)))
        pairs = sample_eval_pairs(Graph.from_edges(30, [(i, i + 1) for i in range(29)]),
                                  PairMode.InductiveSubgraph, 30)
        scaled = posteriors * rng.uniform(0.1, 10.0, size=(30, 1))
        assert np.allclose(lpa_scores(posteriors, pairs).scores, lpa_scores(scaled, pairs).scores)

    def test_linkteller_ranking_is_stable_in_delta(self):
        dataset = generate_bipartite(n1=40, n2=30, p_edge=0.1, flip1=0.25, flip2=0.625, seed=2)
        adjacency = normalize_adjacency(dataset.graph).matrix
        rng = np.random.default_rng(3)
        w1, w2 = rng.standard_normal((5, 8)), rng.standard_normal((8, 2))
        features = rng.standard_normal((dataset.graph.num_nodes, 5))

        def oracle(x):
            return softmax(adjacency @ (np.tanh(adjacency @ (x @ w1)) @ w2))

        pairs = sample_eval_pairs(dataset.graph, PairMode.InductiveSubgraph, 30, seed=0)
        coarse = linkteller_scores(oracle, features, pairs, delta=1e-3).scores
        fine = linkteller_scores(oracle, features, pairs, delta=1e-4).scores
        assert spearmanr(coarse, fine)[0] >= 0.99


@pytest.mark.unit
class TestNonEdgeUniformity:
    @pytest.mark.parametrize("enumerate_limit", [1 << 18, 0])
    def test_pairs_inside_pool_are_not_favoured(self, monkeypatch, enumerate_limit):
        monkeypatch.setattr("lpgnet.attacks.pairs._ENUMERATE_LIMIT", enumerate_limit)
        graph = Graph.from_edges(20, [(0, 19)])
        pool = np.arange(5)
        inside = 0
        for seed in range(4000):
            pairs = sample_eval_pairs(graph, PairMode.TransductiveSampled, 1, seed=seed, nodes=pool)
            inside += int(np.isin(pairs.negatives[0], pool).all())
        # 10 of the 84 non-edges touching the pool lie inside it
        assert inside / 4000 == pytest.approx(10 / 84, abs=0.03)
