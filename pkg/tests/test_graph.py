import itertools

import numpy as np
import pytest

from lpgnet.graph import (DatasetFormatError, generate_bipartite, generate_erdos_renyi, graph_stats, homophily_profile,
                          load_dataset, load_dataset_dir, phase_views, random_split, write_dataset)
from lpgnet.types import (Dataset, DatasetError, Graph, GraphError, Setting, Split, decode_triangle_slots,
                          encode_triangle_slots)


@pytest.mark.unit
class TestGraph:
    def test_from_edges_collapses_duplicates_and_reversals(self):
        g = Graph.from_edges(3, [(0, 1), (1, 0), (0, 1), (2, 1)])
        assert g.num_edges == 2
        assert g.neighbors(1).tolist() == [0, 2]
        assert g.degrees().tolist() == [1, 2, 1]

    def test_triangle_is_symmetric(self, triangle):
        dense = triangle.to_sparse().toarray()
        assert np.array_equal(dense, dense.T)
        assert triangle.degrees().tolist() == [2, 2, 2]
        assert triangle.has_edge(2, 0)

    def test_self_loop_rejected(self):
        with pytest.raises(GraphError, match="self-loop"):
            Graph.from_edges(3, [(1, 1)])

    def test_out_of_range_rejected(self):
        with pytest.raises(GraphError, match="outside"):
            Graph.from_edges(3, [(0, 3)])

    def test_empty_graph(self):
        g = Graph.empty(5)
        assert g.num_edges == 0
        assert g.edge_array().shape == (0, 2)
        assert g.degrees().tolist() == [0] * 5

    def test_edge_array_is_sorted_upper(self, path4):
        assert path4.edge_array().tolist() == [[0, 1], [1, 2], [2, 3]]

    def test_induced_relabels_in_given_order(self, path4):
        sub = path4.induced([3, 2, 0])
        assert sub.num_nodes == 3
        assert sub.edge_array().tolist() == [[0, 1]]

    def test_fingerprint_tracks_structure(self, path4, triangle):
        same = Graph.from_edges(4, [(2, 3), (1, 2), (0, 1)])
        assert path4.fingerprint() == same.fingerprint()
        assert path4 == same
        assert path4.fingerprint() != Graph.from_edges(4, [(0, 1), (1, 2)]).fingerprint()
        assert path4 != triangle

    def test_arrays_are_read_only(self, path4):
        with pytest.raises(ValueError):
            path4.neighbor_ids[0] = 3


@pytest.mark.unit
class TestTriangleSlots:
    def test_row_major_numbering(self):
        n = 5
        pairs = np.array(list(itertools.combinations(range(n), 2)))
        assert encode_triangle_slots(n, pairs).tolist() == list(range(n * (n - 1) // 2))

    def test_decode_inverts_encode(self):
        n = 9
        pairs = np.array(list(itertools.combinations(range(n), 2)))
        slots = encode_triangle_slots(n, pairs)
        assert np.array_equal(decode_triangle_slots(n, slots), pairs)


@pytest.mark.unit
class TestDataset:
    def test_split_overlap_rejected(self, path4):
        with pytest.raises(DatasetError, match="overlap"):
            Dataset(graph=path4, features=np.zeros((4, 1)), labels=np.zeros(4), split=Split([0, 1], [1], [2]),
                    num_classes=1)

    def test_label_range_checked(self, path4):
        with pytest.raises(DatasetError, match="label 2"):
            Dataset(graph=path4, features=np.zeros((4, 1)), labels=[0, 1, 2, 0], split=Split([0], [1], [2]),
                    num_classes=2)

    def test_induced_maps_split(self, toy_dataset):
        sub = toy_dataset.induced([1, 2, 3])
        assert sub.split.train.tolist() == [1]
        assert sub.split.val.tolist() == [0]
        assert sub.split.test.tolist() == [2]
        assert sub.labels.tolist() == [0, 1, 1]
        assert sub.graph.edge_array().tolist() == [[0, 1], [1, 2]]


@pytest.mark.unit
class TestDatasetFiles:
    def test_write_then_load(self, tmp_path, toy_dataset):
        write_dataset(toy_dataset, tmp_path / "toy")
        assert load_dataset_dir(tmp_path / "toy") == toy_dataset

    def _write(self, root, graph="0 1\n1 2\n", features="1 0\n0 1\n1 1\n", labels="0\n1\n0\n",
               split="train: 0\nval: 1\ntest: 2\n"):
        root.mkdir(parents=True, exist_ok=True)
        for name, text in (("graph.txt", graph), ("features.txt", features), ("labels.txt", labels),
                           ("split.txt", split)):
            (root / name).write_text(text, encoding="utf-8")
        return root

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        root = self._write(tmp_path, graph="# edges\n0 1\n\n1 2  # trailing\n")
        dataset = load_dataset_dir(root)
        assert dataset.graph.num_edges == 2
        assert dataset.num_classes == 2

    def test_json_split(self, tmp_path):
        root = self._write(tmp_path, split='{"train": [0], "val": [1], "test": [2]}')
        assert load_dataset_dir(root).split.test.tolist() == [2]

    def test_bad_edge_line_reports_line_number(self, tmp_path):
        root = self._write(tmp_path, graph="0 1\n1 x\n")
        with pytest.raises(DatasetFormatError) as info:
            load_dataset_dir(root)
        assert info.value.line_no == 2
        assert str(info.value).startswith(str(root / "graph.txt") + ":2:")

    def test_self_loop_in_file(self, tmp_path):
        root = self._write(tmp_path, graph="2 2\n")
        with pytest.raises(DatasetFormatError, match="self-loop"):
            load_dataset_dir(root)

    def test_ragged_features(self, tmp_path):
        root = self._write(tmp_path, features="1 0\n0 1 1\n1 1\n")
        with pytest.raises(DatasetFormatError, match="expected 2 features"):
            load_dataset_dir(root)

    def test_label_count_mismatch(self, tmp_path):
        root = self._write(tmp_path, labels="0\n1\n")
        with pytest.raises(DatasetFormatError, match="expected 3 labels"):
            load_dataset_dir(root)

    def test_missing_file_names_path(self, tmp_path):
        root = self._write(tmp_path)
        (root / "split.txt").unlink()
        with pytest.raises(DatasetFormatError, match="split.txt"):
            load_dataset(root / "graph.txt", root / "features.txt", root / "labels.txt", root / "split.txt")

    def test_explicit_num_classes(self, tmp_path):
        root = self._write(tmp_path)
        assert load_dataset_dir(root, num_classes=5).num_classes == 5


@pytest.mark.unit
class TestGenerators:
    def test_bipartite_has_no_intra_cluster_edges(self):
        dataset = generate_bipartite(n1=50, n2=40, p_edge=0.1, flip1=0.25, flip2=0.625, seed=7)
        edges = dataset.graph.edge_array()
        assert (edges[:, 0] < 50).all()
        assert (edges[:, 1] >= 50).all()

    def test_bipartite_flip_counts_are_exact(self):
        dataset = generate_bipartite(n1=500, n2=400, p_edge=0.05, flip1=0.25, flip2=0.625, seed=0)
        features, labels = dataset.features, dataset.labels
        cluster2_style = features[:, 0] < 0
        assert int(cluster2_style[labels == 0].sum()) == 125
        assert int((~cluster2_style)[labels == 1].sum()) == 250

    def test_bipartite_ground_truth_homophily_is_zero(self):
        dataset = generate_bipartite(n1=50, n2=40, p_edge=0.2, flip1=0.25, flip2=0.625, seed=1)
        profile = homophily_profile(dataset.graph, dataset.labels, 2)
        assert np.allclose(profile.per_cluster_avg, 0.0)

    def test_same_seed_same_dataset(self):
        a = generate_bipartite(n1=30, n2=20, p_edge=0.3, flip1=0.25, flip2=0.625, seed=11)
        b = generate_bipartite(n1=30, n2=20, p_edge=0.3, flip1=0.25, flip2=0.625, seed=11)
        assert a == b

    def test_probability_checked(self):
        with pytest.raises(GraphError, match="p_edge"):
            generate_bipartite(n1=3, n2=3, p_edge=1.5, flip1=0.0, flip2=0.0, seed=0)

    def test_erdos_renyi_cora_density(self):
        dataset = generate_erdos_renyi(2708, 5429, seed=0)
        assert dataset.graph.num_edges == 5429
        assert graph_stats(dataset.graph).density == pytest.approx(0.0015, abs=1e-4)

    def test_erdos_renyi_edge_bound(self):
        with pytest.raises(GraphError):
            generate_erdos_renyi(4, 7, seed=0)

    def test_random_split_sizes(self):
        split = random_split(100, np.random.default_rng(0))
        assert (len(split.train), len(split.val), len(split.test)) == (35, 15, 50)
        union = np.concatenate([split.train, split.val, split.test])
        assert sorted(union.tolist()) == list(range(100))


@pytest.mark.unit
class TestStats:
    def test_homophily_profile(self, path4):
        profile = homophily_profile(path4, [0, 0, 1, 1], 2)
        # node scores: 1, 1/2, 1/2, 1
        assert np.allclose(profile.per_node_score, [1.0, 0.5, 0.5, 1.0])
        assert np.allclose(profile.per_cluster_avg, [0.75, 0.75])

    def test_isolated_nodes_are_undefined(self):
        g = Graph.from_edges(3, [(0, 1)])
        profile = homophily_profile(g, [0, 0, 1], 2)
        assert profile.defined.tolist() == [True, True, False]
        assert np.isnan(profile.per_cluster_avg[1])
        assert profile.per_cluster_avg[0] == 1.0

    def test_density(self, triangle):
        assert graph_stats(triangle).density == 1.0


@pytest.mark.unit
class TestPhaseViews:
    def test_transductive_shares_everything(self, small_bipartite):
        views = phase_views(small_bipartite, Setting.Transductive)
        assert views.train.graph is views.inference.graph
        assert views.validation_shares_training_graph
        assert np.array_equal(views.inference.rows, small_bipartite.split.test)

    def test_inductive_different(self, small_bipartite):
        split = small_bipartite.split
        views = phase_views(small_bipartite, Setting.InductiveDifferent)
        assert views.train.graph.num_nodes == split.train.size + split.val.size
        assert views.validation_shares_training_graph
        assert views.inference.graph.num_nodes == split.test.size
        assert views.inference.rows.tolist() == list(range(split.test.size))

    def test_inductive_evolving(self, small_bipartite):
        split = small_bipartite.split
        views = phase_views(small_bipartite, Setting.InductiveEvolving)
        assert views.train.graph.num_nodes == split.train.size
        assert views.validation.graph.num_nodes == split.train.size + split.val.size
        assert not views.validation_shares_training_graph
        assert views.inference.graph == small_bipartite.graph
        assert np.array_equal(views.validation.labels[views.validation.rows], small_bipartite.labels[split.val])
