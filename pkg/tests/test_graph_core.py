import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphevade.graph_core import (
    EdgeFlip,
    GraphDataset,
    InapplicableFlip,
    LabeledGraph,
    ParseError,
    SchemaError,
    apply_flips,
    graph_hash,
    read_dataset,
    write_dataset,
)
from graphevade.synth_data import GeneratorConfig, generate

from conftest import graph_strategy, make_graph, random_graph


def test_triangle_remove_gives_path():
    g = make_graph(3, [(0, 1), (0, 2), (1, 2)])
    out = apply_flips(g, [EdgeFlip(0, 1, "remove")])
    assert out.edge_pairs == {(0, 2), (1, 2)}
    assert g.edge_pairs == {(0, 1), (0, 2), (1, 2)}  # input untouched


def test_empty_flip_list_is_identity():
    g = make_graph(4, [(0, 3), (1, 2)])
    assert apply_flips(g, []) == g


def test_adds_on_empty_graph():
    g = make_graph(4, [])
    out = apply_flips(g, [EdgeFlip(0, 1, "add"), EdgeFlip(2, 3, "add")])
    assert out.edge_pairs == {(0, 1), (2, 3)}


def test_added_edge_defaults_to_mean_weight():
    g = make_graph(3, [(0, 1, 2.0), (1, 2, 4.0)])
    out = apply_flips(g, [EdgeFlip(0, 2, "add")])
    assert out.edge_weights[(0, 2)] == pytest.approx(3.0)
    lone = apply_flips(make_graph(2, []), [EdgeFlip(0, 1, "add")])
    assert lone.edge_weights[(0, 1)] == 1.0


def test_inapplicable_flips_raise():
    g = make_graph(3, [(0, 1)])
    with pytest.raises(InapplicableFlip):
        apply_flips(g, [EdgeFlip(0, 1, "add")])
    with pytest.raises(InapplicableFlip):
        apply_flips(g, [EdgeFlip(1, 2, "remove")])


def test_graph_validation():
    with pytest.raises(ValueError):
        make_graph(3, [(1, 1)])
    with pytest.raises(ValueError):
        make_graph(3, [(0, 5)])
    with pytest.raises(ValueError):
        make_graph(3, [(0, 1), (0, 1)])
    with pytest.raises(ValueError):
        make_graph(2, [(0, 1, -1.0)])
    with pytest.raises(ValueError):
        LabeledGraph("g", ("a",), ("object", "object"), ())


def test_edges_canonicalized():
    g = LabeledGraph("g", ("a", "a", "a"), ("object",) * 3,
                     ((2, 1, 1.0), (1, 0, 2.0)))
    assert g.edges == ((0, 1, 2.0), (1, 2, 1.0))


@settings(max_examples=60, deadline=None)
@given(graph_strategy(), st.data())
def test_flip_twice_restores_edges(g, data):
    pairs = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]
    if not pairs:
        return
    u, v = data.draw(st.sampled_from(pairs))
    if g.has_edge(u, v):
        first = EdgeFlip(u, v, "remove")
        second = EdgeFlip(u, v, "add", weight=g.edge_weights[(u, v)])
    else:
        first = EdgeFlip(u, v, "add", weight=1.5)
        second = EdgeFlip(u, v, "remove")
    assert apply_flips(g, [first, second]).edges == g.edges


def test_hash_identity_and_sensitivity():
    g = make_graph(3, [(0, 1), (1, 2)])
    assert graph_hash(g) == graph_hash(apply_flips(g, []))
    removed = apply_flips(g, [EdgeFlip(0, 1, "remove")])
    assert graph_hash(g) != graph_hash(removed)


def test_hash_collision_scan(rng):
    seen = set()
    for i in range(1000):
        g = random_graph(6, 0.4, rng, graph_id=f"r{i}")
        seen.add(graph_hash(g))
    # distinct structures should hash distinctly; duplicates of identical
    # structures are expected and fine, so regenerate structurally unique ones
    assert len(seen) >= 900


def test_hash_ignores_graph_id():
    a = make_graph(3, [(0, 1)], graph_id="x")
    b = make_graph(3, [(0, 1)], graph_id="y")
    assert graph_hash(a) == graph_hash(b)


def test_dataset_roundtrip_file(tmp_path):
    ds = generate(GeneratorConfig(n_train_per_class=10, n_test_per_class=5, seed=7))
    path = tmp_path / "ds.jsonl"
    write_dataset(ds, path)
    back = read_dataset(path)
    assert back == ds
    # byte-identical canonical rewrite
    path2 = tmp_path / "ds2.jsonl"
    write_dataset(back, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_read_two_line_file(tmp_path):
    g1 = make_graph(2, [(0, 1)], labels=["a", "b"])
    g2 = make_graph(1, [], labels=["a"])
    path = tmp_path / "two.jsonl"
    ds = GraphDataset.from_graphs([g1, g2], [1, -1], ["train", "test"])
    write_dataset(ds, path)
    back = read_dataset(path)
    assert len(back) == 2
    assert back.labels == (1, -1)
    assert back.splits == ("train", "test")


def test_self_loop_line_is_parse_error(tmp_path):
    rec = {"id": "g0", "y": 1, "split": "train",
           "nodes": [{"id": 0, "label": "a", "tier": "object"},
                     {"id": 1, "label": "a", "tier": "object"},
                     {"id": 2, "label": "a", "tier": "object"},
                     {"id": 3, "label": "a", "tier": "object"}],
           "edges": [{"u": 3, "v": 3, "w": 1.0}]}
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps(rec) + "\n")
    with pytest.raises(ParseError) as err:
        read_dataset(path)
    assert err.value.line_no == 1
    assert "self-loop" in str(err.value)


def test_unknown_field_is_schema_error(tmp_path):
    rec = {"id": "g0", "y": 1, "bogus": 3,
           "nodes": [{"id": 0, "label": "a", "tier": "object"}],
           "edges": []}
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps(rec) + "\n")
    with pytest.raises(SchemaError) as err:
        read_dataset(path)
    assert err.value.field == "bogus"


def test_missing_field_and_bad_json(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "g0", "y": 1, "nodes": [{"id": 0, "label": "a", "tier": "object"}]}\n')
    with pytest.raises(SchemaError):
        read_dataset(path)
    path.write_text("{not json\n")
    with pytest.raises(ParseError):
        read_dataset(path)


def test_noncontiguous_node_ids_rejected(tmp_path):
    rec = {"id": "g0", "y": 1,
           "nodes": [{"id": 0, "label": "a", "tier": "object"},
                     {"id": 2, "label": "a", "tier": "object"}],
           "edges": []}
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps(rec) + "\n")
    with pytest.raises(SchemaError):
        read_dataset(path)


@settings(max_examples=30, deadline=None)
@given(st.lists(graph_strategy(max_n=6), min_size=1, max_size=5), st.data())
def test_roundtrip_property(tmp_path_factory, graphs, data):
    graphs = [LabeledGraph(f"g{i:04d}", g.node_labels, g.node_tiers, g.edges)
              for i, g in enumerate(graphs)]
    labels = data.draw(st.lists(st.sampled_from([1, -1]),
                                min_size=len(graphs), max_size=len(graphs)))
    splits = data.draw(st.lists(st.sampled_from(["train", "test"]),
                                min_size=len(graphs), max_size=len(graphs)))
    ds = GraphDataset.from_graphs(graphs, labels, splits)
    path = tmp_path_factory.mktemp("rt") / "ds.jsonl"
    write_dataset(ds, path)
    assert read_dataset(path) == ds


def test_dataset_validation():
    g = make_graph(2, [(0, 1)])
    with pytest.raises(ValueError):
        GraphDataset.from_graphs([g], [2])
    with pytest.raises(ValueError):
        GraphDataset((g,), (1,), ("train", "test"), ("a",))
    with pytest.raises(ValueError):
        GraphDataset((g,), (1,), ("train",), ("zzz",))


def test_subset_filters_splits():
    g = make_graph(2, [(0, 1)])
    ds = GraphDataset.from_graphs([g, g, g], [1, -1, 1], ["train", "test", "train"])
    assert len(ds.subset("train")) == 2
    assert len(ds.subset("test")) == 1
