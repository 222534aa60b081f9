import pytest

import multisift as ms


def make_catalog():
    return ms.ModelCatalog(
        [
            ms.ModelInfo("gemma2-2b", "gemma2", 2),
            ms.ModelInfo("gemma2-9b", "gemma2", 9),
            ms.ModelInfo("gemma2-27b", "gemma2", 27),
            ms.ModelInfo("phi3-mini", "phi3", 3.8),
        ]
    )


def make_record(rid, rewards_by_model):
    responses = [
        ms.ResponseEntry(model, f"answer from {model}", {"rm": reward})
        for model, reward in rewards_by_model
    ]
    return ms.InstructionRecord(rid, f"instruction {rid}", responses)


def test_version():
    assert ms.__version__ == "0.1.0"


def test_metrics_basics():
    assert ms.difficulty([9.0, 7.0]) == -8.0
    assert ms.separability([1.0, 3.0]) == 1.0
    assert ms.rank_vector([7.0, 7.0, 1.0]) == [1.5, 1.5, 3.0]
    assert ms.spearman([2.0, 1.0], [1.0, 2.0]) == -1.0
    assert ms.spearman([1.5, 1.5], [1.0, 2.0]) is None


def test_stability_and_scoring():
    catalog = make_catalog()
    rec = make_record("r1", [("gemma2-2b", 1.0), ("gemma2-9b", 2.0), ("gemma2-27b", 3.0)])
    assert ms.stability(rec, catalog, "rm") == 1.0

    lone = make_record("r2", [("phi3-mini", 5.0)])
    assert ms.stability(lone, catalog, "rm") is None

    rows = ms.score_dataset([rec, lone], catalog, "rm")
    assert [r.instruction_id for r in rows] == ["r1", "r2"]
    assert rows[0].difficulty == -2.0
    assert rows[1].separability == 0.0
    assert rows[1].stability is None

    with pytest.raises(ms.ValidationError):
        ms.score_dataset([rec], catalog, "missing-key")
    assert issubclass(ms.ValidationError, ValueError)


def test_normalization():
    assert ms.quantile_transform([10.0, 20.0, 30.0]) == [0.0, 0.5, 1.0]
    assert ms.quantile_transform([42.0]) == [0.5]
    assert ms.minmax([5.0, 5.0]) == [0.5, 0.5]
    assert ms.zscore([3.0, 3.0, 3.0]) == [0.0, 0.0, 0.0]
    xs = [0.3, -1.2, 4.5, 2.2, 0.0]
    assert ms.normalize_column("c", xs) == ms.quantile_transform(xs)


def test_aggregate_defaults():
    catalog = make_catalog()
    rec = make_record("r1", [("gemma2-2b", 1.0), ("gemma2-9b", 2.0)])
    rows = ms.aggregate(ms.score_dataset([rec], catalog, "rm"))
    assert rows[0].multi == 2.0  # lone row: every quantile is 0.5, weights sum to 4
    assert not rows[0].stability_imputed

    lone = make_record("r2", [("phi3-mini", 5.0)])
    rows = ms.aggregate(ms.score_dataset([lone], catalog, "rm"), ms.Weights(1, 1, 2))
    assert rows[0].stability_imputed


def test_selection():
    scores = {"a": 3.0, "b": 1.0, "c": 2.0}
    assert ms.top_k(scores, 2) == ["a", "c"]
    assert ms.top_k(scores, 2, direction="bottom") == ["b", "c"]

    sample = ms.random_sample(["a", "b", "c", "d"], 2, seed=7)
    assert sample == ms.random_sample(["d", "c", "b", "a"], 2, seed=7)
    assert len(set(sample)) == 2

    rec = make_record("r1", [("gemma2-2b", 1.0), ("gemma2-9b", 9.0), ("phi3-mini", 9.0)])
    best = ms.choose_response(rec, "best", "rm")
    assert best.rewards["rm"] == 9.0
    assert best.model_id == "gemma2-9b"  # tie resolved to the smaller id
    assert (
        ms.choose_response(rec, "random", seed=3).model_id
        == ms.choose_response(rec, "random", seed=3).model_id
    )


def test_clustering():
    points = [(f"a{i}", [1.0 + 0.001 * i, 0.0]) for i in range(5)]
    points += [(f"b{i}", [0.0, 1.0 + 0.001 * i]) for i in range(5)]
    assignments = ms.kmeans(points, 2, seed=1)
    by_id = dict(assignments)
    assert len({by_id[f"a{i}"] for i in range(5)}) == 1
    assert len({by_id[f"b{i}"] for i in range(5)}) == 1
    assert by_id["a0"] != by_id["b0"]
    assert assignments == ms.kmeans(points, 2, seed=1)

    picked = ms.balanced_select(assignments, {pid: float(i) for i, (pid, _) in enumerate(points)}, 4)
    assert len(picked) == 4
    assert sum(by_id[p] == by_id["a0"] for p in picked) == 2


def test_embed_error_mapping():
    with pytest.raises(ms.RemoteError):
        ms.embed_texts(["x"], "http://127.0.0.1:9/v1/embeddings", max_retries=0, timeout_s=0.2)
    assert issubclass(ms.RemoteError, ConnectionError)


def test_fnv1a64():
    assert ms.fnv1a64("") == 14695981039346656037
    assert ms.fnv1a64("foobar") == 0x85944171F73967E8
