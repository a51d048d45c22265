import numpy as np
import pytest

from embed_export import ExportJob, export
from embed_export.cli import main

# the primary package is consumed only through its file formats; its loaders
# are the acceptance check that our outputs parse
from labelrefine import fileio


@pytest.fixture
def ten_docs(tmp_path):
    p = tmp_path / "docs.txt"
    p.write_text("\n".join(f"document number {i} about topic {i % 3}" for i in range(10)) + "\n")
    return p


@pytest.fixture
def categories(tmp_path):
    p = tmp_path / "cats.txt"
    p.write_text("world\nsports\nbusiness\nscience technology\n")
    return p


def test_dual_mode_parses_with_primary_loaders(ten_docs, tmp_path):
    out = tmp_path / "docs.vec"
    export(ExportJob(model="hash:16", input_path=str(ten_docs), output_path=str(out)))
    table = fileio.load_vectors(out)
    assert len(table) == 10 and table.dim == 16
    m = fileio.load_embedding_matrix(out)
    assert m.rows == 10 and m.dim == 16


def test_single_mode_parses_with_primary_loaders(ten_docs, categories, tmp_path):
    out = tmp_path / "scores.tsv"
    export(ExportJob(
        model="hash:16", input_path=str(ten_docs), output_path=str(out),
        mode="single-scores", categories_path=str(categories),
    ))
    m = fileio.load_score_matrix(out)
    assert m.n_docs == 10 and m.k == 4
    assert m.polarity.value == "higher"


def test_row_count_matches_input_lines(tmp_path):
    p = tmp_path / "docs.txt"
    p.write_text("one\ntwo\nthree\n")
    out = tmp_path / "out.vec"
    export(ExportJob(model="hash:8", input_path=str(p), output_path=str(out)))
    assert fileio.load_embedding_matrix(out).rows == 3


def test_empty_input_fails_before_model_work(tmp_path):
    p = tmp_path / "docs.txt"
    p.write_text("\n\n")
    with pytest.raises(ValueError):
        export(ExportJob(model="hash:8", input_path=str(p), output_path=str(tmp_path / "o")))
    assert not (tmp_path / "o").exists()


def test_single_mode_requires_categories(tmp_path):
    with pytest.raises(ValueError):
        ExportJob(model="hash:8", input_path="x", output_path="y", mode="single-scores")


def test_deterministic_across_runs(ten_docs, tmp_path):
    a, b = tmp_path / "a.vec", tmp_path / "b.vec"
    for out in (a, b):
        export(ExportJob(model="hash:16", input_path=str(ten_docs), output_path=str(out)))
    assert a.read_bytes() == b.read_bytes()


def test_batching_does_not_change_output(ten_docs, tmp_path):
    a, b = tmp_path / "a.vec", tmp_path / "b.vec"
    export(ExportJob(model="hash:16", input_path=str(ten_docs), output_path=str(a), batch_size=3))
    export(ExportJob(model="hash:16", input_path=str(ten_docs), output_path=str(b), batch_size=32))
    assert a.read_bytes() == b.read_bytes()


def test_truncation_keeps_category_intact(tmp_path):
    # a long document changes its score only through its surviving prefix
    from embed_export import HashEncoder

    enc = HashEncoder(dim=8, max_seq_len=6)
    category = "science technology"  # 2 tokens -> 4-token document budget
    doc = "alpha beta gamma delta IGNORED_TAIL MORE_TAIL"
    truncated = "alpha beta gamma delta"
    assert enc.score_pairs(category, [doc])[0] == enc.score_pairs(category, [truncated])[0]


def test_cli_roundtrip(ten_docs, categories, tmp_path):
    out = tmp_path / "scores.tsv"
    rc = main(["--model", "hash:12", "--input", str(ten_docs), "--output", str(out),
               "--mode", "single-scores", "--categories", str(categories)])
    assert rc == 0
    assert fileio.load_score_matrix(out).n_docs == 10


def test_exported_files_feed_refinement(ten_docs, categories, tmp_path):
    # end to end: export both formats, then run the primary pipelines on them
    from labelrefine import RefinementConfig, refine_dual, refine_single

    docs_out = tmp_path / "docs.vec"
    cats_out = tmp_path / "cats.vec"
    scores_out = tmp_path / "scores.tsv"
    export(ExportJob(model="hash:16", input_path=str(ten_docs), output_path=str(docs_out)))
    export(ExportJob(model="hash:16", input_path=str(categories), output_path=str(cats_out)))
    export(ExportJob(
        model="hash:16", input_path=str(ten_docs), output_path=str(scores_out),
        mode="single-scores", categories_path=str(categories),
    ))
    docs = fileio.load_embedding_matrix(docs_out)
    cats = fileio.load_embedding_matrix(cats_out)
    dual = refine_dual(docs, cats, RefinementConfig())
    assert dual.final_predictions.shape == (10,)
    single = refine_single(fileio.load_score_matrix(scores_out), RefinementConfig())
    assert single.final_predictions.shape == (10,)
