"""File formats: word-vector tables, embedding/score/gold loaders, manifests,
and report (de)serialization.

All embedding files use the word2vec text format (optional "count dim"
header, then one token plus its coordinates per line).  Reports are plain
UTF-8 key/value text with stable key order; floats are written with
``repr`` so a written report reads back bit-for-bit.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    AllOOV,
    EmptyInput,
    InconsistentDim,
    ParseError,
    RaggedRows,
)
from .evaluation import EvaluationReport, SweepRun
from .model import (
    CategorySet,
    EmbeddingMatrix,
    GoldLabels,
    Polarity,
    ProbabilityMatrix,
    RefinementResult,
    ScoreMatrix,
)


def _parse_float(tok: str, lineno: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(lineno, f"not a number: {tok!r}")
    if not math.isfinite(v):
        raise ParseError(lineno, f"non-finite value: {tok!r}")
    return v


def _read_vector_lines(path) -> list[tuple[int, str, np.ndarray]]:
    """Parse a word2vec-format text file into (lineno, token, vector) rows."""
    rows = []
    dim = None
    with open(path, encoding="utf-8") as f:
        lines = f.readlines()
    start = 0
    if lines:
        first = lines[0].split()
        if len(first) == 2:
            try:
                int(first[0]), int(first[1])
                start = 1  # "count dim" header
            except ValueError:
                pass
    for lineno, line in enumerate(lines[start:], start=start + 1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) < 2:
            raise ParseError(lineno, "expected token followed by coordinates")
        token = parts[0]
        vec = np.array([_parse_float(p, lineno) for p in parts[1:]])
        if dim is None:
            dim = vec.shape[0]
        elif vec.shape[0] != dim:
            raise InconsistentDim(lineno, f"{vec.shape[0]} values, expected {dim}")
        rows.append((lineno, token, vec))
    if not rows:
        raise EmptyInput(f"no vectors in {path}")
    return rows


@dataclass(frozen=True)
class WordVectorTable:
    """Token -> vector lookup with optional lower-casing."""

    vectors: dict
    dim: int
    lowercase: bool = True

    def lookup(self, token: str) -> Optional[np.ndarray]:
        if self.lowercase:
            token = token.lower()
        return self.vectors.get(token)

    def __len__(self) -> int:
        return len(self.vectors)


def load_vectors(path, lowercase: bool = True) -> WordVectorTable:
    """Load a word2vec text file; duplicate tokens keep the first occurrence."""
    rows = _read_vector_lines(path)
    table: dict = {}
    for _, token, vec in rows:
        key = token.lower() if lowercase else token
        if key not in table:
            table[key] = vec
    return WordVectorTable(vectors=table, dim=rows[0][2].shape[0], lowercase=lowercase)


def encode_average(text: str, table: WordVectorTable) -> np.ndarray:
    """Mean of the in-vocabulary token vectors of a whitespace-split text."""
    hits = [v for v in (table.lookup(t) for t in text.split()) if v is not None]
    if not hits:
        raise AllOOV(text)
    return np.mean(hits, axis=0)


def load_embedding_matrix(path) -> EmbeddingMatrix:
    """Load a word2vec-format file preserving row order; tokens become ids."""
    rows = _read_vector_lines(path)
    tokens = [t for _, t, _ in rows]
    ids = tuple(tokens) if len(set(tokens)) == len(tokens) else None
    return EmbeddingMatrix(np.stack([v for _, _, v in rows]), ids=ids)


def write_embedding_matrix(path, m: EmbeddingMatrix, ids: Optional[Sequence[str]] = None) -> None:
    ids = list(ids) if ids is not None else (list(m.ids) if m.ids else [f"row{i}" for i in range(m.rows)])
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{m.rows} {m.dim}\n")
        for token, row in zip(ids, m.data):
            f.write(token + " " + " ".join(repr(float(x)) for x in row) + "\n")


def load_score_matrix(path) -> ScoreMatrix:
    """Load a TSV score matrix with an optional "#polarity=" header line."""
    polarity = Polarity.HIGHER_BETTER
    rows = []
    width = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("polarity="):
                    value = body.split("=", 1)[1].strip()
                    if value == "higher":
                        polarity = Polarity.HIGHER_BETTER
                    elif value == "lower":
                        polarity = Polarity.LOWER_BETTER
                    else:
                        raise ParseError(lineno, f"unknown polarity {value!r}")
                continue
            parts = line.split("\t")
            vals = [_parse_float(p, lineno) for p in parts]
            if width is None:
                width = len(vals)
            elif len(vals) != width:
                raise RaggedRows(lineno, f"{len(vals)} columns, expected {width}")
            rows.append(vals)
    if not rows:
        raise EmptyInput(f"no scores in {path}")
    return ScoreMatrix(scores=np.array(rows), polarity=polarity)


def write_score_matrix(path, m: ScoreMatrix) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"#polarity={m.polarity.value}\n")
        for row in m.scores:
            f.write("\t".join(repr(float(x)) for x in row) + "\n")


def load_gold_labels(path, categories: Optional[CategorySet] = None) -> GoldLabels:
    """One label per line: a category index or an exact category name."""
    labels = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            tok = line.strip()
            if not tok:
                continue
            try:
                labels.append(int(tok))
                continue
            except ValueError:
                pass
            if categories is None or tok not in categories.names:
                raise ParseError(lineno, f"unknown label {tok!r}")
            labels.append(categories.names.index(tok))
    if not labels:
        raise EmptyInput(f"no labels in {path}")
    return GoldLabels(np.array(labels))


def load_category_names(path) -> CategorySet:
    """One category description per line; the whole line is the name."""
    with open(path, encoding="utf-8") as f:
        names = [line.strip() for line in f if line.strip()]
    return CategorySet(names=tuple(names))


_MANIFEST_KEYS = ("docs", "cats", "gold", "anchors", "aug_cats", "aug_text", "scores")


def load_manifest(path) -> dict:
    """key=value lines naming the dataset files, resolved relative to the manifest."""
    base = os.path.dirname(os.path.abspath(path))
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(lineno, f"expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            key = key.strip()
            if key not in _MANIFEST_KEYS:
                raise ParseError(lineno, f"unknown manifest key {key!r}")
            out[key] = os.path.join(base, value.strip())
    if not out:
        raise EmptyInput(f"empty manifest {path}")
    return out


def load_anchors(path) -> tuple[EmbeddingMatrix, list[int]]:
    """Anchor file: word2vec-format rows whose token is the category index."""
    rows = _read_vector_lines(path)
    labels = []
    for lineno, token, _ in rows:
        try:
            labels.append(int(token))
        except ValueError:
            raise ParseError(lineno, f"anchor label must be a category index, got {token!r}")
    return EmbeddingMatrix(np.stack([v for _, _, v in rows])), labels


# ---------------------------------------------------------------------------
# Reports


def _fmt_floats(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def _fmt_ints(values) -> str:
    return " ".join(str(int(v)) for v in values)


def write_refinement_report(
    result: RefinementResult,
    path,
    category_names: Optional[Sequence[str]] = None,
    config_echo: Optional[dict] = None,
) -> None:
    lines = ["kind: refinement_result"]
    for key in sorted(config_echo or {}):
        lines.append(f"config.{key}: {config_echo[key]}")
    is_prob = isinstance(result.final_centroids, ProbabilityMatrix)
    centroid_data = result.final_centroids.probs if is_prob else result.final_centroids.data
    lines.append(f"centroid_kind: {'probability' if is_prob else 'embedding'}")
    lines.append(f"converged: {str(result.converged).lower()}")
    lines.append(f"iterations_run: {result.iterations_run}")
    lines.append(f"selected_iter: {result.selected_iter}")
    lines.append(f"objective_per_iter: {_fmt_floats(result.objective_per_iter)}")
    for i, preds in enumerate(result.predictions_per_iter):
        lines.append(f"predictions_iter {i}: {_fmt_ints(preds)}")
    lines.append(f"centroids_shape: {centroid_data.shape[0]} {centroid_data.shape[1]}")
    for i, row in enumerate(centroid_data):
        lines.append(f"centroid {i}: {_fmt_floats(row)}")
    lines.append("predictions:")
    for pos, idx in enumerate(result.final_predictions):
        name = category_names[idx] if category_names else str(int(idx))
        lines.append(f"{pos}\t{int(idx)}\t{name}")
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def read_refinement_report(path) -> RefinementResult:
    fields: dict = {}
    preds_per_iter: dict = {}
    centroid_rows: dict = {}
    final_preds = []
    in_predictions = False
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if in_predictions:
                parts = line.split("\t")
                if len(parts) < 2:
                    raise ParseError(lineno, f"bad prediction line {line!r}")
                final_preds.append(int(parts[1]))
                continue
            if line == "predictions:":
                in_predictions = True
                continue
            if ": " not in line:
                raise ParseError(lineno, f"expected 'key: value', got {line!r}")
            key, value = line.split(": ", 1)
            if key.startswith("predictions_iter "):
                preds_per_iter[int(key.split()[1])] = np.array(
                    [int(x) for x in value.split()], dtype=np.int64
                )
            elif key.startswith("centroid "):
                centroid_rows[int(key.split()[1])] = np.array([float(x) for x in value.split()])
            else:
                fields[key] = value

    if fields.get("kind") != "refinement_result":
        raise ParseError(0, f"not a refinement report: kind={fields.get('kind')!r}")
    iters = int(fields["iterations_run"])
    centroids = np.stack([centroid_rows[i] for i in range(len(centroid_rows))])
    if fields["centroid_kind"] == "probability":
        final_centroids: Union[EmbeddingMatrix, ProbabilityMatrix] = ProbabilityMatrix(centroids)
    else:
        final_centroids = EmbeddingMatrix(centroids)
    return RefinementResult(
        predictions_per_iter=tuple(preds_per_iter[i] for i in range(iters)),
        objective_per_iter=np.array([float(x) for x in fields["objective_per_iter"].split()]),
        selected_iter=int(fields["selected_iter"]),
        final_predictions=np.array(final_preds, dtype=np.int64),
        final_centroids=final_centroids,
        converged=fields["converged"] == "true",
        iterations_run=iters,
    )


def write_evaluation_report(report: EvaluationReport, path) -> None:
    lines = [
        "kind: evaluation_report",
        f"run_count: {report.run_count}",
        f"improved_count: {report.improved_count}",
        f"fraction_improved: {report.fraction_improved!r}",
        f"mean_initial_accuracy: {report.mean_initial_accuracy!r}",
        f"mean_refined_accuracy: {report.mean_refined_accuracy!r}",
        "runs:",
    ]
    for r in report.runs:
        lines.append(
            "\t".join(
                [
                    str(r.run_id),
                    repr(r.initial_accuracy),
                    repr(r.refined_accuracy),
                    str(r.improved).lower(),
                    str(r.duplicate_names).lower(),
                    ";".join(r.names),
                ]
            )
        )
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def read_evaluation_report(path) -> EvaluationReport:
    fields: dict = {}
    runs = []
    in_runs = False
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if in_runs:
                rid, init, refined, improved, dup, names = line.split("\t")
                init_f, refined_f = float(init), float(refined)
                runs.append(
                    SweepRun(
                        run_id=int(rid),
                        names=tuple(names.split(";")),
                        initial_accuracy=init_f,
                        refined_accuracy=refined_f,
                        improved=improved == "true",
                        gain=refined_f - init_f,
                        duplicate_names=dup == "true",
                    )
                )
                continue
            if line == "runs:":
                in_runs = True
                continue
            key, value = line.split(": ", 1)
            fields[key] = value
    if fields.get("kind") != "evaluation_report":
        raise ParseError(0, f"not an evaluation report: kind={fields.get('kind')!r}")
    return EvaluationReport(
        runs=tuple(runs),
        mean_initial_accuracy=float(fields["mean_initial_accuracy"]),
        mean_refined_accuracy=float(fields["mean_refined_accuracy"]),
        improved_count=int(fields["improved_count"]),
        run_count=int(fields["run_count"]),
        fraction_improved=float(fields["fraction_improved"]),
    )


def write_scatter_table(report: EvaluationReport, path) -> None:
    """Flat (run_id, initial_accuracy, gain) TSV for plotting."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("run_id\tinitial_accuracy\tgain\n")
        for run_id, init, gain in report.scatter():
            f.write(f"{run_id}\t{init!r}\t{gain!r}\n")


def write_report(result, path, **kwargs) -> None:
    """Serialize a RefinementResult or EvaluationReport to a report file."""
    if isinstance(result, RefinementResult):
        write_refinement_report(result, path, **kwargs)
    elif isinstance(result, EvaluationReport):
        write_evaluation_report(result, path)
    else:
        raise TypeError(f"cannot serialize {type(result).__name__}")
