"""Export jobs: run an encoder over text files and write labelrefine's
vector / score-matrix formats."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .encoders import resolve_encoder

MODES = ("dual-embeddings", "single-scores")


@dataclass(frozen=True)
class ExportJob:
    model: str
    input_path: str
    output_path: str
    mode: str = "dual-embeddings"
    categories_path: Optional[str] = None  # required for single-scores
    max_seq_len: int = 128
    batch_size: int = 32

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "single-scores" and not self.categories_path:
            raise ValueError("single-scores mode needs a categories file")
        if self.max_seq_len < 1 or self.batch_size < 1:
            raise ValueError("max_seq_len and batch_size must be positive")


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as f:
        lines = [line.rstrip("\n") for line in f]
    lines = [l for l in lines if l.strip()]
    if not lines:
        raise ValueError(f"no text lines in {path}")
    return lines


def export(job: ExportJob) -> None:
    """Run the job and write its output file.

    dual-embeddings: one vector per input line, word2vec text format with
    a "count dim" header.  single-scores: an n_docs x k TSV with a
    "#polarity=higher" header.
    """
    texts = _read_lines(job.input_path)  # fail before any model work
    encoder = resolve_encoder(job.model, job.max_seq_len)

    if job.mode == "dual-embeddings":
        rows = []
        for start in range(0, len(texts), job.batch_size):
            rows.append(encoder.embed(texts[start:start + job.batch_size]))
        matrix = np.vstack(rows)
        with open(job.output_path, "w", encoding="utf-8") as f:
            f.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
            for i, row in enumerate(matrix):
                f.write(f"doc{i} " + " ".join(repr(float(x)) for x in row) + "\n")
        return

    categories = _read_lines(job.categories_path)
    columns = []
    for category in categories:
        scores = []
        for start in range(0, len(texts), job.batch_size):
            scores.append(encoder.score_pairs(category, texts[start:start + job.batch_size]))
        columns.append(np.concatenate(scores))
    matrix = np.stack(columns, axis=1)
    with open(job.output_path, "w", encoding="utf-8") as f:
        f.write("#polarity=higher\n")
        for row in matrix:
            f.write("\t".join(repr(float(x)) for x in row) + "\n")
