"""Encoder backends.

Two backends share one interface:

* ``hash:<dim>`` — a deterministic token-hashing embedder, useful for
  pipeline tests and offline smoke runs; no model download needed.
* anything else — a Hugging Face checkpoint id or path, loaded lazily
  (requires the ``hf`` extra: torch + transformers).

Both honor the sequence-length budget; in pair-scoring mode the category
tokens are kept intact and only the document is truncated.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

import numpy as np


class HashEncoder:
    """Deterministic bag-of-hashed-tokens embedder."""

    def __init__(self, dim: int, max_seq_len: int = 128):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.max_seq_len = max_seq_len

    def _token_vector(self, token: str) -> np.ndarray:
        digest = hashlib.sha256(token.lower().encode("utf-8")).digest()
        seed = int.from_bytes(digest[:8], "little")
        return np.random.default_rng(seed).standard_normal(self.dim)

    def _embed_tokens(self, tokens: Sequence[str]) -> np.ndarray:
        if not tokens:
            return np.zeros(self.dim)
        return np.mean([self._token_vector(t) for t in tokens], axis=0)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack(
            [self._embed_tokens(t.split()[: self.max_seq_len]) for t in texts]
        )

    def score_pairs(self, category: str, texts: Sequence[str]) -> np.ndarray:
        cat_tokens = category.split()
        budget = max(self.max_seq_len - len(cat_tokens), 0)
        cat_vec = self._embed_tokens(cat_tokens)
        out = np.empty(len(texts))
        for i, t in enumerate(texts):
            out[i] = float(np.dot(cat_vec, self._embed_tokens(t.split()[:budget])))
        return out


class HFEncoder:
    """Hugging Face checkpoint backend.

    Dual embeddings are the mean of the final-layer hidden states; pair
    scores come from a single-logit sequence-classification head over the
    "category [SEP] document" pair.
    """

    def __init__(self, model_id: str, max_seq_len: int = 128):
        import torch  # noqa: F401  (fail early if the extra is missing)
        from transformers import AutoModel, AutoTokenizer

        self.model_id = model_id
        self.max_seq_len = max_seq_len
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModel.from_pretrained(model_id)
        self.model.eval()
        self._scorer = None

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        import torch

        enc = self.tokenizer(
            list(texts), padding=True, truncation=True,
            max_length=self.max_seq_len, return_tensors="pt",
        )
        with torch.no_grad():
            hidden = self.model(**enc).last_hidden_state
        mask = enc["attention_mask"].unsqueeze(-1).float()
        pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1)
        return pooled.numpy().astype(np.float64)

    def score_pairs(self, category: str, texts: Sequence[str]) -> np.ndarray:
        import torch
        from transformers import AutoModelForSequenceClassification

        if self._scorer is None:
            self._scorer = AutoModelForSequenceClassification.from_pretrained(
                self.model_id, num_labels=1
            )
            self._scorer.eval()
        enc = self.tokenizer(
            [category] * len(texts), list(texts),
            padding=True, truncation="only_second",
            max_length=self.max_seq_len, return_tensors="pt",
        )
        with torch.no_grad():
            logits = self._scorer(**enc).logits
        return logits.squeeze(-1).numpy().astype(np.float64)


def resolve_encoder(model_id: str, max_seq_len: int = 128):
    if model_id.startswith("hash:"):
        return HashEncoder(int(model_id.split(":", 1)[1]), max_seq_len)
    return HFEncoder(model_id, max_seq_len)
