"""Text embeddings by latent semantic analysis.

TF-IDF document vectors factored with a truncated SVD: small matrices
take an exact dense decomposition, large ones a seeded randomized
subspace iteration. New text folds into the fitted space by projecting
its TF-IDF vector through the right singular vectors (q @ V, without
inverse-sigma scaling), which keeps fold-in vectors on the same scale
as the stored document embeddings U * sigma.
"""

from __future__ import annotations

import math
import re
import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

# Above this many cells the exact dense SVD gives way to the randomized path.
_DENSE_CELL_LIMIT = 2_000_000

_RANDOMIZED_OVERSAMPLES = 10
_RANDOMIZED_POWER_ITERS = 2

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased tokens split on non-alphanumeric boundaries.

    No stemming, no stop-word removal; single characters count.
    """
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Vocabulary:
    """Token-to-index mapping with per-token document frequencies."""

    index: dict[str, int]
    document_frequency: np.ndarray
    corpus_size: int
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.index)

    def idf(self) -> np.ndarray:
        """ln(N / df) per token; tokens present in every document get 0."""
        return np.log(self.corpus_size / self.document_frequency)


def build_tfidf(corpus: list[list[str]]) -> tuple[sp.csr_matrix, Vocabulary]:
    """Sparse document-term matrix with raw-count tf and ln(N/df) idf.

    Cells are tf * idf, so tokens appearing in every document vanish
    from the matrix. Raises ValueError for an empty or all-empty corpus.
    """
    if not corpus:
        raise ValueError("corpus is empty")
    df: Counter[str] = Counter()
    for tokens in corpus:
        df.update(set(tokens))
    if not df:
        raise ValueError("corpus contains no tokens")
    token_list = tuple(sorted(df))
    index = {token: i for i, token in enumerate(token_list)}
    df_arr = np.array([df[token] for token in token_list], dtype=float)
    vocabulary = Vocabulary(
        index=index,
        document_frequency=df_arr,
        corpus_size=len(corpus),
        tokens=token_list,
    )
    idf = vocabulary.idf()

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for row, tokens in enumerate(corpus):
        for token, count in Counter(tokens).items():
            col = index[token]
            rows.append(row)
            cols.append(col)
            vals.append(count * idf[col])
    matrix = sp.csr_matrix((vals, (rows, cols)), shape=(len(corpus), len(token_list)))
    matrix.eliminate_zeros()
    return matrix, vocabulary


@dataclass
class LsaModel:
    """Fitted truncated-SVD space over a TF-IDF corpus.

    ``doc_embeddings`` holds U * sigma rows for the training documents;
    ``projection`` is the n_terms x d matrix of right singular vectors
    used for fold-in. ``vocabulary`` and ``idf`` are needed to embed raw
    text and may be absent for models fitted on bare matrices.
    """

    dimension: int
    projection: np.ndarray
    doc_embeddings: np.ndarray
    singular_values: np.ndarray
    idf: np.ndarray | None = None
    vocabulary: Vocabulary | None = None


def _randomized_svd(
    matrix, d: int, seed: int, oversamples: int = _RANDOMIZED_OVERSAMPLES,
    power_iters: int = _RANDOMIZED_POWER_ITERS,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Halko-style randomized range finder with subspace power iteration.

    Deterministic for a fixed seed. Re-orthonormalizes between power
    iterations to keep the sample matrix well conditioned.
    """
    rng = np.random.default_rng(seed)
    n_rows, n_cols = matrix.shape
    k = min(d + oversamples, n_rows, n_cols)
    omega = rng.standard_normal((n_cols, k))
    q, _ = np.linalg.qr(matrix @ omega)
    for _ in range(power_iters):
        z, _ = np.linalg.qr(matrix.T @ q)
        q, _ = np.linalg.qr(matrix @ z)
    b = (matrix.T @ q).T
    ub, s, vt = np.linalg.svd(b, full_matrices=False)
    return (q @ ub)[:, :d], s[:d], vt[:d]


def fit_lsa(
    matrix,
    d: int = 512,
    seed: int = 0,
    vocabulary: Vocabulary | None = None,
    method: str = "auto",
) -> LsaModel:
    """Rank-d truncated SVD of a (sparse) document-term matrix.

    ``method`` picks the decomposition: "dense" (exact), "randomized",
    or "auto" (dense below a size cutoff). When d exceeds the number of
    available singular values, the extra dimensions are zero-padded so
    embeddings keep a fixed width.
    """
    if d < 1:
        raise ValueError("dimension d must be at least 1")
    if method not in ("auto", "dense", "randomized"):
        raise ValueError(f"unknown SVD method {method!r}")
    n_rows, n_cols = matrix.shape
    if method == "auto":
        method = "dense" if n_rows * n_cols <= _DENSE_CELL_LIMIT else "randomized"

    if method == "dense":
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
        u, s, vt = np.linalg.svd(dense, full_matrices=False)
        u, s, vt = u[:, :d], s[:d], vt[:d]
    else:
        u, s, vt = _randomized_svd(matrix, d, seed)

    rank = len(s)
    if rank < d:
        u = np.hstack([u, np.zeros((n_rows, d - rank))])
        s = np.concatenate([s, np.zeros(d - rank)])
        vt = np.vstack([vt, np.zeros((d - rank, n_cols))])

    return LsaModel(
        dimension=d,
        projection=vt.T.copy(),
        doc_embeddings=u * s,
        singular_values=s,
        idf=vocabulary.idf() if vocabulary is not None else None,
        vocabulary=vocabulary,
    )


def embed_text(model: LsaModel, text: str) -> np.ndarray:
    """Fold text into the LSA space: TF-IDF with the training idf,
    projected through the right singular vectors.

    Unseen tokens are dropped; text with no known tokens embeds to the
    zero vector.
    """
    if model.vocabulary is None or model.idf is None:
        raise ValueError("model was fitted without a vocabulary; cannot embed text")
    vector = np.zeros(model.dimension)
    index = model.vocabulary.index
    for token, count in Counter(tokenize(text)).items():
        col = index.get(token)
        if col is not None:
            weight = count * model.idf[col]
            if weight != 0.0:
                vector += weight * model.projection[col]
    return vector


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1]; zero-norm inputs score 0."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = math.sqrt(float(u @ u))
    nv = math.sqrt(float(v @ v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(float(u @ v) / (nu * nv), -1.0, 1.0))


# Binary embedding cache: a fixed header followed by row-major float32
# little-endian vectors, with document ids in a text sidecar.
EMBEDDING_MAGIC = b"LSAE"
EMBEDDING_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def save_embeddings(path, ids: list[int], vectors: np.ndarray) -> None:
    """Write vectors to ``path`` and their ids to ``<path>.ids``."""
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2:
        raise ValueError("vectors must be a 2-d array")
    if len(ids) != vectors.shape[0]:
        raise ValueError("ids and vectors disagree on the row count")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(EMBEDDING_MAGIC, EMBEDDING_VERSION, vectors.shape[1],
                              vectors.shape[0]))
        fh.write(vectors.tobytes())
    with open(str(path) + ".ids", "w", encoding="utf-8") as fh:
        fh.writelines(f"{i}\n" for i in ids)


def load_embeddings(path) -> tuple[list[int], np.ndarray]:
    """Read an embedding cache written by :func:`save_embeddings`."""
    path = Path(path)
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError("embedding cache truncated")
        magic, version, d, count = _HEADER.unpack(header)
        if magic != EMBEDDING_MAGIC:
            raise ValueError("not an embedding cache (bad magic)")
        if version != EMBEDDING_VERSION:
            raise ValueError(f"unsupported embedding cache version {version}")
        payload = fh.read()
    expected = count * d * 4
    if len(payload) != expected:
        raise ValueError(f"embedding cache payload is {len(payload)} bytes, expected {expected}")
    vectors = np.frombuffer(payload, dtype="<f4").reshape(count, d)
    with open(str(path) + ".ids", "r", encoding="utf-8") as fh:
        ids = [int(line.strip()) for line in fh if line.strip()]
    if len(ids) != count:
        raise ValueError("embedding cache sidecar id count mismatch")
    return ids, vectors.copy()
