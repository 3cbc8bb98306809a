"""Word-vector storage, sentence averaging, and supervised cross-lingual
alignment.

Alignment solves the orthogonal Procrustes problem: given paired source
vectors X and target vectors Z (rows), the orthogonal W minimizing
||XW - Z||_F is U V^T where U S V^T is the SVD of X^T Z. Arabic vectors are
mapped into the English space so the trained model's embedding segment
stays fixed.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimMismatch, EmptyDictionary, ParseError
from .text_pipeline import Language, Token, stem_of

logger = logging.getLogger(__name__)

ORTHOGONALITY_TOL = 1e-8


@dataclass
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]
    language: Language | None = None


@dataclass(frozen=True)
class SeedDictionary:
    pairs: tuple[tuple[str, str], ...]

    @classmethod
    def load(cls, path: str | os.PathLike) -> "SeedDictionary":
        pairs = []
        with open(path, encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ParseError("expected 'src_word<TAB>tgt_word'", line=ln)
                pairs.append((parts[0], parts[1]))
        return cls(pairs=tuple(pairs))


@dataclass(frozen=True)
class OrthogonalMap:
    matrix: np.ndarray

    def __post_init__(self):
        w = self.matrix
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DimMismatch(f"orthogonal map must be square, got {w.shape}")
        gram_err = np.max(np.abs(w.T @ w - np.eye(w.shape[0])))
        if gram_err > ORTHOGONALITY_TOL:
            raise DimMismatch(f"map is not orthogonal: max |W^T W - I| = {gram_err:g}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def load_embeddings(path: str | os.PathLike, language: Language | None = None) -> EmbeddingTable:
    """Textual word-vector format: optional `count dim` header, then one
    `word v1 ... vE` line per word. Duplicate words keep the first entry."""
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        first = True
        for ln, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split()
            if first:
                first = False
                if len(parts) == 2:
                    try:
                        _count, dim = int(parts[0]), int(parts[1])
                        continue
                    except ValueError:
                        pass  # not a header; fall through and parse as a vector line
            if len(parts) < 2:
                raise ParseError(f"malformed vector line: {line!r}", line=ln)
            word = parts[0]
            try:
                vec = np.array([float(v) for v in parts[1:]], dtype=np.float64)
            except ValueError as exc:
                raise ParseError(f"bad float in vector for {word!r}", line=ln) from exc
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise DimMismatch(f"line {ln}: expected {dim} values, got {vec.shape[0]}")
            if word not in vectors:
                vectors[word] = vec
    if dim is None:
        raise ParseError(f"no vectors found in {path}")
    return EmbeddingTable(dim=dim, vectors=vectors, language=language)


def save_embeddings(table: EmbeddingTable, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.vectors)} {table.dim}\n")
        for word, vec in table.vectors.items():
            fh.write(word + " " + " ".join(repr(v) for v in vec.tolist()) + "\n")


def sentence_embedding(tokens: Sequence[Token], table: EmbeddingTable) -> np.ndarray:
    """Mean vector over in-vocabulary lowercased tokens; segmented Arabic
    tokens try the stem first, then the full surface. All-OOV input yields
    the zero vector."""
    acc = np.zeros(table.dim)
    hits = 0
    for tok in tokens:
        vec = table.vectors.get(stem_of(tok).lower())
        if vec is None:
            vec = table.vectors.get(tok.surface.lower())
        if vec is not None:
            acc += vec
            hits += 1
    if hits:
        acc /= hits
    return acc


def align_procrustes(src: EmbeddingTable, tgt: EmbeddingTable, seed_dict: SeedDictionary) -> OrthogonalMap:
    """Closed-form orthogonal alignment from src to tgt over the usable
    dictionary pairs (pairs missing from either vocabulary are dropped)."""
    if src.dim != tgt.dim:
        raise DimMismatch(f"source dim {src.dim} != target dim {tgt.dim}")
    rows_x, rows_z = [], []
    for s_word, t_word in seed_dict.pairs:
        sv = src.vectors.get(s_word)
        tv = tgt.vectors.get(t_word)
        if sv is not None and tv is not None:
            rows_x.append(sv)
            rows_z.append(tv)
    dropped = len(seed_dict.pairs) - len(rows_x)
    if dropped:
        logger.info("alignment: dropped %d/%d pairs missing from a vocabulary", dropped, len(seed_dict.pairs))
    if not rows_x:
        raise EmptyDictionary("no usable seed-dictionary pairs")
    if len(rows_x) < src.dim:
        logger.warning("alignment: only %d usable pairs for dim %d; solution may be weak", len(rows_x), src.dim)
    x = np.array(rows_x)
    z = np.array(rows_z)
    u, _, vt = np.linalg.svd(x.T @ z)
    return OrthogonalMap(matrix=u @ vt)


def apply_map(table: EmbeddingTable, omap: OrthogonalMap) -> EmbeddingTable:
    """Map every vector v to vW; vocabulary and language are preserved."""
    if table.dim != omap.dim:
        raise DimMismatch(f"table dim {table.dim} != map dim {omap.dim}")
    mapped = {word: vec @ omap.matrix for word, vec in table.vectors.items()}
    return EmbeddingTable(dim=table.dim, vectors=mapped, language=table.language)


@dataclass(frozen=True)
class EmbeddingConfig:
    """Reference to the embedding resources a model bundle depends on.

    Paths are stored as written; relative paths resolve against the bundle's
    directory at load time. The Arabic table, when configured, is mapped
    into the English space via `map_matrix` before use.
    """

    dim: int
    primary_path: str
    secondary_path: str | None = None
    map_matrix: np.ndarray | None = field(default=None)

    def resolve(self, base_dir: str | os.PathLike | None = None) -> dict[Language, EmbeddingTable]:
        def _resolve(p: str) -> str:
            if base_dir is not None and not os.path.isabs(p):
                return os.path.join(base_dir, p)
            return p

        tables = {Language.ENGLISH: load_embeddings(_resolve(self.primary_path), Language.ENGLISH)}
        if self.secondary_path:
            table = load_embeddings(_resolve(self.secondary_path), Language.ARABIC)
            if self.map_matrix is not None:
                table = apply_map(table, OrthogonalMap(matrix=self.map_matrix))
            tables[Language.ARABIC] = table
        for lang, table in tables.items():
            if table.dim != self.dim:
                raise DimMismatch(f"{lang.value} table dim {table.dim} != configured dim {self.dim}")
        return tables
