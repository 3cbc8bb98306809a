"""Model-bundle persistence.

Single-file binary artifact: magic "CWRK", a little-endian u32 format
version, and a section table (name, offset, length, CRC32) followed by the
section payloads. All integers are little-endian; all tensors are raw
row-major little-endian values (float64 for weights, int64 for counts), so
a save/load/save round-trip is byte-identical.
"""

from __future__ import annotations

import json
import os
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingConfig
from .errors import CorruptBundle, VersionMismatch
from .features import CorpusStats, FeatureLayout, Scaler
from .model import MlpModel
from .topics import LdaModel

MAGIC = b"CWRK"
FORMAT_VERSION = 1

_SECTION_ORDER = (b"LAYOUT", b"SCALER", b"WEIGHTS", b"SOURCES", b"CSTATS", b"LDA", b"EMBCFG")


@dataclass
class ModelArtifacts:
    """Everything a scorer needs, as persisted in one bundle."""

    model: MlpModel
    stats: CorpusStats
    lda: LdaModel
    emb_config: EmbeddingConfig
    base_dir: str | None = None  # directory the bundle was loaded from


def _canon_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def _f64_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def _i64_bytes(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<i8").tobytes()


class _Reader:
    def __init__(self, payload: bytes, name: str):
        self.buf = payload
        self.pos = 0
        self.name = name

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise CorruptBundle(f"section {self.name}: truncated payload")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def f64(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<f8").astype(np.float64)

    def i64(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<i8").astype(np.int64)


def _encode_weights(model: MlpModel) -> bytes:
    layers = ((model.w1, model.b1), (model.w2, model.b2), (model.w3, model.b3))
    parts = [struct.pack("<I", len(layers))]
    for w, b in layers:
        parts.append(struct.pack("<QQ", w.shape[0], w.shape[1]))
        parts.append(_f64_bytes(w))
        parts.append(struct.pack("<Q", b.shape[0]))
        parts.append(_f64_bytes(b))
    return b"".join(parts)


def _encode_lda(lda: LdaModel) -> bytes:
    vocab_json = _canon_json(dict(lda.vocab))
    parts = [
        struct.pack("<IddQ", lda.k, lda.alpha, lda.beta, len(vocab_json)),
        vocab_json,
        _i64_bytes(lda.topic_word),
        _i64_bytes(lda.topic_totals),
    ]
    return b"".join(parts)


def _encode_embcfg(cfg: EmbeddingConfig) -> bytes:
    meta = {
        "dim": cfg.dim,
        "primary_path": cfg.primary_path,
        "secondary_path": cfg.secondary_path,
        "has_map": cfg.map_matrix is not None,
    }
    meta_json = _canon_json(meta)
    parts = [struct.pack("<Q", len(meta_json)), meta_json]
    if cfg.map_matrix is not None:
        parts.append(struct.pack("<I", cfg.map_matrix.shape[0]))
        parts.append(_f64_bytes(cfg.map_matrix))
    return b"".join(parts)


def save_bundle(artifacts: ModelArtifacts, path: str | os.PathLike) -> None:
    model = artifacts.model
    scaler = model.scaler
    if scaler is None:
        raise CorruptBundle("cannot persist a model without a fitted scaler")
    sections = {
        b"LAYOUT": _canon_json(model.layout.to_dict()),
        b"SCALER": struct.pack("<Q", scaler.mean.shape[0]) + _f64_bytes(scaler.mean) + _f64_bytes(scaler.std),
        b"WEIGHTS": _encode_weights(model),
        b"SOURCES": _canon_json(list(model.sources)),
        b"CSTATS": _canon_json(
            {
                "doc_count": artifacts.stats.doc_count,
                "bucket_count": artifacts.stats.bucket_count,
                "df": dict(artifacts.stats.df),
            }
        ),
        b"LDA": _encode_lda(artifacts.lda),
        b"EMBCFG": _encode_embcfg(artifacts.emb_config),
    }
    header_size = 4 + 4 + 4
    table_entry = struct.calcsize("<8sQQI")
    offset = header_size + table_entry * len(_SECTION_ORDER)
    table = []
    payloads = []
    for name in _SECTION_ORDER:
        payload = sections[name]
        table.append(struct.pack("<8sQQI", name.ljust(8, b"\0"), offset, len(payload), zlib.crc32(payload)))
        payloads.append(payload)
        offset += len(payload)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(_SECTION_ORDER)))
        fh.write(b"".join(table))
        fh.write(b"".join(payloads))


def _read_sections(blob: bytes) -> dict[bytes, bytes]:
    if len(blob) < 12 or blob[:4] != MAGIC:
        raise CorruptBundle("not a model bundle (bad magic)")
    version, n_sections = struct.unpack("<II", blob[4:12])
    if version > FORMAT_VERSION:
        raise VersionMismatch(f"bundle format v{version} is newer than supported v{FORMAT_VERSION}")
    table_entry = struct.calcsize("<8sQQI")
    sections = {}
    for i in range(n_sections):
        start = 12 + i * table_entry
        if start + table_entry > len(blob):
            raise CorruptBundle("truncated section table")
        raw_name, offset, length, crc = struct.unpack("<8sQQI", blob[start : start + table_entry])
        name = raw_name.rstrip(b"\0")
        if offset + length > len(blob):
            raise CorruptBundle(f"section {name.decode()}: truncated payload")
        payload = blob[offset : offset + length]
        if zlib.crc32(payload) != crc:
            raise CorruptBundle(f"section {name.decode()}: checksum mismatch")
        sections[name] = payload
    return sections


def load_bundle(path: str | os.PathLike) -> ModelArtifacts:
    with open(path, "rb") as fh:
        blob = fh.read()
    sections = _read_sections(blob)
    for name in _SECTION_ORDER:
        if name not in sections:
            raise CorruptBundle(f"missing section {name.decode()}")

    layout = FeatureLayout.from_dict(json.loads(sections[b"LAYOUT"]))

    r = _Reader(sections[b"SCALER"], "SCALER")
    (dim,) = r.unpack("<Q")
    scaler = Scaler(mean=r.f64(dim), std=r.f64(dim))

    r = _Reader(sections[b"WEIGHTS"], "WEIGHTS")
    (n_layers,) = r.unpack("<I")
    if n_layers != 3:
        raise CorruptBundle(f"expected 3 layers, found {n_layers}")
    mats, biases = [], []
    for _ in range(n_layers):
        rows, cols = r.unpack("<QQ")
        mats.append(r.f64(rows * cols).reshape(rows, cols))
        (blen,) = r.unpack("<Q")
        biases.append(r.f64(blen))

    sources = tuple(json.loads(sections[b"SOURCES"]))

    cstats = json.loads(sections[b"CSTATS"])
    stats = CorpusStats(
        doc_count=int(cstats["doc_count"]),
        df={k: int(v) for k, v in cstats["df"].items()},
        bucket_count=int(cstats["bucket_count"]),
    )

    r = _Reader(sections[b"LDA"], "LDA")
    k, alpha, beta, vlen = r.unpack("<IddQ")
    vocab = {term: int(idx) for term, idx in json.loads(r.take(vlen)).items()}
    topic_word = r.i64(k * len(vocab)).reshape(k, len(vocab))
    topic_totals = r.i64(k)
    lda = LdaModel(k=k, alpha=alpha, beta=beta, vocab=vocab, topic_word=topic_word, topic_totals=topic_totals)

    r = _Reader(sections[b"EMBCFG"], "EMBCFG")
    (mlen,) = r.unpack("<Q")
    meta = json.loads(r.take(mlen))
    map_matrix = None
    if meta["has_map"]:
        (mdim,) = r.unpack("<I")
        map_matrix = r.f64(mdim * mdim).reshape(mdim, mdim)
    emb_config = EmbeddingConfig(
        dim=int(meta["dim"]),
        primary_path=meta["primary_path"],
        secondary_path=meta["secondary_path"],
        map_matrix=map_matrix,
    )

    model = MlpModel(
        w1=mats[0], b1=biases[0], w2=mats[1], b2=biases[1], w3=mats[2], b3=biases[2],
        layout=layout, scaler=scaler, sources=sources,
    )
    base_dir = os.path.dirname(os.path.abspath(path))
    return ModelArtifacts(model=model, stats=stats, lda=lda, emb_config=emb_config, base_dir=base_dir)
