"""Operator command-line interface.

Subcommands: train, score, eval, align, lda-fit, synth, serve. Every
command is deterministic given its flags; all randomness is seeded.
Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import struct
import sys
import zlib
from pathlib import Path

from . import bundle as bundle_io
from . import ranking
from .corpus import SynthConfig, generate_synthetic, load_corpus, save_corpus, split_debates
from .embeddings import (
    EmbeddingConfig,
    OrthogonalMap,
    SeedDictionary,
    align_procrustes,
    load_embeddings,
)
from .errors import CheckworthyError, CorruptBundle
from .features import terms_of
from .model import SOURCES
from .pipeline import PipelineConfig, Scorer, evaluate_debates, train_pipeline
from .text_pipeline import tokenize
from .topics import lda_fit

MAP_MAGIC = b"CWMP"
LDA_MAGIC = b"CWLD"


def save_map(omap: OrthogonalMap, path) -> None:
    """Standalone map file: magic, u32 dim, row-major float64 values, crc."""
    payload = struct.pack("<I", omap.dim) + bundle_io._f64_bytes(omap.matrix)
    with open(path, "wb") as fh:
        fh.write(MAP_MAGIC + payload + struct.pack("<I", zlib.crc32(payload)))


def load_map(path) -> OrthogonalMap:
    import numpy as np

    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 or blob[:4] != MAP_MAGIC:
        raise CorruptBundle(f"not an embedding-map file: {path}")
    payload, crc = blob[4:-4], struct.unpack("<I", blob[-4:])[0]
    if zlib.crc32(payload) != crc:
        raise CorruptBundle(f"embedding-map checksum mismatch: {path}")
    (dim,) = struct.unpack("<I", payload[:4])
    matrix = np.frombuffer(payload[4 : 4 + 8 * dim * dim], dtype="<f8").astype(float).reshape(dim, dim)
    return OrthogonalMap(matrix=matrix)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="checkworthy", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model bundle from an annotated corpus")
    p.add_argument("--corpus", required=True, help="JSONL corpus; every debate in it is used for training")
    p.add_argument("--embeddings", required=True, help="English word-vector file (textual format)")
    p.add_argument("--embeddings-ar", default=None, help="Arabic word-vector file")
    p.add_argument("--embeddings-map", default=None, help="orthogonal map file aligning Arabic vectors into the English space")
    p.add_argument("--out", required=True, help="output bundle path")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--topics", type=int, default=30)
    p.add_argument("--lda-iterations", type=int, default=500)

    p = sub.add_parser("score", help="score free text with a trained bundle")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="text file, or - for stdin")
    p.add_argument("--source", default="Any", choices=SOURCES)
    p.add_argument("--sort", default="position", choices=("score", "position"))
    p.add_argument("--format", default="text", choices=("text", "json"))

    p = sub.add_parser("eval", help="evaluate a bundle on held-out debates")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--test-ids", required=True, help="comma-separated debate ids to evaluate on")
    p.add_argument("--source", default="Any", choices=SOURCES)
    p.add_argument("--format", default="text", choices=("text", "json"))

    p = sub.add_parser("align", help="solve the orthogonal alignment between two embedding spaces")
    p.add_argument("--src", required=True, help="source-language vectors (mapped into the target space)")
    p.add_argument("--tgt", required=True, help="target-language vectors")
    p.add_argument("--dict", required=True, dest="dictionary", help="seed dictionary (src<TAB>tgt per line)")
    p.add_argument("--out", required=True, help="output map file")

    p = sub.add_parser("lda-fit", help="fit a standalone topic model on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--top-words", type=int, default=8)

    p = sub.add_parser("synth", help="generate a synthetic annotated corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--debates", type=int, default=7)
    p.add_argument("--sentences", type=int, default=150)
    p.add_argument("--prevalence", type=float, default=0.15)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("serve", help="serve the HTTP API and web UI")
    p.add_argument("--model", required=True)
    p.add_argument("--addr", default="127.0.0.1:8080")
    p.add_argument("--ttl", type=float, default=3600.0)
    p.add_argument("--max-body", type=int, default=100_000)
    p.add_argument("--static-dir", default=None, help="directory with the built web UI")

    return parser


def _cmd_train(args) -> int:
    corpus = load_corpus(args.corpus)
    emb_map = load_map(args.embeddings_map).matrix if args.embeddings_map else None
    en_table = load_embeddings(args.embeddings)
    emb_config = EmbeddingConfig(
        dim=en_table.dim,
        primary_path=args.embeddings,
        secondary_path=args.embeddings_ar,
        map_matrix=emb_map,
    )
    config = PipelineConfig(
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=args.seed,
        topic_count=args.topics,
        lda_iterations=args.lda_iterations,
    )
    artifacts = train_pipeline(corpus, emb_config, config)
    bundle_io.save_bundle(artifacts, args.out)
    print(f"trained on {sum(len(d.sentences) for d in corpus)} sentences from {len(corpus)} debates -> {args.out}")
    return 0


def _read_input(spec: str) -> str:
    if spec == "-":
        return sys.stdin.read()
    return Path(spec).read_text(encoding="utf-8")


def _cmd_score(args) -> int:
    scorer = Scorer(bundle_io.load_bundle(args.model))
    doc = scorer.score_text(_read_input(args.input))
    scores = doc.scores_for(args.source)
    if args.sort == "score":
        order = doc.ranked(args.source).order
    else:
        order = list(range(len(doc.sentences)))
    rows = [(i, scores[i], doc.sentences[i].text) for i in order]
    if args.format == "json":
        payload = {
            "language": doc.language.value,
            "source": args.source,
            "sort": args.sort,
            "sentences": [{"index": i, "score": s, "text": t} for i, s, t in rows],
        }
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print(f"language: {doc.language.value}   source: {args.source}")
        for i, s, t in rows:
            print(f"{i:>5d}  {s:8.4f}  {t}")
    return 0


def _metrics_lines(metrics: ranking.Metrics) -> str:
    d = metrics.to_dict()
    header = "  ".join(f"{k:>8s}" for k in d)
    values = "  ".join(f"{v:8.4f}" for v in d.values())
    return header + "\n" + values


def _cmd_eval(args) -> int:
    scorer = Scorer(bundle_io.load_bundle(args.model))
    corpus = load_corpus(args.corpus)
    test_ids = [part for part in args.test_ids.split(",") if part]
    _, test = split_debates(corpus, test_ids)
    metrics = evaluate_debates(scorer, test, source=args.source)
    if args.format == "json":
        print(json.dumps(metrics.to_dict()))
    else:
        print(f"source: {args.source}   debates: {','.join(d.id for d in test)}")
        print(_metrics_lines(metrics))
    return 0


def _cmd_align(args) -> int:
    src = load_embeddings(args.src)
    tgt = load_embeddings(args.tgt)
    omap = align_procrustes(src, tgt, SeedDictionary.load(args.dictionary))
    save_map(omap, args.out)
    print(f"aligned dim-{omap.dim} spaces -> {args.out}")
    return 0


def _cmd_lda_fit(args) -> int:
    corpus = load_corpus(args.corpus)
    documents = []
    for debate in corpus:
        for sentence in debate.sentences:
            documents.append(terms_of(tokenize(sentence.text, debate.language)))
    model = lda_fit(documents, k=args.k, alpha=args.alpha, beta=args.beta, iterations=args.iterations, seed=args.seed)
    payload = bundle_io._encode_lda(model)
    with open(args.out, "wb") as fh:
        fh.write(LDA_MAGIC + struct.pack("<I", 1) + payload + struct.pack("<I", zlib.crc32(payload)))
    inverse = {idx: term for term, idx in model.vocab.items()}
    for k in range(model.k):
        top = model.topic_word[k].argsort()[::-1][: args.top_words]
        words = " ".join(inverse[int(i)] for i in top if model.topic_word[k, int(i)] > 0)
        print(f"topic {k:>3d}: {words}")
    return 0


def _cmd_synth(args) -> int:
    debates = generate_synthetic(
        SynthConfig(
            n_debates=args.debates,
            sentences_per=args.sentences,
            prevalence=args.prevalence,
            seed=args.seed,
        )
    )
    save_corpus(debates, args.out)
    print(f"wrote {len(debates)} debates x {args.sentences} sentences -> {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.addr.rpartition(":")
    scorer = Scorer(bundle_io.load_bundle(args.model))
    app = create_app(scorer, ttl=args.ttl, max_body_bytes=args.max_body, static_dir=args.static_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


_COMMANDS = {
    "train": _cmd_train,
    "score": _cmd_score,
    "eval": _cmd_eval,
    "align": _cmd_align,
    "lda-fit": _cmd_lda_fit,
    "synth": _cmd_synth,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CheckworthyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
