import json

import pytest

from checkworthy.corpus import (
    ANNOTATION_SOURCES,
    AnnotatedSentence,
    SynthConfig,
    generate_synthetic,
    label_for,
    labels_and_mask,
    load_corpus,
    save_corpus,
    split_debates,
)
from checkworthy.errors import DuplicateIndex, EmptyCorpus, ParseError, UnknownDebateId, UnknownSource
from checkworthy.model import SOURCES
from checkworthy.text_pipeline import Language


def _write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def _record(debate_id="d1", index=0, text="Taxes went up.", labels=None, language="English"):
    return {
        "debate_id": debate_id,
        "language": language,
        "index": index,
        "text": text,
        "labels": labels if labels is not None else {"PolitiFact": 1},
    }


class TestLoadCorpus:
    def test_groups_by_debate(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_record(index=0), _record(index=1, text="More.")])
        (debate,) = load_corpus(path)
        assert debate.id == "d1"
        assert len(debate.sentences) == 2
        assert debate.language is Language.ENGLISH

    def test_partial_labels_and_any(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_record(labels={"PolitiFact": 1})])
        (debate,) = load_corpus(path)
        sentence = debate.sentences[0]
        y, mask = labels_and_mask(sentence)
        assert mask.sum() == 2  # PolitiFact + derived Any
        assert y[SOURCES.index("PolitiFact")] == 1.0
        assert y[-1] == 1.0

    def test_out_of_order_indices_sorted(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_record(index=1, text="second"), _record(index=0, text="first")])
        (debate,) = load_corpus(path)
        assert [s.text for s in debate.sentences] == ["first", "second"]

    def test_duplicate_index(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_record(index=0), _record(index=0)])
        with pytest.raises(DuplicateIndex):
            load_corpus(path)

    def test_unknown_source_name(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_record(labels={"Reuters": 1})])
        with pytest.raises(UnknownSource):
            load_corpus(path)

    def test_any_must_not_be_stored(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_record(labels={"Any": 1})])
        with pytest.raises(UnknownSource):
            load_corpus(path)

    def test_bad_json_reports_line(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"debate_id": "d1"}\nnot json\n', encoding="utf-8")
        with pytest.raises(ParseError):
            load_corpus(path)

    def test_mixed_language_debate_rejected(self, tmp_path):
        path = tmp_path / "c.jsonl"
        _write_jsonl(path, [_record(index=0), _record(index=1, language="Arabic")])
        with pytest.raises(ParseError):
            load_corpus(path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(EmptyCorpus):
            load_corpus(path)

    def test_save_load_round_trip(self, tmp_path):
        debates = generate_synthetic(SynthConfig(n_debates=2, sentences_per=5, prevalence=0.3, seed=1))
        path = tmp_path / "c.jsonl"
        save_corpus(debates, path)
        loaded = load_corpus(path)
        assert [d.id for d in loaded] == [d.id for d in debates]
        for a, b in zip(loaded, debates):
            assert a.language is b.language
            assert [s.text for s in a.sentences] == [s.text for s in b.sentences]
            assert [s.labels for s in a.sentences] == [s.labels for s in b.sentences]

    def test_load_is_idempotent(self, tmp_path):
        debates = generate_synthetic(SynthConfig(n_debates=2, sentences_per=4, prevalence=0.4, seed=2))
        path = tmp_path / "c.jsonl"
        save_corpus(debates, path)
        assert load_corpus(path) == load_corpus(path)


class TestSplitDebates:
    def test_five_two_split(self):
        debates = generate_synthetic(SynthConfig(n_debates=7, sentences_per=3, prevalence=0.3, seed=3))
        train, test = split_debates(debates, ["synth-05", "synth-06"])
        assert len(train) == 5 and len(test) == 2
        assert {d.id for d in train}.isdisjoint({d.id for d in test})

    def test_empty_test_ids(self):
        debates = generate_synthetic(SynthConfig(n_debates=3, sentences_per=3, prevalence=0.3, seed=4))
        train, test = split_debates(debates, [])
        assert len(train) == 3 and test == []

    def test_unknown_id(self):
        debates = generate_synthetic(SynthConfig(n_debates=2, sentences_per=3, prevalence=0.3, seed=5))
        with pytest.raises(UnknownDebateId):
            split_debates(debates, ["nope"])


class TestLabels:
    def test_any_is_or_of_present_labels(self):
        s = AnnotatedSentence(text="x", labels={"CNN": 0, "NPR": 1})
        assert s.any_label() == (1, True)
        assert label_for(s, "Any") == 1
        assert label_for(s, "CNN") == 0

    def test_unlabeled_sentence(self):
        s = AnnotatedSentence(text="x", labels={})
        assert s.any_label() == (0, False)
        y, mask = labels_and_mask(s)
        assert not mask.any()

    def test_union_consistency_with_full_labels(self):
        debates = generate_synthetic(SynthConfig(n_debates=2, sentences_per=50, prevalence=0.4, seed=6))
        for debate in debates:
            for sentence in debate.sentences:
                y, mask = labels_and_mask(sentence)
                assert mask.all()
                assert y[-1] == y[:-1].max()

    def test_unknown_source_query(self):
        with pytest.raises(UnknownSource):
            label_for(AnnotatedSentence(text="x"), "Reuters")


class TestGenerateSynthetic:
    def test_deterministic(self):
        a = generate_synthetic(SynthConfig(n_debates=2, sentences_per=20, prevalence=0.2, seed=7))
        b = generate_synthetic(SynthConfig(n_debates=2, sentences_per=20, prevalence=0.2, seed=7))
        assert a == b

    def test_different_seed_differs(self):
        a = generate_synthetic(SynthConfig(n_debates=1, sentences_per=20, prevalence=0.2, seed=7))
        b = generate_synthetic(SynthConfig(n_debates=1, sentences_per=20, prevalence=0.2, seed=8))
        assert a != b

    def test_positive_count_in_binomial_range(self):
        # 200 sentences at prevalence 0.15: mean 30, sd ~5.05; +/-4 sd
        (debate,) = generate_synthetic(SynthConfig(n_debates=1, sentences_per=200, prevalence=0.15, seed=9))
        positives = sum(s.any_label()[0] for s in debate.sentences)
        assert 10 <= positives <= 50

    def test_marker_rate_strictly_higher_in_positive_class(self):
        debates = generate_synthetic(SynthConfig(n_debates=4, sentences_per=150, prevalence=0.15, seed=10))
        pos_hits = pos_total = neg_hits = neg_total = 0
        for debate in debates:
            for sentence in debate.sentences:
                n_markers = sum(1 for w in sentence.text.lower().split() if w.startswith("zu"))
                if sentence.any_label()[0]:
                    pos_hits += n_markers
                    pos_total += 1
                else:
                    neg_hits += n_markers
                    neg_total += 1
        assert pos_hits / pos_total > neg_hits / neg_total

    def test_sources_disagree_partially(self):
        debates = generate_synthetic(SynthConfig(n_debates=4, sentences_per=150, prevalence=0.2, seed=11))
        per_source = {s: 0 for s in ANNOTATION_SOURCES}
        for debate in debates:
            for sentence in debate.sentences:
                for s, v in sentence.labels.items():
                    per_source[s] += v
        counts = sorted(per_source.values())
        assert counts[0] < counts[-1]  # sensitivities differ

    def test_all_nine_sources_labeled(self):
        (debate,) = generate_synthetic(SynthConfig(n_debates=1, sentences_per=5, prevalence=0.3, seed=12))
        for sentence in debate.sentences:
            assert set(sentence.labels) == set(ANNOTATION_SOURCES)

    def test_prevalence_validation(self):
        with pytest.raises(ValueError):
            SynthConfig(prevalence=1.5)
