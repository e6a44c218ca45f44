import numpy as np
import pytest

from conftest import make_sample
from ctlab.augment import (
    AugmentationBatch,
    CandidateComment,
    ingest_paraphrases,
    load_external_texts,
    load_paraphrase_pairs,
    merge_accepted,
    rank_candidates,
)
from ctlab.corpus import Corpus, LabelVector, Sample
from ctlab.errors import ValidationError
from ctlab.preprocess import default_config


@pytest.fixture
def base_corpus():
    return Corpus(
        [
            make_sample(0, (1, 0, 0, 0), text="ভিন্ন ধর্মের মানুষ"),
            make_sample(1, (0, 1, 0, 0), text="অন্য জাতির লোক"),
            make_sample(2, (0, 0, 0, 0), text="সুন্দর সকাল"),
        ]
    )


class TestCandidateComment:
    def _cand(self):
        return CandidateComment(
            id="ext-0", text="t", source="ext", model_score=(0.9, 0.1, 0.1, 0.1)
        )

    def test_legal_transitions(self):
        c = self._cand()
        c.transition("conflict")
        c.transition("accepted")
        assert c.status == "accepted"

    def test_terminal_states_locked(self):
        c = self._cand()
        c.transition("rejected")
        with pytest.raises(ValidationError, match="rejected -> accepted"):
            c.transition("accepted")

    def test_pending_cannot_skip_to_pending(self):
        c = self._cand()
        with pytest.raises(ValidationError):
            c.transition("pending")


class TestIngestParaphrases:
    def test_labels_inherited(self, base_corpus):
        batch = ingest_paraphrases(base_corpus, [("s00000", "ভিন্ন ধর্মের লোকজন")])
        assert len(batch) == 1
        s = batch.samples[0]
        assert s.labels == base_corpus.get("s00000").labels
        assert s.provenance == "paraphrase"
        assert s.id == "s00000-para-1"

    def test_unknown_source_rejected(self, base_corpus):
        with pytest.raises(ValidationError, match="nope"):
            ingest_paraphrases(base_corpus, [("nope", "text")])

    def test_exact_duplicate_dropped(self, base_corpus):
        batch = ingest_paraphrases(
            base_corpus, [("s00000", "সুন্দর সকাল"), ("s00000", "সুন্দর সকাল")]
        )
        assert len(batch) == 0

    def test_normalized_duplicate_dropped(self, base_corpus):
        cfg = default_config()
        batch = ingest_paraphrases(
            base_corpus, [("s00002", "সুন্দর সকাল!!!")], preprocess_config=cfg
        )
        assert len(batch) == 0

    def test_empty_paraphrase_warns_and_skips(self, base_corpus):
        with pytest.warns(UserWarning, match="s00001"):
            batch = ingest_paraphrases(base_corpus, [("s00001", "   ")])
        assert len(batch) == 0

    def test_added_counts(self, base_corpus):
        batch = ingest_paraphrases(
            base_corpus,
            [("s00000", "নতুন এক"), ("s00000", "নতুন দুই"), ("s00001", "নতুন তিন")],
        )
        assert batch.added_counts == {
            "religio": 2, "ethno": 1, "nondenominational": 0, "noncommunal": 0
        }


class TestRankCandidates:
    def test_filter_and_order(self):
        texts = ["low", "high", "mid"]
        probs = np.array(
            [[0.1, 0.2, 0.1, 0.1], [0.9, 0.1, 0.1, 0.1], [0.1, 0.6, 0.1, 0.1]]
        )
        cands = rank_candidates(texts, probs, threshold=0.5)
        assert [c.text for c in cands] == ["high", "mid"]
        assert cands[0].model_score == (0.9, 0.1, 0.1, 0.1)

    def test_stable_order_for_ties(self):
        texts = ["a", "b", "c"]
        probs = np.full((3, 4), 0.7)
        cands = rank_candidates(texts, probs, threshold=0.5)
        assert [c.text for c in cands] == ["a", "b", "c"]

    def test_nothing_clears_threshold(self):
        assert rank_candidates(["x"], np.full((1, 4), 0.2), threshold=0.5) == []


class TestMerge:
    def test_counts_rise_by_batch(self, base_corpus):
        batch = ingest_paraphrases(base_corpus, [("s00000", "আরেকটি বাক্য")])
        merged = merge_accepted(base_corpus, batch)
        assert merged.size == base_corpus.size + 1
        for name, added in batch.added_counts.items():
            assert merged.counts[name] == base_corpus.counts[name] + added

    def test_id_collision_rejected(self, base_corpus):
        dup = Sample(
            id="s00000", text="t", labels=LabelVector(), provenance="paraphrase"
        )
        with pytest.raises(ValidationError, match="collide"):
            merge_accepted(base_corpus, AugmentationBatch(samples=[dup]))

    def test_original_provenance_rejected_in_batch(self):
        s = make_sample(9, (0, 0, 0, 0))  # provenance defaults to 'original'
        with pytest.raises(ValidationError, match="original"):
            AugmentationBatch(samples=[s])


class TestLoaders:
    def test_paraphrase_csv(self, tmp_path):
        p = tmp_path / "pairs.csv"
        p.write_text("source_id,paraphrased_text\ns00000,নতুন লেখা\n", encoding="utf-8")
        assert load_paraphrase_pairs(p) == [("s00000", "নতুন লেখা")]

    def test_paraphrase_csv_bad_header(self, tmp_path):
        p = tmp_path / "pairs.csv"
        p.write_text("id,text\na,b\n")
        with pytest.raises(ValidationError, match="header"):
            load_paraphrase_pairs(p)

    def test_external_plain(self, tmp_path):
        p = tmp_path / "ext.txt"
        p.write_text("one\n\ntwo\n")
        assert load_external_texts(p) == ["one", "two"]

    def test_external_jsonl(self, tmp_path):
        p = tmp_path / "ext.jsonl"
        p.write_text('{"text": "one"}\n{"text": "two"}\n')
        assert load_external_texts(p) == ["one", "two"]
