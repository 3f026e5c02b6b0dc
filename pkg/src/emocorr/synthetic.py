"""Synthetic corpora with a plantable label-confusion signal.

Each emotion class owns one signature word whose characters are unique to it,
while filler words share their characters and split into two synonym groups.
All three feature views can therefore separate the classes perfectly, which
makes tiny models trainable in seconds. A swap pair with a swap rate plants
confusion: that fraction of each swapped class's records keeps its text but
receives the partner's public votes, so a well-trained classifier must
"misjudge" those records and the confusion shows up in the mined laws.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .corpus import RawRecord, SourceKind
from .emotions import NUM_EMOTIONS

SIGNATURE_WORDS = ("aa", "bb", "cc", "dd", "ee", "ff")
FILLER_WORDS = ("xy", "yz", "zw", "wx", "qx", "qz")
FILLER_GROUPS = {"fill1": ("xy", "yz", "zw"), "fill2": ("wx", "qx", "qz")}
_MAX_WORDS = 4
# two characters per word, so the character view needs twice the word count
PAD_LENGTH = 2 * _MAX_WORDS

_MAJORITY_VOTES = 260
_MINORITY_VOTES = 50


def _votes_for(label: int) -> tuple:
    votes = [_MINORITY_VOTES] * NUM_EMOTIONS
    votes[label] = _MAJORITY_VOTES
    return tuple(votes)


@dataclass(frozen=True)
class SyntheticCorpus:
    records: tuple
    pad_length: int = PAD_LENGTH


def make_corpus(seed: int, per_class: int = 120,
                swap_pair: Optional[tuple] = None,
                swap_rate: float = 0.0,
                source_kind: SourceKind = SourceKind.COMMENT) -> SyntheticCorpus:
    """Generate a labeled corpus of ``per_class`` records per emotion.

    Texts are 3 or 4 two-character words: one class signature at a random
    position plus shared fillers, so even the character view fits PAD_LENGTH
    untruncated. With a swap pair, ``swap_rate`` of each swapped class's
    records carries the partner's votes instead of its own.
    """
    if swap_pair is not None and not 0.0 <= swap_rate <= 1.0:
        raise ValueError("swap_rate must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    records = []
    counter = 0
    for text_class in range(NUM_EMOTIONS):
        for _ in range(per_class):
            n_words = int(rng.integers(3, _MAX_WORDS + 1))
            words = [str(w) for w in rng.choice(FILLER_WORDS, size=n_words - 1)]
            words.insert(int(rng.integers(0, n_words)), SIGNATURE_WORDS[text_class])
            vote_label = text_class
            if swap_pair is not None and text_class in swap_pair:
                if rng.random() < swap_rate:
                    vote_label = swap_pair[1] if text_class == swap_pair[0] else swap_pair[0]
            records.append(RawRecord(
                id=f"s{counter:05d}",
                body=" ".join(words),
                votes=_votes_for(vote_label),
                source_kind=source_kind,
            ))
            counter += 1
    return SyntheticCorpus(records=tuple(records))


def write_corpus_file(corpus: SyntheticCorpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in corpus.records:
            votes = ",".join(str(v) for v in rec.votes)
            fh.write(f"{rec.id}\t{votes}\t{rec.body}\n")


def write_lexicon_file(path) -> None:
    """Lexicon grouping the filler words; signatures fall back to themselves."""
    with open(path, "w", encoding="utf-8") as fh:
        for tag, words in FILLER_GROUPS.items():
            fh.write(f"{tag}\t{' '.join(words)}\n")


def fixture_config(corpus_path, lexicon_path, out_dir, seed: int = 7,
                   epochs: int = 80, learning_rate: float = 0.15,
                   trace_length: int = 8, quorum: int = 2) -> dict:
    """A ready-to-run pipeline config for the synthetic fixture."""
    train = {
        "learning_rate": learning_rate,
        "epochs": epochs,
        "batch_size": 16,
        "dropout_rate": 0.05,
        "optimizer": "momentum",
        "momentum": 0.9,
        "embed_dim": 16,
        "conv_dim": 16,
        "lstm1_dim": 16,
        "lstm2_dim": 16,
        "seed": 0,
    }
    return {
        "seed": seed,
        "out_dir": str(out_dir),
        "lexicon_path": str(lexicon_path),
        "test_fraction": 0.2,
        "min_total_votes": 200,
        "min_vote_ratio": 0.5,
        "variance_threshold": 0.85,
        "quorum": quorum,
        "trace_length": trace_length,
        "datasets": [
            {
                "name": "comment",
                "path": str(corpus_path),
                "source_kind": "comment",
                "pad_length": PAD_LENGTH,
            }
        ],
        "train": {"m1": dict(train), "m2": dict(train)},
    }
