"""Corpus ingestion: vote-resolved labels, stratified splits, vocabularies.

File format (UTF-8, one record per line)::

    id <TAB> v0,v1,v2,v3,v4,v5 <TAB> text

where the six comma-separated vote counts follow the fixed emotion order
love, fear, joy, sadness, surprise, anger. Split files append a fourth
``train|test`` column.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np

from .emotions import NUM_EMOTIONS
from .errors import ConfigurationError, CorpusFormatError
from .features import (
    PAD_TOKEN,
    FeatureView,
    SynonymLexicon,
    Tokenizer,
    extract_tokens,
    whitespace_tokenizer,
)


class SourceKind(str, Enum):
    COMMENT = "comment"
    NEWS_BODY = "news_body"
    NEWS_TITLE = "news_title"


@dataclass(frozen=True)
class RawRecord:
    """One ingested line: text plus its six public vote counts."""

    id: str
    body: str
    votes: tuple
    source_kind: SourceKind

    def __post_init__(self):
        if len(self.votes) != NUM_EMOTIONS:
            raise ConfigurationError(f"expected {NUM_EMOTIONS} vote counts")
        if any(v < 0 for v in self.votes):
            raise ConfigurationError("vote counts must be non-negative")
        if not self.body.strip():
            raise ConfigurationError("record body is empty")


@dataclass(frozen=True)
class LabeledText:
    """A record that passed the vote filter; split is assigned later."""

    id: str
    body: str
    label: int
    split: Optional[str] = None

    def __post_init__(self):
        if not 0 <= self.label < NUM_EMOTIONS:
            raise ConfigurationError(f"label out of range: {self.label}")


def parse_corpus(path, source_kind: SourceKind) -> list:
    """Read every record of a corpus file, in file order.

    Blank lines are skipped; any malformed line aborts with its line number
    and reason, so on success the record count equals the number of non-blank
    lines.
    """
    source_kind = SourceKind(source_kind)
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise CorpusFormatError(
                    f"line {lineno}: expected 3 tab-separated fields, got {len(parts)}"
                )
            rid, vote_field, body = parts
            vote_parts = vote_field.split(",")
            if len(vote_parts) != NUM_EMOTIONS:
                raise CorpusFormatError(f"line {lineno}: expected 6 vote counts")
            try:
                votes = tuple(int(v) for v in vote_parts)
            except ValueError:
                raise CorpusFormatError(
                    f"line {lineno}: votes must be integers"
                ) from None
            if any(v < 0 for v in votes):
                raise CorpusFormatError(f"line {lineno}: votes must be non-negative")
            if not body.strip():
                raise CorpusFormatError(f"line {lineno}: empty text")
            records.append(
                RawRecord(id=rid, body=body, votes=votes, source_kind=source_kind)
            )
    return records


def label_by_votes(votes: Sequence, min_total: int = 200,
                   min_ratio: float = 0.5) -> Optional[int]:
    """Resolve public votes to an emotion index, or None to discard.

    A label is produced only when the total vote count strictly exceeds
    ``min_total`` and the winning emotion's share strictly exceeds
    ``min_ratio``. Both cuts are strict: 260 of 510 (51%) passes, 240 of 490
    (49%) is discarded, and an exactly-50% share is discarded too.
    """
    if len(votes) != NUM_EMOTIONS:
        raise ConfigurationError(f"expected {NUM_EMOTIONS} vote counts, got {len(votes)}")
    if any(v < 0 for v in votes):
        raise ConfigurationError("vote counts must be non-negative")
    total = sum(votes)
    if total <= min_total:
        return None
    best = max(votes)
    if best / total <= min_ratio:
        return None
    # At the default 50% cut at most one emotion can qualify; for looser
    # ratios the lowest qualifying index wins.
    return list(votes).index(best)


@dataclass(frozen=True)
class LabelingResult:
    labeled: tuple
    discarded: int


def label_records(records: Sequence, min_total: int = 200,
                  min_ratio: float = 0.5) -> LabelingResult:
    """Apply the vote filter to every record, tallying discards instead of
    dropping them silently."""
    kept = []
    dropped = 0
    for rec in records:
        label = label_by_votes(rec.votes, min_total=min_total, min_ratio=min_ratio)
        if label is None:
            dropped += 1
        else:
            kept.append(LabeledText(id=rec.id, body=rec.body, label=label))
    return LabelingResult(labeled=tuple(kept), discarded=dropped)


def split_train_test(records: Sequence, test_fraction: float, seed: int):
    """Stratified split, deterministic in ``seed`` and insensitive to input order.

    Within each label the records are ordered by (id, body) and permuted by a
    per-label generator, so the same member sets come back however the input
    was shuffled. The per-label test count is round(count * test_fraction).
    Returns (train, test) with the split tag filled in on fresh copies.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigurationError("test_fraction must lie strictly between 0 and 1")
    by_label: dict = {}
    for rec in records:
        by_label.setdefault(rec.label, []).append(rec)
    train, test = [], []
    for label in sorted(by_label):
        stratum = sorted(by_label[label], key=lambda r: (r.id, r.body))
        rng = np.random.default_rng([seed, label])
        order = rng.permutation(len(stratum))
        n_test = round(len(stratum) * test_fraction)
        test_positions = set(order[:n_test].tolist())
        for pos, rec in enumerate(stratum):
            if pos in test_positions:
                test.append(dataclasses.replace(rec, split="test"))
            else:
                train.append(dataclasses.replace(rec, split="train"))
    return train, test


@dataclass(frozen=True)
class Vocabulary:
    """Bijective token <-> id mapping; id 0 is always the reserved "none"."""

    view: FeatureView
    token_to_id: dict

    def __post_init__(self):
        if self.token_to_id.get(PAD_TOKEN) != 0:
            raise ConfigurationError('vocabulary must reserve id 0 for "none"')
        ids = sorted(self.token_to_id.values())
        if ids != list(range(len(ids))):
            raise ConfigurationError("vocabulary ids must be contiguous from 0")

    @property
    def size(self) -> int:
        return len(self.token_to_id)

    def decode(self, ids: Sequence) -> list:
        rev = {i: tok for tok, i in self.token_to_id.items()}
        return [rev[int(i)] for i in ids]


def build_vocab(records: Sequence, view: FeatureView,
                tokenizer: Tokenizer = whitespace_tokenizer,
                lexicon: SynonymLexicon | None = None) -> Vocabulary:
    """Collect the view's distinct tokens over all record bodies.

    Ids are assigned in sorted token order after the reserved "none", so the
    mapping is reproducible regardless of record order.
    """
    view = FeatureView(view)
    if view is FeatureView.IMPLICIT and lexicon is None:
        raise ConfigurationError("implicit view requires a synonym lexicon")
    seen: set = set()
    for rec in records:
        seen.update(extract_tokens(rec.body, view, tokenizer, lexicon))
    seen.discard(PAD_TOKEN)
    mapping = {PAD_TOKEN: 0}
    for tok in sorted(seen):
        mapping[tok] = len(mapping)
    return Vocabulary(view=view, token_to_id=mapping)


def write_split_corpus(records: Sequence, split_by_id: Mapping, path) -> None:
    """Write the corpus back out with a train|test column appended.

    ``split_by_id`` maps record ids to their split tag; records without an
    entry (vote-filter discards) are omitted.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            tag = split_by_id.get(rec.id)
            if tag is None:
                continue
            votes = ",".join(str(v) for v in rec.votes)
            fh.write(f"{rec.id}\t{votes}\t{rec.body}\t{tag}\n")
