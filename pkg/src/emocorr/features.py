"""Text-feature views and fixed-length masked id sequences.

Three views of the same text feed the classifiers: the raw glyph sequence
(character), the tokenizer's word sequence (explicit), and the word sequence
with each word collapsed to its synonym-group tag (implicit). Tokenization is
injected as a plain callable so a language-specific segmenter can replace the
default whitespace splitter without touching anything downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Callable, Sequence

from .errors import ConfigurationError, CorpusFormatError

if TYPE_CHECKING:
    from .corpus import Vocabulary

PAD_TOKEN = "none"

Tokenizer = Callable[[str], list]


class FeatureView(str, Enum):
    CHARACTER = "character"
    IMPLICIT = "implicit"
    EXPLICIT = "explicit"


def whitespace_tokenizer(text: str) -> list:
    return text.split()


@dataclass(frozen=True)
class SynonymLexicon:
    """word -> synonym-group tag; a word missing here acts as its own tag."""

    entries: dict
    duplicate_words: int = 0

    def tag_of(self, word: str) -> str:
        return self.entries.get(word, word)

    def __len__(self) -> int:
        return len(self.entries)


def load_synonym_lexicon(path) -> SynonymLexicon:
    """Read a lexicon file of lines ``tag<TAB>word1 word2 ...``.

    One synonym group per line. A word listed in more than one group keeps the
    last group's tag; each collision increments ``duplicate_words`` so callers
    can warn instead of silently shadowing.
    """
    entries: dict = {}
    duplicates = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            tag, sep, words = line.partition("\t")
            tag = tag.strip()
            if not sep or not tag or not words.split():
                raise CorpusFormatError(
                    f"line {lineno}: expected 'tag<TAB>word1 word2 ...'"
                )
            for word in words.split():
                if word in entries:
                    duplicates += 1
                entries[word] = tag
    return SynonymLexicon(entries=entries, duplicate_words=duplicates)


def tokenize(text: str, view: FeatureView,
             tokenizer: Tokenizer = whitespace_tokenizer) -> list:
    """Character view: every non-whitespace glyph, in order. Explicit view:
    whatever the injected tokenizer returns."""
    view = FeatureView(view)
    if view is FeatureView.CHARACTER:
        return [ch for ch in text if not ch.isspace()]
    if view is FeatureView.EXPLICIT:
        return tokenizer(text)
    raise ConfigurationError(
        "tokenize handles character/explicit views; use extract_tokens for implicit"
    )


def apply_synonym_map(words: Sequence, lexicon: SynonymLexicon) -> list:
    """Replace each word by its synonym tag; unknown words stand for themselves."""
    return [lexicon.tag_of(w) for w in words]


def extract_tokens(text: str, view: FeatureView,
                   tokenizer: Tokenizer = whitespace_tokenizer,
                   lexicon: SynonymLexicon | None = None) -> list:
    """Produce the token sequence of any of the three views."""
    view = FeatureView(view)
    if view is FeatureView.IMPLICIT:
        if lexicon is None:
            raise ConfigurationError("implicit view requires a synonym lexicon")
        return apply_synonym_map(tokenizer(text), lexicon)
    return tokenize(text, view, tokenizer)


@dataclass(frozen=True)
class FeatureSequence:
    """A padded token-id sequence with its validity mask."""

    token_ids: tuple
    mask: tuple
    view: FeatureView

    def __post_init__(self):
        if len(self.token_ids) != len(self.mask):
            raise ConfigurationError("token_ids and mask lengths differ")

    @property
    def length(self) -> int:
        return len(self.token_ids)


def pad_and_mask(tokens: Sequence, vocab: "Vocabulary", length: int) -> FeatureSequence:
    """Encode tokens to ids, truncated or right-padded to exactly ``length``.

    Over-length inputs keep their first ``length`` tokens. Unknown tokens map
    to the reserved id 0 ("none"); the mask is 1 exactly where a non-reserved
    id sits, so padding and out-of-vocabulary positions are both masked out.
    """
    if length < 1:
        raise ConfigurationError("padded length must be >= 1")
    ids = [vocab.token_to_id.get(tok, 0) for tok in tokens[:length]]
    ids.extend(0 for _ in range(length - len(ids)))
    mask = tuple(1 if i != 0 else 0 for i in ids)
    return FeatureSequence(token_ids=tuple(ids), mask=mask, view=vocab.view)
