"""Corpus loading, tagset mapping, and stem/suffix split enumeration.

Corpus files are UTF-8 text with one token per line and tab-separated
columns ``word [<TAB> tag [<TAB> stem]]``; a blank line ends a sentence.
All objects built here are immutable after construction and safe to share
across sampler chains.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

BUILTIN_MAPPINGS = ("penn-universal", "finntb-universal", "metu-universal")


class CorpusFormatError(ValueError):
    """Malformed corpus or mapping file; carries the offending line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class Interner:
    """Bidirectional string <-> dense integer id map, ids in first-seen order."""

    __slots__ = ("_strings", "_ids")

    def __init__(self, strings: Iterable[str] = ()):
        self._strings: list[str] = []
        self._ids: dict[str, int] = {}
        for s in strings:
            self.intern(s)

    def intern(self, s: str) -> int:
        i = self._ids.get(s)
        if i is None:
            i = len(self._strings)
            self._ids[s] = i
            self._strings.append(s)
        return i

    def id_of(self, s: str) -> int:
        return self._ids[s]

    def get(self, s: str) -> Optional[int]:
        return self._ids.get(s)

    def string(self, i: int) -> str:
        return self._strings[i]

    @property
    def strings(self) -> tuple[str, ...]:
        return tuple(self._strings)

    def __contains__(self, s: str) -> bool:
        return s in self._ids

    def __len__(self) -> int:
        return len(self._strings)


@dataclass(frozen=True)
class Token:
    """One corpus position: an interned word plus optional gold annotations."""

    word_id: int
    gold_tag: Optional[int] = None
    gold_stem: Optional[str] = None


class Corpus:
    """Sentences of interned tokens plus the word vocabulary.

    ``tag_names`` interns the gold tag inventory when the corpus carries
    gold tags (ids in `Token.gold_tag` index into it).  ``token_lines``
    mirrors the sentence structure with 1-based source line numbers when
    the corpus was read from a file; it is used only for error messages.
    """

    def __init__(
        self,
        sentences: Sequence[Sequence[Token]],
        vocab: Interner,
        tag_names: Optional[Interner] = None,
        token_lines: Optional[Sequence[Sequence[int]]] = None,
    ):
        self.sentences: tuple[tuple[Token, ...], ...] = tuple(
            tuple(sent) for sent in sentences
        )
        self.vocab = vocab
        self.tag_names = tag_names
        self.token_lines = (
            tuple(tuple(ls) for ls in token_lines) if token_lines is not None else None
        )
        for sent in self.sentences:
            if not sent:
                raise ValueError("corpus contains an empty sentence")
        n = sum(len(s) for s in self.sentences)
        self.n_tokens = n
        # Flat views used by the sampler: word id per token and the index of
        # the previous/next token within the same sentence (-1 at an edge).
        word_ids = np.empty(n, dtype=np.int64)
        prev_index = np.empty(n, dtype=np.int64)
        next_index = np.empty(n, dtype=np.int64)
        pos = 0
        for sent in self.sentences:
            for j, tok in enumerate(sent):
                if not (0 <= tok.word_id < len(vocab)):
                    raise ValueError(f"word_id {tok.word_id} outside vocabulary")
                word_ids[pos] = tok.word_id
                prev_index[pos] = pos - 1 if j > 0 else -1
                next_index[pos] = pos + 1 if j < len(sent) - 1 else -1
                pos += 1
        self.word_ids = word_ids
        self.prev_index = prev_index
        self.next_index = next_index
        word_ids.setflags(write=False)
        prev_index.setflags(write=False)
        next_index.setflags(write=False)

    @property
    def n_types(self) -> int:
        return len(self.vocab)

    @property
    def has_gold_tags(self) -> bool:
        return self.tag_names is not None

    @property
    def has_gold_stems(self) -> bool:
        return any(t.gold_stem is not None for s in self.sentences for t in s)

    def tokens(self) -> Iterable[Token]:
        for sent in self.sentences:
            yield from sent

    def words(self) -> list[str]:
        """Surface string of every token, in corpus order."""
        return [self.vocab.string(t.word_id) for t in self.tokens()]

    def gold_tag_ids(self) -> np.ndarray:
        """Gold tag id per token; requires gold tags on every token."""
        if self.tag_names is None:
            raise ValueError("corpus carries no gold tags")
        out = np.empty(self.n_tokens, dtype=np.int64)
        for i, tok in enumerate(self.tokens()):
            if tok.gold_tag is None:
                raise ValueError(f"token {i} has no gold tag")
            out[i] = tok.gold_tag
        return out


@dataclass(frozen=True)
class TagsetMapping:
    """Fine tag string -> coarse tag id, with the coarse inventory order."""

    fine_to_coarse: dict[str, int]
    coarse_names: tuple[str, ...]

    @property
    def T(self) -> int:
        return len(self.coarse_names)

    def coarse_id(self, fine: str) -> int:
        return self.fine_to_coarse[fine]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]]) -> "TagsetMapping":
        coarse = Interner()
        fine_to_coarse: dict[str, int] = {}
        for fine, coarse_name in pairs:
            cid = coarse.intern(coarse_name)
            old = fine_to_coarse.get(fine)
            if old is not None and old != cid:
                raise CorpusFormatError(
                    f"fine tag {fine!r} mapped to both "
                    f"{coarse.string(old)!r} and {coarse_name!r}"
                )
            fine_to_coarse[fine] = cid
        if not fine_to_coarse:
            raise CorpusFormatError("mapping is empty")
        return cls(fine_to_coarse, coarse.strings)


def load_mapping(path: str | Path) -> TagsetMapping:
    """Read a two-column (fine<TAB>coarse) mapping file; '#' lines are comments."""
    pairs = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0] or not cols[1]:
                raise CorpusFormatError(
                    f"expected 'fine<TAB>coarse', got {line!r}", line=lineno
                )
            pairs.append((cols[0], cols[1]))
    if not pairs:
        raise CorpusFormatError(f"mapping file {path} has no entries")
    return TagsetMapping.from_pairs(pairs)


def load_builtin_mapping(name: str) -> TagsetMapping:
    """Load one of the shipped Universal tagset mappings (see BUILTIN_MAPPINGS)."""
    if name not in BUILTIN_MAPPINGS:
        raise ValueError(
            f"unknown builtin mapping {name!r}; available: {', '.join(BUILTIN_MAPPINGS)}"
        )
    from importlib.resources import files

    path = files("stemtag") / "data" / (name.replace("-", "_") + ".map")
    return load_mapping(str(path))


_COLUMN_SPECS = {"word": 1, "word,tag": 2, "word,tag,stem": 3}


def load_corpus(
    path: str | Path,
    columns: str = "auto",
    lowercase: bool = False,
) -> Corpus:
    """Load a one-token-per-line corpus file.

    ``columns`` declares the expected layout ("word", "word,tag",
    "word,tag,stem"); "auto" adopts the layout of the first token line and
    then enforces it.  With ``lowercase`` the surface words and gold stems
    are lowercased before interning.  Raises `CorpusFormatError` on an
    empty file, a line with the wrong column count, or a gold stem that is
    not a nonempty prefix of its word.
    """
    if columns not in _COLUMN_SPECS and columns != "auto":
        raise ValueError(f"bad column spec {columns!r}")
    expected = _COLUMN_SPECS.get(columns)

    vocab = Interner()
    tag_names = Interner()
    sentences: list[list[Token]] = []
    token_lines: list[list[int]] = []
    sent: list[Token] = []
    lines_of_sent: list[int] = []
    saw_tags = False

    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                if sent:
                    sentences.append(sent)
                    token_lines.append(lines_of_sent)
                    sent, lines_of_sent = [], []
                continue
            cols = line.split("\t")
            if expected is None:
                expected = len(cols)
                if expected > 3:
                    raise CorpusFormatError(
                        f"too many columns ({len(cols)})", line=lineno
                    )
            if len(cols) != expected:
                raise CorpusFormatError(
                    f"expected {expected} column(s), got {len(cols)}", line=lineno
                )
            word = cols[0]
            if not word:
                raise CorpusFormatError("empty word field", line=lineno)
            if lowercase:
                word = word.lower()
            gold_tag = None
            gold_stem = None
            if expected >= 2:
                if not cols[1]:
                    raise CorpusFormatError("empty tag field", line=lineno)
                gold_tag = tag_names.intern(cols[1])
                saw_tags = True
            if expected >= 3:
                stem = cols[2].lower() if lowercase else cols[2]
                if not stem or not word.startswith(stem):
                    raise CorpusFormatError(
                        f"gold stem {cols[2]!r} is not a nonempty prefix of {word!r}",
                        line=lineno,
                    )
                gold_stem = stem
            sent.append(Token(vocab.intern(word), gold_tag, gold_stem))
            lines_of_sent.append(lineno)
    if sent:
        sentences.append(sent)
        token_lines.append(lines_of_sent)
    if not sentences:
        raise CorpusFormatError(f"corpus file {path} contains no tokens")
    return Corpus(
        sentences,
        vocab,
        tag_names=tag_names if saw_tags else None,
        token_lines=token_lines,
    )


def iter_corpus_lines(corpus: Corpus) -> Iterable[str]:
    """Serialized corpus lines (without newlines); blank line per sentence end."""
    for sent in corpus.sentences:
        for tok in sent:
            cols = [corpus.vocab.string(tok.word_id)]
            if corpus.tag_names is not None and tok.gold_tag is not None:
                cols.append(corpus.tag_names.string(tok.gold_tag))
            if tok.gold_stem is not None:
                cols.append(tok.gold_stem)
            yield "\t".join(cols)
        yield ""


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back to disk in the same column layout it carries."""
    with open(path, "w", encoding="utf-8") as f:
        for line in iter_corpus_lines(corpus):
            f.write(line + "\n")


def apply_mapping(corpus: Corpus, mapping: TagsetMapping) -> Corpus:
    """Re-code every gold tag through ``mapping``; words and stems unchanged.

    Raises `CorpusFormatError` naming the first unmapped fine tag and its
    source line.
    """
    if corpus.tag_names is None:
        raise ValueError("corpus carries no gold tags to map")
    coarse_names = Interner(mapping.coarse_names)
    new_sentences: list[list[Token]] = []
    for si, sent in enumerate(corpus.sentences):
        new_sent = []
        for ti, tok in enumerate(sent):
            if tok.gold_tag is None:
                raise ValueError("corpus mixes tagged and untagged tokens")
            fine = corpus.tag_names.string(tok.gold_tag)
            cid = mapping.fine_to_coarse.get(fine)
            if cid is None:
                if corpus.token_lines is not None:
                    where = corpus.token_lines[si][ti]
                else:
                    where = None
                raise CorpusFormatError(
                    f"fine tag {fine!r} missing from the tagset mapping", line=where
                )
            new_sent.append(Token(tok.word_id, cid, tok.gold_stem))
        new_sentences.append(new_sent)
    return Corpus(
        new_sentences, corpus.vocab, tag_names=coarse_names, token_lines=corpus.token_lines
    )


class SplitSupport:
    """Per word type, every (stem, suffix) split; plus the global stem and
    suffix vocabularies.

    A word of length L has exactly L splits, ordered by stem length: split
    k pairs the first k+1 characters with the rest.  Stems are nonempty;
    the suffix of the final split is the empty string.  S and M are fixed
    support sizes computed from the whole vocabulary up front.
    """

    def __init__(self, corpus_vocab: Interner):
        stem_vocab = Interner()
        suffix_vocab = Interner()
        words = corpus_vocab.strings
        offsets = np.zeros(len(words) + 1, dtype=np.int64)
        stems: list[int] = []
        suffixes: list[int] = []
        for wid, word in enumerate(words):
            for k in range(1, len(word) + 1):
                stems.append(stem_vocab.intern(word[:k]))
                suffixes.append(suffix_vocab.intern(word[k:]))
            offsets[wid + 1] = len(stems)
        self.stem_vocab = stem_vocab
        self.suffix_vocab = suffix_vocab
        self.split_stems = np.asarray(stems, dtype=np.int64)
        self.split_suffixes = np.asarray(suffixes, dtype=np.int64)
        self.split_offsets = offsets
        self.split_stems.setflags(write=False)
        self.split_suffixes.setflags(write=False)
        self.split_offsets.setflags(write=False)
        self.max_splits = (
            int(np.max(np.diff(offsets))) if len(words) else 0
        )

    @property
    def S(self) -> int:
        return len(self.stem_vocab)

    @property
    def M(self) -> int:
        return len(self.suffix_vocab)

    def n_splits(self, word_id: int) -> int:
        return int(self.split_offsets[word_id + 1] - self.split_offsets[word_id])

    def splits_of(self, word_id: int) -> list[tuple[int, int]]:
        lo = int(self.split_offsets[word_id])
        hi = int(self.split_offsets[word_id + 1])
        return [
            (int(self.split_stems[i]), int(self.split_suffixes[i]))
            for i in range(lo, hi)
        ]

    def split_strings(self, word_id: int, k: int) -> tuple[str, str]:
        lo = int(self.split_offsets[word_id])
        return (
            self.stem_vocab.string(int(self.split_stems[lo + k])),
            self.suffix_vocab.string(int(self.split_suffixes[lo + k])),
        )


def build_split_support(corpus: Corpus) -> SplitSupport:
    """Enumerate the split candidates for every word type in the corpus."""
    if len(corpus.vocab) == 0:
        raise ValueError("vocabulary is empty")
    return SplitSupport(corpus.vocab)
