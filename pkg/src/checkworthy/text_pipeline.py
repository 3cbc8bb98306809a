"""Raw text to language-tagged, sentence-split, tokenized, POS-tagged input.

All functions here are pure; bundled resources (abbreviation list, POS
lexicons, tag mapping tables) are loaded once and shared read-only, so the
module is safe to call from multiple threads.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Protocol

from .errors import EmptyInput, MissingResource


class Language(Enum):
    ENGLISH = "English"
    ARABIC = "Arabic"

    @classmethod
    def parse(cls, name: str) -> "Language":
        key = name.strip().lower()
        if key in ("english", "en"):
            return cls.ENGLISH
        if key in ("arabic", "ar"):
            return cls.ARABIC
        raise ValueError(f"unknown language: {name!r}")


class UposTag(Enum):
    """The 17-tag Universal POS inventory. Unknown native tags map to X."""

    ADJ = "ADJ"
    ADP = "ADP"
    ADV = "ADV"
    AUX = "AUX"
    CCONJ = "CCONJ"
    DET = "DET"
    INTJ = "INTJ"
    NOUN = "NOUN"
    NUM = "NUM"
    PART = "PART"
    PRON = "PRON"
    PROPN = "PROPN"
    PUNCT = "PUNCT"
    SCONJ = "SCONJ"
    SYM = "SYM"
    VERB = "VERB"
    X = "X"


UPOS_ORDER: tuple[UposTag, ...] = tuple(UposTag)


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Token:
    surface: str
    segments: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.segments:
            object.__setattr__(self, "segments", (self.surface,))


# Arabic letter blocks used for script detection (basic block + supplement).
_ARABIC_RANGES = ((0x0600, 0x06FF), (0x0750, 0x077F))

ARABIC_RATIO_THRESHOLD = 0.30


def _is_arabic_letter(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _ARABIC_RANGES)


def detect_language(text: str) -> Language:
    """Classify text as Arabic when >= 30% of its letters are Arabic-script.

    Only letter codepoints (Unicode category L*) are counted, so digits and
    punctuation never influence the decision.
    """
    letters = 0
    arabic = 0
    for ch in text:
        if unicodedata.category(ch).startswith("L"):
            letters += 1
            if _is_arabic_letter(ch):
                arabic += 1
    if letters == 0:
        raise EmptyInput("text contains no letter codepoints")
    return Language.ARABIC if arabic / letters >= ARABIC_RATIO_THRESHOLD else Language.ENGLISH


# --------------------------------------------------------------------------
# Sentence splitting
# --------------------------------------------------------------------------

_EN_TERMINATORS = frozenset(".!?")
_AR_TERMINATORS = frozenset((".", "!", "؟", "؛", "\n"))  # . ! ؟ ؛ \n
_OPENING_QUOTES = frozenset("\"'“‘«»”’")
_CLOSERS = frozenset("\"'”’»«)]}“‘")


def _data_text(filename: str) -> str:
    ref = resources.files("checkworthy").joinpath("data", filename)
    try:
        return ref.read_text(encoding="utf-8")
    except (FileNotFoundError, ModuleNotFoundError) as exc:
        raise MissingResource(f"bundled resource not found: {filename}") from exc


@lru_cache(maxsize=None)
def _abbreviations() -> frozenset[str]:
    entries = set()
    for line in _data_text("abbreviations_en.txt").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            entries.add(line.lower())
    return frozenset(entries)


def _abbreviation_before(text: str, i: int) -> bool:
    """True when the period at position i terminates a known abbreviation
    or a single-letter initial ("John F. Kennedy")."""
    start = i
    while start > 0 and (text[start - 1].isalnum() or text[start - 1] in ".'’"):
        start -= 1
    candidate = text[start : i + 1]
    if len(candidate) == 2 and candidate[0].isalpha() and candidate[0].isupper():
        return True
    return candidate.lower() in _abbreviations()


def _split_points_en(text: str) -> list[int]:
    points = []
    n = len(text)
    for i, ch in enumerate(text):
        if ch not in _EN_TERMINATORS:
            continue
        if ch == "." and _abbreviation_before(text, i):
            continue
        j = i + 1
        k = j
        while k < n and text[k].isspace():
            k += 1
        if k == j:  # terminator not followed by whitespace
            continue
        if k < n and (text[k].isupper() or text[k].isdigit() or text[k] in _OPENING_QUOTES):
            points.append(j)
    return points


def _split_points_ar(text: str) -> list[int]:
    points = []
    n = len(text)
    i = 0
    while i < n:
        if text[i] in _AR_TERMINATORS:
            j = i + 1
            # absorb runs of terminators and trailing closers ("؟!", «...».)
            while j < n and (text[j] in _AR_TERMINATORS or text[j] in _CLOSERS):
                j += 1
            points.append(j)
            i = j
        else:
            i += 1
    return points


def split_sentences(text: str, lang: Language) -> list[Sentence]:
    """Split text into index-ordered sentences with exact character spans.

    English: split after {., !, ?} followed by whitespace plus an uppercase
    letter, digit, or quote, except after bundled abbreviations. Arabic:
    split after any of {., !, ؟, ؛} or a newline. Whitespace-only fragments
    are dropped; original_text[span] reproduces each sentence exactly.
    """
    if not text or not text.strip():
        raise EmptyInput("no sentences in empty text")
    points = _split_points_ar(text) if lang is Language.ARABIC else _split_points_en(text)
    bounds = [0, *points, len(text)]
    sentences = []
    for a, b in zip(bounds, bounds[1:]):
        chunk = text[a:b]
        if not chunk.strip():
            continue
        lead = len(chunk) - len(chunk.lstrip())
        trail = len(chunk) - len(chunk.rstrip())
        lo, hi = a + lead, b - trail
        sentences.append(Sentence(index=len(sentences), text=text[lo:hi], char_span=(lo, hi)))
    return sentences


# --------------------------------------------------------------------------
# Tokenization and Arabic clitic segmentation
# --------------------------------------------------------------------------

# Single conjunction/preposition prefixes and pronominal suffixes that attach
# to Arabic host words; longest match wins, at most one of each is stripped.
ARABIC_PREFIXES: tuple[str, ...] = ("وال", "بال", "كال", "فال", "ال", "و", "ف", "ب", "ك", "ل")
ARABIC_SUFFIXES: tuple[str, ...] = ("ها", "هم", "هن", "كم", "كن", "نا", "ني", "ه", "ي", "ك")

_MIN_STEM = 2

_AL_PREFIXES = frozenset(p for p in ARABIC_PREFIXES if p.endswith("ال"))
_CONJ_PREFIXES = frozenset(("و", "ف"))  # و ف
_PREP_PREFIXES = frozenset(("ب", "ك", "ل"))  # ب ك ل


def segment_arabic(surface: str) -> list[str]:
    """Strip at most one clitic prefix and one pronominal suffix.

    Longest affix match wins and a strip only applies while the remaining
    stem keeps >= 2 letters. Joining the output always reproduces the input.
    """
    prefix = ""
    stem = surface
    for p in ARABIC_PREFIXES:  # ordered longest-first within each length class
        if stem.startswith(p) and len(stem) - len(p) >= _MIN_STEM:
            prefix = p
            stem = stem[len(p) :]
            break
    suffix = ""
    for s in ARABIC_SUFFIXES:
        if stem.endswith(s) and len(stem) - len(s) >= _MIN_STEM:
            suffix = s
            stem = stem[: -len(s)]
            break
    parts = [part for part in (prefix, stem, suffix) if part]
    return parts if parts else [surface]


def stem_of(token: Token) -> str:
    """The host-word segment of a token (the token itself when unsegmented)."""
    if len(token.segments) > 1 and token.segments[0] in ARABIC_PREFIXES:
        return token.segments[1]
    return token.segments[0]


def _is_punct_char(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _is_arabic_word(surface: str) -> bool:
    return any(_is_arabic_letter(ch) for ch in surface)


def _peel(piece: str) -> list[str]:
    """Peel leading/trailing punctuation codepoints into separate tokens;
    interior punctuation (don't, U.S.) is kept inside the core token."""
    left: list[str] = []
    right: list[str] = []
    i, j = 0, len(piece)
    while i < j and _is_punct_char(piece[i]):
        left.append(piece[i])
        i += 1
    while j > i and _is_punct_char(piece[j - 1]):
        right.append(piece[j - 1])
        j -= 1
    core = [piece[i:j]] if j > i else []
    return left + core + list(reversed(right))


def tokenize(text: str, lang: Language) -> list[Token]:
    """Whitespace-split then peel edge punctuation; Arabic-script tokens are
    additionally clitic-segmented."""
    tokens: list[Token] = []
    for piece in text.split():
        for surface in _peel(piece):
            if lang is Language.ARABIC and _is_arabic_word(surface):
                tokens.append(Token(surface, tuple(segment_arabic(surface))))
            else:
                tokens.append(Token(surface))
    return tokens


# --------------------------------------------------------------------------
# POS tagging
# --------------------------------------------------------------------------


class Tagger(Protocol):
    def tag(self, tokens: list[Token], lang: Language) -> list[UposTag]: ...


def _parse_tsv(filename: str) -> dict[str, str]:
    table = {}
    for ln, line in enumerate(_data_text(filename).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise MissingResource(f"{filename}: malformed line {ln}: {line!r}")
        table[parts[0]] = parts[1]
    return table


@lru_cache(maxsize=None)
def _pos_resources(lang: Language) -> tuple[dict[str, str], dict[str, UposTag]]:
    if lang is Language.ENGLISH:
        lex = _parse_tsv("pos_lexicon_en.tsv")
        raw_map = _parse_tsv("tagmap_penn.tsv")
    else:
        lex = _parse_tsv("pos_lexicon_ar.tsv")
        raw_map = _parse_tsv("tagmap_farasa.tsv")
    tag_map = {}
    for native, upos in raw_map.items():
        tag_map[native] = UposTag(upos)
    return lex, tag_map


_EN_SUFFIX_RULES: tuple[tuple[str, UposTag], ...] = (
    ("ly", UposTag.ADV),
    ("ing", UposTag.VERB),
    ("ed", UposTag.VERB),
    ("tion", UposTag.NOUN),
    ("ment", UposTag.NOUN),
    ("ness", UposTag.NOUN),
)


def _is_numeric(surface: str) -> bool:
    has_digit = False
    for ch in surface:
        if ch.isdigit():
            has_digit = True
        elif ch not in ".,%٫٬":  # decimal/thousands separators
            return False
    return has_digit


class BaselineTagger:
    """Lexicon lookup, then suffix heuristics, then digit/punct/NOUN fallback.

    Lexicon hits carry native tags (Penn for English, Farasa-style for
    Arabic) that are mapped through the bundled native->Universal tables;
    heuristic outcomes are Universal tags directly.
    """

    def tag(self, tokens: list[Token], lang: Language) -> list[UposTag]:
        lex, tag_map = _pos_resources(lang)
        out = []
        for tok in tokens:
            out.append(self._tag_one(tok, lang, lex, tag_map))
        return out

    @staticmethod
    def _tag_one(tok: Token, lang: Language, lex: dict[str, str], tag_map: dict[str, UposTag]) -> UposTag:
        surface = tok.surface
        native = lex.get(surface.lower())
        if native is not None:
            return tag_map.get(native, UposTag.X)
        if lang is Language.ENGLISH:
            low = surface.lower()
            for suffix, upos in _EN_SUFFIX_RULES:
                if low.endswith(suffix) and len(low) > len(suffix) + 1:
                    return upos
        else:
            if len(tok.segments) > 1:
                head = tok.segments[0]
                if head in _CONJ_PREFIXES:
                    return UposTag.CCONJ
                if head in _PREP_PREFIXES:
                    return UposTag.ADP
                if head in _AL_PREFIXES:
                    return UposTag.NOUN
            if surface.startswith("ال") and len(surface) > 3:  # ال-stem
                return UposTag.NOUN
        if _is_numeric(surface):
            return UposTag.NUM
        if all(_is_punct_char(ch) for ch in surface):
            return UposTag.PUNCT
        return UposTag.NOUN


_DEFAULT_TAGGER = BaselineTagger()


def pos_tag(tokens: list[Token], lang: Language, tagger: Tagger | None = None) -> list[UposTag]:
    """One Universal tag per token via the given tagger (baseline by default)."""
    if not tokens:
        raise EmptyInput("cannot tag an empty token list")
    active = tagger if tagger is not None else _DEFAULT_TAGGER
    return active.tag(tokens, lang)


def prepare(text: str, lang: Language) -> list[tuple[Sentence, list[Token], list[UposTag]]]:
    """Split, tokenize, and tag a document in one pass."""
    out = []
    for sentence in split_sentences(text, lang):
        tokens = tokenize(sentence.text, lang)
        tags = pos_tag(tokens, lang)
        out.append((sentence, tokens, tags))
    return out


def detect_or(text: str, lang: Language | None) -> Language:
    return lang if lang is not None else detect_language(text)
