"""Deterministic text normalization, tokenization, and stemming.

All lexical operations in the toolkit run on top of this module so that a
given input text and option set always map to the same token list. Raw text
elsewhere is stored as received; lowercasing and unicode normalization happen
only here.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

__all__ = [
    "TokenSequence",
    "tokenize",
    "porter_stem",
    "content_tokens",
    "STOPWORDS",
]

_ALNUM_RE = re.compile(r"[^\W_]+", re.UNICODE)
_WHITESPACE_RE = re.compile(r"\S+")

# Compact English function-word list; enough to strip glue words from
# content-unit matching without an external dependency.
STOPWORDS = frozenset("""
    a about above after again against all am an and any are aren as at be
    because been before being below between both but by can cannot could
    did do does doing down during each few for from further had has have
    having he her here hers herself him himself his how i if in into is
    isn it its itself just me more most my myself no nor not now of off on
    once only or other our ours ourselves out over own s same she should
    so some such t than that the their theirs them themselves then there
    these they this those through to too under until up very was we were
    what when where which while who whom why will with would you your
    yours yourself yourselves
""".split())


@dataclass(frozen=True)
class TokenSequence:
    """An immutable, normalized token list plus the flags that produced it."""

    tokens: tuple[str, ...]
    stemmed: bool = False

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]


def tokenize(text: str, *, lowercase: bool = True, stem: bool = False,
             keep_alnum_only: bool = True) -> TokenSequence:
    """Split ``text`` into normalized tokens.

    Defaults lowercase the NFC-normalized text and split it on runs of
    non-alphanumeric characters, so ``"U.S.-based"`` becomes
    ``[u, s, based]``. With ``keep_alnum_only=False`` the text is split on
    whitespace only and punctuation is kept inside tokens. Stemming applies
    a Porter-style stemmer per token. Empty text yields an empty sequence.
    """
    normalized = unicodedata.normalize("NFC", text)
    if lowercase:
        normalized = normalized.lower()
    pattern = _ALNUM_RE if keep_alnum_only else _WHITESPACE_RE
    tokens = pattern.findall(normalized)
    if stem:
        tokens = [porter_stem(tok) for tok in tokens]
    return TokenSequence(tokens=tuple(tokens), stemmed=stem)


def content_tokens(text: str, *, stem: bool = False) -> list[str]:
    """Tokens of ``text`` that are not stopwords (stopword test pre-stemming)."""
    kept = [tok for tok in tokenize(text).tokens if tok not in STOPWORDS]
    if stem:
        kept = [porter_stem(tok) for tok in kept]
    return kept


# ---------------------------------------------------------------------------
# Porter stemmer (1980 algorithm). Operates on lowercase ASCII words; words
# with other characters or length < 3 are returned unchanged.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel-to-consonant transitions ("VC" blocks) in ``stem``."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        vowel = not _is_consonant(stem, i)
        if prev_vowel and not vowel:
            m += 1
        prev_vowel = vowel
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (len(word) >= 2 and word[-1] == word[-2]
            and _is_consonant(word, len(word) - 1))


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (_is_consonant(word, len(word) - 3)
            and not _is_consonant(word, len(word) - 2)
            and _is_consonant(word, len(word) - 1)):
        return False
    return word[-1] not in "wxy"


def _replace(word: str, suffix: str, repl: str, min_measure: int) -> str | None:
    """Apply ``suffix -> repl`` when the remaining stem has measure > threshold."""
    if not word.endswith(suffix):
        return None
    stem = word[: len(word) - len(suffix)]
    if _measure(stem) > min_measure:
        return stem + repl
    return word


_STEP2 = (
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
)

_STEP3 = (
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
)

_STEP4 = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def porter_stem(word: str) -> str:
    if len(word) < 3 or not word.isascii() or not word.isalpha():
        return word

    # Step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("s") and not word.endswith("ss"):
        word = word[:-1]

    # Step 1b
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    else:
        stripped = None
        if word.endswith("ed") and _has_vowel(word[:-2]):
            stripped = word[:-2]
        elif word.endswith("ing") and _has_vowel(word[:-3]):
            stripped = word[:-3]
        if stripped is not None:
            word = stripped
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure(word) == 1 and _ends_cvc(word):
                word += "e"

    # Step 1c
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    # Step 2
    for suffix, repl in _STEP2:
        out = _replace(word, suffix, repl, 0)
        if out is not None:
            word = out
            break

    # Step 3
    for suffix, repl in _STEP3:
        out = _replace(word, suffix, repl, 0)
        if out is not None:
            word = out
            break

    # Step 4
    for suffix in _STEP4:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if _measure(stem) > 1:
                if suffix == "ion" and (not stem or stem[-1] not in "st"):
                    break
                word = stem
            break

    # Step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            word = stem

    # Step 5b
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word
