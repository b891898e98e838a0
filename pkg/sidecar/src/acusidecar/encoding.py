"""Stable text encoding shared by the trainable models.

Tokens are hashed into a fixed vocabulary with CRC32, so encodings are
reproducible across processes and runs (no Python hash randomization).
Sequence inputs follow the pair-concatenation convention
``[CLS] s2 [SEP] s1 [SEP]`` (scored text first, conditioning text second);
the contextual checker template prepends the unit's source text.
"""

from __future__ import annotations

import re
import zlib

CLS_ID = 1
SEP_ID = 2
N_SPECIAL = 3  # 0 reserved for padding

CLS_TOKEN = "[CLS]"
SEP_TOKEN = "[SEP]"

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def text_tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.casefold())


def token_id(token: str, vocab_size: int) -> int:
    if token == CLS_TOKEN:
        return CLS_ID
    if token == SEP_TOKEN:
        return SEP_ID
    bucket = zlib.crc32(token.encode("utf-8")) % (vocab_size - N_SPECIAL)
    return bucket + N_SPECIAL


def pair_template(s2: str, s1: str) -> list[str]:
    """``[CLS] s2 [SEP] s1 [SEP]`` as a token list."""
    return ([CLS_TOKEN] + text_tokens(s2) + [SEP_TOKEN]
            + text_tokens(s1) + [SEP_TOKEN])


def checker_template(premise: str, hypothesis: str,
                     context: str | None = None) -> list[str]:
    """Standard: ``[CLS] premise [SEP] hypothesis [SEP]``. Contextual adds
    the unit's source text first: ``[CLS] context [SEP] premise [SEP]
    hypothesis [SEP]``."""
    parts = [CLS_TOKEN]
    if context is not None:
        parts += text_tokens(context) + [SEP_TOKEN]
    parts += text_tokens(premise) + [SEP_TOKEN]
    parts += text_tokens(hypothesis) + [SEP_TOKEN]
    return parts


def encode_tokens(tokens: list[str], vocab_size: int) -> list[int]:
    return [token_id(t, vocab_size) for t in tokens]
