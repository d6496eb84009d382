"""Treebank-style word tokenization for query strings.

Rules, applied per whitespace-separated chunk:

* leading quotes and opening brackets detach as their own tokens;
* trailing clause punctuation (, ? ! ; :), quotes, and closing brackets
  detach, preserving reading order; a trailing period detaches only on the
  final chunk of the text (sentence-final position);
* contractions split at the apostrophe ("What's" -> "What", "'s"), with the
  n't family splitting before the n;
* hyphenated and slash-joined words stay intact.

Matching on contraction suffixes is case-insensitive.
"""

from __future__ import annotations

from typing import List

HOLE_TOKEN = "⟨HOLE⟩"

_LEAD = frozenset("\"'`([{<")
_TRAIL_ALWAYS = frozenset(",?!;:" + "\"'`)]}>")
_TRAIL_FINAL = _TRAIL_ALWAYS | {"."}
_SUFFIXES = ("'s", "'m", "'d", "'ll", "'re", "'ve")


def _word_tokens(chunk: str, final: bool) -> List[str]:
    out: List[str] = []
    i = 0
    while i < len(chunk) and chunk[i] in _LEAD:
        out.append(chunk[i])
        i += 1
    core = chunk[i:]
    trail_set = _TRAIL_FINAL if final else _TRAIL_ALWAYS
    tail: List[str] = []
    while core and core[-1] in trail_set:
        tail.append(core[-1])
        core = core[:-1]
    tail.reverse()
    if core:
        low = core.lower()
        split_at = -1
        if low.endswith("n't") and len(core) > 3:
            split_at = len(core) - 3
        else:
            for suffix in _SUFFIXES:
                if low.endswith(suffix) and len(core) > len(suffix):
                    split_at = len(core) - len(suffix)
                    break
        if split_at > 0:
            out.append(core[:split_at])
            out.append(core[split_at:])
        else:
            out.append(core)
    out.extend(tail)
    return out


def tokenize_text(text: str) -> List[str]:
    """Tokenize one literal segment. Total: always returns a (possibly
    empty) list; tokens are non-empty and contain no whitespace."""
    chunks = text.split()
    tokens: List[str] = []
    last = len(chunks) - 1
    for idx, chunk in enumerate(chunks):
        tokens.extend(_word_tokens(chunk, idx == last))
    return tokens
