"""Author name normalization used for self-citation matching."""

import re
from enum import Enum

from unidecode import unidecode


class NameMatch(Enum):
    """How much of the given name a match key keeps."""
    INITIAL = "initial"
    FULL = "full"


class EmptyNameKeyError(ValueError):
    """Raised when a name has no alphabetic characters to build a key from."""
    pass


_TOKEN_STRIP = re.compile(r"^[^a-z0-9]+|[^a-z0-9]+$")
_KEEP = re.compile(r"[^a-z0-9'\- ]")


def _tokens(text: str) -> list:
    tokens = []
    for raw in text.split():
        token = _TOKEN_STRIP.sub("", raw)
        if any(ch.isalpha() for ch in token):
            tokens.append(token)
    return tokens


def normalize_author_name(raw_name: str, strictness: NameMatch = NameMatch.INITIAL) -> str:
    """Build the match key for an author name.

    ``"Francisco M. Couto"`` becomes ``"couto f"``. Diacritics are folded to
    base letters and the last name is the final token once trailing
    punctuation is removed. Two inputs are read as last-name-first: comma form
    (``"Couto, F. M."``) and key form, where the final token is a single
    letter (``"couto f"``), so normalizing a key returns it unchanged.

    With ``NameMatch.FULL`` the key keeps every given name:
    ``"couto, francisco m"``.

    Raises:
        EmptyNameKeyError: If the name contains no alphabetic character
    """
    folded = unidecode(raw_name or "").lower()
    if not any(ch.isalpha() for ch in folded):
        raise EmptyNameKeyError(f"Name has no alphabetic characters: {raw_name!r}")

    last_part, _, given_part = folded.partition(",")
    last_tokens = _tokens(_KEEP.sub(" ", last_part))
    given = _tokens(_KEEP.sub(" ", given_part))
    if last_tokens and given:
        last = last_tokens[-1]
    else:
        # a lone trailing comma ("H. P. Bastos,") does not mark last-name-first
        tokens = _tokens(_KEEP.sub(" ", folded))
        if len(tokens) >= 2 and len(tokens[-1]) == 1 and strictness is NameMatch.INITIAL:
            last, given = tokens[-2], [tokens[-1]]
        else:
            last, given = tokens[-1], tokens[:-1]

    if not last:
        raise EmptyNameKeyError(f"Name has no usable last name: {raw_name!r}")

    if strictness is NameMatch.FULL:
        return f"{last}, {' '.join(given)}" if given else last
    return f"{last} {given[0][0]}" if given else last
