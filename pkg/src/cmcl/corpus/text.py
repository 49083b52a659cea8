"""Text normalization and tokenization for social-media style input.

Normalization lowercases, masks user mentions and URLs with the reserved
tokens `<usr>` / `<url>`, and deletes the characters `*` and `#`, which the
trigram codec reserves as terminal and padding markers.
"""
from __future__ import annotations

import re

USR_TOKEN = "<usr>"
URL_TOKEN = "<url>"
MASK_TOKENS = (USR_TOKEN, URL_TOKEN)

_URL_RE = re.compile(r"^(?:[a-z][a-z0-9+.-]*://|www\.)")


def normalize(text: str) -> str:
    """Lowercase, mask @-mentions and URLs, strip reserved `*`/`#` chars."""
    out: list[str] = []
    for tok in text.lower().split():
        if tok.startswith("@"):
            out.append(USR_TOKEN)
        elif _URL_RE.match(tok):
            out.append(URL_TOKEN)
        else:
            tok = tok.replace("*", "").replace("#", "")
            if tok:
                out.append(tok)
    return " ".join(out)


def tokenize(text: str) -> list[str]:
    """Split on whitespace runs; never yields empty tokens."""
    return text.split()
