"""The shared 3-class sentiment label space."""

import numpy as np

NEGATIVE = "negative"
NEUTRAL = "neutral"
POSITIVE = "positive"

# Fixed class order everywhere: index 0 = negative, 1 = neutral, 2 = positive.
LABELS = (NEGATIVE, NEUTRAL, POSITIVE)
LABEL_INDEX = {label: i for i, label in enumerate(LABELS)}

_ALIASES = {
    "neg": NEGATIVE, "negative": NEGATIVE,
    "neu": NEUTRAL, "neutral": NEUTRAL,
    "pos": POSITIVE, "positive": POSITIVE,
}


def normalize_label(raw: str) -> str:
    """Map raw sentiment strings (POS/NEU/NEG or full words) to canonical labels."""
    key = raw.strip().lower()
    if key not in _ALIASES:
        raise ValueError(f"unknown sentiment label: {raw!r}")
    return _ALIASES[key]


def argmax_index(scores) -> int:
    """Argmax over class scores; ties break toward the higher class index."""
    scores = np.asarray(scores)
    rev = scores[::-1]
    return len(scores) - 1 - int(np.argmax(rev))


def argmax_label(scores) -> str:
    return LABELS[argmax_index(scores)]
