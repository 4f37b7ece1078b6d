"""Provenance manifest accompanying every conversion."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class PrepManifest:
    """What was converted, with what toolchain, and how it reconciles.

    Invariant: ``sentences == emitted + failures`` — every input
    sentence is accounted for either by an output record or by a
    counted failure.
    """

    input_path: str
    output_path: str
    parser_model: str
    parser_version: str
    sentences: int
    emitted: int
    failures: int

    def __post_init__(self):
        if self.sentences != self.emitted + self.failures:
            raise ValueError(
                f"manifest does not reconcile: {self.sentences} sentences "
                f"!= {self.emitted} emitted + {self.failures} failures"
            )

    def to_json_line(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json_line(cls, line: str) -> "PrepManifest":
        return cls(**json.loads(line))
