"""The eight rhetorical move labels and their registry.

Every other module refers to moves by their 3-letter code. The set of
codes is fixed: annotation files carrying any other code are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources


@dataclass(frozen=True)
class MoveLabel:
    code: str        # 3-letter uppercase code, e.g. "BAC"
    name: str        # full move name, e.g. "Background"
    definition: str  # prose description of the communicative function

    def __post_init__(self):
        if len(self.code) != 3 or not self.code.isupper():
            raise ValueError(f"label code must be 3 uppercase letters, got {self.code!r}")


MOVE_LABELS: tuple[MoveLabel, ...] = (
    MoveLabel("BAC", "Background",
              "States the research area and provides historical, theoretical, "
              "or empirical related information."),
    MoveLabel("GAP", "Gap",
              "Establishes a niche: indicates a gap, adds to what is known, "
              "presents positive justification."),
    MoveLabel("PUR", "Purpose",
              "Indicates purpose, thesis or hypothesis, outlines the intention "
              "behind the paper."),
    MoveLabel("MTD", "Method",
              "Provides information on design, procedures, assumptions, "
              "approach, data, etc."),
    MoveLabel("RST", "Result",
              "States main findings or results or what was accomplished."),
    MoveLabel("CLN", "Conclusion",
              "Summarizes the results or extends results beyond the scope of "
              "the paper."),
    MoveLabel("IMP", "Implication",
              "Draws inferences which have not been explicitly stated."),
    MoveLabel("CTN", "Contribution",
              "Points out the theoretical and practical value."),
)

LABEL_CODES: tuple[str, ...] = tuple(l.code for l in MOVE_LABELS)
LABEL_INDEX: dict[str, int] = {code: i for i, code in enumerate(LABEL_CODES)}
_BY_CODE: dict[str, MoveLabel] = {l.code: l for l in MOVE_LABELS}

N_LABELS = len(MOVE_LABELS)


def get_label(code: str) -> MoveLabel:
    """Look up a label by its 3-letter code; raises KeyError for unknown codes."""
    try:
        return _BY_CODE[code]
    except KeyError:
        raise KeyError(f"unknown move label code {code!r}; expected one of {LABEL_CODES}") from None


def is_valid_code(code: str) -> bool:
    return code in _BY_CODE


def label_colors() -> dict[str, str]:
    """Fixed code -> hex color palette shared with the review UI."""
    path = resources.files("movekit").joinpath("data/label_colors.json")
    return json.loads(path.read_text(encoding="utf-8"))
