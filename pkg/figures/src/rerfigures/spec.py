"""Figure specification: which grid.csv panels to draw and how."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

KNOWN_SERIES = ("m_true", "m_rer", "m_cr", "m_pseudo")


class SchemaError(ValueError):
    """A spec or CSV does not match the expected schema."""


@dataclass(frozen=True)
class FigureSpec:
    panel_csvs: tuple
    labels: tuple
    series: tuple
    out_path: str

    def __post_init__(self):
        object.__setattr__(self, "panel_csvs", tuple(self.panel_csvs))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "series", tuple(self.series))
        if not 1 <= len(self.panel_csvs) <= 3:
            raise SchemaError("panel_csvs must list between 1 and 3 files")
        if len(self.labels) != len(self.panel_csvs):
            raise SchemaError("labels must match panel_csvs in length")
        if not self.series:
            raise SchemaError("series must be a nonempty list")
        for name in self.series:
            if name not in KNOWN_SERIES:
                raise SchemaError(f"unknown series {name!r}; expected a subset "
                                  f"of {KNOWN_SERIES}")
        suffix = self.out_path.rsplit(".", 1)[-1].lower()
        if suffix not in ("png", "svg"):
            raise SchemaError("out_path must end in .png or .svg")


def load_spec(path: str) -> FigureSpec:
    """Parse a JSON FigureSpec document; unknown keys are rejected."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise SchemaError("spec document must be a JSON object")
    allowed = {"panel_csvs", "labels", "series", "out_path"}
    for key in doc:
        if key not in allowed:
            raise SchemaError(f"unknown spec key {key!r}")
    for key in allowed:
        if key not in doc:
            raise SchemaError(f"missing spec key {key!r}")
    return FigureSpec(panel_csvs=doc["panel_csvs"], labels=doc["labels"],
                      series=doc["series"], out_path=doc["out_path"])
