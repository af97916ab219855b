"""The closed native-language label set and the country-to-language map."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import NlikitError
from .records import is_country_code, normalize_country

# Serialization is fixed: lowercase with underscores, exactly as prompted.
L1_LABELS: tuple[str, ...] = (
    "english_american",
    "english_british",
    "french",
    "german",
    "italian",
    "chinese",
    "japanese",
    "korean",
)

_LABEL_SET = frozenset(L1_LABELS)
_TERMINAL_PUNCT = ".,;:!?\"'`"
_WS_RUN = re.compile(r"\s+")


def is_l1_label(value: str) -> bool:
    return value in _LABEL_SET


@dataclass(frozen=True)
class ParsedLabel:
    """A model output resolved against the closed set; None means invalid."""

    value: str | None
    raw: str

    @property
    def is_valid(self) -> bool:
        return self.value is not None


def parse_label(raw: str) -> ParsedLabel:
    """Resolve raw model output to a label, or Invalid.

    Normalization is deliberately narrow: case folding, trimming,
    terminal punctuation, and whitespace-to-underscore. Anything that
    still fails an exact match is invalid; no fuzzy matching across
    distinct labels.
    """
    text = raw.strip().strip(_TERMINAL_PUNCT).strip()
    text = _WS_RUN.sub("_", text).lower()
    return ParsedLabel(text if text in _LABEL_SET else None, raw)


class MappingError(NlikitError):
    """The mapping table file fails validation."""


@dataclass(frozen=True)
class MappingTable:
    """Validated country-code to L1-label mapping.

    The table must be injective: two countries never share a label, so a
    verified country always identifies one language.
    """

    entries: dict[str, str]

    def __post_init__(self) -> None:
        for code, label in self.entries.items():
            if not is_country_code(code):
                raise MappingError(f"bad country code {code!r} in mapping table")
            if label not in _LABEL_SET:
                raise MappingError(f"bad label {label!r} for {code} in mapping table")
        labels = list(self.entries.values())
        if len(set(labels)) != len(labels):
            raise MappingError("mapping table is not injective: duplicate labels")


def load_mapping_table(path: str | Path) -> MappingTable:
    """Load and validate a CSV mapping with header ``country_code,label``."""
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["country_code", "label"]:
            raise MappingError(f"{path}: expected header country_code,label")
        for row in reader:
            code = normalize_country(row["country_code"])
            if code in entries:
                raise MappingError(f"{path}: duplicate country {code}")
            entries[code] = row["label"].strip()
    return MappingTable(entries)


def default_mapping_table() -> MappingTable:
    """The static mapping shipped with the package (8 supported countries)."""
    with resources.as_file(resources.files("nlikit") / "data" / "country_language.csv") as path:
        return load_mapping_table(path)


def map_country_to_language(country: str, table: MappingTable | None = None) -> str | None:
    """Map a verified country to its language label; None when unmapped.

    Total on the supported countries and None everywhere else: countries
    without a single primary official language stay out of the table.
    """
    if table is None:
        table = default_mapping_table()
    return table.entries.get(normalize_country(country))
