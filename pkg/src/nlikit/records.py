"""Core paper/author records and JSONL dump IO.

Dump schema (one JSON object per line):
    {paper_id, title, abstract, year, venue, authors: [{name, countries: []}]}
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import NlikitError

_WS_RUN = re.compile(r"\s+")

MIN_YEAR = 1950
MAX_YEAR = 2100


class MissingYear(NlikitError):
    """Raised when raw metadata carries neither a year nor a dated field."""


def normalize_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return _WS_RUN.sub(" ", text).strip()


def normalize_country(code: str) -> str:
    """Uppercase a country code; fold the colloquial UK onto GB."""
    code = code.strip().upper()
    return "GB" if code == "UK" else code


def is_country_code(code: str) -> bool:
    return len(code) == 2 and code.isalpha() and code.isascii() and code.isupper()


@dataclass(frozen=True)
class AuthorRecord:
    """One author slot on one paper."""

    display_name: str
    position: int
    affiliation_countries: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.position < 0:
            raise ValueError(f"author position must be >= 0, got {self.position}")
        bad = [c for c in self.affiliation_countries if not is_country_code(c)]
        if bad:
            raise ValueError(f"invalid country codes: {sorted(bad)}")


@dataclass(frozen=True)
class PaperRecord:
    """A normalized scholarly paper with an ordered author list."""

    paper_id: str
    title: str
    abstract: str
    year: int
    venue: str
    authors: tuple[AuthorRecord, ...]

    def __post_init__(self) -> None:
        if not self.paper_id:
            raise ValueError("paper_id must be non-empty")
        if not self.authors:
            raise ValueError(f"{self.paper_id}: author list must be non-empty")
        if not (MIN_YEAR <= self.year <= MAX_YEAR):
            raise ValueError(f"{self.paper_id}: year {self.year} outside [{MIN_YEAR}, {MAX_YEAR}]")
        if not normalize_ws(self.title) or not normalize_ws(self.abstract):
            raise ValueError(f"{self.paper_id}: title and abstract must be non-empty")
        positions = [a.position for a in self.authors]
        if len(set(positions)) != len(positions):
            raise ValueError(f"{self.paper_id}: duplicate author positions")


def extract_year(raw: dict) -> int:
    """Pull the publication year out of raw metadata.

    Prefers an explicit ``publication_year`` over the ``publication_date``
    prefix; raises :class:`MissingYear` when neither is usable.
    """
    year = raw.get("publication_year")
    if year is not None:
        return int(year)
    date = raw.get("publication_date")
    if date:
        head = str(date)[:4]
        if head.isdigit():
            return int(head)
    raise MissingYear("metadata has neither publication_year nor a parseable publication_date")


class DumpFormat(str, Enum):
    ANTHOLOGY = "anthology"
    ARXIV = "arxiv"


@dataclass(frozen=True)
class SchemaViolation:
    """One rejected dump line, kept for the load report."""

    line_number: int
    message: str


@dataclass
class DumpResult:
    records: list[PaperRecord] = field(default_factory=list)
    violations: list[SchemaViolation] = field(default_factory=list)


def _record_from_obj(obj: dict) -> PaperRecord:
    authors = []
    raw_authors = obj.get("authors")
    if not isinstance(raw_authors, list):
        raise ValueError("authors must be a list")
    for pos, a in enumerate(raw_authors):
        countries = frozenset(normalize_country(c) for c in a.get("countries", []))
        authors.append(AuthorRecord(str(a["name"]), pos, countries))
    return PaperRecord(
        paper_id=str(obj["paper_id"]),
        title=normalize_ws(str(obj["title"])),
        abstract=normalize_ws(str(obj["abstract"])),
        year=int(obj["year"]),
        venue=normalize_ws(str(obj.get("venue", ""))),
        authors=tuple(authors),
    )


def load_dump(path: str | Path, format: DumpFormat = DumpFormat.ANTHOLOGY) -> DumpResult:
    """Load a JSONL dump, collecting per-line schema violations.

    Records come back in file order. Bad lines never abort the load; each
    is reported with its 1-based line number.
    """
    DumpFormat(format)  # fail early on unknown format names
    result = DumpResult()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                result.records.append(_record_from_obj(obj))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                result.violations.append(SchemaViolation(lineno, f"{type(exc).__name__}: {exc}"))
    return result


def record_to_obj(record: PaperRecord) -> dict:
    return {
        "paper_id": record.paper_id,
        "title": record.title,
        "abstract": record.abstract,
        "year": record.year,
        "venue": record.venue,
        "authors": [
            {"name": a.display_name, "countries": sorted(a.affiliation_countries)}
            for a in record.authors
        ],
    }


def write_dump(records: Iterable[PaperRecord], path: str | Path) -> None:
    """Write records as JSONL in the documented dump schema."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_obj(record), ensure_ascii=False) + "\n")
