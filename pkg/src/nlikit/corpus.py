"""Era partitioning and balanced corpus construction.

Sampling is a pure function of (pool, config): the pool is pre-sorted by
paper_id and every random draw flows from generators seeded per
(seed, purpose, cell), so corpora are byte-identical across runs and
machines.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import NlikitError
from .labels import L1_LABELS, is_l1_label
from .records import MIN_YEAR

PRE_NN_END = 2015
PRE_LLM_END = 2022
POST_LLM_END = 2025


class Era(str, Enum):
    PRE_NN = "pre-nn"
    PRE_LLM = "pre-llm"
    POST_LLM = "post-llm"


ERAS: tuple[Era, ...] = (Era.PRE_NN, Era.PRE_LLM, Era.POST_LLM)


class PostLlmRangeWarning(UserWarning):
    """Year falls past the defined post-LLM window; still binned there."""


def assign_era(year: int) -> Era:
    """Total, disjoint era assignment over valid publication years."""
    if year < MIN_YEAR:
        raise ValueError(f"year {year} before {MIN_YEAR}")
    if year <= PRE_NN_END:
        return Era.PRE_NN
    if year <= PRE_LLM_END:
        return Era.PRE_LLM
    if year > POST_LLM_END:
        warnings.warn(
            f"year {year} is past {POST_LLM_END}; assigning post-llm",
            PostLlmRangeWarning,
            stacklevel=2,
        )
    return Era.POST_LLM


class InsufficientPool(NlikitError):
    """A target count cannot be reached; carries the achievable maximum."""

    def __init__(self, message: str, achievable: int) -> None:
        super().__init__(f"{message} (achievable: {achievable})")
        self.achievable = achievable


class EmptyCell(NlikitError):
    """An (era, label) cell has zero unique papers; nothing to duplicate."""


@dataclass(frozen=True)
class PoolEntry:
    """One labeled paper as the samplers see it."""

    paper_id: str
    title: str
    abstract: str
    year: int
    label: str

    def __post_init__(self) -> None:
        if not is_l1_label(self.label):
            raise ValueError(f"{self.paper_id}: label {self.label!r} outside the closed set")

    @property
    def era(self) -> Era:
        return assign_era(self.year)


@dataclass(frozen=True)
class CorpusRow:
    paper_id: str
    era: Era
    label: str
    title: str
    abstract: str
    is_duplicate: bool = False


@dataclass
class SamplingConfig:
    per_language_train: int = 200
    per_cell_eval: int = 50
    per_year_cap: int = 20
    per_language_year_caps: dict[str, int] = field(default_factory=dict)
    rng_seed: int = 0
    allow_duplication: bool = True

    def __post_init__(self) -> None:
        counts = [self.per_language_train, self.per_cell_eval, self.per_year_cap]
        counts += list(self.per_language_year_caps.values())
        if any(c <= 0 for c in counts):
            raise ValueError("all sampling counts must be positive")

    def year_cap(self, label: str) -> int:
        return self.per_language_year_caps.get(label, self.per_year_cap)


@dataclass
class CellStats:
    unique_count: int
    duplicated_count: int


@dataclass
class CorpusManifest:
    """Bookkeeping for an evaluation corpus: per-cell counts and the seed."""

    cells: dict[tuple[Era, str], CellStats]
    seed: int
    per_cell_eval: int
    dedup_report: list[str] = field(default_factory=list)

    def check(self) -> None:
        for (era, label), stats in self.cells.items():
            if stats.unique_count + stats.duplicated_count != self.per_cell_eval:
                raise AssertionError(f"cell {era.value}/{label} counts do not sum to target")

    def to_obj(self) -> dict:
        return {
            "kind": "eval",
            "seed": self.seed,
            "per_cell_eval": self.per_cell_eval,
            "cells": {
                f"{era.value}/{label}": {
                    "unique_count": stats.unique_count,
                    "duplicated_count": stats.duplicated_count,
                }
                for (era, label), stats in sorted(self.cells.items())
            },
            "dedup_report": list(self.dedup_report),
        }


@dataclass
class TrainingManifest:
    seed: int
    per_language_train: int
    label_counts: dict[str, int]
    year_counts: dict[str, dict[int, int]]
    dedup_report: list[str] = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "kind": "train",
            "seed": self.seed,
            "per_language_train": self.per_language_train,
            "label_counts": dict(sorted(self.label_counts.items())),
            "year_counts": {
                label: {str(y): n for y, n in sorted(years.items())}
                for label, years in sorted(self.year_counts.items())
            },
            "dedup_report": list(self.dedup_report),
        }


def _sorted_pool(pool: Iterable[PoolEntry]) -> list[PoolEntry]:
    entries = sorted(pool, key=lambda e: e.paper_id)
    ids = [e.paper_id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("pool contains duplicate paper_ids")
    return entries


def sample_training(
    pool: Iterable[PoolEntry], cfg: SamplingConfig
) -> tuple[list[CorpusRow], TrainingManifest]:
    """Balanced training sample: a fixed count per label under per-year caps."""
    entries = _sorted_pool(pool)
    by_label: dict[str, list[PoolEntry]] = defaultdict(list)
    for entry in entries:
        by_label[entry.label].append(entry)

    rows: list[CorpusRow] = []
    label_counts: dict[str, int] = {}
    year_counts: dict[str, dict[int, int]] = {}
    for label in L1_LABELS:
        members = by_label.get(label, [])
        cap = cfg.year_cap(label)
        capacity = sum(min(n, cap) for n in Counter(e.year for e in members).values())
        if capacity < cfg.per_language_train:
            raise InsufficientPool(
                f"label {label!r}: cannot reach {cfg.per_language_train} under "
                f"per-year cap {cap}",
                achievable=capacity,
            )
        rng = random.Random(f"{cfg.rng_seed}:train:{label}")
        shuffled = members[:]
        rng.shuffle(shuffled)
        taken: list[PoolEntry] = []
        per_year: Counter[int] = Counter()
        for entry in shuffled:
            if len(taken) == cfg.per_language_train:
                break
            if per_year[entry.year] < cap:
                per_year[entry.year] += 1
                taken.append(entry)
        taken.sort(key=lambda e: e.paper_id)
        rows.extend(
            CorpusRow(e.paper_id, e.era, e.label, e.title, e.abstract, False) for e in taken
        )
        label_counts[label] = len(taken)
        year_counts[label] = dict(per_year)

    manifest = TrainingManifest(cfg.rng_seed, cfg.per_language_train, label_counts, year_counts)
    return rows, manifest


def build_eval_cells(
    pool: Iterable[PoolEntry], cfg: SamplingConfig
) -> tuple[list[CorpusRow], CorpusManifest]:
    """Exactly per_cell_eval rows for every (era, label) cell.

    Cells short of unique papers are topped up by duplicating members
    drawn uniformly with replacement; every duplicate is flagged in its
    row and counted in the manifest.
    """
    entries = _sorted_pool(pool)
    cells: dict[tuple[Era, str], list[PoolEntry]] = defaultdict(list)
    for entry in entries:
        cells[(entry.era, entry.label)].append(entry)

    rows: list[CorpusRow] = []
    manifest = CorpusManifest({}, cfg.rng_seed, cfg.per_cell_eval)
    for era in ERAS:
        for label in L1_LABELS:
            members = cells.get((era, label), [])
            if not members:
                raise EmptyCell(f"cell {era.value}/{label} has no unique papers")
            rng = random.Random(f"{cfg.rng_seed}:eval:{era.value}:{label}")
            if len(members) >= cfg.per_cell_eval:
                unique = sorted(rng.sample(members, cfg.per_cell_eval), key=lambda e: e.paper_id)
                duplicates: list[PoolEntry] = []
            else:
                if not cfg.allow_duplication:
                    raise InsufficientPool(
                        f"cell {era.value}/{label} has {len(members)} unique papers and "
                        f"duplication is disabled",
                        achievable=len(members),
                    )
                unique = members
                duplicates = rng.choices(members, k=cfg.per_cell_eval - len(members))
            rows.extend(
                CorpusRow(e.paper_id, era, label, e.title, e.abstract, False) for e in unique
            )
            rows.extend(
                CorpusRow(e.paper_id, era, label, e.title, e.abstract, True) for e in duplicates
            )
            manifest.cells[(era, label)] = CellStats(len(unique), len(duplicates))
    manifest.check()
    return rows, manifest


_WS_RUN = re.compile(r"\s+")


def content_fingerprint(title: str, abstract: str) -> str:
    """Whitespace- and case-insensitive content hash for deduplication."""
    norm_title = _WS_RUN.sub(" ", title).strip().casefold()
    norm_abstract = _WS_RUN.sub(" ", abstract).strip().casefold()
    return hashlib.sha256(f"{norm_title}\n{norm_abstract}".encode("utf-8")).hexdigest()


def cross_dedup(
    train: Sequence[CorpusRow], eval_rows: Sequence[CorpusRow]
) -> tuple[list[CorpusRow], list[str]]:
    """Drop training rows that also appear in the evaluation corpus.

    Matches on paper_id or on the normalized (title, abstract) hash, so
    re-identified papers with cosmetic whitespace differences still count.
    """
    eval_ids = {row.paper_id for row in eval_rows}
    eval_fingerprints = {content_fingerprint(row.title, row.abstract) for row in eval_rows}
    cleaned: list[CorpusRow] = []
    removed: list[str] = []
    for row in train:
        if row.paper_id in eval_ids or content_fingerprint(row.title, row.abstract) in eval_fingerprints:
            removed.append(row.paper_id)
        else:
            cleaned.append(row)
    return cleaned, removed


def load_pool(path: str | Path) -> list[PoolEntry]:
    """Read a labeled-paper JSONL into pool entries."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                entries.append(
                    PoolEntry(
                        paper_id=str(obj["paper_id"]),
                        title=str(obj["title"]),
                        abstract=str(obj["abstract"]),
                        year=int(obj["year"]),
                        label=str(obj["label"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise NlikitError(f"{path}:{lineno}: bad pool row: {exc}") from exc
    return entries


def corpus_row_obj(row: CorpusRow) -> dict:
    return {
        "paper_id": row.paper_id,
        "era": row.era.value,
        "label": row.label,
        "title": row.title,
        "abstract": row.abstract,
        "is_duplicate": row.is_duplicate,
    }


def write_corpus(rows: Iterable[CorpusRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(corpus_row_obj(row), ensure_ascii=False) + "\n")


def load_corpus(path: str | Path) -> list[CorpusRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            rows.append(
                CorpusRow(
                    paper_id=str(obj["paper_id"]),
                    era=Era(obj["era"]),
                    label=str(obj["label"]),
                    title=str(obj["title"]),
                    abstract=str(obj["abstract"]),
                    is_duplicate=bool(obj.get("is_duplicate", False)),
                )
            )
    return rows
