"""Semi-automated native-language labeling of papers.

Three stages: predict each author's likely countries of origin from the
name, verify the prediction against affiliation countries, then require
the key authors (first, second, last) to agree before mapping the shared
country to a language label. Every author keeps a rule trace so labels
stay auditable; all rule failures are verdicts, never exceptions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Protocol, Sequence

from .chat import ChatBackend
from .errors import NlikitError
from .labels import MappingTable, map_country_to_language
from .prompts import build_name_origin_prompt
from .records import AuthorRecord, PaperRecord, is_country_code, normalize_country

DEFAULT_ENGLISH_COUNTRIES = frozenset({"US", "GB"})
# Operators may widen the exclusion to other anglophone countries.
EXTENDED_ENGLISH_COUNTRIES = DEFAULT_ENGLISH_COUNTRIES | {"CA", "AU", "NZ", "IE"}

_ARRAY = re.compile(r"\[([^\[\]]*)\]")
_QUOTED = re.compile(r"[\"'“”‘’]([^\"'“”‘’]*)[\"'“”‘’]")


class MalformedResponse(NlikitError):
    """The model output does not contain a usable two-country array."""


class AlignmentError(NlikitError):
    """Verified-author list does not line up with the paper's authors."""


@dataclass(frozen=True)
class OriginPrediction:
    """Top-2 candidate countries for one author name, in model order."""

    author_name: str
    candidates: tuple[str, str]
    raw_response: str

    def __post_init__(self) -> None:
        if len(self.candidates) != 2:
            raise ValueError("exactly 2 candidate countries required")
        bad = [c for c in self.candidates if not is_country_code(c)]
        if bad:
            raise ValueError(f"invalid candidate codes: {bad}")


class Verdict(str, Enum):
    VERIFIED = "verified"
    NO_INTERSECTION = "no_intersection"
    ENGLISH_IMMERSION_EXCLUDED = "english_immersion_excluded"
    COUNTRY_UNKNOWN = "country_unknown"
    PREDICTION_FAILED = "prediction_failed"


@dataclass(frozen=True)
class VerifiedAuthor:
    author: AuthorRecord
    verdict: Verdict
    country: str | None
    trace: tuple[str, ...]

    def __post_init__(self) -> None:
        if (self.verdict is Verdict.VERIFIED) != (self.country is not None):
            raise ValueError("country is carried exactly by Verified verdicts")
        if not self.trace:
            raise ValueError("every verdict requires a non-empty trace")


class UnlabeledReason(str, Enum):
    TOO_MANY_AUTHORS = "too_many_authors"
    KEY_AUTHOR_UNVERIFIED = "key_author_unverified"
    KEY_AUTHOR_DISAGREEMENT = "key_author_disagreement"
    UNMAPPED_COUNTRY = "unmapped_country"


@dataclass(frozen=True)
class Consensus:
    country: str | None
    key_positions: tuple[int, ...]
    reason: UnlabeledReason | None


@dataclass(frozen=True)
class Unlabeled:
    """A paper the rules refused to label, with the audit trail."""

    paper: PaperRecord
    reason: UnlabeledReason
    key_positions: tuple[int, ...] = ()
    provenance: tuple[VerifiedAuthor, ...] = ()


@dataclass(frozen=True)
class LabeledPaper:
    paper: PaperRecord
    label: str
    country: str
    key_authors: tuple[int, ...]
    provenance: tuple[VerifiedAuthor, ...]


def build_name_origin_request(name: str) -> tuple[str, str]:
    """(system, user) pair for the name-origin prediction call."""
    bundle = build_name_origin_prompt(name)
    return bundle.system, bundle.user


def parse_origin_response(raw: str) -> tuple[str, str]:
    """Extract the first bracketed array of two quoted country codes.

    Tolerant of chatter around the array and of lowercase or curly-quoted
    codes, but strict on arity: anything other than exactly two valid
    codes is malformed.
    """
    for match in _ARRAY.finditer(raw):
        tokens = [t.strip() for t in _QUOTED.findall(match.group(1))]
        if not tokens:
            continue
        codes = tuple(normalize_country(t) for t in tokens)
        if len(codes) != 2:
            raise MalformedResponse(f"expected 2 country codes, found {len(codes)}: {raw!r}")
        bad = [c for c in codes if not is_country_code(c)]
        if bad:
            raise MalformedResponse(f"invalid country codes {bad} in response: {raw!r}")
        return codes  # type: ignore[return-value]
    raise MalformedResponse(f"no bracketed array of quoted codes in response: {raw!r}")


def verify_author(
    author: AuthorRecord,
    pred: OriginPrediction,
    english_countries: frozenset[str] = DEFAULT_ENGLISH_COUNTRIES,
) -> VerifiedAuthor:
    """Intersect predicted origin with affiliation; never raises.

    The first-ranked candidate found among the affiliations wins. A
    non-English winner who also holds an affiliation in an
    English-speaking country is excluded as a likely immersion case.
    """
    candidates = tuple(normalize_country(c) for c in pred.candidates)
    affiliations = frozenset(normalize_country(c) for c in author.affiliation_countries)
    english = frozenset(normalize_country(c) for c in english_countries)
    trace = [
        f"candidates={list(candidates)}",
        f"affiliations={sorted(affiliations)}",
    ]

    if not affiliations:
        trace.append("no affiliation country on record -> country unknown")
        return VerifiedAuthor(author, Verdict.COUNTRY_UNKNOWN, None, tuple(trace))

    matched = [c for c in candidates if c in affiliations]
    if not matched:
        trace.append("no candidate matches an affiliation country -> no intersection")
        return VerifiedAuthor(author, Verdict.NO_INTERSECTION, None, tuple(trace))

    chosen = matched[0]
    if len(matched) == 2:
        trace.append(f"both candidates match affiliations; keeping first-ranked {chosen}")
    else:
        trace.append(f"candidate {chosen} matches affiliations")

    english_ties = sorted(affiliations & english)
    if chosen not in english and english_ties:
        trace.append(
            f"non-English origin {chosen} with English-speaking affiliation(s) "
            f"{english_ties} -> excluded for immersion risk"
        )
        return VerifiedAuthor(author, Verdict.ENGLISH_IMMERSION_EXCLUDED, None, tuple(trace))

    trace.append(f"verified country {chosen}")
    return VerifiedAuthor(author, Verdict.VERIFIED, chosen, tuple(trace))


MAX_AUTHORS = 5


def key_positions(author_count: int) -> tuple[int, ...]:
    """First, second, and last author positions, clamped and deduplicated."""
    if author_count < 1:
        raise ValueError("author_count must be >= 1")
    return tuple(sorted({0, min(1, author_count - 1), author_count - 1}))


def paper_consensus(paper: PaperRecord, verified: Sequence[VerifiedAuthor]) -> Consensus:
    """Require identical verified countries across the key authors."""
    if len(verified) != len(paper.authors):
        raise AlignmentError(
            f"{paper.paper_id}: {len(verified)} verdicts for {len(paper.authors)} authors"
        )
    if len(paper.authors) > MAX_AUTHORS:
        return Consensus(None, (), UnlabeledReason.TOO_MANY_AUTHORS)

    keys = key_positions(len(paper.authors))
    key_verdicts = [verified[i] for i in keys]
    if any(v.verdict is not Verdict.VERIFIED for v in key_verdicts):
        return Consensus(None, keys, UnlabeledReason.KEY_AUTHOR_UNVERIFIED)
    countries = {v.country for v in key_verdicts}
    if len(countries) > 1:
        return Consensus(None, keys, UnlabeledReason.KEY_AUTHOR_DISAGREEMENT)
    return Consensus(key_verdicts[0].country, keys, None)


class OriginPredictor(Protocol):
    def predict(self, name: str) -> OriginPrediction: ...


class ChatOriginPredictor:
    """Name-origin prediction through a chat-completion backend."""

    def __init__(self, backend: ChatBackend) -> None:
        self.backend = backend

    def predict(self, name: str) -> OriginPrediction:
        system, user = build_name_origin_request(name)
        raw = self.backend.complete(system, user)
        return OriginPrediction(name, parse_origin_response(raw), raw)


@dataclass
class LabelingConfig:
    english_countries: frozenset[str] = DEFAULT_ENGLISH_COUNTRIES
    mapping_table: MappingTable | None = None

    def __post_init__(self) -> None:
        self.english_countries = frozenset(
            normalize_country(c) for c in self.english_countries
        )


def label_paper(
    paper: PaperRecord,
    predictor: OriginPredictor,
    config: LabelingConfig | None = None,
) -> LabeledPaper | Unlabeled:
    """Run predict -> verify -> consensus -> map for one paper.

    Rule-based refusals come back as Unlabeled values with full
    provenance; transport errors from the predictor propagate so callers
    can distinguish infrastructure failures from labeling outcomes.
    """
    config = config or LabelingConfig()
    provenance: list[VerifiedAuthor] = []
    for author in paper.authors:
        try:
            pred = predictor.predict(author.display_name)
        except MalformedResponse as exc:
            provenance.append(
                VerifiedAuthor(
                    author,
                    Verdict.PREDICTION_FAILED,
                    None,
                    (f"origin prediction failed: {exc}",),
                )
            )
            continue
        provenance.append(verify_author(author, pred, config.english_countries))

    consensus = paper_consensus(paper, provenance)
    if consensus.reason is not None:
        return Unlabeled(paper, consensus.reason, consensus.key_positions, tuple(provenance))

    label = map_country_to_language(consensus.country, config.mapping_table)
    if label is None:
        return Unlabeled(
            paper, UnlabeledReason.UNMAPPED_COUNTRY, consensus.key_positions, tuple(provenance)
        )
    return LabeledPaper(paper, label, consensus.country, consensus.key_positions, tuple(provenance))
