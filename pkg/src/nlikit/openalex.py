"""OpenAlex works client with polite rate limiting and offline caching."""

from __future__ import annotations

import json
import os
import time
from typing import Callable

import requests

from .errors import NlikitError
from .http import DiskCache, RateLimiter, request_key
from .records import (
    AuthorRecord,
    MissingYear,
    PaperRecord,
    extract_year,
    normalize_country,
    normalize_ws,
)

DEFAULT_BASE_URL = "https://api.openalex.org"
MAILTO_ENV = "OPENALEX_MAILTO"
RETRY_STATUSES = frozenset({429, 500, 502, 503, 504})


class NotFound(NlikitError):
    """The upstream API does not know this work id."""


class Malformed(NlikitError):
    """The response lacks fields required to build a PaperRecord."""


class RateLimited(NlikitError):
    """Retry budget exhausted while the API kept answering 429."""


def reconstruct_abstract(inverted_index: dict) -> str:
    """Rebuild abstract text from the inverted word-position index."""
    slots: dict[int, str] = {}
    for word, positions in inverted_index.items():
        for pos in positions:
            slots[pos] = word
    return " ".join(slots[pos] for pos in sorted(slots))


def normalize_work(raw: dict) -> PaperRecord:
    """Turn a raw works payload into a validated PaperRecord."""
    authorships = raw.get("authorships")
    if not authorships:
        raise Malformed(f"work {raw.get('id', '?')}: missing authorships")
    try:
        year = extract_year(raw)
    except MissingYear as exc:
        raise Malformed(f"work {raw.get('id', '?')}: {exc}") from exc

    authors = []
    for pos, ship in enumerate(authorships):
        name = (ship.get("author") or {}).get("display_name") or ship.get("raw_author_name") or ""
        countries = set(ship.get("countries") or [])
        for inst in ship.get("institutions") or []:
            code = inst.get("country_code")
            if code:
                countries.add(code)
        # Institutions without a country code contribute nothing; such
        # authors surface downstream as country-unknown rather than guesses.
        authors.append(
            AuthorRecord(name, pos, frozenset(normalize_country(c) for c in countries if c))
        )

    abstract = raw.get("abstract")
    if not abstract and raw.get("abstract_inverted_index"):
        abstract = reconstruct_abstract(raw["abstract_inverted_index"])
    title = raw.get("display_name") or raw.get("title") or ""
    venue = ""
    location = raw.get("primary_location") or {}
    source = location.get("source") or {}
    venue = source.get("display_name") or (raw.get("host_venue") or {}).get("display_name") or ""

    try:
        return PaperRecord(
            paper_id=str(raw.get("id") or raw.get("paper_id")),
            title=normalize_ws(title),
            abstract=normalize_ws(abstract or ""),
            year=year,
            venue=normalize_ws(venue),
            authors=tuple(authors),
        )
    except ValueError as exc:
        raise Malformed(str(exc)) from exc


class OpenAlexClient:
    """Works-by-id lookup backed by an on-disk cache.

    A warm cache serves requests byte-identically with zero network
    traffic; ``bypass_cache`` forces a refetch for operators who want
    fresh metadata.
    """

    def __init__(
        self,
        cache: DiskCache,
        base_url: str = DEFAULT_BASE_URL,
        mailto: str | None = None,
        requests_per_second: float = 10.0,
        session: requests.Session | None = None,
        retries: int = 4,
        backoff: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
        bypass_cache: bool = False,
    ) -> None:
        self.cache = cache
        self.base_url = base_url.rstrip("/")
        self.mailto = mailto if mailto is not None else os.environ.get(MAILTO_ENV)
        self.limiter = RateLimiter(requests_per_second, sleep=sleep)
        self.session = session or requests.Session()
        self.retries = retries
        self.backoff = backoff
        self._sleep = sleep
        self.bypass_cache = bypass_cache

    def _request_key(self, work_id: str) -> str:
        # The polite-pool mailto identifies the operator, not the content,
        # so it stays out of the cache key.
        return request_key(f"{self.base_url}/works/{work_id}")

    def _http_get(self, work_id: str) -> bytes:
        url = f"{self.base_url}/works/{work_id}"
        params = {"mailto": self.mailto} if self.mailto else {}
        last_status = None
        for attempt in range(self.retries + 1):
            self.limiter.acquire()
            response = self.session.get(url, params=params, timeout=30)
            if response.status_code == 200:
                return response.content
            if response.status_code == 404:
                raise NotFound(f"work {work_id} unknown upstream")
            last_status = response.status_code
            if response.status_code in RETRY_STATUSES and attempt < self.retries:
                self._sleep(self.backoff * (2**attempt))
                continue
            break
        if last_status == 429:
            raise RateLimited(f"work {work_id}: retry budget exhausted on 429")
        raise Malformed(f"work {work_id}: upstream returned HTTP {last_status}")

    def get_work_raw(self, work_id: str) -> dict:
        if not work_id:
            raise ValueError("work_id must be non-empty")
        key = self._request_key(work_id)
        entry = None if self.bypass_cache else self.cache.get(key)
        if entry is None:
            payload = self._http_get(work_id)
            entry = self.cache.put(key, payload)
        return json.loads(entry.payload.decode("utf-8"))


def fetch_work(paper_id: str, client: OpenAlexClient) -> PaperRecord:
    """Fetch one work and normalize it; repeated calls hit the cache."""
    return normalize_work(client.get_work_raw(paper_id))
