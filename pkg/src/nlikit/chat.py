"""Minimal chat-completion client for the name-origin labeling stage.

Any OpenAI-style endpoint works: POST {model, messages, temperature}
returns {choices: [{message: {content}}]}. Responses are cached so a
warm cache replays a labeling run with zero network traffic.
"""

from __future__ import annotations

import json
import os
import time
from typing import Callable, Protocol

import requests

from .errors import NlikitError
from .http import DiskCache, RateLimiter, request_key

API_KEY_ENV = "NLIKIT_CHAT_API_KEY"


class ChatError(NlikitError):
    """Transport or protocol failure talking to the chat endpoint."""


class ChatBackend(Protocol):
    def complete(self, system: str, user: str) -> str: ...


class ChatCompletionClient:
    def __init__(
        self,
        base_url: str,
        model: str,
        cache: DiskCache,
        temperature: float = 0.0,
        api_key: str | None = None,
        requests_per_second: float = 4.0,
        session: requests.Session | None = None,
        retries: int = 4,
        backoff: float = 0.5,
        sleep: Callable[[float], None] = time.sleep,
        bypass_cache: bool = False,
    ) -> None:
        self.url = base_url.rstrip("/") + "/chat/completions"
        self.model = model
        self.temperature = temperature
        self.cache = cache
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.limiter = RateLimiter(requests_per_second, sleep=sleep)
        self.session = session or requests.Session()
        self.retries = retries
        self.backoff = backoff
        self._sleep = sleep
        self.bypass_cache = bypass_cache

    def _body(self, system: str, user: str) -> dict:
        return {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": self.temperature,
        }

    def complete(self, system: str, user: str) -> str:
        body = self._body(system, user)
        key = request_key(self.url, body)
        entry = None if self.bypass_cache else self.cache.get(key)
        if entry is None:
            payload = self._post(body)
            entry = self.cache.put(key, payload)
        response = json.loads(entry.payload.decode("utf-8"))
        try:
            return response["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ChatError(f"chat response missing choices[0].message.content: {exc}") from exc

    def _post(self, body: dict) -> bytes:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        last_status = None
        for attempt in range(self.retries + 1):
            self.limiter.acquire()
            response = self.session.post(self.url, json=body, headers=headers, timeout=60)
            if response.status_code == 200:
                return response.content
            last_status = response.status_code
            if response.status_code in (429, 500, 502, 503, 504) and attempt < self.retries:
                self._sleep(self.backoff * (2**attempt))
                continue
            break
        raise ChatError(f"chat endpoint returned HTTP {last_status}")
