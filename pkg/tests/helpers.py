"""Shared test utilities: oracles and fixture plumbing."""

from __future__ import annotations

import json
from fractions import Fraction
from math import comb
from pathlib import Path

from nlikit.labeling import LabeledPaper, MalformedResponse, OriginPrediction, Unlabeled

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def fisher_exact_rational(table) -> Fraction:
    """Exact two-sided p by rational enumeration of same-margin tables.

    Independent of the production implementation: integer hypergeometric
    weights, exact comparisons, no floats anywhere.
    """
    (a, b), (c, d) = table
    r1, r2, c1 = a + b, c + d, a + c
    n = r1 + r2
    lo, hi = max(0, c1 - r2), min(r1, c1)
    weights = {x: comb(r1, x) * comb(r2, c1 - x) for x in range(lo, hi + 1)}
    observed = weights[a]
    numerator = sum(w for w in weights.values() if w <= observed)
    return Fraction(numerator, comb(n, c1))


class StubPredictor:
    """Deterministic name -> canned-response lookup standing in for the LLM."""

    def __init__(self, responses: dict[str, str]):
        self.responses = responses
        self.calls = 0

    def predict(self, name: str) -> OriginPrediction:
        from nlikit.labeling import parse_origin_response

        self.calls += 1
        raw = self.responses.get(name)
        if raw is None:
            raise MalformedResponse(f"stub has no response for {name!r}")
        return OriginPrediction(name, parse_origin_response(raw), raw)


def outcome_obj(outcome: LabeledPaper | Unlabeled) -> dict:
    """Stable JSON shape for golden comparison of labeling outcomes."""
    if isinstance(outcome, LabeledPaper):
        return {
            "paper_id": outcome.paper.paper_id,
            "status": "labeled",
            "label": outcome.label,
            "country": outcome.country,
            "key_authors": list(outcome.key_authors),
            "verdicts": [v.verdict.value for v in outcome.provenance],
        }
    return {
        "paper_id": outcome.paper.paper_id,
        "status": "unlabeled",
        "reason": outcome.reason.value,
        "key_authors": list(outcome.key_positions),
        "verdicts": [v.verdict.value for v in outcome.provenance],
    }


def load_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line]


def dump_jsonl(objs: list[dict], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        "".join(json.dumps(o, ensure_ascii=False) + "\n" for o in objs), encoding="utf-8"
    )
