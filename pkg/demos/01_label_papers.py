"""
Native-Language Labeling Walkthrough
====================================

Labels papers by their authors' likely native language in three stages:
predict candidate countries of origin from each author name, verify the
prediction against affiliation countries, then require the key authors
(first, second, last) to agree before mapping the shared country to a
language label.

This demo runs fully offline with a canned predictor; swap in
``ChatOriginPredictor`` over a real chat endpoint for live runs.
"""

from nlikit.labeling import (
    ChatOriginPredictor,  # noqa: F401  (the live-endpoint counterpart)
    LabeledPaper,
    OriginPrediction,
    label_paper,
    parse_origin_response,
)
from nlikit.records import AuthorRecord, PaperRecord

print("Native-language labeling demo")
print("=" * 40)

###############################################################################
# A canned predictor
# ------------------
# The production predictor asks a chat model for the top-2 candidate
# countries behind a name. Here a lookup table plays that role.

CANNED = {
    "Wei Zhang": '["CN", "SG"]',
    "Li Chen": '["CN", "TW"]',
    "Hua Wang": '["CN", "US"]',
    "Marie Dupont": '["FR", "BE"]',
    "Takeshi Mori": '["JP", "US"]',
}


class CannedPredictor:
    def predict(self, name: str) -> OriginPrediction:
        raw = CANNED[name]
        return OriginPrediction(name, parse_origin_response(raw), raw)


###############################################################################
# A paper the rules can label
# ---------------------------
# Three authors, all verified to the same country: the consensus holds
# and the country maps onto the closed label set.

paper = PaperRecord(
    paper_id="demo-1",
    title="Character-Level Decoding for Neural Machine Translation",
    abstract="We study character-level decoding strategies for translation.",
    year=2019,
    venue="Demo Proceedings",
    authors=(
        AuthorRecord("Wei Zhang", 0, frozenset({"CN"})),
        AuthorRecord("Li Chen", 1, frozenset({"CN"})),
        AuthorRecord("Hua Wang", 2, frozenset({"CN"})),
    ),
)

outcome = label_paper(paper, CannedPredictor())
assert isinstance(outcome, LabeledPaper)
print(f"\n{paper.paper_id}: label={outcome.label} country={outcome.country}")
print(f"key authors: {outcome.key_authors}")
for verified in outcome.provenance:
    print(f"  {verified.author.display_name}: {verified.verdict.value}")
    for step in verified.trace:
        print(f"    - {step}")

###############################################################################
# A paper the rules refuse
# ------------------------
# A likely immersion case: the name suggests Japanese origin, but the
# author also holds a US affiliation, so the rules exclude rather than
# risk a wrong label. Refusals carry the same audit trail.

risky = PaperRecord(
    paper_id="demo-2",
    title="Discourse Connectives in Scientific Abstracts",
    abstract="An analysis of connective usage across venues.",
    year=2024,
    venue="Demo Proceedings",
    authors=(AuthorRecord("Takeshi Mori", 0, frozenset({"JP", "US"})),),
)

outcome = label_paper(risky, CannedPredictor())
print(f"\n{risky.paper_id}: unlabeled, reason={outcome.reason.value}")
for step in outcome.provenance[0].trace:
    print(f"    - {step}")
