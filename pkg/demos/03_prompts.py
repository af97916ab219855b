"""
Prompt Regimes
==============

Three byte-exact prompt payloads: name-origin prediction (for the
labeling stage), few-shot classification, and fine-tune examples with
completions. System texts are checksummed package assets, so a run on
any machine produces identical bytes or fails fast.
"""

from nlikit.labels import L1_LABELS, parse_label
from nlikit.prompts import (
    build_fewshot_prompt,
    build_finetune_example,
    build_name_origin_prompt,
    verify_templates,
)

print("Prompt assembly demo")
print("=" * 40)

###############################################################################
# Template integrity
# ------------------
# Every template's sha256 is recorded next to the assets; drift anywhere
# raises before any prompt is built.

checksums = verify_templates()
for name, digest in sorted(checksums.items()):
    print(f"  {name}: {digest[:16]}...")

###############################################################################
# Name-origin requests
# --------------------
# The system prompt demands a strict two-country array; the user turn
# carries the bare name.

bundle = build_name_origin_prompt("Marie Dupont")
print(f"\n[name-origin] user: {bundle.user!r}")
print(f"[name-origin] system ends: ...{bundle.system[-40:]!r}")

###############################################################################
# Few-shot classification
# -----------------------
# One exemplar per label (the caller's order is preserved), then the
# query line. Exemplar labels must be distinct.

title = "Robust Neural Topic Segmentation"
abstract = "We propose a segmentation approach for meeting transcripts."
exemplars = [
    (f"Example {label}", f"A short abstract in the {label} style.", label)
    for label in L1_LABELS
]
bundle = build_fewshot_prompt(title, abstract, exemplars)
print(f"\n[few-shot] {bundle.user.count(chr(10) + 'Native Language: ')} exemplar blocks")
print("[few-shot] query line:", bundle.user.splitlines()[-1][:70], "...")

###############################################################################
# Fine-tune examples
# ------------------
# A (prompt, completion) pair per training row; the completion is the
# bare lowercase label.

bundle, completion = build_finetune_example(title, abstract, "french")
print(f"\n[fine-tune] user:\n{bundle.user}")
print(f"[fine-tune] completion: {completion!r}")

###############################################################################
# Output parsing
# --------------
# Model outputs resolve against the closed label set; anything else is
# invalid, kept verbatim for audit, and scored as incorrect downstream.

for raw in ["french", " English_American.\n", "german!", "spanish", "I think korean"]:
    parsed = parse_label(raw)
    print(f"  parse_label({raw!r}) -> {parsed.value}")
