"""Byte-exact prompt assembly for the three prompting regimes.

System texts live as checksummed template assets; any drift between a
template file and its recorded checksum fails fast, because downstream
runs depend on prompts being byte-identical across machines and time.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import NlikitError
from .labels import L1_LABELS, is_l1_label

TEMPLATE_NAMES = ("name_origin_system.txt", "fewshot_system.txt", "finetune_system.txt")

EXEMPLAR_BLOCK = "Text: {title} {abstract}\nNative Language: {label}\n\n"
CLASSIFY_LINE = "Classify the native language: {title} {abstract}"
NAME_ORIGIN_USER = "Name: {name}"
FINETUNE_USER = (
    "Analyze the following text and determine the author's native language.\n"
    "Text: {title} {abstract}\n"
    "Native Language:"
)


class Regime(str, Enum):
    NAME_ORIGIN = "name_origin"
    FEW_SHOT = "fewshot"
    FINE_TUNE = "finetune"


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str
    regime: Regime


class TemplateIntegrityError(NlikitError):
    """A template's bytes no longer match the recorded checksum."""


class DuplicateExemplarLabel(NlikitError):
    """Two few-shot exemplars carry the same label."""


def _template_dir() -> Path:
    with resources.as_file(resources.files("nlikit") / "templates") as path:
        return path


def recorded_checksums(template_dir: str | Path | None = None) -> dict[str, str]:
    """Parse the CHECKSUMS.sha256 manifest shipped next to the templates."""
    root = Path(template_dir) if template_dir else _template_dir()
    checksums: dict[str, str] = {}
    for line in (root / "CHECKSUMS.sha256").read_text(encoding="utf-8").splitlines():
        if line.strip():
            digest, name = line.split()
            checksums[name] = digest
    return checksums


def verify_templates(template_dir: str | Path | None = None) -> dict[str, str]:
    """Check every template against its recorded checksum; return the map."""
    root = Path(template_dir) if template_dir else _template_dir()
    checksums = recorded_checksums(root)
    for name in TEMPLATE_NAMES:
        recorded = checksums.get(name)
        if recorded is None:
            raise TemplateIntegrityError(f"no recorded checksum for template {name}")
        actual = hashlib.sha256((root / name).read_bytes()).hexdigest()
        if actual != recorded:
            raise TemplateIntegrityError(
                f"template {name} drifted: sha256 {actual} != recorded {recorded}"
            )
    return checksums


@lru_cache(maxsize=None)
def _load_verified(name: str) -> str:
    root = _template_dir()
    verify_templates(root)
    text = (root / name).read_text(encoding="utf-8")
    return text.replace("\r\n", "\n")


def build_name_origin_prompt(name: str) -> PromptBundle:
    """System prompt demanding a two-country array, user carrying the name.

    The name passes through verbatim; internal whitespace and newlines are
    never mutated here.
    """
    if not name:
        raise ValueError("name must be non-empty")
    return PromptBundle(
        system=_load_verified("name_origin_system.txt"),
        user=NAME_ORIGIN_USER.format(name=name),
        regime=Regime.NAME_ORIGIN,
    )


def build_fewshot_prompt(
    title: str, abstract: str, exemplars: list[tuple[str, str, str]]
) -> PromptBundle:
    """Assemble the few-shot classification prompt.

    ``exemplars`` are (title, abstract, label) triples in the caller's
    order, each label distinct; the query line comes last.
    """
    if not title or not abstract:
        raise ValueError("title and abstract must be non-empty")
    seen: set[str] = set()
    blocks = []
    for ex_title, ex_abstract, ex_label in exemplars:
        if not is_l1_label(ex_label):
            raise ValueError(f"exemplar label {ex_label!r} outside the closed set")
        if ex_label in seen:
            raise DuplicateExemplarLabel(f"exemplar label {ex_label!r} appears twice")
        seen.add(ex_label)
        blocks.append(EXEMPLAR_BLOCK.format(title=ex_title, abstract=ex_abstract, label=ex_label))
    user = "".join(blocks) + CLASSIFY_LINE.format(title=title, abstract=abstract)
    return PromptBundle(
        system=_load_verified("fewshot_system.txt"), user=user, regime=Regime.FEW_SHOT
    )


def build_finetune_example(title: str, abstract: str, label: str) -> tuple[PromptBundle, str]:
    """One supervised example: prompt bundle plus the completion string."""
    if not title or not abstract:
        raise ValueError("title and abstract must be non-empty")
    if not is_l1_label(label):
        raise ValueError(f"label {label!r} outside the closed set {L1_LABELS}")
    bundle = PromptBundle(
        system=_load_verified("finetune_system.txt"),
        user=FINETUNE_USER.format(title=title, abstract=abstract),
        regime=Regime.FINE_TUNE,
    )
    return bundle, label
