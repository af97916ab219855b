"""Pipeline configuration: one human-editable TOML or JSON file.

Secrets never live in the file; the polite-pool mail address and chat
API key come from environment variables at run time.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .chat import API_KEY_ENV as CHAT_API_KEY_ENV
from .corpus import SamplingConfig
from .errors import NlikitError
from .labeling import DEFAULT_ENGLISH_COUNTRIES
from .openalex import MAILTO_ENV


class ConfigInvalid(NlikitError):
    """The configuration file is missing or fails validation."""


@dataclass(frozen=True)
class FinetuneConfigRecord:
    """Hyperparameters preserved for the record; nothing here is executed."""

    epochs: int
    batch_size: int
    gradient_accumulation: int
    learning_rate: float
    lora_rank: int
    lora_alpha: int
    lora_dropout: float
    weight_decay: float


DEFAULT_FINETUNE_RECORDS: dict[str, FinetuneConfigRecord] = {
    "qwen3-14b": FinetuneConfigRecord(
        epochs=2,
        batch_size=8,
        gradient_accumulation=4,
        learning_rate=1.0e-3,
        lora_rank=16,
        lora_alpha=64,
        lora_dropout=0.0001,
        weight_decay=0.0,
    ),
    "gemma-3-12b-it": FinetuneConfigRecord(
        epochs=3,
        batch_size=16,
        gradient_accumulation=2,
        learning_rate=2.0e-4,
        lora_rank=16,
        lora_alpha=32,
        lora_dropout=0.1,
        weight_decay=0.01,
    ),
}


@dataclass
class Endpoints:
    metadata_base_url: str = "https://api.openalex.org"
    chat_base_url: str = "http://localhost:8000/v1"
    chat_model: str = "qwen3-8b"
    temperature: float = 0.0
    requests_per_second: float = 5.0
    mailto: str | None = None
    chat_api_key: str | None = None


@dataclass
class Paths:
    run_dir: str = "."
    cache_dir: str = ".nlikit-cache"
    work_ids: str = "work_ids.txt"
    papers: str = "papers.jsonl"
    labeled: str = "labeled.jsonl"
    unlabeled_audit: str = "unlabeled_audit.jsonl"
    corpus_dir: str = "corpus"
    exemplars: str = "exemplars.jsonl"
    prompts: str = "prompts.jsonl"
    predictions: str = "predictions.jsonl"
    report_dir: str = "report"
    mapping_table: str = ""

    def resolve(self, base: Path) -> "Paths":
        fields = {}
        for name, value in asdict(self).items():
            fields[name] = str((base / value)) if value else value
        return Paths(**fields)


@dataclass
class PipelineConfig:
    endpoints: Endpoints = field(default_factory=Endpoints)
    sampling: SamplingConfig = field(default_factory=lambda: SamplingConfig(rng_seed=1))
    paths: Paths = field(default_factory=Paths)
    english_countries: frozenset[str] = DEFAULT_ENGLISH_COUNTRIES
    alpha: float = 0.05
    finetune: dict[str, FinetuneConfigRecord] = field(
        default_factory=lambda: dict(DEFAULT_FINETUNE_RECORDS)
    )

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ConfigInvalid(f"alpha must be in (0, 1), got {self.alpha}")
        if not self.english_countries:
            raise ConfigInvalid("english_countries must be non-empty")

    def to_obj(self) -> dict:
        obj = {
            "endpoints": asdict(self.endpoints),
            "sampling": asdict(self.sampling),
            "paths": asdict(self.paths),
            "english_countries": sorted(self.english_countries),
            "alpha": self.alpha,
            "finetune": {name: asdict(rec) for name, rec in sorted(self.finetune.items())},
        }
        # Secrets stay out of manifests.
        obj["endpoints"]["mailto"] = bool(self.endpoints.mailto)
        obj["endpoints"]["chat_api_key"] = bool(self.endpoints.chat_api_key)
        return obj


def _parse_file(path: Path) -> dict:
    if not path.exists():
        raise ConfigInvalid(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc


def load_config(path: str | Path) -> PipelineConfig:
    """Load, validate, and resolve a pipeline config file eagerly.

    Relative paths resolve against the config file's directory; the
    OPENALEX_MAILTO and NLIKIT_CHAT_API_KEY environment variables supply
    the secrets.
    """
    path = Path(path)
    raw = _parse_file(path)
    try:
        endpoints = Endpoints(**raw.get("endpoints", {}))
        sampling_raw = dict(raw.get("sampling", {}))
        sampling_raw.setdefault("rng_seed", 1)
        sampling = SamplingConfig(**sampling_raw)
        paths = Paths(**raw.get("paths", {})).resolve(path.parent.resolve())
        finetune = dict(DEFAULT_FINETUNE_RECORDS)
        for name, rec in raw.get("finetune", {}).items():
            finetune[name] = FinetuneConfigRecord(**rec)
        config = PipelineConfig(
            endpoints=endpoints,
            sampling=sampling,
            paths=paths,
            english_countries=frozenset(raw.get("english_countries", DEFAULT_ENGLISH_COUNTRIES)),
            alpha=float(raw.get("alpha", 0.05)),
            finetune=finetune,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"{path}: {exc}") from exc

    if config.endpoints.mailto is None:
        config.endpoints.mailto = os.environ.get(MAILTO_ENV)
    if config.endpoints.chat_api_key is None:
        config.endpoints.chat_api_key = os.environ.get(CHAT_API_KEY_ENV)
    return config
