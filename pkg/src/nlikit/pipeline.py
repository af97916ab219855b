"""Stage orchestration: fetch -> label -> build-corpus -> prompt -> evaluate -> compare.

Stages communicate only through files. Each run writes its outputs
atomically plus a manifest listing the resolved config, the template
checksums, and a content hash for every input and output file; a stage
that dies leaves a .FAILED marker next to its manifest instead of
half-written outputs.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import requests

from . import corpus as corpus_mod
from . import evalstats
from .chat import ChatCompletionClient
from .config import PipelineConfig
from .errors import NlikitError
from .http import DiskCache
from .labeling import (
    ChatOriginPredictor,
    LabeledPaper,
    LabelingConfig,
    OriginPredictor,
    label_paper,
)
from .labels import load_mapping_table
from .openalex import OpenAlexClient, fetch_work
from .prompts import Regime, build_fewshot_prompt, build_finetune_example, verify_templates
from .records import load_dump, record_to_obj

STAGES = ("fetch", "label", "build-corpus", "prompt", "evaluate", "compare")


class MissingInput(NlikitError):
    """A required input file for the stage does not exist."""


class StageFailed(NlikitError):
    """Wrapper around the underlying module error, for exit-code mapping."""


@dataclass
class StageResult:
    stage: str
    outputs: list[Path] = field(default_factory=list)
    manifest_path: Path | None = None


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _require(path: str | Path, what: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise MissingInput(f"{what} not found: {path}")
    return path


def _jsonl(objs: list[dict]) -> str:
    return "".join(json.dumps(obj, ensure_ascii=False) + "\n" for obj in objs)


class StageRunner:
    """Runs stages against a resolved config; clients are injectable."""

    def __init__(
        self,
        config: PipelineConfig,
        session: requests.Session | None = None,
        origin_predictor: OriginPredictor | None = None,
    ) -> None:
        self.config = config
        self.session = session
        self.origin_predictor = origin_predictor

    # -- client wiring ----------------------------------------------------

    def _metadata_client(self) -> OpenAlexClient:
        return OpenAlexClient(
            cache=DiskCache(self.config.paths.cache_dir),
            base_url=self.config.endpoints.metadata_base_url,
            mailto=self.config.endpoints.mailto,
            requests_per_second=self.config.endpoints.requests_per_second,
            session=self.session,
        )

    def _predictor(self) -> OriginPredictor:
        if self.origin_predictor is not None:
            return self.origin_predictor
        client = ChatCompletionClient(
            base_url=self.config.endpoints.chat_base_url,
            model=self.config.endpoints.chat_model,
            cache=DiskCache(self.config.paths.cache_dir),
            temperature=self.config.endpoints.temperature,
            api_key=self.config.endpoints.chat_api_key,
            requests_per_second=self.config.endpoints.requests_per_second,
            session=self.session,
        )
        return ChatOriginPredictor(client)

    def _labeling_config(self) -> LabelingConfig:
        table = None
        if self.config.paths.mapping_table:
            table = load_mapping_table(_require(self.config.paths.mapping_table, "mapping table"))
        return LabelingConfig(self.config.english_countries, table)

    # -- stages ------------------------------------------------------------

    def stage_fetch(self) -> dict[Path, str]:
        ids_path = _require(self.config.paths.work_ids, "work-ids file")
        client = self._metadata_client()
        ids = [line.strip() for line in ids_path.read_text(encoding="utf-8").splitlines()]
        records = [fetch_work(work_id, client) for work_id in ids if work_id]
        out = Path(self.config.paths.papers)
        return {out: _jsonl([record_to_obj(r) for r in records])}

    def stage_label(self) -> dict[Path, str]:
        papers_path = _require(self.config.paths.papers, "papers dump")
        dump = load_dump(papers_path)
        if dump.violations:
            lines = "; ".join(f"line {v.line_number}: {v.message}" for v in dump.violations[:5])
            raise StageFailed(f"papers dump has schema violations: {lines}")
        predictor = self._predictor()
        labeling_config = self._labeling_config()

        labeled_objs = []
        audit_objs = []
        for paper in dump.records:
            outcome = label_paper(paper, predictor, labeling_config)
            if isinstance(outcome, LabeledPaper):
                labeled_objs.append(labeled_paper_obj(outcome))
            else:
                audit_objs.append(
                    {
                        "paper_id": outcome.paper.paper_id,
                        "reason": outcome.reason.value,
                        "key_positions": list(outcome.key_positions),
                        "provenance": [
                            {
                                "position": v.author.position,
                                "name": v.author.display_name,
                                "verdict": v.verdict.value,
                                "country": v.country,
                                "trace": list(v.trace),
                            }
                            for v in outcome.provenance
                        ],
                    }
                )
        return {
            Path(self.config.paths.labeled): _jsonl(labeled_objs),
            Path(self.config.paths.unlabeled_audit): _jsonl(audit_objs),
        }

    def stage_build_corpus(self) -> dict[Path, str]:
        labeled_path = _require(self.config.paths.labeled, "labeled papers")
        pool = corpus_mod.load_pool(labeled_path)
        cfg = self.config.sampling
        train_rows, train_manifest = corpus_mod.sample_training(pool, cfg)
        eval_rows, eval_manifest = corpus_mod.build_eval_cells(pool, cfg)
        train_rows, removed = corpus_mod.cross_dedup(train_rows, eval_rows)
        train_manifest.dedup_report = removed

        out_dir = Path(self.config.paths.corpus_dir)
        return {
            out_dir / "train.jsonl": _jsonl([corpus_mod.corpus_row_obj(r) for r in train_rows]),
            out_dir / "eval.jsonl": _jsonl([corpus_mod.corpus_row_obj(r) for r in eval_rows]),
            out_dir / "train_manifest.json": json.dumps(
                train_manifest.to_obj(), indent=2, sort_keys=True
            )
            + "\n",
            out_dir / "eval_manifest.json": json.dumps(
                eval_manifest.to_obj(), indent=2, sort_keys=True
            )
            + "\n",
        }

    def stage_prompt(self, regime: Regime = Regime.FEW_SHOT) -> dict[Path, str]:
        corpus_dir = Path(self.config.paths.corpus_dir)
        objs = []
        if regime is Regime.FINE_TUNE:
            rows = corpus_mod.load_corpus(_require(corpus_dir / "train.jsonl", "training corpus"))
            for row in rows:
                bundle, completion = build_finetune_example(row.title, row.abstract, row.label)
                objs.append(
                    {
                        "paper_id": row.paper_id,
                        "system": bundle.system,
                        "user": bundle.user,
                        "completion": completion,
                    }
                )
        elif regime is Regime.FEW_SHOT:
            rows = corpus_mod.load_corpus(_require(corpus_dir / "eval.jsonl", "evaluation corpus"))
            exemplars = _load_exemplars(_require(self.config.paths.exemplars, "exemplars file"))
            for row in rows:
                chosen = exemplars.get(row.era, exemplars.get(None, []))
                bundle = build_fewshot_prompt(row.title, row.abstract, chosen)
                objs.append(
                    {"paper_id": row.paper_id, "system": bundle.system, "user": bundle.user}
                )
        else:
            raise StageFailed(f"prompt stage does not emit {regime.value} payloads")
        return {Path(self.config.paths.prompts): _jsonl(objs)}

    def stage_evaluate(self, alpha: float | None = None) -> dict[Path, str]:
        preds_path = _require(self.config.paths.predictions, "predictions file")
        records = evalstats.load_predictions(preds_path)
        report = evalstats.era_report(records, alpha if alpha is not None else self.config.alpha)
        out_dir = Path(self.config.paths.report_dir)
        outputs = {
            out_dir / "report.json": evalstats.report_json(report),
            out_dir / "metrics.csv": evalstats.metrics_csv(report),
        }
        for era, cm in report.matrices.items():
            outputs[out_dir / f"confusion_{era.value}.csv"] = evalstats.confusion_csv(cm)
        return outputs

    def stage_compare(self, alpha: float | None = None) -> dict[Path, str]:
        preds_path = _require(self.config.paths.predictions, "predictions file")
        records = evalstats.load_predictions(preds_path)
        report = evalstats.era_report(records, alpha if alpha is not None else self.config.alpha)
        out_dir = Path(self.config.paths.report_dir)
        fisher_obj = [
            {
                "comparison": f"{a.value} vs {b.value}",
                "table": [list(r.table[0]), list(r.table[1])],
                "p_value": r.p_value,
                "alpha": r.alpha,
                "significant": r.significant,
            }
            for (a, b), r in report.fisher.items()
        ]
        return {
            out_dir / "fisher.json": json.dumps(fisher_obj, indent=2, sort_keys=True) + "\n",
            out_dir / "fisher.csv": evalstats.fisher_csv(report),
        }


def _load_exemplars(path: Path) -> dict:
    """Group exemplar rows by era; rows without one apply to every era."""
    groups: dict = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            era = corpus_mod.Era(obj["era"]) if obj.get("era") else None
            groups.setdefault(era, []).append(
                (str(obj["title"]), str(obj["abstract"]), str(obj["label"]))
            )
    return groups


def labeled_paper_obj(labeled: LabeledPaper) -> dict:
    return {
        "paper_id": labeled.paper.paper_id,
        "title": labeled.paper.title,
        "abstract": labeled.paper.abstract,
        "year": labeled.paper.year,
        "venue": labeled.paper.venue,
        "label": labeled.label,
        "country": labeled.country,
        "key_authors": list(labeled.key_authors),
    }


def run_stage(
    name: str,
    config: PipelineConfig,
    *,
    session: requests.Session | None = None,
    origin_predictor: OriginPredictor | None = None,
    regime: Regime = Regime.FEW_SHOT,
    alpha: float | None = None,
) -> StageResult:
    """Execute one stage and write its outputs plus a manifest atomically."""
    if name not in STAGES:
        raise ValueError(f"unknown stage {name!r}; expected one of {STAGES}")
    runner = StageRunner(config, session=session, origin_predictor=origin_predictor)
    run_dir = Path(config.paths.run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    marker = run_dir / f"{name}.FAILED"

    try:
        if name == "fetch":
            outputs = runner.stage_fetch()
        elif name == "label":
            outputs = runner.stage_label()
        elif name == "build-corpus":
            outputs = runner.stage_build_corpus()
        elif name == "prompt":
            outputs = runner.stage_prompt(regime)
        elif name == "evaluate":
            outputs = runner.stage_evaluate(alpha)
        else:
            outputs = runner.stage_compare(alpha)

        for path, data in outputs.items():
            _atomic_write(path, data)

        manifest = {
            "stage": name,
            "config": config.to_obj(),
            "template_checksums": verify_templates(),
            "outputs": {str(p): _sha256_file(p) for p in sorted(outputs)},
        }
        manifest_path = run_dir / f"{name.replace('-', '_')}_manifest.json"
        _atomic_write(manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        if marker.exists():
            marker.unlink()
        return StageResult(name, sorted(outputs), manifest_path)
    except MissingInput:
        raise
    except NlikitError as exc:
        _atomic_write(marker, f"{type(exc).__name__}: {exc}\n")
        raise
    except Exception as exc:
        _atomic_write(marker, f"{type(exc).__name__}: {exc}\n")
        raise StageFailed(f"stage {name} failed: {exc}") from exc
