"""nlikit: native-language labeling, corpus building, and exact evaluation
for scholarly writing studies.

The package splits into small, file-coupled layers: metadata ingest
(:mod:`nlikit.records`, :mod:`nlikit.openalex`), the labeling rules
(:mod:`nlikit.labeling`), corpus sampling (:mod:`nlikit.corpus`), prompt
assembly (:mod:`nlikit.prompts`), and the statistics
(:mod:`nlikit.evalstats`, :mod:`nlikit.fisher`).
"""

from .corpus import (
    Era,
    SamplingConfig,
    assign_era,
    build_eval_cells,
    cross_dedup,
    sample_training,
)
from .evalstats import (
    ConfusionMatrix,
    MetricsReport,
    PredictionRecord,
    confusion_matrix,
    era_report,
    metrics,
)
from .fisher import FisherResult, compare_eras, fisher_exact_two_sided
from .labeling import (
    LabeledPaper,
    OriginPrediction,
    Unlabeled,
    Verdict,
    VerifiedAuthor,
    label_paper,
    paper_consensus,
    parse_origin_response,
    verify_author,
)
from .labels import L1_LABELS, ParsedLabel, map_country_to_language, parse_label
from .openalex import OpenAlexClient, fetch_work
from .prompts import (
    PromptBundle,
    Regime,
    build_fewshot_prompt,
    build_finetune_example,
    build_name_origin_prompt,
)
from .records import AuthorRecord, PaperRecord, extract_year, load_dump, write_dump

__version__ = "0.1.0"

__all__ = [
    "AuthorRecord",
    "ConfusionMatrix",
    "Era",
    "FisherResult",
    "L1_LABELS",
    "LabeledPaper",
    "MetricsReport",
    "OpenAlexClient",
    "OriginPrediction",
    "PaperRecord",
    "ParsedLabel",
    "PredictionRecord",
    "PromptBundle",
    "Regime",
    "SamplingConfig",
    "Unlabeled",
    "Verdict",
    "VerifiedAuthor",
    "assign_era",
    "build_eval_cells",
    "build_fewshot_prompt",
    "build_finetune_example",
    "build_name_origin_prompt",
    "compare_eras",
    "confusion_matrix",
    "cross_dedup",
    "era_report",
    "extract_year",
    "fetch_work",
    "fisher_exact_two_sided",
    "label_paper",
    "load_dump",
    "map_country_to_language",
    "metrics",
    "paper_consensus",
    "parse_label",
    "parse_origin_response",
    "sample_training",
    "verify_author",
    "write_dump",
]
