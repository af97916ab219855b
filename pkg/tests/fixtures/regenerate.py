"""Regenerate checked-in fixtures and golden files.

Run from the repository root after an intentional behavior change:

    python tests/fixtures/regenerate.py

Golden files are reviewed by hand before committing; tests treat them as
frozen expectations, never as derived artifacts.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

TESTS = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(TESTS))

from helpers import StubPredictor, dump_jsonl, outcome_obj  # noqa: E402

from nlikit.corpus import Era  # noqa: E402
from nlikit.evalstats import era_report, fisher_csv, load_predictions, metrics_csv, report_json  # noqa: E402
from nlikit.labeling import label_paper  # noqa: E402
from nlikit.labels import L1_LABELS  # noqa: E402
from nlikit.prompts import (  # noqa: E402
    build_fewshot_prompt,
    build_finetune_example,
    build_name_origin_prompt,
)
from nlikit.records import load_dump  # noqa: E402

FIXTURES = TESTS / "fixtures"
GOLDEN = TESTS / "golden"

# name -> canned chat-completion text, standing in for recorded responses
ORIGIN_STUB = {
    "Minjun Park": '["KR", "JP"]',
    "Jiwoo Kim": '["KR", "US"]',
    "Seojun Lee": '["kr", "jp"]',
    "Wei Zhang": '["CN", "SG"]',
    "Li Chen": '["CN", "TW"]',
    "Hua Wang": '["CN", "US"]',
    "Xiaoming Liu": '["CN", "HK"]',
    "Hao Chen": '["CN", "SG"]',
    "Jun Kato": '["JP", "BR"]',
    "Yuki Tanaka": '["JP", "US"]',
    "Haruto Sato": 'Sure! ["jp","kr"]',
    "Ren Suzuki": '["JP", "PE"]',
    "Takeshi Mori": '["JP", "US"]',
    "Marie Dupont": '["FR", "BE"]',
    "Pierre Laurent": '["FR", "CH"]',
    "Camille Moreau": '["FR", "CA"]',
    "Luc Vandenberghe": '["FR", "BE"]',
    "Hans Gruber": '["DE", "AT"]',
    "Anna Schmidt": '["DE", "CH"]',
    "Stefan Weber": '["DE", "AT"]',
    "Giulia Rossi": '["IT", "CH"]',
    "Marco Bianchi": '["IT", "SM"]',
    "Elena Romano": '["IT", "ES"]',
    "Sofia Greco": '["IT", "MT"]',
    "Paolo Conti": '["IT", "CH"]',
    "John Miller": '["US", "GB"]',
    "Emily Carter": '["US", "CA"]',
    "Robert Hayes": '["US", "AU"]',
    "Oliver Bennett": '["GB", "IE"]',
    "Harry Whitfield": '["GB", "AU"]',
    "George Aldridge": '["GB", "NZ"]',
    "Urs Keller": '["CH", "DE"]',
    "Alex Ivanov": '["RU", "UA"]',
    "Glitchy Name": "The origin is unclear from the name alone.",
    "Joao Silva": '["BR", "PT"]',
}

# (paper_id, year, [(author name, [affiliation countries])])
PAPERS = [
    ("P01", 2014, [("Minjun Park", ["KR"])]),
    ("P02", 2018, [("Wei Zhang", ["CN"]), ("Li Chen", ["CN"]), ("Hua Wang", ["CN"])]),
    ("P03", 2020, [("Wei Zhang", ["CN"]), ("Li Chen", ["CN"]), ("Hua Wang", ["CN"]),
                   ("Xiaoming Liu", ["CN"]), ("Hao Chen", ["CN"]), ("Jun Kato", ["JP"])]),
    ("P04", 2021, [("Wei Zhang", ["CN"]), ("Jun Kato", ["JP"]), ("Li Chen", ["CN"]),
                   ("Hua Wang", ["CN"])]),
    ("P05", 2009, [("Marie Dupont", ["FR"]), ("Pierre Laurent", ["FR"])]),
    ("P06", 2011, [("Marie Dupont", ["FR"]), ("Hans Gruber", ["DE"])]),
    ("P07", 2013, [("John Miller", ["US"]), ("Emily Carter", ["US"]), ("Robert Hayes", ["US"])]),
    ("P08", 2015, [("Oliver Bennett", ["GB"]), ("Harry Whitfield", ["UK"]),
                   ("George Aldridge", ["GB"])]),
    ("P09", 2023, [("Takeshi Mori", ["JP", "US"])]),
    ("P10", 2024, [("Alex Ivanov", [])]),
    ("P11", 2019, [("Marie Dupont", ["DE"])]),
    ("P12", 2016, [("Urs Keller", ["CH"])]),
    ("P13", 2017, [("Giulia Rossi", ["IT"]), ("Marco Bianchi", ["IT"]), ("Elena Romano", ["IT"])]),
    ("P14", 2012, [("Hans Gruber", ["DE"]), ("Anna Schmidt", ["DE"]), ("Stefan Weber", ["DE"])]),
    ("P15", 2010, [("Jun Kato", ["JP"]), ("Yuki Tanaka", ["JP"]), ("Haruto Sato", ["JP"])]),
    ("P16", 2023, [("Minjun Park", ["KR"]), ("Jiwoo Kim", ["KR"]), ("Seojun Lee", ["KR"])]),
    ("P17", 2024, [("Marie Dupont", ["FR"]), ("Pierre Laurent", ["FR"]), ("Alex Ivanov", []),
                   ("Glitchy Name", ["CN"]), ("Camille Moreau", ["FR"])]),
    ("P18", 2022, [("Wei Zhang", ["CN"]), ("Li Chen", ["CN"]), ("Jun Kato", ["JP"]),
                   ("Hua Wang", ["CN"])]),
    ("P19", 2021, [("Glitchy Name", ["CN"])]),
    ("P20", 2015, [("Wei Zhang", ["CN"]), ("Li Chen", ["CN"]), ("Jun Kato", ["JP"])]),
    ("P21", 2008, [("Luc Vandenberghe", ["FR", "BE"]), ("Camille Moreau", ["FR", "BE"])]),
    ("P22", 2019, [("John Miller", ["US"]), ("Oliver Bennett", ["GB"]), ("Emily Carter", ["US"])]),
    ("P23", 2024, [("Hao Chen", ["CN", "US"])]),
    ("P24", 2020, [("Minjun Park", ["KR"]), ("Alex Ivanov", []), ("Seojun Lee", ["KR"])]),
    ("P25", 2014, [("Oliver Bennett", ["GB"]), ("George Aldridge", ["GB"]),
                   ("Harry Whitfield", ["GB"])]),
    ("P26", 2018, [("Giulia Rossi", ["IT"]), ("Marco Bianchi", ["IT"]), ("Elena Romano", ["IT"]),
                   ("Sofia Greco", ["IT"]), ("Paolo Conti", ["IT"])]),
    ("P27", 2025, [("Yuki Tanaka", ["JP"]), ("Haruto Sato", ["JP"]), ("Ren Suzuki", ["JP"]),
                   ("Jun Kato", ["JP"])]),
    ("P28", 2023, [("Hua Wang", ["CN"]), ("Xiaoming Liu", ["CN"])]),
    ("P29", 2001, [("Pierre Laurent", ["FR"]), ("Camille Moreau", ["FR"]),
                   ("Marie Dupont", ["FR"])]),
    ("P30", 2017, [("Joao Silva", ["BR"])]),
]

TOPICS = [
    "neural topic segmentation", "multilingual parsing", "discourse coherence",
    "low-resource translation", "coreference resolution", "argument mining",
    "semantic role labeling", "question answering", "summarization evaluation",
    "morphological analysis",
]


def paper_obj(paper_id: str, year: int, authors) -> dict:
    topic = TOPICS[int(paper_id[1:]) % len(TOPICS)]
    return {
        "paper_id": paper_id,
        "title": f"A Study of {topic.title()} ({paper_id})",
        "abstract": f"We investigate {topic} and report results on standard benchmarks. "
        f"This entry is fixture {paper_id}.",
        "year": year,
        "venue": "Fixture Proceedings",
        "authors": [{"name": name, "countries": countries} for name, countries in authors],
    }


def write_labeling_fixture() -> None:
    rows = [paper_obj(*spec) for spec in PAPERS]
    dump_jsonl(rows, FIXTURES / "labeling" / "papers.jsonl")
    (FIXTURES / "labeling" / "origin_stub.json").write_text(
        json.dumps(ORIGIN_STUB, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    dump = load_dump(FIXTURES / "labeling" / "papers.jsonl")
    assert not dump.violations, dump.violations
    predictor = StubPredictor(ORIGIN_STUB)
    outcomes = [outcome_obj(label_paper(record, predictor)) for record in dump.records]
    dump_jsonl(outcomes, GOLDEN / "labeled_30.jsonl")


def write_prompt_goldens() -> None:
    out = GOLDEN / "prompts"
    out.mkdir(parents=True, exist_ok=True)

    bundle = build_name_origin_prompt("Marie Dupont")
    (out / "name_origin.json").write_text(
        json.dumps({"system": bundle.system, "user": bundle.user}, indent=2) + "\n",
        encoding="utf-8",
    )

    title = "Robust Neural Topic Segmentation"
    abstract = "We propose a segmentation approach for meeting transcripts."
    exemplars = [
        (f"Example Title {label.title().replace('_', ' ')}",
         f"An abstract exemplifying the {label} style.", label)
        for label in L1_LABELS
    ]
    bundle = build_fewshot_prompt(title, abstract, exemplars)
    (out / "fewshot.json").write_text(
        json.dumps({"system": bundle.system, "user": bundle.user}, indent=2) + "\n",
        encoding="utf-8",
    )
    bundle = build_fewshot_prompt(title, abstract, [])
    (out / "fewshot_zero.json").write_text(
        json.dumps({"system": bundle.system, "user": bundle.user}, indent=2) + "\n",
        encoding="utf-8",
    )

    bundle, completion = build_finetune_example(title, abstract, "french")
    (out / "finetune.json").write_text(
        json.dumps(
            {"system": bundle.system, "user": bundle.user, "completion": completion}, indent=2
        )
        + "\n",
        encoding="utf-8",
    )


def write_report_goldens() -> None:
    """A small deterministic prediction set and its frozen report files."""
    rows = []
    eras = [(Era.PRE_NN, 2010), (Era.PRE_LLM, 2019), (Era.POST_LLM, 2024)]
    for era_index, (era, _) in enumerate(eras):
        for label_index, label in enumerate(L1_LABELS):
            for k in range(4):
                # Correctness degrades by era; every 11th output is junk.
                position = era_index * 32 + label_index * 4 + k
                if position % 11 == 10:
                    raw = "no idea"
                elif k < 3 - era_index or (k == 3 and label_index % 2 == 0):
                    raw = label
                else:
                    raw = L1_LABELS[(label_index + 3) % 8]
                rows.append(
                    {
                        "paper_id": f"{era.value}-{label}-{k}",
                        "era": era.value,
                        "gold": label,
                        "raw_output": raw,
                    }
                )
    dump_jsonl(rows, FIXTURES / "predictions.jsonl")

    records = load_predictions(FIXTURES / "predictions.jsonl")
    report = era_report(records, alpha=0.05)
    (GOLDEN / "report.json").write_text(report_json(report), encoding="utf-8")
    (GOLDEN / "metrics.csv").write_text(metrics_csv(report), encoding="utf-8")
    (GOLDEN / "fisher.csv").write_text(fisher_csv(report), encoding="utf-8")


if __name__ == "__main__":
    write_labeling_fixture()
    write_prompt_goldens()
    write_report_goldens()
    print("fixtures and goldens regenerated under", TESTS)
