# Copyright 2026 The Report Triage Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the report_triage C++ core."""

import json
import os

from . import _core
from ._core import (
    ParseError,
    StageError,
    TrainingError,
    TriageError,
    ValidationError,
    aggregate_folds,
    augmented_size,
    average_precision,
    delete_words,
    find_pii,
)

__version__ = _core.__version__

__all__ = [
    "ParseError",
    "StageError",
    "TrainingError",
    "TriageError",
    "ValidationError",
    "aggregate_folds",
    "augment",
    "augmented_size",
    "average_precision",
    "best_f",
    "delete_words",
    "find_pii",
    "generate",
    "run_pipeline",
    "scrub",
    "scrub_reports",
    "split",
]


def _to_jsonl(reports):
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in reports)


def _from_jsonl(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def scrub(text):
    """Returns (scrubbed text, per-category counts with spans)."""
    out, report = _core.scrub(text)
    return out, json.loads(report)


def scrub_reports(reports, jobs=1):
    """Scrubs a list of report dicts; returns (reports, aggregate report)."""
    out, report = _core.scrub_jsonl(_to_jsonl(reports), jobs)
    return _from_jsonl(out), json.loads(report)


def best_f(scores, labels):
    """Best F over all thresholds as a dict."""
    threshold, f, precision, recall = _core.best_f(scores, labels)
    return {"threshold": threshold, "f": f, "precision": precision, "recall": recall}


def generate(spec=None, seed=0, pii_rate=None):
    """Synthetic reports as a list of dicts. `spec` is a corpus spec dict."""
    spec_json = None if spec is None else json.dumps(spec)
    return _from_jsonl(_core.generate(spec_json, seed, pii_rate))


def split(reports, dimension, k=2, seed=0):
    """Stratified folds for one dimension; returns (assignment, report)."""
    folds, report = _core.split(_to_jsonl(reports), dimension, k, seed)
    return json.loads(folds), json.loads(report)


def augment(reports, dimension, adr, af, seed=0):
    """Word-deletion augmentation of one dimension's view."""
    return _from_jsonl(_core.augment(_to_jsonl(reports), dimension, adr, af, seed))


def run_pipeline(config=None, base_dir=None, **overrides):
    """Runs the full pipeline and returns the metrics dict.

    `config` is a pipeline config dict; keyword arguments override its keys.
    """
    merged = dict(config or {})
    merged.update(overrides)
    for key in ("output_dir", "dataset", "corpus_spec", "taxonomy", "embeddings"):
        if isinstance(merged.get(key), os.PathLike):
            merged[key] = os.fspath(merged[key])
    return json.loads(_core.run_pipeline(json.dumps(merged), os.fspath(base_dir or "")))
