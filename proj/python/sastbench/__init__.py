"""Python access to the sastbench core: scoring, combination search, SARIF
normalization and corpus scanning. Results come back as plain dicts."""

import json

from . import _sastbench
from ._sastbench import SastbenchError

__all__ = [
    "SastbenchError",
    "combine",
    "load_manifest",
    "normalize_sarif",
    "run_cli",
    "scan_corpus",
    "score",
    "score_counts",
]


def score_counts(tp, fp, fn):
    """Recall, precision and F1 for raw counts."""
    return json.loads(_sastbench.score_counts(tp, fp, fn))


def load_manifest(path):
    return json.loads(_sastbench.load_manifest(str(path)))


def scan_corpus(root, taxonomy="default"):
    """Manifest (and warnings) for a Juliet-style tree."""
    return json.loads(_sastbench.scan_corpus(str(root), taxonomy))


def normalize_sarif(document, rule_map="", target_root="."):
    """Findings of a SARIF document, one dict per finding."""
    text = _sastbench.normalize_sarif(document, rule_map, str(target_root))
    return [json.loads(line) for line in text.splitlines() if line]


def score(manifest, reports, window=0, lenient=False, rule_map="", rank_by="f1"):
    return json.loads(
        _sastbench.score(str(manifest), [str(r) for r in reports], window, lenient, rule_map, rank_by)
    )


def combine(manifest, reports, strategy="exhaustive", metric="f1", window=0, top=0):
    return json.loads(
        _sastbench.combine(str(manifest), [str(r) for r in reports], strategy, metric, window, top)
    )


def run_cli(*args):
    """Runs a sastbench command line in-process; returns (exit code, stdout, stderr)."""
    return _sastbench.run_cli([str(a) for a in args])
