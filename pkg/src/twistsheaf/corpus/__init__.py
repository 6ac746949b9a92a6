"""Golden cases: problem documents with provenance-tagged expected values.

One JSON file per case under ``cases/``::

    {
      "name": "...",
      "description": "...",
      "document": {problem document},
      "expected": [
        {"path": "result/...", "value": ..., "tolerance": 1e-12,
         "provenance": {"tag": "DERIVED", "oracle": "name", "note": "..."}}
      ]
    }

Tags are PAPER (value stated in the source text), TRIVIAL (immediate from
a definition) or DERIVED (recomputed by a named function in
:mod:`twistsheaf.corpus.oracles`).  Verification runs every document
through the CLI and compares each golden value; DERIVED values are also
regenerated from their oracle, so a stale file and a drifting
implementation both show up.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .oracles import ORACLES

TAGS = {"PAPER", "TRIVIAL", "DERIVED"}
DEFAULT_TOLERANCE = 1e-9


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class GoldenCase:
    name: str
    description: str
    document: dict
    expected: tuple[dict, ...]
    path: Path | None = None

    @classmethod
    def load(cls, path: Path) -> GoldenCase:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        case = cls(data["name"], data.get("description", ""), data["document"], tuple(data["expected"]), Path(path))
        case.check_provenance()
        return case

    def check_provenance(self) -> None:
        if not self.expected:
            raise CorpusError(f"{self.name}: no golden values")
        for entry in self.expected:
            prov = entry.get("provenance")
            if not isinstance(prov, dict) or prov.get("tag") not in TAGS:
                raise CorpusError(f"{self.name}: value at {entry.get('path')} lacks a provenance tag")
            if prov["tag"] == "DERIVED" and prov.get("oracle") not in ORACLES:
                raise CorpusError(f"{self.name}: DERIVED value at {entry['path']} names no known oracle")


def cases_dir() -> Path:
    return Path(str(resources.files(__name__) / "cases"))


def load_cases(directory: Path | None = None) -> list[GoldenCase]:
    directory = cases_dir() if directory is None else Path(directory)
    return [GoldenCase.load(p) for p in sorted(directory.glob("*.json"))]


def lookup(doc: Any, path: str) -> Any:
    cur = doc
    for part in path.split("/"):
        if isinstance(cur, list):
            cur = cur[int(part)]
        elif isinstance(cur, dict) and part in cur:
            cur = cur[part]
        else:
            raise KeyError(path)
    return cur


def diff(expected: Any, actual: Any, tol: float, where: str = "") -> list[dict]:
    """Structural differences; floats compare with relative-or-absolute tol."""
    if isinstance(expected, dict) and isinstance(actual, dict):
        out = []
        for k in sorted(set(expected) | set(actual)):
            if k not in actual:
                out.append({"at": f"{where}/{k}", "expected": expected[k], "actual": "<missing>"})
            elif k not in expected:
                out.append({"at": f"{where}/{k}", "expected": "<absent>", "actual": actual[k]})
            else:
                out.extend(diff(expected[k], actual[k], tol, f"{where}/{k}"))
        return out
    if isinstance(expected, list) and isinstance(actual, list):
        if len(expected) != len(actual):
            return [{"at": where or "/", "expected": expected, "actual": actual}]
        out = []
        for i, (e, a) in enumerate(zip(expected, actual)):
            out.extend(diff(e, a, tol, f"{where}/{i}"))
        return out
    numeric = (int, float)
    if (isinstance(expected, float) or isinstance(actual, float)) and \
            isinstance(expected, numeric) and isinstance(actual, numeric) and \
            not isinstance(expected, bool) and not isinstance(actual, bool):
        if math.isclose(expected, actual, rel_tol=tol, abs_tol=tol):
            return []
    elif expected == actual and type(expected) is type(actual):
        return []
    return [{"at": where or "/", "expected": expected, "actual": actual}]


def regenerate(case: GoldenCase) -> dict[str, Any]:
    """Golden values by path, DERIVED ones recomputed from their oracles."""
    payload = case.document["payload"]
    out = {}
    for entry in case.expected:
        prov = entry["provenance"]
        if prov["tag"] == "DERIVED":
            out[entry["path"]] = ORACLES[prov["oracle"]](payload)
        else:
            out[entry["path"]] = entry["value"]
    return out


def report(case: GoldenCase) -> dict:
    from ..cli import run

    return run(case.document)


@dataclass
class CaseOutcome:
    name: str
    drift: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.drift


@dataclass
class Summary:
    outcomes: list[CaseOutcome]

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)

    def to_json(self) -> dict:
        return {
            "passed": sum(o.ok for o in self.outcomes),
            "failed": sum(not o.ok for o in self.outcomes),
            "cases": {o.name: {"ok": o.ok, "drift": o.drift} for o in self.outcomes},
        }


def verify_case(case: GoldenCase) -> CaseOutcome:
    outcome = CaseOutcome(case.name)
    try:
        rep = report(case)
    except Exception as exc:  # a crash is drift too
        outcome.drift.append({"source": "implementation", "at": "/", "error": f"{type(exc).__name__}: {exc}"})
        return outcome
    regenerated = regenerate(case)
    for entry in case.expected:
        path, golden = entry["path"], entry["value"]
        tol = entry.get("tolerance", DEFAULT_TOLERANCE)
        try:
            actual = lookup(rep, path)
        except (KeyError, IndexError, ValueError):
            outcome.drift.append({"source": "implementation", "at": path, "expected": golden, "actual": "<missing>"})
            continue
        for d in diff(golden, actual, tol, path):
            outcome.drift.append(dict(d, source="implementation"))
        for d in diff(golden, regenerated[path], tol, path):
            outcome.drift.append(dict(d, source="oracle"))
    return outcome


def verify_all(directory: Path | None = None) -> Summary:
    return Summary([verify_case(c) for c in load_cases(directory)])
