# Run reports of the command line: deterministic JSON or aligned text.

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .config import REPORT_DIGITS
from .version import __version__

log = logging.getLogger(__name__)

STRUCTURED = "structured"
TEXT = "text"


def file_digest(path):
    """Returns the hex SHA-256 digest of a file."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def normalize(value, digits=REPORT_DIGITS):
    """Converts a result tree into JSON types.

    Fractions become strings in lowest terms, floats are rounded to ``digits`` significant
    digits and numpy scalars and arrays become Python numbers and lists.
    """
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return float(f"{value:.{digits}g}")
    if isinstance(value, np.ndarray):
        return [normalize(v, digits) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): normalize(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize(v, digits) for v in value]
    if hasattr(value, "to_dict"):
        return normalize(value.to_dict(), digits)
    return value


@dataclass
class Check:
    """A named pass/fail check of a run."""

    name: str
    passed: bool
    detail: str = ""

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class RunReport:
    """
    A class representing the report of one command.

    Identical inputs and seeds give byte-identical serializations; the wall time is only
    serialized when ``timing`` is set.
    """

    command: str
    arguments: dict
    seed: int = None
    inputs: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    wall_time: float = None
    timing: bool = False
    version: str = __version__

    def add_input(self, path):
        path = Path(path)
        self.inputs[path.name] = file_digest(path)

    def check(self, name, passed, detail=""):
        """Records a check and returns its outcome."""
        passed = bool(passed)
        self.checks.append(Check(name, passed, detail))
        if not passed:
            log.warning("Check failed: %s %s", name, detail)
        return passed

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        out = {
            "command": self.command,
            "arguments": self.arguments,
            "seed": self.seed,
            "inputs": self.inputs,
            "results": self.results,
            "checks": self.checks,
            "passed": self.passed,
            "version": self.version,
        }
        if self.timing and self.wall_time is not None:
            out["wall_time"] = self.wall_time
        return normalize(out)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self):
        data = self.to_dict()
        lines = [f"smallcurv {data['version']} {data['command']}"]
        if data["seed"] is not None:
            lines.append(f"seed: {data['seed']}")
        for name, digest in sorted(data["inputs"].items()):
            lines.append(f"input {name}: sha256 {digest}")
        lines.extend(_text_lines(data["results"], 0))
        for c in data["checks"]:
            status = "PASS" if c["passed"] else "FAIL"
            lines.append(f"[{status}] {c['name']}" + (f": {c['detail']}" if c["detail"] else ""))
        if data["checks"]:
            lines.append(f"{len(data['checks']) - len(self.failures)}/{len(data['checks'])} checks passed")
        if "wall_time" in data:
            lines.append(f"wall time: {data['wall_time']} s")
        return "\n".join(lines) + "\n"

    def render(self, fmt=STRUCTURED):
        if fmt == STRUCTURED:
            return self.to_json()
        if fmt == TEXT:
            return self.to_text()
        raise ValueError(f"format must be '{STRUCTURED}' or '{TEXT}'. '{fmt}' was given.")

    def write(self, path, fmt=STRUCTURED):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.render(fmt))
        log.info("Report written to %s", path)


def _text_lines(value, depth):
    pad = "  " * depth
    lines = []
    for key in sorted(value):
        item = value[key]
        if isinstance(item, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_text_lines(item, depth + 1))
        elif isinstance(item, list) and item and isinstance(item[0], dict):
            lines.append(f"{pad}{key}:")
            for k, entry in enumerate(item):
                lines.append(f"{pad}  #{k + 1}")
                lines.extend(_text_lines(entry, depth + 2))
        else:
            lines.append(f"{pad}{key}: {json.dumps(item)}")
    return lines
