"""Sweep reports, line-oriented records and the versioned golden constants."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

GOLDEN_VERSION = "v1"


@dataclass
class BoundReport:
    max_ratio: float
    argmax_params: dict
    samples: int
    bound_formula: str
    records: list[dict] = field(default_factory=list, repr=False)
    cases: dict[str, "BoundReport"] = field(default_factory=dict, repr=False)

    def summary(self) -> dict:
        out = {
            "bound": self.bound_formula,
            "max_ratio": self.max_ratio,
            "argmax": self.argmax_params,
            "samples": self.samples,
        }
        if self.cases:
            out["cases"] = {k: v.summary() for k, v in self.cases.items()}
        return out


def reduce_records(records: list[dict], bound_formula: str) -> BoundReport:
    """Max-ratio reduction; ties resolve to the earliest record so the result is order-stable."""
    if not records:
        return BoundReport(0.0, {}, 0, bound_formula, [])
    best = max(range(len(records)), key=lambda i: (records[i]["ratio"], -i))
    return BoundReport(
        float(records[best]["ratio"]), dict(records[best]["params"]), len(records), bound_formula, records
    )


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    if hasattr(v, "item"):
        return _jsonable(v.item())
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def to_record_line(obj: dict) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, separators=(",", ":"))


def write_records(records, path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(to_record_line(r) + "\n")


def plotdata(columns: list[str], rows, header: str) -> str:
    lines = [f"# {line}" for line in header.splitlines()]
    lines.append("# columns: " + "\t".join(columns))
    for row in rows:
        lines.append("\t".join(repr(float(x)) if isinstance(x, float) else str(x) for x in row))
    return "\n".join(lines) + "\n"


def golden_path(version: str = GOLDEN_VERSION) -> Path:
    return Path(str(resources.files("shiftconv") / "golden" / f"{version}.json"))


def load_golden(version: str = GOLDEN_VERSION) -> dict:
    p = golden_path(version)
    if not p.exists():
        return {}
    return json.loads(p.read_text())


def golden(key: str, version: str = GOLDEN_VERSION) -> float:
    g = load_golden(version)
    if key not in g:
        raise KeyError(f"no frozen constant {key!r} in golden {version}")
    return float(g[key]["value"])


def check_golden(measured: dict[str, float], version: str = GOLDEN_VERSION) -> list[str]:
    """Names of frozen constants that the measured values exceed."""
    g = load_golden(version)
    bad = []
    for k, v in measured.items():
        if k in g and v > float(g[k]["value"]):
            bad.append(f"{k}: measured {v:.6g} > frozen {float(g[k]['value']):.6g}")
    return bad


def write_golden(measured: dict[str, float], note: dict[str, str], path, headroom: float = 1.05) -> dict:
    """Freeze measured maxima, rounded up with a small headroom factor."""
    path = Path(path)
    data = json.loads(path.read_text()) if path.exists() else {}
    for k, v in measured.items():
        frozen = float(f"{v * headroom:.3g}")
        if frozen < v:
            frozen = float(f"{v * headroom * 1.01:.3g}")
        data[k] = {"value": frozen, "measured": v, "how": note.get(k, "")}
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return data


def as_dict(obj) -> dict:
    return asdict(obj)
