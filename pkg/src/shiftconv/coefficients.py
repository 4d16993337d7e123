"""Arithmetic coefficient sources A(n): built-ins and file-backed sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arith import tau_k_table

BUILTIN_KINDS = ("tau3", "tau", "ones", "zero")


class CoefficientRangeError(ValueError):
    pass


class CoefficientFileError(ValueError):
    pass


@dataclass(frozen=True)
class CoefficientSequence:
    kind: str
    n_min: int
    n_max: int
    values: np.ndarray
    path: str | None = None

    def __post_init__(self):
        if len(self.values) != self.n_max - self.n_min + 1:
            raise ValueError("values length does not match declared range")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("coefficients must be finite")

    def covers(self, lo: int, hi: int) -> bool:
        return self.n_min <= lo and hi <= self.n_max

    def require(self, lo: int, hi: int) -> None:
        if not self.covers(lo, hi):
            raise CoefficientRangeError(
                f"{self.kind} coefficients cover [{self.n_min}, {self.n_max}], need [{lo}, {hi}]"
            )

    def __call__(self, n):
        n = np.asarray(n)
        if n.size and (n.min() < self.n_min or n.max() > self.n_max):
            raise CoefficientRangeError(f"index outside [{self.n_min}, {self.n_max}]")
        return self.values[n - self.n_min]

    def window(self, lo: int, hi: int) -> np.ndarray:
        """A(n) for lo <= n <= hi."""
        self.require(lo, hi)
        return self.values[lo - self.n_min : hi - self.n_min + 1]

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)


def builtin(kind: str, n_max: int) -> CoefficientSequence:
    if kind not in BUILTIN_KINDS:
        raise ValueError(f"unknown coefficient kind {kind!r}; choose from {BUILTIN_KINDS}")
    if kind == "tau3":
        vals = tau_k_table(n_max, 3)[1:]
    elif kind == "tau":
        vals = tau_k_table(n_max, 2)[1:]
    elif kind == "ones":
        vals = np.ones(n_max, dtype=np.int64)
    else:
        vals = np.zeros(n_max, dtype=np.int64)
    return CoefficientSequence(kind, 1, n_max, vals)


def _parse_header(line: str) -> dict[str, str]:
    out = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def ingest_coefficients(path) -> CoefficientSequence:
    """Read a "# n_min=.. n_max=.." headed file of "n,value" records."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise CoefficientFileError(f"{path}: {exc}") from exc
    header = None
    recs: dict[int, float] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None:
                header = _parse_header(line)
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise CoefficientFileError(f"{path}:{lineno}: expected 'n,value', got {raw!r}")
        try:
            n = int(parts[0])
            v = float(parts[1])
        except ValueError:
            raise CoefficientFileError(f"{path}:{lineno}: cannot parse {raw!r}") from None
        if not math.isfinite(v):
            raise CoefficientFileError(f"{path}:{lineno}: non-finite value {parts[1]}")
        if n in recs:
            raise CoefficientFileError(f"{path}:{lineno}: duplicate n={n}")
        recs[n] = v
    if header is None or "n_min" not in header or "n_max" not in header:
        raise CoefficientFileError(f"{path}: missing '# n_min=<int> n_max=<int>' header")
    try:
        n_min, n_max = int(header["n_min"]), int(header["n_max"])
    except ValueError:
        raise CoefficientFileError(f"{path}:1: bad header values") from None
    if n_max < n_min:
        raise CoefficientFileError(f"{path}: n_max < n_min")
    for n in range(n_min, n_max + 1):
        if n not in recs:
            raise CoefficientRangeError(f"{path}: range gap, missing n={n}")
    extra = sorted(set(recs) - set(range(n_min, n_max + 1)))
    if extra:
        raise CoefficientRangeError(f"{path}: n={extra[0]} outside declared range")
    vals = np.array([recs[n] for n in range(n_min, n_max + 1)], dtype=float)
    return CoefficientSequence("file", n_min, n_max, vals, str(path))


def write_coefficients(seq: CoefficientSequence, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# n_min={seq.n_min} n_max={seq.n_max}\n")
        for n, v in zip(range(seq.n_min, seq.n_max + 1), seq.values):
            fh.write(f"{n},{float(v)!r}\n")


@dataclass
class DoubleCoefficients:
    """A(n1, n2) on a finite set of index pairs, with the spectral parameters of the form."""

    mu1: complex
    mu2: complex
    table: dict[tuple[int, int], complex]
    path: str | None = None

    @property
    def mu3(self) -> complex:
        return -self.mu1 - self.mu2

    def __call__(self, n1: int, n2: int) -> complex:
        try:
            return self.table[(n1, n2)]
        except KeyError:
            raise CoefficientRangeError(f"no coefficient A({n1},{n2}) in {self.path or 'table'}") from None

    def has(self, n1: int, n2: int) -> bool:
        return (n1, n2) in self.table

    def max_abs(self) -> float:
        return max((abs(v) for v in self.table.values()), default=0.0)


def ingest_double_coefficients(path) -> DoubleCoefficients:
    """Read "# mu1=<complex> mu2=<complex>" then "n1,n2,re,im" records."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise CoefficientFileError(f"{path}: {exc}") from exc
    header = None
    table: dict[tuple[int, int], complex] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None:
                header = _parse_header(line)
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise CoefficientFileError(f"{path}:{lineno}: expected 'n1,n2,re,im', got {raw!r}")
        try:
            n1, n2 = int(parts[0]), int(parts[1])
            v = complex(float(parts[2]), float(parts[3]))
        except ValueError:
            raise CoefficientFileError(f"{path}:{lineno}: cannot parse {raw!r}") from None
        if n1 < 1 or n2 < 1:
            raise CoefficientFileError(f"{path}:{lineno}: indices must be positive")
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise CoefficientFileError(f"{path}:{lineno}: non-finite value")
        if (n1, n2) in table:
            raise CoefficientFileError(f"{path}:{lineno}: duplicate pair ({n1},{n2})")
        table[(n1, n2)] = v
    if header is None or "mu1" not in header or "mu2" not in header:
        raise CoefficientFileError(f"{path}: missing '# mu1=<complex> mu2=<complex>' header")
    try:
        mu1, mu2 = complex(header["mu1"]), complex(header["mu2"])
    except ValueError:
        raise CoefficientFileError(f"{path}:1: bad spectral parameters") from None
    return DoubleCoefficients(mu1, mu2, table, str(path))


def write_double_coefficients(dc: DoubleCoefficients, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"# mu1={dc.mu1!r} mu2={dc.mu2!r}\n".replace("(", "").replace(")", ""))
        for (n1, n2), v in sorted(dc.table.items()):
            fh.write(f"{n1},{n2},{v.real!r},{v.imag!r}\n")
