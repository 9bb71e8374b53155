"""CSV rows shared by the pipeline scans and the command line."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import astuple, dataclass, fields

FIELDS = ("experiment", "p", "q", "N", "L", "r", "tuple_id", "value_re", "value_im",
          "reference_bound", "ratio", "fit_slope")


@dataclass(frozen=True, order=True)
class ExperimentRecord:
    experiment: str
    p: int = 0
    q: int = 0
    N: float = 0.0
    L: int = 0
    r: int = 0
    tuple_id: int = 0
    value_re: float = 0.0
    value_im: float = 0.0
    reference_bound: float = 0.0
    ratio: float | None = None
    fit_slope: float | None = None

    @classmethod
    def make(cls, experiment: str, value: complex, reference_bound: float = 0.0, **kw) -> "ExperimentRecord":
        value = complex(value)
        ratio = abs(value) / reference_bound if reference_bound > 0 else None
        return cls(experiment, value_re=value.real, value_im=value.imag,
                   reference_bound=float(reference_bound), ratio=ratio, **kw)

    @property
    def value(self) -> complex:
        return complex(self.value_re, self.value_im)

    def with_slope(self, slope: float) -> "ExperimentRecord":
        vals = dict(zip(FIELDS, astuple(self)))
        vals["fit_slope"] = float(slope)
        return ExperimentRecord(**vals)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return "%.17g" % v
    return str(v)


def _sort_key(rec: ExperimentRecord):
    # None sorts first so rows order stably whatever the optional fields hold
    return tuple((0, 0.0) if v is None else (1, v) for v in astuple(rec))


def to_csv(records) -> str:
    assert tuple(f.name for f in fields(ExperimentRecord)) == FIELDS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for rec in sorted(records, key=_sort_key):
        w.writerow([_fmt(v) for v in astuple(rec)])
    return buf.getvalue()
