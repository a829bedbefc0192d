"""Sampled series container with CSV/JSON export and provenance metadata.

The axis is usually time (in 1/omega_c units) but sweeps reuse the same
container with a different axis name.  CSV layout: one optional leading
``# provenance: {...}`` comment line, then an RFC-4180-style header row and
records with ``.`` decimal separators.  Floats are written with ``repr``
(shortest round-trip), so re-running a deterministic scenario reproduces the
file byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if np.isnan(v):
            return ""  # masked point: explicit gap
        return repr(v)
    if isinstance(value, (complex, np.complexfloating)):
        return repr(complex(value))
    return str(value)


@dataclass
class TimeSeries:
    """Columns sampled on a shared 1-D axis."""

    axis: np.ndarray
    columns: dict[str, np.ndarray]
    axis_name: str = "t"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.axis = np.asarray(self.axis)
        n = self.axis.shape[0]
        for name, col in self.columns.items():
            col = np.asarray(col)
            if col.shape != (n,):
                raise ValueError(f"column {name!r} has shape {col.shape}, axis has {n} points")
            self.columns[name] = col

    def __len__(self) -> int:
        return int(self.axis.shape[0])

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    def slice(self, lo: float, hi: float) -> "TimeSeries":
        """Sub-series with lo <= axis <= hi (inclusive)."""
        sel = (self.axis >= lo) & (self.axis <= hi)
        return TimeSeries(
            self.axis[sel],
            {k: v[sel] for k, v in self.columns.items()},
            axis_name=self.axis_name,
            metadata=dict(self.metadata),
        )

    # -- persistence ------------------------------------------------------

    def to_csv(self, path, provenance: dict | None = None) -> None:
        names = [self.axis_name] + list(self.columns)
        cols = [self.axis] + [self.columns[k] for k in names[1:]]
        with open(path, "w", newline="") as fh:
            if provenance is not None:
                fh.write("# provenance: " + json.dumps(provenance, sort_keys=True) + "\n")
            fh.write(",".join(names) + "\r\n")
            for i in range(len(self)):
                fh.write(",".join(_fmt(c[i]) for c in cols) + "\r\n")

    def to_json(self, path, provenance: dict | None = None) -> None:
        payload = {
            "axis_name": self.axis_name,
            "axis": [_fmt(v) for v in self.axis],
            "columns": {k: [_fmt(x) for x in v] for k, v in self.columns.items()},
            "metadata": self.metadata,
        }
        if provenance is not None:
            payload["provenance"] = provenance
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        """Inverse of to_csv (provenance line, if any, lands in metadata)."""
        meta: dict = {}
        with open(path, newline="") as fh:
            first = fh.readline()
            if first.startswith("# provenance:"):
                meta["provenance"] = json.loads(first[len("# provenance:"):])
                first = fh.readline()
            names = first.strip().split(",")
            rows = [line.strip().split(",") for line in fh if line.strip()]
        data = np.array(
            [[float(x) if x else np.nan for x in row] for row in rows], dtype=float
        )
        if data.size == 0:
            data = np.zeros((0, len(names)))
        return cls(
            data[:, 0],
            {n: data[:, j + 1] for j, n in enumerate(names[1:])},
            axis_name=names[0],
            metadata=meta,
        )
