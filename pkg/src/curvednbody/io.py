"""JSON problem/solution documents and CSV trajectories.

Complex numbers are written as [re, im] pairs; the north pole is the string
"inf".  JSON floats use Python's shortest round-trip repr, CSV uses %.17g, so
both formats reproduce values bit for bit.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import SystemConfig, SystemState, Trajectory, angular_momentum, energy
from .geometry import INFINITY, is_infinity
from .mobius import KillingKind, killing_field


def encode_complex(z):
    z = complex(z)
    if is_infinity(z):
        return "inf"
    return [z.real, z.imag]


def decode_complex(x):
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity"):
            return INFINITY
        return complex(x.replace(" ", ""))
    if isinstance(x, (int, float)):
        return complex(x)
    re, im = x
    return complex(float(re), float(im))


@dataclass
class ProblemDocument:
    R: float
    masses: list
    positions: list
    velocities: Optional[list] = None
    field: Optional[KillingKind] = None

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError("R must be positive")
        if len(self.masses) != len(self.positions):
            raise ValueError("masses and positions differ in length")
        if any(not m > 0 for m in self.masses):
            raise ValueError("masses must be positive")
        if self.velocities is not None and len(self.velocities) != len(self.positions):
            raise ValueError("velocities and positions differ in length")

    @classmethod
    def from_dict(cls, d):
        if "positions" not in d or "masses" not in d:
            raise ValueError("document needs 'masses' and 'positions'")
        vel = d.get("velocities")
        kind = d.get("field", d.get("kind"))
        return cls(
            float(d.get("R", 1.0)),
            [float(m) for m in d["masses"]],
            [decode_complex(z) for z in d["positions"]],
            None if vel is None else [decode_complex(v) for v in vel],
            None if kind is None else KillingKind(kind),
        )

    @property
    def config(self):
        return SystemConfig(self.masses, self.R)

    def state(self, field=None):
        """Initial state; missing velocities are filled from the Killing field."""
        kind = field or self.field
        if self.velocities is not None:
            v = self.velocities
        elif kind is not None:
            v = [killing_field(kind, z) for z in self.positions]
        else:
            raise ValueError("document has no velocities and no field to fill them from")
        return SystemState(np.array(self.positions), np.array(v, dtype=complex))


def load_documents(path):
    """One document or a list of documents from a JSON file ("-" is stdin)."""
    text = sys.stdin.read() if path == "-" else open(path).read()
    data = json.loads(text)
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list):
        raise ValueError("expected a JSON object or list of objects")
    return [ProblemDocument.from_dict(d) for d in data]


def dumps(obj, indent=2):
    return json.dumps(obj, indent=indent, allow_nan=True)


def csv_header(n):
    cols = ["t"]
    cols += [f"{p}_z{k}" for k in range(1, n + 1) for p in ("re", "im")]
    cols += [f"{p}_v{k}" for k in range(1, n + 1) for p in ("re", "im")]
    return cols + ["energy", "angmom"]


def _fmt(x):
    return "%.17g" % x


def write_trajectory_csv(traj: Trajectory, config, out):
    """Write one row per stored step; ``out`` is a path or a text stream."""
    own = isinstance(out, str)
    fh = open(out, "w", newline="") if own else out
    try:
        w = csv.writer(fh)
        n = traj.positions.shape[1]
        w.writerow(csv_header(n))
        for i in range(len(traj)):
            s = traj.state(i)
            row = [traj.t[i]]
            for z in s.positions:
                row += [z.real, z.imag]
            for v in s.velocities:
                row += [v.real, v.imag]
            row += [energy(s, config), angular_momentum(s, config)]
            w.writerow([_fmt(x) for x in row])
    finally:
        if own:
            fh.close()


def read_trajectory_csv(src):
    """Inverse of :func:`write_trajectory_csv`; returns (Trajectory, energy, angmom)."""
    fh = open(src, newline="") if isinstance(src, str) else _io.StringIO(src.read())
    with fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array([[float(x) for x in r] for r in rows[1:]])
    n = (len(header) - 3) // 4
    if header != csv_header(n):
        raise ValueError("unexpected CSV header")
    z = body[:, 1 : 1 + 2 * n : 2] + 1j * body[:, 2 : 2 + 2 * n : 2]
    o = 1 + 2 * n
    v = body[:, o : o + 2 * n : 2] + 1j * body[:, o + 1 : o + 1 + 2 * n : 2]
    return Trajectory(body[:, 0], z, v), body[:, -2], body[:, -1]
