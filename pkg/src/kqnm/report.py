"""JSON and CSV writers. Floats carry 15 significant digits."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .solver import ResonanceReport

DIGITS = 15


def fmt(x) -> str:
    return f"{float(x):.{DIGITS}g}"


def _clean(obj):
    """Recursively convert numpy and complex values into JSON-safe types."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(fmt(obj.real)), "im": float(fmt(obj.imag))}
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if not np.isfinite(v) else float(fmt(v))
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=False, allow_nan=True)
        fh.write("\n")
    return path


def write_table(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(header)
        for row in rows:
            wr.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def resonance_payload(reports: dict, config: dict, oracle: dict | None = None) -> dict:
    """``reports`` maps ``m_az`` to a ResonanceReport."""
    acc, rej, meta = [], [], {}
    for m, rep in reports.items():
        for r in rep.accepted:
            acc.append({"m_az": r.m_az, "l": r.l, "n": r.n, "sigma": r.sigma,
                        "residual": r.residual, "drift": r.drift,
                        "members": {str(b): s for b, s in r.members.items()}})
        for r in rep.rejected:
            rej.append({"m_az": m, "beta": r.beta, "sigma": r.sigma,
                        "residual": r.residual, "reason": r.reason})
        meta[str(m)] = rep.metadata
    out = {"config": config, "accepted": acc, "rejected": rej, "metadata": meta}
    if oracle:
        out["oracle"] = oracle
    return out


def resonance_rows(reports: dict[int, ResonanceReport]):
    header = ["m_az", "l", "n", "re_sigma", "im_sigma", "residual", "drift"]
    rows = []
    for rep in reports.values():
        for r in rep.accepted:
            rows.append([r.m_az, "" if r.l is None else r.l, r.n, float(r.sigma.real),
                         float(r.sigma.imag), float(r.residual), float(r.drift)])
    return header, rows
