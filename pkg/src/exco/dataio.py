"""File ingestion and emission: CSV signals, JSON results, CSV matrices, SVG heatmaps.

The result document is plain JSON with stable field names (schema
documented in the README); floats are serialized with full round-trip
precision so write followed by read reproduces the document exactly.
"""

import csv
from dataclasses import dataclass, field
import json
import math

import numpy as np

from exco.clustering import ClusterModel, CommunityAssignment
from exco.errors import InputError, ParseError
from exco.evt import ChiMatrix, SignalMatrix
from exco.signal import PersistenceMatrix

RESULT_FORMAT = "exco-result"
RESULT_VERSION = 1


def read_csv(path: str, sample_rate_hz: float) -> SignalMatrix:
    """Read a signal matrix from CSV: header of channel labels, one sample per row.

    The sample rate is not stored in the file and must be supplied by
    the caller. Ragged rows, non-numeric or non-finite cells, duplicate
    labels, and files without data rows raise ParseError with the
    offending line number.
    """
    rows: list[list[float]] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", path=path, line=1) from None
        channels = [label.strip() for label in header]
        if len(set(channels)) != len(channels):
            raise ParseError("duplicate channel labels", path=path, line=1)
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(channels):
                raise ParseError(
                    f"expected {len(channels)} cells, found {len(row)}", path=path, line=line_no
                )
            values = []
            for cell in row:
                try:
                    value = float(cell)
                except ValueError:
                    raise ParseError(f"non-numeric cell {cell!r}", path=path, line=line_no) from None
                if not math.isfinite(value):
                    raise ParseError(f"non-finite cell {cell!r}", path=path, line=line_no)
                values.append(value)
            rows.append(values)
    if not rows:
        raise ParseError("no data rows", path=path, line=1)
    return SignalMatrix(np.asarray(rows), channels, sample_rate_hz)


def write_csv(x: SignalMatrix, path: str) -> None:
    """Write a signal matrix as CSV with full float round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(x.channels)
        for row in x.samples:
            writer.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class WindowResult:
    """Communities and fitted model for one analysis segment."""

    communities: CommunityAssignment
    model: ClusterModel
    start: int | None = None
    end: int | None = None


@dataclass(frozen=True, eq=False)
class ResultDocument:
    """Self-describing record of a full run; round-trips losslessly via JSON."""

    metadata: dict
    windows: list[WindowResult] = field(default_factory=list)
    failed_windows: list[int] = field(default_factory=list)
    chi: ChiMatrix | None = None
    persistence: PersistenceMatrix | None = None

    def to_dict(self) -> dict:
        return {
            "format": RESULT_FORMAT,
            "version": RESULT_VERSION,
            "metadata": self.metadata,
            "windows": [
                {
                    "window_id": w.communities.window_id,
                    "start": w.start,
                    "end": w.end,
                    "k": w.communities.k,
                    "channels": list(w.communities.channels),
                    "labels": w.communities.labels.tolist(),
                    "model": {
                        "centroids": w.model.centroids.tolist(),
                        "assignments": w.model.assignments.tolist(),
                        "objective": w.model.objective,
                        "iterations": w.model.iterations,
                        "restarts_used": w.model.restarts_used,
                        "seed": w.model.seed,
                    },
                }
                for w in self.windows
            ],
            "failed_windows": list(self.failed_windows),
            "chi": None if self.chi is None else {
                "channels": list(self.chi.channels),
                "quantile_level": self.chi.quantile_level,
                "values": self.chi.values.tolist(),
            },
            "persistence": None if self.persistence is None else {
                "channels": list(self.persistence.channels),
                "n_windows": self.persistence.n_windows,
                "failed_windows": list(self.persistence.failed_windows),
                "values": self.persistence.values.tolist(),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ResultDocument":
        if data.get("format") != RESULT_FORMAT:
            raise ParseError(f"not a {RESULT_FORMAT} document")
        if data.get("version") != RESULT_VERSION:
            raise ParseError(f"unsupported document version {data.get('version')!r}")
        windows = []
        for w in data["windows"]:
            m = w["model"]
            model = ClusterModel(
                centroids=np.asarray(m["centroids"], dtype=float),
                assignments=np.asarray(m["assignments"], dtype=int),
                objective=m["objective"],
                iterations=m["iterations"],
                restarts_used=m["restarts_used"],
                seed=m["seed"],
            )
            communities = CommunityAssignment(
                labels=np.asarray(w["labels"], dtype=int),
                channels=list(w["channels"]),
                k=w["k"],
                window_id=w["window_id"],
            )
            windows.append(WindowResult(communities, model, w["start"], w["end"]))
        chi = None
        if data.get("chi") is not None:
            c = data["chi"]
            chi = ChiMatrix(np.asarray(c["values"], dtype=float), list(c["channels"]),
                            c["quantile_level"])
        persistence = None
        if data.get("persistence") is not None:
            p = data["persistence"]
            persistence = PersistenceMatrix(
                np.asarray(p["values"], dtype=float), list(p["channels"]),
                p["n_windows"], list(p["failed_windows"]),
            )
        return cls(
            metadata=data["metadata"],
            windows=windows,
            failed_windows=list(data["failed_windows"]),
            chi=chi,
            persistence=persistence,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResultDocument):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def write_result(doc: ResultDocument, path: str) -> None:
    """Serialize a result document as indented JSON."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(doc.to_dict(), handle, indent=2)
        handle.write("\n")


def read_result(path: str) -> ResultDocument:
    """Parse a result document written by :func:`write_result`."""
    with open(path, encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=path, line=exc.lineno) from None
    try:
        return ResultDocument.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed result document: {exc}", path=path) from None


def write_matrix_csv(matrix: ChiMatrix | PersistenceMatrix, path: str) -> None:
    """Write a labeled square matrix as CSV with 6-decimal values.

    Layout is one header row (empty corner cell plus channel labels)
    followed by one labeled row per channel.
    """
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow([""] + list(matrix.channels))
        for label, row in zip(matrix.channels, matrix.values):
            writer.writerow([label] + [f"{v:.6f}" for v in row])


# Light-to-dark endpoints of the linear color scale.
_COLOR_LOW = (247, 251, 255)
_COLOR_HIGH = (8, 48, 107)

_CELL = 24
_LEFT = 70
_TOP = 70
_LEGEND_W = 18
_LEGEND_GAP = 26
_LEGEND_STRIPS = 64


def _color(v: float) -> str:
    channels = (round(lo + v * (hi - lo)) for lo, hi in zip(_COLOR_LOW, _COLOR_HIGH))
    return "#{:02x}{:02x}{:02x}".format(*channels)


def render_heatmap_svg(matrix: ChiMatrix | PersistenceMatrix, path: str, title: str) -> None:
    """Render a labeled D-by-D heatmap with a 0-to-1 color legend as SVG 1.1.

    Values must lie in [0,1]; the color scale runs linearly from light
    (0) to dark (1). Output bytes depend only on the inputs.
    """
    values = matrix.values
    channels = list(matrix.channels)
    if np.any(values < 0) or np.any(values > 1):
        raise InputError("heatmap values must lie in [0,1]")
    d = len(channels)
    grid = d * _CELL
    width = _LEFT + grid + _LEGEND_GAP + _LEGEND_W + 40
    height = _TOP + grid + 20
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<title>{_escape(title)}</title>',
        f'<text x="{_LEFT}" y="18" font-family="sans-serif" font-size="13" '
        f'font-weight="bold">{_escape(title)}</text>',
    ]
    for i, label in enumerate(channels):
        x = _LEFT + i * _CELL + _CELL // 2
        parts.append(
            f'<text x="{x}" y="{_TOP - 6}" font-family="sans-serif" font-size="9" '
            f'text-anchor="start" transform="rotate(-60 {x} {_TOP - 6})">{_escape(label)}</text>'
        )
        y = _TOP + i * _CELL + _CELL // 2 + 3
        parts.append(
            f'<text x="{_LEFT - 6}" y="{y}" font-family="sans-serif" font-size="9" '
            f'text-anchor="end">{_escape(label)}</text>'
        )
    for i in range(d):
        for j in range(d):
            parts.append(
                f'<rect class="cell" x="{_LEFT + j * _CELL}" y="{_TOP + i * _CELL}" '
                f'width="{_CELL}" height="{_CELL}" fill="{_color(float(values[i, j]))}" '
                f'stroke="#ffffff" stroke-width="0.5"/>'
            )
    legend_x = _LEFT + grid + _LEGEND_GAP
    strip_h = grid / _LEGEND_STRIPS
    for s in range(_LEGEND_STRIPS):
        # strip 0 at the bottom of the bar = value 0
        v = s / (_LEGEND_STRIPS - 1)
        y = _TOP + grid - (s + 1) * strip_h
        parts.append(
            f'<rect class="legend" x="{legend_x}" y="{y:.3f}" width="{_LEGEND_W}" '
            f'height="{strip_h + 0.5:.3f}" fill="{_color(v)}"/>'
        )
    for v in (0.0, 0.5, 1.0):
        y = _TOP + grid - v * grid
        parts.append(
            f'<text x="{legend_x + _LEGEND_W + 4}" y="{y + 3:.3f}" font-family="sans-serif" '
            f'font-size="9">{v:.1f}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(parts))
        handle.write("\n")


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )
