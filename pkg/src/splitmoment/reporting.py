"""CSV/JSON emission for moment reports, and plot-data export."""

import csv
import io
import json
import math
import os
import platform
import tempfile
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from ._accel import backend_name
from .moment import MomentReport

__all__ = ["RunManifest", "report_csv", "report_json", "export_plotdata", "atomic_write"]


@dataclass
class RunManifest:
    config_hash: str
    version: str = __version__
    backend: str = field(default_factory=backend_name)
    started: float = field(default_factory=time.time)
    timings: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def step(self, name: str):
        manifest = self

        class _Timer:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                manifest.timings[name] = time.perf_counter() - self.t0

        return _Timer()

    def to_dict(self) -> dict:
        d = asdict(self)
        d["python"] = platform.python_version()
        return d


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_csv(report: MomentReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.CSV_COLUMNS)
    for row in report.csv_rows():
        writer.writerow(row)
    return buf.getvalue()


def report_json(report: MomentReport, manifest: RunManifest, config: dict, cutoffs: dict) -> str:
    payload = {
        "field_d": report.field_d,
        "engine": report.engine,
        "rows": [asdict(r) for r in report.rows],
        "constants": report.constants.to_dict(),
        "polynomial": report.polynomial.to_dict(),
        "provenance": {
            "manifest": manifest.to_dict(),
            "config": config,
            "cutoffs": cutoffs,
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def export_plotdata(report: MomentReport, out_dir) -> tuple[Path, Path]:
    """Write ``(log Q, ratio)`` and ``(log Q, residual_norm)`` two-column CSVs."""
    out_dir = Path(out_dir)
    if not report.rows:
        warnings.warn("empty report: plot files contain only headers", stacklevel=2)
    rows = sorted(report.rows, key=lambda r: r.Q)
    paths = []
    for name, attr in (("plot_ratio.csv", "ratio"), ("plot_residual_norm.csv", "residual_norm")):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["logQ", attr])
        for r in rows:
            writer.writerow([repr(math.log(r.Q)), repr(float(getattr(r, attr)))])
        path = out_dir / name
        atomic_write(path, buf.getvalue())
        paths.append(path)
    return paths[0], paths[1]
