"""CSV ingestion, standardization and report files."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from .diagnostics import SelectionReport


class InputError(ValueError):
    """Bad user input; ``field`` names the offending column or option."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass
class AnalysisData:
    y: np.ndarray
    X: np.ndarray
    names: list
    n_dropped: int
    scaling: dict = field(default_factory=dict)
    response_scale: float = 1.0


def read_table(path, response: str, covariates: Optional[list] = None):
    """Read a headed, comma-separated file; return (frame, rows dropped for missing values)."""
    path = Path(path)
    if not path.exists():
        raise InputError("data", f"file not found: {path}")
    try:
        df = pd.read_csv(path, sep=",", decimal=".")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise InputError("data", f"cannot parse {path}: {exc}") from None
    if response not in df.columns:
        raise InputError("response", f"unknown column {response!r}")
    if covariates is None:
        covariates = [c for c in df.columns if c != response]
    for c in covariates:
        if c not in df.columns:
            raise InputError("covariates", f"unknown column {c!r}")
        if c == response:
            raise InputError("covariates", f"response column {c!r} listed as covariate")
    if not covariates:
        raise InputError("covariates", "no covariate columns")
    cols = [response] + list(covariates)
    sub = df[cols]
    for c in cols:
        converted = pd.to_numeric(sub[c], errors="coerce")
        bad = converted.isna() & sub[c].notna()
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise InputError(c, f"non-numeric value {sub[c].iloc[row]!r} in row {row + 1}")
        sub = sub.assign(**{c: converted})
    complete = sub.dropna()
    return complete.reset_index(drop=True), len(sub) - len(complete)


def is_binary(col: np.ndarray) -> bool:
    return bool(np.all(np.isin(col, (0.0, 1.0))))


def standardize(frame: pd.DataFrame, response: str, covariates: list,
                standardize_covariates: bool = True,
                standardize_response: bool = False) -> AnalysisData:
    """Center all covariates, scale metric ones to unit variance (divisor N).

    Covariates taking only the values 0 and 1 are centered but not scaled.
    With ``standardize_response`` the response is divided by the residual
    standard deviation of the full least-squares fit.
    """
    y = frame[response].to_numpy(dtype=float)
    N = y.shape[0]
    cols, scaling = [], {}
    for name in covariates:
        x = frame[name].to_numpy(dtype=float)
        mean = float(x.mean())
        binary = is_binary(x)
        sd = float(np.sqrt(((x - mean) ** 2).mean()))
        if sd == 0:
            raise InputError(name, "column has zero variance")
        if binary or not standardize_covariates:
            scaling[name] = {"kind": "binary" if binary else "metric", "mean": mean, "scale": 1.0}
            cols.append(x - mean)
        else:
            scaling[name] = {"kind": "metric", "mean": mean, "scale": sd}
            cols.append((x - mean) / sd)
    X = np.column_stack(cols)
    scale = 1.0
    if standardize_response:
        dof = N - X.shape[1] - 1
        if dof < 1:
            raise InputError("standardize-response",
                             "needs more observations than covariates + 1")
        beta, *_ = np.linalg.lstsq(X, y - y.mean(), rcond=None)
        resid = y - y.mean() - X @ beta
        scale = math.sqrt(float(resid @ resid) / dof)
        if not scale > 0:
            raise InputError("standardize-response", "full model fits exactly")
        y = y / scale
    return AnalysisData(y=y, X=X, names=list(covariates), n_dropped=0,
                        scaling=scaling, response_scale=scale)


# ---------------------------------------------------------------------------
# reports

REPORT_FIELDS = ("name", "incl_prob", "iact", "ess", "mpm", "indicator_freq")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return repr(float(v))


def write_report(report: SelectionReport, out_dir, fmt: str = "csv",
                 config: Optional[dict] = None) -> list:
    """Write the report (and timing sidecar); return the written paths.

    Wall-clock figures (wall time, ESS per second) go to ``timing.json`` so
    that the report itself is reproducible byte for byte.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = dict(config or {})
    records = report.records()
    paths = []
    if fmt == "json":
        body = {
            "config": config,
            "M": report.M,
            "misclassification_rate": report.misclassification_rate,
            "regressors": [{k: r[k] for k in REPORT_FIELDS} for r in records],
        }
        path = out_dir / "report.json"
        path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        path = out_dir / "report.csv"
        lines = [f"# config: {json.dumps(config, sort_keys=True)}", f"# M: {report.M}"]
        if report.misclassification_rate is not None:
            lines.append(f"# misclassification_rate: {report.misclassification_rate!r}")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_FIELDS)
        for r in records:
            writer.writerow([r["name"]] + [_fmt(r[k]) for k in REPORT_FIELDS[1:]])
        path.write_text("\n".join(lines) + "\n" + buf.getvalue())
    else:
        raise InputError("format", f"unknown output format {fmt!r}")
    paths.append(path)
    timing = out_dir / "timing.json"
    timing.write_text(json.dumps({
        "wall_time_seconds": report.wall_time_seconds,
        "ess_per_sec": dict(zip(report.names, report.ess_per_sec)),
    }, indent=2) + "\n")
    paths.append(timing)
    return paths


def _opt(s):
    return None if s == "" else float(s)


def read_report(path) -> tuple[SelectionReport, dict]:
    """Parse a report file back into (SelectionReport, config echo)."""
    path = Path(path)
    misclass = None
    if path.suffix == ".json":
        body = json.loads(path.read_text())
        config, M = body["config"], body["M"]
        misclass = body["misclassification_rate"]
        regs = body["regressors"]
    else:
        config, M, regs = {}, 0, []
        body = []
        for line in path.read_text().splitlines():
            if line.startswith("# config: "):
                config = json.loads(line[len("# config: "):])
            elif line.startswith("# M: "):
                M = int(line[len("# M: "):])
            elif line.startswith("# misclassification_rate: "):
                misclass = float(line.split(": ", 1)[1])
            else:
                body.append(line)
        for vals in csv.DictReader(body):
            regs.append({"name": vals["name"], "incl_prob": float(vals["incl_prob"]),
                         "iact": _opt(vals["iact"]), "ess": _opt(vals["ess"]),
                         "mpm": vals["mpm"] == "1",
                         "indicator_freq": _opt(vals["indicator_freq"])})
    timing_path = path.parent / "timing.json"
    wall, ess_sec = 0.0, {}
    if timing_path.exists():
        timing = json.loads(timing_path.read_text())
        wall, ess_sec = timing["wall_time_seconds"], timing["ess_per_sec"]
    freq = [r["indicator_freq"] for r in regs]
    report = SelectionReport(
        incl_prob_hat=np.array([r["incl_prob"] for r in regs]),
        iact=[r["iact"] for r in regs],
        ess=[r["ess"] for r in regs],
        ess_per_sec=[ess_sec.get(r["name"]) for r in regs],
        mpm=np.array([r["mpm"] for r in regs], dtype=bool),
        misclassification_rate=misclass,
        names=[r["name"] for r in regs],
        indicator_freq=None if any(f is None for f in freq) else np.array(freq),
        M=M, wall_time_seconds=wall)
    return report, config


def write_rows(rows: list, path) -> Path:
    """Write a list of flat dicts as CSV (columns in first-row order)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame(rows).to_csv(path, index=False, na_rep="")
    return path
