"""Evaluate scenarios (optionally in parallel) and write result tables atomically."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .scenario import Scenario, Table, evaluate_point

THREADS_ENV = "REPEATERLAB_THREADS"


def thread_cap() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def scenario_hash(sc: Scenario) -> str:
    return hashlib.sha256(sc.source_text.encode()).hexdigest()[:16]


def run_scenario(sc: Scenario, threads: int | None = None) -> dict[str, Table]:
    """All requested tables; sweep points are stacked in sweep order."""
    points = sc.points()
    threads = threads or thread_cap()
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(points))) as pool:
            results = list(pool.map(lambda pt: evaluate_point(pt[1]), points))
    else:
        results = [evaluate_point(vals) for _, vals in points]

    out: dict[str, Table] = {}
    for kind in sc.outputs:
        per_point = [r[kind] for r in results if kind in r]
        if len(per_point) != len(points):
            continue  # e.g. distance tables without a [nesting] section
        first = per_point[0]
        if sc.sweep_parameter is None:
            out[kind] = Table(kind, list(first.columns), [list(r) for r in first.rows])
            continue
        cols = [sc.sweep_parameter] + first.columns
        rows = [[v] + list(r) for (v, _), tbl in zip(points, per_point) for r in tbl.rows]
        out[kind] = Table(kind, cols, rows)
    for tbl in out.values():
        _check_table(tbl)
    return out


def _check_table(tbl: Table):
    width = len(tbl.columns)
    for row in tbl.rows:
        if len(row) != width:
            raise ValueError(f"{tbl.kind}: ragged row {row}")
        if not all(math.isfinite(x) for x in row):
            raise ValueError(f"{tbl.kind}: non-finite value in {row}")


def fmt(x) -> str:
    if isinstance(x, int) or (isinstance(x, float) and x.is_integer() and abs(x) < 1e15):
        return str(int(x))
    return format(x, ".15g")


def render_csv(tbl: Table, meta: dict[str, str]) -> str:
    lines = [f"# {k}: {v}" for k, v in meta.items()]
    lines.append(",".join(tbl.columns))
    lines += [",".join(fmt(x) for x in row) for row in tbl.rows]
    return "\n".join(lines) + "\n"


def render_json(tbl: Table, meta: dict[str, str]) -> str:
    body = {"meta": meta, "kind": tbl.kind, "columns": tbl.columns, "rows": tbl.rows}
    return json.dumps(body, indent=1) + "\n"


def metadata(sc: Scenario, kind: str) -> dict[str, str]:
    return {
        "scenario": sc.name,
        "output": kind,
        "scenario_hash": scenario_hash(sc),
        "tool_version": f"repeaterlab {__version__}",
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }


def write_tables(sc: Scenario, tables: dict[str, Table], out_dir: Path, fmt_name: str = "csv") -> list[Path]:
    """Render everything first, then move each file into place with an atomic rename."""
    out_dir.mkdir(parents=True, exist_ok=True)
    render = render_csv if fmt_name == "csv" else render_json
    staged = []
    try:
        for kind, tbl in tables.items():
            text = render(tbl, metadata(sc, kind))
            fd, tmp = tempfile.mkstemp(prefix=f".{kind}.", suffix=".tmp", dir=out_dir)
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            staged.append((tmp, out_dir / f"{sc.name}_{kind}.{fmt_name}"))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]
