"""
Tabular reports of a result file.

Satisfaction is bucketed with the thresholds 0.3, 0.7, 0.9 and 0.99; the
lowest bucket is the critical one.
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from netbalance.services.scenario_io import ResultDoc

logger = logging.getLogger(__name__)

BUCKET_EDGES = [-np.inf, 0.3, 0.7, 0.9, 0.99, np.inf]
BUCKET_LABELS = ["s<0.3", "0.3-0.7", "0.7-0.9", "0.9-0.99", ">=0.99"]
CRITICAL = BUCKET_LABELS[0]
BUCKET_COLORS = ["#000000", "#c0392b", "#e67e22", "#f1c40f", "#27ae60"]


def bucketize(values) -> pd.Categorical:
    return pd.cut(np.asarray(values, dtype=float), bins=BUCKET_EDGES, labels=BUCKET_LABELS, right=False)


def critical_count(satisfaction: np.ndarray) -> int:
    """Number of (class, slot) entries below 0.3"""
    return int(np.sum(np.asarray(satisfaction) < BUCKET_EDGES[1]))


def _block_label(doc: ResultDoc, a: int, b: int) -> str:
    return f"{doc.grid.applications[a].name}_{doc.grid.contracts[b].name}"


def traffic_table(doc: ResultDoc) -> pd.DataFrame:
    """One row per (t, l): aggregate counts, per-block counts and satisfaction"""
    T, L = doc.grid.T, doc.grid.L
    columns = ["t", "l", "capacity", "N_baseline", "N"]
    if not doc.blocks:
        return pd.DataFrame(columns=columns)
    slots = np.arange(T * L)
    frame = pd.DataFrame({
        "t": slots // L,
        "l": slots % L,
        "capacity": np.tile([c.nc for c in doc.grid.cells], T),
        "N_baseline": np.asarray(doc.baseline_traffic).sum(axis=(0, 1)),
        "N": np.asarray(doc.traffic).sum(axis=(0, 1)),
    })
    for block in doc.blocks:
        label = _block_label(doc, block.application, block.contract)
        frame[f"N_{label}"] = block.counts
    for entry in doc.satisfaction:
        label = _block_label(doc, entry.application, entry.contract)
        frame[f"s_{label}"] = entry.optimized
    return frame


def bucket_grid(doc: ResultDoc, values) -> pd.DataFrame:
    """Satisfaction buckets laid out with times as rows and cells as columns"""
    T, L = doc.grid.T, doc.grid.L
    labels = np.asarray(bucketize(values), dtype=object).reshape(T, L)
    return pd.DataFrame(labels, index=pd.Index(range(T), name="t"), columns=[f"cell_{l}" for l in range(L)])


def empty_grid(doc: ResultDoc) -> pd.DataFrame:
    return pd.DataFrame(columns=[f"cell_{l}" for l in range(doc.grid.L)], index=pd.Index([], name="t"))


def bucket_summary(doc: ResultDoc) -> pd.DataFrame:
    """Count of slots per satisfaction bucket and class, baseline against optimized"""
    rows = []
    for entry in doc.satisfaction:
        base = bucketize(entry.baseline).value_counts()
        opt = bucketize(entry.optimized).value_counts()
        for label in BUCKET_LABELS:
            rows.append({
                "application": doc.grid.applications[entry.application].name,
                "contract": doc.grid.contracts[entry.contract].name,
                "bucket": label,
                "baseline": int(base.get(label, 0)),
                "optimized": int(opt.get(label, 0)),
            })
    return pd.DataFrame(rows, columns=["application", "contract", "bucket", "baseline", "optimized"])


def cell_traffic(doc: ResultDoc) -> pd.DataFrame:
    """
    Per cell and time: fixed traffic, price-sensitive traffic before and after
    optimization, and capacity (stacked-bar layout).
    """
    columns = ["l", "t", "fixed", "sensitive_baseline", "sensitive", "capacity"]
    if not doc.blocks:
        return pd.DataFrame(columns=columns)
    T, L = doc.grid.T, doc.grid.L
    sensitive = np.array([app.price_sensitive for app in doc.grid.applications])
    base = np.asarray(doc.baseline_traffic)
    opt = np.asarray(doc.traffic)
    fixed = opt[~sensitive].sum(axis=(0, 1)) if (~sensitive).any() else np.zeros(T * L, dtype=np.int64)
    sens_base = base[sensitive].sum(axis=(0, 1)) if sensitive.any() else np.zeros(T * L, dtype=np.int64)
    sens_opt = opt[sensitive].sum(axis=(0, 1)) if sensitive.any() else np.zeros(T * L, dtype=np.int64)
    slots = np.arange(T * L)
    frame = pd.DataFrame({
        "l": slots % L,
        "t": slots // L,
        "fixed": fixed,
        "sensitive_baseline": sens_base,
        "sensitive": sens_opt,
        "capacity": np.tile([c.nc for c in doc.grid.cells], T),
    }, columns=columns)
    return frame.sort_values(["l", "t"], kind="stable").reset_index(drop=True)


def _write_csv(frame: pd.DataFrame, path: Path) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    frame.to_csv(tmp, index=path.stem.startswith("grid_"), lineterminator="\n")
    tmp.replace(path)


def _render_svgs(doc: ResultDoc, out_dir: Path, cells: pd.DataFrame) -> list[Path]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import BoundaryNorm, ListedColormap

    plt.rcParams["svg.hashsalt"] = "netbalance"

    written = []
    cmap = ListedColormap(BUCKET_COLORS)
    norm = BoundaryNorm([0.0, 0.3, 0.7, 0.9, 0.99, 1.0 + 1e-9], cmap.N)
    T, L = doc.grid.T, doc.grid.L
    for entry in doc.satisfaction:
        label = _block_label(doc, entry.application, entry.contract)
        fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
        for ax, values, title in zip(axes, (entry.baseline, entry.optimized), ("baseline", "optimized")):
            ax.imshow(np.asarray(values).reshape(T, L), cmap=cmap, norm=norm, aspect="auto",
                      interpolation="nearest")
            ax.set_title(f"{label} ({title})")
            ax.set_xlabel("cell")
        axes[0].set_ylabel("time slot")
        path = out_dir / f"grid_{label}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)

    if not cells.empty:
        busiest = int(cells.assign(total=cells.fixed + cells.sensitive_baseline)
                      .groupby("l")["total"].max().idxmax())
        rows = cells[cells.l == busiest]
        fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
        for ax, column, title in zip(axes, ("sensitive_baseline", "sensitive"), ("baseline", "optimized")):
            ax.bar(rows.t, rows.fixed, color="#bdc3c7", label="fixed")
            ax.bar(rows.t, rows[column], bottom=rows.fixed, color="#2c3e50", label="price sensitive")
            ax.step(rows.t, rows.capacity, where="mid", color="#c0392b", label="capacity")
            ax.set_title(f"cell {busiest} ({title})")
            ax.set_xlabel("time slot")
        axes[0].legend()
        path = out_dir / f"cell_{busiest}_traffic.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written


def write_report(doc: ResultDoc, out_dir: str | Path, svg: bool = False) -> list[Path]:
    """
    Write traffic.csv, buckets.csv, cell_traffic.csv and one bucket grid per
    class (optimized and baseline). Without blocks every file holds only its
    header. Returns the written paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    tables = {
        "traffic.csv": traffic_table(doc),
        "buckets.csv": bucket_summary(doc),
        "cell_traffic.csv": cell_traffic(doc),
    }
    for name, frame in tables.items():
        _write_csv(frame, out_dir / name)
        written.append(out_dir / name)

    if doc.blocks:
        for entry in doc.satisfaction:
            label = _block_label(doc, entry.application, entry.contract)
            for suffix, values in (("", entry.optimized), ("_baseline", entry.baseline)):
                path = out_dir / f"grid_{label}{suffix}.csv"
                _write_csv(bucket_grid(doc, values), path)
                written.append(path)
        if svg:
            written.extend(_render_svgs(doc, out_dir, tables["cell_traffic.csv"]))
    else:
        for a in range(len(doc.grid.applications)):
            for b in range(len(doc.grid.contracts)):
                label = _block_label(doc, a, b)
                for suffix in ("", "_baseline"):
                    path = out_dir / f"grid_{label}{suffix}.csv"
                    _write_csv(empty_grid(doc), path)
                    written.append(path)

    logger.info("Report written to %s (%d files)", out_dir, len(written))
    return written
