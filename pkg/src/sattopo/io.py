"""File formats: matrix CSV, edge lists, JSON documents. Writes are atomic."""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def matrix_to_csv(m: np.ndarray, ids: list[int] | None = None) -> str:
    """Row-major matrix CSV with a header row of node ids, 17 sig digits."""
    n = m.shape[0]
    ids = ids if ids is not None else list(range(n))
    lines = [",".join(str(i) for i in ids)]
    for row in np.asarray(m, dtype=float):
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def matrix_from_csv(text: str) -> np.ndarray:
    lines = [ln for ln in text.strip().splitlines() if ln]
    rows = [[float(v) for v in ln.split(",")] for ln in lines[1:]]
    return np.array(rows)


def write_matrix_csv(path: Path, m: np.ndarray) -> None:
    atomic_write_text(path, matrix_to_csv(m))


def read_matrix_csv(path: Path) -> np.ndarray:
    return matrix_from_csv(Path(path).read_text())


def write_json(path: Path, doc: dict) -> None:
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_json(path: Path) -> dict:
    return json.loads(Path(path).read_text())


def read_edge_list(text: str) -> list[tuple[int, int]]:
    edges = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        i, j = line.split()
        edges.append((int(i), int(j)))
    return edges
