"""Embedding and energy-trace file formats, plus atomic file output."""
from __future__ import annotations

import contextlib
import csv
import os
import tempfile
from typing import IO, Sequence

import numpy as np


@contextlib.contextmanager
def atomic_write(path: str | os.PathLike, mode: str = "w"):
    """Write to a temp file next to *path* and rename it into place on success."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, mode, encoding="utf-8", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_embedding(stream: IO[str], ids: Sequence[str], U: np.ndarray) -> None:
    """Header ``"|V| n"`` then ``original_id v1 ... vn`` at 9 significant digits."""
    U = np.asarray(U)
    if U.shape[0] != len(ids):
        raise ValueError("one id per embedding row required")
    stream.write(f"{U.shape[0]} {U.shape[1]}\n")
    for name, row in zip(ids, U.tolist()):
        stream.write(name + " " + " ".join(f"{v:.9g}" for v in row) + "\n")


def read_embedding(stream: IO[str]) -> tuple[list[str], np.ndarray]:
    header = stream.readline().split()
    if len(header) != 2:
        raise ValueError("embedding header must be '|V| n'")
    count, dim = int(header[0]), int(header[1])
    ids, rows = [], []
    for lineno, line in enumerate(stream, start=2):
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != dim + 1:
            raise ValueError(f"line {lineno}: expected {dim + 1} tokens, got {len(tokens)}")
        ids.append(tokens[0])
        rows.append([float(t) for t in tokens[1:]])
    if len(ids) != count:
        raise ValueError(f"header says {count} rows, found {len(ids)}")
    return ids, np.array(rows, dtype=np.float64).reshape(count, dim)


def align_embedding(ids: Sequence[str], U: np.ndarray, graph_ids: Sequence[str]) -> np.ndarray:
    """Reorder rows of a loaded embedding to match *graph_ids*."""
    pos = {name: k for k, name in enumerate(ids)}
    missing = [name for name in graph_ids if name not in pos]
    if missing:
        raise ValueError(f"embedding lacks {len(missing)} graph nodes, e.g. {missing[0]!r}")
    return U[[pos[name] for name in graph_ids]]


def write_trace(stream: IO[str], energies: Sequence[float], dim: int) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["iter", "energy", "energy_per_dim"])
    for t, e in enumerate(energies, start=1):
        writer.writerow([t, repr(float(e)), repr(float(e) / dim)])
