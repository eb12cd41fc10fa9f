"""Shared tensors, panels and files for the helix tests."""

import csv
from pathlib import Path

import numpy as np

from helix.ingest import PanelSeries
from helix.tensor import ContingencyTensor

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
SYNTHETIC_PANEL = DATA_DIR / "synthetic_panel.csv"
CROSSWALK = DATA_DIR / "nace_crosswalk.csv"


def xor_tensor(weight=1):
    """Uniform over the four cells with even parity: T = -1 bit."""
    counts = np.zeros((2, 2, 2), dtype=np.int64)
    for i in range(2):
        for j in range(2):
            counts[i, j, i ^ j] = weight
    return ContingencyTensor.from_counts(counts)


def uniform_tensor(shape=(2, 2, 2), weight=1):
    return ContingencyTensor.from_counts(np.full(shape, weight, dtype=np.int64))


def product_tensor(p_i, p_j, p_k, scale):
    """Exact product counts: scale * p_i * p_j * p_k must be whole numbers."""
    counts = np.einsum("i,j,k->ijk", p_i, p_j, p_k) * scale
    return ContingencyTensor.from_counts(np.rint(counts).astype(np.int64))


def random_tensor(rng, shape=None, high=50, sparsity=0.0):
    if shape is None:
        shape = tuple(int(size) for size in rng.integers(1, [20, 9, 11]))
    counts = rng.integers(0, high, size=shape)
    if sparsity:
        counts[rng.random(shape) < sparsity] = 0
    if counts.sum() == 0:
        counts.flat[0] = 1
    return ContingencyTensor.from_counts(counts)


def random_panel(rng, years=6, shape=(4, 3, 5), start_year=2002, high=40):
    labels = (
        tuple(f"county{index}" for index in range(shape[0])),
        tuple(f"band{index}" for index in range(shape[1])),
        tuple(f"class{index}" for index in range(shape[2])),
    )
    tensors = []
    for _ in range(years):
        counts = rng.integers(1, high, size=shape)
        tensors.append(ContingencyTensor(labels=labels, counts=counts))
    return PanelSeries(years=tuple(range(start_year, start_year + years)), tensors=tuple(tensors))


def repeated_panel(tensor, years=5, start_year=2002):
    return PanelSeries(years=tuple(range(start_year, start_year + years)), tensors=(tensor,) * years)


def write_rows(path, rows, header=("year", "geo", "org", "tech", "count")):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        if header:
            writer.writerow(header)
        writer.writerows(rows)
    return path


def panel_rows(panel):
    """Long-format rows for every cell of a panel, zeros included."""
    rows = []
    for year, tensor in panel:
        for (geo, org, tech), count in np.ndenumerate(tensor.counts):
            rows.append((year, tensor.labels[0][geo], tensor.labels[1][org], tensor.labels[2][tech], int(count)))
    return rows
