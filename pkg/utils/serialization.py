"""
Plain-text formats for lattice states, operators and Monte Carlo results.

States and operators: '#' header lines (label, shape), then one complex number
per line as "re im" in %.17g, operators row-major. Results: CSV with header
n,epsilon,trials,mean_dist_sq,std_error,seed.
"""
import csv
import logging
from pathlib import Path
from typing import Iterable, List, Union

import numpy as np

from schemas.holography import McResult
from schemas.lattice import LatticeState, OperatorMatrix
from utils.validation import DomainError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
RESULTS_HEADER = ["n", "epsilon", "trials", "mean_dist_sq", "std_error", "seed"]


def _write_complex(path: PathLike, values: np.ndarray, header: List[str]):
    pairs = np.column_stack([values.real, values.imag])
    np.savetxt(path, pairs, fmt="%.17g", delimiter=" ", header="\n".join(header), comments="# ")


def _read_complex(path: PathLike):
    header = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(":")
            header[key.strip()] = value.strip()

    pairs = np.loadtxt(path, comments="#", ndmin=2)
    if pairs.size and pairs.shape[1] != 2:
        raise DomainError(f"{path}: expected 're im' pairs, got {pairs.shape[1]} columns")
    return header, pairs[:, 0] + 1j * pairs[:, 1]


def write_state(psi: LatticeState, path: PathLike, label: str = "psi"):
    _write_complex(path, psi.amplitudes, [f"label: {label}", f"shape: {psi.dimension}"])
    logger.debug("Wrote state %s (%d amplitudes) to %s", label, psi.dimension, path)


def read_state(path: PathLike) -> LatticeState:
    header, values = _read_complex(path)
    expected = header.get("shape")
    if expected is not None and int(expected) != values.size:
        raise DomainError(f"{path}: header declares {expected} amplitudes, found {values.size}")
    return LatticeState(amplitudes=values)


def write_operator(op: OperatorMatrix, path: PathLike):
    n = op.dimension
    _write_complex(path, op.entries.reshape(-1), [f"label: {op.label}", f"shape: {n} {n}"])
    logger.debug("Wrote operator %s (%dx%d) to %s", op.label, n, n, path)


def read_operator(path: PathLike) -> OperatorMatrix:
    header, values = _read_complex(path)
    try:
        rows, cols = (int(s) for s in header["shape"].split())
    except (KeyError, ValueError):
        raise DomainError(f"{path}: operator files need a '# shape: n n' header")
    if rows * cols != values.size:
        raise DomainError(f"{path}: shape {rows}x{cols} does not match {values.size} entries")
    return OperatorMatrix(entries=values.reshape(rows, cols), label=header.get("label", ""))


def write_results_csv(results: Iterable[McResult], path: PathLike):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULTS_HEADER)
        for r in results:
            writer.writerow([r.n_qubits, repr(r.epsilon), r.trials, repr(r.mean_dist_sq), repr(r.std_error), r.seed])


def read_results_csv(path: PathLike) -> List[McResult]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULTS_HEADER:
            raise DomainError(f"{path}: expected header {','.join(RESULTS_HEADER)}")
        return [
            McResult(
                n_qubits=int(row["n"]),
                epsilon=float(row["epsilon"]),
                trials=int(row["trials"]),
                mean_dist_sq=float(row["mean_dist_sq"]),
                std_error=float(row["std_error"]),
                seed=int(row["seed"]),
            )
            for row in reader
        ]
