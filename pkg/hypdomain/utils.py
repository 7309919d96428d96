"""
Utility functions for hypdomain: file helpers and complex-pair codecs.
"""
import csv
import hashlib
import json
import os
import re
from pathlib import Path
from typing import Any, Iterable, List, Sequence

import numpy as np

from .schemas import ReportDoc, serialize_report


def pairs_to_complex(pairs: Iterable[Sequence[float]]) -> np.ndarray:
    """
    Convert [[re, im], ...] to a complex vector.

    Args:
        pairs: Iterable of two-element sequences

    Returns:
        complex128 array
    """
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        return np.zeros(0, dtype=np.complex128)
    arr = np.asarray(pairs, dtype=float)
    return arr[:, 0] + 1j * arr[:, 1]


def complex_to_pairs(z: Iterable[complex]) -> List[List[float]]:
    return [[float(np.real(v)), float(np.imag(v))] for v in z]


def parse_point(text: str) -> np.ndarray:
    """
    Parse a point given on the command line.

    Accepts a JSON list of [re, im] pairs (``[[1,0],[2,1]]``) or a
    comma-separated list of Python complex literals (``1,2+1j``).

    Raises:
        ValueError: If the text is neither form
    """
    text = text.strip()
    if text.startswith("["):
        return pairs_to_complex(json.loads(text))
    return np.array([complex(part.replace(" ", "")) for part in text.split(",")], dtype=np.complex128)


def list_domain_jsons(dir_path: str = "opt/domains") -> List[str]:
    """
    List all domain JSON files in a directory.

    Args:
        dir_path: Directory to search

    Returns:
        Sorted list of JSON file paths
    """
    if not os.path.exists(dir_path):
        return []
    return sorted(
        os.path.join(dir_path, name) for name in os.listdir(dir_path) if name.endswith(".json")
    )


def read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def atomic_write(path: str, text: str) -> None:
    """Write text to path via a temporary file in the same directory."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
    os.replace(tmp, path)


def save_report(report: ReportDoc, path: str) -> None:
    atomic_write(path, serialize_report(report) + "\n")


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """
    Write a CSV table atomically.

    Args:
        path: Output file path
        header: Column names
        rows: Row values
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
    os.replace(tmp, path)


def point_columns(prefix: str, dim: int) -> List[str]:
    """Column names prefix1_re, prefix1_im, ... for a point in C^dim."""
    cols = []
    for j in range(1, dim + 1):
        cols.extend([f"{prefix}{j}_re", f"{prefix}{j}_im"])
    return cols


def flatten_point(z: Iterable[complex]) -> List[float]:
    return [x for pair in complex_to_pairs(z) for x in pair]


def sha256_text(text: str) -> str:
    """
    Compute SHA256 hash of text.

    Args:
        text: Input text

    Returns:
        Hexadecimal hash string
    """
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def clean_filename(filename: str) -> str:
    """
    Clean filename for safe filesystem usage.

    Args:
        filename: Original filename

    Returns:
        Cleaned stem, lowercase
    """
    name = Path(filename).stem
    # Keep only alphanumeric chars, hyphens, and underscores
    cleaned = re.sub(r"[^a-zA-Z0-9\-_]", "_", name)
    cleaned = re.sub(r"_+", "_", cleaned)
    cleaned = cleaned.strip("_")
    return cleaned.lower() if cleaned else "domain"
