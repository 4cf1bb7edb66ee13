"""Plain-text model files.

Layout (all numbers as decimal with 17 significant digits, which round-trips
IEEE doubles exactly):

    cpcapp-model v1
    <method> <M> <K> <alpha> <loading>
    <mean_bg as CSV>
    <mean_fg as CSV>
    <eigenvalues as CSV>
    <M rows of F as CSV>
    W                      (optional basis block)
    <M rows of W as CSV>

``alpha`` is written as ``nan`` for methods that have no contrast parameter.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParseError
from .reducers import FilterBank

MAGIC = "cpcapp-model v1"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _row(values) -> str:
    return ",".join(_fmt(v) for v in values)


def _parse_row(line: str, lineno: int, path: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in line.split(",")])
    except ValueError as exc:
        raise ParseError(f"{path}:{lineno}: bad numeric row: {exc}") from exc


def save_model(path, bank: FilterBank, w: np.ndarray | None = None) -> None:
    """Write a filter bank (and optionally its paired basis W) as text."""
    alpha = bank.alpha if bank.alpha is not None else math.nan
    lines = [
        MAGIC,
        f"{bank.method} {bank.features} {bank.k} {_fmt(alpha)} {_fmt(bank.loading)}",
        _row(bank.train_mean_bg),
        _row(bank.train_mean_fg),
        _row(bank.eigenvalues),
    ]
    lines.extend(_row(row) for row in bank.f)
    if w is not None:
        if w.shape != bank.f.shape:
            raise ParseError(f"W shape {w.shape} does not match filter shape {bank.f.shape}")
        lines.append("W")
        lines.extend(_row(row) for row in w)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> tuple[FilterBank, np.ndarray | None]:
    """Read a model file back; returns the bank and the W block if present."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [line.rstrip("\n") for line in fh]
    path = str(path)
    if not lines or lines[0] != MAGIC:
        raise ParseError(f"{path}:1: not a model file (expected '{MAGIC}')")
    try:
        method, m_s, k_s, alpha_s, loading_s = lines[1].split()
        m, k = int(m_s), int(k_s)
        alpha = float(alpha_s)
        loading = float(loading_s)
    except (ValueError, IndexError) as exc:
        raise ParseError(f"{path}:2: bad header line: {exc}") from exc
    if len(lines) < 5 + m:
        raise ParseError(f"{path}: truncated file, expected at least {5 + m} lines")
    mean_bg = _parse_row(lines[2], 3, path)
    mean_fg = _parse_row(lines[3], 4, path)
    eigenvalues = _parse_row(lines[4], 5, path)
    f = np.vstack([_parse_row(lines[5 + i], 6 + i, path) for i in range(m)])
    for name, arr, want in (
        ("mean_bg", mean_bg, m),
        ("mean_fg", mean_fg, m),
        ("eigenvalues", eigenvalues, k),
    ):
        if arr.shape != (want,):
            raise ParseError(f"{path}: {name} has {arr.shape[0]} entries, expected {want}")
    if f.shape != (m, k):
        raise ParseError(f"{path}: filter block is {f.shape}, expected {(m, k)}")
    w = None
    rest = [line for line in lines[5 + m:] if line]
    if rest:
        if rest[0] != "W":
            raise ParseError(f"{path}: unexpected trailing block {rest[0]!r}")
        if len(rest) != 1 + m:
            raise ParseError(f"{path}: W block has {len(rest) - 1} rows, expected {m}")
        w = np.vstack([_parse_row(row, 0, path) for row in rest[1:]])
        if w.shape != (m, k):
            raise ParseError(f"{path}: W block is {w.shape}, expected {(m, k)}")
    bank = FilterBank(
        method=method,
        f=f,
        train_mean_bg=mean_bg,
        train_mean_fg=mean_fg,
        eigenvalues=eigenvalues,
        loading=loading,
        alpha=None if math.isnan(alpha) else alpha,
    )
    return bank, w
