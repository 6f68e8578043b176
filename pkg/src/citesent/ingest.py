"""Corpus layout, plain-text loading, title index and external PDF conversion.

A corpus is a directory with one folder per root paper::

    <corpus>/<root_id>/root.txt        # the cited (root) paper
    <corpus>/<root_id>/<citing>.txt    # any number of citing papers
    <corpus>/<root_id>/labels.csv      # optional, header ``citing_file,label``
"""

from __future__ import annotations

import csv
import enum
import logging
import os
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import ArgumentError, ConversionFailed

logger = logging.getLogger(__name__)

ROOT_FILENAME = "root.txt"
LABELS_FILENAME = "labels.csv"
TITLE_INDEX_HEADER = ("root_id", "title")


class SentimentLabel(enum.Enum):
    """Citation sentiment toward the root paper (neutral is not modelled)."""

    TypeI = "I"
    TypeII = "II"

    @classmethod
    def parse(cls, text: str) -> "SentimentLabel":
        key = text.strip().upper()
        for prefix in ("TYPE-", "TYPE"):
            if key.startswith(prefix):
                key = key[len(prefix):].strip()
        try:
            return cls(key)
        except ValueError:
            raise ArgumentError(f"unknown sentiment label {text!r}") from None

    # members are singletons compared by identity; the inherited Enum hash
    # is a Python-level call that dominates dict-heavy scoring loops
    __hash__ = object.__hash__

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CorpusEntry:
    root_id: str
    root_title: str
    root_text_path: Path
    citing_paths: tuple[Path, ...]
    labels: Mapping[Path, SentimentLabel] = field(default_factory=dict)

    def __post_init__(self):
        if not normalize_space(self.root_title):
            raise ArgumentError(f"{self.root_id}: empty root title")
        if len(set(self.citing_paths)) != len(self.citing_paths):
            raise ArgumentError(f"{self.root_id}: duplicate citing paths")
        stray = set(self.labels) - set(self.citing_paths)
        if stray:
            raise ArgumentError(f"{self.root_id}: labels for unknown files {sorted(map(str, stray))}")

    def citing_id(self, path: Path) -> str:
        return f"{self.root_id}/{path.stem}"


def normalize_space(text: str) -> str:
    return " ".join(text.split())


def _note(diagnostics: list[str] | None, message: str) -> None:
    logger.warning(message)
    if diagnostics is not None:
        diagnostics.append(message)


def read_text(path: str | os.PathLike) -> str:
    """Read a file as UTF-8, replacing undecodable bytes."""
    with open(path, "rb") as fh:
        return fh.read().decode("utf-8", errors="replace")


def _first_line(text: str) -> str:
    for line in text.splitlines():
        if line.strip():
            return normalize_space(line)
    return ""


def load_labels(path: Path, citing_paths: tuple[Path, ...],
                diagnostics: list[str] | None = None) -> dict[Path, SentimentLabel]:
    by_name = {p.name: p for p in citing_paths}
    labels: dict[Path, SentimentLabel] = {}
    with open(path, newline="", encoding="utf-8", errors="replace") as fh:
        rows = list(csv.reader(fh))
    if rows and [c.strip() for c in rows[0]] == ["citing_file", "label"]:
        rows = rows[1:]
    for lineno, row in enumerate(rows, start=2):
        if not row or not any(c.strip() for c in row):
            continue
        if len(row) != 2:
            _note(diagnostics, f"{path}:{lineno}: malformed label row {row!r}")
            continue
        name, raw = row[0].strip(), row[1]
        if name not in by_name:
            _note(diagnostics, f"{path}:{lineno}: label for unknown citing file {name!r}")
            continue
        try:
            labels[by_name[name]] = SentimentLabel.parse(raw)
        except ArgumentError as exc:
            _note(diagnostics, f"{path}:{lineno}: {exc}")
    return labels


def scan_corpus(root_dir: str | os.PathLike,
                titles: Mapping[str, str] | None = None,
                diagnostics: list[str] | None = None) -> list[CorpusEntry]:
    """Return one :class:`CorpusEntry` per subfolder holding a ``root.txt``.

    The root title comes from ``titles`` when it has the folder's id, otherwise
    from the first non-blank line of ``root.txt``. Folders are visited in
    lexicographic order and citing files are sorted by name.
    """
    root_dir = Path(root_dir)
    if not root_dir.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root_dir}")
    try:
        folders = sorted(p for p in root_dir.iterdir() if p.is_dir())
    except OSError as exc:
        raise OSError(f"cannot read corpus directory {root_dir}: {exc}") from exc

    entries = []
    for folder in folders:
        root_path = folder / ROOT_FILENAME
        if not root_path.is_file():
            _note(diagnostics, f"{folder}: no {ROOT_FILENAME}, skipped")
            continue
        root_id = folder.name
        title = (titles or {}).get(root_id) or _first_line(read_text(root_path))
        if not title:
            _note(diagnostics, f"{folder}: no title available, skipped")
            continue
        citing = tuple(sorted(p for p in folder.glob("*.txt")
                              if p.name != ROOT_FILENAME and p.is_file()))
        labels_path = folder / LABELS_FILENAME
        labels = load_labels(labels_path, citing, diagnostics) if labels_path.is_file() else {}
        entries.append(CorpusEntry(root_id, normalize_space(title), root_path, citing, labels))
    return entries


def load_title_index(index_path: str | os.PathLike,
                     diagnostics: list[str] | None = None) -> dict[str, str]:
    """Load a ``root_id,title`` CSV. The header row is optional."""
    index: dict[str, str] = {}
    with open(index_path, newline="", encoding="utf-8", errors="replace") as fh:
        rows = list(csv.reader(fh))
    start = 0
    if rows and tuple(c.strip() for c in rows[0]) == TITLE_INDEX_HEADER:
        start = 1
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row:
            continue
        if len(row) != 2:
            _note(diagnostics, f"{index_path}:{lineno}: malformed row {row!r}, skipped")
            continue
        root_id, title = row[0].strip(), normalize_space(row[1])
        if not root_id or not title:
            _note(diagnostics, f"{index_path}:{lineno}: empty root_id or title, skipped")
            continue
        if root_id in index:
            _note(diagnostics, f"{index_path}:{lineno}: duplicate root_id {root_id!r}, last row wins")
        index[root_id] = title
    return index


def write_title_index(index: Mapping[str, str], index_path: str | os.PathLike) -> None:
    with open(index_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TITLE_INDEX_HEADER)
        for root_id, title in index.items():
            writer.writerow([root_id, title])


def convert_pdf(pdf_path: str | os.PathLike, converter_cmd: str, timeout: float = 300) -> str:
    """Run an external converter and return its text output verbatim.

    ``converter_cmd`` is a shell-style command line. ``{input}`` is replaced by
    the PDF path (appended when absent). When ``{output}`` appears, the
    converter is expected to write there; otherwise its stdout is the text.
    """
    args = shlex.split(converter_cmd)
    if not args:
        raise ArgumentError("empty converter command")
    pdf_path = os.fspath(pdf_path)
    if not any("{input}" in a for a in args):
        args.append("{input}")
    with tempfile.TemporaryDirectory() as tmp:
        out_path = os.path.join(tmp, "out.txt")
        wants_file = any("{output}" in a for a in args)
        argv = [a.replace("{input}", pdf_path).replace("{output}", out_path) for a in args]
        try:
            proc = subprocess.run(argv, capture_output=True, timeout=timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ConversionFailed(f"{pdf_path}: converter could not run: {exc}") from exc
        if proc.returncode != 0:
            err = proc.stderr.decode("utf-8", errors="replace").strip()
            raise ConversionFailed(f"{pdf_path}: converter exited {proc.returncode}: {err}")
        if wants_file:
            text = read_text(out_path) if os.path.exists(out_path) else ""
        else:
            text = proc.stdout.decode("utf-8", errors="replace")
    if not text.strip():
        raise ConversionFailed(f"{pdf_path}: converter produced no text")
    return text


_SAFE_ID = re.compile(r"[^\w.\-]+")


def safe_filename(text: str) -> str:
    return _SAFE_ID.sub("_", text).strip("_") or "record"
