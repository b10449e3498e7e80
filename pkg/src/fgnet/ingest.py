"""SNAP-style edge-list ingestion."""

from __future__ import annotations

import io
import os

import numpy as np

from .errors import DataError, ParseError
from .graph import Graph, normalize_edges


def _lines(source):
    if isinstance(source, os.PathLike):
        try:
            fh = open(source, "rb")
        except OSError as exc:
            raise DataError(f"cannot open {source}: {exc.strerror}") from exc
        with fh:
            for line in fh:
                yield line.decode("utf-8")
    elif isinstance(source, str):
        yield from io.StringIO(source)
    else:
        for line in source:
            yield line.decode("utf-8") if isinstance(line, bytes) else line


def parse_edge_list(source) -> Graph:
    """Read a whitespace-separated edge list into a simple undirected graph.

    ``source`` is a ``pathlib.Path``, the text itself as a ``str``, or an
    open text/binary stream (any iterable of lines). ``#`` lines and blank lines are skipped. Node
    ids are compacted to ``0..N-1`` in order of first appearance; self-loops
    and repeated edges (in either direction) are dropped and counted in
    ``graph.provenance``.

    Raises
    ------
    ParseError
        On a line that is not two integers; the message carries the line
        number.
    """
    ids: dict[int, int] = {}
    us: list[int] = []
    vs: list[int] = []
    lineno = 0
    lines = _lines(source)
    while True:
        try:
            raw = next(lines)
        except StopIteration:
            break
        except UnicodeDecodeError as exc:
            raise ParseError(f"invalid UTF-8 ({exc.reason})", lineno + 1) from None
        lineno += 1
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected two node ids, got {len(parts)} fields", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer node id in {line!r}", lineno) from None
        ia = ids.setdefault(a, len(ids))
        ib = ids.setdefault(b, len(ids))
        us.append(ia)
        vs.append(ib)
    n = len(ids)
    pairs = np.column_stack([np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64)]) if us else np.zeros((0, 2), np.int64)
    edges, dups, loops = normalize_edges(pairs, n)
    prov = {
        "source": "edge_list",
        "lines": lineno,
        "edge_lines": len(us),
        "duplicates_dropped": dups,
        "self_loops_dropped": loops,
    }
    return Graph(n, edges, provenance=prov)


def read_edge_list(path) -> Graph:
    from pathlib import Path

    return parse_edge_list(Path(path))
