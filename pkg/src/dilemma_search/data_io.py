"""Readers for knapsack instances and categorical CSV datasets, writers for
traces and run summaries."""
from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence, Union

from .core import Trace
from .decision_tree import Dataset, bin_labels, quantize_numeric
from .errors import DomainError, ParseError, RaggedRow
from .knapsack import KnapsackInstance

TRACE_HEADER = "iteration,candidate_energy,best_energy,selected_depth,selection_score,heuristic_gap,elapsed_ms"
MEAN_HEADER = "iteration,mean_best_energy,n_seeds"

Destination = Union[str, os.PathLike, IO[str]]


def _int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(line, f"{what} is not an integer: {token!r}") from None


def parse_knapsack(text: str) -> KnapsackInstance:
    """Parse ``n W`` followed by ``n`` lines of ``value weight``."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    numbered = [(k + 1, line.split()) for k, line in enumerate(lines)]
    content = [(k, toks) for k, toks in numbered if toks]
    if not content:
        raise ParseError(1, "empty input")
    first_line, head = content[0]
    if len(head) != 2:
        raise ParseError(first_line, f"expected 'n W', found {len(head)} fields")
    n = _int(head[0], first_line, "item count")
    W = _int(head[1], first_line, "capacity")
    if n < 0:
        raise ParseError(first_line, "item count must be >= 0")
    if W < 1:
        raise ParseError(first_line, "capacity must be ≥ 1")
    body = content[1:]
    if len(body) != n:
        where = body[n][0] if len(body) > n else (body[-1][0] + 1 if body else first_line + 1)
        raise ParseError(where, f"expected {n} items, found {len(body)}")
    pairs = []
    for line, toks in body:
        if len(toks) != 2:
            raise ParseError(line, f"expected 'value weight', found {len(toks)} fields")
        v = _int(toks[0], line, "value")
        w = _int(toks[1], line, "weight")
        if v < 0:
            raise ParseError(line, "value must be ≥ 0")
        if w < 1:
            raise ParseError(line, "weight must be ≥ 1")
        pairs.append((v, w))
    return KnapsackInstance.from_pairs(pairs, W)


def format_knapsack(instance: KnapsackInstance) -> str:
    out = [f"{instance.n} {instance.capacity}"]
    out += [f"{it.value} {it.weight}" for it in instance.items]
    return "\n".join(out) + "\n"


def parse_bin_spec(spec: str) -> tuple:
    """``"col:k"`` -> ``("col", k)``."""
    name, sep, k = spec.rpartition(":")
    if not sep or not name:
        raise ValueError(f"bin spec must look like col:k, got {spec!r}")
    try:
        return name, int(k)
    except ValueError:
        raise ValueError(f"bin count must be an integer in {spec!r}") from None


def parse_dataset(text: str, bins: Sequence = ()) -> Dataset:
    """CSV with a header row; the last column is the class label.

    ``bins`` holds ``(column, k)`` pairs (or ``"column:k"`` strings) for
    numeric columns to quantise into ``k`` equal-width categories.
    """
    reader = csv.reader(io.StringIO(text))
    table = [row for row in reader]
    while table and not any(cell.strip() for cell in table[-1]):
        table.pop()
    if not table:
        raise ParseError(1, "empty input")
    header = [h.strip() for h in table[0]]
    if len(header) < 2:
        raise ParseError(1, "need at least one attribute column and a class column")
    if len(set(header)) != len(header):
        raise ParseError(1, "duplicate column names")
    body = table[1:]
    if not body:
        raise ParseError(2, "no data rows")
    for k, row in enumerate(body):
        if len(row) != len(header):
            raise RaggedRow(k + 2, len(header), len(row))
    cells = [[c.strip() for c in row] for row in body]
    attributes = header[:-1]
    columns = [[row[j] for row in cells] for j in range(len(attributes))]
    values = [sorted(set(col)) for col in columns]
    for spec in bins:
        name, k = parse_bin_spec(spec) if isinstance(spec, str) else spec
        if name not in attributes:
            raise ParseError(1, f"--bin column {name!r} not in header")
        j = attributes.index(name)
        numeric = []
        for r, cell in enumerate(columns[j]):
            try:
                x = float(cell)
            except ValueError:
                raise ParseError(r + 2, f"non-numeric value {cell!r} in binned column", column=j + 1) from None
            if not math.isfinite(x):
                raise ParseError(r + 2, f"non-finite value {cell!r} in binned column", column=j + 1)
            numeric.append(x)
        try:
            q = quantize_numeric(numeric, k)
        except DomainError as exc:
            raise ParseError(1, str(exc), column=j + 1) from None
        columns[j] = q.labels
        values[j] = [f"b{i}" for i in range(1 if q.constant else k)]
    rows = [(tuple(col[r] for col in columns), cells[r][-1]) for r in range(len(cells))]
    return Dataset.from_rows(attributes, rows, class_name=header[-1], values=values)


def fingerprint(data: Union[str, bytes]) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def _g(x: float) -> str:
    return f"{x:.9g}"


def format_trace(trace: Trace, timing: bool = True) -> str:
    seed = "na" if trace.seed is None else str(trace.seed)
    rng = trace.rng or "na"
    lines = [f"# algo={trace.algo} seed={seed} rng={rng} depth_const={_g(trace.depth_const)} "
             f"epsilon={_g(trace.epsilon)}", TRACE_HEADER]
    for r in trace.records:
        lines.append(",".join([str(r.iteration), _g(r.candidate_energy), _g(r.best_energy),
                               str(r.selected_depth), _g(r.selection_score), _g(r.heuristic_gap),
                               str(r.elapsed_ms if timing else 0)]))
    return "\n".join(lines) + "\n"


def _write(text: str, destination: Destination) -> int:
    data = text.encode("utf-8")
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_bytes(data)
    return len(data)


def write_trace(trace: Trace, destination: Destination, timing: bool = True) -> int:
    """Write the trace CSV; returns the number of bytes written."""
    return _write(format_trace(trace, timing), destination)


def mean_best_energies(traces: Sequence[Trace]) -> list:
    """Per-iteration mean best-so-far energy; short traces carry their last value forward."""
    length = max(len(t) for t in traces)
    series = []
    for t in traces:
        best = t.best_energies()
        series.append(best + [best[-1]] * (length - len(best)))
    return [math.fsum(s[i] for s in series) / len(series) for i in range(length)]


def write_mean_trace(traces: Sequence[Trace], destination: Destination) -> int:
    means = mean_best_energies(traces)
    lines = [f"# algo={traces[0].algo} seeds={','.join(str(t.seed) for t in traces)}", MEAN_HEADER]
    lines += [f"{i},{_g(m)},{len(traces)}" for i, m in enumerate(means)]
    return _write("\n".join(lines) + "\n", destination)


@dataclass
class RunSummary:
    algo: str
    seeds: list
    iterations: int
    best_energy: float
    best_iteration: int
    wall_ms: int
    depth_const: float
    epsilon: float
    fingerprint: str
    stopping: dict = field(default_factory=dict)

    def lines(self) -> list:
        stop = ";".join(f"{k}:{v}" for k, v in self.stopping.items()) or "na"
        return [
            f"algo={self.algo}",
            f"seeds={','.join(str(s) for s in self.seeds) or 'na'}",
            f"iterations={self.iterations}",
            f"best_energy={_g(self.best_energy)}",
            f"best_iteration={self.best_iteration}",
            f"wall_ms={self.wall_ms}",
            f"depth_const={_g(self.depth_const)}",
            f"epsilon={_g(self.epsilon)}",
            f"stopping={stop}",
            f"fingerprint={self.fingerprint}",
        ]


def write_summary(summary: RunSummary, destination: Destination) -> int:
    return _write("\n".join(summary.lines()) + "\n", destination)


def read_summary(text: str) -> dict:
    return dict(line.split("=", 1) for line in text.splitlines() if line)
