"""Operation cost counters for the word-RAM, PRAM and PEM cost models."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, fields

COUNTERS = (
    "words_examined", "chars_examined", "comparisons", "nodes_visited",
    "work_units", "span_units", "oracle_invocations", "io_work", "io_span",
)


@dataclass
class CostLedger:
    """Counters charged by one operation.

    ``words_examined`` counts words touched by sequential XOR scans.
    ``work_units`` / ``span_units`` follow the PRAM accounting: a
    sequential scan of m words is m work and m span, a parallel oracle
    round over m words is m work and 1 span.  ``io_work`` / ``io_span``
    count block transfers when ``block_words`` is set.
    """

    words_examined: int = 0
    chars_examined: int = 0
    comparisons: int = 0
    nodes_visited: int = 0
    work_units: int = 0
    span_units: int = 0
    oracle_invocations: int = 0
    io_work: int = 0
    io_span: int = 0
    block_words: int | None = None
    trace: list | None = field(default=None, repr=False)

    def charge_scan(self, first_word: int, words: int) -> None:
        self.words_examined += words
        self.work_units += words
        self.span_units += words
        if self.block_words and words:
            blocks = (first_word + words - 1) // self.block_words - first_word // self.block_words + 1
            self.io_work += blocks
            self.io_span += blocks
        if self.trace is not None:
            self.trace.append(("scan", first_word, words))

    def charge_window(self, first_word: int, words: int) -> None:
        self.oracle_invocations += 1
        self.work_units += words
        self.span_units += 1
        if self.block_words and words:
            blocks = (first_word + words - 1) // self.block_words - first_word // self.block_words + 1
            self.io_work += blocks
            self.io_span += 1
        if self.trace is not None:
            self.trace.append(("window", first_word, words))

    def counters(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in COUNTERS}

    def add(self, other: "CostLedger") -> None:
        for name in COUNTERS:
            setattr(self, name, getattr(self, name) + getattr(other, name))

    def reset(self) -> None:
        for f in fields(self):
            if f.name in COUNTERS:
                setattr(self, f.name, 0)
        if self.trace is not None:
            self.trace.clear()


LEDGER_CSV_COLUMNS = ("op", "work", "span", "invocations", "io_work", "io_span")


def write_ledger_csv(fp, rows) -> None:
    """Dump ``(op_name, CostLedger)`` pairs as CSV."""
    writer = csv.writer(fp)
    writer.writerow(LEDGER_CSV_COLUMNS)
    for op, led in rows:
        writer.writerow((op, led.work_units, led.span_units, led.oracle_invocations,
                         led.io_work, led.io_span))
