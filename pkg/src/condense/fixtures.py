"""Bundled reference witnesses: expressions with their known values and digits."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .arith import exact
from .expr import DigitMultiset, Expr, parse

FIXTURE_HEADER = "# condense witness fixtures v1"


@dataclass(frozen=True)
class Fixture:
    tag: str
    text: str
    expected: object
    digits: DigitMultiset
    line: int

    @property
    def expr(self) -> Expr:
        return parse(self.text)


def parse_fixtures(text: str) -> list[Fixture]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != FIXTURE_HEADER:
        raise ValueError("not a version-1 witness fixture file")
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = [p.strip() for p in line.split(";")]
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        tag, expr_text, expected, digits = parts
        out.append(Fixture(tag, expr_text, exact(expected), DigitMultiset.of(digits), lineno))
    return out


def load_fixtures() -> list[Fixture]:
    data = resources.files("condense").joinpath("data/reference_witnesses.txt").read_text()
    return parse_fixtures(data)
