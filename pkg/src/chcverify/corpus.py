"""The shipped benchmark corpus: names, expected verdicts, categories.

Names ending in `-e` are buggy by convention and expected UNSAFE; all
others are expected SAFE.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

CORPUS_DIR = Path(__file__).parent / "corpus"

CATEGORIES = {
    "div-jumps": "nonlinear-via-recursion",
    "mod-div-mult": "nonlinear-via-recursion",
    "power-monotone": "nonlinear-via-recursion",
    "lucas-vs-fib": "nonlinear-via-recursion",
    "mutual-recursion": "mutation",
    "fold-mutations": "mutation",
    "single-fold": "higher-order",
    "fold-map": "higher-order",
    "map-fold": "higher-order",
    "fold-map-abs": "higher-order",
    "fold-eq": "multi-traversal-list",
    "fold-eq-minus": "multi-traversal-list",
    "fold-append": "multi-traversal-list",
    "length-append": "multi-traversal-list",
    "length-append-simpl": "multi-traversal-list",
    "heads-sum": "multi-traversal-list",
    "sorted": "multi-traversal-list",
}


@dataclass(frozen=True)
class BenchmarkEntry:
    name: str
    path: Path
    expected: str        # SAFE | UNSAFE, from the -e naming convention
    category: str


def base_name(name: str) -> str:
    return name[:-2] if name.endswith("-e") else name


def entry_for(path: Path) -> BenchmarkEntry:
    name = path.stem
    expected = "UNSAFE" if name.endswith("-e") else "SAFE"
    category = CATEGORIES.get(base_name(name), "uncategorized")
    return BenchmarkEntry(name, path, expected, category)


def entries(directory: Path | None = None) -> list:
    directory = Path(directory) if directory else CORPUS_DIR
    return [entry_for(p) for p in sorted(directory.glob("*.chl"))]
