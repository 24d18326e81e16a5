"""Benchmark reporting: plain table, JSON/CSV, and rendered figures."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, asdict
from pathlib import Path


@dataclass
class BenchResult:
    name: str
    category: str
    expected: str
    verdict: str
    oracle: str
    time_ms: float
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == self.expected


def render_table(results: list) -> str:
    headers = ("benchmark", "category", "expected", "verdict", "oracle", "time")
    rows = [(r.name, r.category, r.expected,
             r.verdict + ("" if r.ok else " (MISMATCH)"),
             r.oracle, f"{r.time_ms / 1000:.2f}s") for r in results]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    out.append("  ".join("-" * w for w in widths))
    for row in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    mism = sum(1 for r in results if not r.ok)
    out.append("")
    out.append(f"{len(results)} benchmarks, {mism} mismatch(es)")
    return "\n".join(out)


def to_json(results: list) -> str:
    payload = [{"name": r.name, "expected": r.expected, "verdict": r.verdict,
                "oracle": r.oracle, "time_ms": round(r.time_ms, 1)}
               for r in results]
    return json.dumps(payload, indent=2)


def write_report(results: list, out_dir: Path) -> list:
    """CSV + JSON + figures under out_dir; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out_dir / "bench.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["name", "category", "expected", "verdict", "oracle",
                         "time_ms"])
        for r in results:
            writer.writerow([r.name, r.category, r.expected, r.verdict,
                             r.oracle, f"{r.time_ms:.1f}"])
    written.append(csv_path)

    json_path = out_dir / "bench.json"
    json_path.write_text(to_json(results) + "\n")
    written.append(json_path)

    written.append(_figure(results, out_dir / "bench.png"))
    return written


def _figure(results: list, path: Path) -> Path:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = [r.name for r in results]
    times = [r.time_ms / 1000 for r in results]
    colors = ["#2a9d8f" if r.ok else "#e76f51" for r in results]

    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(max(8, 0.42 * len(results)), 8),
        gridspec_kw={"height_ratios": [3, 1]})
    ax1.bar(range(len(results)), times, color=colors)
    ax1.set_xticks(range(len(results)))
    ax1.set_xticklabels(names, rotation=60, ha="right", fontsize=8)
    ax1.set_ylabel("wall time (s)")
    ax1.set_title("verification time per benchmark "
                  "(green: verdict as expected, red: mismatch)")

    cats = sorted({r.category for r in results})
    ok_counts = [sum(1 for r in results if r.category == c and r.ok)
                 for c in cats]
    bad_counts = [sum(1 for r in results if r.category == c and not r.ok)
                  for c in cats]
    ax2.bar(cats, ok_counts, color="#2a9d8f", label="as expected")
    ax2.bar(cats, bad_counts, bottom=ok_counts, color="#e76f51",
            label="mismatch")
    ax2.set_ylabel("benchmarks")
    ax2.legend(fontsize=8)
    for label in ax2.get_xticklabels():
        label.set_fontsize(8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
