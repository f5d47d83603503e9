#!/usr/bin/env python3
"""Generate demo inputs: a JSON-lines history export and a fixture result bank.

Usage: python3 scripts/make_demo_data.py [outdir]

Writes outdir/history.jsonl and outdir/bank.json, then prints a quickstart:

    persona --profile outdir/profile.json ingest history outdir/history.jsonl
    persona --profile outdir/profile.json search journal --provider fixture:outdir/bank.json --explain
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from rank_shift_experiment import journal_bank  # noqa: E402


def main() -> None:
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo")
    outdir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(17)

    rows = []
    base = 1_700_000_000
    for i in range(40):
        rows.append({
            "url": f"https://linux.example/page{i}",
            "title": rng.choice([
                "linux kernel weekly news",
                "linux shell scripting guide",
                "linux package manager notes",
            ]),
            "visit_time": base + 60 * i,
            "duration": rng.randint(10, 300),
            "transition": rng.choice(["typed", "clicked"]),
        })
    rows.append({
        "url": "https://www.google.com/search?q=linux+journal",
        "title": "linux journal - search",
        "visit_time": base + 9999,
        "duration": 15,
        "transition": "clicked",
    })
    history = outdir / "history.jsonl"
    history.write_text("\n".join(json.dumps(r) for r in rows) + "\n")

    bank = outdir / "bank.json"
    bank.write_text(json.dumps(journal_bank(), indent=2) + "\n")

    profile = outdir / "profile.json"
    print(f"wrote {history} and {bank}")
    print("quickstart:")
    print(f"  persona --profile {profile} ingest history {history}")
    print(f"  persona --profile {profile} search journal --provider fixture:{bank} --explain")
    print(f"  persona --profile {profile} serve --provider fixture:{bank}")


if __name__ == "__main__":
    main()
