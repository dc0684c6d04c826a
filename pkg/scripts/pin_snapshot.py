"""Write the verdict snapshot of a regression fixture used by the test suite.

Only rerun this after deliberately changing the fixture; the tests compare
fresh runs against the stored file.
"""

import argparse
import json
from pathlib import Path

from qbhkit.fixtures import get_fixture


def snapshot(name: str) -> dict:
    report = get_fixture(name).run()
    return {r.id: {"verdict": r.verdict, "entries": {e.id: e.verdict_class for e in r.report}} for r in report.results}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("name", nargs="?", default="example2-paper")
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "tests" / "snapshots")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    path = args.out / f"{args.name}.json"
    path.write_text(json.dumps(snapshot(args.name), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
