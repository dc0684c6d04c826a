"""Write the built-in fixtures to src/qbhkit/data/*.toml.

Run after editing a fixture definition; tests check the shipped files stay
in sync with the in-code definitions.
"""

import argparse
from pathlib import Path

from qbhkit.fixtures import DEFINITIONS

DATA = Path(__file__).resolve().parents[1] / "src" / "qbhkit" / "data"


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=DATA)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, make in DEFINITIONS.items():
        path = args.out / f"{name}.toml"
        path.write_text(make().dumps(), encoding="utf-8")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
