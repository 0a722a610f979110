"""Regenerate the stored golden reports after an intentional change."""

import argparse
from pathlib import Path

from otl.verify import write_golden


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dir", type=Path, help="target directory (default: the package golden directory)")
    args = ap.parse_args()
    for path in write_golden(args.dir):
        print(path)


if __name__ == "__main__":
    main()
