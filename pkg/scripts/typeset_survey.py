"""Typesets of every built-in family at a few depths, as a table.

Shows how the sampled typeset settles as the depth grows and which classes
are still truncated (suffix @L) at each depth.
"""

import argparse

from otl import engine
from otl.automata import catalog_family
from otl.families import HeisenbergFamily, Schedule, SemidirectPermutationFamily, ZnDiagonalFamily, ZScheduleFamily


def families():
    two_three = [Schedule(infinite=(2,)), Schedule(infinite=(3,))]
    return [
        ("Z, 3^2 * 2^l", ZScheduleFamily(Schedule(finite=((3, 2),), infinite=(2,))), 3),
        ("Z^2, 2^l x 3^l", ZnDiagonalFamily(two_three), 3),
        ("Z^2 x| Z/2", SemidirectPermutationFamily(two_three, [[1, 0]]), 3),
        ("Heisenberg p=2", HeisenbergFamily(2), 2),
        ("Heisenberg p=2 q=3", HeisenbergFamily(2, 3), 2),
        ("adding machine", catalog_family("adding-machine"), 4),
        ("Grigorchuk", catalog_family("grigorchuk"), 4),
        ("Basilica", catalog_family("basilica"), 3),
        ("Gupta-Sidki p=3", catalog_family("gupta-sidki", p=3), 3),
    ]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depths", type=int, nargs="+", default=[1, 2, 4])
    args = ap.parse_args()
    for label, fam, wl in families():
        print(f"{label}  (words up to length {wl})")
        for depth in args.depths:
            ts = engine.typeset_sample(fam, wl, depth)
            merged = sum(c.inconclusive_merge for c in ts.classes)
            flag = f"  [{merged} merged on truncated data]" if merged else ""
            print(f"  depth {depth:>2}: {{{', '.join(ts.labels())}}}{flag}")


if __name__ == "__main__":
    main()
