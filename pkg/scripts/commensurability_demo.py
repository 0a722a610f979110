"""Compare typesets of Z^2 x| Z/2 and Z^2 with and without restriction.

Unrestricted, the semidirect product only shows [1] and [(2*3)^inf] while
the lattice shows four types.  Restricting the semidirect chain to its
translation subgroup (level 1 of the abelian-prefix chain) recovers all four.
"""

import argparse

from otl import engine
from otl.chain import RestrictedContext
from otl.families import Schedule, SemidirectPermutationFamily, ZnDiagonalFamily


def show(name, ts):
    print(f"{name}: {{{', '.join(ts.labels())}}}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--max-word-length", type=int, default=4)
    args = ap.parse_args()
    sched = [Schedule(infinite=(2,)), Schedule(infinite=(3,))]
    semi = SemidirectPermutationFamily(sched, [[1, 0]])
    prefix = SemidirectPermutationFamily(sched, [[1, 0]], abelian_prefix=True)
    lattice = ZnDiagonalFamily(sched)
    a = engine.typeset_sample(semi, args.max_word_length, args.depth)
    ah = engine.typeset_sample(prefix, args.max_word_length, args.depth, RestrictedContext(1))
    b = engine.typeset_sample(lattice, args.max_word_length, args.depth)
    show("semidirect", a)
    show("semidirect restricted to Z^2", ah)
    show("lattice", b)
    for name, x in (("unrestricted", a), ("restricted", ah)):
        c = engine.commensurable(x, b)
        witness = f", witness {c.witness.label()} on side {c.witness_side}" if c.witness else ""
        print(f"{name} vs lattice: {c.verdict}{witness}{' (certified)' if c.certified else ''}")


if __name__ == "__main__":
    main()
