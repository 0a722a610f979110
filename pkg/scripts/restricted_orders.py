"""Level orders of a Basilica element before and after restriction.

g = delta gamma delta^-1 with gamma = b a b^-1 (supported below vertex 0)
and delta = b.  Its orders on the whole tree grow, but inside the stabiliser
of the level-1 vertex they are all 1.
"""

import argparse

from otl import engine
from otl.automata import catalog_family
from otl.chain import RestrictedContext
from otl.verify import BASILICA_DELTA, BASILICA_GAMMA, BASILICA_LEVEL


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=12)
    args = ap.parse_args()
    fam = catalog_family("basilica")
    g = fam.parse(BASILICA_GAMMA).conjugate_by(fam.parse(BASILICA_DELTA))
    whole = engine.element_order_result(g, args.depth, fam)
    ctx = RestrictedContext(BASILICA_LEVEL)
    inner = engine.restricted_order_result(g, ctx, args.depth, fam)
    print(f"word {g}, H = stabiliser of level {BASILICA_LEVEL} vertex")
    print(f"{'level':>5}  {'order':>10}  {'restricted':>10}")
    for l, (m, r) in enumerate(zip(whole.per_level, inner.per_level), start=1):
        print(f"{l:>5}  {str(m):>10}  {str(r):>10}")
    print(f"type {whole.type.label()}, restricted type {inner.type.label()}")


if __name__ == "__main__":
    main()
