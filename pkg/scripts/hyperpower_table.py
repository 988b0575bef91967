#!/usr/bin/env python3
"""List the hyper-power set of a small frame, optionally under exclusivity constraints.

    python scripts/hyperpower_table.py A B C
    python scripts/hyperpower_table.py A B C --exclusive A,B
"""
import argparse

from evtrack.hyperpower import enumerate_hyper_power_set
from evtrack.propositions import make_frame

p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
p.add_argument("labels", nargs="+")
p.add_argument("--exclusive", action="append", default=[], metavar="X,Y",
               help="declare two singletons exclusive (repeatable)")
args = p.parse_args()

frame = make_frame(args.labels)
pairs = [tuple(x.split(",")) for x in args.exclusive]
elements = enumerate_hyper_power_set(frame, pairs)
for n, x in enumerate(elements):
    print(f"{n:4d}  {x}")
print(f"|D| = {len(elements)}")
