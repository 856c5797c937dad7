"""Dependent sequence of length 4 on basis sources; prints the blow-up value for
every prefix length next to the plain-sum horizon bound."""
import argparse

from bdlab import stages
from bdlab import witnesses as W
from bdlab.bd_core import fstr

ap = argparse.ArgumentParser()
ap.add_argument("--length", type=int, default=4)
ap.add_argument("--C", type=int, default=3584)
args = ap.parse_args()

st, reg = stages.witness_stage()
ds = W.build_dependent_sequence(st, reg, args.length, 1, args.C)
print("weights", [st.node(g).j for g in ds.gammas])
print("a,value,expected,plain_lower,bound")
for a in range(1, args.length + 1):
    b = W.blowup_witness(st, reg, ds, 1, list(range(1, a + 1)))
    print(a, fstr(b["value"]), fstr(b["expected"]), fstr(b["plain_lower"]), fstr(b["plain_bound"]), sep=",")
