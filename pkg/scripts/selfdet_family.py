"""Tri-agreement of the self-determinacy conditions on the generated subset family."""
import argparse

from bdlab import stages, suites

ap = argparse.ArgumentParser()
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--Q", type=int, default=6)
args = ap.parse_args()

st = stages.micro_stage()
r = suites.tri_agreement(st, stages.subset_family(st, args.seed), args.Q)
for row in r["specs"]:
    print(f"{row['tag']:28s} members={row['members']:4d} agree={row['agree_all_q']} "
          f"self_determined={row['self_determined']}")
print("pass", r["pass"])
