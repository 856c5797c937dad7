"""Exact mixed-Tsirelson norms of (m_j/n_j) sum_{i<=k} e_i against k/n_j + 1/m_j, as CSV."""
import argparse

from bdlab.bd_core import fstr
from bdlab.mixed_tsirelson import check_scc_lemma
from bdlab.schedule import t1

ap = argparse.ArgumentParser()
ap.add_argument("--k", type=int, default=32)
args = ap.parse_args()

r = check_scc_lemma(t1(), 1, args.k)
print("k,norm,tail,bound,lower,pass")
for row in r["rows"]:
    print(row["k"], fstr(row["norm"]), fstr(row["tail"]), fstr(row["bound"]), fstr(row["lower"]), row["pass"], sep=",")
