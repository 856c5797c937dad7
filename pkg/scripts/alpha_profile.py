"""alpha-profile decay table of two-term basis blocks against basic averages of
sizes 1, 2 and 4, as CSV."""
from bdlab import bmt, stages
from bdlab import witnesses as W
from bdlab.bd_core import BlockVector

st, reg = stages.witness_stage()
ids = W.place_basis(st, 2, 8)
xs = [BlockVector.basis(st, a) - BlockVector.basis(st, b) for a, b in zip(ids[::2], ids[1::2])]
pool = W.basis_normers(st, ids)
for k in range(0, 8, 2):
    pool.append(bmt.basic_average(st, [(1, ids[k]), (-1, ids[k + 1])], 2))
for k in range(0, 8, 4):
    pool.append(bmt.basic_average(st, [(1, g) for g in ids[k:k + 4]], 4))
print(W.profile_csv(W.alpha_profile(st, xs, pool)), end="")
