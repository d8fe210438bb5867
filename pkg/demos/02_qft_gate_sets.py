"""
The 3-qubit QFT in five native gate sets
========================================

Each variant is rebuilt from the textbook circuit (CP and SWAP lowered to CX,
CX mapped to the native entangler, single-qubit runs resynthesised) and
checked against the DFT matrix.  Larger L should mean a worse sampled
worst case.  Takes about 20 s with 40,000 samples per variant.
"""
from robq.qft_study import compare_variants

cmp = compare_variants(eps_bar=0.05, samples=40000, threads=4)

print(f"{'variant':>8} {'gates':>5} {'depth':>5} {'L':>7} {'L po':>7} {'1-min F':>8} {'1-mean F':>9}")
for r in cmp.results:
    row = r.row()
    print(f"{row['variant']:>8} {row['gates']:>5} {row['depth']:>5} {row['L_norm']:7.2f} "
          f"{row['L_norm_phase_opt']:7.2f} {1 - row['min_fidelity']:8.5f} {1 - row['mean_fidelity']:9.6f}")

# %% rank agreement between L and worst-case infidelity
print("spearman:", round(cmp.spearman(), 3))
