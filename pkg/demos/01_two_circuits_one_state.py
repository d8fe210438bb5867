"""
Two circuits, one target state
==============================

Both circuits map |0> to the same state, but their rotation angles differ.
Under over-rotation noise the one with the smaller total rotation stays
closer to the target.  Run with ``python demos/01_two_circuits_one_state.py``.
"""
import numpy as np

from robq import full_report, monte_carlo
from robq.circuit import ideal_unitary
from robq.presets import intro, intro_prime

# %% same ideal output
U, V = ideal_unitary(intro()), ideal_unitary(intro_prime())
print("overlap on |0>:", abs(np.vdot(U[:, 0], V[:, 0])))

# %% bounds: L is the sum of generator norms
for name, c in [("U ", intro()), ("U'", intro_prime())]:
    rep = full_report(c, 0.2)
    print(f"{name}  L = {rep.L_norm:.4f}  F >= {rep.fidelity_bound:.4f}  eps_max(0.99) = {rep.eps_max:.4f}")

# %% sampled worst case, 500 draws with |eps_i| <= 0.2
for name, c in [("U ", intro()), ("U'", intro_prime())]:
    st = monte_carlo(c, 0.2, 500, initial=0)
    print(f"{name}  min F = {st.min_fidelity:.4f}  mean F = {st.mean_fidelity:.4f}")

# %% a bigger sweep shows the gap opening with the noise level
for eps in (0.05, 0.1, 0.2, 0.4):
    a = monte_carlo(intro(), eps, 2000, initial=0).min_fidelity
    b = monte_carlo(intro_prime(), eps, 2000, initial=0).min_fidelity
    print(f"eps {eps:4.2f}:  {a:.4f} vs {b:.4f}")
