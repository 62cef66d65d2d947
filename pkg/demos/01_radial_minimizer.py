"""Build the radial minimizer for two target geometries.

The minimizer h(s e^{i theta}) = H(s) e^{i theta} is driven by the phase
function Phi solving lambda^2 - Phi^2 = s lambda dPhi/ds, clamped at
zero.  An expanding target keeps Phi positive everywhere; a thin target
makes the map collapse onto the inner circle up to a radius r0.
"""

import numpy as np

from annular_dirichlet import AnnulusPair, Weight, build

w = Weight.constant(1.0, 1.0, 2.0)

print("=== expanding target: A(1,2) -> A*(1, 5/4) ===")
sol = build(w, AnnulusPair(1.0, 2.0, 1.0, 1.25))
print(f"case:              {sol.case_tag}")
print(f"initial value:     phi0 = {sol.phi0:.12f}")
print(f"minimal energy:    {sol.energy:.12f}")
print(f"closed form 15pi/8 = {15 * np.pi / 8:.12f}")

print()
print("=== thin target: A(1,2) -> A*(1, 3/(2 sqrt 2)) ===")
sol = build(w, AnnulusPair(1.0, 2.0, 1.0, 3.0 / (2 * np.sqrt(2.0))))
print(f"case:              {sol.case_tag}")
print(f"collapse radius:   r0 = {sol.r0:.12f}  (exact: sqrt(2) = "
      f"{np.sqrt(2.0):.12f})")
print(f"minimal energy:    {sol.energy:.12f}")
print(f"closed form        {2 * np.pi * (3 / 8 + np.log(2) / 2):.12f}")

# the profile H is constant (= inner target radius) below r0
s, H = sol.phi.s, sol.profile.H
flat = s[s <= sol.r0]
print(f"H pinned at the inner circle on [1, {flat[-1]:.6f}]: "
      f"H there in [{H[s <= sol.r0].min():.9f}, {H[s <= sol.r0].max():.9f}]")
