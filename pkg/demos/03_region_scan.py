"""
Nonlocality and contextuality over the spectrum triangle
========================================================

Each physical spectrum is labelled by whether it violates CHSH and whether it
violates KCBS. The nonlocal but non-contextual states form a thin crescent
between the two frontiers.
"""
import numpy as np

from biphoton.classify import (
    Label,
    boundary_contextual_numeric,
    boundary_local,
    classify,
    compare_closed_form,
    diagonal_transition,
    scan_region,
)

for pair in [(0.5, 0.4), (0.715, 0.715), (1.0, 1.0)]:
    r = classify(*pair)
    print(f"{pair}: {r.label.value:24s} chsh_max={r.chsh_max:.6f} kcbs_min={r.kcbs_min:.6f}")

print("local frontier on the diagonal:", diagonal_transition("local"))
print("contextual frontier on the diagonal:", diagonal_transition("contextual"))

scan = scan_region(200, workers=4)
for label, n in scan.counts().items():
    print(f"{label.value:24s} {n}")

# The published closed-form frontier does not match the bisection result.
print(compare_closed_form(801).summary())

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    codes = {label: i for i, label in enumerate(Label)}
    img = np.vectorize(codes.get)(scan.labels)
    plt.scatter(scan.lambda1.ravel(), scan.lambda2.ravel(), c=img.ravel(), s=1, cmap="viridis")
    for curve in (boundary_local(200), boundary_contextual_numeric(200)):
        plt.plot(*curve.samples.T, "k-", lw=1)
    plt.xlabel("lambda1")
    plt.ylabel("lambda2")
    plt.savefig("region_scan.png", dpi=120)
    print("wrote region_scan.png")
