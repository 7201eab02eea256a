"""
The KCBS operator spectrum
==========================

Five cyclically orthogonal directions give a 3x3 matrix K = sum_j u_j u_j^T.
Its spectrum always lies on a one-parameter curve in s, with the largest
eigenvalue peaking at sqrt(5) for the regular pentagram.
"""
import numpy as np

from biphoton import kcbs

s = np.linspace(0, 1, 11)
for si, (k_max, k_mid, k_min) in zip(s, kcbs.sorted_spectrum(s)):
    print(f"s={si:.1f}  K = ({k_max:.6f}, {k_mid:.6f}, {k_min:.6f})  sum={k_max + k_mid + k_min:.12f}")

s2 = kcbs.kmax_argmax_s2()
print("argmax s^2:", s2, " golden ratio conjugate:", (np.sqrt(5) - 1) / 2)

# Any admissible set of directions lands on the same curve.
rng = np.random.default_rng(3)
for _ in range(3):
    dirs = kcbs.generate_directions(*rng.uniform(0, 2 * np.pi, 2))
    ev = np.linalg.eigvalsh(kcbs.kcbs_matrix(dirs))[::-1]
    print("random directions:", np.round(ev, 9), " distance to curve:", kcbs.curve_distance(ev))

# The pentagram on the (1, 1, -1) state reaches the quantum maximum of the KCBS sum.
rho = np.outer([0, 1, 1, 0], [0, 1, 1, 0]) / 2
dirs = kcbs.pentagram_directions()
print("sum <P_j> =", kcbs.projector_sum(rho, dirs), " non-contextual bound = 2")
print("sum <B_j,j+1> =", kcbs.chsh_sum(rho, dirs))

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    grid = np.linspace(0, 1, 400)
    k = kcbs.sorted_spectrum(grid)
    plt.plot(grid, k)
    plt.xlabel("s")
    plt.ylabel("eigenvalues of K")
    plt.savefig("kcbs_spectrum.png", dpi=120)
    print("wrote kcbs_spectrum.png")
