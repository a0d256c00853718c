"""Profile calculus on H(D, N) and its agreement with the tensor path.

Run with ``python demos/hamming_profiles.py [D] [N]`` (defaults 2 3).
"""
import sys

from tdcube.graphs import build_hamming
from tdcube.hamming import (
    ProfileVector,
    apply_A_profile,
    embed,
    enumerate_profiles,
    extract,
    kN_closed_forms,
    orbit_size,
)
from tdcube.spectral import spectral_data
from tdcube.tensor3 import apply_A


def main(D=2, N=3):
    profs = enumerate_profiles(D)
    print(f"H({D},{N}): {len(profs)} profiles")
    for p in profs:
        print(f"  {p}  orbit size {orbit_size(p, N)}")
    print("sum of orbit sizes:", sum(orbit_size(p, N) for p in profs), "=", N ** (3 * D))

    # one table step, then the same step through V⊗3
    g = build_hamming(D, N)
    sd = spectral_data(g)
    v = ProfileVector.basis(D, N, profs[0])
    table = apply_A_profile(1, v)
    tensor = extract(g, apply_A(sd, 1, embed(g, v)))
    print("A(1) chi", profs[0], "=", dict(table.coeffs))
    print("tensor path agrees:", table == tensor)

    res = kN_closed_forms(N)
    print(f"K_{N} checks:", res["checks"])


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:3]]
    main(*args)
