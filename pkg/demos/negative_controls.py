"""Checks that are supposed to fail, and do.

Run with ``python demos/negative_controls.py``.
"""
from tdcube.graphs import NotDistanceRegular, build_from_edges, build_named
from tdcube.relations import check_E0_sandwich, check_tridiagonal, check_triple_product
from tdcube.scalar import render
from tdcube.spectral import spectral_data


def main():
    k4 = spectral_data(build_named("complete:4"))
    bad = k4.td.__class__(**{**k4.td.__dict__, "rho": 15})
    rep, _ = check_tridiagonal(k4, 1, 2, scalars=bad)
    print(f"K4 with rho = 15: defect {render(rep.defect)} ({rep.verdict})")

    h23 = spectral_data(build_named("hamming:2,3"))
    rep = check_triple_product(h23, "Estar_A", 1, 2, 0, 1)
    print(f"H(2,3) E0*(2) A(1) E1*(2): defect {render(rep.defect)} ({rep.verdict})")

    rep = check_E0_sandwich(h23, scale=1)[0]
    print(f"H(2,3) sandwich without the |X| factor: defect {render(rep.defect)} ({rep.verdict})")

    try:
        build_from_edges(3, [(0, 1), (1, 2)], name="path3")
    except NotDistanceRegular as exc:
        print("path on 3 vertices:", exc)


if __name__ == "__main__":
    main()
