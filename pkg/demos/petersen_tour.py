"""A walk through the toolkit on the Petersen graph.

Run with ``python demos/petersen_tour.py``.
"""
from tdcube.fundamental import check_conjecture_bases, check_conjecture_EEE, generate_lambda
from tdcube.graphs import build_named
from tdcube.relations import run_all
from tdcube.scalar import render
from tdcube.spectral import spectral_data


def main():
    g = build_named("petersen")
    print(f"{g.name}: n={g.n}, diameter={g.diameter}, valencies={g.valencies}")

    sd = spectral_data(g)
    print("eigenvalues     ", [render(t) for t in sd.eigenvalues])
    print("dual eigenvalues", [render(t) for t in sd.dual_eigenvalues])
    print("multiplicities  ", sd.multiplicities)
    print("scalars         ", {k: v for k, v in sd.td.as_dict().items() if k != "conventional"})
    print(f"{len(sd.orderings)} Q-polynomial ordering(s); installed {sd.ordering}")

    reports = run_all(sd)
    failed = [r for r in reports if not r.passed]
    print(f"relations: {len(reports)} instances, {len(failed)} failed")

    lam = generate_lambda(sd)
    print(f"fundamental module: dim = {lam.dim}")
    print("EEE checker:", check_conjecture_EEE(sd, lam).verdict)
    for case in check_conjecture_bases(sd, lam):
        print(f"  {case.case:7s} image dim {case.image_dim}, family dim {case.family_dim}: {case.verdict}")


if __name__ == "__main__":
    main()
