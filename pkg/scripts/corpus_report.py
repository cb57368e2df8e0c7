"""Per-example summary of the shipped corpus: invariants, structure checks and timings."""

import argparse
import time

from lgfrob.corpus import CORPUS
from lgfrob.hm import GenerationFailure, check_wdvv, frobenius_manifold_from_deformation, universal_good_deformation
from lgfrob.jacobi import monomial_basis
from lgfrob.laurent import format_rational
from lgfrob.newton import milnor_number, newton_polyhedron, subdiagram_monomials
from lgfrob.oracle import jacobi_dim_bruteforce
from lgfrob.structure import (build_canonical_structure, build_good_maximal_deformation, check_GC_global,
                              verify_structure_relations)


def report(order: int, skip_large: bool):
    header = "| example | f | mu | oracle | nu | spectrum | relations | GC global | WDVV | seconds |"
    print(header)
    print("|" + "---|" * (header.count("|") - 1))
    for ex in CORPUS:
        t = time.time()
        f = ex.f()
        P = newton_polyhedron(f)
        basis = monomial_basis(f)
        S = build_canonical_structure(build_good_maximal_deformation(f, basis))
        rel = verify_structure_relations(S).ok
        gc = check_GC_global(S)
        wdvv = "-"
        if gc and not (skip_large and ex.mu > 6):
            try:
                G = frobenius_manifold_from_deformation(universal_good_deformation(S, order))
                wdvv = "ok" if check_wdvv(G).ok else "FAIL"
            except GenerationFailure:
                wdvv = "no generation"
        spec = " ".join(format_rational(a) for a in basis.alphas)
        print(f"| {ex.name} | `{ex.text}` | {milnor_number(P)} | {jacobi_dim_bruteforce(f).value} | "
              f"{len(subdiagram_monomials(P))} | {spec} | {'ok' if rel else 'FAIL'} | {gc} | {wdvv} | "
              f"{time.time() - t:.1f} |")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=4)
    ap.add_argument("--all", action="store_true", help="also extend the mu = 8 example (slow)")
    args = ap.parse_args()
    report(args.order, not args.all)


if __name__ == "__main__":
    main()
