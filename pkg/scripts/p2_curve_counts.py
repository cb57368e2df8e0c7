"""Read plane-curve counts N_d off the Frobenius potential of the P2 mirror.

The potential in flat coordinates (t0, t1, t2) contains
N_d * t2^(3d-1) * exp(d*t1) / (3d-1)!, so N_d sits in the coefficient of
t2^(3d-1) (for d = 1 that monomial is quadratic and we read t1*t2^2 instead).
"""

import argparse
import time
from math import factorial

from lgfrob.hm import check_wdvv, frobenius_manifold_from_deformation, universal_good_deformation
from lgfrob.laurent import parse_laurent
from lgfrob.oracle import kontsevich_Nd
from lgfrob.structure import build_canonical_structure, build_good_maximal_deformation


def curve_counts(max_degree: int):
    order = max(3 * max_degree - 4, 1)
    f = parse_laurent("u1+u2+u1^-1*u2^-1", 2)
    S = build_canonical_structure(build_good_maximal_deformation(f))
    G = frobenius_manifold_from_deformation(universal_good_deformation(S, order))
    rows = []
    for d in range(1, max_degree + 1):
        if d == 1:
            value = G.potential.get((0, 1, 2), 0) * 2
        else:
            value = G.potential.get((0, 0, 3 * d - 1), 0) * factorial(3 * d - 1)
        rows.append((d, value, kontsevich_Nd(d)))
    return G, rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-degree", type=int, default=3)
    args = ap.parse_args()
    t = time.time()
    G, rows = curve_counts(args.max_degree)
    print(f"truncation order {G.N}, WDVV {'ok' if check_wdvv(G).ok else 'FAILED'}, {time.time() - t:.1f}s")
    print(f"{'d':>3} {'from potential':>16} {'recursion':>10}")
    for d, got, want in rows:
        print(f"{d:>3} {str(got):>16} {want:>10} {'' if got == want else '  MISMATCH'}")


if __name__ == "__main__":
    main()
