"""Exact mixing times under quadratic and uniform site weights on small instances."""

import argparse

from pathmc import FamilySpec, build_weight_table
from pathmc.oracle import build_transition_matrix, curvature_scan, exact_tmix


def main(families, ns, a, b):
    print(f"{'family':<12}{'n':>4}{'states':>8}{'tmix quad':>11}{'tmix unif':>11}"
          f"{'kappa quad':>13}{'kappa unif':>13}")
    for fam in families:
        for n in ns:
            try:
                spec = FamilySpec.build(fam, n, a, b)
            except ValueError:
                continue
            row = []
            for mode in ("quadratic", "uniform"):
                table = build_weight_table(n, mode)
                P = build_transition_matrix(spec, table)
                row.append((exact_tmix(P), curvature_scan(spec, table, P.enum).min_contraction))
            print(f"{fam:<12}{n:>4}{len(P):>8}{row[0][0]:>11}{row[1][0]:>11}"
                  f"{row[0][1]:>13.3g}{row[1][1]:>13.3g}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--families", nargs="+", default=["meander", "excursion"])
    p.add_argument("--ns", type=int, nargs="+", default=[4, 6, 8, 10])
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=1)
    a = p.parse_args()
    main(a.families, a.ns, a.a, a.b)
