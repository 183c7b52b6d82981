"""Print the key-update rulebook as checked by the matrix oracle.

Usage: python scripts/rulebook_table.py [--d 2,3,4,5,7] [--convention xz|u]
"""

import argparse

from qudit_qnc.frame import check_u_translation, validate_rule

GATES = ("X", "Y", "Z", "H", "S", "T", "CX")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--d", default="2,3,4,5,7")
    parser.add_argument("--convention", choices=("xz", "u"), default="xz")
    args = parser.parse_args()

    header = f"{'gate':<4} {'d':>2}  {'status':<13} {'stated update':<36} {'certified update':<36} cases"
    print(header)
    print("-" * len(header))
    dims = [int(x) for x in args.d.split(",")]
    for d in dims:
        for g in GATES:
            r = validate_rule(g, d, args.convention)
            print(f"{g:<4} {d:>2}  {r.status:<13} {r.paper_update:<36} {r.corrected_update or '-':<36} "
                  f"{r.cases_checked}")
    print()
    for d in dims:
        t = check_u_translation(d)
        print(f"d={d}: U(a,b) = (X^dag)^b Z^a exactly: {t.exact}; up to omega^-ab: {t.phase_is_omega_minus_ab}; "
              f"U(a,b) = Z^a (X^dag)^b exactly: {t.reordered_exact}")


if __name__ == "__main__":
    main()
