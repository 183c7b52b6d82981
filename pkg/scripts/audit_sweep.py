"""Intercept audit over several dimensions, printed as one table.

Usage: python scripts/audit_sweep.py [--d 2,3,4] [--leak-keys]

d = 5 works but takes about a minute (5^6 protocol runs).
"""

import argparse
import time

from qudit_qnc.audit import audit_all
from qudit_qnc.butterfly import SharedKeys
from qudit_qnc.teleport import BellOutcome


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--d", default="2,3,4", help="comma-separated dimensions in 2..5")
    parser.add_argument("--leak-keys", action="store_true", help="attacker knows keys (1,1) and outcomes 0")
    args = parser.parse_args()
    leak = (SharedKeys(1, 1), (BellOutcome(0, 0), BellOutcome(0, 0))) if args.leak_keys else None

    header = f"{'d':>2}  {'scenario':<16} {'test':<6} {'distance':>9} {'joint':>9} {'keys-only':>9}  pass"
    print(header)
    print("-" * len(header))
    for d in (int(x) for x in args.d.split(",")):
        start = time.perf_counter()
        for r in audit_all(d, 1e-9, leak=leak):
            keys_only = "-" if r.keys_only_distance is None else f"{r.keys_only_distance:.3f}"
            test = "joint" if r.scenario.joint else "each"
            print(f"{d:>2}  {r.scenario.tag:<16} {test:<6} {r.distance:>9.3g} {r.joint_distance:>9.3f} "
                  f"{keys_only:>9}  {r.passes}")
        print(f"    ({time.perf_counter() - start:.1f} s)")


if __name__ == "__main__":
    main()
