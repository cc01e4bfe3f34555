#!/usr/bin/env python3
"""Solve one instance under every cut/separation setting and print a small
table: value, nodes, cuts by family, runtime.  Useful for eyeballing how each
component changes the search path without changing the answer."""

import argparse
import itertools

from subig import master, problems


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("instance", help="instance file (wmcig or biig format)")
    ap.add_argument("--full", action="store_true",
                    help="all 96 combinations instead of the incremental ladder")
    ap.add_argument("--time-limit", type=float, default=600.0)
    args = ap.parse_args()

    inst = problems.load_instance(args.instance)
    oracle = inst.oracle()
    if args.full:
        settings = [
            f"{fam}{l}{d}{a}{e}-S{s}"
            for fam, l, d, a, e, s in itertools.product(
                "BI", ("", "L"), ("", "D"), ("", "A"), ("", "E"), "123"
            )
        ]
    else:
        settings = [
            f"{base}-{s}"
            for base in ("B", "I", "IL", "ILD", "ILDA", "ILDAE")
            for s in ("S1", "S2", "S3")
        ]

    print(f"{'setting':<12} {'value':>12} {'nodes':>7} {'cuts':>6} "
          f"{'b/i/l/a':>13} {'time':>8}")
    values = set()
    for setting in settings:
        config = master.SolverConfig.from_setting(setting, time_limit=args.time_limit)
        res = master.solve(inst, oracle, config)
        fam = res.cuts_by_family
        values.add(None if res.value is None else round(res.value, 9))
        print(f"{setting:<12} {res.value!s:>12} {res.nodes:>7} {res.cut_total:>6} "
              f"{fam['basic']}/{fam['improved']}/{fam['lifted']}/{fam['alternative']:>4} "
              f"{res.runtime:>7.2f}s")
    print(f"distinct optimal values: {len(values)}")


if __name__ == "__main__":
    main()
