"""Coded-matrix split catalogue.

For an m-way partition of a square multiply, splitting the left factor
into s row blocks and the right into t column blocks needs
k = t^2 (2 s - 1) coded copies before the product can be recovered.
This script tabulates k over the (s, t) grid, the best split per m
under both objectives, and the relaxed (non-divisor) sweep.
"""

from uavplan.coding import (
    CodeSplit,
    fractional_split,
    optimal_split,
    recovery_threshold,
)


def main() -> None:
    print("== recovery threshold k = t^2 (2s - 1) ==")
    ts = range(1, 5)
    print("s\\t  " + "  ".join(f"{t:4d}" for t in ts))
    for s in range(1, 5):
        print(f"{s:3d}  " + "  ".join(f"{recovery_threshold(s, t):4d}" for t in ts))

    print()
    print("== best split per partition count m ==")
    print("m   max_k (s,t,k)      min_k (s,t,k)")
    for m in range(1, 9):
        hi = optimal_split(m)
        lo = optimal_split(m, objective="min_k")
        print(
            f"{m:<3d} ({hi.s},{hi.t},{hi.k:3d})        "
            f"({lo.s},{lo.t},{lo.k:3d})"
        )

    print()
    print("== relaxed sweep at m = 4: threshold vs row blocks ==")
    for s in range(1, 7):
        split = fractional_split(4, s)
        tag = "exact" if isinstance(split, CodeSplit) else "rounded"
        print(f"s={s}  t={split.t:>6.4g}  k={split.k:3d}  ({tag})")
    print()
    print(
        "more row blocks shrink each copy but cut the threshold; the "
        "planner trades k against per-copy cost through these tables."
    )


if __name__ == "__main__":
    main()
