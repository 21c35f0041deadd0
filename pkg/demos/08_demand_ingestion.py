"""From raw demand observations to a solved plan.

Reads the bundled rows/cols observation log, builds the empirical
distribution over task dimensions, swaps it into the bundled instance,
and compares the stochastic optimum on that tree with the deterministic
plan built at the probability-weighted mean dimension.
"""

import dataclasses
from pathlib import Path

import numpy as np

from uavplan.io import load_instance, read_demand_csv
from uavplan.planner import evf_plan, solve_phase2
from uavplan.scenario import DemandScenario, demand_hist_from_csv

DATA = Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    pairs = read_demand_csv(DATA / "demand_dims.csv")
    hist = demand_hist_from_csv(pairs)
    print(f"{hist.total} observations, {len(hist.values)} distinct dimensions")
    for v, p, c in zip(hist.values, hist.probabilities, hist.counts):
        print(f"  n = {v:5d}: count {c:3d}  p = {p:.3f}  {'#' * c}")

    inst = load_instance(DATA / "instance.json")
    n_y = len(inst.stations)
    demand = tuple(
        DemandScenario(dims=(v,) * n_y, probability=p)
        for v, p in zip(hist.values, hist.probabilities)
    )
    emp = dataclasses.replace(
        inst, tree=dataclasses.replace(inst.tree, demand=demand)
    )

    sip = solve_phase2(emp, "sip")
    frozen = evf_plan(emp)  # deterministic twin at mean demand, frozen on the tree
    mean_dim = float(np.dot(hist.values, hist.probabilities))

    print()
    print(f"empirical tree, {len(demand)} demand scenarios")
    print(f"stochastic optimum                     : {sip.expected_cost:10.4f}")
    print(f"mean-demand plan (n ~ {mean_dim:6.1f}) on tree: {frozen.expected_cost:10.4f}")
    print(f"cost of planning for the mean          : "
          f"{frozen.expected_cost - sip.expected_cost:10.4f}")


if __name__ == "__main__":
    main()
