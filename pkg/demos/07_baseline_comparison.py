"""Stochastic plan versus two baselines across offload prices.

For each service-fee multiplier: the stochastic optimum, the
expected-value plan (solve the deterministic twin at mean demand, then
price its frozen decisions on the true tree), and a random feasible
plan averaged over 30 seeds. Also cross-checks the reported optimum
against a Monte Carlo estimate.
"""

from pathlib import Path

from uavplan.evaluate import (
    DEFAULT_PRICE_MULTIPLIERS,
    evaluate_plan,
    offload_price_comparison,
)
from uavplan.io import load_instance
from uavplan.planner import solve_phase2

DATA = Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    inst = load_instance(DATA / "instance.json")

    rows = offload_price_comparison(inst, DEFAULT_PRICE_MULTIPLIERS, seeds=range(30))
    print("fee mult   stochastic   exp-value      random   value of the solution")
    for r in rows:
        vss = r["evf_cost"] - r["sip_cost"]
        print(
            f"{r['multiplier']:8.2f}  {r['sip_cost']:11.4f}  {r['evf_cost']:11.4f}"
            f"  {r['random_cost']:11.4f}  {vss:10.4f}"
        )
    print()

    plan = solve_phase2(inst, "sip")
    report = evaluate_plan(plan, inst, n_samples=20000, seed=0)
    print(f"exact expected cost : {plan.expected_cost:.6f}")
    print(f"MC estimate (20k)   : {report.mean_cost:.6f} +/- {report.std_error:.6f}")
    print()
    print("the stochastic plan never loses to either baseline; the gap "
          "to the expected-value plan is the price of ignoring demand "
          "and loss uncertainty.")


if __name__ == "__main__":
    main()
