"""Power and link budget for the bundled fleet.

Prints hover/propulsion power per vehicle class and the achievable
uplink rate from every station hover point to every base station.
Run from the repository root: python3 demos/01_power_and_link_budget.py
"""

from pathlib import Path

import numpy as np

from uavplan.io import load_instance
from uavplan.physics import Position3D, hover_power, link_rate, propulsion_power

DATA = Path(__file__).resolve().parent.parent / "data"


def main() -> None:
    inst = load_instance(DATA / "instance.json")
    env = inst.environment

    print("== hover and forward-flight power ==")
    speeds = np.array([0.0, 5.0, 10.0, 15.0, 20.0])
    header = "type  mass[kg]  batt[mAh]  " + "  ".join(f"P({v:g} m/s)[W]" for v in speeds)
    print(header)
    for uav in inst.uav_types:
        pw = [propulsion_power(uav, env, float(v)) for v in speeds]
        cells = "  ".join(f"{p:11.1f}" for p in pw)
        print(f"{uav.id:4d}  {uav.mass_kg:8.1f}  {uav.battery_mah:9.0f}  {cells}")
        assert abs(pw[0] - hover_power(uav, env)) < 1e-9

    print()
    print("== uplink rate, station hover point -> base station [Mbit/s] ==")
    uav = inst.uav_types[-1]  # stations fly the largest class here
    row = "station  " + "  ".join(f"BS{bs.id}(d[m])" for bs in inst.base_stations)
    print(row)
    for st in inst.stations:
        pos = Position3D(st.a, st.b, uav.hover_height)
        cells = []
        for bs in inst.base_stations:
            bpos = Position3D(bs.a, bs.b, bs.height)
            d = np.hypot(np.hypot(st.a - bs.a, st.b - bs.b), uav.hover_height - bs.height)
            r = link_rate(uav, env, pos, bpos)
            cells.append(f"{r / 1e6:5.2f} ({d:5.0f})")
        print(f"{st.id:7d}  " + "  ".join(cells))
    print()
    print(
        "rate decays with slant distance; the planner prices each "
        "station-BS pair with exactly these rates."
    )


if __name__ == "__main__":
    main()
