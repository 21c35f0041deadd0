"""Money model: converts fleet choices and copy pipelines into dollars.

Two groups of prices. Fleet prices are per-mAh rates on the reserved or
on-demand battery capacity plus a crash repair penalty. Task prices turn
seconds, joules, and watts into dollars through the per_second,
per_joule, and hover rate coefficients, plus flat per-copy service and
per-BS subscription fees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .physics import (
    Environment,
    Position3D,
    UavType,
    hover_power,
    link_rate,
    task_timings,
)

__all__ = [
    "CostCoefficients",
    "reservation_cost",
    "on_demand_cost",
    "local_copy_cost",
    "offload_copy_cost",
    "hover_threshold_cost",
    "decode_cost",
]


@dataclass(frozen=True)
class CostCoefficients:
    """Price coefficients; all must be provided explicitly.

    on_demand_per_mah must exceed reservation_per_mah (renting late is
    always dearer than reserving). subscription_fee is charged once per
    subscribed base station, service_fee once per offloaded copy,
    crash_penalty on each weather-loss replacement, completion_penalty
    on each station/path that ends with unrecovered copies.
    """

    reservation_per_mah: float
    on_demand_per_mah: float
    per_second: float
    per_joule: float
    hover_per_watt_second: float
    service_fee: float
    subscription_fee: float
    crash_penalty: float
    completion_penalty: float

    def __post_init__(self) -> None:
        for name in (
            "reservation_per_mah",
            "on_demand_per_mah",
            "per_second",
            "per_joule",
            "hover_per_watt_second",
            "service_fee",
            "subscription_fee",
            "crash_penalty",
            "completion_penalty",
        ):
            if getattr(self, name) < 0:
                raise ValueError(f"CostCoefficients.{name} must be non-negative")
        if self.on_demand_per_mah <= self.reservation_per_mah:
            raise ValueError(
                "on_demand_per_mah must exceed reservation_per_mah "
                f"({self.on_demand_per_mah} <= {self.reservation_per_mah})"
            )


def reservation_cost(uav: UavType, coeff: CostCoefficients) -> float:
    """Up-front price of reserving one vehicle of this class."""
    return coeff.reservation_per_mah * uav.battery_mah


def on_demand_cost(
    largest: UavType,
    coeff: CostCoefficients,
    fleet: Sequence[UavType] | None = None,
) -> float:
    """Price of renting the largest class after a weather loss.

    Only the largest class is rentable on demand; passing the fleet
    enables the largest-ness check.
    """
    if fleet is not None:
        top = max(fleet, key=lambda u: u.battery_mah)
        if largest.battery_mah < top.battery_mah:
            raise ValueError(
                f"on-demand class must be the largest battery: got "
                f"{largest.battery_mah} mAh, fleet has {top.battery_mah} mAh"
            )
    return coeff.on_demand_per_mah * largest.battery_mah


def local_copy_cost(
    uav: UavType,
    env: Environment,
    n_dim: int,
    split,
    coeff: CostCoefficients,
) -> float:
    """Dollars to compute one coded copy on the UAV: busy time priced
    at per_second, covering compute plus encode."""
    timings = task_timings(uav, env, n_dim, split, rate_to=1.0, rate_from=1.0)
    return coeff.per_second * (timings.t_local + timings.t_enc)


def offload_copy_cost(
    uav: UavType,
    env: Environment,
    n_dim: int,
    split,
    uav_pos: Position3D,
    bs_pos: Position3D,
    coeff: CostCoefficients,
) -> float:
    """Dollars to push one coded copy to a server and take it back.

    Transmission plus encode time at per_second, receive energy at
    per_joule, and the flat per-copy service fee. Link-rate errors
    (bad geometry) propagate.
    """
    rate = link_rate(uav, env, uav_pos, bs_pos)
    timings = task_timings(uav, env, n_dim, split, rate_to=rate, rate_from=rate)
    return (
        coeff.per_second * (timings.t_to + timings.t_enc)
        + coeff.per_joule * timings.e_receive
        + coeff.service_fee
    )


def hover_threshold_cost(
    uav: UavType,
    env: Environment,
    n_dim: int,
    split,
    coeff: CostCoefficients,
) -> float:
    """Dollars of hover energy budgeted while waiting on k copies.

    The waiting budget is the worst case of computing all k copies
    locally one after another, t_thresh = k * (t_local + t_enc), and
    the charge is t_thresh * k * hover_rate * hover_power.
    """
    timings = task_timings(uav, env, n_dim, split, rate_to=1.0, rate_from=1.0)
    t_thresh = split.k * (timings.t_local + timings.t_enc)
    return (
        t_thresh
        * split.k
        * coeff.hover_per_watt_second
        * hover_power(uav, env)
    )


def decode_cost(
    uav: UavType,
    env: Environment,
    n_dim: int,
    split,
    coeff: CostCoefficients,
) -> float:
    """Dollars of UAV time spent decoding the returned copies."""
    timings = task_timings(uav, env, n_dim, split, rate_to=1.0, rate_from=1.0)
    return coeff.per_second * timings.t_dec
