"""
功率参数与能耗报告
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple, Any

from channel import LinkType
from utils.errors import OutageRate

DEFAULT_RATE_FLOOR_BPS = 1e3


class Scenario(Enum):
    """能耗场景"""
    MACRO = "macro"            # 情形 1：全部由宏基站服务
    PHANTOM = "phantom"        # 情形 2：全部由 phantom 基站直接服务
    SUPER_CELL = "supercell"   # 情形 3：phantom 基站 + 簇内 D2D
    HYBRID = "hybrid"          # 贪心算法实际给出的混合方案


@dataclass(frozen=True)
class PowerProfile:
    """
    收发功率（W）与业务量（bit）
    """
    tx_m: float = 40.0
    tx_ph: float = 10.0
    tx_d: float = 0.125
    rx_m: float = 1.8
    rx_ph: float = 1.2
    rx_d: float = 0.9
    service_bits: float = 1e9
    rate_floor_bps: float = DEFAULT_RATE_FLOOR_BPS

    def __post_init__(self):
        for name in ('tx_m', 'tx_ph', 'tx_d', 'rx_m', 'rx_ph', 'rx_d', 'service_bits'):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} 必须为正: {getattr(self, name)}")

    def tx_power(self, link_type: LinkType) -> float:
        return {
            LinkType.MLINK: self.tx_m,
            LinkType.PHLINK: self.tx_ph,
            LinkType.DLINK: self.tx_d,
        }[link_type]

    def rx_power(self, link_type: LinkType) -> float:
        return {
            LinkType.MLINK: self.rx_m,
            LinkType.PHLINK: self.rx_ph,
            LinkType.DLINK: self.rx_d,
        }[link_type]

    @classmethod
    def from_config(cls, config) -> 'PowerProfile':
        return cls(
            tx_m=config.tx_m_w,
            tx_ph=config.tx_ph_w,
            tx_d=config.tx_d_w,
            rx_m=config.rx_m_w,
            rx_ph=config.rx_ph_w,
            rx_d=config.rx_d_w,
            service_bits=config.service_bits,
            rate_floor_bps=config.rate_floor_bps,
        )


@dataclass
class EnergyReport:
    """
    单个场景在一个快照上的能耗（J）

    total 恒等于四个分量之和
    """
    scenario: Scenario
    tx_macro: float = 0.0
    tx_phantom: float = 0.0
    tx_d2d: float = 0.0
    rx_total: float = 0.0
    per_cell: List[Tuple[int, float]] = field(default_factory=list)
    outage_users: int = 0
    total: float = field(init=False)

    def __post_init__(self):
        self.total = math.fsum([self.tx_macro, self.tx_phantom, self.tx_d2d, self.rx_total])

    @property
    def tx_total(self) -> float:
        return math.fsum([self.tx_macro, self.tx_phantom, self.tx_d2d])

    @property
    def rx_share(self) -> float:
        """接收端能耗占比"""
        return self.rx_total / self.total if self.total > 0 else 0.0

    def cell_energy(self, cell_id: int) -> float:
        return dict(self.per_cell).get(cell_id, 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'scenario': self.scenario.value,
            'total': self.total,
            'tx_macro': self.tx_macro,
            'tx_phantom': self.tx_phantom,
            'tx_d2d': self.tx_d2d,
            'rx_total': self.rx_total,
            'rx_share': self.rx_share,
            'per_cell': [[cell_id, energy] for cell_id, energy in self.per_cell],
            'outage_users': self.outage_users,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'EnergyReport':
        return cls(
            scenario=Scenario(data['scenario']),
            tx_macro=float(data['tx_macro']),
            tx_phantom=float(data['tx_phantom']),
            tx_d2d=float(data['tx_d2d']),
            rx_total=float(data['rx_total']),
            per_cell=[(int(c), float(e)) for c, e in data.get('per_cell', [])],
            outage_users=int(data.get('outage_users', 0)),
        )


def per_user_cost(link_type: LinkType, rate: float, profile: PowerProfile) -> float:
    """
    单用户边际能耗：该链路单独服务该用户时的收发能耗

    S_T * (P_T + P_R) / R

    Raises:
        OutageRate: 速率低于门限

    例: M-Link、1 Mbit/s、默认功率 -> 1e9 * 41.8 / 1e6 = 41800 J
    """
    if rate < profile.rate_floor_bps:
        raise OutageRate(rate, profile.rate_floor_bps)
    return profile.service_bits * (profile.tx_power(link_type) + profile.rx_power(link_type)) / rate
