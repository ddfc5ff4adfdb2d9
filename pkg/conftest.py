"""
pytest 公共配置与测试夹具
"""

from typing import Dict, Optional, Tuple

import pytest

from channel import ChannelModel, ChannelSnapshot, LinkBudget, LinkType
from topology import BaseStation, Point2D, Tier, Topology, UserTerminal
from utils.config import SimConfig

BANDWIDTH_HZ = 10e6


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: 完整扫描等耗时较长的验收测试")


def make_budget(link_type: LinkType, user_id: int, peer_id: int, rate: float,
                floor: float = 1e3) -> LinkBudget:
    """按给定速率构造链路预算，其余字段取中性值"""
    return LinkBudget(
        link_type=link_type,
        user_id=user_id,
        peer_id=peer_id,
        distance=1.0,
        path_loss=0.0,
        shadowing=0.0,
        fading_gain=1.0,
        rx_power=0.0,
        snr=2.0 ** (rate / BANDWIDTH_HZ) - 1.0,
        bandwidth=BANDWIDTH_HZ,
        rate=rate,
        outage=rate < floor,
    )


@pytest.fixture
def quiet_config() -> SimConfig:
    """关闭阴影与衰落的默认配置"""
    return SimConfig(enable_shadowing=False, enable_fading=False)


@pytest.fixture
def small_config() -> SimConfig:
    """用于快速试验的小规模配置"""
    return SimConfig(phantom_count=3, users_per_cell=4, trials=4, user_sweep=(6, 12))


@pytest.fixture
def hand_world():
    """
    手工构造拓扑与快照

    build(home_cells, macro, phantom, d2d) 中 home_cells 为 {用户: 小区或 None}，
    macro / phantom / d2d 分别给出 M-Link、PH-Link、D-Link 速率，未给出的取 default_rate。
    phantom 小区 c 位于 (100c, 0)，用户放在其小区中心附近
    """
    def build(home_cells: Dict[int, Optional[int]],
              macro: Optional[Dict[int, float]] = None,
              phantom: Optional[Dict[Tuple[int, int], float]] = None,
              d2d: Optional[Dict[Tuple[int, int], float]] = None,
              default_rate: float = 1e6,
              config: Optional[SimConfig] = None) -> Tuple[Topology, ChannelSnapshot]:
        config = config or SimConfig()
        macro = macro or {}
        phantom = phantom or {}
        d2d = d2d or {}

        cells = sorted({c for c in home_cells.values() if c is not None})
        stations = [
            BaseStation(id=c, tier=Tier.PHANTOM, position=Point2D(100.0 * c, 0.0),
                        tx_power=config.tx_ph_w, radius=50.0)
            for c in cells
        ]
        users = []
        for user_id in sorted(home_cells):
            cell = home_cells[user_id]
            if cell is None:
                position = Point2D(-300.0, float(user_id))
            else:
                position = Point2D(100.0 * cell + 0.5 * (user_id % 5), 0.5 * (user_id % 3))
            users.append(UserTerminal(id=user_id, position=position, home_cell=cell))
        topology = Topology(
            macro_bts=BaseStation(id=0, tier=Tier.MACRO, position=Point2D(0.0, 0.0),
                                  tx_power=config.tx_m_w, radius=500.0),
            phantom_bts=stations,
            users=users,
        )

        macro_links = {
            u: make_budget(LinkType.MLINK, u, 0, macro.get(u, default_rate), config.rate_floor_bps)
            for u in home_cells
        }
        phantom_links = {
            (u, c): make_budget(LinkType.PHLINK, u, c, phantom.get((u, c), default_rate),
                                config.rate_floor_bps)
            for u, c in home_cells.items() if c is not None
        }
        snapshot = ChannelSnapshot(
            model=ChannelModel.from_config(config),
            macro=macro_links,
            phantom=phantom_links,
            positions={u.id: u.position for u in users},
            home_cells=dict(home_cells),
            d2d_seed=0,
        )
        for (a, b), rate in d2d.items():
            lo, hi = min(a, b), max(a, b)
            snapshot._d2d_cache[(lo, hi)] = make_budget(LinkType.DLINK, hi, lo, rate,
                                                        config.rate_floor_bps)
        return topology, snapshot

    return build
