"""
Super cell 拓扑模块
提供几何类型、拓扑数据结构和随机布局生成
"""

from .geometry import Point2D, distance, raw_distance, uniform_in_disk
from .layout import (
    Tier, BaseStation, UserTerminal, Topology,
    generate_topology, split_users, MACRO_BTS_ID
)

__all__ = [
    'Point2D',
    'distance',
    'raw_distance',
    'uniform_in_disk',
    'Tier',
    'BaseStation',
    'UserTerminal',
    'Topology',
    'generate_topology',
    'split_users',
    'MACRO_BTS_ID',
]
