"""
信道模块
路径损耗、阴影/瑞利衰落、香农速率映射与信道快照
"""

from .propagation import (
    LinkType,
    PathLossModel,
    DEFAULT_PATH_LOSS,
    path_loss_db,
    noise_power_dbm,
    draw_shadowing,
    draw_fading_gain,
    received_snr,
    achievable_rate,
)
from .snapshot import (
    LinkBudget,
    ChannelModel,
    ChannelSnapshot,
    build_snapshot,
    write_links_csv,
    LINK_CSV_COLUMNS,
)

__all__ = [
    'LinkType',
    'PathLossModel',
    'DEFAULT_PATH_LOSS',
    'path_loss_db',
    'noise_power_dbm',
    'draw_shadowing',
    'draw_fading_gain',
    'received_snr',
    'achievable_rate',
    'LinkBudget',
    'ChannelModel',
    'ChannelSnapshot',
    'build_snapshot',
    'write_links_csv',
    'LINK_CSV_COLUMNS',
]
