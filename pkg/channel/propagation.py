"""
传播模型
路径损耗、噪声功率、阴影衰落、瑞利衰落与香农速率映射
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple

from utils.errors import OutageRate

NOISE_DENSITY_DBM_HZ = -147.0
DEFAULT_RATE_FLOOR_BPS = 1e3
SHADOWING_STD_DB = 8.0

_UNIT_METERS = {'km': 1000.0, 'm': 1.0}


class LinkType(Enum):
    """链路类型"""
    MLINK = "M-Link"    # 宏基站 -> 用户
    PHLINK = "PH-Link"  # phantom 基站 -> 用户
    DLINK = "D-Link"    # 簇头 -> 簇成员


@dataclass(frozen=True)
class PathLossModel:
    """PL(dB) = a + b * log10(d / unit)"""
    a: float
    b: float
    unit: str = 'm'

    def __call__(self, d: float) -> float:
        return self.a + self.b * math.log10(d / _UNIT_METERS[self.unit])


DEFAULT_PATH_LOSS: Dict[LinkType, PathLossModel] = {
    LinkType.MLINK: PathLossModel(128.0, 37.6, 'km'),
    LinkType.PHLINK: PathLossModel(37.0, 20.0, 'm'),
    LinkType.DLINK: PathLossModel(42.0, 16.9, 'm'),
}


def path_loss_models_from_config(config) -> Dict[LinkType, PathLossModel]:
    return {
        LinkType.MLINK: PathLossModel(config.pl_macro_a, config.pl_macro_b, config.pl_macro_unit),
        LinkType.PHLINK: PathLossModel(config.pl_phantom_a, config.pl_phantom_b, config.pl_phantom_unit),
        LinkType.DLINK: PathLossModel(config.pl_d2d_a, config.pl_d2d_b, config.pl_d2d_unit),
    }


def path_loss_db(link_type: LinkType, d: float,
                 models: Dict[LinkType, PathLossModel] = DEFAULT_PATH_LOSS) -> float:
    """
    路径损耗（dB）

    Args:
        link_type: 链路类型
        d: 距离（米，调用方已按 min_distance_m 截断）
        models: 各链路的路径损耗模型

    Example:
        >>> path_loss_db(LinkType.MLINK, 1000.0)
        128.0
    """
    return models[link_type](d)


def noise_power_dbm(bandwidth: float, density_dbm_hz: float = NOISE_DENSITY_DBM_HZ) -> float:
    """带宽内噪声功率（dBm）"""
    if bandwidth <= 0:
        raise ValueError(f"带宽必须为正: {bandwidth}")
    return density_dbm_hz + 10.0 * math.log10(bandwidth)


def draw_shadowing(rng, std_db: float = SHADOWING_STD_DB, enabled: bool = True) -> float:
    """零均值高斯阴影衰落（dB）"""
    if not enabled or std_db == 0:
        return 0.0
    return rng.normal(std_db)


def draw_fading_gain(rng, enabled: bool = True) -> float:
    """
    瑞利衰落功率增益 |h|^2，服从均值为 1 的指数分布

    返回值严格为正
    """
    if not enabled:
        return 1.0
    gain = rng.exponential(1.0)
    while gain <= 0.0:
        gain = rng.exponential(1.0)
    return gain


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts * 1000.0)


def received_snr(tx_power: float, path_loss: float, shadowing: float, fading_gain: float,
                 bandwidth: float,
                 noise_density_dbm_hz: float = NOISE_DENSITY_DBM_HZ) -> Tuple[float, float]:
    """
    接收功率与信噪比

    Returns:
        (接收功率 dBm, 线性信噪比)
    """
    if tx_power <= 0:
        raise ValueError(f"发射功率必须为正: {tx_power}")
    rx_dbm = watts_to_dbm(tx_power) - path_loss + shadowing + 10.0 * math.log10(fading_gain)
    snr = 10.0 ** ((rx_dbm - noise_power_dbm(bandwidth, noise_density_dbm_hz)) / 10.0)
    return rx_dbm, snr


def rate_from_snr(snr: float, bandwidth: float) -> float:
    return bandwidth * math.log2(1.0 + snr)


def achievable_rate(tx_power: float, path_loss: float, shadowing: float, fading_gain: float,
                    bandwidth: float,
                    noise_density_dbm_hz: float = NOISE_DENSITY_DBM_HZ,
                    rate_floor_bps: float = DEFAULT_RATE_FLOOR_BPS) -> float:
    """
    单链路香农速率（bit/s），无干扰项

    快照中每条链路的速率都由这里给出

    Raises:
        OutageRate: 速率低于 rate_floor_bps
    """
    _, snr = received_snr(tx_power, path_loss, shadowing, fading_gain,
                          bandwidth, noise_density_dbm_hz)
    rate = rate_from_snr(snr, bandwidth)
    if rate < rate_floor_bps:
        raise OutageRate(rate, rate_floor_bps)
    return rate
