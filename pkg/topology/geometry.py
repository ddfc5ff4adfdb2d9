"""
平面几何基础类型
"""

import math
from dataclasses import dataclass
from typing import Dict, Any

DEFAULT_MIN_DISTANCE_M = 1.0


@dataclass(frozen=True)
class Point2D:
    """平面坐标（米）"""
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"坐标必须为有限数: ({self.x}, {self.y})")

    def norm(self) -> float:
        """到原点的距离（不截断）"""
        return math.hypot(self.x, self.y)

    def to_dict(self) -> Dict[str, Any]:
        return {'x': self.x, 'y': self.y}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Point2D':
        return cls(float(data['x']), float(data['y']))


def raw_distance(a: Point2D, b: Point2D) -> float:
    """欧氏距离（不截断，用于几何包含判断）"""
    return math.hypot(a.x - b.x, a.y - b.y)


def distance(a: Point2D, b: Point2D, min_distance_m: float = DEFAULT_MIN_DISTANCE_M) -> float:
    """
    欧氏距离，下限截断为 min_distance_m

    路径损耗公式在 d -> 0 时发散，所有链路距离都经过此函数
    """
    return max(raw_distance(a, b), min_distance_m)


def uniform_in_disk(center: Point2D, radius: float, rng) -> Point2D:
    """在圆盘内均匀采样一个点"""
    r = radius * math.sqrt(rng.uniform())
    theta = 2.0 * math.pi * rng.uniform()
    return Point2D(center.x + r * math.cos(theta), center.y + r * math.sin(theta))
