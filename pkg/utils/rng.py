"""
可复现随机数工具
封装 numpy Generator，并提供稳定的 64 位种子混合函数
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(value: int) -> int:
    """SplitMix64 终结函数（输入输出均为 64 位无符号整数）"""
    z = (value + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(*parts: int) -> int:
    """
    把若干整数折叠成一个 64 位种子

    state = 0; 对每个 part: state = splitmix64(state ^ (part mod 2^64))
    与平台、Python 版本无关，见 docs/REPRODUCIBILITY.md
    """
    state = 0
    for part in parts:
        state = splitmix64(state ^ (int(part) & MASK64))
    return state


class SeededRng:
    """
    带种子的随机数源

    每个试验 / 每条 D-Link 各自持有一个实例，互不共享状态
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return float(self.generator.uniform(low, high))

    def normal(self, scale: float = 1.0) -> float:
        return float(self.generator.normal(0.0, scale))

    def exponential(self, scale: float = 1.0) -> float:
        return float(self.generator.exponential(scale))

    def next_seed(self) -> int:
        """派生一个子种子（用于惰性 D-Link 信道）"""
        return int(self.generator.integers(0, MASK64, dtype=np.uint64, endpoint=True))

    def child(self, *parts: int) -> 'SeededRng':
        return SeededRng(mix_seed(self.seed, *parts))

    def __repr__(self) -> str:
        return f"SeededRng(seed={self.seed})"

