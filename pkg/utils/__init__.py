"""
Super cell 工具模块
提供配置、日志、异常和可复现随机数等通用功能
"""

from .config import SimConfig, load_config, seed_from_env
from .logger import setup_logger, get_logger, log_event
from .rng import SeededRng, mix_seed

__version__ = "1.0.0"

__all__ = [
    'SimConfig',
    'load_config',
    'seed_from_env',
    'setup_logger',
    'get_logger',
    'log_event',
    'SeededRng',
    'mix_seed',
]
