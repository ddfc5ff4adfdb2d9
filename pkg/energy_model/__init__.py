"""
能耗模型模块
功率参数、能耗报告、三种情形及混合方案的能耗计算
"""

from .profile import PowerProfile, EnergyReport, Scenario, per_user_cost
from .evaluators import (
    CellTerms,
    cell_terms,
    energy_situation1,
    energy_situation2,
    energy_situation3,
    energy_hybrid,
)

__all__ = [
    'PowerProfile',
    'EnergyReport',
    'Scenario',
    'per_user_cost',
    'CellTerms',
    'cell_terms',
    'energy_situation1',
    'energy_situation2',
    'energy_situation3',
    'energy_hybrid',
]
