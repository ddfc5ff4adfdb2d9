"""
规划模块
基站指派、簇头选择与分簇，以及小规模穷举校验
"""

from .plan import Cluster, ClusterStep, CellClustering, Designation, ServingPlan
from .greedy import (
    PlannerOptions,
    link_cost,
    designate_bts,
    cluster_cell,
    refine_cell,
    build_plan,
    cluster_all_plan,
)
from .brute_force import (
    MAX_BRUTE_FORCE_USERS,
    BruteForceResult,
    set_partitions,
    cell_energy,
    brute_force_plan,
)

__all__ = [
    'Cluster',
    'ClusterStep',
    'CellClustering',
    'Designation',
    'ServingPlan',
    'PlannerOptions',
    'link_cost',
    'designate_bts',
    'cluster_cell',
    'refine_cell',
    'build_plan',
    'cluster_all_plan',
    'MAX_BRUTE_FORCE_USERS',
    'BruteForceResult',
    'set_partitions',
    'cell_energy',
    'brute_force_plan',
]
