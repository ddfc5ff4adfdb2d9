"""
Super cell 仿真器异常定义
所有模块抛出的领域异常都继承自 SuperCellError
"""

from typing import Optional


class SuperCellError(Exception):
    """仿真器异常基类"""


# ==========================================
# 配置相关（CLI 退出码 1）
# ==========================================

class ConfigError(SuperCellError, ValueError):
    """配置类异常基类"""


class ParseError(ConfigError):
    """配置文件格式错误"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"第 {line} 行: {message}"
        super().__init__(message)


class ValidationError(ConfigError):
    """配置值违反 SimConfig 约束"""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


class UnknownKey(ConfigError):
    """配置文件中出现未定义的键"""

    def __init__(self, key: str):
        self.key = key
        super().__init__(f"未知配置键: {key}")


# ==========================================
# 运行期异常（CLI 退出码 2）
# ==========================================

class PlacementExhausted(SuperCellError):
    """在重试预算内无法放置互不重叠的 phantom 小区"""


class OutageRate(SuperCellError):
    """链路速率低于 rate_floor_bps"""

    def __init__(self, rate: float, floor: float):
        self.rate = rate
        self.floor = floor
        super().__init__(f"链路中断: 速率 {rate:.6g} bit/s 低于门限 {floor:.6g} bit/s")


class OutageInScenario(SuperCellError):
    """某场景下存在没有可用链路的用户"""

    def __init__(self, scenario: str, user_ids):
        self.scenario = scenario
        self.user_ids = sorted(user_ids)
        super().__init__(f"场景 {scenario} 中用户链路中断: {self.user_ids}")


class ScenarioNotApplicable(SuperCellError):
    """拓扑不满足某场景的前提（例如存在仅宏小区覆盖的用户）"""


class MalformedPlan(SuperCellError):
    """服务方案不满足划分约束"""


class NoFeasibleLink(SuperCellError):
    """用户的 M-Link 与 PH-Link 都处于中断状态"""

    def __init__(self, user_id: int):
        self.user_id = user_id
        super().__init__(f"用户 {user_id} 没有可用链路")


class TooLarge(SuperCellError):
    """穷举规模超过上限"""


class InsufficientTrials(SuperCellError):
    """可用于统计的试验数为零"""


class IoError(SuperCellError):
    """结果文件读写失败"""
