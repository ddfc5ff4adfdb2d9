"""
Super cell 仿真配置系统
扁平的 KEY=value 配置，默认值为标准仿真参数，支持环境变量覆盖
"""

import io
import math
import os
from dataclasses import dataclass, fields, asdict, replace
from pathlib import Path
from typing import Dict, Any, Optional, Tuple

import orjson
from dotenv.parser import parse_stream

from .errors import ParseError, UnknownKey, ValidationError

SEED_ENV_VAR = 'SUPERCELL_SEED'

LENGTH_UNITS = ('km', 'm')
TIE_BREAKS = ('wide', 'narrow')
HEAD_SELECTIONS = ('rate', 'distance')

DEFAULT_USER_SWEEP: Tuple[int, ...] = (50, 100, 150, 200, 250, 300, 350, 400, 450, 500)


@dataclass
class SimConfig:
    """
    仿真主配置

    每一行仿真参数对应一个键，见 docs/CONFIG_REFERENCE.md
    """
    # 几何
    macro_radius_m: float = 500.0
    phantom_radius_m: float = 50.0
    phantom_count: int = 10
    users_per_cell: int = 10
    macro_only_users: int = 0
    allow_overlap: bool = False
    placement_retries: int = 10000
    min_distance_m: float = 1.0

    # 业务与功率（J/s 即 W）
    service_bits: float = 1e9
    tx_m_w: float = 40.0
    tx_ph_w: float = 10.0
    tx_d_w: float = 0.125
    rx_m_w: float = 1.8
    rx_ph_w: float = 1.2
    rx_d_w: float = 0.9

    # 信道
    bandwidth_hz: float = 10e6
    bw_share_macro: float = 1.0
    bw_share_phantom: float = 1.0
    bw_share_d2d: float = 1.0
    noise_density_dbm_hz: float = -147.0
    shadowing_db: float = 8.0
    shadowing_is_variance: bool = False
    enable_shadowing: bool = True
    enable_fading: bool = True
    rate_floor_bps: float = 1e3

    # 路径损耗 PL = a + b * log10(d / unit)
    pl_macro_a: float = 128.0
    pl_macro_b: float = 37.6
    pl_macro_unit: str = 'km'
    pl_phantom_a: float = 37.0
    pl_phantom_b: float = 20.0
    pl_phantom_unit: str = 'm'
    pl_d2d_a: float = 42.0
    pl_d2d_b: float = 16.9
    pl_d2d_unit: str = 'm'

    # 规划器
    strict_eq3_min: bool = False
    candidate_all_phantoms: bool = False
    tie_break: str = 'wide'
    head_selection: str = 'rate'
    cluster_refine: bool = True

    # 实验
    paired_snapshots: bool = True
    include_pure_eq3: bool = False
    user_sweep: Tuple[int, ...] = DEFAULT_USER_SWEEP
    phantom_sweep: Tuple[int, ...] = ()
    phantom_sweep_users: int = 200
    trials: int = 200
    master_seed: int = 0

    def __post_init__(self):
        """验证配置"""
        self._validate_positive()
        self._validate_counts()
        self._validate_choices()
        self._validate_sweeps()

    def _validate_positive(self):
        positive = [
            'macro_radius_m', 'phantom_radius_m', 'min_distance_m',
            'service_bits', 'tx_m_w', 'tx_ph_w', 'tx_d_w', 'rx_m_w', 'rx_ph_w', 'rx_d_w',
            'bandwidth_hz', 'rate_floor_bps', 'pl_macro_b', 'pl_phantom_b', 'pl_d2d_b',
        ]
        for name in positive:
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(name, f"必须为正的有限数，当前为: {value}")

        for name in ('pl_macro_a', 'pl_phantom_a', 'pl_d2d_a', 'noise_density_dbm_hz'):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(name, "必须为有限数")

        if not math.isfinite(self.shadowing_db) or self.shadowing_db < 0:
            raise ValidationError('shadowing_db', f"不能为负数，当前为: {self.shadowing_db}")

        for name in ('bw_share_macro', 'bw_share_phantom', 'bw_share_d2d'):
            value = getattr(self, name)
            if not (0 < value <= 1):
                raise ValidationError(name, f"必须在 (0, 1] 之间，当前为: {value}")

        if self.phantom_radius_m > self.macro_radius_m:
            raise ValidationError(
                'phantom_radius_m',
                f"不能大于宏小区半径 {self.macro_radius_m}，当前为: {self.phantom_radius_m}"
            )

    def _validate_counts(self):
        for name in ('phantom_count', 'users_per_cell', 'macro_only_users', 'phantom_sweep_users'):
            if getattr(self, name) < 0:
                raise ValidationError(name, f"不能为负数，当前为: {getattr(self, name)}")
        if self.placement_retries < 1:
            raise ValidationError('placement_retries', "至少为 1")
        if self.trials < 1:
            raise ValidationError('trials', f"至少为 1，当前为: {self.trials}")
        if not (0 <= self.master_seed < 2 ** 64):
            raise ValidationError('master_seed', "必须是 64 位无符号整数")

    def _validate_choices(self):
        for name in ('pl_macro_unit', 'pl_phantom_unit', 'pl_d2d_unit'):
            if getattr(self, name) not in LENGTH_UNITS:
                raise ValidationError(name, f"只能取 {LENGTH_UNITS}，当前为: {getattr(self, name)}")
        if self.tie_break not in TIE_BREAKS:
            raise ValidationError('tie_break', f"只能取 {TIE_BREAKS}，当前为: {self.tie_break}")
        if self.head_selection not in HEAD_SELECTIONS:
            raise ValidationError(
                'head_selection', f"只能取 {HEAD_SELECTIONS}，当前为: {self.head_selection}"
            )

    def _validate_sweeps(self):
        if not self.user_sweep:
            raise ValidationError('user_sweep', "不能为空")
        if any(n < 1 for n in self.user_sweep):
            raise ValidationError('user_sweep', "用户数必须为正")
        if any(b <= a for a, b in zip(self.user_sweep, self.user_sweep[1:])):
            raise ValidationError('user_sweep', f"必须严格递增，当前为: {list(self.user_sweep)}")
        if any(n < 0 for n in self.phantom_sweep):
            raise ValidationError('phantom_sweep', "小区数不能为负")
        if any(b <= a for a, b in zip(self.phantom_sweep, self.phantom_sweep[1:])):
            raise ValidationError('phantom_sweep', f"必须严格递增，当前为: {list(self.phantom_sweep)}")

    @property
    def shadowing_std_db(self) -> float:
        """阴影衰落标准差（dB）"""
        if self.shadowing_is_variance:
            return math.sqrt(self.shadowing_db)
        return self.shadowing_db

    @property
    def default_user_count(self) -> int:
        """单次试验的总用户数（不含仅宏小区用户）"""
        return self.phantom_count * self.users_per_cell

    def with_overrides(self, **overrides) -> 'SimConfig':
        """返回覆盖部分字段后的新配置（会重新验证）"""
        unknown = [key for key in overrides if key not in FIELD_NAMES]
        if unknown:
            raise UnknownKey(unknown[0])
        return replace(self, **overrides)

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典（列表字段展开为 list）"""
        data = asdict(self)
        data['user_sweep'] = list(self.user_sweep)
        data['phantom_sweep'] = list(self.phantom_sweep)
        return data

    def to_kv(self) -> str:
        """导出为 KEY=value 文本（load_config 可读回）"""
        lines = []
        for key, value in self.to_dict().items():
            if isinstance(value, bool):
                text = 'true' if value else 'false'
            elif isinstance(value, list):
                text = ','.join(str(v) for v in value)
            else:
                text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{key}={text}")
        return '\n'.join(lines) + '\n'

    def to_json(self) -> bytes:
        """导出为 JSON（键排序）"""
        return orjson.dumps(self.to_dict(), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SimConfig':
        """从字典创建（值必须已是正确类型或可转换的字符串）"""
        for key in data:
            if key not in FIELD_NAMES:
                raise UnknownKey(key)
        values = {key: _coerce(key, value) for key, value in data.items()}
        return cls(**values)

    def __repr__(self) -> str:
        return (f"SimConfig(phantom_count={self.phantom_count}, "
                f"users_per_cell={self.users_per_cell}, trials={self.trials}, "
                f"master_seed={self.master_seed})")


FIELD_TYPES: Dict[str, Any] = {f.name: f.type for f in fields(SimConfig)}
FIELD_NAMES = frozenset(FIELD_TYPES)

_TRUE = {'true', '1', 'yes', 'on'}
_FALSE = {'false', '0', 'no', 'off'}


def _coerce(key: str, value: Any) -> Any:
    """按字段声明类型转换配置值"""
    kind = FIELD_TYPES[key]
    if not isinstance(value, str):
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            return float(value)
        if kind is not bool and kind not in (int, float, str) and isinstance(value, list):
            return tuple(int(v) for v in value)
        return value

    text = value.strip()
    try:
        if kind is bool:
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind is str:
            return text
        # Tuple[int, ...]
        if not text:
            return ()
        return tuple(int(part) for part in text.split(','))
    except ValueError:
        raise ParseError(f"{key} 的值无法解析: {value!r}")


def load_config(path: Optional[str] = None) -> SimConfig:
    """
    读取扁平 KEY=value 配置文件

    缺失的键取默认值；未知键、格式错误、非法值都会抛出异常

    Args:
        path: 配置文件路径，None 时返回全部默认值

    Returns:
        完整解析后的 SimConfig
    """
    if path is None:
        return SimConfig()

    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ParseError(f"无法读取配置文件 {path}: {e}")

    values: Dict[str, str] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            raise ParseError(f"无法解析: {binding.original.string.strip()!r}", line)
        if binding.key is None:
            continue  # 空行或注释
        if binding.value is None:
            raise ParseError(f"{binding.key} 缺少 '=value'", line)
        if binding.key not in FIELD_NAMES:
            raise UnknownKey(binding.key)
        if binding.key in values:
            raise ParseError(f"重复的键: {binding.key}", line)
        values[binding.key] = binding.value

    return SimConfig.from_dict(values)


def seed_from_env(default: int) -> int:
    """SUPERCELL_SEED 环境变量作为 --seed 的后备值"""
    raw = os.getenv(SEED_ENV_VAR)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw.strip())
    except ValueError:
        raise ParseError(f"{SEED_ENV_VAR} 不是整数: {raw!r}")


# 默认配置实例
DEFAULT_CONFIG = SimConfig()
