"""
结果文件读写
扫描 CSV、运行清单（manifest）与 JSON 文档
"""

import hashlib
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Any, Union

import orjson
import pandas as pd

from harness import SweepReport
from utils import __version__
from utils.config import SimConfig
from utils.errors import IoError
from utils.logger import get_logger

logger = get_logger('supercell.io')

PathLike = Union[str, Path]

FLOAT_FORMAT = '%.15g'
SWEEP_CSV_COLUMNS = ['scenario', 'mean_energy_j', 'std_energy_j', 'ci95_j', 'trials', 'rejected']
JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def write_json(path: PathLike, data: Any) -> None:
    """键排序、两空格缩进，末尾换行"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(orjson.dumps(data, option=JSON_OPTIONS) + b'\n')
    except OSError as e:
        raise IoError(f"写入 {path} 失败: {e}")


def read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        return orjson.loads(path.read_bytes())
    except OSError as e:
        raise IoError(f"读取 {path} 失败: {e}")
    except orjson.JSONDecodeError as e:
        raise IoError(f"{path} 不是合法 JSON: {e}")


def write_sweep_csv(report: SweepReport, path: PathLike) -> None:
    """
    写出扫描结果 CSV

    表头: <扫描轴>, scenario, mean_energy_j, std_energy_j, ci95_j, trials, rejected；
    浮点数保留 15 位有效数字，按 (扫描点, 场景名) 排序

    Raises:
        ValueError: 报告为空
        IoError: 写入失败
    """
    if not report.rows:
        raise ValueError("扫描报告为空")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        report.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        raise IoError(f"写入 {path} 失败: {e}")
    logger.info(f"扫描结果已写入 {path}")


def read_sweep_csv(path: PathLike) -> pd.DataFrame:
    """
    读回扫描 CSV 并检查表头

    Raises:
        IoError: 文件不可读或表头不符
    """
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise IoError(f"读取 {path} 失败: {e}")
    columns = list(frame.columns)
    if columns[1:] != SWEEP_CSV_COLUMNS or columns[0] not in ('users', 'phantom_count'):
        raise IoError(f"{path} 表头不符: {columns}")
    return frame


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, 'rb') as f:
            for chunk in iter(lambda: f.read(1 << 16), b''):
                digest.update(chunk)
    except OSError as e:
        raise IoError(f"读取 {path} 失败: {e}")
    return digest.hexdigest()


def manifest_timestamp() -> str:
    """设置了 SOURCE_DATE_EPOCH 时使用该时间，否则为当前 UTC 时间"""
    epoch = os.getenv('SOURCE_DATE_EPOCH')
    if epoch:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc).replace(microsecond=0)
    return moment.isoformat()


@dataclass
class RunManifest:
    """
    运行清单

    config 为展开默认值后的完整配置；outputs 为文件名到 sha256 的映射
    """
    config: Dict[str, Any]
    master_seed: int
    command: str
    version: str = __version__
    timestamp: str = field(default_factory=manifest_timestamp)
    outputs: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def for_config(cls, config: SimConfig, command: str) -> 'RunManifest':
        return cls(config=config.to_dict(), master_seed=config.master_seed, command=command)

    def add_output(self, path: PathLike) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256_file(path)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'config': self.config,
            'master_seed': self.master_seed,
            'outputs': dict(self.outputs),
            'timestamp': self.timestamp,
            'version': self.version,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunManifest':
        return cls(
            config=dict(data['config']),
            master_seed=int(data['master_seed']),
            command=str(data.get('command', 'sweep')),
            version=str(data.get('version', '')),
            timestamp=str(data.get('timestamp', '')),
            outputs=dict(data.get('outputs', {})),
        )

    def write(self, path: PathLike) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path: PathLike) -> 'RunManifest':
        try:
            return cls.from_dict(read_json(path))
        except (KeyError, TypeError, ValueError) as e:
            raise IoError(f"{path} 不是合法的运行清单: {e}")

    def verify(self, directory: PathLike) -> List[str]:
        """返回校验失败的文件名（缺失或哈希不符）"""
        directory = Path(directory)
        failures = []
        for name in sorted(self.outputs):
            target = directory / name
            if not target.exists() or sha256_file(target) != self.outputs[name]:
                failures.append(name)
        return failures

    def resolved_config(self) -> SimConfig:
        return SimConfig.from_dict(self.config)
