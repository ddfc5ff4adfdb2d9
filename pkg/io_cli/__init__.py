"""
配置读取、结果序列化与命令行
"""

from utils.config import load_config
from .serialization import (
    FLOAT_FORMAT,
    RunManifest,
    manifest_timestamp,
    read_json,
    read_sweep_csv,
    sha256_file,
    write_json,
    write_sweep_csv,
)
from .commands import EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, build_parser, cli_dispatch

__all__ = [
    'load_config',
    'FLOAT_FORMAT',
    'RunManifest',
    'manifest_timestamp',
    'read_json',
    'read_sweep_csv',
    'sha256_file',
    'write_json',
    'write_sweep_csv',
    'EXIT_OK',
    'EXIT_CONFIG',
    'EXIT_RUNTIME',
    'build_parser',
    'cli_dispatch',
]
