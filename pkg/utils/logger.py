"""
Super cell 日志系统
'supercell' 根记录器统一挂处理器，子系统记录器只负责命名；
支持彩色文本与 JSON 两种格式，文件轮转按需开启
"""

import logging
import os
import sys
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from typing import List, Optional, TextIO

import orjson

ROOT_LOGGER = 'supercell'

LOG_LEVEL_ENV_VAR = 'SUPERCELL_LOG_LEVEL'
LOG_FORMAT_ENV_VAR = 'SUPERCELL_LOG_FORMAT'
LOG_DIR_ENV_VAR = 'SUPERCELL_LOG_DIR'

TEXT_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

LOG_FILE_MAX_BYTES = 10 * 1024 * 1024
LOG_FILE_BACKUPS = 5


class StructuredFormatter(logging.Formatter):
    """每条记录输出一行 JSON；log_event 传入的字段平铺到顶层"""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            'timestamp': datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
        }
        entry.update(getattr(record, 'extra_fields', {}))
        if record.exc_info:
            entry['exception'] = self.formatException(record.exc_info)
        return orjson.dumps(entry, default=str).decode('utf-8')


class ColoredConsoleFormatter(logging.Formatter):
    """按级别给 levelname 着色的控制台格式"""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
    }
    RESET = '\033[0m'

    def format(self, record: logging.LogRecord) -> str:
        # 在副本上改 levelname，同一条记录还会交给文件处理器
        record = logging.makeLogRecord(record.__dict__)
        color = self.COLORS.get(record.levelname)
        if color:
            record.levelname = f"{color}{record.levelname}{self.RESET}"
        return super().format(record)


def _parse_level(level: str) -> int:
    value = logging.getLevelName(level.upper())
    if not isinstance(value, int):
        raise ValueError(f"未知日志级别: {level}")
    return value


def _console_handler(stream: TextIO, structured: bool) -> logging.Handler:
    handler = logging.StreamHandler(stream)
    if structured:
        handler.setFormatter(StructuredFormatter())
    elif getattr(stream, 'isatty', lambda: False)():
        handler.setFormatter(ColoredConsoleFormatter(TEXT_FORMAT, datefmt='%H:%M:%S'))
    else:
        handler.setFormatter(logging.Formatter(TEXT_FORMAT, datefmt='%H:%M:%S'))
    return handler


def _file_handler(name: str, log_dir: str, structured: bool) -> logging.Handler:
    os.makedirs(log_dir, exist_ok=True)
    handler = RotatingFileHandler(
        os.path.join(log_dir, f'{name}.log'),
        maxBytes=LOG_FILE_MAX_BYTES,
        backupCount=LOG_FILE_BACKUPS,
        encoding='utf-8',
    )
    handler.setFormatter(StructuredFormatter() if structured else logging.Formatter(TEXT_FORMAT))
    return handler


def setup_logger(name: str,
                 log_dir: str = 'data/logs',
                 level: str = 'INFO',
                 enable_console: bool = True,
                 enable_file: bool = False,
                 structured: bool = False,
                 stream: Optional[TextIO] = None) -> logging.Logger:
    """
    设置日志记录器

    控制台默认写 stderr，stdout 只留给命令的机器可读输出。
    已经挂过处理器的记录器只更新级别

    Args:
        name: 日志记录器名称
        log_dir: 日志目录（enable_file 时使用）
        level: 日志级别
        enable_console: 是否输出到控制台
        enable_file: 是否写轮转日志文件
        structured: 是否使用 JSON 格式
        stream: 控制台流，默认 sys.stderr

    Returns:
        配置好的日志记录器
    """
    logger = logging.getLogger(name)
    logger.setLevel(_parse_level(level))
    if logger.handlers:
        return logger

    handlers: List[logging.Handler] = []
    if enable_console:
        handlers.append(_console_handler(stream or sys.stderr, structured))
    if enable_file:
        handlers.append(_file_handler(name, log_dir, structured))
    for handler in handlers:
        logger.addHandler(handler)

    # 子记录器的消息交给 'supercell' 输出，独立记录器不再向 logging 根冒泡
    logger.propagate = name.startswith(f'{ROOT_LOGGER}.')
    return logger


def configure_from_env() -> logging.Logger:
    """按 SUPERCELL_LOG_* 环境变量配置 'supercell' 根记录器"""
    log_dir = os.getenv(LOG_DIR_ENV_VAR)
    return setup_logger(
        ROOT_LOGGER,
        log_dir=log_dir or 'data/logs',
        level=os.getenv(LOG_LEVEL_ENV_VAR, 'WARNING'),
        enable_file=bool(log_dir),
        structured=os.getenv(LOG_FORMAT_ENV_VAR, 'text').lower() == 'json',
    )


def get_logger(name: str) -> logging.Logger:
    """
    获取子系统日志记录器（'supercell.xxx'）

    第一次调用时按环境变量配置根记录器
    """
    if not logging.getLogger(ROOT_LOGGER).handlers:
        configure_from_env()
    return logging.getLogger(name)


def log_event(logger: logging.Logger, level: int, message: str, **fields) -> None:
    """带结构化字段记录一条日志（JSON 格式下字段平铺输出）"""
    logger.log(level, message, extra={'extra_fields': fields} if fields else None)
