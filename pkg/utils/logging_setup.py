import logging
import sys

from config import LOG_LEVEL

_configured = False


class _TagFormatter(logging.Formatter):
    """Renders records as '[TAG] message', the tag being the logger's name."""

    def format(self, record: logging.LogRecord) -> str:
        tag = record.name.split(".")[-1].replace("_", " ").upper()
        line = f"[{tag}] {record.getMessage()}"
        if record.levelno >= logging.WARNING:
            line = f"{record.levelname}: {line}"
        if record.exc_info:
            line += "\n" + self.formatException(record.exc_info)
        return line


def configure_logging(level: str = LOG_LEVEL) -> None:
    global _configured
    root = logging.getLogger("perceptron")
    root.setLevel(level.upper())
    if not _configured:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(_TagFormatter())
        root.addHandler(handler)
        root.propagate = False
        _configured = True


def get_logger(tag: str) -> logging.Logger:
    return logging.getLogger(f"perceptron.{tag}")
