"""
ac2cd/core/logging.py
"""

import logging

from ac2cd.core.config import settings


def configure_logging(level: str = None) -> None:
    """Configure the root logger once for command line use."""
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
