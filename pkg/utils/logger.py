import logging

from rich.console import Console
from rich.logging import RichHandler

from core import settings

# Reports go to stdout, so everything chatty goes to stderr
console = Console(stderr=True)

_configured = False


def get_logger(name: str) -> logging.Logger:
    global _configured
    if not _configured:
        root = logging.getLogger("topochoice")
        root.setLevel(settings.LOG_LEVEL.upper())
        root.addHandler(RichHandler(console=console, show_path=False, markup=False))
        root.propagate = False
        _configured = True
    return logging.getLogger(f"topochoice.{name}")
