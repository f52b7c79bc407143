import logging

from rich.console import Console
from rich.logging import RichHandler

# diagnostics (logs, errors) go to stderr; command results go to stdout
err_console = Console(stderr=True)


def setup_logging(verbose: bool = False) -> None:
    """Install a rich handler on the root logger (idempotent)."""
    level = logging.DEBUG if verbose else logging.INFO
    root = logging.getLogger()
    for h in list(root.handlers):
        if isinstance(h, RichHandler):
            root.removeHandler(h)
    handler = RichHandler(console=err_console, show_path=False, rich_tracebacks=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
