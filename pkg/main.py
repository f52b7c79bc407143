"""Entry point: ``python main.py <command> [options]``. See ``layer_6/README.md``."""
from layer_6.cli import app


if __name__ == "__main__":
    app()
