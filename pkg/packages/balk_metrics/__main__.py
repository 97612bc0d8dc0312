"""Entry point for running the balk_metrics CLI."""
from .cli import cli

if __name__ == "__main__":
    cli()
