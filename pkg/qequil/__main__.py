"""
Entry point for running qequil as a module.
"""

from .cli.main import cli

if __name__ == "__main__":
    cli()
