#!/usr/bin/env python
"""
Command-line utility for training and evaluating energy models.
"""
import sys


def main():
    """Run an energy-model subcommand."""
    try:
        from energy_model.cli import main as run
    except ImportError as exc:
        raise ImportError(
            "Couldn't import energy_model. Are numpy, scipy and pandas installed?"
        ) from exc
    return run(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
