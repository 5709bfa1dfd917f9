"""
Entry point for the qfib command-line tool.
"""
import sys

from qfib.api.cli_routes import run

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
