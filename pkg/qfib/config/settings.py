"""
Settings and configuration for qfib.
Loads environment variables and provides the tunable limits used by the engines and the CLI.
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Galois group certificate
PRIME_BUDGET = int(os.getenv("QFIB_PRIME_BUDGET", 50))

# Logging
LOG_LEVEL = os.getenv("QFIB_LOG_LEVEL", "WARNING").upper()

# Batch mode
BATCH_WORKERS = int(os.getenv("QFIB_BATCH_WORKERS", 4))

# Exact counterexample search for r(u, v) >= 0 (rational text, "n" or "n/d")
SEARCH_RADIUS = os.getenv("QFIB_SEARCH_RADIUS", "10")
SEARCH_STEP = os.getenv("QFIB_SEARCH_STEP", "1/2")

# Bisection steps allowed when separating a real algebraic number from the roots of another polynomial
REFINE_LIMIT = int(os.getenv("QFIB_REFINE_LIMIT", 200))
