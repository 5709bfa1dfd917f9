"""
Command-line routes for qfib.
"""
