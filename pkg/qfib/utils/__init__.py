"""
Utility functions for qfib.
"""
