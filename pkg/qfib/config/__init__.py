"""
Configuration for qfib.
"""
