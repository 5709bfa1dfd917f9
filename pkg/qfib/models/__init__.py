"""
Request and report records.
"""
