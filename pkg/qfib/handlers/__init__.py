"""
Command handlers: parse a payload, run the engines, collect evidence.
"""
