"""
Exact engines: polynomials, symbols, fibrations, certificates, CH0 criteria and pencils.
"""
