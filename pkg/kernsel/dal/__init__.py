"""
Data layer for kernsel: result records and file input/output.
"""
