"""A game package: rules, tactical reading, state encoding and records.
"""
