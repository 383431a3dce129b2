"""An utilities package for all common mobilego modules.
"""
