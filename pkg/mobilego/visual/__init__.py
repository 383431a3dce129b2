"""Plots of training curves and parameter efficiency, and plane mosaics.
"""
