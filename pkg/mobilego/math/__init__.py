"""Mathematical helpers: validation metrics, tournament statistics and scaling.
"""
