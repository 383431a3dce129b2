"""Go Text Protocol engine.
"""

from mobilego.gtp.engine import EngineSession, format_vertex, parse_vertex
