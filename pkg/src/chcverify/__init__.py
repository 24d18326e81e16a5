"""Safety verifier for a small functional language via constrained Horn clauses.

Pipeline: parse -> lower -> summarize -> encode -> synchronize -> emit -> solve.
"""

__version__ = "0.1.0"
