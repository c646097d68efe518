"""Hidden subgroup problem in nil-2 p-groups: exact group arithmetic, the
quadratic-system solver, a simulator of the quantum hiding procedure and the
classical reductions."""

__version__ = "0.1.0"
